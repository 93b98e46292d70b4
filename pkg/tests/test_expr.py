import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hspan.errors import ExpressionError
from hspan.expr import Jet, parse

EXPRS = [
    "-log(1 + abs2(t))/2",
    "exp(re(t)) * z - conj(z) * t / 3",
    "abs2(z - 0.25) + pow(abs2(t), 2)",
    "sqrt(1 + abs2(t)) * log(2 + z*conj(z))",
    "pow(1 + re(t*conj(z)), 1.5) + im(z)",
    "-(t + conj(t))/2",
]

coord = st.floats(-0.4, 0.4)


def _fd_grad_hess(f, x, h=1e-4):
    """Central differences in the four real coordinates."""
    def at(y):
        return complex(f(complex(y[0], y[1]), complex(y[2], y[3])))

    E = np.eye(4)
    g = np.array([(at(x + h * E[k]) - at(x - h * E[k])) / (2 * h) for k in range(4)])
    H = np.empty((4, 4), complex)
    for i in range(4):
        for j in range(4):
            H[i, j] = (at(x + h * (E[i] + E[j])) - at(x + h * (E[i] - E[j]))
                       - at(x - h * (E[i] - E[j])) + at(x - h * (E[i] + E[j]))) / (4 * h * h)
    return g, H


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(EXPRS), coord, coord, coord, coord)
def test_jet_matches_finite_differences(text, tr, ti, zr, zi):
    e = parse(text)
    t, z = complex(tr, ti), complex(zr, zi)
    j = e.jet(t, z)
    assert complex(j.v) == pytest.approx(complex(e(t, z)), abs=1e-13)
    g, H = _fd_grad_hess(e, np.array([tr, ti, zr, zi]))
    np.testing.assert_allclose(j.g, g, atol=1e-6)
    np.testing.assert_allclose(j.h, H, atol=1e-5)


def test_wirtinger_accessors():
    # φ = |t|² |z|² + t z̄
    j = parse("abs2(t) * abs2(z) + t*conj(z)").jet(0.3 - 0.2j, 0.1 + 0.4j)
    t, z = 0.3 - 0.2j, 0.1 + 0.4j
    assert j.d_t == pytest.approx(np.conj(t) * abs(z) ** 2 + np.conj(z))
    assert j.d_tbar == pytest.approx(t * abs(z) ** 2)
    assert j.d_z == pytest.approx(abs(t) ** 2 * np.conj(z))
    assert j.d_tt_bar == pytest.approx(abs(z) ** 2)
    assert j.d_zz_bar == pytest.approx(abs(t) ** 2)
    assert j.d_tbar_z == pytest.approx(t * np.conj(z))


def test_constant_expression_is_a_jet():
    j = parse("2*pi").jet(0.1, 0.2)
    assert isinstance(j, Jet) and j.v == pytest.approx(2 * np.pi)
    assert not np.any(j.g) and not np.any(j.h)
    assert parse("i*i")() == -1


def test_vectorised_evaluation():
    e = parse("abs2(z) - 1 + re(t)")
    z = np.array([0.1, 0.5j, -0.3 + 0.2j])
    j = e.jet(0.2, z)
    np.testing.assert_allclose(j.v.real, np.abs(z) ** 2 - 0.8)
    assert j.g.shape == (4, 3) and j.h.shape == (4, 4, 3)


def test_pow_and_sqrt():
    assert parse("pow(2, 10)")() == 1024
    assert parse("sqrt(4)")() == pytest.approx(2)
    j = parse("pow(z, 3)").jet(0, 0.0)
    assert j.v == 0 and np.all(np.isfinite(j.h))
    assert parse("pow(z, 0.5)")(0, 4.0) == pytest.approx(2)


def test_variables():
    assert parse("abs2(z) - 1").variables == {"z"}
    assert parse("t*conj(z) + pi").variables == {"t", "z"}


@pytest.mark.parametrize("text,pos", [
    ("1 + ", 3),  # just past the last token
    ("abs2(z", 6),
    ("foo(z)", 0),
    ("z $ 1", 2),
    ("pow(z)", 0),  # arity errors point at the name
    ("(t))", 3),
    ("w + 1", 0),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ExpressionError) as err:
        parse(text)
    assert err.value.position == pos


def test_empty_expression():
    with pytest.raises(ExpressionError):
        parse("   ")
