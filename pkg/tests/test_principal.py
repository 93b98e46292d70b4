import numpy as np
import pytest

from hspan import oracles
from hspan.domain import circle_coeffs, disk, make_domain
from hspan.errors import MarkedPointsTooClose, NearBoundary, PoleOfF
from hspan.principal import (
    boundary_F,
    build_H,
    build_slit_map,
    compute_principal_pair,
    convexity_check,
    e_log_area,
    eval_F,
    extract_slit_data,
    extrema_census,
    residue_at_pole,
    univalence_counts,
)

CASE = oracles.DiskCase(1.0, 0.5)


@pytest.fixture(scope="module")
def disk_pair():
    return compute_principal_pair(disk(1.0, 0.0, 0.0, 0.5))


@pytest.fixture(scope="module")
def holed_pair():
    md = make_domain({1: 1.0, 2: 0.05}, [{0: 0.1 + 0.45j, 1: 0.2, 2: 0.02}], -0.4, 0.3)
    return compute_principal_pair(md)


def test_disk_constants(disk_pair):
    alpha, beta, s = oracles.disk_constants(CASE)
    assert disk_pair.alpha == pytest.approx(alpha, abs=1e-10)
    assert disk_pair.beta == pytest.approx(beta, abs=1e-10)
    assert disk_pair.span == pytest.approx(s, abs=1e-10)


def test_marked_points_too_close():
    md = disk(1.0, 0.0, 0.0, 0.05)
    with pytest.raises(MarkedPointsTooClose):
        compute_principal_pair(md)


def test_normalization_at_pole(holed_pair):
    # p(z) - log 1/|z - a| -> 0 as z -> a, likewise for q; circle means of
    # the harmonic remainder equal its value at a, so the drift must vanish
    a = holed_pair.domain.a
    th = 2 * np.pi * np.arange(32) / 32
    for f in (holed_pair.p, holed_pair.q):
        for r in (1e-1, 1e-2, 1e-3):
            z = a + r * np.exp(1j * th)
            assert abs(np.mean(f.value(z) + np.log(np.abs(z - a)))) < 1e-7


def test_alpha_at_least_beta(holed_pair):
    assert holed_pair.alpha > holed_pair.beta


def test_fluxes_vanish(holed_pair):
    for f in (holed_pair.p, holed_pair.q):
        assert np.abs(f.fluxes(regular_only=False)).max() < 1e-8


def test_conjugate_periods_vanish(holed_pair):
    # ∮ *dp = ∮ ∂p/∂n ds; the same quantity for q must also vanish
    g = holed_pair.grid
    for f in (holed_pair.p, holed_pair.q):
        dn = np.real(f.boundary_potential_deriv() * g.normal)
        assert np.abs((dn * g.weight).sum(axis=1)).max() < 1e-8


def test_disk_map_values(disk_pair):
    P = build_slit_map(disk_pair, "circular")
    Q = build_slit_map(disk_pair, "radial")
    H = build_H(disk_pair)
    assert P(-0.5) == pytest.approx(-3.2, abs=1e-9)
    assert Q(-0.5) == pytest.approx(-5.0, abs=1e-9)
    assert H(-0.5) == pytest.approx(-4.0, abs=1e-9)
    assert H(-0.5) ** 2 == pytest.approx(P(-0.5) * Q(-0.5), abs=1e-9)
    z = np.array([0.3j, -0.2 + 0.4j, 0.6])
    np.testing.assert_allclose(P(z), oracles.disk_P(CASE, z), atol=1e-10)
    np.testing.assert_allclose(Q(z), oracles.disk_Q(CASE, z), atol=1e-10)


def test_zero_and_residue(holed_pair):
    b = holed_pair.domain.b
    for m in (build_slit_map(holed_pair, "circular"), build_slit_map(holed_pair, "radial"),
              build_H(holed_pair)):
        assert abs(m(b)) < 1e-7
        np.testing.assert_allclose(residue_at_pole(m), 1.0, atol=1e-7)


def test_boundary_constancy(holed_pair):
    P = build_slit_map(holed_pair, "circular").boundary_values()
    Q = build_slit_map(holed_pair, "radial").boundary_values()
    for j in range(2):
        mod = np.abs(P[j])
        assert np.ptp(mod) <= 1e-7 * mod.mean()
        arg = np.unwrap(np.angle(Q[j]))
        assert np.ptp(arg) < 1e-7


def test_near_boundary_evaluation(disk_pair):
    with pytest.raises(NearBoundary):
        build_H(disk_pair)(0.999)


def test_univalence_on_disk(disk_pair):
    rng = np.random.default_rng(5)
    w = rng.uniform(-6, 6, 50) + 1j * rng.uniform(-6, 6, 50)
    counts = univalence_counts(disk_pair, w)
    assert set(counts) <= {0, 1}
    # the image of H is the exterior of the image of the boundary circle 1/z - 2
    inside_image = np.abs(1 / (w + 2)) > 1
    assert np.all(counts[inside_image] == 1)


def test_disk_slit_data(disk_pair):
    circ = extract_slit_data(build_slit_map(disk_pair, "circular")).slits[0]
    assert circ.level == pytest.approx(2.0, abs=1e-10)
    th = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    np.testing.assert_allclose(np.abs(oracles.disk_P(CASE, np.exp(1j * th))), 2.0)
    assert 0 < circ.extent[1] - circ.extent[0] < 2 * np.pi
    rad = extract_slit_data(build_slit_map(disk_pair, "radial")).slits[0]
    assert abs(np.exp(1j * rad.level) + 1) < 1e-10
    # Q(e^{iθ}) = 2cos θ - 2.5 ranges over [-4.5, -0.5]
    q = oracles.disk_Q(CASE, np.exp(1j * th))
    assert rad.extent == pytest.approx((np.abs(q).min(), np.abs(q).max()), abs=1e-9)


def test_slit_invariants(holed_pair):
    for kind in ("circular", "radial"):
        for s in extract_slit_data(build_slit_map(holed_pair, kind)).slits:
            lo, hi = s.extent
            if kind == "circular":
                assert 0 < hi - lo < 2 * np.pi
            else:
                assert 0 < lo <= hi < np.inf


def test_interleaving(holed_pair):
    for row in extrema_census(holed_pair):
        assert len(row["arg_P_extrema"]) == 2 and len(row["log_Q_extrema"]) == 2
        assert row["interleaved"]


def test_F_properties(holed_pair):
    assert eval_F(holed_pair, holed_pair.domain.a) == pytest.approx(1.0, abs=1e-12)
    bf = boundary_F(holed_pair)
    assert np.abs(bf.real).max() < 1e-6
    pts = np.array([0.0, -0.6j, 0.5 - 0.3j, -0.7 + 0.2j, 0.2 + 0.2j])
    assert np.all(eval_F(holed_pair, pts).real > 0)


def test_F_pole_at_critical_point(holed_pair):
    # a_j^(k) are the boundary zeros of ∂p/∂z; F blows up there
    census = extrema_census(holed_pair)
    from hspan.bie import trig_eval

    t = census[0]["arg_P_extrema"][0]
    z = complex(trig_eval(holed_pair.grid.z[0], t))
    with pytest.raises(PoleOfF):
        from hspan.principal import _F_from

        rp = holed_pair.p.regular_deriv(np.array([z]))
        # force the exact zero of the denominator
        a, b = holed_pair.domain.a, holed_pair.domain.b
        rp = -(b - a) / ((z - a) * (z - b)) + 0 * rp
        _F_from(holed_pair, rp, rp, np.array([z]))


def test_e_log_disk_and_identity(disk_pair, holed_pair):
    assert e_log_area(disk_pair) == pytest.approx(np.pi * np.log(4 / 3), abs=1e-10)
    assert e_log_area(holed_pair) == pytest.approx(np.pi / 2 * holed_pair.span, rel=1e-8)


def test_e_log_small_separation():
    vals = [e_log_area(compute_principal_pair(disk(1.0, 0.0, -d, d))) for d in (0.2, 0.1, 0.07)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 0.2


def test_convexity(disk_pair, holed_pair):
    rep = convexity_check(disk_pair, 0)
    assert rep.one_signed and rep.max_curvature < 0 and rep.crossings == 0
    # closed form: -log H on the circle is -log(e^{-iθ} - 2)
    th = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    tau = -np.log(np.exp(-1j * th) - 2)
    d1 = 1j * np.exp(-1j * th) / (np.exp(-1j * th) - 2)
    d2 = np.gradient(d1, th)
    kappa = np.imag(np.conj(d1) * d2) / np.abs(d1) ** 3
    assert np.sign(kappa).min() == np.sign(kappa).max()
    assert tau.shape == (512,)
    for j in range(2):
        r = convexity_check(holed_pair, j)
        assert r.max_curvature < 0 and r.crossings == 0
