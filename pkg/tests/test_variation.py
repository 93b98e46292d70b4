import io
import json

import numpy as np
import pytest

from hspan import oracles
from hspan.domain import circle_coeffs, disk, make_domain
from hspan.errors import (
    InvalidDomain,
    LineHitsDiagonal,
    NotSimplyConnected,
    StencilOutOfDisk,
)
from hspan.variation import (
    FAMILIES,
    DomainFamily,
    eval_k1,
    eval_k2,
    family,
    fd_derivative,
    first_variation,
    load_family,
    logcosh_subharmonicity,
    rigidity_check,
    second_variation_span,
    sfunction_psh_check,
    subharmonicity_scan,
    t_grid,
)

CIRCLE = np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False))


# coefficients ------------------------------------------------------------------

def test_k1_k2_hartogs():
    fam = family("hartogs")
    # φ = log|z| - Re t: φ_t = -1/2, |φ_z| = 1/(2|z|)
    np.testing.assert_allclose(eval_k1(fam, 0.0, CIRCLE), -1.0, atol=1e-13)
    np.testing.assert_allclose(eval_k2(fam, 0.0, CIRCLE), 0.0, atol=1e-13)


def test_k2_concave_and_ball():
    np.testing.assert_allclose(eval_k2(family("concave"), 0.0, CIRCLE), -1.0, atol=1e-13)
    np.testing.assert_allclose(eval_k2(family("ball"), 0.0, CIRCLE), 1.0, atol=1e-13)
    # k2 = 1/(1 - |t|²)^{3/2} on the ball fiber at t
    t = 0.3 + 0.1j
    z = np.sqrt(1 - abs(t) ** 2) * CIRCLE
    np.testing.assert_allclose(eval_k2(family("ball"), t, z), (1 - abs(t) ** 2) ** -1.5, rtol=1e-12)


def test_k2_invariant_under_positive_rescaling():
    obj = dict(FAMILIES["ball"])
    scaled = DomainFamily.from_dict({**obj, "phi": "3.5*(2 + re(z))*(" + obj["phi"] + ")"})
    fam = family("ball")
    t = 0.2j
    z = fam.domain_at(t).curves[0].point(np.linspace(0, 6, 9))
    np.testing.assert_allclose(eval_k2(scaled, t, z), eval_k2(fam, t, z), rtol=1e-10)
    np.testing.assert_allclose(eval_k1(scaled, t, z), eval_k1(fam, t, z), rtol=1e-10)


# first variation ---------------------------------------------------------------

def test_first_variation_hartogs():
    fam = family("hartogs")
    assert first_variation(fam, 0.0, "alpha") == pytest.approx(oracles.hartogs_dalpha_dt(), abs=1e-8)
    fd = fd_derivative(fam, 0.0, "alpha")
    assert fd == pytest.approx(oracles.hartogs_dalpha_dt(), abs=1e-7)


def test_first_variation_product_vanishes():
    fam = family("product")
    for which in ("alpha", "beta", "span"):
        assert abs(first_variation(fam, 0.1j, which)) < 1e-10


def test_first_variation_translation():
    fam = family("translation")
    # α, β and s are translation invariant
    for which in ("alpha", "beta", "span_full"):
        assert abs(first_variation(fam, 0.2, which)) < 1e-8


MOVING_ZERO = {
    "phi": "abs2(z) - 1",
    "curves": [{"coeffs_t": [[1, "1", "0"]]}],
    "a": "0", "b": "0.25 + 0.5*t", "radius": 0.5,
}


def test_moving_zero_needs_section_terms():
    fam = DomainFamily.from_dict(MOVING_ZERO)
    t = 0.1 + 0.1j
    xi = 0.25 + 0.5 * t
    # s = -2 log(1 - |ξ|²) with ∂ξ/∂t = 1/2
    exact = np.conj(xi) / (1 - abs(xi) ** 2)
    assert first_variation(fam, t, "span_full") == pytest.approx(exact, abs=1e-10)
    assert fd_derivative(fam, t, "span") == pytest.approx(exact, abs=1e-8)
    # the fixed boundary contributes nothing without the section terms
    assert abs(first_variation(fam, t, "span")) < 1e-12
    assert first_variation(fam, t, "alpha") - first_variation(fam, t, "beta") == pytest.approx(exact, abs=1e-10)


def test_moving_hole_first_variation():
    fam = family("moving_hole")
    t = 0.1 + 0.05j
    fd = fd_derivative(fam, t, "span")
    assert first_variation(fam, t, "span_full") == pytest.approx(fd, abs=1e-6)
    for which in ("alpha", "beta"):
        assert first_variation(fam, t, which) == pytest.approx(fd_derivative(fam, t, which), abs=1e-6)


def test_fd_stencil_must_stay_in_disk():
    with pytest.raises(StencilOutOfDisk):
        fd_derivative(family("hartogs"), 0.4999, "alpha")
    with pytest.raises(ValueError):
        first_variation(family("hartogs"), 0.0, "gamma")


# second variation --------------------------------------------------------------

def test_second_variation_hartogs():
    sv = second_variation_span(family("hartogs"), 0.0, parts=True)
    assert sv.boundary == pytest.approx(0.0, abs=1e-12)
    assert sv.total == pytest.approx(oracles.hartogs_lap_span(), abs=1e-6)


def test_second_variation_concave_matches_fd():
    fam = family("concave")
    rhs = second_variation_span(fam, 0.0)
    assert rhs == pytest.approx(oracles.concave_lap_span(), abs=1e-6)
    assert fd_derivative(fam, 0.0, "span", "laplacian") == pytest.approx(rhs, abs=1e-5)


def test_second_variation_moving_hole():
    fam = family("moving_hole")
    t = 0.05j
    assert second_variation_span(fam, t) == pytest.approx(
        fd_derivative(fam, t, "span", "laplacian"), abs=1e-4)


# scans -------------------------------------------------------------------------

def test_t_grid():
    assert len(t_grid(0, 0.3, 1)) == 1
    assert len(t_grid(0, 0.3, 3)) == 5  # corners fall outside the disk
    with pytest.raises(ValueError):
        t_grid(0, 0.3, 4)


def test_scan_pseudoconvex_family():
    rep = subharmonicity_scan(family("hartogs"), t_grid(0, 0.2, 3), workers=2)
    assert rep.flags["pseudoconvex"] and rep.flags["span_subharmonic"]
    assert rep.flags["beta_superharmonic"] and rep.flags["failed_points"] == 0
    # on the disk of radius e^x the zero sits at relative distance ξ e^{-x}
    ref = [oracles.hartogs_lap_span(0.25 * np.exp(-x)) for x in rep.column("t_re")]
    np.testing.assert_allclose(rep.column("lap_span"), ref, atol=1e-4)
    buf = io.StringIO()
    rep.to_csv(buf)
    assert buf.getvalue().splitlines()[0].startswith("t_re,t_im,span")


def test_scan_concave_family_fails():
    rep = subharmonicity_scan(family("concave"), t_grid(0, 0.2, 3))
    assert not rep.flags["pseudoconvex"]
    assert not rep.flags["span_subharmonic"]


def test_scan_records_failed_points():
    rep = subharmonicity_scan(family("hartogs"), [0.0, 0.4995])
    assert rep.rows[1]["status"] == "StencilOutOfDisk"
    assert rep.flags["failed_points"] == 1


def test_logcosh():
    rep = logcosh_subharmonicity(family("hartogs"), t_grid(0, 0.2, 3))
    assert rep.subharmonic and rep.max_identity_residual < 1e-9
    np.testing.assert_allclose(rep.delta, [oracles.hartogs_delta(t.real) for t in rep.ts], atol=1e-10)
    with pytest.raises(NotSimplyConnected):
        logcosh_subharmonicity(family("moving_hole"), [0.0])


def test_sfunction_line_check():
    md = make_domain(circle_coeffs(1.0), [circle_coeffs(0.2, 0.4 + 0.3j)], -0.4, 0.1)
    rep = sfunction_psh_check(md, 0.0, -0.5, deta=1.0, radius=0.1, n=3)
    assert rep.strict and np.all(rep.span > 0)
    with pytest.raises(LineHitsDiagonal):
        sfunction_psh_check(md, 0.0, 0.1, radius=0.1, n=3)


def test_sfunction_line_on_disk_closed_form():
    # s(0, η) = -2 log(1 - |η|²) with ∂²s/∂η∂η̄ = 2/(1 - |η|²)²
    md = disk(1.0, 0.0, 0.0, 0.5)
    rep = sfunction_psh_check(md, 0.0, 0.5, radius=0.1, n=3)
    eta = 0.5 + np.array(rep.us)
    np.testing.assert_allclose(rep.span, -2 * np.log(1 - np.abs(eta) ** 2), atol=1e-10)
    np.testing.assert_allclose(rep.laplacian, 2 / (1 - np.abs(eta) ** 2) ** 2, rtol=1e-5)
    with pytest.raises(LineHitsDiagonal):
        sfunction_psh_check(md, 0.0, 0.1, radius=0.3, n=3)


def test_rigidity():
    for name in ("product", "translation"):
        assert rigidity_check(family(name), t_grid(0, 0.2, 3)).trivial
    rep = rigidity_check(family("hartogs"), t_grid(0, 0.2, 3))
    assert not rep.trivial and rep.span_deviation > 1e-3


def test_moving_hole_rigidity_sees_slits():
    rep = rigidity_check(family("moving_hole"), [0.0, 0.1, 0.1j])
    assert rep.normalized_endpoints.shape == (3, 2)
    assert not rep.trivial


# family files ------------------------------------------------------------------

def test_family_json_round_trip(tmp_path):
    fam = family("moving_hole")
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(fam.to_dict()))
    back = load_family(str(path))
    assert back.to_dict()["phi"] == fam.phi.text
    assert back.validate() < 1e-8
    md0, md1 = fam.domain_at(0.1), back.domain_at(0.1)
    assert md0.fingerprint() == md1.fingerprint()


def test_family_validation_rejects_bad_phi():
    bad = DomainFamily.from_dict({**FAMILIES["product"], "phi": "abs2(z) - 1.1"})
    with pytest.raises(InvalidDomain):
        bad.validate()
    with pytest.raises(InvalidDomain):
        DomainFamily.from_dict({**FAMILIES["product"], "a": "z"})
