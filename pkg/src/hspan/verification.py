"""Acceptance checks against closed forms and identities.

Every criterion is a function returning a list of :class:`Check` rows; the
``verify`` command and the acceptance test both run them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .domain import INSIDE, circle_coeffs, contains, disk, make_domain, sample_boundary
from .principal import (
    build_H,
    build_slit_map,
    compute_principal_pair,
    convexity_check,
    e_log_area,
    eval_F,
    boundary_F,
    extrema_census,
)
from .span import check_span_distance_identity, exhaustion_sequence, harmonic_span, poincare_distance
from .variation import (
    family,
    fd_derivative,
    first_variation,
    logcosh_subharmonicity,
    second_variation_span,
    subharmonicity_scan,
)

N = 256


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: float
    tol: float
    passed: bool

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name}: value={self.value:.9g} target={self.target:.9g} tol={self.tol:.3g}"


def _close(name, value, target, tol, rel=False):
    err = abs(value - target)
    if rel:
        err /= max(abs(target), 1e-300)
    return Check(name, float(np.real(value)), float(np.real(target)), tol, bool(err <= tol))


def _bound(name, value, limit, upper=True):
    ok = value <= limit if upper else value >= limit
    return Check(name, float(value), float(limit), 0.0, bool(ok))


# ---------------------------------------------------------------------------
# test domains


def test_domains():
    """Analytic-boundary test set: disk, ellipse, 2- and 3-connected domains."""
    return {
        "disk": disk(1.0, 0.0, 0.0, 0.5),
        "ellipse": make_domain({1: 1.0, -1: 0.2}, (), 0.0, 0.4),
        "two_connected": make_domain(
            circle_coeffs(1.0), [{0: 0.1 + 0.45j, 1: 0.2, 2: 0.02}], -0.4, 0.3),
        "three_connected": make_domain(
            {1: 1.0, 2: 0.05, -1: 0.03},
            [{0: 0.45 + 0.3j, 1: 0.15, -1: 0.02}, {0: -0.2 - 0.5j, 1: 0.15, 2: 0.01}],
            -0.45, 0.25 - 0.05j),
    }


def random_simply_connected(seed, count=5):
    """Perturbed circles with a = 0 and a random zero point."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        coeffs = {1: 1.0}
        for k in (-2, -1, 2, 3):
            coeffs[k] = complex(*(0.04 * rng.standard_normal(2)))
        b = 0.4 * np.sqrt(rng.uniform(0.3, 1.0)) * np.exp(2j * np.pi * rng.uniform())
        out.append(make_domain(coeffs, (), 0.0, b))
    return out


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    pair = compute_principal_pair(disk(1.0, 0.0, 0.0, 0.5), N)
    return [
        _close("disk alpha = log(16/3)", pair.alpha, np.log(16 / 3), 1e-8),
        _close("disk beta = log 3", pair.beta, np.log(3), 1e-8),
        _close("disk span = 2 log(4/3)", pair.span, 2 * np.log(4 / 3), 1e-8),
    ]


def criterion_2():
    pair = compute_principal_pair(disk(1.0, 0.0, 0.0, 0.5), N)
    case = oracles.DiskCase(1.0, 0.5)
    out = []
    for label, m, ref in (("P", build_slit_map(pair, "circular"), oracles.disk_P),
                          ("Q", build_slit_map(pair, "radial"), oracles.disk_Q),
                          ("H", build_H(pair), oracles.disk_H)):
        v = m(-0.5)
        target = complex(ref(case, -0.5))
        out.append(Check(f"disk {label}(-0.5) = {target.real:g}", v.real, target.real, 1e-7,
                         bool(abs(v - target) <= 1e-7)))
    return out


def criterion_3():
    out = []
    for name, md in test_domains().items():
        pair = compute_principal_pair(md, N)
        out.append(_close(f"E_log = (pi/2) s on {name}", e_log_area(pair),
                          np.pi / 2 * pair.span, 1e-6, rel=True))
    pair = compute_principal_pair(disk(1.0, 0.0, 0.0, 0.5), N)
    out.append(_close("disk E_log = pi log(4/3)", e_log_area(pair), np.pi * np.log(4 / 3), 1e-7))
    return out


def criterion_4():
    out = []
    for k, md in enumerate(random_simply_connected(2024)):
        out.append(_bound(f"|s - 4 log cosh d| on random domain {k}",
                          check_span_distance_identity(md, N), 1e-6))
    md = disk(1.0, 0.0, 0.0, 0.5)
    d = poincare_distance(md, N)
    out.append(_close("disk d = (1/2) log 3", d, 0.5 * np.log(3), 1e-8))
    out.append(_close("disk 4 log cosh d = 2 log(4/3)", 4 * np.log(np.cosh(d)), 2 * np.log(4 / 3), 1e-8))
    return out


def _interior_samples(md, grid, count, seed):
    rng = np.random.default_rng(seed)
    z = grid.z.ravel()
    lo, hi = z.real.min(), z.real.max()
    lo2, hi2 = z.imag.min(), z.imag.max()
    pts = []
    while len(pts) < count:
        p = complex(rng.uniform(lo, hi), rng.uniform(lo2, hi2))
        if (contains(grid, p) == INSIDE and abs(p - md.a) > 0.05 and abs(p - md.b) > 0.05):
            pts.append(p)
    return np.array(pts)


def criterion_5():
    out = []
    doms = test_domains()
    for name in ("two_connected", "three_connected"):
        md = doms[name]
        pair = compute_principal_pair(md, N)
        bf = boundary_F(pair)
        out.append(_bound(f"max |Re F| on boundary nodes of {name}", np.abs(bf.real).max(), 1e-6))
        pts = _interior_samples(md, pair.grid, 50, 7)
        out.append(_bound(f"min Re F at 50 interior points of {name}",
                          eval_F(pair, pts).real.min(), 0.0, upper=False))
        fa = eval_F(pair, md.a)
        out.append(_close(f"F(a) = 1 on {name}", abs(fa - 1) + 1, 1.0, 1e-7))
        census = extrema_census(pair)
        ok = all(c["interleaved"] for c in census)
        out.append(Check(f"2 + 2 interleaved boundary extrema per curve of {name}",
                         float(sum(c["interleaved"] for c in census)), float(len(census)), 0.0, ok))
    return out


def criterion_6():
    out = []
    for name, md in test_domains().items():
        pair = compute_principal_pair(md, N)
        for j in range(md.connectivity):
            rep = convexity_check(pair, j, 512)
            ok = rep.max_curvature < 0 and rep.crossings == 0
            out.append(Check(f"curvature of -log H(C_{j}) < 0 at 512 nodes on {name}",
                             rep.max_curvature, 0.0, 0.0, bool(ok)))
    return out


def criterion_7():
    s_disk = harmonic_span(disk(1.0, 0.0, 0.0, 0.5), N).s
    holed = make_domain(circle_coeffs(1.0), [circle_coeffs(0.1, 0.7)], 0.0, 0.5)
    s_holed = harmonic_span(holed, N).s
    out = [Check("adding the hole |z - 0.7| < 0.1 increases s", s_holed - s_disk, 0.0, 0.0,
                 bool(s_holed > s_disk))]
    rng = np.random.default_rng(11)
    for name in ("ellipse", "two_connected", "three_connected"):
        md = test_domains()[name]
        s0 = harmonic_span(md, N).s
        lam = complex(*rng.uniform(0.5, 2.0, 2))
        c = complex(*rng.uniform(-1, 1, 2))
        s1 = harmonic_span(md.transformed(lam, c), N).s
        out.append(_close(f"s invariant under affine transport on {name}", s1, s0, 1e-7, rel=True))
    return out


def criterion_8():
    H = family("hartogs")
    fv = first_variation(H, 0.0, "alpha", N)
    fd = fd_derivative(H, 0.0, "alpha", N=N)
    P = family("product")
    return [
        _close("Hartogs d alpha/dt (0) = -1/15 from the formula", fv, oracles.hartogs_dalpha_dt(), 1e-6),
        _bound("Hartogs |formula - FD|", abs(fv - fd), 1e-4),
        _bound("product family |d alpha/dt| (formula)", abs(first_variation(P, 0.0, "alpha", N)), 1e-8),
        _bound("product family |d alpha/dt| (FD)", abs(fd_derivative(P, 0.0, "alpha", N=N)), 1e-8),
    ]


def criterion_9():
    H = family("hartogs")
    sv = second_variation_span(H, 0.0, N=N)
    lap = fd_derivative(H, 0.0, "span", "laplacian", N=N)
    return [
        _close("Hartogs second variation = 32/225", sv, oracles.hartogs_lap_span(), 1e-3),
        _close("second variation matches the FD Laplacian", sv, lap, 1e-3, rel=True),
    ]


PSEUDOCONVEX = ("hartogs", "ball", "moving_hole", "product", "translation")


def criterion_10():
    out = []
    ts = None
    for name in PSEUDOCONVEX:
        fam = family(name)
        rep = subharmonicity_scan(fam, ts, N=N)
        f = rep.flags
        pc = f["min_k2"] >= -1e-8
        out.append(Check(f"{name}: min k2 >= -1e-8", f["min_k2"], -1e-8, 0.0, bool(pc)))
        out.append(Check(f"{name}: min lap s >= -1e-5", f["min_lap_span"], -1e-5, 0.0,
                         bool(f["min_lap_span"] >= -1e-5 and f["failed_points"] == 0)))
        out.append(Check(f"{name}: max lap beta <= 1e-5", f["max_lap_beta"], 1e-5, 0.0,
                         bool(f["max_lap_beta"] <= 1e-5 and f["failed_points"] == 0)))
    C = family("concave")
    rep = subharmonicity_scan(C, N=N)
    row0 = [r for r in rep.rows if r["t_re"] == 0 and r["t_im"] == 0][0]
    out.append(_close("concave lap s(0) = -2/15", row0["lap_span"], oracles.concave_lap_span(), 1e-3))
    out.append(_close("concave min k2 = -1", rep.flags["min_k2"], -1.0, 1e-8))
    return out


def criterion_11():
    rep = logcosh_subharmonicity(family("hartogs"), N=N)
    return [
        _bound("Hartogs min lap log cosh d >= -1e-6", rep.lap_delta.min(), -1e-6, upper=False),
        _bound("Hartogs max |log cosh d - s/4|", rep.max_identity_residual, 1e-6),
    ]


def criterion_12():
    radii = [1 - 1 / (n + 2) for n in range(1, 9)]
    doms = [disk(r, 0.0, 0.0, 0.5) for r in radii]
    rep = exhaustion_sequence(doms, 0.0, 0.5, full=disk(1.0, 0.0, 0.0, 0.5), N=N)
    closed = np.array([oracles.disk_span(0.5 / r) for r in radii])
    limit = 2 * np.log(4 / 3)
    strictly = bool(np.all(np.diff(rep.spans) < 0))
    return [
        Check("s_n strictly decreasing", float(np.diff(rep.spans).max()), 0.0, 0.0, strictly),
        _bound("max |s_n - closed form|", float(np.abs(rep.spans - closed).max()), 1e-8),
        _close("full-domain span = 2 log(4/3)", rep.limit, limit, 1e-8),
        _close("gap s_8 - s matches closed form", rep.gap, closed[-1] - limit, 1e-8),
    ]


def criterion_13():
    out = []
    for name, md in test_domains().items():
        p1 = compute_principal_pair(md, 128)
        p2 = compute_principal_pair(md, 256)
        diff = max(abs(p1.alpha - p2.alpha), abs(p1.beta - p2.beta),
                   abs(e_log_area(p1) - e_log_area(p2)),
                   float(np.abs(p1.c - p2.c).max()))
        out.append(_bound(f"N 128 -> 256 change of constants on {name}", diff, 1e-9))
    return out


CRITERIA = {
    1: ("disk constants", criterion_1),
    2: ("map values", criterion_2),
    3: ("area identity", criterion_3),
    4: ("distance identity", criterion_4),
    5: ("F-function", criterion_5),
    6: ("convexity", criterion_6),
    7: ("monotonicity and invariance", criterion_7),
    8: ("first variation", criterion_8),
    9: ("second variation", criterion_9),
    10: ("subharmonicity implication", criterion_10),
    11: ("log cosh d", criterion_11),
    12: ("exhaustion", criterion_12),
    13: ("solver regression", criterion_13),
}

SUITES = {
    "disk": (1, 2),
    "identities": (3, 4, 5, 6, 7, 12, 13),
    "variation": (8, 9, 10, 11),
    "all": tuple(range(1, 14)),
}


def run_suite(name):
    """Run a suite; returns a list of (criterion number, title, checks)."""
    if name not in SUITES:
        raise KeyError(name)
    return [(k, CRITERIA[k][0], CRITERIA[k][1]()) for k in SUITES[name]]
