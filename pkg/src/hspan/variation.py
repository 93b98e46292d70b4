"""Parametric families R(t), the coefficients k1, k2, and variation formulas.

A family carries Fourier coefficients of every boundary curve as
expressions in t, a defining function φ(t, z) that is negative inside R(t),
and holomorphic sections a(t) (pole) and b(t) (zero).

Variation formulas are evaluated in the moving frame w = z - a(t), where
the pole sits at the origin for every t; there φ̃(t, w) = φ(t, w + a(t))
and the zero point is ξ(t) = b(t) - a(t).

k1 is taken as φ_t / |φ_z|; with it the first-variation formula matches
finite differences on every shipped family.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bie import spectral_diff
from .domain import INSIDE, build_curve, contains, MarkedDomain
from .errors import (
    BoundaryNotSmooth,
    HspanError,
    InvalidDomain,
    LineHitsDiagonal,
    NotSimplyConnected,
    StencilOutOfDisk,
)
from .expr import Jet, parse
from .principal import build_slit_map, compute_principal_pair, extract_slit_data
from .span import harmonic_span, poincare_distance

DEFAULT_HT = 1e-3


def thread_count():
    """Worker count from HSL_THREADS (0 or unset means all cores)."""
    try:
        n = int(os.environ.get("HSL_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _pmap(fn, items, workers=None):
    items = list(items)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class CurveFamily:
    modes: tuple
    re: tuple
    im: tuple
    hole: bool = False

    def coeffs_at(self, t):
        return [(k, complex(r(t)).real + 1j * complex(i(t)).real)
                for k, r, i in zip(self.modes, self.re, self.im)]


@dataclass(frozen=True)
class DomainFamily:
    """R(t) for |t| < radius with sections a(t), b(t) and defining function φ."""

    phi: object
    curves: tuple
    a: object
    b: object
    radius: float
    name: str = ""

    @classmethod
    def from_dict(cls, obj, name=""):
        curves = []
        for c in obj["curves"]:
            modes, re_, im_ = [], [], []
            for k, r, i in c["coeffs_t"]:
                modes.append(int(k))
                re_.append(parse(r))
                im_.append(parse(i))
            curves.append(CurveFamily(tuple(modes), tuple(re_), tuple(im_), bool(c.get("hole", False))))
        fam = cls(parse(obj["phi"]), tuple(curves), parse(obj.get("a", "0")),
                  parse(obj.get("b", "0.25")), float(obj.get("radius", 1.0)),
                  obj.get("name", name))
        for e in (fam.a, fam.b) + tuple(x for c in curves for x in c.re + c.im):
            if "z" in e.variables:
                raise InvalidDomain(f"expression {e.text!r} may only depend on t")
        return fam

    def to_dict(self):
        return {
            "name": self.name,
            "phi": self.phi.text,
            "curves": [{"coeffs_t": [[k, r.text, i.text] for k, r, i in zip(c.modes, c.re, c.im)],
                        "hole": c.hole} for c in self.curves],
            "a": self.a.text,
            "b": self.b.text,
            "radius": self.radius,
        }

    @property
    def connectivity(self):
        return len(self.curves)

    def sections(self, t):
        return complex(self.a(t)), complex(self.b(t))

    def section_derivs(self, t):
        """(a'(t), b'(t)) from the jets of the section expressions."""
        return complex(self.a.jet(t).d_t), complex(self.b.jet(t).d_t)

    def domain_at(self, t, recentre=False):
        outer = None
        holes = []
        for c in self.curves:
            curve = build_curve(c.coeffs_at(t), "negative" if c.hole else "positive")
            if c.hole:
                holes.append(curve)
            else:
                outer = curve
        a, b = self.sections(t)
        md = MarkedDomain(outer, tuple(holes), a, b)
        return md.transformed(1.0, -a) if recentre else md

    def phi_jet(self, t, z, recentre=False):
        """Jet of φ at (t, z); with ``recentre`` the jet of φ(t, w + a(t)), w = z - a(t)."""
        z = np.asarray(z, dtype=complex)
        if not recentre:
            return self.phi.jet(t, z)
        a_t = complex(self.a(t))
        w = z - a_t
        zj = Jet.variable(w, 2) + self.a.jet(np.full(w.shape, t, complex))
        return self.phi.jet(np.full(w.shape, t, complex), z, z_jet=zj)

    def check_t(self, t, margin=0.0):
        if abs(t) + margin > self.radius:
            raise StencilOutOfDisk(f"|t| + {margin:g} exceeds the parameter radius {self.radius:g}")

    def validate(self, ts=None, n=64, tol=1e-8):
        """Check φ = 0 on the curves, interior sections and |φ_z| > 0."""
        if ts is None:
            r = 0.9 * self.radius
            ts = [0.0] + [r * np.exp(2j * np.pi * k / 6) for k in range(6)]
        th = 2 * np.pi * np.arange(n) / n
        worst = 0.0
        for t in ts:
            md = self.domain_at(t)
            for c in md.curves:
                z = c.point(th)
                jet = self.phi.jet(t, z)
                worst = max(worst, float(np.abs(jet.v).max()))
                if np.abs(jet.d_z).min() < 1e-10:
                    raise BoundaryNotSmooth(f"φ_z vanishes on ∂R({t})")
        if worst > tol:
            raise InvalidDomain(f"defining function is {worst:.3g} on the curves (tolerance {tol:g})")
        return worst


def load_family(path):
    with open(path) as fh:
        obj = json.load(fh)
    return DomainFamily.from_dict(obj, name=os.path.splitext(os.path.basename(path))[0])


# Shipped test families.  Levi-flat, pseudoconvex and concave controls.
FAMILIES = {
    "hartogs": {
        "phi": "0.5*log(abs2(z)) - re(t)",
        "curves": [{"coeffs_t": [[1, "exp(re(t))", "0"]]}],
        "a": "0", "b": "0.25", "radius": 0.5,
    },
    "product": {
        "phi": "abs2(z) - 1",
        "curves": [{"coeffs_t": [[1, "1", "0"]]}],
        "a": "0", "b": "0.25", "radius": 0.5,
    },
    "translation": {
        "phi": "abs2(z - t) - 1",
        "curves": [{"coeffs_t": [[0, "re(t)", "im(t)"], [1, "1", "0"]]}],
        "a": "t", "b": "t + 0.25", "radius": 0.5,
    },
    "concave": {
        "phi": "abs2(z) - 1 - abs2(t)",
        "curves": [{"coeffs_t": [[1, "sqrt(1 + abs2(t))", "0"]]}],
        "a": "0", "b": "0.25", "radius": 0.5,
    },
    "ball": {
        "phi": "abs2(z) - 1 + abs2(t)",
        "curves": [{"coeffs_t": [[1, "sqrt(1 - abs2(t))", "0"]]}],
        "a": "0", "b": "0.25", "radius": 0.5,
    },
    "moving_hole": {
        "phi": "-(abs2(z) - 1)*(0.04 - abs2(z - 0.4 - 0.3*t))",
        "curves": [
            {"coeffs_t": [[1, "1", "0"]]},
            {"coeffs_t": [[0, "0.4 + 0.3*re(t)", "0.3*im(t)"], [1, "0.2", "0"]], "hole": True},
        ],
        "a": "-0.4", "b": "-0.1", "radius": 0.5,
    },
}


def family(name):
    return DomainFamily.from_dict(FAMILIES[name], name=name)


# ---------------------------------------------------------------------------
# boundary coefficients


def _smooth_phi(jet):
    pz = np.abs(jet.d_z)
    if np.any(pz < 1e-10):
        raise BoundaryNotSmooth("|φ_z| vanishes at a boundary node")
    return pz


def eval_k1(fam, t, z, recentre=False):
    """Hadamard coefficient φ_t / |φ_z| at boundary points ``z``."""
    jet = fam.phi_jet(t, z, recentre)
    return jet.d_t / _smooth_phi(jet)


def eval_k2(fam, t, z, recentre=False):
    """Levi curvature at boundary points ``z`` (real)."""
    jet = fam.phi_jet(t, z, recentre)
    pz = _smooth_phi(jet)
    num = (jet.d_tt_bar * pz ** 2
           - 2 * np.real(jet.d_tbar_z * jet.d_t * np.conj(jet.d_z))
           + np.abs(jet.d_t) ** 2 * jet.d_zz_bar)
    k2 = num / pz ** 3
    scale = 1.0 + np.abs(k2)
    if np.any(np.abs(k2.imag) > 1e-12 * scale):
        raise ValueError("k2 has a non-negligible imaginary part; is φ real-valued?")
    return np.real(k2)


# ---------------------------------------------------------------------------
# first and second variation


@dataclass(frozen=True)
class _Fiber:
    t: complex
    pair: object
    a: complex


def _fiber(fam, t, N):
    pair = compute_principal_pair(fam.domain_at(t, recentre=True), N)
    return _Fiber(complex(t), pair, fam.sections(t)[0])


def _boundary_terms(fam, fib):
    g = fib.pair.grid
    z = g.z + fib.a
    pz2 = np.abs(0.5 * fib.pair.p.boundary_potential_deriv()) ** 2
    qz2 = np.abs(0.5 * fib.pair.q.boundary_potential_deriv()) ** 2
    return g, z, pz2, qz2


WHICH = ("alpha", "beta", "span", "span_full")


def first_variation(fam, t, which="alpha", N=256):
    """Right-hand side of the first-variation formula for α, β or s.

    ``"span"`` is (1/π)∮ k1 (|p_z|² + |q_z|²) ds without section terms;
    ``"span_full"`` adds 2(∂h_ξ/∂z - ∂𝔥_ξ/∂z) ξ'(t).
    """
    if which not in WHICH:
        raise ValueError(f"which must be one of {WHICH}")
    fib = _fiber(fam, t, N)
    g, z, pz2, qz2 = _boundary_terms(fam, fib)
    k1 = eval_k1(fam, t, z, recentre=True)
    ip = np.sum(k1 * pz2 * g.weight) / np.pi
    iq = np.sum(k1 * qz2 * g.weight) / np.pi
    da, db = fam.section_derivs(t)
    dxi = db - da
    pair = fib.pair
    if which == "alpha":
        return complex(ip + 2 * pair.dh_xi_dz * dxi)
    if which == "beta":
        return complex(-iq + 2 * pair.dmh_xi_dz * dxi)
    out = ip + iq
    if which == "span_full":
        out += 2 * (pair.dh_xi_dz - pair.dmh_xi_dz) * dxi
    return complex(out)


def _quantity(fam, name, N):
    if callable(name):
        return name
    if name in ("alpha", "beta", "span"):
        def f(t):
            pair = compute_principal_pair(fam.domain_at(t), N)
            return {"alpha": pair.alpha, "beta": pair.beta, "span": pair.span}[name]
        return f
    if name == "delta":
        return lambda t: float(np.log(np.cosh(poincare_distance(fam.domain_at(t), N))))
    raise ValueError(f"unknown quantity {name!r}")


def _dt(f, t, h):
    return 0.5 * ((f(t + h) - f(t - h)) - 1j * (f(t + 1j * h) - f(t - 1j * h))) / (2 * h)


def _lap(f, t, h, f0=None):
    f0 = f(t) if f0 is None else f0
    return (f(t + h) + f(t - h) + f(t + 1j * h) + f(t - 1j * h) - 4 * f0) / (4 * h * h)


def fd_derivative(fam, t, quantity="alpha", order="dt", h=DEFAULT_HT, richardson=True, N=256):
    """∂/∂t or ∂²/∂t∂t̄ of a quantity by central differences in Re t and Im t.

    Raises
    ------
    StencilOutOfDisk
        If the stencil leaves the parameter disk.
    """
    fam.check_t(t, h)
    f = _quantity(fam, quantity, N)
    if order == "dt":
        d1 = _dt(f, t, h)
        return (4 * _dt(f, t, h / 2) - d1) / 3 if richardson else d1
    if order == "laplacian":
        f0 = f(t)
        d1 = _lap(f, t, h, f0)
        return (4 * _lap(f, t, h / 2, f0) - d1) / 3 if richardson else d1
    raise ValueError("order must be 'dt' or 'laplacian'")


@dataclass(frozen=True)
class SecondVariation:
    total: float
    boundary: float
    area_p: float
    area_q: float


def _dirichlet_area(grid, gam):
    """∬ |Γ'|² dA = (1/2i) ∮ conj(Γ) dΓ by the trapezoidal rule in θ."""
    dg = spectral_diff(gam)
    val = np.sum(np.conj(gam) * dg) * (2 * np.pi / grid.N) / 2j
    return float(val.real)


def second_variation_span(fam, t, h=DEFAULT_HT, N=256, parts=False):
    """RHS of the second-variation formula for the span.

    The area term ∬ |∂²p/∂t̄∂z|² uses Γ = ½ ∂R_p/∂t̄ (R_p the regular
    part of p's completion), whose Dirichlet integral reduces to the
    boundary.  Boundary values of ∂R/∂t̄ come from solves at the t-stencil
    on the same θ nodes, corrected for node motion: ∂R/∂t̄ = ∂Ψ/∂t̄ - R' ∂w/∂t̄.
    """
    fam.check_t(t, h)
    stencil = [t, t + h, t - h, t + 1j * h, t - 1j * h]
    fibs = _pmap(lambda s: _fiber(fam, s, N), stencil)
    f0 = fibs[0]
    g, z, pz2, qz2 = _boundary_terms(fam, f0)
    k2 = eval_k2(fam, t, z, recentre=True)
    bterm = float(np.sum(k2 * (pz2 + qz2) * g.weight) / np.pi)

    def dbar(vals):
        return 0.5 * ((vals[1] - vals[2]) + 1j * (vals[3] - vals[4])) / (2 * h)

    dw = dbar([f.pair.grid.z for f in fibs])
    areas = []
    for key in ("p", "q"):
        fields = [getattr(f.pair, key) for f in fibs]
        dpsi = dbar([fl.boundary_regular() for fl in fields])
        gam = 0.5 * (dpsi - fields[0].boundary_regular_deriv() * dw)
        areas.append(_dirichlet_area(g, gam))
    total = bterm + 4.0 / np.pi * (areas[0] + areas[1])
    if parts:
        return SecondVariation(total, bterm, areas[0], areas[1])
    return total


# ---------------------------------------------------------------------------
# scans


def t_grid(center=0.0, radius=0.3, n=9):
    """Square n×n grid on [center ± radius]², clipped to the closed disk."""
    if n % 2 == 0 or n < 1:
        raise ValueError("grid size must be odd")
    s = np.linspace(-radius, radius, n) if n > 1 else np.zeros(1)
    pts = [complex(center) + x + 1j * y for y in s for x in s]
    return [p for p in pts if abs(p - center) <= radius * (1 + 1e-12)]


def _tol(values):
    finite = np.asarray(values, float)
    finite = finite[np.isfinite(finite)]
    return 1e-5 * max(1.0, float(np.abs(finite).max()) if finite.size else 1.0)


ROW_FIELDS = ("t_re", "t_im", "span", "alpha", "beta", "lap_span", "lap_beta", "min_k2", "status")


@dataclass
class VariationReport:
    family: str
    rows: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ROW_FIELDS)
            for r in self.rows:
                w.writerow([_fmt(r[k]) if k != "status" else r[k] for k in ROW_FIELDS])
        finally:
            if own:
                fh.close()


def _fmt(x):
    x = float(x)
    return "" if not np.isfinite(x) else f"{x:.9g}"


def _min_k2(fam, t, N, n=128):
    md = fam.domain_at(t)
    th = 2 * np.pi * np.arange(n) / n
    z = np.concatenate([c.point(th) for c in md.curves])
    return float(eval_k2(fam, t, z).min())


def subharmonicity_scan(fam, ts=None, h=DEFAULT_HT, N=256, workers=None):
    """Span, α, β and their ∂²/∂t∂t̄ over a t-grid, with verdict flags.

    Per-point failures are recorded in ``status``; the scan continues.
    """
    ts = t_grid(0.0, 0.6 * fam.radius, 9) if ts is None else list(ts)
    needed = {}
    for t in ts:
        for s in (t, t + h, t - h, t + 1j * h, t - 1j * h):
            needed.setdefault(complex(s), None)
    keys = list(needed)

    def solve(t):
        try:
            fam.check_t(t)
            p = compute_principal_pair(fam.domain_at(t), N)
            return (p.alpha, p.beta, p.span), "ok"
        except HspanError as exc:
            return (np.nan,) * 3, type(exc).__name__

    cache = dict(zip(keys, _pmap(solve, keys, workers)))
    rows = []
    for t in ts:
        t = complex(t)
        (al, be, sp), status = cache[t]
        lap = {}
        for k, name in ((2, "span"), (1, "beta")):
            vals = [cache[complex(s)][0][k] for s in (t + h, t - h, t + 1j * h, t - 1j * h)]
            lap[name] = (sum(vals) - 4 * cache[t][0][k]) / (4 * h * h)
        if status == "ok":
            bad = [cache[complex(s)][1] for s in (t + h, t - h, t + 1j * h, t - 1j * h)
                   if cache[complex(s)][1] != "ok"]
            status = bad[0] if bad else "ok"
        try:
            mk = _min_k2(fam, t, N)
        except HspanError as exc:
            mk = np.nan
            status = type(exc).__name__
        rows.append({"t_re": t.real, "t_im": t.imag, "span": sp, "alpha": al, "beta": be,
                     "lap_span": lap["span"], "lap_beta": lap["beta"], "min_k2": mk,
                     "status": status})
    rep = VariationReport(fam.name, rows)
    ok = [r for r in rows if r["status"] == "ok"]
    spans = [r["span"] for r in ok]
    tol = _tol(spans)
    lap_s = np.array([r["lap_span"] for r in ok])
    lap_b = np.array([r["lap_beta"] for r in ok])
    min_k2 = float(np.nanmin([r["min_k2"] for r in rows])) if rows else np.nan
    rep.flags = {
        "pseudoconvex": bool(min_k2 >= -1e-8),
        "span_subharmonic": bool(ok and lap_s.min() >= -tol),
        "beta_superharmonic": bool(ok and lap_b.max() <= tol),
        "min_k2": min_k2,
        "min_lap_span": float(lap_s.min()) if ok else np.nan,
        "max_lap_beta": float(lap_b.max()) if ok else np.nan,
        "tol": tol,
        "failed_points": len(rows) - len(ok),
    }
    return rep


@dataclass(frozen=True)
class LogCoshReport:
    ts: tuple
    delta: np.ndarray
    lap_delta: np.ndarray
    span: np.ndarray
    max_identity_residual: float
    subharmonic: bool


def logcosh_subharmonicity(fam, ts=None, h=DEFAULT_HT, N=256, workers=None):
    """δ(t) = log cosh d(t) on a t-grid and its discrete ∂²/∂t∂t̄."""
    if fam.connectivity > 1:
        raise NotSimplyConnected("log cosh d needs simply connected fibers")
    ts = t_grid(0.0, 0.6 * fam.radius, 9) if ts is None else list(ts)
    keys = list(dict.fromkeys(complex(s) for t in ts
                              for s in (t, t + h, t - h, t + 1j * h, t - 1j * h)))

    def solve(t):
        fam.check_t(t)
        md = fam.domain_at(t)
        return np.log(np.cosh(poincare_distance(md, N))), harmonic_span(md, N).s

    cache = dict(zip(keys, _pmap(solve, keys, workers)))
    delta = np.array([cache[complex(t)][0] for t in ts])
    span = np.array([cache[complex(t)][1] for t in ts])
    lap = np.array([_lap(lambda s: cache[complex(s)][0], complex(t), h) for t in ts])
    resid = float(np.max(np.abs(delta - span / 4)))
    return LogCoshReport(tuple(ts), delta, lap, span, resid, bool(lap.min() >= -1e-6))


@dataclass(frozen=True)
class LineCheck:
    us: tuple
    span: np.ndarray
    laplacian: np.ndarray
    strict: bool


def sfunction_psh_check(md, xi0, eta0, dxi=0.0, deta=1.0, radius=0.3, n=5, h=DEFAULT_HT,
                        N=256, tol_strict=1e-8, workers=None):
    """s(ξ0 + dxi·u, η0 + deta·u) on a u-grid and its ∂²/∂u∂ū.

    Raises
    ------
    LineHitsDiagonal
        If ξ and η come within the too-close band somewhere on the disk
        |u| ≤ radius + h.
    """
    from .domain import sample_boundary
    from .principal import TOO_CLOSE_SPACINGS

    grid = sample_boundary(md, N)
    c, d = complex(xi0) - complex(eta0), complex(dxi) - complex(deta)
    gap = abs(c) - abs(d) * (radius + h)
    if gap < TOO_CLOSE_SPACINGS * grid.spacing:
        raise LineHitsDiagonal("the line passes through the diagonal band")
    us = t_grid(0.0, radius, n)
    keys = list(dict.fromkeys(complex(s) for u in us
                              for s in (u, u + h, u - h, u + 1j * h, u - 1j * h)))
    pts = np.array([[xi0 + dxi * u, eta0 + deta * u] for u in keys])
    if np.any(contains(grid, pts.ravel()) != INSIDE):
        raise InvalidDomain("the line leaves the domain on the sampled disk")

    def solve(u):
        return harmonic_span(md.with_points(xi0 + dxi * u, eta0 + deta * u), N).s

    cache = dict(zip(keys, _pmap(solve, keys, workers)))
    span = np.array([cache[complex(u)] for u in us])
    lap = np.array([_lap(lambda s: cache[complex(s)], complex(u), h) for u in us])
    return LineCheck(tuple(us), span, lap, bool(lap.min() >= tol_strict))


@dataclass(frozen=True)
class RigidityReport:
    ts: tuple
    span: np.ndarray
    normalized_endpoints: np.ndarray
    slit_deviation: float
    span_deviation: float
    trivial: bool


def rigidity_check(fam, ts=None, N=256, tol=1e-5, workers=None):
    """Constancy of the span and of A_j^(1)(t)/A_1^(1)(t) over a t-grid."""
    ts = t_grid(0.0, 0.6 * fam.radius, 5) if ts is None else list(ts)
    if complex(ts[0]) != 0 and 0 not in [complex(t) for t in ts]:
        ts = [0.0] + list(ts)

    def solve(t):
        pair = compute_principal_pair(fam.domain_at(t), N)
        slits = extract_slit_data(build_slit_map(pair, "circular")).slits
        ends = np.array([s.endpoints()[0] for s in slits])
        return pair.span, ends / ends[0]

    res = _pmap(solve, ts, workers)
    span = np.array([r[0] for r in res])
    ends = np.array([r[1] for r in res])
    i0 = [complex(t) for t in ts].index(0)
    sdev = float(np.abs(ends - ends[i0]).max())
    spdev = float(np.abs(span - span[i0]).max())
    return RigidityReport(tuple(ts), span, ends, sdev, spdev, bool(sdev <= tol and spdev <= tol))
