"""L1/L0 principal functions, slit maps P, Q, the map H = sqrt(PQ) and F.

With S(z) = log|z - b| - log|z - a| the principal functions are

    p = S + Re R_p,   q = S + Re R_q,

where R_p, R_q are single-valued holomorphic in D.  R_p comes from a
modified Dirichlet solve (p constant on every C_j, zero flux), R_q from the
conjugate problem (arg Q constant on every C_j).  The slit maps are

    W(z) = (z - b) / ((z - a)(a - b)) * exp(R(z) - R(a)),

which fixes the residue at ``a`` to exactly 1.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bie import (
    HarmonicField,
    boundary_trace,
    resample,
    solve_conjugate,
    solve_modified_dirichlet,
    spectral_diff,
    trig_eval,
)
from .domain import INSIDE, NEAR_BOUNDARY, contains, sample_boundary, segment_crossings
from .errors import DegenerateSlit, MarkedPointsTooClose, NearBoundary, PoleOfF

TOO_CLOSE_SPACINGS = 5


@dataclass(frozen=True, eq=False)
class PrincipalPair:
    p: HarmonicField
    q: HarmonicField
    alpha: float
    beta: float
    c: np.ndarray
    dh_xi_dz: complex
    dmh_xi_dz: complex

    @property
    def domain(self):
        return self.p.domain

    @property
    def grid(self):
        return self.p.grid

    @property
    def span(self):
        return self.alpha - self.beta


def compute_principal_pair(md, N=256):
    """Solve for p, q and the constants α, β on ``md``.

    Raises
    ------
    MarkedPointsTooClose
        If |a - b| is below five boundary grid spacings.
    """
    grid = sample_boundary(md, N)
    a, b = md.a, md.b
    dist = abs(b - a)
    if dist < TOO_CLOSE_SPACINGS * grid.spacing:
        raise MarkedPointsTooClose(
            f"|a - b| = {dist:.3g} is below {TOO_CLOSE_SPACINGS} grid spacings ({grid.spacing:.3g})"
        )
    z = grid.z
    singular = ((a, -1.0), (b, 1.0))

    fp = solve_modified_dirichlet(grid, np.log(np.abs(z - a)) - np.log(np.abs(z - b)))
    # arg Q constant on each C_j: conjugate data -arg((z - b)/(z - a))
    arg = np.unwrap(np.angle((z - b) / (z - a)), axis=1)
    fq = solve_conjugate(grid, -arg)

    pts = np.array([a, b])
    out = []
    for f in (fp, fq):
        ra, rb = f.regular(pts)
        gauge = -np.log(dist) - ra.real
        f = replace(f, singular=singular, gauge=complex(gauge))
        const = rb.real + gauge - np.log(dist)
        dh = 0.5 * (f.regular_deriv(np.array([b]))[0] - 1.0 / (b - a))
        out.append((f, const, dh))
    (fp, alpha, dh), (fq, beta, dmh) = out
    c = fp.constants + fp.gauge.real
    return PrincipalPair(fp, fq, float(alpha), float(beta), c, complex(dh), complex(dmh))


# ---------------------------------------------------------------------------
# slit maps

KINDS = ("circular", "radial", "combinedH")


@dataclass(frozen=True, eq=False)
class ConformalSlitMap:
    """W(z) = (z - b)/((z - a)(a - b)) exp(R(z) - R(a)) for the chosen kind."""

    kind: str
    pair: PrincipalPair

    def _weights(self):
        return {"circular": (1.0, 0.0), "radial": (0.0, 1.0), "combinedH": (0.5, 0.5)}[self.kind]

    def _regular(self, x):
        wp, wq = self._weights()
        return wp * self.pair.p.regular(x) + wq * self.pair.q.regular(x)

    def _regular_boundary(self):
        wp, wq = self._weights()
        return wp * self.pair.p.boundary_regular() + wq * self.pair.q.boundary_regular()

    @property
    def _ra(self):
        return self._regular(np.array([self.pair.domain.a]))[0]

    def log_map(self, x, check=True):
        """Branch of log W with the singular part log((z-b)/((z-a)(a-b)))."""
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        if check:
            cls = contains(self.pair.grid, x)
            if np.any(cls == NEAR_BOUNDARY):
                raise NearBoundary("evaluation inside the near-boundary band")
            if np.any(cls != INSIDE):
                raise ValueError("point outside the domain")
        a, b = self.pair.domain.a, self.pair.domain.b
        with np.errstate(divide="ignore"):
            return np.log((x - b) / ((x - a) * (a - b))) + self._regular(x) - self._ra

    def __call__(self, x, check=True):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        a, b = self.pair.domain.a, self.pair.domain.b
        at_pole = x == a
        xs = np.where(at_pole, b, x)
        if check:
            self.log_map(xs[~at_pole], check=True) if np.any(~at_pole) else None
        val = (xs - b) / ((xs - a) * (a - b)) * np.exp(self._regular(xs) - self._ra)
        val = np.where(at_pole, np.inf + 0j, val)
        return val[0] if scalar else val

    def boundary_log(self):
        """Continuous branch of log W along every curve, shape (nu, N)."""
        g = self.pair.grid
        a, b = self.pair.domain.a, self.pair.domain.b
        z = g.z
        sing = np.log(np.abs((z - b) / ((z - a) * (a - b)))) + 1j * np.unwrap(
            np.angle((z - b) / ((z - a) * (a - b))), axis=1
        )
        return sing + self._regular_boundary() - self._ra

    def boundary_values(self):
        return np.exp(self.boundary_log())

    def boundary_log_deriv(self):
        """d log W / dz at the nodes."""
        wp, wq = self._weights()
        return (wp * self.pair.p.boundary_potential_deriv()
                + wq * self.pair.q.boundary_potential_deriv())


def build_slit_map(pair, kind):
    if kind not in ("circular", "radial"):
        raise ValueError(f"kind must be 'circular' or 'radial', got {kind!r}")
    return ConformalSlitMap(kind, pair)


def build_H(pair):
    return ConformalSlitMap("combinedH", pair)


def residue_at_pole(smap, radii=(0.02, 0.03, 0.04, 0.05), n=64):
    """Fit the 1/(z - a) coefficient from averages on small probe circles."""
    a = smap.pair.domain.a
    th = 2 * np.pi * np.arange(n) / n
    vals = []
    for r in radii:
        x = a + r * np.exp(1j * th)
        vals.append(np.mean((x - a) * smap(x, check=False)))
    return np.array(vals)


# ---------------------------------------------------------------------------
# slit data


@dataclass(frozen=True)
class CurveSlit:
    """One boundary component's slit.

    ``level`` is r_j (circular) or θ_j (radial); ``extent`` the pair
    (θ^(1), θ^(2)) or (r^(1), r^(2)); ``params`` the traversal parameters of
    the endpoint preimages and ``points`` the preimages themselves.
    """

    kind: str
    level: float
    extent: tuple
    params: tuple
    points: tuple

    def endpoints(self):
        if self.kind == "circular":
            return tuple(self.level * np.exp(1j * t) for t in self.extent)
        return tuple(r * np.exp(1j * self.level) for r in self.extent)


@dataclass(frozen=True)
class SlitData:
    kind: str
    slits: tuple


def _extrema(values, theta_grid):
    """Locate local extrema of a periodic row by Newton on the interpolant."""
    d = spectral_diff(values)
    n = len(values)
    out = []
    for m in range(n):
        if d[m] == 0 or d[m] * d[(m + 1) % n] < 0:
            t0 = theta_grid[m]
            t1 = t0 + 2 * np.pi / n
            d0, d1 = d[m], d[(m + 1) % n]
            t = t0 - d0 * (t1 - t0) / (d1 - d0) if d1 != d0 else t0
            for _ in range(30):
                f1 = trig_eval(values, t, 1)
                f2 = trig_eval(values, t, 2)
                if f2 == 0:
                    break
                step = f1 / f2
                t -= step
                if abs(step) < 1e-13:
                    break
            kind = "max" if d0 > 0 else "min"
            out.append((t % (2 * np.pi), kind, float(trig_eval(values, t))))
    return out


def extract_slit_data(smap):
    """Radius/angle and extent of every slit, with endpoint preimages.

    Raises
    ------
    DegenerateSlit
        If a slit's extent is below 1e-9.
    """
    if smap.kind not in ("circular", "radial"):
        raise ValueError("slit data needs a circular or radial map")
    g = smap.pair.grid
    logw = smap.boundary_log()
    slits = []
    for j in range(g.nu):
        row = logw[j].imag if smap.kind == "circular" else logw[j].real
        level_row = logw[j].real if smap.kind == "circular" else logw[j].imag
        ext = _extrema(row, g.theta)
        if not ext:
            raise DegenerateSlit(f"no extrema found on curve {j}")
        lo = min(ext, key=lambda e: e[2])
        hi = max(ext, key=lambda e: e[2])
        if hi[2] - lo[2] < 1e-9:
            raise DegenerateSlit(f"slit on curve {j} collapses to a point")
        params = (lo[0], hi[0])
        pts = tuple(complex(trig_eval(g.z[j], t)) for t in params)
        if smap.kind == "circular":
            level = float(np.exp(level_row.mean()))
            extent = (lo[2], hi[2])
        else:
            mean = np.angle(np.mean(np.exp(1j * level_row)))
            level = float(mean)
            extent = (float(np.exp(lo[2])), float(np.exp(hi[2])))
        slits.append(CurveSlit(smap.kind, level, extent, params, pts))
    return SlitData(smap.kind, tuple(slits))


def extrema_census(pair):
    """Per curve: local extrema of arg P and of log|Q| along the boundary.

    Returns a list of dicts with the parameter lists and whether the four
    points interleave cyclically as (a, b, a, b).
    """
    g = pair.grid
    lp = build_slit_map(pair, "circular").boundary_log()
    lq = build_slit_map(pair, "radial").boundary_log()
    out = []
    for j in range(g.nu):
        ea = [e[0] for e in _extrema(lp[j].imag, g.theta)]
        eb = [e[0] for e in _extrema(lq[j].real, g.theta)]
        labels = sorted([(t, "a") for t in ea] + [(t, "b") for t in eb])
        seq = "".join(l for _, l in labels)
        interleaved = len(ea) == 2 and len(eb) == 2 and seq in ("abab", "baba")
        out.append({"arg_P_extrema": ea, "log_Q_extrema": eb, "interleaved": interleaved})
    return out


# ---------------------------------------------------------------------------
# F = d log Q / d log P


def _F_from(pair, rq, rp, x):
    a, b = pair.domain.a, pair.domain.b
    num = (b - a) + (x - a) * (x - b) * rq
    den = (b - a) + (x - a) * (x - b) * rp
    tiny = 1e-12 * (np.abs(b - a) + np.abs((x - a) * (x - b) * rp))
    if np.any(np.abs(den) <= tiny):
        raise PoleOfF("∂p/∂z vanishes at an evaluation point")
    return num / den


def eval_F(pair, points):
    """F(z) = (∂q/∂z)/(∂p/∂z) at interior points; F(a) = 1."""
    scalar = np.ndim(points) == 0
    x = np.atleast_1d(np.asarray(points, dtype=complex))
    out = _F_from(pair, pair.q.regular_deriv(x), pair.p.regular_deriv(x), x)
    return out[0] if scalar else out


def boundary_F(pair):
    """F at every boundary node, shape (nu, N)."""
    z = pair.grid.z
    return _F_from(pair, pair.q.boundary_regular_deriv(), pair.p.boundary_regular_deriv(), z)


# ---------------------------------------------------------------------------
# area and convexity


def e_log_area(pair):
    """-∮ h dh* with h = (p + q)/2, from the boundary traces."""
    g = pair.grid
    tp = boundary_trace(pair.p)
    tq = boundary_trace(pair.q)
    h = 0.5 * (tp.value + tq.value)
    hn = 0.5 * (tp.dn + tq.dn)
    return float(-np.sum(h * hn * g.weight))


@dataclass(frozen=True)
class ConvexityReport:
    curve: int
    curvature: np.ndarray
    max_curvature: float
    min_curvature: float
    one_signed: bool
    crossings: int


def convexity_check(pair, j, samples=512):
    """Signed curvature of -(log H)(C_j) and a simplicity test of -H(C_j)."""
    g = pair.grid
    Hmap = build_H(pair)
    tau = Hmap.boundary_log()[j]
    dtau = Hmap.boundary_log_deriv()[j] * g.dz[j]
    d2tau = spectral_diff(dtau)
    dt = resample(-dtau, samples)
    d2t = resample(-d2tau, samples)
    kappa = np.imag(np.conj(dt) * d2t) / np.abs(dt) ** 3
    curve = -np.exp(resample(tau, samples))
    one_signed = bool(np.all(kappa < 0) or np.all(kappa > 0))
    return ConvexityReport(j, kappa, float(kappa.max()), float(kappa.min()), one_signed,
                           segment_crossings(curve))


def univalence_counts(pair, wpoints):
    """N(w') = 1 + Σ_j winding(H(C_j), w') by the argument principle."""
    Hb = build_H(pair).boundary_values()
    Hb = resample(Hb, 4 * Hb.shape[1])
    w = np.atleast_1d(np.asarray(wpoints, dtype=complex))
    d = Hb[None, :, :] - w[:, None, None]
    ang = np.angle(np.roll(d, -1, axis=2) / d).sum(axis=2) / (2 * np.pi)
    return 1 + np.rint(ang.sum(axis=1)).astype(int)
