"""Fourier-series boundary curves and marked, finitely connected planar domains.

A domain is bounded by one outer curve and any number of holes.  Every curve
is stored counterclockwise; holes carry ``orientation="negative"`` and are
traversed in reverse when a :class:`BoundaryGrid` is emitted, so that the
domain always lies to the left of the traversal direction.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateCurve,
    InvalidDomain,
    MarkedPointsTooClose,
    SelfIntersecting,
)

INSIDE = "inside"
OUTSIDE = "outside"
NEAR_BOUNDARY = "near-boundary"

NEAR_BAND = 5.0


# ---------------------------------------------------------------------------
# polyline utilities


def _orient(a, b, c):
    return np.imag(np.conj(b - a) * (c - a))


def segment_crossings(p, q=None):
    """Count proper crossings between closed polylines.

    With a single argument the polyline is tested against itself (adjacent
    segments excluded).  With two arguments all segment pairs are tested.
    """
    p = np.asarray(p, dtype=complex)
    a0, a1 = p, np.roll(p, -1)
    if q is None:
        b0, b1 = a0, a1
    else:
        q = np.asarray(q, dtype=complex)
        b0, b1 = q, np.roll(q, -1)
    A0, A1 = a0[:, None], a1[:, None]
    B0, B1 = b0[None, :], b1[None, :]
    d1 = _orient(A0, A1, B0)
    d2 = _orient(A0, A1, B1)
    d3 = _orient(B0, B1, A0)
    d4 = _orient(B0, B1, A1)
    hit = (d1 * d2 < 0) & (d3 * d4 < 0)
    if q is None:
        n = len(p)
        i, j = np.indices((n, n))
        gap = (i - j) % n
        hit &= (gap > 1) & (gap < n - 1)
        return int(hit.sum()) // 2
    return int(hit.sum())


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True, eq=False)
class SmoothCurve:
    """Closed curve z(θ) = Σ c_k exp(ikθ), stored counterclockwise."""

    modes: np.ndarray
    coeffs: np.ndarray
    orientation: str = "positive"

    @property
    def degree(self):
        return int(np.max(np.abs(self.modes)))

    @property
    def is_hole(self):
        return self.orientation == "negative"

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ self.coeffs

    def derivative(self, theta, order=1):
        theta = np.asarray(theta, dtype=float)
        c = self.coeffs * (1j * self.modes) ** order
        return np.exp(1j * np.multiply.outer(theta, self.modes)) @ c

    def traversal(self):
        """Coefficients of the curve as traversed with the domain on the left."""
        if self.is_hole:
            return -self.modes, self.coeffs
        return self.modes, self.coeffs

    def signed_area(self):
        return float(np.pi * np.sum(self.modes * np.abs(self.coeffs) ** 2))

    def arclength(self, n=1024):
        th = 2 * np.pi * np.arange(n) / n
        return float(np.sum(np.abs(self.derivative(th))) * 2 * np.pi / n)

    def transformed(self, lam, c):
        modes = self.modes.copy()
        coeffs = lam * self.coeffs
        if 0 in modes:
            coeffs[modes == 0] += c
        else:
            modes = np.append(modes, 0)
            coeffs = np.append(coeffs, c)
        return SmoothCurve(modes, coeffs, self.orientation)

    def to_list(self):
        return [[int(k), float(c.real), float(c.imag)] for k, c in zip(self.modes, self.coeffs)]


def _normalize_coeffs(coeffs):
    if isinstance(coeffs, dict):
        items = list(coeffs.items())
    else:
        items = []
        for entry in coeffs:
            if len(entry) == 3:
                items.append((entry[0], complex(entry[1], entry[2])))
            else:
                items.append((entry[0], complex(entry[1])))
    acc = {}
    for k, c in items:
        acc[int(k)] = acc.get(int(k), 0) + complex(c)
    modes = np.array(sorted(acc), dtype=int)
    return modes, np.array([acc[k] for k in modes], dtype=complex)


def build_curve(coeffs, orientation="positive"):
    """Build and validate a Fourier curve.

    Parameters
    ----------
    coeffs : dict or sequence
        ``{k: c_k}``, ``[(k, c_k), ...]`` or ``[[k, re, im], ...]``.
    orientation : {"positive", "negative"}
        ``"negative"`` marks a hole.  Clockwise input coefficients are
        reflected (k -> -k) so the stored curve is counterclockwise.

    Raises
    ------
    DegenerateCurve
        No |k| = 1 mode, or |z'| vanishes numerically.
    SelfIntersecting
        The sampled polygon crosses itself.
    """
    if orientation not in ("positive", "negative"):
        raise ValueError(f"unknown orientation {orientation!r}")
    modes, cs = _normalize_coeffs(coeffs)
    if not np.any((np.abs(modes) == 1) & (np.abs(cs) > 0)):
        raise DegenerateCurve("curve needs a nonzero coefficient with |k| = 1")
    curve = SmoothCurve(modes, cs, orientation)
    if curve.signed_area() < 0:
        curve = SmoothCurve(-modes[::-1], cs[::-1], orientation)
    _validate_curve(curve)
    return curve


def _validate_curve(curve):
    n = max(256, 8 * curve.degree)
    th = 2 * np.pi * np.arange(n) / n
    speed = np.abs(curve.derivative(th))
    if speed.min() < 1e-12 * speed.max():
        raise DegenerateCurve("|z'| vanishes on the curve")
    if segment_crossings(curve.point(th)):
        raise SelfIntersecting("curve crosses itself")


# ---------------------------------------------------------------------------
# discretization


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Equispaced trapezoidal nodes on every boundary curve.

    Arrays are shaped ``(nu, N)``: row 0 is the outer curve, later rows the
    holes, each traversed with the domain on the left.  ``normal`` is the
    outward unit normal and ``weight`` the arclength weight (2π/N)|z'|.
    """

    domain: "MarkedDomain"
    N: int
    theta: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray

    @property
    def nu(self):
        return self.z.shape[0]

    @property
    def h(self):
        return 2 * np.pi / self.N

    @cached_property
    def speed(self):
        return np.abs(self.dz)

    @cached_property
    def tangent(self):
        return self.dz / self.speed

    @cached_property
    def normal(self):
        return -1j * self.tangent

    @cached_property
    def weight(self):
        return self.speed * self.h

    @cached_property
    def spacing(self):
        return float(2 * np.pi * self.speed.max() / self.N)

    def arclengths(self):
        return self.weight.sum(axis=1)

    @cached_property
    def _flat(self):
        return self.z.ravel(), self.dz.ravel() * self.h

    def winding(self, p):
        """Total winding number of ∂D about each point (≈1 inside, 0 outside)."""
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        zf, wf = self._flat
        out = np.empty(p.shape, dtype=float)
        for s in range(0, p.size, 512):
            blk = p.ravel()[s:s + 512]
            # a query on a node gives NaN; callers classify those by distance
            with np.errstate(divide="ignore", invalid="ignore"):
                out.ravel()[s:s + 512] = np.real(
                    (wf[None, :] / (zf[None, :] - blk[:, None])).sum(axis=1) / (2j * np.pi)
                )
        return out

    def distance(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        zf = self._flat[0]
        out = np.empty(p.shape, dtype=float)
        for s in range(0, p.size, 512):
            blk = p.ravel()[s:s + 512]
            out.ravel()[s:s + 512] = np.abs(zf[None, :] - blk[:, None]).min(axis=1)
        return out


def sample_boundary(domain, N=256):
    """Discretize every boundary curve of ``domain`` with ``N`` nodes."""
    if N < 16 or N % 2:
        raise ValueError("N must be even and at least 16")
    theta = 2 * np.pi * np.arange(N) / N
    rows = []
    for curve in domain.curves:
        modes, cs = curve.traversal()
        e = np.exp(1j * np.multiply.outer(theta, modes))
        rows.append((e @ cs, e @ (cs * 1j * modes), e @ (cs * (1j * modes) ** 2)))
    z, dz, d2z = (np.array(col) for col in zip(*rows))
    return BoundaryGrid(domain, N, theta, z, dz, d2z)


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True, eq=False)
class MarkedDomain:
    """Bounded domain with outer curve, holes, pole ``a`` and zero ``b``."""

    outer: SmoothCurve
    holes: tuple
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.outer.is_hole:
            raise InvalidDomain("outer curve must be positively oriented")
        if any(not h.is_hole for h in self.holes):
            raise InvalidDomain("hole curves must be negatively oriented")
        self._check_geometry()
        if self.a == self.b:
            raise MarkedPointsTooClose("marked points coincide")
        w = self._probe_grid.winding(np.array([self.a, self.b]))
        if np.any(np.abs(w - 1) > 1e-3):
            raise InvalidDomain("marked points must lie inside the domain")

    @property
    def curves(self):
        return (self.outer,) + self.holes

    @property
    def connectivity(self):
        return 1 + len(self.holes)

    @cached_property
    def _probe_grid(self):
        n = max(256, 8 * max(c.degree for c in self.curves))
        n += n % 2
        return sample_boundary(self, n)

    def _check_geometry(self):
        if not self.holes:
            return
        n = 256
        th = 2 * np.pi * np.arange(n) / n
        pts = [c.point(th) for c in self.curves]
        outer_only = _winding_polyline(pts[0])
        for i, hp in enumerate(pts[1:], start=1):
            if segment_crossings(pts[0], hp):
                raise InvalidDomain("hole crosses the outer curve")
            if np.any(np.abs(outer_only(hp) - 1) > 1e-6):
                raise InvalidDomain("hole is not inside the outer curve")
            for j in range(i + 1, len(pts)):
                if segment_crossings(hp, pts[j]):
                    raise InvalidDomain("holes intersect")
                if np.any(np.abs(_winding_polyline(hp)(pts[j][:1])) > 1e-6) or np.any(
                    np.abs(_winding_polyline(pts[j])(hp[:1])) > 1e-6
                ):
                    raise InvalidDomain("holes are nested")

    def with_points(self, a, b):
        return MarkedDomain(self.outer, self.holes, a, b)

    def transformed(self, lam, c=0.0):
        """Image under z -> lam*z + c with marked points transported."""
        lam = complex(lam)
        if lam == 0:
            raise ValueError("lam must be nonzero")
        return MarkedDomain(
            self.outer.transformed(lam, c),
            tuple(h.transformed(lam, c) for h in self.holes),
            lam * self.a + c,
            lam * self.b + c,
        )

    def fingerprint(self):
        return hashlib.sha1(json.dumps(self.to_json()).encode()).hexdigest()[:16]

    def to_json(self):
        return {
            "curves": [{"coeffs": c.to_list(), "hole": c.is_hole} for c in self.curves],
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
        }


def _winding_polyline(poly):
    poly = np.asarray(poly, dtype=complex)

    def wind(pts):
        pts = np.atleast_1d(pts)
        d = poly[None, :] - pts[:, None]
        ang = np.angle(np.roll(d, -1, axis=1) / d)
        return ang.sum(axis=1) / (2 * np.pi)

    return wind


def make_domain(outer, holes=(), a=0.0, b=0.5):
    """Convenience constructor from coefficient specs."""
    oc = outer if isinstance(outer, SmoothCurve) else build_curve(outer, "positive")
    hs = tuple(h if isinstance(h, SmoothCurve) else build_curve(h, "negative") for h in holes)
    return MarkedDomain(oc, hs, a, b)


def disk(radius=1.0, center=0.0, a=0.0, b=0.5):
    return make_domain({0: center, 1: radius}, a=a, b=b)


def circle_coeffs(radius, center=0.0):
    return {0: complex(center), 1: complex(radius)}


def contains(domain, p, N=256):
    """Classify points as ``"inside"``, ``"outside"`` or ``"near-boundary"``.

    The band is ``5 * 2π max|z'| / N`` wide around ∂D.
    """
    grid = domain if isinstance(domain, BoundaryGrid) else sample_boundary(domain, N)
    scalar = np.isscalar(p)
    pts = np.atleast_1d(np.asarray(p, dtype=complex))
    dist = grid.distance(pts)
    wind = grid.winding(pts)
    out = np.where(dist < NEAR_BAND * grid.spacing, NEAR_BOUNDARY,
                   np.where(np.abs(wind - 1) < 0.5, INSIDE, OUTSIDE))
    return str(out[0]) if scalar else out


def domain_from_json(obj):
    """Parse the domain file schema into a :class:`MarkedDomain`."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        curves = obj["curves"]
        outers = [c for c in curves if not c.get("hole", False)]
        holes = [c for c in curves if c.get("hole", False)]
        a = complex(*obj["a"])
        b = complex(*obj["b"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDomain(f"malformed domain file: {exc}") from exc
    if len(outers) != 1:
        raise InvalidDomain("exactly one non-hole curve is required")
    return make_domain(outers[0]["coeffs"], [h["coeffs"] for h in holes], a, b)


def load_domain(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDomain(f"invalid JSON: {exc}") from exc
    return domain_from_json(obj)
