"""Closed-form reference values.

Nothing here calls the numerical pipeline; these are the ground truth the
tests compare against.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np


# ---------------------------------------------------------------------------
# disk with pole 0 and zero ξ


@dataclass(frozen=True)
class DiskCase:
    r: float = 1.0
    xi: complex = 0.5

    def __post_init__(self):
        if not abs(self.xi) < self.r:
            raise ValueError("need |xi| < r")


def disk_P(case, z):
    """Circular slit map of {|z| < r} with pole 0 and zero ξ."""
    z = np.asarray(z, dtype=complex)
    xi, r = complex(case.xi), case.r
    return (-1 / xi) * ((z - xi) / z) / (1 - z * np.conj(xi) / r ** 2)


def disk_Q(case, z):
    """Radial slit map of {|z| < r} with pole 0 and zero ξ."""
    z = np.asarray(z, dtype=complex)
    xi, r = complex(case.xi), case.r
    return (-1 / xi) * ((z - xi) / z) * (1 - z * np.conj(xi) / r ** 2)


def disk_H(case, z):
    """H = 1/z - 1/ξ on the disk."""
    z = np.asarray(z, dtype=complex)
    return 1 / z - 1 / complex(case.xi)


def disk_constants(case):
    """(α, β, s) for the disk case."""
    rho2 = (abs(case.xi) / case.r) ** 2
    lx = np.log(abs(case.xi))
    alpha = -2 * lx - np.log(1 - rho2)
    beta = -2 * lx + np.log(1 - rho2)
    return alpha, beta, alpha - beta


def disk_span(rho):
    """Span 2 log 1/(1 - ρ²) for |ξ|/r = ρ."""
    return -2.0 * np.log1p(-rho ** 2)


def disk_distance(rho):
    """Poincaré distance ½ log((1 + ρ)/(1 - ρ)) from 0 to ρ in the unit disk."""
    return float(np.arctanh(rho))


def disk_e_log(case):
    return float(np.pi / 2 * disk_constants(case)[2])


@dataclass(frozen=True)
class Transport:
    domain: object
    alpha_shift: float
    beta_shift: float


def transport(lam, c, md):
    """Image of ``md`` under z -> λz + c with the predicted α, β shifts."""
    shift = float(np.log(abs(complex(lam))))
    return Transport(md.transformed(lam, c), shift, shift)


# ---------------------------------------------------------------------------
# closed-form families (pole 0, zero 0.25)

XI = 0.25


def hartogs_alpha(x, xi=XI):
    """α on the disk of radius e^x."""
    return -2 * np.log(xi) - np.log(1 - xi ** 2 * np.exp(-2 * x))


def hartogs_beta(x, xi=XI):
    return -2 * np.log(xi) + np.log(1 - xi ** 2 * np.exp(-2 * x))


def hartogs_dalpha_dt(xi=XI):
    """∂α/∂t at t = 0 (= ½ dα/dx)."""
    u = xi ** 2
    return -u / (1 - u)


def hartogs_lap_span(xi=XI):
    """∂²s/∂t∂t̄ at t = 0: ¼ f''(0) with f(x) = -2 log(1 - u e^{-2x})."""
    u = xi ** 2
    return 0.25 * 8 * u / (1 - u) ** 2


def hartogs_delta(x, xi=XI):
    """log cosh d on the disk of radius e^x."""
    return float(np.log(np.cosh(np.arctanh(xi * np.exp(-x)))))


def concave_span(t, xi=XI):
    """Span on the disk of radius sqrt(1 + |t|²)."""
    return -2 * np.log(1 - xi ** 2 / (1 + abs(t) ** 2))


def concave_lap_span(xi=XI):
    """∂²s/∂t∂t̄ at 0: s = -2 log(1 - u/(1 + |t|²)), u = ξ²."""
    u = xi ** 2
    return -2 * u / (1 - u)


# ---------------------------------------------------------------------------
# harmonic test problems


def annulus_neumann(z, r_in=0.5):
    """u = (A r + B/r) cos θ with ∂u/∂n = cos θ on |z| = 1 and 0 on |z| = r_in."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    # u_r = A - B/r²: A - B = 1 at r = 1, A - B/r_in² = 0 at r_in
    B = r_in ** 2 / (1.0 - r_in ** 2)
    A = B / r_in ** 2
    return (A * r + B / r) * np.cos(np.angle(z))


def ellipse_abs2_dirichlet(z, A, B):
    """Harmonic u in x²/A² + y²/B² < 1 with u = |z|² on the boundary."""
    z = np.asarray(z, dtype=complex)
    d = (A ** 2 - B ** 2) / (A ** 2 + B ** 2)
    c = 2 * A ** 2 * B ** 2 / (A ** 2 + B ** 2)
    return c + d * (z.real ** 2 - z.imag ** 2)


# ---------------------------------------------------------------------------
# ellipse Riemann map


@lru_cache(maxsize=None)
def _ellipse_modulus(A, B):
    """Modulus k with |f| = 1 on the ellipse for f = √k sn((2K/π) asin(z/c), k)."""
    c = mpmath.sqrt(A * A - B * B)

    def resid(k):
        return _ellipse_map(mpmath.mpf(A), c, k).real - 1

    return mpmath.findroot(resid, (mpmath.mpf("0.3"), mpmath.mpf("0.95")), solver="anderson")


def _ellipse_map(z, c, k):
    K = mpmath.ellipk(k * k)
    u = 2 * K / mpmath.pi * mpmath.asin(z / c)
    return mpmath.sqrt(k) * mpmath.ellipfun("sn", u, m=k * k)


def ellipse_riemann_map(z, A, B, dps=30):
    """Conformal map of x²/A² + y²/B² < 1 onto the unit disk, 0 -> 0, f'(0) > 0."""
    with mpmath.workdps(dps):
        k = _ellipse_modulus(float(A), float(B))
        c = mpmath.sqrt(mpmath.mpf(A) ** 2 - mpmath.mpf(B) ** 2)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.array([complex(_ellipse_map(mpmath.mpc(v.real, v.imag), c, k)) for v in z])
    return out


def ellipse_distance(b, A, B):
    """Poincaré distance between 0 and ``b`` in the ellipse."""
    return disk_distance(abs(ellipse_riemann_map(b, A, B)[0]))
