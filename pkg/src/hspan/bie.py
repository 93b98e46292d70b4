"""Nyström solvers for Laplace boundary value problems on smooth curves.

All regular harmonic parts are represented through a double-layer density
``mu`` whose Cauchy integral C[mu] is an explicit holomorphic completion:

    Φ(z) = ω C[mu](z) + Σ A_k log(z - z_k) + Σ s_i log(z - p_i) + gauge,
    u(z) = Re Φ(z).

``ω = 1`` for Dirichlet-type problems (u itself carries the density) and
``ω = i`` for Neumann problems, which are solved for the harmonic conjugate.
The log sources ``A_k`` sit inside holes (Mikhlin completion); ``s_i`` are the
explicit logarithmic singularities.  Evaluation uses the barycentric Cauchy
formula, which stays accurate up to the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .domain import (
    INSIDE,
    NEAR_BOUNDARY,
    BoundaryGrid,
    MarkedDomain,
    contains,
    sample_boundary,
)
from .errors import IncompatibleData, NearBoundary, SolveFailure

COND_LIMIT = 1e12


# ---------------------------------------------------------------------------
# periodic spectral helpers (rows of shape (..., N))


def spectral_diff(values, order=1):
    """d/dθ of equispaced periodic samples along the last axis."""
    values = np.asarray(values)
    n = values.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    if order % 2:
        k[n // 2] = 0
    out = np.fft.ifft(np.fft.fft(values, axis=-1) * (1j * k) ** order, axis=-1)
    return out if np.iscomplexobj(values) else out.real


def spectral_antiderivative(values):
    """Zero-mean periodic antiderivative; the mean of ``values`` is dropped."""
    values = np.asarray(values)
    n = values.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    f = np.fft.fft(values, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(k == 0, 0, f / (1j * np.where(k == 0, 1, k)))
    g[..., n // 2] = 0
    out = np.fft.ifft(g, axis=-1)
    return out if np.iscomplexobj(values) else out.real


def resample(values, m):
    """Trigonometric interpolation of periodic samples onto ``m`` points."""
    values = np.asarray(values)
    n = values.shape[-1]
    f = np.fft.fft(values, axis=-1)
    g = np.zeros(values.shape[:-1] + (m,), dtype=complex)
    half = n // 2
    g[..., :half] = f[..., :half]
    g[..., m - half + 1:] = f[..., half + 1:]
    g[..., half] = 0.5 * f[..., half]
    g[..., m - half] += 0.5 * f[..., half]
    out = np.fft.ifft(g, axis=-1) * (m / n)
    return out if np.iscomplexobj(values) else out.real


def trig_eval(values, theta, deriv=0):
    """Evaluate the trigonometric interpolant (or a derivative) of one row."""
    values = np.asarray(values)
    n = values.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    f = np.fft.fft(values) / n
    f[n // 2] *= 0.5
    k = np.append(k, -k[n // 2])
    f = np.append(f, f[n // 2])
    theta = np.asarray(theta, dtype=float)
    out = np.exp(1j * np.multiply.outer(theta, k)) @ (f * (1j * k) ** deriv)
    return out if np.iscomplexobj(values) else out.real


# ---------------------------------------------------------------------------
# operators


def _grid_of(domain, N):
    return domain if isinstance(domain, BoundaryGrid) else sample_boundary(domain, N)


def _cauchy_kernel(grid):
    cached = grid.__dict__.get("_cauchy_kernel")
    if cached is None:
        z = grid.z.ravel()
        w = (grid.dz * grid.h).ravel()
        diff = z[None, :] - z[:, None]
        np.fill_diagonal(diff, 1.0)
        cached = w[None, :] / diff
        np.fill_diagonal(cached, 0.0)
        grid.__dict__["_cauchy_kernel"] = cached
    return cached


def double_layer_matrix(grid):
    """Interior limit ½I + K of the double layer potential on ∂D."""
    M = _cauchy_kernel(grid)
    K = np.real(M / (2j * np.pi))
    diag = (grid.h / (4 * np.pi)) * np.imag(grid.d2z / grid.dz).ravel()
    K[np.diag_indices_from(K)] = diag
    K[np.diag_indices_from(K)] += 0.5
    return K


def cauchy_boundary(grid, mu):
    """Interior boundary values of C[mu](z) = (1/2πi)∮ mu(y) dy/(y - z)."""
    mu = np.asarray(mu).reshape(grid.nu, grid.N)
    M = _cauchy_kernel(grid)
    flat = mu.ravel()
    total = M @ flat
    nu, N = grid.nu, grid.N
    same = np.zeros(nu * N, dtype=complex)
    for j in range(nu):
        sl = slice(j * N, (j + 1) * N)
        same[sl] = M[sl, sl].sum(axis=1)
    dmu = spectral_diff(mu).ravel()
    out = (total - flat * same + dmu * grid.h) / (2j * np.pi)
    out = out.reshape(nu, N)
    out[0] += mu[0]
    return out


def barycentric_cauchy(grid, bvals, x):
    """Interior values of a holomorphic function from its boundary values."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    z = grid.z.ravel()
    w = (grid.dz * grid.h).ravel()
    bv = np.asarray(bvals).ravel()
    flat = x.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for s in range(0, flat.size, 256):
        blk = flat[s:s + 256]
        d = z[None, :] - blk[:, None]
        hit = np.abs(d) < 1e-14
        d[hit] = 1.0
        D = w[None, :] / d
        num = D @ bv
        den = D.sum(axis=1)
        res = num / den
        rows = np.nonzero(hit.any(axis=1))[0]
        for r in rows:
            res[r] = bv[np.argmax(hit[r])]
        out[s:s + 256] = res
    return out.reshape(x.shape)


def _solve(A, rhs):
    lu, piv = sla.lu_factor(A, check_finite=False)
    if np.any(np.diag(lu) == 0):
        raise SolveFailure("singular system")
    anorm = np.abs(A).sum(axis=0).max()
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond * COND_LIMIT < 1:
        raise SolveFailure(f"condition estimate {1 / max(rcond, 1e-300):.3g} exceeds {COND_LIMIT:g}")
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def _hole_source(grid, k):
    """A point strictly inside hole ``k`` (row index k >= 1)."""
    curve = grid.domain.curves[k]
    c0 = curve.coeffs[curve.modes == 0]
    guess = complex(c0[0]) if c0.size else complex(grid.z[k].mean())
    if _in_hole(grid, k, guess):
        return guess
    # step inside along the outward (into-the-hole) normal
    dist = np.abs(grid.z[k][:, None] - grid.z[k][None, :])
    np.fill_diagonal(dist, np.inf)
    for frac in (0.3, 0.1, 0.03):
        for m in range(0, grid.N, max(1, grid.N // 16)):
            cand = grid.z[k, m] + frac * dist[m].max() * grid.normal[k, m]
            if _in_hole(grid, k, cand):
                return cand
    raise SolveFailure(f"could not place a source inside hole {k}")


def _in_hole(grid, k, p):
    w = np.sum(grid.dz[k] * grid.h / (grid.z[k] - p)) / (2j * np.pi)
    return abs(w + 1) < 1e-6 and np.abs(grid.z[k] - p).min() > 0.2 * grid.spacing


def _as_node_values(grid, g):
    if callable(g):
        vals = np.asarray(g(grid.z), dtype=float)
    else:
        vals = np.asarray(g, dtype=float)
    return np.broadcast_to(vals, grid.z.shape).astype(float)


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True, eq=False)
class HarmonicField:
    """Harmonic function with an explicit holomorphic completion Φ, u = Re Φ.

    ``constants`` holds the per-curve constants of a modified Dirichlet
    solve (u - g = c_j on C_j; for Neumann solves they belong to the
    conjugate).  ``gauge`` is an additive complex constant of Φ.
    """

    grid: BoundaryGrid
    density: np.ndarray
    omega: complex = 1.0
    singular: tuple = ()
    log_sources: tuple = ()
    constants: np.ndarray = field(default_factory=lambda: np.zeros(0))
    gauge: complex = 0.0
    flux_free: bool = True

    @property
    def domain(self):
        return self.grid.domain

    def with_gauge(self, gauge):
        return replace(self, gauge=complex(gauge))

    @cached_property
    def _hol_boundary(self):
        return self.omega * cauchy_boundary(self.grid, self.density)

    @cached_property
    def _hol_boundary_deriv(self):
        return spectral_diff(self._hol_boundary) / self.grid.dz

    # boundary data -------------------------------------------------------
    def boundary_regular(self):
        """Interior limit of the regular part of Φ at the nodes, shape (nu, N)."""
        out = self._hol_boundary + self.gauge
        for zk, A in self.log_sources:
            out = out + A * np.log(self.grid.z - zk)
        return out

    def boundary_regular_deriv(self):
        out = self._hol_boundary_deriv.copy()
        for zk, A in self.log_sources:
            out = out + A / (self.grid.z - zk)
        return out

    def boundary_potential_deriv(self):
        """Φ'(z) at the nodes, singular parts included."""
        out = self.boundary_regular_deriv()
        for p, s in self.singular:
            out = out + s / (self.grid.z - p)
        return out

    def boundary_values(self):
        u = np.real(self.boundary_regular())
        for p, s in self.singular:
            u = u + s * np.log(np.abs(self.grid.z - p))
        return u

    # interior evaluation (no band check) ----------------------------------
    def regular(self, x):
        x = np.asarray(x, dtype=complex)
        out = barycentric_cauchy(self.grid, self._hol_boundary, x) + self.gauge
        for zk, A in self.log_sources:
            out = out + A * np.log(x - zk)
        return out

    def regular_deriv(self, x):
        x = np.asarray(x, dtype=complex)
        out = barycentric_cauchy(self.grid, self._hol_boundary_deriv, x)
        for zk, A in self.log_sources:
            out = out + A / (x - zk)
        return out

    def value(self, x):
        x = np.asarray(x, dtype=complex)
        u = np.real(self.regular(x))
        for p, s in self.singular:
            u = u + s * np.log(np.abs(x - p))
        return u

    def potential_deriv(self, x):
        x = np.asarray(x, dtype=complex)
        out = self.regular_deriv(x)
        for p, s in self.singular:
            out = out + s / (x - p)
        return out

    def fluxes(self, regular_only=True):
        """∮_{C_j} ∂u/∂n ds for every curve."""
        d = self.boundary_regular_deriv() if regular_only else self.boundary_potential_deriv()
        dn = np.real(d * self.grid.normal)
        return (dn * self.grid.weight).sum(axis=1)


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Node values of u, ∂u/∂n, ∂u/∂s and ∂u/∂z, each shaped (nu, N)."""

    value: np.ndarray
    dn: np.ndarray
    ds: np.ndarray
    dz: np.ndarray


def boundary_trace(field):
    grid = field.grid
    d = field.boundary_potential_deriv()
    return BoundaryTrace(
        value=field.boundary_values(),
        dn=np.real(d * grid.normal),
        ds=np.real(d * grid.tangent),
        dz=0.5 * d,
    )


def _check_points(field, points):
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    cls = contains(field.grid, pts)
    if np.any(cls == NEAR_BOUNDARY):
        raise NearBoundary("point within the near-boundary band; refine N")
    if np.any(cls != INSIDE):
        raise ValueError("point outside the domain")
    return pts


def evaluate(field, points):
    """u at interior points (singular parts included)."""
    scalar = np.ndim(points) == 0
    out = field.value(_check_points(field, points))
    return out[0] if scalar else out.reshape(np.shape(points))


def complex_gradient(field, points):
    """∂u/∂z = Φ'/2 at interior points."""
    scalar = np.ndim(points) == 0
    out = 0.5 * field.potential_deriv(_check_points(field, points))
    return out[0] if scalar else out.reshape(np.shape(points))


# ---------------------------------------------------------------------------
# solvers


def solve_dirichlet(domain, g, N=256):
    """Harmonic u with u = g on ∂D.

    Double layer plus one log source per hole; the densities on the holes
    are constrained to zero mean so the square system is uniquely solvable.
    """
    grid = _grid_of(domain, N)
    gv = _as_node_values(grid, g)
    nu, N = grid.nu, grid.N
    n = nu * N
    A = np.zeros((n + nu - 1, n + nu - 1))
    A[:n, :n] = double_layer_matrix(grid)
    sources = []
    for k in range(1, nu):
        zk = _hole_source(grid, k)
        sources.append(zk)
        A[:n, n + k - 1] = np.log(np.abs(grid.z.ravel() - zk))
        row = np.zeros(n)
        row[k * N:(k + 1) * N] = grid.weight[k] / grid.weight[k].sum()
        A[n + k - 1, :n] = row
    rhs = np.concatenate([gv.ravel(), np.zeros(nu - 1)])
    sol = _solve(A, rhs)
    mu = sol[:n].reshape(nu, N)
    logs = tuple((zk, float(c)) for zk, c in zip(sources, sol[n:]))
    return HarmonicField(grid, mu, 1.0, (), logs, np.zeros(nu), 0.0,
                         flux_free=all(abs(c) == 0 for _, c in logs))


def _modified_dirichlet_density(grid, gv):
    nu, N = grid.nu, grid.N
    n = nu * N
    A = np.zeros((n + nu, n + nu))
    A[:n, :n] = double_layer_matrix(grid)
    for j in range(nu):
        A[j * N:(j + 1) * N, n + j] = -1.0
    for k in range(1, nu):
        A[n + k - 1, k * N:(k + 1) * N] = grid.weight[k] / grid.weight[k].sum()
    A[n + nu - 1, n] = 1.0
    rhs = np.concatenate([gv.ravel(), np.zeros(nu)])
    sol = _solve(A, rhs)
    return sol[:n].reshape(nu, N), sol[n:]


def solve_modified_dirichlet(domain, g, N=256):
    """Harmonic u with u - g constant on each curve and zero flux through each.

    The constants are returned in ``field.constants`` with the outer one
    fixed to 0 (gauge 0); callers renormalize.
    """
    grid = _grid_of(domain, N)
    mu, c = _modified_dirichlet_density(grid, _as_node_values(grid, g))
    return HarmonicField(grid, mu, 1.0, (), (), c, 0.0, True)


def solve_conjugate(domain, v, N=256):
    """Harmonic u whose single-valued conjugate equals ``v`` + c_j on C_j.

    Equivalent to a Neumann problem with data ∂v/∂s.
    """
    grid = _grid_of(domain, N)
    mu, c = _modified_dirichlet_density(grid, _as_node_values(grid, v))
    return HarmonicField(grid, mu, 1j, (), (), c, 0.0, True)


def solve_neumann(domain, h, N=256):
    """Harmonic u with ∂u/∂n = h on ∂D, gauge constant 0.

    Raises
    ------
    IncompatibleData
        If ∮ h ds is not zero to 1e-8 relative to ∮ |h| ds.
    """
    grid = _grid_of(domain, N)
    hv = _as_node_values(grid, h)
    total = np.sum(hv * grid.weight)
    if abs(total) > 1e-8 * np.sum(np.abs(hv) * grid.weight):
        raise IncompatibleData(f"∮ h ds = {total:.3e} is not zero")
    logs = []
    resid = hv.copy()
    for k in range(1, grid.nu):
        flux = np.sum(hv[k] * grid.weight[k])
        if flux == 0:
            continue
        zk = _hole_source(grid, k)
        A = -flux / (2 * np.pi)
        logs.append((zk, A))
        resid = resid - A * np.real(grid.normal / (grid.z - zk))
    # v along each curve: ∂v/∂s = ∂u/∂n
    dv_dtheta = resid * grid.speed
    dv_dtheta = dv_dtheta - dv_dtheta.mean(axis=1, keepdims=True)
    v = spectral_antiderivative(dv_dtheta)
    mu, c = _modified_dirichlet_density(grid, v)
    return HarmonicField(grid, mu, 1j, (), tuple(logs), c, 0.0, not logs)


def green_function(domain, pole, N=256):
    """g(z) = -log|z - pole| + harmonic corrector, zero on ∂D."""
    pole = complex(pole)
    grid = _grid_of(domain, N)
    if contains(grid, pole) != INSIDE and grid.winding(pole)[0] < 0.5:
        raise ValueError("pole must be interior")
    reg = solve_dirichlet(grid, lambda z: np.log(np.abs(z - pole)))
    return replace(reg, singular=((pole, -1.0),))
