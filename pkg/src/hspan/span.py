"""Harmonic span s = α - β, the S-function, and the Poincaré distance.

The distance uses the normalization d = ½ log((1 + ρ)/(1 - ρ)) with
ρ = exp(-g_a(b)), for which s = 4 log cosh d on simply connected domains.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .bie import green_function
from .domain import INSIDE, OUTSIDE, contains, sample_boundary
from .errors import HspanError, MarkedPointsTooClose, NotNested, NotSimplyConnected
from .principal import compute_principal_pair, e_log_area


@dataclass(frozen=True)
class SpanResult:
    s: float
    alpha: float
    beta: float
    s_area: float
    fingerprint: str
    a: complex
    b: complex


def harmonic_span(md, N=256):
    """Span of ``md`` plus its companion value (2/π) E_log(H)."""
    pair = compute_principal_pair(md, N)
    return SpanResult(
        s=pair.span,
        alpha=pair.alpha,
        beta=pair.beta,
        s_area=2.0 / np.pi * e_log_area(pair),
        fingerprint=md.fingerprint(),
        a=md.a,
        b=md.b,
    )


def poincare_distance(md, N=256):
    """d(a, b) = ½ log((1 + ρ)/(1 - ρ)) with ρ = exp(-g_a(b))."""
    if md.connectivity > 1:
        raise NotSimplyConnected("the Poincaré distance needs a simply connected domain")
    if md.a == md.b:
        return 0.0
    g = green_function(md, md.a, N)
    rho = float(np.exp(-g.value(np.array([md.b]))[0]))
    return float(np.arctanh(rho))


def check_span_distance_identity(md, N=256):
    """|s - 4 log cosh d| on a simply connected domain."""
    if md.connectivity > 1:
        raise NotSimplyConnected("the identity is stated for simply connected domains")
    d = poincare_distance(md, N)
    s = harmonic_span(md, N).s
    return abs(s - 4.0 * np.log(np.cosh(d)))


# ---------------------------------------------------------------------------
# S-function


@dataclass(frozen=True)
class SFunctionGrid:
    xi: complex
    eta: np.ndarray
    values: np.ndarray
    status: tuple

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["eta_re", "eta_im", "span", "status"])
            for e, v, st in zip(self.eta, self.values, self.status):
                w.writerow([f"{e.real:.9g}", f"{e.imag:.9g}",
                            "" if np.isnan(v) else f"{v:.9g}", st])
        finally:
            if own:
                fh.close()


def _span_at(domain, xi, eta, N):
    if eta == xi:
        return 0.0, "diagonal"
    try:
        return harmonic_span(domain.with_points(xi, eta), N).s, "ok"
    except MarkedPointsTooClose:
        return np.nan, "too-close"
    except HspanError as exc:
        return np.nan, type(exc).__name__


def s_function_grid(domain, xi, eta, N=256, workers=1):
    """s_R(ξ, η) over the points ``eta``.

    The diagonal is 0; points inside the too-close band or outside the
    domain are recorded as missing (NaN) with a status string.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=complex)).ravel()
    grid = sample_boundary(domain, N)
    cls = contains(grid, eta)

    def one(k):
        if cls[k] != INSIDE:
            return np.nan, cls[k]
        return _span_at(domain, xi, eta[k], N)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            res = list(ex.map(one, range(len(eta))))
    else:
        res = [one(k) for k in range(len(eta))]
    vals = np.array([r[0] for r in res], dtype=float)
    return SFunctionGrid(complex(xi), eta, vals, tuple(str(r[1]) for r in res))


# ---------------------------------------------------------------------------
# exhaustion


@dataclass(frozen=True)
class ExhaustionReport:
    spans: np.ndarray
    monotone: bool
    limit: float | None
    gap: float | None


def _nested(inner, outer, n=128):
    th = 2 * np.pi * np.arange(n) / n
    pts = np.concatenate([c.point(th) for c in inner.curves])
    return not np.any(contains(outer, pts) == OUTSIDE)


def exhaustion_sequence(domains, a, b, full=None, N=256, slack=1e-8):
    """Spans along an increasing sequence of domains.

    Raises
    ------
    NotNested
        If some ∂D_n leaves D_{n+1}.
    """
    domains = [d.with_points(a, b) for d in domains]
    for k in range(len(domains) - 1):
        if not _nested(domains[k], domains[k + 1]):
            raise NotNested(f"domain {k} is not contained in domain {k + 1}")
    spans = np.array([harmonic_span(d, N).s for d in domains])
    monotone = bool(np.all(np.diff(spans) <= slack))
    limit = gap = None
    if full is not None:
        limit = harmonic_span(full.with_points(a, b), N).s
        gap = float(spans[-1] - limit)
    return ExhaustionReport(spans, monotone, limit, gap)
