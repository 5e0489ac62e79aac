"""Adaptive quadrature over a spectrum.

Each interval is integrated with a fixed Gauss-Legendre rule and again as
two halves; the halves are accepted once the two estimates agree to the
interval's share of the absolute tolerance, otherwise both halves are
queued for another round.  All intervals of a round are evaluated in one
vectorized call to the integrand.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError
from .spectrum import Spectrum, Tabulated, density, integration_window

MAX_INTERVALS = 2**20
WINDOW_SD = 8.0
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(10)


def _rule(func, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(func(x), dtype=float)
    y = np.broadcast_to(y, x.shape)
    return half * (y @ _WEIGHTS)


def integrate(func, a, b, tol, breakpoints=None, max_intervals=MAX_INTERVALS):
    """Integrate a vectorized ``func`` over ``[a, b]`` to absolute error ``tol``.

    ``breakpoints`` seeds the initial partition (e.g. kinks of the integrand).
    Returns ``(value, error_estimate)``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if not b > a:
        if a == b:
            return 0.0, 0.0
        raise ValueError("integration limits must satisfy a < b")
    edges = np.array([a, b] if breakpoints is None else sorted({a, b, *breakpoints}), dtype=float)
    edges = edges[(edges >= a) & (edges <= b)]
    lo, hi = edges[:-1], edges[1:]
    coarse = _rule(func, lo, hi)
    span = b - a
    n_intervals = lo.size
    total, err_total = 0.0, 0.0

    while lo.size:
        mid = 0.5 * (lo + hi)
        left = _rule(func, lo, mid)
        right = _rule(func, mid, hi)
        fine = left + right
        err = np.abs(fine - coarse)
        # smallest representable split: accept whatever we have
        degenerate = (mid <= lo) | (mid >= hi)
        done = (err <= tol * (hi - lo) / span) | degenerate
        total += float(np.sum(fine[done]))
        err_total += float(np.sum(err[done]))
        keep = ~done
        if not keep.any():
            break
        n_intervals += int(keep.sum())
        if n_intervals > max_intervals:
            estimate = total + float(np.sum(fine[keep]))
            bound = err_total + float(np.sum(err[keep]))
            raise QuadratureError(
                f"subdivision budget of {max_intervals} intervals exhausted", estimate, bound
            )
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        coarse = np.concatenate((left[keep], right[keep]))

    return total, err_total


def quadrature(integrand, s: Spectrum, tol: float, max_intervals: int = MAX_INTERVALS) -> float:
    """Spectral average ``integral f(omega) integrand(omega) d omega`` to absolute ``tol``.

    Gaussian spectra are integrated over ``omega0 +- 8`` intensity standard
    deviations (truncated mass about 1e-15); tabulated spectra over their
    grid, with every node as a breakpoint.
    """
    if isinstance(s, Tabulated):
        a, b = integration_window(s)
        breaks = s.omega
    else:
        a, b = integration_window(s, WINDOW_SD)
        breaks = None

    def weighted(w):
        return density(s, w) * integrand(w)

    value, _ = integrate(weighted, a, b, tol, breakpoints=breaks, max_intervals=max_intervals)
    return value
