"""Projective +/- measurement between two dephasing segments.

A photon first crosses a segment of delay ``gamma1``, is projected onto the
diagonal basis, and each outcome crosses a second segment of delay
``gamma2`` before an H/V swap.  The two outcome paths are recombined
incoherently at detection.  When the second delay matches the first, the
frequency-dependent phase written by the first segment is partially undone
and the detected probability of the prepared state recovers towards
``1/2 + |alpha|^2 |beta|^2`` instead of decaying to ``|alpha|^4 + |beta|^4``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedSpectrumError
from .quadrature import quadrature
from .spectrum import Gaussian, Spectrum, coherence
from .states import PureState

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementScenario:
    initial: PureState
    spectrum: Spectrum
    gamma1: float  # s, before the measurement
    gamma2: float  # s, after the measurement
    analyzer: Optional[PureState] = None  # defaults to the initial state

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError(f"delays must be non-negative, got {self.gamma1!r}, {self.gamma2!r}")
        if self.analyzer is None:
            object.__setattr__(self, "analyzer", self.initial)

    @property
    def xi(self) -> float:
        """Delay mismatch ``gamma1 - gamma2``; zero at the echo condition."""
        return self.gamma1 - self.gamma2

    def analyzer_is_initial(self) -> bool:
        # equal up to a global phase
        overlap = abs(np.vdot(self.analyzer.vector, self.initial.vector))
        return abs(overlap - 1.0) <= 1e-12


@dataclass(frozen=True)
class BranchWeights:
    k_plus: float
    k_minus: float


def _coupling(psi: PureState) -> float:
    return abs(psi.amp_h) * abs(psi.amp_v)


def branch_weights(initial: PureState, gamma1: float, omega: float) -> BranchWeights:
    """Probabilities of the + and - outcomes for one frequency."""
    c = 2.0 * _coupling(initial) * math.cos(initial.phase + gamma1 * omega)
    return BranchWeights(0.5 * (1.0 + c), 0.5 * (1.0 - c))


def branch_states(omega: float, gamma2: float) -> tuple[PureState, PureState]:
    """Path 1 (+) and path 2 (-) states after the second segment and the H/V swap."""
    ph = cmath.exp(1j * gamma2 * omega)
    r = 1.0 / math.sqrt(2.0)
    return PureState(r * ph, r), PureState(-r * ph, r)


def _require_initial_analyzer(sc: MeasurementScenario):
    if not sc.analyzer_is_initial():
        raise ValueError(
            "analyzer differs from the initial state; use recovered_probability_general"
        )


def recovered_probability_quadrature(sc: MeasurementScenario, tol: float = DEFAULT_TOL) -> float:
    """Detected probability of the prepared state with the measurement inserted, by quadrature."""
    _require_initial_analyzer(sc)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    pa, pb = abs(sc.initial.amp_h) ** 2, abs(sc.initial.amp_v) ** 2
    phi, g1, g2 = sc.initial.phase, sc.gamma1, sc.gamma2

    def integrand(w):
        return np.cos(phi + g1 * w) * np.cos(phi + g2 * w)

    integral = quadrature(integrand, sc.spectrum, tol / max(2.0 * pa * pb, 1e-300))
    p = 0.5 + 2.0 * pa * pb * integral
    return min(1.0, max(0.0, p))


def recovered_probability_general(sc: MeasurementScenario, tol: float = DEFAULT_TOL) -> float:
    """Detected probability for an arbitrary analyzer.

    Sums, over both paths, outcome weight times the Born probability of the
    analyzer in that path's output state, averaged over the spectrum.
    """
    psi, a = sc.initial, sc.analyzer
    coupling, phi = 2.0 * _coupling(psi), psi.phase
    r = 1.0 / math.sqrt(2.0)
    ah, av = a.amp_h.conjugate(), a.amp_v.conjugate()

    def integrand(w):
        k_plus = 0.5 * (1.0 + coupling * np.cos(phi + sc.gamma1 * w))
        ph = np.exp(1j * sc.gamma2 * w)
        p1 = np.abs(ah * r * ph + av * r) ** 2
        p2 = np.abs(-ah * r * ph + av * r) ** 2
        return k_plus * p1 + (1.0 - k_plus) * p2

    return min(1.0, max(0.0, quadrature(integrand, sc.spectrum, tol)))


def closed_form_probability(mag_v_sq, phi, gamma1, gamma2, s: Gaussian):
    """Vectorized Gaussian closed form of the recovered probability.

    ``1/2 + b(1-b) [Re(e^{2i phi} D(g1+g2)) + Re D(g1-g2)]``, which for
    phi = 0 is ``(2 + Re D(g) + Re D(xi)) / 4`` with g = g1+g2, xi = g1-g2.
    """
    if not isinstance(s, Gaussian):
        raise UnsupportedSpectrumError(
            f"closed form needs a Gaussian spectrum, got {type(s).__name__}; use quadrature"
        )
    b = np.asarray(mag_v_sq, dtype=float)
    g1 = np.asarray(gamma1, dtype=float)
    g2 = np.asarray(gamma2, dtype=float)
    total = np.exp(2j * np.asarray(phi, dtype=float)) * coherence(s, g1 + g2)
    diff = coherence(s, g1 - g2)
    p = np.clip(0.5 + b * (1.0 - b) * (np.real(total) + np.real(diff)), 0.0, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def recovered_probability_closed(sc: MeasurementScenario) -> float:
    _require_initial_analyzer(sc)
    return closed_form_probability(
        sc.initial.mag_v_sq, sc.initial.phase, sc.gamma1, sc.gamma2, sc.spectrum
    )


def asymptotic_with_measurement(b: float) -> float:
    """Long-delay, equal-split limit with the measurement: ``1/2 + b(1-b)``."""
    _check_b(b)
    return 0.5 + b * (1.0 - b)


def asymptotic_without_measurement(b: float) -> float:
    """Long-delay limit without measurement: ``(1-b)^2 + b^2``."""
    _check_b(b)
    return (1.0 - b) ** 2 + b * b


def _check_b(b):
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"|beta|^2 must lie in [0, 1], got {b!r}")


def recovery_window() -> tuple[float, float]:
    """Range of ``|beta|^2`` where the measurement raises the asymptotic fidelity."""
    r = math.sqrt(3.0)
    return (3.0 - r) / 6.0, (3.0 + r) / 6.0


def bisect_root(f, lo: float, hi: float, xtol: float = 0.0, max_iter: int = 200) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("f(lo) and f(hi) must have opposite signs")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def recovery_crossings(xtol: float = 1e-12) -> tuple[float, float]:
    """Locate where the two asymptotic curves cross, numerically."""

    def gap(b):
        return asymptotic_with_measurement(b) - asymptotic_without_measurement(b)

    return bisect_root(gap, 0.0, 0.5, xtol), bisect_root(gap, 0.5, 1.0, xtol)


def classical_limit() -> float:
    """Best average fidelity reachable classically on the maximally recovered family."""
    return 2.0 / 3.0
