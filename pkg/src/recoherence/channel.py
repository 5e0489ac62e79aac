"""Birefringent dephasing: frequency-conditioned phase and its spectral average."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .spectrum import SPEED_OF_LIGHT, Spectrum, decoherence_factor
from .states import DensityMatrix, PureState


@dataclass(frozen=True)
class Channel:
    """Birefringent segment described by its group delay ``gamma = L dn / c`` (s).

    Negative delays are allowed for analytic differences of two segments.
    Segments with a common optic axis compose by adding delays.
    """

    gamma: float

    def __add__(self, other: Channel) -> Channel:
        return Channel(self.gamma + other.gamma)

    def __sub__(self, other: Channel) -> Channel:
        return Channel(self.gamma - other.gamma)


def gamma_from_retardation(x: float, lambda0: float) -> Channel:
    """Channel whose retardation ``L dn`` is ``x`` central wavelengths."""
    if not lambda0 > 0:
        raise ValueError(f"lambda0 must be positive, got {lambda0!r}")
    return Channel(x * lambda0 / SPEED_OF_LIGHT)


def gamma_from_thickness(thickness: float, delta_n: float) -> Channel:
    if thickness < 0:
        raise ValueError(f"thickness must be non-negative, got {thickness!r}")
    if not delta_n > 0:
        raise ValueError(f"delta_n must be positive, got {delta_n!r}")
    return Channel(thickness * delta_n / SPEED_OF_LIGHT)


def evolve_conditional(psi: PureState, ch: Channel, omega: float) -> PureState:
    """Output state for a single frequency; only the V amplitude picks up phase."""
    return PureState(psi.amp_h, psi.amp_v * cmath.exp(1j * ch.gamma * omega))


def reduced_state(psi: PureState, s: Spectrum, ch: Channel) -> DensityMatrix:
    d = decoherence_factor(s, ch.gamma).value
    a, b = psi.amp_h, psi.amp_v
    off = a * b.conjugate() * d.conjugate()
    rho = np.array([[abs(a) ** 2, off], [off.conjugate(), abs(b) ** 2]], dtype=complex)
    return DensityMatrix(rho)


def survival_probability(psi: PureState, s: Spectrum, ch: Channel) -> float:
    """Probability of finding the input state again after the channel."""
    pa, pb = abs(psi.amp_h) ** 2, abs(psi.amp_v) ** 2
    d = decoherence_factor(s, ch.gamma).value
    p = pa * pa + pb * pb + 2.0 * pa * pb * d.real
    return min(1.0, max(0.0, p))
