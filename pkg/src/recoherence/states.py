"""Two-level polarization states in the (H, V) basis."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError

ATOL = 1e-12
_NORM_SLACK = 1e-9


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude pair ``amp_h |H> + amp_v |V>``.

    Amplitudes within ``1e-9`` of unit norm are renormalized; anything
    further off raises :class:`ContractError`.
    """

    amp_h: complex
    amp_v: complex

    def __post_init__(self):
        h, v = complex(self.amp_h), complex(self.amp_v)
        norm2 = abs(h) ** 2 + abs(v) ** 2
        if not math.isfinite(norm2) or abs(norm2 - 1.0) > _NORM_SLACK:
            raise ContractError(f"state is not normalized: |h|^2+|v|^2 = {norm2!r}")
        # leave rounding-level deviations alone so swaps and phases stay exact
        if abs(norm2 - 1.0) > 1e-14:
            s = math.sqrt(norm2)
            h, v = h / s, v / s
        object.__setattr__(self, "amp_h", h)
        object.__setattr__(self, "amp_v", v)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_h, self.amp_v], dtype=complex)

    @property
    def mag_v_sq(self) -> float:
        return abs(self.amp_v) ** 2

    @property
    def phase(self) -> float:
        """Relative phase arg(amp_v) - arg(amp_h), zero if either amplitude vanishes."""
        if self.amp_h == 0 or self.amp_v == 0:
            return 0.0
        return cmath.phase(self.amp_v) - cmath.phase(self.amp_h)

    def orthogonal(self) -> PureState:
        return PureState(-self.amp_v.conjugate(), self.amp_h.conjugate())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 density operator, basis order (H, V). Validated on construction."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (2, 2):
            raise ContractError(f"density matrix must be 2x2, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=ATOL):
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > ATOL:
            raise ContractError(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -ATOL:
            raise ContractError(f"density matrix has negative eigenvalue {lo!r}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    __hash__ = None


H = PureState(1.0, 0.0)
V = PureState(0.0, 1.0)
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))
MINUS = PureState(1 / math.sqrt(2), -1 / math.sqrt(2))


def make_pure(mag_v_sq: float, phi: float = 0.0) -> PureState:
    """State ``sqrt(1-b)|H> + sqrt(b) e^{i phi}|V>`` with ``b = mag_v_sq``."""
    if not 0.0 <= mag_v_sq <= 1.0:
        raise ValueError(f"mag_v_sq must lie in [0, 1], got {mag_v_sq!r}")
    return PureState(math.sqrt(1.0 - mag_v_sq), math.sqrt(mag_v_sq) * cmath.exp(1j * phi))


def density_of(psi: PureState) -> DensityMatrix:
    vec = psi.vector
    return DensityMatrix(np.outer(vec, vec.conj()))


def detect_probability(analyzer: PureState, rho) -> float:
    """Born probability ``<a|rho|a>`` of passing an analyzer set to ``analyzer``."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    a = analyzer.vector
    p = float(np.real(a.conj() @ rho.entries @ a))
    # clip rounding excursions only; real violations are caught by DensityMatrix
    return min(1.0, max(0.0, p))


def visibility(p: float) -> float:
    return 2.0 * p - 1.0


def pauli_x(psi: PureState) -> PureState:
    return PureState(psi.amp_v, psi.amp_h)
