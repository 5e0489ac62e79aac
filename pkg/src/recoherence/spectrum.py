"""Photon frequency distributions and the decoherence function.

The decoherence function is the spectral average

    D(gamma) = integral f(omega) exp(i gamma omega) d omega

whose modulus is the coherence envelope and whose phase is the carrier.

Width convention: a :class:`Gaussian` is parameterized by ``sigma`` such
that ``|D(gamma)| = exp(-gamma**2 sigma**2 / 16)``.  The intensity density
f(omega) is therefore normal with standard deviation ``sigma / (2 sqrt 2)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ContractError, ResolutionError

SPEED_OF_LIGHT = 2.99792458e8  # m/s, exact
NORMALIZATION_TOL = 1e-9
POINTS_PER_PERIOD = 20


@dataclass(frozen=True)
class Gaussian:
    omega0: float  # rad/s
    sigma: float  # rad/s, envelope parameter (see module docstring)

    def __post_init__(self):
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise ValueError(f"omega0 must be positive, got {self.omega0!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def intensity_sd(self) -> float:
        """Standard deviation of the intensity density f(omega)."""
        return self.sigma / (2.0 * math.sqrt(2.0))


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Sampled density on a strictly increasing grid, linear between nodes."""

    omega: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        f = np.array(self.density, dtype=float)
        if w.ndim != 1 or w.shape != f.shape or w.size < 2:
            raise ContractError("omega and density must be 1-D arrays of equal length >= 2")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(f)):
            raise ContractError("tabulated spectrum contains non-finite values")
        if np.any(np.diff(w) <= 0):
            raise ContractError("omega grid must be strictly increasing")
        if np.any(f < 0):
            raise ContractError("densities must be non-negative")
        total = _trapezoid(f, w)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ContractError(f"tabulated density integrates to {total!r}, expected 1")
        w.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "density", f)


Spectrum = Union[Gaussian, Tabulated]


@dataclass(frozen=True)
class DecoherenceFactor:
    value: complex
    gamma: float  # s

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return math.atan2(self.value.imag, self.value.real)


def _trapezoid(y, x):
    return np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x))


def gaussian_from_experiment(lambda0: float, sigma_hz: float, angular: bool = False) -> Gaussian:
    """Build the Gaussian spectrum from a central wavelength and a frequency spread.

    ``sigma_hz`` is read as ordinary frequency and multiplied by 2 pi.
    Pass ``angular=True`` to take it as rad/s unchanged.
    """
    if not lambda0 > 0:
        raise ValueError(f"lambda0 must be positive, got {lambda0!r}")
    if not sigma_hz > 0:
        raise ValueError(f"sigma_hz must be positive, got {sigma_hz!r}")
    omega0 = 2.0 * math.pi * SPEED_OF_LIGHT / lambda0
    sigma = sigma_hz if angular else 2.0 * math.pi * sigma_hz
    return Gaussian(omega0, sigma)


def density(s: Spectrum, omega):
    """Intensity density f(omega); zero outside a tabulated grid."""
    omega = np.asarray(omega, dtype=float)
    if isinstance(s, Gaussian):
        sd = s.intensity_sd
        z = (omega - s.omega0) / sd
        return np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * sd)
    return np.interp(omega, s.omega, s.density, left=0.0, right=0.0)


def integration_window(s: Spectrum, n_sd: float = 6.0) -> tuple[float, float]:
    if isinstance(s, Gaussian):
        half = n_sd * s.intensity_sd
        return s.omega0 - half, s.omega0 + half
    return float(s.omega[0]), float(s.omega[-1])


def coherence(s: Spectrum, gamma):
    """Complex D(gamma); vectorized over ``gamma`` for the Gaussian variant."""
    if isinstance(s, Gaussian):
        g = np.asarray(gamma, dtype=float)
        out = np.exp(1j * g * s.omega0 - (g * s.sigma) ** 2 / 16.0)
        return complex(out) if out.ndim == 0 else out
    g = float(gamma)
    if g != 0.0:
        step = float(np.max(np.diff(s.omega)))
        if step * abs(g) > 2.0 * math.pi / POINTS_PER_PERIOD:
            raise ResolutionError(
                f"grid step {step:.3e} rad/s under-resolves exp(i gamma omega) at gamma={g:.3e} s; "
                f"need <= {2.0 * math.pi / (POINTS_PER_PERIOD * abs(g)):.3e}"
            )
    return complex(_trapezoid(s.density * np.exp(1j * g * s.omega), s.omega))


def decoherence_factor(s: Spectrum, gamma: float) -> DecoherenceFactor:
    if gamma == 0:
        # exact by normalization of f
        return DecoherenceFactor(1.0 + 0.0j, 0.0)
    return DecoherenceFactor(coherence(s, gamma), float(gamma))


def sample_frequency(s: Spectrum, rng: np.random.Generator, size=None):
    """Draw frequencies from f(omega) using the caller's generator."""
    if isinstance(s, Gaussian):
        return rng.normal(s.omega0, s.intensity_sd, size)
    u = rng.random(size)
    return _inverse_cdf(s, u)


def _inverse_cdf(s: Tabulated, u):
    # exact inverse of the piecewise-linear density's cumulative
    w, f = s.omega, s.density
    h = np.diff(w)
    seg_mass = 0.5 * (f[1:] + f[:-1]) * h
    cum = np.concatenate(([0.0], np.cumsum(seg_mass)))
    target = np.asarray(u, dtype=float) * cum[-1]
    k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(h) - 1)
    r = target - cum[k]
    f0, f1, hk = f[k], f[1:][k], h[k]
    slope = (f1 - f0) / hk
    # root of f0 t + slope t^2 / 2 = r in the cancellation-free form
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = np.sqrt(np.maximum(f0 * f0 + 2.0 * slope * r, 0.0))
        t = 2.0 * r / (f0 + disc)
    t = np.where(np.isfinite(t), t, 0.0)
    out = w[k] + np.clip(t, 0.0, hk)
    return float(out) if np.ndim(out) == 0 else out


def tabulate(s: Gaussian, n_points: int = 4001, half_width_sd: float = 10.0) -> Tabulated:
    """Sample a Gaussian on a uniform grid, renormalized under the trapezoid rule."""
    half = half_width_sd * s.intensity_sd
    w = np.linspace(s.omega0 - half, s.omega0 + half, n_points)
    f = density(s, w)
    f = f / _trapezoid(f, w)
    return Tabulated(w, f)


def load_csv(path) -> Tabulated:
    """Read a two-column CSV ``omega_rad_per_s,density`` with a header row."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ContractError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        float(header[0])
    except (ValueError, IndexError):
        pass
    else:
        raise ContractError(f"{path}: header row required")
    if any(len(r) != 2 for r in body):
        raise ContractError(f"{path}: expected exactly two columns per row")
    data = np.array(body, dtype=float)
    return Tabulated(data[:, 0], data[:, 1])


def save_csv(s: Tabulated, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["omega_rad_per_s", "density"])
        for w, f in zip(s.omega, s.density):
            out.writerow([repr(float(w)), repr(float(f))])
