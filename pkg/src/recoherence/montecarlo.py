"""Photon-by-photon simulation of the coincidence-counting experiment.

Random streams
--------------
All randomness derives from ``numpy.random.SeedSequence(seed)`` feeding
counter-based ``Philox`` generators:

* ``spawn_key=(0,)`` draws the Poisson number of detected pairs;
* ``spawn_key=(1, j)`` serves photons ``j*BLOCK .. (j+1)*BLOCK - 1``.
  Within a block the draws are, in order: ``n`` frequencies, ``n``
  branch uniforms, ``n`` detection uniforms.

Since every photon block has its own stream, the result does not depend on
how blocks are spread across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .measurement import MeasurementScenario
from .spectrum import Spectrum, sample_frequency
from .states import PureState

BLOCK = 1 << 16
PAIR_RATE = 28000.0  # coincidences per second
INTEGRATION_TIME = 10.0  # s


@dataclass(frozen=True)
class NoMeasurementScenario:
    initial: PureState
    spectrum: Spectrum
    gamma: float  # s
    analyzer: Optional[PureState] = None

    def __post_init__(self):
        if self.analyzer is None:
            object.__setattr__(self, "analyzer", self.initial)


Scenario = Union[MeasurementScenario, NoMeasurementScenario]


@dataclass(frozen=True)
class CountingConfig:
    scenario: Scenario
    pair_rate: float = PAIR_RATE
    integration_time: float = INTEGRATION_TIME
    seed: int = 0

    def __post_init__(self):
        if not self.pair_rate > 0:
            raise ValueError(f"pair_rate must be positive, got {self.pair_rate!r}")
        if not self.integration_time > 0:
            raise ValueError(f"integration_time must be positive, got {self.integration_time!r}")

    @property
    def mean_pairs(self) -> float:
        return self.pair_rate * self.integration_time


@dataclass(frozen=True)
class CountRecord:
    n_total: int
    n_detected: int
    p_hat: float
    std_err: float

    @classmethod
    def from_counts(cls, n_total: int, n_detected: int) -> CountRecord:
        if n_total == 0:
            return cls(0, 0, math.nan, math.nan)
        p = n_detected / n_total
        return cls(n_total, n_detected, p, math.sqrt(p * (1.0 - p) / n_total))


def _stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def draw_total(cfg: CountingConfig) -> int:
    return int(_stream(cfg.seed, 0).poisson(cfg.mean_pairs))


def _interference(q: complex, theta: np.ndarray) -> np.ndarray:
    """``2 Re(q e^{-i theta})`` without forming complex arrays."""
    return 2.0 * (q.real * np.cos(theta) + q.imag * np.sin(theta))


def _detect_probability(sc: Scenario, omega: np.ndarray, u_branch: np.ndarray) -> np.ndarray:
    # Born probabilities |<a|state>|^2 expanded as |c0|^2 + |c1|^2 + 2 Re(c0 c1* e^{-i theta})
    a_h, a_v = sc.initial.amp_h, sc.initial.amp_v
    d_h, d_v = sc.analyzer.amp_h.conjugate(), sc.analyzer.amp_v.conjugate()
    if isinstance(sc, NoMeasurementScenario):
        c0, c1 = d_h * a_h, d_v * a_v
        return abs(c0) ** 2 + abs(c1) ** 2 + _interference(c0 * c1.conjugate(), sc.gamma * omega)

    # + outcome: |<+|(a_h, a_v e^{i g1 w})>|^2
    k_plus = 0.5 * (
        abs(a_h) ** 2 + abs(a_v) ** 2 + _interference(a_h * a_v.conjugate(), sc.gamma1 * omega)
    )
    sign = np.where(u_branch < k_plus, 1.0, -1.0)
    # path states (sign e^{i g2 w}|H> + |V>)/sqrt2 against the analyzer
    q = (d_h * d_v.conjugate()).conjugate()
    return 0.5 * (abs(d_h) ** 2 + abs(d_v) ** 2 + sign * _interference(q, sc.gamma2 * omega))


def _run_block(sc: Scenario, seed: int, j: int, n: int) -> int:
    rng = _stream(seed, 1, j)
    omega = sample_frequency(sc.spectrum, rng, n)
    u_branch = rng.random(n)
    u_det = rng.random(n)
    return int(np.count_nonzero(u_det < _detect_probability(sc, omega, u_branch)))


def simulate_counts(cfg: CountingConfig, workers: int = 1) -> CountRecord:
    """Simulate one integration window of coincidence counting."""
    n_total = draw_total(cfg)
    sizes = [min(BLOCK, n_total - start) for start in range(0, n_total, BLOCK)]
    jobs = [(cfg.scenario, cfg.seed, j, n) for j, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _run_block(*job), jobs))
    else:
        counts = [_run_block(*job) for job in jobs]
    return CountRecord.from_counts(n_total, sum(counts))
