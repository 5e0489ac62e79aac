"""Parameter scans of the dephasing and recovery curves, returned as tables.

Retardations ``x`` are in units of the central wavelength.  At integer
``x`` the carrier phase ``gamma * omega0 = 2 pi x`` is a multiple of 2 pi,
which is how the tilted quartz plates were set in the experiment.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .channel import Channel, gamma_from_retardation, survival_probability
from .measurement import (
    MeasurementScenario,
    asymptotic_with_measurement,
    asymptotic_without_measurement,
    bisect_root,
    closed_form_probability,
    recovered_probability_quadrature,
)
from .montecarlo import (
    INTEGRATION_TIME,
    PAIR_RATE,
    CountingConfig,
    NoMeasurementScenario,
    simulate_counts,
)
from .spectrum import Gaussian, coherence, gaussian_from_experiment
from .states import PLUS

KINDS = ("landscape", "visibility", "fidelity_trajectory", "tilt")


@dataclass(frozen=True)
class Physics:
    lambda0: float = 0.78e-6  # m
    sigma_hz: float = 6.9e12  # ordinary frequency spread
    delta_n: float = 0.01
    sigma_angular: bool = False  # take sigma_hz as rad/s (diagnostic only)

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0!r}")
        if not self.sigma_hz > 0:
            raise ValueError(f"sigma_hz must be positive, got {self.sigma_hz!r}")
        if not self.delta_n > 0:
            raise ValueError(f"delta_n must be positive, got {self.delta_n!r}")

    def spectrum(self) -> Gaussian:
        return gaussian_from_experiment(self.lambda0, self.sigma_hz, angular=self.sigma_angular)

    def gamma(self, x: float) -> float:
        return gamma_from_retardation(x, self.lambda0).gamma

    def thickness(self, x: float) -> float:
        """Quartz thickness (m) giving retardation ``x``."""
        return x * self.lambda0 / self.delta_n


@dataclass(frozen=True)
class ScanRow:
    x: float
    p_no_meas: float
    p_with_meas: float
    v_no_meas: float
    v_with_meas: float
    mc_p_hat: Optional[float] = None
    mc_std_err: Optional[float] = None
    p_with_quad: Optional[float] = None
    segment: str = ""


@dataclass(frozen=True)
class ScanSpec:
    kind: str
    grid: Sequence[float]
    physics: Physics = field(default_factory=Physics)
    include_montecarlo: bool = False
    seed: int = 0
    tol: Optional[float] = None  # when set, add a quadrature column at this tolerance
    l1: float = 74.0  # insertion retardation for trajectory and tilt scans
    pair_rate: float = PAIR_RATE
    integration_time: float = INTEGRATION_TIME
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scan kind {self.kind!r}; expected one of {KINDS}")
        _check_grid(self.grid)


def _check_grid(grid):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return g


def _row(x, p_no, p_with, segment=""):
    p_no, p_with = float(p_no), float(p_with)
    return ScanRow(float(x), p_no, p_with, 2.0 * p_no - 1.0, 2.0 * p_with - 1.0, segment=segment)


def _row_seed(seed: int, i: int) -> int:
    state = np.random.SeedSequence(seed, spawn_key=(2, i)).generate_state(2, np.uint64)
    return int(state[0]) << 64 | int(state[1])


def landscape(b_grid) -> list[ScanRow]:
    """Asymptotic fidelity against ``|beta|^2``, with and without the measurement."""
    b_grid = _check_grid(b_grid)
    return [
        _row(b, asymptotic_without_measurement(b), asymptotic_with_measurement(b))
        for b in b_grid
    ]


def visibility_scan(x_grid, physics: Physics = Physics()) -> list[ScanRow]:
    """Visibility of |+> after total retardation ``x``; measurement inserted at ``x/2``."""
    x = _check_grid(x_grid)
    s = physics.spectrum()
    g = np.array([physics.gamma(v) for v in x])
    p_no = 0.5 + 0.5 * np.real(np.atleast_1d(coherence(s, g)))
    p_with = closed_form_probability(0.5, 0.0, g / 2, g / 2, s)
    return [_row(*vals) for vals in zip(x, p_no, np.atleast_1d(p_with))]


def _trajectory_point(x, l1, physics, s):
    if x <= l1:
        p = survival_probability(PLUS, s, Channel(physics.gamma(x)))
        return p, p
    p_no = survival_probability(PLUS, s, Channel(physics.gamma(x)))
    p_with = closed_form_probability(0.5, 0.0, physics.gamma(l1), physics.gamma(x - l1), s)
    return p_no, p_with


def fidelity_trajectory(l1_max: float, grid, physics: Physics = Physics()) -> list[ScanRow]:
    """Detection probability of |+> as the plates thicken, measuring once ``x`` passes ``l1_max``.

    At ``x == l1_max`` two rows are emitted: the value just before
    insertion (``segment='pre'``) and just after (``segment='post'``).
    """
    x = _check_grid(grid)
    s = physics.spectrum()
    rows = []
    for v in x:
        p_no, p_with = _trajectory_point(v, l1_max, physics, s)
        rows.append(_row(v, p_no, p_with, "pre" if v <= l1_max else "post"))
        if v == l1_max:
            p_post = closed_form_probability(0.5, 0.0, physics.gamma(l1_max), 0.0, s)
            rows.append(_row(v, p_no, p_post, "post"))
    return rows


def tilt_grid(center_x: float, span: float, n_points: int) -> np.ndarray:
    if span < 0 or span > 2:
        raise ValueError(f"span must lie in [0, 2] wavelengths, got {span!r}")
    if span == 0:
        return np.array([float(center_x)])
    if n_points < 2:
        raise ValueError("n_points must be >= 2 for a non-zero span")
    return center_x + np.linspace(-span / 2, span / 2, n_points)


def _tilt_probability(x, l1, physics, s):
    return closed_form_probability(0.5, 0.0, physics.gamma(l1), physics.gamma(x - l1), s)


def tilt_oscillation(
    center_x: float = 148.0,
    span: float = 1.0,
    n_points: int = 201,
    l1: float = 74.0,
    physics: Physics = Physics(),
) -> list[ScanRow]:
    """Fine sweep of the second plate set around ``center_x`` with the first fixed at ``l1``."""
    return _tilt_rows(tilt_grid(center_x, span, n_points), l1, physics)


def _tilt_rows(x, l1, physics):
    if x[0] < l1:
        raise ValueError("tilt grid must stay beyond the insertion point l1")
    s = physics.spectrum()
    return [
        _row(
            v,
            survival_probability(PLUS, s, Channel(physics.gamma(v))),
            _tilt_probability(v, l1, physics, s),
            "tilt",
        )
        for v in x
    ]


def oscillation_period(
    center_x: float = 148.0,
    span: float = 2.0,
    l1: float = 74.0,
    physics: Physics = Physics(),
    n_points: int = 401,
) -> float:
    """Period in ``x`` of the tilt oscillation, from its crossings of probability 1/2."""
    s = physics.spectrum()
    x = tilt_grid(center_x, span, n_points)

    def f(v):
        return _tilt_probability(v, l1, physics, s) - 0.5

    y = np.array([f(v) for v in x])
    idx = np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]
    crossings = [bisect_root(f, x[i], x[i + 1]) for i in idx]
    if len(crossings) < 3:
        raise ValueError("span too short to contain a full oscillation")
    # same-direction crossings are one period apart
    return float(np.mean(np.subtract(crossings[2:], crossings[:-2])))


def _scenario_for(spec: ScanSpec, row: ScanRow, s):
    """Physical setup behind a row's with-measurement column."""
    ph, x = spec.physics, row.x
    if spec.kind == "visibility":
        g = ph.gamma(x) / 2
        return MeasurementScenario(PLUS, s, g, g)
    if spec.kind == "fidelity_trajectory" and row.segment == "pre":
        return NoMeasurementScenario(PLUS, s, ph.gamma(x))
    return MeasurementScenario(PLUS, s, ph.gamma(spec.l1), ph.gamma(x - spec.l1))


def run_scan(spec: ScanSpec) -> list[ScanRow]:
    """Evaluate a scan, attaching Monte Carlo and quadrature columns as requested.

    Rows always follow the grid order regardless of ``spec.workers``.
    """
    ph = spec.physics
    if spec.kind == "landscape":
        return landscape(spec.grid)
    if spec.kind == "visibility":
        rows = visibility_scan(spec.grid, ph)
    elif spec.kind == "fidelity_trajectory":
        rows = fidelity_trajectory(spec.l1, spec.grid, ph)
    else:
        rows = _tilt_rows(_check_grid(spec.grid), spec.l1, ph)

    s = ph.spectrum()
    scenarios = [_scenario_for(spec, r, s) for r in rows]
    extra = [{} for _ in rows]
    if spec.include_montecarlo:

        def mc(i):
            seed = _row_seed(spec.seed, i)
            cfg = CountingConfig(scenarios[i], spec.pair_rate, spec.integration_time, seed)
            return simulate_counts(cfg)

        with ThreadPoolExecutor(max_workers=max(1, spec.workers)) as pool:
            records = list(pool.map(mc, range(len(rows))))
        for e, rec in zip(extra, records):
            e.update(mc_p_hat=rec.p_hat, mc_std_err=rec.std_err)
    if spec.tol is not None:
        for e, sc in zip(extra, scenarios):
            if isinstance(sc, NoMeasurementScenario):
                # a measurement with nothing after it leaves |+> statistics unchanged
                sc = MeasurementScenario(PLUS, s, sc.gamma, 0.0)
            e["p_with_quad"] = recovered_probability_quadrature(sc, spec.tol)
    return [replace(r, **e) if e else r for r, e in zip(rows, extra)]


def default_grid(kind: str) -> np.ndarray:
    if kind == "landscape":
        return np.linspace(0.0, 1.0, 101)
    if kind == "visibility":
        return np.arange(0.0, 75.0, 2.0)
    if kind == "fidelity_trajectory":
        return np.arange(0.0, 149.0, 1.0)
    if kind == "tilt":
        return tilt_grid(148.0, 1.0, 201)
    raise ValueError(f"unknown scan kind {kind!r}")


__all__ = [
    "KINDS",
    "Physics",
    "ScanRow",
    "ScanSpec",
    "default_grid",
    "fidelity_trajectory",
    "landscape",
    "oscillation_period",
    "run_scan",
    "tilt_grid",
    "tilt_oscillation",
    "visibility_scan",
]
