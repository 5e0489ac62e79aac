"""Invariant checks run by ``recoherence validate``.

Each check returns a :class:`Check` with the observed figure of merit and
the tolerance it was held to.  The three computation routes (Gaussian
closed form, adaptive quadrature, photon Monte Carlo) are compared on a
fixed grid of scenarios.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import Channel, reduced_state, survival_probability
from .measurement import (
    MeasurementScenario,
    asymptotic_with_measurement,
    asymptotic_without_measurement,
    branch_weights,
    closed_form_probability,
    recovered_probability_closed,
    recovered_probability_quadrature,
    recovery_crossings,
    recovery_window,
)
from .montecarlo import CountingConfig, simulate_counts
from .scans import Physics, fidelity_trajectory, oscillation_period, visibility_scan
from .states import detect_probability, make_pure

GRID_SIZE = 50
GAMMA_MAX = 2.5e-13
GRID_B = (0.1, 0.3, 0.5)
GRID_PHI = (0.0, math.pi / 3)


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    observed: float
    passed: bool
    detail: str = ""


def scenario_grid(physics: Physics = Physics(), size: int = GRID_SIZE, seed: int = 20090301):
    """Fixed grid of measurement scenarios spanning the delay square and state family.

    The first two entries pin the corners (0, 0) and (GAMMA_MAX, GAMMA_MAX).
    """
    s = physics.spectrum()
    rng = np.random.default_rng(seed)
    delays = rng.uniform(0.0, GAMMA_MAX, size=(size, 2))
    delays[0] = (0.0, 0.0)
    delays[1] = (GAMMA_MAX, GAMMA_MAX)
    out = []
    for k, (g1, g2) in enumerate(delays):
        b = GRID_B[k % len(GRID_B)]
        phi = GRID_PHI[(k // len(GRID_B)) % len(GRID_PHI)]
        out.append(MeasurementScenario(make_pure(b, phi), s, float(g1), float(g2)))
    return out


def _check(name, tol, observed, passed=None, detail=""):
    if passed is None:
        passed = observed <= tol
    return Check(name, tol, float(observed), bool(passed), detail)


def check_asymptotics():
    w, wo = asymptotic_with_measurement(0.5), asymptotic_without_measurement(0.5)
    err = max(abs(w - 0.75), abs(wo - 0.5))
    return _check(
        "asymptotic values at |beta|^2=1/2", 0.0, err, err == 0.0, f"with={w}, without={wo}"
    )


def check_recovery_window():
    lo, hi = recovery_crossings()
    ref = recovery_window()
    err = max(abs(lo - ref[0]), abs(hi - ref[1]))
    return _check("recovery window crossings", 1e-6, err, detail=f"roots=({lo:.12g}, {hi:.12g})")


def check_visibility_endpoint(physics: Physics):
    row = visibility_scan([74.0], physics)[0]
    out = [
        _check(
            "visibility without measurement at 74 lambda0",
            5e-4,
            abs(row.v_no_meas - 0.0129),
            detail=f"V={row.v_no_meas:.12g}",
        ),
        _check(
            "visibility with measurement at 74 lambda0",
            5e-4,
            abs(row.v_with_meas - 0.5064),
            detail=f"V'={row.v_with_meas:.12g}",
        ),
    ]
    return out


def check_fidelity_endpoint(physics: Physics):
    s = physics.spectrum()
    g = physics.gamma(74.0)
    p = closed_form_probability(0.5, 0.0, g, g, s)
    return _check(
        "recovered probability at L1=L2=74 lambda0", 1e-3, abs(p - 0.75), detail=f"P'={p:.12g}"
    )


def check_echo(physics: Physics, total: float = 3.85e-13, n: int = 1001):
    s = physics.spectrum()
    g1 = np.linspace(0.0, total, n)
    p = closed_form_probability(0.5, 0.0, g1, total - g1, s)
    best = int(np.argmax(p))
    steps = abs(best - (n - 1) / 2)
    return _check("echo maximum at symmetric split (steps)", 1.0, steps, detail=f"argmax={best}")


def check_phase_invariance(physics: Physics, gamma: float = 2.75e-13, n: int = 64):
    s = physics.spectrum()
    phis = np.arange(n) * 2 * math.pi / n
    p = [
        recovered_probability_closed(MeasurementScenario(make_pure(0.5, f), s, gamma, gamma))
        for f in phis
    ]
    spread = max(p) - min(p)
    return _check("phase invariance of recovery", 1e-5, spread, passed=spread < 1e-5)


def check_structural(physics: Physics, n: int = 1000, seed: int = 7):
    s = physics.spectrum()
    rng = np.random.default_rng(seed)
    worst_rho, worst_k = 0.0, 0.0
    for _ in range(n):
        psi = make_pure(rng.uniform(), rng.uniform(0, 2 * math.pi))
        ch = Channel(rng.uniform(0.0, 6e-13))
        direct = survival_probability(psi, s, ch)
        via_rho = detect_probability(psi, reduced_state(psi, s, ch))
        worst_rho = max(worst_rho, abs(direct - via_rho))
        k = branch_weights(psi, rng.uniform(0.0, 6e-13), rng.uniform(2.3e15, 2.5e15))
        worst_k = max(worst_k, abs(k.k_plus + k.k_minus - 1.0))
    traj = fidelity_trajectory(74.0, np.arange(0.0, 149.0), physics)
    worst_red = 0.0
    for r in traj:
        if r.segment == "pre":
            eq8 = closed_form_probability(0.5, 0.0, physics.gamma(r.x), 0.0, s)
            worst_red = max(worst_red, abs(eq8 - r.p_with_meas))
    return [
        _check("survival equals <psi|rho|psi>", 1e-12, worst_rho),
        _check("branch weights sum to one", 1e-12, worst_k),
        _check("measurement form reduces to no-measurement form at L2=0", 1e-9, worst_red),
    ]


def check_tilt_period(physics: Physics):
    period = oscillation_period(physics=physics)
    return _check(
        "tilt oscillation period (lambda0)", 1e-6, abs(period - 1.0), detail=f"period={period:.12g}"
    )


def check_quadrature(physics: Physics, tol: float = 1e-10):
    worst = 0.0
    for sc in scenario_grid(physics):
        diff = recovered_probability_closed(sc) - recovered_probability_quadrature(sc, tol)
        worst = max(worst, abs(diff))
    return _check("closed form vs quadrature on scenario grid", max(tol, 1e-9), worst)


def montecarlo_agreement(physics: Physics, seed: int, workers: int = 1):
    """Count of grid scenarios whose Monte Carlo estimate lies within 3 standard errors."""
    grid = scenario_grid(physics)

    def one(item):
        k, sc = item
        rec = simulate_counts(CountingConfig(sc, seed=seed * 1000 + k))
        return abs(rec.p_hat - recovered_probability_closed(sc)) <= 3.0 * rec.std_err

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return sum(pool.map(one, enumerate(grid)))


def check_montecarlo(physics: Physics, seeds, workers: int = 1):
    worst = min(montecarlo_agreement(physics, seed, workers) for seed in seeds)
    return _check(
        "Monte Carlo within 3 std err (worst seed, scenarios of 50)",
        48,
        worst,
        passed=worst >= 48,
        detail=f"seeds={list(seeds)}",
    )


def run_checks(physics: Physics = Physics(), quick: bool = False, seeds=range(3), workers: int = 1):
    checks = [check_asymptotics(), check_recovery_window()]
    checks += check_visibility_endpoint(physics)
    checks += [check_fidelity_endpoint(physics), check_echo(physics)]
    checks.append(check_phase_invariance(physics))
    checks += check_structural(physics)
    checks += [check_tilt_period(physics), check_quadrature(physics)]
    if not quick:
        checks.append(check_montecarlo(physics, seeds, workers))
    return checks


__all__ = ["Check", "montecarlo_agreement", "run_checks", "scenario_grid"]
