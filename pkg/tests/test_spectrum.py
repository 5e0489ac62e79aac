import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from recoherence import ContractError, ResolutionError, decoherence_factor, gaussian_from_experiment
from recoherence.channel import gamma_from_retardation
from recoherence.spectrum import (
    Gaussian,
    Tabulated,
    coherence,
    load_csv,
    sample_frequency,
    save_csv,
    tabulate,
)

G74 = 1.9253319574837338e-13
# frozen from the QUADPACK oracle in tests/oracles.py
D74_ORACLE = 0.012847460839765464
D37_ORACLE = 0.3366699276421932
D_HALF_WAVE_ORACLE = -0.9998012154739588


def test_gaussian_from_experiment_paper_values(spectrum):
    assert spectrum.omega0 == pytest.approx(2.4150e15, rel=1e-4)
    assert spectrum.sigma == pytest.approx(4.3354e13, rel=1e-4)
    assert spectrum.omega0 == pytest.approx(oracles.OMEGA0, rel=1e-15)


def test_gaussian_wavelength_scaling(spectrum):
    s2 = gaussian_from_experiment(1.56e-6, 6.9e12)
    assert s2.omega0 == pytest.approx(spectrum.omega0 / 2, rel=1e-15)


def test_near_monochromatic_limit():
    s = gaussian_from_experiment(0.78e-6, 1e-6)
    d = decoherence_factor(s, G74).value
    assert d == pytest.approx(np.exp(1j * G74 * s.omega0), abs=1e-12)


@pytest.mark.parametrize("args", [(0.0, 6.9e12), (-1.0, 6.9e12), (0.78e-6, 0.0), (0.78e-6, -3.0)])
def test_gaussian_from_experiment_domain(args):
    with pytest.raises(ValueError):
        gaussian_from_experiment(*args)


def test_zero_delay_is_exactly_one(spectrum):
    assert decoherence_factor(spectrum, 0.0).value == 1 + 0j
    assert decoherence_factor(tabulate(spectrum), 0.0).value == 1 + 0j


def test_decoherence_at_74_wavelengths(spectrum):
    d = decoherence_factor(spectrum, G74)
    assert d.magnitude == pytest.approx(0.0129, abs=1e-4)
    assert d.value.real == pytest.approx(D74_ORACLE, abs=1e-12)
    assert math.cos(d.phase) == pytest.approx(1.0, abs=1e-12)


def test_decoherence_at_half_wave(spectrum):
    g = gamma_from_retardation(0.5, 0.78e-6).gamma
    assert decoherence_factor(spectrum, g).value.real == pytest.approx(D_HALF_WAVE_ORACLE, abs=1e-12)


def test_decoherence_live_oracle(spectrum):
    g = oracles.gamma_of(37)
    assert coherence(spectrum, g) == pytest.approx(oracles.coherence(g), abs=1e-12)
    assert coherence(spectrum, g).real == pytest.approx(D37_ORACLE, abs=1e-12)


def test_riemann_lebesgue(spectrum):
    for g in np.linspace(5.5e-13, 5e-12, 50):
        assert abs(coherence(spectrum, g)) < 1e-6


@given(st.floats(0, 1e-12), st.floats(0, 1e-12))
def test_envelope_non_increasing(g1, g2):
    s = Gaussian(2.4e15, 4.3e13)
    lo, hi = sorted((g1, g2))
    assert abs(coherence(s, hi)) <= abs(coherence(s, lo)) + 1e-15


@given(st.floats(-1e-12, 1e-12))
def test_conjugate_symmetry(g):
    s = Gaussian(2.4e15, 4.3e13)
    assert coherence(s, -g) == pytest.approx(coherence(s, g).conjugate(), abs=1e-15)


@given(st.floats(-1e-12, 1e-12))
def test_magnitude_bounded(g):
    assert abs(coherence(Gaussian(2.4e15, 4.3e13), g)) <= 1 + 1e-12


def test_tabulated_matches_closed_form(spectrum):
    tab = tabulate(spectrum)
    for g in np.linspace(0.0, 4e-13, 41):
        assert abs(coherence(tab, g) - coherence(spectrum, g)) <= 1e-9


def test_tabulated_resolution_error(spectrum):
    coarse = tabulate(spectrum, n_points=201)
    with pytest.raises(ResolutionError):
        decoherence_factor(coarse, 4e-13)


@pytest.mark.parametrize(
    "omega,density",
    [
        ([1.0, 2.0, 2.0], [0.0, 1.0, 0.0]),  # not strictly increasing
        ([0.0, 1.0, 2.0], [1.0, -0.1, 0.0]),  # negative density
        ([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]),  # not normalized
    ],
)
def test_tabulated_contract(omega, density):
    with pytest.raises(ContractError):
        Tabulated(np.array(omega), np.array(density))


def test_csv_round_trip(tmp_path, spectrum):
    tab = tabulate(spectrum, n_points=801)
    path = tmp_path / "spec.csv"
    save_csv(tab, path)
    back = load_csv(path)
    np.testing.assert_array_equal(back.omega, tab.omega)
    np.testing.assert_array_equal(back.density, tab.density)


def test_csv_requires_header(tmp_path):
    path = tmp_path / "nohdr.csv"
    path.write_text("0,0\n1,2\n2,0\n")
    with pytest.raises(ContractError):
        load_csv(path)


def test_sample_mean(spectrum):
    rng = np.random.default_rng(11)
    w = sample_frequency(spectrum, rng, 10**6)
    se = spectrum.intensity_sd / math.sqrt(w.size)
    assert abs(w.mean() - 2.414937906806222e15) < 5 * se
    assert w.std() == pytest.approx(spectrum.sigma / (2 * math.sqrt(2)), rel=5e-3)


def test_sample_narrow_spectrum():
    s = Gaussian(2.4e15, 1e-3)
    w = sample_frequency(s, np.random.default_rng(1), 1000)
    np.testing.assert_allclose(w, 2.4e15, rtol=1e-15)


def test_sampled_phase_average(spectrum):
    rng = np.random.default_rng(5)
    w = sample_frequency(spectrum, rng, 10**6)
    z = np.exp(1j * G74 * w)
    se = z.real.std() / math.sqrt(w.size)
    assert abs(z.real.mean() - 0.0129) < 3 * se


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tabulated_inverse_cdf(seed):
    # triangular density on [0, 2]: cdf(x) = x^2/2 on [0,1]
    tab = Tabulated(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]))
    u = np.random.default_rng(seed).random(64)
    w = sample_frequency(tab, np.random.default_rng(seed), 64)
    expected = np.where(u < 0.5, np.sqrt(2 * u), 2 - np.sqrt(2 * (1 - u)))
    np.testing.assert_allclose(w, expected, atol=1e-12)


def test_tabulated_sampling_matches_gaussian(spectrum):
    tab = tabulate(spectrum)
    w = sample_frequency(tab, np.random.default_rng(3), 200000)
    se = spectrum.intensity_sd / math.sqrt(w.size)
    assert abs(w.mean() - spectrum.omega0) < 5 * se
