"""Reference computations that share no code with the package.

Each frequency is propagated with explicit 2x2 matrices (phase plate,
projectors, swap) and the spectral average is done with scipy's QUADPACK
against a Gaussian written out here.
"""

import numpy as np
from scipy.integrate import quad

C = 2.99792458e8
LAMBDA0 = 0.78e-6
SIGMA_HZ = 6.9e12
OMEGA0 = 2 * np.pi * C / LAMBDA0
SIGMA = 2 * np.pi * SIGMA_HZ
SD = SIGMA / (2 * np.sqrt(2))

SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def gamma_of(x, lambda0=LAMBDA0):
    return x * lambda0 / C


def gauss(w, omega0=OMEGA0, sd=SD):
    return np.exp(-((w - omega0) ** 2) / (2 * sd * sd)) / (np.sqrt(2 * np.pi) * sd)


def plate(gamma, w):
    return np.diag([1.0, np.exp(1j * gamma * w)])


def ket(b, phi):
    return np.array([np.sqrt(1 - b), np.sqrt(b) * np.exp(1j * phi)], dtype=complex)


def spectral_average(fn, omega0=OMEGA0, sd=SD, n_sd=12):
    a, b = omega0 - n_sd * sd, omega0 + n_sd * sd
    val, _ = quad(lambda w: gauss(w, omega0, sd) * fn(w), a, b, limit=5000, epsabs=1e-14, epsrel=1e-13)
    return val


def coherence(gamma):
    re = spectral_average(lambda w: np.cos(gamma * w))
    im = spectral_average(lambda w: np.sin(gamma * w))
    return complex(re, im)


def probability_without(psi, gamma, analyzer=None):
    analyzer = psi if analyzer is None else analyzer

    def p(w):
        out = plate(gamma, w) @ psi
        return abs(np.vdot(analyzer, out)) ** 2

    return spectral_average(p)


def probability_with(psi, gamma1, gamma2, analyzer=None):
    analyzer = psi if analyzer is None else analyzer
    projectors = [np.outer(k, k.conj()) for k in (KET_PLUS, KET_MINUS)]

    def p(w):
        rho = np.outer(psi, psi.conj())
        u1, u2 = plate(gamma1, w), plate(gamma2, w)
        total = 0.0
        for proj in projectors:
            k = SWAP @ u2 @ proj @ u1
            out = k @ rho @ k.conj().T
            total += np.real(analyzer.conj() @ out @ analyzer)
        return total

    return spectral_average(p)
