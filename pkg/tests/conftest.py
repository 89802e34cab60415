import math

import numpy as np
import pytest

from magsteklov.dn_map import SteklovCoeffs, component_spectrum_asymptotic


def ladder_coeffs(ell: float, alpha: float, kappa: float = 0.0, Q: float = 0.0) -> SteklovCoeffs:
    A = 2 * math.pi / ell
    return SteklovCoeffs(
        A, A * alpha, -A * alpha, (kappa + Q) / (4 * math.pi), (-kappa + Q) / (4 * math.pi), 0, alpha, ell
    )


def synthetic_spectrum(ell, alpha, kappa=0.0, Q=0.0, n_max=150, label=""):
    return component_spectrum_asymptotic(ladder_coeffs(ell, alpha, kappa, Q), -n_max, n_max, 2, label)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
