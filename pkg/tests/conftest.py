import numpy as np
import pytest

from cavduet import BareState, SystemParams


@pytest.fixture
def paper_symmetric() -> SystemParams:
    """Symmetric headline parameters (all values omega/2pi)."""
    return SystemParams.from_frequencies(5.32e9, 5.1e9, 5.1e9, 300e6, 300e6, 200e3, 5.3e9)


@pytest.fixture
def paper_asymmetric() -> SystemParams:
    """Right qubit raised to 6.1 GHz; everything else as symmetric."""
    return SystemParams.from_frequencies(5.32e9, 5.1e9, 6.1e9, 300e6, 300e6, 200e3, 5.3e9)


@pytest.fixture
def resonant_symmetric() -> SystemParams:
    """Toy fixture with Delta = 0 and delta_0 = 0 (omega_c = Omega_L + Omega_R)."""
    return SystemParams.from_frequencies(5.0e9, 2.5e9, 2.5e9, 100e6, 100e6, 200e3, 5.0e9)


@pytest.fixture
def default_initial() -> BareState:
    return BareState.cavity_driven()


def random_valid_params(rng: np.random.Generator) -> SystemParams:
    """Random draw inside every validity window (angular units)."""
    two_pi = 2.0 * np.pi
    omega_c = two_pi * rng.uniform(1e9, 10e9)
    Omega_L = two_pi * rng.uniform(1e9, 10e9)
    Omega_R = two_pi * rng.uniform(1e9, 10e9)
    eta_R = two_pi * rng.uniform(2e7, 2e9)
    eta_L = eta_R * rng.uniform(0.2, 5.5)
    eps = two_pi * rng.uniform(0.0, 1e6)
    omega_D = two_pi * rng.uniform(1e9, 10e9)
    return SystemParams(omega_c, Omega_L, Omega_R, eta_L, eta_R, eps, omega_D)


def random_bare_state(rng: np.random.Generator) -> BareState:
    g = rng.normal(size=6) + 1j * rng.normal(size=6)
    return BareState(g / np.linalg.norm(g))
