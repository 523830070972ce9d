import math

import numpy as np
import pytest

from cavduet import SystemParams, detunings, resonant_discriminant, validate
from cavduet.params import ETA_RATIO_MAX, ETA_RATIO_MIN, TWO_PI

from conftest import random_valid_params


def test_paper_parameters_validate(paper_symmetric):
    report = validate(paper_symmetric)
    assert report.ok
    assert report.discriminant < 0.0


def test_eta_ratio_violation_flagged(paper_symmetric):
    p = paper_symmetric.replace(eta_L=6.0 * paper_symmetric.eta_R)
    report = validate(p)
    assert not report.ok
    assert any("real-root" in v for v in report.violations)
    # 6 is outside (3 - 2 sqrt 2, 3 + 2 sqrt 2) ~ (0.1716, 5.8284)
    assert not (ETA_RATIO_MIN < 6.0 < ETA_RATIO_MAX)


def test_symmetric_discriminant_value(paper_symmetric):
    # eta_L = eta_R = eta, Delta = 0:  D = -(1/27) (2 eta^2)^3
    eta = paper_symmetric.eta_L
    expected = -((2.0 * eta**2) ** 3) / 27.0
    assert resonant_discriminant(paper_symmetric) == pytest.approx(expected, rel=1e-12)
    assert validate(paper_symmetric).discriminant == pytest.approx(expected, rel=1e-12)


def test_nonpositive_frequencies_flagged():
    p = SystemParams(omega_c=-1.0, Omega_L=0.0, Omega_R=1.0, eta_L=1.0, eta_R=1.0,
                     epsilon_D=-0.5, omega_D=1.0)
    report = validate(p)
    names = " ".join(report.violations)
    for field in ("omega_c", "Omega_L", "epsilon_D"):
        assert field in names


def test_undriven_allowed(paper_symmetric):
    assert validate(paper_symmetric.replace(epsilon_D=0.0)).ok


def test_detunings_paper_values(paper_symmetric):
    det = detunings(paper_symmetric, 0)
    assert det.Delta == 0.0
    assert det.delta_n == pytest.approx(TWO_PI * (5.32e9 - 10.2e9), rel=1e-15)


def test_detunings_symmetric_delta_zero():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_valid_params(rng)
        p = p.replace(Omega_R=p.Omega_L)
        assert detunings(p, 2).Delta == 0.0


def test_detunings_resonant_zero(resonant_symmetric):
    # omega_c = Omega_L + Omega_R makes delta_0 vanish exactly
    assert detunings(resonant_symmetric, 0).delta_n == 0.0


def test_detunings_pure_function(paper_asymmetric):
    a = detunings(paper_asymmetric, 1)
    b = detunings(paper_asymmetric, 1)
    assert a.Delta == b.Delta and a.delta_n == b.delta_n


def test_detunings_spacing_is_cavity_frequency():
    # delta_{n+1} - delta_n = omega_c; floating arithmetic holds it to ~1 ulp
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = random_valid_params(rng)
        for n in range(4):
            diff = detunings(p, n + 1).delta_n - detunings(p, n).delta_n
            assert diff == pytest.approx(p.omega_c, rel=5e-15)


def test_detunings_rejects_negative_cluster(paper_symmetric):
    with pytest.raises(ValueError):
        detunings(paper_symmetric, -1)


def test_from_frequencies_scales_by_two_pi():
    p = SystemParams.from_frequencies(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
    assert p.omega_c == pytest.approx(TWO_PI)
    assert p.omega_D == pytest.approx(7.0 * TWO_PI)
