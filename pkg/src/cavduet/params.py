"""Physical parameters, derived detunings and validity checks.

Conventions
-----------
All frequencies and couplings are angular frequencies in rad/s.  Values
quoted as "frequency/2pi" (GHz, MHz, ...) must be multiplied by 2*pi once
at ingestion; :meth:`SystemParams.from_frequencies` does exactly that.

Each qubit contributes ``+Omega`` (excited) or ``-Omega`` (ground) to the
free energy, i.e. the free qubit Hamiltonian is Omega*sigma_z with
eigenvalues +-Omega.  With that choice the single-excitation cluster
``{|e,n,g>, |g,n+1,g>, |g,n,e>}`` has diagonal energies
``(n*omega_c + Delta, delta_n, n*omega_c - Delta)`` and the 3x3 block used
throughout the package is ``diag(Delta, delta_n, -Delta)`` plus the
couplings, with the common offset ``n*omega_c`` removed from the outer
(qubit-excited) states and re-added where physical transition frequencies
are needed (see :mod:`cavduet.dynamics`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

# eta_L/eta_R window that keeps the dressed spectrum real and non-degenerate
ETA_RATIO_MIN = 3.0 - 2.0 * math.sqrt(2.0)
ETA_RATIO_MAX = 3.0 + 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """All physical settings of the driven two-qubit/cavity system (rad/s).

    Attributes
    ----------
    omega_c : cavity angular frequency
    Omega_L, Omega_R : left/right qubit energy parameters (the qubit free
        Hamiltonian is Omega*sigma_z, so the level splitting is 2*Omega)
    eta_L, eta_R : qubit-cavity coupling strengths
    epsilon_D : drive Rabi strength (zero means undriven)
    omega_D : drive angular frequency
    """

    omega_c: float
    Omega_L: float
    Omega_R: float
    eta_L: float
    eta_R: float
    epsilon_D: float
    omega_D: float

    @classmethod
    def from_frequencies(cls, f_c, f_L, f_R, f_eta_L, f_eta_R, f_eps, f_D):
        """Build from plain frequencies in Hz (values quoted as omega/2pi)."""
        return cls(
            omega_c=TWO_PI * f_c,
            Omega_L=TWO_PI * f_L,
            Omega_R=TWO_PI * f_R,
            eta_L=TWO_PI * f_eta_L,
            eta_R=TWO_PI * f_eta_R,
            epsilon_D=TWO_PI * f_eps,
            omega_D=TWO_PI * f_D,
        )

    def replace(self, **kwargs) -> "SystemParams":
        from dataclasses import replace as _replace

        return _replace(self, **kwargs)


@dataclass(frozen=True)
class Detunings:
    """Derived detunings for cluster ``n``.

    Delta   = Omega_L - Omega_R
    delta_n = (n+1)*omega_c - Omega_L - Omega_R
    """

    Delta: float
    delta_n: float
    n: int


def detunings(params: SystemParams, n: int) -> Detunings:
    """Qubit-qubit and cavity-qubit detunings for cluster index ``n >= 0``."""
    if n < 0:
        raise ValueError(f"cluster index must be >= 0, got {n}")
    return Detunings(
        Delta=params.Omega_L - params.Omega_R,
        delta_n=(n + 1) * params.omega_c - params.Omega_L - params.Omega_R,
        n=n,
    )


def resonant_discriminant(params: SystemParams) -> float:
    """Cubic discriminant in the cavity-qubit resonance limit (delta_n ~ 0).

    D = Delta^2 (eta_L - eta_R)^4 / 4 - (Delta^2 + eta_L^2 + eta_R^2)^3 / 27

    Three distinct real dressed energies require D < 0.
    """
    Delta = params.Omega_L - params.Omega_R
    s = Delta**2 + params.eta_L**2 + params.eta_R**2
    return 0.25 * Delta**2 * (params.eta_L - params.eta_R) ** 4 - s**3 / 27.0


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`: every violated invariant, plus the sign
    of the resonance-limit discriminant.  Validation never raises; callers
    decide what to do with a non-empty report."""

    violations: list = field(default_factory=list)
    discriminant: float = math.nan

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        sign = "negative" if self.discriminant < 0 else "non-negative"
        if self.ok:
            return f"parameters OK (resonance-limit discriminant {sign}: {self.discriminant:.6g})"
        lines = [f"- {v}" for v in self.violations]
        lines.append(f"resonance-limit discriminant {sign}: {self.discriminant:.6g}")
        return "\n".join(lines)


def validate(params: SystemParams) -> ValidationReport:
    """Check every parameter invariant and report all violations."""
    report = ValidationReport()
    v = report.violations

    positive = [
        ("omega_c", params.omega_c),
        ("Omega_L", params.Omega_L),
        ("Omega_R", params.Omega_R),
        ("eta_L", params.eta_L),
        ("eta_R", params.eta_R),
        ("omega_D", params.omega_D),
    ]
    for name, value in positive:
        if not (value > 0.0) or not math.isfinite(value):
            v.append(f"{name} must be strictly positive and finite, got {value!r}")
    if not (params.epsilon_D >= 0.0) or not math.isfinite(params.epsilon_D):
        v.append(f"epsilon_D must be >= 0 and finite, got {params.epsilon_D!r}")

    if params.eta_R > 0.0 and params.eta_L > 0.0:
        ratio = params.eta_L / params.eta_R
        if not (ETA_RATIO_MIN < ratio < ETA_RATIO_MAX):
            v.append(
                "real-root range violated: eta_L/eta_R = "
                f"{ratio:.6g} outside ({ETA_RATIO_MIN:.6g}, {ETA_RATIO_MAX:.6g})"
            )

    report.discriminant = resonant_discriminant(params)
    return report
