"""Exception types shared across the package."""


class CavduetError(Exception):
    """Base class for all package-specific errors."""


class InvalidRangeError(CavduetError):
    """Coupling ratio eta_L/eta_R outside the window that guarantees three
    distinct real dressed energies."""


class DegenerateSpectrumError(CavduetError):
    """Two dressed energies coincide; the closed-form eigenvectors are
    ill-defined."""


class ClusterMismatchError(CavduetError):
    """Drive couplings requested for clusters other than (0, 1)."""


class FrameError(CavduetError):
    """Amplitude frame (lab vs rotating) does not match the operation."""


class StepTooLargeError(CavduetError):
    """Integrator step does not resolve the fastest retained phase."""


class NormDriftError(CavduetError):
    """State norm drifted beyond tolerance during integration."""


class BadSubsystemError(CavduetError):
    """Partial trace asked to keep a subsystem that is not present."""


class NoPlateauError(CavduetError):
    """Delay detector found no stable plateau in the series."""


class ConfigError(CavduetError):
    """Run configuration file could not be parsed or failed key checks."""
