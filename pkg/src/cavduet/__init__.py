"""Dressed-state dynamics and cooperativity measures for two superconducting
qubits coupled through a driven cavity mode."""

from .analysis import (
    DelayResult,
    SweepPoint,
    SweepResult,
    detect_delay,
    detuning_window,
    stationary_async,
    sweep,
    upper_envelope,
)
from .backend import backend_name
from .dressed import (
    CubicForm,
    DressedCluster,
    block_matrix,
    coefficient_columns,
    cubic_form,
    solve_cluster,
    trig_roots,
)
from .dynamics import (
    BARE_LABELS,
    LAMBDA_WEIGHTS,
    BareState,
    DressedAmplitudes,
    DriveCouplings,
    Trajectory,
    bare_to_dressed,
    derotate,
    drive_couplings,
    evolve,
    to_bare,
)
from .errors import (
    BadSubsystemError,
    CavduetError,
    ClusterMismatchError,
    ConfigError,
    DegenerateSpectrumError,
    FrameError,
    InvalidRangeError,
    NoPlateauError,
    NormDriftError,
    StepTooLargeError,
)
from .measures import (
    DensityMatrix,
    MeasureSeries,
    asynchronicity,
    clamp_count,
    concurrence2,
    concurrence3_literal,
    concurrence3_residual,
    full_density,
    measure_series,
    partial_trace,
    purity,
    reset_clamp_count,
    tripartite_purity_combination,
    wootters,
)
from .params import (
    Detunings,
    SystemParams,
    ValidationReport,
    detunings,
    resonant_discriminant,
    validate,
)

__version__ = "0.1.0"
