"""Quantum correlation dynamics of two qubits in local thermal reservoirs.

The package is organised as a small pipeline:

* :mod:`qcorr.qstate` — X-shaped two-qubit states, constructors, validation,
  and the Bloch decomposition;
* :mod:`qcorr.dynamics` — thermal damping in the decay parameter X, with an
  exact factorised channel, a transcribed published closed form, and an
  RK4 master-equation oracle;
* :mod:`qcorr.correlations` — the measurement-disturbance correlation
  measures and concurrence;
* :mod:`qcorr.analysis` — grid sweeps, sudden-death/plateau classification,
  turning points, and the published-claims audit;
* :mod:`qcorr.cli` — the ``qcorr`` command, driven by JSON configurations.
"""

from .analysis import (
    BISECT_XTOL,
    GRID_POINTS,
    ZERO_THRESHOLD,
    AuditEntry,
    AuditReport,
    DecayClassification,
    DecayKind,
    SweepSeries,
    TurningPoint,
    Verdict,
    audit,
    classify,
    default_grid,
    sweep,
    turning_points,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .correlations import (
    Measure,
    concurrence_from_elements,
    concurrence_xstate,
    gmod_from_elements,
    gmod_general,
    gmod_xstate,
    min_from_elements,
    min_general,
    min_xstate,
)
from .dynamics import (
    Backend,
    ExactClosedForm,
    GridEvolution,
    OdeOracle,
    TranscribedClosedForm,
    TranscribedElements,
    decay_parameter,
    evolve_on_grid,
    integrate_ode,
    lindblad_rhs,
    liouvillian,
    propagate_exact,
    propagate_transcribed,
    single_qubit_transition,
)
from .qstate import (
    BlochDecomposition,
    NotXShapedError,
    ReservoirParams,
    ValidityReport,
    XState,
    bell_phi_plus,
    bloch_decompose,
    matrix_to_xstate,
    random_xstate,
    thermal_product_state,
    validate,
    xstate_to_matrix,
    yu_eberly_state,
)

__version__ = "0.1.0"

__all__ = [
    "AuditEntry",
    "AuditReport",
    "BISECT_XTOL",
    "Backend",
    "BlochDecomposition",
    "ConfigError",
    "DecayClassification",
    "DecayKind",
    "ExactClosedForm",
    "GRID_POINTS",
    "GridEvolution",
    "Measure",
    "NotXShapedError",
    "OdeOracle",
    "ReservoirParams",
    "RunConfig",
    "SweepSeries",
    "TranscribedClosedForm",
    "TranscribedElements",
    "TurningPoint",
    "ValidityReport",
    "Verdict",
    "XState",
    "ZERO_THRESHOLD",
    "audit",
    "bell_phi_plus",
    "bloch_decompose",
    "classify",
    "concurrence_from_elements",
    "concurrence_xstate",
    "decay_parameter",
    "default_grid",
    "evolve_on_grid",
    "gmod_from_elements",
    "gmod_general",
    "gmod_xstate",
    "integrate_ode",
    "lindblad_rhs",
    "liouvillian",
    "load_config",
    "matrix_to_xstate",
    "min_from_elements",
    "min_general",
    "min_xstate",
    "parse_config",
    "propagate_exact",
    "propagate_transcribed",
    "random_xstate",
    "single_qubit_transition",
    "sweep",
    "thermal_product_state",
    "turning_points",
    "validate",
    "xstate_to_matrix",
    "yu_eberly_state",
    "__version__",
]
