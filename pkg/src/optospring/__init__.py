"""Stability of the optical-spring antisymmetric mode in detuned
dual-recycled interferometers (aLIGO and Michelson-Sagnac topologies)."""

from optospring.dynamics import (
    CharPoly,
    DerivedCoefficients,
    SusceptibilityCurve,
    characteristic_polynomial,
    derive_coefficients,
    dynamic_stiffness,
    susceptibility,
    zero_order_factors,
)
from optospring.errors import (
    BracketError,
    BranchCutError,
    ConfigError,
    DegenerateModeError,
    DoubleResonanceError,
    InternalConsistencyError,
    NumericFailure,
    OptoSpringError,
    OvercriticalPumpError,
    PerturbationError,
    SingularityError,
    TuningError,
)
from optospring.meanfield import (
    MeanFields,
    PhysicalConfig,
    aligo_mode_params,
    mean_fields,
    msi_mode_params,
    output_power,
)
from optospring.params import PRESET_NAMES, ModeParams, Topology, load_config, preset, read_config
from optospring.stability import (
    PerturbativeRoots,
    RootReport,
    continued_spring_root,
    first_stability_change,
    first_order_roots,
    min_detuning,
    perturbative_roots,
    routh_hurwitz,
    solve_roots,
    stability_boundary,
    tune_delta_w,
    zero_order_roots,
)

__all__ = [name for name in dir() if not name.startswith("_")]
