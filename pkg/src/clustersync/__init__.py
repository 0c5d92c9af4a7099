"""Cluster synchronization of Kuramoto networks: checks, optimal weight repair, simulation."""
from .analysis import (
    SyncVerdict,
    WeightViolation,
    check_assumption_a1,
    check_frequency_condition,
    check_invariance_matrix,
    check_weight_condition,
    classify,
)
from .control import (
    PerturbationResult,
    SparsityMask,
    apply_perturbation,
    solve_constrained,
    solve_unconstrained,
    verify_solution,
)
from .errors import (
    ConfigError,
    DimensionError,
    Infeasible,
    InfeasibleResult,
    InputError,
    InternalInconsistency,
    InvalidPartition,
    NonFiniteState,
    VerificationFailed,
)
from .model import (
    CharacteristicBasis,
    InterClusterMatrix,
    NetworkSpec,
    Partition,
    build_characteristic_matrix,
    build_inter_cluster_matrix,
    build_orthonormal_complement,
)
from .simulator import (
    SimConfig,
    Trajectory,
    cluster_order_parameter,
    frequency_spread,
    integrate,
    kuramoto_rhs,
    phase_spread,
)

__version__ = "0.1.0"
