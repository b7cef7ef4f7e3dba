"""Unitary gl(1|n) modules in the Gel'fand-Zetlin basis, their odd elements,
and the Wigner quantum oscillator chain built on them."""
from .chain import (
    ChainConfig,
    CouplingError,
    FockState,
    LadderState,
    ModeData,
    critical_coupling,
    fock_eigenvectors,
    fock_probabilities,
    ladder_eigen,
    mode_data,
    momentum_operator,
    position_operator,
)
from .gz import (
    BasisIndex,
    DimensionError,
    GzPattern,
    HighestWeight,
    NotUnitaryError,
    classify_unitary,
    enumerate_basis,
)
from .matrices import GeneratorMatrix, Representation, assemble_odd
from .odd import (
    EBasis,
    branch,
    build_rotation,
    eigenvectors,
    momentum_variant,
    oracle_diagonalize,
    rotated_highest_weight,
    spectrum,
)
from .scalars import SurdScalar, SurdSum

__all__ = [
    "BasisIndex",
    "ChainConfig",
    "CouplingError",
    "DimensionError",
    "EBasis",
    "FockState",
    "GeneratorMatrix",
    "GzPattern",
    "HighestWeight",
    "LadderState",
    "ModeData",
    "NotUnitaryError",
    "Representation",
    "SurdScalar",
    "SurdSum",
    "assemble_odd",
    "branch",
    "build_rotation",
    "classify_unitary",
    "critical_coupling",
    "eigenvectors",
    "enumerate_basis",
    "fock_eigenvectors",
    "fock_probabilities",
    "ladder_eigen",
    "mode_data",
    "momentum_operator",
    "momentum_variant",
    "oracle_diagonalize",
    "position_operator",
    "rotated_highest_weight",
    "spectrum",
]
