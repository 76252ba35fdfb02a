"""MCMC posterior simulation for Bayesian mixture models."""

from .algorithms import (
    ALGORITHM_IDS,
    BlockedGibbsAlgorithm,
    Neal2Algorithm,
    Neal3Algorithm,
    Neal8Algorithm,
    build_algorithm,
)
from .chainio import (
    ChainState,
    ClusterParams,
    FileCollector,
    MemoryCollector,
    decode_state,
    encode_state,
    read_csv_matrix,
    write_csv_matrix,
)
from .config import AlgoParams, ConfigTree, parse_algo_params, parse_config, serialize_config
from .estimator import BayesianMixture
from .exceptions import CapabilityError, ConfigError, DecodeError, MixError
from .hierarchy import HIERARCHY_TYPES, Hierarchy, build_hierarchy
from .mixings import (
    MIXING_TYPES,
    DirichletMixing,
    PitYorMixing,
    TruncatedSBMixing,
    build_mixing,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_IDS",
    "AlgoParams",
    "BayesianMixture",
    "BlockedGibbsAlgorithm",
    "CapabilityError",
    "ChainState",
    "ClusterParams",
    "ConfigError",
    "ConfigTree",
    "DecodeError",
    "DirichletMixing",
    "FileCollector",
    "HIERARCHY_TYPES",
    "Hierarchy",
    "MemoryCollector",
    "MixError",
    "MIXING_TYPES",
    "Neal2Algorithm",
    "Neal3Algorithm",
    "Neal8Algorithm",
    "PitYorMixing",
    "TruncatedSBMixing",
    "build_algorithm",
    "build_hierarchy",
    "build_mixing",
    "decode_state",
    "encode_state",
    "parse_algo_params",
    "parse_config",
    "read_csv_matrix",
    "serialize_config",
    "write_csv_matrix",
]
