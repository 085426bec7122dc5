"""Operator-valued uncertainty relations and skew-information inequalities
for tracial positive maps on finite-dimensional C*-algebras, verified
numerically by margin checkers over seeded random instances."""

from .algebra import (
    BlockDiagonalElement,
    DensityElement,
    TracialMap,
    apply_map,
    block_trace,
    center_expectation,
    doubling,
    factorize_block_trace,
    kadison_check,
    make_map,
    normalize_density,
    scalar_trace,
)
from .campaign import CHECK_IDS, CHECKS, CampaignConfig, CampaignResult, run_campaign
from .errors import NoConvergence, PreconditionError, QitIneqError
from .functions import FunctionPair, ScalarFunction, alpha_pair, classical_pair, parse_function
from .linalg import HermitianSpectrum, eig_hermitian
from .measures import (
    MeasureContext,
    gen_correlation,
    gen_covariance,
    gen_variance,
    skew_information,
    spectral_sum_correlation,
    sym_correlation,
    sym_skew,
)
from .report import MarginReport

__version__ = "0.1.0"

__all__ = [
    "BlockDiagonalElement",
    "CHECKS",
    "CHECK_IDS",
    "CampaignConfig",
    "CampaignResult",
    "DensityElement",
    "FunctionPair",
    "HermitianSpectrum",
    "MarginReport",
    "MeasureContext",
    "NoConvergence",
    "PreconditionError",
    "QitIneqError",
    "ScalarFunction",
    "TracialMap",
    "alpha_pair",
    "apply_map",
    "block_trace",
    "center_expectation",
    "classical_pair",
    "doubling",
    "eig_hermitian",
    "factorize_block_trace",
    "gen_correlation",
    "gen_covariance",
    "gen_variance",
    "kadison_check",
    "make_map",
    "normalize_density",
    "parse_function",
    "run_campaign",
    "scalar_trace",
    "skew_information",
    "spectral_sum_correlation",
    "sym_correlation",
    "sym_skew",
]
