"""Class degree, decompositions and relative equilibrium states of factor codes between shifts."""

__version__ = "0.1.0"

from .blockcode import FactorTriple, SlidingBlockCode, compose, normalize, normalize_code  # noqa: E402
from .classdeg import TransitionBlock, class_degree_upper  # noqa: E402
from .config import DEFAULT, AnalysisConfig  # noqa: E402
from .decomp import build_decomposition, verify_decomposition  # noqa: E402
from .fto import degree, is_finite_to_one  # noqa: E402
from .relopt import build_relaxation, decomposition_crosscheck, solve_relaxation  # noqa: E402
from .shiftspace import Presentation, full_shift, golden_mean, vertex_shift  # noqa: E402
from .thermo import MarkovMeasure, Potential, equilibrium_state, pressure, tuncel_lift  # noqa: E402

__all__ = [
    "AnalysisConfig", "DEFAULT", "FactorTriple", "MarkovMeasure", "Potential", "Presentation",
    "SlidingBlockCode", "TransitionBlock", "build_decomposition", "build_relaxation",
    "class_degree_upper", "compose", "decomposition_crosscheck", "degree", "equilibrium_state",
    "full_shift", "golden_mean", "is_finite_to_one", "normalize", "normalize_code", "pressure",
    "solve_relaxation", "tuncel_lift", "verify_decomposition", "vertex_shift",
]
