"""Extremal minima of cosine sums and Newman polynomials on the unit circle."""

from .minimizer import (
    DEFAULT_TOL,
    SEARCH_TOL,
    MinResult,
    ToleranceUnreachable,
    global_min,
    min_modulus,
    min_of_cubic_reference,
)
from .searcher import (
    CorruptCheckpoint,
    EmptySpace,
    Problem,
    SearchRecord,
    SearchReport,
    SearchSpec,
    enumerate_canonical,
    nonmonotonicity_check,
    run_search,
)
from .trigpoly import (
    CanonicalForm,
    CosinePoly,
    ExponentSet,
    Kind,
    autocorrelate,
    canonicalize,
    eval_cosine,
    eval_derivatives,
    from_exponents,
)

__version__ = "0.1.0"
