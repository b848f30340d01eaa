"""Gene-pool optimal mixing over explicit family-of-subsets linkage models,
with analytical convergence models and a theory-vs-simulation harness."""

from .engine import (
    RunConfig,
    RunResult,
    gom,
    has_converged,
    measure_correct_proportion,
    run_gomea,
)
from .fos import (
    Fos,
    Mask,
    Permutation,
    concat_fos,
    copy_fragment,
    make_homogeneous_fos,
    validate_fos,
)
from .problems import (
    EvalLedger,
    Problem,
    eval_onemax,
    eval_royal_road,
    eval_trap,
    evaluate,
    make_problem,
)

__version__ = "0.1.0"
