"""Bound-state counting for matrix Schrodinger operators on the half line.

Pieces: boundary-pair validation and angle classification (`boundary`),
Hermitian matrix potentials (`potentials`), the zero-potential resolvent
kernel (`resolvent`), the Bargmann-type eigenvalue-count bound (`bound`),
a finite-element counting oracle (`fem`), a Birman-Schwinger counting
oracle (`birman`), JSON wire formats (`serialize`), the randomized
verification harness (`harness`) and a CLI (`cli`).
"""

__version__ = "0.1.0"

from .boundary import (
    BoundaryClassification,
    BoundaryPair,
    classify,
    compute_U,
    diagonal_pair,
    random_pair,
    validate_pair,
)
from .bound import BoundResult, bargmann_bound, diagonal_trace_bound, diagonal_trace_limit
from .birman import BSMatrix, bs_count, bs_trace_bound, build_bs, free_count_below
from .fem import (
    CountReport,
    Discretization,
    assemble_form_matrix,
    converge_count,
    count_negative,
)
from .harness import VerifyReport, run_remark_demo, run_verify
from .potentials import (
    Bump,
    Conjugated,
    Exponential,
    MatrixPotential,
    PotentialSplit,
    Sampled,
    SquareWell,
    faddeev_moment,
    split,
    zero_potential,
)
from .resolvent import (
    ResolventKernel,
    free_jost_matrix,
    jost_matrix,
    kernel_bound_check,
    kernel_eval,
    make_kernel,
)

__all__ = [
    "BoundaryClassification",
    "BoundaryPair",
    "BoundResult",
    "BSMatrix",
    "Bump",
    "Conjugated",
    "CountReport",
    "Discretization",
    "Exponential",
    "MatrixPotential",
    "PotentialSplit",
    "ResolventKernel",
    "Sampled",
    "SquareWell",
    "VerifyReport",
    "assemble_form_matrix",
    "bargmann_bound",
    "bs_count",
    "bs_trace_bound",
    "build_bs",
    "classify",
    "compute_U",
    "converge_count",
    "count_negative",
    "diagonal_pair",
    "diagonal_trace_bound",
    "diagonal_trace_limit",
    "faddeev_moment",
    "free_count_below",
    "free_jost_matrix",
    "jost_matrix",
    "kernel_bound_check",
    "kernel_eval",
    "make_kernel",
    "random_pair",
    "run_remark_demo",
    "run_verify",
    "split",
    "validate_pair",
    "zero_potential",
]
