"""
Basis reduction for linear codes over F_q: LLL, BKZ, slide, backward and
approximate Griesmer reduction, fundamental domains and reduction bounds.
"""

from code_basis_reduction.backward import (
    backward_reduce,
    eta,
    full_backward_reduce,
    max_redundant_set,
    selective_backward_reduce,
)
from code_basis_reduction.domain import fundamental_weight_distribution, size_reduce
from code_basis_reduction.exceptions import (
    CodeReductionError,
    DomainError,
    IterationCapExceeded,
    SelectionFailure,
    UsageError,
)
from code_basis_reduction.gf import FieldSpec
from code_basis_reduction.linalg import CodeBasis, Transform, Word, systematize
from code_basis_reduction.reduce import (
    ShortestOracle,
    approx_griesmer_reduce,
    bkz_reduce,
    lll_reduce,
    shortest_codeword,
    slide_reduce,
)

__version__ = "0.1.0"

__all__ = [
    "CodeBasis",
    "CodeReductionError",
    "DomainError",
    "FieldSpec",
    "IterationCapExceeded",
    "SelectionFailure",
    "ShortestOracle",
    "Transform",
    "UsageError",
    "Word",
    "approx_griesmer_reduce",
    "backward_reduce",
    "bkz_reduce",
    "eta",
    "full_backward_reduce",
    "fundamental_weight_distribution",
    "lll_reduce",
    "max_redundant_set",
    "selective_backward_reduce",
    "shortest_codeword",
    "size_reduce",
    "slide_reduce",
    "systematize",
]
