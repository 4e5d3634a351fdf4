"""Exact integer linear algebra: matrices, Smith form, presented abelian groups."""

from .groups import (
    AbelianElement,
    Cokernel,
    FiniteAbelianGroup,
    QmodZ,
    Subquotient,
    cokernel,
    subgroup_order,
    subquotient,
)
from .matrix import IntMatrix, Vector, dot, vec_add, vec_neg, vec_scale, vec_sub
from .smith import (
    NoSolution,
    SmithDecomposition,
    kernel_basis,
    rational_kernel_dim,
    rational_rank,
    smith_normal_form,
    solve_integer,
    solve_rational,
)

__all__ = [
    "AbelianElement",
    "Cokernel",
    "FiniteAbelianGroup",
    "IntMatrix",
    "NoSolution",
    "QmodZ",
    "SmithDecomposition",
    "Subquotient",
    "Vector",
    "cokernel",
    "dot",
    "kernel_basis",
    "rational_kernel_dim",
    "rational_rank",
    "smith_normal_form",
    "solve_integer",
    "solve_rational",
    "subgroup_order",
    "subquotient",
    "vec_add",
    "vec_neg",
    "vec_scale",
    "vec_sub",
]
