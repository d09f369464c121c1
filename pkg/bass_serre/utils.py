"""Utility functions: integer lattice arithmetic, gcd helpers and report formatting."""

from typing import Any, Iterable, List, Optional, Sequence, Tuple

import structlog
from sympy.core.intfunc import igcdex
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

logger = structlog.get_logger(__name__)

IntMatrix = List[List[int]]
IntVector = Tuple[int, ...]


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (d, x, y) with d = gcd(a, b) >= 0 and a*x + b*y = d."""
    x, y, d = igcdex(a, b)
    return int(d), int(x), int(y)


def _domain_matrix(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(v) for v in row] for row in rows], (len(rows), ncols), ZZ)


def _as_ints(matrix: DomainMatrix) -> IntMatrix:
    return [[int(v) for v in row] for row in matrix.to_list()]


def columns_to_rows(columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
    return [[col[r] for col in columns] for r in range(nrows)]


def smith_decomposition(rows: Sequence[Sequence[int]], ncols: int) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, S, T) with D = S * M * T in Smith normal form."""
    smf, s, t = smith_normal_decomp(_domain_matrix(rows, ncols))
    return _as_ints(smf), _as_ints(s), _as_ints(t)


def hermite_columns(columns: Sequence[Sequence[int]], nrows: int) -> List[IntVector]:
    """Column-style Hermite basis of the lattice spanned by columns.

    Each basis column has a distinct pivot (its lowest nonzero row) which is
    made positive; columns are returned with pivot rows in decreasing order.
    """
    nonzero = [tuple(col) for col in columns if any(col)]
    if not nonzero:
        return []
    reduced = hermite_normal_form(_domain_matrix(columns_to_rows(nonzero, nrows), len(nonzero)))
    rows = _as_ints(reduced)
    ncols = len(rows[0]) if rows else 0
    basis: List[IntVector] = []
    for c in range(ncols):
        col = [rows[r][c] for r in range(nrows)]
        if not any(col):
            continue
        pivot = max(r for r in range(nrows) if col[r] != 0)
        if col[pivot] < 0:
            col = [-v for v in col]
        basis.append(tuple(col))
    basis.sort(key=lambda col: -max(r for r in range(nrows) if col[r] != 0))
    return basis


def pivot_row(column: Sequence[int]) -> int:
    return max(r for r in range(len(column)) if column[r] != 0)


def solve_integer(columns: Sequence[Sequence[int]], target: Sequence[int]) -> Optional[List[int]]:
    """Integer x with sum_j x_j * columns[j] = target, or None."""
    nrows = len(target)
    ncols = len(columns)
    if ncols == 0:
        return [] if not any(target) else None
    d, s, t = smith_decomposition(columns_to_rows(columns, nrows), ncols)
    sg = [sum(s[i][r] * target[r] for r in range(nrows)) for i in range(nrows)]
    y = [0] * ncols
    for i in range(nrows):
        pivot = d[i][i] if i < ncols else 0
        if pivot == 0:
            if sg[i] != 0:
                return None
            continue
        if sg[i] % pivot:
            return None
        y[i] = sg[i] // pivot
    return [sum(t[j][i] * y[i] for i in range(ncols)) for j in range(ncols)]


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> List[IntVector]:
    """Basis of the integer kernel {x : M x = 0} of an m x ncols matrix."""
    if ncols == 0:
        return []
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    d, _, t = smith_decomposition(rows, ncols)
    rank = sum(1 for i in range(min(len(rows), ncols)) if d[i][i] != 0)
    return [tuple(t[i][j] for i in range(ncols)) for j in range(rank, ncols)]


def lattice_rank(columns: Sequence[Sequence[int]], nrows: int) -> int:
    return len(hermite_columns(columns, nrows))


def mat_vec(columns: Sequence[Sequence[int]], x: Sequence[int], nrows: int) -> IntVector:
    """Combination sum_j x_j * columns[j]."""
    return tuple(sum(x[j] * columns[j][r] for j in range(len(columns))) for r in range(nrows))


def report_lines(entries: Iterable[Tuple[str, Any]]) -> List[str]:
    """Render `KEY: value` lines in the given order."""
    return [f"{key}: {value}" for key, value in entries]

