"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .rings import to_mpq


def row_reduce(rows: Sequence[Sequence]) -> Tuple[List[List[mpq]], List[int]]:
    """Reduced row echelon form and pivot columns of a rational matrix."""
    mat = [[to_mpq(x) for x in row] for row in rows]
    pivots: List[int] = []
    if not mat:
        return mat, pivots
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> Tuple[Optional[List[mpq]], int]:
    """One solution of ``matrix . x = rhs`` (free variables set to zero) and the nullity.

    Returns ``(None, nullity)`` when the system is inconsistent.
    """
    nvars = len(matrix[0]) if matrix else 0
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = row_reduce(aug)
    if nvars in pivots:
        return None, nvars - (len(pivots) - 1)
    x = [mpq(0)] * nvars
    for i, col in enumerate(pivots):
        x[col] = red[i][nvars]
    return x, nvars - len(pivots)


def solve_sparse(columns: Sequence[Dict[object, object]], rhs: Dict[object, object]) -> Optional[List[mpq]]:
    """Solve ``sum_j x_j columns[j] = rhs`` for sparse column vectors keyed by row labels.

    Returns one solution (free variables zero) or ``None`` when inconsistent.
    """
    # pivot rows: row label -> (column index, normalised sparse row over columns + rhs)
    rows: Dict[object, Dict[int, mpq]] = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            v = to_mpq(v)
            if v:
                rows.setdefault(r, {})[j] = v
    for r, v in rhs.items():
        v = to_mpq(v)
        if v:
            rows.setdefault(r, {})[-1] = v
    pivot_rows: List[Tuple[int, Dict[int, mpq]]] = []
    pivot_of_col: Dict[int, int] = {}
    for r in sorted(rows, key=repr):
        row = dict(rows[r])
        # eliminate known pivots
        changed = True
        while changed:
            changed = False
            for j in sorted(k for k in row if k >= 0 and k in pivot_of_col):
                f = row[j]
                prow = pivot_rows[pivot_of_col[j]][1]
                for k, v in prow.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
                changed = True
                break
        cols = [k for k in row if k >= 0]
        if not cols:
            if row.get(-1):
                return None
            continue
        j = min(cols)
        inv = 1 / row[j]
        row = {k: v * inv for k, v in row.items()}
        # back-substitute into earlier pivot rows
        for idx, (pj, prow) in enumerate(pivot_rows):
            f = prow.get(j)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivot_of_col[j] = len(pivot_rows)
        pivot_rows.append((j, row))
    x = [mpq(0)] * len(columns)
    for j, row in pivot_rows:
        x[j] = row.get(-1, mpq(0))
    return x


def rank(matrix: Sequence[Sequence]) -> int:
    return len(row_reduce(matrix)[1])
