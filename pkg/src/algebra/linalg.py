"""Exact linear algebra over QQ on sparse dict-of-dicts matrices."""

from typing import Optional, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

# Sparse matrix: row index -> {column index: coefficient}
SparseRows = dict


def as_domain_matrix(rows: SparseRows, nrows: int, ncols: int) -> DomainMatrix:
    dod = {}
    for r, row in rows.items():
        clean = {c: QQ.convert(v) for c, v in row.items() if v}
        if clean:
            dod[r] = clean
    return DomainMatrix(dod, (nrows, ncols), QQ)


def rank(rows: SparseRows, nrows: int, ncols: int) -> int:
    if nrows == 0 or ncols == 0:
        return 0
    return as_domain_matrix(rows, nrows, ncols).rank()


def rref(rows: SparseRows, nrows: int, ncols: int):
    """Returns (reduced rows as dict-of-dicts, pivot columns)."""
    if nrows == 0 or ncols == 0:
        return {}, ()
    reduced, pivots = as_domain_matrix(rows, nrows, ncols).rref()
    return reduced.to_dod(), tuple(pivots)


def nullspace(rows: SparseRows, nrows: int, ncols: int) -> list:
    """
    Basis of the kernel, one ``{column: coefficient}`` per free column.

    Each vector has a 1 at its free column and zeros at the other free
    columns, so the basis is in reduced echelon form.
    """
    reduced, pivots = rref(rows, nrows, ncols)
    pivot_row = {c: r for r, c in enumerate(pivots)}
    basis = []
    for free in range(ncols):
        if free in pivot_row:
            continue
        vector = {free: QQ.one}
        for c, r in pivot_row.items():
            value = reduced.get(r, {}).get(free)
            if value:
                vector[c] = -value
        basis.append(vector)
    return basis


def solve_linear(rows: SparseRows, rhs: Sequence, nrows: int, ncols: int) -> Optional[dict]:
    """
    A particular solution of ``A x = rhs`` with all free variables zero.

    Returns None when the system is inconsistent.
    """
    augmented = {r: dict(row) for r, row in rows.items()}
    for r, value in enumerate(rhs):
        if value:
            augmented.setdefault(r, {})[ncols] = value
    if nrows == 0:
        return {}
    reduced, pivots = rref(augmented, nrows, ncols + 1)
    if ncols in pivots:
        return None
    solution = {}
    for r, c in enumerate(pivots):
        value = reduced.get(r, {}).get(ncols)
        if value:
            solution[c] = value
    return solution


def inverse(rows: SparseRows, n: int) -> SparseRows:
    """Inverse of a square matrix; raises ZeroDivisionError when singular."""
    if n == 0:
        return {}
    augmented = {r: dict(row) for r, row in rows.items()}
    for i in range(n):
        augmented.setdefault(i, {})[n + i] = QQ.one
    reduced, pivots = rref(augmented, n, 2 * n)
    if pivots[:n] != tuple(range(n)):
        raise ZeroDivisionError("singular matrix")
    result: SparseRows = {}
    for r in range(n):
        row = {c - n: v for c, v in reduced.get(r, {}).items() if c >= n and v}
        if row:
            result[r] = row
    return result


def multiply(a: SparseRows, b: SparseRows) -> SparseRows:
    result: SparseRows = {}
    for r, row in a.items():
        out: dict = {}
        for k, v in row.items():
            for c, w in b.get(k, {}).items():
                out[c] = out.get(c, QQ.zero) + v * w
        out = {c: v for c, v in out.items() if v}
        if out:
            result[r] = out
    return result


def transpose(a: SparseRows) -> SparseRows:
    result: SparseRows = {}
    for r, row in a.items():
        for c, v in row.items():
            if v:
                result.setdefault(c, {})[r] = v
    return result


def add(a: SparseRows, b: SparseRows, scale=1) -> SparseRows:
    result = {r: dict(row) for r, row in a.items()}
    for r, row in b.items():
        target = result.setdefault(r, {})
        for c, v in row.items():
            value = target.get(c, QQ.zero) + v * scale
            if value:
                target[c] = value
            else:
                target.pop(c, None)
    return {r: row for r, row in result.items() if row}


def identity(n: int) -> SparseRows:
    return {i: {i: QQ.one} for i in range(n)}


def apply(a: SparseRows, vector: dict) -> dict:
    """Matrix times column vector, both sparse."""
    result: dict = {}
    for r, row in a.items():
        value = sum((v * vector[c] for c, v in row.items() if c in vector), QQ.zero)
        if value:
            result[r] = value
    return result
