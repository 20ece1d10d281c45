"""Exact Hodge theory on a finite complex with rational inner products."""

import logging
from dataclasses import dataclass, field

from sympy import Matrix, QQ

from src.algebra import linalg
from src.algebra.spaces import Entries, GradedSpace
from src.errors import DataError
from src.transfer.contraction import Contraction

logger = logging.getLogger(__name__)


def entries_to_matrix(entries: Entries) -> linalg.SparseRows:
    """Linear entries {(i,): {j: c}} as rows j -> {i: c}."""
    rows: linalg.SparseRows = {}
    for (i,), row in entries.items():
        for j, c in row.items():
            rows.setdefault(j, {})[i] = c
    return rows


def matrix_to_entries(rows: linalg.SparseRows) -> Entries:
    entries: Entries = {}
    for j, row in rows.items():
        for i, c in row.items():
            if c:
                entries.setdefault((i,), {})[j] = c
    return entries


@dataclass(frozen=True)
class InnerProductComplex:
    """
    A graded space with its differential and a Gram matrix per degree.

    ``gram`` maps (i, j) index pairs to rationals; pairs of different degree
    must be absent. Missing diagonal blocks default to the standard product.
    """

    space: GradedSpace
    gram: dict = field(default_factory=dict)

    def gram_rows(self) -> linalg.SparseRows:
        rows: linalg.SparseRows = {}
        blocks = {self.space.degree(i) for i, _ in self.gram} | {self.space.degree(j) for _, j in self.gram}
        for (i, j), value in self.gram.items():
            if value:
                rows.setdefault(i, {})[j] = QQ.convert(value)
        for i in range(self.space.dim):
            if self.space.degree(i) not in blocks:
                rows.setdefault(i, {})[i] = QQ.one
        return rows

    def validate(self):
        """Raises DataError unless d^2 = 0 and the Gram data is symmetric positive definite."""
        D = entries_to_matrix(self.space.declared_differential())
        if linalg.multiply(D, D):
            raise DataError("the declared differential does not square to zero")
        gram = self.gram_rows()
        for i, row in gram.items():
            for j, value in row.items():
                if self.space.degree(i) != self.space.degree(j):
                    raise DataError("Gram matrix pairs elements of different degree")
                if gram.get(j, {}).get(i) != value:
                    raise DataError("Gram matrix is not symmetric")
        for degree in sorted(set(self.space.degrees)):
            idx = [i for i in range(self.space.dim) if self.space.degree(i) == degree]
            block = Matrix(
                [[QQ.to_sympy(gram.get(a, {}).get(b, QQ.zero)) for b in idx] for a in idx]
            )
            if not block.is_positive_definite:
                raise DataError(f"Gram block in degree {degree} is not positive definite")
        return D, gram


def _harmonic_vectors(space: GradedSpace, D, adjoint) -> list:
    """Basis of ker d and ker delta per degree, preferring early basis elements as free columns."""
    vectors = []
    stacked = {}
    offset = space.dim
    for r, row in D.items():
        stacked[r] = row
    for r, row in adjoint.items():
        stacked[offset + r] = row
    for degree in sorted(set(space.degrees)):
        idx = [i for i in range(space.dim) if space.degree(i) == degree]
        reversed_idx = list(reversed(idx))
        local = {c: pos for pos, c in enumerate(reversed_idx)}
        rows = {}
        for r, row in stacked.items():
            restricted = {local[c]: v for c, v in row.items() if c in local}
            if restricted:
                rows[r] = restricted
        basis = linalg.nullspace(rows, 2 * space.dim, len(idx))
        found = [{reversed_idx[c]: v for c, v in vec.items()} for vec in basis]
        # free columns come out latest-first in the original order
        found.reverse()
        vectors.extend((degree, vec) for vec in found)
    return vectors


def _model_space(space: GradedSpace, vectors: list) -> GradedSpace:
    names, degrees, divisors = [], [], []
    one = None
    counters: dict = {}
    dimension = len(space.divisors[0][1]) if space.divisors else 0
    for position, (degree, vec) in enumerate(vectors):
        if len(vec) == 1 and next(iter(vec.values())) == 1:
            name = space.names[next(iter(vec))]
        else:
            counters[degree] = counters.get(degree, 0) + 1
            name = f"h{degree}.{counters[degree]}"
        names.append(name)
        degrees.append(degree)
        if space.one is not None and vec == {space.one: QQ.one}:
            one = position
        if degree == 1 and dimension:
            total = [QQ.zero] * dimension
            for i, c in vec.items():
                cls = space.divisor_class(i)
                if cls is not None:
                    total = [t + c * x for t, x in zip(total, cls)]
            if any(total):
                divisors.append((position, tuple(total)))
    return GradedSpace(tuple(names), tuple(degrees), one, tuple(divisors), ())


def harmonic_contraction(X: InnerProductComplex) -> Contraction:
    """
    The harmonic contraction onto ker d and ker delta.

    delta is the adjoint of d for the Gram data, Delta = d delta + delta d, and the
    Green operator Gr is the inverse of Delta on the orthogonal complement of
    the harmonic space. The homotopy is G = -Gr delta.
    """
    space = X.space
    D, gram = X.validate()
    n = space.dim
    gram_inv = linalg.inverse(gram, n)
    adjoint = linalg.multiply(linalg.multiply(gram_inv, linalg.transpose(D)), gram)
    laplacian = linalg.add(linalg.multiply(D, adjoint), linalg.multiply(adjoint, D))
    vectors = _harmonic_vectors(space, D, adjoint)
    model = _model_space(space, vectors)
    h = len(vectors)
    basis = {}
    for col, (_, vec) in enumerate(vectors):
        for i, v in vec.items():
            basis.setdefault(i, {})[col] = v
    basis_t = linalg.transpose(basis)
    normal = linalg.multiply(linalg.multiply(basis_t, gram), basis)
    projection = linalg.multiply(linalg.multiply(linalg.inverse(normal, h), basis_t), gram)
    harmonic_projector = linalg.multiply(basis, projection)
    green = linalg.add(linalg.inverse(linalg.add(laplacian, harmonic_projector), n), harmonic_projector, -1)
    homotopy = linalg.multiply(green, adjoint)
    homotopy = {r: {c: -v for c, v in row.items()} for r, row in homotopy.items()}
    logger.debug(f"harmonic model of dimension {h} inside dimension {n}")
    return Contraction(
        model=model,
        complex=space,
        d_model={},
        d_complex=space.declared_differential(),
        i=matrix_to_entries(basis),
        pi=matrix_to_entries(projection),
        homotopy=matrix_to_entries(homotopy),
        strong=True,
    )
