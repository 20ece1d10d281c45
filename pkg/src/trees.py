"""Decorated stable rooted ribbon trees and exact integration over time allocations."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from sympy import QQ
from sympy.polys.rings import ring

from src.labels import LabelClass
from src.novikov import parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecoratedTree:
    """
    A planar rooted tree; ``beta`` is None for an exterior input (leaf).

    Interior vertices carry their decoration ``beta`` and their children in
    counterclockwise order. The root edge is implicit above the top vertex.
    """

    beta: Optional[LabelClass] = None
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return self.beta is None

    @property
    def leaves(self) -> int:
        if self.is_leaf:
            return 1
        return sum(child.leaves for child in self.children)

    def interior_vertices(self) -> list:
        """Interior vertices in pre-order (root first)."""
        if self.is_leaf:
            return []
        found = [self]
        for child in self.children:
            found.extend(child.interior_vertices())
        return found

    @property
    def interior_count(self) -> int:
        return len(self.interior_vertices())

    def total_class(self, rank: int) -> LabelClass:
        total = [0] * rank
        for vertex in self.interior_vertices():
            total = [a + b for a, b in zip(total, vertex.beta)]
        return tuple(total)

    def is_stable(self) -> bool:
        """Zero-decorated interior vertices need at least three edges."""
        for vertex in self.interior_vertices():
            if not any(vertex.beta) and len(vertex.children) < 2:
                return False
        return True

    def canonical(self) -> str:
        if self.is_leaf:
            return "x"
        label = ",".join(str(c) for c in self.beta)
        inner = "".join(child.canonical() for child in self.children)
        return f"({label}:{inner})"

    def sort_key(self):
        return self.interior_count, self.canonical()

    def parent_map(self) -> dict:
        """Maps pre-order vertex positions to the position of their parent."""
        parents: dict = {}
        counter = [0]

        def walk(node, parent):
            if node.is_leaf:
                return
            index = counter[0]
            counter[0] += 1
            parents[index] = parent
            for child in node.children:
                walk(child, index)

        walk(self, None)
        return parents


LEAF = DecoratedTree()


def tree_to_string(tree: DecoratedTree) -> str:
    return tree.canonical()


def _compositions(support, k: int, beta: LabelClass, zero: LabelClass):
    """Ordered sequences of (k_i, beta_i) pieces, none equal to (0, 0)."""
    if k == 0 and beta == zero:
        yield ()
    for b1, rest in support.splits(beta):
        for k1 in range(k + 1):
            if k1 == 0 and b1 == zero:
                continue
            for tail in _compositions(support, k - k1, rest, zero):
                yield ((k1, b1),) + tail


def enumerate_trees(k: int, beta: LabelClass, support) -> list:
    """
    All decorated stable trees with k inputs and total class beta.

    Args:
        support: a ``Support`` of the label group; decorations range over it
    """
    beta = tuple(beta)
    zero = tuple(0 for _ in beta)
    cache: dict = {}

    def build(kk: int, bb: LabelClass) -> list:
        key = (kk, bb)
        if key in cache:
            return cache[key]
        found = []
        if kk == 1 and bb == zero:
            found.append(LEAF)
        for decoration, rest in support.splits(bb):
            for pieces in _compositions(support, kk, rest, zero):
                if decoration == zero and len(pieces) < 2:
                    continue
                child_lists = [build(ki, bi) for ki, bi in pieces]
                for children in _product(child_lists):
                    found.append(DecoratedTree(decoration, children))
        cache[key] = found
        return found

    if beta not in support:
        return []
    trees = sorted(set(build(k, beta)), key=lambda t: t.sort_key())
    logger.debug(f"{len(trees)} trees for k={k}, beta={beta}")
    return trees


def _product(lists):
    if not lists:
        yield ()
        return
    head, rest = lists[0], lists[1:]
    for item in head:
        for tail in _product(rest):
            yield (item,) + tail


@lru_cache(maxsize=None)
def super_catalan(k: int) -> int:
    """Number of planar rooted trees with k leaves and no unary vertices."""
    if k <= 1:
        return 1
    # first subtree takes j < k leaves, the rest form a nonempty forest
    return sum(super_catalan(j) * _forests(k - j) for j in range(1, k))


@lru_cache(maxsize=None)
def _forests(n: int) -> int:
    if n == 0:
        return 1
    return sum(super_catalan(j) * _forests(n - j) for j in range(1, n + 1))


@dataclass(frozen=True)
class AllocationPolytope:
    """
    Order-respecting times ``a <= tau(v) <= tau(parent(v)) <= b``.

    ``parents`` maps each vertex to its parent vertex or None for maximal ones.
    """

    parents: tuple
    lower: object
    upper: object

    @classmethod
    def of_tree(cls, tree: DecoratedTree, a, b) -> "AllocationPolytope":
        return cls.from_parents(tree.parent_map(), a, b)

    @classmethod
    def from_parents(cls, parents: dict, a, b) -> "AllocationPolytope":
        ordered = tuple(sorted(parents.items()))
        return cls(ordered, parse_rational(a), parse_rational(b))

    @property
    def vertices(self) -> list:
        return [v for v, _ in self.parents]

    def polynomial_ring(self):
        names = ",".join(f"tau{v}" for v in self.vertices) or "tau"
        return ring(names, QQ)

    def integrate(self, integrand=None):
        """
        Exact iterated integral of a polynomial in the ``tau`` variables.

        Children are integrated before parents, each from ``a`` up to the
        parent's time (or ``b`` for maximal vertices).
        """
        if not self.parents:
            if integrand is None:
                return QQ.one
            return _constant_part(integrand)
        R, *gens = self.polynomial_ring()
        index = {v: i for i, v in enumerate(self.vertices)}
        parent = dict(self.parents)
        if self.lower > self.upper:
            raise ValueError("allocation interval must satisfy a <= b")
        current = R.one if integrand is None else _lift(integrand, R)
        for v in _post_order(parent):
            x = gens[index[v]]
            anti = antiderivative(current, x)
            top = gens[index[parent[v]]] if parent[v] is not None else R(self.upper)
            current = anti.compose(x, top) - anti.compose(x, R(self.lower))
        return _constant_part(current)

    def volume(self):
        return self.integrate()


def _post_order(parent: dict) -> list:
    children: dict = {}
    roots = []
    for v, p in parent.items():
        if p is None:
            roots.append(v)
        else:
            children.setdefault(p, []).append(v)
    order = []

    def walk(v):
        for c in sorted(children.get(v, [])):
            walk(c)
        order.append(v)

    for r in sorted(roots):
        walk(r)
    return order


def antiderivative(poly, x):
    """Antiderivative in the generator ``x`` with zero constant."""
    R = poly.ring
    i = R.gens.index(x)
    terms = {}
    for monom, coeff in poly.terms():
        raised = list(monom)
        raised[i] += 1
        terms[tuple(raised)] = coeff / raised[i]
    return R.from_dict(terms) if terms else R.zero


def _constant_part(poly):
    if not hasattr(poly, "ring"):
        return parse_rational(poly)
    return poly.get(poly.ring.zero_monom, QQ.zero)


def allocation_volume(tree: DecoratedTree, a, b):
    return AllocationPolytope.of_tree(tree, a, b).volume()


def integrate_allocation(tree: DecoratedTree, integrand, a, b):
    """``integrand`` is a polynomial in the ring of ``AllocationPolytope.polynomial_ring``."""
    return AllocationPolytope.of_tree(tree, a, b).integrate(integrand)


def _lift(integrand, R):
    if hasattr(integrand, "ring"):
        return integrand.set_ring(R)
    return R(parse_rational(integrand))
