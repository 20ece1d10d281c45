"""
Gapped operator systems, composition and the Gerstenhaber product.

An ``OperatorSystem`` stores the components ``t_{k,beta}`` for arities up to the
length cutoff and classes of the support monoid below the energy cutoff.
A component is either known (possibly zero) or unknown. Composite components
are computed only when every term they need is known, so a truncated result
never silently drops a contribution.
"""

import logging
from typing import Any, Iterable, Optional

from sympy import QQ

from src.algebra.spaces import (
    Entries,
    GradedSpace,
    add_entries,
    identity_factor,
    map_coefficients,
    plug,
    pull_back,
)
from src.errors import DegreeError, SpaceMismatch
from src.labels import LabelClass, LabelGroup
from src.novikov import TruncationContext

logger = logging.getLogger(__name__)

Key = tuple  # (k, beta)


class OperatorSystem:
    """
    A gapped family of sparse multilinear maps ``source^{x k} -> target``.

    Args:
        source, target: graded spaces
        labels: label group of the classes beta
        context: truncation context (E_max, K_max)
        components: {(k, beta): entries}
        base_degree: 2 for A-infinity algebras, 1 for homomorphisms, None if free
        known: keys whose value is known; defaults to every key up to K_max
    """

    def __init__(
        self,
        source: GradedSpace,
        target: GradedSpace,
        labels: LabelGroup,
        context: TruncationContext,
        components: Optional[dict] = None,
        base_degree: Optional[int] = None,
        known: Optional[Iterable[Key]] = None,
    ):
        self.source = source
        self.target = target
        self.labels = labels
        self.context = context
        self.base_degree = base_degree
        self.support = labels.support_set(context.energy_cutoff)
        self.components: dict = {}
        for (k, beta), entries in (components or {}).items():
            beta = tuple(beta)
            if k > context.length_cutoff or beta not in self.support:
                continue
            if entries:
                self.components[(k, beta)] = entries
        if known is None:
            self.known = None
        else:
            self.known = {(k, tuple(beta)) for k, beta in known}
            self.known.update(self.components)

    # Access

    @property
    def zero_class(self) -> LabelClass:
        return self.labels.zero()

    def is_known(self, k: int, beta: LabelClass) -> bool:
        if k < 0 or beta not in self.support:
            return True
        if (k, beta) == (0, self.zero_class):
            return True
        if self.known is None:
            return k <= self.context.length_cutoff
        return (k, beta) in self.known

    def get(self, k: int, beta: LabelClass) -> Optional[Entries]:
        """Component (k, beta), ``{}`` when zero, None when unknown."""
        if not self.is_known(k, beta):
            return None
        return self.components.get((k, beta), {})

    def keys(self) -> list:
        """Known keys in (energy, beta, k) order."""
        keys = []
        for beta in self.support:
            for k in range(self.context.length_cutoff + 1):
                if (k, beta) != (0, self.zero_class) and self.is_known(k, beta):
                    keys.append((k, beta))
        return keys

    def nonzero_keys(self) -> list:
        return [key for key in self.keys() if self.components.get(key)]

    def support_classes(self) -> set:
        return {beta for (_, beta), entries in self.components.items() if entries}

    def degree_of(self, k: int, beta: LabelClass) -> Optional[int]:
        if self.base_degree is None:
            return None
        return self.base_degree - k - self.labels.maslov_of(beta)

    def with_components(self, components: dict, known=None, base_degree="same") -> "OperatorSystem":
        return OperatorSystem(
            self.source,
            self.target,
            self.labels,
            self.context,
            components,
            self.base_degree if base_degree == "same" else base_degree,
            known=known,
        )

    def map_coefficients(self, fn) -> "OperatorSystem":
        comps = {key: map_coefficients(entries, fn) for key, entries in self.components.items()}
        return self.with_components(comps, known=self.known)

    def restrict_energy(self, energy_cutoff=None, length_cutoff=None) -> "OperatorSystem":
        """Re-truncates to smaller cutoffs."""
        ctx = self.context.with_cutoffs(energy_cutoff, length_cutoff)
        known = None
        if self.known is not None:
            known = [key for key in self.known if key[0] <= ctx.length_cutoff]
        return OperatorSystem(
            self.source, self.target, self.labels, ctx, self.components, self.base_degree, known=known
        )

    def check_degrees(self):
        """Raises DegreeError unless every entry has the declared degree."""
        if self.base_degree is None:
            return
        for (k, beta), entries in self.components.items():
            expected = self.degree_of(k, beta)
            for inputs, row in entries.items():
                in_degree = sum(self.source.degree(i) for i in inputs)
                for output in row:
                    if self.target.degree(output) - in_degree != expected:
                        raise DegreeError(
                            f"component ({k}, {beta}) maps {[self.source.names[i] for i in inputs]} "
                            f"to {self.target.names[output]} with degree "
                            f"{self.target.degree(output) - in_degree}, expected {expected}"
                        )

    def equals(self, other: "OperatorSystem") -> bool:
        return self.first_difference(other) is None

    def first_difference(self, other: "OperatorSystem"):
        """First (k, beta) where both systems are known and differ."""
        for key in self.keys():
            mine = self.get(*key)
            theirs = other.get(*key)
            if theirs is None:
                continue
            diff: Entries = {}
            add_entries(diff, mine)
            add_entries(diff, theirs, -1)
            if diff:
                return key
        return None

    def __repr__(self):
        return (
            f"OperatorSystem({self.source.dim}->{self.target.dim}, "
            f"{len(self.components)} nonzero components)"
        )


def identity_system(space: GradedSpace, labels: LabelGroup, context: TruncationContext) -> OperatorSystem:
    entries = {(i,): {i: QQ.one} for i in range(space.dim)}
    return OperatorSystem(space, space, labels, context, {(1, labels.zero()): entries}, base_degree=1)


def linear_system(
    source: GradedSpace, target: GradedSpace, labels: LabelGroup, context: TruncationContext, entries: Entries
) -> OperatorSystem:
    """A strict homomorphism with only the (1, 0) component."""
    return OperatorSystem(source, target, labels, context, {(1, labels.zero()): entries}, base_degree=1)


def sign_twist(space: GradedSpace, vector: dict) -> dict:
    """x -> x^# on a vector ``{index: coefficient}``."""
    return {i: c * space.sharp(i) for i, c in vector.items()}


def twist_inputs(entries: Entries, space: GradedSpace, p: int = 1) -> Entries:
    """op^{#p} = op o (id_{#p})^{x k}."""
    factor = identity_factor(space, twisted=True, power=p)
    result: Entries = {}
    for inputs, row in entries.items():
        sign = 1
        for i in inputs:
            sign *= factor[i][0][1]
        for output, c in row.items():
            result.setdefault(inputs, {})[output] = c * sign
    return result


class _Sequences:
    """Ordered decompositions of (k, beta) into nonzero pieces (k_i, beta_i)."""

    def __init__(self, support):
        self.support = support
        self.zero = None
        self._cache: dict = {}

    def __call__(self, k: int, beta: LabelClass) -> list:
        key = (k, beta)
        if key in self._cache:
            return self._cache[key]
        if self.zero is None:
            self.zero = tuple(0 for _ in beta)
        result = []
        if k == 0 and beta == self.zero:
            result.append(())
        for b1, rest in self.support.splits(beta):
            for k1 in range(k + 1):
                if k1 == 0 and b1 == self.zero:
                    continue
                for tail in self(k - k1, rest):
                    result.append(((k1, b1),) + tail)
        self._cache[key] = result
        return result


_SEQUENCE_CACHE: dict = {}


def sequences(support, k: int, beta: LabelClass) -> list:
    """All ordered tuples ((k_1, b_1), ...) summing to (k, beta), no (0, 0) piece."""
    key = id(support)
    if key not in _SEQUENCE_CACHE or _SEQUENCE_CACHE[key][0] is not support:
        _SEQUENCE_CACHE[key] = (support, _Sequences(support))
    return _SEQUENCE_CACHE[key][1](k, beta)


class _FactorCache:
    def __init__(self):
        self._cache: dict = {}

    def get(self, system: OperatorSystem, k: int, beta: LabelClass):
        key = (id(system), k, beta)
        if key not in self._cache:
            entries = system.get(k, beta)
            self._cache[key] = (system, None if entries is None else pull_back(entries))
        return self._cache[key][1]


def compose_component(
    g: OperatorSystem,
    f: OperatorSystem,
    k: int,
    beta: LabelClass,
    skip_outer: Iterable[Key] = (),
    include_empty: bool = True,
    cache: Optional[_FactorCache] = None,
) -> Optional[Entries]:
    """
    (g o f)_{k,beta} = sum g_{l,b0} o (f_{k1,b1} x ... x f_{kl,bl}).

    Returns None when some needed component of g or f is unknown. With
    ``include_empty`` the l = 0 term g_{0,beta} contributes at k = 0.
    """
    cache = cache or _FactorCache()
    skip = {(ell, tuple(b)) for ell, b in skip_outer}
    result: Entries = {}
    for beta0, rest in f.support.splits(beta):
        for seq in sequences(f.support, k, rest):
            ell = len(seq)
            if (ell, beta0) in skip or (ell == 0 and not include_empty):
                continue
            factors = []
            unknown = False
            vanishes = False
            for ki, bi in seq:
                factor = cache.get(f, ki, bi)
                if factor is None:
                    unknown = True
                elif not factor:
                    vanishes = True
                    break
                else:
                    factors.append(factor)
            if vanishes:
                continue
            outer = g.get(ell, beta0)
            if outer == {}:
                continue
            if outer is None or unknown:
                return None
            plug(outer, factors, result)
    return result


def star_component(
    g: OperatorSystem,
    h: OperatorSystem,
    k: int,
    beta: LabelClass,
    skip: Optional[callable] = None,
    cache: Optional[_FactorCache] = None,
    twisted: bool = True,
) -> Optional[Entries]:
    """
    (g * h)_{k,beta} = sum g_{l+m+1,b'} o (id_#^l x h_{n,b''} x id^m).

    ``skip(outer_key, inner_key)`` drops selected terms. With ``twisted`` off
    the leading identities carry no sign (plain insertion).
    """
    cache = cache or _FactorCache()
    space = h.target
    ident = identity_factor(space)
    leading = identity_factor(space, twisted=twisted)
    result: Entries = {}
    for b_outer, b_inner in h.support.splits(beta):
        for nu in range(k + 1):
            inner = cache.get(h, nu, b_inner)
            if inner == {}:
                continue
            for lam in range(k - nu + 1):
                mu = k - nu - lam
                outer_key = (lam + mu + 1, b_outer)
                if skip is not None and skip(outer_key, (nu, b_inner)):
                    continue
                outer = g.get(*outer_key)
                if outer == {}:
                    continue
                if outer is None or inner is None:
                    return None
                plug(outer, [leading] * lam + [inner] + [ident] * mu, result)
    return result


def _assemble(source, target, template: OperatorSystem, fn, base_degree) -> OperatorSystem:
    components = {}
    known = []
    cache = _FactorCache()
    for beta in template.support:
        for k in range(template.context.length_cutoff + 1):
            if (k, beta) == (0, template.zero_class):
                continue
            value = fn(k, beta, cache)
            if value is None:
                continue
            known.append((k, beta))
            if value:
                components[(k, beta)] = value
    return OperatorSystem(source, target, template.labels, template.context, components, base_degree, known=known)


def compose(g: OperatorSystem, f: OperatorSystem) -> OperatorSystem:
    """The composition g o f, restricted to its determined components."""
    f.target.require_same(g.source, "target of f and source of g")
    if f.labels != g.labels:
        raise SpaceMismatch("composition needs identified label groups")
    base = None
    if g.base_degree is not None and f.base_degree is not None:
        base = g.base_degree + f.base_degree - 1
    return _assemble(
        f.source, g.target, f, lambda k, beta, cache: compose_component(g, f, k, beta, cache=cache), base
    )


def star(g: OperatorSystem, h: OperatorSystem) -> OperatorSystem:
    """The Gerstenhaber product g * h, restricted to its determined components."""
    h.target.require_same(g.source, "target of h and source of g")
    if h.labels != g.labels:
        raise SpaceMismatch("Gerstenhaber product needs identified label groups")
    base = None
    if g.base_degree is not None and h.base_degree is not None:
        base = g.base_degree + h.base_degree - 1
    return _assemble(h.source, g.target, h, lambda k, beta, cache: star_component(g, h, k, beta, cache=cache), base)


def difference(a: OperatorSystem, b: OperatorSystem) -> OperatorSystem:
    """a - b on the keys known in both."""
    components = {}
    known = []
    for key in a.keys():
        other = b.get(*key)
        if other is None:
            continue
        known.append(key)
        diff: Entries = {}
        add_entries(diff, a.get(*key))
        add_entries(diff, other, -1)
        if diff:
            components[key] = diff
    return a.with_components(components, known=known, base_degree=None)


def scale_coefficient(value: Any, scalar: Any):
    return value * scalar
