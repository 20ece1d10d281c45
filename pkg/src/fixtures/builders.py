"""
Programmatic fixtures.

Every builder returns domain objects directly; bundled JSON files name them
with ``{"builtin": name, "params": {...}}``.
"""

import itertools
import logging
from typing import Optional, Sequence

from sympy import QQ

from src.algebra.checks import check_ainf
from src.algebra.operators import OperatorSystem, identity_system, star_component
from src.algebra.spaces import Entries, GradedSpace, add_entries, add_term, scale_entries
from src.errors import DataError
from src.geometry import RationalPolyhedron
from src.isotopy import PseudoIsotopy, deformation_isotopy, integrate, restrict, trivial_isotopy
from src.labels import LabelGroup
from src.mirror.charts import ChartBundle, pushforward_system
from src.mirror.gluing import TransitionData
from src.novikov import TruncationContext, factorial_inverse, parse_rational
from src.transfer.harmonic import InnerProductComplex
from src.transfer.obstruction import bar_differential
from src.transfer.whitehead import cochain_basis, solve_coboundary

logger = logging.getLogger(__name__)

ACYCLIC_NAMES = ("a", "f")


def exterior_monomials(n: int) -> list:
    """Increasing index tuples ordered by degree, then lexicographically."""
    monomials = []
    for r in range(n + 1):
        monomials.extend(itertools.combinations(range(n), r))
    return monomials


def monomial_name(indices: tuple) -> str:
    return "".join(f"t{i + 1}" for i in indices) or "1"


def torus_space(n: int, acyclic: bool = False) -> GradedSpace:
    """Cohomology of T^n as the exterior algebra, optionally with an acyclic pair a -> f."""
    monomials = exterior_monomials(n)
    names = [monomial_name(m) for m in monomials]
    degrees = [len(m) for m in monomials]
    divisors = []
    for j in range(n):
        vec = [0] * n
        vec[j] = 1
        divisors.append((names.index(f"t{j + 1}"), vec))
    differential = None
    if acyclic:
        names += list(ACYCLIC_NAMES)
        degrees += [0, 1]
        differential = ((len(names) - 2, len(names) - 1, 1),)
    return GradedSpace(tuple(names), tuple(degrees), 0, tuple(divisors), differential)


def _wedge(left: tuple, right: tuple):
    """(sign, sorted indices) of theta_left ^ theta_right, or None when it vanishes."""
    if set(left) & set(right):
        return None
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions, tuple(sorted(left + right))


def _torus_lookup(space: GradedSpace) -> dict:
    lookup = {}
    for index, name in enumerate(space.names):
        if name in ACYCLIC_NAMES:
            continue
        indices = () if name == "1" else tuple(int(x) - 1 for x in name.split("t")[1:])
        lookup[indices] = index
    return lookup


def wedge_product(space: GradedSpace, signed: bool = True) -> Entries:
    """m_2,0(x, y) = (-1)^{|x|} x ^ y, or the plain wedge when ``signed`` is off."""
    lookup = _torus_lookup(space)
    entries: Entries = {}
    for (left, i), (right, j) in itertools.product(lookup.items(), repeat=2):
        product = _wedge(left, right)
        if product is None:
            continue
        sign, indices = product
        if signed:
            sign *= (-1) ** len(left)
        add_term(entries, (i, j), lookup[indices], QQ(sign))
    if "a" in space.names:
        a, f, one = space.index("a"), space.index("f"), space.one
        add_term(entries, (one, a), a, QQ.one)
        add_term(entries, (a, one), a, QQ.one)
        add_term(entries, (one, f), f, QQ.one)
        add_term(entries, (f, one), f, -QQ.one)
    return entries


def torus_labels(n: int, generators: Sequence[dict] = (), with_support: bool = True) -> LabelGroup:
    """
    Label group with one generator per entry ``{"energy", "maslov", "boundary"}``.

    Without generators a single placeholder class carries the boundary map so
    divisor inputs pair; it is kept out of the support.
    """
    if not generators:
        boundary = [[1 if j == 0 else 0 for j in range(n)]]
        return LabelGroup((1,), (2,), tuple(tuple(b) for b in boundary), ())
    energy = [g["energy"] for g in generators]
    maslov = [g["maslov"] for g in generators]
    boundary = [tuple(g["boundary"]) for g in generators]
    rank = len(generators)
    support = [tuple(1 if i == j else 0 for i in range(rank)) for j in range(rank)] if with_support else []
    return LabelGroup(tuple(energy), tuple(maslov), tuple(boundary), tuple(support))


def context_of(energy_cutoff="3", length_cutoff: int = 3) -> TruncationContext:
    return TruncationContext(parse_rational(energy_cutoff), length_cutoff)


def qcdr_torus(n: int = 2, signed: bool = True, context: Optional[TruncationContext] = None, acyclic: bool = False,
               labels: Optional[LabelGroup] = None) -> OperatorSystem:
    """The undeformed exterior algebra of T^n: m_1,0 is the declared differential, m_2,0 the wedge."""
    context = context or context_of()
    space = torus_space(n, acyclic)
    labels = labels or torus_labels(n)
    zero = labels.zero()
    components = {(2, zero): wedge_product(space, signed)}
    differential = space.declared_differential()
    if differential:
        components[(1, zero)] = differential
    return OperatorSystem(space, space, labels, context, components, base_degree=2)


def contraction(space: GradedSpace, boundary: Sequence) -> dict:
    """The contraction derivation with the boundary vector on each exterior monomial."""
    lookup = _torus_lookup(space)
    result = {}
    for indices, index in lookup.items():
        image = {}
        for s, i in enumerate(indices):
            if boundary[i]:
                rest = indices[:s] + indices[s + 1:]
                image[rest] = image.get(rest, 0) + (-1) ** s * boundary[i]
        result[index] = {key: QQ(v) for key, v in image.items() if v}
    return result


def _wedge_vectors(vectors: list) -> dict:
    current = {(): QQ.one}
    for vector in vectors:
        step: dict = {}
        for left, c1 in current.items():
            for right, c2 in vector.items():
                product = _wedge(left, right)
                if product is None:
                    continue
                sign, indices = product
                step[indices] = step.get(indices, QQ.zero) + c1 * c2 * sign
        current = {key: v for key, v in step.items() if v}
    return current


def maslov_two_components(space: GradedSpace, beta: tuple, boundary: Sequence, coef, length_cutoff: int) -> dict:
    """m_{k,beta}(x_1..x_k) = (c / k!) i(x_1) ^ ... ^ i(x_k) for a Maslov-2 class with m_{0,beta} = c 1."""
    lookup = _torus_lookup(space)
    iota = contraction(space, boundary)
    inputs = [index for index in lookup.values() if index != space.one and iota[index]]
    coef = parse_rational(coef)
    components = {}
    for k in range(length_cutoff + 1):
        entries: Entries = {}
        weight = coef * factorial_inverse(k)
        for word in itertools.product(inputs, repeat=k):
            for indices, c in _wedge_vectors([iota[i] for i in word]).items():
                add_term(entries, word, lookup[indices], weight * c)
        components[(k, beta)] = entries
    return components


def maslov_zero_components(space: GradedSpace, beta: tuple, boundary: Sequence, coef, length_cutoff: int,
                           target: str = "t1t2") -> dict:
    """m_{k,beta}(x) = (c / k!) prod <v, x_i> times a degree-two class, on degree-one inputs."""
    lookup = _torus_lookup(space)
    output = space.index(target)
    thetas = [(index, indices[0]) for indices, index in lookup.items() if len(indices) == 1]
    coef = parse_rational(coef)
    components = {}
    for k in range(length_cutoff + 1):
        entries: Entries = {}
        for word in itertools.product(thetas, repeat=k):
            value = coef * factorial_inverse(k)
            for _, j in word:
                value *= boundary[j]
            add_term(entries, tuple(index for index, _ in word), output, value)
        components[(k, beta)] = entries
    return components


def deformed_torus(classes: Sequence[dict], context: Optional[TruncationContext] = None, acyclic: bool = False,
                   extra_generators: Sequence[dict] = ()) -> OperatorSystem:
    """
    Rank-two torus deformed by Maslov-2 and Maslov-0 classes.

    Each class is ``{"energy", "maslov", "boundary", "coef"}``; Maslov-0 and
    Maslov-2 classes may only coexist when their energies add up to the cutoff.
    ``extra_generators`` enlarge the label group without carrying operators.
    """
    context = context or context_of()
    n = len(classes[0]["boundary"]) if classes else 2
    generators = list(classes) + list(extra_generators)
    labels = torus_labels(n, generators)
    base = qcdr_torus(n, True, context, acyclic, labels)
    space = base.source
    components = dict(base.components)
    for position, data in enumerate(classes):
        beta = tuple(1 if i == position else 0 for i in range(len(generators)))
        if data["maslov"] == 2:
            parts = maslov_two_components(space, beta, data["boundary"], data.get("coef", 1), context.length_cutoff)
        elif data["maslov"] == 0:
            parts = maslov_zero_components(space, beta, data["boundary"], data.get("coef", 1), context.length_cutoff)
        else:
            raise ValueError(f"no deformation of Maslov index {data['maslov']}")
        components.update(parts)
    system = OperatorSystem(space, space, labels, context, components, base_degree=2)
    if acyclic:
        system = _acyclic_coupling(system)
        report = check_ainf(system)
        if not report.passed:
            raise DataError(f"deformed torus with the acyclic pair is not A-infinity: {report.summary()}")
    return system


def _acyclic_coupling(system: OperatorSystem) -> OperatorSystem:
    """
    Cancels the A-infinity defect that the unit action on the acyclic pair picks up.

    The defect at each (k, beta) sits on inputs with one acyclic slot and
    acyclic outputs; such cochains form an acyclic complex, so a correction
    m_{k,beta} += c with c of the same shape always exists.
    """
    space = system.source
    acyclic = {space.index(name) for name in ACYCLIC_NAMES}
    zero = system.zero_class
    components = dict(system.components)
    for beta in system.support:
        if beta == zero:
            continue
        mu = system.labels.maslov_of(beta)
        for k in range(1, system.context.length_cutoff + 1):
            current = system.with_components(components)
            defect = star_component(current, current, k, beta)
            if not defect:
                continue
            witness = None
            for unit_free in (True, False):
                basis = [
                    (inputs, output)
                    for inputs, output in cochain_basis(space, space, k, 2 - k - mu, unit_free)
                    if output in acyclic and sum(i in acyclic for i in inputs) == 1
                ]
                witness = solve_coboundary(
                    lambda phi: bar_differential(phi, k, current, current, p=1), scale_entries(defect, -1), basis
                )
                if witness is not None:
                    break
            if witness is None:
                raise DataError(f"no acyclic coupling at ({k}, {list(beta)})")
            merged: Entries = {}
            add_entries(merged, components.get((k, beta), {}))
            add_entries(merged, witness)
            components[(k, beta)] = merged
            logger.debug(f"acyclic coupling at ({k}, {list(beta)}): {len(witness)} input words")
    return system.with_components(components)


CLIFFORD_BOUNDARIES = ((1, 0), (0, 1), (-1, -1))


def clifford_classes(energy=1) -> list:
    return [{"energy": energy, "maslov": 2, "boundary": b, "coef": 1} for b in CLIFFORD_BOUNDARIES]


def clifford_algebra(context: Optional[TruncationContext] = None, gauge_energy=None) -> OperatorSystem:
    """Three Maslov-2 classes of energy 1; with ``gauge_energy`` a boundaryless Maslov-0 generator is added."""
    context = context or context_of("5/2", 3)
    extra = []
    if gauge_energy is not None:
        extra.append({"energy": gauge_energy, "maslov": 0, "boundary": (0, 0)})
    return deformed_torus(clifford_classes(), context, extra_generators=extra)


def maslov_zero_algebra(context: Optional[TruncationContext] = None, boundary=(1, 0), energy=1) -> OperatorSystem:
    """A single Maslov-0 class with m_{0,beta} = t1t2: a weak Maurer-Cartan obstruction."""
    context = context or context_of("5/2", 3)
    return deformed_torus([{"energy": energy, "maslov": 0, "boundary": boundary, "coef": 1}], context)


def negative_maslov_torus(context: Optional[TruncationContext] = None) -> OperatorSystem:
    """Exterior algebra whose support contains a class of Maslov index -2."""
    context = context or context_of()
    labels = torus_labels(2, [{"energy": 1, "maslov": -2, "boundary": (0, 0)}])
    return qcdr_torus(2, True, context, labels=labels)


def tilted_inner_product(system: OperatorSystem, tilt="1/2") -> InnerProductComplex:
    """Inner product on the acyclic extension with <f, t1> = tilt."""
    space = system.source
    gram = {}
    tilt = parse_rational(tilt)
    if tilt and "f" in space.names:
        for i in range(space.dim):
            if space.degree(i) == 1:
                gram[(i, i)] = QQ.one
        f, t1 = space.index("f"), space.index("t1")
        gram[(f, t1)] = tilt
        gram[(t1, f)] = tilt
    return InnerProductComplex(space, gram)


def gauge_field(m: OperatorSystem, strength="1/2", direction: Sequence = (1, 0)) -> OperatorSystem:
    """c with a single component c_{0,beta'} = strength * (d . theta) at the Maslov-0 boundaryless generator."""
    labels = m.labels
    gauge = None
    for g in labels.nonzero_support():
        if sum(g) == 1 and labels.maslov_of(g) == 0 and not any(labels.boundary_of(g)):
            gauge = g
    if gauge is None:
        raise ValueError("the algebra has no boundaryless Maslov-0 generator")
    space = m.source
    strength = parse_rational(strength)
    value = {}
    for j, d in enumerate(direction):
        if d:
            value[space.index(f"t{j + 1}")] = strength * d
    return OperatorSystem(space, space, labels, m.context, {(0, gauge): {(): value}}, base_degree=1)


def gauge_isotopy(context: Optional[TruncationContext] = None, strength="1/2", gauge_energy="1/2",
                  direction: Sequence = (1, 0)) -> PseudoIsotopy:
    m = clifford_algebra(context, gauge_energy)
    return deformation_isotopy(m, gauge_field(m, strength, direction))


def flat_gauge_isotopy(context: Optional[TruncationContext] = None, strength="1/3") -> PseudoIsotopy:
    """Undeformed torus with a gauge field in both theta directions; m^s stays constant."""
    context = context or context_of("2", 3)
    labels = torus_labels(2, [{"energy": "1/2", "maslov": 0, "boundary": (0, 0)}])
    m = qcdr_torus(2, True, context, labels=labels)
    return deformation_isotopy(m, gauge_field(m, strength, (1, 1)))


def trivial_torus_isotopy(context: Optional[TruncationContext] = None) -> PseudoIsotopy:
    context = context or context_of("5/2", 3)
    return trivial_isotopy(deformed_torus([{"energy": 1, "maslov": 2, "boundary": (1, 0), "coef": 1}], context))


def box(center: Sequence, half_width) -> RationalPolyhedron:
    half_width = parse_rational(half_width)
    center = [parse_rational(x) for x in center]
    return RationalPolyhedron.box([c - half_width for c in center], [c + half_width for c in center])


def chart_at(name: str, m: OperatorSystem, basepoint: Sequence, half_width="1/8") -> ChartBundle:
    """The algebra ``m`` (labelled at the origin) moved to ``basepoint``, on a box domain."""
    n = m.labels.dimension
    identity = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    basepoint = tuple(parse_rational(x) for x in basepoint)
    moved = pushforward_system(identity, basepoint, m)
    return ChartBundle(name, moved, tuple(basepoint), box(basepoint, half_width))


def _transition(source: ChartBundle, target: ChartBundle, C: OperatorSystem) -> TransitionData:
    n = target.dimension
    identity = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    shift = [q_j - q_k for q_j, q_k in zip(target.basepoint, source.basepoint)]
    overlap = target.polyhedron.intersection(source.polyhedron)
    return TransitionData(source, target, identity, shift, C, overlap)


DEFAULT_BASEPOINTS = (("0", "0"), ("1/8", "0"), ("1/4", "0"))


def shift_atlas(count: int = 3, context: Optional[TruncationContext] = None, basepoints=DEFAULT_BASEPOINTS):
    """Clifford charts at several basepoints glued by pure shifts (C = id)."""
    m = clifford_algebra(context)
    charts = [chart_at(f"U{i}", m, basepoints[i]) for i in range(count)]
    transitions = []
    for j, k in itertools.permutations(range(count), 2):
        if j < k:
            target, source = charts[j], charts[k]
            C = identity_system(target.space, target.labels, target.context)
            transitions.append(_transition(source, target, C))
    return charts, transitions


def sheared_transition(context: Optional[TruncationContext] = None, f_star=((1, 1), (0, 1)), shift=("1/16", "0")):
    """Two Clifford charts related by a unimodular change of lattice basis and a shift."""
    m = clifford_algebra(context)
    source = chart_at("U0", m, (0, 0))
    moved = pushforward_system(f_star, shift, source.m)
    target = ChartBundle("U1", moved, tuple(shift), box(shift, "1/8"))
    C = identity_system(target.space, target.labels, target.context)
    return source, target, TransitionData(source, target, f_star, shift, C, target.polyhedron)


DEFAULT_PARAMETERS = ("0", "1/2", "1")


def corrected_atlas(count: int = 3, context: Optional[TruncationContext] = None, strength="1/2",
                    basepoints=DEFAULT_BASEPOINTS, parameters=DEFAULT_PARAMETERS):
    """
    Charts carrying m^{s_i} of one gauge isotopy at basepoints q_i.

    The transition into chart j from chart k (j < k) uses C^{[s_j, s_k]} moved to q_j.
    """
    isotopy = gauge_isotopy(context, strength)
    charts = []
    for i in range(count):
        charts.append(chart_at(f"U{i}", restrict(isotopy, parameters[i]), basepoints[i]))
    transitions = []
    n = charts[0].dimension
    identity = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
    for j, k in itertools.permutations(range(count), 2):
        if j < k:
            C = pushforward_system(identity, charts[j].basepoint, integrate(isotopy, parameters[j], parameters[k]))
            transitions.append(_transition(charts[k], charts[j], C))
    logger.info(f"Built corrected atlas with {count} charts and {len(transitions)} transitions")
    return charts, transitions


def broken_margin_atlas(context: Optional[TruncationContext] = None, half_width="3/4"):
    """
    Two Clifford charts glued with a Maslov-0 correction C_{0,beta} = t1.

    The correction class has energy 1/2 and boundary (0, 1); the overlap is
    widened to a box of the given half-width around the target basepoint, so
    the half-margin certificate fails once half_width exceeds 1/4.
    """
    context = context or context_of("5/2", 3)
    correction = {"energy": "1/2", "maslov": 0, "boundary": (0, 1)}
    m = deformed_torus(clifford_classes(), context, extra_generators=[correction])
    source = chart_at("U0", m, DEFAULT_BASEPOINTS[0])
    target = chart_at("U1", m, DEFAULT_BASEPOINTS[1])
    beta = (0, 0, 0, 1)
    C = identity_system(target.space, target.labels, context)
    C = C.with_components({**C.components, (0, beta): {(): {target.space.index("t1"): QQ.one}}})
    transition = _transition(source, target, C)
    transition.overlap = box(target.basepoint, half_width)
    return [source, target], [transition]
