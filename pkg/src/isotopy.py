"""
Pseudo-isotopies with polynomial dependence on s and their integration.

Coefficients of ``m^s`` and ``c^s`` are polynomials in the ring ``QQ[s, lo, hi]``
(only ``s`` occurs in stored data); ``lo`` and ``hi`` carry symbolic
integration bounds. The (1, 0) component of c is the derivative d/ds and is
never stored.
"""

import logging
from dataclasses import dataclass, field

from sympy import QQ
from sympy.polys.rings import ring

from src.algebra.checks import check_ainf
from src.algebra.operators import (
    OperatorSystem,
    _FactorCache,
    compose,
    compose_component,
    star_component,
)
from src.algebra.reports import VerificationReport
from src.algebra.spaces import Entries, add_entries, first_difference, plug, pull_back
from src.errors import DegreeError
from src.novikov import factorial_inverse, parse_rational
from src.trees import AllocationPolytope, enumerate_trees

logger = logging.getLogger(__name__)

R, S, LO, HI = ring("s,lo,hi", QQ)


def polynomial(coefficients) -> object:
    """Builds a polynomial in s from coefficients listed lowest degree first."""
    result = R.zero
    for power, c in enumerate(coefficients):
        result += R(parse_rational(c)) * S**power
    return result


def coefficients_of(poly) -> list:
    """Coefficients in s, lowest degree first; other variables must be absent."""
    poly = lift(poly)
    degree = poly.degree(S) if poly else -1
    values = []
    for power in range(degree + 1):
        values.append(poly.coeff_wrt(S, power))
    result = []
    for v in values:
        if v and (v.degree(LO) > 0 or v.degree(HI) > 0):
            raise ValueError("coefficient depends on an integration bound")
        result.append(constant(v))
    return result


def lift(value):
    if hasattr(value, "ring"):
        if value.ring == R:
            return value
        return value.set_ring(R)
    return R(parse_rational(value))


def constant(poly):
    poly = lift(poly)
    return poly.get(R.zero_monom, QQ.zero)


def at(poly, s0):
    """Evaluates every variable-free remainder after substituting s = s0."""
    return constant(lift(poly).compose(S, R(parse_rational(s0))))


def antiderivative_s(poly):
    terms = {}
    for monom, coeff in lift(poly).terms():
        raised = (monom[0] + 1,) + tuple(monom[1:])
        terms[raised] = coeff / raised[0]
    return R.from_dict(terms) if terms else R.zero


@dataclass
class PseudoIsotopy:
    """
    The pair (m^s, c^s) on one space.

    ``m`` has base degree 2 and ``c`` base degree 1; both carry polynomial
    coefficients in s.
    """

    m: OperatorSystem
    c: OperatorSystem
    _symbolic: dict = field(default_factory=dict, repr=False)

    @property
    def space(self):
        return self.m.source

    @property
    def labels(self):
        return self.m.labels

    @property
    def context(self):
        return self.m.context


def trivial_isotopy(m: OperatorSystem) -> PseudoIsotopy:
    lifted = m.map_coefficients(lift)
    c = OperatorSystem(m.source, m.target, m.labels, m.context, {}, base_degree=1, known=None)
    return PseudoIsotopy(lifted, c)


def restrict(M: PseudoIsotopy, s0) -> OperatorSystem:
    """m^{s0} by polynomial evaluation."""
    s0 = parse_rational(s0)
    if s0 < 0 or s0 > 1:
        raise ValueError("restriction parameter must lie in [0, 1]")
    return M.m.map_coefficients(lambda p: at(p, s0))


def insertion_component(g: OperatorSystem, h: OperatorSystem, k: int, beta, cache=None):
    """sum g_{l+m+1} o (id^l x h_n x id^m) with no signs."""
    return star_component(g, h, k, beta, cache=cache, twisted=False)


def flow_component(m: OperatorSystem, c: OperatorSystem, k: int, beta, cache=None):
    """(m o~ c - c * m)_{k,beta}: the right-hand side of d/ds m^s."""
    plain = insertion_component(m, c, k, beta, cache=cache)
    signed = star_component(c, m, k, beta, cache=cache)
    if plain is None or signed is None:
        return None
    result: Entries = {}
    add_entries(result, plain)
    add_entries(result, signed, -1)
    return result


def _located(report: VerificationReport, label: str, k, beta, difference: Entries, space):
    inputs = min(difference)
    output = min(difference[inputs])
    poly = lift(difference[inputs][output])
    powers = [p for p, v in enumerate(coefficients_of(poly)) if v]
    names = ",".join(space.names[i] for i in inputs)
    report.fail(label, f"inputs ({names}) -> {space.names[output]}: s-powers {powers} do not cancel", k, beta)


def check_isotopy(M: PseudoIsotopy) -> VerificationReport:
    """Conditions (a) through (e) as polynomial identities in s."""
    report = VerificationReport(name="isotopy", metadata=M.context.describe())
    zero = M.m.zero_class
    degrees = VerificationReport(name="(a)", checked=1)
    try:
        if M.m.base_degree != 2 or M.c.base_degree != 1:
            raise DegreeError("m^s needs base degree 2 and c^s base degree 1")
        M.m.check_degrees()
        M.c.check_degrees()
    except DegreeError as e:
        degrees.fail("(a)", str(e))
    report.merge(degrees)
    if not degrees.passed:
        return report
    ainf = check_ainf(M.m)
    for failure in ainf.failures:
        failure.label = f"(b) {failure.label}"
    report.merge(ainf)
    gapped = VerificationReport(name="(c)", checked=1)
    if M.c.components.get((1, zero)):
        gapped.fail("(c)", "c_1,0 is the derivative and must not be stored", 1, zero)
    report.merge(gapped)
    constant_differential = VerificationReport(name="(d)", checked=1)
    for inputs, row in (M.m.get(1, zero) or {}).items():
        for output, coef in row.items():
            if lift(coef).degree(S) > 0:
                constant_differential.fail("(d)", f"m_1,0 depends on s at {M.space.names[output]}", 1, zero)
    report.merge(constant_differential)
    flow = VerificationReport(name="(e)")
    cache = _FactorCache()
    derivative = M.m.map_coefficients(lambda p: lift(p).diff(S))
    for k, beta in M.m.keys():
        rhs = flow_component(M.m, M.c, k, beta, cache=cache)
        if rhs is None:
            flow.skipped += 1
            continue
        flow.checked += 1
        difference: Entries = {}
        add_entries(difference, derivative.get(k, beta) or {})
        add_entries(difference, rhs, -1)
        if difference:
            _located(flow, "(e)", k, beta, difference, M.space)
    report.merge(flow)
    return report


def _identity_entries(space, one=None) -> Entries:
    one = R.one if one is None else one
    return {(i,): {i: one} for i in range(space.dim)}


def symbolic_integral(M: PseudoIsotopy) -> OperatorSystem:
    """C^{[lo,hi]} with coefficients in QQ[s, lo, hi] (s absent)."""
    if "C" in M._symbolic:
        return M._symbolic["C"]
    zero = M.m.zero_class
    space = M.space
    identity = {(1, zero): _identity_entries(space)}
    C = OperatorSystem(space, space, M.labels, M.context, dict(identity), base_degree=1, known=[(1, zero)])
    C_upper = OperatorSystem(space, space, M.labels, M.context, dict(identity), base_degree=1, known=[(1, zero)])
    cache = _FactorCache()
    for beta in C.support:
        for k in range(M.context.length_cutoff + 1):
            if (k, beta) in ((0, zero), (1, zero)):
                continue
            integrand = compose_component(M.c, C_upper, k, beta, skip_outer=[(1, zero)], cache=cache)
            if integrand is None:
                continue
            value: Entries = {}
            for inputs, row in integrand.items():
                for output, coef in row.items():
                    anti = antiderivative_s(coef)
                    definite = anti.compose(S, HI) - anti.compose(S, LO)
                    if definite:
                        value.setdefault(inputs, {})[output] = -definite
            C.known.add((k, beta))
            C_upper.known.add((k, beta))
            if value:
                C.components[(k, beta)] = value
                C_upper.components[(k, beta)] = {
                    inputs: {o: coef.compose(HI, S) for o, coef in row.items()} for inputs, row in value.items()
                }
    result = OperatorSystem(space, space, M.labels, M.context, C.components, base_degree=1, known=C.known)
    logger.info(f"Integrated isotopy: {len(result.components)} nonzero components of C")
    M._symbolic["C"] = result
    return result


def integrate(M: PseudoIsotopy, a, b) -> OperatorSystem:
    """
    The homomorphism C^{[a,b]} from m^a to m^b.

    C_{1,0} = id and otherwise
    C_{k,beta} = -int_a^b sum c^u_{l,b0} o (C^{[a,u]} x .. x C^{[a,u]}) du over (l, b0) != (1, 0).
    """
    a, b = parse_rational(a), parse_rational(b)
    if a > b:
        raise ValueError("integration needs a <= b")
    symbolic = symbolic_integral(M)
    substitution = [(LO, R(a)), (HI, R(b))]
    return symbolic.map_coefficients(lambda p: constant(lift(p).compose(substitution)))


def concat_check(M: PseudoIsotopy, a, b, c) -> VerificationReport:
    """C^{[b,c]} o C^{[a,b]} = C^{[a,c]} exactly."""
    report = VerificationReport(name="concatenation", metadata={"a": str(a), "b": str(b), "c": str(c)})
    first = integrate(M, a, b)
    second = integrate(M, b, c)
    whole = integrate(M, a, c)
    composite = compose(second, first)
    for key in whole.keys():
        mine = composite.get(*key)
        if mine is None:
            report.skipped += 1
            continue
        report.checked += 1
        mismatch = first_difference(mine, whole.get(*key))
        if mismatch is not None:
            report.fail("concatenation", f"{mismatch[2]} != {mismatch[3]}", key[0], key[1])
    return report


def derivative_check(M: PseudoIsotopy) -> VerificationReport:
    """
    d/ds C^{[s,1]} = sum C^{[s,1]}_{i+j+1} o (id^i x c^s x id^j) over c-components other than (1, 0).
    """
    report = VerificationReport(name="derivative")
    symbolic = symbolic_integral(M)
    lower = symbolic.map_coefficients(lambda p: lift(p).compose([(LO, S), (HI, R.one)]))
    derivative = lower.map_coefficients(lambda p: lift(p).diff(S))
    cache = _FactorCache()
    for k, beta in lower.keys():
        rhs = insertion_component(lower, M.c, k, beta, cache=cache)
        lhs = derivative.get(k, beta)
        if rhs is None or lhs is None:
            report.skipped += 1
            continue
        report.checked += 1
        difference: Entries = {}
        add_entries(difference, lhs)
        add_entries(difference, rhs, -1)
        if difference:
            _located(report, "derivative", k, beta, difference, M.space)
    return report


def _in_variable(poly, target_ring, variable):
    """Re-expresses a polynomial in s as a polynomial in ``variable``."""
    result = target_ring.zero
    for power, c in enumerate(coefficients_of(poly)):
        if c:
            result += target_ring(c) * variable**power
    return result


def tree_operator(M: PseudoIsotopy, tree, target_ring, gens) -> Entries:
    """Composite of c^{tau(v)} along the tree, coefficients in the tau ring."""
    counter = [0]
    space = M.space

    def build(node):
        if node.is_leaf:
            return _identity_entries(space, target_ring.one)
        vertex = counter[0]
        counter[0] += 1
        children = [build(child) for child in node.children]
        outer = M.c.get(len(node.children), node.beta) or {}
        variable = gens[vertex]
        mapped = {
            inputs: {o: _in_variable(c, target_ring, variable) for o, c in row.items()}
            for inputs, row in outer.items()
        }
        return plug(mapped, [pull_back(child) for child in children])

    return build(tree)


def tree_integral_crosscheck(M: PseudoIsotopy, k: int, beta, a=0, b=1) -> VerificationReport:
    """Compares the inductive integral with the sum over decorated trees and time allocations."""
    beta = tuple(beta)
    report = VerificationReport(name="tree integral", metadata={"k": k, "beta": list(beta)})
    expected = integrate(M, a, b).get(k, beta)
    if expected is None:
        report.skipped += 1
        return report
    total: Entries = {}
    trees = enumerate_trees(k, beta, M.m.support)
    for tree in trees:
        polytope = AllocationPolytope.of_tree(tree, a, b)
        if tree.is_leaf:
            add_entries(total, {(i,): {i: QQ.one} for i in range(M.space.dim)})
            continue
        target_ring, *gens = polytope.polynomial_ring()
        operator = tree_operator(M, tree, target_ring, gens)
        sign = (-1) ** tree.interior_count
        for inputs, row in operator.items():
            for output, coef in row.items():
                value = polytope.integrate(coef)
                if value:
                    add_entries(total, {inputs: {output: value * sign}})
    report.checked += 1
    report.metadata["trees"] = len(trees)
    mismatch = first_difference(total, expected)
    if mismatch is not None:
        report.fail("tree integral", f"{mismatch[2]} != {mismatch[3]}", k, beta)
    return report


def deformation_isotopy(m: OperatorSystem, c: OperatorSystem, max_order: int = 32) -> PseudoIsotopy:
    """
    The family m^s = sum_n s^n / n! L^n(m) for an s-independent c, L(x) = x o~ c - c * x.

    L raises energy or arity, so the sum stops at the truncation. Components
    whose flow needs an arity beyond the length cutoff stay unknown.
    """
    term = m
    total: dict = {key: {inputs: {o: lift(v) for o, v in row.items()} for inputs, row in entries.items()}
                   for key, entries in m.components.items()}
    known = set(m.keys())
    for order in range(1, max_order + 1):
        cache = _FactorCache()
        components = {}
        step_known = []
        for key in term.keys():
            value = flow_component(term, c, key[0], key[1], cache=cache)
            if value is None:
                continue
            step_known.append(key)
            if value:
                components[key] = value
        known &= set(step_known)
        term = term.with_components(components, known=step_known)
        logger.debug(f"deformation order {order}: {len(components)} nonzero components")
        if not components:
            break
        weight = factorial_inverse(order)
        for key, entries in components.items():
            scaled = {inputs: {o: lift(v) * weight * S**order for o, v in row.items()} for inputs, row in entries.items()}
            target = total.setdefault(key, {})
            add_entries(target, scaled)
            if not target:
                del total[key]
    family = m.with_components(total, known=known)
    lifted_c = c.map_coefficients(lift)
    return PseudoIsotopy(family, lifted_c)
