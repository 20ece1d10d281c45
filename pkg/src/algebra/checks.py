"""Checkers for the A-infinity relations, unitality, cyclical unitality and the divisor axiom."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

from src.algebra.operators import OperatorSystem, compose_component, star_component, _FactorCache
from src.algebra.reports import VerificationReport
from src.algebra.spaces import Entries, GradedSpace, add_entries, add_term, first_difference
from src.errors import DegreeError, MissingBoundaryMap
from src.novikov import factorial_inverse, format_rational

logger = logging.getLogger(__name__)


def run_per_key(keys: list, fn: Callable, threads: int = 1) -> list:
    """Maps ``fn`` over keys, in parallel when asked; results keep key order."""
    if threads <= 1 or len(keys) < 2:
        return [fn(key) for key in keys]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, keys))


def _describe(space_in: GradedSpace, space_out: GradedSpace, mismatch) -> str:
    inputs, output, got, want = mismatch
    names = ",".join(space_in.names[i] for i in inputs)
    return f"inputs ({names}) -> {space_out.names[output]}: {got} != {want}"


def _metadata(system: OperatorSystem) -> dict:
    return {
        "energy_cutoff": format_rational(system.context.energy_cutoff),
        "length_cutoff": system.context.length_cutoff,
    }


def check_ainf(m: OperatorSystem, threads: int = 1) -> VerificationReport:
    """Checks m * m = 0 on every determined (k, beta)."""
    m.source.require_same(m.target, "source and target of an A-infinity algebra")
    m.check_degrees()
    report = VerificationReport(name="ainf", metadata=_metadata(m))

    def level(key):
        cache = _FactorCache()
        return key, star_component(m, m, key[0], key[1], cache=cache)

    keys = [(k, beta) for beta in m.support for k in range(m.context.length_cutoff + 1)]
    for (k, beta), value in run_per_key(keys, level, threads):
        if value is None:
            report.skipped += 1
            continue
        report.checked += 1
        if value:
            report.fail("A-infinity relation", _describe(m.source, m.target, first_difference(value, {})), k, beta)
    return report


def check_hom(
    f: OperatorSystem, m_src: OperatorSystem, m_tgt: OperatorSystem, threads: int = 1
) -> VerificationReport:
    """Checks m_tgt o f = f * m_src on every determined (k, beta)."""
    f.source.require_same(m_src.source, "source of f and source algebra")
    f.target.require_same(m_tgt.source, "target of f and target algebra")
    if f.base_degree is not None and f.base_degree != 1:
        raise DegreeError("a homomorphism has base degree 1")
    f.check_degrees()
    report = VerificationReport(name="hom", metadata=_metadata(f))

    def level(key):
        cache = _FactorCache()
        lhs = compose_component(m_tgt, f, key[0], key[1], cache=cache)
        rhs = star_component(f, m_src, key[0], key[1], cache=cache)
        return key, lhs, rhs

    keys = [(k, beta) for beta in f.support for k in range(f.context.length_cutoff + 1)]
    for (k, beta), lhs, rhs in run_per_key(keys, level, threads):
        if lhs is None or rhs is None:
            report.skipped += 1
            continue
        report.checked += 1
        mismatch = first_difference(lhs, rhs)
        if mismatch is not None:
            report.fail("homomorphism relation", _describe(f.source, f.target, mismatch), k, beta)
    return report


def _inserted(entries: Entries, position_ok: Callable[[int], bool]) -> bool:
    return any(any(position_ok(i) for i in inputs) for inputs in entries)


def check_unit(m: OperatorSystem, e: Optional[int] = None) -> VerificationReport:
    """Strict unitality (a0), (a1), (a2) for the unit ``e``."""
    space = m.source
    e = space.one if e is None else e
    report = VerificationReport(name="unit", metadata=_metadata(m))
    if e is None:
        return report.fail("(a0)", "no unit declared")
    if space.degree(e) != 0:
        raise DegreeError(f"candidate unit {space.names[e]} has degree {space.degree(e)}")
    zero = m.zero_class
    m10 = m.get(1, zero) or {}
    report.checked += 1
    if (e,) in m10:
        report.fail("(a0)", f"m_1,0({space.names[e]}) != 0", 1, zero)
    m20 = m.get(2, zero)
    if m20 is None:
        report.skipped += 1
    else:
        for x in range(space.dim):
            report.checked += 1
            left = m20.get((e, x), {})
            right = {o: c * (-1) ** space.degree(x) for o, c in m20.get((x, e), {}).items()}
            if left != {x: 1} or right != {x: 1}:
                report.fail("(a1)", f"m_2,0 with {space.names[x]} is not the identity", 2, zero)
    for (k, beta) in m.keys():
        if (k, beta) in ((1, zero), (2, zero)) or k == 0:
            continue
        report.checked += 1
        if _inserted(m.get(k, beta), lambda i: i == e):
            report.fail("(a2)", f"m_{k},beta does not vanish on the unit", k, beta)
    return report


def check_full_unit(m: OperatorSystem) -> VerificationReport:
    """(a2') for every degree-zero basis element."""
    space = m.source
    zero = m.zero_class
    report = VerificationReport(name="full unit", metadata=_metadata(m))
    degree_zero = set(space.degree_zero())
    for (k, beta) in m.keys():
        if (k, beta) in ((1, zero), (2, zero)) or k == 0:
            continue
        report.checked += 1
        if _inserted(m.get(k, beta), lambda i: i in degree_zero):
            report.fail("(a2')", "component does not vanish on a degree-zero input", k, beta)
    return report


def cyclic_insertion(t: OperatorSystem, k: int, beta, e: int) -> Optional[Entries]:
    """CU[t]_{k,beta}(e; x) = sum_i t_{k+1,beta}(x_1^#, .., x_{i-1}^#, e, x_i, .., x_k)."""
    entries = t.get(k + 1, beta)
    if entries is None:
        return None
    space = t.source
    result: Entries = {}
    for inputs, row in entries.items():
        sign = 1
        for pos, i in enumerate(inputs):
            if i == e:
                rest = inputs[:pos] + inputs[pos + 1:]
                for output, c in row.items():
                    add_term(result, rest, output, c * sign)
            sign *= space.sharp(i)
    return result


def check_cyclic_unit(t: OperatorSystem) -> VerificationReport:
    """CU[t]_{k,beta}(e; ...) = 0 for (k, beta) != (0, 0) and every degree-zero e."""
    report = VerificationReport(name="cyclic unit", metadata=_metadata(t))
    zero = t.zero_class
    for beta in t.support:
        for k in range(t.context.length_cutoff):
            if (k, beta) == (0, zero):
                continue
            for e in t.source.degree_zero():
                value = cyclic_insertion(t, k, beta, e)
                if value is None:
                    report.skipped += 1
                    continue
                report.checked += 1
                if value:
                    mismatch = first_difference(value, {})
                    report.fail("CU", f"e={t.source.names[e]}; " + _describe(t.source, t.target, mismatch), k, beta)
    return report


def check_hom_unit(f: OperatorSystem) -> VerificationReport:
    """Unitality of a homomorphism: (b1) f_1,0(1) = 1 and (b2)."""
    report = VerificationReport(name="hom unit", metadata=_metadata(f))
    src_one, tgt_one = f.source.one, f.target.one
    if src_one is None or tgt_one is None:
        return report.fail("(b1)", "source or target has no unit")
    zero = f.zero_class
    f10 = f.get(1, zero) or {}
    report.checked += 1
    if f10.get((src_one,), {}) != {tgt_one: 1}:
        report.fail("(b1)", "f_1,0(1) != 1", 1, zero)
    for (k, beta) in f.keys():
        if (k, beta) == (1, zero) or k == 0:
            continue
        report.checked += 1
        if _inserted(f.get(k, beta), lambda i: i == src_one):
            report.fail("(b2)", "component does not vanish on the unit", k, beta)
    return report


def divisor_insertion(t: OperatorSystem, k: int, beta, b: int, multiplicity: int = 1) -> Optional[Entries]:
    """Sum of t_{k+m,beta} over all placements of m copies of the divisor input b."""
    entries = t.get(k + multiplicity, beta)
    if entries is None:
        return None
    result: Entries = {}
    for inputs, row in entries.items():
        slots = [pos for pos, i in enumerate(inputs) if i == b]
        for chosen in itertools.combinations(slots, multiplicity):
            rest = tuple(i for pos, i in enumerate(inputs) if pos not in chosen)
            for output, c in row.items():
                add_term(result, rest, output, c)
    return result


def _require_boundary(t: OperatorSystem):
    n = t.labels.dimension
    for _, vec in t.source.divisors:
        if len(vec) != n:
            raise MissingBoundaryMap(f"divisor class {vec} does not pair with boundaries in Z^{n}")


def check_divisor_axiom(t: OperatorSystem, multiplicity: int = 1) -> VerificationReport:
    """
    DA[t]_{k,beta}(b; x) = (db cap b) t_{k,beta}(x) for every divisor input b.

    With ``multiplicity`` m the m-fold insertion is compared with
    (db cap b)^m / m! times t_{k,beta}.
    """
    _require_boundary(t)
    report = VerificationReport(name="divisor axiom" if multiplicity == 1 else f"divisor axiom x{multiplicity}")
    report.metadata = _metadata(t)
    zero = t.zero_class
    for b, vec in t.source.divisors:
        for beta in t.support:
            cap = t.labels.cap(beta, vec)
            factor = cap ** multiplicity * factorial_inverse(multiplicity)
            for k in range(t.context.length_cutoff - multiplicity + 1):
                if (k, beta) == (0, zero):
                    continue
                lhs = divisor_insertion(t, k, beta, b, multiplicity)
                base = t.get(k, beta)
                if lhs is None or base is None:
                    report.skipped += 1
                    continue
                report.checked += 1
                rhs: Entries = {}
                add_entries(rhs, base, factor)
                mismatch = first_difference(lhs, rhs)
                if mismatch is not None:
                    detail = f"b={t.source.names[b]}, cap={cap}; " + _describe(t.source, t.target, mismatch)
                    report.fail("DA", detail, k, beta)
    return report


def _relabel(report: VerificationReport, prefix: str) -> VerificationReport:
    for failure in report.failures:
        failure.label = f"{prefix} {failure.label}"
    return report


def _maslov_support(system: OperatorSystem, label: str) -> VerificationReport:
    report = VerificationReport(name="maslov support")
    classes = set(system.labels.nonzero_support()) | system.support_classes()
    for beta in sorted(classes):
        report.checked += 1
        mu = system.labels.maslov_of(beta)
        if mu < 0:
            report.fail(label, f"class {list(beta)} has Maslov index {mu}", beta=beta)
    return report


def _degree_report(system: OperatorSystem) -> VerificationReport:
    report = VerificationReport(name="degree", checked=1)
    try:
        system.check_degrees()
    except DegreeError as e:
        report.fail("degree", str(e))
    return report


def check_ud_object(m: OperatorSystem, threads: int = 1) -> VerificationReport:
    """(I-0) through (I-5) for an A-infinity algebra on a point."""
    report = VerificationReport(name="ud object", metadata=_metadata(m))
    degrees = _degree_report(m)
    report.merge(degrees)
    if not degrees.passed:
        return report
    report.merge(_relabel(check_ainf(m, threads), "(A)"))
    zero = m.zero_class
    differential = VerificationReport(name="(I-0)", checked=1)
    mismatch = first_difference(m.get(1, zero) or {}, m.source.declared_differential())
    if mismatch is not None:
        differential.fail("(I-0)", "m_1,0 differs from the declared differential: " + _describe(m.source, m.target, mismatch))
    report.merge(differential)
    if m.source.one is None:
        report.merge(VerificationReport(name="(I-1)").fail("(I-1)", "missing unit"))
    else:
        report.merge(_relabel(check_unit(m), "(I-1)"))
    report.merge(_relabel(check_cyclic_unit(m), "(I-2)"))
    report.merge(_relabel(check_divisor_axiom(m), "(I-3)"))
    report.merge(VerificationReport(name="(I-4)", metadata={"note": "vacuous over a point"}))
    report.merge(_maslov_support(m, "(I-5)"))
    return report


def check_ud_morphism(
    f: OperatorSystem,
    m_src: Optional[OperatorSystem] = None,
    m_tgt: Optional[OperatorSystem] = None,
    threads: int = 1,
) -> VerificationReport:
    """(II-1) through (II-5), plus the homomorphism relation when the algebras are given."""
    report = VerificationReport(name="ud morphism", metadata=_metadata(f))
    degrees = _degree_report(f)
    report.merge(degrees)
    if not degrees.passed:
        return report
    if m_src is not None and m_tgt is not None:
        report.merge(_relabel(check_hom(f, m_src, m_tgt, threads), "(A)"))
    report.merge(_relabel(check_hom_unit(f), "(II-1)"))
    report.merge(_relabel(check_cyclic_unit(f), "(II-2)"))
    report.merge(_relabel(check_divisor_axiom(f), "(II-3)"))
    report.merge(_check_cap_preserved(f))
    report.merge(_maslov_support(f, "(II-5)"))
    return report


def divisor_class_of(space: GradedSpace, vector: dict, dimension: int) -> list:
    """Cohomology class of a vector, reading only declared divisor inputs."""
    total = [0] * dimension
    for i, c in vector.items():
        vec = space.divisor_class(i)
        if vec is None:
            continue
        total = [t + c * v for t, v in zip(total, vec)]
    return total


def _check_cap_preserved(f: OperatorSystem) -> VerificationReport:
    report = VerificationReport(name="(II-4)")
    f10 = f.get(1, f.zero_class) or {}
    generators = f.labels.nonzero_support()
    n = f.labels.dimension
    for b, vec in f.source.divisors:
        image = f10.get((b,), {})
        image_class = divisor_class_of(f.target, image, n)
        for beta in generators:
            report.checked += 1
            if f.labels.cap(beta, image_class) != f.labels.cap(beta, vec):
                report.fail("(II-4)", f"cap with f_1,0({f.source.names[b]}) changes", beta=beta)
    return report


def check_ud_membership(system: OperatorSystem, m_src=None, m_tgt=None, threads: int = 1) -> VerificationReport:
    """Dispatches on the base degree: 2 for objects, 1 for morphisms."""
    if system.base_degree == 1:
        return check_ud_morphism(system, m_src, m_tgt, threads)
    return check_ud_object(system, threads)
