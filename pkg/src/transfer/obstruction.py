"""
Obstructions to extending partial homomorphisms.

Cochains are single multilinear components ``phi: C^{x k} -> C'`` stored as
``Entries``. The shifted degree of a component of arity k is
``p = deg(phi) + k - 1``; a homomorphism component has p = -mu(beta).
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from sympy import QQ

from src.algebra.operators import (
    OperatorSystem,
    _FactorCache,
    compose_component,
    star_component,
    twist_inputs,
)
from src.algebra.spaces import (
    Entries,
    add_entries,
    add_term,
    identity_factor,
    plug,
    pull_back,
)
from src.errors import ConditionError, DegreeError, PartialHomError
from src.novikov import factorial_inverse

logger = logging.getLogger(__name__)


def shifted_degree(phi: Entries, source, target) -> Optional[int]:
    """The common shifted degree of a component, None when it is zero."""
    found = set()
    for inputs, row in phi.items():
        for output in row:
            found.add(target.degree(output) - sum(source.degree(i) for i in inputs) + len(inputs) - 1)
    if len(found) > 1:
        raise DegreeError(f"cochain mixes shifted degrees {sorted(found)}")
    return found.pop() if found else None


def _family_degree(family: dict, source, target) -> Optional[int]:
    degrees = {shifted_degree(phi, source, target) for phi in family.values() if phi}
    degrees.discard(None)
    if len(degrees) > 1:
        raise DegreeError(f"cochain family mixes shifted degrees {sorted(degrees)}")
    return degrees.pop() if degrees else None


def _difference(a: Optional[Entries], b: Optional[Entries]) -> Optional[Entries]:
    if a is None or b is None:
        return None
    result: Entries = {}
    add_entries(result, a)
    add_entries(result, b, -1)
    return result


def bar_differential(
    phi: Entries, k: int, m_out: OperatorSystem, m_in: OperatorSystem, p: Optional[int] = None
) -> Entries:
    """
    m_out_{1,0} o phi - (-1)^p sum_i phi o (id_#^i x m_in_{1,0} x id^{k-i-1}).
    """
    if p is None:
        p = shifted_degree(phi, m_in.source, m_out.target)
    if not phi:
        return {}
    zero = m_out.zero_class
    result: Entries = {}
    outer = m_out.get(1, zero) or {}
    if outer:
        plug(outer, [pull_back(phi)], result)
    inner = m_in.get(1, zero) or {}
    if inner:
        space = m_in.source
        ident = identity_factor(space)
        twisted = identity_factor(space, twisted=True)
        factor = pull_back(inner)
        sign = -((-1) ** p)
        for i in range(k):
            plug(phi, [twisted] * i + [factor] + [ident] * (k - i - 1), result, sign)
    return result


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if total < parts:
        return
    for cut in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cut + (total,)
        yield tuple(bounds[j + 1] - bounds[j] for j in range(parts))


def twisted_differential(
    g: OperatorSystem, phi: dict, m_out: OperatorSystem, m_in: OperatorSystem, p: Optional[int] = None
) -> dict:
    """
    The differential on a class-beta family phi = {k: phi_k} twisted by g mod T^{E>0}.

    First sum: m_out_{l,0} o (g^#p x .. x g^#p x phi_{k_i} x g x .. x g).
    Second sum: -(-1)^p phi_{l+m+1} o (id_#^l x m_in_{n,0} x id^m).
    """
    if p is None:
        p = _family_degree(phi, m_in.source, m_out.target)
    if p is None:
        return {}
    zero = g.zero_class
    K = g.context.length_cutoff
    space = m_in.source
    plain = {}
    twisted = {}
    for j in range(1, K + 1):
        component = g.get(j, zero)
        if component is None:
            raise ConditionError(f"g_{j},0 is unknown")
        if component:
            plain[j] = pull_back(component)
            twisted[j] = pull_back(twist_inputs(component, space, p))
    pulled = {k: pull_back(v) for k, v in phi.items() if v}
    ident = identity_factor(space)
    sharp = identity_factor(space, twisted=True)
    result: dict = {}
    for k in range(K + 1):
        value: Entries = {}
        for ell in range(1, K + 1):
            outer = m_out.get(ell, zero)
            if not outer:
                continue
            for position in range(ell):
                for k_phi, factor in pulled.items():
                    rest = k - k_phi
                    if rest < ell - 1:
                        continue
                    for arities in _compositions(rest, ell - 1):
                        before, after = arities[:position], arities[position:]
                        if any(a not in plain for a in arities):
                            continue
                        factors = [twisted[a] for a in before] + [factor] + [plain[a] for a in after]
                        plug(outer, factors, value)
        sign = -((-1) ** p)
        for nu in range(1, k + 1):
            inner = m_in.get(nu, zero)
            if not inner:
                continue
            inner_factor = pull_back(inner)
            for lam in range(k - nu + 1):
                mu = k - nu - lam
                target = phi.get(lam + mu + 1)
                if not target:
                    continue
                plug(target, [sharp] * lam + [inner_factor] + [ident] * mu, value, sign)
        if value:
            result[k] = value
    return result


@dataclass
class Obstruction:
    """An obstruction cochain together with its closedness check."""

    value: object
    closed: bool
    level: tuple
    determined: tuple = ()


def _restricted(g: OperatorSystem, drop, known_extra) -> OperatorSystem:
    components = {key: v for key, v in g.components.items() if not drop(key)}
    known = [key for key in g.keys() if not drop(key)] + list(known_extra)
    return g.with_components(components, known=known)


def _defect(g: OperatorSystem, m_src: OperatorSystem, m_tgt: OperatorSystem, k: int, beta, cache) -> Optional[Entries]:
    return _difference(
        compose_component(m_tgt, g, k, beta, cache=cache), star_component(g, m_src, k, beta, cache=cache)
    )


def obstruction_length(m_src: OperatorSystem, m_tgt: OperatorSystem, g: OperatorSystem, k: int) -> Obstruction:
    """
    o_k = (m_tgt o g - g * m_src)_{k,0} with g_{k,0} set to zero.

    Raises PartialHomError when the relation already fails below arity k.
    """
    zero = g.zero_class
    partial = _restricted(
        g, lambda key: key[1] == zero and key[0] >= k, [(j, zero) for j in range(k, g.context.length_cutoff + 1)]
    )
    cache = _FactorCache()
    for j in range(1, k):
        defect = _defect(partial, m_src, m_tgt, j, zero, cache)
        if defect is None:
            raise ConditionError(f"partial homomorphism undetermined at arity {j}")
        if defect:
            raise PartialHomError(f"the homomorphism relation fails at ({j}, 0)")
    value = _defect(partial, m_src, m_tgt, k, zero, cache)
    if value is None:
        raise ConditionError(f"obstruction undetermined at arity {k}")
    closed = not bar_differential(value, k, m_tgt, m_src, p=1)
    if not closed:
        logger.warning(f"o_{k} is not closed for the bar differential")
    return Obstruction(value, closed, (k, zero), (k,))


def obstruction_energy(m_src: OperatorSystem, m_tgt: OperatorSystem, g: OperatorSystem, beta) -> Obstruction:
    """
    o_beta = {k: (m_tgt o g - g * m_src)_{k,beta}} with every g_{*,beta} set to zero.

    Arities the truncation leaves undetermined are skipped; ``determined``
    lists the others. Raises PartialHomError when the relation fails on a
    class below beta.
    """
    beta = tuple(beta)
    K = g.context.length_cutoff
    partial = _restricted(g, lambda key: key[1] == beta, [(j, beta) for j in range(K + 1)])
    cache = _FactorCache()
    for lower, rest in g.support.splits(beta):
        if lower == beta:
            continue
        for j in range(K + 1):
            defect = _defect(partial, m_src, m_tgt, j, lower, cache)
            if defect:
                raise PartialHomError(f"the homomorphism relation fails at ({j}, {list(lower)})")
    value = {}
    determined = []
    for j in range(K + 1):
        if (j, beta) == (0, g.zero_class):
            continue
        defect = _defect(partial, m_src, m_tgt, j, beta, cache)
        if defect is None:
            logger.debug(f"o_beta undetermined at ({j}, {list(beta)})")
            continue
        determined.append(j)
        if defect:
            value[j] = defect
    mu = g.labels.maslov_of(beta)
    residual = twisted_differential(partial, value, m_tgt, m_src, p=1 - mu)
    # the differential at arity j reads the obstruction at every arity up to j
    reliable = itertools.takewhile(lambda j: j in determined or (j, beta) == (0, g.zero_class), range(K + 1))
    closed = not any(residual.get(j) for j in reliable)
    if not closed:
        logger.warning(f"o_beta for {list(beta)} is not closed for the twisted differential")
    return Obstruction(value, closed, (None, beta), tuple(determined))


def _cap_factor(space, labels, beta, i):
    """(db, x) for a basis element: the cap product on divisor inputs, else zero."""
    cls = space.divisor_class(i)
    if cls is None:
        return 0
    return labels.cap(beta, cls)


def cyclic_power(u: Entries, n: int, m: int, beta, space, labels) -> Entries:
    """
    u^{(m)}_N(x_1..x_N) = sum_i u(x_{i+1}, .., x_{i+N-m}) (db, x_{i+N-m+1}) .. (db, x_{i+N}).

    Indices are taken mod N and ``u`` has arity N - m.
    """
    divisors = [(i, _cap_factor(space, labels, beta, i)) for i, _ in space.divisors]
    divisors = [(i, c) for i, c in divisors if c]
    result: Entries = {}
    if not divisors:
        return result
    for start in range(n):
        block_positions = [(start + j) % n for j in range(n - m)]
        rest_positions = [(start + n - m + j) % n for j in range(m)]
        for inputs, row in u.items():
            for choice in itertools.product(divisors, repeat=m):
                full = [None] * n
                for pos, i in zip(block_positions, inputs):
                    full[pos] = i
                factor = 1
                for pos, (i, c) in zip(rest_positions, choice):
                    full[pos] = i
                    factor *= c
                for output, coef in row.items():
                    add_term(result, tuple(full), output, coef * factor)
    return result


def divisor_insertions(u: Entries, space) -> dict:
    """{b: u with one slot filled by the divisor b}, summed over slots."""
    result = {}
    for b, _ in space.divisors:
        inserted: Entries = {}
        for inputs, row in u.items():
            for pos, i in enumerate(inputs):
                if i == b:
                    rest = inputs[:pos] + inputs[pos + 1:]
                    for output, c in row.items():
                        add_term(inserted, rest, output, c)
        result[b] = inserted
    return result


def cyclic_insertions(u: Entries, space) -> dict:
    """{e: signed cyclic insertion of e} for every degree-zero element e."""
    result = {}
    for e in space.degree_zero():
        inserted: Entries = {}
        for inputs, row in u.items():
            sign = 1
            for pos, i in enumerate(inputs):
                if i == e:
                    rest = inputs[:pos] + inputs[pos + 1:]
                    for output, c in row.items():
                        add_term(inserted, rest, output, c * sign)
                sign *= space.sharp(i)
        result[e] = inserted
    return result


def divisor_relation_holds(u_k: Entries, u_next: Entries, beta, space, labels) -> bool:
    """(E1): inserting any divisor b into u_{k+1} gives (db cap b) u_k."""
    classes = dict(space.divisors)
    for b, inserted in divisor_insertions(u_next, space).items():
        add_entries(inserted, u_k, -labels.cap(beta, classes[b]))
        if inserted:
            return False
    return True


def cyclic_unit_holds(u: Entries, space) -> bool:
    """(E2): the signed cyclic insertion of every degree-zero element vanishes."""
    return not any(cyclic_insertions(u, space).values())


def unit_vanishes(u: Entries, space) -> bool:
    """(E3): no input slot accepts the unit."""
    if space.one is None:
        return True
    return not any(space.one in inputs for inputs in u)


def corrector_terms(us: list, beta, space, labels) -> Entries:
    """
    (1/N) sum_{m=1..N} ((-1)^{m-1} / m!) u^{(m)}_N for N = len(us).

    Linear in ``us``; no hypotheses are checked.
    """
    n = len(us)
    result: Entries = {}
    for m in range(1, n + 1):
        coefficient = QQ(1, n) * factorial_inverse(m) * (-1) ** (m - 1)
        add_entries(result, cyclic_power(us[n - m], n, m, beta, space, labels), coefficient)
    return result


def cyclic_corrector(us: list, beta, space, labels) -> Entries:
    """
    The next component of a cyclically unital family satisfying the divisor relation.

    Args:
        us: [u_0, .., u_k] with (E1) for consecutive pairs and (E2), (E3) for each
        beta: a nonzero class; space, labels: the input space and label group

    Raises:
        ConditionError: when a hypothesis fails
    """
    if not any(beta):
        raise ConditionError("the corrector needs a nonzero class")
    for i, u in enumerate(us):
        if not cyclic_unit_holds(u, space) or not unit_vanishes(u, space):
            raise ConditionError(f"u_{i} is not cyclically unital")
        if i and not divisor_relation_holds(us[i - 1], u, beta, space, labels):
            raise ConditionError(f"(u_{i - 1}, u_{i}) fails the divisor relation")
    return corrector_terms(us, beta, space, labels)
