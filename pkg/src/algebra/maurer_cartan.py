"""Maurer-Cartan evaluation of divisor inputs."""

import logging
from typing import Mapping

from src.algebra.operators import OperatorSystem
from src.algebra.spaces import evaluate
from src.errors import ConditionError, DomainError
from src.novikov import NovikovNum, TruncationContext

logger = logging.getLogger(__name__)


def _check_input(b: Mapping[int, NovikovNum], strict: bool = True):
    for i, value in b.items():
        if value.is_zero():
            continue
        if strict and value.valuation() <= 0:
            raise DomainError(f"coordinate {i} of b has valuation {value.valuation()}; exact mode needs > 0")
        if value.valuation() < 0:
            raise DomainError(f"coordinate {i} of b has negative valuation")


def cap_with(m: OperatorSystem, beta, b: Mapping[int, NovikovNum], context: TruncationContext) -> NovikovNum:
    """The cap product of the boundary of beta with b = sum b_i theta_i."""
    total = NovikovNum.zero(context)
    for i, value in b.items():
        vec = m.source.divisor_class(i)
        if vec is None:
            raise DomainError(f"basis element {m.source.names[i]} is not a divisor input")
        total = total + value * m.labels.cap(beta, vec)
    return total


def mc_eval(m: OperatorSystem, b: Mapping[int, NovikovNum], cross_check: bool = True) -> dict:
    """
    m_*(b) = sum_beta T^E(beta) exp(db cap b) m_{0,beta}, truncated.

    When the direct double sum over (k, beta) is finite at the truncation, it
    is evaluated as well and must agree.

    Returns:
        {target basis index: NovikovNum}
    """
    context = _context_of(m, b)
    _check_input(b)
    result: dict = {}
    for beta in m.support:
        m0 = m.get(0, beta)
        if not m0:
            continue
        weight = cap_with(m, beta, b, context).exp_plus().shift(m.labels.energy_of(beta))
        for output, c in evaluate(m0, []).items():
            result[output] = result.get(output, NovikovNum.zero(context)) + weight * c
    result = {i: v for i, v in result.items() if not v.is_zero()}
    if cross_check and direct_sum_is_finite(m, b):
        direct = mc_direct(m, b)
        if direct != result:
            raise ConditionError("divisor-axiom form of m_*(b) disagrees with the direct sum")
    return result


def _context_of(m: OperatorSystem, b: Mapping[int, NovikovNum]) -> TruncationContext:
    for value in b.values():
        return value.context
    return TruncationContext(m.context.energy_cutoff, m.context.length_cutoff)


def direct_sum_is_finite(m: OperatorSystem, b: Mapping[int, NovikovNum]) -> bool:
    """True when every term with k > K_max vanishes at the truncation."""
    values = [v.valuation() for v in b.values() if not v.is_zero()]
    if not values:
        return True
    v = min(values)
    return v * (m.context.length_cutoff + 1) >= m.context.energy_cutoff


def mc_direct(m: OperatorSystem, b: Mapping[int, NovikovNum]) -> dict:
    """sum over (k, beta) of T^E(beta) m_{k,beta}(b, ..., b) for k up to K_max."""
    return push_divisor(m, b)


def push_divisor(f: OperatorSystem, b: Mapping[int, NovikovNum]) -> dict:
    """
    f_*(b) = sum_{k, beta} T^E(beta) f_{k,beta}(b, ..., b).

    Unknown components raise ConditionError; the caller is responsible for
    the truncation making the sum finite.
    """
    context = _context_of(f, b)
    vector = {i: v for i, v in b.items() if not v.is_zero()}
    result: dict = {}
    for beta in f.support:
        shift = f.labels.energy_of(beta)
        for k in range(f.context.length_cutoff + 1):
            entries = f.get(k, beta)
            if entries is None:
                raise ConditionError(f"component ({k}, {beta}) is unknown")
            if not entries:
                continue
            for output, value in evaluate(entries, [vector] * k, NovikovNum.zero(context)).items():
                if not isinstance(value, NovikovNum):
                    value = NovikovNum.constant(context, value)
                result[output] = result.get(output, NovikovNum.zero(context)) + value.shift(shift)
    return {i: v for i, v in result.items() if not v.is_zero()}


def weak_mc_potential(m: OperatorSystem, b: Mapping[int, NovikovNum]):
    """
    Splits m_*(b) = a * 1 + rest.

    Returns:
        (a, rest) where ``rest`` vanishes exactly when b is a weak bounding cochain
    """
    value = mc_eval(m, b, cross_check=False)
    one = m.target.one
    context = _context_of(m, b)
    a = value.pop(one, NovikovNum.zero(context)) if one is not None else NovikovNum.zero(context)
    return a, value


def is_weak_bounding_cochain(m: OperatorSystem, b: Mapping[int, NovikovNum]) -> bool:
    _, rest = weak_mc_potential(m, b)
    return not rest
