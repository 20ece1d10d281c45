"""Canonical models: transfer of an A-infinity structure along a contraction."""

import logging

from src.algebra.checks import check_ainf
from src.algebra.operators import OperatorSystem, _FactorCache, compose_component
from src.algebra.spaces import apply_linear
from src.errors import ConditionError
from src.transfer.contraction import Contraction

logger = logging.getLogger(__name__)


def canonical_model(m: OperatorSystem, con: Contraction, require_ainf: bool = False):
    """
    Sums over decorated trees through the inductive formulas.

    For (k, beta) other than (0, 0) and (1, 0), with S the sum of
    m_{l,b0} o (i_can x ... x i_can) over (l, b0) != (1, 0):
    i_can_{k,beta} = G o S and m_can_{k,beta} = pi o S.

    Returns:
        (m_can, i_can) where i_can is a homomorphism from m_can to m
    """
    m.source.require_same(con.complex, "algebra and contraction")
    if require_ainf:
        report = check_ainf(m)
        if not report.passed:
            raise ConditionError(f"input is not an A-infinity algebra: {report.summary()}")
    zero = m.zero_class
    i_components = {(1, zero): con.i}
    m_components = {(1, zero): con.d_model} if con.d_model else {}
    known = [(1, zero)]
    i_can = OperatorSystem(con.model, con.complex, m.labels, m.context, i_components, 1, known=known)
    m_known = [(1, zero)]
    cache = _FactorCache()
    for beta in m.support:
        for k in range(m.context.length_cutoff + 1):
            if (k, beta) in ((0, zero), (1, zero)):
                continue
            total = compose_component(m, i_can, k, beta, skip_outer=[(1, zero)], cache=cache)
            if total is None:
                logger.debug(f"canonical model undetermined at ({k}, {beta})")
                continue
            i_part = apply_linear(con.homotopy, total) if total else {}
            m_part = apply_linear(con.pi, total) if total else {}
            i_can.known.add((k, beta))
            if i_part:
                i_can.components[(k, beta)] = i_part
            m_known.append((k, beta))
            if m_part:
                m_components[(k, beta)] = m_part
    m_can = OperatorSystem(con.model, con.model, m.labels, m.context, m_components, 2, known=m_known)
    i_can = OperatorSystem(con.model, con.complex, m.labels, m.context, i_can.components, 1, known=i_can.known)
    logger.info(
        f"canonical model: {len(m_can.components)} nonzero components, "
        f"{len(i_can.components)} in the transfer map"
    )
    return m_can, i_can
