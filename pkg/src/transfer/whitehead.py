"""
Homotopy inverses of quasi-isomorphic homomorphisms by exact linear solving.

The inverse g and a homotopy H from the identity to g o f are built together,
level by level: first along the length filtration on class zero, then along
the energy filtration over the support. Each level is one exact linear solve
over QQ.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from sympy import QQ

from src.algebra import linalg
from src.algebra.checks import _describe, _metadata, check_hom, check_ud_morphism, run_per_key
from src.algebra.operators import OperatorSystem, _FactorCache, compose_component, sequences, star_component
from src.algebra.reports import VerificationReport
from src.algebra.spaces import (
    Entries,
    GradedSpace,
    add_entries,
    add_term,
    apply_linear,
    first_difference,
    identity_factor,
    plug,
    pull_back,
)
from src.errors import ConditionError, Inconsistent, NotQuasiIso
from src.transfer.obstruction import (
    _compositions,
    bar_differential,
    corrector_terms,
    cyclic_corrector,
    cyclic_insertions,
    divisor_insertions,
    obstruction_energy,
    obstruction_length,
    twisted_differential,
)

logger = logging.getLogger(__name__)


class LinearSystem:
    """Sparse linear equations over QQ with hashable variable and row keys."""

    def __init__(self):
        self.variables: dict = {}
        self.rows: dict = {}
        self.rhs: dict = {}

    def variable(self, key) -> int:
        if key not in self.variables:
            self.variables[key] = len(self.variables)
        return self.variables[key]

    def add(self, row_key, var_key, coef):
        if not coef:
            return
        row = self.rows.setdefault(row_key, {})
        col = self.variable(var_key)
        value = row.get(col, QQ.zero) + coef
        if value:
            row[col] = value
        else:
            del row[col]

    def constant(self, row_key, value):
        self.rows.setdefault(row_key, {})
        self.rhs[row_key] = self.rhs.get(row_key, QQ.zero) + value

    def solve(self) -> Optional[dict]:
        """A solution {variable key: value} with free variables zero, or None."""
        row_keys = list(self.rows)
        rows = {r: self.rows[key] for r, key in enumerate(row_keys)}
        rhs = [self.rhs.get(key, QQ.zero) for key in row_keys]
        solution = linalg.solve_linear(rows, rhs, len(row_keys), len(self.variables))
        if solution is None:
            return None
        names = {col: key for key, col in self.variables.items()}
        return {names[col]: value for col, value in solution.items()}


def _flatten(cochain) -> dict:
    """Coordinates of a component (Entries) or a family {k: Entries}."""
    flat = {}
    if not cochain:
        return flat
    if all(isinstance(key, int) for key in cochain):
        for k, entries in cochain.items():
            for inputs, row in entries.items():
                for output, c in row.items():
                    if c:
                        flat[(k, inputs, output)] = c
    else:
        for inputs, row in cochain.items():
            for output, c in row.items():
                if c:
                    flat[(inputs, output)] = c
    return flat


def solve_coboundary(differential: Callable, target, basis: list):
    """
    Finds phi in the span of ``basis`` with differential(phi) = target.

    Basis items are (inputs, output) for single components or
    (k, inputs, output) for families; the witness comes back in the same shape.
    Returns None when no such phi exists.
    """
    system = LinearSystem()
    for item in basis:
        unit = _unit_cochain(item)
        for row_key, coef in _flatten(differential(unit)).items():
            system.add(row_key, item, coef)
        system.variable(item)
    for row_key, coef in _flatten(target).items():
        system.constant(row_key, coef)
    solution = system.solve()
    if solution is None:
        return None
    witness: dict = {}
    for item, value in solution.items():
        if len(item) == 3:
            k, inputs, output = item
            add_term(witness.setdefault(k, {}), inputs, output, value)
        else:
            inputs, output = item
            add_term(witness, inputs, output, value)
    return {k: v for k, v in witness.items() if v} if basis and len(basis[0]) == 3 else witness


def _unit_cochain(item):
    if len(item) == 3:
        k, inputs, output = item
        return {k: {inputs: {output: QQ.one}}}
    inputs, output = item
    return {inputs: {output: QQ.one}}


def cochain_basis(source: GradedSpace, target: GradedSpace, k: int, degree: int, unit_free: bool = False) -> list:
    """Unit cochains (inputs, output) of arity k and the given degree."""
    allowed = [i for i in range(source.dim) if not (unit_free and i == source.one)]
    by_degree: dict = {}
    for j in range(target.dim):
        by_degree.setdefault(target.degree(j), []).append(j)
    basis = []
    for inputs in itertools.product(allowed, repeat=k):
        wanted = degree + sum(source.degree(i) for i in inputs)
        for output in by_degree.get(wanted, []):
            basis.append((inputs, output))
    return basis


def is_quasi_isomorphism(f10: Entries, d_src: Entries, d_tgt: Entries, n_src: int, n_tgt: int) -> bool:
    """The mapping cone of f10 is acyclic exactly when f10 is a quasi-isomorphism."""
    rows: linalg.SparseRows = {}
    for (i,), row in d_src.items():
        for j, c in row.items():
            rows.setdefault(j, {})[i] = -c
    for (i,), row in f10.items():
        for j, c in row.items():
            rows.setdefault(n_src + j, {})[i] = c
    for (i,), row in d_tgt.items():
        for j, c in row.items():
            rows.setdefault(n_src + j, {})[n_src + i] = c
    total = n_src + n_tgt
    return 2 * linalg.rank(rows, total, total) == total


def _start_system(
    f10: Entries, d_src: Entries, d_tgt: Entries, src: GradedSpace, tgt: GradedSpace, pinned=None, with_homotopy=True
) -> LinearSystem:
    system = LinearSystem()
    for j in range(tgt.dim):
        for i in range(src.dim):
            if src.degree(i) == tgt.degree(j):
                system.variable(("g", j, i))
    # chain map: d_src g - g d_tgt = 0
    for j in range(tgt.dim):
        for i in range(src.dim):
            if src.degree(i) != tgt.degree(j):
                continue
            for l, c in d_src.get((i,), {}).items():
                system.add(("chain", j, l), ("g", j, i), c)
        for j2, c in d_tgt.get((j,), {}).items():
            for i in range(src.dim):
                if src.degree(i) == tgt.degree(j2):
                    system.add(("chain", j, i), ("g", j2, i), -c)
    # homotopy: g f - d_src h - h d_src = id
    for a in range(src.dim):
        system.constant(("htpy", a, a), QQ.one)
        for j, c in f10.get((a,), {}).items():
            for i in range(src.dim):
                if src.degree(i) == tgt.degree(j):
                    system.add(("htpy", a, i), ("g", j, i), c)
        if not with_homotopy:
            continue
        for b in range(src.dim):
            if src.degree(b) != src.degree(a) - 1:
                continue
            for l, c in d_src.get((b,), {}).items():
                system.add(("htpy", a, l), ("h", a, b), -c)
        for a2, c in d_src.get((a,), {}).items():
            for b in range(src.dim):
                if src.degree(b) == src.degree(a2) - 1:
                    system.add(("htpy", a, b), ("h", a2, b), -c)
    if tgt.one is not None and src.one is not None:
        for i in range(src.dim):
            if src.degree(i) == 0:
                system.add(("unit", i), ("g", tgt.one, i), QQ.one)
        system.constant(("unit", src.one), QQ.one)
    if pinned is not None:
        for key in list(system.variables):
            if key[0] != "g":
                continue
            _, j, i = key
            system.add(("pin", j, i), key, QQ.one)
            value = pinned.get((j,), {}).get(i)
            if value:
                system.constant(("pin", j, i), value)
    return system


def _read_start(solution: dict):
    g10: Entries = {}
    h: Entries = {}
    for key, value in solution.items():
        if key[0] == "g":
            add_term(g10, (key[1],), key[2], value)
        elif key[0] == "h":
            add_term(h, (key[1],), key[2], value)
    return g10, h


def whitehead_start(
    f10: Entries, d_src: Entries, d_tgt: Entries, src: GradedSpace, tgt: GradedSpace, hint: Optional[Entries] = None
):
    """
    A unital chain map g10 with g10 f10 - id = d h + h d.

    Tries the hint, then an exact left inverse, then the full system.

    Returns:
        (g10, h)
    """
    attempts = []
    if hint is not None:
        attempts.append(("hint", dict(pinned=hint)))
    attempts.append(("left inverse", dict(with_homotopy=False)))
    attempts.append(("general", {}))
    for name, options in attempts:
        solution = _start_system(f10, d_src, d_tgt, src, tgt, **options).solve()
        if solution is not None:
            logger.debug(f"(1,0) level solved by the {name} attempt")
            return _read_start(solution)
    raise Inconsistent("no unital homotopy inverse at the (1, 0) level", level=(1, None))


def _identity_entries(space: GradedSpace) -> Entries:
    return {(i,): {i: QQ.one} for i in range(space.dim)}


def _homotopy_insertion(
    m: OperatorSystem, g: OperatorSystem, f: OperatorSystem, homotopy: OperatorSystem, k: int, beta, cache
) -> Optional[Entries]:
    """sum m_{l,b0}(x^#p, .., x^#p, H_{kh,bh}, (g o f)_{a1,b1}, ..) with p = 1 + mu(bh)."""
    space = m.source
    zero = m.zero_class
    composites: dict = {}

    def composite(a, gamma):
        if (a, gamma) not in composites:
            value = compose_component(g, f, a, gamma, cache=cache)
            composites[(a, gamma)] = None if value is None else pull_back(value)
        return composites[(a, gamma)]

    result: Entries = {}
    for beta0, rest in m.support.splits(beta):
        for b_h, tail_class in m.support.splits(rest):
            leading = identity_factor(space, twisted=True, power=(1 + m.labels.maslov_of(b_h)) % 2)
            for lead in range(k + 1):
                for k_h in range(k - lead + 1):
                    if (k_h, b_h) == (0, zero):
                        continue
                    for seq in sequences(m.support, k - lead - k_h, tail_class):
                        factors = []
                        unknown = False
                        vanishes = False
                        for a, gamma in seq:
                            factor = composite(a, gamma)
                            if factor is None:
                                unknown = True
                            elif not factor:
                                vanishes = True
                                break
                            else:
                                factors.append(factor)
                        if vanishes:
                            continue
                        inner = cache.get(homotopy, k_h, b_h)
                        if inner == {}:
                            continue
                        outer = m.get(lead + 1 + len(seq), beta0)
                        if outer == {}:
                            continue
                        if outer is None or inner is None or unknown:
                            return None
                        plug(outer, [leading] * lead + [inner] + factors, result)
    return result


def homotopy_defect(
    m: OperatorSystem, g: OperatorSystem, f: OperatorSystem, homotopy: OperatorSystem, k: int, beta, cache=None
) -> Optional[Entries]:
    """
    (g o f - id - m(x^#, .., H, g o f, ..) - H * m)_{k,beta}.

    Zero exactly when ``homotopy`` joins the identity of (C, m) to g o f at
    (k, beta); None when the truncation leaves the value undetermined.
    """
    cache = cache or _FactorCache()
    beta = tuple(beta)
    composite = compose_component(g, f, k, beta, cache=cache)
    inserted = star_component(homotopy, m, k, beta, cache=cache)
    spliced = _homotopy_insertion(m, g, f, homotopy, k, beta, cache)
    if composite is None or inserted is None or spliced is None:
        return None
    result: Entries = {}
    add_entries(result, composite)
    if (k, beta) == (1, m.zero_class):
        add_entries(result, _identity_entries(m.source), -1)
    add_entries(result, spliced, -1)
    add_entries(result, inserted, -1)
    return result


def check_homotopy(
    g: OperatorSystem, f: OperatorSystem, m: OperatorSystem, homotopy: OperatorSystem, threads: int = 1
) -> VerificationReport:
    """Checks that ``homotopy`` joins the identity of (C, m) to g o f on every determined (k, beta)."""
    report = VerificationReport(name="homotopy", metadata=_metadata(m))
    zero = m.zero_class

    def level(key):
        return key, homotopy_defect(m, g, f, homotopy, key[0], key[1])

    keys = [(k, beta) for beta in m.support for k in range(m.context.length_cutoff + 1) if (k, beta) != (0, zero)]
    for (k, beta), value in run_per_key(keys, level, threads):
        if value is None:
            report.skipped += 1
            continue
        report.checked += 1
        if value:
            report.fail("homotopy relation", _describe(m.source, m.target, first_difference(value, {})), k, beta)
    return report


@dataclass
class WhiteheadResult:
    """
    A homotopy inverse g of f with a homotopy H from the identity to g o f.

    ``homotopy`` is the (1, 0) part of ``homotopy_system``. ``plain_levels``
    lists the levels solved without the unitality and divisor rows.
    """

    g: OperatorSystem
    homotopy: Entries
    homotopy_system: Optional[OperatorSystem] = None
    witnesses: dict = field(default_factory=dict)
    hom_report: Optional[VerificationReport] = None
    homotopy_report: Optional[VerificationReport] = None
    ud_report: Optional[VerificationReport] = None
    plain_levels: list = field(default_factory=list)


def _negate(cochain):
    if cochain and all(isinstance(key, int) for key in cochain):
        return {k: _negate(v) for k, v in cochain.items()}
    return {inputs: {o: -c for o, c in row.items()} for inputs, row in cochain.items()}


def _keyed(prefix: tuple, family: dict, arities=None) -> dict:
    """Coordinates of a family {k: Entries} as rows keyed under ``prefix``."""
    if arities is not None:
        family = {k: v for k, v in family.items() if k in arities}
    return {prefix + key: c for key, c in _flatten(family).items()}


def _format_level(level) -> str:
    k, beta = level
    return f"({k}, {list(beta)})" if k is not None else str(list(beta))


def _ud_capable(f: OperatorSystem) -> bool:
    if f.source.one is None or f.target.one is None:
        return False
    return all(len(vec) == f.labels.dimension for _, vec in f.target.divisors)


class _InverseBuilder:
    """Runs the length and energy inductions for g and H together."""

    def __init__(self, f: OperatorSystem, m_src: OperatorSystem, m_tgt: OperatorSystem, g10, h, ud: bool):
        self.f = f
        self.m_src = m_src
        self.m_tgt = m_tgt
        self.src = f.source
        self.tgt = f.target
        self.labels = f.labels
        self.zero = f.zero_class
        self.K = f.context.length_cutoff
        self.ud = ud
        zero = self.zero
        self.g = OperatorSystem(
            self.tgt, self.src, f.labels, f.context, {(1, zero): g10}, base_degree=1, known=[(1, zero)]
        )
        self.homotopy = OperatorSystem(
            self.src, self.src, f.labels, f.context, {(1, zero): h}, base_degree=0, known=[(1, zero)]
        )
        self.f_class0 = {}
        for a in range(1, self.K + 1):
            component = f.get(a, zero)
            if component:
                self.f_class0[a] = pull_back(component)
        self.witnesses: dict = {}
        self.plain_levels: list = []

    # Linear terms

    def _precompose(self, family: dict, k: int) -> Entries:
        """The part of (g o f)_{k,beta} linear in g_{*,beta}: g_j(f_{a1,0}, .., f_{aj,0})."""
        value: Entries = {}
        for j, phi in family.items():
            if not phi:
                continue
            for parts in _compositions(k, j):
                if all(a in self.f_class0 for a in parts):
                    plug(phi, [self.f_class0[a] for a in parts], value)
        return value

    def _homotopy_terms(self, psi: dict, arities, composites: dict, power: int) -> dict:
        """
        The part of the homotopy relation linear in H_{*,beta} = psi:
        m_{l,0}(x^#, .., psi_j, c_a, ..) + psi_j(x^#, .., m_{n,0}, x, ..) with c = (g o f)_{*,0}.
        """
        m = self.m_src
        zero = self.zero
        leading = identity_factor(self.src, twisted=True, power=power)
        sharp = identity_factor(self.src, twisted=True)
        ident = identity_factor(self.src)
        pulled = {j: pull_back(v) for j, v in psi.items() if v}
        result = {}
        for k in arities:
            value: Entries = {}
            for ell in range(1, self.K + 1):
                outer = m.get(ell, zero)
                if not outer:
                    continue
                for lead in range(ell):
                    for j, factor in pulled.items():
                        for parts in _compositions(k - lead - j, ell - lead - 1):
                            if all(a in composites for a in parts):
                                plug(outer, [leading] * lead + [factor] + [composites[a] for a in parts], value)
            for n in range(1, k + 1):
                inner = m.get(n, zero)
                if not inner:
                    continue
                inner_factor = pull_back(inner)
                for lam in range(k - n + 1):
                    rest = k - n - lam
                    target = psi.get(lam + rest + 1)
                    if target:
                        plug(target, [sharp] * lam + [inner_factor] + [ident] * rest, value)
            if value:
                result[k] = value
        return result

    def _ud_rows(self, family: dict, arities, beta) -> dict:
        """Rows for cyclic unitality and the divisor relation of g_{*,beta}."""
        classes = dict(self.tgt.divisors)
        rows = {}
        for k in arities:
            u = family.get(k, {})
            for e, value in cyclic_insertions(u, self.tgt).items():
                rows.update(_keyed(("cu", e), {k: value}))
            for b, value in divisor_insertions(u, self.tgt).items():
                add_entries(value, family.get(k - 1, {}), -self.labels.cap(beta, classes[b]))
                rows.update(_keyed(("da", b), {k: value}))
        return rows

    def _family(self, theta: dict, beta, corrector: Callable = corrector_terms) -> dict:
        """g_{*,beta} = corrector(g_{<k,beta}) + theta_k, arity by arity."""
        family = {}
        us = []
        for k in range(self.K + 1):
            u = corrector(us, beta, self.tgt, self.labels) if us else {}
            add_entries(u, theta.get(k, {}))
            us.append(u)
            if u:
                family[k] = u
        return family

    # Solving

    def _solve(self, level, targets: dict, g_columns: Callable, h_columns: list):
        """
        One exact solve for the g and H unknowns of a level.

        Tries the unitality and divisor rows first when g can carry them,
        then the plain relations with unit-free and with full cochains.
        """
        attempts = [("ud", True)] if self.ud else []
        attempts += [("plain", True), ("plain", False)]
        for mode, unit_free in attempts:
            system = LinearSystem()
            columns = [(("g",) + var, rows) for var, rows in g_columns(mode, unit_free)]
            columns += [(("h",) + var, rows) for var, rows in h_columns]
            for var, rows in columns:
                system.variable(var)
                for row_key, coef in rows.items():
                    system.add(row_key, var, coef)
            for row_key, coef in targets.items():
                system.constant(row_key, coef)
            solution = system.solve()
            if solution is None:
                logger.debug(f"level {_format_level(level)}: no {mode} solution with unit_free={unit_free}")
                continue
            if mode == "plain" and self.ud:
                self.plain_levels.append(level)
            theta: dict = {}
            psi: dict = {}
            for (kind, j, inputs, output), value in solution.items():
                add_term((theta if kind == "g" else psi).setdefault(j, {}), inputs, output, value)
            return mode, theta, psi
        raise Inconsistent(f"no homotopy inverse component at level {_format_level(level)}", level=level)

    def length_step(self, k: int):
        zero = self.zero
        obstruction = obstruction_length(self.m_tgt, self.m_src, self.g, k)
        self.g.known.add((k, zero))
        self.homotopy.known.add((k, zero))
        defect = homotopy_defect(self.m_src, self.g, self.f, self.homotopy, k, zero)
        if defect is None:
            raise ConditionError(f"homotopy relation undetermined at arity {k}")
        targets = _keyed(("hom",), {k: _negate(obstruction.value)})
        targets.update(_keyed(("htpy",), {k: _negate(defect)}))
        if not targets:
            return
        f10 = self.f_class0.get(1, {})

        def g_columns(mode, unit_free):
            for item in cochain_basis(self.tgt, self.src, k, 1 - k, unit_free):
                phi = _unit_cochain(item)
                rows = _keyed(("hom",), {k: bar_differential(phi, k, self.m_src, self.m_tgt, p=0)})
                rows.update(_keyed(("htpy",), {k: plug(phi, [f10] * k)}))
                if mode == "ud":
                    rows.update(self._ud_rows({k: phi}, [k], zero))
                yield (k,) + item, rows

        h_columns = []
        for item in cochain_basis(self.src, self.src, k, -k):
            terms = self._homotopy_terms({k: _unit_cochain(item)}, [k], {}, power=1)
            h_columns.append(((k,) + item, _keyed(("htpy",), _negate(terms))))
        _, theta, psi = self._solve((k, zero), targets, g_columns, h_columns)
        if theta.get(k):
            self.g.components[(k, zero)] = theta[k]
        if psi.get(k):
            self.homotopy.components[(k, zero)] = psi[k]
        self.witnesses[(k, zero)] = {"g": theta.get(k, {}), "h": psi.get(k, {})}

    def energy_step(self, beta):
        K = self.K
        zero = self.zero
        mu = self.labels.maslov_of(beta)
        obstruction = obstruction_energy(self.m_tgt, self.m_src, self.g, beta)
        self.g.known.update((k, beta) for k in range(K + 1))
        self.homotopy.known.update((k, beta) for k in range(K + 1))
        defects = {}
        for k in range(K + 1):
            value = homotopy_defect(self.m_src, self.g, self.f, self.homotopy, k, beta)
            if value is None:
                logger.debug(f"homotopy relation undetermined at ({k}, {list(beta)})")
            else:
                defects[k] = value
        hom_arities = set(obstruction.determined)
        htpy_arities = set(defects)
        targets = _keyed(("hom",), _negate(obstruction.value), hom_arities)
        targets.update(_keyed(("htpy",), _negate(defects)))
        if not targets:
            return
        composites = {}
        for a in range(1, K + 1):
            component = compose_component(self.g, self.f, a, zero)
            if component:
                composites[a] = pull_back(component)

        def g_columns(mode, unit_free):
            for j in range(K + 1):
                for item in cochain_basis(self.tgt, self.src, j, 1 - j - mu, unit_free):
                    theta = {j: _unit_cochain(item)}
                    family = self._family(theta, beta) if mode == "ud" else theta
                    rows = _keyed(
                        ("hom",), twisted_differential(self.g, family, self.m_src, self.m_tgt, p=-mu), hom_arities
                    )
                    rows.update(_keyed(("htpy",), {k: self._precompose(family, k) for k in htpy_arities}))
                    if mode == "ud":
                        rows.update(self._ud_rows(family, range(1, K + 1), beta))
                    yield (j,) + item, rows

        h_columns = []
        power = (1 + mu) % 2
        for j in range(K + 1):
            for item in cochain_basis(self.src, self.src, j, -j - mu):
                terms = self._homotopy_terms({j: _unit_cochain(item)}, sorted(htpy_arities), composites, power)
                h_columns.append(((j,) + item, _keyed(("htpy",), _negate(terms))))
        mode, theta, psi = self._solve((None, beta), targets, g_columns, h_columns)
        if mode == "ud":
            try:
                family = self._family(theta, beta, corrector=cyclic_corrector)
            except ConditionError as e:
                raise Inconsistent(f"corrected family at {list(beta)}: {e}", level=(None, beta)) from e
        else:
            family = theta
        for k, component in family.items():
            if component:
                self.g.components[(k, beta)] = component
        for k, component in psi.items():
            if component:
                self.homotopy.components[(k, beta)] = component
        self.witnesses[(None, beta)] = {"g": family, "h": psi}

    def result(self, h: Entries, require_ud: bool) -> WhiteheadResult:
        f = self.f
        g = OperatorSystem(self.tgt, self.src, f.labels, f.context, self.g.components, base_degree=1)
        homotopy = OperatorSystem(self.src, self.src, f.labels, f.context, self.homotopy.components, base_degree=0)
        result = WhiteheadResult(
            g=g,
            homotopy=h,
            homotopy_system=homotopy,
            witnesses=self.witnesses,
            plain_levels=self.plain_levels,
        )
        result.hom_report = check_hom(g, self.m_tgt, self.m_src)
        result.homotopy_report = check_homotopy(g, f, self.m_src, homotopy)
        if not self.ud:
            return result
        result.ud_report = check_ud_morphism(g)
        failure = result.ud_report.first_failure
        if failure is None:
            return result
        where = f"{failure.label} at k={failure.k}, beta={failure.beta}: {failure.detail}"
        if require_ud or not self.plain_levels:
            raise Inconsistent(f"homotopy inverse is not a ud-morphism, {where}", level=(failure.k, failure.beta))
        levels = [_format_level(level) for level in self.plain_levels]
        logger.warning(f"levels {levels} solved without ud rows; {where}")
        return result


def homotopy_inverse(
    f: OperatorSystem,
    m_src: OperatorSystem,
    m_tgt: OperatorSystem,
    hint: Optional[Entries] = None,
    require_ud: bool = False,
) -> WhiteheadResult:
    """
    Builds g: (C', m_tgt) -> (C, m_src) with a homotopy from the identity to g o f.

    When both sides carry units and divisor classes every level is first
    solved with the cyclic unitality and divisor rows, the class-beta families
    being grown by the cyclic corrector. The result is then checked as a
    ud-morphism.

    Raises:
        NotQuasiIso: when f_{1,0} is not a quasi-isomorphism
        Inconsistent: when a level has no solution, or when the ud check fails
            although every level carried the ud rows (always with ``require_ud``)
        ConditionError: when f is not a homomorphism, or ``require_ud`` is set
            without units and divisor classes
    """
    report = check_hom(f, m_src, m_tgt)
    if not report.passed:
        raise ConditionError(f"input is not a homomorphism: {report.summary()}")
    src, tgt = f.source, f.target
    zero = f.zero_class
    f10 = f.get(1, zero) or {}
    d_src = m_src.get(1, zero) or {}
    d_tgt = m_tgt.get(1, zero) or {}
    if not is_quasi_isomorphism(f10, d_src, d_tgt, src.dim, tgt.dim):
        raise NotQuasiIso("f_1,0 does not induce an isomorphism on cohomology")
    ud = _ud_capable(f)
    if require_ud and not ud:
        raise ConditionError("ud constraints need units on both sides and divisor classes on the target")
    g10, h = whitehead_start(f10, d_src, d_tgt, src, tgt, hint)
    builder = _InverseBuilder(f, m_src, m_tgt, g10, h, ud)
    for k in range(2, f.context.length_cutoff + 1):
        builder.length_step(k)
    for beta in f.support:
        if beta != zero:
            builder.energy_step(beta)
    result = builder.result(h, require_ud)
    logger.info(f"homotopy inverse built with {len(result.g.components)} nonzero components")
    return result


def verify_start_homotopy(result: WhiteheadResult, f: OperatorSystem, m_src: OperatorSystem) -> bool:
    """Checks g_1,0 f_1,0 - id = m_1,0 h + h m_1,0 on the source of f."""
    zero = f.zero_class
    f10 = f.get(1, zero) or {}
    d = m_src.get(1, zero) or {}
    g10 = result.g.get(1, zero) or {}
    lhs: Entries = {}
    add_entries(lhs, apply_linear(g10, f10))
    add_entries(lhs, _identity_entries(f.source), -1)
    add_entries(lhs, apply_linear(d, result.homotopy), -1)
    add_entries(lhs, apply_linear(result.homotopy, d), -1)
    return not lhs
