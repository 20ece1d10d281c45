import unittest

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.algebra import GradedSpace, OperatorSystem, check_ainf, check_hom, identity_system
from src.algebra.checks import check_cyclic_unit, check_divisor_axiom, check_hom_unit, check_unit, divisor_class_of
from src.algebra.operators import linear_system
from src.algebra.spaces import add_entries, add_term, evaluate
from src.config import get_settings
from src.errors import ConditionError, DataError, Inconsistent, NotQuasiIso, PartialHomError
from src.fixtures import builders
from src.transfer import (
    Contraction,
    InnerProductComplex,
    bar_differential,
    canonical_model,
    check_contraction,
    check_homotopy,
    cyclic_corrector,
    harmonic_contraction,
    homotopy_inverse,
    identity_contraction,
    obstruction_energy,
    obstruction_length,
    solve_coboundary,
    twisted_differential,
)
from src.transfer.obstruction import cyclic_unit_holds, divisor_relation_holds, unit_vanishes
from src.transfer.whitehead import cochain_basis, verify_start_homotopy


def _is_zero(cochain) -> bool:
    return not any(c for row in cochain.values() for c in row.values())


def _negated(entries):
    return {inputs: {o: -c for o, c in row.items()} for inputs, row in entries.items()}


def _cochain(basis, coefficients):
    phi = {}
    for (inputs, output), c in zip(basis, coefficients):
        add_term(phi, inputs, output, QQ(c))
    return phi


def _harmonic(m):
    return harmonic_contraction(builders.tilted_inner_product(m))


def _identity(m):
    return identity_contraction(m.source, m.source.declared_differential())


def _deformed_acyclic_clifford():
    return builders.deformed_torus(builders.clifford_classes(), builders.context_of("5/2", 3), acyclic=True)


def _non_strong_clifford():
    """i = pi = id with G(t1t2) = t1, G(t2) = 1/3: no side conditions."""
    m = builders.clifford_algebra()
    space = m.source
    ident = {(i,): {i: QQ.one} for i in range(space.dim)}
    G = {
        (space.index("t1t2"),): {space.index("t1"): QQ.one},
        (space.index("t2"),): {space.one: QQ(1, 3)},
    }
    d = space.declared_differential()
    return m, Contraction(space, space, d, d, ident, ident, G, strong=False)


def _class_monoid(m: OperatorSystem) -> set:
    """Sums of the classes carrying m, inside the truncated support."""
    generators = [beta for beta in m.support_classes() if any(beta)]
    reached = {m.zero_class}
    frontier = [m.zero_class]
    while frontier:
        current = frontier.pop()
        for beta in generators:
            total = tuple(a + b for a, b in zip(current, beta))
            if total in m.support and total not in reached:
                reached.add(total)
                frontier.append(total)
    return reached


class TestIdentityContraction(unittest.TestCase):
    def test_canonical_model_is_the_input(self):
        m = builders.clifford_algebra()
        con = _identity(m)
        self.assertTrue(check_contraction(con).passed)
        m_can, i_can = canonical_model(m, con)
        self.assertTrue(m_can.equals(m), m_can.first_difference(m))
        self.assertEqual(list(i_can.components), [(1, m.zero_class)])


class TestHarmonicContraction(unittest.TestCase):
    def setUp(self):
        self.m = builders.qcdr_torus(2, acyclic=True, context=builders.context_of("2", 3))
        self.con = _harmonic(self.m)

    def test_contraction_equations(self):
        report = check_contraction(self.con)
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(self.con.model.dim, 4)
        self.assertEqual(list(self.con.model.degrees), [0, 1, 1, 2])
        self.assertEqual(self.con.model.names[0], "1")

    def test_tilted_harmonic_vector(self):
        space = self.m.source
        t1, f = space.index("t1"), space.index("f")
        images = [row for (_,), row in sorted(self.con.i.items())]
        self.assertIn({t1: QQ.one, f: QQ(-1, 2)}, images)

    def test_canonical_model(self):
        m_can, i_can = canonical_model(self.m, self.con, require_ainf=True)
        self.assertTrue(check_ainf(m_can).passed)
        report = check_hom(i_can, m_can, self.m)
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(m_can.source.one, 0)

    def test_rejects_non_positive_gram(self):
        space = self.m.source
        t1 = space.index("t1")
        with self.assertRaises(DataError):
            harmonic_contraction(InnerProductComplex(space, {(t1, t1): QQ(-1)}))


class TestDeformedAcyclicTorus(unittest.TestCase):
    def test_clifford_with_acyclic_pair_is_ainf(self):
        m = _deformed_acyclic_clifford()
        report = check_ainf(m)
        self.assertTrue(report.passed, report.summary())

    def test_coupling_touches_the_acyclic_pair_only(self):
        m = _deformed_acyclic_clifford()
        plain = builders.clifford_algebra()
        space = m.source
        acyclic = {space.index(name) for name in builders.ACYCLIC_NAMES}
        for (k, beta), entries in m.components.items():
            if not any(beta):
                continue
            for inputs, row in entries.items():
                if any(i in acyclic for i in inputs):
                    self.assertTrue(set(row) <= acyclic, (k, beta, inputs))
                else:
                    self.assertEqual(row, plain.components[(k, beta)][inputs])


class TestCanonicalModel(unittest.TestCase):
    """Transfer along six contractions, with and without side conditions."""

    @classmethod
    def setUpClass(cls):
        harmonic_torus = builders.qcdr_torus(2, acyclic=True, context=builders.context_of("2", 3))
        clifford = builders.clifford_algebra()
        gauge = builders.clifford_algebra(gauge_energy="1/2")
        maslov_zero = builders.maslov_zero_algebra()
        deformed = _deformed_acyclic_clifford()
        cases = [
            ("clifford", clifford, _identity(clifford)),
            ("clifford with gauge class", gauge, _identity(gauge)),
            ("maslov zero", maslov_zero, _identity(maslov_zero)),
            ("harmonic torus", harmonic_torus, _harmonic(harmonic_torus)),
            ("harmonic deformed torus", deformed, _harmonic(deformed)),
            ("non-strong clifford",) + _non_strong_clifford(),
        ]
        cls.cases = [(name, m, con) + canonical_model(m, con) for name, m, con in cases]

    def test_ainf_and_homomorphism(self):
        for name, m, _, m_can, i_can in self.cases:
            with self.subTest(name):
                report = check_ainf(m_can)
                self.assertTrue(report.passed, report.summary())
                report = check_hom(i_can, m_can, m)
                self.assertTrue(report.passed, report.summary())

    def test_cyclic_unitality_is_preserved(self):
        met = 0
        for name, m, _, m_can, i_can in self.cases:
            if not check_cyclic_unit(m).passed:
                continue
            met += 1
            with self.subTest(name):
                self.assertTrue(check_cyclic_unit(m_can).passed, check_cyclic_unit(m_can).summary())
                self.assertTrue(check_cyclic_unit(i_can).passed, check_cyclic_unit(i_can).summary())
        self.assertGreater(met, 2)

    def test_divisor_axiom_is_preserved(self):
        met = 0
        for name, m, con, m_can, i_can in self.cases:
            n = m.labels.dimension
            same_classes = all(
                divisor_class_of(con.complex, con.i.get((b,), {}), n) == list(vec) for b, vec in con.model.divisors
            )
            if not (con.model.divisors and same_classes and check_divisor_axiom(m).passed):
                continue
            met += 1
            with self.subTest(name):
                self.assertTrue(check_divisor_axiom(m_can).passed, check_divisor_axiom(m_can).summary())
                self.assertTrue(check_divisor_axiom(i_can).passed, check_divisor_axiom(i_can).summary())
        self.assertGreater(met, 2)

    def test_unit_is_preserved_by_strong_contractions(self):
        met = 0
        for name, m, con, m_can, i_can in self.cases:
            one, model_one = con.complex.one, con.model.one
            if not con.strong or one is None or model_one is None or not check_unit(m).passed:
                continue
            image = evaluate(con.pi, [{one: QQ.one}])
            if image != {model_one: QQ.one} or evaluate(con.i, [image]) != {one: QQ.one}:
                continue
            met += 1
            with self.subTest(name):
                self.assertTrue(check_unit(m_can).passed, check_unit(m_can).summary())
                self.assertTrue(check_hom_unit(i_can).passed, check_hom_unit(i_can).summary())
        self.assertGreater(met, 0)

    def test_classes_stay_in_the_support_monoid(self):
        for name, m, _, m_can, i_can in self.cases:
            with self.subTest(name):
                reached = _class_monoid(m)
                self.assertLessEqual(m_can.support_classes(), reached)
                self.assertLessEqual(i_can.support_classes(), reached)

    def test_non_strong_transfer_map_has_higher_terms(self):
        _, m, _, _, i_can = self.cases[-1]
        self.assertTrue(i_can.get(2, m.zero_class))


class TestHomotopyInverse(unittest.TestCase):
    def test_inverse_of_transfer_map(self):
        m = builders.qcdr_torus(2, acyclic=True, context=builders.context_of("2", 3))
        m_can, i_can = canonical_model(m, _harmonic(m))
        result = homotopy_inverse(i_can, m_can, m)
        self.assertTrue(result.hom_report.passed, result.hom_report.summary())
        self.assertTrue(result.homotopy_report.passed, result.homotopy_report.summary())
        self.assertTrue(verify_start_homotopy(result, i_can, m_can))

    def test_inverse_for_a_contraction_without_side_conditions(self):
        m, con = _non_strong_clifford()
        m_can, i_can = canonical_model(m, con)
        result = homotopy_inverse(i_can, m_can, m)
        self.assertTrue(result.hom_report.passed, result.hom_report.summary())
        self.assertTrue(result.homotopy_report.passed, result.homotopy_report.summary())
        self.assertTrue(verify_start_homotopy(result, i_can, m_can))
        report = check_homotopy(result.g, i_can, m_can, result.homotopy_system)
        self.assertTrue(report.passed, report.summary())
        self.assertTrue(any(w["g"] or w["h"] for w in result.witnesses.values()))

    def test_inverse_of_deformed_transfer_map(self):
        m = _deformed_acyclic_clifford()
        m_can, i_can = canonical_model(m, _harmonic(m))
        result = homotopy_inverse(i_can, m_can, m)
        self.assertTrue(result.hom_report.passed, result.hom_report.summary())
        self.assertTrue(result.homotopy_report.passed, result.homotopy_report.summary())

    def test_zero_map_is_not_a_quasi_isomorphism(self):
        m = builders.qcdr_torus(2)
        zero = OperatorSystem(m.source, m.source, m.labels, m.context, {}, base_degree=1)
        with self.assertRaises(NotQuasiIso):
            homotopy_inverse(zero, m, m)


class TestUdInverse(unittest.TestCase):
    def test_inverse_of_identity_transfer_is_ud(self):
        m = builders.clifford_algebra()
        m_can, i_can = canonical_model(m, _identity(m))
        result = homotopy_inverse(i_can, m_can, m, require_ud=True)
        self.assertTrue(result.ud_report.passed, result.ud_report.summary())
        self.assertEqual(result.plain_levels, [])
        space = m.source
        self.assertEqual(result.g.get(1, m.zero_class), {(i,): {i: QQ.one} for i in range(space.dim)})

    def test_inverse_changing_cap_products_is_rejected(self):
        m = builders.qcdr_torus(2, labels=builders.torus_labels(2, builders.clifford_classes()))
        space = m.source
        one, t1, t2, t12 = (space.index(name) for name in ("1", "t1", "t2", "t1t2"))
        shear = {(one,): {one: QQ.one}, (t1,): {t1: QQ.one, t2: QQ.one}, (t2,): {t2: QQ.one}, (t12,): {t12: QQ.one}}
        f = linear_system(space, space, m.labels, m.context, shear)
        self.assertTrue(check_hom(f, m, m).passed)
        with self.assertRaises(Inconsistent) as caught:
            homotopy_inverse(f, m, m)
        self.assertIn("(II-4)", str(caught.exception))

    def test_require_ud_needs_units(self):
        m = builders.qcdr_torus(2)
        space = m.source
        bare = GradedSpace(space.names, space.degrees, None, space.divisors, space.differential)
        ident = {(i,): {i: QQ.one} for i in range(space.dim)}
        source = OperatorSystem(bare, bare, m.labels, m.context, m.components, base_degree=2)
        f = linear_system(bare, space, m.labels, m.context, ident)
        with self.assertRaises(ConditionError):
            homotopy_inverse(f, source, m, require_ud=True)


class TestObstruction(unittest.TestCase):
    def setUp(self):
        self.torus = builders.qcdr_torus(2, acyclic=True, context=builders.context_of("2", 3))

    def test_bar_differential_on_the_acyclic_pair(self):
        m = self.torus
        a, f = m.source.index("a"), m.source.index("f")
        self.assertEqual(bar_differential({(a,): {a: QQ.one}}, 1, m, m, p=0), {(a,): {f: QQ.one}})
        self.assertEqual(bar_differential({(f,): {f: QQ.one}}, 1, m, m, p=0), {(a,): {f: -QQ.one}})
        self.assertEqual(bar_differential({(a,): {a: QQ.one}, (f,): {f: QQ.one}}, 1, m, m, p=0), {})

    @seed(get_settings().seed)
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=2), st.integers(min_value=-1, max_value=1), st.data())
    def test_bar_differential_squares_to_zero(self, k, p, data):
        m = self.torus
        basis = cochain_basis(m.source, m.source, k, p - k + 1)
        coefficients = data.draw(st.lists(st.integers(-2, 2), min_size=len(basis), max_size=len(basis)))
        phi = _cochain(basis, coefficients)
        once = bar_differential(phi, k, m, m, p)
        self.assertTrue(_is_zero(bar_differential(once, k, m, m, p + 1)))

    @seed(get_settings().seed)
    @settings(max_examples=15, deadline=None)
    @given(st.integers(min_value=-1, max_value=1), st.data())
    def test_twisted_differential_squares_to_zero(self, p, data):
        m = builders.clifford_algebra()
        g = identity_system(m.source, m.labels, m.context)
        family = {}
        for k in (1, 2):
            basis = cochain_basis(m.source, m.source, k, p - k + 1)
            coefficients = data.draw(st.lists(st.integers(-2, 2), min_size=len(basis), max_size=len(basis)))
            family[k] = _cochain(basis, coefficients)
        once = twisted_differential(g, family, m, m, p)
        twice = twisted_differential(g, once, m, m, p + 1)
        self.assertTrue(all(_is_zero(v) for v in twice.values()))

    def test_length_obstruction_of_restricted_homomorphism_is_exact(self):
        m = self.torus
        m_can, i_can = canonical_model(m, _harmonic(m))
        zero = m.zero_class
        for k in (2, 3):
            obstruction = obstruction_length(m_can, m, i_can, k)
            self.assertTrue(obstruction.closed)
            self.assertEqual(obstruction.level, (k, zero))
            own = bar_differential(i_can.get(k, zero), k, m, m_can, p=0)
            add_entries(own, obstruction.value)
            self.assertTrue(_is_zero(own))
            target = _negated(obstruction.value)
            witness = solve_coboundary(
                lambda phi: bar_differential(phi, k, m, m_can, p=0),
                target,
                cochain_basis(m_can.source, m.source, k, 1 - k),
            )
            self.assertIsNotNone(witness)
            self.assertEqual(bar_differential(witness, k, m, m_can, p=0), target)

    def test_length_obstruction_needs_lower_arities(self):
        m = self.torus
        space = m.source
        f = space.index("f")
        g = linear_system(space, space, m.labels, m.context, {(i,): {i: QQ.one} for i in range(space.dim) if i != f})
        with self.assertRaises(PartialHomError):
            obstruction_length(m, m, g, 2)

    def test_energy_obstruction_is_cancelled_by_the_transfer_map(self):
        m = _deformed_acyclic_clifford()
        m_can, i_can = canonical_model(m, _harmonic(m))
        beta = (0, 0, 1)
        obstruction = obstruction_energy(m_can, m, i_can, beta)
        self.assertTrue(obstruction.closed)
        self.assertTrue(obstruction.determined)
        family = {}
        for k in range(m.context.length_cutoff + 1):
            component = i_can.get(k, beta)
            if component is None:
                break
            family[k] = component
        mu = m.labels.maslov_of(beta)
        cancelled = twisted_differential(i_can, family, m, m_can, p=-mu)
        for j in obstruction.determined:
            if j >= len(family):
                continue
            total = {inputs: dict(row) for inputs, row in cancelled.get(j, {}).items()}
            add_entries(total, obstruction.value.get(j, {}))
            self.assertTrue(_is_zero(total), j)


class TestCyclicCorrector(unittest.TestCase):
    def setUp(self):
        self.m = builders.clifford_algebra()
        self.space = self.m.source
        self.beta = (1, 0, 0)
        self.u0 = {(): {self.space.one: QQ.one}}

    def test_first_correction_is_the_cap_product(self):
        u1 = cyclic_corrector([self.u0], self.beta, self.space, self.m.labels)
        self.assertEqual(u1, {(self.space.index("t1"),): {self.space.one: QQ.one}})

    def test_second_correction(self):
        space, labels = self.space, self.m.labels
        t1 = space.index("t1")
        u1 = cyclic_corrector([self.u0], self.beta, space, labels)
        u2 = cyclic_corrector([self.u0, u1], self.beta, space, labels)
        self.assertEqual(u2, {(t1, t1): {space.one: QQ(1, 2)}})
        self.assertTrue(divisor_relation_holds(u1, u2, self.beta, space, labels))
        self.assertTrue(cyclic_unit_holds(u2, space))
        self.assertTrue(unit_vanishes(u2, space))

    def test_broken_divisor_relation_is_rejected(self):
        with self.assertRaises(ConditionError):
            cyclic_corrector([self.u0, {}], self.beta, self.space, self.m.labels)

    def test_unit_input_is_rejected(self):
        one = self.space.one
        with self.assertRaises(ConditionError):
            cyclic_corrector([{(one,): {one: QQ.one}}], self.beta, self.space, self.m.labels)

    def test_zero_class_is_rejected(self):
        with self.assertRaises(ConditionError):
            cyclic_corrector([{}], (0, 0, 0), self.space, self.m.labels)


if __name__ == '__main__':
    unittest.main()
