import unittest

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.algebra import OperatorSystem, identity_system
from src.config import get_settings
from src.errors import CertificateError, DataError, DomainError, ZeroCoordinate
from src.fixtures import builders
from src.mirror import (
    LaurentSeries,
    TransitionData,
    choice_independence_verify,
    cocycle_verify,
    eval_series,
    glue_atlas,
    gluing_hom,
    ideal_generators,
    identity_transition,
    mc_series,
    torus_point,
    trop,
    val_compatibility_check,
    wall_crossing_verify,
)
from src.mirror.cocycle import identity_verify
from src.novikov import NovikovNum, TruncationContext

exponents = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


def by_name(transitions):
    return {t.name: t for t in transitions}


def triangle(transitions):
    table = by_name(transitions)
    return table["U0<-U1"], table["U1<-U2"], table["U0<-U2"]


class TestLaurentSeries(unittest.TestCase):
    def test_product_precision(self):
        x = LaurentSeries(2, [((1, (1, 0)), 1), ((2, (0, 0)), 3)], precision=3)
        y = LaurentSeries.monomial(2, "1/2", (0, 1), 2)
        product = x * y
        self.assertEqual(product.coefficient("3/2", (1, 1)), QQ(2))
        self.assertEqual(product.precision, QQ(7, 2))

    def test_truncation_uses_weight(self):
        series = LaurentSeries(1, [((1, (2,)), 1), ((1, (-2,)), 1)], precision=2, reference=("1/2",))
        self.assertEqual(list(series.terms), [(QQ(1), (-2,))])

    def test_exp(self):
        x = LaurentSeries.monomial(1, 1, (1,))
        expected = LaurentSeries(1, [((0, (0,)), 1), ((1, (1,)), 1), ((2, (2,)), "1/2")], precision="5/2")
        self.assertEqual(x.exp_plus("5/2"), expected)
        with self.assertRaises(DomainError):
            LaurentSeries.monomial(1, 0, (1,)).exp_plus(1)

    def test_reference_mismatch(self):
        with self.assertRaises(DataError):
            LaurentSeries.one(1) + LaurentSeries.one(1, reference=(1,))

    def test_evaluation(self):
        ctx = TruncationContext(QQ(4), 3)
        point = torus_point(ctx, ("1/2", 1))
        self.assertEqual(trop(point), (QQ(1, 2), QQ(1)))
        series = LaurentSeries(2, [((1, (1, -1)), 2), ((0, (0, 1)), 1)])
        self.assertEqual(eval_series(series, point), NovikovNum(ctx, [("1/2", 2), (1, 1)]))
        with self.assertRaises(ZeroCoordinate):
            trop((NovikovNum.zero(ctx), NovikovNum.one(ctx)))

    def test_json(self):
        series = LaurentSeries(2, [(("1/3", (1, -2)), "-1/2")], precision=2, reference=(1, 0))
        self.assertEqual(LaurentSeries.from_json(series.to_json(), 2), series)


class TestCharts(unittest.TestCase):
    def test_clifford_superpotential(self):
        charts, _ = builders.shift_atlas(2)
        P, W, Q = mc_series(charts[1])
        self.assertEqual(Q, {})
        self.assertEqual(W.coefficient("9/8", (1, 0)), QQ.one)
        self.assertEqual(W.coefficient(1, (0, 1)), QQ.one)
        self.assertEqual(W.coefficient("7/8", (-1, -1)), QQ.one)
        self.assertEqual(len(W.terms), 3)

    def test_identity_gluing(self):
        charts, _ = builders.shift_atlas(1)
        self.assertTrue(identity_verify(charts[0]).passed)
        self.assertTrue(charts[0].verify().passed)

    def test_maslov_zero_curvature_gives_ideal(self):
        m = builders.maslov_zero_algebra()
        chart = builders.chart_at("V", m, ("0", "0"))
        generators = ideal_generators(chart)
        self.assertEqual(list(generators), ["t1t2"])
        self.assertEqual(generators["t1t2"].coefficient(1, (1, 0)), QQ.one)


class TestGluing(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        _, (transition,) = builders.broken_margin_atlas(half_width="1/8")
        cls.narrow = transition

    def test_shift(self):
        _, transitions = builders.shift_atlas(2)
        phi = gluing_hom(transitions[0])
        self.assertEqual(phi.image((1, 0)).terms, {(QQ(-1, 8), (1, 0)): QQ.one})
        self.assertEqual(phi.image((0, 1)).terms, {(QQ.zero, (0, 1)): QQ.one})

    def test_maslov_zero_correction(self):
        phi = gluing_hom(self.narrow)
        image = phi.image((1, 0))
        for n, coef in enumerate((1, 1, QQ(1, 2), QQ(1, 6), QQ(1, 24))):
            self.assertEqual(image.coefficient(QQ(1, 8) + QQ(n, 2), (1, n)), coef)
        self.assertEqual(len(image.terms), 5)
        self.assertEqual(phi.image((0, 1)).terms, {(QQ.zero, (0, 1)): QQ.one})

    def test_certificate_failure(self):
        _, (transition,) = builders.broken_margin_atlas()
        report = transition.certificate()
        self.assertFalse(report.passed)
        self.assertEqual(report.first_failure.label, "certificate")
        with self.assertRaises(CertificateError):
            gluing_hom(transition)

    @seed(get_settings().seed)
    @settings(max_examples=60, deadline=None)
    @given(exponents, exponents)
    def test_gluing_is_multiplicative(self, alpha, gamma):
        phi = gluing_hom(self.narrow)
        total = tuple(a + g for a, g in zip(alpha, gamma))
        self.assertEqual(phi.image(alpha) * phi.image(gamma), phi.image(total))

    def test_valuation(self):
        _, _, transition = builders.sheared_transition()
        report = val_compatibility_check(transition)
        self.assertTrue(report.passed, report.summary())
        self.assertGreater(report.checked, 0)


class TestWallCrossing(unittest.TestCase):
    def test_sheared(self):
        _, _, transition = builders.sheared_transition()
        self.assertTrue(transition.verify().passed)
        report = wall_crossing_verify(transition)
        self.assertTrue(report.passed, report.summary())

    def test_corrected(self):
        _, transitions = builders.corrected_atlas(2)
        for transition in transitions:
            self.assertTrue(transition.verify().passed)
            report = wall_crossing_verify(transition)
            self.assertTrue(report.passed, report.summary())


class TestCocycle(unittest.TestCase):
    def test_shift_triangle(self):
        _, transitions = builders.shift_atlas(3)
        report = cocycle_verify(*triangle(transitions))
        self.assertTrue(report.passed, report.summary())

    def test_corrected_triangle(self):
        _, transitions = builders.corrected_atlas(3)
        report = cocycle_verify(*triangle(transitions))
        self.assertTrue(report.passed, report.summary())

    def test_not_a_triangle(self):
        _, transitions = builders.shift_atlas(3)
        t01, t12, t02 = triangle(transitions)
        with self.assertRaises(DataError):
            cocycle_verify(t01, t02, t12)

    def test_choice_independence(self):
        _, transitions = builders.shift_atlas(2)
        self.assertTrue(choice_independence_verify(transitions[0], transitions[0], {}).passed)


class TestChoiceIndependence(unittest.TestCase):
    """Two C's on one chart, the second carrying C_0 = t1 on the Maslov-0 class."""

    def setUp(self):
        self.chart = builders.chart_at("V", builders.maslov_zero_algebra(), ("0", "0"))
        chart = self.chart
        self.beta = (1,)
        self.plain = identity_transition(chart)
        C = identity_system(chart.space, chart.labels, chart.context)
        corrected = C.with_components({**C.components, (0, self.beta): {(): {chart.space.index("t1"): QQ.one}}})
        self.corrected = TransitionData(chart, chart, self.plain.f_star, (0, 0), corrected, chart.polyhedron)
        self.precision = chart.context.energy_cutoff

    def _homotopy(self, output: str) -> OperatorSystem:
        chart = self.chart
        components = {(0, self.beta): {(): {chart.space.index(output): QQ.one}}}
        return OperatorSystem(chart.space, chart.space, chart.labels, chart.context, components)

    def test_correction_is_absorbed_by_the_ideal(self):
        self.assertIn("t1t2", ideal_generators(self.chart))
        witness = {0: {"t1t2": LaurentSeries.one(2, self.precision)}}
        report = choice_independence_verify(self.corrected, self.plain, witness, self._homotopy("1"))
        self.assertTrue(report.passed, report.summary())
        self.assertGreater(report.checked, 2)

    def test_missing_witness_fails(self):
        report = choice_independence_verify(self.corrected, self.plain, {})
        self.assertFalse(report.passed)
        self.assertEqual(report.labels(), ["choice independence"])
        self.assertIn("Y1", report.first_failure.detail)

    def test_wrong_witness_fails(self):
        witness = {"0": {"t1t2": LaurentSeries.one(2, self.precision) * 2}}
        report = choice_independence_verify(self.corrected, self.plain, witness)
        self.assertEqual(report.labels(), ["choice independence"])

    def test_homotopy_of_wrong_degree(self):
        witness = {0: {"t1t2": LaurentSeries.one(2, self.precision)}}
        report = choice_independence_verify(self.corrected, self.plain, witness, self._homotopy("t1"))
        self.assertEqual(report.labels(), ["homotopy degree"])

    def test_unknown_generator_in_witness(self):
        witness = {0: {"t1": LaurentSeries.one(2, self.precision)}}
        with self.assertRaises(DataError):
            choice_independence_verify(self.corrected, self.plain, witness)


class TestAtlas(unittest.TestCase):
    def test_shift_atlas(self):
        charts, transitions = builders.shift_atlas(3)
        atlas = glue_atlas(charts, transitions)
        self.assertTrue(atlas.report.passed, atlas.report.summary())
        self.assertEqual(atlas.locate(("1/16", "0")), ["U0", "U1"])
        data = atlas.to_json()
        self.assertEqual([chart["name"] for chart in data["charts"]], ["U0", "U1", "U2"])
        self.assertEqual(len(data["transitions"]), 3)

    def test_duplicate_chart(self):
        charts, transitions = builders.shift_atlas(2)
        with self.assertRaises(DataError):
            glue_atlas([charts[0], charts[0]], [])


if __name__ == '__main__':
    unittest.main()
