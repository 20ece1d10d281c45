import unittest

from sympy import QQ

from src.algebra import (
    check_ainf,
    check_cyclic_unit,
    check_divisor_axiom,
    check_full_unit,
    check_ud_object,
    check_unit,
    compose,
    identity_system,
    mc_eval,
    star,
    weak_mc_potential,
)
from src.algebra.checks import check_hom, check_ud_morphism
from src.errors import DegreeError, MissingBoundaryMap
from src.fixtures import builders
from src.labels import LabelGroup
from src.novikov import NovikovNum, TruncationContext


class TestTorusAlgebra(unittest.TestCase):
    def assertPasses(self, report):
        self.assertTrue(report.passed, report.summary())

    def test_rank_two_and_three(self):
        for n in (2, 3):
            with self.subTest(rank=n):
                m = builders.qcdr_torus(n, context=builders.context_of("2", 3))
                self.assertPasses(check_ainf(m))
                self.assertPasses(check_unit(m))
                self.assertPasses(check_full_unit(m))
                self.assertPasses(check_cyclic_unit(m))
                self.assertPasses(check_divisor_axiom(m))

    def test_unsigned_wedge_fails_associativity(self):
        report = check_ainf(builders.qcdr_torus(2, signed=False))
        self.assertFalse(report.passed)
        first = report.first_failure
        self.assertEqual((first.k, first.beta), (3, [0]))

    def test_product_table(self):
        m = builders.qcdr_torus(2)
        space = m.source
        t1, t2, t12 = space.index("t1"), space.index("t2"), space.index("t1t2")
        m20 = m.get(2, m.zero_class)
        self.assertEqual(m20[(t1, t2)], {t12: QQ(-1)})
        self.assertEqual(m20[(t2, t1)], {t12: QQ(1)})
        self.assertNotIn((t1, t1), m20)

    def test_star_vanishes(self):
        m = builders.qcdr_torus(2)
        self.assertEqual(star(m, m).components, {})

    def test_degree_error(self):
        m = builders.qcdr_torus(2)
        space = m.source
        bad = m.with_components({(2, m.zero_class): {(space.index("t1"), space.index("t1")): {space.one: QQ.one}}})
        with self.assertRaises(DegreeError):
            check_ainf(bad)

    def test_missing_boundary_map(self):
        m = builders.qcdr_torus(2, labels=LabelGroup((), (), (), ()))
        with self.assertRaises(MissingBoundaryMap):
            check_divisor_axiom(m)


class TestDeformedTorus(unittest.TestCase):
    def test_single_class_is_ud(self):
        m = builders.deformed_torus([{"energy": 1, "maslov": 2, "boundary": (1, 0), "coef": 1}], builders.context_of("3", 3))
        report = check_ud_object(m)
        self.assertTrue(report.passed, report.summary())

    def test_clifford_is_ud(self):
        report = check_ud_object(builders.clifford_algebra())
        self.assertTrue(report.passed, report.summary())
        self.assertIn("(I-4)", [child.name for child in report.children])

    def test_curvature_components(self):
        m = builders.clifford_algebra()
        space = m.source
        self.assertEqual(m.get(0, (1, 0, 0)), {(): {space.one: QQ.one}})
        self.assertEqual(m.get(1, (0, 0, 1))[(space.index("t2"),)], {space.one: QQ(-1)})
        t1 = space.index("t1")
        self.assertEqual(m.get(2, (1, 0, 0))[(t1, t1)], {space.one: QQ(1, 2)})

    def test_negative_maslov_is_flagged(self):
        report = check_ud_object(builders.negative_maslov_torus())
        self.assertFalse(report.passed)
        self.assertIn("(I-5)", report.labels())

    def test_identity_is_a_ud_morphism(self):
        m = builders.clifford_algebra()
        identity = identity_system(m.source, m.labels, m.context)
        self.assertTrue(check_hom(identity, m, m).passed)
        self.assertTrue(check_ud_morphism(identity, m, m).passed)
        self.assertTrue(compose(identity, identity).equals(identity))


class TestMaurerCartan(unittest.TestCase):
    def setUp(self):
        self.ctx = TruncationContext(QQ(5, 2), 3)

    def divisor(self, m, t1, t2):
        space = m.source
        return {space.index("t1"): NovikovNum.monomial(self.ctx, 1, t1), space.index("t2"): NovikovNum.monomial(self.ctx, 1, t2)}

    def test_clifford_potential(self):
        m = builders.clifford_algebra()
        a, rest = weak_mc_potential(m, self.divisor(m, 1, 1))
        self.assertEqual(rest, {})
        self.assertEqual(a, NovikovNum.monomial(self.ctx, 1, 3))

    def test_direct_sum_agrees(self):
        m = builders.clifford_algebra()
        value = mc_eval(m, self.divisor(m, 2, -1))
        one = m.source.one
        # T e^{2T} + T e^{-T} + T e^{-T}
        self.assertEqual(value[one], NovikovNum.monomial(self.ctx, 1, 3))

    def test_maslov_zero_obstruction(self):
        m = builders.maslov_zero_algebra()
        a, rest = weak_mc_potential(m, self.divisor(m, 1, 0))
        self.assertTrue(a.is_zero())
        self.assertEqual(rest, {m.source.index("t1t2"): NovikovNum(self.ctx, [(1, 1), (2, 1)])})


if __name__ == '__main__':
    unittest.main()
