import unittest

from sympy import QQ

from src.algebra import check_hom, identity_system
from src.fixtures import builders
from src.isotopy import (
    check_isotopy,
    concat_check,
    derivative_check,
    integrate,
    restrict,
    tree_integral_crosscheck,
)

GAUGE = (0, 0, 0, 1)


class TestTrivialIsotopy(unittest.TestCase):
    def test_integral_is_identity(self):
        M = builders.trivial_torus_isotopy()
        self.assertTrue(check_isotopy(M).passed)
        C = integrate(M, 0, 1)
        self.assertTrue(C.equals(identity_system(M.space, M.labels, M.context)))

    def test_parameter_range(self):
        M = builders.trivial_torus_isotopy()
        with self.assertRaises(ValueError):
            restrict(M, 2)
        with self.assertRaises(ValueError):
            integrate(M, 1, 0)


class TestGaugeIsotopy(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.M = builders.gauge_isotopy()

    def test_family_is_an_isotopy(self):
        report = check_isotopy(self.M)
        self.assertTrue(report.passed, report.summary())

    def test_integral_is_a_homomorphism(self):
        C = integrate(self.M, 0, 1)
        report = check_hom(C, restrict(self.M, 0), restrict(self.M, 1))
        self.assertTrue(report.passed, report.summary())
        space = self.M.space
        self.assertEqual(C.get(0, GAUGE), {(): {space.index("t1"): QQ(-1, 2)}})

    def test_concatenation(self):
        report = concat_check(self.M, 0, "1/2", 1)
        self.assertTrue(report.passed, report.summary())
        self.assertGreater(report.checked, 0)

    def test_derivative(self):
        report = derivative_check(self.M)
        self.assertTrue(report.passed, report.summary())

    def test_tree_sum(self):
        for k in range(4):
            for beta in ((0, 0, 0, 0), GAUGE):
                if (k, beta) in ((0, (0, 0, 0, 0)), (1, (0, 0, 0, 0))):
                    continue
                with self.subTest(k=k, beta=beta):
                    report = tree_integral_crosscheck(self.M, k, beta)
                    self.assertTrue(report.passed, report.summary())


class TestFlatGauge(unittest.TestCase):
    def test_family_is_constant(self):
        M = builders.flat_gauge_isotopy()
        self.assertTrue(check_isotopy(M).passed)
        self.assertTrue(restrict(M, "1/2").equals(restrict(M, 0)))

    def test_tree_sum_on_a_subinterval(self):
        M = builders.flat_gauge_isotopy()
        report = tree_integral_crosscheck(M, 1, (1,), "1/4", "3/4")
        self.assertTrue(report.passed, report.summary())
        C = integrate(M, "1/4", "3/4")
        self.assertTrue(check_hom(C, restrict(M, "1/4"), restrict(M, "3/4")).passed)


if __name__ == '__main__':
    unittest.main()
