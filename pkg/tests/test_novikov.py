import unittest
from fractions import Fraction

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.config import get_settings
from src.errors import DataError, DomainError
from src.novikov import (
    NovikovNum,
    TruncationContext,
    exp_plus,
    format_rational,
    invert,
    log_one_plus,
    parse_rational,
    valuation,
)

CTX = TruncationContext(QQ(5), 6)
SEED = get_settings().seed

coefficients = st.integers(min_value=-5, max_value=5)


def novikov(min_exponent=0, nonzero=False):
    terms = st.lists(
        st.tuples(st.fractions(min_value=min_exponent, max_value=2, max_denominator=4), coefficients),
        min_size=1 if nonzero else 0,
        max_size=4,
    )
    values = terms.map(lambda ts: NovikovNum(CTX, [(QQ(e.numerator, e.denominator), c) for e, c in ts]))
    if nonzero:
        values = values.filter(lambda x: not x.is_zero())
    return values


class TestParsing(unittest.TestCase):
    def test_parse_and_format(self):
        self.assertEqual(parse_rational("3/6"), QQ(1, 2))
        self.assertEqual(parse_rational(-4), QQ(-4))
        self.assertEqual(format_rational(QQ(7, 1)), "7")
        self.assertEqual(format_rational("-2/4"), "-1/2")

    def test_rejects_garbage(self):
        for bad in ("abc", True, None, 0.5):
            with self.assertRaises(DataError):
                parse_rational(bad)

    def test_context_validation(self):
        with self.assertRaises(DataError):
            TruncationContext(QQ(0), 3)
        with self.assertRaises(DataError):
            TruncationContext(QQ(1), 0)


class TestArithmetic(unittest.TestCase):
    def test_truncation_drops_high_terms(self):
        x = NovikovNum(CTX, [(0, 1), (5, 3), (QQ(9, 2), 2)])
        self.assertEqual(x.terms, ((QQ(0), QQ(1)), (QQ(9, 2), QQ(2))))

    def test_valuation_and_predicates(self):
        x = NovikovNum.monomial(CTX, "1/2", 3) + NovikovNum.monomial(CTX, 2, 1)
        self.assertEqual(valuation(x), QQ(1, 2))
        self.assertTrue(x.in_ideal())
        self.assertTrue((x + 1).is_unit())
        self.assertFalse(NovikovNum.monomial(CTX, -1).in_ring())

    def test_invert_zero(self):
        with self.assertRaises(ZeroDivisionError):
            invert(NovikovNum.zero(CTX))

    def test_invert_geometric_series(self):
        x = NovikovNum.one(CTX) - NovikovNum.monomial(CTX, 1)
        expected = NovikovNum(CTX, [(n, 1) for n in range(5)])
        self.assertEqual(x.invert(), expected)

    def test_exp_plus_needs_positive_valuation(self):
        with self.assertRaises(DomainError):
            exp_plus(NovikovNum.one(CTX))

    def test_exp_of_monomial(self):
        y = NovikovNum.monomial(CTX, 2)
        self.assertEqual(exp_plus(y), NovikovNum(CTX, [(0, 1), (2, 1), (4, QQ(1, 2))]))

    def test_ring_mode(self):
        ring = TruncationContext(QQ(3), 2, field=False)
        with self.assertRaises(DomainError):
            NovikovNum.monomial(ring, -1)
        with self.assertRaises(DomainError):
            NovikovNum.monomial(ring, 1).invert()

    def test_truncate_is_monotone(self):
        x = NovikovNum(CTX, [(0, 1), (3, 2), (4, 1)])
        self.assertEqual(x.truncate(QQ(7, 2)).terms, ((QQ(0), QQ(1)), (QQ(3), QQ(2))))
        with self.assertRaises(DomainError):
            x.truncate(6)

    def test_json(self):
        x = NovikovNum(CTX, [("1/3", "2/5"), (0, -1)])
        self.assertEqual(NovikovNum.from_json(x.to_json(), CTX), x)
        with self.assertRaises(DataError):
            NovikovNum.from_json([{"e": "1"}], CTX)


class TestFieldAxioms(unittest.TestCase):
    @seed(SEED)
    @settings(max_examples=1000, deadline=None)
    @given(novikov(), novikov(), novikov())
    def test_ring_axioms(self, x, y, z):
        self.assertEqual(x + y, y + x)
        self.assertEqual((x + y) + z, x + (y + z))
        self.assertEqual(x * y, y * x)
        self.assertEqual((x * y) * z, x * (y * z))
        self.assertEqual(x * (y + z), x * y + x * z)
        self.assertEqual(x - x, NovikovNum.zero(CTX))

    @seed(SEED)
    @settings(max_examples=300, deadline=None)
    @given(novikov(nonzero=True), novikov(nonzero=True))
    def test_valuation_is_multiplicative(self, x, y):
        self.assertEqual(valuation(x * y), valuation(x) + valuation(y))
        if not (x + y).is_zero():
            self.assertGreaterEqual(valuation(x + y), min(valuation(x), valuation(y)))

    @seed(SEED)
    @settings(max_examples=300, deadline=None)
    @given(novikov(nonzero=True))
    def test_inverse(self, x):
        self.assertEqual(x * x.invert(), NovikovNum.one(CTX))

    @seed(SEED)
    @settings(max_examples=300, deadline=None)
    @given(novikov(min_exponent=Fraction(1, 4)))
    def test_exp_log_round_trip(self, y):
        y = NovikovNum(CTX, [(e, c) for e, c in y.terms if e > 0])
        self.assertEqual(log_one_plus(exp_plus(y)), y)
        self.assertEqual(exp_plus(log_one_plus(y + 1)), y + 1)

    @seed(SEED)
    @settings(max_examples=200, deadline=None)
    @given(novikov(min_exponent=Fraction(1, 4)), novikov(min_exponent=Fraction(1, 4)))
    def test_exp_is_a_homomorphism(self, x, y):
        x = NovikovNum(CTX, [(e, c) for e, c in x.terms if e > 0])
        y = NovikovNum(CTX, [(e, c) for e, c in y.terms if e > 0])
        self.assertEqual(exp_plus(x + y), exp_plus(x) * exp_plus(y))


if __name__ == '__main__':
    unittest.main()
