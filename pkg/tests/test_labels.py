import unittest

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.config import get_settings
from src.errors import DataError, DivergenceError, NegativeEnergy, NonUnimodular
from src.labels import LabelGroup, add_classes, check_unimodular, classify, enumerate_support, pairing


def group(**overrides):
    data = dict(
        energy=(1, "1/2"),
        maslov=(2, 0),
        boundary=((1, 0), (0, 1)),
        support=((1, 0), (0, 1)),
    )
    data.update(overrides)
    return LabelGroup(**data)


class TestLabelGroup(unittest.TestCase):
    def test_classify(self):
        g = group()
        self.assertEqual(classify(g, (2, 3)), (QQ(7, 2), 4, (2, 3)))
        self.assertEqual(g.cap((1, 2), (3, -1)), QQ(1))
        self.assertEqual(g.dimension, 2)
        self.assertEqual(g.min_energy(), QQ(1, 2))

    def test_validation(self):
        with self.assertRaises(DataError):
            group(maslov=(1, 0))
        with self.assertRaises(DataError):
            group(support=((1, 0, 0),))
        with self.assertRaises(DataError):
            group(boundary=((1, 0), (1,)))
        with self.assertRaises(DataError):
            group(gap=1)

    def test_support_below_cutoff(self):
        classes = enumerate_support(group(), 2)
        self.assertEqual(classes, [(0, 0), (0, 1), (0, 2), (1, 0), (0, 3), (1, 1)])

    def test_splits(self):
        support = group().support_set(3)
        self.assertEqual(support.splits((1, 1)), [((0, 0), (1, 1)), ((0, 1), (1, 0)), ((1, 0), (0, 1)), ((1, 1), (0, 0))])
        self.assertIn((2, 0), support)
        self.assertNotIn((3, 0), support)

    def test_zero_energy_generator_diverges(self):
        with self.assertRaises(DivergenceError):
            group(energy=(0, 1)).support_set(2)

    def test_pushforward(self):
        moved = group().pushforward([[1, 1], [0, 1]], ("1/2", "1/4"))
        self.assertEqual(moved.boundary, ((1, 0), (1, 1)))
        self.assertEqual(moved.energy, (QQ(3, 2), QQ(3, 4)))
        self.assertEqual(moved.maslov, (2, 0))

    def test_pushforward_rejects_negative_energy(self):
        with self.assertRaises(NegativeEnergy):
            group().pushforward([[1, 0], [0, 1]], ("-1", "0"))

    def test_unimodular(self):
        check_unimodular([[2, 1], [1, 1]])
        with self.assertRaises(NonUnimodular):
            check_unimodular([[2, 0], [0, 1]])

    def test_json(self):
        data = group(gap="1/2").to_json()
        self.assertEqual(data["energy"], ["1", "1/2"])
        self.assertEqual(data["gap"], "1/2")


class TestLabelHomomorphism(unittest.TestCase):
    @seed(get_settings().seed)
    @settings(max_examples=200, deadline=None)
    @given(
        st.tuples(st.integers(0, 4), st.integers(0, 4)),
        st.tuples(st.integers(0, 4), st.integers(0, 4)),
        st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
    )
    def test_classify_is_additive(self, a, b, covector):
        g = group()
        ea, ma, da = g.classify(a)
        eb, mb, db = g.classify(b)
        e, m, d = g.classify(add_classes(a, b))
        self.assertEqual(e, ea + eb)
        self.assertEqual(m, ma + mb)
        self.assertEqual(d, tuple(x + y for x, y in zip(da, db)))
        self.assertEqual(g.cap(add_classes(a, b), covector), pairing(da, covector) + pairing(db, covector))


if __name__ == '__main__':
    unittest.main()
