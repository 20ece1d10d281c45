import unittest

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.config import get_settings
from src.labels import LabelGroup
from src.trees import (
    AllocationPolytope,
    DecoratedTree,
    allocation_volume,
    enumerate_trees,
    integrate_allocation,
    super_catalan,
    tree_to_string,
)

TRIVIAL = LabelGroup((), (), (), ()).support_set(1)
DISK = LabelGroup((1,), (2,), ((1,),), ((1,),)).support_set(3)


class TestEnumeration(unittest.TestCase):
    def test_undecorated_counts(self):
        counts = [len(enumerate_trees(k, (), TRIVIAL)) for k in range(2, 6)]
        self.assertEqual(counts, [1, 3, 11, 45])

    def test_super_catalan(self):
        self.assertEqual([super_catalan(k) for k in range(1, 8)], [1, 1, 3, 11, 45, 197, 903])

    def test_degenerate_inputs(self):
        self.assertEqual(enumerate_trees(0, (), TRIVIAL), [])
        self.assertEqual(enumerate_trees(1, (), TRIVIAL), [DecoratedTree()])

    def test_decorated_vertices(self):
        self.assertEqual([tree_to_string(t) for t in enumerate_trees(0, (1,), DISK)], ["(1:)"])
        one_input = [tree_to_string(t) for t in enumerate_trees(1, (1,), DISK)]
        self.assertEqual(sorted(one_input), ["(0:(1:)x)", "(0:x(1:))", "(1:x)"])
        self.assertEqual(enumerate_trees(1, (4,), DISK), [])

    def test_trees_are_stable(self):
        for tree in enumerate_trees(2, (2,), DISK):
            self.assertTrue(tree.is_stable())
            self.assertEqual(tree.leaves, 2)
            self.assertEqual(tree.total_class(1), (2,))

    @seed(get_settings().seed)
    @settings(max_examples=5, deadline=None)
    @given(st.integers(min_value=2, max_value=6))
    def test_count_matches_super_catalan(self, k):
        self.assertEqual(len(enumerate_trees(k, (), TRIVIAL)), super_catalan(k))


class TestAllocation(unittest.TestCase):
    def test_chain_volume(self):
        parents = {0: None, 1: 0, 2: 1}
        self.assertEqual(AllocationPolytope.from_parents(parents, 0, 1).volume(), QQ(1, 6))

    def test_branching_volume(self):
        parents = {0: None, 1: 0, 2: 0}
        # tau1, tau2 <= tau0 independently: integral of tau0^2
        self.assertEqual(AllocationPolytope.from_parents(parents, 0, 1).volume(), QQ(1, 3))

    def test_single_vertex(self):
        tree = enumerate_trees(2, (), TRIVIAL)[0]
        self.assertEqual(allocation_volume(tree, "1/4", 1), QQ(3, 4))
        R, tau0 = AllocationPolytope.of_tree(tree, 0, 1).polynomial_ring()
        self.assertEqual(integrate_allocation(tree, tau0, 0, 1), QQ(1, 2))

    def test_empty_tree(self):
        self.assertEqual(allocation_volume(DecoratedTree(), 0, 1), QQ.one)

    def test_reversed_interval(self):
        tree = enumerate_trees(2, (), TRIVIAL)[0]
        with self.assertRaises(ValueError):
            allocation_volume(tree, 1, 0)

    @seed(get_settings().seed)
    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=2, max_value=4), st.integers(min_value=0, max_value=100), st.fractions(min_value=0, max_value=3, max_denominator=5))
    def test_volume_scales(self, k, pick, length):
        trees = enumerate_trees(k, (), TRIVIAL)
        tree = trees[pick % len(trees)]
        c = QQ(length.numerator, length.denominator)
        unit = allocation_volume(tree, 0, 1)
        self.assertGreater(unit, 0)
        self.assertLessEqual(unit, 1)
        self.assertEqual(allocation_volume(tree, 0, c), unit * c ** tree.interior_count)


if __name__ == '__main__':
    unittest.main()
