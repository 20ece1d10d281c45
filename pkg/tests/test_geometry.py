import unittest
from pathlib import Path

from hypothesis import given, seed, settings, strategies as st
from sympy import QQ

from src.config import get_settings
from src.errors import DataError, EmptyPolyhedron, NonUnimodular, Unbounded
from src.fixtures import load_complex, load_file
from src.geometry import PolyhedralComplex, RationalPolyhedron, affine_transform, validate_complex, vertices

DATA = Path(__file__).resolve().parent.parent / "data"

UNIMODULAR = ([[1, 0], [0, 1]], [[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [1, 1]], [[1, 0], [-3, 1]])
rationals = st.fractions(min_value=-2, max_value=2, max_denominator=6).map(lambda f: QQ(f.numerator, f.denominator))


class TestPolyhedron(unittest.TestCase):
    def test_box_vertices(self):
        square = RationalPolyhedron.box([0, "1/2"], [1, 1])
        self.assertEqual(vertices(square), [(0, QQ(1, 2)), (0, 1), (1, QQ(1, 2)), (1, 1)])
        self.assertEqual(square.min_linear([1, -1]), QQ(-1))
        self.assertEqual(len(square.faces()), 9)

    def test_triangle(self):
        triangle = RationalPolyhedron(2, (((1, 0), 0), ((0, 1), 0), ((-1, -1), "-1/3")))
        self.assertEqual(vertices(triangle), [(0, 0), (0, QQ(1, 3)), (QQ(1, 3), 0)])
        self.assertTrue(triangle.contains(["1/6", "1/6"]))
        self.assertFalse(triangle.contains(["1/4", "1/4"]))

    def test_unbounded_and_empty(self):
        with self.assertRaises(Unbounded):
            RationalPolyhedron(2, (((1, 0), 0), ((0, 1), 0))).vertex_list
        with self.assertRaises(EmptyPolyhedron):
            RationalPolyhedron(1, (((1,), 1), ((-1,), 0))).vertex_list

    def test_dimension_mismatch(self):
        with self.assertRaises(DataError):
            RationalPolyhedron(2, (((1,), 0),))
        with self.assertRaises(DataError):
            RationalPolyhedron.from_json({"ineqs": []})

    def test_affine_transform(self):
        square = RationalPolyhedron.box([0, 0], [1, 1])
        image = affine_transform(square, [[1, 1], [0, 1]], ["1/2", 0])
        self.assertEqual(vertices(image), [(QQ(1, 2), 0), (QQ(3, 2), 0), (QQ(3, 2), 1), (QQ(5, 2), 1)])
        with self.assertRaises(NonUnimodular):
            affine_transform(square, [[2, 0], [0, 1]], [0, 0])

    @seed(get_settings().seed)
    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(UNIMODULAR), st.tuples(rationals, rationals), st.tuples(rationals, rationals))
    def test_affine_image_membership(self, matrix, shift, point):
        square = RationalPolyhedron.box([-1, 0], [1, "1/2"])
        image = affine_transform(square, matrix, shift)
        moved = [sum(matrix[i][j] * point[j] for j in range(2)) + shift[i] for i in range(2)]
        self.assertEqual(square.contains(point), image.contains(moved))


class TestComplex(unittest.TestCase):
    def test_segments_form_a_complex(self):
        report = validate_complex(load_file(DATA / "segments.json", load_complex))
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(report.metadata["cells"], 5)

    def test_overlapping_segments(self):
        report = validate_complex(load_file(DATA / "overlapping_segments.json", load_complex))
        self.assertFalse(report.passed)
        self.assertIn("(iii)", report.labels())

    def test_missing_face(self):
        segment = RationalPolyhedron.box([0], [1])
        report = validate_complex(PolyhedralComplex([segment, RationalPolyhedron.box([0], [0])]))
        self.assertEqual(report.labels(), ["(ii)"])

    def test_bad_cell(self):
        ray = RationalPolyhedron(1, (((1,), 0),))
        report = validate_complex(PolyhedralComplex([ray]))
        self.assertEqual(report.labels(), ["(i)"])

    def test_json(self):
        complex_ = load_file(DATA / "segments.json", load_complex)
        self.assertEqual(PolyhedralComplex.from_json(complex_.to_json()).cells, complex_.cells)


if __name__ == '__main__':
    unittest.main()
