import unittest
from pathlib import Path

from src.errors import FixtureError
from src.fixtures import BUILTINS, dump_system, load_bundle, load_file, load_isotopy, load_system, read_json
from src.fixtures import builders

DATA = Path(__file__).resolve().parent.parent / "data"

CIRCLE_SPACE = {
    "basis": [{"name": "1", "degree": 0}, {"name": "t1", "degree": 1}],
    "one": "1",
    "divisors": [{"basis": "t1", "class": ["1"]}],
}


class TestLoader(unittest.TestCase):
    def test_dump_and_reload(self):
        m = builders.clifford_algebra()
        again = load_system(dump_system(m))
        self.assertTrue(again.equals(m))
        self.assertTrue(m.equals(again))
        self.assertEqual(again.labels, m.labels)

    def test_inline_system(self):
        m = load_file(DATA / "circle.json", load_system)
        self.assertEqual(m.source.names, ("1", "t1"))
        self.assertEqual(m.labels.dimension, 1)

    def test_builtin_isotopy(self):
        M = load_file(DATA / "trivial_isotopy.json", load_isotopy)
        self.assertEqual(M.c.components, {})

    def test_bundle_shape(self):
        charts, transitions, complex_, witnesses = load_file(DATA / "shift_two.json", load_bundle)
        self.assertEqual([c.name for c in charts], ["U0", "U1"])
        self.assertEqual(len(transitions), 1)
        self.assertIsNone(complex_)
        self.assertEqual(witnesses, {})

    def test_every_bundled_file_parses(self):
        for path in sorted(DATA.glob("*.json")):
            if path.name == "malformed.json":
                continue
            with self.subTest(fixture=path.name):
                self.assertIsInstance(read_json(path), dict)

    def test_builtin_names(self):
        self.assertIn("corrected-atlas", BUILTINS)
        with self.assertRaises(FixtureError):
            load_system({"builtin": "no-such-fixture"})


class TestRejections(unittest.TestCase):
    def test_schema_violation(self):
        with self.assertRaises(FixtureError):
            load_system({"space": {"basis": [{"name": "1"}]}, "components": []})

    def test_malformed_json(self):
        with self.assertRaises(FixtureError):
            read_json(DATA / "malformed.json")

    def test_wrong_arity(self):
        data = {
            "space": CIRCLE_SPACE,
            "components": [{"k": 2, "beta": [0], "entries": [{"in": ["1"], "out": [{"basis": "1", "coef": "1"}]}]}],
        }
        with self.assertRaises(FixtureError):
            load_system(data)

    def test_polynomial_outside_isotopy(self):
        data = {
            "space": CIRCLE_SPACE,
            "components": [{"k": 1, "beta": [0], "entries": [{"in": ["1"], "out": [{"basis": "1", "coef": ["0", "1"]}]}]}],
        }
        with self.assertRaises(FixtureError):
            load_system(data)


if __name__ == '__main__':
    unittest.main()
