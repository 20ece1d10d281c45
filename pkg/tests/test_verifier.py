import io
import json
import unittest
from contextlib import redirect_stdout
from pathlib import Path

from src.fixtures import load_bundle, read_json
from src.verifier import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main, retruncate, run_pipeline

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def run(*argv):
    """Runs the CLI and returns (exit code, parsed JSON output)."""
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main([*argv, "--json", "--config", str(ROOT / "config.json")])
    output = buffer.getvalue()
    return code, json.loads(output) if output.strip() else None


class TestVerify(unittest.TestCase):
    def test_ainf_passes(self):
        code, payload = run("verify", "ainf", str(DATA / "torus_qcdr.json"))
        self.assertEqual(code, EXIT_PASS)
        self.assertTrue(payload["report"]["passed"])
        self.assertIn("seed", payload["report"]["metadata"])

    def test_unsigned_torus_fails(self):
        code, payload = run("verify", "ainf", str(DATA / "torus_unsigned.json"))
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(payload["report"]["failures"][0]["k"], 3)

    def test_negative_maslov(self):
        code, payload = run("verify", "ud", str(DATA / "negative_maslov.json"))
        self.assertEqual(code, EXIT_FAIL)
        self.assertIn("(I-5)", [f["label"] for f in payload["report"]["failures"]])

    def test_inline_fixture(self):
        code, _ = run("verify", "ainf", str(DATA / "circle.json"))
        self.assertEqual(code, EXIT_PASS)

    def test_malformed_input(self):
        code, payload = run("verify", "ainf", str(DATA / "malformed.json"))
        self.assertEqual(code, EXIT_INPUT)
        self.assertIsNone(payload)

    def test_missing_file(self):
        code, _ = run("verify", "complex", str(DATA / "does_not_exist.json"))
        self.assertEqual(code, EXIT_INPUT)

    def test_complex(self):
        self.assertEqual(run("verify", "complex", str(DATA / "segments.json"))[0], EXIT_PASS)
        self.assertEqual(run("verify", "complex", str(DATA / "overlapping_segments.json"))[0], EXIT_FAIL)

    def test_lowered_cutoffs(self):
        code, payload = run("verify", "ainf", str(DATA / "torus_rank3.json"), "--emax", "1", "--kmax", "2")
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(payload["report"]["metadata"]["length_cutoff"], 2)


class TestCompute(unittest.TestCase):
    def test_trees(self):
        code, payload = run("compute", "trees", "--k", "4")
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(payload["count"], 11)
        self.assertEqual(len(payload["trees"]), 11)

    def test_canonical_model(self):
        code, payload = run("compute", "canonical-model", str(DATA / "canonical_tilted.json"))
        self.assertEqual(code, EXIT_PASS)
        self.assertTrue(payload["report"]["passed"])
        self.assertEqual(len(payload["model"]["space"]["basis"]), 4)

    def test_superpotential(self):
        code, payload = run("compute", "superpotential", str(DATA / "one_chart.json"), "--point", "U0:1/2,1/2")
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(payload["values"][0]["chart"], "U0")
        self.assertIn("U0", payload["superpotentials"])

    def test_unknown_chart(self):
        code, _ = run("compute", "superpotential", str(DATA / "one_chart.json"), "--point", "U9:0,0")
        self.assertEqual(code, EXIT_INPUT)


class TestPipeline(unittest.TestCase):
    def test_one_chart(self):
        code, payload = run("pipeline", str(DATA / "one_chart.json"))
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual([row["stage"] for row in payload["summary"]][-1], "atlas")

    def test_broken_margin(self):
        code, payload = run("pipeline", str(DATA / "broken_margin.json"))
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(payload["stage"], "gluing")

    def test_shift_bundle_in_process(self):
        bundle = retruncate(load_bundle(read_json(DATA / "shift_two.json")), kmax=2)
        atlas, summary = run_pipeline(bundle, progress=False)
        self.assertTrue(atlas.report.passed, atlas.report.summary())
        self.assertEqual([row["stage"] for row in summary][:2], ["charts", "gluing"])


if __name__ == '__main__':
    unittest.main()
