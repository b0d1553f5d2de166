"""End-to-end checks of the web4 command line: outputs and exit codes."""
import json
import os
import shutil
import subprocess
import sys
import tempfile
import unittest

CLI = os.environ.get("WEB4_CLI", "web4")
CORPUS = os.environ["WEB4_CORPUS_DIR"]


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def spec(name):
    return os.path.join(CORPUS, name + ".web")


class Invariants(unittest.TestCase):
    def test_parallel_web_at_origin(self):
        r = run("invariants", spec("parallel"), "--at", "0,0")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        values = doc["invariants"]["values"]
        self.assertEqual(values["a"], 2)
        for key, v in values.items():
            if key != "a":
                self.assertEqual(v, 0, key)
        self.assertEqual(doc["residuals"]["lin1"]["exact"], "0")

    def test_four_pencil_curvature_forms_vanish(self):
        r = run("invariants", spec("pencils"), "--at", "2,3")
        self.assertEqual(r.returncode, 0, r.stderr)
        subwebs = json.loads(r.stdout)["invariants"]["subwebs"]
        for t in ("123", "124", "134", "234"):
            self.assertEqual(subwebs[t]["Theta"], 0)

    def test_duplicate_foliation_is_degenerate(self):
        r = run("invariants", spec("duplicate"), "--at", "0.5,0.25")
        self.assertEqual(r.returncode, 3)
        self.assertIn("general position violated: foliations 1,4", r.stderr)

    def test_output_is_byte_identical(self):
        a = run("invariants", spec("mw1_logistic"), "--at", "0.3,0.2")
        b = run("invariants", spec("mw1_logistic"), "--at", "0.3,0.2")
        self.assertEqual(a.returncode, 0)
        self.assertEqual(a.stdout, b.stdout)

    def test_pretty_output(self):
        r = run("invariants", spec("parallel"), "--at", "0,0", "--pretty")
        self.assertEqual(r.returncode, 0)
        self.assertIn("labels: [Parallelizable, NW, LinearizabilityConditionsHold]", r.stdout)

    def test_overrides(self):
        r = run("invariants", spec("pencils"), "--at", "2,3", "--backend", "float", "--order", "7",
                "--epsilon", "1e-8")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        self.assertEqual(doc["spec"]["backend"], "float")
        self.assertEqual(doc["spec"]["order"], 7)
        self.assertNotIn("exact", doc["invariants"])

    def test_input_errors(self):
        self.assertEqual(run("invariants", spec("parallel"), "--at", "5,0").returncode, 2)
        self.assertEqual(run("invariants", spec("parallel"), "--at", "zero").returncode, 2)
        self.assertEqual(run("invariants", "/nonexistent.web", "--at", "0,0").returncode, 2)
        self.assertEqual(run("invariants", spec("parallel"), "--at", "0,0", "--order", "4").returncode, 2)
        self.assertEqual(run("invariants", spec("mw1_logistic"), "--at", "0,0", "--backend", "rational").returncode, 2)
        self.assertEqual(run("invariants", spec("parallel"), "--at", "0,0", "--json", "--pretty").returncode, 2)
        self.assertEqual(run("invariants", spec("parallel")).returncode, 2)
        self.assertEqual(run().returncode, 2)

    def test_formula_error_reports_position(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "bad.web")
            with open(path, "w") as f:
                f.write('u1 = "x"\nu2 = "y"\nu3 = "x + z"\na = "2"\n')
            r = run("invariants", path, "--at", "0,0")
            self.assertEqual(r.returncode, 2)
            self.assertIn("line 3", r.stderr)
            self.assertIn("offset 4", r.stderr)


class Classify(unittest.TestCase):
    def test_generic_web_exits_zero(self):
        r = run("classify", spec("generic"))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(json.loads(r.stdout)["aggregate"]["labels"], ["Generic"])

    def test_logistic_web(self):
        r = run("classify", spec("mw1_logistic"), "--grid", "3,3")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        self.assertIn("MW_1", doc["aggregate"]["labels"])
        self.assertEqual(len(doc["points"]), 9)
        self.assertEqual(doc["grid"], [3, 3])

    def test_curved_web_note(self):
        r = run("classify", spec("nw_curved"), "--grid", "3,3")
        doc = json.loads(r.stdout)
        self.assertEqual(doc["aggregate"]["labels"], ["NW"])
        self.assertTrue(any("linearizable only if parallelizable" in n for n in doc["aggregate"]["notes"]))

    def test_affine_web_reports_nonzero_residual(self):
        doc = json.loads(run("classify", spec("apw1_affine"), "--grid", "3,3").stdout)
        self.assertEqual(doc["aggregate"]["labels"], ["APW_1"])
        self.assertGreater(doc["aggregate"]["max_residuals"]["lin1"]["abs"], 0)

    def test_empty_admissible_set(self):
        r = run("classify", spec("duplicate"))
        self.assertEqual(r.returncode, 4)
        self.assertIn("EmptyAdmissibleSet", r.stderr)

    def test_bad_grid(self):
        self.assertEqual(run("classify", spec("parallel"), "--grid", "3").returncode, 2)
        self.assertEqual(run("classify", spec("parallel"), "--grid", "0,3").returncode, 2)


class Verify(unittest.TestCase):
    def test_suite_passes(self):
        r = run("verify", "--suite", "parallel")
        self.assertEqual(r.returncode, 0, r.stdout)
        self.assertIn("suite parallel: PASS", r.stdout)

    def test_json_summary(self):
        r = run("verify", "--suite", "cross-ratio", "--json")
        self.assertEqual(r.returncode, 0)
        doc = json.loads(r.stdout)
        self.assertTrue(doc["passed"])
        self.assertEqual(doc["suites"][0]["suite"], "cross-ratio")

    def test_unknown_suite(self):
        self.assertEqual(run("verify", "--suite", "nope").returncode, 2)

    def test_failing_check_exits_one(self):
        with tempfile.TemporaryDirectory() as d:
            for name in os.listdir(CORPUS):
                shutil.copy(os.path.join(CORPUS, name), d)
            with open(os.path.join(d, "parallel.web"), "w") as f:
                f.write('u1 = "x"\nu2 = "y"\nu3 = "x + y"\nu4 = "3*x + y"\ndomain = [-1, 1, -1, 1]\ngrid = [3, 3]\n')
            r = run("verify", "--suite", "parallel", "--corpus", d)
            self.assertEqual(r.returncode, 1)
            self.assertIn("FAIL parallel: [rational] a = 2", r.stdout)
            self.assertIn("first failure:", r.stdout)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)
