"""End-to-end checks of the renewal_arma binary: exit codes, determinism,
manifests and schema validity of every JSON output.

usage: cli_test.py <renewal_arma binary> <schemas dir>
"""

import hashlib
import json
import os
import subprocess
import sys
import tempfile
import time
import unittest
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

BIN = None
SCHEMAS = None
REGISTRY = None

P2 = ["--head", "0.2,0.3", "--r", "0.6", "--M", "5"]


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=full_env)


def validate(doc, kind):
    schema = json.loads((SCHEMAS / f"{kind}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(doc)


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Factorize(unittest.TestCase):
    def test_white_noise(self):
        out = run("factorize", "--head", "0.5", "--r", "0.5", "--M", "1")
        self.assertEqual(out.returncode, 0, out.stderr)
        doc = json.loads(out.stdout)
        validate(doc, "factorize")
        validate(doc, "model")
        self.assertEqual(doc["phi"], [])
        self.assertEqual(doc["theta"], [])
        self.assertAlmostEqual(doc["k"], 0.5, places=12)

    def test_running_example(self):
        out = run("factorize", *P2, "--hmax", "2")
        self.assertEqual(out.returncode, 0, out.stderr)
        doc = json.loads(out.stdout)
        validate(doc, "factorize")
        self.assertAlmostEqual(doc["phi"][0], -0.2, places=12)
        self.assertAlmostEqual(doc["phi"][1], -0.02, places=12)
        self.assertAlmostEqual(doc["theta"][0], 6.176887918124478519e-3, places=12)
        self.assertAlmostEqual(doc["acvf"][1], -0.209621069604944907, places=12)
        self.assertEqual(len(doc["acvf"]), 3)
        self.assertTrue(doc["roots"]["passed"])
        self.assertAlmostEqual(doc["k_constant_term"], doc["k_variance_route"], places=12)

    def test_two_point_support_is_valid(self):
        out = run("factorize", "--head", "0.4,0.6", "--r", "0")
        self.assertEqual(out.returncode, 0, out.stderr)

    def test_lattice_exit_code(self):
        out = run("factorize", "--head", "0,1", "--r", "0")
        self.assertEqual(out.returncode, 3)
        self.assertIn("lattice", out.stderr)

    def test_invalid_mass(self):
        self.assertEqual(run("factorize", "--head", "0.7,0.6", "--r", "0.5").returncode, 3)

    def test_argument_errors(self):
        self.assertEqual(run("factorize", "--head", "0.2", "--r", "abc").returncode, 2)
        self.assertEqual(run("factorize", "--head", "0.2", "--r", "0.5", "--M", "0").returncode, 2)
        self.assertEqual(run("factorize").returncode, 2)
        self.assertEqual(run().returncode, 2)

    def test_pgf_input(self):
        out = run("factorize", "--pgf-num", "0,0.5", "--pgf-den", "1,-0.5")
        self.assertEqual(out.returncode, 0, out.stderr)
        doc = json.loads(out.stdout)
        validate(doc, "factorize")
        self.assertAlmostEqual(doc["k"], 0.5, places=12)
        self.assertEqual(run("factorize", "--pgf-num", "0,0,1", "--pgf-den", "1").returncode, 3)

    def test_config_file_and_override(self):
        with tempfile.TemporaryDirectory() as tmp:
            cfg = Path(tmp) / "c.json"
            cfg.write_text(json.dumps({"head": [0.2, 0.3], "r": 0.6, "M": 5, "hmax": 4}))
            doc = json.loads(run("factorize", "--config", str(cfg)).stdout)
            self.assertEqual(len(doc["acvf"]), 5)
            doc = json.loads(run("factorize", "--config", str(cfg), "--hmax", "1").stdout)
            self.assertEqual(len(doc["acvf"]), 2)

    def test_help(self):
        out = run("--help")
        self.assertEqual(out.returncode, 0)
        self.assertIn("simulate", out.stdout)
        verify_help = run("verify", "--help").stdout
        self.assertIn("divisor n", verify_help)


class Simulate(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def simulate(self, name, *extra, env=None):
        path = self.dir / name
        out = run("simulate", *P2, "--steps", "20000", "--seed", "11", "--out", str(path), *extra, env=env)
        self.assertEqual(out.returncode, 0, out.stderr)
        return path, json.loads(out.stdout)

    def test_fixed_seed_is_reproducible(self):
        a, ma = self.simulate("a.csv")
        b, _ = self.simulate("b.csv")
        self.assertEqual(sha256(a), sha256(b))
        validate(ma, "manifest")
        self.assertEqual(ma["outputs"][0]["sha256"], sha256(a))
        side = json.loads(Path(str(a) + ".manifest.json").read_text())
        validate(side, "manifest")
        self.assertEqual(side["parameters"]["head"], [0.2, 0.3])

    def test_thread_count_does_not_matter(self):
        a, _ = self.simulate("a.csv", env={"RENEWAL_ARMA_THREADS": "1"})
        b, _ = self.simulate("b.csv", env={"RENEWAL_ARMA_THREADS": "3"})
        self.assertEqual(sha256(a), sha256(b))

    def test_seed_changes_output(self):
        a, _ = self.simulate("a.csv")
        path = self.dir / "c.csv"
        run("simulate", *P2, "--steps", "20000", "--seed", "12", "--out", str(path))
        self.assertNotEqual(sha256(a), sha256(path))

    def test_csv_layout(self):
        a, _ = self.simulate("a.csv")
        raw = a.read_bytes()
        self.assertNotIn(b"\r", raw)
        lines = raw.decode().split("\n")
        self.assertTrue(lines[0].startswith("# meta: {"))
        self.assertEqual(lines[1], "t,y")
        self.assertEqual(len([l for l in lines[2:] if l]), 20000)
        for line in lines[2:50]:
            t, y = line.split(",")
            self.assertTrue(0 <= int(y) <= 5)

    def test_json_format(self):
        a, _ = self.simulate("a.json", "--format", "json")
        doc = json.loads(a.read_text())
        validate(doc, "series")
        self.assertEqual(len(doc["values"]), 20000)

    def test_manifest_replay(self):
        a, _ = self.simulate("a.csv")
        replay = self.dir / "replay.csv"
        out = run("simulate", "--config", str(a) + ".manifest.json", "--out", str(replay))
        self.assertEqual(out.returncode, 0, out.stderr)
        self.assertEqual(sha256(a), sha256(replay))

    def test_source_date_epoch(self):
        _, m = self.simulate("a.csv", env={"SOURCE_DATE_EPOCH": "0"})
        self.assertEqual(m["timestamp"], "1970-01-01T00:00:00Z")

    def test_errors(self):
        self.assertEqual(run("simulate", *P2, "--steps", "0", "--out", str(self.dir / "x.csv")).returncode, 2)
        self.assertEqual(run("simulate", *P2, "--steps", "10", "--out", "/nonexistent/dir/x.csv").returncode, 1)
        self.assertEqual(run("simulate", *P2, "--steps", "10", "--out", str(self.dir / "x"), "--format", "xml").returncode, 2)
        self.assertEqual(run("simulate", *P2, "--steps", "10", "--out", str(self.dir / "x.csv"),
                             env={"RENEWAL_ARMA_THREADS": "lots"}).returncode, 2)

    def test_verify_series_file(self):
        path = self.dir / "big.csv"
        out = run("simulate", *P2, "--steps", "1000000", "--seed", "5", "--out", str(path))
        self.assertEqual(out.returncode, 0, out.stderr)
        out = run("verify", "--series", str(path), "--json")
        self.assertEqual(out.returncode, 0, out.stdout)
        doc = json.loads(out.stdout)
        validate(doc, "verify")
        gates = {g["name"]: g for g in doc["gates"]}
        self.assertTrue(gates["series.mean_z"]["passed"])


class Verify(unittest.TestCase):
    def test_quick(self):
        start = time.monotonic()
        out = run("verify", *P2)
        self.assertLess(time.monotonic() - start, 1.0)
        self.assertEqual(out.returncode, 0, out.stdout)
        self.assertIn("gates passed", out.stdout)
        self.assertNotIn("FAIL", out.stdout)

    def test_full_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            report = Path(tmp) / "r.json"
            start = time.monotonic()
            out = run("verify", *P2, "--level", "full", "--json", "--report", str(report))
            self.assertLess(time.monotonic() - start, 60.0)
            self.assertEqual(out.returncode, 0, out.stdout)
            doc = json.loads(out.stdout)
            validate(doc, "verify")
            self.assertEqual(doc, json.loads(report.read_text()))
            names = [g["name"] for g in doc["gates"]]
            self.assertIn("simulate.mean_z", names)
            self.assertIn("markov.order3_refinement_z", names)

    def test_corrupted_model(self):
        with tempfile.TemporaryDirectory() as tmp:
            model = json.loads(run("factorize", *P2).stdout)
            model["phi"][0] = 1.5
            path = Path(tmp) / "bad.json"
            path.write_text(json.dumps(model))
            out = run("verify", *P2, "--model", str(path), "--json")
            self.assertEqual(out.returncode, 5)
            gates = {g["name"]: g for g in json.loads(out.stdout)["gates"]}
            self.assertFalse(gates["arma.causal_invertible"]["passed"])
            path.write_text("{not json")
            self.assertEqual(run("verify", *P2, "--model", str(path)).returncode, 3)


class Markov(unittest.TestCase):
    def test_tables(self):
        out = run("markov", *P2, "--mgf", "0,0,0", "--mgf", "0.1,-0.2,0.3")
        self.assertEqual(out.returncode, 0, out.stderr)
        doc = json.loads(out.stdout)
        validate(doc, "markov")
        self.assertAlmostEqual(doc["conditional"]["p1g00"], 0.4, places=12)
        self.assertEqual(doc["mgf"][0]["value"], 1.0)
        self.assertAlmostEqual(doc["joint"]["p123"], 0.0131147540983606557, places=14)

    def test_other_lags_rejected(self):
        out = run("markov", "--head", "0.2,0.3,0.1", "--r", "0.6")
        self.assertEqual(out.returncode, 2)
        self.assertIn("unsupported order", out.stderr)
        self.assertEqual(run("markov", *P2, "--mgf", "0,0").returncode, 2)


if __name__ == "__main__":
    BIN = sys.argv[1]
    SCHEMAS = Path(sys.argv[2])
    resources = []
    for f in SCHEMAS.glob("*.schema.json"):
        schema = json.loads(f.read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        resources.append((schema["$id"], Resource.from_contents(schema)))
    REGISTRY = Registry().with_resources(resources)
    unittest.main(argv=sys.argv[:1], verbosity=2)
