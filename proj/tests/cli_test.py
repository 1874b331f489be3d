#!/usr/bin/env python3
#
# Copyright 2026 The dp_linreg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""End-to-end checks of the dp_linreg command line tool.

Usage: cli_test.py PATH_TO_BINARY
"""

import csv
import io
import json
import math
import os
import random
import subprocess
import sys
import tempfile
import unittest

BINARY = None


def run(*args, env=None):
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=env)


class CliTest(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.csv = os.path.join(cls.tmp.name, "data.csv")
        rng = random.Random(0)
        with open(cls.csv, "w") as f:
            f.write("a,b,c,y\n")
            for _ in range(300):
                a, b, c = (rng.gauss(0, 1) for _ in range(3))
                f.write(f"{a:.6f},{b:.6f},{c:.6f},{a + 2 * b - c + rng.gauss(0, 0.5):.6f}\n")

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_fit_reports_budget(self):
        p = run("fit", "--data", self.csv, "--method", "adassp", "--eps", "1", "--seed", "3")
        self.assertEqual(p.returncode, 0, p.stderr)
        out = json.loads(p.stdout)
        self.assertEqual(out["budget_spent"]["epsilon"], 1.0)
        self.assertEqual(len(out["theta"]), 3)
        self.assertEqual(len(out["ledger"]), 3)

    def test_fit_is_reproducible(self):
        args = ("fit", "--data", self.csv, "--method", "adaops", "--eps", "0.5", "--seed", "9")
        self.assertEqual(run(*args).stdout, run(*args).stdout)

    def test_ols_needs_no_budget(self):
        p = run("fit", "--data", self.csv, "--method", "ols")
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertIsNone(json.loads(p.stdout)["budget_spent"])

    def test_private_fit_requires_eps(self):
        p = run("fit", "--data", self.csv, "--method", "adassp")
        self.assertEqual(p.returncode, 2)

    def test_missing_file_names_path(self):
        p = run("fit", "--data", "/no/such/file.csv", "--method", "ols")
        self.assertEqual(p.returncode, 1)
        self.assertIn("/no/such/file.csv", p.stderr)
        self.assertEqual(p.stdout, "")

    def test_bad_flag_is_usage_error(self):
        self.assertEqual(run("fit", "--bogus").returncode, 2)
        self.assertEqual(run().returncode, 2)

    def test_inspect_adaops(self):
        p = run("inspect-calibration", "--method", "adaops", "--eps", "1", "--delta", "6e-6")
        self.assertEqual(p.returncode, 0, p.stderr)
        out = json.loads(p.stdout)
        self.assertAlmostEqual(out["eps_bar"], 0.24777807792045147, places=12)

    def test_inspect_ops_diffuse(self):
        p = run("inspect-calibration", "--method", "ops-diffuse", "--eps", "1", "--delta", "1e-6")
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertAlmostEqual(json.loads(p.stdout)["lambda"], 1 + math.log(2e6), places=10)

    def test_inspect_adassp_has_no_gamma(self):
        p = run("inspect-calibration", "--method", "adassp", "--eps", "1", "--delta", "1e-6")
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertNotIn("gamma", json.loads(p.stdout))

    def test_bench_rows_and_jobs(self):
        args = ("bench", "--data", self.csv, "--estimators", "ols,adassp,ssp",
                "--eps", "0.1,1", "--folds", "3", "--trials", "2", "--seed", "4", "--quiet")
        p = run(*args)
        self.assertEqual(p.returncode, 0, p.stderr)
        rows = list(csv.DictReader(io.StringIO(p.stdout)))
        self.assertEqual(len(rows), 3 * 2 * 2)
        self.assertEqual(list(rows[0].keys()),
                         ["dataset", "estimator", "eps", "delta", "metric", "mean", "std",
                          "trials", "degenerate_count"])
        env = dict(os.environ, DP_LINREG_JOBS="3")
        self.assertEqual(run(*args, env=env).stdout, p.stdout)

    def test_bench_spec_file_and_outputs(self):
        spec = os.path.join(self.tmp.name, "bench.spec")
        out = os.path.join(self.tmp.name, "results.csv")
        jsonl = os.path.join(self.tmp.name, "results.jsonl")
        with open(spec, "w") as f:
            f.write(f"dataset = {self.csv}\nestimators = [trivial, adaops]\neps = [1]\n"
                    "folds = 3\ntrials = 1\nseed = 2\n")
        p = run("bench", "--spec", spec, "--out", out, "--jsonl", jsonl)
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertEqual(p.stdout, "")
        with open(out) as f:
            rows = list(csv.DictReader(f))
        with open(jsonl) as f:
            records = [json.loads(line) for line in f]
        self.assertEqual(len(rows), len(records))
        self.assertEqual(len(rows), 2 * 2)

    def test_synth_bench(self):
        p = run("synth-bench", "--n-grid", "200,400", "--d", "3", "--estimators", "ols",
                "--eps", "1", "--trials", "2", "--quiet")
        self.assertEqual(p.returncode, 0, p.stderr)
        rows = list(csv.DictReader(io.StringIO(p.stdout)))
        self.assertEqual(len(rows), 2 * 3)
        self.assertEqual(rows[0]["dataset"], "synth:n=200,d=3,sigma=1")


if __name__ == "__main__":
    BINARY = sys.argv.pop(1)
    unittest.main()
