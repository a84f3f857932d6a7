#!/usr/bin/env python3
"""
Test suite for the hetnet command line
"""

import asyncio
import csv
import json
import os
import shutil
import tempfile
import unittest

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from hetnet import (EXIT_FAILED, EXIT_INVALID, EXIT_OK, EXIT_UNSUPPORTED, HetNet, build_parser, compare_index,
                    exit_code_for, format_table, main, sweep_grid)
from models.exceptions import AssumptionViolation, SearchFailed, UnsupportedForm, UnsupportedRegime
from models.extended_real import ExtReal, NEG_INF, POS_INF
from models.report import IndexEstimate
from networks import b3b3
from utils.config import load_run_config
from utils.database import ResultsDatabase

FIXTURES = Path(__file__).parent.parent / "config" / "fixtures"


def estimate_with(sigma: ExtReal, fractions, samples: int = 10000) -> IndexEstimate:
    return IndexEstimate(
        network="B3B3", connection="12", level="network", eps_grid=[0.1, 0.01, 0.001][:len(fractions)],
        attracted_fraction=list(fractions), attracted=[int(f * samples) for f in fractions],
        escaped=[samples - int(f * samples) for f in fractions], undecided=[0] * len(fractions),
        sigma_plus=sigma, sigma_minus=ExtReal(0.0), sigma=sigma, samples=samples, seed=1,
    )


class TestHelpers(unittest.TestCase):
    """Test suite for the pure helpers behind the commands"""

    def test_exit_codes(self):
        """Test error classes map to exit codes"""
        self.assertEqual(exit_code_for(UnsupportedRegime("x")), EXIT_UNSUPPORTED)
        self.assertEqual(exit_code_for(UnsupportedForm("x")), EXIT_UNSUPPORTED)
        self.assertEqual(exit_code_for(SearchFailed("x")), EXIT_FAILED)
        self.assertEqual(exit_code_for(AssumptionViolation("x")), EXIT_INVALID)

    def test_format_table(self):
        """Test the plain-text report lists every connection"""
        config = load_run_config(str(FIXTURES / "p0.json"))
        report = b3b3.analyze(config.build_spec(), config.assumptions)
        table = format_table(report)
        self.assertIn("regime contracting_network", table)
        self.assertIn("c[xi3]", table)
        for connection in ("12", "23", "31", "24", "41"):
            self.assertTrue(any(line.startswith(connection) for line in table.splitlines()), connection)
        self.assertIn("+inf", table)

    def test_compare_finite(self):
        """Test finite values pass within tolerance"""
        delta, passed, _ = compare_index(ExtReal(1.0), estimate_with(ExtReal(1.1), [0.9, 0.99]), 0.15)
        self.assertAlmostEqual(delta, 0.1)
        self.assertTrue(passed)
        _, passed, _ = compare_index(ExtReal(1.0), estimate_with(ExtReal(1.3), [0.9, 0.99]), 0.15)
        self.assertFalse(passed)

    def test_compare_thick(self):
        """Test thick values only need the right sign"""
        _, passed, note = compare_index(ExtReal(-0.5), estimate_with(ExtReal(-1.2), [0.5, 0.1]), 0.15, thick=True)
        self.assertTrue(passed)
        self.assertIn("sign only", note)

    def test_compare_infinite(self):
        """Test infinite values against the trend of the attracted fraction"""
        _, passed, _ = compare_index(POS_INF, estimate_with(POS_INF, [1.0, 1.0]), 0.15)
        self.assertTrue(passed)
        _, passed, _ = compare_index(POS_INF, estimate_with(ExtReal(3.0), [0.99, 0.999, 1.0]), 0.15)
        self.assertTrue(passed)
        _, passed, _ = compare_index(POS_INF, estimate_with(ExtReal(-1.0), [0.5, 0.05, 0.005]), 0.15)
        self.assertFalse(passed)
        _, passed, _ = compare_index(NEG_INF, estimate_with(ExtReal(-1.0), [0.5, 0.05, 0.005]), 0.15)
        self.assertTrue(passed)

    def test_sweep_grid(self):
        """Test the cartesian grid of sweep axes"""
        config = load_run_config(str(FIXTURES / "sweep_sigma.json"))
        grid = sweep_grid(config)
        self.assertEqual(len(grid), 6)
        self.assertAlmostEqual(grid[0]["c13"], 0.5)
        self.assertAlmostEqual(grid[-1]["c13"], 1.5)
        self.assertEqual(sweep_grid(load_run_config(str(FIXTURES / "p0.json"))), [])


class TestCommands(unittest.TestCase):
    """Test suite for the commands end to end"""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.out_dir = os.path.join(self.test_dir, "reports")
        self.db_path = os.path.join(self.test_dir, "hetnet.db")

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def run_cli(self, *argv) -> int:
        return asyncio.run(main(list(argv) + ["--out", self.out_dir, "--db-path", self.db_path]))

    def write_config(self, name: str, payload: dict) -> str:
        path = os.path.join(self.test_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        return path

    def p0_payload(self) -> dict:
        with open(FIXTURES / "p0.json", encoding="utf-8") as f:
            return json.load(f)

    def test_analyze(self):
        """Test analyze writes the report and its table"""
        code = self.run_cli("analyze", "--config", str(FIXTURES / "p0.json"))
        self.assertEqual(code, EXIT_OK)

        with open(os.path.join(self.out_dir, "analyze_B3B3.json"), encoding="utf-8") as f:
            report = json.load(f)
        self.assertEqual(report["regime"], "contracting_network")
        n_index = {record["connection"]: record["n_index"] for record in report["records"]}
        self.assertEqual(n_index["23"], "inf")
        self.assertAlmostEqual(n_index["12"], 1.0)
        self.assertTrue(os.path.exists(os.path.join(self.out_dir, "analyze_B3B3.txt")))

    def test_missing_config(self):
        """Test commands other than status need --config"""
        self.assertEqual(self.run_cli("analyze"), EXIT_INVALID)

    def test_invalid_eigenvalue(self):
        """Test a negative expanding rate is rejected"""
        payload = self.p0_payload()
        payload["eigenvalues"]["e12"] = -1.0
        self.assertEqual(self.run_cli("analyze", "--config", self.write_config("bad.json", payload)), EXIT_INVALID)

    def test_unsupported_regime(self):
        """Test c34 < 0 and c43 < 0 together"""
        payload = self.p0_payload()
        payload["assumptions"] = []
        payload["eigenvalues"].update({"c34": -0.1, "c43": -0.3})
        code = self.run_cli("analyze", "--config", self.write_config("both.json", payload))
        self.assertEqual(code, EXIT_UNSUPPORTED)

    def test_sweep(self):
        """Test sweep rows, including rows that fail"""
        code = self.run_cli("sweep", "--config", str(FIXTURES / "sweep_sigma.json"))
        self.assertEqual(code, EXIT_OK)

        with open(os.path.join(self.out_dir, "sweep_B3B3.csv"), newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(len(rows), 6)
        self.assertTrue(rows[0]["error"].startswith("UnsupportedRegime"))
        self.assertEqual(rows[-1]["regime"], "contracting_network")
        self.assertEqual(rows[-1]["error"], "")
        self.assertIn("n_12", rows[-1])

    def test_verify_rows(self):
        """Test verify estimates every index of the chosen connection"""
        payload = self.p0_payload()
        payload["options"] = {"connections": ["12"], "samples": 20000, "seed": 3,
                              "eps_grid": [0.1, 0.03, 0.01, 0.003]}
        code = self.run_cli("verify", "--config", self.write_config("verify.json", payload), "--dump-samples")
        self.assertIn(code, (EXIT_OK, EXIT_FAILED))

        with open(os.path.join(self.out_dir, "verify_B3B3.json"), encoding="utf-8") as f:
            result = json.load(f)
        self.assertEqual(len(result["rows"]), 3)
        self.assertEqual({row["level"] for row in result["rows"]}, {"network", "xi3", "xi4"})
        self.assertIn("composed_residual", result["nu_comparison"])

        with open(os.path.join(self.out_dir, "samples_B3B3_12_xi3_summary.csv"), newline="", encoding="utf-8") as f:
            summary = list(csv.DictReader(f))
        self.assertEqual([float(row["eps"]) for row in summary], [0.1, 0.03, 0.01, 0.003])
        self.assertTrue(all(int(row["samples"]) == 20000 for row in summary))

    def test_eps_grid_not_numbers(self):
        """Test an eps grid that does not parse exits 1 and records the failed run"""
        code = self.run_cli("verify", "--config", str(FIXTURES / "p0.json"), "--eps-grid", "0.5,abc")
        self.assertEqual(code, EXIT_INVALID)
        stats = ResultsDatabase(self.db_path).get_database_stats()
        self.assertEqual(stats["runs_count"], 1)
        self.assertEqual(stats["failed_runs"], 1)

    def test_eps_outside_domain(self):
        """Test eps values at or above the domain margin exit 1"""
        p0 = str(FIXTURES / "p0.json")
        self.assertEqual(self.run_cli("verify", "--config", p0, "--eps-grid", "0.96,0.1"), EXIT_INVALID)
        self.assertEqual(self.run_cli("verify", "--config", p0, "--eps-grid", "1.5,0.1"), EXIT_INVALID)
        self.assertEqual(self.run_cli("verify", "--config", p0, "--eps-grid", "0.01,0.1"), EXIT_INVALID)

    def test_zero_samples(self):
        """Test --samples 0 exits 1"""
        self.assertEqual(self.run_cli("verify", "--config", str(FIXTURES / "p0.json"), "--samples", "0"),
                         EXIT_INVALID)

    def test_full_state_flag(self):
        """Test --full-state reaches the verify options"""
        app = HetNet(self.db_path)
        config = load_run_config(str(FIXTURES / "p0.json"))
        self.assertTrue(app.resolve(config, build_parser().parse_args(["verify", "--full-state"]))["full_state"])
        self.assertFalse(app.resolve(config, build_parser().parse_args(["verify"]))["full_state"])

    def test_status(self):
        """Test status needs no config"""
        self.assertEqual(self.run_cli("status"), EXIT_OK)


# ==========================================
# 🏃‍♂️ MAIN TEST RUNNER
# ==========================================

def run_all_tests():
    """Run all command line tests"""
    print("🧪 Running Command Line Tests...")
    print("=" * 50)

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for case in (TestHelpers, TestCommands):
        suite.addTests(loader.loadTestsFromTestCase(case))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    print("\n" + "=" * 50)
    if result.wasSuccessful():
        print("✅ All command line tests passed!")
    else:
        print(f"❌ {len(result.failures)} failures, {len(result.errors)} errors")

    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
