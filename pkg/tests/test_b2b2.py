#!/usr/bin/env python3
"""
Test suite for the B2B2 network
"""

import unittest

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models.exceptions import AssumptionViolation, UnsupportedRegime
from models.extended_real import NEG_INF, POS_INF
from models.network import B2B2Spec
from networks import b2b2
from utils.config import load_run_config

FIXTURES = Path(__file__).parent.parent / "config" / "fixtures"


def fixture(name: str):
    config = load_run_config(str(FIXTURES / f"{name}.json"))
    return config.build_spec(), config.assumptions


class TestB2Derived(unittest.TestCase):
    """Test suite for B2B2 return-map quantities"""

    def test_c3_contracting(self):
        """Test the fixture with delta < 0"""
        q0, _ = fixture("q0")
        d = b2b2.derived_b2(q0)
        self.assertAlmostEqual(d.rho, 1.5)
        self.assertAlmostEqual(d.rho_t, 1.125)
        self.assertAlmostEqual(d.delta, -0.5)
        self.assertAlmostEqual(d.delta_t, 0.25)

    def test_c4_contracting(self):
        """Test the fixture with delta > 0"""
        q1, _ = fixture("q1")
        d = b2b2.derived_b2(q1)
        self.assertAlmostEqual(d.rho, 1.5)
        self.assertAlmostEqual(d.rho_t, 2.25)
        self.assertAlmostEqual(d.delta, 1.0)
        self.assertAlmostEqual(d.delta_t, -0.5)

    def test_delta_signs_opposite(self):
        """Test delta and delta~ have opposite signs on random specs"""
        rng = np.random.default_rng(41)
        names = ("ea2", "eb3", "eb4", "ca3", "ca4", "cb2")
        for draw in rng.uniform(0.2, 3.0, (1000, len(names))):
            spec = B2B2Spec(**{name: float(value) for name, value in zip(names, draw)})
            d = b2b2.derived_b2(spec)
            self.assertLess(d.delta * d.delta_t, 0.0, spec)


class TestB2Indices(unittest.TestCase):
    """Test suite for c- and n-indices of the B2B2 network"""

    def test_c3_contracting_indices(self):
        """Test c- and n-indices when the C3 returns contract"""
        q0, assumptions = fixture("q0")
        result = b2b2.b2_network_indices(q0, assumptions)
        c, n = result["c"], result["n"]
        self.assertAlmostEqual(c["ab"]["C3"].value, 1.0)
        self.assertEqual(c["ab"]["C4"], NEG_INF)
        self.assertEqual(c["ba3"]["C3"], POS_INF)
        self.assertEqual(c["ba4"]["C4"], NEG_INF)
        self.assertAlmostEqual(n["ab"].value, 1.0, places=6)
        self.assertEqual(n["ba3"], POS_INF)
        self.assertAlmostEqual(n["ba4"].value, 0.25, places=6)

    def test_c4_contracting_indices(self):
        """Test c- and n-indices when the C4 returns contract"""
        q1, assumptions = fixture("q1")
        result = b2b2.b2_network_indices(q1, assumptions)
        c, n = result["c"], result["n"]
        self.assertEqual(c["ab"]["C3"], NEG_INF)
        self.assertEqual(c["ba3"]["C3"], NEG_INF)
        self.assertAlmostEqual(c["ab"]["C4"].value, -1.0)
        self.assertEqual(c["ba4"]["C4"], POS_INF)
        self.assertAlmostEqual(n["ab"].value, 1.0 / 7.0, places=6)
        self.assertAlmostEqual(n["ba3"].value, 0.625, places=6)
        self.assertEqual(n["ba4"], POS_INF)

    def test_report(self):
        """Test the report agrees with the sequences"""
        q1, assumptions = fixture("q1")
        report = b2b2.analyze(q1, assumptions)
        self.assertEqual(report.network, "B2B2")
        self.assertEqual(report.regime, "c4_contracting")
        self.assertTrue(report.pas.network)
        self.assertFalse(report.pas.cycles["C3"])
        self.assertFalse(report.pas.cycles["C4"])
        self.assertIn("stabilized_network", report.caveats)
        for record in report.records:
            self.assertNotIn("sequence_mismatch", record.caveats)
            self.assertNotIn("sign_pattern_mismatch", record.caveats)

    def test_non_contracting_regime(self):
        """Test rho~ < 1 is refused"""
        q0, _ = fixture("q0")
        network = b2b2.network_for(q0.replace(cb2=0.5))
        with self.assertRaises(AssumptionViolation):
            network.regime()


class TestB2Sequences(unittest.TestCase):
    """Test suite for the escape-cusp sequences"""

    def test_sequences(self):
        """Test alpha and beta terms"""
        q1, _ = fixture("q1")
        seq = b2b2.b2_escape_sequences(q1)
        alpha, beta = seq.sequences["alpha"], seq.sequences["beta"]
        self.assertEqual(len(alpha), 2)
        self.assertAlmostEqual(alpha[0], 0.5)
        self.assertAlmostEqual(alpha[1], 1.625)
        self.assertEqual(len(beta), 3)
        self.assertAlmostEqual(beta[0], 0.5)
        self.assertAlmostEqual(beta[1], 0.875)
        self.assertAlmostEqual(beta[2], 1.71875)
        self.assertTrue(all(seq.monotone.values()))
        self.assertEqual(seq.crossing, {"alpha": None, "beta": None})

    def test_sequence_index(self):
        """Test the index of the union of same-exponent cusps"""
        self.assertAlmostEqual(b2b2.sequence_index([0.5, 0.875, 1.71875]).value, 1.0 / 0.875 - 1.0)
        self.assertAlmostEqual(b2b2.sequence_index([0.5, 1.625]).value, 0.625)
        self.assertEqual(b2b2.sequence_index([]), POS_INF)

    def test_sequences_need_positive_delta(self):
        """Test delta < 0 has no sequences"""
        q0, _ = fixture("q0")
        with self.assertRaises(UnsupportedRegime):
            b2b2.b2_escape_sequences(q0)


# ==========================================
# 🏃‍♂️ MAIN TEST RUNNER
# ==========================================

def run_all_tests():
    """Run all B2B2 tests"""
    print("🧪 Running B2B2 Network Tests...")
    print("=" * 50)

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for case in (TestB2Derived, TestB2Indices, TestB2Sequences):
        suite.addTests(loader.loadTestsFromTestCase(case))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    print("\n" + "=" * 50)
    if result.wasSuccessful():
        print("✅ All B2B2 tests passed!")
    else:
        print(f"❌ {len(result.failures)} failures, {len(result.errors)} errors")

    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
