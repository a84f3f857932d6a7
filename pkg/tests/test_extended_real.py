#!/usr/bin/env python3
"""
Test suite for extended real values
"""

import math
import unittest

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from models.exceptions import HetNetError
from models.extended_real import ExtReal, NEG_INF, POS_INF, ext_max, ext_min, to_ext
from models.report import ConnectionRecord


class TestExtReal(unittest.TestCase):
    """Test suite for ExtReal"""

    # ==========================================
    # 🔢 CONSTRUCTION
    # ==========================================

    def test_float_infinities_become_flags(self):
        """Test float('inf') is stored as an infinity flag"""
        self.assertTrue(ExtReal(math.inf).is_pos_inf)
        self.assertTrue(ExtReal(-math.inf).is_neg_inf)
        self.assertEqual(ExtReal(math.inf), POS_INF)

    def test_nan_rejected(self):
        """Test NaN cannot be stored"""
        with self.assertRaises(ValueError):
            ExtReal(math.nan)

    def test_finite_constructor(self):
        """Test ExtReal.finite refuses infinite input"""
        self.assertEqual(ExtReal.finite(2.5).value, 2.5)
        with self.assertRaises(ValueError):
            ExtReal.finite(math.inf)

    def test_immutable(self):
        """Test instances cannot be changed"""
        value = ExtReal(1.0)
        with self.assertRaises(AttributeError):
            value._value = 2.0

    def test_value_of_infinity_raises(self):
        """Test .value is only defined for finite numbers"""
        with self.assertRaises(HetNetError):
            POS_INF.value

    # ==========================================
    # ➕ ARITHMETIC AND ORDER
    # ==========================================

    def test_ordering(self):
        """Test -inf < finite < +inf"""
        values = [POS_INF, ExtReal(3.0), NEG_INF, ExtReal(-1.0)]
        self.assertEqual(sorted(values), [NEG_INF, ExtReal(-1.0), ExtReal(3.0), POS_INF])
        self.assertTrue(ExtReal(1.0) < 2)
        self.assertEqual(ext_min(POS_INF, 1.5, 0.5), ExtReal(0.5))
        self.assertEqual(ext_max(NEG_INF, -2.0), ExtReal(-2.0))

    def test_sign(self):
        """Test sign and positivity"""
        self.assertEqual(POS_INF.sign(), 1)
        self.assertEqual(NEG_INF.sign(), -1)
        self.assertEqual(ExtReal(0.0).sign(), 0)
        self.assertTrue(ExtReal(0.2).is_positive())
        self.assertFalse(ExtReal(0.0).is_negative())

    def test_addition(self):
        """Test sums with infinities"""
        self.assertEqual(ExtReal(1.0) + 2.0, ExtReal(3.0))
        self.assertEqual(POS_INF + 5.0, POS_INF)
        self.assertEqual(ExtReal(1.0) - POS_INF, NEG_INF)
        with self.assertRaises(HetNetError):
            POS_INF + NEG_INF

    def test_is_close(self):
        """Test tolerance comparison"""
        self.assertTrue(ExtReal(1.0).is_close(1.0 + 1e-12))
        self.assertFalse(ExtReal(1.0).is_close(1.1, tol=1e-3))
        self.assertTrue(POS_INF.is_close(POS_INF))
        self.assertFalse(POS_INF.is_close(NEG_INF))

    # ==========================================
    # 📄 TEXT AND JSON
    # ==========================================

    def test_json_and_text(self):
        """Test infinities serialize as strings"""
        self.assertEqual(POS_INF.to_json(), "inf")
        self.assertEqual(NEG_INF.to_json(), "-inf")
        self.assertEqual(ExtReal(1.0 / 3.0).to_json(), 0.333333333333)
        self.assertEqual(str(POS_INF), "+inf")
        self.assertEqual(str(ExtReal(0.1428571428)), "0.142857")

    def test_to_ext(self):
        """Test coercion from strings and numbers"""
        self.assertEqual(to_ext("inf"), POS_INF)
        self.assertEqual(to_ext("-Infinity"), NEG_INF)
        self.assertEqual(to_ext("0.25"), ExtReal(0.25))
        self.assertEqual(to_ext(3), ExtReal(3.0))
        with self.assertRaises(TypeError):
            to_ext(True)

    def test_pydantic_round_trip(self):
        """Test ExtReal fields in pydantic models"""
        record = ConnectionRecord(connection="12", c_index={"xi3": "inf", "xi4": -1.0},
                                  n_index=1.5, source="test")
        dumped = record.model_dump(mode="json")
        self.assertEqual(dumped["c_index"], {"xi3": "inf", "xi4": -1.0})
        self.assertEqual(dumped["n_index"], 1.5)
        self.assertEqual(ConnectionRecord.model_validate(dumped), record)
        self.assertEqual(record.max_c_index(), POS_INF)


# ==========================================
# 🏃‍♂️ MAIN TEST RUNNER
# ==========================================

def run_all_tests():
    """Run all extended real tests"""
    print("🧪 Running Extended Real Tests...")
    print("=" * 50)

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    suite.addTests(loader.loadTestsFromTestCase(TestExtReal))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    print("\n" + "=" * 50)
    if result.wasSuccessful():
        print("✅ All extended real tests passed!")
    else:
        print(f"❌ {len(result.failures)} failures, {len(result.errors)} errors")

    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
