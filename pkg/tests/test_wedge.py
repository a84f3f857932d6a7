#!/usr/bin/env python3
"""
Test suite for the wedge calculus
"""

import math
import unittest

import numpy as np

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from indices.wedge import (LOWER, UPPER, Bound, MonomialMap2, Wedge, complement, merge_intervals, preimage,
                           wedge_index, wedge_index_detail, wedge_measure_fraction)
from models.exceptions import NonGeneric, UnsupportedForm
from models.extended_real import POS_INF


class TestMonomialMaps(unittest.TestCase):
    """Test suite for MonomialMap2"""

    def test_call_and_compose(self):
        """Test evaluation agrees with composition"""
        outer = MonomialMap2(2.0, 0.0, 0.0, 3.0)
        inner = MonomialMap2(1.0, 1.0, 0.0, 1.0)
        composed = outer.compose(inner)
        self.assertEqual(composed.matrix, ((2.0, 2.0), (0.0, 3.0)))
        x, y = 0.3, 0.2
        expected = outer(*inner(x, y))
        for got, want in zip(composed(x, y), expected):
            self.assertAlmostEqual(got, want, places=12)

    def test_singular_matrix(self):
        """Test singular exponent matrices are rejected"""
        with self.assertRaises(UnsupportedForm):
            MonomialMap2(1.0, 0.0, 0.0, 0.0)

    def test_output_bounds(self):
        """Test the domain of a map as bounds on y"""
        # (x, y) -> (x, y / x): admissible when y < 0.5 x
        m = MonomialMap2(1.0, 0.0, -1.0, 1.0)
        bounds = m.output_bounds(0.5)
        self.assertEqual(len(bounds), 1)
        self.assertEqual(bounds[0].kind, UPPER)
        self.assertAlmostEqual(bounds[0].exponent, 1.0)
        self.assertAlmostEqual(bounds[0].const, 0.5)


class TestWedges(unittest.TestCase):
    """Test suite for Wedge construction and preimages"""

    def test_between(self):
        """Test a cusp between two powers"""
        w = Wedge.between(3.0, 2.0)
        self.assertEqual(w.interval(), (2.0, 3.0))
        self.assertTrue(w.contains(0.1, 0.005))
        self.assertFalse(w.contains(0.1, 0.05))

    def test_empty_near_origin(self):
        """Test a crossed pair of bounds is empty"""
        self.assertIsNone(Wedge.between(2.0, 3.0))
        self.assertIsNone(Wedge.build([Bound(LOWER, 0.0, 2.0)]))

    def test_non_binding_upper_bound_dropped(self):
        """Test y <= x^0 is dropped near the origin"""
        w = Wedge.build([Bound(LOWER, 2.0), Bound(UPPER, 0.0)])
        self.assertFalse(w.has_upper)
        self.assertTrue(w.has_lower)

    def test_complement(self):
        """Test the complement of an upper bound is a lower bound"""
        pieces = complement([Bound(UPPER, 2.0)])
        self.assertEqual(len(pieces), 1)
        self.assertEqual(pieces[0].lo_exponent, 2.0)
        self.assertFalse(pieces[0].has_upper)

    def test_preimage_diagonal(self):
        """Test preimage under (x, y) -> (x^2, y)"""
        m = MonomialMap2(2.0, 0.0, 0.0, 1.0)
        pulled = preimage(m, Wedge.between(3.0, 2.0))
        self.assertAlmostEqual(pulled.hi_exponent, 4.0)
        self.assertAlmostEqual(pulled.lo_exponent, 6.0)
        x = 0.2
        self.assertTrue(pulled.contains(x, x ** 5))
        self.assertTrue(Wedge.between(3.0, 2.0).contains(*m(x, x ** 5)))

    def test_preimage_dense_unsupported(self):
        """Test dense maps are refused"""
        with self.assertRaises(UnsupportedForm):
            preimage(MonomialMap2(1.0, 1.0, 1.0, 2.0), Wedge.between(3.0, 2.0))


class TestPreimageSampling(unittest.TestCase):
    """Test suite for preimage membership on seeded random points"""

    def setUp(self):
        rng = np.random.default_rng(21)
        self.x = 10.0 ** rng.uniform(-6.0, 0.0, 10000)
        self.y = 10.0 ** rng.uniform(-9.0, 0.0, 10000)

    def assert_exact(self, m: MonomialMap2, w: Wedge):
        pulled = preimage(m, w)
        expected = w.contains(*m(self.x, self.y))
        got = pulled.contains(self.x, self.y) if pulled is not None else np.zeros_like(expected)
        self.assertEqual(int(np.count_nonzero(got != expected)), 0, f"{m} {w} -> {pulled}")
        return got

    def test_triangular_example(self):
        """Test (x^1.2, y x^0.025) pulls {x^0.875 <= y <= x^0.5} back to {x^1.025 <= y <= x^0.575}"""
        m = MonomialMap2(1.2, 0.0, 0.025, 1.0)
        w = Wedge.between(0.875, 0.5)
        pulled = preimage(m, w)
        self.assertAlmostEqual(pulled.lo_exponent, 1.025)
        self.assertAlmostEqual(pulled.hi_exponent, 0.575)
        inside = self.assert_exact(m, w)
        self.assertTrue(inside.any())
        self.assertFalse(inside.all())

    def test_swap(self):
        """Test the coordinate swap keeps {x^2 <= y <= x^0.5}"""
        pulled = preimage(MonomialMap2(0.0, 1.0, 1.0, 0.0), Wedge.between(2.0, 0.5))
        self.assertAlmostEqual(pulled.lo_exponent, 2.0)
        self.assertAlmostEqual(pulled.hi_exponent, 0.5)
        self.assert_exact(MonomialMap2(0.0, 1.0, 1.0, 0.0), Wedge.between(2.0, 0.5))

    def test_random_triangular_maps(self):
        """Test random maps (x^a, y x^b) and random cusps"""
        rng = np.random.default_rng(22)
        for _ in range(20):
            m = MonomialMap2(rng.uniform(0.5, 2.0), 0.0, rng.uniform(-0.5, 0.5), 1.0)
            self.assert_exact(m, Wedge.between(rng.uniform(1.5, 3.0), rng.uniform(0.2, 1.2)))

    def test_random_anti_triangular_maps(self):
        """Test random maps (y^a, x^b) and random cusps"""
        rng = np.random.default_rng(23)
        for _ in range(20):
            m = MonomialMap2(0.0, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), 0.0)
            self.assert_exact(m, Wedge.between(rng.uniform(1.5, 3.0), rng.uniform(0.2, 1.2)))


class TestWedgeIndex(unittest.TestCase):
    """Test suite for indices of wedge complements"""

    def test_no_wedges(self):
        """Test the empty escape set has index +inf"""
        self.assertEqual(wedge_index([]), POS_INF)

    def test_thin_cusp_above_diagonal(self):
        """Test a cusp between x^3 and x^2"""
        index, thick = wedge_index_detail([Wedge.between(3.0, 2.0)])
        self.assertAlmostEqual(index.value, 1.0)
        self.assertFalse(thick)

    def test_thin_cusp_below_diagonal(self):
        """Test a cusp between x^0.5 and x^0.25"""
        self.assertAlmostEqual(wedge_index([Wedge.between(0.5, 0.25)]).value, 1.0)

    def test_closest_cusp_wins(self):
        """Test the smallest rate over several cusps"""
        ws = [Wedge.between(3.0, 2.0), Wedge.between(0.8, 0.5), Wedge.between(5.0, 4.0)]
        self.assertAlmostEqual(wedge_index(ws).value, 0.25)

    def test_thick_cusp(self):
        """Test a cusp containing the diagonal gives a negative index"""
        index, thick = wedge_index_detail([Wedge.between(3.0, 0.8)])
        self.assertAlmostEqual(index.value, -0.25)
        self.assertTrue(thick)

    def test_whole_square(self):
        """Test escape everywhere"""
        index, thick = wedge_index_detail([Wedge(math.inf, -math.inf)])
        self.assertTrue(index.is_neg_inf)
        self.assertTrue(thick)

    def test_merge_intervals(self):
        """Test overlapping exponent intervals merge"""
        merged = merge_intervals([Wedge.between(3.0, 2.0), Wedge.between(2.5, 1.5), Wedge.between(6.0, 5.0)])
        self.assertEqual(merged, [(1.5, 3.0), (5.0, 6.0)])

    def test_non_positive_exponent_rejected(self):
        """Test wedges that are not cusps at the origin"""
        with self.assertRaises(UnsupportedForm):
            wedge_index([Wedge(2.0, -0.5)])
        with self.assertRaises(UnsupportedForm):
            wedge_index_detail([Wedge.between(3.0, 2.0), Wedge(-1.0, -2.0)])

    def test_exponent_one_non_generic(self):
        """Test a cusp edge on the diagonal"""
        with self.assertRaises(NonGeneric):
            wedge_index([Wedge.between(2.0, 1.0)])


class TestMeasureFraction(unittest.TestCase):
    """Test suite for wedge areas"""

    def test_whole_square(self):
        """Test the full square has fraction 1"""
        self.assertAlmostEqual(wedge_measure_fraction(Wedge(math.inf, -math.inf), 0.1), 1.0, places=6)

    def test_below_parabola(self):
        """Test {y <= x^2} has fraction eps / 3"""
        w = Wedge.build([Bound(UPPER, 2.0)])
        for eps in (0.1, 0.01):
            self.assertAlmostEqual(wedge_measure_fraction(w, eps) / eps, 1.0 / 3.0, places=5)

    def test_fraction_scaling_matches_index(self):
        """Test log-log slope of the area equals the index of the complement"""
        w = Wedge.between(3.0, 2.0)
        eps = np.array([1e-2, 1e-3])
        fractions = np.array([wedge_measure_fraction(w, e) for e in eps])
        slope = np.diff(np.log(fractions))[0] / np.diff(np.log(eps))[0]
        self.assertAlmostEqual(slope, wedge_index([w]).value, places=2)

    def test_eps_range(self):
        """Test eps outside (0, 1)"""
        with self.assertRaises(ValueError):
            wedge_measure_fraction(Wedge.between(3.0, 2.0), 1.5)


# ==========================================
# 🏃‍♂️ MAIN TEST RUNNER
# ==========================================

def run_all_tests():
    """Run all wedge tests"""
    print("🧪 Running Wedge Tests...")
    print("=" * 50)

    loader = unittest.TestLoader()
    suite = unittest.TestSuite()
    for case in (TestMonomialMaps, TestWedges, TestPreimageSampling, TestWedgeIndex, TestMeasureFraction):
        suite.addTests(loader.loadTestsFromTestCase(case))

    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)

    print("\n" + "=" * 50)
    if result.wasSuccessful():
        print("✅ All wedge tests passed!")
    else:
        print(f"❌ {len(result.failures)} failures, {len(result.errors)} errors")

    return result.wasSuccessful()


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
