"""
Unit tests for shuffling, bounding and fractional reversion
"""

import math
import os
import sys
import unittest

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.errors import EmptyInputError, SeriesKindError, TransformError
from analysis.series import Series, SeriesKind, SeriesMeta
from analysis.transforms import (
    accumulate,
    bound_series,
    derive_seed,
    drop_warmup,
    fractional_revert,
    fractional_weights,
    shuffle_increments,
)


def increments_of(values, ticker="CSCO"):
    return Series(np.asarray(values, dtype=np.float64), SeriesKind.INCREMENTS, SeriesMeta(ticker=ticker), True)


class TestShuffle(unittest.TestCase):
    """Test increment shuffling"""

    def setUp(self):
        rng = np.random.default_rng(7)
        self.y = increments_of(rng.integers(-50, 50, 5000))

    def test_permutation_of_multiset(self):
        shuffled = shuffle_increments(self.y, 42)
        np.testing.assert_array_equal(np.sort(shuffled.values), np.sort(self.y.values))
        self.assertEqual(shuffled.kind, SeriesKind.SHUFFLED)
        self.assertTrue(shuffled.is_increments)
        self.assertEqual(shuffled.meta.extra["seed"], 42)
        self.assertEqual(shuffled.meta.extra["rng"], "PCG64")

    def test_deterministic_for_seed(self):
        a = shuffle_increments(self.y, 42)
        b = shuffle_increments(self.y, 42)
        c = shuffle_increments(self.y, 43)
        np.testing.assert_array_equal(a.values, b.values)
        self.assertFalse(np.array_equal(a.values, c.values))

    def test_requires_increments(self):
        with self.assertRaises(SeriesKindError):
            shuffle_increments(Series([1.0, 2.0], SeriesKind.EMPIRICAL), 0)
        with self.assertRaises(EmptyInputError):
            shuffle_increments(increments_of([]), 0)

    def test_derived_seed_stable(self):
        seed = derive_seed(0, "CSCO", "2012-06-21", "2012-07-20")
        self.assertEqual(seed, derive_seed(0, "CSCO", "2012-06-21", "2012-07-20"))
        self.assertNotEqual(seed, derive_seed(0, "AAPL", "2012-06-21", "2012-07-20"))
        self.assertNotEqual(seed, derive_seed(1, "CSCO", "2012-06-21", "2012-07-20"))
        self.assertLess(seed, 2 ** 64)


class TestAccumulateAndBound(unittest.TestCase):
    """Test accumulation and soft bounding"""

    def test_accumulate(self):
        x = accumulate(increments_of([1, -2, 3]), 10)
        self.assertEqual(x.values.tolist(), [11, 9, 12])
        self.assertFalse(x.is_increments)
        self.assertEqual(x.kind, SeriesKind.EMPIRICAL)

    def test_accumulate_rejects_path(self):
        with self.assertRaises(SeriesKindError):
            accumulate(Series([1.0, 2.0], SeriesKind.EMPIRICAL), 0)

    def test_bound_clamps_and_resumes(self):
        x = bound_series(increments_of([3, 3, 3, -1, -10]), bound=5)
        self.assertEqual(x.values.tolist(), [3, 5, 5, 4, -5])
        self.assertEqual(x.kind, SeriesKind.BOUNDED)

    def test_large_bound_equals_accumulation(self):
        y = increments_of(np.random.default_rng(3).normal(0, 1, 1000))
        np.testing.assert_allclose(bound_series(y, bound=1e12).values, accumulate(y, 0).values)

    def test_bound_must_be_positive(self):
        with self.assertRaises(TransformError):
            bound_series(increments_of([1.0]), bound=0)


class TestFractionalReversion(unittest.TestCase):
    """Test ARFIMA(0,d,0) weights and reversion"""

    def test_weights_match_gamma(self):
        w = fractional_weights(-0.3, 4)
        self.assertEqual(w[0], 1.0)
        for j, expected in ((1, -0.3), (2, -0.105), (3, -0.0595)):
            self.assertAlmostEqual(w[j], expected, places=10)
            oracle = math.gamma(j - 0.3) / (math.gamma(-0.3) * math.gamma(j + 1))
            self.assertAlmostEqual(w[j], oracle, places=10)

    def test_weight_partial_sum_small(self):
        # closed form: sum_{j<n} w_j = Gamma(n+d) / (Gamma(d+1) Gamma(n))
        total = fractional_weights(-0.3, 1000).sum()
        closed = math.exp(math.lgamma(1000 - 0.3) - math.lgamma(0.7) - math.lgamma(1000))
        self.assertAlmostEqual(total, closed, places=10)
        self.assertLess(abs(total), 0.1)

    def test_invalid_parameters(self):
        with self.assertRaises(TransformError):
            fractional_weights(0.5, 10)
        with self.assertRaises(TransformError):
            fractional_weights(-0.3, 0)

    def test_zero_memory_is_identity(self):
        y = increments_of(np.random.default_rng(1).standard_cauchy(5000))
        np.testing.assert_array_equal(fractional_revert(y, 0.0, 1000).values, y.values)

    def test_unit_impulse_gives_weights(self):
        impulse = np.zeros(20)
        impulse[0] = 1.0
        reverted = fractional_revert(increments_of(impulse), -0.3, 10)
        np.testing.assert_allclose(reverted.values[:10], fractional_weights(-0.3, 10), atol=1e-12)
        np.testing.assert_allclose(reverted.values[10:], 0.0, atol=1e-12)
        self.assertEqual(len(reverted), 20)
        self.assertEqual(reverted.kind, SeriesKind.REVERTED)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        z1, z2 = rng.normal(size=4000), rng.normal(size=4000)
        combined = fractional_revert(increments_of(2.5 * z1 - 0.7 * z2), -0.3, 500).values
        separate = (2.5 * fractional_revert(increments_of(z1), -0.3, 500).values
                    - 0.7 * fractional_revert(increments_of(z2), -0.3, 500).values)
        np.testing.assert_allclose(combined, separate, rtol=1e-9, atol=1e-9)

    def test_inverse_memory_roundtrip(self):
        """Reverting with d then -d nearly restores the bulk of the series"""
        z = np.random.default_rng(5).normal(size=100_000)
        forward = fractional_revert(increments_of(z), -0.3, 1000)
        back = fractional_revert(forward, 0.3, 1000).values
        half = len(z) // 2
        error = np.linalg.norm(back[half:] - z[half:]) / np.linalg.norm(z[half:])
        self.assertLess(error, 0.05)

    def test_rejects_bounded_path(self):
        with self.assertRaises(SeriesKindError):
            fractional_revert(Series([1.0, 2.0], SeriesKind.BOUNDED), -0.3, 10)

    def test_drop_warmup(self):
        y = increments_of(np.arange(10.0))
        trimmed = drop_warmup(y, 4)
        self.assertEqual(trimmed.values.tolist(), [4, 5, 6, 7, 8, 9])
        self.assertEqual(trimmed.meta.extra["warmup_dropped"], 4)
        with self.assertRaises(EmptyInputError):
            drop_warmup(y, 10)


if __name__ == "__main__":
    unittest.main(verbosity=2)
