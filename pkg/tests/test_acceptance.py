"""
Monte Carlo checks of the estimator chain against generators with known memory
"""

import os
import sys
import unittest

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from analysis.bursts import DurationKind, durations, fit_pooled_burst_pdf
from analysis.estimators import (
    TailSide,
    ave_hurst,
    default_block_sizes,
    default_lags,
    default_msd_fit_range,
    default_window_sizes,
    fit_msd_exponent,
    higuchi_hurst,
    sample_msd,
    tail_fit,
)
from analysis.synth import GenSpec, NoiseKind, NoiseSpec, gen_arfima_increments, gen_noise
from analysis.transforms import accumulate, fractional_revert, shuffle_increments

N = 2 ** 17


def arfima(d, seed, noise=None, length=N):
    return gen_arfima_increments(GenSpec(noise=noise or NoiseSpec(), d=d, length=length, seed=seed,
                                         truncation=length))


def stable(alpha):
    return NoiseSpec(kind=NoiseKind.STABLE, alpha=alpha)


def msd_exponent(y):
    x = accumulate(y, 0.0)
    return fit_msd_exponent(sample_msd(x, default_lags(len(x))), default_msd_fit_range(len(x))).exponent


def h_av(y, cap=None):
    return ave_hurst(y, default_block_sizes(len(y), cap)).exponent


def h_hig(y, cap=None):
    return higuchi_hurst(accumulate(y, 0.0), default_window_sizes(len(y), cap)).exponent


class TestMemoryLaw(unittest.TestCase):
    """MSD exponent and Hurst estimates of Gaussian ARFIMA(0,d,0)"""

    def test_msd_and_hurst_consistency(self):
        for d in (-0.3, -0.1, 0.0, 0.2):
            with self.subTest(d=d):
                series = [arfima(d, seed) for seed in range(8)]
                self.assertAlmostEqual(np.mean([msd_exponent(y) for y in series]), 2 * d + 1, delta=0.1)
                ave = np.mean([h_av(y) for y in series])
                hig = np.mean([h_hig(y) for y in series])
                self.assertAlmostEqual(ave, d + 0.5, delta=0.05)
                self.assertAlmostEqual(hig, d + 0.5, delta=0.05)
                self.assertAlmostEqual(ave, hig, delta=0.05)


class TestFractionalStableHurst(unittest.TestCase):
    """H = d + 1/alpha for accumulated stable noise"""

    def test_hurst_law(self):
        for alpha, d, tolerance in ((2.0, 0.0, 0.05), (2.0, -0.3, 0.05), (1.5, 0.0, 0.07), (1.5, -0.3, 0.07)):
            with self.subTest(alpha=alpha, d=d):
                series = [arfima(d, seed, stable(alpha)) for seed in range(4)]
                expected = d + 1.0 / alpha
                self.assertAlmostEqual(np.mean([h_av(y) for y in series]), expected, delta=tolerance)
                self.assertAlmostEqual(np.mean([h_hig(y) for y in series]), expected, delta=tolerance)


class TestShuffleDestroysMemory(unittest.TestCase):
    """Shuffled increments keep the marginal and lose the memory"""

    def test_shuffled_series(self):
        for noise, iid_h in ((NoiseSpec(), 0.5), (stable(1.5), 1.0 / 1.5)):
            with self.subTest(noise=noise.describe()):
                shuffled = [shuffle_increments(arfima(-0.3, seed, noise), 100 + seed) for seed in range(4)]
                self.assertAlmostEqual(np.mean([msd_exponent(y) for y in shuffled]), 1.0, delta=0.05)
                self.assertAlmostEqual(np.mean([h_av(y) for y in shuffled]), iid_h, delta=0.05)


class TestReversionRoundTrip(unittest.TestCase):
    """Reverting shuffled heavy-tailed increments shifts H by d and keeps the tail"""

    @classmethod
    def setUpClass(cls):
        noise = gen_noise(GenSpec(noise=NoiseSpec(kind=NoiseKind.PARETO_SYMMETRIC, nu=3.0), length=10 ** 6, seed=11))
        cls.shuffled = shuffle_increments(noise, 12)
        cls.reverted = fractional_revert(cls.shuffled, -0.3, 1000)

    def test_hurst_shift(self):
        self.assertAlmostEqual(h_av(self.reverted, 1000) - h_av(self.shuffled, 1000), -0.3, delta=0.05)
        self.assertAlmostEqual(h_hig(self.reverted, 1000) - h_hig(self.shuffled, 1000), -0.3, delta=0.05)

    def test_tail_preserved(self):
        original = tail_fit(self.shuffled, TailSide.ABSOLUTE, tail_fraction=0.01)
        reverted = tail_fit(self.reverted, TailSide.ABSOLUTE, tail_fraction=0.01)
        self.assertAlmostEqual(reverted.exponent, original.exponent, delta=0.15)


class TestTailOracle(unittest.TestCase):
    """Tail fit recovers the exponent of symmetric Pareto samples"""

    def test_pareto_exponents(self):
        for nu in (2.25, 3.0, 3.86):
            with self.subTest(nu=nu):
                noise = gen_noise(GenSpec(noise=NoiseSpec(kind=NoiseKind.PARETO_SYMMETRIC, nu=nu),
                                          length=10 ** 6, seed=int(nu * 100)))
                fit = tail_fit(noise, TailSide.ABSOLUTE, tail_fraction=0.05)
                self.assertAlmostEqual(fit.exponent, nu, delta=0.15)


class TestSparreAndersen(unittest.TestCase):
    """First-passage exponent 3/2 for symmetric i.i.d. walks of any marginal"""

    def pooled_eta(self, noise, walks, length):
        samples = [durations(accumulate(gen_noise(GenSpec(noise=noise, length=length, seed=seed)), 0.0), 0.0)
                   for seed in range(walks)]
        return fit_pooled_burst_pdf(samples, (3.0, 1000.0), DurationKind.BOTH).eta

    def test_gaussian_walk(self):
        self.assertAlmostEqual(self.pooled_eta(NoiseSpec(), 16, 10 ** 6), 1.5, delta=0.1)

    def test_stable_walk(self):
        self.assertAlmostEqual(self.pooled_eta(stable(1.5), 8, 4 * 10 ** 6), 1.5, delta=0.1)


if __name__ == "__main__":
    unittest.main(verbosity=2)
