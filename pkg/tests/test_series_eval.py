#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
级数求值测试
精确部分和、区间复数求值、数字展开与扇形探测
"""
import math
import os
import sys
import unittest
from fractions import Fraction

import mpmath

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.arith_sequence import literal_sequence
from src.models.arith_sieve import sieve_liouville, sieve_mobius
from src.models.periodicity import PeriodClaim, detect_eventual_period
from src.models.series_eval import (
    CSV_COLUMNS, EvalPoint, SectorSpec, digits_in_base, partial_sum, sector_bound_probe
)
from src.utils.logger import (
    InvalidArgumentError, LoggerManager, OutOfRangeError, UnsupportedAlphabetError
)


class TestPartialSum(unittest.TestCase):
    """
    部分和测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.logger = LoggerManager.get_logger('series_eval_tests')
        cls.ones = literal_sequence([1] * 200)
        cls.liouville = sieve_liouville(2000)
        cls.moebius = sieve_mobius(2000)

    def test_exact_examples(self):
        self.assertEqual(partial_sum(self.ones, 10, EvalPoint.parse("1/2")), Fraction(1023, 1024))
        self.assertEqual(partial_sum(self.moebius, 4, EvalPoint.exact(1, 3)), Fraction(5, 27))
        self.assertEqual(partial_sum(self.liouville, 500, EvalPoint.exact(0)), 0)
        self.assertEqual(partial_sum(self.liouville, 0, EvalPoint.exact(1, 2)), 0)

    def test_order_independence(self):
        for seq in (self.liouville, self.moebius):
            for z in (Fraction(1, 2), Fraction(-2, 3), Fraction(5, 7)):
                coeffs = seq.coefficients(300)
                backwards = sum((Fraction(c) * z ** n for n, c in reversed(list(enumerate(coeffs)))), Fraction(0))
                self.assertEqual(partial_sum(seq, 300, EvalPoint.exact(z.numerator, z.denominator)), backwards)

    def test_complex_matches_exact(self):
        exact = partial_sum(self.liouville, 100, EvalPoint.exact(1, 2))
        approx = partial_sum(self.liouville, 100, EvalPoint.from_complex('0.5', '0'))
        self.assertEqual(approx.precision, 128)
        self.assertLess(abs(float(approx.re) - float(exact)), 1e-15)
        self.assertEqual(float(approx.im), 0.0)
        self.assertLess(float(approx.error_bound), 1e-25)
        self.assertGreaterEqual(float(approx.error_bound), 0.0)

    def test_complex_geometric(self):
        z = complex(0.3, 0.4)
        value = partial_sum(self.ones, 50, EvalPoint.from_complex('0.3', '0.4', precision=256)).value
        expected = z * (1 - z ** 50) / (1 - z)
        self.assertLess(abs(value - expected), 1e-12)

    def test_errors(self):
        with self.assertRaises(OutOfRangeError):
            partial_sum(self.ones, 201, EvalPoint.exact(1, 2))
        with self.assertRaises(InvalidArgumentError):
            partial_sum(self.ones, 10, EvalPoint.exact(1))
        with self.assertRaises(InvalidArgumentError):
            partial_sum(self.ones, 10, EvalPoint.from_complex('0.8', '0.8'))
        with self.assertRaises(InvalidArgumentError):
            partial_sum(self.ones, -1, EvalPoint.exact(1, 2))

    def test_point_parsing(self):
        self.assertEqual(EvalPoint.parse("2/4").rational, Fraction(1, 2))
        self.assertEqual(EvalPoint.parse("-1/3").rational, Fraction(-1, 3))
        self.assertEqual(str(EvalPoint.parse("1/3")), "1/3")
        self.assertEqual(str(EvalPoint.from_complex('0.5', '-0.25')), "0.5-0.25i")
        for bad in ("1/0", "abc", "", "1.5"):
            with self.assertRaises(InvalidArgumentError, msg=bad):
                EvalPoint.parse(bad)


class TestDigits(unittest.TestCase):
    """
    数字展开测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.liouville = sieve_liouville(2000)
        cls.moebius = sieve_mobius(2000)

    def test_liouville_bits(self):
        record = digits_in_base(self.liouville, 2, 10)
        self.assertEqual(record.digit_string(), "1001010011")
        self.assertTrue(record.identity_verified)
        self.assertIsNone(record.period)

    def test_all_ones_bits(self):
        record = digits_in_base(literal_sequence([1] * 5), 2, 5)
        self.assertEqual(record.digits, (1, 1, 1, 1, 1))
        self.assertEqual(record.period, PeriodClaim(0, 1))
        self.assertEqual(record.value, Fraction(31, 32))
        self.assertIn("digit periodicity: eventually periodic (M=0, k=1)", record.describe())
        self.assertIn("affine identity: verified", record.describe())

    def test_balanced_ternary(self):
        record = digits_in_base(self.moebius, 3, 4)
        self.assertEqual(record.digit_string(), "+--0")
        self.assertEqual(record.value, Fraction(5, 27))
        self.assertIn("no eventual period at this scale", record.describe())
        self.assertNotIn("affine identity", record.describe())

    def test_digit_value_consistency(self):
        for seq, bases in ((self.liouville, (2, 3, 10)), (self.moebius, (3, 5))):
            for base in bases:
                for n in (1, 7, 64, 500):
                    record = digits_in_base(seq, base, n)
                    self.assertEqual(record.value, partial_sum(seq, n, EvalPoint.exact(1, base)))
                    self.assertTrue(record.identity_verified)

    def test_ternary_period_matches_coefficients(self):
        seq = literal_sequence([1] + [1, -1, 0] * 30)
        record = digits_in_base(seq, 3, seq.length)
        n = seq.length
        k_max = n // 4
        self.assertEqual(record.period, detect_eventual_period(seq, n - 2 * k_max, k_max))
        self.assertEqual(record.period, PeriodClaim(1, 3))

    def test_errors(self):
        with self.assertRaises(InvalidArgumentError):
            digits_in_base(self.liouville, 1, 10)
        with self.assertRaises(UnsupportedAlphabetError):
            digits_in_base(self.moebius, 2, 10)
        with self.assertRaises(OutOfRangeError):
            digits_in_base(self.liouville, 2, 2001)


class TestSectorProbe(unittest.TestCase):
    """
    扇形探测测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()

    def test_geometric_maximum(self):
        ones = literal_sequence([1] * 100)
        spec = SectorSpec(theta_lo=-math.pi / 4, theta_hi=math.pi / 4, radii=(0.9, 0.5), samples_per_arc=17)
        report = sector_bound_probe(ones, spec, 100)
        self.assertEqual(len(report.samples), 34)
        self.assertEqual(list(report.samples['radius'].unique()), [0.5, 0.9])
        top = report.maxima.iloc[-1]
        self.assertEqual(top['radius'], 0.9)
        self.assertEqual(top['theta'], 0.0)
        self.assertLess(abs(top['abs_FN'] - 0.9 * (1 - 0.9 ** 100) / 0.1), 1e-6)

    def test_triangle_inequality_cap(self):
        lam = sieve_liouville(400)
        spec = SectorSpec(theta_lo=0.0, theta_hi=math.pi / 8, radii=(0.5, 0.9, 0.99), samples_per_arc=9)
        report = sector_bound_probe(lam, spec, 400)
        for row in report.samples.itertuples():
            cap = sum(row.radius ** n for n in range(1, 401))
            self.assertLessEqual(row.abs_FN, cap + 1e-9)
            self.assertGreaterEqual(row.error_bound, 0.0)
        half = report.maxima[report.maxima['radius'] == 0.5]['abs_FN'].iloc[0]
        self.assertLess(half, 1.0)

    def test_error_bound_encloses_sample_point(self):
        ones = literal_sequence([1] * 50)
        spec = SectorSpec(theta_lo=-0.7, theta_hi=0.7, radii=(0.6, 0.9), samples_per_arc=5)
        report = sector_bound_probe(ones, spec, 50, precision=30)
        for row in report.samples.itertuples():
            with mpmath.workprec(256):
                z = mpmath.mpf(row.radius) * mpmath.expj(mpmath.mpf(row.theta))
                exact = z * (1 - z ** 50) / (1 - z)
                distance = abs(mpmath.mpc(row.re, row.im) - exact)
            self.assertGreater(row.error_bound, 0.0)
            self.assertLessEqual(float(distance), row.error_bound + 1e-12)

    def test_csv_output(self):
        spec = SectorSpec(theta_lo=-0.1, theta_hi=0.1, radii=(0.5,), samples_per_arc=3)
        csv = sector_bound_probe(literal_sequence([1, -1, 1]), spec, 3).to_csv()
        lines = csv.splitlines()
        self.assertEqual(lines[0], ','.join(CSV_COLUMNS))
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith("0.5,-0.10000000000000001,"))

    def test_sector_validation(self):
        for kwargs in ({'radii': ()}, {'radii': (1.0,)}, {'radii': (0.0,)},
                       {'samples_per_arc': 0}, {'theta_lo': 0.5}):
            params = {'theta_lo': 0.0, 'theta_hi': 0.5, 'radii': (0.5,), 'samples_per_arc': 4}
            params.update(kwargs)
            with self.assertRaises(InvalidArgumentError, msg=str(kwargs)):
                SectorSpec(**params)

    def test_default_sector(self):
        spec = SectorSpec.from_config([0.5])
        self.assertAlmostEqual(spec.theta_lo, -math.pi / 8)
        self.assertAlmostEqual(spec.theta_hi, math.pi / 8)


if __name__ == '__main__':
    unittest.main()
