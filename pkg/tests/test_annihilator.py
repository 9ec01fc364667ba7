#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
零化多项式搜索测试
"""
import os
import random
import sys
import unittest

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from sympy import nextprime

from src.models.annihilator import (
    AnnihilatorCandidate, kernel_dimension, search_annihilator, series_power_truncated,
    verify_relation
)
from src.models.arith_sequence import literal_sequence
from src.models.arith_sieve import sieve_liouville
from src.models.int_polynomial import IntPolynomial
from src.models.periodicity import PeriodClaim
from src.models.rationality import reconstruct_rational
from src.utils.logger import InvalidArgumentError, LoggerManager


def planted_rational(rng: random.Random, length: int):
    """随机最终周期序列及其周期声明，M + k <= 4"""
    k = rng.randint(1, 4)
    m = rng.randint(0, 4 - k)
    head = [rng.choice((-1, 1)) for _ in range(m)]
    block = [rng.choice((-1, 1)) for _ in range(k)]
    values = head + [block[i % k] for i in range(length - m)]
    return literal_sequence(values), PeriodClaim(m, k)


class TestSeriesPowers(unittest.TestCase):
    """
    截断幂级数乘方测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.logger = LoggerManager.get_logger('annihilator_tests')

    def test_examples(self):
        ones = literal_sequence([1] * 10)
        self.assertEqual(series_power_truncated(ones, 0, 4), [1, 0, 0, 0, 0])
        self.assertEqual(series_power_truncated(ones, 1, 4), [0, 1, 1, 1, 1])
        self.assertEqual(series_power_truncated(ones, 2, 4), [0, 0, 1, 2, 3])
        self.assertEqual(series_power_truncated(sieve_liouville(10), 2, 3), [0, 0, 1, -2])

    def test_errors(self):
        ones = literal_sequence([1] * 4)
        with self.assertRaises(InvalidArgumentError):
            series_power_truncated(ones, 1, 5)
        with self.assertRaises(InvalidArgumentError):
            series_power_truncated(ones, -1, 2)


class TestAnnihilatorSearch(unittest.TestCase):
    """
    零化关系搜索测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        rng = random.Random(62)
        cls.primes = [int(nextprime(rng.getrandbits(62))) for _ in range(2)]
        cls.ones = literal_sequence([1] * 100)

    def test_geometric_series(self):
        cand = search_annihilator(self.ones, 8, 1, 1)
        self.assertIsNotNone(cand)
        self.assertEqual(cand.order, 1)
        self.assertEqual(cand.verified_to, 16)
        # (z - 1)F + z = 0，最高项系数为正
        self.assertEqual(cand.coeffs, (IntPolynomial([0, 1]), IntPolynomial([-1, 1])))
        self.assertTrue(verify_relation(self.ones, cand, 100))
        self.assertEqual(cand.describe(), "(z) + (-1+z)*F = 0")

    def test_zero_series(self):
        cand = search_annihilator(literal_sequence([0] * 16), 8, 1, 1)
        self.assertEqual(cand.coeffs, (IntPolynomial(), IntPolynomial([1])))

    def test_liouville_has_no_small_relation(self):
        lam = sieve_liouville(96)
        self.assertIsNone(search_annihilator(lam, 48, 2, 3))
        self.assertEqual(kernel_dimension(lam, 48, 2, 3), 0)
        for p in self.primes:
            self.assertEqual(kernel_dimension(lam, 48, 2, 3, prime=p), 0)

    def test_verify_rejects_wrong_series(self):
        cand = AnnihilatorCandidate(order=1, coeffs=(IntPolynomial([0, -1]), IntPolynomial([1, -1])),
                                    degree_bound=1, truncation=8, verified_to=16)
        alternating = literal_sequence([(-1) ** i for i in range(10)])
        self.assertFalse(verify_relation(alternating, cand, 4))
        self.assertTrue(verify_relation(self.ones, cand, 100))
        with self.assertRaises(InvalidArgumentError):
            verify_relation(alternating, cand, 11)

    def test_zero_candidate_rejected(self):
        with self.assertRaises(InvalidArgumentError):
            AnnihilatorCandidate(order=1, coeffs=(IntPolynomial(), IntPolynomial()),
                                 degree_bound=1, truncation=8, verified_to=8)
        with self.assertRaises(InvalidArgumentError):
            AnnihilatorCandidate(order=2, coeffs=(IntPolynomial([1]),),
                                 degree_bound=1, truncation=8, verified_to=8)

    def test_vacuous_configuration(self):
        with self.assertRaises(InvalidArgumentError):
            search_annihilator(self.ones, 5, 2, 1)
        with self.assertRaises(InvalidArgumentError):
            search_annihilator(literal_sequence([1] * 15), 8, 1, 1)

    def test_plant_and_recover(self):
        """50 个有理级数：恢复的关系与 Q·F - P = 0 等价"""
        rng = random.Random(404)
        for _ in range(50):
            seq, claim = planted_rational(rng, 48)
            form = reconstruct_rational(seq, claim)
            cand = search_annihilator(seq, 24, 1, 4)
            self.assertIsNotNone(cand)
            self.assertEqual(cand.order, 1)
            a0, a1 = cand.coeffs
            self.assertFalse(a1.is_zero())
            # a1·F = -a0 且 Q·F = P  =>  a1·P + a0·Q = 0
            self.assertTrue((a1 * form.P + a0 * form.Q).is_zero())
            self.assertTrue(verify_relation(seq, cand, 48))
            exact = kernel_dimension(seq, 24, 1, 4)
            self.assertGreaterEqual(exact, 1)
            for p in self.primes:
                self.assertEqual(kernel_dimension(seq, 24, 1, 4, prime=p), exact)


if __name__ == '__main__':
    unittest.main()
