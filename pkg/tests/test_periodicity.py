#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
周期性模块测试
最终周期检测的正确性与最小性，以及完全积性函数的反驳见证
"""
import os
import random
import sys
import unittest

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.arith_sequence import PrimeAssignment, literal_sequence
from src.models.arith_sieve import sieve_cm, sieve_liouville
from src.models.periodicity import (
    PeriodClaim, PeriodWitness, claim_holds, detect_eventual_period, last_mismatch,
    refute_period_cm, verify_witness
)
from src.utils.config_manager import reset_config, set_config
from src.utils.logger import (
    InvalidArgumentError, LoggerManager, NoNegativePrimeError, OutOfRangeError
)


def eventually_periodic(rng: random.Random, preperiod: int, period: int, length: int):
    """随机 ±1 前周期加随机周期块"""
    head = [rng.choice((-1, 1)) for _ in range(preperiod)]
    block = [rng.choice((-1, 1)) for _ in range(period)]
    return head + [block[i % period] for i in range(length - preperiod)]


class TestDetection(unittest.TestCase):
    """
    最终周期检测测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.logger = LoggerManager.get_logger('periodicity_tests')
        cls.liouville = sieve_liouville(10 ** 6)

    def tearDown(self):
        reset_config()

    def test_constant_and_alternating(self):
        self.assertEqual(detect_eventual_period(literal_sequence([1] * 30), 5, 5), PeriodClaim(0, 1))
        alternating = literal_sequence([(-1) ** i for i in range(30)])
        self.assertEqual(detect_eventual_period(alternating, 5, 5), PeriodClaim(0, 2))
        self.assertEqual(last_mismatch(alternating, PeriodClaim(0, 1)), 29)

    def test_prefix_too_short(self):
        with self.assertRaises(InvalidArgumentError):
            detect_eventual_period(literal_sequence([1] * 10), 5, 3)
        with self.assertRaises(InvalidArgumentError):
            detect_eventual_period(literal_sequence([1] * 10), 0, 3)

    def test_liouville_is_not_periodic(self):
        self.assertIsNone(detect_eventual_period(self.liouville.prefix(10 ** 4), 100, 100))
        self.assertIsNone(detect_eventual_period(self.liouville, 1000, 1000))

    def test_parallel_scan_agrees(self):
        rng = random.Random(11)
        values = eventually_periodic(rng, 7, 5, 200)
        seq = literal_sequence(values)
        serial = detect_eventual_period(seq, 20, 20)
        set_config('periodicity.workers', 4)
        self.assertEqual(detect_eventual_period(seq, 20, 20), serial)

    def test_soundness_and_minimality(self):
        rng = random.Random(12)
        for _ in range(100):
            m, k = rng.randint(0, 15), rng.randint(1, 10)
            seq = literal_sequence(eventually_periodic(rng, m, k, 120))
            claim = detect_eventual_period(seq, 20, 20)
            self.assertIsNotNone(claim)
            self.assertLessEqual(claim.period, k)
            self.assertLessEqual(claim.preperiod, m if claim.period == k else 20)
            values = seq.coefficients()
            n = seq.length
            for i in range(claim.preperiod + 1, n - claim.period + 1):
                self.assertEqual(values[i], values[i + claim.period])
            for smaller in range(1, claim.period):
                self.assertFalse(claim_holds(seq, PeriodClaim(20, smaller)))
            if claim.preperiod > 0:
                self.assertFalse(claim_holds(seq, PeriodClaim(claim.preperiod - 1, claim.period)))


class TestRefutation(unittest.TestCase):
    """
    反驳见证测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.liouville = sieve_liouville(10 ** 6)

    def test_liouville_examples(self):
        lam = PrimeAssignment.liouville()
        w = refute_period_cm(lam, PeriodClaim(0, 1))
        self.assertEqual((w.p, w.n, w.a, w.b), (2, 1, 1, 2))
        w = refute_period_cm(lam, PeriodClaim(10, 3))
        self.assertEqual((w.p, w.n, w.a, w.b), (2, 4, 12, 24))
        self.assertEqual(self.liouville[12], -1)
        self.assertEqual(self.liouville[24], 1)
        self.assertTrue(verify_witness(self.liouville.prefix(24), w))

    def test_custom_assignment_example(self):
        a = PrimeAssignment(default_sign=1, exceptions={3: -1})
        w = refute_period_cm(a, PeriodClaim(5, 2))
        self.assertEqual((w.p, w.n, w.a, w.b), (3, 3, 6, 18))
        seq = sieve_cm(a, 18)
        self.assertEqual(seq[6], -1)
        self.assertEqual(seq[18], 1)
        self.assertTrue(verify_witness(seq, w))

    def test_trivial_assignment(self):
        with self.assertRaises(NoNegativePrimeError):
            refute_period_cm(PrimeAssignment(default_sign=1), PeriodClaim(0, 1))

    def test_broken_witnesses(self):
        claim = PeriodClaim(10, 3)
        self.assertFalse(verify_witness(self.liouville, PeriodWitness(2, 4, 12, 25, claim)))
        self.assertFalse(verify_witness(self.liouville, PeriodWitness(2, 1, 3, 6, claim)))
        with self.assertRaises(OutOfRangeError):
            verify_witness(self.liouville.prefix(20), PeriodWitness(2, 4, 12, 24, claim))

    def test_random_claims(self):
        """100 个随机声明 (M, k <= 1000)，见证都在 λ 前缀上成立"""
        rng = random.Random(2025)
        lam = PrimeAssignment.liouville()
        for _ in range(100):
            claim = PeriodClaim(rng.randint(0, 1000), rng.randint(1, 1000))
            w = refute_period_cm(lam, claim)
            self.assertEqual((w.b - w.a) % claim.period, 0)
            self.assertGreater(w.a, claim.preperiod)
            self.assertEqual(self.liouville[w.b], -self.liouville[w.a])
            self.assertTrue(verify_witness(self.liouville, w))

    def test_random_assignments(self):
        rng = random.Random(99)
        for _ in range(10):
            exceptions = {p: rng.choice((-1, 1)) for p in (2, 3, 5, 7, 11)}
            exceptions[13] = -1
            a = PrimeAssignment(default_sign=rng.choice((-1, 1)), exceptions=exceptions)
            seq = sieve_cm(a, 20000)
            for _ in range(10):
                claim = PeriodClaim(rng.randint(0, 100), rng.randint(1, 100))
                self.assertTrue(verify_witness(seq, refute_period_cm(a, claim)))


if __name__ == '__main__':
    unittest.main()
