#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
命令行测试
逐字比对报告输出，并检查退出码约定
"""
import io
import os
import shutil
import subprocess
import sys
import tempfile
import unittest

# 添加项目根目录到Python路径
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(PROJECT_ROOT)

from src.main import run
from src.utils.config_manager import reset_config
from src.utils.logger import LoggerManager


class TestCli(unittest.TestCase):
    """
    命令行端到端测试
    """

    @classmethod
    def setUpClass(cls):
        LoggerManager.init_logging()
        cls.logger = LoggerManager.get_logger('cli_tests')

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)
        reset_config()

    def invoke(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = run(list(argv), out=out, err=err)
        return code, out.getvalue(), err.getvalue()

    def path(self, name):
        return os.path.join(self.temp_dir, name)

    def write(self, name, text):
        with open(self.path(name), 'w', encoding='utf-8') as f:
            f.write(text)
        return self.path(name)

    def test_zerorun_verify(self):
        code, out, _ = self.invoke('zerorun', '--length', '3', '--verify')
        self.assertEqual(code, 0)
        self.assertEqual(out, (
            "zero-run certificate: L=3\n"
            "x = 547\n"
            "  4 | 548 (p=2) mu=0\n"
            "  9 | 549 (p=3) mu=0\n"
            "  25 | 550 (p=5) mu=0\n"
            "verified: true\n"
        ))

    def test_zerorun_minimal(self):
        code, out, _ = self.invoke('zerorun', '--length', '3', '--minimal', '--limit', '1000')
        self.assertEqual(code, 0)
        self.assertEqual(out, "least run of 3 zeros: x = 47 (indices 48..50)\n")
        code, _, err = self.invoke('zerorun', '--length', '3', '--minimal')
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: "))

    def test_rootbound(self):
        self.assertEqual(self.invoke('rootbound', '--poly', '-1,0,1'), (0, "r = 2\n", ''))
        code, out, _ = self.invoke('rootbound', '--poly=-5,3,0,2')
        self.assertEqual(out, "r = 7/2\n")
        code, out, _ = self.invoke('rootbound', '--poly', '0,-4,0,1', '--count-at', '1')
        self.assertEqual(code, 0)
        self.assertEqual(out, "r = 5\nroots in |z| < 1: 1 (certified, degree 3)\n")

    def test_rootbound_indeterminate(self):
        code, out, err = self.invoke('rootbound', '--poly', '-1,0,1', '--count-at', '1')
        self.assertEqual(code, 1)
        self.assertEqual(out, "r = 2\n")
        self.assertIn("error:", err)

    def test_sieve_and_classify(self):
        cache = self.path('ones.aps')
        code, out, _ = self.invoke('sieve', '--func', 'literal', '--values', ','.join(['1'] * 10),
                                   '--cache', cache)
        self.assertEqual(code, 0)
        self.assertEqual(out, (
            "sieved literal: N=10\n"
            "counts: +1=10, 0=0, -1=0\n"
            "first values: 1,1,1,1,1,1,1,1,1,1\n"
            f"cache written: {cache}\n"
        ))
        code, out, _ = self.invoke('classify', '--cache', cache, '--mmax', '2', '--kmax', '2', '--hankel', '3')
        self.assertEqual(code, 0)
        self.assertEqual(out, (
            "rational candidate: P=z, Q=1-z\n"
            "period: (M=0, k=1)\n"
            "det H_1 = 1\n"
            "det H_2 = 0\n"
            "det H_3 = 0\n"
        ))

    def test_classify_non_periodic(self):
        cache = self.path('liouville.aps')
        self.assertEqual(self.invoke('sieve', '--func', 'liouville', '--n', '1000', '--cache', cache)[0], 0)
        code, out, _ = self.invoke('classify', '--cache', cache, '--mmax', '100', '--kmax', '100')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "not eventually periodic up to (M_max=100, k_max=100); "
                                   "rational branch excluded at this scale")
        self.assertTrue(lines[1].startswith("closest rejected claim: (M=100, k="))

    def test_sieve_negative_literal(self):
        code, out, _ = self.invoke('sieve', '--func', 'literal', '--values', '-1,0,1')
        self.assertEqual(code, 0)
        self.assertIn("counts: +1=1, 0=1, -1=1\n", out)

    def test_refute(self):
        code, out, _ = self.invoke('refute', '--func', 'liouville', '--preperiod', '10', '--period', '3')
        self.assertEqual(code, 0)
        self.assertEqual(out, (
            "witness for claim (M=10, k=3): p=2, n=4, a=12, b=24\n"
            "f(a)=-1, f(b)=+1\n"
            "verified: true\n"
        ))
        assignment = self.write('a.txt', "default: +1\n3: -1\n")
        code, out, _ = self.invoke('refute', '--assignment', assignment, '--preperiod', '5', '--period', '2')
        self.assertEqual(code, 0)
        self.assertIn("p=3, n=3, a=6, b=18\n", out)
        self.assertIn("f(a)=-1, f(b)=+1\n", out)

        code, out, _ = self.invoke('refute', '--func', 'moebius', '--preperiod', '10', '--period', '6')
        self.assertEqual(code, 0)
        self.assertTrue(out.endswith("verified: true\n"))

    def test_refute_trivial_assignment(self):
        assignment = self.write('trivial.txt', "default: +1\n")
        code, out, err = self.invoke('refute', '--assignment', assignment, '--preperiod', '0', '--period', '1')
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        self.assertTrue(err.startswith("error: "))

    def test_annihilate(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', ','.join(['1'] * 20), '--cache', cache)
        code, out, _ = self.invoke('annihilate', '--cache', cache, '--trunc', '8', '--order', '1', '--deg', '1')
        self.assertEqual(code, 0)
        self.assertEqual(out, "(z) + (-1+z)*F = 0\nverified to T=16\n")

        lam = self.path('lam.aps')
        self.invoke('sieve', '--func', 'liouville', '--n', '96', '--cache', lam)
        code, out, _ = self.invoke('annihilate', '--cache', lam, '--trunc', '48', '--order', '2', '--deg', '3')
        self.assertEqual((code, out), (0, "none at this scale\n"))

    def test_eval(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', ','.join(['1'] * 100), '--cache', cache)
        code, out, _ = self.invoke('eval', '--cache', cache, '--n', '10', '--z', '1/2')
        self.assertEqual((code, out), (0, "F_10(1/2) = 1023/1024\n"))

        code, out, _ = self.invoke('eval', '--cache', cache, '--sector', '-0.5,0.5', '--radii', '0.5,0.9',
                                   '--samples', '3')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "radius,theta,re,im,abs_FN,error_bound")
        self.assertEqual(len(lines), 7)

        mu = self.path('mu.aps')
        self.invoke('sieve', '--func', 'moebius', '--n', '4', '--cache', mu)
        code, out, _ = self.invoke('eval', '--cache', mu, '--digits', '--base', '3')
        self.assertEqual(code, 0)
        self.assertEqual(out, (
            "base 3, N=4\n"
            "digits: +--0\n"
            "value = 5/27\n"
            "digit periodicity: no eventual period at this scale\n"
        ))

    def test_negative_option_values(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', ','.join(['1'] * 10), '--cache', cache)
        self.assertEqual(self.invoke('eval', '--cache', cache, '--n', '3', '--z', '-1/2'),
                         (0, "F_3(-1/2) = -3/8\n", ''))
        code, _, err = self.invoke('rootbound', '--poly', '-1,0,1', '--count-at', '-1')
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: "))
        self.assertNotIn("expected one argument", err)

    def test_zero_samples_rejected(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', ','.join(['1'] * 10), '--cache', cache)
        code, out, err = self.invoke('eval', '--cache', cache, '--radii', '0.5', '--samples', '0')
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        self.assertTrue(err.startswith("error: "))

    def test_single_line_diagnostic(self):
        """库函数记录的错误日志不应出现在错误流中"""
        launcher = os.path.join(PROJECT_ROOT, 'main.py')
        for argv in (['zerorun', '--length', '0'],
                     ['--config', self.write('bad.json', '{"sieve": {"workers": 0}}'), 'zerorun', '--length', '1']):
            result = subprocess.run([sys.executable, launcher] + argv, cwd=PROJECT_ROOT,
                                    capture_output=True, text=True, encoding='utf-8')
            self.assertEqual(result.returncode, 1, argv)
            self.assertEqual(result.stdout, '')
            lines = result.stderr.splitlines()
            self.assertEqual(len(lines), 1, result.stderr)
            self.assertTrue(lines[0].startswith("error: "))

        result = subprocess.run([sys.executable, launcher, '--debug', 'zerorun', '--length', '0'],
                                cwd=PROJECT_ROOT, capture_output=True, text=True, encoding='utf-8')
        self.assertEqual(result.returncode, 1)
        self.assertGreater(len(result.stderr.splitlines()), 1)

    def test_usage_errors(self):
        for argv in ([], ['bogus'], ['classify'], ['sieve', '--func', 'nope'], ['zerorun', '--length', 'x']):
            code, out, err = self.invoke(*argv)
            self.assertEqual(code, 1, argv)
            self.assertEqual(out, '')
            self.assertTrue(err.startswith("error: "), argv)

    def test_missing_cache(self):
        code, _, err = self.invoke('classify', '--cache', self.path('missing.aps'), '--mmax', '1', '--kmax', '1')
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: "))

    def test_corrupt_cache(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', '1,1,1,1', '--cache', cache)
        with open(cache, 'rb') as f:
            data = f.read()
        with open(cache, 'wb') as f:
            f.write(data[:-1])
        code, out, err = self.invoke('classify', '--cache', cache, '--mmax', '1', '--kmax', '1')
        self.assertEqual(code, 2)
        self.assertEqual(out, '')
        self.assertTrue(err.startswith("error: corrupt cache"))

    def test_unsupported_version(self):
        cache = self.path('ones.aps')
        self.invoke('sieve', '--func', 'literal', '--values', '1,1,1,1', '--cache', cache)
        with open(cache, 'rb') as f:
            data = bytearray(f.read())
        data[4] = 0x02
        with open(cache, 'wb') as f:
            f.write(bytes(data))
        code, _, err = self.invoke('eval', '--cache', cache, '--z', '1/2')
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: unsupported cache version"))


if __name__ == '__main__':
    unittest.main()
