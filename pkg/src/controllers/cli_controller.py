#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令行控制器模块
每个子命令一个处理方法：读取缓存或生成序列，调用模型层计算，
把确定性的文本 / CSV 报告写到输出流
"""
import sys
from typing import List, Optional, TextIO

from src.models.annihilator import search_annihilator
from src.models.arith_sequence import ArithSequence, PrimeAssignment, SourceTag
from src.models.arith_sieve import (
    sieve_cm, sieve_liouville, sieve_mobius, value_by_factorization
)
from src.models.int_polynomial import IntPolynomial
from src.models.periodicity import PeriodClaim, last_mismatch, refute_period_cm
from src.models.rationality import classify_prefix, hankel_rank_profile
from src.models.root_bounds import cauchy_radius, count_roots_in_disk
from src.models.series_eval import (
    EvalPoint, SectorSpec, digits_in_base, partial_sum, sector_bound_probe
)
from src.models.zero_runs import (
    crt_zero_run, find_minimal_zero_run, refute_period_moebius,
    verify_moebius_witness, verify_zero_run
)
from src.utils.cache_manager import cache_read, cache_write
from src.utils.config_manager import get_config
from src.utils.logger import InvalidArgumentError, get_logger

logger = get_logger('cli_controller')

_PREVIEW = 20


def _parse_int_list(text: str, name: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise InvalidArgumentError(f"{name} 必须是逗号分隔的整数: {text!r}", field_errors={name: text})


def _parse_float_list(text: str, name: str) -> List[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise InvalidArgumentError(f"{name} 必须是逗号分隔的数: {text!r}", field_errors={name: text})


def _read_assignment(path: str) -> PrimeAssignment:
    with open(path, 'r', encoding='utf-8') as f:
        return PrimeAssignment.from_text(f.read())


def _format_values(values: List[int]) -> str:
    return ','.join(str(v) for v in values)


class CliController:
    """
    命令行控制器
    处理方法接收 argparse 命名空间，返回退出码
    """

    def __init__(self, out: Optional[TextIO] = None):
        self.out = out or sys.stdout

    def _emit(self, line: str = ''):
        self.out.write(line + '\n')

    def _load(self, path: str) -> ArithSequence:
        seq = cache_read(path)
        logger.debug(f"载入序列: {seq.source.describe()}, N={seq.length}")
        return seq

    # ---- sieve ----

    def sieve(self, args) -> int:
        func = args.func
        if func == 'liouville':
            seq = sieve_liouville(self._require_n(args))
        elif func == 'moebius':
            seq = sieve_mobius(self._require_n(args))
        elif func == 'cm':
            if not args.assignment:
                raise InvalidArgumentError("--func cm 需要 --assignment FILE")
            seq = sieve_cm(_read_assignment(args.assignment), self._require_n(args))
        else:
            if not args.values:
                raise InvalidArgumentError("--func literal 需要 --values")
            values = _parse_int_list(args.values, 'values')
            if args.n is not None and args.n != len(values):
                raise InvalidArgumentError(f"--n={args.n} 与 --values 的个数 {len(values)} 不一致")
            seq = ArithSequence.from_values(values, SourceTag.literal())

        arr = seq.to_array()[1:]
        self._emit(f"sieved {seq.source.describe()}: N={seq.length}")
        self._emit(f"counts: +1={int((arr == 1).sum())}, 0={int((arr == 0).sum())}, -1={int((arr == -1).sum())}")
        self._emit(f"first values: {_format_values(seq.values[:_PREVIEW])}")
        if args.cache:
            cache_write(seq, args.cache)
            self._emit(f"cache written: {args.cache}")
        return 0

    @staticmethod
    def _require_n(args) -> int:
        if args.n is None:
            raise InvalidArgumentError("需要 --n N")
        return args.n

    # ---- classify ----

    def classify(self, args) -> int:
        seq = self._load(args.cache)
        result = classify_prefix(seq, args.mmax, args.kmax)
        self._emit(result.describe())
        if result.is_rational_candidate:
            self._emit(f"period: {result.claim}")
        else:
            self._emit(self._closest_rejection(seq, args.mmax, args.kmax))

        if args.hankel:
            for order, det in enumerate(hankel_rank_profile(seq, args.hankel), start=1):
                self._emit(f"det H_{order} = {det}")
        return 0

    @staticmethod
    def _closest_rejection(seq: ArithSequence, m_max: int, k_max: int) -> str:
        """失配位置最小的周期，即最接近成立的声明"""
        best = None
        for k in range(1, k_max + 1):
            index = last_mismatch(seq, PeriodClaim(m_max, k))
            if index is not None and (best is None or index < best[1]):
                best = (k, index)
        k, index = best
        return f"closest rejected claim: {PeriodClaim(m_max, k)} fails at index {index}"

    # ---- refute ----

    def refute(self, args) -> int:
        claim = PeriodClaim(args.preperiod, args.period)
        if args.func == 'moebius':
            witness = refute_period_moebius(claim)
            self._emit(witness.describe())
            self._emit(f"verified: {str(verify_moebius_witness(witness)).lower()}")
            return 0

        if args.func == 'liouville':
            assignment = PrimeAssignment.liouville()
        elif args.assignment:
            assignment = _read_assignment(args.assignment)
        else:
            raise InvalidArgumentError("refute 需要 --assignment FILE 或 --func liouville|moebius")

        witness = refute_period_cm(assignment, claim)
        source = SourceTag.completely_multiplicative(assignment)
        fa = value_by_factorization(source, witness.a)
        fb = value_by_factorization(source, witness.b)
        self._emit(witness.describe())
        self._emit(f"f(a)={fa:+d}, f(b)={fb:+d}")
        ok = witness.a > claim.preperiod and (witness.b - witness.a) % claim.period == 0 and fb == -fa != 0
        self._emit(f"verified: {str(ok).lower()}")
        return 0

    # ---- annihilate ----

    def annihilate(self, args) -> int:
        seq = self._load(args.cache)
        candidate = search_annihilator(seq, args.trunc, args.order, args.deg)
        if candidate is None:
            self._emit("none at this scale")
            return 0
        self._emit(candidate.describe())
        self._emit(f"verified to T={candidate.verified_to}")
        return 0

    # ---- rootbound ----

    def rootbound(self, args) -> int:
        poly = IntPolynomial.parse(args.poly)
        r = cauchy_radius(poly)
        self._emit(f"r = {r}")
        if args.count_at:
            radius = EvalPoint.parse(args.count_at).rational
            count = count_roots_in_disk(poly, radius)
            self._emit(f"roots in |z| < {radius}: {count} (certified, degree {poly.degree})")
        return 0

    # ---- zerorun ----

    def zerorun(self, args) -> int:
        if args.minimal:
            if args.limit is None:
                raise InvalidArgumentError("--minimal 需要 --limit X")
            x = find_minimal_zero_run(args.length, args.limit)
            if x is None:
                self._emit(f"no run of {args.length} zeros with x+L <= {args.limit}")
            else:
                self._emit(f"least run of {args.length} zeros: x = {x} "
                           f"(indices {x + 1}..{x + args.length})")
            return 0

        cert = crt_zero_run(args.length)
        self._emit(f"zero-run certificate: L={cert.length}")
        self._emit(f"x = {cert.x}")
        moebius = SourceTag.moebius()
        for square, n, p in cert.divisibilities():
            line = f"  {square} | {n} (p={p})"
            if args.verify:
                line += f" mu={value_by_factorization(moebius, n)}"
            self._emit(line)
        if args.verify:
            self._emit(f"verified: {str(verify_zero_run(cert)).lower()}")
        return 0

    # ---- eval ----

    def evaluate(self, args) -> int:
        seq = self._load(args.cache)
        n_terms = seq.length if args.n is None else args.n

        if args.digits:
            record = digits_in_base(seq, args.base, n_terms)
            self._emit(record.describe())
            return 0

        if args.radii:
            radii = _parse_float_list(args.radii, 'radii')
            if args.sector:
                bounds = _parse_float_list(args.sector, 'sector')
                if len(bounds) != 2:
                    raise InvalidArgumentError(f"--sector 需要 LO,HI 两个角度: {args.sector!r}")
                lo, hi = bounds
            else:
                lo = get_config('series_eval.sector_theta_lo')
                hi = get_config('series_eval.sector_theta_hi')
            samples = args.samples if args.samples is not None else get_config('series_eval.samples_per_arc', 16)
            spec = SectorSpec(theta_lo=lo, theta_hi=hi, radii=tuple(radii), samples_per_arc=samples)
            report = sector_bound_probe(seq, spec, n_terms, args.precision)
            self.out.write(report.to_csv())
            return 0

        if not args.z:
            raise InvalidArgumentError("eval 需要 --z P/Q、--digits 或 --radii 之一")
        z = EvalPoint.parse(args.z)
        value = partial_sum(seq, n_terms, z)
        self._emit(f"F_{n_terms}({z}) = {value}")
        return 0
