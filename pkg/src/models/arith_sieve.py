"""
算术函数筛法模块
生成 Liouville λ、Möbius μ 以及任意完全积性 ±1 函数的系数前缀，
并提供不依赖筛表的试除法求值，用于抽查筛法结果
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from src.models.arith_sequence import (
    ArithSequence, PrimeAssignment, SourceKind, SourceTag
)
from src.utils.config_manager import get_config
from src.utils.logger import InvalidArgumentError, get_logger, handle_errors

logger = get_logger('arith_sieve')


def small_primes(limit: int) -> np.ndarray:
    """
    埃氏筛求出 [2, limit] 内的全部素数

    Args:
        limit: 上界（含）

    Returns:
        np.ndarray: 素数数组 (int64)
    """
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _index_dtype(limit: int):
    return np.int32 if limit < 2 ** 31 else np.int64


def smallest_prime_factors(limit: int) -> np.ndarray:
    """
    最小素因子表 spf[n]，n ∈ [0, limit]；spf[0] = spf[1] = 0
    """
    spf = np.zeros(limit + 1, dtype=_index_dtype(limit))
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    unmarked = np.flatnonzero(spf == 0)
    unmarked = unmarked[unmarked >= 2]
    spf[unmarked] = unmarked
    return spf


def _sign_table(assignment: PrimeAssignment, limit: int) -> np.ndarray:
    """素数处取值的查找表，合数位置无意义"""
    table = np.full(limit + 1, assignment.default_sign, dtype=np.int8)
    for p, s in assignment.exceptions:
        if p <= limit:
            table[p] = s
    return table


def _values_from_spf(kind: SourceKind, limit: int, assignment: Optional[PrimeAssignment]) -> np.ndarray:
    """
    基于最小素因子表逐层剥离素因子，得到 f(1..limit)
    """
    spf = smallest_prime_factors(limit)
    rest = np.arange(limit + 1, dtype=spf.dtype)
    active = rest >= 2
    parity = np.zeros(limit + 1, dtype=np.int8)       # 负号个数的奇偶
    square_hit = np.zeros(limit + 1, dtype=bool)
    last_prime = np.zeros(limit + 1, dtype=spf.dtype)
    signs = _sign_table(assignment, limit) if kind == SourceKind.COMPLETELY_MULTIPLICATIVE else None

    # 每轮剥掉一个素因子，轮数不超过 log2(limit)
    while np.any(active):
        idx = np.flatnonzero(active)
        p = spf[rest[idx]]
        if kind == SourceKind.MOEBIUS:
            square_hit[idx] |= last_prime[idx] == p
            last_prime[idx] = p
            parity[idx] ^= 1
        elif kind == SourceKind.LIOUVILLE:
            parity[idx] ^= 1
        else:
            parity[idx] ^= (signs[p] == -1).astype(np.int8)
        rest[idx] //= p
        active[idx] = rest[idx] >= 2

    values = np.where(parity == 1, -1, 1).astype(np.int8)
    if kind == SourceKind.MOEBIUS:
        values[square_hit] = 0
    return values[1:]


def _segment_values(kind: SourceKind, lo: int, hi: int, base_primes: np.ndarray,
                    assignment: Optional[PrimeAssignment]) -> np.ndarray:
    """
    分段筛: 计算 f(lo..hi-1)，只用到不超过 sqrt(N) 的基素数

    剥去所有小素因子后剩余部分若大于 1，必为单个大素数。
    """
    rest = np.arange(lo, hi, dtype=np.int64)
    parity = np.zeros(hi - lo, dtype=np.int8)
    square_hit = np.zeros(hi - lo, dtype=bool)

    for p in base_primes:
        p = int(p)
        negative = True
        if kind == SourceKind.COMPLETELY_MULTIPLICATIVE:
            negative = assignment.sign(p) == -1
        pk = p
        while pk < hi:
            start = ((lo + pk - 1) // pk) * pk
            if start < hi:
                sl = slice(start - lo, hi - lo, pk)
                rest[sl] //= p
                if kind == SourceKind.MOEBIUS:
                    if pk == p:
                        parity[sl] ^= 1
                    else:
                        square_hit[sl] = True
                elif negative:
                    parity[sl] ^= 1
            if kind == SourceKind.MOEBIUS and pk > p:
                # p^2 的倍数已置零，更高次幂不影响结果
                break
            pk *= p

    if kind == SourceKind.MOEBIUS:
        # 被 p^2 整除时只除掉了一次 p，剩余部分可能仍含 p，但这些位置已经为零
        large = (rest > 1) & ~square_hit
    else:
        large = rest > 1

    if kind == SourceKind.COMPLETELY_MULTIPLICATIVE:
        large_negative = large.copy() if assignment.default_sign == -1 else np.zeros_like(large)
        for q, s in assignment.exceptions:
            hit = rest == q
            if np.any(hit):
                large_negative[hit & large] = s == -1
        parity ^= large_negative.astype(np.int8)
    else:
        parity ^= large.astype(np.int8)

    values = np.where(parity == 1, -1, 1).astype(np.int8)
    if kind == SourceKind.MOEBIUS:
        values[square_hit] = 0
    return values


def _sieve_segmented(kind: SourceKind, limit: int, assignment: Optional[PrimeAssignment],
                     segment_size: int, workers: int) -> np.ndarray:
    """
    分段模式：各段相互独立，可并行；按段序拼接保证结果确定
    """
    base_primes = small_primes(math.isqrt(limit))
    bounds: List[Tuple[int, int]] = []
    lo = 1
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        bounds.append((lo, hi))
        lo = hi

    logger.debug(f"分段筛: {len(bounds)} 段，基素数 {len(base_primes)} 个，线程 {workers}")
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _segment_values(kind, b[0], b[1], base_primes, assignment), bounds))
    else:
        parts = [_segment_values(kind, lo, hi, base_primes, assignment) for lo, hi in bounds]
    return np.concatenate(parts)


def _sieve(kind: SourceKind, n: int, assignment: Optional[PrimeAssignment] = None,
           segment_threshold: Optional[int] = None) -> np.ndarray:
    """按配置选择整表或分段模式，返回 f(1..n)"""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidArgumentError(f"N 必须是正整数: {n!r}")
    n = int(n)
    threshold = segment_threshold if segment_threshold is not None else get_config('sieve.segment_threshold', 2 ** 26)
    if n > threshold:
        segment_size = get_config('sieve.segment_size', 2 ** 20)
        workers = get_config('sieve.workers', 1)
        return _sieve_segmented(kind, n, assignment, segment_size, workers)
    return _values_from_spf(kind, n, assignment)


@handle_errors('arith_sieve')
def sieve_liouville(n: int, segment_threshold: Optional[int] = None) -> ArithSequence:
    """
    生成 (λ(1), ..., λ(N))，λ(n) = (-1)^Ω(n)

    Args:
        n: 项数 N >= 1
        segment_threshold: 覆盖配置中的分段阈值（测试用）

    Returns:
        ArithSequence: Liouville 前缀

    Raises:
        InvalidArgumentError: N < 1
    """
    values = _sieve(SourceKind.LIOUVILLE, n, segment_threshold=segment_threshold)
    logger.info(f"Liouville 筛完成: N={n}")
    return ArithSequence.from_values(values, SourceTag.liouville())


@handle_errors('arith_sieve')
def sieve_mobius(n: int, segment_threshold: Optional[int] = None) -> ArithSequence:
    """
    生成 (μ(1), ..., μ(N))；n 含平方因子时 μ(n) = 0

    Raises:
        InvalidArgumentError: N < 1
    """
    values = _sieve(SourceKind.MOEBIUS, n, segment_threshold=segment_threshold)
    logger.info(f"Möbius 筛完成: N={n}")
    return ArithSequence.from_values(values, SourceTag.moebius())


@handle_errors('arith_sieve')
def sieve_cm(assignment: PrimeAssignment, n: int, segment_threshold: Optional[int] = None) -> ArithSequence:
    """
    生成由素数赋值诱导的完全积性函数前缀 (f(1), ..., f(N))

    Args:
        assignment: 素数赋值
        n: 项数 N >= 1

    Raises:
        InvalidArgumentError: N < 1
    """
    values = _sieve(SourceKind.COMPLETELY_MULTIPLICATIVE, n, assignment, segment_threshold)
    logger.info(f"完全积性筛完成: N={n}, 例外素数 {len(assignment.exceptions)} 个")
    return ArithSequence.from_values(values, SourceTag.completely_multiplicative(assignment))


def sieve_source(source: SourceTag, n: int) -> ArithSequence:
    """按来源标签分派到对应的筛法"""
    if source.kind == SourceKind.LIOUVILLE:
        return sieve_liouville(n)
    if source.kind == SourceKind.MOEBIUS:
        return sieve_mobius(n)
    if source.kind == SourceKind.COMPLETELY_MULTIPLICATIVE:
        return sieve_cm(source.assignment, n)
    raise InvalidArgumentError("Literal 来源没有生成规则，无法筛出")


def trial_factor(n: int) -> List[Tuple[int, int]]:
    """
    试除法分解 n，返回 [(p, e), ...]，p 升序
    """
    if n < 1:
        raise InvalidArgumentError(f"只能分解正整数: {n}")
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            factors.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return factors


def _moebius_by_trial(n: int) -> int:
    """试除求 μ(n)，发现平方因子立即返回 0"""
    sign = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            sign = -sign
        d += 1 if d == 2 else 2
    if n > 1:
        sign = -sign
    return sign


def value_by_factorization(source: SourceTag, n: int) -> int:
    """
    试除法求 f(n)，不使用任何筛表，作为独立校验

    Args:
        source: 来源标签（Literal 没有规则，不支持）
        n: 正整数

    Returns:
        int: f(n) ∈ {-1, 0, +1}

    Raises:
        InvalidArgumentError: n < 1 或来源为 Literal
    """
    if n < 1:
        raise InvalidArgumentError(f"n 必须为正整数: {n}")
    if source.kind == SourceKind.MOEBIUS:
        return _moebius_by_trial(n)
    if source.kind == SourceKind.LITERAL:
        raise InvalidArgumentError("Literal 来源没有生成规则")

    value = 1
    for p, e in trial_factor(n):
        sign = -1 if source.kind == SourceKind.LIOUVILLE else source.assignment.sign(p)
        if sign == -1 and e % 2 == 1:
            value = -value
    return value
