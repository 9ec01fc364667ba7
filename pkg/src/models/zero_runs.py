"""
零段模块
用中国剩余定理构造 μ 的任意长连续零段证书，并独立复核；
同时给出 μ 版本的周期反驳见证和基于筛法的最小零段搜索
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime, nextprime, prime
from sympy.ntheory.modular import crt

from src.models.arith_sequence import SourceTag
from src.models.arith_sieve import sieve_mobius, value_by_factorization
from src.models.periodicity import PeriodClaim
from src.utils.logger import InvalidArgumentError, get_logger, handle_errors

logger = get_logger('zero_runs')

_MOEBIUS = SourceTag.moebius()


@dataclass(frozen=True)
class ZeroRunCertificate:
    """
    x+1, ..., x+L 各含一个素数平方因子

    Attributes:
        x: 起点（最小非负解）
        length: 段长 L
        congruences: ((p_i, p_i², residue_i), ...)，residue_i = -i mod p_i²
    """
    x: int
    length: int
    congruences: Tuple[Tuple[int, int, int], ...]

    @property
    def modulus(self) -> int:
        return math.prod(m for _, m, _ in self.congruences)

    def divisibilities(self) -> List[Tuple[int, int, int]]:
        """[(p², x+i, p), ...]"""
        return [(m, self.x + i, p) for i, (p, m, _) in enumerate(self.congruences, start=1)]


@dataclass(frozen=True)
class MoebiusPeriodWitness:
    """
    μ 周期声明的反例：q 为素数 (μ(q) = -1)，p² | a (μ(a) = 0)，a ≡ q (mod k)
    """
    q: int
    p: int
    a: int
    claim: PeriodClaim

    def describe(self) -> str:
        return (f"witness for claim {self.claim}: q={self.q} (prime, mu=-1), "
                f"a={self.a} ({self.p}^2 | a, mu=0)")


@handle_errors('zero_runs')
def crt_solve(congruences: Sequence[Tuple[int, int]]) -> int:
    """
    解两两互素模数的同余方程组

    Args:
        congruences: [(residue, modulus), ...]

    Returns:
        int: 0 <= x < ∏ moduli 的唯一解；空方程组返回 0

    Raises:
        InvalidArgumentError: 模数小于 1 或不两两互素
    """
    congruences = [(int(r), int(m)) for r, m in congruences]
    if not congruences:
        return 0
    for _, m in congruences:
        if m < 1:
            raise InvalidArgumentError(f"模数必须至少为 1: {m}")
    for i, (_, mi) in enumerate(congruences):
        for _, mj in congruences[i + 1:]:
            g = math.gcd(mi, mj)
            if g != 1:
                raise InvalidArgumentError(f"模数 {mi} 与 {mj} 不互素 (gcd = {g})")

    moduli = [m for _, m in congruences]
    residues = [r % m for r, m in congruences]
    solution = crt(moduli, residues)
    if solution is None:
        # 互素时不会发生
        raise InvalidArgumentError("同余方程组无解")
    return int(solution[0])


@handle_errors('zero_runs')
def crt_zero_run(length: int) -> ZeroRunCertificate:
    """
    取前 L 个素数，解 x ≡ -i (mod p_i²)，i = 1..L

    Raises:
        InvalidArgumentError: L < 1
    """
    if length < 1:
        raise InvalidArgumentError(f"零段长度必须至少为 1: {length}")
    congruences = []
    for i in range(1, length + 1):
        p = int(prime(i))
        m = p * p
        congruences.append((p, m, (-i) % m))
    x = crt_solve([(r, m) for _, m, r in congruences])
    cert = ZeroRunCertificate(x=x, length=length, congruences=tuple(congruences))
    logger.info(f"零段证书: L={length}, x={x}")
    return cert


def verify_zero_run(cert: ZeroRunCertificate) -> bool:
    """
    双重复核：p_i² | x+i，且试除法给出 μ(x+i) = 0
    """
    if cert.length < 1 or len(cert.congruences) != cert.length or cert.x < 0:
        return False
    for i, (p, m, residue) in enumerate(cert.congruences, start=1):
        if m != p * p or not isprime(p):
            return False
        if residue != (-i) % m or cert.x % m != residue:
            return False
        if (cert.x + i) % m != 0:
            return False
        if value_by_factorization(_MOEBIUS, cert.x + i) != 0:
            return False
    return True


@handle_errors('zero_runs')
def find_minimal_zero_run(length: int, limit: int) -> Optional[int]:
    """
    筛法搜索最小的 x 使 μ(x+1) = ... = μ(x+L) = 0 且 x+L <= limit

    只用于报告，不产生证书。

    Raises:
        InvalidArgumentError: L < 1 或 limit < 1
    """
    if length < 1 or limit < 1:
        raise InvalidArgumentError(f"段长与上限必须至少为 1: L={length}, limit={limit}")
    if limit < length:
        return None
    zero = sieve_mobius(limit).to_array()[1:] == 0
    windows = np.lib.stride_tricks.sliding_window_view(zero, length).all(axis=1)
    hits = np.flatnonzero(windows)
    if not hits.size:
        logger.info(f"{limit} 以内没有长度为 {length} 的零段")
        return None
    return int(hits[0])


@handle_errors('zero_runs')
def refute_period_moebius(claim: PeriodClaim) -> MoebiusPeriodWitness:
    """
    反驳 μ 的任意周期声明

    取 M 之后的第一个素数 q，以及不整除 k 的最小素数 p，
    用 CRT 解 a ≡ q (mod k)、a ≡ 0 (mod p²)，再平移到 M 之后。
    """
    m, k = claim.preperiod, claim.period
    q = int(nextprime(m))
    p = 2
    while k % p == 0:
        p = int(nextprime(p))
    step = k * p * p
    a = crt_solve([(q, k), (0, p * p)])
    if a <= m:
        a += ((m - a) // step + 1) * step
    witness = MoebiusPeriodWitness(q=q, p=p, a=a, claim=claim)
    logger.debug(f"构造 μ 见证: {witness.describe()}")
    return witness


def verify_moebius_witness(w: MoebiusPeriodWitness) -> bool:
    """用试除法独立检查 μ 见证"""
    m, k = w.claim.preperiod, w.claim.period
    if w.a <= m or w.q <= m or (w.a - w.q) % k != 0:
        return False
    if w.a % (w.p * w.p) != 0:
        return False
    return (value_by_factorization(_MOEBIUS, w.a) == 0
            and value_by_factorization(_MOEBIUS, w.q) == -1)
