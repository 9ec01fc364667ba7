"""
周期性模块
判定系数前缀是否最终周期，并为含负素数值的完全积性函数构造
反驳任意周期声明的显式见证
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.models.arith_sequence import ArithSequence, PrimeAssignment
from src.utils.config_manager import get_config
from src.utils.logger import (
    InvalidArgumentError, NoNegativePrimeError, OutOfRangeError, get_logger, handle_errors
)

logger = get_logger('periodicity')


@dataclass(frozen=True)
class PeriodClaim:
    """
    周期声明：第 M 项之后以 k 为周期
    """
    preperiod: int
    period: int

    def __post_init__(self):
        if self.period < 1:
            raise InvalidArgumentError(f"周期 k 必须至少为 1: {self.period}")
        if self.preperiod < 0:
            raise InvalidArgumentError(f"前周期 M 不能为负: {self.preperiod}")

    def __str__(self) -> str:
        return f"(M={self.preperiod}, k={self.period})"


@dataclass(frozen=True)
class PeriodWitness:
    """
    周期声明的反例：a = n·k, b = p·n·k，两者同余且 f(b) = -f(a)

    构造时不做检查，由 verify_witness 负责。
    """
    p: int
    n: int
    a: int
    b: int
    claim: PeriodClaim

    def describe(self) -> str:
        return (f"witness for claim {self.claim}: p={self.p}, n={self.n}, "
                f"a={self.a}, b={self.b}")


def _mismatch_indices(arr: np.ndarray, length: int, k: int) -> np.ndarray:
    """所有满足 c_i != c_{i+k} 的 i（1 起始，i <= N-k）"""
    return np.flatnonzero(arr[1:length - k + 1] != arr[1 + k:length + 1]) + 1


def last_mismatch(seq: ArithSequence, claim: PeriodClaim) -> Optional[int]:
    """
    声明在前缀上失败的位置

    Returns:
        Optional[int]: 最大的 i (M < i <= N-k) 使 c_i != c_{i+k}；声明成立时返回 None
    """
    k, m = claim.period, claim.preperiod
    if k >= seq.length:
        return None
    idx = _mismatch_indices(seq.to_array(), seq.length, k)
    idx = idx[idx > m]
    return int(idx[-1]) if idx.size else None


def claim_holds(seq: ArithSequence, claim: PeriodClaim) -> bool:
    """声明在整个前缀上是否成立"""
    return last_mismatch(seq, claim) is None


def _minimal_preperiod(arr: np.ndarray, length: int, k: int) -> int:
    """给定周期 k 时最小的前周期 M（最后一个失配位置，无失配为 0）"""
    idx = _mismatch_indices(arr, length, k)
    return int(idx[-1]) if idx.size else 0


@handle_errors('periodicity')
def detect_eventual_period(seq: ArithSequence, m_max: int, k_max: int) -> Optional[PeriodClaim]:
    """
    在 (M, k) <= (m_max, k_max) 范围内寻找最终周期

    先取最小的 k，再取该 k 下最小的 M；结论只针对前缀本身。

    Args:
        seq: 系数前缀
        m_max: 前周期上界
        k_max: 周期上界

    Returns:
        Optional[PeriodClaim]: 找到的声明，否则 None

    Raises:
        InvalidArgumentError: 上界小于 1，或前缀长度不足 m_max + 2·k_max
    """
    if m_max < 1 or k_max < 1:
        raise InvalidArgumentError(f"上界必须至少为 1: m_max={m_max}, k_max={k_max}")
    if seq.length < m_max + 2 * k_max:
        raise InvalidArgumentError(
            f"前缀过短: N={seq.length} < m_max + 2·k_max = {m_max + 2 * k_max}")

    arr = seq.to_array()
    n = seq.length
    workers = get_config('periodicity.workers', 1)

    if workers > 1 and k_max > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            preperiods = list(pool.map(lambda k: _minimal_preperiod(arr, n, k), range(1, k_max + 1)))
        for k, m in enumerate(preperiods, start=1):
            if m <= m_max:
                logger.info(f"检测到最终周期: M={m}, k={k}")
                return PeriodClaim(m, k)
    else:
        for k in range(1, k_max + 1):
            m = _minimal_preperiod(arr, n, k)
            if m <= m_max:
                logger.info(f"检测到最终周期: M={m}, k={k}")
                return PeriodClaim(m, k)

    logger.info(f"在 (m_max={m_max}, k_max={k_max}) 范围内未检测到最终周期")
    return None


@handle_errors('periodicity')
def refute_period_cm(assignment: PrimeAssignment, claim: PeriodClaim) -> PeriodWitness:
    """
    为完全积性函数构造反驳周期声明的见证

    取 f(p) = -1 的最小素数 p 和使 n·k > M 的最小 n，则
    f(p·n·k) = f(p)·f(n·k) = -f(n·k)，而 p·n·k ≡ n·k (mod k)。

    Raises:
        NoNegativePrimeError: 所有素数都取 +1
    """
    p = assignment.smallest_negative_prime()
    if p is None:
        raise NoNegativePrimeError("所有素数都取 +1，常函数 1 是周期的，无法反驳")
    k, m = claim.period, claim.preperiod
    n = m // k + 1
    a = n * k
    witness = PeriodWitness(p=p, n=n, a=a, b=p * a, claim=claim)
    logger.debug(f"构造见证: {witness.describe()}")
    return witness


def verify_witness(seq: ArithSequence, w: PeriodWitness) -> bool:
    """
    用具体序列值检查见证的三个不变量

    a, b > M；a ≡ b (mod k)；f(b) = -f(a) 且 f(a) ≠ 0。

    Raises:
        OutOfRangeError: 见证下标超出前缀
    """
    if w.b > seq.length or w.a > seq.length or w.a < 1 or w.b < 1:
        raise OutOfRangeError(
            f"见证下标 a={w.a}, b={w.b} 超出前缀 [1, {seq.length}]", max(w.a, w.b), seq.length)
    m, k = w.claim.preperiod, w.claim.period
    if not (w.a > m and w.b > m):
        return False
    if (w.b - w.a) % k != 0:
        return False
    fa, fb = seq[w.a], seq[w.b]
    return fa != 0 and fb == -fa
