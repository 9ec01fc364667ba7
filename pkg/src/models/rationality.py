"""
有理性判定模块
对有限字母表系数前缀应用“有理或超越”二分：检测到最终周期时构造显式 P/Q，
否则报告在给定规模下非周期；并用 Hankel 行列式序列做独立交叉检查
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import List, Optional

from src.models.arith_sequence import ArithSequence
from src.models.int_polynomial import IntPolynomial, one_minus_z_power
from src.models.periodicity import PeriodClaim, detect_eventual_period, last_mismatch
from src.utils.exact_linalg import determinant_mod, leading_principal_minors
from src.utils.logger import InvalidArgumentError, InvalidClaimError, get_logger, handle_errors

logger = get_logger('rationality')


@dataclass(frozen=True)
class RationalForm:
    """
    P/Q，Q(0) = 1；展开由 Q 决定的线性递推精确计算
    """
    P: IntPolynomial
    Q: IntPolynomial

    def __post_init__(self):
        if self.Q.coefficient(0) != 1:
            raise InvalidArgumentError(f"Q(0) 必须为 1: Q={self.Q}")

    def expand(self, terms: int) -> List[int]:
        """
        幂级数展开的前 terms+1 个系数 [s_0, ..., s_terms]

        s_j = P_j - Σ_{i>=1} Q_i s_{j-i}
        """
        q = self.Q.coefficients
        out: List[int] = []
        for j in range(terms + 1):
            s = self.P.coefficient(j)
            for i in range(1, min(j, len(q) - 1) + 1):
                if q[i]:
                    s -= q[i] * out[j - i]
            out.append(s)
        return out

    def matches(self, seq: ArithSequence) -> bool:
        """展开是否逐项重现整个前缀（常数项必须为 0）"""
        return self.expand(seq.length) == seq.coefficients()

    def __str__(self) -> str:
        return f"P={self.P}, Q={self.Q}"


class Verdict(Enum):
    RATIONAL_CANDIDATE = 'rational candidate'
    NON_PERIODIC_AT_SCALE = 'not eventually periodic at scale'


@dataclass(frozen=True)
class Classification:
    """
    二分判定结果

    RATIONAL_CANDIDATE 携带周期声明与 P/Q；NON_PERIODIC_AT_SCALE 只记录搜索范围。
    """
    verdict: Verdict
    m_max: int
    k_max: int
    claim: Optional[PeriodClaim] = None
    form: Optional[RationalForm] = None

    @property
    def is_rational_candidate(self) -> bool:
        return self.verdict == Verdict.RATIONAL_CANDIDATE

    def describe(self) -> str:
        if self.is_rational_candidate:
            return f"rational candidate: {self.form}"
        return (f"not eventually periodic up to (M_max={self.m_max}, k_max={self.k_max}); "
                f"rational branch excluded at this scale")


@handle_errors('rationality')
def reconstruct_rational(seq: ArithSequence, claim: PeriodClaim) -> RationalForm:
    """
    由周期声明构造 P/Q

    P(z) = (1 - z^k)·Σ_{n<=M} c_n z^n + z^M·Σ_{j=1..k} c_{M+j} z^j，Q(z) = 1 - z^k，
    再同除公共整数内容。不做多项式 GCD 约简。

    Raises:
        InvalidClaimError: 声明未通过复核
    """
    m, k = claim.preperiod, claim.period
    if m + k > seq.length:
        raise InvalidClaimError(f"前缀长度 {seq.length} 不足以覆盖 M+k = {m + k}")
    bad = last_mismatch(seq, claim)
    if bad is not None:
        raise InvalidClaimError(f"周期声明 {claim} 在下标 {bad} 处失败", mismatch_index=bad)

    c = seq.coefficients(m + k)
    head = IntPolynomial([0] + c[1:m + 1])
    tail = IntPolynomial([0] * (m + 1) + c[m + 1:m + k + 1])
    Q = one_minus_z_power(k)
    P = Q * head + tail

    g = reduce(math.gcd, P.coefficients + Q.coefficients, 0)
    if g > 1:
        P, Q = P.exact_divide(g), Q.exact_divide(g)
    form = RationalForm(P, Q)
    logger.debug(f"重构有理式: {form}")
    return form


@handle_errors('rationality')
def classify_prefix(seq: ArithSequence, m_max: int, k_max: int) -> Classification:
    """
    二分判定；从不直接声称超越

    Raises:
        InvalidArgumentError: 同 detect_eventual_period
    """
    claim = detect_eventual_period(seq, m_max, k_max)
    if claim is None:
        logger.info(f"判定: 在 ({m_max}, {k_max}) 范围内非周期")
        return Classification(Verdict.NON_PERIODIC_AT_SCALE, m_max, k_max)

    form = reconstruct_rational(seq, claim)
    if not form.matches(seq):
        # 声明已复核，展开失败说明构造有误
        raise InvalidClaimError(f"重构的 {form} 未能重现前缀")
    logger.info(f"判定: 有理候选 {claim}, {form}")
    return Classification(Verdict.RATIONAL_CANDIDATE, m_max, k_max, claim, form)


def hankel_matrix(seq: ArithSequence, order: int) -> List[List[int]]:
    """H_m = (c_{i+j-1})_{1<=i,j<=m}"""
    c = seq.coefficients(2 * order - 1)
    return [[c[i + j - 1] for j in range(1, order + 1)] for i in range(1, order + 1)]


def _check_order(seq: ArithSequence, max_order: int):
    if max_order < 1:
        raise InvalidArgumentError(f"阶数必须至少为 1: {max_order}")
    if seq.length < 2 * max_order - 1:
        raise InvalidArgumentError(
            f"前缀过短: N={seq.length} < 2·max_order - 1 = {2 * max_order - 1}")


@handle_errors('rationality')
def hankel_rank_profile(seq: ArithSequence, max_order: int) -> List[int]:
    """
    Hankel 行列式 det H_1, ..., det H_max_order（精确大整数）

    Raises:
        InvalidArgumentError: 前缀长度小于 2·max_order - 1
    """
    _check_order(seq, max_order)
    profile = leading_principal_minors(hankel_matrix(seq, max_order), max_order)
    logger.debug(f"Hankel 行列式序列 (阶 {max_order}): {profile}")
    return profile


def hankel_profile_mod(seq: ArithSequence, max_order: int, prime: int) -> List[int]:
    """
    各阶 Hankel 行列式模素数，逐阶独立消元，作为精确结果的对照
    """
    _check_order(seq, max_order)
    full = hankel_matrix(seq, max_order)
    return [determinant_mod([row[:m] for row in full[:m]], prime) for m in range(1, max_order + 1)]
