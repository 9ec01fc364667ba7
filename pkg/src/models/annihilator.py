"""
零化多项式搜索模块
在有界的次数/阶数假设下求 a_n(z)F^n + ... + a_0(z) ≡ 0 (mod z^{T+1}) 的整数解，
核向量由无分数消元精确求得，并在加倍截断处复核
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from src.models.arith_sequence import ArithSequence
from src.models.int_polynomial import IntPolynomial
from src.utils.config_manager import get_config
from src.utils.exact_linalg import kernel_dimension as _kernel_dimension
from src.utils.exact_linalg import kernel_vector, rank_mod
from src.utils.logger import InvalidArgumentError, get_logger, handle_errors

logger = get_logger('annihilator')


@dataclass(frozen=True)
class AnnihilatorCandidate:
    """
    候选关系 Σ a_i(z) F(z)^i，coeffs[i] = a_i

    Attributes:
        order: n（最高次幂）
        coeffs: (a_0, ..., a_n)，不全为零
        degree_bound: 搜索时的次数上界 d
        truncation: 搜索截断 T
        verified_to: 已验证到的截断
    """
    order: int
    coeffs: Tuple[IntPolynomial, ...]
    degree_bound: int
    truncation: int
    verified_to: int

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        object.__setattr__(self, 'coeffs', coeffs)
        if self.order < 1:
            raise InvalidArgumentError(f"关系阶数必须至少为 1: {self.order}")
        if len(coeffs) != self.order + 1:
            raise InvalidArgumentError(f"需要 {self.order + 1} 个系数多项式，实际 {len(coeffs)}")
        if all(a.is_zero() for a in coeffs):
            raise InvalidArgumentError("零化关系的系数不能全为零")

    def describe(self) -> str:
        terms = []
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            power = '' if i == 0 else ('*F' if i == 1 else f"*F^{i}")
            terms.append(f"({a}){power}")
        return ' + '.join(terms) + ' = 0'


def _series_coefficients(seq: ArithSequence, truncation: int) -> List[int]:
    if truncation > seq.length:
        raise InvalidArgumentError(f"截断 T={truncation} 超过前缀长度 {seq.length}")
    return seq.coefficients(truncation)


def _multiply_truncated(a: Sequence[int], b: Sequence[int], order: int) -> List[int]:
    out = [0] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if not x:
            continue
        for j in range(min(order - i, len(b) - 1) + 1):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def series_power_truncated(seq: ArithSequence, exponent: int, truncation: int) -> List[int]:
    """
    F(z)^i mod z^{T+1} 的精确系数（长度 T+1）

    Raises:
        InvalidArgumentError: T 超过前缀长度或指数为负
    """
    if exponent < 0:
        raise InvalidArgumentError(f"指数不能为负: {exponent}")
    if truncation < 0:
        raise InvalidArgumentError(f"截断不能为负: {truncation}")
    f = _series_coefficients(seq, truncation)
    result = [1] + [0] * truncation
    for _ in range(exponent):
        result = _multiply_truncated(result, f, truncation)
    return result


def _series_powers(seq: ArithSequence, max_exponent: int, truncation: int) -> List[List[int]]:
    """F^0, ..., F^max_exponent mod z^{T+1}"""
    f = _series_coefficients(seq, truncation)
    powers = [[1] + [0] * truncation]
    for _ in range(max_exponent):
        powers.append(_multiply_truncated(powers[-1], f, truncation))
    return powers


def relation_system(seq: ArithSequence, truncation: int, n_max: int, d_max: int) -> List[List[int]]:
    """
    线性方程组：z^0..z^T 的系数全部为零

    未知量按 (i, e) 排列，列号 i·(d_max+1) + e 对应 a_i 的 z^e 系数。
    """
    powers = _series_powers(seq, n_max, truncation)
    cols = (n_max + 1) * (d_max + 1)
    rows = [[0] * cols for _ in range(truncation + 1)]
    for i in range(n_max + 1):
        power = powers[i]
        for e in range(d_max + 1):
            col = i * (d_max + 1) + e
            for t in range(e, truncation + 1):
                rows[t][col] = power[t - e]
    return rows


def _apply_sign_convention(vector: List[int]) -> List[int]:
    """最高阶、最高次的非零分量为正"""
    for x in reversed(vector):
        if x:
            return vector if x > 0 else [-v for v in vector]
    return vector


def _candidate_from_vector(vector: List[int], n_max: int, d_max: int, truncation: int,
                           verified_to: int) -> AnnihilatorCandidate:
    width = d_max + 1
    polys = [IntPolynomial(vector[i * width:(i + 1) * width]) for i in range(n_max + 1)]
    # 阶数取最高的非零系数多项式
    order = max(i for i, a in enumerate(polys) if not a.is_zero())
    order = max(order, 1)
    return AnnihilatorCandidate(order=order, coeffs=tuple(polys[:order + 1]), degree_bound=d_max,
                                truncation=truncation, verified_to=verified_to)


def _check_configuration(seq: ArithSequence, truncation: int, n_max: int, d_max: int, factor: int):
    if n_max < 1 or d_max < 0:
        raise InvalidArgumentError(f"阶数上界至少为 1、次数上界不能为负: n_max={n_max}, d_max={d_max}")
    unknowns = (n_max + 1) * (d_max + 1)
    if unknowns > truncation:
        raise InvalidArgumentError(
            f"未知量个数 {unknowns} 超过截断 T={truncation}，核必然非空，搜索无意义")
    if seq.length < factor * truncation:
        raise InvalidArgumentError(
            f"前缀过短: N={seq.length} < {factor}·T = {factor * truncation}")


@handle_errors('annihilator')
def search_annihilator(seq: ArithSequence, truncation: int, n_max: int,
                       d_max: int) -> Optional[AnnihilatorCandidate]:
    """
    搜索阶数 <= n_max、系数次数 <= d_max 的整系数零化关系

    取消元后第一个自由列回代得到的核向量，化为本原向量并按符号约定归一，
    在加倍截断处复核通过才返回。

    Raises:
        InvalidArgumentError: 未知量多于 T，或前缀短于 2T
    """
    factor = get_config('annihilator.verify_factor', 2)
    _check_configuration(seq, truncation, n_max, d_max, factor)

    system = relation_system(seq, truncation, n_max, d_max)
    vector = kernel_vector(system)
    if vector is None:
        logger.info(f"T={truncation}, n_max={n_max}, d_max={d_max}: 核为零，无候选")
        return None

    vector = _apply_sign_convention(vector)
    target = factor * truncation
    candidate = _candidate_from_vector(vector, n_max, d_max, truncation, target)
    if not verify_relation(seq, candidate, target):
        logger.info(f"候选关系未通过 T2={target} 复核: {candidate.describe()}")
        return None

    logger.info(f"找到零化关系: {candidate.describe()}")
    return candidate


def relation_residual(seq: ArithSequence, cand: AnnihilatorCandidate, truncation: int) -> List[int]:
    """Σ a_i F^i mod z^{T+1} 的系数"""
    powers = _series_powers(seq, cand.order, truncation)
    total = [0] * (truncation + 1)
    for a, power in zip(cand.coeffs, powers):
        if a.is_zero():
            continue
        for t, v in enumerate(a.truncated_product(power, truncation)):
            total[t] += v
    return total


def verify_relation(seq: ArithSequence, cand: AnnihilatorCandidate, truncation: int) -> bool:
    """
    Σ a_i F^i ≡ 0 (mod z^{T2+1}) 是否精确成立

    Raises:
        InvalidArgumentError: T2 超过前缀长度
    """
    residual = relation_residual(seq, cand, truncation)
    return not any(residual)


def kernel_dimension(seq: ArithSequence, truncation: int, n_max: int, d_max: int,
                     prime: Optional[int] = None) -> int:
    """
    关系方程组的核维数；给出 prime 时在模 prime 下计算（消元对照）
    """
    system = relation_system(seq, truncation, n_max, d_max)
    if prime is None:
        return _kernel_dimension(system)
    cols = (n_max + 1) * (d_max + 1)
    return cols - rank_mod(system, prime)
