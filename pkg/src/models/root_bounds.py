"""
根界模块
代数基本定理的定量形式：Cauchy 半径 r = 1 + max|a_k|/|a_n| 精确有理计算，
以及圆盘内根个数的认证计数（用于验证包含关系）
"""
import math
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import mpmath
from sympy import Poly, symbols

from src.models.annihilator import AnnihilatorCandidate
from src.models.int_polynomial import IntPolynomial
from src.utils.config_manager import get_config
from src.utils.logger import (
    IndeterminateAtPrecisionError, InvalidArgumentError, get_logger, handle_errors
)

logger = get_logger('root_bounds')

_Z = symbols('z')

# 高斯有理数 (实部, 虚部)
Gaussian = Tuple[Fraction, Fraction]


class _Uncertified(Exception):
    """当前精度下无法完成认证"""


@handle_errors('root_bounds')
def cauchy_radius(p: IntPolynomial) -> Fraction:
    """
    r = 1 + max_{0<=k<=n-1} |a_k| / |a_n|，精确有理数

    所有根严格位于 |z| < r 内。

    Raises:
        InvalidArgumentError: 零多项式或常数多项式
    """
    if p.is_zero() or p.degree < 1:
        raise InvalidArgumentError(f"Cauchy 半径要求次数至少为 1: {p}")
    lead = abs(p.leading_coefficient)
    lower = max(abs(c) for c in p.coefficients[:-1])
    return 1 + Fraction(lower, lead)


def _g_mul(a: Gaussian, b: Gaussian) -> Gaussian:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _g_sub(a: Gaussian, b: Gaussian) -> Gaussian:
    return (a[0] - b[0], a[1] - b[1])


def _g_abs2(a: Gaussian) -> Fraction:
    return a[0] * a[0] + a[1] * a[1]


def _g_eval(coeffs_desc: Sequence[int], w: Gaussian) -> Gaussian:
    acc: Gaussian = (Fraction(0), Fraction(0))
    for c in coeffs_desc:
        acc = _g_mul(acc, w)
        acc = (acc[0] + c, acc[1])
    return acc


def _sqrt_upper(q: Fraction, bits: int) -> Fraction:
    """sqrt(q) 的有理上界，误差不超过 2^-bits"""
    scaled = q * (1 << (2 * bits))
    ceil = -(-scaled.numerator // scaled.denominator)
    return Fraction(math.isqrt(ceil) + 1, 1 << bits)


def _sqrt_lower(q: Fraction, bits: int) -> Fraction:
    """sqrt(q) 的有理下界"""
    scaled = q * (1 << (2 * bits))
    return Fraction(math.isqrt(scaled.numerator // scaled.denominator), 1 << bits)


def _to_dyadic(x, bits: int) -> Fraction:
    """把 mpf 舍入到 2^-bits 网格上的精确有理数"""
    if not mpmath.isfinite(x):
        raise _Uncertified("近似根不是有限值")
    return Fraction(int(mpmath.nint(mpmath.ldexp(x, bits))), 1 << bits)


def _approximate_roots(coeffs_desc: Sequence[int], precision: int) -> List[Gaussian]:
    """工作精度下的近似根，转为精确高斯有理数"""
    try:
        with mpmath.mp.workprec(precision):
            roots = mpmath.polyroots(list(coeffs_desc), maxsteps=max(50, precision), extraprec=precision)
            return [(_to_dyadic(mpmath.re(r), precision), _to_dyadic(mpmath.im(r), precision))
                    for r in roots]
    except mpmath.mp.NoConvergence as e:
        raise _Uncertified(f"求根未收敛: {e}")


def _count_squarefree(coeffs_desc: Sequence[int], radius: Fraction, precision: int) -> int:
    """
    无平方因子多项式在开圆盘 |z| < radius 内的根数

    以近似根 w_i 为圆心、n·|W_i| 为半径作圆盘，其中
    W_i = p(w_i) / (a_n ∏_{j≠i}(w_i - w_j))。这些圆盘的并包含全部根，
    由 m 个圆盘组成的连通分支恰含 m 个根。所有比较都用精确有理数完成。
    """
    n = len(coeffs_desc) - 1
    lead = coeffs_desc[0]
    w = _approximate_roots(coeffs_desc, precision)

    rho_up: List[Fraction] = []
    for i, wi in enumerate(w):
        den = Fraction(lead * lead)
        for j, wj in enumerate(w):
            if j != i:
                den *= _g_abs2(_g_sub(wi, wj))
        if den == 0:
            raise _Uncertified("近似根重合")
        rho2 = n * n * _g_abs2(_g_eval(coeffs_desc, wi)) / den
        rho_up.append(_sqrt_upper(rho2, precision))

    mod_up = [_sqrt_upper(_g_abs2(wi), precision) for wi in w]
    mod_low = [_sqrt_lower(_g_abs2(wi), precision) for wi in w]

    # 不能证明分离的圆盘并入同一分支
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            gap = _sqrt_lower(_g_abs2(_g_sub(w[i], w[j])), precision)
            if gap <= rho_up[i] + rho_up[j]:
                parent[find(i)] = find(j)

    components: Dict[int, List[int]] = {}
    for i in range(n):
        components.setdefault(find(i), []).append(i)

    count = 0
    for members in components.values():
        inside = all(mod_up[i] + rho_up[i] < radius for i in members)
        outside = all(mod_low[i] - rho_up[i] > radius for i in members)
        if inside:
            count += len(members)
        elif not outside:
            raise _Uncertified(f"有根距离圆周 |z| = {radius} 过近")
    return count


def _squarefree_factors(p: IntPolynomial) -> List[Tuple[List[int], int]]:
    """无平方分解，返回 [(降幂系数, 重数), ...]"""
    poly = Poly(list(reversed(p.coefficients)), _Z)
    _, factors = poly.sqf_list()
    return [([int(c) for c in f.all_coeffs()], multiplicity) for f, multiplicity in factors
            if f.degree() >= 1]


@handle_errors('root_bounds')
def count_roots_in_disk(p: IntPolynomial, radius, precision: int = None) -> int:
    """
    开圆盘 |z| < radius 内的根数（计重数），结果经过认证

    从给定工作精度起每次加倍，直到配置的上限；重根先经无平方分解处理。

    Args:
        p: 次数至少为 1 的整系数多项式
        radius: 正有理半径（int / Fraction / 有理字符串）
        precision: 起始工作精度（比特），缺省取配置

    Returns:
        int: 认证的根数

    Raises:
        InvalidArgumentError: 多项式为常数或半径非正
        IndeterminateAtPrecisionError: 在最大精度下仍有根过于靠近圆周
    """
    if p.is_zero() or p.degree < 1:
        raise InvalidArgumentError(f"根计数要求次数至少为 1: {p}")
    radius = Fraction(radius)
    if radius <= 0:
        raise InvalidArgumentError(f"半径必须为正: {radius}")

    start = precision or get_config('root_bounds.initial_precision', 64)
    cap = max(start, get_config('root_bounds.max_precision', 1024))
    factors = _squarefree_factors(p)

    prec = start
    while True:
        try:
            total = 0
            for coeffs_desc, multiplicity in factors:
                total += multiplicity * _count_squarefree(coeffs_desc, radius, prec)
            logger.debug(f"根计数认证完成: {p}, 半径 {radius}, 精度 {prec} 位, 结果 {total}")
            return total
        except _Uncertified as e:
            logger.debug(f"精度 {prec} 位认证失败: {e}")
            if prec >= cap:
                raise IndeterminateAtPrecisionError(
                    f"在 {prec} 位精度下无法认证 |z| < {radius} 内的根数: {e}", precision=prec)
            prec = min(prec * 2, cap)


def relation_value_bound(candidate: AnnihilatorCandidate, z: complex) -> float:
    """
    把零化关系在 z 处看作关于 F(z) 的多项式，用 Cauchy 半径界定 |F(z)|

    |F(z)| < 1 + max_{k<n} |a_k(z)| / |a_n(z)|

    Raises:
        InvalidArgumentError: a_n(z) = 0
    """
    values = [complex(a(complex(z))) for a in candidate.coeffs]
    lead = abs(values[-1])
    if lead == 0:
        raise InvalidArgumentError(f"首项系数 a_n 在 z={z} 处为零，无法给出界")
    return 1.0 + max(abs(v) for v in values[:-1]) / lead


def sector_relation_bound(candidate: AnnihilatorCandidate, spec) -> List[Tuple[float, float, float]]:
    """
    在扇形网格上取 relation_value_bound 的最大值

    Args:
        candidate: 零化关系
        spec: SectorSpec

    Returns:
        List: 每个半径一行 (radius, theta_at_max, max_bound)，按半径升序
    """
    rows = []
    for rho in sorted(spec.radii):
        best = None
        for theta in spec.thetas():
            z = complex(rho * math.cos(theta), rho * math.sin(theta))
            bound = relation_value_bound(candidate, z)
            if best is None or bound > best[1]:
                best = (theta, bound)
        rows.append((float(rho), best[0], best[1]))
    return rows
