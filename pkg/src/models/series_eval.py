"""
级数求值模块
部分和 F_N(z) = Σ_{n<=N} f(n) z^n 的精确有理求值与区间算术复数求值，
z = 1/b 处的数字展开，以及扇形上 |F_N| 的观测报告
"""
import math
import re
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import pandas as pd
from mpmath import iv

from src.models.arith_sequence import ArithSequence, literal_sequence
from src.models.periodicity import PeriodClaim, detect_eventual_period
from src.utils.config_manager import get_config
from src.utils.logger import (
    InvalidArgumentError, OutOfRangeError, UnsupportedAlphabetError, get_logger, handle_errors
)

logger = get_logger('series_eval')

_RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$')

CSV_COLUMNS = ['radius', 'theta', 're', 'im', 'abs_FN', 'error_bound']


class PointKind(Enum):
    EXACT_RATIONAL = 'rational'
    COMPLEX = 'complex'


@dataclass(frozen=True)
class EvalPoint:
    """
    求值点：精确有理数，或给定工作精度的复数

    Attributes:
        kind: 点的类型
        rational: EXACT_RATIONAL 时的值（已约分）
        real, imag: COMPLEX 时的实部与虚部（十进制字符串，按工作精度读入）
        precision: COMPLEX 时的工作精度（比特）
    """
    kind: PointKind
    rational: Optional[Fraction] = None
    real: str = '0'
    imag: str = '0'
    precision: int = 128

    @classmethod
    def exact(cls, numerator: int, denominator: int = 1) -> 'EvalPoint':
        if denominator == 0:
            raise InvalidArgumentError("分母不能为零")
        return cls(PointKind.EXACT_RATIONAL, rational=Fraction(numerator, denominator))

    @classmethod
    def from_complex(cls, real, imag, precision: Optional[int] = None) -> 'EvalPoint':
        if precision is None:
            precision = get_config('series_eval.working_precision', 128)
        return cls(PointKind.COMPLEX, real=str(real), imag=str(imag), precision=precision)

    @classmethod
    def parse(cls, literal: str) -> 'EvalPoint':
        """
        解析 "p/q" 或整数字面量

        Raises:
            InvalidArgumentError: 格式错误或分母为零
        """
        match = _RATIONAL_PATTERN.match(literal or '')
        if not match:
            raise InvalidArgumentError(f"无法解析有理数字面量: {literal!r}", field_errors={'z': literal})
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) else 1
        return cls.exact(numerator, denominator)

    @property
    def is_rational(self) -> bool:
        return self.kind == PointKind.EXACT_RATIONAL

    def inside_unit_disk(self) -> bool:
        if self.is_rational:
            return abs(self.rational) < 1
        with mpmath.mp.workprec(self.precision):
            return mpmath.fabs(mpmath.mpc(self.real, self.imag)) < 1

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.rational)
        return f"{self.real}{'' if self.imag.startswith('-') else '+'}{self.imag}i"


@dataclass(frozen=True)
class ComplexPartialSum:
    """
    复数部分和：区间中点与舍入误差上界

    |真实部分和 - (re + i·im)| <= error_bound
    """
    re: mpmath.mpf
    im: mpmath.mpf
    error_bound: mpmath.mpf
    precision: int

    @property
    def value(self) -> complex:
        return complex(float(self.re), float(self.im))

    def magnitude(self) -> mpmath.mpf:
        with mpmath.mp.workprec(self.precision):
            return mpmath.hypot(self.re, self.im)


@dataclass(frozen=True)
class DigitRecord:
    """
    z = 1/b 处的数字展开

    Attributes:
        base: 进位制 b
        digits: b=2 时为比特 (c+1)/2；b>=3 时为带符号数字，即系数本身
        value: Σ c_n b^{-n} 的精确值
        identity_verified: b=2 时仿射恒等式是否精确成立（b>=3 恒为 True）
        period: 数字串的最终周期（无或规模不足时为 None）
    """
    base: int
    digits: Tuple[int, ...]
    value: Fraction
    identity_verified: bool
    period: Optional[PeriodClaim]

    def digit_string(self) -> str:
        if self.base == 2:
            return ''.join(str(d) for d in self.digits)
        symbols = {1: '+', -1: '-', 0: '0'}
        return ''.join(symbols[d] for d in self.digits)

    def describe(self) -> str:
        period = (f"eventually periodic {self.period}" if self.period is not None
                  else "no eventual period at this scale")
        lines = [
            f"base {self.base}, N={len(self.digits)}",
            f"digits: {self.digit_string()}",
            f"value = {self.value}",
            f"digit periodicity: {period}",
        ]
        if self.base == 2:
            lines.append(f"affine identity: {'verified' if self.identity_verified else 'FAILED'}")
        return '\n'.join(lines)


@dataclass(frozen=True)
class SectorSpec:
    """
    扇形 theta_lo <= arg z <= theta_hi 上的半径网格
    """
    theta_lo: float
    theta_hi: float
    radii: Tuple[float, ...]
    samples_per_arc: int

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, 'radii', radii)
        if not radii:
            raise InvalidArgumentError("半径列表不能为空")
        if any(not 0 < r < 1 for r in radii):
            raise InvalidArgumentError(f"半径必须在开区间 (0, 1) 内: {radii}")
        if self.samples_per_arc < 1:
            raise InvalidArgumentError(f"每段圆弧的采样数必须至少为 1: {self.samples_per_arc}")
        if not self.theta_lo < self.theta_hi:
            raise InvalidArgumentError(f"需要 theta_lo < theta_hi: {self.theta_lo}, {self.theta_hi}")

    @classmethod
    def from_config(cls, radii: Sequence[float]) -> 'SectorSpec':
        return cls(theta_lo=get_config('series_eval.sector_theta_lo'),
                   theta_hi=get_config('series_eval.sector_theta_hi'),
                   radii=tuple(radii),
                   samples_per_arc=get_config('series_eval.samples_per_arc', 16))

    def thetas(self) -> List[float]:
        s = self.samples_per_arc
        if s == 1:
            return [self.theta_lo]
        return [self.theta_lo + (self.theta_hi - self.theta_lo) * j / (s - 1) for j in range(s)]


@dataclass
class SectorReport:
    """
    扇形观测报告；samples 按 (radius, theta) 排序，maxima 每个半径一行
    """
    samples: pd.DataFrame
    maxima: pd.DataFrame
    n_terms: int
    precision: int

    def to_csv(self) -> str:
        return self.samples.to_csv(index=False, columns=CSV_COLUMNS, float_format='%.17g',
                                   lineterminator='\n')


def _check_terms(seq: ArithSequence, n_terms: int):
    if n_terms < 0:
        raise InvalidArgumentError(f"项数不能为负: {n_terms}")
    if n_terms > seq.length:
        raise OutOfRangeError(f"N={n_terms} 超过前缀长度 {seq.length}", n_terms, seq.length)


def _exact_partial_sum(coeffs: Sequence[int], z: Fraction) -> Fraction:
    """S_n = S_{n-1}·q + c_n·p^n，最后除以 q^N"""
    p, q = z.numerator, z.denominator
    total = 0
    power = 1
    for c in coeffs:
        power *= p
        total = total * q + c * power
    return Fraction(total, q ** len(coeffs))


@contextmanager
def _interval_precision(precision: int):
    """临时设置区间算术精度（iv.prec 是全局状态）"""
    saved = iv.prec
    try:
        iv.prec = precision
        yield
    finally:
        iv.prec = saved


def _interval_horner(coeffs: Sequence[int], zr, zi, precision: int) -> ComplexPartialSum:
    """
    区间 Horner：每一步的实部和虚部都是包含真值的区间

    zr, zi 是包含求值点的区间，调用方负责设置 iv.prec。
    """
    sr, si = iv.mpf(0), iv.mpf(0)
    for c in reversed(coeffs):
        sr, si = sr * zr - si * zi + c, sr * zi + si * zr
    sr, si = sr * zr - si * zi, sr * zi + si * zr
    # 舍入后的中点仍落在区间内，各分量误差不超过区间宽度
    wr, wi = sr.delta, si.delta
    bound = iv.sqrt(wr * wr + wi * wi)
    with mpmath.mp.workprec(precision):
        return ComplexPartialSum(re=mpmath.mpf(sr.mid), im=mpmath.mpf(si.mid),
                                 error_bound=mpmath.mpf(bound.b), precision=precision)


@handle_errors('series_eval')
def partial_sum(seq: ArithSequence, n_terms: int, z: EvalPoint) -> Union[Fraction, ComplexPartialSum]:
    """
    F_N(z) = Σ_{n<=N} c_n z^n

    有理 z 返回精确 Fraction；复数 z 返回中点值及舍入误差上界（不含尾项）。

    Raises:
        OutOfRangeError: N 超过前缀长度
        InvalidArgumentError: |z| >= 1 或 N < 0
    """
    _check_terms(seq, n_terms)
    if not z.inside_unit_disk():
        raise InvalidArgumentError(f"求值点必须在开单位圆盘内: z={z}")
    coeffs = seq.coefficients(n_terms)[1:]
    if z.is_rational:
        return _exact_partial_sum(coeffs, z.rational)
    with _interval_precision(z.precision):
        return _interval_horner(coeffs, iv.mpf(z.real), iv.mpf(z.imag), z.precision)


def _digit_period(digits: Sequence[int]) -> Optional[PeriodClaim]:
    n = len(digits)
    k_max = max(1, n // 4)
    m_max = n - 2 * k_max
    if n < 3 or m_max < 1:
        return None
    return detect_eventual_period(literal_sequence(list(digits)), m_max, k_max)


@handle_errors('series_eval')
def digits_in_base(seq: ArithSequence, base: int, n_terms: int) -> DigitRecord:
    """
    Σ c_n b^{-n} 的数字展开

    b=2 要求 ±1 系数，比特 b_n = (c_n+1)/2，并精确验证
    Σ c_n 2^{-n} = 2·Σ b_n 2^{-n} - (1 - 2^{-N})；b>=3 时数字就是系数本身。

    Raises:
        InvalidArgumentError: b < 2
        UnsupportedAlphabetError: b=2 而系数含 0
        OutOfRangeError: N 超过前缀长度
    """
    if base < 2:
        raise InvalidArgumentError(f"进位制必须至少为 2: {base}")
    _check_terms(seq, n_terms)
    coeffs = seq.coefficients(n_terms)[1:]
    value = _exact_partial_sum(coeffs, Fraction(1, base))

    if base == 2:
        if any(c == 0 for c in coeffs):
            raise UnsupportedAlphabetError("二进制展开要求系数全为 ±1，序列含 0")
        digits = tuple((c + 1) // 2 for c in coeffs)
        bits_value = _exact_partial_sum(digits, Fraction(1, 2))
        identity = value == 2 * bits_value - (1 - Fraction(1, 2 ** n_terms))
    else:
        digits = tuple(coeffs)
        identity = True

    record = DigitRecord(base=base, digits=digits, value=value, identity_verified=identity,
                         period=_digit_period(digits))
    logger.info(f"数字展开: b={base}, N={n_terms}, 周期 {record.period}")
    return record


def _round_up(x: mpmath.mpf) -> float:
    f = float(x)
    return math.nextafter(f, math.inf) if f < x else f


@handle_errors('series_eval')
def sector_bound_probe(seq: ArithSequence, spec: SectorSpec, n_terms: int,
                       precision: Optional[int] = None) -> SectorReport:
    """
    在扇形网格上计算 |F_N(z)|，报告每个半径的最大值及取到的位置

    只是观测，不给出有界性结论。

    Raises:
        OutOfRangeError: N 超过前缀长度
    """
    _check_terms(seq, n_terms)
    if precision is None:
        precision = get_config('series_eval.working_precision', 128)
    coeffs = seq.coefficients(n_terms)[1:]

    rows = []
    for rho in sorted(spec.radii):
        for theta in spec.thetas():
            with _interval_precision(precision):
                # 区间包含采样点 ρe^{iθ} 本身
                r, t = iv.mpf(rho), iv.mpf(theta)
                result = _interval_horner(coeffs, r * iv.cos(t), r * iv.sin(t), precision)
            rows.append({
                'radius': rho,
                'theta': theta,
                're': float(result.re),
                'im': float(result.im),
                'abs_FN': float(result.magnitude()),
                'error_bound': _round_up(result.error_bound),
            })

    samples = pd.DataFrame(rows, columns=CSV_COLUMNS).sort_values(['radius', 'theta'], kind='mergesort')
    samples = samples.reset_index(drop=True)
    best = samples.loc[samples.groupby('radius', sort=True)['abs_FN'].idxmax()]
    maxima = best[['radius', 'theta', 'abs_FN', 'error_bound']].reset_index(drop=True)
    logger.info(f"扇形探测完成: {len(spec.radii)} 个半径 × {spec.samples_per_arc} 个角度, N={n_terms}")
    return SectorReport(samples=samples, maxima=maxima, n_terms=n_terms, precision=precision)
