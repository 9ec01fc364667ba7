"""
整系数多项式模型
稠密表示，下标即次数，规范形式不存储首项零
"""
import re
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from src.utils.logger import InvalidArgumentError

# 零多项式的次数
ZERO_DEGREE = float('-inf')

Number = Union[int, Fraction, complex]


class IntPolynomial:
    """
    整系数多项式 a_0 + a_1 z + ... + a_n z^n

    不可变；coefficients 为元组，末项非零（零多项式为空元组）。
    """

    __slots__ = ('_coeffs',)

    def __init__(self, coefficients: Iterable[int] = ()):
        coeffs = []
        for c in coefficients:
            if isinstance(c, bool) or not isinstance(c, int):
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = c.numerator
                elif hasattr(c, '__index__'):
                    c = c.__index__()
                else:
                    raise InvalidArgumentError(f"多项式系数必须是整数: {c!r}")
            coeffs.append(int(c))
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._coeffs: Tuple[int, ...] = tuple(coeffs)

    @classmethod
    def parse(cls, literal: str) -> 'IntPolynomial':
        """
        解析命令行字面量 "c0,c1,...,cn"（低次在前）

        Raises:
            InvalidArgumentError: 字面量格式错误
        """
        text = literal.strip()
        if not text:
            raise InvalidArgumentError("多项式字面量为空")
        coeffs = []
        for part in text.split(','):
            part = part.strip()
            if not re.fullmatch(r'[+-]?\d+', part):
                raise InvalidArgumentError(f"多项式系数无效: {part!r}")
            coeffs.append(int(part))
        return cls(coeffs)

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return self._coeffs

    @property
    def degree(self) -> Union[int, float]:
        """次数；零多项式返回 ZERO_DEGREE（负无穷）"""
        return len(self._coeffs) - 1 if self._coeffs else ZERO_DEGREE

    @property
    def leading_coefficient(self) -> int:
        return self._coeffs[-1] if self._coeffs else 0

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, k: int) -> int:
        return self._coeffs[k] if 0 <= k < len(self._coeffs) else 0

    def scale(self, factor: int) -> 'IntPolynomial':
        return IntPolynomial(c * factor for c in self._coeffs)

    def exact_divide(self, divisor: int) -> 'IntPolynomial':
        if divisor == 0 or any(c % divisor for c in self._coeffs):
            raise InvalidArgumentError(f"系数不能被 {divisor} 整除")
        return IntPolynomial(c // divisor for c in self._coeffs)

    def __add__(self, other: 'IntPolynomial') -> 'IntPolynomial':
        a, b = self._coeffs, other._coeffs
        n = max(len(a), len(b))
        return IntPolynomial((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    def __neg__(self) -> 'IntPolynomial':
        return IntPolynomial(-c for c in self._coeffs)

    def __sub__(self, other: 'IntPolynomial') -> 'IntPolynomial':
        return self + (-other)

    def __mul__(self, other: Union['IntPolynomial', int]) -> 'IntPolynomial':
        if isinstance(other, int):
            return self.scale(other)
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return IntPolynomial()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, IntPolynomial) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __call__(self, z: Number) -> Number:
        """Horner 求值，参数为整数或 Fraction 时结果精确"""
        acc = 0
        for c in reversed(self._coeffs):
            acc = acc * z + c
        return acc

    def truncated_product(self, series: Sequence[int], order: int) -> List[int]:
        """
        与幂级数相乘后截断到 z^order（含），返回长度 order+1 的系数列表
        """
        out = [0] * (order + 1)
        for e, a in enumerate(self._coeffs):
            if not a or e > order:
                continue
            limit = min(order - e, len(series) - 1)
            for t in range(limit + 1):
                s = series[t]
                if s:
                    out[t + e] += a * s
        return out

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self._coeffs)!r})"

    def __str__(self) -> str:
        """
        低次在前的可读形式，例如 `1-z`、`z-2z^2`、`0`
        """
        if not self._coeffs:
            return '0'
        parts = []
        for k, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                power = 'z' if k == 1 else f"z^{k}"
                body = power if abs(c) == 1 else f"{abs(c)}{power}"
            if not parts:
                parts.append(('-' if c < 0 else '') + body)
            else:
                parts.append(('-' if c < 0 else '+') + body)
        return ''.join(parts)


def one_minus_z_power(k: int) -> IntPolynomial:
    """1 - z^k"""
    if k < 1:
        raise InvalidArgumentError(f"k 必须至少为 1: {k}")
    return IntPolynomial([1] + [0] * (k - 1) + [-1])
