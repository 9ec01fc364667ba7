"""
算术序列模型
定义系数前缀 ArithSequence、素数赋值 PrimeAssignment 以及来源标签，
并负责 2 位编码的打包与解包（与缓存文件格式一致）
"""
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime, nextprime

from src.utils.logger import InvalidArgumentError, OutOfRangeError, get_logger

logger = get_logger('arith_sequence')

# 2 位编码: 0b00 -> 0, 0b01 -> +1, 0b11 -> -1, 0b10 非法
CODE_ZERO = 0b00
CODE_PLUS = 0b01
CODE_INVALID = 0b10
CODE_MINUS = 0b11


class SourceKind(Enum):
    """序列来源，取值即缓存文件中的 source_tag 字节"""
    LIOUVILLE = 0x00
    MOEBIUS = 0x01
    COMPLETELY_MULTIPLICATIVE = 0x02
    LITERAL = 0x03


@dataclass(frozen=True)
class PrimeAssignment:
    """
    素数到 {-1, +1} 的赋值，通过完全积性延拓到全体正整数

    Attributes:
        default_sign: 未列出的素数取值
        exceptions: (素数, 符号) 元组，按素数升序
    """
    default_sign: int = -1
    exceptions: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.default_sign not in (-1, 1):
            raise InvalidArgumentError(f"默认符号必须为 +1 或 -1: {self.default_sign}")

        items = self.exceptions.items() if isinstance(self.exceptions, dict) else self.exceptions
        normalized: Dict[int, int] = {}
        for p, sign in items:
            p = int(p)
            if sign not in (-1, 1):
                raise InvalidArgumentError(f"素数 {p} 的符号必须为 +1 或 -1: {sign}")
            if p < 2 or not isprime(p):
                raise InvalidArgumentError(f"赋值键不是素数: {p}", field_errors={str(p): 'composite'})
            if p in normalized and normalized[p] != sign:
                raise InvalidArgumentError(f"素数 {p} 被赋予了两个不同的符号")
            normalized[p] = int(sign)
        object.__setattr__(self, 'exceptions', tuple(sorted(normalized.items())))

    @classmethod
    def liouville(cls) -> 'PrimeAssignment':
        """λ 的赋值：所有素数取 -1"""
        return cls(default_sign=-1)

    @property
    def exception_map(self) -> Dict[int, int]:
        return dict(self.exceptions)

    def sign(self, p: int) -> int:
        """素数 p 处的取值（调用方保证 p 为素数）"""
        for q, s in self.exceptions:
            if q == p:
                return s
        return self.default_sign

    def smallest_negative_prime(self) -> Optional[int]:
        """
        返回取值为 -1 的最小素数

        Returns:
            Optional[int]: 最小素数，若所有素数都取 +1 则返回 None
        """
        if self.default_sign == 1:
            negatives = [p for p, s in self.exceptions if s == -1]
            return min(negatives) if negatives else None

        p = 2
        exceptions = self.exception_map
        # 默认 -1 时例外表有限，迟早遇到取 -1 的素数
        while exceptions.get(p, -1) != -1:
            p = int(nextprime(p))
        return p

    def is_trivial(self) -> bool:
        """所有素数都取 +1，即常函数 1"""
        return self.smallest_negative_prime() is None

    def encode(self) -> bytes:
        """
        规范二进制编码

        布局: 1 字节默认符号 (0x01 = +1, 0xFF = -1)，4 字节小端例外个数，
        随后每个例外为 8 字节小端素数加 1 字节符号。
        """
        parts = [struct.pack('<B', 0x01 if self.default_sign == 1 else 0xFF),
                 struct.pack('<I', len(self.exceptions))]
        for p, s in self.exceptions:
            parts.append(struct.pack('<QB', p, 0x01 if s == 1 else 0xFF))
        return b''.join(parts)

    @classmethod
    def decode(cls, blob: bytes) -> 'PrimeAssignment':
        """从规范二进制编码还原赋值"""
        if len(blob) < 5:
            raise InvalidArgumentError("素数赋值编码过短")
        sign_byte, count = struct.unpack_from('<BI', blob, 0)
        if len(blob) != 5 + 9 * count:
            raise InvalidArgumentError("素数赋值编码长度与例外个数不符")

        def to_sign(b: int) -> int:
            if b == 0x01:
                return 1
            if b == 0xFF:
                return -1
            raise InvalidArgumentError(f"非法符号字节: {b:#04x}")

        exceptions = []
        for i in range(count):
            p, s = struct.unpack_from('<QB', blob, 5 + 9 * i)
            exceptions.append((p, to_sign(s)))
        return cls(default_sign=to_sign(sign_byte), exceptions=tuple(exceptions))

    def to_text(self) -> str:
        """文本格式：首行 `default: +1|-1`，随后每行 `p: +1|-1`"""
        def fmt(s: int) -> str:
            return '+1' if s == 1 else '-1'
        lines = [f"default: {fmt(self.default_sign)}"]
        lines.extend(f"{p}: {fmt(s)}" for p, s in self.exceptions)
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'PrimeAssignment':
        """
        解析赋值文本文件

        空行和以 # 开头的行被忽略；合数键直接报错。

        Raises:
            InvalidArgumentError: 格式错误或键不是素数
        """
        default_sign = None
        exceptions = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            if ':' not in line:
                raise InvalidArgumentError(f"赋值文件第 {lineno} 行缺少冒号: {raw!r}")
            key, value = (part.strip() for part in line.split(':', 1))
            if value not in ('+1', '-1', '1'):
                raise InvalidArgumentError(f"赋值文件第 {lineno} 行符号无效: {value!r}")
            sign = -1 if value == '-1' else 1
            if key == 'default':
                if default_sign is not None:
                    raise InvalidArgumentError(f"赋值文件第 {lineno} 行重复定义 default")
                default_sign = sign
                continue
            if not key.isdigit():
                raise InvalidArgumentError(f"赋值文件第 {lineno} 行键无效: {key!r}")
            exceptions.append((int(key), sign))
        if default_sign is None:
            raise InvalidArgumentError("赋值文件缺少 `default:` 行")
        return cls(default_sign=default_sign, exceptions=tuple(exceptions))


@dataclass(frozen=True)
class SourceTag:
    """序列的生成规则"""
    kind: SourceKind
    assignment: Optional[PrimeAssignment] = None

    def __post_init__(self):
        if self.kind == SourceKind.COMPLETELY_MULTIPLICATIVE and self.assignment is None:
            raise InvalidArgumentError("完全积性来源必须附带素数赋值")
        if self.kind != SourceKind.COMPLETELY_MULTIPLICATIVE and self.assignment is not None:
            raise InvalidArgumentError(f"{self.kind.name} 来源不接受素数赋值")

    @classmethod
    def liouville(cls) -> 'SourceTag':
        return cls(SourceKind.LIOUVILLE)

    @classmethod
    def moebius(cls) -> 'SourceTag':
        return cls(SourceKind.MOEBIUS)

    @classmethod
    def completely_multiplicative(cls, assignment: PrimeAssignment) -> 'SourceTag':
        return cls(SourceKind.COMPLETELY_MULTIPLICATIVE, assignment)

    @classmethod
    def literal(cls) -> 'SourceTag':
        return cls(SourceKind.LITERAL)

    def describe(self) -> str:
        if self.kind == SourceKind.LIOUVILLE:
            return 'liouville'
        if self.kind == SourceKind.MOEBIUS:
            return 'moebius'
        if self.kind == SourceKind.LITERAL:
            return 'literal'
        a = self.assignment
        default = '+1' if a.default_sign == 1 else '-1'
        if not a.exceptions:
            return f"cm(default {default})"
        listed = ', '.join(f"{p}:{'+1' if s == 1 else '-1'}" for p, s in a.exceptions)
        return f"cm(default {default}; {listed})"


def pack_codes(values: np.ndarray) -> bytes:
    """
    把 {-1, 0, +1} 系数打包为每字节 4 个的 2 位编码

    下标 1 的系数在第一个字节的最低两位。
    """
    values = np.asarray(values, dtype=np.int8)
    codes = np.zeros(values.shape[0], dtype=np.uint8)
    codes[values == 1] = CODE_PLUS
    codes[values == -1] = CODE_MINUS
    pad = (-codes.shape[0]) % 4
    if pad:
        codes = np.concatenate([codes, np.zeros(pad, dtype=np.uint8)])
    quads = codes.reshape(-1, 4)
    packed = quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
    return packed.astype(np.uint8).tobytes()


def unpack_codes(payload: bytes, length: int) -> np.ndarray:
    """
    把 2 位编码还原为 int8 系数数组（长度 length）

    Raises:
        InvalidArgumentError: 出现编码 0b10 或载荷长度不足
    """
    needed = (length + 3) // 4
    if len(payload) < needed:
        raise InvalidArgumentError(f"载荷长度不足: 需要 {needed} 字节，实际 {len(payload)}")
    raw = np.frombuffer(payload[:needed], dtype=np.uint8)
    shifts = np.array([0, 2, 4, 6], dtype=np.uint8)
    codes = ((raw[:, None] >> shifts) & 0b11).reshape(-1)
    if np.any(codes[:length] == CODE_INVALID):
        bad = int(np.flatnonzero(codes[:length] == CODE_INVALID)[0]) + 1
        raise InvalidArgumentError(f"下标 {bad} 处出现非法编码 0b10")
    # 尾部填充位也必须为零
    if np.any(codes[length:] != CODE_ZERO):
        raise InvalidArgumentError("载荷末尾的填充位非零")
    values = np.zeros(length, dtype=np.int8)
    values[codes[:length] == CODE_PLUS] = 1
    values[codes[:length] == CODE_MINUS] = -1
    return values


@dataclass(frozen=True)
class ArithSequence:
    """
    系数前缀 (c_1, ..., c_N)，1 起始下标，系数取自 {-1, 0, +1}

    内部以 2 位编码保存，构造后不可变，可在多个读者间共享。
    """
    packed: bytes
    length: int
    source: SourceTag
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.length < 1:
            raise InvalidArgumentError(f"序列长度必须至少为 1: {self.length}")
        if len(self.packed) != (self.length + 3) // 4:
            raise InvalidArgumentError("打包数据长度与序列长度不符")

    @classmethod
    def from_values(cls, values: Iterable[int], source: Optional[SourceTag] = None) -> 'ArithSequence':
        """
        从系数列表构造（values[0] 对应 c_1）

        Raises:
            InvalidArgumentError: 系数不在 {-1, 0, +1} 中，或违反来源的不变量
        """
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise InvalidArgumentError("系数序列必须是非空一维序列")
        if not np.all(np.isin(arr, (-1, 0, 1))):
            raise InvalidArgumentError("系数必须取自 {-1, 0, +1}")
        arr = arr.astype(np.int8)
        source = source or SourceTag.literal()

        if source.kind != SourceKind.LITERAL and arr[0] != 1:
            raise InvalidArgumentError(f"{source.describe()} 序列必须满足 f(1) = 1")
        if source.kind in (SourceKind.LIOUVILLE, SourceKind.COMPLETELY_MULTIPLICATIVE) and np.any(arr == 0):
            raise InvalidArgumentError(f"{source.describe()} 序列不能含有 0")

        return cls(packed=pack_codes(arr), length=int(arr.shape[0]), source=source)

    @classmethod
    def from_packed(cls, payload: bytes, length: int, source: SourceTag) -> 'ArithSequence':
        """从 2 位编码载荷构造，会检查非法编码"""
        values = unpack_codes(payload, length)
        return cls.from_values(values, source)

    def to_array(self) -> np.ndarray:
        """
        返回长度 N+1 的只读 int8 数组，下标 0 固定为 0
        """
        arr = self._cache.get('array')
        if arr is None:
            arr = np.zeros(self.length + 1, dtype=np.int8)
            arr[1:] = unpack_codes(self.packed, self.length)
            arr.setflags(write=False)
            self._cache['array'] = arr
        return arr

    @property
    def values(self) -> List[int]:
        """系数列表，values[0] 对应 c_1"""
        return [int(v) for v in self.to_array()[1:]]

    def coefficients(self, count: Optional[int] = None) -> List[int]:
        """
        幂级数系数 [c_0 = 0, c_1, ..., c_count]
        """
        count = self.length if count is None else count
        if count > self.length:
            raise OutOfRangeError(f"请求 {count} 项，超过前缀长度 {self.length}", count, self.length)
        return [int(v) for v in self.to_array()[:count + 1]]

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, n: int) -> int:
        if not isinstance(n, (int, np.integer)):
            raise TypeError("ArithSequence 只支持整数下标")
        if n < 1 or n > self.length:
            raise OutOfRangeError(f"下标 {n} 超出范围 [1, {self.length}]", int(n), self.length)
        return int(self.to_array()[n])

    def prefix(self, count: int) -> 'ArithSequence':
        """截取前 count 项，保留来源标签"""
        if count < 1 or count > self.length:
            raise OutOfRangeError(f"截取长度 {count} 超出范围 [1, {self.length}]", count, self.length)
        return ArithSequence.from_values(self.to_array()[1:count + 1], self.source)

    def is_plus_minus(self) -> bool:
        """是否所有系数都为 ±1"""
        return not np.any(self.to_array()[1:] == 0)


def literal_sequence(values: Sequence[int]) -> ArithSequence:
    """便捷函数：构造 Literal 来源的序列"""
    return ArithSequence.from_values(values, SourceTag.literal())
