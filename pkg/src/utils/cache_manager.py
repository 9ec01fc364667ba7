"""
缓存文件管理工具
筛表的持久化：固定二进制布局、2 位系数编码、CRC-64 校验，
写入先落临时文件再原子替换
"""
import os
import struct
from typing import Optional

import crcmod.predefined

from src.models.arith_sequence import (
    ArithSequence, PrimeAssignment, SourceKind, SourceTag, unpack_codes
)
from src.utils.logger import InvalidArgumentError, get_logger

logger = get_logger('cache_manager')

MAGIC = b'APS1'
VERSION = 0x01

# magic + version + source_tag
_PREFIX = struct.Struct('<4sBB')
_BLOB_LENGTH = struct.Struct('<I')
_COUNT = struct.Struct('<Q')
_CHECKSUM = struct.Struct('<Q')

_crc64 = crcmod.predefined.mkCrcFun('crc-64')


class CacheError(Exception):
    """缓存文件异常基类"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.message = message
        self.path = path
        super().__init__(message)

    def __str__(self):
        if self.path:
            return f"{self.message} ({self.path})"
        return self.message


class CorruptCacheError(CacheError):
    """截断、校验和不符或出现非法编码"""


class UnsupportedVersionError(CacheError):
    """版本字节不是当前支持的版本"""


def checksum(data: bytes) -> int:
    """CRC-64 (ISO 多项式)"""
    return _crc64(data)


def encode_cache(seq: ArithSequence) -> bytes:
    """把序列编码为完整的缓存文件内容（含校验和）"""
    kind = seq.source.kind
    blob = seq.source.assignment.encode() if kind == SourceKind.COMPLETELY_MULTIPLICATIVE else b''
    body = b''.join([
        _PREFIX.pack(MAGIC, VERSION, kind.value),
        _BLOB_LENGTH.pack(len(blob)),
        blob,
        _COUNT.pack(seq.length),
        seq.packed,
    ])
    return body + _CHECKSUM.pack(checksum(body))


def decode_cache(data: bytes, path: Optional[str] = None) -> ArithSequence:
    """
    解析缓存文件内容

    Raises:
        CorruptCacheError: 魔数错误、截断、校验和不符、非法编码或来源标签
        UnsupportedVersionError: 版本字节不是 0x01
    """
    if len(data) < _PREFIX.size:
        raise CorruptCacheError("缓存文件被截断: 文件头不完整", path)
    magic, version, tag = _PREFIX.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptCacheError(f"魔数错误: {magic!r}", path)
    if version != VERSION:
        raise UnsupportedVersionError(f"不支持的缓存版本: {version:#04x}", path)

    offset = _PREFIX.size
    if len(data) < offset + _BLOB_LENGTH.size:
        raise CorruptCacheError("缓存文件被截断: 缺少赋值长度", path)
    (blob_length,) = _BLOB_LENGTH.unpack_from(data, offset)
    offset += _BLOB_LENGTH.size
    if len(data) < offset + blob_length + _COUNT.size:
        raise CorruptCacheError("缓存文件被截断: 赋值编码或长度字段不完整", path)
    blob = data[offset:offset + blob_length]
    offset += blob_length
    (length,) = _COUNT.unpack_from(data, offset)
    offset += _COUNT.size

    payload_size = (length + 3) // 4
    expected = offset + payload_size + _CHECKSUM.size
    if len(data) < expected:
        raise CorruptCacheError(f"缓存文件被截断: 需要 {expected} 字节，实际 {len(data)}", path)
    if len(data) > expected:
        raise CorruptCacheError(f"缓存文件末尾有多余数据: {len(data) - expected} 字节", path)

    body = data[:offset + payload_size]
    (stored,) = _CHECKSUM.unpack_from(data, offset + payload_size)
    if checksum(body) != stored:
        raise CorruptCacheError("校验和不符", path)

    try:
        kind = SourceKind(tag)
    except ValueError:
        raise CorruptCacheError(f"未知的来源标签: {tag:#04x}", path)

    try:
        if kind == SourceKind.COMPLETELY_MULTIPLICATIVE:
            source = SourceTag.completely_multiplicative(PrimeAssignment.decode(blob))
        else:
            if blob_length:
                raise CorruptCacheError(f"{kind.name} 缓存不应带有赋值编码", path)
            source = SourceTag(kind)
        payload = data[offset:offset + payload_size]
        values = unpack_codes(payload, length)
        return ArithSequence.from_values(values, source)
    except InvalidArgumentError as e:
        raise CorruptCacheError(f"缓存内容无效: {e.message}", path)


def cache_write(seq: ArithSequence, path: str) -> None:
    """
    原子写入缓存文件：先写同目录临时文件，再 os.replace

    Raises:
        OSError: 写入失败
    """
    data = encode_cache(seq)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp_path, 'wb') as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, path)
    except OSError:
        logger.error(f"写入缓存失败: {path}")
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info(f"缓存已写入: {path} ({seq.source.describe()}, N={seq.length}, {len(data)} 字节)")


def cache_read(path: str) -> ArithSequence:
    """
    读取并校验缓存文件

    Raises:
        OSError: 文件不可读
        CorruptCacheError / UnsupportedVersionError: 见 decode_cache
    """
    with open(path, 'rb') as f:
        data = f.read()
    seq = decode_cache(data, path)
    logger.info(f"缓存已读取: {path} ({seq.source.describe()}, N={seq.length})")
    return seq
