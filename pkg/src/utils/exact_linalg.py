"""
精确线性代数工具
无分数 (Bareiss) 消元求行列式、秩与核向量，以及模素数下的对照计算
"""
import math
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

from src.utils.logger import InvalidArgumentError

Matrix = List[List[int]]


def _copy(matrix: Sequence[Sequence[int]]) -> Matrix:
    rows = [list(map(int, row)) for row in matrix]
    if rows and any(len(row) != len(rows[0]) for row in rows):
        raise InvalidArgumentError("矩阵各行长度不一致")
    return rows


def fraction_free_echelon(matrix: Sequence[Sequence[int]]) -> Tuple[Matrix, List[int], int]:
    """
    Bareiss 一步无分数消元，化为行阶梯形

    每一步的除法都是整除，中间量都是原矩阵的子式，不会出现分数。

    Args:
        matrix: 整数矩阵（不修改）

    Returns:
        Tuple: (阶梯形矩阵, 主元列下标列表, 行交换符号 ±1)
    """
    m = _copy(matrix)
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivot_cols: List[int] = []
    sign = 1
    prev = 1
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
            sign = -sign
        piv = m[r][c]
        row_r = m[r]
        for i in range(r + 1, n_rows):
            row_i = m[i]
            lead = row_i[c]
            for j in range(c + 1, n_cols):
                row_i[j] = (piv * row_i[j] - lead * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        pivot_cols.append(c)
        r += 1
    return m, pivot_cols, sign


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """
    方阵的精确行列式

    Raises:
        InvalidArgumentError: 非方阵
    """
    n = len(matrix)
    if n == 0:
        return 1
    if any(len(row) != n for row in matrix):
        raise InvalidArgumentError("行列式只对方阵有定义")
    echelon, pivots, sign = fraction_free_echelon(matrix)
    if len(pivots) < n:
        return 0
    return sign * echelon[n - 1][n - 1]


def exact_rank(matrix: Sequence[Sequence[int]]) -> int:
    """精确秩"""
    if not matrix:
        return 0
    return len(fraction_free_echelon(matrix)[1])


def leading_principal_minors(matrix: Sequence[Sequence[int]], max_order: int) -> List[int]:
    """
    前 max_order 个顺序主子式

    不换行的 Bareiss 消元中第 k 个主元恰为 k 阶顺序主子式；遇到零主元后
    改为逐阶单独计算，阶数超过整体秩的子式必为零。
    """
    m = _copy(matrix)
    n = len(m)
    if max_order > n or any(len(row) < max_order for row in m):
        raise InvalidArgumentError(f"矩阵不足 {max_order} 阶")
    minors: List[int] = []
    prev = 1
    for k in range(max_order):
        piv = m[k][k]
        if piv == 0:
            break
        minors.append(piv)
        for i in range(k + 1, max_order):
            for j in range(k + 1, max_order):
                m[i][j] = (piv * m[i][j] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = piv
    else:
        return minors

    # 首个零主元之后
    minors.append(0)
    full_rank = exact_rank([row[:max_order] for row in matrix[:max_order]])
    for order in range(len(minors) + 1, max_order + 1):
        if order > full_rank:
            minors.append(0)
        else:
            minors.append(bareiss_determinant([row[:order] for row in matrix[:order]]))
    return minors


def primitive_vector(vector: Sequence[Fraction]) -> List[int]:
    """把有理向量放缩为本原整数向量（公因子为 1）"""
    denominators = [Fraction(x).denominator for x in vector]
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), denominators, 1)
    ints = [int(Fraction(x) * lcm) for x in vector]
    g = reduce(math.gcd, ints, 0)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def kernel_vector(matrix: Sequence[Sequence[int]]) -> Optional[List[int]]:
    """
    取第一个自由列回代得到的核向量（本原整数向量）

    Returns:
        Optional[List[int]]: 核向量；列满秩时返回 None
    """
    if not matrix:
        raise InvalidArgumentError("矩阵为空")
    n_cols = len(matrix[0])
    echelon, pivots, _ = fraction_free_echelon(matrix)
    pivot_set = set(pivots)
    free = next((c for c in range(n_cols) if c not in pivot_set), None)
    if free is None:
        return None

    x = [Fraction(0)] * n_cols
    x[free] = Fraction(1)
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        row = echelon[r]
        s = sum((row[j] * x[j] for j in range(pc + 1, n_cols) if row[j] and x[j]), Fraction(0))
        x[pc] = -s / row[pc]
    return primitive_vector(x)


def kernel_dimension(matrix: Sequence[Sequence[int]]) -> int:
    """零空间维数 = 列数 - 秩"""
    if not matrix:
        return 0
    return len(matrix[0]) - exact_rank(matrix)


def _echelon_mod(matrix: Sequence[Sequence[int]], prime: int) -> Tuple[Matrix, int, int]:
    """模素数高斯消元，返回 (矩阵, 秩, 行列式因子)"""
    m = [[int(x) % prime for x in row] for row in matrix]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    r = 0
    det = 1
    for c in range(n_cols):
        if r >= n_rows:
            break
        pivot_row = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pivot_row is None:
            det = 0
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
            det = -det
        piv = m[r][c]
        det = det * piv % prime
        inv = pow(piv, -1, prime)
        for i in range(r + 1, n_rows):
            factor = m[i][c] * inv % prime
            if factor:
                row_i, row_r = m[i], m[r]
                for j in range(c, n_cols):
                    row_i[j] = (row_i[j] - factor * row_r[j]) % prime
        r += 1
    return m, r, det % prime


def determinant_mod(matrix: Sequence[Sequence[int]], prime: int) -> int:
    """方阵行列式模 prime"""
    n = len(matrix)
    if n == 0:
        return 1 % prime
    _, rank, det = _echelon_mod(matrix, prime)
    return det if rank == n else 0


def rank_mod(matrix: Sequence[Sequence[int]], prime: int) -> int:
    """秩模 prime"""
    if not matrix:
        return 0
    return _echelon_mod(matrix, prime)[1]
