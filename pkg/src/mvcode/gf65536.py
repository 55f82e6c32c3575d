"""Arithmetic over GF(2^16) and the evaluation-code generator rows.

Multiplication uses log/antilog tables built from the primitive polynomial
x^16 + x^12 + x^3 + x + 1 (0x1100B). The antilog table is doubled so a sum
of two logs never needs a modular reduction.

The code realized here is a polynomial evaluation code with a systematic
prefix: message symbols are the values of a degree-< k polynomial at the
anchor points 0..k-1, and the coded symbol with global index j is the value
at point j. Any k distinct points determine the polynomial, which is the
MDS guarantee; indices below k reproduce message symbols verbatim.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

ORDER = 1 << 16
_PRIM_POLY = 0x1100B

_EXP = np.zeros(2 * (ORDER - 1), dtype=np.int64)
_LOG = np.zeros(ORDER, dtype=np.int64)


def _build_tables() -> None:
    b = 1
    for i in range(ORDER - 1):
        _EXP[i] = b
        _LOG[b] = i
        b <<= 1
        if b & ORDER:
            b ^= _PRIM_POLY
    _EXP[ORDER - 1:] = _EXP[:ORDER - 1]


_build_tables()


def mul(a, b):
    """Elementwise product of two arrays (or scalars) of field elements."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = _EXP[_LOG[a] + _LOG[b]]
    zero = (a == 0) | (b == 0)
    return np.where(zero, 0, out)


def mul_s(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(_EXP[int(_LOG[a]) + int(_LOG[b])])


def inv_s(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^16)")
    return int(_EXP[(ORDER - 1) - int(_LOG[a])])


def div_s(a: int, b: int) -> int:
    return mul_s(a, inv_s(b))


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(m x k) @ (k x w) over the field; XOR-accumulated column products."""
    m, k = A.shape
    k2, w = B.shape
    assert k == k2, (A.shape, B.shape)
    out = np.zeros((m, w), dtype=np.int64)
    for t in range(k):
        out ^= mul(A[:, t][:, None], B[t][None, :])
    return out


def mat_inv(A: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises if A is singular."""
    n = A.shape[0]
    assert A.shape == (n, n)
    work = A.astype(np.int64).copy()
    inv = np.eye(n, dtype=np.int64)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix over GF(2^16)")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            inv[[col, pivot]] = inv[[pivot, col]]
        scale = inv_s(int(work[col, col]))
        work[col] = mul(work[col], scale)
        inv[col] = mul(inv[col], scale)
        for r in range(n):
            if r != col and work[r, col] != 0:
                factor = int(work[r, col])
                work[r] ^= mul(work[col], factor)
                inv[r] ^= mul(inv[col], factor)
    return inv


@lru_cache(maxsize=65536)
def generator_row(k: int, index: int) -> tuple[int, ...]:
    """Row of the evaluation-code generator for global symbol `index`.

    Entry t is the Lagrange basis polynomial through anchors 0..k-1,
    evaluated at the point `index`; rows with index < k are unit rows,
    which is what makes the prefix systematic.
    """
    if not 0 <= index < ORDER:
        raise ValueError(f"symbol index {index} outside the field universe [0, {ORDER})")
    if index < k:
        row = [0] * k
        row[index] = 1
        return tuple(row)
    row = []
    for t in range(k):
        num, den = 1, 1
        for s in range(k):
            if s == t:
                continue
            num = mul_s(num, index ^ s)
            den = mul_s(den, t ^ s)
        row.append(div_s(num, den))
    return tuple(row)


def generator_matrix(k: int, indices: tuple[int, ...]) -> np.ndarray:
    return np.array([generator_row(k, j) for j in indices], dtype=np.int64)


@lru_cache(maxsize=4096)
def decode_matrix(k: int, indices: tuple[int, ...]) -> np.ndarray:
    """Inverse of the k x k generator submatrix for k distinct indices."""
    assert len(indices) == k
    return mat_inv(generator_matrix(k, indices))
