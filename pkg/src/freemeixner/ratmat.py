"""Small dense matrices of Fractions, stored as numpy object arrays."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .space import as_fraction


def ratmat(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray) and rows.dtype == object:
        rows = rows.tolist()
    arr = np.array([[as_fraction(x) for x in row] for row in rows], dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def identity(g: int) -> np.ndarray:
    out = zeros(g)
    for i in range(g):
        out[i, i] = Fraction(1)
    return out


def zeros(g: int) -> np.ndarray:
    out = np.empty((g, g), dtype=object)
    out.fill(Fraction(0))
    return out


def scalar(a, g: int) -> np.ndarray:
    return identity(g) * as_fraction(a)


def is_zero(m: np.ndarray) -> bool:
    return not any(x != 0 for x in m.flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def to_float(m: np.ndarray) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def norm_upper(m: np.ndarray) -> Fraction:
    """max(max row sum, max column sum); bounds the spectral norm from above.

    ||M||_2 <= sqrt(||M||_1 ||M||_inf) <= max(||M||_1, ||M||_inf).
    """
    a = np.abs(m)
    rows = max(sum(r, Fraction(0)) for r in a)
    cols = max(sum(c, Fraction(0)) for c in a.T)
    return max(rows, cols)


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(to_float(m), 2))


def to_strings(m: np.ndarray) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]
