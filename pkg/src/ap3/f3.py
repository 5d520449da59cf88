"""Exact linear algebra over the field with three elements."""

from __future__ import annotations

import numpy as np


def row_reduce(mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod 3 and the pivot columns."""
    m = np.array(mat, dtype=np.int64) % 3
    if m.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if not len(nz):
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * m[r, c]) % 3  # 1*1 = 2*2 = 1 mod 3
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        if len(others):
            m[others] = (m[others] - np.outer(m[others, c], m[r])) % 3
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat) -> int:
    m = np.asarray(mat)
    if m.size == 0:
        return 0
    return len(row_reduce(m)[1])


def nullspace(mat, cols: int | None = None) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod 3}."""
    m = np.asarray(mat, dtype=np.int64)
    if m.size == 0:
        n = cols if cols is not None else (m.shape[1] if m.ndim == 2 else 0)
        return np.eye(n, dtype=np.int64)
    red, pivots = row_reduce(m)
    n = m.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, p in enumerate(pivots):
            basis[i, p] = (-red[row, f]) % 3
    return basis
