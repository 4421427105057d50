"""Solving A x = b over Z/l.

l is split into prime powers. Over Z/p^e every entry is p^v times a unit, so
pivoting on an entry of least valuation and clearing its row and column
reduces A to a diagonal of powers of p (a Smith form). The pieces are glued
back with the Chinese remainder theorem.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import BudgetExceeded

DEFAULT_MAX_CELLS = 50_000_000


def factorize(n: int) -> list:
    """[(p, e), ...] with n = prod p^e, primes increasing."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _solve_prime_power(A: np.ndarray, b: np.ndarray, p: int, e: int) -> Optional[np.ndarray]:
    q = p ** e
    M = A % q
    rhs = b % q
    rows, cols = M.shape
    V = np.eye(cols, dtype=np.int64)
    pivots = []
    for r in range(min(rows, cols)):
        sub = M[r:, r:]
        pos = None
        for v in range(e):
            hit = np.argwhere(sub % (p ** (v + 1)) != 0)
            if hit.size:
                pos, val = hit[0], v
                break
        if pos is None:
            break
        i, j = int(pos[0]) + r, int(pos[1]) + r
        if i != r:
            M[[r, i]] = M[[i, r]]
            rhs[[r, i]] = rhs[[i, r]]
        if j != r:
            M[:, [r, j]] = M[:, [j, r]]
            V[:, [r, j]] = V[:, [j, r]]
        pv = p ** val
        unit = int(M[r, r]) // pv
        inv = pow(unit, -1, q)
        M[r] = (M[r] * inv) % q
        rhs[r] = (rhs[r] * inv) % q
        col = M[:, r].copy()
        col[r] = 0
        f = col // pv
        M -= np.outer(f, M[r])
        M %= q
        rhs = (rhs - f * rhs[r]) % q
        w = M[r].copy() // pv
        w[r] = 0
        M -= np.outer(M[:, r], w)
        M %= q
        V = (V - np.outer(V[:, r], w)) % q
        pivots.append(val)
    y = np.zeros(cols, dtype=np.int64)
    for r, val in enumerate(pivots):
        pv = p ** val
        if rhs[r] % pv:
            return None
        y[r] = rhs[r] // pv
    if np.any(rhs[len(pivots):] % q):
        return None
    return (V @ y) % q


def solve_mod(A, b, l: int, max_cells: int = DEFAULT_MAX_CELLS) -> Optional[np.ndarray]:
    """Some x with A x = b (mod l), entries in [0, l), or None if none exists."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError("shape mismatch")
    if A.size > max_cells:
        raise BudgetExceeded(f"system of {A.shape[0]}x{A.shape[1]} exceeds {max_cells} cells")
    if l >= 2 ** 31:
        raise ValueError("modulus too large")
    if l == 1:
        return np.zeros(A.shape[1], dtype=np.int64)
    x = np.zeros(A.shape[1], dtype=np.int64)
    mod = 1
    for p, e in factorize(l):
        q = p ** e
        xq = _solve_prime_power(A.copy(), b.copy(), p, e)
        if xq is None:
            return None
        # CRT: x = x (mod mod), x = xq (mod q)
        t = ((xq - x) % q) * pow(mod, -1, q) % q
        x = x + mod * t
        mod *= q
    x %= l
    assert not np.any((A @ x - b) % l), "solve_mod produced a non-solution"
    return x
