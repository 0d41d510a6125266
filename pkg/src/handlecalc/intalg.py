"""Exact integer linear algebra on small symmetric matrices.

Two independent routes are kept on purpose: elementary divisors come from an
integer Smith reduction, inertia comes from a rational LDL^T congruence.  Rank
is available from both and the test-suite compares them.
"""
from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

Matrix = Sequence[Sequence[int]]


def elementary_divisors(rows: Matrix) -> list[int]:
    """Diagonal of the Smith normal form of a square integer matrix.

    Returns ``n`` non-negative integers ``d1 | d2 | ... | dr, 0, ..., 0``.
    """
    a = [[int(x) for x in r] for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("elementary_divisors expects a square matrix")
    out: list[int] = []
    t = 0
    while t < n:
        piv = _smallest_nonzero(a, t, n)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, n):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for k in range(t, n):
                            ri[k] -= q * rt[k]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for r in a[t:]:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        moved = True
                        break
            if moved:
                continue
            # pivot isolated; enforce divisibility of the remaining block
            bad = next(
                (i for i in range(t + 1, n) if any(a[i][k] % p for k in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            rt, rb = a[t], a[bad]
            for k in range(t, n):
                rt[k] += rb[k]
        out.append(abs(a[t][t]))
        t += 1
    out.extend([0] * (n - len(out)))
    return out


def _smallest_nonzero(a, t, n):
    best = None
    best_abs = 0
    for i in range(t, n):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best_abs):
                best, best_abs = (i, j), abs(v)
                if best_abs == 1:
                    return best
    return best


def inertia(rows: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric integer matrix."""
    n = len(rows)
    a = [[mpq(int(x)) for x in r] for r in rows]
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("inertia expects a symmetric matrix")
    live = list(range(n))
    pos = neg = 0
    while live:
        k = next((i for i in live if a[i][i] != 0), None)
        if k is None:
            hit = next(((i, j) for i in live for j in live if i < j and a[i][j] != 0), None)
            if hit is None:
                break
            k, l = hit
            # congruence: row/col k += row/col l makes the diagonal 2*a[k][l]
            for j in live:
                a[k][j] += a[l][j]
            for i in live:
                a[i][k] += a[i][l]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        live.remove(k)
        rk = a[k]
        for i in live:
            f = a[i][k] / p
            if f:
                ri = a[i]
                for j in live:
                    ri[j] -= f * rk[j]
    return pos, neg, n - pos - neg


def signature(rows: Matrix) -> int:
    pos, neg, _ = inertia(rows)
    return pos - neg


def det_bareiss(rows: Matrix) -> int:
    """Determinant by fraction-free elimination (used as an independent check)."""
    a = [[int(x) for x in r] for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
