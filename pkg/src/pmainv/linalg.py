"""Exact linear algebra over fields of exact scalars.

Entries may be ``Fraction``/``int`` or any ring element exposing
``is_zero`` and field division (``RationalFn``), so the same elimination
serves both pointwise ranks and generic ranks over the rational-function
field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _lift(rows: Sequence[Sequence]) -> list[list]:
    """Copy of ``rows`` with plain ints promoted so division stays exact."""
    return [[Fraction(a) if isinstance(a, int) else a for a in r] for r in rows]


def _zero(a) -> bool:
    if isinstance(a, (int, Fraction)):
        return a == 0
    return a.is_zero()


def _weight(a) -> tuple[int, int]:
    # constants first, then the fewest terms
    size = getattr(a, "size", 0)
    size = size() if callable(size) else size
    const = getattr(a, "is_constant", None)
    return (0 if const is None or const() else 1, size)


def row_echelon(rows: Sequence[Sequence], full: bool = False) -> tuple[list[list], list[tuple[int, int]]]:
    """Gaussian elimination; returns the reduced rows and the (row, col) pivots.

    Among nonzero candidates a constant entry, or else the smallest one, is
    taken as the pivot, which keeps intermediate rational functions small.
    By default pivots are sought column by column (row echelon form proper);
    ``full=True`` searches every unused column, so that a nonconstant pivot
    appears only when the remaining submatrix has no constant entry.
    """
    m = _lift(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    r = 0
    while r < len(m):
        cols = [c for c in range(ncols) if c not in used]
        if not full:
            cols = [c for c in cols if c > (pivots[-1][1] if pivots else -1)]
        cands = [(i, c) for c in cols for i in range(r, len(m)) if not _zero(m[i][c])]
        if not cands:
            break
        if not full:
            c0 = cands[0][1]
            cands = [ic for ic in cands if ic[1] == c0]
        i, c = min(cands, key=lambda ic: _weight(m[ic[0]][ic[1]]))
        m[r], m[i] = m[i], m[r]
        piv = m[r][c]
        for k in range(r + 1, len(m)):
            if _zero(m[k][c]):
                continue
            f = m[k][c] / piv
            m[k] = [m[k][j] - f * m[r][j] if j not in used else m[k][j] for j in range(ncols)]
            m[k][c] = m[k][c] * 0
        pivots.append((r, c))
        used.add(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_echelon(rows)[1])


def determinant(rows: Sequence[Sequence]):
    m = _lift(rows)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        i = next((k for k in range(c, n) if not _zero(m[k][c])), None)
        if i is None:
            return m[0][0] * 0 if n else Fraction(0)
        if i != c:
            m[c], m[i] = m[i], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        for k in range(c + 1, n):
            if _zero(m[k][c]):
                continue
            f = m[k][c] / piv
            m[k] = [m[k][j] - f * m[c][j] for j in range(n)]
    return det


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list | None:
    """Solve sum_i x_i rows[i] = rhs for x (rows are the vectors).

    Returns ``None`` when rhs is not in the span; raises ValueError when the
    rows are dependent.
    """
    k = len(rows)
    n = len(rhs)
    # columns of the augmented system are the given vectors
    aug = [[rows[i][j] for i in range(k)] + [rhs[j]] for j in range(n)]
    red, piv = row_echelon(aug)
    if len(piv) > k or any(c == k for _, c in piv):
        return None
    if len(piv) < k:
        raise ValueError("vectors are linearly dependent")
    x: list = [None] * k
    for r, c in reversed(piv):
        acc = red[r][k]
        for j in range(c + 1, k):
            acc = acc - red[r][j] * x[j]
        x[c] = acc / red[r][c]
    return x


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank over GF(p) of an integer (residue) matrix."""
    m = [[int(v) % p for v in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        i = next((k for k in range(r, len(m)) if m[k][c]), None)
        if i is None:
            continue
        m[r], m[i] = m[i], m[r]
        inv = pow(m[r][c], p - 2, p)
        for k in range(r + 1, len(m)):
            if m[k][c]:
                f = m[k][c] * inv % p
                m[k] = [(a - f * b) % p for a, b in zip(m[k], m[r])]
        r += 1
        if r == len(m):
            break
    return r
