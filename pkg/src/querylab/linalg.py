"""Exact linear algebra over the rationals.

Matrices here are small and have integer entries, so elimination is done
fraction-free on Python integers: every row is kept primitive (gcd 1) and the
result is the reduced echelon form up to a positive scale per row.  This is
exact rational arithmetic without paying for a ``Fraction`` per entry.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def row_reduce(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Integer reduced row echelon form.

    Returns ``(reduced_rows, pivot_columns)``.  Each reduced row has a positive
    entry at its pivot column and zeros at every other pivot column.
    """
    work = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    reduced: list[list[int]] = []
    for col in range(ncols):
        pick = None
        for k, r in enumerate(work):
            if r[col]:
                pick = k
                break
        if pick is None:
            continue
        prow = work.pop(pick)
        if prow[col] < 0:
            prow = [-v for v in prow]
        prow = _primitive(prow)
        a = prow[col]
        rest = []
        for r in work:
            c = r[col]
            if c:
                r = [a * u - c * v for u, v in zip(r, prow)]
                if not any(r):
                    continue
                r = _primitive(r)
            rest.append(r)
        work = rest
        for k, r in enumerate(reduced):
            c = r[col]
            if c:
                r = [a * u - c * v for u, v in zip(r, prow)]
                reduced[k] = _primitive(r)
        reduced.append(prow)
        pivots.append(col)
        if not work:
            break
    return reduced, pivots


def rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    return len(row_reduce(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Integer basis of ``{v : A v = 0}`` for the integer matrix ``A``."""
    reduced, pivots = row_reduce(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        scale = 1
        for r, pc in zip(reduced, pivots):
            if r[free]:
                a = r[pc]
                scale = scale * a // gcd(scale, a)
        v = [0] * ncols
        v[free] = scale
        for r, pc in zip(reduced, pivots):
            if r[free]:
                v[pc] = -scale * r[free] // r[pc]
        basis.append(_primitive(v))
    return basis


def in_row_space(reduced: Sequence[Sequence[int]], pivots: Sequence[int], vec: Sequence[int]) -> bool:
    """Whether ``vec`` lies in the span of an already reduced row set."""
    v = list(vec)
    for r, pc in zip(reduced, pivots):
        c = v[pc]
        if c:
            a = r[pc]
            v = [a * u - c * w for u, w in zip(v, r)]
    return not any(v)
