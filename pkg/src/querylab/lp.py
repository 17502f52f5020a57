"""Exact simplex for small linear programs.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0`` (so the origin is a
feasible basis and no phase one is needed).  The tableau is kept integral with
integer-preserving pivots: every stored entry equals the true tableau entry
times the current common denominator, and each update divides exactly by the
previous pivot.  Bland's rule is used for both entering and leaving choices,
which rules out cycling on the heavily degenerate systems approximation
problems produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence


class Unbounded(ArithmeticError):
    pass


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" or "target"
    value: Fraction
    x: tuple[Fraction, ...]
    pivots: int


def _integral_row(row: Sequence, rhs) -> list[int]:
    vals = [Fraction(v) for v in row] + [Fraction(rhs)]
    den = lcm(*(v.denominator for v in vals))
    return [int(v * den) for v in vals]


def maximize(
    c: Sequence,
    A: Sequence[Sequence],
    b: Sequence,
    stop_at: Fraction | None = None,
) -> LPResult:
    """Maximise ``c.x`` over ``{A x <= b, x >= 0}``.

    With ``stop_at`` set, returns as soon as the current vertex reaches that
    objective value (status ``"target"``); the reported value is then a lower
    bound on the optimum.  Raises :class:`Unbounded` if the objective is
    unbounded above.
    """
    m = len(A)
    nv = len(c)
    if any(Fraction(v) < 0 for v in b):
        raise ValueError("right-hand side must be nonnegative")
    width = nv + m
    tab = []
    for i, (row, rhs) in enumerate(zip(A, b)):
        if len(row) != nv:
            raise ValueError("constraint row has the wrong length")
        # scaling a row to integers only rescales its slack variable
        r = _integral_row(row, rhs)
        full = r[:nv] + [0] * m + [r[-1]]
        full[nv + i] = 1
        tab.append(full)
    cden = lcm(*(Fraction(v).denominator for v in c)) if nv else 1
    obj = [-int(Fraction(v) * cden) for v in c] + [0] * m + [0]
    basis = list(range(nv, nv + m))
    denom = 1
    pivots = 0

    def current() -> Fraction:
        return Fraction(obj[-1], denom * cden)

    while True:
        if stop_at is not None and current() >= stop_at:
            status = "target"
            break
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            status = "optimal"
            break
        leave = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                if leave is None:
                    leave = i
                    continue
                # compare rhs_i / a  with  rhs_leave / a_leave
                lhs = tab[i][-1] * tab[leave][enter]
                rhs = tab[leave][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            raise Unbounded("objective is unbounded")
        prow = tab[leave]
        p = prow[enter]
        for i in range(m):
            if i == leave:
                continue
            row = tab[i]
            f = row[enter]
            if f:
                tab[i] = [(p * u - f * v) // denom for u, v in zip(row, prow)]
            elif p != denom:
                tab[i] = [(p * u) // denom for u in row]
        f = obj[enter]
        obj = [(p * u - f * v) // denom for u, v in zip(obj, prow)]
        denom = p
        basis[leave] = enter
        pivots += 1

    x = [Fraction(0)] * width
    for i, j in enumerate(basis):
        x[j] = Fraction(tab[i][-1], denom)
    return LPResult(status, current(), tuple(x[:nv]), pivots)
