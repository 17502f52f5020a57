"""Exact complexity measures of total Boolean functions.

All quantities are computed exactly: D by memoised minimax over subfunctions,
s/bs/C by exhaustive search, deg by the Moebius transform, ndeg by exact
elimination, and approximate degree by an exact-rational LP.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

from .boolfn import (
    Assignment,
    Block,
    MultilinearPoly,
    TruthTable,
    cube_mask,
    masks_in_subset_order,
    mobius_coefficients,
    popcount,
    restrict_table,
    to_index,
)
from .linalg import in_row_space, nullspace, row_reduce
from .lp import maximize
from .trees import DecisionTree, Leaf, Query

EXHAUSTIVE_CAP = 5
ADEG_CAP = 4
DEFAULT_EPSILON = Fraction(1, 3)


class CapExceeded(ValueError):
    """The function has more variables than an exhaustive routine supports."""


def _cap(f: TruthTable, cap: int, what: str) -> None:
    if f.n > cap:
        raise CapExceeded(f"{what} is exhaustive and supports n <= {cap}, got n={f.n}")


def clear_caches() -> None:
    for fn in (_dc, _minimal_blocks, _bs_at, _ndeg_table):
        fn.cache_clear()


# ---------------------------------------------------------------------------
# deterministic complexity


@lru_cache(maxsize=1 << 20)
def _dc(k: int, table: int) -> int:
    if table == 0 or table == (1 << (1 << k)) - 1:
        return 0
    best = k
    for j in range(k):
        bit = 1 << j
        _, lo = restrict_table(table, k, bit, 0)
        _, hi = restrict_table(table, k, bit, bit)
        if lo == hi:
            continue  # f does not depend on x_{j+1}
        cost = 1 + max(_dc(k - 1, lo), _dc(k - 1, hi))
        if cost < best:
            best = cost
            if best == 1:
                break
    return best


def deterministic_complexity(f: TruthTable) -> int:
    """Exact D(f) by minimax recursion, memoised on the renumbered subfunction."""
    _cap(f, EXHAUSTIVE_CAP, "deterministic_complexity")
    return _dc(f.n, f.table)


def optimal_tree(f: TruthTable) -> DecisionTree:
    """A decision tree of depth exactly D(f) (first optimal variable at each node)."""
    _cap(f, EXHAUSTIVE_CAP, "optimal_tree")

    def build(k: int, table: int, names: tuple[int, ...]) -> DecisionTree:
        if table == 0:
            return Leaf(0)
        if table == (1 << (1 << k)) - 1:
            return Leaf(1)
        target = _dc(k, table)
        for j in range(k):
            bit = 1 << j
            _, lo = restrict_table(table, k, bit, 0)
            _, hi = restrict_table(table, k, bit, bit)
            if lo != hi and 1 + max(_dc(k - 1, lo), _dc(k - 1, hi)) == target:
                rest = names[:j] + names[j + 1:]
                return Query(names[j], build(k - 1, lo, rest), build(k - 1, hi, rest))
        raise AssertionError("no variable attains the minimax value")

    return build(f.n, f.table, tuple(range(1, f.n + 1)))


# ---------------------------------------------------------------------------
# sensitivity and block sensitivity


def sensitivity_at(f: TruthTable, x: Assignment) -> int:
    xi = to_index(x, f.n)
    v = (f.table >> xi) & 1
    return sum(((f.table >> (xi ^ (1 << j))) & 1) != v for j in range(f.n))


def sensitivity(f: TruthTable) -> int:
    t = f.table
    best = 0
    for x in range(f.size):
        v = (t >> x) & 1
        c = 0
        for j in range(f.n):
            if ((t >> (x ^ (1 << j))) & 1) != v:
                c += 1
        if c > best:
            best = c
    return best


@dataclass(frozen=True)
class MinimalBlockSet:
    x: int
    blocks: tuple[Block, ...]


@lru_cache(maxsize=1 << 20)
def _minimal_blocks(n: int, table: int, x: int) -> tuple[int, ...]:
    v = (table >> x) & 1
    found: list[int] = []
    for b in masks_in_subset_order(n):
        if ((table >> (x ^ b)) & 1) == v:
            continue
        if any(m & b == m for m in found):
            continue
        found.append(b)
    return tuple(found)


def minimal_sensitive_blocks(f: TruthTable, x: Assignment) -> MinimalBlockSet:
    """Every minimal sensitive block at ``x``, in (size, lexicographic) order."""
    _cap(f, EXHAUSTIVE_CAP, "minimal_sensitive_blocks")
    xi = to_index(x, f.n)
    return MinimalBlockSet(xi, tuple(Block(b) for b in _minimal_blocks(f.n, f.table, xi)))


def max_disjoint_packing(blocks: tuple[int, ...]) -> int:
    """Largest number of pairwise disjoint masks; branch and bound on the first remaining block."""
    best = 0

    def go(rest: tuple[int, ...], count: int) -> None:
        nonlocal best
        if count > best:
            best = count
        if not rest or count + len(rest) <= best:
            return
        first = rest[0]
        go(tuple(b for b in rest[1:] if not b & first), count + 1)
        go(rest[1:], count)

    go(blocks, 0)
    return best


@lru_cache(maxsize=1 << 20)
def _bs_at(n: int, table: int, x: int) -> int:
    return max_disjoint_packing(_minimal_blocks(n, table, x))


def block_sensitivity_at(f: TruthTable, x: Assignment) -> int:
    _cap(f, EXHAUSTIVE_CAP, "block_sensitivity_at")
    return _bs_at(f.n, f.table, to_index(x, f.n))


def block_sensitivity(f: TruthTable) -> int:
    _cap(f, EXHAUSTIVE_CAP, "block_sensitivity")
    if f.is_constant():
        return 0
    return max(_bs_at(f.n, f.table, x) for x in range(f.size))


# ---------------------------------------------------------------------------
# certificates


def certificate_at(f: TruthTable, x: Assignment) -> int:
    """Smallest number of x's coordinates that force f constant."""
    _cap(f, EXHAUSTIVE_CAP, "certificate_at")
    xi = to_index(x, f.n)
    v = (f.table >> xi) & 1
    target = f.full_mask if v else 0
    for s in (0,) + masks_in_subset_order(f.n):
        m = cube_mask(f.n, s, xi & s)
        if f.table & m == target & m:
            return popcount(s)
    raise AssertionError("the full assignment is always a certificate")


def certificate_complexity(f: TruthTable) -> tuple[int, int, int]:
    """``(C0, C1, C)``: maxima of the per-input certificate size over 0-, 1- and all inputs."""
    _cap(f, EXHAUSTIVE_CAP, "certificate_complexity")
    c = [0, 0]
    order = (0,) + masks_in_subset_order(f.n)
    t = f.table
    for x in range(f.size):
        v = (t >> x) & 1
        if c[v] == f.n:
            continue
        target = f.full_mask if v else 0
        for s in order:
            m = cube_mask(f.n, s, x & s)
            if t & m == target & m:
                c[v] = max(c[v], popcount(s))
                break
    return c[0], c[1], max(c)


# ---------------------------------------------------------------------------
# degrees


def degree(f: TruthTable) -> int:
    coefs = mobius_coefficients(f.table, f.n)
    return max((popcount(s) for s, c in enumerate(coefs) if c), default=0)


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[int, ...]:
    """Variable masks of degree at most ``d`` in (size, lexicographic) order."""
    return (0,) + tuple(s for s in masks_in_subset_order(n) if popcount(s) <= d)


@lru_cache(maxsize=None)
def _eval_rows(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    mons = monomials(n, d)
    return tuple(tuple(1 if s & x == s else 0 for s in mons) for x in range(1 << n))


def _ndeg_feasible(n: int, table: int, d: int) -> bool:
    rows = _eval_rows(n, d)
    zeros = [rows[x] for x in range(1 << n) if not (table >> x) & 1]
    reduced, pivots = row_reduce(zeros, len(rows[0]))
    for x in range(1 << n):
        if (table >> x) & 1 and in_row_space(reduced, pivots, rows[x]):
            return False
    return True


@lru_cache(maxsize=1 << 18)
def _ndeg_table(n: int, table: int) -> int:
    if table == 0:
        return 0
    for d in range(n + 1):
        if _ndeg_feasible(n, table, d):
            return d
    raise AssertionError("the exact polynomial always witnesses degree <= n")


def nondeterministic_degree(f: TruthTable) -> int:
    """Least degree of a polynomial that vanishes exactly on f's zeros."""
    _cap(f, EXHAUSTIVE_CAP, "nondeterministic_degree")
    return _ndeg_table(f.n, f.table)


def construct_ndeg_witness(f: TruthTable, d: int | None = None) -> MultilinearPoly:
    """An integer polynomial of degree ndeg(f) (or ``d``) with ``p(x) = 0  iff  f(x) = 0``.

    The vanishing space on f's zeros is spanned exactly; the witness is then
    grown one 1-input at a time, adding an integer multiple of a basis element
    that is nonzero there and choosing the multiplier away from the finitely
    many values that would cancel an already secured 1-input.
    """
    _cap(f, EXHAUSTIVE_CAP, "construct_ndeg_witness")
    n = f.n
    if d is None:
        d = _ndeg_table(n, f.table)
    if f.table == 0:
        return MultilinearPoly(n, {})
    rows = _eval_rows(n, d)
    mons = monomials(n, d)
    zeros = [rows[x] for x in range(f.size) if not (f.table >> x) & 1]
    basis = nullspace(zeros, len(mons))
    ones = f.ones()

    def at(vec, x):
        r = rows[x]
        return sum(a for a, e in zip(vec, r) if e)

    coeffs = [0] * len(mons)
    secured: list[int] = []
    for x in ones:
        if at(coeffs, x) == 0:
            b = next((v for v in basis if at(v, x)), None)
            if b is None:
                raise ValueError(f"no polynomial of degree {d} separates input {x} from the zeros")
            forbidden = set()
            for y in secured:
                by = at(b, y)
                if by:
                    forbidden.add(Fraction(-at(coeffs, y), by))
            t = 1
            while t in forbidden:
                t += 1
            coeffs = [c + t * v for c, v in zip(coeffs, b)]
        secured.append(x)
    return MultilinearPoly(n, {s: Fraction(c) for s, c in zip(mons, coeffs) if c})


def is_nondeterministic_witness(p: MultilinearPoly, f: TruthTable) -> bool:
    """Exhaustive check that ``p(x) = 0`` exactly on f's zeros."""
    from .boolfn import poly_evaluate

    return all((poly_evaluate(p, x) != 0) == bool((f.table >> x) & 1) for x in range(f.size))


def _approx_lp(f: TruthTable, d: int, epsilon: Fraction):
    # substitute error = 1 - s so the origin (p = 0, s = 0) is feasible
    mons = monomials(f.n, d)
    rows = _eval_rows(f.n, d)
    A, b = [], []
    for x in range(f.size):
        fx = (f.table >> x) & 1
        e = list(rows[x])
        A.append(e + [-v for v in e] + [1])
        b.append(fx + 1)
        A.append([-v for v in e] + e + [1])
        b.append(1 - fx)
    c = [0] * (2 * len(mons)) + [1]
    res = maximize(c, A, b, stop_at=1 - epsilon)
    margin = res.value - (1 - epsilon)
    k = len(mons)
    poly = MultilinearPoly(f.n, {s: res.x[i] - res.x[k + i] for i, s in enumerate(mons)})
    return margin, poly


def approximating_polynomial(f: TruthTable, d: int, epsilon=DEFAULT_EPSILON) -> MultilinearPoly | None:
    """A degree-``d`` polynomial within ``epsilon`` of f everywhere, if one exists."""
    epsilon = _check_epsilon(epsilon)
    _cap(f, ADEG_CAP, "approximating_polynomial")
    margin, poly = _approx_lp(f, d, epsilon)
    return poly if margin >= 0 else None


def _check_epsilon(epsilon) -> Fraction:
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < Fraction(1, 2):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    return epsilon


def approximate_degree(f: TruthTable, epsilon=DEFAULT_EPSILON) -> int:
    """Least d with a degree-d polynomial satisfying ``|p(x) - f(x)| <= epsilon`` everywhere."""
    epsilon = _check_epsilon(epsilon)
    _cap(f, ADEG_CAP, "approximate_degree")
    if f.is_constant():
        return 0
    top = degree(f)
    for d in range(1, top):
        margin, _ = _approx_lp(f, d, epsilon)
        if margin >= 0:
            return d
    return top


# ---------------------------------------------------------------------------
# reports

REPORT_FIELDS = ("spec", "n", "d", "s", "bs", "c0", "c1", "c", "deg", "ndeg", "adeg", "epsilon")


@dataclass(frozen=True)
class MeasureReport:
    spec: str
    n: int
    d: int
    s: int
    bs: int
    c0: int
    c1: int
    c: int
    deg: int
    ndeg: int
    adeg: int | None  # None above the approximate-degree cap
    epsilon: Fraction

    def check(self) -> list[str]:
        """Names of violated ordering invariants (empty when consistent)."""
        pairs = [
            ("s<=bs", self.s, self.bs),
            ("bs<=d", self.bs, self.d),
            ("d<=n", self.d, self.n),
            ("ndeg<=deg", self.ndeg, self.deg),
            ("deg<=d", self.deg, self.d),
        ]
        if self.adeg is not None:
            pairs.insert(3, ("adeg<=ndeg", self.adeg, self.ndeg))
        return [name for name, lo, hi in pairs if lo > hi]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["epsilon"] = f"{self.epsilon.numerator}/{self.epsilon.denominator}"
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def measure_report(
    f: TruthTable,
    epsilon=DEFAULT_EPSILON,
    spec: str | None = None,
    adeg: int | None = None,
) -> MeasureReport:
    """All measures of ``f``; ``adeg`` may be supplied when already known."""
    epsilon = _check_epsilon(epsilon)
    if adeg is None and f.n <= ADEG_CAP:
        adeg = approximate_degree(f, epsilon)
    c0, c1, c = certificate_complexity(f)
    return MeasureReport(
        spec=spec if spec is not None else str(f),
        n=f.n,
        d=deterministic_complexity(f),
        s=sensitivity(f),
        bs=block_sensitivity(f),
        c0=c0,
        c1=c1,
        c=c,
        deg=degree(f),
        ndeg=nondeterministic_degree(f),
        adeg=adeg,
        epsilon=epsilon,
    )
