"""Deterministic evaluation by querying maxonomials of a nondeterministic polynomial.

Given ``q`` with ``q(x) = 0  iff  f(x) = 0``, :func:`value_f` repeatedly picks
the first maximum-degree monomial of the current polynomial, queries all of
its variables and substitutes the answers.  It stops as soon as the polynomial
is constant, and gives up with answer 1 after ``bs + 1`` rounds; on a
0-input every round lowers the block sensitivity, so the give-up branch is
only reachable on 1-inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .boolfn import (
    Assignment,
    Block,
    MultilinearPoly,
    PartialAssignment,
    TruthTable,
    complement,
    cube_mask,
    mask_to_vars,
    masks_in_subset_order,
    popcount,
    restrict_table,
    subset_order_key,
    to_index,
)
from .measures import _bs_at, block_sensitivity, construct_ndeg_witness
from .trees import DecisionTree, Leaf, Query, depth, flip_leaves

Oracle = Callable[[int], int]


class LemmaViolation(AssertionError):
    """A property guaranteed by the maxonomial argument failed to hold."""


# ---------------------------------------------------------------------------
# polynomial helpers on raw term dicts (mask -> coefficient)


def _restrict_terms(terms: Mapping[int, Fraction], mask: int, values: int) -> dict[int, Fraction]:
    zeros = mask & ~values
    out: dict[int, Fraction] = {}
    for s, c in terms.items():
        if s & zeros:
            continue
        t = s & ~mask
        v = out.get(t, 0) + c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def _raw_terms(p: MultilinearPoly) -> dict:
    # integral coefficients are handled as ints, which is much faster than Fraction
    if all(c.denominator == 1 for c in p.terms.values()):
        return {s: int(c) for s, c in p.terms.items()}
    return dict(p.terms)


def _is_constant(terms: Mapping[int, Fraction]) -> bool:
    return all(s == 0 for s in terms)


def _first_maxonomial(terms: Mapping[int, Fraction]) -> int:
    top = max(popcount(s) for s in terms)
    return min((s for s in terms if popcount(s) == top), key=subset_order_key)


def sign(c) -> int:
    return 1 if c != 0 else 0


def first_maxonomial(p: MultilinearPoly) -> Block:
    """Lexicographically first monomial of maximal degree."""
    if p.is_constant():
        raise ValueError("a constant polynomial has no maxonomial to query")
    return Block(_first_maxonomial(p.terms))


def all_maxonomials(p: MultilinearPoly) -> list[Block]:
    if p.is_constant():
        return []
    top = p.degree
    return [Block(s) for s in sorted(p.terms, key=subset_order_key) if popcount(s) == top]


# ---------------------------------------------------------------------------
# the evaluation loop


@dataclass(frozen=True)
class TraceStep:
    maxonomial: Block
    values: dict[int, int]
    degree_before: int
    degree_after: int

    def describe(self, k: int) -> str:
        vals = ",".join(f"x{v}={b}" for v, b in sorted(self.values.items()))
        return f"step {k}: M={self.maxonomial!r} deg={self.degree_before} values={vals} newdeg={self.degree_after}"


@dataclass
class DerandTrace:
    steps: list[TraceStep] = field(default_factory=list)
    outcome: int | None = None
    query_count: int = 0
    exhausted: bool = False  # answer came from the give-up branch

    def lines(self) -> list[str]:
        return [s.describe(k) for k, s in enumerate(self.steps, 1)]


def as_oracle(x: Assignment, n: int) -> Oracle:
    xi = to_index(x, n)
    return lambda var: (xi >> (var - 1)) & 1


def value_f(q: MultilinearPoly, bs_bound: int, oracle: Oracle | Assignment) -> tuple[int, DerandTrace]:
    """Evaluate the represented function on the input behind ``oracle``.

    ``oracle`` is either a callable ``var -> bit`` (1-based) or a full
    assignment.  Each variable is asked at most once.
    """
    if bs_bound < 0:
        raise ValueError("bs_bound must be nonnegative")
    if not callable(oracle):
        oracle = as_oracle(oracle, q.n)
    trace = DerandTrace()
    terms = _raw_terms(q)
    fixed = 0
    for _ in range(bs_bound + 1):
        if _is_constant(terms):
            trace.outcome = sign(terms.get(0, 0))
            return trace.outcome, trace
        m = _first_maxonomial(terms)
        if m & fixed:
            raise LemmaViolation("maxonomial contains an already queried variable")
        deg_before = popcount(m)
        got = {}
        vals = 0
        for v in mask_to_vars(m):
            b = oracle(v)
            if b not in (0, 1):
                raise ValueError(f"oracle returned {b!r} for x{v}")
            got[v] = b
            vals |= b << (v - 1)
        fixed |= m
        trace.query_count += len(got)
        terms = _restrict_terms(terms, m, vals)
        deg_after = max((popcount(s) for s in terms), default=0)
        trace.steps.append(TraceStep(Block(m), got, deg_before, deg_after))
    trace.outcome = 1
    trace.exhausted = True
    return 1, trace


# ---------------------------------------------------------------------------
# tree extraction


@dataclass
class Extraction:
    tree: DecisionTree
    # (fixed mask, values) of every path that ran out of rounds
    exhausted_paths: list[tuple[int, int]]


def extract_tree_report(q: MultilinearPoly, bs_bound: int) -> Extraction:
    """Explore both answers to every query of :func:`value_f`."""
    if bs_bound < 0:
        raise ValueError("bs_bound must be nonnegative")
    memo: dict[tuple[int, int], DecisionTree] = {}
    exhausted: list[tuple[int, int]] = []

    def round_(terms, fixed, vals, left) -> DecisionTree:
        key = (fixed, vals)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if _is_constant(terms):
            node: DecisionTree = Leaf(sign(terms.get(0, 0)))
        elif left == 0:
            exhausted.append(key)
            node = Leaf(1)
        else:
            m = _first_maxonomial(terms)
            if m & fixed:
                raise LemmaViolation("maxonomial contains an already queried variable")
            node = chain(terms, m, mask_to_vars(m), fixed, vals, left)
        memo[key] = node
        return node

    def chain(terms, m, pending, fixed, vals, left) -> DecisionTree:
        if not pending:
            return round_(_restrict_terms(terms, m, vals & m), fixed, vals, left - 1)
        v = pending[0]
        bit = 1 << (v - 1)
        return Query(
            v,
            chain(terms, m, pending[1:], fixed | bit, vals, left),
            chain(terms, m, pending[1:], fixed | bit, vals | bit, left),
        )

    tree = round_(_raw_terms(q), 0, 0, bs_bound + 1)
    return Extraction(tree, exhausted)


def extract_tree(q: MultilinearPoly, bs_bound: int) -> DecisionTree:
    return extract_tree_report(q, bs_bound).tree


def derandomize(f: TruthTable, q: MultilinearPoly | None = None, bs_bound: int | None = None) -> DecisionTree:
    """Decision tree for ``f`` built from a minimum-degree nondeterministic polynomial."""
    if q is None:
        q = construct_ndeg_witness(f)
    if bs_bound is None:
        bs_bound = block_sensitivity(f)
    return extract_tree(q, bs_bound)


def derandomize_either_side(f: TruthTable) -> DecisionTree:
    """Shallower of the direct tree and the leaf-flipped tree of the complement.

    Ties go to the direct side.
    """
    if f.is_constant():
        return Leaf(f.table & 1)
    bs = block_sensitivity(f)
    direct = derandomize(f, bs_bound=bs)
    g = complement(f)
    flipped = flip_leaves(derandomize(g, bs_bound=bs))
    return flipped if depth(flipped) < depth(direct) else direct


# ---------------------------------------------------------------------------
# checks of the supporting lemmas


def maxonomial_block_witness(q: MultilinearPoly, f: TruthTable, w: Assignment, m: Block) -> Block:
    """Some nonempty ``B`` inside the maxonomial ``m`` with ``f(w^B) = 1``.

    Raises :class:`LemmaViolation` if none exists, which cannot happen when
    ``q`` represents ``f`` nondeterministically and ``f(w) = 0``.
    """
    wi = to_index(w, f.n)
    if (f.table >> wi) & 1:
        raise ValueError("w must be a 0-input of f")
    if m.mask not in q.terms or popcount(m.mask) != q.degree:
        raise ValueError(f"{m!r} is not a maxonomial of q")
    for b in masks_in_subset_order(popcount(m.mask)):
        sub = _deposit(b, m.mask)
        if (f.table >> (wi ^ sub)) & 1:
            return Block(sub)
    raise LemmaViolation(f"no subset of {m!r} flips f at {wi}")


def _deposit(bits: int, mask: int) -> int:
    """Spread the low bits of ``bits`` onto the set bits of ``mask``."""
    out = 0
    k = 0
    j = 0
    while mask >> j:
        if (mask >> j) & 1:
            if (bits >> k) & 1:
                out |= 1 << j
            k += 1
        j += 1
    return out


def _compress_index(x: int, n: int, fixed_mask: int) -> int:
    out = 0
    k = 0
    for j in range(n):
        if not (fixed_mask >> j) & 1:
            if (x >> j) & 1:
                out |= 1 << k
            k += 1
    return out


@dataclass(frozen=True)
class DecreaseViolation:
    w: int
    step: int
    before: int
    after: int


def block_sensitivity_decrease(f: TruthTable, q: MultilinearPoly, bs_bound: int) -> list[DecreaseViolation]:
    """Run the loop on every 0-input and check each round drops bs at that input by one.

    The block sensitivity compared is that of the current restriction of
    ``f`` at the (restricted) input, before and after substituting the
    maxonomial just queried.
    """
    n = f.n
    bad = []
    for w in f.zeros():
        terms = _raw_terms(q)
        fixed = 0
        for step in range(bs_bound + 1):
            if _is_constant(terms):
                break
            m = _first_maxonomial(terms)
            k, cur = restrict_table(f.table, n, fixed, w & fixed)
            before = _bs_at(k, cur, _compress_index(w, n, fixed))
            terms = _restrict_terms(terms, m, w & m)
            fixed |= m
            k, nxt = restrict_table(f.table, n, fixed, w & fixed)
            after = _bs_at(k, nxt, _compress_index(w, n, fixed))
            if after > before - 1:
                bad.append(DecreaseViolation(w, step + 1, before, after))
    return bad


def exhausted_paths_are_ones(f: TruthTable, extraction: Extraction) -> bool:
    """Every give-up path ends in a 1-leaf and covers only 1-inputs."""
    for fixed, vals in extraction.exhausted_paths:
        m = cube_mask(f.n, fixed, vals)
        if f.table & m != m:
            return False
    return True


def trace_respects_degree(trace: DerandTrace, q: MultilinearPoly) -> bool:
    """Each round queries exactly the current degree, never more than deg(q)."""
    deg = q.degree
    cur = deg
    for st in trace.steps:
        if len(st.maxonomial) != cur or st.degree_before != cur or cur > deg:
            return False
        cur = st.degree_after
    return True


def partial_from_trace(trace: DerandTrace, n: int) -> PartialAssignment:
    got = {}
    for st in trace.steps:
        got.update(st.values)
    return PartialAssignment.from_dict(n, got)
