"""Zero-error amplification of a two-sided-error query algorithm.

The amplifier runs a randomized algorithm many times on the same input,
remembers every variable any run looked at, and answers only if those
variables already force the function: the answer always comes from a
certificate, so it is never wrong.  Repetitions make the set of queried
variables rich enough that a certificate is usually found; the majority vote
of the runs is recorded but never used as the answer.

Randomness: a 64-bit seed keys a Philox generator, and trial ``t`` uses the
substream whose counter starts at ``t`` in a high counter word.  Within a
trial, repetition ``j`` consumes the ``j``-th draw, so outcomes depend only on
``(seed, trial)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import lcm
from typing import Callable, Sequence

import numpy as np

from .boolfn import (
    Assignment,
    PartialAssignment,
    TruthTable,
    constant_on,
    cube_mask,
    mask_to_vars,
    or_fn,
    to_index,
)
from .measures import EXHAUSTIVE_CAP, block_sensitivity, optimal_tree
from .trees import DecisionTree, Leaf, Query, depth, flip_leaves, full_read_tree, path_on, run_tree

QUESTION = "?"
Z99 = 2.5758293035489004  # two-sided 99% normal quantile


class BudgetExceeded(RuntimeError):
    pass


def substream(seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based substream for one trial."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial must be nonnegative")
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, trial, 0]))


# ---------------------------------------------------------------------------
# randomized algorithms


@dataclass(frozen=True, eq=False)
class RandomizedAlgorithm:
    """A distribution over decision trees, or a seeded query procedure.

    Exactly one of ``trees`` (explicit weights summing to 1) and
    ``procedure`` (``procedure(oracle, rng) -> bit``) is set.  ``error`` is
    the declared worst-case error and ``budget`` the per-run query limit.
    """

    name: str
    n: int
    error: Fraction
    budget: int
    trees: tuple[tuple[Fraction, DecisionTree], ...] | None = None
    procedure: Callable | None = None

    def __post_init__(self):
        if (self.trees is None) == (self.procedure is None):
            raise ValueError("give exactly one of trees or procedure")
        object.__setattr__(self, "error", Fraction(self.error))
        if not 0 <= self.error < Fraction(1, 2):
            raise ValueError("declared error must lie in [0, 1/2)")
        if self.trees is not None:
            trees = tuple((Fraction(w), t) for w, t in self.trees)
            if any(w <= 0 for w, _ in trees):
                raise ValueError("mixture weights must be positive")
            if sum(w for w, _ in trees) != 1:
                raise ValueError("mixture weights must sum to exactly 1")
            object.__setattr__(self, "trees", trees)
            den = lcm(*(w.denominator for w, _ in trees))
            cum, acc = [], 0
            for w, _ in trees:
                acc += int(w * den)
                cum.append(acc)
            object.__setattr__(self, "_den", den)
            object.__setattr__(self, "_cum", np.array(cum, dtype=np.int64))

    @property
    def explicit(self) -> bool:
        return self.trees is not None

    def pick(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Indices of ``size`` independently drawn trees."""
        u = rng.integers(0, self._den, size=size)
        return np.searchsorted(self._cum, u, side="right")

    def run(self, oracle: Callable[[int], int], rng: np.random.Generator) -> int:
        """One run against ``oracle``; enforces the query budget."""
        count = 0

        def ask(var: int) -> int:
            nonlocal count
            count += 1
            if count > self.budget:
                raise BudgetExceeded(f"{self.name} exceeded its budget of {self.budget} queries")
            return oracle(var)

        if self.explicit:
            k = int(self.pick(rng, 1)[0])
            out, _ = run_tree(self.trees[k][1], ask)
            return out
        out = self.procedure(ask, rng)
        if out not in (0, 1):
            raise ValueError(f"{self.name} returned {out!r}")
        return out


def exact_error(trees: Sequence[tuple[Fraction, DecisionTree]], f: TruthTable) -> Fraction:
    """Worst-case probability over inputs that the mixture answers wrongly."""
    worst = Fraction(0)
    for x in range(f.size):
        fx = (f.table >> x) & 1
        err = sum((w for w, t in trees if path_on(t, x)[0] != fx), Fraction(0))
        worst = max(worst, err)
    return worst


def tree_mixture(f: TruthTable, trees: Sequence[tuple], name: str = "tree-mixture") -> RandomizedAlgorithm:
    """Explicit mixture whose declared error is its exact enumerated error."""
    trees = tuple((Fraction(w), t) for w, t in trees)
    budget = max(depth(t) for _, t in trees)
    return RandomizedAlgorithm(name, f.n, exact_error(trees, f), budget, trees=trees)


def _order_tree(f: TruthTable, order: Sequence[int]) -> DecisionTree:
    """Query ``order`` left to right, stopping once the restriction is constant."""

    def go(k: int, mask: int, vals: int) -> DecisionTree:
        v = constant_on(f, PartialAssignment(f.n, mask, vals))
        if v is not None:
            return Leaf(v)
        var = order[k]
        b = 1 << (var - 1)
        return Query(var, go(k + 1, mask | b, vals), go(k + 1, mask | b, vals | b))

    return go(0, 0, 0)


def _subsample_tree(positions: Sequence[int]) -> DecisionTree:
    """Read ``positions`` in order; output 1 at the first 1 seen, else 0."""
    if not positions:
        return Leaf(0)
    return Query(positions[0], _subsample_tree(positions[1:]), Leaf(1))


def full_read(f: TruthTable) -> RandomizedAlgorithm:
    return RandomizedAlgorithm("full-read", f.n, 0, f.n, trees=((Fraction(1), full_read_tree(f)),))


def random_order(f: TruthTable) -> RandomizedAlgorithm:
    """Uniformly random variable order, stopping as soon as f is determined."""
    if f.n > EXHAUSTIVE_CAP:
        raise ValueError(f"random-order is enumerated explicitly and supports n <= {EXHAUSTIVE_CAP}")
    perms = list(permutations(range(1, f.n + 1)))
    w = Fraction(1, len(perms))
    return tree_mixture(f, [(w, _order_tree(f, p)) for p in perms], name="random-order")


def subsample(n: int, k: int | None = None) -> RandomizedAlgorithm:
    """OR_n from ``k`` distinct random positions (default ``ceil(4n/5)``)."""
    if k is None:
        k = -(-4 * n // 5)
    if not 1 <= k <= n:
        raise ValueError("k must lie in 1..n")
    subsets = list(combinations(range(1, n + 1), k))
    w = Fraction(1, len(subsets))
    return tree_mixture(or_fn(n), [(w, _subsample_tree(s)) for s in subsets], name="subsample-k")


def builtin_algorithms(f: TruthTable) -> dict[str, RandomizedAlgorithm]:
    """Catalog of ready-made algorithms for ``f``.

    ``subsample-k`` is offered only when ``f`` is an OR function; the default
    ``tree-mixture`` is the optimal deterministic tree with weight 1, and
    ``noisy-tree`` answers with that tree's negation one time in five (error
    exactly 1/5 on every input).
    """
    if f.n > EXHAUSTIVE_CAP:
        raise ValueError(f"built-in algorithms support n <= {EXHAUSTIVE_CAP}")
    best = optimal_tree(f)
    cat = {
        "full-read": full_read(f),
        "random-order": random_order(f),
        "tree-mixture": tree_mixture(f, [(1, best)]),
        "noisy-tree": tree_mixture(
            f, [(Fraction(4, 5), best), (Fraction(1, 5), flip_leaves(best))], name="noisy-tree"
        ),
    }
    if f.n >= 1 and f == or_fn(f.n):
        cat["subsample-k"] = subsample(f.n)
    return cat


def generative(name: str, n: int, error, budget: int, procedure: Callable) -> RandomizedAlgorithm:
    return RandomizedAlgorithm(name, n, Fraction(error), budget, procedure=procedure)


def worst_case_expected_queries(alg: RandomizedAlgorithm, f: TruthTable) -> Fraction:
    """Max over inputs of the expected number of queries (explicit mixtures only)."""
    if not alg.explicit:
        raise TypeError("expected query counts are exact only for explicit mixtures")
    best = Fraction(0)
    for x in range(f.size):
        e = sum((w * bin(path_on(t, x)[1]).count("1") for w, t in alg.trees), Fraction(0))
        best = max(best, e)
    return best


# ---------------------------------------------------------------------------
# amplification


def repetitions_needed(bs: int, n: int, per_run_error) -> int:
    """Smallest odd r with ``exp(-2 r (1/2 - e)^2) <= 1 / (2 n^bs)`` (Hoeffding)."""
    e = Fraction(per_run_error)
    if e >= Fraction(1, 2):
        raise ValueError("per-run error must be below 1/2")
    if e < 0 or bs < 0 or n < 1:
        raise ValueError("need error >= 0, bs >= 0, n >= 1")
    gap = float(Fraction(1, 2) - e)
    r = math.ceil((math.log(2) + bs * math.log(n)) / (2 * gap * gap))
    r = max(r, 1)
    return r if r % 2 else r + 1


def certificate_check(f: TruthTable, queried: PartialAssignment) -> int | None:
    """The forced value of ``f`` under ``queried``, or ``None`` if not yet determined."""
    return constant_on(f, queried)


@dataclass
class AmplifierOutcome:
    answer: int | str
    queried: PartialAssignment
    repetitions: int
    per_run_outputs: list[int]
    seed: int
    trial: int = 0
    total_queries: int = 0
    majority: int = 0

    def to_dict(self) -> dict:
        return {
            "answer": self.answer,
            "repetitions": self.repetitions,
            "queried": [{"var": v, "value": b} for v, b in sorted(self.queried.as_dict().items())],
            "per_run_outputs": list(self.per_run_outputs),
            "seed": self.seed,
        }


def amplify_zero_error(
    f: TruthTable,
    alg: RandomizedAlgorithm,
    x: Assignment,
    seed: int,
    trial: int = 0,
    bs: int | None = None,
) -> AmplifierOutcome:
    """Run ``alg`` the prescribed number of times and answer from a certificate or say ``"?"``."""
    if alg.n != f.n:
        raise ValueError("algorithm and function disagree on n")
    xi = to_index(x, f.n)
    if bs is None:
        bs = block_sensitivity(f)
    reps = repetitions_needed(bs, f.n, alg.error)
    rng = substream(seed, trial)
    seen_mask = 0
    total = 0

    def oracle(var: int) -> int:
        nonlocal seen_mask, total
        total += 1
        seen_mask |= 1 << (var - 1)
        return (xi >> (var - 1)) & 1

    outputs = []
    if alg.explicit:
        for k in alg.pick(rng, reps):
            count = 0

            def ask(var: int) -> int:
                nonlocal count
                count += 1
                if count > alg.budget:
                    raise BudgetExceeded(f"{alg.name} exceeded its budget of {alg.budget} queries")
                return oracle(var)

            out, _ = run_tree(alg.trees[int(k)][1], ask)
            outputs.append(out)
    else:
        for _ in range(reps):
            outputs.append(alg.run(oracle, rng))
    queried = PartialAssignment(f.n, seen_mask, xi & seen_mask)
    value = certificate_check(f, queried)
    return AmplifierOutcome(
        answer=QUESTION if value is None else value,
        queried=queried,
        repetitions=reps,
        per_run_outputs=outputs,
        seed=seed,
        trial=trial,
        total_queries=total,
        majority=int(2 * sum(outputs) > len(outputs)),
    )


@dataclass(frozen=True)
class RateEstimate:
    rate: Fraction
    trials: int
    wrong: int
    half_width: float
    questions: int = 0
    repetitions: int = 0

    def to_dict(self) -> dict:
        return {
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "trials": self.trials,
            "wrong": self.wrong,
            "half_width": self.half_width,
        }


def estimate_question_rate(
    f: TruthTable,
    alg: RandomizedAlgorithm,
    x: Assignment,
    trials: int,
    seed: int,
    bs: int | None = None,
) -> RateEstimate:
    """Fraction of ``"?"`` answers over ``trials`` independent amplified runs.

    Trial ``t`` is exactly ``amplify_zero_error(..., seed, trial=t)``; for
    explicit mixtures the per-tree paths on ``x`` are tabulated once instead
    of re-walking trees.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    xi = to_index(x, f.n)
    fx = (f.table >> xi) & 1
    if bs is None:
        bs = block_sensitivity(f)
    reps = repetitions_needed(bs, f.n, alg.error)
    questions = wrong = 0
    if alg.explicit:
        paths = [path_on(t, xi) for _, t in alg.trees]
        if any(bin(m).count("1") > alg.budget for _, m in paths):
            raise BudgetExceeded(f"{alg.name} exceeds its budget on this input")
        masks = [m for _, m in paths]
        verdict: dict[int, int | None] = {}
        for t in range(trials):
            seen = 0
            for k in alg.pick(substream(seed, t), reps):
                seen |= masks[k]
            if seen not in verdict:
                cm = cube_mask(f.n, seen, xi & seen)
                hit = f.table & cm
                verdict[seen] = 0 if hit == 0 else (1 if hit == cm else None)
            v = verdict[seen]
            if v is None:
                questions += 1
            elif v != fx:
                wrong += 1
    else:
        for t in range(trials):
            out = amplify_zero_error(f, alg, xi, seed, trial=t, bs=bs)
            if out.answer == QUESTION:
                questions += 1
            elif out.answer != fx:
                wrong += 1
    p = questions / trials
    hw = Z99 * math.sqrt(p * (1 - p) / trials)
    return RateEstimate(Fraction(questions, trials), trials, wrong, hw, questions, reps)


def queried_vars(outcome: AmplifierOutcome) -> tuple[int, ...]:
    return mask_to_vars(outcome.queried.mask)
