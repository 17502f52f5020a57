import math
from fractions import Fraction

import numpy as np
import pytest

from querylab.amplify import (
    QUESTION,
    BudgetExceeded,
    RandomizedAlgorithm,
    amplify_zero_error,
    builtin_algorithms,
    certificate_check,
    estimate_question_rate,
    exact_error,
    full_read,
    generative,
    queried_vars,
    repetitions_needed,
    subsample,
    substream,
    tree_mixture,
    worst_case_expected_queries,
)
from querylab.boolfn import PartialAssignment, or_fn, parse_spec
from querylab.measures import block_sensitivity, optimal_tree
from querylab.trees import Leaf, Query


def hoeffding_r(bs, n, e):
    """Direct scan for the smallest odd r meeting the bound."""
    r = 1
    while math.exp(-2 * r * (0.5 - e) ** 2) > 1 / (2 * n**bs):
        r += 2
    return r


# --- repetition count ---------------------------------------------------------


def test_repetitions_examples():
    assert repetitions_needed(0, 1, Fraction(1, 5)) == 5
    assert repetitions_needed(1, 3, Fraction(1, 5)) == 11


@pytest.mark.parametrize("bs", range(0, 5))
@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 16])
@pytest.mark.parametrize("e", [Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(1, 3)])
def test_repetitions_match_scan(bs, n, e):
    assert repetitions_needed(bs, n, e) == hoeffding_r(bs, n, float(e))


def test_repetitions_monotone():
    e = Fraction(1, 5)
    for n in range(1, 10):
        for bs in range(6):
            assert repetitions_needed(bs + 1, n, e) >= repetitions_needed(bs, n, e)
            assert repetitions_needed(bs, n + 1, e) >= repetitions_needed(bs, n, e)


def test_repetitions_reject_half():
    with pytest.raises(ValueError):
        repetitions_needed(1, 3, Fraction(1, 2))


# --- certificates and algorithms ------------------------------------------------


def test_certificate_check_examples():
    f = or_fn(3)
    assert certificate_check(f, PartialAssignment.from_dict(3, {2: 1})) == 1
    assert certificate_check(f, PartialAssignment.from_dict(3, {2: 0})) is None
    g = parse_spec("maj:3")
    for x in range(8):
        assert certificate_check(g, PartialAssignment.full(3, x)) == g(x)


def test_mixture_validation():
    t = Leaf(0)
    with pytest.raises(ValueError):
        RandomizedAlgorithm("w", 1, 0, 1, trees=((Fraction(1, 2), t), (Fraction(1, 3), t)))
    with pytest.raises(ValueError):
        RandomizedAlgorithm("w", 1, 0, 1, trees=((Fraction(0), t), (Fraction(1), t)))
    with pytest.raises(ValueError):
        RandomizedAlgorithm("w", 1, Fraction(1, 2), 1, trees=((1, t),))


def test_builtin_errors():
    f = or_fn(3)
    cat = builtin_algorithms(f)
    assert cat["full-read"].error == 0
    assert cat["tree-mixture"].error == 0
    assert cat["noisy-tree"].error == Fraction(1, 5)
    assert subsample(5).error == Fraction(1, 5)
    with pytest.raises(ValueError):
        subsample(4, 2)  # error 1/2 is not a two-sided-error algorithm
    for alg in cat.values():
        if alg.explicit:
            assert alg.error == exact_error(alg.trees, f) <= Fraction(1, 5)
    assert "subsample-k" not in builtin_algorithms(parse_spec("maj:3"))


def test_worst_case_expected_queries():
    f = or_fn(3)
    bs = block_sensitivity(f)
    assert worst_case_expected_queries(full_read(f), f) == 3
    for alg in builtin_algorithms(f).values():
        assert worst_case_expected_queries(alg, f) >= Fraction(bs, 2)
    g = parse_spec("dict:3:1")
    one = tree_mixture(g, [(1, optimal_tree(g))])
    assert worst_case_expected_queries(one, g) == 1


def test_generative_has_no_exact_expectation():
    alg = generative("coin", 2, 0, 2, lambda ask, rng: ask(1))
    with pytest.raises(TypeError):
        worst_case_expected_queries(alg, parse_spec("dict:2:1"))


# --- amplifier ---------------------------------------------------------------------


def test_full_read_always_answers():
    f = parse_spec("maj:3")
    for x in range(8):
        out = amplify_zero_error(f, full_read(f), x, seed=3)
        assert out.answer == f(x)


def test_subsample_or3():
    f = or_fn(3)
    alg = subsample(3, 2)
    for trial in range(200):
        out = amplify_zero_error(f, alg, "111", seed=5, trial=trial)
        assert out.answer == 1
        out = amplify_zero_error(f, alg, "000", seed=5, trial=trial)
        assert out.answer == (0 if len(queried_vars(out)) == 3 else QUESTION)


def test_subsample_full_k_has_zero_rate():
    est = estimate_question_rate(or_fn(3), subsample(3, 3), "000", 500, seed=1)
    assert est.rate == 0 and est.wrong == 0


def test_outcome_fields():
    f = or_fn(3)
    out = amplify_zero_error(f, subsample(3, 2), "010", seed=9)
    d = out.to_dict()
    assert set(d) == {"answer", "repetitions", "queried", "per_run_outputs", "seed"}
    assert len(out.per_run_outputs) == out.repetitions == repetitions_needed(3, 3, Fraction(1, 3))
    assert out.total_queries <= out.repetitions * 2
    assert all(q["value"] == (1 if q["var"] == 2 else 0) for q in d["queried"])


def test_reproducible():
    f = parse_spec("maj:3")
    alg = builtin_algorithms(f)["noisy-tree"]
    a = amplify_zero_error(f, alg, "101", seed=42, trial=7)
    b = amplify_zero_error(f, alg, "101", seed=42, trial=7)
    assert a.to_dict() == b.to_dict()
    assert estimate_question_rate(f, alg, "101", 300, 8) == estimate_question_rate(f, alg, "101", 300, 8)


def test_substreams_differ():
    a = substream(1, 0).integers(0, 1 << 30, 4)
    b = substream(1, 1).integers(0, 1 << 30, 4)
    c = substream(2, 0).integers(0, 1 << 30, 4)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_fast_rate_matches_direct_runs():
    f = or_fn(4)
    alg = subsample(4, 3)
    x = "0000"
    est = estimate_question_rate(f, alg, x, 400, seed=12)
    direct = sum(amplify_zero_error(f, alg, x, 12, trial=t).answer == QUESTION for t in range(400))
    assert est.questions == direct


def test_generative_algorithm_and_budget():
    f = or_fn(3)

    def two_random(ask, rng):
        picks = rng.choice(3, size=2, replace=False) + 1
        return int(any(ask(int(v)) for v in picks))

    alg = generative("pair", 3, Fraction(1, 3), 2, two_random)
    est = estimate_question_rate(f, alg, "000", 200, seed=4)
    assert est.wrong == 0
    greedy = generative("greedy", 3, 0, 2, lambda ask, rng: ask(1) | ask(2) | ask(3))
    with pytest.raises(BudgetExceeded):
        amplify_zero_error(f, greedy, "000", seed=0)


def test_budget_on_explicit_mixture():
    f = or_fn(2)
    t = Query(1, Query(2, Leaf(0), Leaf(1)), Leaf(1))
    tight = RandomizedAlgorithm("tight", 2, 0, 1, trees=((1, t),))
    with pytest.raises(BudgetExceeded):
        amplify_zero_error(f, tight, "00", seed=0)
    with pytest.raises(BudgetExceeded):
        estimate_question_rate(f, tight, "00", 10, seed=0)


def test_answers_never_wrong_small():
    for spec in ("or:2", "maj:3", "tt:3:01101001", "tt:3:00101100"):
        f = parse_spec(spec)
        for alg in builtin_algorithms(f).values():
            for x in range(f.size):
                est = estimate_question_rate(f, alg, x, 300, seed=17)
                assert est.wrong == 0
                assert float(est.rate) <= 0.5 + 3 * est.half_width + 1e-12
