"""Acceptance criteria, one test each.

Every criterion prints a single ``PASS``/``FAIL`` line (collected in the
terminal summary under pytest, or printed directly with
``python tests/test_acceptance.py``).  The exhaustive n = 4 sweep is run once
and shared.
"""

from __future__ import annotations

import math
import sys
import time
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles
from querylab.amplify import builtin_algorithms, estimate_question_rate, repetitions_needed
from querylab.atlas import verify
from querylab.boolfn import TruthTable, parse_spec
from querylab.derandomize import all_maxonomials, extract_tree, maxonomial_block_witness
from querylab.measures import (
    approximate_degree,
    block_sensitivity,
    construct_ndeg_witness,
    measure_report,
)
from querylab.trees import depth, tree_table

EPS = Fraction(1, 3)
RESULTS: list[str] = []


def record(name: str, ok: bool, detail: str) -> bool:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


@lru_cache(maxsize=None)
def sweep(n: int):
    t0 = time.perf_counter()
    res = verify(n, epsilon=EPS)
    return res, time.perf_counter() - t0


def counts(n: int) -> Counter:
    return Counter(v.inequality for v in sweep(n)[0].violations)


# --- criteria -------------------------------------------------------------------


def depth_bound_n4():
    res, secs = sweep(4)
    bad = counts(4)["D<=(bs+1)*ndeg"]
    ok = res.functions_checked == 65536 and bad == 0 and secs <= 600
    return ok, f"{res.functions_checked} functions, {bad} violations of D <= (bs+1)*ndeg, full sweep {secs:.0f}s (limit 600s)"


def derandomizer_soundness():
    fns = [TruthTable(n, t) for n in (1, 2, 3) for t in range(1 << (1 << n))]
    rng = np.random.Generator(np.random.Philox(key=2024))
    fns += [TruthTable(4, int(t)) for t in rng.integers(0, 1 << 16, size=1000)]
    bad = 0
    for f in fns:
        q = construct_ndeg_witness(f)
        bs = block_sensitivity(f)
        t = extract_tree(q, bs)
        if tree_table(t, f.n) != f or depth(t) > (bs + 1) * q.degree:
            bad += 1
    return bad == 0, f"{len(fns)} functions (all n<=3, 1000 sampled at n=4), {bad} disagreeing or too-deep trees"


def maxonomial_witness_search():
    searches = fails = 0
    for n in (1, 2, 3):
        for t in range(1 << (1 << n)):
            f = TruthTable(n, t)
            q = construct_ndeg_witness(f)
            for w in f.zeros():
                for m in all_maxonomials(q):
                    searches += 1
                    try:
                        b = maxonomial_block_witness(q, f, w, m)
                        if not f(w ^ b.mask):
                            fails += 1
                    except AssertionError:
                        fails += 1
    return fails == 0, f"{searches} (function, 0-input, maxonomial) searches, {fails} failures"


def minimal_block_lemmas():
    size = sum(counts(n)["|B|<=s"] for n in (1, 2, 3, 4))
    many = sum(counts(n)["#blocks<=N^bs"] for n in (1, 2, 3, 4))
    return size == 0 and many == 0, f"n<=4: {size} blocks larger than s, {many} inputs with more than N^bs minimal blocks"


def degree_hierarchy():
    lo = sum(counts(n)["adeg<=ndeg"] for n in (1, 2, 3, 4))
    hi = sum(counts(n)["ndeg<=deg"] for n in (1, 2, 3, 4))
    wit = sum(counts(n)["ndeg-witness"] for n in (1, 2, 3, 4))
    example = ""
    if lo:
        v = next(v for n in (1, 2, 3, 4) for v in sweep(n)[0].violations if v.inequality == "adeg<=ndeg")
        example = f" (first: {v.spec} adeg={v.values['adeg']} ndeg={v.values['ndeg']})"
    ok = lo == 0 and hi == 0 and wit == 0
    return ok, f"eps=1/3, n<=4: {lo} functions with adeg > ndeg{example}, {hi} with ndeg > deg, {wit} invalid witnesses"


def amplifier_contract():
    t0 = time.perf_counter()
    pairs = wrong = over = 0
    worst = 0.0
    for spec in ("or:3", "or:4", "maj:3", "parity:3"):
        f = parse_spec(spec)
        bs = block_sensitivity(f)
        for name, alg in builtin_algorithms(f).items():
            for x in range(f.size):
                est = estimate_question_rate(f, alg, x, 10_000, seed=1000 + x, bs=bs)
                pairs += 1
                wrong += est.wrong
                worst = max(worst, float(est.rate))
                if float(est.rate) > 0.5 + 3 * est.half_width:
                    over += 1
    secs = time.perf_counter() - t0
    ok = wrong == 0 and over == 0 and secs <= 300
    return ok, (
        f"{pairs} (algorithm, input) pairs x 10000 trials: {wrong} wrong answers, "
        f"{over} pairs above 1/2 + 3 half-widths, max '?' rate {worst:.4f}, {secs:.0f}s (limit 300s)"
    )


def repetition_formula():
    direct = lambda bs, n, e: 2 * math.ceil((math.log(2 * n**bs) / (2 * (0.5 - e) ** 2) - 1) / 2) + 1
    a, b = repetitions_needed(1, 3, Fraction(1, 5)), repetitions_needed(0, 1, Fraction(1, 5))
    grid = [(bs, n) for bs in range(6) for n in range(1, 17)]
    agree = all(repetitions_needed(bs, n, Fraction(1, 5)) == direct(bs, n, 0.2) for bs, n in grid)
    mono = all(
        repetitions_needed(bs + 1, n, Fraction(1, 5)) >= repetitions_needed(bs, n, Fraction(1, 5))
        and repetitions_needed(bs, n + 1, Fraction(1, 5)) >= repetitions_needed(bs, n, Fraction(1, 5))
        for bs, n in grid
    )
    ok = a == 11 and b == 5 and agree and mono
    return ok, f"r(1,3,1/5)={a}, r(0,1,1/5)={b}, closed form agrees on {len(grid)} points: {agree}, monotone: {mono}"


def spot_values():
    keys = ("d", "s", "bs", "c0", "c1", "deg", "ndeg")
    want_or = dict(d=3, s=3, bs=3, c0=3, c1=1, deg=3, ndeg=1)
    want_maj = dict(d=3, s=2, bs=2, c0=2, c1=2, deg=3)

    def brute(spec):
        fd, n = oracles.as_func(parse_spec(spec)), parse_spec(spec).n
        c0, c1 = oracles.certificate_oracle(fd, n)
        return dict(
            d=oracles.d_oracle(fd, n), s=oracles.s_oracle(fd, n), bs=oracles.bs_oracle(fd, n),
            c0=c0, c1=c1, deg=oracles.deg_oracle(fd, n), ndeg=oracles.ndeg_oracle(fd, n),
        )

    r_or = measure_report(parse_spec("or:3"))
    r_maj = measure_report(parse_spec("maj:3"))
    got_or = {k: getattr(r_or, k) for k in keys}
    got_maj = {k: getattr(r_maj, k) for k in want_maj}
    b_or, b_maj = brute("or:3"), brute("maj:3")
    adeg = approximate_degree(parse_spec("or:2"), EPS)
    adeg_ref = oracles.adeg_oracle(oracles.as_func(parse_spec("or:2")), 2, EPS)
    ok = (
        got_or == want_or == {k: b_or[k] for k in keys}
        and got_maj == want_maj == {k: b_maj[k] for k in want_maj}
        and adeg == adeg_ref == 1
    )
    return ok, f"or:3 {got_or}; maj:3 {got_maj}; adeg(or:2, 1/3)={adeg}; brute-force oracles agree: {ok}"


def telemetry():
    bs_adeg = max(sweep(n)[0].max_ratios["bs/adeg^2"] for n in (1, 2, 3, 4))
    d_ratio = max(sweep(n)[0].max_ratios["D/((bs+1)*ndeg)"] for n in (1, 2, 3, 4))
    ok = d_ratio <= 1
    return ok, f"max bs/adeg^2 = {bs_adeg} (reported only), max D/((bs+1)*ndeg) = {d_ratio} (must be <= 1)"


CRITERIA = [
    ("depth-bound-exhaustive-n4", depth_bound_n4),
    ("derandomizer-soundness", derandomizer_soundness),
    ("maxonomial-witness-search", maxonomial_witness_search),
    ("minimal-block-lemmas", minimal_block_lemmas),
    ("degree-hierarchy", degree_hierarchy),
    ("amplifier-zero-error", amplifier_contract),
    ("repetition-formula", repetition_formula),
    ("spot-values", spot_values),
    ("telemetry", telemetry),
]


@pytest.mark.slow
@pytest.mark.parametrize("name,check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, check):
    ok, detail = check()
    assert record(name, ok, detail), detail


if __name__ == "__main__":
    failed = 0
    for name, check in CRITERIA:
        ok, detail = check()
        record(name, ok, detail)
        print(RESULTS[-1], flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
