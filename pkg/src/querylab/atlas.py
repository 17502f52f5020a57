"""Exhaustive atlas of small functions and the inequality verifier.

Every function on ``n <= 4`` variables is analysed exactly.  The inequalities
that carry no hidden constant are asserted; the asymptotic ones are reported
as the largest ratio observed.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator

import numpy as np

from .boolfn import TruthTable
from .derandomize import block_sensitivity_decrease, exhausted_paths_are_ones, extract_tree_report
from .measures import (
    ADEG_CAP,
    DEFAULT_EPSILON,
    EXHAUSTIVE_CAP,
    REPORT_FIELDS,
    _minimal_blocks,
    approximate_degree,
    block_sensitivity,
    construct_ndeg_witness,
    is_nondeterministic_witness,
    measure_report,
)
from .trees import depth, tree_table

log = logging.getLogger(__name__)

FULL_ENUMERATION_CAP = 4

ROW_FIELDS = REPORT_FIELDS + (
    "tree_depth",
    "min_side_depth",
    "bs1_ndeg",
    "ratio_bs_over_adeg2",
    "ratio_D_over_bsndeg",
)

RATIO_BS_ADEG = "bs/adeg^2"
RATIO_D_BSNDEG = "D/((bs+1)*ndeg)"


def _ratio(num: int, den: int) -> Fraction:
    # 0/0 only occurs for constant functions; report it as 0
    return Fraction(num, den) if den else Fraction(0)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


# ---------------------------------------------------------------------------
# symmetry cache for approximate degree


def _symmetry_maps(n: int) -> list[tuple[int, ...]]:
    """Index maps for every variable permutation combined with every input negation."""
    maps = []
    for perm in permutations(range(n)):
        for neg in range(1 << n):
            m = []
            for y in range(1 << n):
                x = 0
                for j in range(n):
                    if (y >> perm[j]) & 1:
                        x |= 1 << j
                m.append(x ^ neg)
            maps.append(tuple(m))
    return maps


class ApproxDegreeCache:
    """Approximate degree shared across each orbit of the symmetry group.

    The group permutes variables, negates inputs and negates the output; all
    three preserve the approximate degree (substituting ``1 - x_i`` or taking
    ``1 - p`` keeps both degree and error), so one LP per orbit suffices.
    """

    def __init__(self, n: int, epsilon=DEFAULT_EPSILON):
        self.n = n
        self.epsilon = Fraction(epsilon)
        self.maps = _symmetry_maps(n)
        self.values: dict[int, int] = {}
        self.solved = 0
        self.full = (1 << (1 << n)) - 1

    def __call__(self, f: TruthTable) -> int:
        hit = self.values.get(f.table)
        if hit is not None:
            return hit
        value = approximate_degree(f, self.epsilon)
        self.solved += 1
        t = f.table
        for m in self.maps:
            img = 0
            for y, x in enumerate(m):
                if (t >> x) & 1:
                    img |= 1 << y
            self.values[img] = value
            self.values[img ^ self.full] = value
        return value


# ---------------------------------------------------------------------------
# per-function analysis


@dataclass(frozen=True)
class Violation:
    spec: str
    inequality: str
    values: dict


@dataclass
class Analysis:
    row: dict
    violations: list[Violation]


def analyze(f: TruthTable, epsilon=DEFAULT_EPSILON, adeg: int | None = None) -> Analysis:
    """Measures, derived columns and every constant-free check for one function."""
    rep = measure_report(f, epsilon, adeg=adeg)
    spec = rep.spec
    bad: list[Violation] = []

    def fail(name: str, **values) -> None:
        bad.append(Violation(spec, name, values))

    for name in rep.check():
        lo, hi = name.split("<=")
        fail(name, **{k: getattr(rep, k) for k in (lo, hi)})
    bound = (rep.bs + 1) * rep.ndeg
    if rep.d > bound:
        fail("D<=(bs+1)*ndeg", D=rep.d, bs=rep.bs, ndeg=rep.ndeg)

    cap = rep.n ** rep.bs
    for x in range(f.size):
        blocks = _minimal_blocks(f.n, f.table, x)
        big = [b for b in blocks if bin(b).count("1") > rep.s]
        if big:
            fail("|B|<=s", x=x, sizes=[bin(b).count("1") for b in big], s=rep.s)
        if len(blocks) > cap:
            fail("#blocks<=N^bs", x=x, count=len(blocks), bound=cap)

    q = construct_ndeg_witness(f, rep.ndeg)
    if q.degree != rep.ndeg or not is_nondeterministic_witness(q, f):
        fail("ndeg-witness", degree=q.degree, ndeg=rep.ndeg)
    ex = extract_tree_report(q, rep.bs)
    tdepth = depth(ex.tree)
    if tree_table(ex.tree, f.n) != f:
        fail("tree-agrees")
    if tdepth > bound:
        fail("tree-depth<=(bs+1)*ndeg", depth=tdepth, bound=bound)
    if not exhausted_paths_are_ones(f, ex):
        fail("give-up-only-on-ones")
    for v in block_sensitivity_decrease(f, q, rep.bs):
        fail("bs-decrease", w=v.w, step=v.step, before=v.before, after=v.after)

    row = rep.to_dict()
    row.update(
        tree_depth=tdepth,
        min_side_depth=None,
        bs1_ndeg=bound,
        ratio_bs_over_adeg2=None if rep.adeg is None else _ratio(rep.bs, rep.adeg**2),
        ratio_D_over_bsndeg=_ratio(rep.d, bound),
    )
    return Analysis(row, bad)


def _complement_depth(f: TruthTable) -> int:
    g = TruthTable(f.n, f.table ^ f.full_mask)
    q = construct_ndeg_witness(g)
    return depth(extract_tree_report(q, block_sensitivity(g)).tree)


# ---------------------------------------------------------------------------
# enumeration


def _tables(n: int, sample: int | None, seed: int) -> list[int]:
    if sample is None:
        if n > FULL_ENUMERATION_CAP:
            raise ValueError(f"full enumeration supports n <= {FULL_ENUMERATION_CAP}; use sampling")
        return list(range(1 << (1 << n)))
    if n > EXHAUSTIVE_CAP:
        raise ValueError(f"sampling supports n <= {EXHAUSTIVE_CAP}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    size = 1 << n
    words = rng.integers(0, 1 << 32, size=(sample, (size + 31) // 32), dtype=np.uint64)
    out = []
    for row in words:
        t = 0
        for k, w in enumerate(row):
            t |= int(w) << (32 * k)
        out.append(t & ((1 << size) - 1))
    return out


def _analyze_chunk(args) -> list[Analysis]:
    n, tables, epsilon = args
    cache = ApproxDegreeCache(n, epsilon) if n <= ADEG_CAP else None
    out = []
    for t in tables:
        f = TruthTable(n, t)
        out.append(analyze(f, epsilon, adeg=cache(f) if cache else None))
    return out


def _analyses(n: int, tables: list[int], epsilon, jobs: int) -> Iterator[Analysis]:
    if jobs <= 1:
        cache = ApproxDegreeCache(n, epsilon) if n <= ADEG_CAP else None
        for k, t in enumerate(tables):
            f = TruthTable(n, t)
            yield analyze(f, epsilon, adeg=cache(f) if cache else None)
            if k and k % 4096 == 0:
                log.info("n=%d: analysed %d/%d functions", n, k, len(tables))
        return
    step = max(1, len(tables) // (jobs * 8))
    chunks = [(n, tables[i:i + step], epsilon) for i in range(0, len(tables), step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_analyze_chunk, chunks):
            yield from part


def atlas(
    n: int,
    sample: int | None = None,
    seed: int = 0,
    epsilon=DEFAULT_EPSILON,
    jobs: int = 1,
) -> list[Analysis]:
    """Analyse every function on ``n`` variables (or a seeded uniform sample).

    Full enumeration is in ascending table order.  ``min_side_depth`` is the
    shallower of the direct tree and the complement's leaf-flipped tree.
    """
    tables = _tables(n, sample, seed)
    results = list(_analyses(n, tables, Fraction(epsilon), jobs))
    if sample is None:
        full = (1 << (1 << n)) - 1
        depths = [a.row["tree_depth"] for a in results]
        for t, a in enumerate(results):
            a.row["min_side_depth"] = min(depths[t], depths[t ^ full])
    else:
        for t, a in zip(tables, results):
            a.row["min_side_depth"] = min(a.row["tree_depth"], _complement_depth(TruthTable(n, t)))
    return results


def write_csv(rows: Iterable[dict], out: io.TextIOBase) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow([fmt(r[k]) for k in ROW_FIELDS])


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyResult:
    n: int
    functions_checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    max_ratios: dict[str, Fraction] = field(default_factory=dict)
    adeg_orbits_solved: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def update(self, analysis: Analysis) -> None:
        """Fold one function in; ratio maxima only ever grow."""
        self.functions_checked += 1
        self.violations.extend(analysis.violations)
        row = analysis.row
        for key, col in ((RATIO_BS_ADEG, "ratio_bs_over_adeg2"), (RATIO_D_BSNDEG, "ratio_D_over_bsndeg")):
            v = row[col]
            if v is not None and (key not in self.max_ratios or v > self.max_ratios[key]):
                self.max_ratios[key] = v

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "functions_checked": self.functions_checked,
            "violations": [
                {"spec": v.spec, "inequality": v.inequality, "values": v.values} for v in self.violations
            ],
            "max_ratios": {k: fmt(v) for k, v in self.max_ratios.items()},
            "ok": self.ok,
        }


def verify(n: int, epsilon=DEFAULT_EPSILON, jobs: int = 1) -> VerifyResult:
    """Check every constant-free inequality on all functions of ``n`` variables."""
    if not 1 <= n <= FULL_ENUMERATION_CAP:
        raise ValueError(f"verify enumerates all functions and supports 1 <= n <= {FULL_ENUMERATION_CAP}")
    result = VerifyResult(n)
    for a in atlas(n, epsilon=epsilon, jobs=jobs):
        result.update(a)
    return result
