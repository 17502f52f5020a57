"""Naive reference implementations used to cross-check the library.

Everything here works on plain Python callables over bit tuples and avoids
the library's bitmask machinery, caches and solvers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import numpy as np
import sympy
from scipy.optimize import linprog


def inputs(n):
    # x1 first, matching the bitstring convention
    return [tuple(b) for b in product((0, 1), repeat=n)]


def as_func(f):
    """Library TruthTable -> dict from bit tuples to values."""
    out = {}
    for x in inputs(f.n):
        idx = sum(b << i for i, b in enumerate(x))
        out[x] = (f.table >> idx) & 1
    return out


def flip(x, block):
    return tuple(1 - b if i + 1 in block else b for i, b in enumerate(x))


def d_oracle(fd, n):
    def go(fixed):
        vals = {v for x, v in fd.items() if all(x[i - 1] == b for i, b in fixed.items())}
        if len(vals) <= 1:
            return 0
        free = [i for i in range(1, n + 1) if i not in fixed]
        return 1 + min(max(go({**fixed, i: 0}), go({**fixed, i: 1})) for i in free)

    return go({})


def s_oracle(fd, n):
    return max(sum(fd[flip(x, {i})] != fd[x] for i in range(1, n + 1)) for x in fd)


def sensitive_blocks(fd, n, x):
    return [set(B) for k in range(1, n + 1) for B in combinations(range(1, n + 1), k) if fd[flip(x, set(B))] != fd[x]]


def minimal_blocks_oracle(fd, n, x):
    blocks = sensitive_blocks(fd, n, x)
    return [B for B in blocks if not any(C < B for C in blocks)]


def bs_oracle(fd, n):
    best = 0
    for x in fd:
        blocks = sensitive_blocks(fd, n, x)

        def pack(used, start):
            top = 0
            for j in range(start, len(blocks)):
                if not (blocks[j] & used):
                    top = max(top, 1 + pack(used | blocks[j], j + 1))
            return top

        best = max(best, pack(set(), 0))
    return best


def certificate_oracle(fd, n):
    c = {0: 0, 1: 0}
    for x, v in fd.items():
        for k in range(n + 1):
            if any(
                all(fd[y] == v for y in fd if all(y[i - 1] == x[i - 1] for i in S))
                for S in combinations(range(1, n + 1), k)
            ):
                c[v] = max(c[v], k)
                break
    return c[0], c[1]


def poly_oracle(fd, n):
    """Exact polynomial by solving the interpolation system with sympy."""
    monos = [S for k in range(n + 1) for S in combinations(range(1, n + 1), k)]
    xs = inputs(n)
    A = sympy.Matrix([[int(all(x[i - 1] for i in S)) for S in monos] for x in xs])
    b = sympy.Matrix([fd[x] for x in xs])
    sol = A.LUsolve(b)
    return {S: Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for S, c in zip(monos, sol) if c != 0}


def deg_oracle(fd, n):
    return max((len(S) for S in poly_oracle(fd, n)), default=0)


def ndeg_oracle(fd, n):
    """Smallest d such that some degree-d polynomial has zero set exactly f^{-1}(0).

    The polynomials vanishing on the zeros form the nullspace of the zero
    rows; a generic member is nonzero on every one-input unless some one-row
    annihilates that whole nullspace.
    """
    if all(v == 0 for v in fd.values()):
        return 0
    for d in range(n + 1):
        monos = [S for k in range(d + 1) for S in combinations(range(1, n + 1), k)]
        row = lambda x: [int(all(x[i - 1] for i in S)) for S in monos]
        zeros = [row(x) for x, v in fd.items() if v == 0]
        ones = [row(x) for x, v in fd.items() if v == 1]
        basis = sympy.Matrix(zeros).nullspace() if zeros else [sympy.eye(len(monos))[:, j] for j in range(len(monos))]
        if not basis:
            continue
        N = sympy.Matrix.hstack(*basis)
        if all(any(e != 0 for e in (sympy.Matrix([r]) * N)) for r in ones):
            return d
    raise AssertionError("degree n always works")


def adeg_float_error(fd, n, d):
    """Best uniform error of a degree-d approximation, by floating-point LP."""
    monos = [S for k in range(d + 1) for S in combinations(range(1, n + 1), k)]
    A_ub, b_ub = [], []
    for x, v in fd.items():
        r = [float(all(x[i - 1] for i in S)) for S in monos]
        A_ub.append(r + [-1.0])
        b_ub.append(float(v))
        A_ub.append([-c for c in r] + [-1.0])
        b_ub.append(-float(v))
    cost = np.zeros(len(monos) + 1)
    cost[-1] = 1
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * len(monos) + [(0, None)], method="highs")
    assert res.status == 0
    return res.fun


def adeg_oracle(fd, n, eps, tol=1e-9):
    for d in range(n + 1):
        if adeg_float_error(fd, n, d) <= float(eps) + tol:
            return d
    raise AssertionError("degree n is exact")
