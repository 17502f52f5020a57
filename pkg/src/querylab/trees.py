"""Deterministic decision trees."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .boolfn import Assignment, TruthTable, to_index


@dataclass(frozen=True)
class Leaf:
    bit: int


@dataclass(frozen=True)
class Query:
    var: int  # 1-based
    zero: "DecisionTree"
    one: "DecisionTree"


DecisionTree = Union[Leaf, Query]


def evaluate_tree(tree: DecisionTree, x: Assignment, n: int | None = None) -> int:
    xi = to_index(x, n)
    while isinstance(tree, Query):
        tree = tree.one if (xi >> (tree.var - 1)) & 1 else tree.zero
    return tree.bit


def run_tree(tree: DecisionTree, oracle: Callable[[int], int]) -> tuple[int, list[int]]:
    """Walk ``tree`` asking ``oracle(var)``; returns the output and the variables queried."""
    asked = []
    while isinstance(tree, Query):
        asked.append(tree.var)
        tree = tree.one if oracle(tree.var) else tree.zero
    return tree.bit, asked


def path_on(tree: DecisionTree, x: int) -> tuple[int, int]:
    """Output and queried-variable mask of ``tree`` on assignment index ``x``."""
    mask = 0
    while isinstance(tree, Query):
        b = 1 << (tree.var - 1)
        mask |= b
        tree = tree.one if x & b else tree.zero
    return tree.bit, mask


def depth(tree: DecisionTree) -> int:
    memo: dict[int, int] = {}

    def go(t: DecisionTree) -> int:
        if isinstance(t, Leaf):
            return 0
        key = id(t)
        if key not in memo:
            memo[key] = 1 + max(go(t.zero), go(t.one))
        return memo[key]

    return go(tree)


def flip_leaves(tree: DecisionTree) -> DecisionTree:
    """Negate every leaf; the tree then computes the complement function."""
    memo: dict[int, DecisionTree] = {}

    def go(t: DecisionTree) -> DecisionTree:
        key = id(t)
        if key not in memo:
            if isinstance(t, Leaf):
                memo[key] = Leaf(1 - t.bit)
            else:
                memo[key] = Query(t.var, go(t.zero), go(t.one))
        return memo[key]

    return go(tree)


def tree_table(tree: DecisionTree, n: int) -> TruthTable:
    """Truth table computed by ``tree`` on ``n`` variables."""
    table = 0
    for x in range(1 << n):
        if evaluate_tree(tree, x):
            table |= 1 << x
    return TruthTable(n, table)


def repeats_variable(tree: DecisionTree) -> bool:
    """True if some root-to-leaf path queries a variable twice."""

    def go(t: DecisionTree, seen: int) -> bool:
        if isinstance(t, Leaf):
            return False
        b = 1 << (t.var - 1)
        if seen & b:
            return True
        return go(t.zero, seen | b) or go(t.one, seen | b)

    return go(tree, 0)


def tree_to_json(tree: DecisionTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": tree.bit}
    return {"q": tree.var, "0": tree_to_json(tree.zero), "1": tree_to_json(tree.one)}


def tree_from_json(obj: dict) -> DecisionTree:
    if "leaf" in obj:
        if obj["leaf"] not in (0, 1):
            raise ValueError("leaf must be 0 or 1")
        return Leaf(obj["leaf"])
    return Query(int(obj["q"]), tree_from_json(obj["0"]), tree_from_json(obj["1"]))


def full_read_tree(f: TruthTable) -> DecisionTree:
    """Query ``x1..xn`` in order, then output ``f``."""

    def go(j: int, x: int) -> DecisionTree:
        if j == f.n:
            return Leaf((f.table >> x) & 1)
        return Query(j + 1, go(j + 1, x), go(j + 1, x | (1 << j)))

    return go(0, 0)
