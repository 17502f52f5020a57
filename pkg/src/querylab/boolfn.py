"""Total Boolean functions, partial assignments and multilinear polynomials.

Conventions used throughout the package:

* Variables are 1-indexed (``x1 .. xn``).  Internally a set of variables is a
  bitmask where bit ``i - 1`` stands for ``x_i``.
* A full assignment is an integer index ``0 <= x < 2**n`` with ``x1`` as the
  least significant bit.  Bit strings such as ``"110"`` list ``x1`` first, so
  ``"110"`` is the index ``0b011 = 3``.
* A truth table stores ``f`` as one Python integer whose bit ``i`` is the value
  of ``f`` at assignment index ``i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

MAX_VARS = 16

Assignment = Union[int, str, Sequence[int]]


class SpecError(ValueError):
    """Malformed or unsupported function specification."""


# ---------------------------------------------------------------------------
# bitmask helpers


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_to_vars(mask: int) -> tuple[int, ...]:
    """Sorted 1-based variable indices contained in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def vars_to_mask(variables: Iterable[int], n: int | None = None) -> int:
    mask = 0
    for v in variables:
        if v < 1 or (n is not None and v > n):
            raise ValueError(f"variable index {v} out of range 1..{n}")
        mask |= 1 << (v - 1)
    return mask


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def subset_order_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Order by size, then lexicographically on the sorted index list."""
    return popcount(mask), mask_to_vars(mask)


@lru_cache(maxsize=None)
def masks_in_subset_order(n: int) -> tuple[int, ...]:
    """Every nonempty subset of ``{1..n}`` in (size, lexicographic) order."""
    return tuple(sorted(range(1, 1 << n), key=subset_order_key))


def to_index(x: Assignment, n: int | None = None) -> int:
    """Normalise a full assignment to its integer index.

    Accepts an integer index, a bit string listing ``x1`` first, or a
    sequence of 0/1 values in the same order.
    """
    if isinstance(x, PartialAssignment):
        if x.n != n and n is not None:
            raise ValueError("assignment has the wrong number of variables")
        if x.mask != (1 << x.n) - 1:
            raise ValueError("partial assignment given where a full one is required")
        return x.values
    if isinstance(x, int):
        if n is not None and not 0 <= x < (1 << n):
            raise ValueError(f"assignment index {x} out of range for n={n}")
        return x
    bits = [int(c) for c in x] if isinstance(x, str) else [int(b) for b in x]
    if n is not None and len(bits) != n:
        raise ValueError(f"expected a full assignment of {n} bits, got {len(bits)}")
    idx = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"assignment bits must be 0/1, got {b!r}")
        idx |= b << j
    return idx


def format_assignment(x: int, n: int) -> str:
    """Bit string of index ``x`` with ``x1`` first."""
    return "".join(str((x >> j) & 1) for j in range(n))


# ---------------------------------------------------------------------------
# truth tables


@dataclass(frozen=True)
class TruthTable:
    """A total Boolean function on ``n`` variables.

    ``table`` packs the 2**n output bits into one integer (bit ``i`` is
    ``f`` at assignment index ``i``).
    """

    n: int
    table: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VARS:
            raise ValueError(f"n must be in 0..{MAX_VARS}, got {self.n}")
        if not 0 <= self.table < (1 << (1 << self.n)):
            raise ValueError("table has bits outside the 2**n range")

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> "TruthTable":
        vals = [int(b) for b in bits]
        size = len(vals)
        n = size.bit_length() - 1
        if size == 0 or (1 << n) != size:
            raise ValueError(f"bit sequence length {size} is not a power of two")
        table = 0
        for i, b in enumerate(vals):
            if b not in (0, 1):
                raise ValueError(f"table bits must be 0/1, got {b!r}")
            table |= b << i
        return cls(n, table)

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        """Tabulate ``fn(bits)`` where ``bits[j]`` is the value of ``x_{j+1}``."""
        table = 0
        for i in range(1 << n):
            if fn(tuple((i >> j) & 1 for j in range(n))):
                table |= 1 << i
        return cls(n, table)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.table >> i) & 1 for i in range(self.size))

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)

    def is_constant(self) -> bool:
        return self.table == 0 or self.table == self.full_mask

    def __call__(self, x: Assignment) -> int:
        return evaluate(self, x)

    def ones(self) -> list[int]:
        return [i for i in range(self.size) if (self.table >> i) & 1]

    def zeros(self) -> list[int]:
        return [i for i in range(self.size) if not (self.table >> i) & 1]

    def __str__(self) -> str:
        return f"tt:{self.n}:{self.bitstring}"


def evaluate(f: TruthTable, x: Assignment) -> int:
    return (f.table >> to_index(x, f.n)) & 1


def complement(f: TruthTable) -> TruthTable:
    return TruthTable(f.n, f.table ^ f.full_mask)


def flip_block(x: Assignment, block: "Block | int | Iterable[int]", n: int | None = None):
    """Return ``x`` with every variable in ``block`` negated.

    The result has the same form as ``x`` (index, bit string or tuple).
    """
    if n is None:
        if isinstance(x, int):
            raise ValueError("n is required when x is an integer index")
        n = len(x)
    mask = _block_mask(block)
    if mask >> n:
        raise ValueError(f"block {mask_to_vars(mask)} has indices outside 1..{n}")
    y = to_index(x, n) ^ mask
    if isinstance(x, int):
        return y
    if isinstance(x, str):
        return format_assignment(y, n)
    return tuple((y >> j) & 1 for j in range(n))


def _block_mask(block) -> int:
    if isinstance(block, Block):
        return block.mask
    if isinstance(block, int):
        return block
    return vars_to_mask(block)


@lru_cache(maxsize=4096)
def free_positions(n: int, fixed_mask: int) -> tuple[int, ...]:
    """Indices (with fixed variables zeroed) of the subcube over the free variables.

    Entry ``y`` is the full index whose free variables, taken in increasing
    order, spell ``y``.
    """
    free = [j for j in range(n) if not (fixed_mask >> j) & 1]
    out = []
    for y in range(1 << len(free)):
        idx = 0
        for k, j in enumerate(free):
            if (y >> k) & 1:
                idx |= 1 << j
        out.append(idx)
    return tuple(out)


def restrict_table(table: int, n: int, fixed_mask: int, values: int) -> tuple[int, int]:
    """Restrict a packed table; returns ``(k, subtable)`` over the free variables."""
    positions = free_positions(n, fixed_mask)
    values &= fixed_mask
    sub = 0
    for y, idx in enumerate(positions):
        if (table >> (idx | values)) & 1:
            sub |= 1 << y
    return n - popcount(fixed_mask), sub


def restrict(f: TruthTable, a: "PartialAssignment") -> TruthTable:
    """Subfunction on the free variables, renumbered in increasing original order."""
    if a.n != f.n:
        raise ValueError("assignment and function disagree on n")
    k, sub = restrict_table(f.table, f.n, a.mask, a.values)
    return TruthTable(k, sub)


@lru_cache(maxsize=None)
def cube_mask(n: int, fixed_mask: int, values: int) -> int:
    """Packed-table mask of all inputs agreeing with ``values`` on ``fixed_mask``."""
    m = 0
    values &= fixed_mask
    for idx in free_positions(n, fixed_mask):
        m |= 1 << (idx | values)
    return m


def constant_on(f: TruthTable, a: "PartialAssignment") -> int | None:
    """Value of ``f`` if it is constant on the subcube of ``a``, else ``None``."""
    m = cube_mask(f.n, a.mask, a.values)
    hit = f.table & m
    if hit == 0:
        return 0
    if hit == m:
        return 1
    return None


def permute_variables(f: TruthTable, perm: Sequence[int]) -> TruthTable:
    """Relabel variables: the result's ``x_{perm[j]}`` plays the role of ``x_{j+1}``.

    ``perm`` is a permutation of ``1..n``.
    """
    n = f.n
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError("perm must be a permutation of 1..n")
    table = 0
    for y in range(1 << n):
        x = 0
        for j in range(n):
            if (y >> (perm[j] - 1)) & 1:
                x |= 1 << j
        if (f.table >> x) & 1:
            table |= 1 << y
    return TruthTable(n, table)


# ---------------------------------------------------------------------------
# partial assignments and blocks


@dataclass(frozen=True)
class PartialAssignment:
    """Values for a subset of the variables (bitmask ``mask``)."""

    n: int
    mask: int = 0
    values: int = 0

    def __post_init__(self):
        if self.mask >> self.n:
            raise ValueError(f"fixed variables outside 1..{self.n}")
        if self.values & ~self.mask:
            raise ValueError("values set on variables that are not fixed")

    @classmethod
    def from_dict(cls, n: int, assignment: Mapping[int, int]) -> "PartialAssignment":
        mask = values = 0
        for var, bit in assignment.items():
            if not 1 <= var <= n:
                raise ValueError(f"variable index {var} out of range 1..{n}")
            if bit not in (0, 1):
                raise ValueError(f"value for x{var} must be 0/1")
            mask |= 1 << (var - 1)
            values |= bit << (var - 1)
        return cls(n, mask, values)

    @classmethod
    def full(cls, n: int, x: Assignment) -> "PartialAssignment":
        return cls(n, (1 << n) - 1, to_index(x, n))

    @property
    def fixed(self) -> tuple[int, ...]:
        return mask_to_vars(self.mask)

    def value(self, var: int) -> int:
        if not (self.mask >> (var - 1)) & 1:
            raise KeyError(var)
        return (self.values >> (var - 1)) & 1

    def as_dict(self) -> dict[int, int]:
        return {v: self.value(v) for v in self.fixed}

    def extend(self, var: int, bit: int) -> "PartialAssignment":
        b = 1 << (var - 1)
        return PartialAssignment(self.n, self.mask | b, (self.values & ~b) | (bit << (var - 1)))

    def is_full(self) -> bool:
        return self.mask == (1 << self.n) - 1

    def compatible(self, x: Assignment) -> bool:
        return (to_index(x, self.n) & self.mask) == self.values


@dataclass(frozen=True, order=True)
class Block:
    """A nonempty set of variables, stored as a bitmask."""

    mask: int

    def __post_init__(self):
        if self.mask <= 0:
            raise ValueError("a block must be nonempty")

    @classmethod
    def of(cls, *variables: int) -> "Block":
        return cls(vars_to_mask(variables))

    @property
    def members(self) -> tuple[int, ...]:
        return mask_to_vars(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


# ---------------------------------------------------------------------------
# multilinear polynomials


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    """Exact-rational multilinear polynomial; ``terms`` maps a variable mask to its coefficient."""

    n: int
    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, c in self.terms.items():
            if s >> self.n:
                raise ValueError(f"monomial {mask_to_vars(s)} uses variables beyond x{self.n}")
            c = Fraction(c)
            if c:
                clean[s] = c
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    @property
    def degree(self) -> int:
        return max((popcount(s) for s in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(s == 0 for s in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    def __call__(self, x: Assignment) -> Fraction:
        return poly_evaluate(self, x)

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, 0) + c
        return MultilinearPoly(max(self.n, other.n), terms)

    def scale(self, k) -> "MultilinearPoly":
        return MultilinearPoly(self.n, {s: c * k for s, c in self.terms.items()})

    def sorted_terms(self) -> list[tuple[int, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: subset_order_key(t[0]))

    def to_records(self) -> list[dict]:
        """Serialisable form: records sorted by degree, then lexicographic subset."""
        return [
            {"vars": list(mask_to_vars(s)), "coef": f"{c.numerator}/{c.denominator}"}
            for s, c in self.sorted_terms()
        ]

    @classmethod
    def from_records(cls, n: int, records: Iterable[Mapping]) -> "MultilinearPoly":
        return cls(n, {vars_to_mask(r["vars"], n): Fraction(r["coef"]) for r in records})

    def compress(self, fixed_mask: int) -> "MultilinearPoly":
        """Renumber onto the free variables in increasing order (terms must avoid ``fixed_mask``)."""
        free = [j for j in range(self.n) if not (fixed_mask >> j) & 1]
        where = {j: k for k, j in enumerate(free)}
        terms = {}
        for s, c in self.terms.items():
            if s & fixed_mask:
                raise ValueError("term depends on a fixed variable")
            t = 0
            for j in range(self.n):
                if (s >> j) & 1:
                    t |= 1 << where[j]
            terms[t] = c
        return MultilinearPoly(len(free), terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s, c in self.sorted_terms():
            mono = "*".join(f"x{v}" for v in mask_to_vars(s))
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def mobius_coefficients(table: int, n: int) -> list[int]:
    """Integer coefficients of the multilinear form, indexed by variable mask."""
    a = [(table >> i) & 1 for i in range(1 << n)]
    for j in range(n):
        bit = 1 << j
        for s in range(1 << n):
            if s & bit:
                a[s] -= a[s ^ bit]
    return a


def to_polynomial(f: TruthTable) -> MultilinearPoly:
    coefs = mobius_coefficients(f.table, f.n)
    return MultilinearPoly(f.n, {s: Fraction(c) for s, c in enumerate(coefs) if c})


def poly_evaluate(p: MultilinearPoly, x: Assignment) -> Fraction:
    xi = to_index(x, p.n)
    total = Fraction(0)
    for s, c in p.terms.items():
        if s & xi == s:
            total += c
    return total


def poly_restrict(p: MultilinearPoly, a: PartialAssignment) -> MultilinearPoly:
    """Substitute the fixed values; the result keeps the original variable numbering."""
    if a.n != p.n:
        raise ValueError("assignment and polynomial disagree on n")
    terms: dict[int, Fraction] = {}
    zeros = a.mask & ~a.values
    for s, c in p.terms.items():
        if s & zeros:
            continue
        t = s & ~a.mask
        terms[t] = terms.get(t, 0) + c
    return MultilinearPoly(p.n, terms)


# ---------------------------------------------------------------------------
# named families and the spec grammar


def or_fn(n: int) -> TruthTable:
    return TruthTable(n, ((1 << (1 << n)) - 1) & ~1)


def and_fn(n: int) -> TruthTable:
    return TruthTable(n, 1 << ((1 << n) - 1))


def parity_fn(n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda b: sum(b) % 2)


def majority_fn(n: int) -> TruthTable:
    if n % 2 == 0:
        raise SpecError("majority needs an odd number of variables")
    return TruthTable.from_function(n, lambda b: 2 * sum(b) > n)


def dictator_fn(n: int, i: int) -> TruthTable:
    if not 1 <= i <= n:
        raise SpecError(f"dictator variable {i} out of range 1..{n}")
    return TruthTable.from_function(n, lambda b: b[i - 1])


def nand_tree_fn(depth: int) -> TruthTable:
    """Complete binary NAND tree of the given depth over ``2**depth`` leaves."""

    def value(bits):
        layer = list(bits)
        while len(layer) > 1:
            layer = [1 - (layer[k] & layer[k + 1]) for k in range(0, len(layer), 2)]
        return layer[0]

    return TruthTable.from_function(1 << depth, value)


def address_fn(k: int) -> TruthTable:
    """Addressing function: ``x1..xk`` (x1 least significant) select one of ``2**k`` data bits."""

    def value(bits):
        addr = sum(bits[j] << j for j in range(k))
        return bits[k + addr]

    return TruthTable.from_function(k + (1 << k), value)


_SPEC_RE = re.compile(r"^([a-z]+)((?::[0-9A-Fa-f]+)*)$")


def _int_field(text: str, what: str) -> int:
    if not text.isdigit():
        raise SpecError(f"{what} must be a nonnegative integer, got {text!r}")
    return int(text)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_VARS:
        raise SpecError(f"n={n} outside the supported range 1..{MAX_VARS}")


def parse_spec(text: str) -> TruthTable:
    """Parse a function spec such as ``or:3``, ``tt:2:0110`` or ``addr:2``."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise SpecError(f"malformed function spec {text!r}")
    kind = m.group(1)
    args = [a for a in m.group(2).split(":") if a]

    def arity(count: int) -> None:
        if len(args) != count:
            raise SpecError(f"{kind!r} takes {count} argument(s), got {len(args)}")

    if kind in ("tt", "hex"):
        arity(2)
        n = _int_field(args[0], "n")
        _check_n(n)
        body = args[1]
        if kind == "hex":
            if n < 2:
                raise SpecError("hex tables need n >= 2")
            if len(body) != (1 << n) // 4:
                raise SpecError(f"hex table for n={n} needs {(1 << n) // 4} digits, got {len(body)}")
            body = "".join(format(int(d, 16), "04b") for d in body)
        if len(body) != 1 << n:
            raise SpecError(f"bit string length {len(body)} != 2**{n}")
        if set(body) - {"0", "1"}:
            raise SpecError("truth table must contain only 0/1")
        return TruthTable.from_bits(body)
    if kind in ("or", "and", "parity", "maj"):
        arity(1)
        n = _int_field(args[0], "n")
        _check_n(n)
        return {"or": or_fn, "and": and_fn, "parity": parity_fn, "maj": majority_fn}[kind](n)
    if kind == "dict":
        arity(2)
        n = _int_field(args[0], "n")
        _check_n(n)
        return dictator_fn(n, _int_field(args[1], "i"))
    if kind == "nandtree":
        arity(1)
        d = _int_field(args[0], "depth")
        _check_n(1 << d)
        return nand_tree_fn(d)
    if kind == "addr":
        arity(1)
        k = _int_field(args[0], "k")
        if k < 1:
            raise SpecError("addr needs k >= 1")
        _check_n(k + (1 << k))
        return address_fn(k)
    raise SpecError(f"unknown function family {kind!r}")
