"""Truth-table Boolean functions and the combinatorial measures used on them.

Bit order is little-endian in the variable index: entry ``k`` of a table is the
value at the input whose variable ``i`` (0-based) equals bit ``i`` of ``k``.
Inputs are accepted either as that integer index ("mask") or as a sequence of
bits with variable 0 first.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_ARITY = 26
BLOCK_SENSITIVITY_CAP = 10

STAR = None


class ArityError(ValueError):
    """Raised when an operation is asked to work beyond its documented cap."""


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"not a bit: {b!r}")
        idx |= b << i
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def bitstring(index: int, n: int) -> str:
    """Render an input as a string with variable 0 leftmost."""
    return "".join(str((index >> i) & 1) for i in range(n))


def parse_bitstring(text: str) -> int:
    return bits_to_index([int(c) for c in text.strip()])


def _as_index(a: int | Sequence[int], n: int) -> int:
    if isinstance(a, (int, np.integer)):
        a = int(a)
        if not 0 <= a < (1 << n):
            raise ValueError(f"input index {a} out of range for arity {n}")
        return a
    if len(a) != n:
        raise ValueError(f"input has length {len(a)}, expected {n}")
    return bits_to_index(a)


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    arity: int
    table: np.ndarray

    def __post_init__(self):
        if not 0 <= self.arity <= MAX_ARITY:
            raise ArityError(f"arity {self.arity} outside [0, {MAX_ARITY}]")
        table = np.asarray(self.table, dtype=np.uint8)
        if table.shape != (1 << self.arity,):
            raise ValueError(f"table length {table.size} != 2^{self.arity}")
        if table.size and table.max() > 1:
            raise ValueError("table entries must be bits")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[tuple[int, ...]], int]) -> "BooleanFunction":
        return cls(n, np.array([int(fn(index_to_bits(k, n))) for k in range(1 << n)], dtype=np.uint8))

    def __call__(self, a: int | Sequence[int]) -> int:
        return int(self.table[_as_index(a, self.arity)])

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.arity, self.table.tobytes()))

    def __repr__(self):
        return f"BooleanFunction(arity={self.arity}, hex={self.to_hex()})"

    @property
    def is_constant(self) -> bool:
        return bool(self.table.min() == self.table.max())

    def to_hex(self) -> str:
        value = int("".join(str(b) for b in self.table[::-1]), 2) if self.table.size else 0
        digits = max(1, -(-(1 << self.arity) // 4))
        return format(value, "x").zfill(digits)

    @classmethod
    def from_hex(cls, n: int, text: str) -> "BooleanFunction":
        value = int(text.strip(), 16)
        if value >> (1 << n):
            raise ValueError("hex string has bits beyond 2^n")
        return cls(n, np.array([(value >> k) & 1 for k in range(1 << n)], dtype=np.uint8))


def evaluate(f: BooleanFunction, a: int | Sequence[int]) -> int:
    return f(a)


def _inputs(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


# --- named families -------------------------------------------------------

def constant(n: int, value: int) -> BooleanFunction:
    return BooleanFunction(n, np.full(1 << n, value, dtype=np.uint8))


def dictator(n: int, i: int) -> BooleanFunction:
    return BooleanFunction(n, ((_inputs(n) >> i) & 1).astype(np.uint8))


def _weights(n: int) -> np.ndarray:
    x = _inputs(n)
    w = np.zeros_like(x)
    for i in range(n):
        w += (x >> i) & 1
    return w


def or_function(n: int) -> BooleanFunction:
    return BooleanFunction(n, (_inputs(n) != 0).astype(np.uint8))


def and_function(n: int) -> BooleanFunction:
    return BooleanFunction(n, (_inputs(n) == (1 << n) - 1).astype(np.uint8))


def majority(n: int) -> BooleanFunction:
    return BooleanFunction(n, (2 * _weights(n) > n).astype(np.uint8))


def parity(n: int) -> BooleanFunction:
    return BooleanFunction(n, (_weights(n) & 1).astype(np.uint8))


def addressing_variable(r: int, address: int) -> int:
    """Index of the addressed variable selected by ``address`` in Addr_r.

    Variables ``0..r-1`` are the addressing bits (bit 0 least significant);
    variable ``r + address`` is the addressed bit for that address.
    """
    return r + address


def addressing_function(r: int) -> BooleanFunction:
    n = r + (1 << r)
    if n > MAX_ARITY:
        raise ArityError(f"Addr_{r} has {n} variables, cap is {MAX_ARITY}")
    x = _inputs(n)
    address = x & ((1 << r) - 1)
    return BooleanFunction(n, ((x >> (r + address)) & 1).astype(np.uint8))


_FAMILIES = {
    "OR": or_function,
    "AND": and_function,
    "MAJ": majority,
    "XOR": parity,
    "ADDR": addressing_function,
}


def parse_function(spec: str) -> BooleanFunction:
    """Parse ``OR:<n>``, ``AND:<n>``, ``MAJ:<n>``, ``XOR:<n>``, ``ADDR:<r>`` or a table file path."""
    m = re.fullmatch(r"\s*([A-Za-z]+)\s*:\s*(\d+)\s*", spec)
    if m and m.group(1).upper() in _FAMILIES:
        return _FAMILIES[m.group(1).upper()](int(m.group(2)))
    path = Path(spec)
    if path.exists():
        return read_table_file(path)
    raise ValueError(f"unrecognised function spec {spec!r}")


def read_table_file(path: str | Path) -> BooleanFunction:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError(f"{path}: expected 'n=<arity>' and a hex line")
    n = int(lines[0][2:])
    digits = max(1, -(-(1 << n) // 4))
    if len(lines[1]) != digits:
        raise ValueError(f"{path}: expected {digits} hex digits, got {len(lines[1])}")
    return BooleanFunction.from_hex(n, lines[1])


def write_table_file(f: BooleanFunction, path: str | Path) -> None:
    Path(path).write_text(f"n={f.arity}\n{f.to_hex()}\n", encoding="utf-8")


# --- transformations ------------------------------------------------------

@dataclass(frozen=True)
class Restriction:
    """A map from variables to 0, 1 or ``STAR`` (left free)."""

    values: tuple[int | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        for v in self.values:
            if v not in (0, 1, STAR):
                raise ValueError(f"restriction entry must be 0, 1 or STAR, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "Restriction":
        return cls(tuple(STAR if c == "*" else int(c) for c in text.strip()))

    def __len__(self):
        return len(self.values)

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v is STAR)

    def then(self, inner: "Restriction") -> "Restriction":
        """Merge with a restriction applied afterwards to the free variables."""
        if len(inner) != len(self.free):
            raise ValueError("inner restriction must cover exactly the free variables")
        merged = list(self.values)
        for pos, v in zip(self.free, inner.values):
            merged[pos] = v
        return Restriction(tuple(merged))

    def __str__(self):
        return "".join("*" if v is STAR else str(v) for v in self.values)


@dataclass(frozen=True)
class Projection:
    """A map ``[n] -> [m]``; variable ``i`` of the source becomes ``mapping[i]``."""

    mapping: tuple[int, ...]
    target_arity: int

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))
        for v in self.mapping:
            if not 0 <= v < self.target_arity:
                raise ValueError(f"image {v} outside [0, {self.target_arity})")

    def __len__(self):
        return len(self.mapping)

    def pull(self, y: int) -> int:
        """The source input ``y o nu`` for a target input ``y`` (both masks)."""
        return sum(((y >> v) & 1) << i for i, v in enumerate(self.mapping))

    @classmethod
    def identity(cls, n: int) -> "Projection":
        return cls(tuple(range(n)), n)

    @classmethod
    def permutation(cls, order: Sequence[int]) -> "Projection":
        """Projection sending source variable ``order[k]`` to target position ``k``."""
        mapping = [0] * len(order)
        for k, src in enumerate(order):
            mapping[src] = k
        if sorted(order) != list(range(len(order))):
            raise ValueError("not a permutation")
        return cls(tuple(mapping), len(order))


def restrict(f: BooleanFunction, rho: Restriction) -> BooleanFunction:
    n = f.arity
    if len(rho) != n:
        raise ValueError(f"restriction length {len(rho)} != arity {n}")
    if n == 0:
        return f
    cube = f.table.reshape((2,) * n)
    # axis k of the reshaped table is variable n-1-k
    index = tuple(slice(None) if rho.values[n - 1 - k] is STAR else rho.values[n - 1 - k] for k in range(n))
    sub = np.asarray(cube[index]).reshape(-1)
    return BooleanFunction(len(rho.free), sub)


def project(f: BooleanFunction, nu: Projection) -> BooleanFunction:
    if len(nu) != f.arity:
        raise ValueError(f"projection covers {len(nu)} variables, function has {f.arity}")
    m = nu.target_arity
    if m > MAX_ARITY:
        raise ArityError(f"target arity {m} exceeds cap {MAX_ARITY}")
    y = _inputs(m)
    src = np.zeros_like(y)
    for i, v in enumerate(nu.mapping):
        src |= ((y >> v) & 1) << i
    return BooleanFunction(m, f.table[src])


def xor_shift(f: BooleanFunction, y: int | Sequence[int]) -> BooleanFunction:
    mask = _as_index(y, f.arity)
    return BooleanFunction(f.arity, f.table[_inputs(f.arity) ^ mask])


def complement(f: BooleanFunction) -> BooleanFunction:
    return BooleanFunction(f.arity, 1 - f.table)


# --- measures -------------------------------------------------------------

def _flip_matrix(f: BooleanFunction) -> np.ndarray:
    """``flips[i, a]`` is true when flipping variable ``i`` at ``a`` changes ``f``."""
    x = _inputs(f.arity)
    return np.array([f.table != f.table[x ^ (1 << i)] for i in range(f.arity)], dtype=bool).reshape(f.arity, -1)


def influential_variables(f: BooleanFunction) -> frozenset[int]:
    flips = _flip_matrix(f)
    return frozenset(int(i) for i in np.flatnonzero(flips.any(axis=1)))


def is_truly_n_variate(f: BooleanFunction) -> bool:
    return len(influential_variables(f)) == f.arity


def sensitivity_at(f: BooleanFunction, a: int | Sequence[int]) -> int:
    idx = _as_index(a, f.arity)
    return sum(f.table[idx] != f.table[idx ^ (1 << i)] for i in range(f.arity))


def sensitive_coordinates(f: BooleanFunction, a: int | Sequence[int]) -> tuple[int, ...]:
    idx = _as_index(a, f.arity)
    return tuple(i for i in range(f.arity) if f.table[idx] != f.table[idx ^ (1 << i)])


def sensitivity(f: BooleanFunction) -> tuple[int, int]:
    """Return ``(s(f), a)`` with ``a`` the lowest-index input attaining it."""
    if f.arity == 0:
        return 0, 0
    counts = _flip_matrix(f).sum(axis=0)
    a = int(np.argmax(counts))
    return int(counts[a]), a


def block_sensitivity(f: BooleanFunction) -> int:
    """Exhaustive block sensitivity; exponential (about 3^n steps), capped at arity 10."""
    n = f.arity
    if n > BLOCK_SENSITIVITY_CAP:
        raise ArityError(f"block sensitivity capped at arity {BLOCK_SENSITIVITY_CAP}, got {n}")
    if n == 0:
        return 0
    x = _inputs(n)
    size = 1 << n
    # sens[B, a]: flipping block B at a changes f
    sens = f.table[x[:, None] ^ x[None, :]] != f.table[None, :]
    best = np.zeros((size, size), dtype=np.int64)
    for u in range(1, size):
        low = u & -u
        rest = u ^ low
        cur = best[rest].copy()
        sub = rest
        while True:
            block = low | sub
            cur = np.maximum(cur, np.where(sens[block], best[u ^ block] + 1, 0))
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[u] = cur
    return int(best[size - 1].max())


def fourier_support_degree(f: BooleanFunction) -> int:
    """Exact degree via an integer Moebius transform of the table."""
    coeffs = mobius_coefficients(f.table)
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return 0
    return max(int(k).bit_count() for k in nz)


def mobius_coefficients(values: Iterable) -> np.ndarray:
    """Coefficients ``c[S]`` with ``value(x) = sum_{S subset of x} c[S]``.

    Works on integer tables (int64) or object arrays of exact rationals.
    """
    arr = np.asarray(values)
    arr = arr.astype(object) if arr.dtype == object else arr.astype(np.int64)
    size = arr.size
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("table length must be a power of two")
    for i in range(n):
        step = 1 << i
        view = arr.reshape(-1, 2 * step)
        view[:, step:] = view[:, step:] - view[:, :step]
    return arr


def all_functions(n: int) -> Iterable[BooleanFunction]:
    size = 1 << n
    for code in range(1 << size):
        yield BooleanFunction(n, np.array([(code >> k) & 1 for k in range(size)], dtype=np.uint8))


def compose_restrictions(rhos: Sequence[Restriction]) -> Restriction:
    return reduce(lambda acc, r: acc.then(r), rhos[1:], rhos[0])
