"""Exact multilinear polynomials over the rationals.

Every polynomial here is multilinear: monomials are variable subsets keyed by
bitmask, and products reduce ``x_i^2 -> x_i``.  Since all evaluation that
matters happens on Boolean points of the base variables, reduction never
changes a value that is used and gives a canonical form for equality tests.

Besides the explicit :class:`Polynomial`, :class:`CubePolynomial` describes a
multilinear polynomial through its values on ``{0,1}^n``.  Large sampled
polynomials (hundreds of linear factors in dozens of variables) are only ever
handled in that form; they can still be evaluated exactly at any rational
point and materialised when the arity is small.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .boolfn import ArityError, BooleanFunction, mobius_coefficients

Number = Union[int, Fraction]

MATERIALIZE_CAP = 20
CUBE_TABLE_CAP = 16
FREE_COORD_CAP = 22
MAJORITY_CAP = 15


def _exact(v) -> Number:
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, float):
        return _exact(Fraction(v))
    raise TypeError(f"expected an exact number, got {type(v).__name__}")


def zeta_transform(coeffs: np.ndarray) -> np.ndarray:
    """Cube values ``v[x] = sum_{S subset of x} c[S]`` (in place on a copy)."""
    arr = np.array(coeffs, dtype=object)
    n = arr.size.bit_length() - 1
    for i in range(n):
        step = 1 << i
        view = arr.reshape(-1, 2 * step)
        view[:, step:] = view[:, step:] + view[:, :step]
    return arr


class CubePolynomial(ABC):
    """A multilinear polynomial determined by its values on the Boolean cube."""

    arity: int

    @abstractmethod
    def at_cube(self, x: int) -> Number:
        """Value at the Boolean point with bitmask ``x``."""

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.at_cube(int(x)) for x in xs], dtype=object)

    def at_bit_rows(self, rows: np.ndarray) -> np.ndarray:
        """Values at Boolean points given as rows of 0/1 entries (column ``i`` is variable ``i``)."""
        k = rows.shape[1]
        if k <= 62:
            masks = rows.astype(np.int64) @ (1 << np.arange(k, dtype=np.int64))
        else:
            masks = np.array([sum(1 << i for i in np.flatnonzero(row)) for row in rows.astype(bool)], dtype=object)
        return self.at_cube_many(masks)

    def evaluate(self, point: Sequence) -> Number:
        """Exact value at an arbitrary rational point (multilinear extension)."""
        if len(point) != self.arity:
            raise ValueError(f"point has length {len(point)}, arity is {self.arity}")
        base = 0
        free: list[tuple[int, Number]] = []
        for i, v in enumerate(point):
            v = _exact(v)
            if v == 1:
                base |= 1 << i
            elif v != 0:
                free.append((i, v))
        if not free:
            return self.at_cube(base)
        if len(free) > FREE_COORD_CAP:
            raise ArityError(f"{len(free)} non-Boolean coordinates exceed cap {FREE_COORD_CAP}")
        k = len(free)
        xs = np.full(1 << k, base, dtype=object)
        weights = np.ones(1 << k, dtype=object)
        sub = np.arange(1 << k)
        for pos, (i, v) in enumerate(free):
            on = ((sub >> pos) & 1).astype(bool)
            xs[on] = xs[on] | (1 << i)
            weights = np.where(on, weights * v, weights * (1 - v))
        live = np.flatnonzero(weights != 0)
        if live.size == 0:
            return 0
        values = self.at_cube_many(xs[live].astype(object))
        return _exact(sum(w * val for w, val in zip(weights[live], values)))

    def cube_values(self) -> np.ndarray:
        if self.arity > MATERIALIZE_CAP:
            raise ArityError(f"cannot tabulate {self.arity} variables (cap {MATERIALIZE_CAP})")
        return self.at_cube_many(np.arange(1 << self.arity, dtype=np.int64))

    def to_polynomial(self) -> "Polynomial":
        return Polynomial.from_cube_values(self.arity, self.cube_values())

    @property
    def degree(self) -> int:
        coeffs = mobius_coefficients(np.asarray(self.cube_values(), dtype=object))
        nz = np.flatnonzero(coeffs != 0)
        return int(np.bitwise_count(nz).max()) if nz.size else 0


class Polynomial(CubePolynomial):
    """Sparse multilinear polynomial with exact rational coefficients."""

    def __init__(self, arity: int, terms: Mapping[int, Number] | None = None):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        self.arity = arity
        clean: dict[int, Number] = {}
        for mask, c in (terms or {}).items():
            mask = int(mask)
            if mask >> arity:
                raise ValueError(f"monomial {mask:b} uses variables beyond arity {arity}")
            c = _exact(c)
            if c != 0:
                clean[mask] = c
        self._terms = dict(sorted(clean.items()))

    # construction ------------------------------------------------------

    @classmethod
    def constant(cls, arity: int, c: Number) -> "Polynomial":
        return cls(arity, {0: c})

    @classmethod
    def variable(cls, arity: int, i: int) -> "Polynomial":
        if not 0 <= i < arity:
            raise ValueError(f"variable {i} outside arity {arity}")
        return cls(arity, {1 << i: 1})

    @classmethod
    def linear(cls, arity: int, coeffs: Mapping[int, Number], const: Number = 0) -> "Polynomial":
        terms = {1 << i: c for i, c in coeffs.items()}
        terms[0] = const
        return cls(arity, terms)

    @classmethod
    def from_cube_values(cls, arity: int, values: Sequence) -> "Polynomial":
        coeffs = mobius_coefficients(np.array(list(values), dtype=object))
        return cls(arity, {k: c for k, c in enumerate(coeffs) if c != 0})

    # inspection --------------------------------------------------------

    @property
    def terms(self) -> Mapping[int, Number]:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self._terms), default=0)

    def coefficient(self, monomial: int | Iterable[int]) -> Number:
        if not isinstance(monomial, int):
            monomial = sum(1 << i for i in monomial)
        return self._terms.get(monomial, 0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.arity == other.arity and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.arity, tuple(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"Polynomial({self.arity}, 0)"
        parts = []
        for m, c in self._terms.items():
            mono = "*".join(f"x{i}" for i in range(self.arity) if m >> i & 1)
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return f"Polynomial({self.arity}, {' + '.join(parts)})"

    # arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.arity, _exact(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.arity, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: Number) -> "Polynomial":
        c = _exact(c)
        return Polynomial(self.arity, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        if self.arity <= CUBE_TABLE_CAP and len(self) * len(other) > 4 << self.arity:
            values = self._cube_table * other._cube_table
            return Polynomial.from_cube_values(self.arity, values)
        out: dict[int, Number] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 | m2
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.arity, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = Polynomial.constant(self.arity, 1)
        for _ in range(k):
            out = out * self
        return out

    # evaluation --------------------------------------------------------

    @cached_property
    def _cube_table(self) -> np.ndarray:
        coeffs = np.zeros(1 << self.arity, dtype=object)
        for m, c in self._terms.items():
            coeffs[m] = c
        return zeta_transform(coeffs)

    def at_cube(self, x: int) -> Number:
        if self.arity <= CUBE_TABLE_CAP:
            return self._cube_table[x]
        return _exact(sum(c for m, c in self._terms.items() if m & ~x == 0))

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        if self.arity <= CUBE_TABLE_CAP:
            return self._cube_table[np.asarray(xs, dtype=np.int64)]
        return super().at_cube_many(xs)

    def evaluate(self, point: Sequence) -> Number:
        if len(point) != self.arity:
            raise ValueError(f"point has length {len(point)}, arity is {self.arity}")
        vals = [_exact(v) for v in point]
        total: Number = 0
        for m, c in self._terms.items():
            term = c
            i = 0
            while m and term:
                if m & 1:
                    term *= vals[i]
                m >>= 1
                i += 1
            total += term
        return _exact(total)

    def to_polynomial(self) -> "Polynomial":
        return self

    # serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for m, c in self._terms.items():
            c = Fraction(c)
            terms.append({
                "monomial": [i for i in range(self.arity) if m >> i & 1],
                "coeff": f"{c.numerator}/{c.denominator}",
            })
        return {"arity": self.arity, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        terms: dict[int, Number] = {}
        for t in data["terms"]:
            m = sum(1 << int(i) for i in t["monomial"])
            terms[m] = terms.get(m, 0) + Fraction(t["coeff"])
        return cls(int(data["arity"]), terms)


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def scale(p: Polynomial, c: Number) -> Polynomial:
    return p.scale(c)


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def evaluate(p: CubePolynomial, point: Sequence) -> Number:
    return p.evaluate(point)


def mobius_interpolate(f: BooleanFunction) -> Polynomial:
    """The unique multilinear polynomial agreeing with ``f`` on the cube."""
    coeffs = mobius_coefficients(f.table)
    return Polynomial(f.arity, {k: int(c) for k, c in enumerate(coeffs) if c})


def exact_degree(f: BooleanFunction) -> int:
    return mobius_interpolate(f).degree


@dataclass(frozen=True, eq=False)
class SymmetricPolynomial(CubePolynomial):
    """Multilinear polynomial of a symmetric function, given by its value at each Hamming weight.

    Evaluation at non-Boolean points uses the weight-distribution recurrence,
    so arities well beyond the materialisation cap stay cheap.
    """

    arity: int
    by_weight: tuple[Number, ...]

    def __post_init__(self):
        if len(self.by_weight) != self.arity + 1:
            raise ValueError("need one value per Hamming weight")

    def at_cube(self, x: int) -> Number:
        return self.by_weight[int(x).bit_count()]

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        weights = np.array([int(x).bit_count() for x in xs], dtype=np.int64)
        return np.array(self.by_weight, dtype=object)[weights]

    def at_bit_rows(self, rows: np.ndarray) -> np.ndarray:
        return np.array(self.by_weight, dtype=object)[rows.astype(np.int64).sum(axis=1)]

    def coefficient_of_size(self, k: int) -> Number:
        """Coefficient shared by every monomial of ``k`` variables."""
        return _exact(sum((-1) ** (k - j) * math.comb(k, j) * self.by_weight[j] for j in range(k + 1)))

    @cached_property
    def degree(self) -> int:
        return max((k for k in range(self.arity + 1) if self.coefficient_of_size(k) != 0), default=0)

    def evaluate(self, point: Sequence) -> Number:
        if len(point) != self.arity:
            raise ValueError(f"point has length {len(point)}, arity is {self.arity}")
        dist: list[Number] = [1]
        for v in point:
            v = _exact(v)
            nxt = [0] * (len(dist) + 1)
            for k, w in enumerate(dist):
                nxt[k] += w * (1 - v)
                nxt[k + 1] += w * v
            dist = nxt
        return _exact(sum(w * val for w, val in zip(dist, self.by_weight)))


def majority_form(ell: int) -> SymmetricPolynomial:
    if ell < 1 or ell % 2 == 0:
        raise ValueError(f"majority needs a positive odd arity, got {ell}")
    return SymmetricPolynomial(ell, tuple(int(2 * k > ell) for k in range(ell + 1)))


def majority_poly(ell: int) -> Polynomial:
    """Explicit multilinear Maj_ell (odd ``ell`` up to 15)."""
    if ell < 1 or ell % 2 == 0:
        raise ValueError(f"majority needs a positive odd arity, got {ell}")
    if ell > MAJORITY_CAP:
        raise ArityError(f"explicit majority capped at {MAJORITY_CAP} variables")
    # coefficient of a monomial of size k is sum_j (-1)^{k-j} C(k,j) Maj(j)
    terms = {}
    for k in range(ell + 1):
        c = sum((-1) ** (k - j) * math.comb(k, j) for j in range(k + 1) if 2 * j > ell)
        if c:
            for mono in combinations(range(ell), k):
                terms[sum(1 << i for i in mono)] = c
    return Polynomial(ell, terms)


def compose(p: CubePolynomial, inners: Sequence[CubePolynomial], method: str = "auto") -> Polynomial:
    """Substitute ``inners`` for the variables of ``p`` and reduce multilinearly.

    ``method="symbolic"`` expands products term by term; ``method="cube"``
    tabulates the composite on the cube and interpolates.  Both give the same
    canonical polynomial; ``auto`` picks by base arity.
    """
    if len(inners) != p.arity:
        raise ValueError(f"need {p.arity} inner polynomials, got {len(inners)}")
    m = inners[0].arity if inners else 0
    if any(q.arity != m for q in inners):
        raise ValueError("inner polynomials must share one arity")
    if not inners:
        return Polynomial(0, {0: p.at_cube(0)})
    if method == "auto":
        method = "cube" if m <= CUBE_TABLE_CAP else "symbolic"
    if method == "cube":
        xs = np.arange(1 << m, dtype=np.int64)
        cols = [q.at_cube_many(xs) for q in inners]
        values = [p.evaluate([col[a] for col in cols]) for a in range(1 << m)]
        return Polynomial.from_cube_values(m, values)
    if method != "symbolic":
        raise ValueError(f"unknown method {method!r}")
    outer = p.to_polynomial()
    explicit = [q.to_polynomial() for q in inners]
    total = Polynomial(m)
    for mono, c in outer.terms.items():
        term = Polynomial.constant(m, c)
        for i in range(p.arity):
            if mono >> i & 1:
                term = term * explicit[i]
        total = total + term
    return total


# --- exact linear algebra ------------------------------------------------------

def monomials_up_to(m: int, d: int) -> list[int]:
    """Masks of all monomials of degree <= d over m variables, in increasing mask order."""
    return [mask for mask in range(1 << m) if mask.bit_count() <= d] if m <= 20 else sorted(
        sum(1 << i for i in c) for k in range(d + 1) for c in combinations(range(m), k))


def solve_rational(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Exact Gauss-Jordan elimination; one solution (free variables 0) or ``None``."""
    rows = [list(r) + [v] for r, v in zip(a, b)]
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[row], rows[pivot] = rows[pivot], rows[row]
        pv = rows[row][col]
        rows[row] = [v / pv for v in rows[row]]
        for r in range(len(rows)):
            if r != row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[row])]
        pivots.append(col)
        row += 1
        if row == len(rows):
            break
    for r in range(row, len(rows)):
        if rows[r][-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = rows[r][-1]
    return x


def bit_size(values: Iterable[Fraction]) -> int:
    """Total bits of numerator/denominator pairs written in binary (sign bit included)."""
    total = 0
    for v in values:
        v = Fraction(v)
        total += abs(v.numerator).bit_length() + 1 + v.denominator.bit_length()
    return total


@dataclass(frozen=True)
class LinearSystemSolution:
    arity: int
    monomials: tuple[int, ...]
    coefficients: tuple[Fraction, ...]
    bit_size: int

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.arity, dict(zip(self.monomials, self.coefficients)))

    @property
    def bit_bound(self) -> int:
        """The ``10 q^3`` bit-complexity bound for ``q`` unknowns."""
        return 10 * len(self.monomials) ** 3


def solve_agreement_system(points: Sequence[int], values: Sequence[int], d: int, arity: int) -> LinearSystemSolution | None:
    """A degree-<=d multilinear polynomial matching ``values`` at ``points``, if one exists."""
    if len(set(points)) != len(points):
        raise ValueError("points must be distinct")
    if len(points) != len(values):
        raise ValueError("one value per point required")
    monos = monomials_up_to(arity, d)
    if not points:
        coeffs = [Fraction(0)] * len(monos)
    else:
        a = [[Fraction(int(m & ~x == 0)) for m in monos] for x in points]
        coeffs = solve_rational(a, [Fraction(v) for v in values])
        if coeffs is None:
            return None
    return LinearSystemSolution(arity, tuple(monos), tuple(coeffs), bit_size(coeffs))
