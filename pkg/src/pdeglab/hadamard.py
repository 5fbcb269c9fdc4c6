"""Addressing through Hadamard codewords, and its low-degree probabilistic polynomial.

An instance holds ``r`` truth tables ``g_j`` on ``t`` bits, a table ``T``
indexed by ``[s]^r`` and a fallback bit ``b`` (``s = 2^t``).  The function
returns ``T(i_1..i_r)`` when every ``g_j`` is the codeword ``h_{i_j}`` and ``b``
otherwise.  Codeword ``beta`` is the linear map ``alpha -> <beta, alpha> mod 2``.

Variable layout (0-based): ``x_{j,alpha}`` sits at ``j*s + alpha``, the table
entry for ``(i_1..i_r)`` at ``r*s + sum_j i_j s^j`` and ``b`` at ``n - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from .polynomial import CubePolynomial, Number, Polynomial, compose
from .probpoly import ProbPolynomial, compose_prob, lift_exact, mix, rng_for
from .orpoly import and_prob_poly, num_scales, repetitions

CODEBOOK_CAP = 5
VECTOR_CAP = 62


@dataclass(frozen=True)
class HadamardCodebook:
    t: int

    def __post_init__(self):
        if not 0 <= self.t <= CODEBOOK_CAP:
            raise ValueError(f"codebook dimension must be in [0, {CODEBOOK_CAP}], got {self.t}")

    @property
    def s(self) -> int:
        return 1 << self.t

    def codeword(self, beta: int) -> int:
        """Codeword ``beta`` as an ``s``-bit mask (bit ``alpha`` = ``<beta, alpha> mod 2``)."""
        return sum(((beta & alpha).bit_count() & 1) << alpha for alpha in range(self.s))

    @cached_property
    def codewords(self) -> tuple[int, ...]:
        return tuple(self.codeword(b) for b in range(self.s))

    @cached_property
    def index(self) -> dict[int, int]:
        return {w: b for b, w in enumerate(self.codewords)}

    @cached_property
    def signs(self) -> np.ndarray:
        """``signs[beta, alpha] = 1 - 2 h_beta(alpha)``."""
        a = np.arange(self.s)
        return 1 - 2 * (np.bitwise_count(a[:, None] & a[None, :]) & 1).astype(np.int64)

    def inner(self, i1: int, i2: int) -> int:
        return int(self.signs[i1] @ self.signs[i2])

    def __len__(self):
        return self.s


def hadamard_codebook(t: int) -> HadamardCodebook:
    return HadamardCodebook(t)


@dataclass(frozen=True)
class UbdInstance:
    t: int
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("need r >= 1")
        HadamardCodebook(self.t)

    @cached_property
    def codebook(self) -> HadamardCodebook:
        return HadamardCodebook(self.t)

    @property
    def s(self) -> int:
        return 1 << self.t

    @property
    def n(self) -> int:
        return self.s * self.r + self.s ** self.r + 1

    def x_var(self, j: int, alpha: int) -> int:
        if not (0 <= j < self.r and 0 <= alpha < self.s):
            raise IndexError((j, alpha))
        return j * self.s + alpha

    def y_var(self, indices: Sequence[int]) -> int:
        if len(indices) != self.r or any(not 0 <= i < self.s for i in indices):
            raise IndexError(tuple(indices))
        return self.s * self.r + sum(i * self.s ** j for j, i in enumerate(indices))

    @property
    def y0(self) -> int:
        return self.n - 1

    def encode(self, tables: Sequence[int], table_bits: int, b: int) -> int:
        """Input mask from ``g_j`` masks, the ``T`` bits as one mask over ``[s]^r`` and ``b``."""
        if len(tables) != self.r:
            raise ValueError(f"need {self.r} tables")
        full = (1 << self.s) - 1
        x = sum((g & full) << (j * self.s) for j, g in enumerate(tables))
        return x | (table_bits << (self.s * self.r)) | (int(b) << self.y0)

    def decode(self, a: int) -> tuple[tuple[int, ...], int, int]:
        full = (1 << self.s) - 1
        tables = tuple((a >> (j * self.s)) & full for j in range(self.r))
        table_bits = (a >> (self.s * self.r)) & ((1 << self.s ** self.r) - 1)
        return tables, table_bits, (a >> self.y0) & 1


def _as_mask(inst: UbdInstance, a) -> int:
    if isinstance(a, (int, np.integer)):
        return int(a)
    if len(a) != inst.n:
        raise ValueError(f"input has length {len(a)}, instance has {inst.n} variables")
    return sum(int(v) << i for i, v in enumerate(a))


def ubd_eval(inst: UbdInstance, a: int | Sequence[int]) -> int:
    tables, table_bits, b = inst.decode(_as_mask(inst, a))
    idx = [inst.codebook.index.get(g) for g in tables]
    if any(i is None for i in idx):
        return b
    return (table_bits >> sum(i * inst.s ** j for j, i in enumerate(idx))) & 1


def is_codeword_input(inst: UbdInstance, a: int) -> bool:
    return all(g in inst.codebook.index for g in inst.decode(a)[0])


# --- polynomials ----------------------------------------------------------------------

def linearity_test_poly() -> Polynomial:
    """Multilinear form of ``1 xor z1 xor z2 xor z3``."""
    return Polynomial.from_cube_values(3, [1 - (z.bit_count() & 1) for z in range(8)])


def linearity_predicates(inst: UbdInstance) -> list[Polynomial]:
    """For each ``(j, alpha, beta)``: 1 iff ``g_j(alpha) xor g_j(beta) = g_j(alpha xor beta)``."""
    q = linearity_test_poly()
    out = []
    for j in range(inst.r):
        for alpha in range(inst.s):
            for beta in range(inst.s):
                vs = [inst.x_var(j, alpha), inst.x_var(j, beta), inst.x_var(j, alpha ^ beta)]
                out.append(compose(q, [Polynomial.variable(inst.n, v) for v in vs], method="symbolic"))
    return out


def build_Q(inst: UbdInstance, eps_q: Fraction = Fraction(1, 3)) -> ProbPolynomial:
    """AND of all linearity predicates: ~1 exactly when every ``g_j`` is a codeword."""
    preds = linearity_predicates(inst)
    conj = and_prob_poly(len(preds), eps_q)
    q = compose_prob(conj, [lift_exact(p) for p in preds])
    return ProbPolynomial(inst.n, q.degree_bound, q.sampler, None,
                          {"kind": "membership", "and_degree": conj.degree_bound, "eps_q": str(eps_q)})


def build_R(inst: UbdInstance, indices: Sequence[int]) -> Polynomial:
    """``s^-r prod_j sum_alpha hhat_{i_j}(alpha) (1 - 2 x_{j,alpha})``: an indicator on codeword tuples."""
    if len(indices) != inst.r or any(not 0 <= i < inst.s for i in indices):
        raise ValueError(f"bad codeword indices {tuple(indices)}")
    signs = inst.codebook.signs
    total = Polynomial.constant(inst.n, Fraction(1, inst.s ** inst.r))
    for j, i in enumerate(indices):
        coeffs = {}
        const = 0
        for alpha in range(inst.s):
            h = int(signs[i, alpha])
            const += h
            coeffs[inst.x_var(j, alpha)] = -2 * h
        total = total * Polynomial.linear(inst.n, coeffs, const)
    return total


def _bits(xs: np.ndarray, lo: int, width: int) -> np.ndarray:
    return ((xs[:, None] >> (lo + np.arange(width, dtype=np.int64))[None, :]) & 1).astype(np.int64)


class HadamardSample(CubePolynomial):
    """``Q (sum R y) + (1 - Q) y0`` with one shared draw of ``Q``."""

    def __init__(self, inst: UbdInstance, q: CubePolynomial):
        self.inst = inst
        self.arity = inst.n
        # both occurrences refer to the same sampled polynomial
        self.membership = q
        self.fallback = q

    def _addressed(self, a: int) -> Fraction:
        inst = self.inst
        tables, table_bits, _ = inst.decode(a)
        corr = []
        for g in tables:
            pm = np.array([1 - 2 * ((g >> alpha) & 1) for alpha in range(inst.s)], dtype=object)
            corr.append(inst.codebook.signs.astype(object) @ pm)
        total = 0
        for idx in product(range(inst.s), repeat=inst.r):
            pos = sum(i * inst.s ** j for j, i in enumerate(idx))
            if table_bits >> pos & 1:
                total += math.prod(int(corr[j][i]) for j, i in enumerate(idx))
        return Fraction(total, inst.s ** inst.r)

    def at_cube(self, a: int) -> Number:
        a = int(a)
        qv = self.membership.at_cube(a)
        qf = self.fallback.at_cube(a) if self.fallback is not self.membership else qv
        return Fraction(qv * self._addressed(a) + (1 - qf) * ((a >> self.inst.y0) & 1))

    def addressed_many(self, xs: np.ndarray) -> np.ndarray:
        inst = self.inst
        s, r = inst.s, inst.r
        prod = None
        for j in range(r):
            corr = (1 - 2 * _bits(xs, j * s, s)) @ inst.codebook.signs.T
            prod = corr if prod is None else (corr[:, :, None] * prod[:, None, :]).reshape(len(xs), -1)
        table = _bits(xs, s * r, s ** r)
        return (prod * table).sum(axis=1)

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        if self.arity > VECTOR_CAP:
            return super().at_cube_many(xs)
        xs = np.asarray(xs, dtype=np.int64)
        qv = self.membership.at_cube_many(xs)
        addressed = self.addressed_many(xs)
        denom = self.inst.s ** self.inst.r
        y0 = (xs >> self.inst.y0) & 1
        out = np.empty(len(xs), dtype=object)
        for k in range(len(xs)):
            val = Fraction(int(addressed[k]), denom) * qv[k] + (1 - qv[k]) * int(y0[k])
            out[k] = val.numerator if val.denominator == 1 else val
        return out


def assemble_P(inst: UbdInstance, q: ProbPolynomial) -> ProbPolynomial:
    if q.arity != inst.n:
        raise ValueError(f"membership polynomial has arity {q.arity}, instance has {inst.n}")

    def sampler(seed: int) -> HadamardSample:
        return HadamardSample(inst, q.sample(mix(seed, 0)))

    info = {"kind": "hadamard", "t": inst.t, "r": inst.r, "n": inst.n, "q_degree": q.degree_bound}
    return ProbPolynomial(inst.n, q.degree_bound + inst.r + 1, sampler, None, info)


# --- structure ------------------------------------------------------------------------------

def influence_witnesses(inst: UbdInstance) -> dict[int, int]:
    """For every variable, an input where flipping it flips the function (each one checked)."""
    zero = [inst.codebook.codewords[0]] * inst.r
    out: dict[int, int] = {}
    # every table zero, T = 1 only at the all-zero index, b = 0
    base = inst.encode(zero, 1, 0)
    for j in range(inst.r):
        for alpha in range(inst.s):
            out[inst.x_var(j, alpha)] = base
    for idx in product(range(inst.s), repeat=inst.r):
        tables = [inst.codebook.codewords[i] for i in idx]
        out[inst.y_var(idx)] = inst.encode(tables, 0, 1)
    out[inst.y0] = inst.encode([1] + zero[1:], 0, 0)   # g_1(0) = 1 is never linear
    for v, a in out.items():
        if ubd_eval(inst, a) == ubd_eval(inst, a ^ (1 << v)):
            raise AssertionError(f"variable {v} is not influential at its witness")
    return dict(sorted(out.items()))


def structured_inputs(inst: UbdInstance, seed: int) -> list[int]:
    """``4 s^r`` inputs: each codeword tuple with ``b`` both equal and unequal to the addressed entry,
    and the same tuple with one table replaced by a random non-codeword, ``b`` both ways."""
    rng = rng_for(seed)
    cells = inst.s ** inst.r
    out = []
    for idx in product(range(inst.s), repeat=inst.r):
        tables = [inst.codebook.codewords[i] for i in idx]
        table_bits = int(sum(int(bit) << k for k, bit in enumerate(rng.integers(0, 2, cells))))
        for b in (0, 1):
            out.append(inst.encode(tables, table_bits, b))
        j = sum(idx) % inst.r
        while True:
            g = int(rng.integers(0, 1 << inst.s))
            if g not in inst.codebook.index:
                break
        broken = list(tables)
        broken[j] = g
        for b in (0, 1):
            out.append(inst.encode(broken, table_bits, b))
    return out


def random_inputs(inst: UbdInstance, k: int, seed: int) -> list[int]:
    rng = rng_for(seed)
    return [int(sum(int(bit) << i for i, bit in enumerate(rng.integers(0, 2, inst.n)))) for _ in range(k)]


@dataclass(frozen=True)
class UbdParams:
    t: int
    r: int
    n: int
    predicted_degree: int

    def to_json(self) -> dict:
        return {"t": self.t, "r": self.r, "n": self.n, "predicted_degree": self.predicted_degree}


def choose_params(t: int, c: Fraction, eps_q: Fraction = Fraction(1, 3)) -> UbdParams:
    if t < 1 or c <= 0:
        raise ValueError("need t >= 1 and c > 0")
    r = max(1, round(t ** float(c)))
    s = 1 << t
    n = s * r + s ** r + 1
    preds = r * s * s
    # with s = 2 every triple (alpha, beta, alpha^beta) repeats a variable and the predicate is linear
    inner = 3 if t >= 2 else 1
    q_degree = inner * repetitions(Fraction(eps_q)) * num_scales(preds)
    return UbdParams(t, r, n, q_degree + r + 1)
