"""Probabilistic polynomials for OR and the reduction from sensitive functions to OR.

The OR sampler draws subsets at geometric scales and returns
``1 - prod(1 - |S ∩ x|)``.  Every factor is a linear form, so a sample has
degree at most the number of subsets, it vanishes at the all-zero input, and
at any other input it equals 1 as soon as some subset meets the support in
exactly one point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boolfn import (STAR, BooleanFunction, Projection, Restriction, bitstring, complement, project, restrict,
                     sensitivity, sensitive_coordinates, xor_shift)
from .polynomial import CubePolynomial, Number
from .probpoly import (Composed, ProbPolynomial, complement_prob, mix, project_prob,
                       reduce_error, majority_copies, restrict_prob, rng_for, shift_prob)

E_TERMS = 40


def e_bounds(terms: int = E_TERMS) -> tuple[Fraction, Fraction]:
    """Rational ``lo < e < hi`` from the factorial series and its geometric tail bound."""
    lo, fact = Fraction(0), 1
    for k in range(terms + 1):
        if k:
            fact *= k
        lo += Fraction(1, fact)
    # the tail after term N is below 1 / (N! * N)
    return lo, lo + Fraction(1, fact * terms)


def repetitions(eps: Fraction) -> int:
    """Smallest ``p`` with ``(1 - 1/(2e))^p <= eps``, certified with rational bounds on ``e``.

    The bound is checked against the largest value ``1 - 1/(2e)`` can take and
    minimality against the smallest, so the answer is exact whenever the two
    brackets agree (they do for every ``eps`` not within ``1e-40`` of a power).
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"error {eps} must lie in (0, 1)")
    e_lo, e_hi = e_bounds()
    q_hi = 1 - 1 / (2 * e_hi)
    q_lo = 1 - 1 / (2 * e_lo)
    p = max(1, math.floor(math.log(float(eps)) / math.log(float(q_hi))) - 1)
    while q_hi ** p > eps:
        p += 1
    while p > 1 and q_hi ** (p - 1) <= eps:
        p -= 1
    if p > 1 and q_lo ** (p - 1) <= eps:
        raise ArithmeticError(f"cannot certify minimal repetition count for {eps}")
    return p


def num_scales(n: int) -> int:
    """Scales ``0 .. ceil(log2 n)``."""
    return (n - 1).bit_length() + 1


@dataclass(frozen=True)
class ScaledSubsetFamily:
    """``p`` random subsets of ``[arity]`` at each scale ``i``, elements kept with probability ``2^-i``."""

    arity: int
    repetitions: int
    seed: int
    subsets: tuple[tuple[int, int, int], ...]   # (scale, j, mask)

    @classmethod
    def generate(cls, arity: int, p: int, seed: int) -> "ScaledSubsetFamily":
        if arity < 1 or p < 1:
            raise ValueError("need arity >= 1 and p >= 1")
        rng = rng_for(seed)
        weights = [1 << k for k in range(arity)]
        out = []
        for i in range(num_scales(arity)):
            keep = rng.random((p, arity)) < 2.0 ** -i
            if arity <= 62:
                masks = (keep.astype(np.int64) @ np.array(weights, dtype=np.int64)).tolist()
            else:
                masks = [sum(w for w, b in zip(weights, row) if b) for row in keep]
            out.extend((i, j, int(m)) for j, m in enumerate(masks))
        return cls(arity, p, seed, tuple(out))

    def __len__(self):
        return len(self.subsets)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(m for _, _, m in self.subsets)

    def restrictions(self) -> list[Restriction]:
        """Variables outside each subset fixed to 0, inside left free."""
        return [Restriction(tuple(STAR if m >> k & 1 else 0 for k in range(self.arity))) for m in self.masks]

    def sizes(self) -> list[int]:
        return [m.bit_count() for m in self.masks]


class OrSample(CubePolynomial):
    """``1 - prod_S (1 - sum_{k in S} x_k)`` for a fixed list of subsets."""

    def __init__(self, arity: int, masks: Sequence[int]):
        self.arity = arity
        self.masks = tuple(int(m) for m in masks)

    def at_cube(self, x: int) -> Number:
        prod = 1
        for m in self.masks:
            prod *= 1 - (m & x).bit_count()
            if prod == 0:
                return 1
        return 1 - prod

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        if self.arity > 62 or not self.masks:
            return super().at_cube_many(xs)
        xs = np.asarray(xs, dtype=np.int64)
        counts = np.bitwise_count(xs[:, None] & np.array(self.masks, dtype=np.int64)[None, :]).astype(np.int64)
        hit = (counts == 1).any(axis=1)
        out = np.ones(len(xs), dtype=object)
        rest = np.flatnonzero(~hit)
        if rest.size:
            factors = 1 - counts[rest]
            # exact int64 products while |prod| < 2^62, Python ints beyond
            if np.log2(np.maximum(np.abs(factors), 1)).sum(axis=1).max() < 62:
                out[rest] = (1 - factors.prod(axis=1)).astype(object)
            else:
                out[rest] = 1 - factors.astype(object).prod(axis=1)
        return out

    @property
    def degree(self) -> int:
        if self.arity > 20:
            raise ValueError("degree only materialised up to 20 variables")
        return super().degree


def or_prob_poly(n: int, eps: Fraction) -> ProbPolynomial:
    """The scaled-subset OR polynomial with ``p = repetitions(eps)`` subsets per scale."""
    if n < 1:
        raise ValueError("OR needs at least one variable")
    eps = Fraction(eps)
    p = repetitions(eps)

    def sampler(seed: int) -> OrSample:
        return OrSample(n, ScaledSubsetFamily.generate(n, p, seed).masks)

    return ProbPolynomial(n, p * num_scales(n), sampler, None,
                          {"kind": "or", "p": p, "scales": num_scales(n), "eps": str(eps)})


def and_prob_poly(n: int, eps: Fraction) -> ProbPolynomial:
    """``AND(x) = 1 - OR(1 - x)``: exact at the all-ones input, error ``<= eps`` elsewhere."""
    return complement_prob(shift_prob(or_prob_poly(n, eps), (1 << n) - 1))


# --- reduction from a sensitive function ------------------------------------------------

def _check_or_like(g: BooleanFunction) -> None:
    if g(0) != 0 or any(g(1 << j) != 1 for j in range(g.arity)):
        raise ValueError("g must vanish at 0 and equal 1 at every unit vector")


def or_reduction_family(g: BooleanFunction, p: int, seed: int) -> list[Restriction]:
    _check_or_like(g)
    return ScaledSubsetFamily.generate(g.arity, p, seed).restrictions()


def family_disagreements(g: BooleanFunction, p: int, seed_0: int, trials: int,
                         inputs: Sequence[int] | None = None) -> np.ndarray:
    """Per-input count of families where ``OR_i g(x restricted to S_i)`` differs from ``OR(x)``."""
    _check_or_like(g)
    xs = np.arange(1 << g.arity, dtype=np.int64) if inputs is None else np.asarray(inputs, dtype=np.int64)
    want = xs != 0
    counts = np.zeros(len(xs), dtype=np.int64)
    for s in range(seed_0, seed_0 + trials):
        masks = np.array(ScaledSubsetFamily.generate(g.arity, p, s).masks, dtype=np.int64)
        got = g.table[xs[:, None] & masks[None, :]].any(axis=1)
        counts += got != want
    return counts


@dataclass(frozen=True)
class NormalizedFunction:
    """``g`` on ``s`` variables with ``g(0) = 0`` and ``g(e_j) = 1``, and how it came from ``f``."""

    g: BooleanFunction
    original: BooleanFunction
    complemented: bool
    shift: int
    order: tuple[int, ...]   # order[k] = original variable placed at position k
    s: int

    @property
    def trailing(self) -> Restriction:
        n = self.original.arity
        return Restriction((STAR,) * self.s + (0,) * (n - self.s))

    def replay(self) -> BooleanFunction:
        h = complement(self.original) if self.complemented else self.original
        h = xor_shift(h, self.shift)
        h = project(h, Projection.permutation(self.order))
        return restrict(h, self.trailing)

    def to_json(self) -> dict:
        return {"s": self.s, "complemented": self.complemented,
                "shift": bitstring(self.shift, self.original.arity), "order": list(self.order)}


def normalize_sensitive(f: BooleanFunction) -> NormalizedFunction:
    if f.is_constant:
        raise ValueError("constant functions have no sensitive input")
    s, a = sensitivity(f)
    flip = f(a) == 1
    coords = sensitive_coordinates(f, a)
    order = tuple(coords) + tuple(i for i in range(f.arity) if i not in coords)
    out = NormalizedFunction(f, f, flip, a, order, s)
    g = out.replay()
    _check_or_like(g)
    return NormalizedFunction(g, f, flip, a, order, s)


def normalized_prob(pp: ProbPolynomial, norm: NormalizedFunction) -> ProbPolynomial:
    """Apply the normalising transformations of ``norm`` to a probabilistic polynomial for ``f``."""
    if pp.arity != norm.original.arity:
        raise ValueError("probabilistic polynomial and function differ in arity")
    h = complement_prob(pp) if norm.complemented else pp
    h = shift_prob(h, norm.shift)
    h = project_prob(h, Projection.permutation(norm.order))
    return restrict_prob(h, norm.trailing)


def or_from_function(f: BooleanFunction, pp: ProbPolynomial, eps_f: Fraction = Fraction(1, 3)) -> ProbPolynomial:
    """A probabilistic polynomial for ``OR_s`` (``s`` the sensitivity of ``f``) built from one for ``f``.

    ``eps_f`` is the per-input error of ``pp``; pass 0 for exact lifts.
    """
    norm = normalize_sensitive(f)
    s = norm.s
    pp_g = normalized_prob(pp, norm)
    p = repetitions(Fraction(1, 10))
    ell = p * num_scales(s)
    delta = Fraction(1, 10 * ell)
    copies = majority_copies(eps_f, delta)
    outer = or_prob_poly(ell, Fraction(1, 10))

    def sampler(seed: int) -> CubePolynomial:
        family = ScaledSubsetFamily.generate(s, p, mix(seed, 0))
        o = outer.sample(mix(seed, 1))
        inners = []
        for i, rho in enumerate(family.restrictions()):
            g_i = reduce_error(restrict_prob(pp_g, rho, keep_arity=True), eps_f, delta)
            inners.append(g_i.sample(mix(seed, 2 + i)))
        return Composed(o, inners)

    bound = outer.degree_bound * copies * pp.degree_bound
    info = {"kind": "or-from-function", "s": s, "p": p, "ell": ell, "copies": copies, "delta": str(delta),
            "outer_degree": outer.degree_bound, "inner_degree": pp.degree_bound, "normalization": norm.to_json()}
    return ProbPolynomial(s, bound, sampler, None, info)
