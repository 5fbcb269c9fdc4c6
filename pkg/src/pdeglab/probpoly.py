"""Probabilistic polynomials as seeded samplers, and how to measure their error.

A :class:`ProbPolynomial` maps a 64-bit seed to a multilinear polynomial (a
:class:`~pdeglab.polynomial.CubePolynomial`).  The distribution is the push
forward of the uniform seed; PRNG-driven samplers therefore have finite, if
enormous, support.  When the support is small it can be listed exactly and
errors computed as exact rationals.

Child seeds come from :func:`mix`, the SplitMix64 finaliser applied to
``seed + (i + 1) * 0x9E3779B97F4A7C15``.  Composite samplers draw component
``i`` with ``mix(seed, i)``, so independent components never share a stream.
"""
from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .boolfn import BooleanFunction, Projection, Restriction, bitstring
from .polynomial import CubePolynomial, Number, majority_form

MASK64 = (1 << 64) - 1
SUPPORT_CAP = 1 << 20
DEFAULT_CONFIDENCE = Fraction(999, 1000)
DEGREE_CHECK_ARITY = 10


def mix(seed: int, i: int) -> int:
    z = (seed + (i + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def mask_array(xs, arity: int) -> np.ndarray:
    """Masks as int64 when they fit, otherwise as Python ints in an object array."""
    if arity <= 62:
        return np.asarray(xs, dtype=np.int64)
    return np.array([int(x) for x in xs], dtype=object)


def rows_to_masks(matrix: np.ndarray) -> np.ndarray:
    """Pack rows of 0/1 entries into masks (column ``i`` is bit ``i``)."""
    k = matrix.shape[1]
    if k <= 62:
        weights = (1 << np.arange(k, dtype=np.int64))
        return matrix.astype(np.int64) @ weights
    return np.array([sum(int(b) << i for i, b in enumerate(row)) for row in matrix], dtype=object)


# --- implicit samples -----------------------------------------------------------

class Composed(CubePolynomial):
    """``outer(inner_1, ..., inner_k)`` reduced multilinearly in the base variables."""

    def __init__(self, outer: CubePolynomial, inners: Sequence[CubePolynomial]):
        if len(inners) != outer.arity:
            raise ValueError(f"outer has arity {outer.arity}, got {len(inners)} inners")
        if not inners:
            raise ValueError("composition needs at least one inner polynomial")
        self.outer = outer
        self.inners = tuple(inners)
        self.arity = inners[0].arity
        if any(q.arity != self.arity for q in inners):
            raise ValueError("inner polynomials must share one arity")

    def at_cube(self, x: int) -> Number:
        return self.at_cube_many(mask_array([x], self.arity))[0]

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        cols = np.empty((len(xs), len(self.inners)), dtype=object)
        for i, q in enumerate(self.inners):
            cols[:, i] = q.at_cube_many(xs)
        boolean = ((cols == 0) | (cols == 1)).all(axis=1)
        out = np.empty(len(xs), dtype=object)
        if boolean.any():
            out[boolean] = self.outer.at_bit_rows(cols[boolean])
        for r in np.flatnonzero(~boolean):
            out[r] = self.outer.evaluate(list(cols[r]))
        return out


class Pullback(CubePolynomial):
    """``inner`` with its variables replaced by constants or (shared) new variables.

    ``pull`` maps a mask over the new variables to the mask of the inner
    Boolean point it induces; it must accept int64 or object arrays.
    """

    def __init__(self, inner: CubePolynomial, arity: int, pull: Callable[[np.ndarray], np.ndarray]):
        self.inner = inner
        self.arity = arity
        self._pull = pull

    def at_cube(self, x: int) -> Number:
        return self.at_cube_many(mask_array([x], self.arity))[0]

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        return self.inner.at_cube_many(self._pull(mask_array(xs, self.arity)))


class Complemented(CubePolynomial):
    """``1 - inner``."""

    def __init__(self, inner: CubePolynomial):
        self.inner = inner
        self.arity = inner.arity

    def at_cube(self, x: int) -> Number:
        return 1 - self.inner.at_cube(x)

    def at_cube_many(self, xs: np.ndarray) -> np.ndarray:
        return 1 - self.inner.at_cube_many(xs)


def restriction_pull(rho: Restriction, keep_arity: bool) -> tuple[int, Callable]:
    n = len(rho)
    const = sum(1 << i for i, v in enumerate(rho.values) if v == 1)
    free = rho.free
    if keep_arity:
        free_mask = sum(1 << i for i in free)
        return n, lambda xs: (xs & free_mask) | const

    def pull(xs):
        xs = mask_array(xs, n)
        out = np.zeros(len(xs), dtype=xs.dtype) + const
        for j, pos in enumerate(free):
            out = out | (((xs >> j) & 1) << pos)
        return out

    return len(free), pull


def projection_pull(nu: Projection) -> Callable:
    n = len(nu)

    def pull(ys):
        ys = mask_array(ys, n)
        out = np.zeros(len(ys), dtype=ys.dtype)
        for i, v in enumerate(nu.mapping):
            out = out | (((ys >> v) & 1) << i)
        return out

    return pull


# --- the distribution object ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbPolynomial:
    """A seeded distribution over multilinear polynomials with a degree certificate."""

    arity: int
    degree_bound: int
    sampler: Callable[[int], CubePolynomial]
    support_fn: Callable[[], Sequence[tuple[CubePolynomial, Fraction]]] | None = None
    info: Mapping = field(default_factory=dict)

    def sample(self, seed: int) -> CubePolynomial:
        poly = self.sampler(seed & MASK64)
        if poly.arity != self.arity:
            raise AssertionError(f"sample has arity {poly.arity}, expected {self.arity}")
        if os.environ.get("PDEGLAB_CHECK_DEGREE") == "1" and self.arity <= DEGREE_CHECK_ARITY:
            d = poly.degree
            if d > self.degree_bound:
                raise AssertionError(f"sample degree {d} exceeds certificate {self.degree_bound}")
        return poly

    @cached_property
    def support(self) -> tuple[tuple[CubePolynomial, Fraction], ...] | None:
        if self.support_fn is None:
            return None
        members = tuple(self.support_fn())
        if sum(p for _, p in members) != 1:
            raise AssertionError("support probabilities do not sum to 1")
        return members


def lift_exact(p: CubePolynomial) -> ProbPolynomial:
    """Point mass on ``p``."""
    deg = p.degree
    return ProbPolynomial(p.arity, deg, lambda seed: p, lambda: ((p, Fraction(1)),), {"kind": "exact"})


def from_support(members: Sequence[tuple[CubePolynomial, Fraction]], degree_bound: int | None = None) -> ProbPolynomial:
    """Finite distribution with exact rational probabilities."""
    members = tuple((p, Fraction(w)) for p, w in members)
    if not members or sum(w for _, w in members) != 1 or any(w < 0 for _, w in members):
        raise ValueError("probabilities must be non-negative and sum to 1")
    arity = members[0][0].arity
    if any(p.arity != arity for p, _ in members):
        raise ValueError("support members must share one arity")
    denom = math.lcm(*(w.denominator for _, w in members))
    cuts = np.cumsum([int(w * denom) for _, w in members])
    bound = degree_bound if degree_bound is not None else max(p.degree for p, _ in members)

    def sampler(seed: int) -> CubePolynomial:
        u = int(rng_for(seed).integers(denom))
        return members[int(np.searchsorted(cuts, u, side="right"))][0]

    return ProbPolynomial(arity, bound, sampler, lambda: members, {"kind": "finite"})


def compose_prob(outer: ProbPolynomial, inners: Sequence[ProbPolynomial]) -> ProbPolynomial:
    """Independent draws of ``outer`` and every inner, composed symbolically."""
    inners = tuple(inners)
    if len(inners) != outer.arity:
        raise ValueError(f"outer has arity {outer.arity}, got {len(inners)} inners")
    m = inners[0].arity
    if any(q.arity != m for q in inners):
        raise ValueError("inner probabilistic polynomials must share one arity")

    def sampler(seed: int) -> CubePolynomial:
        o = outer.sample(mix(seed, 0))
        return Composed(o, [q.sample(mix(seed, i + 1)) for i, q in enumerate(inners)])

    def support():
        out = []
        for combo in product(outer.support, *(q.support for q in inners)):
            (o, w0), rest = combo[0], combo[1:]
            out.append((Composed(o, [q for q, _ in rest]), w0 * math.prod(w for _, w in rest)))
        return out

    finite = (outer.support_fn is not None and all(q.support_fn is not None for q in inners)
              and len(outer.support) * math.prod(len(q.support) for q in inners) <= SUPPORT_CAP)
    support_fn = support if finite else None

    bound = outer.degree_bound * max(q.degree_bound for q in inners)
    return ProbPolynomial(m, bound, sampler, support_fn, {"kind": "compose"})


def _transform(pp: ProbPolynomial, arity: int, wrap: Callable[[CubePolynomial], CubePolynomial], kind: str) -> ProbPolynomial:
    support_fn = None
    if pp.support_fn is not None:
        support_fn = lambda: [(wrap(p), w) for p, w in pp.support]
    return ProbPolynomial(arity, pp.degree_bound, lambda seed: wrap(pp.sample(seed)), support_fn, {"kind": kind})


def restrict_prob(pp: ProbPolynomial, rho: Restriction, keep_arity: bool = False) -> ProbPolynomial:
    """Fix variables to constants.  With ``keep_arity`` the fixed variables stay as dummies."""
    if len(rho) != pp.arity:
        raise ValueError(f"restriction length {len(rho)} != arity {pp.arity}")
    arity, pull = restriction_pull(rho, keep_arity)
    return _transform(pp, arity, lambda p: Pullback(p, arity, pull), "restrict")


def project_prob(pp: ProbPolynomial, nu: Projection) -> ProbPolynomial:
    if len(nu) != pp.arity:
        raise ValueError(f"projection covers {len(nu)} variables, arity is {pp.arity}")
    pull = projection_pull(nu)
    return _transform(pp, nu.target_arity, lambda p: Pullback(p, nu.target_arity, pull), "project")


def shift_prob(pp: ProbPolynomial, y: int) -> ProbPolynomial:
    """Substitute ``x_i -> 1 - x_i`` wherever bit ``i`` of ``y`` is set."""
    if y >> pp.arity:
        raise ValueError("shift has bits beyond the arity")
    if y == 0:
        return pp
    return _transform(pp, pp.arity, lambda p: Pullback(p, pp.arity, lambda xs: xs ^ y), "shift")


def complement_prob(pp: ProbPolynomial) -> ProbPolynomial:
    return _transform(pp, pp.arity, Complemented, "complement")


def permute_prob(pp: ProbPolynomial, order: Sequence[int]) -> ProbPolynomial:
    """Variable ``order[k]`` of ``pp`` becomes variable ``k``."""
    return project_prob(pp, Projection.permutation(order))


# --- error reduction ---------------------------------------------------------------

def binomial_tail(ell: int, eps: Fraction) -> Fraction:
    """Exact ``Pr[Bin(ell, eps) >= ell/2]``."""
    eps = Fraction(eps)
    lo = (ell + 1) // 2
    return sum((math.comb(ell, k) * eps ** k * (1 - eps) ** (ell - k) for k in range(lo, ell + 1)), Fraction(0))


@lru_cache(maxsize=256)
def majority_copies(eps: Fraction, delta: Fraction, limit: int = 10_001) -> int:
    """Smallest odd ``ell`` whose binomial tail at ``eps`` is at most ``delta``."""
    eps, delta = Fraction(eps), Fraction(delta)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError(f"error {eps} must lie in [0, 1/2)")
    if delta <= 0:
        raise ValueError("target error must be positive")
    for ell in range(1, limit + 1, 2):
        if binomial_tail(ell, eps) <= delta:
            return ell
    raise ValueError(f"no odd ell <= {limit} reaches {delta}")


@lru_cache(maxsize=64)
def _majority_lift(ell: int) -> ProbPolynomial:
    return lift_exact(majority_form(ell))


def reduce_error(pp: ProbPolynomial, eps: Fraction, delta: Fraction) -> ProbPolynomial:
    """Majority of ``ell`` independent copies, with ``ell`` from the exact binomial tail.

    When ``delta >= eps`` a single copy already suffices and ``pp`` is returned.
    """
    ell = majority_copies(eps, delta)
    if ell == 1:
        return pp
    out = compose_prob(_majority_lift(ell), [pp] * ell)
    return ProbPolynomial(out.arity, out.degree_bound, out.sampler, out.support_fn,
                          {"kind": "reduce", "ell": ell, "eps": str(eps), "delta": str(delta)})


# --- error measurement ---------------------------------------------------------------

def hoeffding_radius(trials: int, confidence: Fraction = DEFAULT_CONFIDENCE) -> float:
    """Two-sided Hoeffding radius: ``Pr[|p_hat - p| >= r] <= 1 - confidence``."""
    alpha = 1 - Fraction(confidence)
    return math.sqrt(math.log(2 / float(alpha)) / (2 * trials))


@dataclass(frozen=True)
class ErrorEstimate:
    input: int
    arity: int
    mode: str
    estimate: Fraction
    trials: int | None = None
    radius: float | None = None

    def upper(self) -> float:
        return float(self.estimate) + (self.radius or 0.0)

    def to_json(self) -> dict:
        return {
            "input": bitstring(self.input, self.arity),
            "mode": self.mode,
            "estimate": float(self.estimate),
            "estimate_exact": f"{self.estimate.numerator}/{self.estimate.denominator}",
            "trials": self.trials,
            "radius": self.radius,
        }


@dataclass(frozen=True)
class ErrorReport:
    entries: tuple[ErrorEstimate, ...]
    degree_bound: int
    seed_0: int | None
    confidence: Fraction

    @property
    def max_error(self) -> Fraction:
        return max((e.estimate for e in self.entries), default=Fraction(0))

    def within(self, bound) -> bool:
        """Every estimate at most ``bound`` plus its radius."""
        return all(float(e.estimate) <= float(bound) + (e.radius or 0.0) + 1e-12 for e in self.entries)

    def to_json(self) -> dict:
        return {
            "records": [e.to_json() for e in self.entries],
            "summary": {
                "max_error": float(self.max_error),
                "degree_bound": self.degree_bound,
                "seed_0": self.seed_0,
                "confidence": float(self.confidence),
            },
        }


_ACTIVE: tuple | None = None


def _count_chunk(seeds: tuple[int, int]) -> np.ndarray:
    pp, xs, truth = _ACTIVE
    lo, hi = seeds
    counts = np.zeros(len(xs), dtype=np.int64)
    for s in range(lo, hi):
        vals = pp.sample(s).at_cube_many(xs)
        counts += (vals != truth).astype(bool)
    return counts


def _jobs(jobs: int | None) -> int:
    if jobs is None:
        jobs = int(os.environ.get("PDEGLAB_JOBS", "1"))
    return max(1, jobs)


def mismatch_counts(pp: ProbPolynomial, truth: np.ndarray, xs: np.ndarray, seed_0: int, trials: int,
                    jobs: int | None = None) -> np.ndarray:
    """Per-input count of seeds in ``[seed_0, seed_0 + trials)`` whose sample disagrees with ``truth``."""
    global _ACTIVE
    jobs = _jobs(jobs)
    xs = mask_array(xs, pp.arity)
    truth = np.asarray(truth, dtype=np.int64)
    _ACTIVE = (pp, xs, truth)
    try:
        if jobs == 1 or trials < 2 * jobs:
            return _count_chunk((seed_0, seed_0 + trials))
        edges = np.linspace(seed_0, seed_0 + trials, jobs + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            return sum(pool.map(_count_chunk, chunks))
    finally:
        _ACTIVE = None


def error_scan(pp: ProbPolynomial, f: BooleanFunction, inputs: Sequence[int] | None = None, *,
               mode: str = "monte-carlo", trials: int = 10_000, seed_0: int = 0,
               confidence: Fraction = DEFAULT_CONFIDENCE, jobs: int | None = None) -> ErrorReport:
    """Per-input error of ``pp`` against ``f`` over ``inputs`` (default: every input)."""
    if pp.arity != f.arity:
        raise ValueError(f"arity mismatch: {pp.arity} vs {f.arity}")
    xs = list(range(1 << f.arity)) if inputs is None else [int(a) for a in inputs]
    truth = f.table[np.asarray(xs, dtype=np.int64)].astype(np.int64)
    if mode == "exact":
        support = pp.support
        if support is None:
            raise ValueError("exact mode needs an enumerable support")
        errs = [Fraction(0)] * len(xs)
        arr = mask_array(xs, pp.arity)
        for poly, w in support:
            bad = (poly.at_cube_many(arr) != truth).astype(bool)
            for k in np.flatnonzero(bad):
                errs[k] += w
        entries = tuple(ErrorEstimate(x, f.arity, "exact", e) for x, e in zip(xs, errs))
        return ErrorReport(entries, pp.degree_bound, None, Fraction(1))
    if mode != "monte-carlo":
        raise ValueError(f"unknown mode {mode!r}")
    counts = mismatch_counts(pp, truth, np.asarray(xs), seed_0, trials, jobs)
    radius = hoeffding_radius(trials, confidence)
    entries = tuple(ErrorEstimate(x, f.arity, "monte-carlo", Fraction(int(c), trials), trials, radius)
                    for x, c in zip(xs, counts))
    return ErrorReport(entries, pp.degree_bound, seed_0, Fraction(confidence))


def error_at(pp: ProbPolynomial, f: BooleanFunction, a: int | Sequence[int], mode: str = "monte-carlo", *,
             trials: int = 10_000, seed_0: int = 0, confidence: Fraction = DEFAULT_CONFIDENCE) -> ErrorEstimate:
    if not isinstance(a, (int, np.integer)):
        a = sum(int(b) << i for i, b in enumerate(a))
    return error_scan(pp, f, [int(a)], mode=mode, trials=trials, seed_0=seed_0, confidence=confidence).entries[0]


def certify_degrees(pp: ProbPolynomial, seeds: Sequence[int]) -> int:
    """Materialise samples and check each against the degree certificate; returns the max degree seen."""
    worst = 0
    for s in seeds:
        d = pp.sampler(s & MASK64).degree
        if d > pp.degree_bound:
            raise AssertionError(f"seed {s}: degree {d} exceeds certificate {pp.degree_bound}")
        worst = max(worst, d)
    return worst
