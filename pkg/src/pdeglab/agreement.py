"""Exact agreement of low-degree polynomials with a function on a point set.

A function ``g`` on ``X`` is *bad* for degree ``d`` when some multilinear
polynomial of degree at most ``d`` agrees with it on at least ``9|X|/10``
points.  If ``F`` restricted to ``X`` is not bad, averaging over the uniform
distribution on ``X`` shows no degree-``d`` polynomial distribution can have
error below ``1/10`` everywhere, so ``pdeg_{1/10}(F) > d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Sequence

from .boolfn import BooleanFunction
from .polynomial import LinearSystemSolution, solve_agreement_system
from .probpoly import DEFAULT_CONFIDENCE, hoeffding_radius, rng_for

POINT_CAP = 16
EXACT_FRACTION_CAP = 10


@dataclass(frozen=True)
class AgreementInstance:
    arity: int
    points: tuple[int, ...]
    values: tuple[int, ...]
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(x) for x in self.points))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if not self.points:
            raise ValueError("need at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be distinct")
        if len(self.values) != len(self.points) or any(v not in (0, 1) for v in self.values):
            raise ValueError("need one bit per point")
        if any(x >> self.arity for x in self.points):
            raise ValueError("point outside the cube")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")

    @classmethod
    def of(cls, f: BooleanFunction | Callable[[int], int], points: Sequence[int], degree: int,
           arity: int | None = None) -> "AgreementInstance":
        arity = f.arity if isinstance(f, BooleanFunction) else arity
        if arity is None:
            raise ValueError("arity required for a plain callable")
        return cls(arity, tuple(points), tuple(int(f(int(x))) for x in points), degree)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def threshold(self) -> int:
        return math.ceil(Fraction(9 * self.size, 10))


@dataclass(frozen=True)
class Agreement:
    k: int
    kept: tuple[int, ...]
    witness: LinearSystemSolution | None

    def to_json(self, arity: int) -> dict:
        out = {"k": self.k, "kept": list(self.kept), "witness": None, "bit_size": None}
        if self.witness is not None:
            out["witness"] = self.witness.polynomial.to_json()
            out["bit_size"] = self.witness.bit_size
            out["bit_bound"] = self.witness.bit_bound
        return out


def _search(inst: AgreementInstance, floor: int) -> Agreement | None:
    """Largest ``k >= floor`` with a matching polynomial on some ``k`` points, deletions in lexicographic order."""
    m = inst.size
    if m > POINT_CAP:
        raise ValueError(f"{m} points exceed the search cap of {POINT_CAP}")
    for k in range(m, max(floor, 0) - 1, -1):
        for deleted in combinations(range(m), m - k):
            gone = set(deleted)
            kept = tuple(i for i in range(m) if i not in gone)
            sol = solve_agreement_system([inst.points[i] for i in kept], [inst.values[i] for i in kept],
                                         inst.degree, inst.arity)
            if sol is not None:
                return Agreement(k, kept, sol)
    return None


def max_agreement(inst: AgreementInstance) -> Agreement:
    found = _search(inst, 0)
    assert found is not None   # the empty subset is always matched
    return found


def witness_matches(inst: AgreementInstance, found: Agreement) -> bool:
    if found.witness is None:
        return found.k == 0
    p = found.witness.polynomial
    return all(p.at_cube(inst.points[i]) == inst.values[i] for i in found.kept)


def is_bad(inst: AgreementInstance) -> bool:
    return _search(inst, inst.threshold) is not None


def pdeg_lower_certificate(f: BooleanFunction | Callable[[int], int], points: Sequence[int], degree: int,
                           arity: int | None = None) -> bool:
    """True when ``f`` on ``points`` is not bad, which certifies ``pdeg_{1/10}(f) > degree``."""
    return not is_bad(AgreementInstance.of(f, points, degree, arity))


@dataclass(frozen=True)
class FractionEstimate:
    mode: str
    estimate: Fraction
    trials: int
    radius: float | None

    def to_json(self) -> dict:
        return {"mode": self.mode, "estimate": float(self.estimate),
                "estimate_exact": f"{self.estimate.numerator}/{self.estimate.denominator}",
                "trials": self.trials, "radius": self.radius}


def bad_fraction(arity: int, points: Sequence[int], degree: int, trials: int | None = None, seed: int = 0,
                 confidence: Fraction = DEFAULT_CONFIDENCE) -> FractionEstimate:
    """Fraction of labelings ``g: X -> {0,1}`` that are bad; exact when ``trials`` is None."""
    points = tuple(points)
    if trials is None:
        if len(points) > EXACT_FRACTION_CAP:
            raise ValueError(f"exact enumeration capped at {EXACT_FRACTION_CAP} points")
        bad = sum(is_bad(AgreementInstance(arity, points, g, degree)) for g in product((0, 1), repeat=len(points)))
        total = 1 << len(points)
        return FractionEstimate("exact", Fraction(bad, total), total, None)
    rng = rng_for(seed)
    bad = 0
    for _ in range(trials):
        g = tuple(int(v) for v in rng.integers(0, 2, len(points)))
        bad += is_bad(AgreementInstance(arity, points, g, degree))
    return FractionEstimate("monte-carlo", Fraction(bad, trials), trials, hoeffding_radius(trials, confidence))
