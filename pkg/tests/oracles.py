"""Slow, independent reimplementations used to cross-check the library."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import sympy


def table_of(f) -> tuple[int, ...]:
    return tuple(int(v) for v in f.table)


def bits(x: int, n: int) -> list[int]:
    return [(x >> i) & 1 for i in range(n)]


def degree_by_fourier(table, n) -> int:
    """Largest |S| with a nonzero +-1 Fourier coefficient."""
    best = 0
    for s in range(1 << n):
        total = sum((1 - 2 * table[x]) * (-1) ** bin(x & s).count("1") for x in range(1 << n))
        if total:
            best = max(best, bin(s).count("1"))
    return best


def interpolate(table, n) -> dict[int, Fraction]:
    """Solve the full 2^n x 2^n evaluation system with sympy."""
    size = 1 << n
    a = sympy.Matrix(size, size, lambda x, m: 1 if m & ~x == 0 else 0)
    sol = a.LUsolve(sympy.Matrix([table[x] for x in range(size)]))
    return {m: Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for m, c in enumerate(sol) if c != 0}


def sensitivity(table, n) -> int:
    return max(sum(table[x] != table[x ^ (1 << i)] for i in range(n)) for x in range(1 << n)) if n else 0


def block_sensitivity(table, n) -> int:
    blocks = [b for b in range(1, 1 << n)]
    best = 0
    for x in range(1 << n):
        sens = [b for b in blocks if table[x ^ b] != table[x]]

        def grow(used, count, start):
            nonlocal best
            best = max(best, count)
            for k in range(start, len(sens)):
                if sens[k] & used == 0:
                    grow(used | sens[k], count + 1, k + 1)

        grow(0, 0, 0)
    return best


def decision_depth(table, n) -> int:
    @lru_cache(maxsize=None)
    def depth(fixed: frozenset) -> int:
        vals = {table[x] for x in range(1 << n) if all((x >> i) & 1 == v for i, v in fixed)}
        if len(vals) == 1:
            return 0
        used = {i for i, _ in fixed}
        return min(1 + max(depth(fixed | {(i, 0)}), depth(fixed | {(i, 1)})) for i in range(n) if i not in used)

    return depth(frozenset())


def binomial_tail_by_enumeration(ell: int, eps: Fraction) -> Fraction:
    """Sum over all 2^ell outcome patterns, grouped by how many copies fail."""
    patterns = [0] * (ell + 1)
    for outcome in range(1 << ell):
        patterns[bin(outcome).count("1")] += 1
    return sum((patterns[k] * eps ** k * (1 - eps) ** (ell - k) for k in range(ell + 1) if 2 * k >= ell),
               Fraction(0))


def or_repetitions(eps) -> int:
    q = 1 - 1 / (2 * sympy.E)
    p = 1
    while sympy.N(q ** p - sympy.Rational(eps.numerator, eps.denominator), 60) > 0:
        p += 1
    return p


def solvable(points, values, d, m) -> bool:
    monos = [s for s in range(1 << m) if bin(s).count("1") <= d]
    if not points:
        return True
    a = sympy.Matrix([[1 if s & ~x == 0 else 0 for s in monos] for x in points])
    aug = a.row_join(sympy.Matrix(values))
    return a.rank() == aug.rank()


def max_agreement(points, values, d, m) -> int:
    for k in range(len(points), -1, -1):
        for keep in itertools.combinations(range(len(points)), k):
            if solvable([points[i] for i in keep], [values[i] for i in keep], d, m):
                return k
    return 0


def constant_bad_fraction(big_m: int) -> Fraction:
    """Degree 0: bad iff at least ceil(9M/10) labels coincide."""
    thr = math.ceil(Fraction(9 * big_m, 10))
    # thr > M/2, so the all-zero-majority and all-one-majority cases are disjoint
    count = sum(math.comb(big_m, k) for k in range(thr, big_m + 1)) * 2
    return Fraction(count, 2 ** big_m)


def ubd_value(t: int, r: int, x: int) -> int:
    """The Hadamard-addressing function from its definition, on bit lists."""
    s = 2 ** t
    n = s * r + s ** r + 1
    xb = bits(x, n)
    gs = [xb[j * s:(j + 1) * s] for j in range(r)]
    table = xb[s * r:s * r + s ** r]
    b = xb[-1]
    idx = []
    for g in gs:
        match = [beta for beta in range(s)
                 if all(g[alpha] == bin(beta & alpha).count("1") % 2 for alpha in range(s))]
        if not match:
            return b
        idx.append(match[0])
    return table[sum(i * s ** j for j, i in enumerate(idx))]
