"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's solution paths: invariant factors via
gcds of minors, lattice membership via closure enumeration in finite
quotients, cancellation via exhaustive quantification over small sets.
"""
from __future__ import annotations

from itertools import combinations, product
from math import gcd

from procat.zlinalg import IntMatrix


def minor_gcds(a: IntMatrix) -> list[int]:
    """g_k = gcd of all k x k minors (0 if all vanish), k = 1..min(r,c)."""

    def det(rows, cols):
        if len(rows) == 1:
            return a[rows[0], cols[0]]
        total = 0
        sign = 1
        for idx, r in enumerate(rows):
            sub = rows[:idx] + rows[idx + 1:]
            total += sign * a[r, cols[0]] * det(sub, cols[1:])
            sign = -sign
        return total

    out = []
    for k in range(1, min(a.rows, a.cols) + 1):
        g = 0
        for rows in combinations(range(a.rows), k):
            for cols in combinations(range(a.cols), k):
                g = gcd(g, det(list(rows), list(cols)))
        out.append(g)
    return out


def invariant_factors_from_minors(a: IntMatrix) -> list[int]:
    """d_k = g_k / g_{k-1}; once some g_k = 0 all later factors are 0."""
    gs = minor_gcds(a)
    out = []
    prev = 1
    for g in gs:
        if g == 0:
            out.append(0)
        else:
            out.append(g // prev)
            prev = g
    return out


class DiagQuotient:
    """Z^n modulo a diagonal lattice diag(d_1..d_n); d_i = 0 means a free axis.

    Only finite quotients can be fully enumerated, which is all the oracle
    needs.  Reduction is plain per-coordinate mod, independent of SNF.
    """

    def __init__(self, diag: list[int]):
        self.diag = [abs(d) for d in diag]
        if any(d == 0 for d in self.diag):
            raise ValueError("oracle quotient must be finite")

    @property
    def n(self) -> int:
        return len(self.diag)

    def reduce(self, vec: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(vec, self.diag))

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.diag))

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*[range(d) for d in self.diag]))

    def subgroup_generated(self, columns: list[tuple[int, ...]]) -> set[tuple[int, ...]]:
        zero = tuple(0 for _ in self.diag)
        seen = {zero}
        frontier = [zero]
        gens = [self.reduce(c) for c in columns]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = self.add(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen


def in_lattice_small_search(v: IntMatrix, gens: IntMatrix, coeff_bound: int = 6) -> bool:
    """Is v an integer combination of the columns of gens?  Tiny instances only."""
    k = gens.cols
    if k == 0:
        return v.is_zero()
    for coeffs in product(range(-coeff_bound, coeff_bound + 1), repeat=k):
        acc = [0] * v.rows
        for j, c in enumerate(coeffs):
            if c:
                for i in range(v.rows):
                    acc[i] += c * gens[i, j]
        if all(acc[i] == v[i, 0] for i in range(v.rows)):
            return True
    return False


def all_tables(src_size: int, dst_size: int):
    """All functions {0..src-1} -> {0..dst-1} as tuples."""
    return product(range(dst_size), repeat=src_size)
