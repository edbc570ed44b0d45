"""Exact two-phase simplex over the rationals with Bland's rule.

Solves ``min c.x  s.t.  A x = b,  x >= 0`` with :class:`fractions.Fraction`
arithmetic throughout.  Problem sizes here are tiny (a few dozen rows and
columns), so a dense tableau is fine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    # y with A^T y <= c at optimality; for INFEASIBLE a Farkas vector:
    # y^T A <= 0 and y^T b > 0.
    duals: list[Fraction] | None = None
    # for UNBOUNDED: d >= 0 with A d = 0 and c.d < 0
    ray: list[Fraction] | None = None
    pivots: int = field(default=0)


class _Tableau:
    def __init__(self, A, b, n):
        m = len(A)
        self.m, self.n = m, n
        self.sign = []
        self.rows = []
        for i in range(m):
            s = -1 if b[i] < 0 else 1
            self.sign.append(s)
            row = [Fraction(s * a) for a in A[i]]
            row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
            row.append(Fraction(s * b[i]))
            self.rows.append(row)
        self.basis = [n + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r, s):
        prow = self.rows[r]
        piv = prow[s]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[s]
                if f:
                    row[:] = [v - f * w for v, w in zip(row, prow)]
        self.basis[r] = s
        self.pivots += 1

    def reduced_costs(self, cost):
        width = len(self.rows[0]) - 1 if self.rows else self.n + self.m
        d = list(cost) + [Fraction(0)] * (width - len(cost))
        obj = Fraction(0)
        for row, bv in zip(self.rows, self.basis):
            cb = d_cost(cost, bv)
            if cb:
                for j in range(width):
                    d[j] -= cb * row[j]
                obj += cb * row[-1]
        return d, obj

    def run(self, cost, allowed):
        """Bland's rule iterations; returns (status, entering column)."""
        while True:
            d, _ = self.reduced_costs(cost)
            enter = next((j for j in allowed if d[j] < 0), None)
            if enter is None:
                return OPTIMAL, None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED, enter
            self.pivot(best[1], enter)

    def solution(self, n):
        x = [Fraction(0)] * n
        for row, bv in zip(self.rows, self.basis):
            if bv < n:
                x[bv] = row[-1]
        return x


def d_cost(cost, j):
    return cost[j] if j < len(cost) else Fraction(0)


def simplex(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimize ``c.x`` subject to ``A x = b``, ``x >= 0``, exactly."""
    m = len(A)
    n = len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise LPError("inconsistent LP dimensions")
    c = [Fraction(v) for v in c]
    t = _Tableau(A, b, n)

    # phase 1: minimize the sum of artificials
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    status, _ = t.run(phase1, range(n))
    if status != OPTIMAL:
        raise LPError("phase 1 cannot be unbounded")
    d1, infeas = t.reduced_costs(phase1)
    if infeas > 0:
        # duals of phase 1 (y_i = 1 - d_{n+i}), mapped back through row flips
        y = [t.sign[i] * (1 - d1[n + i]) for i in range(m)]
        return LPResult(INFEASIBLE, duals=y, pivots=t.pivots)

    # drive artificials out of the basis; drop redundant rows
    keep = []
    for r in range(len(t.rows)):
        if t.basis[r] >= n:
            col = next((j for j in range(n) if t.rows[r][j] != 0), None)
            if col is None:
                continue
            t.pivot(r, col)
        keep.append(r)
    dropped = [r for r in range(len(t.rows)) if r not in keep]
    if dropped:
        t.rows = [t.rows[r] for r in keep]
        t.basis = [t.basis[r] for r in keep]

    status, enter = t.run(c, range(n))
    if status == UNBOUNDED:
        ray = [Fraction(0)] * n
        ray[enter] = Fraction(1)
        for row, bv in zip(t.rows, t.basis):
            if bv < n:
                ray[bv] = -row[enter]
        return LPResult(UNBOUNDED, x=t.solution(n), ray=ray, pivots=t.pivots)

    d, obj = t.reduced_costs(c)
    # artificial columns still hold B^-1, so y_i = -d_{n+i}
    y = [t.sign[i] * (-d[n + i]) for i in range(m)]
    return LPResult(OPTIMAL, x=t.solution(n), objective=obj, duals=y, pivots=t.pivots)
