"""Linear algebra over a prime field GF(p); vectors are tuples of ints mod p."""

from __future__ import annotations

from itertools import product
from typing import Sequence

Vector = tuple[int, ...]


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    k = 2
    while k * k <= q:
        if q % k == 0:
            return False
        k += 1
    return True


def rref(rows: Sequence[Sequence[int]], p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    work = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = pow(work[r][c], p - 2, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(rows, p: int, ncols: int) -> int:
    return len(rref(rows, p, ncols)[0]) if rows else 0


def span_contains(basis, v, p: int, ncols: int) -> bool:
    return rank(list(basis) + [list(v)], p, ncols) == rank(basis, p, ncols)


def is_subspace_of(inner, outer, p: int, ncols: int) -> bool:
    return all(span_contains(outer, v, p, ncols) for v in inner)


def annihilator(basis, p: int, ncols: int) -> list[Vector]:
    """Basis of ``{x : b . x = 0 for all b in basis}``."""
    R, piv = rref(basis, p, ncols) if basis else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, pc in zip(R, piv):
            x[pc] = (-row[f]) % p
        out.append(tuple(x))
    return out


def intersect(bases: Sequence, p: int, ncols: int) -> list[Vector]:
    """Basis of the intersection; the empty intersection is the whole space."""
    if not bases:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    dual = []
    for b in bases:
        dual.extend(annihilator(b, p, ncols))
    return annihilator(dual, p, ncols)


def coset_reducer(basis, p: int, ncols: int):
    """Map ``x`` to the canonical representative of ``x + span(basis)``
    (pivot columns of the reduced basis cleared)."""
    R, piv = rref(basis, p, ncols) if basis else ([], [])

    def reduce(x: Sequence[int]) -> Vector:
        x = [v % p for v in x]
        for row, pc in zip(R, piv):
            if x[pc]:
                f = x[pc]
                x = [(a - f * b) % p for a, b in zip(x, row)]
        return tuple(x)

    return reduce


def all_vectors(p: int, ncols: int):
    return product(range(p), repeat=ncols)
