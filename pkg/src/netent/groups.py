"""Finite groups as Cayley tables, subgroup families, and the entropy vectors
and quasi-uniform distributions they induce."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distributions import (
    ConditionalIndex,
    DistributionError,
    JointDistribution,
    NonUniformError,
    check_quasi_uniform,
    conditional_index,
    entropy_compare,
    entropy_of,
    shannon_entropy_float,
)
from .setfn import ExactScalar, SetFunction, members, nonempty_subsets, to_mask

MAX_ORDER = 5040


class GroupAxiomError(ValueError):
    """A table or subset failed a group axiom; ``axiom`` names which."""

    def __init__(self, axiom: str, detail: str):
        super().__init__(f"{axiom}: {detail}")
        self.axiom = axiom
        self.detail = detail


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    table: np.ndarray
    identity: int
    inverse: tuple[int, ...]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def generate(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens`` (finite, so closure under products suffices)."""
        elems = {self.identity}
        frontier = list(set(gens))
        elems.update(frontier)
        gens = list(elems)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = int(self.table[a, g])
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
            frontier = nxt
        return frozenset(elems)

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        if self.identity not in s:
            return False
        idx = np.fromiter(s, dtype=int)
        if not set(self.table[np.ix_(idx, idx)].ravel().tolist()) <= s:
            return False
        return all(self.inverse[a] in s for a in s)

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups: joins of cyclic subgroups, closed under pairwise joins."""
        found = {self.generate([g]) for g in range(self.order)}
        frontier = set(found)
        while frontier:
            new = set()
            for a in frontier:
                for b in found:
                    j = self.generate(a | b)
                    if j not in found and j not in new:
                        new.add(j)
            found |= new
            frontier = new
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def left_coset_label(self, g: int, sub: frozenset[int]) -> int:
        """Canonical label of ``g * sub``: its smallest element index."""
        return min(int(self.table[g, h]) for h in sub)

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}


def validate_group(table: Sequence[Sequence[int]]) -> FiniteGroup:
    """Check the group axioms on a Cayley table and return the group.

    Associativity uses Light's test: it is enough to check
    ``(x*s)*y == x*(s*y)`` for ``s`` in a generating set.
    """
    try:
        T = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise GroupAxiomError("shape", f"table is not an integer matrix ({exc})") from None
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise GroupAxiomError("shape", f"table must be a nonempty square matrix, got shape {T.shape}")
    m = T.shape[0]
    if m > MAX_ORDER:
        raise GroupAxiomError("shape", f"order {m} exceeds the limit {MAX_ORDER}")
    bad = np.argwhere((T < 0) | (T >= m))
    if len(bad):
        a, b = bad[0]
        raise GroupAxiomError("closure", f"{a}*{b} = {T[a, b]} is not an element")

    ar = np.arange(m)
    ident = [e for e in range(m) if (T[e] == ar).all() and (T[:, e] == ar).all()]
    if not ident:
        raise GroupAxiomError("identity", "no two-sided identity element")
    e = ident[0]

    inverse = []
    for a in range(m):
        cand = np.flatnonzero((T[a] == e) & (T[:, a] == e))
        if not len(cand):
            raise GroupAxiomError("inverse", f"element {a} has no two-sided inverse")
        inverse.append(int(cand[0]))

    # generating set for the magma
    gens: list[int] = []
    closure = {e}
    for g in range(m):
        if g in closure:
            continue
        gens.append(g)
        closure = _magma_closure(T, closure | {g}, gens)
    for s in gens:
        left = T[T[:, s], :]    # (x*s)*y
        right = T[:, T[s, :]]   # x*(s*y)
        diff = np.argwhere(left != right)
        if len(diff):
            x, y = diff[0]
            raise GroupAxiomError("associativity", f"({x}*{s})*{y} != {x}*({s}*{y})")
    return FiniteGroup(m, T, e, tuple(inverse))


def _magma_closure(T, start: set, gens: list[int]) -> set:
    elems = set(start)
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                for c in (int(T[a, g]), int(T[g, a])):
                    if c not in elems:
                        elems.add(c)
                        nxt.append(c)
        frontier = nxt
    return elems


# -- constructors ------------------------------------------------------------


def _compose(p: tuple, q: tuple) -> tuple:
    """``p * q`` applies ``q`` first: ``(p*q)(x) = p(q(x))``."""
    return tuple(p[x] for x in q)


def permutation_closure(degree: int, generators: Iterable[Sequence[int]]) -> list[tuple]:
    ident = tuple(range(degree))
    gens = []
    for g in generators:
        g = tuple(int(x) for x in g)
        if sorted(g) != list(ident):
            raise GroupAxiomError("shape", f"{list(g)} is not a permutation of 0..{degree - 1}")
        gens.append(g)
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = _compose(a, g)
                if c not in elems:
                    elems.add(c)
                    nxt.append(c)
                    if len(elems) > MAX_ORDER:
                        raise GroupAxiomError("shape", f"group order exceeds {MAX_ORDER}")
        frontier = nxt
    return sorted(elems)


def from_permutations(degree: int, generators, subgroup_generators=()) -> "SubgroupFamily | FiniteGroup":
    """Expand a permutation group (and optional subgroup generators) to tables.

    Elements are indexed in lexicographic order, so the identity is 0.
    Returns a :class:`SubgroupFamily` when subgroup generators are given,
    otherwise the bare :class:`FiniteGroup`.
    """
    elems = permutation_closure(degree, generators)
    index = {p: k for k, p in enumerate(elems)}
    table = [[index[_compose(a, b)] for b in elems] for a in elems]
    group = validate_group(table)
    if not subgroup_generators:
        return group
    subs = []
    for gens in subgroup_generators:
        idx = []
        for g in gens:
            g = tuple(int(x) for x in g)
            if g not in index:
                raise GroupAxiomError("closure", f"subgroup generator {list(g)} is not in the group")
            idx.append(index[g])
        subs.append(group.generate(idx))
    return SubgroupFamily(group, tuple(subs))


def cyclic(m: int) -> FiniteGroup:
    return validate_group([[(a + b) % m for b in range(m)] for a in range(m)])


def elementary_abelian(k: int) -> FiniteGroup:
    """(Z2)^k with elements as bit vectors (XOR)."""
    m = 1 << k
    return validate_group([[a ^ b for b in range(m)] for a in range(m)])


def symmetric(d: int) -> FiniteGroup:
    gens = [tuple([1, 0] + list(range(2, d)))]
    if d > 2:
        gens.append(tuple(list(range(1, d)) + [0]))
    return from_permutations(d, gens)


def dihedral(k: int) -> FiniteGroup:
    """Symmetries of a k-gon (order 2k)."""
    rot = tuple((x + 1) % k for x in range(k))
    ref = tuple((-x) % k for x in range(k))
    return from_permutations(k, [rot, ref])


def alternating(d: int) -> FiniteGroup:
    """Generated by the 3-cycles (0 1 j)."""
    return from_permutations(d, [_three_cycle(d, 0, 1, j) for j in range(2, d)])


def _three_cycle(d: int, a: int, b: int, c: int) -> tuple:
    p = list(range(d))
    p[a], p[b], p[c] = b, c, a
    return tuple(p)


# -- subgroup families ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubgroupFamily:
    """A group with marked subgroups ``G_1..G_n`` (optionally labeled)."""

    parent: FiniteGroup
    subgroups: tuple[frozenset[int], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        subs = tuple(frozenset(int(x) for x in s) for s in self.subgroups)
        object.__setattr__(self, "subgroups", subs)
        for k, s in enumerate(subs):
            if any(not 0 <= x < self.parent.order for x in s):
                raise GroupAxiomError("closure", f"subgroup {k + 1} has elements outside the group")
            if self.parent.identity not in s:
                raise GroupAxiomError("identity", f"subgroup {k + 1} does not contain the identity")
            if not self.parent.is_subgroup(s):
                raise GroupAxiomError("closure", f"subset {k + 1} {sorted(s)} is not a subgroup")
        if self.labels is not None:
            if len(self.labels) != len(subs) or len(set(self.labels)) != len(subs):
                raise ValueError("labels must be distinct and match the subgroups")

    @property
    def n(self) -> int:
        return len(self.subgroups)

    def by_label(self) -> dict[str, frozenset[int]]:
        labels = self.labels or tuple(str(k + 1) for k in range(self.n))
        return dict(zip(labels, self.subgroups))

    def to_json(self) -> dict:
        out = {"order": self.parent.order, "table": self.parent.table.tolist(),
               "subgroups": [sorted(s) for s in self.subgroups]}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "SubgroupFamily":
        if "table" in data:
            group = validate_group(data["table"])
            if "order" in data and int(data["order"]) != group.order:
                raise GroupAxiomError("shape", f"declared order {data['order']} != table size {group.order}")
            fam = cls(group, tuple(frozenset(s) for s in data.get("subgroups", ())),
                      tuple(data["labels"]) if "labels" in data else None)
        elif "generators" in data:
            fam = from_permutations(int(data["degree"]), data["generators"],
                                    data.get("subgroup_generators", ()))
            if isinstance(fam, FiniteGroup):
                fam = cls(fam, ())
        else:
            raise GroupAxiomError("shape", "group JSON needs 'table' or 'generators'")
        return fam


def intersect_subgroups(fam: SubgroupFamily, alpha) -> frozenset[int]:
    """``G_i`` intersected over the 1-based indices in ``alpha``."""
    idx = members(to_mask(alpha))
    if not idx:
        raise ValueError("alpha must be nonempty")
    if idx[-1] > fam.n:
        raise ValueError(f"alpha refers to subgroup {idx[-1]} of {fam.n}")
    out = fam.subgroups[idx[0] - 1]
    for i in idx[1:]:
        out = out & fam.subgroups[i - 1]
    assert fam.parent.is_subgroup(out)
    return out


def group_entropy_vector(fam: SubgroupFamily) -> SetFunction:
    """``h(alpha) = log2(|G| / |intersection of G_i, i in alpha|)``."""
    from .cones import in_gamma

    if not 1 <= fam.n <= 5:
        raise ValueError(f"need 1..5 subgroups, got {fam.n}")
    m = fam.parent.order
    h = SetFunction(fam.n, {
        mask: ExactScalar.log2(Fraction(m, len(intersect_subgroups(fam, mask))))
        for mask in nonempty_subsets(fam.n)
    })
    assert in_gamma(h).holds, "group-characterizable vector outside the polymatroid cone"
    return h


def quasi_uniform_distribution(fam: SubgroupFamily) -> JointDistribution:
    """``g`` uniform on G, ``U_i`` = canonical label of the left coset ``g G_i``."""
    G = fam.parent
    labels = tuple(f"U{k + 1}" for k in range(fam.n))
    outcomes = (tuple(G.left_coset_label(g, s) for s in fam.subgroups) for g in range(G.order))
    return JointDistribution.uniform(labels, outcomes)


# -- library -------------------------------------------------------------------


def library() -> dict[str, FiniteGroup]:
    """Small groups used by the test and acceptance sweeps."""
    return {
        "Z2xZ2": elementary_abelian(2),
        "Z2^3": elementary_abelian(3),
        "Z4": cyclic(4),
        "Z6": cyclic(6),
        "S3": symmetric(3),
        "D4": dihedral(4),
        "A4": alternating(4),
    }


def all_families(group: FiniteGroup, n: int = 4, ordered: bool = False):
    """Families of ``n`` subgroups: multisets by default, or all ordered tuples."""
    from itertools import combinations_with_replacement

    subs = group.subgroups()
    it = product(subs, repeat=n) if ordered else combinations_with_replacement(subs, n)
    for combo in it:
        yield SubgroupFamily(group, tuple(combo))


__all__ = [
    "GroupAxiomError", "FiniteGroup", "SubgroupFamily", "validate_group", "from_permutations",
    "permutation_closure", "cyclic", "elementary_abelian", "symmetric", "dihedral", "alternating",
    "intersect_subgroups", "group_entropy_vector", "quasi_uniform_distribution", "library",
    "all_families", "JointDistribution", "ConditionalIndex", "DistributionError", "NonUniformError",
    "check_quasi_uniform", "conditional_index", "entropy_of", "entropy_compare", "shannon_entropy_float",
]
