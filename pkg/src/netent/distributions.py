"""Finite joint distributions with exact rational masses."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .setfn import ExactScalar, log2_compare


class DistributionError(ValueError):
    pass


class NonUniformError(DistributionError):
    """The exact entropy path only handles marginals uniform on their support."""


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint pmf over labeled variables; outcomes are tuples in ``labels`` order."""

    labels: tuple[str, ...]
    pmf: Mapping[tuple, Fraction]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise DistributionError(f"duplicate labels in {labels}")
        pmf = {}
        for outcome, p in self.pmf.items():
            outcome = tuple(outcome)
            if len(outcome) != len(labels):
                raise DistributionError(f"outcome {outcome} has wrong arity")
            p = Fraction(p)
            if p < 0:
                raise DistributionError(f"negative mass {p} at {outcome}")
            if p:
                pmf[outcome] = pmf.get(outcome, 0) + p
        if sum(pmf.values()) != 1:
            raise DistributionError(f"masses sum to {sum(pmf.values())}, not 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pmf", pmf)

    @classmethod
    def uniform(cls, labels: Sequence[str], outcomes: Iterable[tuple]) -> "JointDistribution":
        """Push the uniform measure on ``outcomes`` (repeats allowed) forward."""
        counts = Counter(tuple(o) for o in outcomes)
        total = sum(counts.values())
        return cls(tuple(labels), {o: Fraction(c, total) for o, c in counts.items()})

    def positions(self, variables: Iterable) -> tuple[int, ...]:
        out = []
        for v in variables:
            if isinstance(v, int):
                if not 0 <= v < len(self.labels):
                    raise DistributionError(f"variable position {v} out of range")
                out.append(v)
            else:
                try:
                    out.append(self.labels.index(v))
                except ValueError:
                    raise DistributionError(f"unknown variable {v!r}") from None
        return tuple(out)

    def project(self, outcome: tuple, pos: Sequence[int]) -> tuple:
        return tuple(outcome[k] for k in pos)

    def marginal(self, variables: Iterable) -> dict[tuple, Fraction]:
        pos = self.positions(variables)
        out: dict[tuple, Fraction] = defaultdict(Fraction)
        for o, p in self.pmf.items():
            out[self.project(o, pos)] += p
        return dict(out)

    def support(self, variables: Iterable = None) -> list[tuple]:
        if variables is None:
            return sorted(self.pmf, key=repr)
        return sorted(self.marginal(variables), key=_order_key)

    def alphabet(self, variable) -> list:
        return sorted({o[0] for o in self.marginal([variable])}, key=_order_key)

    def with_variable(self, label: str, fn: Callable[[tuple], Hashable]) -> "JointDistribution":
        """Append a variable that is a deterministic function of the outcome."""
        return JointDistribution(self.labels + (label,), {o + (fn(o),): p for o, p in self.pmf.items()})

    def restrict(self, variables: Iterable) -> "JointDistribution":
        variables = list(variables)
        return JointDistribution(tuple(self.labels[k] for k in self.positions(variables)), self.marginal(variables))


def _order_key(x):
    return (type(x).__name__, x) if not isinstance(x, tuple) else ("tuple", tuple(_order_key(v) for v in x))


def _variables(dist: JointDistribution, alpha) -> list:
    if isinstance(alpha, int) and not isinstance(alpha, bool):
        # bitmask over positions (bit k = variable k)
        return [k for k in range(len(dist.labels)) if alpha >> k & 1]
    if isinstance(alpha, str):
        return [alpha]
    return list(alpha)


def entropy_of(dist: JointDistribution, alpha) -> ExactScalar:
    """Exact entropy (bits) of the variables ``alpha``.

    ``alpha`` is a label, an iterable of labels/positions, or a bitmask over
    positions.  The marginal must be uniform on its support of size ``s``,
    and the result is ``log2(s)``.
    """
    variables = _variables(dist, alpha)
    if not variables:
        raise DistributionError("alpha must be nonempty")
    marg = dist.marginal(variables)
    masses = set(marg.values())
    if len(masses) != 1:
        raise NonUniformError(f"marginal of {variables} is not uniform on its support")
    return ExactScalar.log2(len(marg))


def shannon_entropy_float(dist: JointDistribution, alpha) -> float:
    """Floating-point Shannon entropy in bits (diagnostics only)."""
    marg = dist.marginal(_variables(dist, alpha))
    return -sum(float(p) * math.log2(float(p)) for p in marg.values())


def entropy_compare(dist: JointDistribution, alpha, target: ExactScalar) -> int:
    """Exact sign of ``H(alpha) - target`` for any rational pmf.

    With masses ``n_k / N``: ``N * H = log2(R)`` where ``R = N**N / prod n_k**n_k``.
    A log2 target ``log2(t)`` compares ``R`` with ``t**N``; a rational target
    ``x`` compares ``log2(R)`` with ``N * x``.
    """
    marg = dist.marginal(_variables(dist, alpha))
    N = math.lcm(*(p.denominator for p in marg.values()))
    R = Fraction(N**N)
    for p in marg.values():
        c = int(p * N)
        R /= Fraction(c) ** c
    if target.domain == "log2":
        lhs, rhs = R, target.arg**N
        return (lhs > rhs) - (lhs < rhs)
    return log2_compare(R, target.arg * N)


def determines(dist: JointDistribution, given, target) -> bool:
    """True iff ``target`` is a function of ``given`` on the support."""
    gpos = dist.positions(_variables(dist, given))
    tpos = dist.positions(_variables(dist, target))
    seen: dict[tuple, tuple] = {}
    for o in dist.pmf:
        if seen.setdefault(dist.project(o, gpos), dist.project(o, tpos)) != dist.project(o, tpos):
            return False
    return True


def _all_subsets(k: int):
    for size in range(1, k + 1):
        yield from combinations(range(k), size)


def check_quasi_uniform(dist: JointDistribution) -> bool:
    """Every marginal uniform on its support.

    This also makes each conditional of ``alpha`` given an instance of
    ``beta`` uniform of constant size: its mass is ``|S_beta| / |S_alpha,beta|``
    wherever positive.
    """
    k = len(dist.labels)
    for alpha in _all_subsets(k):
        pos = dist.positions(alpha)
        marg: dict[tuple, Fraction] = defaultdict(Fraction)
        for o, p in dist.pmf.items():
            marg[tuple(o[i] for i in pos)] += p
        if len(set(marg.values())) != 1:
            return False
    return True


@dataclass(frozen=True)
class ConditionalIndex:
    """Rank of ``target`` within its conditional support given ``given``.

    ``encode[(g, t)]`` is the rank of target value ``t`` under given value
    ``g``; ``decode[(g, r)]`` inverts it.
    """

    target: tuple
    given: tuple
    size: int
    encode: Mapping[tuple, int]
    decode: Mapping[tuple, tuple]

    def __call__(self, dist: JointDistribution, outcome: tuple) -> int:
        g = dist.project(outcome, dist.positions(self.given))
        t = dist.project(outcome, dist.positions(self.target))
        return self.encode[(g, t)]


def conditional_index(dist: JointDistribution, target, given) -> ConditionalIndex:
    """Build the conditional index of ``target`` given ``given``.

    Raises if the conditional support size varies across given-instances.
    """
    target = tuple(_variables(dist, target))
    given = tuple(_variables(dist, given))
    tpos, gpos = dist.positions(target), dist.positions(given)
    supports: dict[tuple, set] = defaultdict(set)
    for o in dist.pmf:
        supports[dist.project(o, gpos)].add(dist.project(o, tpos))
    sizes = {len(s) for s in supports.values()}
    if len(sizes) != 1:
        raise DistributionError(
            f"conditional support of {target} given {given} has varying sizes {sorted(sizes)}"
        )
    encode, decode = {}, {}
    for g, sup in supports.items():
        for r, t in enumerate(sorted(sup, key=_order_key)):
            encode[(g, t)] = r
            decode[(g, r)] = t
    return ConditionalIndex(target, given, sizes.pop(), encode, decode)
