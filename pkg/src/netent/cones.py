"""Membership in the polymatroid cone, Ingleton and Zhang-Yeung checks, and an
exact LP prover for Shannon-type inequalities."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .lp import INFEASIBLE, OPTIMAL, simplex
from .setfn import (
    MAX_N,
    RATIONAL,
    ExactScalar,
    InfoExpr,
    SetFunction,
    SetFunctionError,
    I,
    evaluate,
    full_set,
    nonempty_subsets,
    satisfies_condition1,
    condition1_gaps,
    subset,
    subset_key,
)


class CertificateError(AssertionError):
    """An LP certificate failed exact re-verification (a defect, never expected)."""


@dataclass(frozen=True)
class Inequality:
    """The assertion ``expr >= 0`` over ground set {1..n}."""

    expr: InfoExpr
    name: str
    n: int = 4

    def __post_init__(self):
        if self.expr.support >> self.n:
            raise SetFunctionError(f"{self.name}: mentions variables beyond {self.n}")

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": self.expr.to_json_coeffs(), "name": self.name}

    @classmethod
    def from_json(cls, data) -> "Inequality":
        try:
            n = int(data["n"])
            coeffs = {k: int(v) for k, v in data["coeffs"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise SetFunctionError(f"malformed inequality JSON: {exc}") from None
        if not 1 <= n <= MAX_N:
            raise SetFunctionError(f"n must be in 1..{MAX_N}")
        name = str(data.get("name", "inequality"))
        return cls(InfoExpr.from_coeffs(coeffs, name), name, n)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    margin: ExactScalar
    witness_roles: tuple[int, ...] | None = None
    witness_name: str | None = None
    instances: int = 1

    def to_json(self) -> dict:
        out = {"holds": self.holds, "margin": self.margin.to_json(), "instances": self.instances}
        if self.witness_roles is not None:
            out["witness_roles"] = list(self.witness_roles)
        if self.witness_name is not None:
            out["witness"] = self.witness_name
        return out


@dataclass
class ProofResult:
    provable: bool
    target: Inequality
    multipliers: dict[str, Fraction] = field(default_factory=dict)
    counterexample: SetFunction | None = None
    counterexample_value: ExactScalar | None = None

    def to_json(self) -> dict:
        out = {"provable": self.provable, "target": self.target.to_json()}
        if self.provable:
            out["multipliers"] = {k: str(v) for k, v in self.multipliers.items()}
        else:
            out["counterexample"] = self.counterexample.to_json()
            out["counterexample_value"] = self.counterexample_value.to_json()
        return out


# -- elemental inequalities --------------------------------------------------


def elemental_inequalities(n: int) -> list[Inequality]:
    """``H(i | rest) >= 0`` for each i, then ``I(i;j|K) >= 0`` for i < j."""
    return list(_elemental(n))


@lru_cache(maxsize=None)
def _elemental(n: int) -> tuple[Inequality, ...]:
    if not 2 <= n <= MAX_N:
        raise SetFunctionError(f"n must be in 2..{MAX_N}, got {n}")
    N = full_set(n)
    out = []
    for i in range(1, n + 1):
        rest = N & ~subset(i)
        expr = InfoExpr(((N, 1), (rest, -1)))
        name = f"H({i}|{subset_key(rest)})"
        out.append(Inequality(expr.named(name), name, n))
    for i, j in combinations(range(1, n + 1), 2):
        others = [k for k in range(1, n + 1) if k not in (i, j)]
        for size in range(len(others) + 1):
            for K in combinations(others, size):
                expr = I(subset(i), subset(j), subset(*K), n=n)
                out.append(Inequality(expr, expr.name, n))
    return tuple(out)


def _sweep_margin(v: SetFunction, ineqs) -> Verdict:
    margin = None
    first_bad = None
    for q in ineqs:
        val = evaluate(q.expr, v)
        if margin is None or val < margin:
            margin = val
        if first_bad is None and val.sign() < 0:
            first_bad = q.name
    return Verdict(first_bad is None, margin, None, first_bad, len(ineqs))


def in_gamma(v: SetFunction) -> Verdict:
    """Polymatroid test; ``margin`` is the smallest elemental value."""
    if v.n == 1:
        val = v(1)
        return Verdict(val.sign() >= 0, val, None, None if val.sign() >= 0 else "H(1)", 1)
    return _sweep_margin(v, _elemental(v.n))


# -- Ingleton and Zhang-Yeung --------------------------------------------------


def ingleton_inequality() -> Inequality:
    """h12+h13+h14+h23+h24 - h1 - h2 - h34 - h123 - h124 >= 0."""
    coeffs = {"12": 1, "13": 1, "14": 1, "23": 1, "24": 1,
              "1": -1, "2": -1, "34": -1, "123": -1, "124": -1}
    return Inequality(InfoExpr.from_coeffs(coeffs, "Ingleton"), "Ingleton", 4)


# Zhang-Yeung (1998), roles (i, j, k, l):
#   2 I(k;l) <= I(i;j) + I(i;kl) + 3 I(k;l|i) + I(k;l|j)
ZY_FORM = "2I(k;l) <= I(i;j) + I(i;kl) + 3I(k;l|i) + I(k;l|j)"


def zy_inequality(roles=(1, 2, 3, 4)) -> Inequality:
    i, j, k, l = (subset(r) for r in roles)
    rhs = I(i, j, n=4) + I(i, k | l, n=4) + 3 * I(k, l, i, n=4) + I(k, l, j, n=4)
    expr = rhs - 2 * I(k, l, n=4)
    name = "ZY" if tuple(roles) == (1, 2, 3, 4) else f"ZY{tuple(roles)}"
    return Inequality(expr.named(name), name, 4)


def check_instance(v: SetFunction, ineq: Inequality) -> Verdict:
    """Evaluate a single instance literally (no permutations)."""
    val = evaluate(ineq.expr, v)
    ok = val.sign() >= 0
    return Verdict(ok, val, None if ok else tuple(range(1, ineq.n + 1)), None if ok else ineq.name)


def check_all_permutations(v: SetFunction, ineq: Inequality) -> Verdict:
    """Evaluate ``ineq`` under every assignment of variables to its roles.

    Role assignment ``rho`` substitutes variable ``t`` of ``ineq`` by
    ``rho[t-1]``.  Instances with identical coefficients are evaluated once.
    The witness is the first assignment (lexicographic) reaching the
    minimum margin.
    """
    if v.n != ineq.n:
        raise SetFunctionError(f"vector has n={v.n}, inequality has n={ineq.n}")
    instances = _distinct_instances(ineq.expr, ineq.n)
    best = None
    for rho, inst in instances:
        val = evaluate(inst, v)
        if best is None or val < best[0]:
            best = (val, rho)
    margin, rho = best
    if margin.sign() >= 0:
        return Verdict(True, margin, None, None, len(instances))
    return Verdict(False, margin, rho, f"{ineq.name} with roles {rho}", len(instances))


@lru_cache(maxsize=256)
def _distinct_instances(expr: InfoExpr, n: int) -> tuple[tuple[tuple[int, ...], InfoExpr], ...]:
    seen = {}
    for rho in permutations(range(1, n + 1)):
        inst = expr.relabel(rho)
        seen.setdefault(inst.terms, (rho, inst))
    return tuple(seen.values())


# -- Shannon prover ------------------------------------------------------------


def _verify_multipliers(target: Inequality, rows: list[Inequality], y: list[Fraction]) -> bool:
    if any(v < 0 for v in y):
        return False
    acc: dict[int, Fraction] = {}
    for w, q in zip(y, rows):
        if w:
            for m, c in q.expr.terms:
                acc[m] = acc.get(m, 0) + w * c
    acc = {m: c for m, c in acc.items() if c}
    return acc == {m: Fraction(c) for m, c in target.expr.terms}


def _verify_counterexample(target: Inequality, ray: SetFunction) -> bool:
    return in_gamma(ray).holds and evaluate(target.expr, ray).sign() < 0


def shannon_provable(ineq: Inequality, n: int | None = None) -> ProofResult:
    """Decide whether ``ineq`` follows from the elemental inequalities.

    Provable: exact multipliers ``y >= 0`` with ``sum y_r * row_r == target``.
    Not provable: an extreme ray of the polymatroid cone (normalized to
    integer values) on which the target is negative.  Both certificates are
    re-verified exactly before returning.
    """
    n = n or ineq.n
    if ineq.expr.support >> n:
        raise SetFunctionError(f"{ineq.name} mentions variables beyond {n}")
    rows = elemental_inequalities(n)
    coords = nonempty_subsets(n)
    col = {m: k for k, m in enumerate(coords)}
    target = ineq.expr.coeffs

    # feasibility of  sum_r y_r row_r = target,  y >= 0
    A = [[Fraction(0)] * len(rows) for _ in coords]
    for r, q in enumerate(rows):
        for m, c in q.expr.terms:
            A[col[m]][r] = Fraction(c)
    b = [Fraction(target.get(m, 0)) for m in coords]
    res = simplex([0] * len(rows), A, b)
    if res.status == OPTIMAL:
        y = res.x
        if not _verify_multipliers(Inequality(ineq.expr, ineq.name, n), rows, y):
            raise CertificateError(f"multipliers for {ineq.name} failed re-verification")
        mult = {q.name: w for q, w in zip(rows, y) if w}
        return ProofResult(True, ineq, multipliers=mult)
    if res.status != INFEASIBLE:
        raise CertificateError(f"unexpected LP status {res.status}")

    # minimize target over {A h >= 0, h >= 0, h(N) = 1}; a vertex is an extreme ray
    nh, ns = len(coords), len(rows)
    A2 = []
    for r, q in enumerate(rows):
        line = [Fraction(0)] * (nh + ns)
        for m, c in q.expr.terms:
            line[col[m]] = Fraction(c)
        line[nh + r] = Fraction(-1)
        A2.append(line)
    norm = [Fraction(0)] * (nh + ns)
    norm[col[full_set(n)]] = Fraction(1)
    A2.append(norm)
    b2 = [Fraction(0)] * ns + [Fraction(1)]
    c2 = [Fraction(target.get(m, 0)) for m in coords] + [Fraction(0)] * ns
    res2 = simplex(c2, A2, b2)
    if res2.status != OPTIMAL or res2.objective >= 0:
        raise CertificateError(
            f"infeasible multiplier system but no negative ray for {ineq.name} ({res2.status})"
        )
    h = res2.x[:nh]
    scale = math.lcm(*(v.denominator for v in h))
    ray = SetFunction(n, {m: ExactScalar(RATIONAL, h[k] * scale) for k, m in enumerate(coords)})
    if not _verify_counterexample(ineq, ray):
        raise CertificateError(f"counterexample for {ineq.name} failed re-verification")
    return ProofResult(False, ineq, counterexample=ray, counterexample_value=evaluate(ineq.expr, ray))


# -- combined report -----------------------------------------------------------


@dataclass
class MembershipReport:
    gamma: Verdict
    ingleton: Verdict
    zy: Verdict

    @property
    def asymptotically_solvable_possible(self) -> bool:
        return self.gamma.holds and self.zy.holds

    @property
    def conclusions(self) -> list[str]:
        out = []
        if not self.gamma.holds:
            out.append("h is outside Gamma_4: MP(h) is not asymptotically solvable (Shannon bound)")
        if not self.ingleton.holds:
            out.append("h violates Ingleton: no abelian (hence no linear) network code solves MP(h)")
        if self.gamma.holds and not self.zy.holds:
            out.append("h is in Gamma_4 but violates Zhang-Yeung: MP(h) is not asymptotically "
                       "solvable, and the Shannon outer bound alone cannot detect this")
        if not out:
            out.append("no obstruction from Gamma_4, Ingleton or Zhang-Yeung")
        return out

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "ingleton": self.ingleton.to_json(),
            "zy": self.zy.to_json(),
            "conclusions": self.conclusions,
        }


def membership_report(v: SetFunction) -> MembershipReport:
    if v.n != 4:
        raise SetFunctionError("membership report needs n = 4")
    if not satisfies_condition1(v):
        raise SetFunctionError(f"condition (1) fails: {[k for k, _ in condition1_gaps(v)]}")
    return MembershipReport(
        in_gamma(v),
        check_all_permutations(v, ingleton_inequality()),
        check_all_permutations(v, zy_inequality()),
    )


def parse_roles(text: str) -> tuple[int, ...]:
    """``"3412"`` -> ``(3, 4, 1, 2)``."""
    roles = tuple(int(ch) for ch in text)
    if sorted(roles) != list(range(1, len(roles) + 1)):
        raise SetFunctionError(f"{text!r} is not a permutation")
    return roles


__all__ = [
    "CertificateError", "Inequality", "Verdict", "ProofResult", "MembershipReport",
    "elemental_inequalities", "in_gamma", "ingleton_inequality", "zy_inequality", "ZY_FORM",
    "check_instance", "check_all_permutations", "shannon_provable", "membership_report",
    "parse_roles",
]
