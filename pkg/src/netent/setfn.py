"""Exact set functions on subsets of {1..n} and linear information expressions.

Subsets are bitmasks: element ``i`` (1-based) is bit ``i - 1``, so the mask
``0b0101`` is the subset {1, 3}.  ``h(empty) = 0`` is implicit and never
stored.

Values live in one of two exact domains:

* ``rational`` -- the value is the rational number itself;
* ``log2``     -- the value is ``log2(r)`` for a positive rational ``r``.

Integer-coefficient combinations of ``log2`` values stay in the domain
(``c1*log2(r1) + c2*log2(r2) = log2(r1**c1 * r2**c2)``), so every sign test
reduces to comparing two big integers.  Mixing the domains is refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Union

MAX_N = 5

RATIONAL = "rational"
LOG2 = "log2"
_JSON_DOMAIN = {RATIONAL: "rational", LOG2: "log2-rational"}
_DOMAIN_FROM_JSON = {v: k for k, v in _JSON_DOMAIN.items()}


class DomainError(TypeError):
    """Raised when values from different scalar domains are combined."""


class SetFunctionError(ValueError):
    pass


# -- exact scalars ----------------------------------------------------------


@dataclass(frozen=True, order=False)
class ExactScalar:
    """An exact value: ``arg`` itself (rational) or ``log2(arg)`` (log2)."""

    domain: str
    arg: Fraction

    def __post_init__(self):
        if self.domain not in (RATIONAL, LOG2):
            raise ValueError(f"unknown scalar domain {self.domain!r}")
        object.__setattr__(self, "arg", Fraction(self.arg))
        if self.domain == LOG2 and self.arg <= 0:
            raise ValueError(f"log2 argument must be positive, got {self.arg}")

    @classmethod
    def rational(cls, value) -> "ExactScalar":
        return cls(RATIONAL, Fraction(value))

    @classmethod
    def log2(cls, arg) -> "ExactScalar":
        return cls(LOG2, Fraction(arg))

    @classmethod
    def zero(cls, domain: str) -> "ExactScalar":
        return cls(domain, Fraction(0) if domain == RATIONAL else Fraction(1))

    @classmethod
    def parse(cls, text: str, domain: str | None = None) -> "ExactScalar":
        """Parse ``"p/q"`` (in ``domain``) or the tagged form ``"log2:p/q"``."""
        text = str(text).strip()
        if text.startswith("log2:"):
            if domain == RATIONAL:
                raise DomainError(f"{text!r} is not a rational-domain value")
            return cls.log2(Fraction(text[5:]))
        return cls(domain or RATIONAL, Fraction(text))

    def _check(self, other: "ExactScalar"):
        if not isinstance(other, ExactScalar):
            raise TypeError(f"cannot combine ExactScalar with {type(other).__name__}")
        if other.domain != self.domain:
            raise DomainError(f"cannot mix {self.domain} and {other.domain} values")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if self.domain == RATIONAL:
            return ExactScalar(RATIONAL, self.arg + other.arg)
        return ExactScalar(LOG2, self.arg * other.arg)

    __radd__ = __add__

    def __neg__(self):
        if self.domain == RATIONAL:
            return ExactScalar(RATIONAL, -self.arg)
        return ExactScalar(LOG2, 1 / self.arg)

    def __sub__(self, other):
        self._check(other)
        return self + (-other)

    def __mul__(self, k):
        if self.domain == LOG2:
            if not isinstance(k, int):
                raise DomainError("log2 values only take integer multiples")
            return ExactScalar(LOG2, self.arg**k)
        if isinstance(k, ExactScalar):
            raise DomainError("products of two scalars are not linear")
        return ExactScalar(RATIONAL, self.arg * Fraction(k))

    __rmul__ = __mul__

    def sign(self) -> int:
        if self.domain == RATIONAL:
            ref = 0
        else:
            ref = 1
        return (self.arg > ref) - (self.arg < ref)

    def is_zero(self) -> bool:
        return self.sign() == 0

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        if self.domain == RATIONAL:
            return float(self.arg)
        # big-int safe
        return math.log2(self.arg.numerator) - math.log2(self.arg.denominator)

    def to_json(self) -> str:
        if self.domain == LOG2:
            return f"log2:{self.arg}"
        return str(self.arg)

    def __str__(self):
        return self.to_json()


def log2_compare(value, r) -> int:
    """Exact sign of ``log2(value) - r`` for rationals ``value > 0`` and ``r``.

    An integer power of two compares directly.  Otherwise ``log2(value)`` is
    irrational, and bit lengths of ``value**K`` bracket it ever more tightly.
    The brackets stop once ``K`` reaches the denominator of ``r``; past that
    the direct power comparison is no more expensive.
    """
    value, r = Fraction(value), Fraction(r)
    if value <= 0:
        raise ValueError("value must be positive")
    a, b = value.numerator, value.denominator
    if a & (a - 1) == 0 and b & (b - 1) == 0:
        k = (a.bit_length() - 1) - (b.bit_length() - 1)
        return (k > r) - (k < r)
    p, q = r.numerator, r.denominator
    K = 16
    while K < q:
        la, lb = (a**K).bit_length(), (b**K).bit_length()
        # a**K in [2**(la-1), 2**la), b**K likewise
        if Fraction(la - 1 - lb, K) >= r:
            return 1
        if Fraction(la - lb + 1, K) <= r:
            return -1
        K *= 4
    # by now the direct comparison a**q vs 2**p * b**q costs no more
    lhs, rhs = Fraction(a) ** q, Fraction(2) ** p * Fraction(b) ** q
    return (lhs > rhs) - (lhs < rhs)


def log2_count_compare(count: int, bound: ExactScalar) -> int:
    """Exact sign of ``log2(count) - bound`` for a positive integer ``count``."""
    if count <= 0:
        raise ValueError("count must be positive")
    if bound.domain == LOG2:
        lhs, rhs = Fraction(count), bound.arg
        return (lhs > rhs) - (lhs < rhs)
    return log2_compare(count, bound.arg)


# -- subsets ----------------------------------------------------------------

SubsetLike = Union[int, str, Iterable[int]]


def subset(*indices: int) -> int:
    """Bitmask of the 1-based ``indices``."""
    mask = 0
    for i in indices:
        if i < 1:
            raise SetFunctionError(f"subset index {i} out of range")
        mask |= 1 << (i - 1)
    return mask


def to_mask(alpha: SubsetLike) -> int:
    """Accept a mask, a digit string like ``"134"``, or an iterable of indices."""
    if isinstance(alpha, int):
        if alpha < 0:
            raise SetFunctionError(f"negative subset mask {alpha}")
        return alpha
    if isinstance(alpha, str):
        if alpha and not alpha.isdigit():
            raise SetFunctionError(f"bad subset key {alpha!r}")
        return subset(*(int(ch) for ch in alpha))
    return subset(*alpha)


def members(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def subset_key(mask: int) -> str:
    """``{1, 3, 4}`` -> ``"134"``."""
    return "".join(str(i) for i in members(mask))


def nonempty_subsets(n: int) -> list[int]:
    """All nonempty masks over {1..n}, ordered by size then lexicographically."""
    out = []
    for k in range(1, n + 1):
        for combo in combinations(range(1, n + 1), k):
            out.append(subset(*combo))
    return out


def full_set(n: int) -> int:
    return (1 << n) - 1


def _check_perm(sigma, n: int) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if len(sigma) != n or sorted(sigma) != list(range(1, n + 1)):
        raise SetFunctionError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def map_subset(mask: int, sigma: tuple[int, ...]) -> int:
    """Image of a subset under ``i -> sigma[i - 1]``."""
    return subset(*(sigma[i - 1] for i in members(mask)))


# -- set functions ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SetFunction:
    """A total function on the nonempty subsets of {1..n} with exact values."""

    n: int
    values: Mapping[int, ExactScalar]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise SetFunctionError(f"ground set size must be in 1..{MAX_N}, got {self.n}")
        vals = dict(self.values)
        expected = set(nonempty_subsets(self.n))
        if set(vals) != expected:
            missing = sorted(expected - set(vals))
            extra = sorted(set(vals) - expected)
            raise SetFunctionError(
                f"incomplete set function: missing {[subset_key(m) for m in missing]}, "
                f"unexpected masks {extra}"
            )
        domains = {v.domain for v in vals.values()}
        if len(domains) > 1:
            raise DomainError(f"set function mixes domains {sorted(domains)}")
        object.__setattr__(self, "values", vals)

    @property
    def domain(self) -> str:
        return next(iter(self.values.values())).domain

    def __call__(self, alpha: SubsetLike) -> ExactScalar:
        mask = to_mask(alpha)
        if mask == 0:
            return ExactScalar.zero(self.domain)
        try:
            return self.values[mask]
        except KeyError:
            raise SetFunctionError(f"subset {subset_key(mask)} outside ground set 1..{self.n}") from None

    __getitem__ = __call__

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.n == other.n and self.values == other.values

    def __repr__(self):
        body = ", ".join(f"{subset_key(m)}: {self.values[m]}" for m in nonempty_subsets(self.n))
        return f"SetFunction(n={self.n}, {{{body}}})"

    @classmethod
    def from_values(cls, n: int, values: Mapping[SubsetLike, object], domain: str = RATIONAL) -> "SetFunction":
        """Build from plain numbers: the rational value, or the log2 argument."""
        out = {}
        for key, val in values.items():
            out[to_mask(key)] = val if isinstance(val, ExactScalar) else ExactScalar(domain, Fraction(val))
        return cls(n, out)

    @classmethod
    def zero(cls, n: int, domain: str = RATIONAL) -> "SetFunction":
        z = ExactScalar.zero(domain)
        return cls(n, {m: z for m in nonempty_subsets(n)})

    def replace(self, alpha: SubsetLike, value: ExactScalar) -> "SetFunction":
        vals = dict(self.values)
        vals[to_mask(alpha)] = value
        return SetFunction(self.n, vals)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "domain": _JSON_DOMAIN[self.domain],
            "values": {subset_key(m): str(self.values[m].arg) for m in nonempty_subsets(self.n)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SetFunction":
        try:
            n = int(data["n"])
            domain = _DOMAIN_FROM_JSON[data.get("domain", "rational")]
            raw = data["values"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SetFunctionError(f"malformed set function JSON: {exc}") from None
        values = {}
        for key, text in raw.items():
            mask = to_mask(key)
            if key != subset_key(mask):
                raise SetFunctionError(f"subset key {key!r} must list ascending indices")
            try:
                values[mask] = ExactScalar(domain, Fraction(str(text)))
            except (ValueError, ZeroDivisionError) as exc:
                raise SetFunctionError(f"bad value {text!r} for {key}: {exc}") from None
        return cls(n, values)


# -- information expressions -------------------------------------------------


@dataclass(frozen=True)
class InfoExpr:
    """Sparse integer combination ``sum c[alpha] * h(alpha)``."""

    terms: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        acc: dict[int, int] = {}
        for mask, c in self.terms:
            if not isinstance(c, int):
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = int(c)
                else:
                    raise SetFunctionError(f"coefficient {c!r} is not an integer")
            if mask == 0:
                continue  # h(empty) = 0
            acc[mask] = acc.get(mask, 0) + c
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in acc.items() if c)))

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[SubsetLike, int], name: str = "") -> "InfoExpr":
        return cls(tuple((to_mask(k), v) for k, v in coeffs.items()), name)

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self.terms)

    def coeff(self, alpha: SubsetLike) -> int:
        return self.coeffs.get(to_mask(alpha), 0)

    @property
    def support(self) -> int:
        """Union of all subsets with nonzero coefficient."""
        out = 0
        for m, _ in self.terms:
            out |= m
        return out

    def __add__(self, other: "InfoExpr") -> "InfoExpr":
        name = f"{self.name} + {other.name}" if self.name and other.name else self.name or other.name
        return InfoExpr(self.terms + other.terms, name)

    def __neg__(self):
        return InfoExpr(tuple((m, -c) for m, c in self.terms), f"-({self.name})" if self.name else "")

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            raise SetFunctionError("expressions scale by integers only")
        return InfoExpr(tuple((m, c * k) for m, c in self.terms), f"{k}*{self.name}" if self.name else "")

    __rmul__ = __mul__

    def relabel(self, roles) -> "InfoExpr":
        """Substitute variable ``t`` by ``roles[t - 1]``."""
        roles = tuple(roles)
        return InfoExpr(tuple((map_subset(m, roles), c) for m, c in self.terms), self.name)

    def named(self, name: str) -> "InfoExpr":
        return InfoExpr(self.terms, name)

    def to_json_coeffs(self) -> dict[str, int]:
        return {subset_key(m): c for m, c in self.terms}

    def __str__(self):
        parts = []
        for m, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}"
            parts.append(f"{sign} {mag}h({subset_key(m)})")
        text = " ".join(parts).lstrip("+ ") or "0"
        return text


JOINT, CONDITIONAL, MUTUAL, COND_MUTUAL = "joint", "conditional", "mutual", "cond-mutual"


def _fmt(mask: int) -> str:
    return subset_key(mask)


def make_entropy_expr(kind: str, alpha: SubsetLike, beta: SubsetLike = 0, gamma: SubsetLike = 0,
                      n: int = MAX_N) -> InfoExpr:
    """Expand an entropy or mutual-information term into joint entropies.

    ``joint``        H(alpha)
    ``conditional``  H(alpha | beta gamma)
    ``mutual``       I(alpha; beta), or I(alpha; beta | gamma) if gamma is given
    ``cond-mutual``  I(alpha; beta | gamma)
    """
    a, b, g = to_mask(alpha), to_mask(beta), to_mask(gamma)
    if a == 0:
        raise SetFunctionError("alpha must be nonempty")
    if (a | b | g) >> n:
        raise SetFunctionError(f"indices outside ground set 1..{n}")
    if kind == JOINT:
        if b or g:
            raise SetFunctionError("joint entropy takes a single subset")
        return InfoExpr(((a, 1),), f"H({_fmt(a)})")
    if kind == CONDITIONAL:
        cond = b | g
        if not cond:
            return InfoExpr(((a, 1),), f"H({_fmt(a)})")
        return InfoExpr(((a | cond, 1), (cond, -1)), f"H({_fmt(a)}|{_fmt(cond)})")
    if kind in (MUTUAL, COND_MUTUAL):
        if b == 0:
            raise SetFunctionError("beta must be nonempty for mutual information")
        if a & b:
            raise SetFunctionError("alpha and beta must be disjoint for mutual information")
        terms = ((a | g, 1), (b | g, 1), (g, -1), (a | b | g, -1))
        label = f"I({_fmt(a)};{_fmt(b)}|{_fmt(g)})" if g else f"I({_fmt(a)};{_fmt(b)})"
        return InfoExpr(terms, label)
    raise SetFunctionError(f"unknown expression kind {kind!r}")


def H(alpha, given=0, n: int = MAX_N) -> InfoExpr:
    return make_entropy_expr(CONDITIONAL, alpha, given, 0, n)


def I(alpha, beta, given=0, n: int = MAX_N) -> InfoExpr:  # noqa: E743
    return make_entropy_expr(COND_MUTUAL if to_mask(given) else MUTUAL, alpha, beta, given, n)


def evaluate(expr: InfoExpr, v: SetFunction) -> ExactScalar:
    """Exact value of ``expr`` on ``v``, in ``v``'s own domain."""
    if expr.support >> v.n:
        raise SetFunctionError(f"expression mentions variables outside 1..{v.n}")
    vals = v.values
    if v.domain == RATIONAL:
        return ExactScalar(RATIONAL, sum((vals[m].arg * c for m, c in expr.terms), Fraction(0)))
    # log2 domain: one exact product instead of a chain of scalar additions
    num = den = 1
    for mask, c in expr.terms:
        a = vals[mask].arg
        if c > 0:
            num *= a.numerator**c
            den *= a.denominator**c
        else:
            num *= a.denominator ** -c
            den *= a.numerator ** -c
    return ExactScalar(LOG2, Fraction(num, den))


def evaluate_sides(expr: InfoExpr, v: SetFunction) -> tuple[ExactScalar, ExactScalar]:
    """Split ``expr`` into its positive and negative parts and evaluate both.

    In the log2 domain the two results are ``log2`` of the products
    ``prod r**c`` over positive and negative coefficients, which is what an
    exact big-integer comparison looks at.
    """
    pos = ExactScalar.zero(v.domain)
    neg = ExactScalar.zero(v.domain)
    for mask, c in expr.terms:
        if c > 0:
            pos = pos + v(mask) * c
        else:
            neg = neg + v(mask) * (-c)
    return pos, neg


# -- condition on four-variable vectors --------------------------------------

_CONDITION1_SETS = ("1234", "123", "124", "134", "234", "34")


def _require_n4(v: SetFunction):
    if v.n != 4:
        raise SetFunctionError(f"operation needs n = 4, got n = {v.n}")


def condition1_gaps(v: SetFunction) -> list[tuple[str, ExactScalar]]:
    """Entries that differ from ``h(1234)``, with their difference."""
    _require_n4(v)
    top = v("1234")
    return [(k, v(k) - top) for k in _CONDITION1_SETS[1:] if v(k) != top]


def satisfies_condition1(v: SetFunction) -> bool:
    """``h(1234) = h(123) = h(124) = h(134) = h(234) = h(34)`` exactly."""
    return not condition1_gaps(v)


def induced_rates(v: SetFunction) -> tuple[ExactScalar, ExactScalar, ExactScalar]:
    """Session rates ``(h(1), h(12) - h(1), h(123) - h(12))``."""
    if not satisfies_condition1(v):
        raise SetFunctionError(f"condition (1) fails: {condition1_gaps(v)}")
    rates = (v("1"), v("12") - v("1"), v("123") - v("12"))
    for name, r in zip(("h(1)", "h(12)-h(1)", "h(123)-h(12)"), rates):
        if r.sign() < 0:
            raise SetFunctionError(f"negative induced rate {name} = {r}")
    return rates


def permute(v: SetFunction, sigma) -> SetFunction:
    """``result(alpha) = v(sigma^-1(alpha))`` for ``sigma`` given as ``i -> sigma[i-1]``."""
    sigma = _check_perm(sigma, v.n)
    return SetFunction(v.n, {map_subset(m, sigma): val for m, val in v.values.items()})


def compose(tau, sigma) -> tuple[int, ...]:
    """``tau o sigma`` as a 1-based tuple."""
    return tuple(tau[s - 1] for s in sigma)

