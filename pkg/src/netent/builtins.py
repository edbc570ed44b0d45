"""Built-in four-variable vectors shipped as data files."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .setfn import RATIONAL, SetFunction

NAMES = ("pg13", "zy-gap")


def _load(fname: str) -> dict:
    return json.loads(resources.files("netent.data").joinpath(fname).read_text())


def metadata(name: str) -> dict:
    if name == "pg13":
        return _load("pg13.json")
    if name == "zy-gap":
        return _load("zy_gap.json")
    raise KeyError(f"unknown built-in vector {name!r}; choose from {NAMES}")


def pg13() -> SetFunction:
    """Quasi-uniform vector with all singletons log2(13); violates Ingleton."""
    return SetFunction.from_json(metadata("pg13"))


def zy_gap(a=1) -> SetFunction:
    """The 2a/3a/4a vector: in Gamma_4 for a >= 0, ZY-violating for a > 0."""
    a = Fraction(a)
    if a < 0:
        raise ValueError("a must be nonnegative")
    data = metadata("zy-gap")
    values = {k: Fraction(v) * a for k, v in data["coefficients"].items()}
    return SetFunction.from_values(4, values, RATIONAL)


def load(name: str, a=1) -> SetFunction:
    if name == "pg13":
        return pg13()
    if name == "zy-gap":
        return zy_gap(a)
    raise KeyError(f"unknown built-in vector {name!r}; choose from {NAMES}")
