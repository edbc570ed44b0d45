"""Exact tools linking multicast network-coding solvability with entropy vectors."""

from .cones import (
    Inequality,
    in_gamma,
    ingleton_inequality,
    membership_report,
    shannon_provable,
    zy_inequality,
)
from .groups import SubgroupFamily, group_entropy_vector, quasi_uniform_distribution
from .mpnet import build_mp, classify, solve_mp_from_group, verify_theorem1
from .setfn import ExactScalar, InfoExpr, SetFunction

__version__ = "0.1.0"

__all__ = [
    "ExactScalar", "InfoExpr", "SetFunction", "Inequality", "in_gamma", "ingleton_inequality",
    "zy_inequality", "membership_report", "shannon_provable", "SubgroupFamily",
    "group_entropy_vector", "quasi_uniform_distribution", "build_mp", "classify",
    "solve_mp_from_group", "verify_theorem1",
]
