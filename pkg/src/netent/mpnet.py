"""The induced multicast problem MP(h): builder, group solver and verifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any

from .cones import MembershipReport, membership_report
from .distributions import (
    ConditionalIndex,
    DistributionError,
    JointDistribution,
    NonUniformError,
    check_quasi_uniform,
    determines,
    entropy_compare,
    entropy_of,
)
from .distributions import conditional_index as _raw_conditional_index
from .groups import SubgroupFamily, group_entropy_vector, quasi_uniform_distribution
from .netmodel import (
    Edge,
    Network,
    NetworkCode,
    RateCapacityTuple,
    Session,
    admissibility_rows,
    check_decodable,
    code_from_assignments,
    evaluate_code,
    joint_distribution,
    validate_network,
)
from .setfn import (
    ExactScalar,
    SetFunction,
    SetFunctionError,
    condition1_gaps,
    induced_rates,
    nonempty_subsets,
    subset_key,
)

SESSIONS = ("a", "b", "c")
SOURCE = "s"


class MpError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestRow:
    sink: str
    inputs: tuple[str, ...]          # "V1".."V4" and "W"
    demands: tuple[str, ...]
    capacity_formula: str | None     # formula of the sink's W edge, if any
    claim: str
    w_edge: str | None = None

    def to_json(self) -> dict:
        return {"sink": self.sink, "inputs": list(self.inputs), "demands": list(self.demands),
                "capacity_formula": self.capacity_formula, "claim": self.claim}


@dataclass(frozen=True, eq=False)
class MpInstance:
    network: Network
    h: SetFunction
    rates: dict[str, ExactScalar]
    capacities: dict[str, ExactScalar]
    manifest: tuple[ManifestRow, ...]

    def tuple(self) -> RateCapacityTuple:
        return RateCapacityTuple(dict(self.rates), dict(self.capacities))

    @property
    def sinks(self) -> list[str]:
        return [r.sink for r in self.manifest]

    def to_json(self) -> dict:
        out = self.network.to_json()
        out["h"] = self.h.to_json()
        out["manifest"] = [r.to_json() for r in self.manifest]
        return out


# -- builder -------------------------------------------------------------------


def _fmt(*keys: str) -> str:
    return "-".join(f"h({k})" for k in keys)


def _sinks(h: SetFunction):
    """Yield (sink, V-inputs, W formula keys or None, demands, claim)."""
    yield "T1", (1,), None, ("a",), "Claim 1"
    yield "T2", (2,), ("12", "2"), ("a", "b"), "Claim 2"
    yield "T3", (1, 2), None, ("a", "b"), "Claim 2"
    yield "T4", (3,), ("123", "3"), SESSIONS, "Claim 3"
    yield "T5", (4,), ("124", "4"), SESSIONS, "Claim 3"
    for i, j in combinations(range(1, 5), 2):
        ks = [k for k in range(1, 5) if k not in (i, j)]
        triples = {k: "".join(map(str, sorted((i, j, k)))) for k in ks}
        vals = {h(t) for t in triples.values()}
        assert len(vals) == 1, f"h(ijk) differs across completions of {i}{j}"
        yield f"T6-{i}{j}", (i, j), (triples[ks[0]], f"{i}{j}"), SESSIONS, "Claim 4"
    for tri in combinations(range(1, 5), 3):
        yield "T7-" + "".join(map(str, tri)), tri, None, SESSIONS, "Claim 6"
    yield "T8", (3,), ("13", "3"), ("a",), "Claim 5"
    yield "T9", (4,), ("14", "4"), ("a",), "Claim 5"


def _gaps(h: SetFunction) -> list[str]:
    """Every capacity or rate formula that would be negative."""
    checks = [("1",), ("2",), ("3",), ("4",), ("12", "1"), ("123", "12"), ("23", "2"),
              ("24", "2"), ("13", "3"), ("14", "4"), ("12", "2")]
    for tri in combinations("1234", 3):
        for pair in combinations(tri, 2):
            checks.append(("".join(tri), "".join(pair)))
    out = []
    for keys in checks:
        val = h(keys[0]) - h(keys[1]) if len(keys) == 2 else h(keys[0])
        if val.sign() < 0:
            out.append(f"{_fmt(*keys)} = {val} < 0")
    return out


def build_mp(h: SetFunction) -> MpInstance:
    """Deterministically build MP(h) for a four-variable vector satisfying condition (1)."""
    if h.n != 4:
        raise MpError(f"MP(h) needs n = 4, got n = {h.n}")
    problems = [f"condition (1): h({k}) - h(1234) = {d}" for k, d in condition1_gaps(h)]
    problems += _gaps(h)
    if problems:
        raise MpError("; ".join(problems))
    ra, rb, rc = induced_rates(h)
    rates = {"a": ra, "b": rb, "c": rc}

    edges: list[Edge] = []
    caps: dict[str, ExactScalar] = {}

    def add(eid, tail, head, cap=None):
        edges.append(Edge(eid, tail, head, cap))
        if cap is not None:
            caps[eid] = cap

    # part 1: the V_i symbols, each fanned out through a copy node c_i
    add("V1", SOURCE, "c1", h("1"))
    add("V2", SOURCE, "c2", h("2"))
    add("W23", SOURCE, "n3", h("23") - h("2"))
    add("V2>n3", "c2", "n3")
    add("V3", "n3", "c3", h("3"))
    add("W24", SOURCE, "n4", h("24") - h("2"))
    add("V2>n4", "c2", "n4")
    add("V4", "n4", "c4", h("4"))

    manifest = []
    dests: dict[str, list[str]] = {s: [] for s in SESSIONS}
    for sink, vs, wkeys, demands, claim in _sinks(h):
        for i in vs:
            add(f"V{i}>{sink}", f"c{i}", sink)
        w_edge = None
        if wkeys is not None:
            w_edge = f"W>{sink}"
            add(w_edge, SOURCE, sink, h(wkeys[0]) - h(wkeys[1]))
        for d in demands:
            dests[d].append(sink)
        manifest.append(ManifestRow(
            sink, tuple(f"V{i}" for i in vs) + (("W",) if w_edge else ()), demands,
            _fmt(*wkeys) if wkeys else None, claim, w_edge,
        ))

    nodes = (SOURCE, "c1", "c2", "n3", "n4", "c3", "c4") + tuple(r.sink for r in manifest)
    sessions = tuple(Session(s, SOURCE, tuple(dests[s])) for s in SESSIONS)
    net = Network(nodes, tuple(edges), sessions)
    validate_network(net)
    return MpInstance(net, h, rates, caps, tuple(manifest))


# -- Theorem 2 construction ------------------------------------------------------


def _H(dist: JointDistribution, variables) -> ExactScalar:
    variables = list(variables)
    return entropy_of(dist, variables) if variables else ExactScalar.log2(1)


def conditional_index(dist: JointDistribution, target, given) -> ConditionalIndex:
    """Conditional index with ``log2(size) = H(given, target) - H(given)`` asserted."""
    target = [target] if isinstance(target, str) else list(target)
    given = [given] if isinstance(given, str) else list(given)
    idx = _raw_conditional_index(dist, target, given)
    expected = _H(dist, given + target) - _H(dist, given)
    assert ExactScalar.log2(idx.size) == expected, (
        f"index of {target} given {given}: log2({idx.size}) != {expected}")
    return idx


@dataclass(frozen=True, eq=False)
class SourceTransform:
    dist: JointDistribution                 # U1..Un extended with Ua, Ub, Uc
    indices: dict[str, ConditionalIndex]    # "Ua", "Ub", "Uc"


def source_transform(dist: JointDistribution) -> SourceTransform:
    """Independent uniform (Ua, Ub, Uc) in bijection with (U1, U2, U3)."""
    if not check_quasi_uniform(dist):
        raise DistributionError("source_transform needs a quasi-uniform distribution")
    specs = {"Ua": (["U1"], []), "Ub": (["U2"], ["U1"]), "Uc": (["U3"], ["U1", "U2"])}
    indices = {}
    ext = dist
    for name, (target, given) in specs.items():
        idx = conditional_index(dist, target, given)
        indices[name] = idx
        ext = ext.with_variable(name, lambda o, idx=idx: idx(dist, o[: len(dist.labels)]))

    # mutual independence and uniformity: the joint is uniform on the full product
    sizes = [indices[k].size for k in ("Ua", "Ub", "Uc")]
    joint = ext.marginal(["Ua", "Ub", "Uc"])
    assert len(joint) == sizes[0] * sizes[1] * sizes[2], "Ua, Ub, Uc are not independent"
    assert len(set(joint.values())) == 1, "Ua, Ub, Uc are not jointly uniform"
    h1, h12, h123 = _H(dist, ["U1"]), _H(dist, ["U1", "U2"]), _H(dist, ["U1", "U2", "U3"])
    assert _H(ext, ["Ua"]) == h1
    assert _H(ext, ["Ub"]) == h12 - h1
    assert _H(ext, ["Uc"]) == h123 - h12
    abc = ["Ua", "Ub", "Uc"]
    for fwd, back in ((["U1"], ["Ua"]), (["U1", "U2"], ["Ua", "Ub"]), (["U1", "U2", "U3"], abc)):
        assert determines(ext, back, fwd) and determines(ext, fwd, back)
    return SourceTransform(ext, indices)


@dataclass(eq=False)
class SolutionBundle:
    instance: MpInstance
    code: NetworkCode
    family: SubgroupFamily | None
    dist: JointDistribution | None = None                  # U1..U4, Ua, Ub, Uc
    indices: dict[str, ConditionalIndex] = field(default_factory=dict)
    decoders: dict[str, dict[tuple, dict[str, Any]]] = field(default_factory=dict)

    @cached_property
    def evaluation(self):
        return evaluate_code(self.instance.network, self.code)

    def joint(self) -> JointDistribution:
        return joint_distribution(self.instance.network, self.code, self.evaluation)

    def to_json(self) -> dict:
        out = {"code": self.code.to_json(self.instance.network)}
        if self.family is not None:
            out["family"] = self.family.to_json()
        return out


def _w_spec(row: ManifestRow) -> tuple[list[str], list[str]] | None:
    """(target, given) of the conditional index carried on a sink's W edge."""
    s = row.sink
    if s == "T2":
        return ["Ua", "Ub"], ["U2"]
    if s == "T4":
        return ["Ua", "Ub", "Uc"], ["U3"]
    if s == "T5":
        return ["Ua", "Ub", "Uc"], ["U4"]
    if s.startswith("T6-"):
        i, j = int(s[3]), int(s[4])
        k = min(k for k in range(1, 5) if k not in (i, j))
        return [f"U{k}"], [f"U{i}", f"U{j}"]
    if s == "T8":
        return ["U1"], ["U3"]
    if s == "T9":
        return ["U1"], ["U4"]
    return None


def build_decoders(net: Network, code: NetworkCode, evaluation=None) -> dict[str, dict]:
    """Lookup table per sink: input symbols -> demanded session values.

    Raises :class:`MpError` if some sink cannot decode."""
    evaluation = evaluation or evaluate_code(net, code)
    labels = code.source.labels
    demands: dict[str, list[int]] = {}
    for k, s in enumerate(net.sessions):
        for u in s.destinations:
            demands.setdefault(u, []).append(k)
    out = {}
    for u, ks in demands.items():
        inputs = net.inputs_of_node(u)
        table: dict[tuple, dict] = {}
        for src, syms in evaluation.items():
            vals = dict(zip(labels, src)) | syms
            key = tuple(vals[f] for f in inputs)
            want = {labels[k]: src[k] for k in ks}
            if table.setdefault(key, want) != want:
                raise MpError(f"sink {u} cannot decode {sorted(want)}")
        out[u] = table
    return out


def solve_mp_from_group(fam: SubgroupFamily) -> SolutionBundle:
    """Single-shot zero-error code for MP(h) with ``h = group_entropy_vector(fam)``."""
    if fam.n != 4:
        raise MpError(f"need four subgroups, got {fam.n}")
    h = group_entropy_vector(fam)
    gaps = condition1_gaps(h)
    if gaps:
        raise MpError("condition (1) fails for the group vector: "
                      + "; ".join(f"h({k}) - h(1234) = {d}" for k, d in gaps))
    inst = build_mp(h)
    net = inst.network
    st = source_transform(quasi_uniform_distribution(fam))
    dist = st.dist
    indices = dict(st.indices)
    indices["W23"] = conditional_index(dist, "U3", "U2")
    indices["W24"] = conditional_index(dist, "U4", "U2")
    for row in inst.manifest:
        spec = _w_spec(row)
        if spec is not None:
            indices[row.w_edge] = conditional_index(dist, *spec)

    # every W alphabet meets its capacity formula exactly
    for eid in ["W23", "W24"] + [r.w_edge for r in inst.manifest if r.w_edge]:
        got = ExactScalar.log2(indices[eid].size)
        assert got == inst.capacities[eid], f"{eid}: log2|alphabet| = {got} != {inst.capacities[eid]}"

    pos = {lab: k for k, lab in enumerate(dist.labels)}
    assignments = []
    for o, p in dist.pmf.items():
        vals: dict[str, Any] = {"a": o[pos["Ua"]], "b": o[pos["Ub"]], "c": o[pos["Uc"]]}
        for i in range(1, 5):
            vals[f"V{i}"] = o[pos[f"U{i}"]]
        for e in net.edges:
            if e.id in indices:
                vals[e.id] = indices[e.id](dist, o)
            elif ">" in e.id:
                vals[e.id] = vals[e.id.split(">")[0]]
        assignments.append((p, vals))

    alphabets: dict[str, tuple] = {
        "a": tuple(range(indices["Ua"].size)),
        "b": tuple(range(indices["Ub"].size)),
        "c": tuple(range(indices["Uc"].size)),
    }
    for i in range(1, 5):
        alphabets[f"V{i}"] = tuple(dist.alphabet(f"U{i}"))
    for eid, idx in indices.items():
        if eid not in ("Ua", "Ub", "Uc"):
            alphabets[eid] = tuple(range(idx.size))
    code = code_from_assignments(net, assignments, alphabets)
    evaluation = evaluate_code(net, code)
    decoders = build_decoders(net, code, evaluation)
    bundle = SolutionBundle(inst, code, fam, dist, indices, decoders)
    bundle.__dict__["evaluation"] = evaluation
    return bundle


def with_constant_edge(bundle: SolutionBundle, eid: str, value=0) -> SolutionBundle:
    """Copy of ``bundle`` whose edge ``eid`` always emits ``value`` (a negative control)."""
    functions = dict(bundle.code.functions)
    functions[eid] = lambda key: value
    alphabets = dict(bundle.code.alphabets)
    alphabets[eid] = (value,)
    code = NetworkCode(bundle.code.source, functions, alphabets)
    return SolutionBundle(bundle.instance, code, bundle.family, bundle.dist, bundle.indices, {})


# -- Theorem 1 verifier ------------------------------------------------------------


@dataclass(frozen=True)
class EntropyEntry:
    alpha: str
    expected: ExactScalar
    actual: ExactScalar | None    # None when the marginal is not uniform
    match: bool

    @property
    def margin(self) -> ExactScalar | None:
        if self.actual is None or self.actual.domain != self.expected.domain:
            return None
        return self.actual - self.expected

    def to_json(self) -> dict:
        m = self.margin
        return {"alpha": self.alpha, "expected": self.expected.to_json(),
                "actual": self.actual.to_json() if self.actual is not None else None,
                "match": self.match, "margin": m.to_json() if m is not None else None}


@dataclass(frozen=True)
class ClaimCheck:
    claim: str
    statement: str
    holds: bool
    margin: ExactScalar | None    # lhs - rhs where computable exactly

    def to_json(self) -> dict:
        return {"claim": self.claim, "statement": self.statement, "holds": self.holds,
                "margin": self.margin.to_json() if self.margin is not None else None}


@dataclass(frozen=True)
class Theorem1Report:
    entries: tuple[EntropyEntry, ...]
    checks: tuple[ClaimCheck, ...]
    decodable: bool
    admissible: bool

    @property
    def matches(self) -> int:
        return sum(e.match for e in self.entries)

    @property
    def ok(self) -> bool:
        return self.matches == len(self.entries) and all(c.holds for c in self.checks)

    def claim_holds(self, number: int) -> bool:
        name = f"Claim {number}"
        return all(c.holds for c in self.checks if c.claim == name)

    def claim_checks(self, number: int) -> list[ClaimCheck]:
        return [c for c in self.checks if c.claim == f"Claim {number}"]

    def to_json(self) -> dict:
        return {
            "matches": self.matches, "total": len(self.entries), "ok": self.ok,
            "decodable": self.decodable, "admissible": self.admissible,
            "entries": [e.to_json() for e in self.entries],
            "claims": [c.to_json() for c in self.checks],
        }


def _exact_entropy(dist: JointDistribution, variables) -> ExactScalar | None:
    try:
        return _H(dist, variables)
    except NonUniformError:
        return None


def _sub(x: ExactScalar | None, y: ExactScalar | None) -> ExactScalar | None:
    if x is None or y is None or x.domain != y.domain:
        return None
    return x - y


def verify_theorem1(instance: MpInstance, bundle: SolutionBundle) -> Theorem1Report:
    """Recompute ``H(V_alpha)`` from the code and compare with ``h(alpha)`` exactly.

    Works for any code on the instance's network, not only group-built ones.
    """
    net, h = instance.network, instance.h
    evaluation = bundle.evaluation
    joint = joint_distribution(net, bundle.code, evaluation)

    def V(key: str) -> list[str]:
        return [f"V{ch}" for ch in key]

    entries = []
    for mask in nonempty_subsets(4):
        key = subset_key(mask)
        match = entropy_compare(joint, V(key), h(key)) == 0
        entries.append(EntropyEntry(key, h(key), _exact_entropy(joint, V(key)), match))
    by_key = {e.alpha: e for e in entries}

    checks: list[ClaimCheck] = []

    def eq(claim, key):
        e = by_key[key]
        stmt = f"H({','.join(V(key))}) = h({key})"
        checks.append(ClaimCheck(claim, stmt, e.match, e.margin))

    def zero_cond(claim, target, given):
        stmt = f"H({','.join(target)}|{','.join(given)}) = 0"
        margin = _sub(_exact_entropy(joint, target + given), _exact_entropy(joint, given))
        checks.append(ClaimCheck(claim, stmt, determines(joint, given, target), margin))

    eq("Claim 1", "1")
    zero_cond("Claim 1", ["V1"], ["a"])
    eq("Claim 2", "2")
    eq("Claim 2", "12")
    eq("Claim 3", "3")
    eq("Claim 3", "4")
    for i, j in combinations("1234", 2):
        key = i + j
        e = by_key[key]
        ok = entropy_compare(joint, V(key), h(key)) >= 0
        checks.append(ClaimCheck("Claim 4", f"H(V{i},V{j}) >= h({key})", ok, e.margin))
    eq("Claim 5", "13")
    eq("Claim 5", "14")
    for tri in ("123", "124", "134", "234"):
        eq("Claim 6", tri)
    eq("Claim 7", "34")
    eq("Claim 8", "1234")
    h_abc = _exact_entropy(joint, list(SESSIONS))
    same = determines(joint, list(SESSIONS), V("1234")) and determines(joint, V("1234"), list(SESSIONS))
    checks.append(ClaimCheck("Claim 8", "H(V1,V2,V3,V4) = H(a,b,c)", same,
                             _sub(by_key["1234"].actual, h_abc)))
    eq("Claim 9", "23")
    eq("Claim 9", "24")

    decodable = all(check_decodable(net, bundle.code, evaluation).values())
    try:
        admissible = all(r.ok for r in admissibility_rows(net, bundle.code, instance.tuple(), evaluation))
    except (ValueError, TypeError):
        admissible = False
    return Theorem1Report(tuple(entries), tuple(checks), decodable, admissible)


# -- classification ------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    report: MembershipReport
    known_entropic: bool | None
    solvability: str           # "solvable", "not asymptotically solvable" or "undetermined"
    abelian_codes_suffice: bool | None
    narrative: tuple[str, ...]

    def to_json(self) -> dict:
        return {"membership": self.report.to_json(), "known_entropic": self.known_entropic,
                "solvability": self.solvability,
                "abelian_codes_suffice": self.abelian_codes_suffice,
                "narrative": list(self.narrative)}


def classify(h: SetFunction, known_entropic: bool | None = None) -> Classification:
    """Combine the cone checks with what they mean for MP(h).

    ``known_entropic`` records outside knowledge that ``h`` is entropic (as
    for a group-characterizable vector); the zero vector is always entropic.
    """
    try:
        report = membership_report(h)
    except SetFunctionError as exc:
        raise MpError(str(exc)) from None
    if all(v.is_zero() for v in h.values.values()):
        known_entropic = True
    obstructed = not (report.gamma.holds and report.zy.holds)
    if obstructed and known_entropic:
        raise MpError("h is marked entropic but fails an outer bound")
    narrative = []
    if obstructed:
        solvability = "not asymptotically solvable"
        if not report.gamma.holds:
            narrative.append("h is outside Gamma_4, so MP(h) is not asymptotically solvable")
        else:
            narrative.append("h is in Gamma_4 but violates Zhang-Yeung, so MP(h) is not "
                             "asymptotically solvable")
            narrative.append("the Shannon-only outer bound on the capacity region is not tight")
    elif known_entropic:
        solvability = "solvable"
        narrative.append("h is entropic, so MP(h) is asymptotically solvable")
    else:
        solvability = "undetermined"
        narrative.append("h passes Gamma_4 and Zhang-Yeung; these bounds do not decide solvability")
    if not report.ingleton.holds:
        abelian = False
        narrative.append("h violates Ingleton: abelian network codes (including linear and "
                         "time-sharing) cannot solve MP(h)")
        if solvability == "solvable":
            narrative.append("abelian network codes are suboptimal")
    else:
        abelian = None
    return Classification(report, known_entropic, solvability, abelian, tuple(narrative))


__all__ = [
    "MpError", "ManifestRow", "MpInstance", "build_mp", "conditional_index", "SourceTransform",
    "source_transform", "SolutionBundle", "build_decoders", "solve_mp_from_group",
    "with_constant_edge", "EntropyEntry", "ClaimCheck", "Theorem1Report", "verify_theorem1",
    "Classification", "classify",
]
