"""Acyclic networks, multicast requirements and network codes.

A session ``s`` is available to exactly the edges leaving ``O(s)``; an edge
``e`` sees the sessions originating at ``tail(e)`` and the edges entering
``tail(e)``, in that order (sessions, then edges, each in network order).
Edges without a capacity are unconstrained.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from . import gfp
from .distributions import JointDistribution
from .groups import GroupAxiomError, SubgroupFamily
from .setfn import DomainError, ExactScalar, log2_count_compare

MAX_SOURCE_OUTCOMES = 10**6


class NetworkError(ValueError):
    pass


class CycleError(NetworkError):
    def __init__(self, cycle: list[str]):
        super().__init__(f"network has a cycle: {' -> '.join(cycle)}")
        self.cycle = cycle


class CodeError(ValueError):
    pass


class ConditionError(ValueError):
    pass


# -- network ------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    capacity: ExactScalar | None = None


@dataclass(frozen=True)
class Session:
    id: str
    origin: str
    destinations: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sessions: tuple[Session, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "sessions", tuple(self.sessions))
        object.__setattr__(self, "_edge", {e.id: e for e in self.edges})
        object.__setattr__(self, "_session", {s.id: s for s in self.sessions})

    def edge(self, eid: str) -> Edge:
        return self._edge[eid]

    def session(self, sid: str) -> Session:
        return self._session[sid]

    def in_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.head == node]

    def out_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.tail == node]

    def inputs_of_node(self, node: str) -> tuple[str, ...]:
        """Symbols ``f -> node``: sessions originating here, then incoming edges."""
        return tuple(s.id for s in self.sessions if s.origin == node) + tuple(
            e.id for e in self.in_edges(node)
        )

    def edge_inputs(self, eid: str) -> tuple[str, ...]:
        return self.inputs_of_node(self.edge(eid).tail)

    def to_json(self) -> dict:
        edges = []
        for e in self.edges:
            d = {"id": e.id, "tail": e.tail, "head": e.head}
            if e.capacity is not None:
                d["capacity"] = e.capacity.to_json()
            edges.append(d)
        return {
            "nodes": list(self.nodes),
            "edges": edges,
            "sessions": [{"id": s.id, "origin": s.origin, "destinations": list(s.destinations)}
                         for s in self.sessions],
        }

    @classmethod
    def from_json(cls, data: Mapping, domain: str = "rational") -> "Network":
        """Capacities are strings in ``domain``; ``"log2:p/q"`` is always accepted."""
        try:
            edges = tuple(
                Edge(str(e["id"]), str(e["tail"]), str(e["head"]),
                     ExactScalar.parse(e["capacity"], domain) if e.get("capacity") is not None else None)
                for e in data["edges"]
            )
            sessions = tuple(
                Session(str(s["id"]), str(s["origin"]), tuple(str(d) for d in s.get("destinations", ())))
                for s in data["sessions"]
            )
            return cls(tuple(str(n) for n in data["nodes"]), edges, sessions)
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"malformed network JSON: {exc}") from None


def validate_network(net: Network) -> list[str]:
    """Check references and acyclicity; return a topological order of the nodes."""
    nodes = set(net.nodes)
    if len(nodes) != len(net.nodes):
        raise NetworkError("duplicate node names")
    ids = [e.id for e in net.edges] + [s.id for s in net.sessions]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise NetworkError(f"duplicate edge/session ids: {sorted(dup)}")
    for e in net.edges:
        for end in (e.tail, e.head):
            if end not in nodes:
                raise NetworkError(f"edge {e.id} refers to unknown node {end!r}")
        if e.capacity is not None and e.capacity.sign() < 0:
            raise NetworkError(f"edge {e.id} has negative capacity {e.capacity}")
    for s in net.sessions:
        if s.origin not in nodes:
            raise NetworkError(f"session {s.id} originates at unknown node {s.origin!r}")
        for d in s.destinations:
            if d not in nodes:
                raise NetworkError(f"session {s.id} has unknown destination {d!r}")

    indeg = {u: 0 for u in net.nodes}
    succ = defaultdict(list)
    for e in net.edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    queue = deque(u for u in net.nodes if indeg[u] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(order) < len(net.nodes):
        raise CycleError(_find_cycle(net, {u for u in net.nodes if indeg[u] > 0}))
    return order


def _find_cycle(net: Network, leftover: set[str]) -> list[str]:
    # every leftover node has a leftover predecessor, so walking backwards must repeat
    pred = defaultdict(list)
    for e in net.edges:
        if e.tail in leftover and e.head in leftover:
            pred[e.head].append(e.tail)
    u = min(leftover)
    seen: dict[str, int] = {}
    walk = []
    while u not in seen:
        seen[u] = len(walk)
        walk.append(u)
        u = pred[u][0]
    cycle = walk[seen[u]:][::-1]
    return cycle + [cycle[0]]


def edge_order(net: Network) -> list[Edge]:
    pos = {u: k for k, u in enumerate(validate_network(net))}
    return sorted(net.edges, key=lambda e: (pos[e.tail], net.edges.index(e)))


# -- codes ------------------------------------------------------------------


LocalFunction = Mapping[tuple, Any] | Callable[[tuple], Any]


@dataclass(eq=False)
class NetworkCode:
    """Source distribution over session symbols plus one local function per edge.

    A local function is a table keyed by the tuple of in-symbols, or a
    callable taking that tuple.  ``alphabets`` lists the alphabet of any
    session or edge; where absent, the set of symbols that actually occur is
    used.
    """

    source: JointDistribution
    functions: dict[str, LocalFunction]
    alphabets: dict[str, tuple] = field(default_factory=dict)

    def tables(self, net: Network, evaluation=None) -> dict[str, dict]:
        """Every local function as an explicit table over its reachable inputs."""
        evaluation = evaluation or evaluate_code(net, self)
        out: dict[str, dict] = {e.id: {} for e in net.edges}
        for src, syms in evaluation.items():
            vals = dict(zip(self.source.labels, src)) | syms
            for e in net.edges:
                key = tuple(vals[f] for f in net.edge_inputs(e.id))
                out[e.id][key] = syms[e.id]
        return out

    def to_json(self, net: Network) -> dict:
        tables = self.tables(net)
        return {
            "sessions": list(self.source.labels),
            "source": [{"symbols": list(map(_jsonable, o)), "p": str(p)}
                       for o, p in sorted(self.source.pmf.items(), key=lambda kv: repr(kv[0]))],
            "edges": {
                eid: {
                    "inputs": list(net.edge_inputs(eid)),
                    "table": [[list(map(_jsonable, k)), _jsonable(v)]
                              for k, v in sorted(t.items(), key=lambda kv: repr(kv[0]))],
                }
                for eid, t in tables.items()
            },
        }


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, str)) or x is None:
        return x
    return repr(x)


def evaluate_code(net: Network, code: NetworkCode) -> dict[tuple, dict[str, Any]]:
    """Edge symbols for every positive-probability source tuple."""
    sessions = tuple(s.id for s in net.sessions)
    if tuple(code.source.labels) != sessions:
        raise CodeError(f"source labels {code.source.labels} != sessions {sessions}")
    if len(code.source.pmf) > MAX_SOURCE_OUTCOMES:
        raise CodeError("too many source outcomes for exhaustive evaluation")
    order = edge_order(net)
    inputs = {e.id: net.edge_inputs(e.id) for e in order}
    for e in order:
        if e.id not in code.functions:
            raise CodeError(f"no local function for edge {e.id}")
    for k, alph in code.alphabets.items():
        if not len(alph):
            raise CodeError(f"empty alphabet for {k}")
    out = {}
    for src in code.source.pmf:
        vals = dict(zip(sessions, src))
        syms = {}
        for e in order:
            key = tuple(vals[f] for f in inputs[e.id])
            fn = code.functions[e.id]
            if callable(fn):
                sym = fn(key)
            else:
                try:
                    sym = fn[key]
                except KeyError:
                    raise CodeError(f"local function of {e.id} undefined on {key}") from None
            alph = code.alphabets.get(e.id)
            if alph is not None and sym not in alph:
                raise CodeError(f"edge {e.id} emits {sym!r} outside its alphabet")
            vals[e.id] = syms[e.id] = sym
        out[src] = syms
    return out


def joint_distribution(net: Network, code: NetworkCode, evaluation=None) -> JointDistribution:
    """Joint law of all session and edge symbols."""
    evaluation = evaluation or evaluate_code(net, code)
    eids = tuple(e.id for e in net.edges)
    pmf = {src + tuple(evaluation[src][e] for e in eids): p for src, p in code.source.pmf.items()}
    return JointDistribution(tuple(code.source.labels) + eids, pmf)


def check_decodable(net: Network, code: NetworkCode, evaluation=None) -> dict[tuple[str, str], bool]:
    """Zero-error decodability of every session at every destination."""
    evaluation = evaluation or evaluate_code(net, code)
    labels = code.source.labels
    verdict = {}
    for k, s in enumerate(net.sessions):
        for u in s.destinations:
            inputs = net.inputs_of_node(u)
            seen: dict[tuple, Any] = {}
            ok = True
            for src, syms in evaluation.items():
                vals = dict(zip(labels, src)) | syms
                key = tuple(vals[f] for f in inputs)
                if seen.setdefault(key, src[k]) != src[k]:
                    ok = False
                    break
            verdict[(s.id, u)] = ok
    return verdict


@dataclass(frozen=True)
class RateCapacityTuple:
    rates: Mapping[str, ExactScalar]
    capacities: Mapping[str, ExactScalar]

    def __post_init__(self):
        for k, v in list(self.rates.items()) + list(self.capacities.items()):
            if v.sign() < 0:
                raise ValueError(f"negative entry {k} = {v}")

    def domain(self) -> str | None:
        doms = {v.domain for v in list(self.rates.values()) + list(self.capacities.values())}
        if len(doms) > 1:
            raise DomainError(f"rate-capacity tuple mixes domains {sorted(doms)}")
        return doms.pop() if doms else None

    def to_json(self) -> dict:
        return {"rates": {k: v.to_json() for k, v in self.rates.items()},
                "capacities": {k: v.to_json() for k, v in self.capacities.items()}}


@dataclass(frozen=True)
class AdmissibilityRow:
    id: str
    kind: str          # "edge" (log|V| <= bound) or "session" (log|V| >= bound)
    alphabet_size: int
    bound: ExactScalar
    ok: bool
    tight: bool


def _alphabet_sizes(net: Network, code: NetworkCode, evaluation) -> dict[str, int]:
    sizes = {}
    for k, s in enumerate(net.sessions):
        alph = code.alphabets.get(s.id)
        sizes[s.id] = len(alph) if alph is not None else len({src[k] for src in code.source.pmf})
    for e in net.edges:
        alph = code.alphabets.get(e.id)
        sizes[e.id] = len(alph) if alph is not None else len({syms[e.id] for syms in evaluation.values()})
    return sizes


def admissibility_rows(net: Network, code: NetworkCode, tup: RateCapacityTuple,
                       evaluation=None) -> list[AdmissibilityRow]:
    tup.domain()
    evaluation = evaluation or evaluate_code(net, code)
    sizes = _alphabet_sizes(net, code, evaluation)
    rows = []
    for e in net.edges:
        bound = tup.capacities.get(e.id, e.capacity)
        if bound is None:
            continue
        c = log2_count_compare(sizes[e.id], bound)
        rows.append(AdmissibilityRow(e.id, "edge", sizes[e.id], bound, c <= 0, c == 0))
    for s in net.sessions:
        bound = tup.rates.get(s.id)
        if bound is None:
            continue
        c = log2_count_compare(sizes[s.id], bound)
        rows.append(AdmissibilityRow(s.id, "session", sizes[s.id], bound, c >= 0, c == 0))
    return rows


def check_admissible(net: Network, code: NetworkCode, tup: RateCapacityTuple, evaluation=None) -> bool:
    """``log2|V_e| <= w_e`` on capacitated edges and ``log2|V_s| >= l_s``, exactly."""
    return all(r.ok for r in admissibility_rows(net, code, tup, evaluation))


def code_from_assignments(net: Network, assignments, alphabets: Mapping[str, tuple] | None = None) -> NetworkCode:
    """Tabulate a code from global symbol assignments.

    ``assignments`` is a list of ``(probability, {symbol id: value})`` pairs
    covering every session and edge.  Each edge's value must be a function of
    its in-symbols; a conflict raises :class:`CodeError`.
    """
    S = [s.id for s in net.sessions]
    tables: dict[str, dict] = {e.id: {} for e in net.edges}
    inputs = {e.id: net.edge_inputs(e.id) for e in net.edges}
    pmf: dict[tuple, Fraction] = defaultdict(Fraction)
    for p, vals in assignments:
        pmf[tuple(vals[s] for s in S)] += p
        for e in net.edges:
            key = tuple(vals[f] for f in inputs[e.id])
            if tables[e.id].setdefault(key, vals[e.id]) != vals[e.id]:
                raise CodeError(f"edge {e.id} is not a function of its inputs {inputs[e.id]}")
    return NetworkCode(JointDistribution(tuple(S), dict(pmf)), tables, dict(alphabets or {}))


def merge_parallel_edges(net: Network, code: NetworkCode, e1: str, e2: str,
                         merged: str) -> tuple[Network, NetworkCode]:
    """Replace parallel edges ``e1``, ``e2`` by one edge carrying the pair."""
    a, b = net.edge(e1), net.edge(e2)
    if (a.tail, a.head) != (b.tail, b.head):
        raise NetworkError(f"{e1} and {e2} are not parallel")
    cap = a.capacity + b.capacity if a.capacity is not None and b.capacity is not None else None
    edges = []
    for e in net.edges:
        if e.id == e1:
            edges.append(Edge(merged, a.tail, a.head, cap))
        elif e.id != e2:
            edges.append(e)
    new_net = Network(net.nodes, tuple(edges), net.sessions)
    f1, f2 = code.functions[e1], code.functions[e2]

    def apply(fn, key):
        return fn(key) if callable(fn) else fn[key]

    functions = {k: v for k, v in code.functions.items() if k not in (e1, e2)}
    functions[merged] = lambda key: (apply(f1, key), apply(f2, key))
    for e in net.out_edges(a.head):
        old_inputs = net.edge_inputs(e.id)
        new_inputs = new_net.edge_inputs(e.id)
        fn = code.functions[e.id]

        def rewired(key, fn=fn, old_inputs=old_inputs, new_inputs=new_inputs):
            vals = dict(zip(new_inputs, key))
            pair = vals.pop(merged)
            vals[e1], vals[e2] = pair
            return apply(fn, tuple(vals[f] for f in old_inputs))

        functions[e.id] = rewired
    alphabets = {k: v for k, v in code.alphabets.items() if k not in (e1, e2)}
    return new_net, NetworkCode(code.source, functions, alphabets)


# -- linear and group codes ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubspaceFamily:
    """Subspaces of GF(q)^dim, one basis (list of row vectors) per session/edge id."""

    q: int
    dim: int
    bases: Mapping[str, tuple[tuple[int, ...], ...]]

    def __post_init__(self):
        if not gfp.is_prime(self.q):
            raise ValueError(f"field order {self.q} is not prime")
        clean = {}
        for k, basis in self.bases.items():
            basis = tuple(tuple(int(x) % self.q for x in v) for v in basis)
            if any(len(v) != self.dim for v in basis):
                raise ValueError(f"basis of {k} has vectors of the wrong length")
            if gfp.rank(basis, self.q, self.dim) != len(basis):
                raise ValueError(f"basis of {k} is not linearly independent")
            clean[k] = basis
        object.__setattr__(self, "bases", clean)

    def subspace_dim(self, key: str) -> int:
        return len(self.bases[key])


@dataclass
class ConditionReport:
    independence_ok: bool
    independence_detail: str
    edge_violations: list[str] = field(default_factory=list)
    sink_violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.independence_ok and not self.edge_violations and not self.sink_violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "independence": self.independence_ok,
                "independence_detail": self.independence_detail,
                "edge_violations": self.edge_violations,
                "sink_violations": [list(x) for x in self.sink_violations]}


def _require_all(net: Network, keys) -> None:
    missing = [f for f in [s.id for s in net.sessions] + [e.id for e in net.edges] if f not in keys]
    if missing:
        raise ConditionError(f"no subspace/subgroup given for {missing}")


def linear_rank_conditions(net: Network, fam: SubspaceFamily) -> tuple[ConditionReport, RateCapacityTuple]:
    """Rank conditions for a linear code built from subspaces, and its tuple."""
    validate_network(net)
    _require_all(net, fam.bases)
    q, d = fam.q, fam.dim
    S = [s.id for s in net.sessions]
    lhs = len(S) * d - sum(fam.subspace_dim(s) for s in S)
    cap = gfp.intersect([fam.bases[s] for s in S], q, d)
    rhs = d - len(cap)
    report = ConditionReport(lhs == rhs, f"|S| dim V - sum dim V_s = {lhs}, dim V - dim cap V_s = {rhs}")
    for e in net.edges:
        inter = gfp.intersect([fam.bases[f] for f in net.edge_inputs(e.id)], q, d)
        if not gfp.is_subspace_of(inter, fam.bases[e.id], q, d):
            report.edge_violations.append(e.id)
    for s in net.sessions:
        for u in s.destinations:
            inter = gfp.intersect([fam.bases[f] for f in net.inputs_of_node(u)], q, d)
            if not gfp.is_subspace_of(inter, fam.bases[s.id], q, d):
                report.sink_violations.append((s.id, u))
    tup = RateCapacityTuple(
        {s: ExactScalar.log2(q ** (d - fam.subspace_dim(s))) for s in S},
        {e.id: ExactScalar.log2(q ** (d - fam.subspace_dim(e.id))) for e in net.edges},
    )
    return report, tup


def linear_code_from_subspaces(net: Network, fam: SubspaceFamily) -> NetworkCode:
    """Coset code: the global message is ``x`` in GF(q)^dim, and every session
    and edge carries the coset ``x + V_f`` (as its canonical representative)."""
    report, _ = linear_rank_conditions(net, fam)
    if not report.ok:
        raise ConditionError(f"rank conditions fail: {report.to_json()}")
    q, d = fam.q, fam.dim
    if q**d > MAX_SOURCE_OUTCOMES:
        raise CodeError("ambient space too large to enumerate")
    reduce = {f: gfp.coset_reducer(b, q, d) for f, b in fam.bases.items()}
    S = [s.id for s in net.sessions]
    tables: dict[str, dict] = {e.id: {} for e in net.edges}
    alphabets: dict[str, set] = defaultdict(set)
    sources = []
    for x in gfp.all_vectors(q, d):
        sym = {f: reduce[f](x) for f in S + [e.id for e in net.edges]}
        sources.append(tuple(sym[s] for s in S))
        for f, v in sym.items():
            alphabets[f].add(v)
        for e in net.edges:
            key = tuple(sym[f] for f in net.edge_inputs(e.id))
            if tables[e.id].setdefault(key, sym[e.id]) != sym[e.id]:
                raise ConditionError(f"edge {e.id} is not a function of its inputs")
    source = JointDistribution.uniform(S, sources)
    return NetworkCode(source, tables, {f: tuple(sorted(a)) for f, a in alphabets.items()})


def group_code_conditions(net: Network, fam: SubgroupFamily) -> tuple[ConditionReport, RateCapacityTuple]:
    """Subgroup conditions for a group network code, and its tuple.

    ``fam.labels`` must name every session and edge.
    """
    validate_network(net)
    if fam.labels is None:
        raise GroupAxiomError("shape", "subgroup family must be labeled by session/edge ids")
    subs = fam.by_label()
    _require_all(net, subs)
    G = fam.parent
    m = G.order
    S = [s.id for s in net.sessions]
    whole = frozenset(range(m))

    def cap(keys):
        out = whole
        for k in keys:
            out = out & subs[k]
        return out

    lhs = Fraction(m, len(cap(S)))
    rhs = Fraction(1)
    for s in S:
        rhs *= Fraction(m, len(subs[s]))
    report = ConditionReport(lhs == rhs, f"|G|/|cap G_s| = {lhs}, prod |G|/|G_s| = {rhs}")
    for e in net.edges:
        if not cap(net.edge_inputs(e.id)) <= subs[e.id]:
            report.edge_violations.append(e.id)
    for s in net.sessions:
        for u in s.destinations:
            if not cap(net.inputs_of_node(u)) <= subs[s.id]:
                report.sink_violations.append((s.id, u))
    tup = RateCapacityTuple(
        {s: ExactScalar.log2(Fraction(m, len(subs[s]))) for s in S},
        {e.id: ExactScalar.log2(Fraction(m, len(subs[e.id]))) for e in net.edges},
    )
    return report, tup


__all__ = [
    "NetworkError", "CycleError", "CodeError", "ConditionError", "Edge", "Session", "Network",
    "validate_network", "edge_order", "NetworkCode", "evaluate_code", "joint_distribution",
    "check_decodable", "RateCapacityTuple", "AdmissibilityRow", "admissibility_rows",
    "check_admissible", "code_from_assignments", "merge_parallel_edges", "SubspaceFamily", "ConditionReport",
    "linear_rank_conditions", "linear_code_from_subspaces", "group_code_conditions",
]
