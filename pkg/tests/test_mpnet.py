from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netent.builtins import pg13, zy_gap
from netent.groups import SubgroupFamily, group_entropy_vector, library, quasi_uniform_distribution, symmetric
from netent.mpnet import (
    MpError,
    build_mp,
    classify,
    conditional_index,
    solve_mp_from_group,
    source_transform,
    verify_theorem1,
    with_constant_edge,
)
from netent.netmodel import admissibility_rows, check_decodable, code_from_assignments, validate_network
from netent.setfn import ExactScalar, SetFunction, satisfies_condition1

L = ExactScalar.log2
LIB = library()


def test_z22_instance_shape(z22_family):
    inst = build_mp(group_entropy_vector(z22_family))
    validate_network(inst.network)
    assert len(inst.sinks) == 17
    caps = inst.capacities
    assert all(caps[f"W>T6-{p}"] == L(1) for p in ("12", "13", "14", "23", "24", "34"))
    assert caps["W>T5"] == L(1) and caps["W>T9"] == L(1)
    assert inst.rates == {"a": L(2), "b": L(2), "c": L(1)}


def test_zy_gap_capacities():
    inst = build_mp(zy_gap(1))
    caps = inst.capacities
    assert caps["W>T2"] == ExactScalar.rational(1)
    assert all(caps[f"W>T6-{p}"] == ExactScalar.rational(1) for p in ("12", "13", "14", "23", "24"))
    # h(34) = 4a already equals every triple
    assert caps["W>T6-34"] == ExactScalar.rational(0)


def test_zero_vector_instance():
    inst = build_mp(SetFunction.zero(4))
    assert all(v.is_zero() for v in inst.rates.values())
    assert all(v.is_zero() for v in inst.capacities.values())


def test_manifest_rows(z22_family):
    inst = build_mp(group_entropy_vector(z22_family))
    row = next(r for r in inst.manifest if r.sink == "T6-13")
    assert row.to_json() == {"sink": "T6-13", "inputs": ["V1", "V3", "W"], "demands": ["a", "b", "c"],
                             "capacity_formula": "h(123)-h(13)", "claim": "Claim 4"}
    claims = {r.sink: r.claim for r in inst.manifest}
    assert claims["T1"] == "Claim 1" and claims["T3"] == "Claim 2" and claims["T9"] == "Claim 5"
    assert sorted(inst.network.session("a").destinations) == sorted(inst.sinks)
    assert "T1" not in inst.network.session("b").destinations


def test_build_is_deterministic(pg13_vec):
    assert build_mp(pg13_vec).to_json() == build_mp(pg13()).to_json()


def test_build_reports_gaps():
    v = zy_gap(1).replace("13", ExactScalar.rational(1))
    with pytest.raises(MpError) as exc:
        build_mp(v)
    assert "h(13)-h(3)" in str(exc.value)
    with pytest.raises(MpError) as exc:
        build_mp(pg13().replace("34", L(155)))
    assert "condition (1)" in str(exc.value)


# -- source transform and conditional indices ------------------------------------------


def _sizes(st_):
    return [st_.indices[k].size for k in ("Ua", "Ub", "Uc")]


def test_source_transform_examples(z22_family, z6_family):
    assert _sizes(source_transform(quasi_uniform_distribution(z22_family))) == [2, 2, 1]
    assert _sizes(source_transform(quasi_uniform_distribution(z6_family))) == [3, 2, 1]
    G = symmetric(3)
    whole = SubgroupFamily(G, (frozenset(range(6)),) * 4)
    assert _sizes(source_transform(quasi_uniform_distribution(whole))) == [1, 1, 1]


def test_conditional_index_examples(z22_family):
    dist = quasi_uniform_distribution(z22_family)
    assert conditional_index(dist, "U3", "U2").size == 2
    assert conditional_index(dist, "U1", ["U1", "U2"]).size == 1
    assert conditional_index(dist, "U4", ["U1", "U2", "U3"]).size == 1


# -- solver and verifier ---------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["z22_family", "z23_family", "z6_family"])
def test_round_trip(fixture, request):
    fam = request.getfixturevalue(fixture)
    bundle = solve_mp_from_group(fam)
    inst = bundle.instance
    assert all(check_decodable(inst.network, bundle.code).values())
    rows = admissibility_rows(inst.network, bundle.code, inst.tuple())
    assert all(r.ok for r in rows)
    assert all(r.tight for r in rows if r.kind == "session")
    report = verify_theorem1(inst, bundle)
    assert report.matches == 15 and report.ok and report.decodable and report.admissible
    assert len(bundle.decoders) == 17


def test_trivial_family_solved():
    G = symmetric(3)
    bundle = solve_mp_from_group(SubgroupFamily(G, (frozenset(range(6)),) * 4))
    assert verify_theorem1(bundle.instance, bundle).ok


def test_condition1_failure_rejected():
    G = LIB["Z2xZ2"]
    whole = frozenset(range(4))
    fam = SubgroupFamily(G, (frozenset({0, 1}), frozenset({0, 2}), whole, whole))
    with pytest.raises(MpError):
        solve_mp_from_group(fam)


cond1_families = st.sampled_from(["Z2xZ2", "Z4", "Z6", "S3", "D4"]).flatmap(
    lambda name: st.lists(st.sampled_from(LIB[name].subgroups()), min_size=4, max_size=4).map(
        lambda subs, name=name: SubgroupFamily(LIB[name], tuple(subs)))
).filter(lambda fam: satisfies_condition1(group_entropy_vector(fam)))


@settings(max_examples=25)
@given(cond1_families)
def test_w_alphabets_meet_capacities(fam):
    bundle = solve_mp_from_group(fam)
    inst = bundle.instance
    for eid, cap in inst.capacities.items():
        if eid.startswith("W"):
            assert L(len(bundle.code.alphabets[eid])) == cap
    assert verify_theorem1(inst, bundle).ok


def test_hand_built_code_satisfies_theorem1(z22_family):
    """A code not built from groups: a = x, b = y, V3 = x ^ y, V4 = (x, y)."""
    inst = build_mp(group_entropy_vector(z22_family))
    net = inst.network
    assignments = []
    for x in range(2):
        for y in range(2):
            vals = {"a": x, "b": y, "c": 0, "V1": x, "V2": y, "V3": x ^ y, "V4": (x, y),
                    "W23": x, "W24": x, "W>T2": x, "W>T4": x, "W>T5": 0, "W>T8": x, "W>T9": 0}
            for p in ("12", "13", "14", "23", "24", "34"):
                vals[f"W>T6-{p}"] = 0
            for e in net.edges:
                if ">" in e.id and not e.id.startswith("W"):
                    vals[e.id] = vals[e.id.split(">")[0]]
            assignments.append((Fraction(1, 4), vals))
    code = code_from_assignments(net, assignments)
    from netent.mpnet import SolutionBundle
    report = verify_theorem1(inst, SolutionBundle(inst, code, None))
    assert report.decodable and report.admissible
    assert report.matches == 15 and report.ok


def test_constant_v3_breaks_claim3(z22_family):
    bundle = solve_mp_from_group(z22_family)
    report = verify_theorem1(bundle.instance, with_constant_edge(bundle, "V3"))
    assert not report.claim_holds(3)
    failed = [c for c in report.claim_checks(3) if not c.holds]
    assert [c.statement for c in failed] == ["H(V3) = h(3)"]
    assert failed[0].margin == L(Fraction(1, 2))
    assert not report.decodable
    assert report.claim_holds(1) and report.claim_holds(2)


def test_bundle_json(z22_family):
    data = solve_mp_from_group(z22_family).to_json()
    assert set(data) == {"code", "family"}
    assert data["code"]["sessions"] == ["a", "b", "c"]


# -- classification -----------------------------------------------------------------------


def test_classify_builtins():
    c = classify(pg13(), known_entropic=True)
    assert c.solvability == "solvable" and c.abelian_codes_suffice is False
    assert any("abelian network codes (including linear and time-sharing) cannot solve MP(h)" in s
               for s in c.narrative)
    z = classify(zy_gap(1))
    assert z.solvability == "not asymptotically solvable"
    assert any("not tight" in s for s in z.narrative)
    zero = classify(zy_gap(0))
    assert zero.solvability == "solvable" and zero.report.ingleton.holds


def test_classify_rejects_condition1_failure():
    with pytest.raises(MpError):
        classify(pg13().replace("34", L(155)))
    with pytest.raises(MpError):
        classify(zy_gap(1), known_entropic=True)
