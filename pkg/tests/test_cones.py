from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netent.builtins import zy_gap
from netent.cones import (
    Inequality,
    check_all_permutations,
    check_instance,
    elemental_inequalities,
    in_gamma,
    ingleton_inequality,
    membership_report,
    parse_roles,
    shannon_provable,
    zy_inequality,
)
from netent.setfn import (
    ExactScalar,
    InfoExpr,
    SetFunction,
    SetFunctionError,
    evaluate,
    nonempty_subsets,
    permute,
)

small_vectors = st.builds(
    lambda vals: SetFunction.from_values(4, dict(zip(nonempty_subsets(4), vals))),
    st.lists(st.integers(0, 4), min_size=15, max_size=15),
)


def brute_polymatroid(v: SetFunction) -> bool:
    """Nonnegative, monotone, submodular, checked over all pairs of subsets."""
    def h(m):
        return v(m).arg if m else Fraction(0)
    full = (1 << v.n) - 1
    for a in range(full + 1):
        if h(a) < 0:
            return False
        for b in range(full + 1):
            if a & b == a and h(a) > h(b):
                return False
            if h(a) + h(b) < h(a | b) + h(a & b):
                return False
    return True


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_elemental_count(n):
    assert len(elemental_inequalities(n)) == n + comb(n, 2) * 2 ** (n - 2)


def test_elemental_order_n4():
    names = [q.name for q in elemental_inequalities(4)]
    assert names[:4] == ["H(1|234)", "H(2|134)", "H(3|124)", "H(4|123)"]
    assert names[4] == "I(1;2)"


@settings(max_examples=200)
@given(small_vectors)
def test_in_gamma_matches_brute_force(v):
    assert in_gamma(v).holds == brute_polymatroid(v)


def test_negative_entry_leaves_gamma():
    v = SetFunction.from_values(1, {"1": -1})
    assert not in_gamma(v).holds


def test_pg13_ingleton_exact(pg13_vec):
    verdict = check_instance(pg13_vec, ingleton_inequality())
    assert not verdict.holds
    assert verdict.margin == ExactScalar.log2(Fraction(570306048, 641594304))
    assert 78 * 52**4 == 570306048 and 13**2 * 156**3 == 641594304
    sweep = check_all_permutations(pg13_vec, ingleton_inequality())
    assert sweep.instances == 6 and sweep.margin == verdict.margin
    assert sweep.witness_roles == (1, 2, 3, 4)


def test_pg13_in_gamma_and_zy(pg13_vec):
    assert in_gamma(pg13_vec).holds
    zy = check_all_permutations(pg13_vec, zy_inequality())
    assert zy.holds and zy.margin == ExactScalar.log2(Fraction(128, 27))


def test_zy_gap_verdicts(zy_vec):
    assert in_gamma(zy_vec).holds and in_gamma(zy_vec).instances == 28
    assert check_instance(zy_vec, ingleton_inequality()).margin == ExactScalar.rational(-1)
    zy = check_all_permutations(zy_vec, zy_inequality())
    assert not zy.holds and zy.margin == ExactScalar.rational(-1)
    assert zy.witness_roles == (3, 4, 1, 2) and zy.instances == 12
    # the witness instance evaluated directly gives the same margin
    assert evaluate(zy_inequality(zy.witness_roles).expr, zy_vec) == zy.margin


@given(st.fractions(min_value=0, max_value=50, max_denominator=20))
def test_zy_gap_scales_with_a(a):
    v = zy_gap(a)
    assert in_gamma(v).holds
    zy = check_all_permutations(v, zy_inequality())
    assert zy.margin == ExactScalar.rational(-a)
    assert zy.holds == (a == 0)


@settings(max_examples=30)
@given(small_vectors, st.permutations([1, 2, 3, 4]))
def test_sweeps_are_permutation_invariant(v, sigma):
    w = permute(v, tuple(sigma))
    for ineq in (ingleton_inequality(), zy_inequality()):
        assert check_all_permutations(v, ineq).margin == check_all_permutations(w, ineq).margin
    assert in_gamma(v).holds == in_gamma(w).holds


def test_membership_report(zy_vec, pg13_vec):
    rep = membership_report(zy_vec)
    assert rep.gamma.holds and not rep.ingleton.holds and not rep.zy.holds
    assert any("Shannon outer bound alone cannot detect" in c for c in rep.conclusions)
    assert not membership_report(pg13_vec).ingleton.holds
    with pytest.raises(SetFunctionError):
        membership_report(pg13_vec.replace("34", ExactScalar.log2(155)))


def test_parse_roles():
    assert parse_roles("3412") == (3, 4, 1, 2)
    with pytest.raises(SetFunctionError):
        parse_roles("3312")


# -- prover ---------------------------------------------------------------------


def test_submodularity_provable():
    expr = InfoExpr.from_coeffs({"12": 1, "13": 1, "1": -1, "123": -1})
    res = shannon_provable(Inequality(expr, "submod", 3))
    assert res.provable and res.multipliers == {"I(2;3|1)": 1}


def test_every_elemental_row_is_provable():
    for q in elemental_inequalities(3):
        res = shannon_provable(q)
        assert res.provable and res.multipliers == {q.name: 1}


@pytest.mark.parametrize("ineq", [ingleton_inequality(), zy_inequality()])
def test_non_shannon_not_provable(ineq):
    res = shannon_provable(ineq)
    assert not res.provable
    ray = res.counterexample
    assert in_gamma(ray).holds
    assert evaluate(ineq.expr, ray) == res.counterexample_value
    assert res.counterexample_value.sign() < 0


def test_ingleton_counterexample_is_the_zy_gap_vector():
    assert shannon_provable(ingleton_inequality()).counterexample == zy_gap(1)


def test_false_inequality_not_provable():
    # I(1;2) <= 0 fails on a shared bit
    res = shannon_provable(Inequality(InfoExpr.from_coeffs({"12": 1, "1": -1, "2": -1}), "-I(1;2)", 2))
    assert not res.provable and res.counterexample_value.sign() < 0


@settings(max_examples=4)
@given(st.lists(st.integers(0, 3), min_size=9, max_size=9))
def test_nonnegative_combinations_provable(weights):
    rows = elemental_inequalities(3)
    expr = InfoExpr(())
    for w, q in zip(weights, rows):
        expr = expr + q.expr * w
    res = shannon_provable(Inequality(expr, "combo", 3))
    assert res.provable
    rebuilt = InfoExpr(())
    by_name = {q.name: q for q in rows}
    for name, y in res.multipliers.items():
        assert y >= 0 and y.denominator == 1
        rebuilt = rebuilt + by_name[name].expr * int(y)
    assert rebuilt.terms == expr.terms


def test_inequality_json_round_trip():
    ineq = zy_inequality()
    back = Inequality.from_json(ineq.to_json())
    assert back.expr.terms == ineq.expr.terms and back.n == 4
    with pytest.raises(SetFunctionError):
        Inequality.from_json({"coeffs": {}})
