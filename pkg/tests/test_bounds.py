import pytest

from addcodes.bounds import (LinearFact, LinearFactsOracle, asymptotic_table, bound_report, closed_forms, coding_ub,
                             griesmer_g, griesmer_rep, griesmer_ub, improvement_table, nbar_griesmer, one_weight_ub,
                             projection_ub, surplus)
from addcodes.errors import ConfigurationError, UsageError
from addcodes.pg import bracket

N2_8_2_S = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 24, 27, 28, 29]
N2_8_2_GRIESMER = [9, 12, 17, 22, 25, 30, 33, 38, 43, 44, 49, 54, 59, 94, 107, 110, 115]
N2_8_2_CODING = [7, 12, 17, 18, 23, 28, 33, 36, 40, 44, 49, 54, 57, 94, 107, 110, 115]
TWO_FACTS = "q,n,k,d,verdict\n2,84,8,40,exists\n2,87,8,42,nonexists\n"


def griesmer_ub_reference(q, r, h, s):
    """Largest n in (s, 4*one_weight] satisfying the inequality, by plain upward scan."""
    best = s
    for n in range(s + 1, 4 * one_weight_ub(q, r, h, s) + 2):
        if griesmer_g(q, r, q ** (h - 1) * (n - s)) <= bracket(h, q) * n:
            best = n
    return best


def test_griesmer_examples():
    assert griesmer_g(2, 8, 44) == 90
    assert str(griesmer_rep(2, 8, 44)) == "1[8]-[7]-[5]-[3]"
    assert griesmer_g(2, 9, 192) == 384
    assert str(griesmer_rep(2, 9, 192)) == "1[9]-[7]"
    assert griesmer_g(2, 7, 44) == 89
    for q in (2, 3, 5):
        for d in (1, 7, 20):
            assert griesmer_g(q, 1, d) == d


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_griesmer_rep_reproduces_length_and_distance(q):
    for k in range(1, 7):
        for d in range(1, 3 * q ** (k - 1) + 2):
            rep = griesmer_rep(q, k, d)
            assert all(0 <= e < q for e in rep.eps)
            assert rep.sigma * q ** (k - 1) - sum(e * q ** (i - 1) for i, e in enumerate(rep.eps, 1)) == d
            assert rep.length == griesmer_g(q, k, d)


def test_n2_8_2_griesmer_column():
    assert [griesmer_ub(2, 8, 2, s) for s in N2_8_2_S] == N2_8_2_GRIESMER
    assert griesmer_ub(2, 5, 3, 1) == 9


def test_griesmer_ub_matches_upward_scan():
    for q in (2, 3, 4):
        for r in range(2, 7):
            for h in range(1, r):
                for s in range(1, 12):
                    assert griesmer_ub(q, r, h, s) == griesmer_ub_reference(q, r, h, s)


def test_one_weight_and_projection():
    assert one_weight_ub(2, 8, 2, 8) == 32
    assert one_weight_ub(2, 8, 2, 21) == 85
    assert one_weight_ub(3, 5, 2, 0) == 0
    assert projection_ub(3, 7, 2, 3) == 15
    assert one_weight_ub(3, 7, 2, 3) > 15


def test_coding_ub_two_facts():
    oracle = LinearFactsOracle.from_csv(TWO_FACTS)
    assert coding_ub(2, 8, 2, 8, oracle) == 28
    assert coding_ub(2, 8, 2, 8) == griesmer_ub(2, 8, 2, 8) == 30


def test_coding_ub_n2_8_2_column(tmp_path):
    from addcodes.catalog import load_facts
    oracle = load_facts()
    assert [coding_ub(2, 8, 2, s, oracle) for s in N2_8_2_S] == N2_8_2_CODING
    assert coding_ub(2, 8, 2, 6, oracle) == 18
    p = tmp_path / "f.csv"
    p.write_text(oracle.to_csv())
    again = LinearFactsOracle.from_file(p)
    assert [coding_ub(2, 8, 2, s, again) for s in N2_8_2_S] == N2_8_2_CODING


def test_coding_ub_monotone_in_facts():
    from addcodes.catalog import load_facts
    facts = load_facts().facts
    for s in N2_8_2_S:
        values = [coding_ub(2, 8, 2, s, LinearFactsOracle(facts[:k])) for k in range(len(facts) + 1)]
        assert values == sorted(values, reverse=True)
        assert values[0] == griesmer_ub(2, 8, 2, s)


def test_inconsistent_oracle():
    with pytest.raises(ConfigurationError):
        LinearFactsOracle([LinearFact(2, 84, 8, 40, True), LinearFact(2, 90, 8, 40, False)])
    with pytest.raises(ConfigurationError):
        LinearFactsOracle([LinearFact(2, 10, 8, 40, True)])
    with pytest.raises(ConfigurationError):
        LinearFactsOracle.from_csv("q,n,k,d,verdict\n2,84,8,40,maybe\n")


def test_surplus_examples():
    assert surplus(30, 8, 8, 2, 2) == 0
    assert surplus(55, 9, 7, 3, 2) == 1
    assert surplus(13, 7, 2, 3, 2) == 2


def test_asymptotic_table_2_7_2():
    rows = asymptotic_table(2, 7, 2)
    assert len(rows) == 31
    assert [f.constant for f in rows] == [0, 5, 10, 15, 20, 21, 26, 31, 36, 41, 42, 47, 52, 55, 60, 63, 68, 73, 76,
                                         81, 84, 87, 92, 95, 100, 105, 108, 113, 116, 121, 126]
    assert str(rows[0]) == "n_2(7,2;31t) = 127t"
    assert str(rows[5]) == "n_2(7,2;31t-5) = 127t-21"


def test_asymptotic_table_2_6_2():
    assert [f.constant for f in asymptotic_table(2, 6, 2)] == [0, 5, 10, 15, 20]


def test_asymptotic_constants_stabilise():
    a1 = [f.constant for f in asymptotic_table(2, 8, 2, 1)]
    a5 = [f.constant for f in asymptotic_table(2, 8, 2, 5)]
    assert a1 == a5


def test_improvement_tables():
    t = improvement_table(2, 9, 3)
    assert [(x.offset, x.improvement) for x in t] == [(5, 2), (6, 2), (7, 4), (8, 4)]
    assert t[0].formula(2, 9, 3) == "n_2(9,3;9t-5) = 73t-43"
    t = improvement_table(2, 12, 4)
    assert [x.offset for x in t] == list(range(7, 17))
    assert [x.improvement for x in t] == [2, 2, 6, 6, 8, 8, 8, 8, 10, 10]
    assert improvement_table(2, 6, 2) == []
    with pytest.raises(UsageError):
        improvement_table(2, 7, 2)


@pytest.mark.parametrize("q,count", [(2, 0), (3, 3), (4, 8), (5, 15)])
def test_r6_h2_improvement_count(q, count):
    assert len(improvement_table(q, 6, 2)) == count == q * (q - 2)


def test_nbar():
    assert nbar_griesmer(2, 8, 2, 8) == griesmer_ub(4, 4, 1, 8)
    assert nbar_griesmer(2, 7, 2, 3) is None


def test_closed_forms_examples():
    assert closed_forms(2, 7, 2, 2).value == 2
    assert closed_forms(3, 6, 2, 2).value == 10
    assert closed_forms(2, 6, 2, 2).value == 6
    assert closed_forms(2, 5, 3, 1).value == 9
    assert closed_forms(2, 4, 2, 3).value == 15
    assert closed_forms(2, 4, 3, 2).value == 30
    assert closed_forms(2, 7, 3, 5) is None


def test_small_s_condition_boundary():
    # h(s+1) = r: s+1 elements may span V, and the value can exceed s
    assert closed_forms(2, 4, 2, 1).value == 5
    assert closed_forms(3, 6, 2, 2).value == 10
    assert closed_forms(2, 7, 2, 2).source.startswith("small-s")


def test_closed_forms_are_consistent_with_griesmer():
    for q in (2, 3, 4):
        for r in range(2, 8):
            for h in range(1, r):
                for s in range(1, 30):
                    cf = closed_forms(q, r, h, s)
                    if cf is not None and cf.exact:
                        assert cf.value <= griesmer_ub(q, r, h, s), (q, r, h, s, cf)


def test_r6_h2_formula_agrees_with_asymptotic_table():
    for q in (2, 3, 4, 5):
        Q = q * q + 1
        table = asymptotic_table(q, 6, 2, t=q * q + q)
        for f in table:
            t = q * q + q
            cf = closed_forms(q, 6, 2, Q * t - f.offset)
            assert cf.exact and cf.value == f.value(t)


def test_bound_report():
    from addcodes.catalog import load_facts
    rep = bound_report(2, 8, 2, 8, load_facts())
    d = dict(rep.rows())
    assert (d["griesmer"], d["coding"], d["one-weight"]) == ("30", "28", "32")
    assert rep.upper == 28
    rep = bound_report(2, 4, 2, 3)
    assert rep.exact and rep.upper == 15
