from fractions import Fraction

import numpy as np
import pytest

from addcodes.construct import partition_system
from addcodes.errors import ContractError, InputError, ParseError, UsageError
from addcodes.pg import Subspace, bracket, enumerate_subspaces, random_subspace
from helpers import hyperoval_pg24
from addcodes.psys import (PointMultiset, ProjectiveSystem, TypeExpr, covered_points, dual_type, extend_by_partition,
                           field_reduce, infer_type, point_counts, premultiset_params, project, read_psys,
                           scale_system, system_dual, system_params, system_union, type_multiset, type_params,
                           verify_type, write_psys)


def brute_params(S):
    """(n, s, mu) by direct enumeration of all hyperplanes and points (oracle)."""
    hyps = enumerate_subspaces(S.q, S.r, S.r - 1)
    pts = enumerate_subspaces(S.q, S.r, 1)
    s = max(sum(m for E, m in S.items() if Subspace.from_key(S.q, S.r, k).contains(E)) for k in hyps.keys())
    mu = max(sum(m for E, m in S.items() if E.contains(Subspace.from_key(S.q, S.r, k))) for k in pts.keys())
    return S.n, s, mu


def test_spread_parameters():
    S = partition_system(2, 4, 2)
    p = system_params(S)
    assert (p.n, p.s, p.mu, p.faithful) == (5, 1, 1, True)
    assert brute_params(S) == (5, 1, 1)
    C = covered_points(S)
    assert (C.weights == 1).all() and C.cardinality == 15


def test_single_element():
    S = ProjectiveSystem(2, 3, 2)
    S.add(np.array([[1, 0, 0], [0, 1, 0]]))
    p = system_params(S)
    assert (p.n, p.s, p.mu) == (1, 1, 1)
    assert covered_points(S).cardinality == 3


def test_partition_2_7_2_flat():
    p = system_params(partition_system(2, 7, 2))
    assert (p.n, p.s, p.mu) == (127, 31, 3)
    assert p.hyperplane_spectrum == {31: 127}
    assert p.point_spectrum == {3: 127}


@pytest.mark.parametrize("q,r,h,n", [(2, 5, 2, 6), (3, 4, 2, 5), (2, 4, 1, 7), (4, 3, 2, 4)])
def test_params_match_brute_force(q, r, h, n):
    rng = np.random.default_rng(q * 100 + r)
    for _ in range(3):
        S = ProjectiveSystem(q, r, h)
        for _ in range(n):
            S.add(random_subspace(q, r, h, rng))
        p = system_params(S)
        assert (p.n, p.s, p.mu) == brute_params(S)


def test_covered_points_errors_on_unfaithful():
    S = ProjectiveSystem(2, 3, 2)
    S.add(np.array([[1, 0, 0]]))
    with pytest.raises(ContractError):
        covered_points(S)


def test_hyperoval_field_reduction_and_extension():
    H = hyperoval_pg24()
    assert system_params(H).s == 2
    R = field_reduce(H, 2)
    p = system_params(R)
    assert (R.r, R.h, p.n, p.s) == (6, 2, 6, 2)
    E = extend_by_partition(R, 1)
    p = system_params(E)
    assert (p.n, p.s) == (27, 7)


def test_field_reduce_line_gives_spread():
    S = ProjectiveSystem(4, 2, 1)
    for k in enumerate_subspaces(4, 2, 1).keys():
        S.add(Subspace.from_key(4, 2, k))
    R = field_reduce(S, 2)
    p = system_params(R)
    assert (R.r, R.h, p.n, p.s, p.mu) == (4, 2, 5, 1, 1)
    single = ProjectiveSystem(4, 3, 1)
    single.add(np.array([[1, 2, 3]]))
    assert field_reduce(single, 2).h == 2 and field_reduce(single, 2).n == 1


def test_dual_of_example_system():
    S = ProjectiveSystem(2, 3, 1)
    S.add(np.array([[0, 1, 0]]), 3)
    S.add(np.array([[1, 0, 0]]), 3)
    S.add(np.array([[1, 1, 0]]), 3)
    T = TypeExpr.parse("0[3]+3[2]")
    assert verify_type(S, T)
    p = system_params(S)
    assert (p.n, p.s, p.mu) == (9, 9, 3)
    D = system_dual(S)
    pd = system_params(D)
    assert (D.h, pd.n, pd.s, pd.mu) == (2, 9, 3, 9)
    assert str(dual_type(T, 2, 1)) == "3[3]+6[1]"
    assert pd.point_spectrum == {3: 6, 9: 1}


def test_dual_involution_swaps_s_and_mu():
    rng = np.random.default_rng(11)
    for q, r, h in ((2, 4, 2), (2, 5, 2), (3, 4, 1), (2, 6, 3)):
        S = ProjectiveSystem(q, r, h)
        for _ in range(5):
            S.add(random_subspace(q, r, h, rng), int(rng.integers(1, 3)))
        D = system_dual(S)
        assert system_dual(D).elements == S.elements
        p, pd = system_params(S), system_params(D)
        assert (pd.s, pd.mu) == (p.mu, p.s)


def test_projection_example():
    S = partition_system(2, 4, 2)
    P = Subspace(2, 4, [[1, 0, 0, 0]])
    R = project(S, P)
    p = system_params(R)
    assert R.r == 3 and p.n == 5 and not p.faithful
    assert sorted(E.dim for E, _ in R.items()) == [1, 2, 2, 2, 2]
    assert p.s <= 2


def test_union_and_scaling():
    A = partition_system(2, 4, 2)
    U = system_union(A, A)
    assert U.n == 10 and scale_system(A, 3).n == 15
    with pytest.raises(UsageError):
        system_union(A, partition_system(2, 6, 2))


def test_type_params_zero_eps():
    T = TypeExpr(6, 3, (0,) * 5)
    tp = type_params(T, 2, 2)
    assert tp.n == Fraction(3 * 63, 3) and tp.feasible
    with pytest.raises(InputError):
        TypeExpr(6, 1, (0, 0))


def test_dual_type_examples():
    assert str(dual_type(TypeExpr.parse("0[3]+3[2]"), 2, 1)) == "3[3]+6[1]"
    T = TypeExpr(5, 1, (0,) * 4)
    assert dual_type(T, 2, 1).eps == (0,) * 4


def test_type_params_agree_with_measured_system():
    from addcodes.construct import solomon_stiffler_general
    sigma, S, _ = solomon_stiffler_general(2, 6, 2, (0, 0, 0, 1, 0))
    T = TypeExpr(6, sigma, (0, 0, 0, 1, 0))
    assert verify_type(S, T) and infer_type(S) == T
    tp = type_params(T, 2, 2)
    p = system_params(S)
    assert (tp.n, tp.s, tp.mu) == (p.n, p.s, p.mu)


def test_premultiset_partition_parameters():
    M = PointMultiset(2, 6)
    pp = premultiset_params(M, 1, 2)
    assert pp.feasible and pp.n == 21
    pp = premultiset_params(PointMultiset(2, 7), 3, 2)
    assert pp.n == 127


def test_type_parse_roundtrip():
    for text in ("3[8]-[7]-[5]-[3]", "272[8]-[7]-[6]-[5]-[4]-[3]", "3[3]+6[1]", "1[5]-2[3]"):
        assert str(TypeExpr.parse(text)) == text
    assert TypeExpr.parse("*[9]-[7]").sigma == 0
    with pytest.raises(ParseError):
        TypeExpr.parse("3[8]-[9]")
    with pytest.raises(ParseError):
        TypeExpr.parse("[8]x")


def test_psys_roundtrip_bit_stable():
    rng = np.random.default_rng(5)
    S = ProjectiveSystem(3, 4, 2)
    for _ in range(6):
        S.add(random_subspace(3, 4, int(rng.integers(1, 3)), rng), int(rng.integers(1, 4)))
    text = write_psys(S)
    T = read_psys(text)
    assert T.elements == S.elements
    assert write_psys(T) == text


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("psys q=2 r=3\n", 1),
    ("psys q=2 r=3 h=1\n\n120\n", 3),
    ("psys q=2 r=3 h=1\n\n11\n", 3),
    ("psys q=2 r=3 h=2\n\n110\n110\n", 3),
    ("psys q=2 r=3 h=1\n\nx 0\n100\n", 3),
])
def test_psys_parse_errors_have_locations(text, line):
    with pytest.raises(ParseError, match=f"line {line}"):
        read_psys(text)


def test_type_multiset():
    M = type_multiset(TypeExpr.parse("2[3]-[2]"), 2)
    assert sorted(M.weights.tolist()) == [1, 1, 1, 2, 2, 2, 2]
    assert point_counts(partition_system(2, 4, 2)).tolist() == [1] * 15
