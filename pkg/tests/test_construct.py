import itertools

import numpy as np
import pytest

from addcodes.construct import (asymptotic_construct, construction_x, construction_x_bound, mrd_partition,
                                negate_and_complete, partition1, partition_system, solomon_stiffler_general,
                                ss_conditions, star_constructions, vsp)
from addcodes.errors import ContractError, UsageError
from addcodes.pg import Subspace, bracket
from addcodes.psys import (ProjectiveSystem, TypeExpr, covered_points, point_counts, system_dual, system_params,
                           type_params, verify_type)


def is_partition_with(S, special):
    """Every point off the special space covered exactly once, the special space untouched."""
    w = point_counts(S)
    inside = np.zeros(len(w), dtype=bool)
    inside[special.point_indices()] = True
    return bool((w[~inside] == 1).all() and (w[inside] == 0).all())


def pairwise_trivial(S):
    els = [E for E, _ in S.items()]
    return all(A.meet(B).dim == 0 for A, B in itertools.combinations(els, 2))


@pytest.mark.parametrize("q,r,h,n,s,mu", [(2, 4, 2, 5, 1, 1), (2, 7, 2, 127, 31, 3), (2, 9, 3, 73, 9, 1),
                                          (3, 5, 2, 121, 13, 4), (2, 6, 4, 21, 1, 5), (4, 3, 2, 21, 1, 5)])
def test_partition_system_parameters(q, r, h, n, s, mu):
    p = system_params(partition_system(q, r, h))
    assert (p.n, p.s, p.mu, p.faithful) == (n, s, mu, True)
    assert len(p.hyperplane_spectrum) == 1 and len(p.point_spectrum) == 1


@pytest.mark.parametrize("q,r,h,count", [(2, 5, 2, 8), (2, 7, 3, 16), (3, 5, 2, 27), (2, 6, 3, 8)])
def test_mrd_partition(q, r, h, count):
    S, special = mrd_partition(q, r, h)
    assert S.n == S.distinct == count and special.dim == r - h
    assert is_partition_with(S, special)
    assert pairwise_trivial(S)
    with pytest.raises(UsageError):
        mrd_partition(q, 2 * h - 1, h)


def test_vsp():
    S, A = vsp(2, 8, 2, 4)
    assert S.n == 2 ** 4 * (2 ** 4 - 1) // 3 == 80 and A.dim == 4
    assert is_partition_with(S, A)
    S, A = vsp(3, 7, 2, 3)
    assert S.n == 3 ** 3 * (3 ** 4 - 1) // 8
    assert is_partition_with(S, A)
    with pytest.raises(UsageError):
        vsp(2, 8, 2, 5)


def test_partition1():
    S = partition1(2, 5, 2, 1)
    T = TypeExpr.parse("1[5]-[3]")
    assert verify_type(S, T)
    p = system_params(S)
    assert (p.n, p.s) == (8, 2)
    S = partition1(2, 8, 2, 2)
    assert verify_type(S, TypeExpr.parse("3[8]-[7]-2[5]"))
    with pytest.raises(UsageError):
        partition1(2, 5, 2, 3)


def test_star_constructions():
    out = star_constructions(2, 3, 2)
    assert str(out[0][0]) == "1[3]+2[1]"
    assert out[0][1].n == 3
    for T, S in out:
        assert verify_type(S, T)
    out = star_constructions(3, 3, 2)
    assert str(out[0][0]) == "1[3]+3[1]" and out[0][1].n == 4
    for T, S in out + star_constructions(2, 5, 2):
        assert verify_type(S, T)
    with pytest.raises(UsageError):
        star_constructions(2, 4, 2)


def test_construction_x_preparation():
    S, A = vsp(2, 6, 2, 4)
    bound, s0 = construction_x_bound(S, A, ProjectiveSystem(2, 4, 2))
    s = system_params(S).s
    assert s0 == s - 2 ** (4 - 2) == 0


def test_construction_x_empty_inner():
    S, A = vsp(2, 6, 2, 4)
    assert construction_x(S, A, ProjectiveSystem(2, 4, 2)).elements == S.elements
    with pytest.raises(UsageError):
        construction_x(S, A, ProjectiveSystem(2, 3, 2))


def test_construction_x_n_2_5_3_2():
    V, A = vsp(2, 5, 2, 3)
    S1 = ProjectiveSystem(2, 5, 2)
    for E, m in V.items():
        S1.add(E, 2 * m)
    arc = ProjectiveSystem(2, 3, 1)
    for row in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]):
        arc.add(np.array([row]))
    S2 = system_dual(arc)
    X = construction_x(S1, A, S2)
    bound, _ = construction_x_bound(S1, A, S2)
    p = system_params(X)
    assert p.s <= bound and p.mu == 2
    D = system_dual(X)
    pd = system_params(D)
    assert (pd.n, D.r, pd.s, pd.mu, D.h) == (20, 5, 2, 5, 3)


def test_negation_example():
    plane = Subspace(2, 4, np.eye(4, dtype=np.int64)[:3])
    S = ProjectiveSystem(2, 4, 2)
    for E in (Subspace(2, 4, M) for M in ([[1, 0, 0, 0], [0, 1, 0, 0]], [[1, 0, 0, 0], [0, 0, 1, 0]],
                                          [[0, 1, 0, 0], [0, 0, 1, 0]], [[1, 0, 0, 0], [0, 1, 1, 0]],
                                          [[0, 1, 0, 0], [1, 0, 1, 0]], [[0, 0, 1, 0], [1, 1, 0, 0]],
                                          [[1, 1, 0, 0], [0, 1, 1, 0]])):
        assert plane.contains(E)
        S.add(E)
    T = TypeExpr.parse("0[4]+3[3]")
    assert verify_type(S, T)
    N, TN = negate_and_complete(S, T)
    assert str(TN) == "7[4]-3[3]" and verify_type(N, TN)
    # adding whole copies of all lines keeps the chain part: 105[4]-3[3] as well
    from addcodes.construct import all_subspaces_system
    from addcodes.psys import system_union
    big = system_union(N, all_subspaces_system(2, 4, 2, 14))
    assert verify_type(big, TypeExpr.parse("105[4]-3[3]"))


def test_negation_of_empty_type():
    N, TN = negate_and_complete(ProjectiveSystem(2, 4, 2), TypeExpr(4, 0, (0, 0, 0)))
    assert N.n == 0 and TN.sigma == 0
    S = partition_system(2, 4, 2)
    N, TN = negate_and_complete(S, TypeExpr(4, 1, (0, 0, 0)))
    assert N.n == 30 and verify_type(N, TN) and TN.sigma == 6


def test_random_negations():
    rng = np.random.default_rng(4)
    done = 0
    while done < 10:
        q, r, h = [(2, 4, 2), (2, 5, 2), (3, 4, 2), (2, 5, 3)][done % 4]
        eps = [0] * (r - 1)
        for i in range(h, r):
            eps[i - 1] = int(rng.integers(0, 2))
        if ss_conditions(q, r, h, eps):
            continue
        sigma, S, _ = solomon_stiffler_general(q, r, h, eps)
        T = TypeExpr(r, sigma, tuple(eps))
        N, TN = negate_and_complete(S, T)
        assert verify_type(N, TN)
        done += 1


def test_solomon_stiffler_example():
    sigma, S, trace = solomon_stiffler_general(2, 8, 2, (0, 0, 1, 1, 1, 1, 1))
    T = TypeExpr(8, sigma, (0, 0, 1, 1, 1, 1, 1))
    assert verify_type(S, T)
    assert sigma % 3 == 2
    assert trace.final == T and "result" in trace.text()
    tp = type_params(T, 2, 2)
    p = system_params(S)
    assert (tp.n, tp.s, tp.mu) == (p.n, p.s, p.mu)


def test_solomon_stiffler_zero_eps():
    sigma, S, _ = solomon_stiffler_general(2, 7, 2, (0,) * 6)
    assert sigma == bracket(2, 2) // bracket(1, 2) == 3
    assert verify_type(S, TypeExpr(7, 3, (0,) * 6))


def test_solomon_stiffler_single_term():
    sigma, S, _ = solomon_stiffler_general(2, 7, 2, (0, 0, 0, 0, 1, 0))
    assert verify_type(S, TypeExpr(7, sigma, (0, 0, 0, 0, 1, 0)))
    assert (sigma * 127 - 31) % 3 == 0 and S.n == (sigma * 127 - 31) // 3


def test_solomon_stiffler_infeasible():
    with pytest.raises(ContractError, match="packing"):
        solomon_stiffler_general(2, 6, 2, (0, 0, 1, 1, 0))
    with pytest.raises(ContractError, match="divisible"):
        solomon_stiffler_general(2, 6, 2, (1, 0, 0, 0, 0))


def test_trace_replay_is_deterministic():
    sigma, S, trace = solomon_stiffler_general(2, 6, 2, (0, 1, 0, 1, 0))
    s2, S2, t2 = trace.replay()
    assert s2 == sigma and S2.elements == S.elements and t2.text() == trace.text()


def test_covered_points_divisible_for_constructions():
    from addcodes.divisible import is_divisible
    for S in (partition_system(2, 6, 2), vsp(2, 7, 3, 4)[0], partition1(2, 6, 2, 1),
              solomon_stiffler_general(2, 6, 3, (0, 0, 1, 0, 0))[1]):
        assert is_divisible(covered_points(S), S.q ** (S.h - 1))


def test_asymptotic_example_one():
    res = asymptotic_construct(2, 8, 2, 30, 8)
    assert res.theta == 0 and str(res.target).endswith("[8]-[7]-[5]-[3]")
    assert verify_type(res.system, TypeExpr(8, res.realized_sigma, res.target.eps))
    t0 = res.family_offset()
    for t in (t0, t0 + 1):
        p = system_params(res.instance(t))
        assert p.n == 30 + 85 * t and p.s <= 8 + 21 * t


def test_asymptotic_example_two_alternative_recipe():
    res = asymptotic_construct(2, 9, 3, 55, 7, realize=False)
    assert res.theta == 1 and str(res.target) == "2[9]-2[8]-[7]"
    alt = asymptotic_construct(2, 9, 3, 55, 7, eps_override=(0, 0, 0, 0, 0, 2, 0, 0))
    assert alt.realized_sigma == 2 and alt.realized_n == 128 and alt.realized_s == 16
    assert alt.family_offset() == 1
    p = system_params(alt.system)
    assert (p.n, p.s) == (128, 16)


def test_asymptotic_example_three_note():
    res = asymptotic_construct(2, 7, 3, 13, 2, realize=False)
    assert res.theta == 2 and res.unshifted_n == 49
    assert "49" in res.note


def test_asymptotic_above_griesmer_rejected():
    from addcodes.bounds import griesmer_ub
    with pytest.raises(ContractError):
        asymptotic_construct(2, 8, 2, griesmer_ub(2, 8, 2, 8) + 1, 8, realize=False)


@pytest.mark.parametrize("q,r,h,n,s", [(2, 6, 2, 6, 2), (2, 7, 2, 12, 5), (2, 5, 2, 9, 3)])
def test_family_arithmetic(q, r, h, n, s):
    from math import gcd
    res = asymptotic_construct(q, r, h, n, s)
    bg = bracket(gcd(r, h), q)
    t0 = res.family_offset()
    for t in (t0, t0 + 1, t0 + 2):
        p = system_params(res.instance(t))
        assert p.n == n + t * bracket(r, q) // bg
        assert p.s <= s + t * bracket(r - h, q) // bg
        assert p.n - p.s >= n - s + t * (bracket(r, q) - bracket(r - h, q)) // bg
