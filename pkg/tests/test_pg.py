import itertools
from math import gcd

import numpy as np
import pytest

from addcodes.errors import InputError, ResourceError
from addcodes.gf import field_of_order
from addcodes.pg import (Subspace, bracket, bracket_gcd, bracket_identities, dual, enumerate_subspaces, gaussian,
                         incidence_matrix, map_subspace, point_hyperplane_incidence, points, random_subspace, rank,
                         rref)


def brute_subspace_count(q, r, h):
    """Count h-subspaces by collecting RREFs of all h x r matrices of rank h."""
    F = field_of_order(q)
    seen = set()
    for entries in itertools.product(range(q), repeat=h * r):
        M = np.array(entries).reshape(h, r)
        R, piv = rref(M, F)
        if len(piv) == h:
            seen.add(R.tobytes())
    return len(seen)


def test_brackets():
    assert bracket(4, 2) == 15 and bracket(2, 4) == 5 and bracket(0, 7) == 0
    assert bracket(4, 2) == 5 * 3
    assert gaussian(3, 2, 3) == 13
    assert gaussian(8, 2, 2) == 255 * 127 // 3 == 10795


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_gaussian_symmetry_and_points(q):
    for r in range(0, 7):
        for h in range(0, r + 1):
            assert gaussian(r, h, q) == gaussian(r, r - h, q)
        if r:
            assert gaussian(r, 1, q) == bracket(r, q)


@pytest.mark.parametrize("q,r,h", [(2, 3, 2), (2, 4, 2), (3, 3, 2), (2, 4, 3), (3, 3, 1)])
def test_gaussian_matches_brute_force(q, r, h):
    assert gaussian(r, h, q) == brute_subspace_count(q, r, h)


def test_bracket_identities_grid():
    for q in (2, 3, 4, 5, 7):
        for a in range(1, 7):
            for b in range(a, 9):
                lhs, rhs = bracket_identities(a, b, q)
                assert lhs == rhs
                direct = ((q ** a - 1) * (q ** (b - 1) - 1) - (q ** (a - 1) - 1) * (q ** b - 1)) // (q - 1) ** 2
                assert lhs == direct
                g1, g2 = bracket_gcd(a, b, q)
                assert g1 == g2 == bracket(gcd(a, b), q)
    assert bracket_identities(3, 3, 2) == (0, 0)
    assert bracket_gcd(6, 4, 2) == (3, 3)


def test_enumeration_counts():
    assert len(enumerate_subspaces(2, 3, 2).keys()) == 7
    assert len(enumerate_subspaces(2, 4, 2).keys()) == 35
    E = enumerate_subspaces(3, 3, 2)
    assert len(E.keys()) == 13
    members = E.point_members()
    assert members.shape == (13, 4)
    assert len(points(3, 3)) == 13


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        enumerate_subspaces(2, 10, 5, cap=1000)


def test_dual_of_coordinate_hyperplane():
    H = Subspace(2, 4, [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    P = dual(H)
    assert P.dim == 1
    assert P == Subspace(2, 4, [[1, 0, 0, 0]])


@pytest.mark.parametrize("q,r", [(2, 5), (3, 4), (4, 3), (5, 3)])
def test_dual_is_involution_reversing_inclusion(q, r):
    rng = np.random.default_rng(7)
    for _ in range(15):
        h = int(rng.integers(1, r))
        S = random_subspace(q, r, h, rng)
        D = dual(S)
        assert D.dim == r - S.dim
        assert dual(D) == S
        T = random_subspace(q, r, int(rng.integers(1, r)), rng)
        if T.contains(S):
            assert dual(S).contains(dual(T))


def test_join_meet_dimension_formula():
    rng = np.random.default_rng(3)
    for q, r in ((2, 6), (3, 4)):
        for _ in range(20):
            A = random_subspace(q, r, int(rng.integers(1, r)), rng)
            B = random_subspace(q, r, int(rng.integers(1, r)), rng)
            assert A.join(B).dim + A.meet(B).dim == A.dim + B.dim


def test_incidence_matrices():
    B = incidence_matrix(3, 3, 2, 1)
    assert B.shape == (13, 13)
    assert (B.sum(axis=0) == 4).all() and (B.sum(axis=1) == 4).all()
    P = incidence_matrix(2, 4, 3, 1)
    assert P.shape == (15, 15) and (P.sum(axis=1) == 7).all()
    I = incidence_matrix(2, 4, 2, 2)
    assert np.array_equal(I, np.eye(35, dtype=I.dtype))
    H = point_hyperplane_incidence(2, 3)
    assert H.shape == (7, 7) and (H.sum(axis=1) == 3).all()


def test_map_subspace():
    rng = np.random.default_rng(1)
    S = random_subspace(3, 4, 2, rng)
    assert map_subspace(S, np.eye(4, dtype=np.int64)) == S
    with pytest.raises(InputError):
        map_subspace(S, np.zeros((4, 4), dtype=np.int64))
    T = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]])
    assert map_subspace(S, T).dim == 2


def test_rref_is_canonical():
    F = field_of_order(5)
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = rng.integers(0, 5, size=(3, 6))
        R, piv = rref(M, F)
        assert rank(M, F) == len(piv)
        G = rng.integers(0, 5, size=(3, 3))
        while rank(G, F) < 3:
            G = rng.integers(0, 5, size=(3, 3))
        from addcodes.pg import fq_matmul
        R2, _ = rref(fq_matmul(G, M, F), F)
        assert np.array_equal(R, R2)
