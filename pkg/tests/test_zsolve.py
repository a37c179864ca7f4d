import numpy as np
import pytest

from addcodes.errors import InputError, ResourceError
from addcodes.pg import bracket, gaussian, incidence_matrix
from addcodes.psys import PointMultiset, TypeExpr, chain_multiset
from addcodes.zsolve import (hnf, incidence_modulus, invariant_pattern_ok, partitionable_star, read_matrix,
                             solve_diagonal_system, solve_integer, solve_transposed, snf, write_matrix)

EX_A = [[1, 1, 5, 7], [2, 8, 10, 20], [3, 3, 45, 51], [1, 7, 5, 13], [2, 2, 40, 44]]
EX_S = [[1, 0, 0, 0, 0], [-2, 1, 0, 0, 0], [-3, 0, 1, 0, 0], [1, -1, 0, 1, 0], [1, 0, -1, 0, 1]]
EX_T = [[1, -1, -6, 1], [0, 1, -1, 1], [0, 0, 0, 1], [0, 0, 1, -1]]


def test_example_snf_invariants_and_transforms():
    res = snf(EX_A, transforms=True)
    assert res.invariants == [1, 6, 30]
    assert res.verify(EX_A)
    D = np.array(EX_S, dtype=object).dot(np.array(EX_A, dtype=object)).dot(np.array(EX_T, dtype=object))
    assert np.array_equal(D, res.diagonal())


def test_example_transposed_diagonal_system():
    D = snf(EX_A).diagonal()
    out = solve_diagonal_system(D.T, [1, 6, 30, 0])
    assert out.solvable and out.solution[:3] == [1, 1, 1]
    bad = solve_diagonal_system(D.T, [1, 5, 30, 0])
    assert not bad.solvable and "not divisible by 6" in bad.violations[0]
    assert not solve_diagonal_system(D.T, [1, 6, 30, 2]).solvable


def test_incidence_invariants():
    assert snf(incidence_matrix(3, 3, 2, 1)).pattern() == {1: 7, 3: 5, 12: 1}
    assert snf(incidence_matrix(2, 4, 3, 1)).pattern() == {1: 5, 2: 6, 4: 3, 28: 1}


@pytest.mark.parametrize("q,r,h", [(2, 3, 2), (2, 4, 2), (2, 5, 3), (3, 3, 2), (3, 4, 2), (4, 3, 2), (2, 6, 2)])
def test_invariant_pattern_small(q, r, h):
    A = incidence_matrix(q, r, 1, h)
    res = snf(A, modulus=incidence_modulus(q, r, h))
    assert res.invariants == snf(A).invariants
    p = 2 if q in (2, 4) else 3
    assert invariant_pattern_ok(res.invariants, p, bracket(h, q))
    assert res.rank == bracket(r, q)


def test_snf_random_transforms():
    rng = np.random.default_rng(2)
    for _ in range(20):
        m, n = rng.integers(1, 7, size=2)
        A = rng.integers(-9, 10, size=(m, n))
        res = snf(A, transforms=True)
        assert res.verify(A)
        assert all(b % a == 0 for a, b in zip(res.invariants, res.invariants[1:]))


def test_snf_cap():
    with pytest.raises(ResourceError):
        snf(np.ones((100, 100), dtype=np.int64), cap=1000)


def test_solve_integer_forward_instances():
    rng = np.random.default_rng(9)
    for _ in range(30):
        m, n = rng.integers(1, 9, size=2)
        A = rng.integers(-5, 6, size=(m, n))
        x = rng.integers(-4, 5, size=n)
        b = A.dot(x)
        out = solve_integer(A, b)
        assert out.solvable and out.check(A, b)


def test_solve_integer_trivial_and_unsolvable():
    A = np.array([[2, 4], [6, 8]])
    out = solve_integer(A, [0, 0])
    assert out.solvable and out.solution == [0, 0]
    assert not solve_integer(np.array([[2, 4]]), [3]).solvable
    assert solve_transposed(np.array([[2], [4]]), [6]).solvable
    with pytest.raises(InputError):
        solve_integer(A, [1, 2, 3])


def test_hnf_spans_same_lattice():
    A = np.array(EX_A, dtype=object).T
    H = hnf(A)
    for col in A.T:
        assert solve_integer(H, col).solvable
    for col in H.T:
        assert solve_integer(A, col).solvable


def test_matrix_text_roundtrip():
    text = write_matrix(EX_A)
    assert read_matrix(text).tolist() == EX_A
    with pytest.raises(InputError):
        read_matrix("2 2\n1 2\n")


def test_partitionable_packing_failure():
    res = partitionable_star(2, 9, 3, chain_multiset(2, 9, TypeExpr.parse("*[9]-[7]").eps))
    assert not res.decision and res.reason == "packing"


def test_partitionable_empty_type():
    res = partitionable_star(2, 4, 2, PointMultiset(2, 4))
    assert res.decision and res.sigma_residue == 0


def test_partitionable_line_in_plane():
    # a single line of PG(2,2) is trivially 2-partitionable: sigma = 0, M = -chi_L
    M = PointMultiset(2, 3, [0] * 7)
    from addcodes.pg import Subspace
    M.weights[Subspace(2, 3, [[1, 0, 0], [0, 1, 0]]).point_indices()] = -1
    res = partitionable_star(2, 3, 2, M)
    assert res.decision
    A = incidence_matrix(2, 3, 1, 2)
    assert (A.dot(np.array(res.solution)) == res.sigma_residue - M.weights).all()


def test_partitionable_lattice_failure():
    # a single point of PG(2,2) with sigma = 0 cannot be a signed sum of lines' complement
    M = PointMultiset(2, 3, [1, 0, 0, 0, 0, 0, 0])
    res = partitionable_star(2, 3, 2, M)
    assert not res.decision


def test_incidence_modulus_contains_scaled_unit_vectors():
    for q, r, h in ((2, 4, 2), (3, 3, 2), (2, 5, 3)):
        A = incidence_matrix(q, r, 1, h)
        inv = snf(A).invariants
        D = incidence_modulus(q, r, h)
        assert D % inv[-1] == 0
        assert len(inv) == bracket(r, q) <= gaussian(r, h, q)
        e = np.zeros(bracket(r, q), dtype=np.int64)
        e[0] = D
        assert solve_integer(A, e).solvable
