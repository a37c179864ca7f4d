"""Shared fixtures-by-function for the test modules."""

import numpy as np

from addcodes.gf import field_of_order
from addcodes.pg import random_subspace
from addcodes.psys import ProjectiveSystem


def hyperoval_pg24() -> ProjectiveSystem:
    """Conic {(1,t,t^2)} plus (0,0,1) and its nucleus (0,1,0) in PG(2,4)."""
    F = field_of_order(4)
    S = ProjectiveSystem(4, 3, 1)
    for t in range(4):
        S.add(np.array([[1, t, F.mul(t, t)]]))
    S.add(np.array([[0, 0, 1]]))
    S.add(np.array([[0, 1, 0]]))
    return S


def random_system(rng, q, r, h, n, faithful=False) -> ProjectiveSystem:
    S = ProjectiveSystem(q, r, h)
    while S.n < n:
        d = h if faithful else int(rng.integers(1, h + 1))
        S.add(random_subspace(q, r, d, rng), int(rng.integers(1, 3)))
    return S
