"""Additive codes and their correspondence with projective systems.

An additive [n, r/h, d]_q^h code is the F_q-row space of an r x n matrix G
over F_{q^h}.  Writing every entry over the basis (1, w, ..., w^{h-1}) gives
the r x nh subfield generator matrix; the column spaces of its n blocks of h
columns form the associated projective system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ContractError, InputError, ResourceError, UsageError
from .gf import extension, field_of_order
from .pg import bracket, fq_matmul, rank, span_points
from .psys import ProjectiveSystem, hyperplane_counts, system_params

BRUTE_FORCE_CAP = 2 ** 24


@dataclass(frozen=True)
class WeightEnumerator:
    """Coefficients A_0..A_n: number of codewords of each weight."""

    coeffs: tuple[int, ...]

    @property
    def size(self) -> int:
        return sum(self.coeffs)

    @property
    def min_distance(self) -> int:
        return next((w for w, a in enumerate(self.coeffs) if w and a), 0)

    @property
    def weights(self) -> list[int]:
        return [w for w, a in enumerate(self.coeffs) if w and a]

    def __getitem__(self, w: int) -> int:
        return self.coeffs[w] if 0 <= w < len(self.coeffs) else 0

    def __str__(self) -> str:
        parts = []
        for w, a in enumerate(self.coeffs):
            if not a:
                continue
            if w == 0:
                parts.append(str(a))
            else:
                parts.append(f"{'' if a == 1 else a}x^{w}" if w > 1 else f"{'' if a == 1 else a}x")
        return " + ".join(parts)


class AdditiveCode:
    """F_q-linear code over F_{q^h} given by an r x n generator matrix G (element codes)."""

    def __init__(self, q: int, h: int, G: Sequence[Sequence[int]] | np.ndarray):
        self.q, self.h = q, h
        self.G = np.asarray(G, dtype=np.int64)
        if self.G.ndim != 2:
            raise InputError("generator matrix must be two-dimensional")
        if self.G.size and (self.G.min() < 0 or self.G.max() >= q ** h):
            raise InputError(f"entries must be element codes of F_{q ** h}")
        self._sub: np.ndarray | None = None
        if rank(self.subfield_matrix(), field_of_order(q)) != self.r:
            raise InputError("generator matrix is rank deficient over F_q")

    @property
    def r(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def k(self) -> Fraction:
        return Fraction(self.r, self.h)

    @property
    def size(self) -> int:
        return self.q ** self.r

    def subfield_matrix(self) -> np.ndarray:
        """r x nh matrix over F_q; block j holds the coordinates of column j."""
        if self._sub is None:
            if self.h == 1:
                self._sub = self.G.copy()
            else:
                ext = extension(self.q, self.h)
                table = np.array([ext.expand(x) for x in range(self.q ** self.h)], dtype=np.int64)
                self._sub = table[self.G].reshape(self.r, self.n * self.h)
        return self._sub

    @classmethod
    def from_subfield_matrix(cls, q: int, h: int, Gt: np.ndarray) -> "AdditiveCode":
        Gt = np.asarray(Gt, dtype=np.int64)
        r, nh = Gt.shape
        if nh % h:
            raise InputError("column count is not a multiple of h")
        if h == 1:
            return cls(q, 1, Gt)
        ext = extension(q, h)
        G = np.zeros((r, nh // h), dtype=np.int64)
        for i in range(r):
            for j in range(nh // h):
                G[i, j] = ext.contract(Gt[i, j * h : (j + 1) * h])
        return cls(q, h, G)

    def blocks(self) -> list[np.ndarray]:
        """Transposed column blocks: h x r matrices whose row spaces are the system elements."""
        Gt = self.subfield_matrix()
        return [Gt[:, j * self.h : (j + 1) * self.h].T for j in range(self.n)]

    def codewords_subfield(self, limit: int = BRUTE_FORCE_CAP) -> np.ndarray:
        if self.size > limit:
            raise ResourceError(f"{self.size} codewords exceed the enumeration cap")
        F = field_of_order(self.q)
        U = np.array(list(product(range(self.q), repeat=self.r)), dtype=np.int64).reshape(-1, self.r)
        return fq_matmul(U, self.subfield_matrix(), F)

    def __repr__(self) -> str:
        return f"AdditiveCode(q={self.q}, h={self.h}, n={self.n}, r={self.r})"


def system_to_code(S: ProjectiveSystem) -> AdditiveCode:
    """Generator matrix whose column blocks span the elements of S."""
    if S.n == 0:
        raise InputError("empty system")
    cols = []
    for sub, m in S.items():
        M = np.zeros((S.h, S.r), dtype=np.int64)
        M[: sub.dim] = sub.matrix
        for _ in range(m):
            cols.append(M.T)
    Gt = np.concatenate(cols, axis=1)
    return AdditiveCode.from_subfield_matrix(S.q, S.h, Gt)


def code_to_system(C: AdditiveCode) -> ProjectiveSystem:
    S = ProjectiveSystem(C.q, C.r, C.h)
    F = field_of_order(C.q)
    for B in C.blocks():
        if rank(B, F):
            S.add(B)
        else:
            raise ContractError("a zero column block has no associated subspace")
    return S


def _weights_from_subfield(words: np.ndarray, n: int, h: int) -> np.ndarray:
    nz = words.reshape(words.shape[0], n, h).any(axis=2)
    return nz.sum(axis=1)


def weight_enumerator_bruteforce(C: AdditiveCode) -> WeightEnumerator:
    W = _weights_from_subfield(C.codewords_subfield(), C.n, C.h)
    return WeightEnumerator(tuple(int(x) for x in np.bincount(W, minlength=C.n + 1)))


def weight_enumerator_geometric(S: ProjectiveSystem) -> WeightEnumerator:
    """Each hyperplane with i elements gives q-1 codewords of weight n-i."""
    hc = hyperplane_counts(S)
    coeffs = [0] * (S.n + 1)
    coeffs[0] = 1
    for i in hc:
        coeffs[S.n - int(i)] += S.q - 1
    return WeightEnumerator(tuple(coeffs))


def weight_enumerator(C: AdditiveCode | ProjectiveSystem, method: str = "auto") -> WeightEnumerator:
    if method not in ("auto", "geometric", "bruteforce"):
        raise UsageError(f"unknown method {method}")
    if isinstance(C, ProjectiveSystem):
        if method == "bruteforce":
            return weight_enumerator_bruteforce(system_to_code(C))
        return weight_enumerator_geometric(C)
    if method == "bruteforce":
        return weight_enumerator_bruteforce(C)
    try:
        S = code_to_system(C)
    except ContractError:
        return weight_enumerator_bruteforce(C)
    return weight_enumerator_geometric(S)


def minimum_distance(C: AdditiveCode | ProjectiveSystem) -> int:
    return weight_enumerator(C).min_distance


def derived_linear_code(S: ProjectiveSystem) -> AdditiveCode:
    """Linear [n[h]_q, r, q^{h-1}(n-s)]_q code whose columns are the points of the elements."""
    if not S.faithful:
        raise ContractError("derived linear code needs a faithful system")
    F = field_of_order(S.q)
    cols = []
    for sub, m in S.items():
        P = span_points(sub.matrix, F)
        for _ in range(m):
            cols.append(P.T)
    return AdditiveCode(S.q, 1, np.concatenate(cols, axis=1))


# ---------------------------------------------------------------------------
# double counting


@dataclass
class SpectrumSolution:
    counts: tuple[int, ...]
    solutions: list[dict[int, int]]
    complete: bool = True

    @property
    def feasible(self) -> bool:
        return bool(self.solutions)


def spectrum_equations(q: int, r: int, h: int, n: int, allowed_counts: Sequence[int],
                       pair_spans: dict[int, int] | None = None, cap: int = 10 ** 6) -> SpectrumSolution:
    """Non-negative integer hyperplane spectra (a_i) of a faithful h-system with n elements.

    Equations: sum a_i = [r]_q, sum i a_i = n [r-h]_q and
    sum C(i,2) a_i = sum_j y_j [r-j]_q, where y_j counts unordered element
    pairs spanning a j-space (default: all pairs span min(2h, r) dimensions).
    """
    counts = tuple(sorted(set(int(c) for c in allowed_counts)))
    if not counts or counts[0] < 0:
        raise InputError("allowed counts must be non-negative")
    if pair_spans is None:
        pair_spans = {min(2 * h, r): n * (n - 1) // 2}
    if sum(pair_spans.values()) != n * (n - 1) // 2:
        raise InputError("pair span counts must add up to n(n-1)/2")
    rhs = [bracket(r, q), n * bracket(r - h, q),
           sum(y * bracket(r - j, q) for j, y in pair_spans.items())]
    rows = [[1] * len(counts), list(counts), [c * (c - 1) // 2 for c in counts]]
    m = len(counts)
    sols: list[dict[int, int]] = []
    if m <= 3:
        sol = _solve_small(rows, rhs, m)
        if sol is not None and all(x.denominator == 1 and x >= 0 for x in sol):
            sols.append({c: int(x) for c, x in zip(counts, sol)})
        return SpectrumSolution(counts, sols)
    # enumerate the m-3 counts with the largest values, solve for the rest
    free = list(range(3, m))
    fixed = [0, 1, 2]
    bound = bracket(r, q)
    tried = 0
    complete = True
    for vals in product(range(bound + 1), repeat=len(free)):
        tried += 1
        if tried > cap:
            complete = False
            break
        rest = [rhs[e] - sum(rows[e][f] * v for f, v in zip(free, vals)) for e in range(3)]
        sub = [[rows[e][c] for c in fixed] for e in range(3)]
        sol = _solve_small(sub, rest, 3)
        if sol is None or not all(x.denominator == 1 and x >= 0 for x in sol):
            continue
        a = {counts[c]: int(x) for c, x in zip(fixed, sol)}
        a.update({counts[f]: v for f, v in zip(free, vals)})
        sols.append(dict(sorted(a.items())))
    return SpectrumSolution(counts, sols, complete)


def _solve_small(rows: list[list[int]], rhs: list[int], m: int) -> list[Fraction] | None:
    """Exact solution of the (3 x m, m <= 3) system, or None if inconsistent / underdetermined."""
    A = [[Fraction(x) for x in row[:m]] + [Fraction(b)] for row, b in zip(rows, rhs)]
    piv = []
    rr = 0
    for c in range(m):
        p = next((i for i in range(rr, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[rr], A[p] = A[p], A[rr]
        A[rr] = [x / A[rr][c] for x in A[rr]]
        for i in range(len(A)):
            if i != rr and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[rr])]
        piv.append(c)
        rr += 1
    if any(A[i][m] != 0 for i in range(rr, len(A))):
        return None
    if len(piv) < m:
        return None
    return [A[i][m] for i in range(m)]


def three_count_a1(q: int, h: int, n: int) -> int:
    """a_1 = n [h]_q (q^h + 2 - n) for r = 3h, counts {0,1,2} and pairwise spans of dimension 2h."""
    return n * bracket(h, q) * (q ** h + 2 - n)


def two_weight_admissible(w1: int, w2: int, q: int) -> bool:
    """w1 = u p^t and w2 = (u+1) p^t for positive integers u, t (p the characteristic)."""
    if not 0 < w1 < w2:
        raise InputError("need 0 < w1 < w2")
    p = field_of_order(q).p
    diff = w2 - w1
    t = 0
    while diff % p == 0:
        diff //= p
        t += 1
    if diff != 1 or t < 1:
        return False
    return w1 % (w2 - w1) == 0


def code_params(C: AdditiveCode) -> tuple[int, Fraction, int]:
    """(n, k, d) of the code."""
    return C.n, C.k, minimum_distance(C)


def system_code_relation(S: ProjectiveSystem) -> bool:
    """d = n - s for the additive code and q^{h-1}(n - s) for the derived linear code."""
    p = system_params(S)
    C = system_to_code(S)
    d = minimum_distance(C)
    ok = d == S.n - p.s
    if S.faithful:
        ok = ok and minimum_distance(derived_linear_code(S)) == S.q ** (S.h - 1) * (S.n - p.s)
    return ok
