"""Projective geometry PG(r-1, q): points, subspaces, duality, incidence.

Subspaces are stored as generator matrices in reduced row-echelon form
(RREF) with entries given by field-element codes.  The RREF is unique, so
its bytes serve as a hashable key.  Vectors are row vectors; the duality is
taken with respect to the standard dot product.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import gcd, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError, UsageError
from .gf import Field, field_of_order

DEFAULT_CAP = 2 ** 21


# ---------------------------------------------------------------------------
# q-analogues


def bracket(i: int, q: int) -> int:
    """[i]_q = (q^i - 1)/(q - 1), the number of points of an i-space."""
    if i < 0:
        raise InputError("bracket needs i >= 0")
    return (q ** i - 1) // (q - 1)


def gaussian(r: int, h: int, q: int) -> int:
    """Number of h-dimensional subspaces of F_q^r."""
    if h < 0 or h > r:
        return 0
    num = prod(q ** (r - i) - 1 for i in range(h))
    den = prod(q ** (h - i) - 1 for i in range(h))
    return num // den


def bracket_identities(a: int, b: int, q: int) -> tuple[int, int]:
    """Both sides of [a][b-1] - [a-1][b] = q^{a-1}[b-a] (requires b >= a >= 1)."""
    if not 1 <= a <= b:
        raise InputError("need b >= a >= 1")
    lhs = bracket(a, q) * bracket(b - 1, q) - bracket(a - 1, q) * bracket(b, q)
    rhs = q ** (a - 1) * bracket(b - a, q)
    return lhs, rhs


def bracket_gcd(a: int, b: int, q: int) -> tuple[int, int]:
    """(gcd([a]_q, [b]_q), [gcd(a, b)]_q); the two agree."""
    return gcd(bracket(a, q), bracket(b, q)), bracket(gcd(a, b), q)


# ---------------------------------------------------------------------------
# linear algebra over F_q on code matrices


def _is_prime(F: Field) -> bool:
    return F.m == 1


def fq_matmul(A: np.ndarray, B: np.ndarray, F: Field) -> np.ndarray:
    """Matrix product over F_q of code matrices."""
    A = np.asarray(A)
    B = np.asarray(B)
    if _is_prime(F):
        return (A.astype(np.int64) @ B.astype(np.int64)) % F.p
    add, mul, _, _ = F.tables()
    out = np.zeros((A.shape[0], B.shape[1]), dtype=add.dtype)
    for t in range(A.shape[1]):
        out = add[out, mul[A[:, t, None], B[None, t, :]]]
    return out.astype(np.int64)


def rref(M: np.ndarray, F: Field) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over F_q; returns (nonzero rows, pivot columns)."""
    M = np.array(M, dtype=np.int64, copy=True)
    if M.ndim != 2:
        raise InputError("rref needs a matrix")
    nrows, ncols = M.shape
    add, mul, neg, inv = F.tables()
    pivots: list[int] = []
    row = 0
    for c in range(ncols):
        if row == nrows:
            break
        nz = np.nonzero(M[row:, c])[0]
        if len(nz) == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            M[[row, pr]] = M[[pr, row]]
        lead = int(M[row, c])
        if lead != 1:
            M[row] = mul[inv[lead], M[row]]
        others = np.nonzero(M[:, c])[0]
        for i in others:
            if i == row:
                continue
            f = int(neg[M[i, c]])
            M[i] = add[M[i], mul[f, M[row]]]
        pivots.append(c)
        row += 1
    return M[:row].copy(), pivots


def rank(M: np.ndarray, F: Field) -> int:
    return len(rref(M, F)[1])


def kernel(M: np.ndarray, F: Field, r: int | None = None) -> np.ndarray:
    """Basis (rows) of {x : M x^T = 0}, i.e. the orthogonal complement of the row space."""
    M = np.asarray(M, dtype=np.int64)
    if r is None:
        r = M.shape[1]
    if M.size == 0:
        return np.eye(r, dtype=np.int64)
    R, piv = rref(M, F)
    _, _, neg, _ = F.tables()
    free = [c for c in range(r) if c not in piv]
    out = np.zeros((len(free), r), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = neg[R[i, f]]
    return out


# ---------------------------------------------------------------------------
# points


@lru_cache(maxsize=None)
def _point_data(q: int, r: int) -> tuple[np.ndarray, np.ndarray | dict]:
    F = field_of_order(q)
    vecs = []
    for lead in range(r - 1, -1, -1):
        tail = r - lead - 1
        n = q ** tail
        block = np.zeros((n, r), dtype=np.uint8)
        block[:, lead] = 1
        idx = np.arange(n)
        for j in range(tail):
            block[:, r - 1 - j] = (idx // q ** j) % q
        vecs.append(block)
    pts = np.concatenate(vecs, axis=0)
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    codes = encode(pts, q)
    if q ** r <= 2 ** 24:
        lookup = np.full(q ** r, -1, dtype=np.int64)
        lookup[codes] = np.arange(len(pts))
    else:
        lookup = {int(c): i for i, c in enumerate(codes)}
    _ = F
    return pts, lookup


def encode(vectors: np.ndarray, q: int) -> np.ndarray:
    """Integer code of each row vector (base q, first coordinate most significant)."""
    v = np.asarray(vectors, dtype=np.int64)
    r = v.shape[-1]
    w = q ** np.arange(r - 1, -1, -1, dtype=np.int64)
    return v @ w


def points(q: int, r: int) -> np.ndarray:
    """All [r]_q canonical point vectors (first nonzero coordinate 1), lexicographic."""
    return _point_data(q, r)[0]


def num_points(q: int, r: int) -> int:
    return bracket(r, q)


def normalize_vectors(V: np.ndarray, F: Field) -> np.ndarray:
    """Scale nonzero rows so that their first nonzero coordinate is 1."""
    V = np.asarray(V, dtype=np.int64)
    _, mul, _, inv = F.tables()
    nz = V != 0
    first = np.argmax(nz, axis=1)
    lead = V[np.arange(len(V)), first]
    return mul[inv[lead][:, None], V].astype(np.int64)


def point_index(vectors: np.ndarray, q: int, r: int | None = None) -> np.ndarray:
    """Rank indices of canonical point vectors."""
    V = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    if r is None:
        r = V.shape[1]
    _, lookup = _point_data(q, r)
    codes = encode(V, q)
    if isinstance(lookup, dict):
        out = np.array([lookup[int(c)] for c in codes], dtype=np.int64)
    else:
        out = lookup[codes]
    if np.any(out < 0):
        raise InputError("vector is not a canonical point representative")
    return out


@lru_cache(maxsize=None)
def _coefficient_points(q: int, h: int) -> np.ndarray:
    return np.asarray(points(q, h), dtype=np.int64) if h > 0 else np.zeros((0, 0), dtype=np.int64)


def span_points(rows: np.ndarray, F: Field) -> np.ndarray:
    """Canonical vectors of all points in the span of RREF ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    h = rows.shape[0]
    if h == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.int64)
    C = _coefficient_points(F.q, h)
    # combinations of RREF rows with canonical coefficient vectors are canonical
    return fq_matmul(C, rows, F)


def batch_span_point_indices(mats: np.ndarray, F: Field) -> np.ndarray:
    """Point indices of the spans of a batch of RREF matrices (N, h, r) -> (N, [h])."""
    mats = np.asarray(mats, dtype=np.int64)
    N, h, r = mats.shape
    q = F.q
    C = _coefficient_points(q, h)
    if _is_prime(F):
        V = np.einsum("ph,nhr->npr", C, mats) % F.p
    else:
        add, mul, _, _ = F.tables()
        V = np.zeros((N, len(C), r), dtype=add.dtype)
        for t in range(h):
            V = add[V, mul[C[None, :, t, None], mats[:, None, t, :]]]
    out = point_index(V.reshape(-1, r), q, r)
    return out.reshape(N, len(C))


# ---------------------------------------------------------------------------
# subspaces


def canonical_key(M: np.ndarray) -> bytes:
    return np.asarray(M, dtype=np.uint8).tobytes()


def key_to_matrix(key: bytes, r: int) -> np.ndarray:
    return np.frombuffer(key, dtype=np.uint8).reshape(-1, r).astype(np.int64)


class Subspace:
    """A subspace of F_q^r given by its RREF generator matrix."""

    __slots__ = ("q", "r", "matrix", "pivots", "_key")

    def __init__(self, q: int, r: int, rows: Sequence[Sequence[int]] | np.ndarray, *, canonical: bool = False):
        F = field_of_order(q)
        M = np.asarray(rows, dtype=np.int64).reshape(-1, r) if len(rows) else np.zeros((0, r), dtype=np.int64)
        if M.size and (M.min() < 0 or M.max() >= q):
            raise InputError("matrix entries must be field codes")
        if canonical:
            self.matrix = M
            self.pivots = [int(np.nonzero(row)[0][0]) for row in M]
        else:
            self.matrix, self.pivots = rref(M, F) if M.size else (M, [])
        self.q = q
        self.r = r
        self._key: bytes | None = None

    @classmethod
    def from_key(cls, q: int, r: int, key: bytes) -> "Subspace":
        return cls(q, r, key_to_matrix(key, r), canonical=True)

    @property
    def field(self) -> Field:
        return field_of_order(self.q)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = canonical_key(self.matrix)
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subspace) and (self.q, self.r) == (other.q, other.r) and self.key == other.key

    def __hash__(self) -> int:
        return hash((self.q, self.r, self.key))

    def __repr__(self) -> str:
        rows = ["".join(str(int(x)) for x in row) for row in self.matrix]
        return f"Subspace(q={self.q}, r={self.r}, {rows})"

    def point_vectors(self) -> np.ndarray:
        return span_points(self.matrix, self.field)

    def point_indices(self) -> np.ndarray:
        return point_index(self.point_vectors(), self.q, self.r) if self.dim else np.zeros(0, dtype=np.int64)

    def contains(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        stacked = np.vstack([self.matrix, other.matrix])
        return rank(stacked, self.field) == self.dim

    def incident(self, other: "Subspace") -> bool:
        return self.contains(other) or other.contains(self)

    def join(self, other: "Subspace") -> "Subspace":
        return Subspace(self.q, self.r, np.vstack([self.matrix, other.matrix]))

    def meet(self, other: "Subspace") -> "Subspace":
        return dual(dual(self).join(dual(other)))


def subspace_of_key(q: int, r: int, key: bytes) -> Subspace:
    return Subspace.from_key(q, r, key)


def coordinate_subspace(q: int, r: int, i: int) -> Subspace:
    """span(e_1, ..., e_i): the canonical chain element S_i."""
    return Subspace(q, r, np.eye(r, dtype=np.int64)[:i], canonical=True)


def dual(S: Subspace) -> Subspace:
    """Orthogonal complement with respect to the standard dot product."""
    F = S.field
    if S.dim == 0:
        return Subspace(S.q, S.r, np.eye(S.r, dtype=np.int64), canonical=True)
    K = kernel(S.matrix, F, S.r)
    if K.shape[0] == 0:
        return Subspace(S.q, S.r, np.zeros((0, S.r), dtype=np.int64), canonical=True)
    return Subspace(S.q, S.r, K)


def map_subspace(S: Subspace, T: np.ndarray) -> Subspace:
    """Image of S under the invertible linear map v -> v T."""
    F = S.field
    T = np.asarray(T, dtype=np.int64)
    if T.shape != (S.r, S.r):
        raise InputError("transformation must be r x r")
    if rank(T, F) != S.r:
        raise InputError("transformation matrix is singular")
    if S.dim == 0:
        return S
    return Subspace(S.q, S.r, fq_matmul(S.matrix, T, F))


def complete_basis(rows: np.ndarray, F: Field, r: int) -> np.ndarray:
    """Extend independent rows to an invertible r x r matrix (given rows first)."""
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, r)
    basis = [row for row in rows]
    for i in range(r):
        if len(basis) == r:
            break
        e = np.zeros(r, dtype=np.int64)
        e[i] = 1
        trial = np.vstack(basis + [e]) if basis else e[None, :]
        if rank(trial, F) == len(basis) + 1:
            basis.append(e)
    M = np.vstack(basis)
    if rank(M, F) != r:
        raise InputError("rows are linearly dependent")
    return M


# ---------------------------------------------------------------------------
# enumeration


class Enumeration:
    """All h-spaces of F_q^r in lexicographic order of their RREF matrices."""

    def __init__(self, q: int, r: int, h: int, mats: np.ndarray):
        self.q, self.r, self.h = q, r, h
        self.mats = mats  # (N, h, r) uint8
        self._index: dict[bytes, int] | None = None
        self._members: np.ndarray | None = None

    def __len__(self) -> int:
        return self.mats.shape[0]

    def __getitem__(self, i: int) -> Subspace:
        return Subspace(self.q, self.r, self.mats[i].astype(np.int64), canonical=True)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def keys(self) -> list[bytes]:
        return [m.tobytes() for m in self.mats]

    @property
    def index(self) -> dict[bytes, int]:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(self.keys())}
        return self._index

    def rank_of(self, S: Subspace) -> int:
        return self.index[S.key]

    def point_members(self) -> np.ndarray:
        """(N, [h]) array of point indices contained in each subspace."""
        if self._members is None:
            F = field_of_order(self.q)
            out = []
            step = max(1, 2 ** 20 // max(1, bracket(self.h, self.q) * self.r))
            for s in range(0, len(self), step):
                out.append(batch_span_point_indices(self.mats[s : s + step], F))
            self._members = np.concatenate(out, axis=0) if out else np.zeros((0, bracket(self.h, self.q)), dtype=np.int64)
        return self._members


@lru_cache(maxsize=32)
def enumerate_subspaces(q: int, r: int, h: int, cap: int = DEFAULT_CAP) -> Enumeration:
    """All h-spaces of PG(r-1, q), deterministic lexicographic RREF order."""
    if not 0 <= h <= r:
        raise InputError("need 0 <= h <= r")
    total = gaussian(r, h, q)
    if total > cap:
        raise ResourceError(f"{total} subspaces exceed the cap {cap}")
    blocks = []
    for piv in combinations(range(r), h):
        free = [(i, j) for i in range(h) for j in range(piv[i] + 1, r) if j not in piv]
        n = q ** len(free)
        block = np.zeros((n, h, r), dtype=np.uint8)
        for i, c in enumerate(piv):
            block[:, i, c] = 1
        idx = np.arange(n, dtype=np.int64)
        for k, (i, j) in enumerate(reversed(free)):
            block[:, i, j] = (idx // q ** k) % q
        blocks.append(block)
    mats = np.concatenate(blocks, axis=0) if blocks else np.zeros((1, 0, r), dtype=np.uint8)
    flat = mats.reshape(len(mats), -1)
    if flat.shape[1]:
        order = np.lexsort(flat.T[::-1])
        mats = mats[order]
    return Enumeration(q, r, h, mats)


def incidence_matrix(q: int, r: int, a: int, b: int, cap: int = 4 * 10 ** 7) -> np.ndarray:
    """0/1 matrix indexed by (a-spaces, b-spaces); 1 iff one contains the other."""
    if not (1 <= a <= r and 1 <= b <= r):
        raise InputError("need 1 <= a, b <= r")
    na, nb = gaussian(r, a, q), gaussian(r, b, q)
    if na * nb > cap:
        raise ResourceError(f"incidence matrix {na}x{nb} exceeds the cap")
    if a > b:
        return incidence_matrix(q, r, b, a, cap).T.copy()
    npts = bracket(r, q)
    Eb = enumerate_subspaces(q, r, b)
    mb = np.zeros((nb, npts), dtype=np.int32)
    rows_b = np.repeat(np.arange(nb), bracket(b, q))
    mb[rows_b, Eb.point_members().ravel()] = 1
    if a == 1:
        return mb.T.astype(np.int64)
    Ea = enumerate_subspaces(q, r, a)
    ma = np.zeros((na, npts), dtype=np.int32)
    rows_a = np.repeat(np.arange(na), bracket(a, q))
    ma[rows_a, Ea.point_members().ravel()] = 1
    return (ma @ mb.T == bracket(a, q)).astype(np.int64)


@lru_cache(maxsize=16)
def point_hyperplane_incidence(q: int, r: int) -> np.ndarray:
    """Boolean matrix [H, P]: point P lies in hyperplane H, hyperplanes indexed by dual points."""
    F = field_of_order(q)
    P = np.asarray(points(q, r), dtype=np.int64)
    npts = len(P)
    if npts > 20000:
        raise ResourceError("point-hyperplane incidence too large")
    D = fq_matmul(P, P.T, F)
    return D == 0


def hyperplane(q: int, r: int, index: int) -> Subspace:
    """Hyperplane whose dual is the point with the given index."""
    P = points(q, r)[index]
    return dual(Subspace(q, r, [P], canonical=True))


def embed_matrix(M: np.ndarray, r_big: int, offset: int = 0) -> np.ndarray:
    """Place row vectors of length r into coordinates offset..offset+r-1 of F_q^{r_big}."""
    M = np.asarray(M, dtype=np.int64)
    out = np.zeros((M.shape[0], r_big), dtype=np.int64)
    out[:, offset : offset + M.shape[1]] = M
    return out


def random_subspace(q: int, r: int, h: int, rng: np.random.Generator) -> Subspace:
    F = field_of_order(q)
    while True:
        M = rng.integers(0, q, size=(h, r))
        R, piv = rref(M, F)
        if len(piv) == h:
            return Subspace(q, r, R, canonical=True)


def iter_chain(q: int, r: int) -> Iterable[Subspace]:
    for i in range(1, r):
        yield coordinate_subspace(q, r, i)


def check_same_field(*objs: Subspace) -> None:
    if len({(o.q, o.r) for o in objs}) > 1:
        raise UsageError("subspaces live in different ambient spaces")
