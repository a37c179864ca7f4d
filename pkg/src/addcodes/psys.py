"""Projective h-systems, point (pre)multisets and types.

A projective h-(n,r,s,mu)_q system is a multiset of n subspaces of
PG(r-1,q) of dimension at most h; every hyperplane contains at most s of
them and every point lies in at most mu of them.  Systems are stored as a
map from canonical subspace keys (RREF bytes) to multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
import re
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ContractError, InputError, ParseError, UsageError
from .gf import extension, field_of_order
from .pg import (
    Subspace,
    batch_span_point_indices,
    bracket,
    complete_basis,
    fq_matmul,
    key_to_matrix,
    points,
    point_index,
    rref,
)

_CHUNK = 1 << 22


# ---------------------------------------------------------------------------
# point multisets


class PointMultiset:
    """Integer weight per point of PG(r-1,q), indexed by point rank (negatives allowed)."""

    def __init__(self, q: int, r: int, weights: Sequence[int] | np.ndarray | None = None):
        self.q, self.r = q, r
        npts = bracket(r, q)
        if weights is None:
            self.weights = np.zeros(npts, dtype=np.int64)
        else:
            w = np.asarray(weights, dtype=np.int64)
            if w.shape != (npts,):
                raise InputError(f"expected {npts} point weights, got shape {w.shape}")
            self.weights = w.copy()

    @classmethod
    def from_subspace(cls, S: Subspace, weight: int = 1) -> "PointMultiset":
        M = cls(S.q, S.r)
        if S.dim:
            M.weights[S.point_indices()] += weight
        return M

    @property
    def cardinality(self) -> int:
        return int(self.weights.sum())

    @property
    def is_premultiset(self) -> bool:
        """True if some weight is negative (a genuine premultiset)."""
        return bool((self.weights < 0).any())

    def value(self, S: Subspace) -> int:
        """M(S): total weight of the points of S."""
        if S.dim == 0:
            return 0
        return int(self.weights[S.point_indices()].sum())

    def hyperplane_values(self) -> np.ndarray:
        """M(H) for every hyperplane H (indexed by the rank of its dual point)."""
        return _hyperplane_point_sums(self.q, self.r, self.weights)

    def point_spectrum(self) -> dict[int, int]:
        vals, cnt = np.unique(self.weights, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, cnt)}

    def _like(self, other: "PointMultiset") -> None:
        if (self.q, self.r) != (other.q, other.r):
            raise UsageError("point multisets live in different spaces")

    def __add__(self, other: "PointMultiset") -> "PointMultiset":
        self._like(other)
        return PointMultiset(self.q, self.r, self.weights + other.weights)

    def __sub__(self, other: "PointMultiset") -> "PointMultiset":
        self._like(other)
        return PointMultiset(self.q, self.r, self.weights - other.weights)

    def scale(self, lam: int) -> "PointMultiset":
        return PointMultiset(self.q, self.r, lam * self.weights)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PointMultiset)
            and (self.q, self.r) == (other.q, other.r)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"PointMultiset(q={self.q}, r={self.r}, #={self.cardinality})"


def _hyperplane_point_sums(q: int, r: int, weights: np.ndarray) -> np.ndarray:
    """Sum of point weights over each hyperplane, chunked over hyperplanes."""
    F = field_of_order(q)
    P = np.asarray(points(q, r), dtype=np.int64)
    w = np.asarray(weights, dtype=np.int64)
    out = np.zeros(len(P), dtype=np.int64)
    step = max(1, _CHUNK // max(1, len(P)))
    for a in range(0, len(P), step):
        D = fq_matmul(P[a : a + step], P.T, F)  # dual points x points
        out[a : a + step] = (D == 0).astype(np.int64) @ w
    return out


def chain_multiset(q: int, r: int, eps: Sequence[int]) -> PointMultiset:
    """sum_i eps_i * chi_{S_i} for the canonical chain S_i = span(e_1..e_i)."""
    if len(eps) != r - 1:
        raise InputError(f"epsilon vector must have length r-1 = {r - 1}")
    lev = point_levels(q, r)
    w = np.zeros(len(lev), dtype=np.int64)
    for i, e in enumerate(eps, start=1):
        if e:
            w += int(e) * (lev <= i)
    return PointMultiset(q, r, w)


def point_levels(q: int, r: int) -> np.ndarray:
    """Smallest i with the point in S_i (r when it lies in no proper chain element)."""
    P = np.asarray(points(q, r))
    nz = P != 0
    return r - np.argmax(nz[:, ::-1], axis=1)


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TypeExpr:
    """sigma[r] - sum_i eps_i [i]  (eps has length r-1, eps[i-1] = eps_i)."""

    r: int
    sigma: int
    eps: tuple[int, ...]

    def __post_init__(self):
        if len(self.eps) != self.r - 1:
            raise InputError(f"epsilon vector must have length r-1 = {self.r - 1}")

    def e(self, i: int) -> int:
        return self.eps[i - 1] if 1 <= i <= self.r - 1 else 0

    def __str__(self) -> str:
        parts = [f"{self.sigma}[{self.r}]"]
        for i in range(self.r - 1, 0, -1):
            e = self.e(i)
            if e:
                sign = "-" if e > 0 else "+"
                mag = abs(e)
                parts.append(f"{sign}{'' if mag == 1 else mag}[{i}]")
        return "".join(parts)

    @classmethod
    def parse(cls, text: str, r: int | None = None) -> "TypeExpr":
        """Parse e.g. ``3[8]-[7]-[5]-[3]`` or ``*[8]-2[2]`` (``*`` gives sigma 0)."""
        t = text.replace(" ", "").replace("−", "-")
        m = re.match(r"^(\d*|\*)\[(\d+)\]", t)
        if not m:
            raise ParseError(f"type must start with sigma[r]: {text!r}")
        g = m.group(1)
        sigma = 1 if g == "" else 0 if g == "*" else int(g)
        rr = int(m.group(2))
        if r is not None and r != rr:
            raise InputError("rank mismatch in type")
        eps = [0] * (rr - 1)
        pos = m.end()
        for tm in re.finditer(r"([+-])(\d*)\[(\d+)\]", t[pos:]):
            i = int(tm.group(3))
            if not 1 <= i <= rr - 1:
                raise ParseError(f"term [{i}] outside 1..r-1 in {text!r}")
            c = int(tm.group(2) or 1)
            eps[i - 1] += c if tm.group(1) == "-" else -c
        consumed = "".join(x.group(0) for x in re.finditer(r"([+-])(\d*)\[(\d+)\]", t[pos:]))
        if consumed != t[pos:]:
            raise ParseError(f"unparsed trailing text in {text!r}")
        return cls(rr, sigma, tuple(eps))


@dataclass
class TypeParams:
    """Parameters forced by a type (see :func:`type_params`)."""

    n: Fraction
    s: Fraction
    s1: Fraction
    mu: int
    feasible: bool
    reasons: list[str] = field(default_factory=list)
    hyperplane_counts: list[Fraction] = field(default_factory=list)  # element count if S_1..S_{j-1} <= H, S_j not


def type_params(T: TypeExpr, q: int, h: int) -> TypeParams:
    """n, s, s_1 and mu of any faithful h-system of type T (plus feasibility checks).

    A hyperplane H containing S_1..S_{j-1} but not S_j contains
    (M(H) - n[h-1]) / q^(h-1) elements, where M is the covered point multiset;
    s_1 is this count for j=1 and s the maximum over j=1..r.  A point whose
    smallest chain element is S_k has multiplicity sigma - sum_{i>=k} eps_i.
    """
    r, sigma = T.r, T.sigma
    if not 1 <= h <= r:
        raise InputError("need 1 <= h <= r")
    reasons = []
    for i in range(1, h):
        if T.e(i) % q ** (h - i):
            reasons.append(f"eps_{i} = {T.e(i)} not divisible by q^{h - i}")
    g = gcd(r, h)
    total = sum(T.e(i) * bracket(i, q) for i in range(1, r))
    if total % bracket(g, q):
        reasons.append(f"sum eps_i[i] = {total} not divisible by [{g}]_q")
    n = Fraction(sigma * bracket(r, q) - total, bracket(h, q))
    if n.denominator != 1:
        reasons.append("n is not integral")
    counts = []
    for j in range(1, r + 1):
        mh = sigma * bracket(r - 1, q)
        mh -= sum(T.e(i) * bracket(i, q) for i in range(1, j))
        mh -= sum(T.e(i) * bracket(i - 1, q) for i in range(j, r))
        counts.append((Fraction(mh) - n * bracket(h - 1, q)) / q ** (h - 1))
    mu = max(sigma - sum(T.e(i) for i in range(k, r)) for k in range(1, r + 1))
    if any(c.denominator != 1 for c in counts):
        reasons.append("hyperplane counts are not integral")
    return TypeParams(n, max(counts), counts[0], mu, not reasons, reasons, counts)


def dual_type(T: TypeExpr, q: int, h: int) -> TypeExpr:
    """Type of the dual system: h' = r-h, sigma' = s_1, eps'_i = eps_{r-i} q^(h'-i)."""
    tp = type_params(T, q, h)
    if not tp.feasible:
        raise ContractError("type violates the h-side conditions: " + "; ".join(tp.reasons))
    r = T.r
    hp = r - h
    eps = []
    for i in range(1, r):
        v = T.e(r - i)
        k = hp - i
        if k >= 0:
            eps.append(v * q ** k)
        else:
            if v % q ** (-k):
                raise ContractError(f"eps_{r - i} not divisible by q^{-k}")
            eps.append(v // q ** (-k))
    if tp.s1.denominator != 1 or tp.s1 < 0:
        raise ContractError("s_1 is not a non-negative integer")
    return TypeExpr(r, int(tp.s1), tuple(eps))


def type_multiset(T: TypeExpr, q: int) -> PointMultiset:
    """sigma*chi_V - sum eps_i chi_{S_i} on the canonical chain."""
    M = chain_multiset(q, T.r, T.eps)
    return PointMultiset(q, T.r, T.sigma - M.weights)


@dataclass
class GeneralizedType:
    """sigma[r] - sum sgn * chi_{T_j} for explicit subspaces T_j (not necessarily a chain)."""

    r: int
    sigma: int
    terms: list[tuple[Subspace, int]]  # (subspace, sign +1 subtracts / -1 adds)

    def eps(self) -> tuple[int, ...]:
        e = [0] * (self.r - 1)
        for S, sgn in self.terms:
            if not 1 <= S.dim <= self.r - 1:
                raise InputError("generalized type terms need dimension 1..r-1")
            e[S.dim - 1] += sgn
        return tuple(e)

    def multiset(self, q: int) -> PointMultiset:
        M = PointMultiset(q, self.r)
        M.weights += self.sigma
        for S, sgn in self.terms:
            if sgn not in (1, -1):
                raise InputError("term signs must be +1 or -1")
            if S.dim:
                M.weights[S.point_indices()] -= sgn
        return M

    def consistent(self) -> bool:
        """Every dimension carries terms of one sign only (|eps_i| counts the terms)."""
        signs: dict[int, set[int]] = {}
        for S, sgn in self.terms:
            signs.setdefault(S.dim, set()).add(sgn)
        return all(len(v) == 1 for v in signs.values())


def generalized_params(G: GeneralizedType, q: int, h: int) -> dict:
    """n, the packing condition and (for non-negative eps) the bounds on s and mu."""
    eps = G.eps()
    r = G.r
    total = sum(e * bracket(i, q) for i, e in enumerate(eps, start=1))
    n = Fraction(G.sigma * bracket(r, q) - total, bracket(h, q))
    out = {"n": n, "packing": total % bracket(gcd(r, h), q) == 0}
    if all(e >= 0 for e in eps):
        s1 = Fraction(G.sigma * bracket(r - h, q))
        s1 -= sum(eps[i - 1] * bracket(i - h, q) for i in range(h, r))
        s1 += sum(Fraction(eps[i - 1] * bracket(h - i, q), q ** (h - i)) for i in range(1, h))
        out["s_bound"] = s1 / bracket(h, q)
        out["mu_bound"] = G.sigma
    return out


# ---------------------------------------------------------------------------
# projective systems


class ProjectiveSystem:
    """Multiset of subspaces of PG(r-1,q) of dimension at most h."""

    def __init__(self, q: int, r: int, h: int, elements: dict[bytes, int] | None = None):
        if not 1 <= h <= r:
            raise InputError("need 1 <= h <= r")
        self.q, self.r, self.h = q, r, h
        self.elements: dict[bytes, int] = {}
        if elements:
            for k, m in elements.items():
                self._add_key(k, m)

    # -- construction helpers
    def _add_key(self, key: bytes, mult: int) -> None:
        if len(key) % self.r:
            raise InputError("subspace key does not match the ambient rank")
        if len(key) // self.r > self.h:
            raise InputError("element dimension exceeds h")
        v = self.elements.get(key, 0) + int(mult)
        if v < 0:
            raise ContractError("multiplicity would become negative")
        if v:
            self.elements[key] = v
        else:
            self.elements.pop(key, None)

    def add(self, S: Subspace | np.ndarray, mult: int = 1) -> None:
        if not isinstance(S, Subspace):
            S = Subspace(self.q, self.r, S)
        if (S.q, S.r) != (self.q, self.r):
            raise UsageError("subspace lives in a different space")
        if S.dim == 0:
            raise InputError("the zero subspace is not a system element")
        self._add_key(S.key, mult)

    def remove(self, S: Subspace, mult: int = 1) -> None:
        self._add_key(S.key, -mult)

    @classmethod
    def from_subspaces(cls, q: int, r: int, h: int, subspaces: Iterable[Subspace | np.ndarray]) -> "ProjectiveSystem":
        out = cls(q, r, h)
        for S in subspaces:
            out.add(S)
        return out

    @classmethod
    def from_matrices(cls, q: int, r: int, h: int, mats: np.ndarray, mults: Sequence[int] | None = None) -> "ProjectiveSystem":
        """Bulk constructor from already-canonical (RREF) matrices of shape (N, d, r)."""
        out = cls(q, r, h)
        mats = np.asarray(mats, dtype=np.uint8)
        if mults is None:
            mults = np.ones(len(mats), dtype=np.int64)
        for M, m in zip(mats, mults):
            if m:
                out._add_key(M.tobytes(), int(m))
        return out

    def copy(self) -> "ProjectiveSystem":
        out = ProjectiveSystem(self.q, self.r, self.h)
        out.elements = dict(self.elements)
        return out

    # -- views
    @property
    def n(self) -> int:
        return sum(self.elements.values())

    def __len__(self) -> int:
        return self.n

    @property
    def distinct(self) -> int:
        return len(self.elements)

    def dims(self) -> set[int]:
        return {len(k) // self.r for k in self.elements}

    @property
    def faithful(self) -> bool:
        return self.n > 0 and self.dims() == {self.h}

    def items(self) -> Iterator[tuple[Subspace, int]]:
        for k in sorted(self.elements):
            yield Subspace.from_key(self.q, self.r, k), self.elements[k]

    def subspaces(self) -> list[Subspace]:
        """Expanded list of elements (with repetition), sorted by key."""
        out = []
        for S, m in self.items():
            out.extend([S] * m)
        return out

    def groups(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        """Per dimension d: (matrices (N,d,r), multiplicities (N,)) in key order."""
        by: dict[int, list[tuple[bytes, int]]] = {}
        for k in sorted(self.elements):
            by.setdefault(len(k) // self.r, []).append((k, self.elements[k]))
        out = {}
        for d, lst in by.items():
            mats = np.frombuffer(b"".join(k for k, _ in lst), dtype=np.uint8).reshape(len(lst), d, self.r)
            out[d] = (mats.astype(np.int64), np.array([m for _, m in lst], dtype=np.int64))
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ProjectiveSystem)
            and (self.q, self.r) == (other.q, other.r)
            and self.elements == other.elements
        )

    def __repr__(self) -> str:
        return f"ProjectiveSystem(q={self.q}, r={self.r}, h={self.h}, n={self.n}, distinct={self.distinct})"


@dataclass
class SystemParams:
    n: int
    r: int
    h: int
    s: int
    mu: int
    faithful: bool
    hyperplane_spectrum: dict[int, int]  # i -> number of hyperplanes containing exactly i elements
    point_spectrum: dict[int, int]       # i -> number of points covered exactly i times

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.r, self.s, self.mu)


def point_counts(S: ProjectiveSystem) -> np.ndarray:
    """Number of elements (with multiplicity) containing each point."""
    F = field_of_order(S.q)
    w = np.zeros(bracket(S.r, S.q), dtype=np.int64)
    for d, (mats, mults) in S.groups().items():
        step = max(1, _CHUNK // max(1, bracket(d, S.q) * S.r))
        for a in range(0, len(mats), step):
            idx = batch_span_point_indices(mats[a : a + step], F)
            np.add.at(w, idx.ravel(), np.repeat(mults[a : a + step], idx.shape[1]))
    return w


def hyperplane_counts(S: ProjectiveSystem) -> np.ndarray:
    """Number of elements (with multiplicity) inside each hyperplane.

    Element E lies in the hyperplane H = u^perp iff every row of E is
    orthogonal to u; hyperplanes are indexed by the rank of u.
    """
    F = field_of_order(S.q)
    U = np.asarray(points(S.q, S.r), dtype=np.int64)
    out = np.zeros(len(U), dtype=np.int64)
    for d, (mats, mults) in S.groups().items():
        step = max(1, _CHUNK // max(1, d * len(U)))
        for a in range(0, len(mats), step):
            block = mats[a : a + step]
            N = len(block)
            prod = fq_matmul(block.reshape(N * d, S.r), U.T, F).reshape(N, d, len(U))
            inside = ~prod.any(axis=1)
            out += mults[a : a + step] @ inside.astype(np.int64)
    return out


def _spectrum(values: np.ndarray) -> dict[int, int]:
    vals, cnt = np.unique(values, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnt)}


def system_params(S: ProjectiveSystem) -> SystemParams:
    """Exact n, s, mu and the full hyperplane / point spectra."""
    hc = hyperplane_counts(S)
    pc = point_counts(S)
    return SystemParams(
        n=S.n, r=S.r, h=S.h,
        s=int(hc.max()) if len(hc) else 0,
        mu=int(pc.max()) if len(pc) else 0,
        faithful=S.faithful,
        hyperplane_spectrum=_spectrum(hc),
        point_spectrum=_spectrum(pc),
    )


def covered_points(S: ProjectiveSystem) -> PointMultiset:
    """The point multiset P(S): every element replaced by its points."""
    if not S.faithful:
        raise ContractError("covered_points needs a faithful system")
    return PointMultiset(S.q, S.r, point_counts(S))


def _check_same(S1: ProjectiveSystem, S2: ProjectiveSystem) -> None:
    if (S1.q, S1.r) != (S2.q, S2.r):
        raise UsageError("systems live in different ambient spaces")


def system_union(S1: ProjectiveSystem, S2: ProjectiveSystem) -> ProjectiveSystem:
    """Multiset union (h is the larger of the two)."""
    _check_same(S1, S2)
    out = ProjectiveSystem(S1.q, S1.r, max(S1.h, S2.h), S1.elements)
    for k, m in S2.elements.items():
        out._add_key(k, m)
    return out


def scale_system(S: ProjectiveSystem, t: int) -> ProjectiveSystem:
    out = ProjectiveSystem(S.q, S.r, S.h)
    if t:
        out.elements = {k: m * t for k, m in S.elements.items()}
    return out


def extend_by_partition(S: ProjectiveSystem, t: int) -> ProjectiveSystem:
    """Union with t copies of the balanced partition system of the same (q, r, h)."""
    from .construct import partition_system

    if t < 0:
        raise InputError("t must be non-negative")
    P = partition_system(S.q, S.r, S.h)
    return system_union(S, scale_system(P, t))


def system_dual(S: ProjectiveSystem) -> ProjectiveSystem:
    """Replace every element by its orthogonal complement (faithful input)."""
    if not S.faithful:
        raise ContractError("the dual is defined for faithful systems")
    from .pg import dual

    out = ProjectiveSystem(S.q, S.r, S.r - S.h)
    if S.r == S.h:
        raise ContractError("elements equal to the whole space have a trivial dual")
    for E, m in S.items():
        out._add_key(dual(E).key, m)
    return out


def field_reduce(S: ProjectiveSystem, q: int) -> ProjectiveSystem:
    """View a system over F_{q^l} as one over F_q (dimensions and rank times l)."""
    Q = S.q
    l = 0
    x = 1
    while x < Q:
        x *= q
        l += 1
    if x != Q or l == 0:
        raise UsageError(f"{Q} is not a power of {q}")
    if l == 1:
        return S.copy()
    ext = extension(q, l)
    big = ext.big
    if big.q != Q:
        raise UsageError("field mismatch")
    basis = ext.basis
    Fq = field_of_order(q)
    r = S.r
    out = ProjectiveSystem(q, r * l, S.h * l)
    for E, m in S.items():
        rows = []
        for v in E.matrix:
            for b in basis:
                w = [big.mul(b, int(c)) for c in v]
                rows.append([d for c in w for d in ext.expand(c)])
        R, piv = rref(np.array(rows, dtype=np.int64), Fq)
        out._add_key(np.asarray(R, dtype=np.uint8).tobytes(), m)
    return out


def project(S: ProjectiveSystem, K: Subspace) -> ProjectiveSystem:
    """Projection through K: elements inside K vanish, others map to (E+K)/K."""
    if (K.q, K.r) != (S.q, S.r):
        raise UsageError("K lives in a different space")
    if not 0 < K.dim < S.r:
        raise InputError("K must be a proper nonzero subspace")
    F = field_of_order(S.q)
    k = K.dim
    T = complete_basis(K.matrix, F, S.r)  # rows: basis of K first
    Tinv = _inverse(T, F)
    out = ProjectiveSystem(S.q, S.r - k, S.h)
    for E, m in S.items():
        C = fq_matmul(E.matrix, Tinv, F)[:, k:]
        R, piv = rref(C, F)
        if len(piv):
            out._add_key(np.asarray(R, dtype=np.uint8).tobytes(), m)
    return out


def _inverse(T: np.ndarray, F) -> np.ndarray:
    r = T.shape[0]
    R, piv = rref(np.concatenate([T, np.eye(r, dtype=np.int64)], axis=1), F)
    if piv[:r] != list(range(r)):
        raise InputError("matrix is singular")
    return R[:, r:]


def verify_type(S: ProjectiveSystem, T: TypeExpr) -> bool:
    """Faithful h-system whose covered points equal sigma*chi_V - sum eps_i chi_{S_i}."""
    if T.r != S.r or not S.faithful:
        return False
    return bool(np.array_equal(point_counts(S), type_multiset(T, S.q).weights))


def infer_type(S: ProjectiveSystem) -> TypeExpr | None:
    """The type sigma[r] - sum eps_i[i] w.r.t. the canonical chain, if the covered points have one."""
    if not S.faithful:
        return None
    w = point_counts(S)
    lev = point_levels(S.q, S.r)
    sigma = int(w[lev == S.r].max()) if S.r > 1 else int(w.max())
    deficit = sigma - w
    per_level = []
    for i in range(1, S.r + 1):
        vals = np.unique(deficit[lev == i])
        if len(vals) != 1:
            return None
        per_level.append(int(vals[0]))
    if per_level[-1] != 0:
        return None
    # deficit at level i is sum_{j >= i} eps_j
    eps = tuple(per_level[i - 1] - per_level[i] for i in range(1, S.r))
    T = TypeExpr(S.r, sigma, eps)
    return T if verify_type(S, T) else None


def verify_generalized_type(S: ProjectiveSystem, G: GeneralizedType) -> bool:
    if G.r != S.r or not S.faithful or not G.consistent():
        return False
    return bool(np.array_equal(point_counts(S), G.multiset(S.q).weights))


@dataclass
class PremultisetParams:
    feasible: bool
    n: Fraction
    s: Fraction | None
    d: Fraction | None
    mu: int | None
    card_residue: int               # #M mod [gcd(r,h)]_q
    sigma_residue: int | None       # forced sigma mod [h]_q/[gcd(r,h)]_q
    sigma_modulus: int
    reasons: list[str] = field(default_factory=list)


def premultiset_params(M: PointMultiset, sigma: int, h: int) -> PremultisetParams:
    """Parameters of a faithful h-system with covered points sigma*chi_V - M."""
    q, r = M.q, M.r
    card = M.cardinality
    g = gcd(r, h)
    bg = bracket(g, q)
    mod = bracket(h, q) // bg
    res = card % bg
    sres = None
    if res == 0:
        sres = (card // bg) * pow(bracket(r, q) // bg, -1, mod) % mod if mod > 1 else 0
    n = Fraction(sigma * bracket(r, q) - card, bracket(h, q))
    reasons = []
    if n.denominator != 1:
        reasons.append(f"sigma[r] - #M = {sigma * bracket(r, q) - card} not divisible by [h]_q")
    hv = M.hyperplane_values()
    counts = [(Fraction(sigma * bracket(r - 1, q) - int(v)) - n * bracket(h - 1, q)) / q ** (h - 1) for v in np.unique(hv)]
    s = max(counts)
    if any(c.denominator != 1 for c in counts):
        reasons.append("hyperplane counts are not integral")
    mu = int(sigma - M.weights.min())
    if (sigma - M.weights).min() < 0:
        reasons.append("some point weight sigma - M(P) is negative")
    return PremultisetParams(not reasons, n, s, n - s, mu, res, sres, mod, reasons)


# ---------------------------------------------------------------------------
# .psys text format


def write_psys(S: ProjectiveSystem) -> str:
    lines = [f"psys q={S.q} r={S.r} h={S.h}"]
    for E, m in S.items():
        lines.append("")
        if m != 1:
            lines.append(f"x {m}")
        for row in E.matrix:
            lines.append("".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def read_psys(text: str) -> ProjectiveSystem:
    lines = text.splitlines()
    if not lines:
        raise ParseError("line 1: empty .psys input")
    m = re.fullmatch(r"\s*psys\s+q=(\d+)\s+r=(\d+)\s+h=(\d+)\s*", lines[0])
    if not m:
        raise ParseError("line 1: expected header 'psys q=<q> r=<r> h=<h>'")
    q, r, h = map(int, m.groups())
    field_of_order(q)
    S = ProjectiveSystem(q, r, h)
    block: list[tuple[int, str]] = []
    mult = 1
    F = field_of_order(q)

    def flush():
        nonlocal block, mult
        if not block:
            if mult != 1:
                raise ParseError(f"line {lineno}: multiplicity without matrix rows")
            return
        rows = []
        for ln, row in block:
            if len(row) != r or any(not c.isdigit() or int(c) >= q for c in row):
                raise ParseError(f"line {ln}: expected {r} digits below {q}, got {row!r}")
            rows.append([int(c) for c in row])
        if len(rows) > h:
            raise ParseError(f"line {block[0][0]}: block has more than h={h} rows")
        R, piv = rref(np.array(rows, dtype=np.int64), F)
        if len(piv) != len(rows):
            raise ParseError(f"line {block[0][0]}: rows are linearly dependent")
        S._add_key(np.asarray(R, dtype=np.uint8).tobytes(), mult)
        block, mult = [], 1

    lineno = 1
    for lineno, raw in enumerate(lines[1:], start=2):
        ln = raw.strip()
        if not ln:
            flush()
            continue
        if ln.startswith("x "):
            if block:
                raise ParseError(f"line {lineno}: multiplicity must start a block")
            try:
                mult = int(ln[2:])
            except ValueError:
                raise ParseError(f"line {lineno}: bad multiplicity {ln!r}") from None
            if mult < 1:
                raise ParseError(f"line {lineno}: multiplicity must be positive")
            continue
        block.append((lineno, ln))
    flush()
    return S


def system_from_keys(q: int, r: int, h: int, keys: Iterable[bytes]) -> ProjectiveSystem:
    S = ProjectiveSystem(q, r, h)
    for k in keys:
        S._add_key(k, 1)
    return S


def element_matrix(S: ProjectiveSystem, key: bytes) -> np.ndarray:
    return key_to_matrix(key, S.r)


__all__ = [
    "PointMultiset", "TypeExpr", "TypeParams", "GeneralizedType", "ProjectiveSystem", "SystemParams",
    "PremultisetParams", "chain_multiset", "point_levels", "type_params", "dual_type", "type_multiset",
    "generalized_params", "point_counts", "hyperplane_counts", "system_params", "covered_points",
    "system_union", "scale_system", "extend_by_partition", "system_dual", "field_reduce", "project",
    "verify_type", "infer_type", "verify_generalized_type", "premultiset_params", "write_psys", "read_psys",
    "point_index",
]
