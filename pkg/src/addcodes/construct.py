"""Explicit constructions of projective systems.

All constructions work with the canonical chain S_i = span(e_1, ..., e_i);
special subspaces of vector space partitions are placed on leading
coordinates so that recursive pieces embed by zero padding.

Contents: balanced partition systems, lifted-MRD vector space partitions,
the partition lemma family, star constructions, construction X, negation,
the generalized Solomon-Stiffler algorithm and the asymptotic driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from .bounds import griesmer_g, griesmer_rep, surplus
from .errors import ContractError, InputError, ResourceError, UsageError
from .gf import extension, field_of_order
from .pg import (
    Subspace,
    bracket,
    complete_basis,
    enumerate_subspaces,
    fq_matmul,
    gaussian,
    hyperplane,
    points,
    rref,
)
from .psys import (
    ProjectiveSystem,
    TypeExpr,
    field_reduce,
    hyperplane_counts,
    point_counts,
    scale_system,
    system_dual,
    system_union,
    type_params,
    verify_type,
)

MAX_DISTINCT = 2_000_000


# ---------------------------------------------------------------------------
# helpers


def _canon(M: np.ndarray, q: int) -> bytes:
    R, piv = rref(np.asarray(M, dtype=np.int64), field_of_order(q))
    return np.asarray(R, dtype=np.uint8).tobytes()


def embed_system(S: ProjectiveSystem, r_big: int, h: int | None = None) -> ProjectiveSystem:
    """Place a system of PG(r-1,q) into the leading r coordinates of PG(r_big-1,q)."""
    if r_big < S.r:
        raise UsageError("target space is smaller than the system's space")
    out = ProjectiveSystem(S.q, r_big, S.h if h is None else h)
    pad = r_big - S.r
    for key, m in S.elements.items():
        M = np.frombuffer(key, dtype=np.uint8).reshape(-1, S.r)
        P = np.zeros((M.shape[0], r_big), dtype=np.uint8)
        P[:, : S.r] = M  # appending zero columns keeps RREF form
        out._add_key(P.tobytes(), m)
    _ = pad
    return out


def transform_system(S: ProjectiveSystem, T: np.ndarray) -> ProjectiveSystem:
    """Image of every element under v -> v T (T invertible)."""
    F = field_of_order(S.q)
    out = ProjectiveSystem(S.q, S.r, S.h)
    for key, m in S.elements.items():
        M = np.frombuffer(key, dtype=np.uint8).reshape(-1, S.r).astype(np.int64)
        out._add_key(_canon(fq_matmul(M, T, F), S.q), m)
    return out


def reverse_coordinates(S: ProjectiveSystem) -> ProjectiveSystem:
    """Apply e_k -> e_{r+1-k}; maps span(e_{i+1}..e_r) onto the chain element S_{r-i}."""
    out = ProjectiveSystem(S.q, S.r, S.h)
    for key, m in S.elements.items():
        M = np.frombuffer(key, dtype=np.uint8).reshape(-1, S.r)[:, ::-1]
        out._add_key(_canon(M, S.q), m)
    return out


def all_subspaces_system(q: int, r: int, h: int, mult: int = 1) -> ProjectiveSystem:
    """Every h-space of PG(r-1,q) with the given multiplicity."""
    E = enumerate_subspaces(q, r, h)
    if len(E) > MAX_DISTINCT:
        raise ResourceError(f"{len(E)} subspaces exceed the construction ceiling")
    out = ProjectiveSystem(q, r, h)
    if mult:
        out.elements = {k: mult for k in E.keys()}
    return out


def _check_ceiling(S: ProjectiveSystem) -> None:
    if S.distinct > MAX_DISTINCT:
        raise ResourceError(f"construction exceeds {MAX_DISTINCT} distinct subspaces")


def _difference(A: ProjectiveSystem, B: ProjectiveSystem) -> ProjectiveSystem:
    """A - B as multisets (B must be contained in A)."""
    out = A.copy()
    for k, m in B.elements.items():
        out._add_key(k, -m)
    return out


# ---------------------------------------------------------------------------
# vector space partitions


@lru_cache(maxsize=None)
def _expansion_table(q: int, l: int) -> np.ndarray:
    """Coordinates over F_q of every element of F_{q^l} w.r.t. (1, x, ..., x^{l-1})."""
    ext = extension(q, l)
    return np.array([ext.expand(x) for x in range(ext.big.q)], dtype=np.int64).reshape(ext.big.q, l)


@lru_cache(maxsize=None)
def _mrd_keys(q: int, r: int, h: int) -> tuple[bytes, ...]:
    l = r - h
    ext = extension(q, l)
    big = ext.big
    table = _expansion_table(q, l)
    x = big.generator
    powers = [big.pow(x, i) for i in range(h)]
    keys = []
    eye = np.eye(h, dtype=np.int64)
    for beta in range(big.q):
        Mb = np.array([table[big.mul(beta, p)] for p in powers], dtype=np.int64)  # h x (r-h)
        keys.append(_canon(np.concatenate([Mb, eye], axis=1), q))
    return tuple(keys)


def mrd_partition(q: int, r: int, h: int) -> tuple[ProjectiveSystem, Subspace]:
    """Lifted MRD code: q^{r-h} pairwise disjoint h-spaces plus the special (r-h)-space.

    Rows are [M_beta | I_h] where M_beta has rows beta * x^i (i < h) written over
    (1, x, ..., x^{r-h-1}); the map beta -> M_beta is F_q-linear and M_beta has
    rank h for beta != 0, so the rank distance is h.  The special space is
    S_{r-h} = span(e_1, ..., e_{r-h}).
    """
    if not 1 <= h or r < 2 * h:
        raise UsageError("mrd_partition needs r >= 2h")
    if q ** (r - h) > 2 ** 20:
        raise ResourceError("extension field too large")
    S = ProjectiveSystem(q, r, h)
    for k in _mrd_keys(q, r, h):
        S._add_key(k, 1)
    special = Subspace(q, r, np.eye(r, dtype=np.int64)[: r - h], canonical=True)
    return S, special


def vsp(q: int, r: int, h: int, a: int) -> tuple[ProjectiveSystem, Subspace]:
    """Vector space partition of type h^{t_h} a^1 with special space S_a.

    t_h = q^a (q^{r-a} - 1)/(q^h - 1); built by recursing the lifted MRD
    partition into its special space.
    """
    if not (r > a >= h >= 1) or (r - a) % h:
        raise UsageError("vsp needs r > a >= h and r = a (mod h)")
    return _vsp_cached(q, r, h, a).copy(), Subspace(q, r, np.eye(r, dtype=np.int64)[:a], canonical=True)


@lru_cache(maxsize=64)
def _vsp_cached(q: int, r: int, h: int, a: int) -> ProjectiveSystem:
    S, _ = mrd_partition(q, r, h)
    if r - h == a:
        return S
    inner = _vsp_cached(q, r - h, h, a)
    return system_union(S, embed_system(inner, r))


def partition_system(q: int, r: int, h: int) -> ProjectiveSystem:
    """Balanced system: n=[r]/[g], every hyperplane s=[r-h]/[g], every point mu=[h]/[g]."""
    if not r >= h >= 1:
        raise UsageError("need r >= h >= 1")
    return _partition_cached(q, r, h).copy()


@lru_cache(maxsize=64)
def _partition_cached(q: int, r: int, h: int) -> ProjectiveSystem:
    g = gcd(r, h)
    if g > 1:
        big = partition_system(q ** g, r // g, h // g)
        return field_reduce(big, q)
    if h == 1:
        S = ProjectiveSystem(q, r, 1)
        for p in points(q, r):
            S._add_key(np.asarray(p, dtype=np.uint8).tobytes(), 1)
        return S
    if r < 2 * h:
        return reverse_coordinates_dual(partition_system(q, r, r - h))
    a = h + r % h
    V, _ = vsp(q, r, h, a)
    inner = embed_system(partition_system(q, a, h), r)
    return system_union(scale_system(V, bracket(h, q)), inner)


def reverse_coordinates_dual(S: ProjectiveSystem) -> ProjectiveSystem:
    """Dual system with coordinates reversed (maps duals of the chain onto the chain)."""
    return reverse_coordinates(system_dual(S))


def partition1(q: int, r: int, h: int, j: int) -> ProjectiveSystem:
    """System of type [j][r] - [r-h-1+j] - ([j]-1)[r-h-1] on the canonical chain.

    Union over the [j] (r-h)-spaces K with S_{r-h-1} <= K <= S_{r-h-1+j} of
    the lifted MRD partition whose special space is moved onto K.
    """
    if not 1 <= j <= h:
        raise UsageError("need 1 <= j <= h")
    if r < 2 * h:
        raise UsageError("the lifted partition needs r >= 2h")
    F = field_of_order(q)
    base, _ = mrd_partition(q, r, h)
    a = r - h - 1
    out = ProjectiveSystem(q, r, h)
    for pt in points(q, j):
        v = np.zeros(r, dtype=np.int64)
        v[a : a + j] = pt
        K = np.vstack([np.eye(r, dtype=np.int64)[:a], v[None, :]]) if a else v[None, :]
        T = complete_basis(K, F, r)
        out = system_union(out, transform_system(base, T))
    return out


def star_constructions(q: int, r: int, h: int) -> list[tuple[TypeExpr, ProjectiveSystem]]:
    """The three systems of types [h-1][r]+q^{h-1}[1], ([h]-1)[r]-q[h-1], ([h]-1)[r]+[h]-q[h-1]."""
    if not (r > h >= 2) or (r - 1) % h:
        raise UsageError("need r > h >= 2 and r = 1 (mod h)")
    k = h + 1
    E = enumerate_subspaces(q, k, h)
    p1 = Subspace(q, k, np.eye(k, dtype=np.int64)[:1], canonical=True)
    shm1 = Subspace(q, k, np.eye(k, dtype=np.int64)[: h - 1], canonical=True)
    through = ProjectiveSystem(q, k, h)
    avoid = ProjectiveSystem(q, k, h)
    for S in E:
        if S.contains(p1):
            through.add(S)
        if not S.contains(shm1):
            avoid.add(S)
    with_sh = avoid.copy()
    with_sh.add(Subspace(q, k, np.eye(k, dtype=np.int64)[:h], canonical=True))
    bh = bracket(h, q)
    base = [
        (bracket(h - 1, q), {1: -q ** (h - 1)}, through),
        (bh - 1, {h - 1: q}, avoid),
        (bh - 1, {h: -1, h - 1: q}, with_sh),
    ]
    out = []
    for sigma, eps_map, S in base:
        eps = [0] * (r - 1)
        for i, v in eps_map.items():
            eps[i - 1] += v
        if r > k:
            V, _ = vsp(q, r, h, k)
            S = system_union(embed_system(S, r), scale_system(V, sigma))
        out.append((TypeExpr(r, sigma, tuple(eps)), S))
    return out


def construction_x(S1: ProjectiveSystem, A: Subspace, S2: ProjectiveSystem) -> ProjectiveSystem:
    """Insert S2 (a system of PG(a-1,q)) into the a-space A of the ambient space of S1."""
    if (A.q, A.r) != (S1.q, S1.r) or S2.q != S1.q:
        raise UsageError("field or ambient space mismatch")
    if S2.r != A.dim:
        raise UsageError("S2 must live in a space of dimension dim(A)")
    F = field_of_order(S1.q)
    out = ProjectiveSystem(S1.q, S1.r, max(S1.h, S2.h))
    out.elements = dict(S1.elements)
    for key, m in S2.elements.items():
        M = np.frombuffer(key, dtype=np.uint8).reshape(-1, S2.r).astype(np.int64)
        out._add_key(_canon(fq_matmul(M, A.matrix, F), S1.q), m)
    return out


def construction_x_bound(S1: ProjectiveSystem, A: Subspace, S2: ProjectiveSystem) -> tuple[int, int]:
    """(max{s1+s2, s0+n2}, s0) where s0 is the maximum count of S1 over hyperplanes through A."""
    from .psys import system_params

    hc = hyperplane_counts(S1)
    U = np.asarray(points(S1.q, S1.r), dtype=np.int64)
    through = ~fq_matmul(A.matrix, U.T, field_of_order(S1.q)).any(axis=0)
    s0 = int(hc[through].max()) if through.any() else 0
    s1 = int(hc.max())
    s2 = system_params(S2).s
    return max(s1 + s2, s0 + S2.n), s0


def negate_and_complete(S: ProjectiveSystem, T: TypeExpr) -> tuple[ProjectiveSystem, TypeExpr]:
    """From a system of type sigma[r]-sum eps_i[i] build one of type sigma'[r]+sum eps_i[i].

    mu' copies of all h-spaces minus S, where mu' is the largest multiplicity in S.
    """
    if S.n and not S.faithful:
        raise ContractError("negation needs a faithful system")
    mu = max(S.elements.values(), default=0)
    full = all_subspaces_system(S.q, S.r, S.h, mu)
    out = _difference(full, S)
    sigma = mu * gaussian(S.r - 1, S.h - 1, S.q) - T.sigma
    return out, TypeExpr(T.r, sigma, tuple(-e for e in T.eps))


# ---------------------------------------------------------------------------
# generalized Solomon-Stiffler algorithm


@dataclass
class ConstructionTrace:
    q: int
    r: int
    h: int
    eps: tuple[int, ...]
    steps: list[str] = field(default_factory=list)
    final: TypeExpr | None = None

    @property
    def sigma(self) -> int | None:
        return None if self.final is None else self.final.sigma

    def log(self, depth: int, msg: str) -> None:
        self.steps.append("  " * depth + msg)

    def text(self) -> str:
        head = f"solomon-stiffler q={self.q} r={self.r} h={self.h} eps={','.join(map(str, self.eps))}"
        tail = [f"result {self.final}"] if self.final is not None else []
        return "\n".join([head] + self.steps + tail) + "\n"

    def replay(self) -> tuple[int, ProjectiveSystem, "ConstructionTrace"]:
        """Re-run the deterministic pipeline from the recorded inputs."""
        return solomon_stiffler_general(self.q, self.r, self.h, self.eps)


@dataclass
class Infeasible:
    reasons: list[str]

    def __bool__(self) -> bool:
        return False


def ss_conditions(q: int, r: int, h: int, eps: Sequence[int]) -> list[str]:
    """Violated conditions (divisibility and packing); empty when the type is realisable."""
    reasons = []
    if len(eps) != r - 1:
        return [f"epsilon vector must have length r-1 = {r - 1}"]
    for i in range(1, min(h, r)):
        if eps[i - 1] % q ** (h - i):
            reasons.append(f"eps_{i} = {eps[i - 1]} is not divisible by q^{h - i} = {q ** (h - i)}")
    g = gcd(r, h)
    total = sum(e * bracket(i, q) for i, e in enumerate(eps, start=1))
    if total % bracket(g, q):
        reasons.append(f"packing condition: sum eps_i[i]_q = {total} is not divisible by [{g}]_q = {bracket(g, q)}")
    if r == h and any(eps):
        reasons.append("r = h admits no chain terms")
    return reasons


def solomon_stiffler_general(q: int, r: int, h: int, eps: Sequence[int], *, t_cap: int = 64
                             ) -> tuple[int, ProjectiveSystem, ConstructionTrace]:
    """Realise sigma[r] - sum eps_i [i] for some sigma; returns (sigma, system, trace).

    Raises ContractError with the violated conditions when the type is not
    realisable for any sigma.  No attempt is made to minimise sigma.
    """
    eps = tuple(int(e) for e in eps)
    if not r > h >= 1:
        raise InputError("need r > h >= 1")
    bad = ss_conditions(q, r, h, eps)
    if bad:
        raise ContractError("; ".join(bad))
    trace = ConstructionTrace(q, r, h, eps)
    sigma, S = _realize(q, r, h, list(eps), trace, 0, t_cap)
    if S.n == 0:
        S = partition_system(q, r, h)
        sigma = bracket(h, q) // bracket(gcd(r, h), q)
        trace.log(0, f"empty type: use the balanced partition system, sigma={sigma}")
    trace.final = TypeExpr(r, sigma, eps)
    return sigma, S, trace


def _realize(q: int, r: int, h: int, eps: list[int], tr: ConstructionTrace, depth: int, t_cap: int
             ) -> tuple[int, ProjectiveSystem]:
    tr.log(depth, f"realize r={r} h={h} eps={eps}")
    if not any(eps):
        return 0, ProjectiveSystem(q, r, h)
    if h == 1:
        return _realize_points(q, r, eps, tr, depth)
    if r < 2 * h:
        return _realize_dual(q, r, h, eps, tr, depth, t_cap)
    eps = list(eps)
    sigma = 0
    S = ProjectiveSystem(q, r, h)
    # negative coefficients at i >= h: add copies of chain elements partitioned into h-spaces
    for i in range(h + 1, r):
        if eps[i - 1] < 0:
            g = gcd(i, h)
            k = -(eps[i - 1] // bracket(h, q))  # ceil(-eps / [h])
            P = embed_system(partition_system(q, i, h), r)
            S = system_union(S, scale_system(P, k * bracket(g, q)))
            eps[i - 1] += k * bracket(h, q)
            tr.log(depth, f"add {k * bracket(g, q)} balanced systems inside S_{i}: eps_{i} -> {eps[i - 1]}")
    if eps[h - 1] < 0:
        Sh = Subspace(q, r, np.eye(r, dtype=np.int64)[:h], canonical=True)
        S.add(Sh, -eps[h - 1])
        tr.log(depth, f"add {-eps[h - 1]} copies of S_{h}")
        eps[h - 1] = 0
    # positive coefficients at j >= 2h: move them down by h, fix up by negation
    moves = {}
    for j in range(r - 1, 2 * h - 1, -1):
        if eps[j - 1] > 0:
            moves[j] = eps[j - 1]
            eps[j - h - 1] += eps[j - 1]
            eps[j - 1] = 0
    if moves:
        tr.log(depth, f"shift eps down by h: moves {moves} -> eps={eps}")
        s_red, S_red = _realize(q, r, h, eps, tr, depth + 1, t_cap)
        R = ProjectiveSystem(q, r, h)
        for j, m in moves.items():
            V, _ = vsp(q, j, h, j - h)
            R = system_union(R, scale_system(embed_system(V, r), m))
        c = max([0] + [m - S_red.elements.get(k, 0) for k, m in R.elements.items()])
        if c:
            S_red = system_union(S_red, all_subspaces_system(q, r, h, c))
            s_red += c * gaussian(r - 1, h - 1, q)
        tr.log(depth, f"negation step: {c} copies of all {h}-spaces, remove the moved partitions")
        out = _difference(S_red, R)
        _check_ceiling(out)
        return sigma + s_red, system_union(S, out)
    if r >= 3 * h:
        rp = 2 * h + r % h
        s1, S1 = _realize(q, rp, h, eps[: rp - 1], tr, depth + 1, t_cap)
        V, _ = vsp(q, r, h, rp)
        tr.log(depth, f"extend from r={rp} by {s1} copies of a partition of type h^t {rp}^1")
        out = system_union(embed_system(S1, r), scale_system(V, s1))
        return sigma + s1, system_union(S, out)
    # 2h <= r < 3h
    for i in range(r - h, r):
        if eps[i - 1] > 0:
            j = i - (r - h - 1)
            c = eps[i - 1]
            P = partition1(q, r, h, j)
            S = system_union(S, scale_system(P, c))
            sigma += c * bracket(j, q)
            eps[i - 1] = 0
            if r - h - 1 >= 1:
                eps[r - h - 2] -= c * (bracket(j, q) - 1)
            tr.log(depth, f"add {c} partition-lemma systems (j={j}): eps_{r - h - 1} -> {eps[r - h - 2] if r - h - 1 >= 1 else 0}")
    if r > 2 * h:
        s1, S1 = _realize(q, r - h, h, eps[: r - h - 1], tr, depth + 1, t_cap)
        V, _ = vsp(q, r, h, r - h)
        tr.log(depth, f"extend from r={r - h} by {s1} copies of a partition of type h^t {r - h}^1")
        return sigma + s1, system_union(S, system_union(embed_system(S1, r), scale_system(V, s1)))
    # r == 2h
    return _realize_2h(q, r, h, eps, S, sigma, tr, depth, t_cap)


def _realize_points(q: int, r: int, eps: list[int], tr: ConstructionTrace, depth: int) -> tuple[int, ProjectiveSystem]:
    suffix = [sum(eps[k - 1 :]) for k in range(1, r)]
    sigma = max([0] + suffix)
    from .psys import point_levels

    lev = point_levels(q, r)
    P = points(q, r)
    S = ProjectiveSystem(q, r, 1)
    tail = {k: sum(eps[k - 1 :]) for k in range(1, r)}
    for p, lv in zip(P, lev):
        w = sigma - tail.get(int(lv), 0)
        if w:
            S._add_key(np.asarray(p, dtype=np.uint8).tobytes(), int(w))
    tr.log(depth, f"points: sigma={sigma}")
    return sigma, S


def _realize_dual(q: int, r: int, h: int, eps: list[int], tr: ConstructionTrace, depth: int, t_cap: int
                  ) -> tuple[int, ProjectiveSystem]:
    hp = r - h
    ed = []
    for i in range(1, r):
        v = eps[r - i - 1]
        k = hp - i
        if k >= 0:
            ed.append(v * q ** k)
        else:
            if v % q ** (-k):
                raise ContractError(f"eps_{r - i} not divisible by q^{-k}")
            ed.append(v // q ** (-k))
    tr.log(depth, f"dualise: h'={hp} eps'={ed}")
    s_d, S_d = _realize(q, r, hp, ed, tr, depth + 1, t_cap)
    if S_d.n == 0:
        return 0, ProjectiveSystem(q, r, h)
    sigma = type_params(TypeExpr(r, s_d, tuple(ed)), q, hp).s1
    if sigma.denominator != 1:
        raise ContractError("dual sigma is not integral")
    return int(sigma), reverse_coordinates_dual(S_d)


def _realize_2h(q: int, r: int, h: int, eps: list[int], S: ProjectiveSystem, sigma: int,
                tr: ConstructionTrace, depth: int, t_cap: int) -> tuple[int, ProjectiveSystem]:
    t, Sp = _realize(q, r - 1, h, eps[: r - 2], tr, depth + 1, t_cap)
    e_last = eps[r - 2]
    bh = bracket(h, q)
    P = partition_system(q, r - 1, h)  # gcd(r-1, h) = 1: sigma = [h]
    pads = 0
    while t < -e_last:
        Sp = system_union(Sp, P)
        t += bh
        pads += 1
        if pads > t_cap:
            raise ResourceError("r=2h step: padding cap reached")
    c = t + e_last
    if c % bh:
        raise ContractError("r=2h step: t + eps_{r-1} is not divisible by [h]_q")
    k = c // bh
    tr.log(depth, f"r=2h: t={t} (padding {pads}), remove {k} balanced systems of S_{r - 1}")
    out = embed_system(Sp, r)
    if k:
        R = scale_system(embed_system(P, r), k)
        mu = max(R.elements.values())
        full = all_subspaces_system(q, r, h, mu)
        out = system_union(out, _difference(full, R))
        sigma_pp = mu * gaussian(r - 1, h - 1, q)
    else:
        sigma_pp = 0
    return sigma + sigma_pp, system_union(S, out)


def field_reduction_applies(q: int, r: int, h: int, eps: Sequence[int]) -> bool:
    """True when h | r and only chain dimensions divisible by h carry coefficients."""
    return h > 1 and r % h == 0 and all(e == 0 for i, e in enumerate(eps, 1) if i % h)


def realize_by_field_reduction(q: int, r: int, h: int, eps: Sequence[int]
                               ) -> tuple[int, ProjectiveSystem, ConstructionTrace]:
    """Realise sigma[r] - sum eps_{ih}[ih] over F_q from the point type over F_{q^h}.

    A point multiset of type sigma[r/h] - sum eps_{ih}[i] over F_{q^h}
    becomes, after field reduction, a system of h-spaces of the stated type.
    """
    eps = tuple(int(e) for e in eps)
    if not field_reduction_applies(q, r, h, eps):
        raise UsageError("field reduction needs h | r and coefficients only at multiples of h")
    Q, R = q ** h, r // h
    small = tuple(eps[i * h - 1] for i in range(1, R))
    trace = ConstructionTrace(q, r, h, eps)
    trace.log(0, f"realise over F_{Q} with points: eps={list(small)}")
    sig, S_big, sub = solomon_stiffler_general(Q, R, 1, small)
    trace.steps.extend("  " + line for line in sub.steps)
    trace.log(0, f"field reduction F_{Q} -> F_{q}")
    S = field_reduce(S_big, q)
    trace.final = TypeExpr(r, sig, eps)
    return sig, S, trace


# ---------------------------------------------------------------------------
# asymptotic driver


@dataclass
class AsymptoticConstruction:
    q: int
    r: int
    h: int
    n: int
    s: int
    theta: int
    rep_sigma: int
    rep_eps: tuple[int, ...]
    target: TypeExpr                # shifted type sigma'[r] - sum eps'_i[i] with n[h] points
    sigma_modulus: int              # [h]/[g]
    n_step: int                     # [r]/[g]
    s_step: int                     # [r-h]/[g]
    realized_sigma: int | None = None
    realized_n: int | None = None
    realized_s: int | None = None
    unshifted_n: int | None = None  # n of the unshifted type's forced residue class
    note: str = ""
    system: ProjectiveSystem | None = None
    trace: ConstructionTrace | None = None

    def family_offset(self) -> int | None:
        """t0 with realized_n = n + t0 * [r]/[g]."""
        if self.realized_n is None:
            return None
        return (self.realized_n - self.n) // self.n_step

    def instance(self, t: int) -> ProjectiveSystem:
        """System with n + t*[r]/[g] elements (t >= family_offset)."""
        t0 = self.family_offset()
        if self.system is None or t0 is None:
            raise ContractError("no realised system")
        if t < t0:
            raise InputError(f"the realised family starts at t = {t0}")
        return system_union(self.system, scale_system(partition_system(self.q, self.r, self.h), t - t0))


def asymptotic_construct(q: int, r: int, h: int, n: int, s: int, realize: bool = True,
                         eps_override: Sequence[int] | None = None, sigma_override: int | None = None
                         ) -> AsymptoticConstruction:
    """Family of systems h-(n + t[r]/[g], r, s + t[r-h]/[g])_q for large t, if the surplus allows.

    The default recipe shifts eps_{r-1} by q*theta and sigma by theta; an
    alternative (sigma', eps') with the same n[h]_q point count may be supplied.
    """
    th = surplus(n, r, s, h, q)
    if th < 0:
        raise ContractError(f"surplus {th} < 0: n exceeds the Griesmer upper bound")
    d = q ** (h - 1) * (n - s)
    rep = griesmer_rep(q, r, d)
    eps = list(rep.eps)
    sigma = rep.sigma + th
    eps[r - 2] += th * q
    if eps_override is not None:
        eps = [int(e) for e in eps_override]
        if len(eps) != r - 1:
            raise InputError(f"alternative recipe needs {r - 1} coefficients")
        total = n * bracket(h, q) + sum(e * bracket(i, q) for i, e in enumerate(eps, 1))
        if total % bracket(r, q):
            raise ContractError("alternative recipe does not have n[h]_q points for any sigma")
        sigma = total // bracket(r, q)
        if sigma_override is not None and int(sigma_override) != sigma:
            raise ContractError(f"alternative recipe needs sigma = {sigma}")
    if any(eps[i - 1] for i in range(1, h)):
        raise ContractError("eps_i must vanish for i < h")
    g = gcd(r, h)
    bg = bracket(g, q)
    out = AsymptoticConstruction(
        q, r, h, n, s, th, rep.sigma, tuple(rep.eps), TypeExpr(r, sigma, tuple(eps)),
        bracket(h, q) // bg, bracket(r, q) // bg, bracket(r - h, q) // bg,
    )
    # forced residue of the unshifted type
    base_total = sum(e * bracket(i, q) for i, e in enumerate(rep.eps, 1))
    mod = out.sigma_modulus
    if base_total % bg == 0:
        s0 = (base_total // bg) * pow(out.n_step, -1, mod) % mod if mod > 1 else 0
        while s0 * bracket(r, q) < base_total:
            s0 += mod
        out.unshifted_n = (s0 * bracket(r, q) - base_total) // bracket(h, q)
        if th and (out.unshifted_n - n) % out.n_step:
            out.note = f"the unshifted type realises n = {out.unshifted_n} (mod {out.n_step}) instead"
    else:
        out.note = "the unshifted type violates the packing condition"
    if realize:
        if eps_override is not None and field_reduction_applies(q, r, h, eps):
            sig, S, tr = realize_by_field_reduction(q, r, h, eps)
        else:
            sig, S, tr = solomon_stiffler_general(q, r, h, eps)
        if (sig - sigma) % mod:
            raise ContractError("realised sigma is not in the class of the target")
        out.realized_sigma = sig
        out.system, out.trace = S, tr
        tp = type_params(TypeExpr(r, sig, tuple(eps)), q, h)
        out.realized_n = int(tp.n)
        out.realized_s = int(tp.s)
    return out


__all__ = [
    "embed_system", "transform_system", "reverse_coordinates", "all_subspaces_system", "mrd_partition",
    "vsp", "partition_system", "partition1", "star_constructions", "construction_x",
    "construction_x_bound", "negate_and_complete", "ConstructionTrace", "ss_conditions",
    "solomon_stiffler_general", "field_reduction_applies", "realize_by_field_reduction",
    "AsymptoticConstruction", "asymptotic_construct", "verify_type",
    "point_counts", "griesmer_g", "hyperplane",
]
