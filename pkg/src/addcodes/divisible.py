"""Delta-divisible multisets of points.

A multiset M of points of PG(r-1,q) is Delta-divisible when
#M = M(H) (mod Delta) for every hyperplane H.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParseError, ResourceError, UsageError
from .gf import field_of_order
from .pg import (bracket, complete_basis, fq_matmul, normalize_vectors, point_hyperplane_incidence, point_index,
                 points)
from .psys import PointMultiset

MAX_SEARCH_POINTS = 40


@dataclass
class DivisibilityReport:
    delta: int
    cardinality: int
    violations: list[int]
    point_spectrum: dict[int, int]

    @property
    def divisible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.divisible


def is_divisible(M: PointMultiset, delta: int) -> DivisibilityReport:
    if delta < 1:
        raise InputError("Delta must be positive")
    card = M.cardinality
    if M.r == 1:
        # the only hyperplane of PG(0,q) is empty
        bad = [] if card % delta == 0 else [0]
    else:
        hv = M.hyperplane_values()
        bad = [int(i) for i in np.nonzero((card - hv) % delta)[0]]
    return DivisibilityReport(delta, card, bad, M.point_spectrum())


def feasible_cardinality(q: int, n: int) -> tuple[int, int] | None:
    """(a, b) with n = a q + b (q+1) and a, b >= 0, or None (cardinalities of q-divisible multisets)."""
    if n < 0:
        raise InputError("n must be non-negative")
    b = 0
    while b * (q + 1) <= n:
        rest = n - b * (q + 1)
        if rest % q == 0:
            return rest // q, b
        b += 1
    return None


def infeasible_cardinalities(q: int) -> list[int]:
    """All n > 0 admitting no representation; the largest is q^2 - q - 1."""
    return [n for n in range(1, q * q) if feasible_cardinality(q, n) is None]


def project_divisible(M: PointMultiset, P: int | np.ndarray) -> PointMultiset:
    """Projection through point P into PG(r-2,q): each other point maps to the line through P."""
    if M.r < 2:
        raise UsageError("projection needs r >= 2")
    q, r = M.q, M.r
    F = field_of_order(q)
    pts = np.asarray(points(q, r), dtype=np.int64)
    p_idx = int(P) if np.isscalar(P) else int(point_index(normalize_vectors(np.asarray(P)[None, :], F), q, r)[0])
    T = complete_basis(pts[p_idx][None, :], F, r)  # rows: P first
    Tinv = _inverse(T, F)
    coords = fq_matmul(pts, Tinv, F)  # coordinates w.r.t. the new basis
    out = PointMultiset(q, r - 1)
    keep = np.arange(len(pts)) != p_idx
    idx = point_index(normalize_vectors(coords[keep, 1:], F), q, r - 1)
    np.add.at(out.weights, idx, M.weights[keep])
    return out


def _inverse(T: np.ndarray, F) -> np.ndarray:
    from .psys import _inverse as inv

    return inv(T, F)


# ---------------------------------------------------------------------------
# exhaustive search


@dataclass
class SearchResult:
    q: int
    r: int
    delta: int
    cardinality: int
    found: list[PointMultiset] = field(default_factory=list)
    complete: bool = True
    nodes: int = 0

    @property
    def nonexistence(self) -> bool:
        """True only when the search finished and found nothing."""
        return self.complete and not self.found


def search_divisible(q: int, r: int, delta: int, cardinality: int, max_mult: int | None = None,
                     cap: int = 100, node_cap: int = 5_000_000) -> SearchResult:
    """Backtracking over point weights in rank order with hyperplane residue pruning.

    Every hyperplane is checked as soon as its last point has been assigned.
    Solutions are labelled multisets (no isomorphism reduction); at most
    ``cap`` are returned.  ``complete`` is False when either cap stopped the
    search early.
    """
    npts = bracket(r, q)
    if npts > MAX_SEARCH_POINTS:
        raise ResourceError(f"PG({r - 1},{q}) has {npts} > {MAX_SEARCH_POINTS} points")
    if delta < 1 or cardinality < 0:
        raise InputError("need Delta >= 1 and cardinality >= 0")
    max_mult = cardinality if max_mult is None else max_mult
    res = SearchResult(q, r, delta, cardinality)
    target = cardinality % delta
    if r == 1:
        if cardinality % delta == 0 and cardinality <= max_mult:
            res.found.append(PointMultiset(q, 1, [cardinality]))
        return res
    inc = point_hyperplane_incidence(q, r)  # [H, P]
    last = inc.shape[1] - 1 - np.argmax(inc[:, ::-1], axis=1)
    closing: list[list[int]] = [[] for _ in range(npts)]
    for H, p in enumerate(last):
        closing[int(p)].append(H)
    members = [np.nonzero(inc[:, p])[0] for p in range(npts)]
    hsum = np.zeros(inc.shape[0], dtype=np.int64)
    w = np.zeros(npts, dtype=np.int64)

    class _Stop(Exception):
        pass

    def rec(p: int, left: int) -> None:
        res.nodes += 1
        if res.nodes > node_cap:
            res.complete = False
            raise _Stop
        if p == npts:
            if left == 0:
                res.found.append(PointMultiset(q, r, w))
                if len(res.found) >= cap:
                    res.complete = False
                    raise _Stop
            return
        for m in range(min(max_mult, left), -1, -1):
            if p == npts - 1 and m != left:
                continue
            w[p] = m
            hs = members[p]
            hsum[hs] += m
            if all((hsum[H] - target) % delta == 0 for H in closing[p]):
                rec(p + 1, left - m)
            hsum[hs] -= m
        w[p] = 0

    try:
        rec(0, cardinality)
    except _Stop:
        pass
    return res


# ---------------------------------------------------------------------------
# text format


def write_pmset(M: PointMultiset) -> str:
    lines = [f"pmset q={M.q} r={M.r}"]
    lines += [f"{i} {int(x)}" for i, x in enumerate(M.weights) if x]
    return "\n".join(lines) + "\n"


def read_pmset(text: str) -> PointMultiset:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or not lines[0].startswith("pmset"):
        raise ParseError("missing 'pmset q=<q> r=<r>' header")
    try:
        kv = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        q, r = int(kv["q"]), int(kv["r"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header: {lines[0]}") from exc
    M = PointMultiset(q, r)
    for no, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"line {no}: expected 'point-rank weight'")
        try:
            i, x = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {no}: {exc}") from exc
        if not 0 <= i < len(M.weights):
            raise ParseError(f"line {no}: point rank {i} out of range")
        M.weights[i] += x
    return M
