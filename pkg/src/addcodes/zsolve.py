"""Integer linear algebra: Smith/Hermite normal forms and Z-solvability.

Two engines are used:

* a classical Smith normal form with explicit unimodular transforms S, T
  (arbitrary-precision integers) for matrices up to ``TRANSFORM_LIMIT``
  entries;
* an integer row-echelon (Hermite-style) elimination with smallest-pivot
  gcd steps on numpy int64 arrays that switches to Python integers when
  entries grow.  It computes lattice bases, invariant factors and
  solutions for the large incidence matrices.

All linear systems are in column form A x = b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np

from .errors import InputError, ResourceError

DEFAULT_CAP = 4 * 10 ** 6
TRANSFORM_LIMIT = 40_000
_SAFE = 2 ** 31


def _as_object(A) -> np.ndarray:
    M = np.array(A, dtype=object)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    return M


def _to_int_matrix(A) -> np.ndarray:
    M = np.array(A, dtype=object)
    if M.ndim != 2:
        raise InputError("expected a 2-dimensional integer matrix")
    return M


def _det(M: np.ndarray) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    M = [list(map(int, row)) for row in M]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if sw is None:
                return 0
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# results


@dataclass
class SNFResult:
    invariants: list[int]            # nonzero invariant factors alpha_1 | alpha_2 | ...
    shape: tuple[int, int]
    S: np.ndarray | None = None      # m x m unimodular (object ints)
    T: np.ndarray | None = None      # n x n unimodular (object ints)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    def diagonal(self) -> np.ndarray:
        m, n = self.shape
        D = np.zeros((m, n), dtype=object)
        for i, a in enumerate(self.invariants):
            D[i, i] = a
        return D

    def pattern(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for a in self.invariants:
            out[a] = out.get(a, 0) + 1
        return out

    def verify(self, A) -> bool:
        """S A T = D, unimodularity of S and T, and the divisibility chain."""
        if self.S is None or self.T is None:
            raise InputError("no transforms available")
        A = _to_int_matrix(A)
        ok = np.array_equal(self.S.dot(A).dot(self.T), self.diagonal())
        ok = ok and all(self.invariants[i + 1] % self.invariants[i] == 0 for i in range(len(self.invariants) - 1))
        ok = ok and abs(_det(self.S)) == 1 and abs(_det(self.T)) == 1
        return bool(ok)


@dataclass
class ZSolveOutcome:
    solvable: bool
    solution: list[int] | None = None
    violations: list[str] = field(default_factory=list)

    def check(self, A, b) -> bool:
        """True iff a solution is present and satisfies A x = b exactly."""
        if not self.solvable or self.solution is None:
            return False
        A = _to_int_matrix(A)
        return list(A.dot(np.array(self.solution, dtype=object))) == [int(x) for x in b]


# ---------------------------------------------------------------------------
# classical SNF with transforms


def _snf_full(A: np.ndarray) -> SNFResult:
    A = _to_int_matrix(A).copy()
    m, n = A.shape
    S = np.array([[1 if i == j else 0 for j in range(m)] for i in range(m)], dtype=object).reshape(m, m)
    T = np.array([[1 if i == j else 0 for j in range(n)] for i in range(n)], dtype=object).reshape(n, n)
    t = 0
    while t < min(m, n):
        sub = A[t:, t:]
        nz = [(abs(sub[i, j]), i, j) for i in range(sub.shape[0]) for j in range(sub.shape[1]) if sub[i, j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        i += t
        j += t
        A[[t, i]] = A[[i, t]]
        S[[t, i]] = S[[i, t]]
        A[:, [t, j]] = A[:, [j, t]]
        T[:, [t, j]] = T[:, [j, t]]
        while True:
            p = A[t, t]
            for i in range(t + 1, m):
                if A[i, t] != 0:
                    f = A[i, t] // p
                    if f:
                        A[i] = A[i] - f * A[t]
                        S[i] = S[i] - f * S[t]
            for j in range(t + 1, n):
                if A[t, j] != 0:
                    f = A[t, j] // p
                    if f:
                        A[:, j] = A[:, j] - f * A[:, t]
                        T[:, j] = T[:, j] - f * T[:, t]
            cand = [(abs(A[i, t]), i, "r") for i in range(t + 1, m) if A[i, t] != 0]
            cand += [(abs(A[t, j]), j, "c") for j in range(t + 1, n) if A[t, j] != 0]
            if cand:
                _, k, kind = min(cand)
                if kind == "r":
                    A[[t, k]] = A[[k, t]]
                    S[[t, k]] = S[[k, t]]
                else:
                    A[:, [t, k]] = A[:, [k, t]]
                    T[:, [t, k]] = T[:, [k, t]]
                continue
            # divisibility: pivot must divide the whole remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i, j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = A[t] + A[bad]
            S[t] = S[t] + S[bad]
        if A[t, t] < 0:
            A[t] = -A[t]
            S[t] = -S[t]
        t += 1
    inv = [int(A[i, i]) for i in range(min(m, n)) if A[i, i] != 0]
    return SNFResult(inv, (m, n), S, T)


# ---------------------------------------------------------------------------
# integer row echelon (lattice basis) with int64 fast path


class _Echelon:
    """Row echelon form over Z of the rows of M, pivots restricted to the first ``width`` columns.

    With ``modulus`` D (known to satisfy D*Z^m inside the row lattice) all arithmetic is carried out modulo D and
    the rows D*e_c are adjoined on the fly; entries then stay below D.
    """

    def __init__(self, M, width: int | None = None, modulus: int | None = None):
        M = np.asarray(M)
        self.modulus = modulus
        if modulus is not None:
            if modulus * modulus >= 2 ** 62:
                raise ResourceError("modulus too large for machine-integer elimination")
            M = np.mod(M.astype(np.int64), modulus)
        elif M.dtype != object:
            M = M.astype(np.int64)
            if M.size and np.abs(M).max() >= _SAFE:
                M = M.astype(object)
        self.width = M.shape[1] if width is None else width
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []
        self._run(M)

    @staticmethod
    def _grow(M: np.ndarray) -> np.ndarray:
        if M.dtype != object and M.size and np.abs(M).max() >= _SAFE:
            return M.astype(object)
        return M

    def _run(self, M: np.ndarray) -> None:
        D = self.modulus
        for c in range(self.width):
            if D is not None:
                extra = np.zeros((1, M.shape[1]), dtype=np.int64)
                extra[0, c] = D
                M = np.concatenate([M, extra])
            if M.shape[0] == 0:
                break
            col = M[:, c]
            nzi = np.nonzero(col != 0)[0]
            if len(nzi) == 0:
                continue
            while True:
                vals = np.array([abs(int(v)) for v in col[nzi]]) if M.dtype == object else np.abs(col[nzi])
                k = nzi[int(np.argmin(vals))]
                p = M[k, c]
                others = nzi[nzi != k]
                if len(others) == 0:
                    break
                f = M[others, c] // p
                if M.dtype == object:
                    M[others] = M[others] - np.outer(f, M[k]).astype(object)
                else:
                    M[others] = M[others] - np.outer(f, M[k])
                if D is not None:
                    M[others] %= D
                else:
                    M = self._grow(M)
                col = M[:, c]
                nzi = np.nonzero(col != 0)[0]
            row = M[k].copy()
            if D is None and row[c] < 0:
                row = -row
            self.rows.append(row)
            self.pivots.append(c)
            keep = np.ones(M.shape[0], dtype=bool)
            keep[k] = False
            M = M[keep]
            if M.shape[0]:
                M = M[np.any(M != 0, axis=1)]

    def basis(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, 0), dtype=object)
        return np.array([[int(x) for x in r] for r in self.rows], dtype=object)

    def reduce(self, b) -> tuple[list[int], list[int] | None, list[str]]:
        """Express b (length >= width) in the row lattice: coefficients or violations."""
        v = np.array([int(x) for x in b], dtype=object)
        D = self.modulus
        if D is not None:
            v[: self.width] = v[: self.width] % D
        coeffs = []
        viol = []
        for row, c in zip(self.rows, self.pivots):
            p = int(row[c])
            if v[c] % p != 0:
                viol.append(f"coordinate {c}: {v[c]} not divisible by pivot {p}")
                coeffs.append(0)
                continue
            f = v[c] // p
            coeffs.append(int(f))
            if f:
                v = v - f * np.array([int(x) for x in row[: len(v)]], dtype=object)
                if D is not None:
                    v[: self.width] = v[: self.width] % D
        rest = [i for i in range(self.width) if v[i] != 0]
        if rest:
            viol.append(f"residual nonzero at coordinates {rest[:5]}")
        return coeffs, None if viol else coeffs, viol


def incidence_modulus(q: int, r: int, h: int) -> int:
    """D with D*Z^[r]_q inside the column lattice of A^{1,h;r,q} (1 <= h < r).

    Every invariant factor divides D (D need not be a multiple of the determinant).

    A A^T = a I + c J with c = gaussian(r-2,h-2) and a = gaussian(r-1,h-1) - c,
    so a(e_i - e_j), and the all-ones multiple gaussian(r-1,h-1)*1, lie in the
    lattice; combining them gives a*[r]_q*gaussian(r-1,h-1) * e_i.
    """
    from .pg import bracket, gaussian

    lam1 = gaussian(r - 1, h - 1, q)
    lam2 = gaussian(r - 2, h - 2, q) if h >= 2 else 0
    return (lam1 - lam2) * bracket(r, q) * lam1


def lattice_basis(A) -> np.ndarray:
    """Echelon basis (rows) of the lattice spanned by the columns of A."""
    A = np.asarray(A)
    return _Echelon(A.T).basis()


def hnf(A) -> np.ndarray:
    """Column Hermite normal form: lower-triangular basis of the column lattice.

    Columns are the lattice basis; pivots are positive and entries to the
    left of each pivot (in its row) are reduced into [0, pivot).
    """
    B = lattice_basis(A)  # rows, echelon in columns of A's row index
    H = [list(map(int, r)) for r in B]
    # reduce earlier basis vectors by later pivots (row-wise view)
    for k in range(len(H)):
        c = next(i for i, x in enumerate(H[k]) if x != 0)
        p = H[k][c]
        for j in range(k):
            f = H[j][c] // p
            if f:
                H[j] = [a - f * b for a, b in zip(H[j], H[k])]
    m = np.asarray(A).shape[0]
    out = np.zeros((m, len(H)), dtype=object)
    for k, row in enumerate(H):
        out[:, k] = row
    return out


def snf(A, transforms: bool | None = None, cap: int = DEFAULT_CAP, modulus: int | None = None) -> SNFResult:
    """Smith normal form; transforms S, T are returned for small matrices.

    ``modulus`` may name an integer D such that D*Z^k lies in the (full-rank)
    lattice spanned by the columns of A (rows if A has more rows than
    columns), e.g. any multiple of its determinant; elimination then runs
    modulo D.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise InputError("expected a matrix")
    m, n = A.shape
    if m * n > cap:
        raise ResourceError(f"matrix {m}x{n} exceeds the cap of {cap} entries")
    if transforms is None:
        transforms = m * n <= TRANSFORM_LIMIT and modulus is None
    if transforms:
        return _snf_full(_to_int_matrix(A.tolist()))
    # invariants only: reduce the larger dimension away first
    M = A if m <= n else A.T
    ech = _Echelon(np.asarray(M).T, modulus=modulus)
    B = ech.basis()  # rows spanning the lattice of M's columns
    if B.size == 0:
        return SNFResult([], (m, n))
    if modulus is not None:
        inv = _snf_invariants_mod(B, modulus)
    elif B.shape[0] * B.shape[1] <= 4 * TRANSFORM_LIMIT:
        inv = _snf_full(B).invariants
    else:
        inv = _snf_invariants(B)
    return SNFResult(inv, (m, n))


def _snf_invariants_mod(B: np.ndarray, D: int) -> list[int]:
    """Invariant factors of a full-rank lattice basis B, given D*Z^k inside the lattice.

    Alternates modular row echelon forms of B and B^T until diagonal; every
    invariant factor divides D, so reduction modulo D loses nothing.
    """
    M = np.array(B, dtype=np.int64)
    for _ in range(4 * M.shape[0] + 4):
        e = _Echelon(M.T, modulus=D)
        M = np.array([[int(x) for x in r] for r in e.rows], dtype=np.int64)
        off = M.copy()
        np.fill_diagonal(off, 0)
        if not off.any():
            break
    else:  # pragma: no cover - alternation always terminates on square inputs
        raise ResourceError("modular diagonalisation did not converge")
    diag = [gcd(int(d), D) for d in np.diag(M)]
    return _chain(diag)


def _chain(diag: list[int]) -> list[int]:
    """Normalise a list of diagonal entries into the divisibility chain."""
    diag = [abs(d) for d in diag if d != 0]
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                a, b = diag[i], diag[j]
                if b % a != 0:
                    g = gcd(a, b)
                    diag[i], diag[j] = g, a * b // g
                    changed = True
    return sorted(diag)


def _snf_invariants(B: np.ndarray) -> list[int]:
    """Invariant factors of a (square-ish) integer matrix without transforms."""
    M = np.array(B, dtype=object)
    m, n = M.shape
    diag = []
    t = 0
    while t < min(m, n):
        sub = M[t:, t:]
        nzmask = sub != 0
        if not nzmask.any():
            break
        absval = np.where(nzmask, np.abs(sub), 0)
        best = None
        for i, j in zip(*np.nonzero(nzmask)):
            if best is None or absval[i, j] < best[0]:
                best = (absval[i, j], i, j)
                if best[0] == 1:
                    break
        _, i, j = best
        i += t
        j += t
        M[[t, i]] = M[[i, t]]
        M[:, [t, j]] = M[:, [j, t]]
        while True:
            p = M[t, t]
            f = M[t + 1 :, t] // p
            if np.any(f != 0):
                M[t + 1 :] = M[t + 1 :] - np.outer(f, M[t])
            g = M[t, t + 1 :] // p
            if np.any(g != 0):
                M[:, t + 1 :] = M[:, t + 1 :] - np.outer(M[:, t], g)
            rest_r = np.nonzero(M[t + 1 :, t] != 0)[0]
            rest_c = np.nonzero(M[t, t + 1 :] != 0)[0]
            if len(rest_r):
                k = t + 1 + rest_r[int(np.argmin(np.abs(M[t + 1 + rest_r, t])))]
                M[[t, k]] = M[[k, t]]
                continue
            if len(rest_c):
                k = t + 1 + rest_c[int(np.argmin(np.abs(M[t, t + 1 + rest_c])))]
                M[:, [t, k]] = M[:, [k, t]]
                continue
            break
        diag.append(abs(int(M[t, t])))
        t += 1
    return _chain(diag)


# ---------------------------------------------------------------------------
# solving


def solve_integer(A, b, witness_columns: int | None = None, modulus: int | None = None,
                  witness: bool = True) -> ZSolveOutcome:
    """Decide whether A x = b has an integer solution; return one if so.

    ``modulus`` (see :func:`snf`) speeds up the decision for large full-rank
    lattices; the witness is then searched on a spread-out column subset
    whose lattice equals the full one.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise InputError("expected a matrix")
    m, n = A.shape
    b = [int(x) for x in b]
    if len(b) != m:
        raise InputError(f"right-hand side has length {len(b)}, expected {m}")
    if m * n <= TRANSFORM_LIMIT and modulus is None:
        res = _snf_full(_to_int_matrix(A.tolist()))
        bt = res.S.dot(np.array(b, dtype=object))
        k = res.rank
        viol = []
        for i in range(k):
            if bt[i] % res.invariants[i] != 0:
                viol.append(f"transformed b_{i + 1}={bt[i]} not divisible by {res.invariants[i]}")
        for i in range(k, m):
            if bt[i] != 0:
                viol.append(f"transformed b_{i + 1}={bt[i]} must vanish")
        if viol:
            return ZSolveOutcome(False, None, viol)
        y = [bt[i] // res.invariants[i] for i in range(k)] + [0] * (n - k)
        x = res.T.dot(np.array(y, dtype=object))
        return ZSolveOutcome(True, [int(v) for v in x])
    # large case: decide with the full lattice, then find a witness on a column subset
    full = _Echelon(A.T.astype(np.int64) if A.dtype != object else A.T, modulus=modulus)
    _, ok, viol = full.reduce(b)
    if ok is None:
        return ZSolveOutcome(False, None, viol)
    if not witness:
        return ZSolveOutcome(True, None)
    det_full = _pivot_product(full)
    k = witness_columns or min(n, 2 * m)
    while True:
        cols = np.unique(np.linspace(0, n - 1, min(k, n)).round().astype(np.int64))
        sub = A[:, cols]
        aug = np.concatenate([sub.T.astype(object), np.eye(len(cols), dtype=np.int64).astype(object)], axis=1)
        ech = _Echelon(aug, width=m)
        if len(ech.rows) == len(full.rows) and _pivot_product(ech) == det_full:
            coeffs, ok2, _ = ech.reduce(b + [0] * len(cols))
            if ok2 is not None:
                x = np.zeros(n, dtype=object)
                for c, row in zip(coeffs, ech.rows):
                    if c:
                        x[cols] += c * np.array([int(v) for v in row[m:]], dtype=object)
                return ZSolveOutcome(True, [int(v) for v in x])
        if k >= n:
            raise ResourceError("witness search failed")  # pragma: no cover - lattice equality guarantees success
        k = min(n, 2 * k)


def _pivot_product(e: _Echelon) -> int:
    out = 1
    for row, c in zip(e.rows, e.pivots):
        out *= abs(int(row[c]))
    return out


def solve_diagonal_system(D, b) -> ZSolveOutcome:
    """Solve D y = b for a diagonal (SNF-shaped) integer matrix D.

    Free coordinates (zero diagonal or missing rows) are set to 0; the
    outcome lists the violated residue / zero conditions otherwise.
    """
    D = _to_int_matrix(D)
    m, n = D.shape
    b = [int(x) for x in b]
    if len(b) != m:
        raise InputError("right-hand side length mismatch")
    viol = []
    y = [0] * n
    for i in range(m):
        a = D[i, i] if i < n else 0
        if a == 0:
            if b[i] != 0:
                viol.append(f"b_{i + 1}={b[i]} must vanish")
        elif b[i] % a != 0:
            viol.append(f"b_{i + 1}={b[i]} not divisible by {a}")
        else:
            y[i] = b[i] // a
    if viol:
        return ZSolveOutcome(False, None, viol)
    return ZSolveOutcome(True, y)


def solve_transposed(A, b) -> ZSolveOutcome:
    """Row-module form: integer x with x^T A = b^T, i.e. A^T x = b."""
    return solve_integer(np.asarray(A).T, b)


# ---------------------------------------------------------------------------
# matrix text I/O


def read_matrix(text: str) -> np.ndarray:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty matrix file")
    try:
        rows, cols = int(lines[0][0]), int(lines[0][1])
        data = [[int(x) for x in ln] for ln in lines[1:]]
    except (ValueError, IndexError):
        raise InputError("matrix file must start with 'rows cols' followed by integer rows") from None
    if len(data) != rows or any(len(r) != cols for r in data):
        raise InputError(f"matrix body does not match declared shape {rows}x{cols}")
    return np.array(data, dtype=object).reshape(rows, cols)


def write_matrix(M) -> str:
    M = np.asarray(M)
    out = [f"{M.shape[0]} {M.shape[1]}"]
    out += [" ".join(str(int(x)) for x in row) for row in M]
    return "\n".join(out) + "\n"


def invariant_pattern_ok(invariants: Sequence[int], p: int, h_bracket: int) -> bool:
    """All invariant factors are p-powers except the last, which is a p-power times [h]_q."""
    def is_ppower(x: int) -> bool:
        while x % p == 0:
            x //= p
        return x == 1
    if not invariants:
        return False
    *head, last = invariants
    if not all(is_ppower(a) for a in head):
        return False
    return last % h_bracket == 0 and is_ppower(last // h_bracket)


# ---------------------------------------------------------------------------
# partitionability of  *[r] - M


@dataclass
class PartitionabilityOutcome:
    """Decision whether sigma*chi_V - M splits into h-spaces for some sigma.

    ``sigma_residue`` / ``sigma_modulus`` describe the only admissible class
    of sigma (forced by counting points); when ``decision`` holds, ``solution``
    is an integer multiplicity vector over the enumerated h-spaces realising
    sigma = sigma_residue, and adding ``completion_copies`` copies of all
    h-spaces makes it non-negative, with ``completion_sigma`` as resulting sigma.
    """

    decision: bool
    reason: str
    sigma_residue: int | None = None
    sigma_modulus: int | None = None
    solution: list[int] | None = None
    completion_copies: int | None = None
    completion_sigma: int | None = None
    violations: list[str] = field(default_factory=list)

    def admits_sigma(self, sigma: int) -> bool:
        """Necessary and sufficient for a signed realisation with this sigma."""
        if not self.decision:
            return False
        return (sigma - self.sigma_residue) % self.sigma_modulus == 0


def partitionable_star(q: int, r: int, h: int, M, witness: bool = True,
                       cap: int = DEFAULT_CAP) -> PartitionabilityOutcome:
    """Decide Z-solvability of A^{1,h;r,q} x = sigma*1 - M over the admissible sigma class.

    ``M`` is a point multiset: either an object with a ``weights`` array or a
    sequence of integer weights indexed by point rank.
    """
    from .pg import bracket, gaussian, incidence_matrix

    if not 1 <= h < r:
        raise InputError("need 1 <= h < r")
    w = np.asarray(getattr(M, "weights", M), dtype=np.int64)
    npts = bracket(r, q)
    if w.shape != (npts,):
        raise InputError(f"point multiset must have {npts} weights")
    g = gcd(r, h)
    bg = bracket(g, q)
    card = int(w.sum())
    if card % bg != 0:
        return PartitionabilityOutcome(
            False, "packing", violations=[f"#M = {card} is not divisible by [{g}]_{q} = {bg}"])
    mod = bracket(h, q) // bg
    rg = bracket(r, q) // bg
    # sigma*[r]/[g] == #M/[g]  (mod [h]/[g]); [r]/[g] is invertible modulo [h]/[g]
    sigma0 = (card // bg) * pow(rg, -1, mod) % mod if mod > 1 else 0
    if gaussian(r, h, q) * npts > cap:
        raise ResourceError("incidence matrix exceeds the cap")
    A = incidence_matrix(q, r, 1, h)
    b = sigma0 - w
    out = solve_integer(A, b, modulus=incidence_modulus(q, r, h), witness=witness)
    if not out.solvable:
        return PartitionabilityOutcome(False, "lattice", sigma0, mod, violations=out.violations)
    res = PartitionabilityOutcome(True, "ok", sigma0, mod)
    if witness and out.solution is not None:
        res.solution = out.solution
        c = max(0, -min(out.solution))
        res.completion_copies = c
        res.completion_sigma = sigma0 + c * gaussian(r - 1, h - 1, q)
    return res
