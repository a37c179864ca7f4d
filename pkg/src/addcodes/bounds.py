"""Upper bounds, closed forms and formula tables for n_q(r,h;s).

n_q(r,h;s) is the largest n such that a faithful projective h-(n,r,s)_q
system exists; the associated additive code has parameters
[n, r/h, n-s]_q^h and its derived linear code is [n[h]_q, r, q^{h-1}(n-s)]_q.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable

from .errors import ConfigurationError, InputError, UsageError
from .gf import is_prime_power
from .pg import bracket


# ---------------------------------------------------------------------------
# Griesmer bound


@dataclass(frozen=True)
class GriesmerRep:
    """d = sigma q^{k-1} - sum eps_i q^{i-1} with 0 <= eps_i < q (eps indexed 1..k-1)."""

    q: int
    k: int
    d: int
    sigma: int
    eps: tuple[int, ...]

    @property
    def length(self) -> int:
        """g_q(k,d) = sigma [k]_q - sum eps_i [i]_q."""
        return self.sigma * bracket(self.k, self.q) - sum(e * bracket(i, self.q) for i, e in enumerate(self.eps, 1))

    def __str__(self) -> str:
        parts = [f"{self.sigma}[{self.k}]"]
        for i in range(len(self.eps), 0, -1):
            e = self.eps[i - 1]
            if e:
                parts.append(f"-{'' if e == 1 else e}[{i}]")
        return "".join(parts)


def griesmer_g(q: int, k: int, d: int) -> int:
    """g_q(k,d) = sum_{i<k} ceil(d / q^i)."""
    if k < 1 or d < 0:
        raise InputError("need k >= 1 and d >= 0")
    return sum(-(-d // q ** i) for i in range(k))


def griesmer_rep(q: int, k: int, d: int) -> GriesmerRep:
    if k < 1 or d < 1:
        raise InputError("need k >= 1 and d >= 1")
    top = q ** (k - 1)
    sigma = -(-d // top)
    rem = sigma * top - d
    eps = []
    for _ in range(k - 1):
        eps.append(rem % q)
        rem //= q
    return GriesmerRep(q, k, d, sigma, tuple(eps))


# ---------------------------------------------------------------------------
# upper bounds for n_q(r,h;s)


def _check(q: int, r: int, h: int, s: int) -> None:
    if not is_prime_power(q):
        raise InputError(f"q={q} is not a prime power")
    if not r > h >= 1:
        raise InputError("need r > h >= 1")
    if s < 0:
        raise InputError("need s >= 0")


def one_weight_ub(q: int, r: int, h: int, s: int) -> int:
    """floor([r]_q s / [r-h]_q)."""
    _check(q, r, h, s)
    return bracket(r, q) * s // bracket(r - h, q)


def _griesmer_ok(q: int, r: int, h: int, s: int, n: int) -> bool:
    return n <= s or griesmer_g(q, r, q ** (h - 1) * (n - s)) <= bracket(h, q) * n


def griesmer_ub(q: int, r: int, h: int, s: int) -> int:
    """Largest n with g_q(r, q^{h-1}(n-s)) <= [h]_q n.

    Any admissible n is at most the one-weight bound (the derived code's
    Griesmer length exceeds [h]_q n beyond it), so the scan runs downward
    from there.
    """
    _check(q, r, h, s)
    n = one_weight_ub(q, r, h, s)
    while n > s and not _griesmer_ok(q, r, h, s, n):
        n -= 1
    return n


def projection_ub(q: int, r: int, h: int, s: int) -> int:
    """min over t of t + one_weight_ub(q, r-ht, h, s-t) (projection through a t-fold h-space chain)."""
    _check(q, r, h, s)
    best = one_weight_ub(q, r, h, s)
    t = 1
    while t <= s - 1 and r - h * t > h:
        best = min(best, t + one_weight_ub(q, r - h * t, h, s - t))
        t += 1
    return best


def surplus(n: int, r: int, s: int, h: int, q: int) -> int:
    """theta = n[h]_q - g_q(r, q^{h-1}(n-s))."""
    if not n > s >= 0:
        raise InputError("need n > s >= 0")
    return n * bracket(h, q) - griesmer_g(q, r, q ** (h - 1) * (n - s))


# ---------------------------------------------------------------------------
# linear code facts


@dataclass(frozen=True)
class LinearFact:
    q: int
    n: int
    k: int
    d: int
    exists: bool


class LinearFactsOracle:
    """Known existence / nonexistence facts for linear [n,k,d]_q codes.

    Existence of [n,k,d] implies existence of [n+1,k,d], [n,k,d-1] and, by
    puncturing, [n-1,k,d-1]; nonexistence propagates the other way.  A code
    is *excluded* when the Griesmer bound or a propagated nonexistence fact
    rules it out; everything else counts as not excluded.
    """

    def __init__(self, facts: Iterable[LinearFact] = ()):
        self.facts = list(facts)
        self._check_consistent()

    @staticmethod
    def _implies_nonexistence(f: LinearFact, n: int, d: int) -> bool:
        # [n,k,d] exists => [f.n, k, f.d] exists whenever f.n >= n and d - f.d >= max(0, n - f.n)
        return d - f.d >= max(0, n - f.n)

    def _check_consistent(self) -> None:
        for a in self.facts:
            if a.exists and a.d > 0 and griesmer_g(a.q, a.k, a.d) > a.n:
                raise ConfigurationError(f"fact [{a.n},{a.k},{a.d}]_{a.q} violates the Griesmer bound")
            for b in self.facts:
                if a.exists and not b.exists and (a.q, a.k) == (b.q, b.k) and self._implies_nonexistence(b, a.n, a.d):
                    raise ConfigurationError(
                        f"facts clash: [{a.n},{a.k},{a.d}]_{a.q} exists but [{b.n},{b.k},{b.d}] does not")

    def excluded(self, q: int, n: int, k: int, d: int) -> bool:
        if d > 0 and griesmer_g(q, k, d) > n:
            return True
        return any(not f.exists and (f.q, f.k) == (q, k) and self._implies_nonexistence(f, n, d)
                   for f in self.facts)

    def known_exists(self, q: int, n: int, k: int, d: int) -> bool:
        return any(f.exists and (f.q, f.k) == (q, k) and f.n <= n and f.d >= d + max(0, f.n - n)
                   for f in self.facts)

    @classmethod
    def from_csv(cls, text: str) -> "LinearFactsOracle":
        facts = []
        rows = csv.DictReader(io.StringIO(text))
        for row in rows:
            try:
                verdict = row["verdict"].strip()
                if verdict not in ("exists", "nonexists"):
                    raise ValueError(verdict)
                facts.append(LinearFact(int(row["q"]), int(row["n"]), int(row["k"]), int(row["d"]),
                                        verdict == "exists"))
            except (KeyError, ValueError, TypeError, AttributeError) as exc:
                raise ConfigurationError(f"bad facts row {row}: {exc}") from exc
        return cls(facts)

    @classmethod
    def from_file(cls, path: str | Path) -> "LinearFactsOracle":
        return cls.from_csv(Path(path).read_text())

    def to_csv(self) -> str:
        out = ["q,n,k,d,verdict"]
        out += [f"{f.q},{f.n},{f.k},{f.d},{'exists' if f.exists else 'nonexists'}" for f in self.facts]
        return "\n".join(out) + "\n"


def coding_ub(q: int, r: int, h: int, s: int, oracle: LinearFactsOracle | None = None) -> int:
    """Largest n such that no n' <= n is excluded for the derived code [[h]n', r, q^{h-1}(n'-s)]_q.

    Dropping an element keeps a system valid, so the first excluded length
    bounds n_q(r,h;s).
    """
    _check(q, r, h, s)
    oracle = oracle or LinearFactsOracle()
    top = griesmer_ub(q, r, h, s)
    for n in range(s + 1, top + 1):
        if oracle.excluded(q, bracket(h, q) * n, r, q ** (h - 1) * (n - s)):
            return n - 1
    return top


# ---------------------------------------------------------------------------
# asymptotic formulas and improvement tables


@dataclass(frozen=True)
class AsymptoticFormula:
    """n_q(r,h; Q t - i) = P t - c for t large enough."""

    q: int
    r: int
    h: int
    modulus: int      # Q = [r-h]_q / [g]_q
    offset: int       # i
    coefficient: int  # P = [r]_q / [g]_q
    constant: int     # c
    threshold: int | None = None

    def value(self, t: int) -> int:
        return self.coefficient * t - self.constant

    def __str__(self) -> str:
        lhs = f"n_{self.q}({self.r},{self.h};{self.modulus}t" + (f"-{self.offset})" if self.offset else ")")
        rhs = f"{self.coefficient}t" + (f"-{self.constant}" if self.constant else "")
        return f"{lhs} = {rhs}"


def _qp(q: int, r: int, h: int) -> tuple[int, int]:
    g = bracket(gcd(r, h), q)
    return bracket(r - h, q) // g, bracket(r, q) // g


def asymptotic_table(q: int, r: int, h: int, t: int = 1) -> list[AsymptoticFormula]:
    """Constants c_i = P t - griesmer_ub(q,r,h,Q t - i), 0 <= i < Q."""
    if not is_prime_power(q):
        raise InputError(f"q={q} is not a prime power")
    if not r > h >= 1:
        raise InputError("need r > h >= 1")
    Q, P = _qp(q, r, h)
    out = []
    for i in range(Q):
        s = Q * t - i
        c = P * t - griesmer_ub(q, r, h, s) if s > 0 else P * t
        out.append(AsymptoticFormula(q, r, h, Q, i, P, c))
    return out


@dataclass(frozen=True)
class ImprovementRow:
    offset: int
    constant: int      # additive formula: n = P t - constant
    improvement: int   # over the best linear value nbar

    def formula(self, q: int, r: int, h: int) -> str:
        Q, P = _qp(q, r, h)
        return f"n_{q}({r},{h};{Q}t-{self.offset}) = {P}t-{self.constant}"


def improvement_table(q: int, r: int, h: int) -> list[ImprovementRow]:
    """Rows where the additive asymptotic formula beats the linear one over F_{q^h}."""
    if r % h or r // h < 3:
        raise UsageError("improvement tables need h | r and r/h >= 3")
    add = asymptotic_table(q, r, h)
    lin = asymptotic_table(q ** h, r // h, 1)
    if len(add) != len(lin):
        raise ConfigurationError("mismatched table periods")
    rows = []
    for a, b in zip(add, lin):
        imp = b.constant - a.constant
        if imp:
            rows.append(ImprovementRow(a.offset, a.constant, imp))
    return rows


def nbar_griesmer(q: int, r: int, h: int, s: int) -> int | None:
    """Griesmer-based linear value over F_{q^h} for h | r (upper bound for codes from linear ones)."""
    if r % h:
        return None
    return griesmer_ub(q ** h, r // h, 1, s)


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedForm:
    value: int
    source: str
    exact: bool = True
    threshold: str = ""


def closed_forms(q: int, r: int, h: int, s: int) -> ClosedForm | None:
    """Exact values known in closed form, or None."""
    _check(q, r, h, s)
    if s == 0:
        return ClosedForm(0, "trivial")
    if h * (s + 1) < r:
        # any s+1 elements span at most h(s+1) < r dimensions, hence lie in a hyperplane
        return ClosedForm(s, "small-s lemma: s+1 elements always share a hyperplane")
    if r == 2 * h:
        return ClosedForm((q ** h + 1) * s, "r = 2h theorem")
    if r == h + 1:
        return ClosedForm(s * bracket(h + 1, q), "r = h+1 theorem")
    if r == h + 2 and h % 2 == 0:
        return ClosedForm(bracket(h + 2, q) // bracket(2, q) * s, "r = h+2, even h")
    if r == h + 2 and h % 2 == 1 and s == 1 and h >= 3:
        return ClosedForm((bracket(h + 2, q) - q * q) // bracket(2, q), "r = h+2, odd h, partial line spreads")
    if r == 3 * h and s == 2:
        return ClosedForm(q ** h + (2 if q % 2 == 0 else 1), "r = 3h, s = 2 theorem")
    if r == h + 2 and h % 2 == 1:
        t, i = _ti(s, q + 1)
        if i <= 1 or t >= 2:
            hp = (h - 1) // 2
            return ClosedForm(bracket(h + 2, q) * t - (q * bracket(hp + 1, q * q) + 1) * i,
                              "r = h+2, odd h formula", threshold="t >= 1 for i <= 1, t >= 2 otherwise")
        return None
    if r == 3 and h == 1:
        t, i = _ti(s, q + 1)
        if i <= 1 or t >= 2:
            return ClosedForm(bracket(3, q) * t - (q + 1) * i, "planar formula",
                              threshold="t >= 1 for i <= 1, t >= 2 otherwise")
        return None
    if r == 6 and h == 2:
        t, i = _ti(s, q * q + 1)
        a = -(-i // q)
        val = (q ** 4 + q * q + 1) * t - (q * q + 1) * i + max(a - 2, 0) * q
        return ClosedForm(val, "r = 6, h = 2 theorem", exact=t >= q * q + q, threshold=f"t >= {q * q + q}")
    return None


def _ti(s: int, Q: int) -> tuple[int, int]:
    t = -(-s // Q)
    return t, Q * t - s


# ---------------------------------------------------------------------------
# report


@dataclass
class BoundReport:
    q: int
    r: int
    h: int
    s: int
    griesmer_ub: int
    one_weight_ub: int
    projection_ub: int
    coding_ub: int | None = None
    lower: int | None = None
    lower_source: str = ""
    nbar: int | None = None
    closed: ClosedForm | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def upper(self) -> int:
        vals = [self.griesmer_ub, self.one_weight_ub, self.projection_ub]
        if self.coding_ub is not None:
            vals.append(self.coding_ub)
        if self.closed is not None and self.closed.exact:
            vals.append(self.closed.value)
        return min(vals)

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    def rows(self) -> list[tuple[str, str]]:
        out = [("q", self.q), ("r", self.r), ("h", self.h), ("s", self.s),
               ("griesmer", self.griesmer_ub), ("one-weight", self.one_weight_ub),
               ("projection", self.projection_ub)]
        if self.coding_ub is not None:
            out.append(("coding", self.coding_ub))
        if self.nbar is not None:
            out.append(("nbar", self.nbar))
        if self.closed is not None:
            out.append(("closed", f"{self.closed.value} ({self.closed.source})"))
        if self.lower is not None:
            out.append(("lower", f"{self.lower} ({self.lower_source})"))
        out.append(("exact", "yes" if self.exact else "no"))
        return [(k, str(v)) for k, v in out]


def bound_report(q: int, r: int, h: int, s: int, oracle: LinearFactsOracle | None = None) -> BoundReport:
    rep = BoundReport(q, r, h, s, griesmer_ub(q, r, h, s), one_weight_ub(q, r, h, s), projection_ub(q, r, h, s))
    if oracle is not None:
        rep.coding_ub = coding_ub(q, r, h, s, oracle)
    rep.nbar = nbar_griesmer(q, r, h, s)
    rep.closed = closed_forms(q, r, h, s)
    if rep.closed is not None and rep.closed.exact:
        rep.lower, rep.lower_source = rep.closed.value, rep.closed.source
    if rep.lower is not None and rep.lower > rep.upper:
        rep.notes.append("lower bound exceeds an upper bound")
    return rep
