"""Exact arithmetic in small finite fields F_{p^m}.

Elements are integer codes in [0, q).  The base-p digits of a code are the
coefficients of the element written as a polynomial in the generator x
(digit i is the coefficient of x^i), reduced modulo a fixed monic
primitive polynomial.  Non-prime fields use log/antilog tables.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, InputError, UsageError

MAX_ORDER = 2 ** 20
SUPPORTED_PRIMES = (2, 3, 5, 7)

# Lower coefficients (x^0 .. x^{m-1}) of the monic primitive polynomial fixed
# for each (p, m).  For every (p, m) this is the primitive polynomial whose
# coefficient vector, read as a base-p integer, is smallest.
PRIMITIVE_POLYNOMIALS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 14): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 17): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 18): (1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 19): (1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 20): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 1): (1,),
    (3, 2): (2, 1),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 1, 0, 0, 0, 0),
    (3, 7): (1, 2, 1, 0, 0, 0, 0),
    (3, 8): (2, 0, 0, 1, 0, 0, 0, 0),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0),
    (3, 10): (2, 1, 0, 1, 0, 0, 0, 0, 0, 0),
    (3, 11): (1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 12): (2, 2, 2, 1, 2, 0, 0, 0, 0, 0, 0, 0),
    (5, 1): (2,),
    (5, 2): (2, 1),
    (5, 3): (2, 3, 0),
    (5, 4): (2, 2, 1, 0),
    (5, 5): (2, 4, 0, 0, 0),
    (5, 6): (2, 1, 0, 0, 0, 0),
    (5, 7): (2, 3, 0, 0, 0, 0, 0),
    (5, 8): (3, 2, 1, 0, 0, 0, 0, 0),
    (7, 1): (2,),
    (7, 2): (3, 1),
    (7, 3): (2, 3, 0),
    (7, 4): (5, 3, 1, 0),
    (7, 5): (4, 1, 0, 0, 0),
    (7, 6): (5, 1, 3, 0, 0, 0),
    (7, 7): (2, 6, 0, 0, 0, 0, 0),
}


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, lowest degree first)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for k in range(df + 1):
            a[shift + k] = (a[shift + k] - c * f[k]) % p
        _trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    res = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    return _trim(res)


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    res = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(res)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, f, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), f, p)
        base = _poly_mod(_poly_mul(base, base, p), f, p)
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of a polynomial over F_p (coefficients lowest first).

    Degree <= 4 uses the root / quadratic-factor trial test; larger degrees
    use the root test plus the gcd test gcd(f, x^{p^k} - x) = 1 for all
    k <= deg/2.
    """
    f = _trim([c % p for c in f])
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    for a in range(p):  # no roots
        if sum(c * pow(a, i, p) for i, c in enumerate(f)) % p == 0:
            return False
    if m <= 3:
        return True
    if m == 4:
        # no monic quadratic factor
        for c0 in range(p):
            for c1 in range(p):
                if not _poly_mod(f, [c0, c1, 1], p):
                    return False
        return True
    x = [0, 1]
    xp = x
    for _ in range(1, m // 2 + 1):
        xp = _poly_powmod(xp, p, f, p)
        g = _poly_gcd(f, _poly_sub(xp, x, p), p)
        if len(g) > 1:
            return False
    return True


def _power_codes(p: int, m: int, low: Sequence[int], count: int) -> np.ndarray:
    """Codes of x^0, x^1, ..., x^{count-1} modulo x^m + sum low_i x^i."""
    # matrix of multiplication by x on digit vectors (column j = x * x^j)
    mx = np.zeros((m, m), dtype=np.int64)
    for j in range(m - 1):
        mx[j + 1, j] = 1
    for i in range(m):
        mx[i, m - 1] = (-low[i]) % p
    block = min(count, 1024)
    vecs = np.zeros((block, m), dtype=np.int64)
    v = np.zeros(m, dtype=np.int64)
    v[0] = 1
    for i in range(block):
        vecs[i] = v
        v = mx @ v % p
    # x^block as a matrix
    step = np.eye(m, dtype=np.int64)
    base, e = mx.copy(), block
    while e:
        if e & 1:
            step = step @ base % p
        base = base @ base % p
        e >>= 1
    out = np.empty((count, m), dtype=np.int64)
    pos = 0
    cur = vecs
    while pos < count:
        take = min(block, count - pos)
        out[pos : pos + take] = cur[:take]
        pos += take
        cur = cur @ step.T % p
    weights = p ** np.arange(m, dtype=np.int64)
    return out @ weights


# ---------------------------------------------------------------------------


class Field:
    """The finite field F_{p^m} with a fixed primitive modulus."""

    def __init__(self, p: int, m: int):
        if p not in SUPPORTED_PRIMES or m < 1 or p ** m > MAX_ORDER:
            raise ConfigurationError(f"unsupported field F_{p}^{m}")
        self.p = p
        self.m = m
        self.q = p ** m
        low = PRIMITIVE_POLYNOMIALS[(p, m)]
        self.modulus: tuple[int, ...] = tuple(low) + (1,)
        if not is_irreducible(list(self.modulus), p):
            raise ConfigurationError(f"embedded modulus for F_{self.q} is reducible")
        q = self.q
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        if m == 1:
            g = (-low[0]) % p
            x = 1
            for i in range(q - 1):
                exp[i] = x
                x = x * g % p
        else:
            exp[: q - 1] = _power_codes(p, m, low, q - 1)
        if len(np.unique(exp[: q - 1])) != q - 1 or 0 in exp[: q - 1]:
            raise ConfigurationError(f"embedded modulus for F_{q} is not primitive")
        exp[q - 1 : 2 * q - 2] = exp[: q - 1]
        log[exp[: q - 1]] = np.arange(q - 1)
        self.exp = exp
        self.log = log
        self._tables: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None = None

    # -- identity -------------------------------------------------------
    def __repr__(self) -> str:
        return f"Field(F_{self.q})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.p == self.p and other.m == self.m

    def __hash__(self) -> int:
        return hash((self.p, self.m))

    @property
    def generator(self) -> int:
        """Code of the primitive element x."""
        return int(self.exp[1]) if self.q > 2 else 1

    # -- scalar arithmetic on codes ---------------------------------------
    def digits(self, a: int) -> list[int]:
        return [(a // self.p ** i) % self.p for i in range(self.m)]

    def from_digits(self, d: Sequence[int]) -> int:
        return sum((int(x) % self.p) * self.p ** i for i, x in enumerate(d))

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DomainError("inverse of zero")
            return 1 if e == 0 else 0
        return int(self.exp[(self.log[a] * e) % (self.q - 1)])

    # -- vectorised tables -------------------------------------------------
    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(add, mul, neg, inv) lookup tables; only for q <= 4096."""
        if self._tables is None:
            q = self.q
            if q > 4096:
                raise ConfigurationError("lookup tables limited to q <= 4096")
            a = np.arange(q)
            if self.m == 1:
                add = (a[:, None] + a[None, :]) % q
                neg = (-a) % q
            elif self.p == 2:
                add = a[:, None] ^ a[None, :]
                neg = a.copy()
            else:
                dig = np.array([self.digits(x) for x in range(q)])
                w = self.p ** np.arange(self.m)
                add = (((dig[:, None, :] + dig[None, :, :]) % self.p) * w).sum(axis=2)
                neg = (((-dig) % self.p) * w).sum(axis=1)
            mul = np.zeros((q, q), dtype=np.int64)
            lg = self.log[1:]
            mul[1:, 1:] = self.exp[lg[:, None] + lg[None, :]]
            inv = np.zeros(q, dtype=np.int64)
            inv[1:] = self.exp[(q - 1 - lg) % (q - 1)]
            self._tables = (
                add.astype(np.uint8 if q <= 256 else np.int64),
                mul.astype(np.uint8 if q <= 256 else np.int64),
                neg.astype(np.uint8 if q <= 256 else np.int64),
                inv.astype(np.uint8 if q <= 256 else np.int64),
            )
        return self._tables

    # -- element wrapper ---------------------------------------------------
    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(self.q)]


@lru_cache(maxsize=None)
def field_make(p: int, m: int = 1) -> Field:
    """Return the (cached, deterministic) field F_{p^m}."""
    return Field(p, m)


def field_of_order(q: int) -> Field:
    for p in SUPPORTED_PRIMES:
        m, x = 0, 1
        while x < q:
            x *= p
            m += 1
        if x == q and m >= 1:
            return field_make(p, m)
    raise ConfigurationError(f"unsupported field order {q}")


def is_prime_power(q: int) -> bool:
    try:
        field_of_order(q)
        return True
    except ConfigurationError:
        return False


class FieldElement:
    """An element of a specific field; supports +, -, *, /, ** and inverse."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        if not 0 <= int(value) < field.q:
            raise InputError(f"code {value} out of range for F_{field.q}")
        self.field = field
        self.value = int(value)

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise UsageError("operands belong to different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return field_add(self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return field_sub(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return field_mul(self, other)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return field_div(self, other)

    def __pow__(self, e: int) -> "FieldElement":
        return field_pow(self, e)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, self.field.neg(self.value))

    def inverse(self) -> "FieldElement":
        return field_inv(self)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElement)
            and other.field == self.field
            and other.value == self.value
        )

    def __hash__(self) -> int:
        return hash((self.field.q, self.value))

    def __repr__(self) -> str:
        return f"F{self.field.q}({self.value})"


def _same(a: FieldElement, b: FieldElement) -> Field:
    if not isinstance(a, FieldElement) or not isinstance(b, FieldElement):
        raise UsageError("field operations need FieldElement operands")
    if a.field != b.field:
        raise UsageError("operands belong to different fields")
    return a.field


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same(a, b)
    return FieldElement(f, f.add(a.value, b.value))


def field_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same(a, b)
    return FieldElement(f, f.sub(a.value, b.value))


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same(a, b)
    return FieldElement(f, f.mul(a.value, b.value))


def field_div(a: FieldElement, b: FieldElement) -> FieldElement:
    f = _same(a, b)
    return FieldElement(f, f.div(a.value, b.value))


def field_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, a.field.inv(a.value))


def field_pow(a: FieldElement, e: int) -> FieldElement:
    return FieldElement(a.field, a.field.pow(a.value, e))


# ---------------------------------------------------------------------------
# subfields and expansion over a basis


def _solve_mod_p(cols: list[list[int]], target: list[int], p: int) -> list[int] | None:
    """Solve sum_j c_j cols[j] = target over F_p (unique solution or None)."""
    n, k = len(target), len(cols)
    aug = [[cols[j][i] % p for j in range(k)] + [target[i] % p] for i in range(n)]
    row = 0
    piv_cols = []
    for c in range(k):
        pr = next((i for i in range(row, n) if aug[i][c]), None)
        if pr is None:
            continue
        aug[row], aug[pr] = aug[pr], aug[row]
        iv = pow(aug[row][c], p - 2, p)
        aug[row] = [x * iv % p for x in aug[row]]
        for i in range(n):
            if i != row and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[row])]
        piv_cols.append(c)
        row += 1
    if any(aug[i][k] for i in range(row, n)):
        return None
    sol = [0] * k
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][k]
    return sol


class Extension:
    """F_{Q} viewed as a degree-l extension of F_q (Q = q^l, same p).

    Both fields are the canonical ones from ``field_make``; the subfield is
    embedded by sending its generator to a root of its modulus inside F_Q.
    """

    def __init__(self, small: Field, l: int):
        if l < 1:
            raise InputError("extension degree must be positive")
        self.small = small
        self.l = l
        self.big = field_make(small.p, small.m * l)
        big = self.big
        self._embed = self._compute_embedding()
        self._inv_embed = {v: k for k, v in enumerate(self._embed)}
        self.basis = [big.pow(big.generator, i) for i in range(l)]
        self._fp_inverse = self._basis_inverse(self.basis)

    def _compute_embedding(self) -> list[int]:
        small, big = self.small, self.big
        if small.m == 1:
            return [big.from_digits([a]) for a in range(small.q)]
        # image of the small generator: a root of the small modulus in F_Q
        step = (big.q - 1) // (small.q - 1)
        zeta = big.pow(big.generator, step)
        root = None
        for k in range(1, small.q - 1):
            if _gcd(k, small.q - 1) != 1:
                continue
            cand = big.pow(zeta, k)
            val = 0
            for i, c in enumerate(small.modulus):
                val = big.add(val, big.mul(big.from_digits([c]), big.pow(cand, i)))
            if val == 0:
                root = cand
                break
        if root is None:
            raise ConfigurationError("no subfield embedding found")
        out = []
        for a in range(small.q):
            v = 0
            for i, d in enumerate(small.digits(a)):
                v = big.add(v, big.mul(big.from_digits([d]), big.pow(root, i)))
            out.append(v)
        return out

    def embed(self, a: int) -> int:
        """Image in F_Q of the subfield element with code a."""
        return self._embed[a]

    def restrict(self, x: int) -> int:
        """Inverse of ``embed`` on its image."""
        try:
            return self._inv_embed[x]
        except KeyError:
            raise InputError(f"{x} does not lie in the subfield F_{self.small.q}") from None

    def _basis_inverse(self, basis: Sequence[int]) -> list[list[int]]:
        """F_p matrix mapping digits of x to the F_p digits of its coordinates."""
        small, big = self.small, self.big
        p = big.p
        cols = []
        for b in basis:
            for j in range(small.m):
                e = self._embed[small.from_digits([0] * j + [1])]
                cols.append(big.digits(big.mul(e, b)))
        size = len(cols)
        if size != big.m:
            raise InputError("basis has the wrong number of elements")
        inverse_cols = []
        for k in range(big.m):
            unit = [0] * big.m
            unit[k] = 1
            sol = _solve_mod_p(cols, unit, p)
            if sol is None:
                raise InputError("basis is not linearly independent over the subfield")
            inverse_cols.append(sol)
        return inverse_cols

    def expand(self, x: int, basis: Sequence[int] | None = None) -> tuple[int, ...]:
        """Coordinates (subfield codes) of x over ``basis`` (default 1, w, w^2, ...)."""
        inv = self._fp_inverse if basis is None else self._basis_inverse(basis)
        small, big = self.small, self.big
        p = big.p
        d = big.digits(x)
        fp = [0] * big.m
        for k, dk in enumerate(d):
            if dk:
                col = inv[k]
                for i in range(big.m):
                    fp[i] = (fp[i] + dk * col[i]) % p
        return tuple(small.from_digits(fp[i * small.m : (i + 1) * small.m]) for i in range(self.l))

    def contract(self, coords: Sequence[int], basis: Sequence[int] | None = None) -> int:
        """Inverse of ``expand``: sum of coords[i] * basis[i] in F_Q."""
        basis = self.basis if basis is None else basis
        big = self.big
        v = 0
        for c, b in zip(coords, basis):
            v = big.add(v, big.mul(self._embed[c], b))
        return v


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=None)
def extension(q: int, l: int) -> Extension:
    return Extension(field_of_order(q), l)


def subfield_expand(x: FieldElement, basis: Sequence[FieldElement], q: int | None = None) -> tuple[int, ...]:
    """Coordinates of x over an F_q-basis of F_{q^h} (q defaults to p).

    Returns subfield element codes.  Raises InputError when the basis is
    linearly dependent over F_q.
    """
    big = x.field
    for b in basis:
        if b.field != big:
            raise UsageError("basis elements belong to a different field")
    if q is None:
        q = big.p
    small = field_of_order(q)
    if big.m % small.m or small.p != big.p:
        raise InputError(f"F_{q} is not a subfield of F_{big.q}")
    l = big.m // small.m
    if len(basis) != l:
        raise InputError(f"basis needs exactly {l} elements")
    ext = extension(q, l)
    return ext.expand(x.value, [b.value for b in basis])


def subfield_contract(coords: Sequence[int], basis: Sequence[FieldElement], q: int | None = None) -> FieldElement:
    big = basis[0].field
    if q is None:
        q = big.p
    small = field_of_order(q)
    l = big.m // small.m
    ext = extension(q, l)
    return FieldElement(big, ext.contract(coords, [b.value for b in basis]))
