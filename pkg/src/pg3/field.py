"""Arithmetic in GF(q), q = p^e with p an odd prime.

Elements are encoded as integers 0..q-1.  For e > 1 an element with
coefficient tuple (c0, c1, ..., c_{e-1}) over GF(p) is encoded as
c0 + c1*p + ... + c_{e-1}*p^{e-1}; for e = 1 the encoding is the residue.
The modulus for e > 1 is the lexicographically smallest monic irreducible
polynomial of degree e, comparing (c0, c1, ..., c_{e-1}).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

GEOMETRY_MAX_Q = 13
ARITHMETIC_MAX_Q = 2**16
TABLE_MAX_Q = 13


class FieldError(ValueError):
    pass


class NotOddPrime(FieldError):
    pass


class ExponentZero(FieldError):
    pass


class FieldTooLarge(FieldError):
    pass


class FieldMismatch(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, e) with q = p^e, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    return (p, e) if n == 1 else None


# -- polynomials over GF(p): coefficient lists, lowest degree first ----------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m."""
    a = _poly_trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _poly_trim(a)
    return a


def _poly_has_monic_factor(m: list[int], p: int, degree: int) -> bool:
    for low in itertools.product(range(p), repeat=degree):
        if not _poly_mod(m, list(low) + [1], p):
            return True
    return False


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Brute-force irreducibility of a monic polynomial (full coefficient tuple)."""
    m = list(poly)
    e = len(m) - 1
    if e < 1 or m[-1] != 1:
        return False
    if any(_poly_mod(m, [(-r) % p, 1], p) == [] for r in range(p)):
        return False
    return not any(_poly_has_monic_factor(m, p, d) for d in range(2, e // 2 + 1))


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree e over GF(p).

    Returned as the full coefficient tuple (c0, ..., c_{e-1}, 1).
    """
    for low in itertools.product(range(p), repeat=e):
        poly = tuple(low) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {e} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) with canonical integer encoding.

    Scalar operations (:meth:`add`, :meth:`mul`, ...) act on encoded
    integers.  For q <= 13 full numpy tables are precomputed and exposed as
    ``add_table``, ``mul_table``, ``neg_table`` and ``inv_table`` (inv of 0
    is stored as 0 and never used).
    """

    p: int
    e: int
    q: int
    modulus_poly: tuple[int, ...]
    add_table: np.ndarray | None = field(default=None, compare=False, repr=False)
    mul_table: np.ndarray | None = field(default=None, compare=False, repr=False)
    neg_table: np.ndarray | None = field(default=None, compare=False, repr=False)
    inv_table: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.q <= TABLE_MAX_Q:
            q = self.q
            add = np.array([[self._add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
            mul = np.array([[self._mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
            neg = np.array([self._neg(a) for a in range(q)], dtype=np.int64)
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
            for t in (add, mul, neg, inv):
                t.setflags(write=False)
            object.__setattr__(self, "add_table", add)
            object.__setattr__(self, "mul_table", mul)
            object.__setattr__(self, "neg_table", neg)
            object.__setattr__(self, "inv_table", inv)
            object.__setattr__(self, "_lists", (add.tolist(), mul.tolist(), neg.tolist(), inv.tolist()))

    # -- encoding ---------------------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        """Coefficient tuple (c0, ..., c_{e-1}) of the encoded element a."""
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def encode(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.e or any(not 0 <= c < self.p for c in coeffs):
            raise FieldError(f"bad coefficient tuple {coeffs!r} for GF({self.q})")
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def elements(self):
        return range(self.q)

    @property
    def poly_header(self) -> str:
        """Modulus coefficients as written in file headers (empty for e = 1)."""
        return ",".join(str(c) for c in self.modulus_poly)

    # -- untabled arithmetic ----------------------------------------------

    def _add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        da, db = self.digits(a), self.digits(b)
        return self.encode([(x + y) % self.p for x, y in zip(da, db)])

    def _neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        return self.encode([(-x) % self.p for x in self.digits(a)])

    def _mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        r = _poly_mod(prod, list(self.modulus_poly), self.p)
        return self.encode(r)

    # -- public scalar api ------------------------------------------------

    def _check(self, *xs: int):
        for x in xs:
            if not 0 <= x < self.q:
                raise FieldError(f"{x} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return self._lists[0][a][b]
        self._check(a, b)
        return self._add(a, b)

    def mul(self, a: int, b: int) -> int:
        if self.mul_table is not None:
            return self._lists[1][a][b]
        self._check(a, b)
        return self._mul(a, b)

    def neg(self, a: int) -> int:
        if self.neg_table is not None:
            return self._lists[2][a]
        self._check(a)
        return self._neg(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        if self.inv_table is not None:
            return self._lists[3][a]
        self._check(a)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def is_square(self, a: int) -> bool:
        return a == 0 or self.pow(a, (self.q - 1) // 2) == 1

    # -- vectorised ops over int arrays (tabled fields only) --------------

    def vadd(self, a, b):
        return self.add_table[a, b]

    def vmul(self, a, b):
        return self.mul_table[a, b]


def make_field(p: int, e: int = 1, max_q: int = ARITHMETIC_MAX_Q) -> FieldSpec:
    """Build GF(p^e) with its canonical modulus.

    >>> make_field(3, 2).modulus_poly
    (1, 0, 1)
    """
    if e < 1:
        raise ExponentZero(f"exponent must be positive, got {e}")
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    q = p**e
    if q > max_q:
        raise FieldTooLarge(f"q={q} exceeds the cap {max_q}")
    poly = () if e == 1 else smallest_irreducible(p, e)
    return FieldSpec(p=p, e=e, q=q, modulus_poly=poly)


def field_of_order(q: int, max_q: int = ARITHMETIC_MAX_Q) -> FieldSpec:
    pe = prime_power(q)
    if pe is None:
        raise NotOddPrime(f"q={q} is not a prime power")
    if pe[0] == 2:
        raise NotOddPrime("q must be odd")
    return make_field(pe[0], pe[1], max_q=max_q)


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise FieldError(f"{self.value} is not an element of GF({self.field.q})")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"GF({self.field.q}) vs GF({other.field.q})")
            return other.value
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.add(self.value, b))

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(self.value, b))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.mul(self.value, b))

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(self.value, b))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"GF({self.field.q})({self.value})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, a.field.inv(a.value))


# -- small dense linear algebra over GF(q) ------------------------------------

def matmul(F: FieldSpec, A, B):
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            s = 0
            for t in range(m):
                s = F.add(s, F.mul(A[i][t], B[t][j]))
            row.append(s)
        out.append(row)
    return out


def transpose(A):
    return [list(r) for r in zip(*A)]


def row_reduce(F: FieldSpec, A):
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    M = [list(r) for r in A]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        s = F.inv(M[r][c])
        M[r] = [F.mul(s, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(F: FieldSpec, A) -> int:
    return len(row_reduce(F, A)[1])


def nullspace(F: FieldSpec, A, ncols: int | None = None) -> list[list[int]]:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if ncols is None:
        ncols = len(A[0])
    R, pivots = row_reduce(F, A) if A else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, pc in zip(R, pivots):
            x[pc] = F.neg(row[f])
        basis.append(x)
    return basis


def det(F: FieldSpec, A) -> int:
    M = [list(r) for r in A]
    n = len(M)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = F.neg(d)
        d = F.mul(d, M[c][c])
        s = F.inv(M[c][c])
        for i in range(c + 1, n):
            if M[i][c]:
                f = F.mul(M[i][c], s)
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[c])]
    return d
