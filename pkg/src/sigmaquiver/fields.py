"""Finite fields GF(p^k) with table arithmetic, plus the rational tag.

Elements of GF(p^k) are the integers 0..q-1, read as base-p digit strings of
polynomial coefficients modulo a fixed irreducible polynomial.  The prime
subfield is exactly {0, ..., p-1}, so data reduced mod p embeds unchanged in
every extension.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise."""
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1 or not is_prime(p):
                break
            return p, k
    raise ValueError(f"{q} is not a prime power")


class Rational:
    """Tag for exact arithmetic over Q."""

    kind = "rational"

    def __repr__(self) -> str:
        return "QQ"

    def __reduce__(self):
        return "QQ"


QQ = Rational()


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    k = len(mod) - 1
    prod_ = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod_[i + j] = (prod_[i + j] + x * y) % p
    for deg in range(len(prod_) - 1, k - 1, -1):
        c = prod_[deg]
        if c:
            for t in range(k + 1):
                prod_[deg - k + t] = (prod_[deg - k + t] - c * mod[t]) % p
    out = prod_[:k] + [0] * (k - len(prod_[:k]))
    return out


def _poly_divides(f: list[int], g: list[int], p: int) -> bool:
    """Does monic f divide g (coefficient lists, low degree first)?"""
    r = list(g)
    df = len(f) - 1
    for deg in range(len(r) - 1, df - 1, -1):
        c = r[deg]
        if c:
            for t in range(df + 1):
                r[deg - df + t] = (r[deg - df + t] - c * f[t]) % p
    return not any(r[:df])


def _monic_polys(p: int, deg: int):
    for low in product(range(p), repeat=deg):
        yield list(low) + [1]


@lru_cache(maxsize=None)
def irreducible_poly(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree k over F_p."""
    if k == 1:
        return (0, 1)
    for cand in _monic_polys(p, k):
        if cand[0] == 0:
            continue
        if not any(_poly_divides(f, cand, p) for deg in range(1, k // 2 + 1) for f in _monic_polys(p, deg)):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")


class GF:
    """The finite field with q = p**k elements."""

    kind = "finite"

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.p, self.k, self.q = p, k, p**k
        q = self.q
        self.prime_field = k == 1
        if self.prime_field:
            idx = np.arange(p, dtype=np.int64)
            self.add_t = (idx[:, None] + idx[None, :]) % p
            self.mul_t = (idx[:, None] * idx[None, :]) % p
        else:
            digits = [[(x // p**t) % p for t in range(k)] for x in range(q)]
            enc = lambda ds: sum(d * p**t for t, d in enumerate(ds))  # noqa: E731
            mod = list(irreducible_poly(p, k))
            self.add_t = np.array(
                [[enc([(a + b) % p for a, b in zip(digits[x], digits[y])]) for y in range(q)] for x in range(q)],
                dtype=np.int64,
            )
            self.mul_t = np.array(
                [[enc(_poly_mulmod(digits[x], digits[y], mod, p)) for y in range(q)] for x in range(q)],
                dtype=np.int64,
            )
        self.neg_t = np.array([int(np.nonzero(self.add_t[x] == 0)[0][0]) for x in range(q)], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for x in range(1, q):
            inv[x] = int(np.nonzero(self.mul_t[x] == 1)[0][0])
        self.inv_t = inv
        self.sub_t = self.add_t[:, self.neg_t]
        for t in (self.add_t, self.mul_t, self.neg_t, self.inv_t, self.sub_t):
            t.setflags(write=False)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    def __reduce__(self):
        return (get_field, (self.q,))

    # elementwise ops on arrays or ints
    def add(self, a, b):
        if self.prime_field:
            return (a + b) % self.p
        return self.add_t[a, b]

    def sub(self, a, b):
        if self.prime_field:
            return (a - b) % self.p
        return self.sub_t[a, b]

    def mul(self, a, b):
        if self.prime_field:
            return (a * b) % self.p
        return self.mul_t[a, b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.inv_t[a]

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.prime_field:
            return (a @ b) % self.p
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for t in range(a.shape[1]):
            out = self.add_t[out, self.mul_t[a[:, t][:, None], b[t][None, :]]]
        return out

    def from_int(self, x):
        return np.asarray(x, dtype=np.int64) % self.p

    def from_fraction(self, x: Fraction) -> int:
        x = Fraction(x)
        den = x.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"{x} has denominator divisible by {self.p}")
        return (x.numerator % self.p) * pow(den, -1, self.p) % self.p

    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def get_field(q: int) -> GF:
    p, k = prime_power(q)
    return GF(p, k)


def reduce_matrix(m, field: GF) -> np.ndarray:
    """Reduce a rational/integer matrix into GF (prime subfield)."""
    arr = np.asarray(m, dtype=object)
    out = np.zeros(arr.shape, dtype=np.int64)
    for idx, x in np.ndenumerate(arr):
        out[idx] = field.from_fraction(Fraction(x))
    return out
