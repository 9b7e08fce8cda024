"""Euler characteristics from point counts.

A FiberFamily is a locus of subspaces X of a fixed ambient space cut out by
linear conditions (sandwich, images, intersection dimensions, exclusions,
isotropy).  Its fixed data are integer matrices, read either over Z (and then
counted over several primes) or over a fixed prime p (and then counted over
the extensions GF(p^e)).  Counts are interpolated by an integer polynomial in q
whose value at q = 1 is the Euler characteristic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Sequence

import numpy as np

from .fields import GF, QQ, get_field, reduce_matrix
from .linalg import (
    Subspace,
    annihilator,
    enumerate_between,
    gaussian_binomial,
    is_isotropic,
    preimage,
    rank,
    standard_symplectic,
)

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13, 17)
PENCIL_LIMIT = 200_000


class PolynomialityError(ArithmeticError):
    pass


class BadPrimeError(ValueError):
    pass


@dataclass(frozen=True)
class ChiPoly:
    coeffs: tuple[int, ...]  # constant term first
    sampled: tuple[tuple[int, int], ...]
    method: str = ""

    def __call__(self, q) -> int:
        return sum(c * q**t for t, c in enumerate(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "euler": euler(self),
            "samples": [list(s) for s in self.sampled],
            "method": self.method,
        }

    def pretty(self) -> str:
        terms = []
        for t, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if t == 0 else f"{c}*q" if t == 1 else f"{c}*q^{t}")
        return " + ".join(terms) or "0"


def interpolate(samples: Sequence[tuple[int, int]], degree_bound: int) -> ChiPoly:
    """Integer polynomial through the first degree_bound+1 samples, checked on the rest."""
    samples = [(int(a), int(b)) for a, b in samples]
    if len(samples) < degree_bound + 2:
        raise ValueError(f"need at least {degree_bound + 2} samples, got {len(samples)}")
    if len({a for a, _ in samples}) != len(samples):
        raise ValueError("sample points must be distinct")
    fit = samples[: degree_bound + 1]
    coeffs = [Fraction(0)] * (degree_bound + 1)
    for k, (xk, yk) in enumerate(fit):
        # Lagrange basis polynomial for node k, expanded
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, (xm, _) in enumerate(fit):
            if m == k:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xm * basis[t + 1]
            denom *= xk - xm
        for t, c in enumerate(basis):
            coeffs[t] += yk * c / denom
    if any(c.denominator != 1 for c in coeffs):
        raise PolynomialityError(f"non-integral interpolation coefficients {coeffs} from {samples}")
    ints = [int(c) for c in coeffs]
    while len(ints) > 1 and ints[-1] == 0:
        ints.pop()
    poly = ChiPoly(tuple(ints), tuple(samples))
    for x, y in samples[degree_bound + 1 :]:
        if poly(x) != y:
            raise PolynomialityError(f"held-out sample ({x}, {y}) disagrees with {poly.pretty()} = {poly(x)}")
    return poly


def euler(poly: ChiPoly) -> int:
    return poly(1)


def q_int_poly(n: int) -> tuple[int, ...]:
    return tuple([1] * n) if n > 0 else (0,)


def gaussian_poly(n: int, k: int) -> tuple[int, ...]:
    """Coefficients of the Gaussian binomial [n choose k] in q."""
    if k < 0 or k > n:
        return (0,)
    # recursion [n,k] = [n-1,k-1] + q^k [n-1,k]
    table: dict[tuple[int, int], list[int]] = {}

    def g(a: int, b: int) -> list[int]:
        if b < 0 or b > a:
            return [0]
        if b == 0 or b == a:
            return [1]
        if (a, b) not in table:
            x = g(a - 1, b - 1)
            y = [0] * b + g(a - 1, b)
            m = max(len(x), len(y))
            table[(a, b)] = [(x[t] if t < len(x) else 0) + (y[t] if t < len(y) else 0) for t in range(m)]
        return table[(a, b)]

    return tuple(g(n, k))


def chi_closed_form(kind: str, n: int, k: int | None = None) -> ChiPoly:
    """projective(n) = P^n, grassmannian(n, k) = k-planes in n-space."""
    if kind == "projective":
        if n < 0:
            raise ValueError("projective dimension must be >= 0")
        return ChiPoly(q_int_poly(n + 1), (), "closed-form")
    if kind == "grassmannian":
        if k is None or not 0 <= k <= n:
            raise ValueError("grassmannian needs 0 <= k <= n")
        return ChiPoly(gaussian_poly(n, k), (), "closed-form")
    raise ValueError(f"unknown closed form {kind!r}")


# ---------------------------------------------------------------- families


def _rows(x, n: int) -> np.ndarray:
    if x is None:
        return np.zeros((0, n), dtype=np.int64)
    a = np.asarray(x, dtype=object if isinstance(x, np.ndarray) and x.dtype == object else np.int64)
    return a.reshape(-1, n)


@dataclass
class FiberFamily:
    """Subspaces X of dimension k in an n-dimensional space with

    lower <= X <= upper, X @ M inside span(C) for each image (M, C),
    dim(X meet D) = m for each meet (D, m), X != E for each exclusion,
    and X isotropic for gram when gram is given (Lagrangian when 2k = n).

    Subspace data are row generators; char=None means the data live over Z.
    """

    name: str
    n: int
    k: int
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    images: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    meets: list[tuple[np.ndarray, int]] = field(default_factory=list)
    exclude: list[np.ndarray] = field(default_factory=list)
    gram: np.ndarray | None = None
    char: int | None = None

    def key(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.n, self.k, self.char)).encode())
        for arr in [self.lower, self.upper, self.gram]:
            h.update(b"|" + (b"-" if arr is None else np.asarray(arr, dtype=np.int64).tobytes()))
            h.update(repr(None if arr is None else np.shape(arr)).encode())
        for M, C in self.images:
            h.update(b"I" + np.asarray(M, dtype=np.int64).tobytes() + np.asarray(C, dtype=np.int64).tobytes())
            h.update(repr((np.shape(M), np.shape(C))).encode())
        for D, m in self.meets:
            h.update(b"M" + np.asarray(D, dtype=np.int64).tobytes() + repr((np.shape(D), m)).encode())
        for E in self.exclude:
            h.update(b"E" + np.asarray(E, dtype=np.int64).tobytes() + repr(np.shape(E)).encode())
        return h.hexdigest()

    # structural data over Q, used for the good-prime test
    def structural(self) -> list[np.ndarray]:
        mats = []
        for arr in [self.lower, self.upper, self.gram]:
            if arr is not None:
                mats.append(np.asarray(arr))
        for M, C in self.images:
            mats += [np.asarray(M), np.asarray(C)]
        mats += [np.asarray(D) for D, _ in self.meets]
        mats += [np.asarray(E) for E in self.exclude]
        return [m for m in mats if m.size]


def is_good_prime(fam: FiberFamily, p: int) -> bool:
    if fam.char is not None:
        return p == fam.char
    F = get_field(p)
    for m in fam.structural():
        if rank(m.tolist(), QQ) != rank(reduce_matrix(m, F), F):
            return False
    return True


@dataclass
class _Prepared:
    F: GF
    lower: Subspace
    upper: Subspace
    meets: list[tuple[Subspace, int]]
    exclude: list[Subspace]
    gram: np.ndarray | None


def _prepare(fam: FiberFamily, F: GF) -> _Prepared:
    n = fam.n

    def span(x):
        arr = _rows(x, n)
        if arr.dtype == object or (arr.size and (arr.min() < 0 or arr.max() >= F.p)):
            arr = reduce_matrix(arr, F)
        return Subspace.span(F, n, arr)

    lower = span(fam.lower)
    upper = Subspace.full(F, n) if fam.upper is None else span(fam.upper)
    for M, C in fam.images:
        M = np.asarray(M)
        Cs = Subspace.span(F, M.shape[1], reduce_matrix(_rows(C, M.shape[1]), F))
        upper = upper & preimage(reduce_matrix(M, F), Cs)
    gram = None if fam.gram is None else reduce_matrix(fam.gram, F)
    meets = [(span(D), int(m)) for D, m in fam.meets]
    exclude = [span(E) for E in fam.exclude]
    return _Prepared(F, lower, upper, meets, exclude, gram)


def _projective_points(F: GF, c: int) -> np.ndarray:
    """Normalized representatives (first nonzero entry 1) of the points of P^{c-1}(F)."""
    q = F.q
    out = []
    for lead in range(c):
        tail = c - lead - 1
        block = np.zeros((q**tail, c), dtype=np.int64)
        block[:, lead] = 1
        if tail:
            grid = np.array(list(product(range(q), repeat=tail)), dtype=np.int64)
            block[:, lead + 1 :] = grid
        out.append(block)
    return np.concatenate(out, axis=0) if out else np.zeros((0, c), dtype=np.int64)


def _pencil_count(P: _Prepared, lower: Subspace, upper: Subspace, meets, exclude) -> int:
    """Number of X = lower + <v>, v in upper, meeting the conditions."""
    F = P.F
    if not lower <= upper or upper.dim == lower.dim:
        return 0
    comp = lower.complement_in(upper)
    c = comp.shape[0]
    # every meet/exclusion is a condition "v in S" or "v not in S" with S containing lower
    conds = []
    for D, m in meets:
        base = (lower & D).dim
        if m == base:
            conds.append((lower + D, False))
        elif m == base + 1:
            conds.append((lower + D, True))
        else:
            return 0
    for E in exclude:
        if E.dim == lower.dim + 1 and lower <= E:
            conds.append((E, False))
    npts = (F.q**c - 1) // (F.q - 1)
    if npts <= PENCIL_LIMIT:
        V = F.matmul(_projective_points(F, c), comp)
        mask = np.ones(V.shape[0], dtype=bool)
        for S, want in conds:
            inside = ~S.residual(V).any(axis=1)
            mask &= inside if want else ~inside
        return int(mask.sum())
    return _pencil_count_lattice(F.q, lower, upper, conds)


def _pencil_count_lattice(q: int, lower: Subspace, upper: Subspace, conds) -> int:
    """Inclusion-exclusion over the membership conditions; exact for any q."""
    pos = [S & upper for S, want in conds if want]
    neg = [S & upper for S, want in conds if not want]
    a = lower.dim
    base = upper
    for S in pos:
        base = base & S
    total = 0
    for r in range(len(neg) + 1):
        for sub in combinations(neg, r):
            T = base
            for S in sub:
                T = T & S
            total += (-1) ** r * ((q ** (T.dim - a) - 1) // (q - 1) if T.dim > a else 0)
    return total


def _lagrangian_meet(P: _Prepared) -> tuple[Subspace, int] | None:
    if P.gram is None:
        return None
    for idx, (D, m) in enumerate(P.meets):
        if 2 * D.dim == D.n and m == D.dim - 1 and is_isotropic(D, P.gram):
            return D, idx
    return None


_MODEL_CACHE: dict[tuple, int] = {}


def _lagrangian_key(P: _Prepared, lower: Subspace, upper: Subspace):
    """Reduce a Lagrangian family to its symplectic quotient.

    X contains lower and X lies in upper iff X contains upper^perp, so both
    collapse into one isotropic L.  Passing to L^perp/L, each Lagrangian D
    becomes a Lagrangian D' with dim(X & D) = dim(X' & D') + dim(D & L).
    Pairs of Lagrangians are classified up to isometry by the dimension of
    their intersection, so (q, n', dim D1' & D2', m1', m2') determines the count.
    Returns None when the family is outside this shape.
    """
    g = P.gram
    if P.exclude or len(P.meets) > 2 or g.shape[0] != g.shape[1]:
        return None
    F = P.F
    if np.diagonal(g).any() or np.asarray(F.add(g, g.T)).any():
        return None
    if rank(g, F) != g.shape[0]:
        return None
    Ds = [D for D, _ in P.meets]
    if not all(2 * D.dim == D.n and is_isotropic(D, g) for D in Ds):
        return None
    L = lower + annihilator(upper, g, "left")
    if not is_isotropic(L, g):
        return "empty"
    Lp = annihilator(L, g, "left")
    nq = (L.n - 2 * L.dim) // 2
    reduced, ms = [], []
    for D, m in P.meets:
        mm = m - (D & L).dim
        if not 0 <= mm <= nq:
            return "empty"
        reduced.append((D & Lp) + L)
        ms.append(mm)
    k12 = (reduced[0] & reduced[1]).dim - L.dim if len(reduced) == 2 else -1
    return (F.q, nq, k12, *ms)


def _model(F: GF, nq: int, k12: int, *ms: int) -> _Prepared:
    """Standard symplectic space of dim 2nq with Lagrangians in the given position."""
    n = 2 * nq
    eye = np.eye(n, dtype=np.int64)
    Ds = [Subspace.span(F, n, eye[:nq])]
    if k12 >= 0:
        Ds.append(Subspace.span(F, n, np.concatenate([eye[:k12], eye[nq + k12:]])))
    meets = list(zip(Ds, ms))
    return _Prepared(F, Subspace.zero(F, n), Subspace.full(F, n), meets, [], reduce_matrix(standard_symplectic(n), F))


def count_prepared(P: _Prepared, k: int, reduce: bool = True) -> tuple[int, str]:
    F = P.F
    lower, upper = P.lower, P.upper
    if not lower <= upper or not lower.dim <= k <= upper.dim:
        return 0, "empty"
    if P.gram is not None:
        if not is_isotropic(lower, P.gram):
            return 0, "empty"
        upper = upper & annihilator(lower, P.gram, "left")
        if not lower <= upper or k > upper.dim:
            return 0, "empty"
    if P.gram is None and not P.meets and not P.exclude:
        return gaussian_binomial(upper.dim - lower.dim, k - lower.dim, F.q), "formula"
    if k == lower.dim + 1:
        return _pencil_count(P, lower, upper, P.meets, P.exclude), "pencil"
    if reduce and P.gram is not None and 2 * k == lower.n:
        key = _lagrangian_key(P, lower, upper)
        if key is not None:
            if key == "empty":
                return 0, "empty"
            if key[1] == 0:
                return 1, "lagrangian-model"  # X = L is the only candidate
            if key not in _MODEL_CACHE:
                _MODEL_CACHE[key] = count_prepared(_model(F, *key[1:]), key[1], reduce=False)[0]
            return _MODEL_CACHE[key], "lagrangian-model"
    lm = _lagrangian_meet(P) if 2 * k == lower.n else None
    if lm is not None:
        D, idx = lm
        others = [mt for t, mt in enumerate(P.meets) if t != idx]
        total = 0
        for U in enumerate_between(lower & D, D, D.dim - 1):
            B = U + lower
            if not B <= upper or not is_isotropic(B, P.gram):
                continue
            if B.dim == k:
                if B != D and _ok(B, others + [(D, D.dim - 1)], P.exclude):
                    total += 1
            elif B.dim == k - 1:
                top = upper & annihilator(B, P.gram, "left")
                total += _pencil_count(P, B, top, others + [(D, D.dim - 1)], P.exclude)
        return total, "lagrangian-pencil"
    total = 0
    for X in enumerate_between(lower, upper, k, P.gram):
        if _ok(X, P.meets, P.exclude):
            total += 1
    return total, "enumerate"


def _ok(X: Subspace, meets, exclude) -> bool:
    return all((X & D).dim == m for D, m in meets) and all(X != E for E in exclude)


def count_family(fam: FiberFamily, q: int) -> int:
    F = get_field(q)
    if fam.char is not None and F.p != fam.char:
        raise BadPrimeError(f"family is defined over GF({fam.char}); cannot count over GF({q})")
    if fam.char is None and F.k == 1 and not is_good_prime(fam, F.p):
        raise BadPrimeError(f"{q} is a bad prime for {fam.name}")
    return count_prepared(_prepare(fam, F), fam.k)[0]


def enumerate_family(fam: FiberFamily, q: int) -> list[Subspace]:
    """Explicit solution list (slow path; used as an oracle)."""
    F = get_field(q)
    P = _prepare(fam, F)
    return [X for X in enumerate_between(P.lower, P.upper, fam.k, P.gram) if _ok(X, P.meets, P.exclude)]


def degree_bound(fam: FiberFamily) -> int:
    """Dimension of the parameter space searched, computed over the base field."""
    F = get_field(fam.char or _first_good(fam))
    P = _prepare(fam, F)
    lower, upper, k = P.lower, P.upper, fam.k
    if P.gram is not None and is_isotropic(lower, P.gram):
        upper = upper & annihilator(lower, P.gram, "left")
    if not lower <= upper or not lower.dim <= k <= upper.dim:
        return 0
    if k == lower.dim + 1:
        return max(upper.dim - lower.dim - 1, 0)
    lm = _lagrangian_meet(P) if 2 * k == fam.n else None
    if lm is not None:
        D, _ = lm
        return max(D.dim - (lower & D).dim - 1, 0) + 1
    return (k - lower.dim) * (upper.dim - k)


def _first_good(fam: FiberFamily) -> int:
    for p in DEFAULT_PRIMES:
        if is_good_prime(fam, p):
            return p
    raise BadPrimeError(f"no good prime for {fam.name}")


_CHI_CACHE: dict[tuple, ChiPoly] = {}


def sample_fields(fam: FiberFamily, count: int, primes: Sequence[int] = DEFAULT_PRIMES) -> tuple[list[int], list[int]]:
    """(fields used, bad primes skipped)."""
    if fam.char is not None:
        return [fam.char**e for e in range(1, count + 1)], []
    good, bad = [], []
    for p in primes:
        (good if is_good_prime(fam, p) else bad).append(p)
    if len(good) < count:
        raise BadPrimeError(f"only {len(good)} good primes for {fam.name}, need {count}")
    return good[:count], bad


def chi_family(fam: FiberFamily, held_out: int = 2, primes: Sequence[int] = DEFAULT_PRIMES) -> ChiPoly:
    """Interpolated count polynomial; held_out extra samples must agree exactly."""
    key = (fam.key(), held_out, tuple(primes))
    if key in _CHI_CACHE:
        return _CHI_CACHE[key]
    D = degree_bound(fam)
    qs, _ = sample_fields(fam, D + 1 + held_out, primes)
    samples, methods = [], set()
    for q in qs:
        c, m = count_prepared(_prepare(fam, get_field(q)), fam.k)
        samples.append((q, c))
        methods.add(m)
    poly = interpolate(samples, D)
    poly = ChiPoly(poly.coeffs, poly.sampled, "/".join(sorted(methods)))
    _CHI_CACHE[key] = poly
    return poly


def sla1_family(n: int, name: str | None = None) -> FiberFamily:
    """Lagrangians of the standard 2n-space meeting span(e_1..e_n) in codimension one."""
    from .linalg import standard_symplectic

    L0 = np.eye(2 * n, dtype=np.int64)[:n]
    return FiberFamily(name or f"sla1({n})", 2 * n, n, meets=[(L0, n - 1)], gram=standard_symplectic(2 * n))


def chi_of_counter(counter: Callable[[int], int], qs: Sequence[int], degree: int) -> ChiPoly:
    """Interpolate an arbitrary counting function sampled at the given field sizes."""
    return interpolate([(q, counter(q)) for q in qs], degree)
