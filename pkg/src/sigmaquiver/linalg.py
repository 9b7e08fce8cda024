"""Exact linear algebra over Q and GF(q).

Vectors are rows.  A linear map K(i) -> K(j) is an array of shape
(dim K(i), dim K(j)) acting by x |-> x @ A, so the image of a subspace with
basis rows S is spanned by the rows of S @ A.  A subspace is stored only by its
reduced row-echelon basis, which makes equality and hashing exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .fields import GF, QQ, Rational


class Echelon(NamedTuple):
    rank: int
    echelon: np.ndarray
    pivots: tuple[int, ...]
    kernel: np.ndarray


# ---------------------------------------------------------------- echelon forms


def _rref_gf(m: np.ndarray, F: GF) -> tuple[int, np.ndarray, tuple[int, ...]]:
    m = np.array(m, dtype=np.int64, copy=True)
    if m.ndim != 2:
        raise ValueError("expected a 2d array")
    rows, cols = m.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        lead = int(m[r, c])
        if lead != 1:
            m[r] = F.mul(F.inv(lead), m[r])
        col = m[:, c].copy()
        col[r] = 0
        if col.any():
            m = F.sub(m, F.mul(col[:, None], m[r][None, :]))
        pivots.append(c)
        r += 1
    return r, m[:r], tuple(pivots)


def _rref_q(m) -> tuple[int, list[list[Fraction]], tuple[int, ...]]:
    m = [[Fraction(x) for x in row] for row in m]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        k = next((t for t in range(r, rows) if m[t][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for t in range(rows):
            if t != r and m[t][c] != 0:
                f = m[t][c]
                m[t] = [a - f * b for a, b in zip(m[t], m[r])]
        pivots.append(c)
        r += 1
    return r, m[:r], tuple(pivots)


def _kernel_from_rref(R, pivots, cols, zero, one, neg):
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = [zero] * cols
        x[f] = one
        for t, pc in enumerate(pivots):
            x[pc] = neg(R[t][f])
        basis.append(x)
    return basis


def rref(m, field=QQ) -> Echelon:
    """Reduced row-echelon form, rank, pivots and a right-kernel basis (as rows).

    Over QQ the matrices are object arrays of Fractions.
    """
    if isinstance(field, Rational):
        arr = np.asarray(m, dtype=object)
        cols = arr.shape[1] if arr.ndim == 2 else 0
        r, R, piv = _rref_q(arr.tolist() if arr.size else [[] for _ in range(arr.shape[0])])
        ker = _kernel_from_rref(R, piv, cols, Fraction(0), Fraction(1), lambda x: -x)
        ech = np.array(R, dtype=object).reshape(r, cols)
        kern = np.array(ker, dtype=object).reshape(len(ker), cols)
        return Echelon(r, ech, piv, kern)
    arr = np.asarray(m, dtype=np.int64)
    cols = arr.shape[1]
    r, R, piv = _rref_gf(arr, field)
    free = [c for c in range(cols) if c not in piv]
    ker = np.zeros((len(free), cols), dtype=np.int64)
    for s, f in enumerate(free):
        ker[s, f] = 1
        for t, pc in enumerate(piv):
            ker[s, pc] = field.neg(int(R[t, f]))
    return Echelon(r, R, piv, ker)


def rank(m, field=QQ) -> int:
    arr = np.asarray(m)
    if arr.size == 0:
        return 0
    return rref(m, field).rank


def batch_rank(mats: np.ndarray, F: GF) -> np.ndarray:
    """Ranks of a stack of matrices over F, eliminated in lockstep."""
    A = np.array(mats, dtype=np.int64)
    N, r, c = A.shape
    row = np.zeros(N, dtype=np.int64)
    if r == 0 or N == 0:
        return row
    idx = np.arange(r)
    for col in range(c):
        mask = (A[:, :, col] != 0) & (idx[None, :] >= row[:, None])
        b = np.flatnonzero(mask.any(axis=1))
        if not b.size:
            continue
        piv = mask[b].argmax(axis=1)
        top = row[b]
        prow = A[b, piv].copy()
        A[b, piv] = A[b, top]
        prow = F.mul_t[F.inv_t[prow[:, col]][:, None], prow]
        A[b, top] = prow
        factor = A[b, :, col].copy()
        factor[np.arange(b.size), top] = 0
        A[b] = F.sub_t[A[b], F.mul_t[factor[:, :, None], prow[:, None, :]]]
        row[b] += 1
    return row


def left_kernel(m: np.ndarray, F: GF) -> np.ndarray:
    """Rows c with c @ m = 0."""
    m = np.asarray(m, dtype=np.int64)
    if m.shape[1] == 0:
        return np.eye(m.shape[0], dtype=np.int64)
    return rref(m.T, F).kernel


def q_matmul(a, b):
    """Exact product of object/integer matrices over Q."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    out = np.empty((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum((a[i, t] * b[t, j] for t in range(a.shape[1])), Fraction(0))
    return out


def q_inverse(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    aug = np.concatenate([a, np.eye(n, dtype=object)], axis=1)
    r, R, piv = _rref_q(aug.tolist())
    if piv[:n] != tuple(range(n)) if n else False:
        raise ZeroDivisionError("singular matrix")
    if r < n or any(p >= n for p in piv[:n]):
        raise ZeroDivisionError("singular matrix")
    return np.array([row[n:] for row in R], dtype=object)


# ---------------------------------------------------------------- subspaces


class Subspace:
    """A subspace of GF(q)^n, held in canonical reduced row-echelon form."""

    __slots__ = ("field", "n", "basis", "pivots", "_key")

    def __init__(self, field: GF, n: int, basis: np.ndarray, pivots: tuple[int, ...]):
        self.field = field
        self.n = n
        basis = np.asarray(basis, dtype=np.int64).reshape(len(pivots), n)
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = pivots
        self._key = (field.q, n, basis.tobytes())

    @classmethod
    def span(cls, field: GF, n: int, vectors) -> "Subspace":
        vec = np.asarray(vectors, dtype=np.int64)
        if vec.size == 0:
            return cls.zero(field, n)
        vec = vec.reshape(-1, n)
        r, R, piv = _rref_gf(vec, field)
        return cls(field, n, R, piv)

    @classmethod
    def zero(cls, field: GF, n: int) -> "Subspace":
        return cls(field, n, np.zeros((0, n), dtype=np.int64), ())

    @classmethod
    def full(cls, field: GF, n: int) -> "Subspace":
        return cls(field, n, np.eye(n, dtype=np.int64), tuple(range(n)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        rows = ",".join("".join(str(int(x)) for x in row) for row in self.basis)
        return f"<{self.dim}/{self.n} [{rows}]>"

    def __lt__(self, other: "Subspace") -> bool:
        return (self.dim, self.pivots, self.basis.tobytes()) < (other.dim, other.pivots, other.basis.tobytes())

    def _same(self, other: "Subspace") -> None:
        if self.n != other.n or self.field != other.field:
            raise ValueError(f"ambient mismatch: {self.n}/{self.field} vs {other.n}/{other.field}")

    def residual(self, vectors: np.ndarray) -> np.ndarray:
        """Reduce rows modulo this subspace; a row lies in it iff its residual is zero."""
        v = np.asarray(vectors, dtype=np.int64).reshape(-1, self.n)
        if self.dim == 0:
            return v % self.field.q if self.field.prime_field else v
        F = self.field
        return F.sub(v, F.matmul(v[:, list(self.pivots)], self.basis))

    def contains(self, vectors) -> bool:
        return not self.residual(vectors).any()

    def __le__(self, other: "Subspace") -> bool:
        self._same(other)
        return self.dim <= other.dim and other.contains(self.basis)

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same(other)
        if self.dim == 0:
            return other
        if other.dim == 0:
            return self
        return Subspace.span(self.field, self.n, np.vstack([self.basis, other.basis]))

    def __and__(self, other: "Subspace") -> "Subspace":
        self._same(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.n)
        res = other.residual(self.basis)
        coeffs = left_kernel(res, self.field)
        if coeffs.shape[0] == 0:
            return Subspace.zero(self.field, self.n)
        return Subspace.span(self.field, self.n, self.field.matmul(coeffs, self.basis))

    def image(self, mat: np.ndarray) -> "Subspace":
        mat = np.asarray(mat, dtype=np.int64)
        if mat.shape[0] != self.n:
            raise ValueError("map does not start at this ambient space")
        if self.dim == 0:
            return Subspace.zero(self.field, mat.shape[1])
        return Subspace.span(self.field, mat.shape[1], self.field.matmul(self.basis, mat))

    def complement_in(self, upper: "Subspace") -> np.ndarray:
        """Rows C, canonical, with upper = self (+) span(C); requires self <= upper."""
        res = self.residual(upper.basis)
        r, R, _ = _rref_gf(res, self.field)
        if self.dim + r != upper.dim:
            raise ValueError("lower space is not contained in upper space")
        return R


def preimage(mat: np.ndarray, target: Subspace) -> Subspace:
    """{x : x @ mat in target}."""
    F = target.field
    mat = np.asarray(mat, dtype=np.int64)
    n = mat.shape[0]
    res = target.residual(mat)
    return Subspace.span(F, n, left_kernel(res, F) if n else np.zeros((0, 0)))


def lattice(s: Subspace, t: Subspace) -> tuple[Subspace, Subspace]:
    """(s + t, s meet t)."""
    return s + t, s & t


# ---------------------------------------------------------------- bilinear forms


@dataclass(frozen=True)
class BilForm:
    """Gram matrix pairing a left space (rows) with a right space (columns)."""

    gram: np.ndarray
    flavor: str = "pairing"  # "symplectic" | "pairing"

    @property
    def left_dim(self) -> int:
        return self.gram.shape[0]

    @property
    def right_dim(self) -> int:
        return self.gram.shape[1]


def standard_symplectic(n: int) -> np.ndarray:
    """[[0, I], [-I, 0]]; omega(e_k, e_{k+n/2}) = 1."""
    if n % 2:
        raise ValueError(f"symplectic space must be even-dimensional, got {n}")
    h = n // 2
    g = np.zeros((n, n), dtype=np.int64)
    g[:h, h:] = np.eye(h, dtype=np.int64)
    g[h:, :h] = -np.eye(h, dtype=np.int64)
    return g


def check_nondegenerate(form: BilForm, field) -> None:
    g = form.gram
    if g.shape[0] != g.shape[1] or rank(g, field) != g.shape[0]:
        raise ValueError("degenerate form")
    if form.flavor == "symplectic":
        neg = np.asarray(-g.T) if isinstance(field, Rational) else field.neg(g.T)
        if not np.array_equal(np.asarray(g) if isinstance(field, Rational) else g % field.p, neg):
            raise ValueError("symplectic gram matrix is not antisymmetric")


def annihilator(s: Subspace, gram: np.ndarray, side: str = "left") -> Subspace:
    """Annihilator of s under gram.

    side="left": s lives in the row space of gram; returns {y : s G y^T = 0}.
    side="right": s lives in the column space; returns {x : x G s^T = 0}.
    """
    F = s.field
    g = np.asarray(gram, dtype=np.int64)
    if side == "left":
        if g.shape[0] != s.n:
            raise ValueError("gram/subspace size mismatch")
        m = g.shape[1]
        if s.dim == 0:
            return Subspace.full(F, m)
        return Subspace.span(F, m, rref(F.matmul(s.basis, g), F).kernel)
    if g.shape[1] != s.n:
        raise ValueError("gram/subspace size mismatch")
    m = g.shape[0]
    if s.dim == 0:
        return Subspace.full(F, m)
    return Subspace.span(F, m, rref(F.matmul(s.basis, g.T), F).kernel)


def form_values(s: Subspace, gram: np.ndarray, t: Subspace | None = None) -> np.ndarray:
    t = s if t is None else t
    F = s.field
    return F.matmul(F.matmul(s.basis, gram), t.basis.T)


def is_isotropic(s: Subspace, gram: np.ndarray) -> bool:
    return not form_values(s, gram).any()


def is_lagrangian(s: Subspace, gram: np.ndarray) -> bool:
    if s.n % 2:
        raise ValueError("Lagrangian test needs an even-dimensional ambient space")
    return 2 * s.dim == s.n and is_isotropic(s, gram)


# ---------------------------------------------------------------- enumeration


def _pivot_row_slots(n: int, pivots: Sequence[int]) -> list[list[int]]:
    ps = set(pivots)
    return [[c for c in range(p + 1, n) if c not in ps] for p in pivots]


def echelon_matrices(n: int, k: int, F: GF, gram: np.ndarray | None = None) -> Iterator[np.ndarray]:
    """All k x n reduced echelon matrices over F, lexicographic by pivot set then entries.

    With gram, only those whose row span is isotropic (rows are built one at a
    time and pruned as soon as a pairing is nonzero).
    """
    if not 0 <= k <= n:
        return
    if k == 0:
        yield np.zeros((0, n), dtype=np.int64)
        return
    g = None if gram is None else np.asarray(gram, dtype=np.int64)
    for pivots in combinations(range(n), k):
        slots = _pivot_row_slots(n, pivots)
        mat = np.zeros((k, n), dtype=np.int64)
        for r, p in enumerate(pivots):
            mat[r, p] = 1
        yield from _fill_rows(mat, 0, slots, F, g)


def _fill_rows(mat, r, slots, F, g):
    k = mat.shape[0]
    if r == k:
        yield mat.copy()
        return
    cols = slots[r]
    for vals in product(range(F.q), repeat=len(cols)):
        if cols:
            mat[r, cols] = vals
        if g is not None:
            gr = F.matmul(mat[r : r + 1], g)
            if F.matmul(gr, mat[: r + 1].T).any():
                continue
        yield from _fill_rows(mat, r + 1, slots, F, g)
    if cols:
        mat[r, cols] = 0


def enumerate_subspaces(n: int, k: int, F: GF, gram: np.ndarray | None = None) -> Iterator[Subspace]:
    """Each k-dimensional subspace of F^n exactly once (isotropic ones only if gram is given)."""
    for mat in echelon_matrices(n, k, F, gram):
        piv = tuple(int(np.flatnonzero(row)[0]) for row in mat)
        yield Subspace(F, n, mat, piv)


def enumerate_between(
    lower: Subspace, upper: Subspace, k: int, gram: np.ndarray | None = None
) -> Iterator[Subspace]:
    """Subspaces X with lower <= X <= upper and dim X = k.

    With gram (alternating), only isotropic X; upper is cut down to lower-perp
    first and an anisotropic lower yields nothing.
    """
    F = lower.field
    if gram is not None:
        if not is_isotropic(lower, gram):
            return
        upper = upper & annihilator(lower, gram, "left")
    if not lower <= upper or not lower.dim <= k <= upper.dim:
        return
    comp = lower.complement_in(upper)
    gc = None
    if gram is not None:
        gc = F.matmul(F.matmul(comp, gram), comp.T)
    c = comp.shape[0]
    for ymat in echelon_matrices(c, k - lower.dim, F, gc):
        rows = F.matmul(ymat, comp) if ymat.shape[0] else np.zeros((0, lower.n), dtype=np.int64)
        yield Subspace.span(F, lower.n, np.vstack([lower.basis, rows]))


def lagrangians_meeting(D: Subspace, lower: Subspace, gram: np.ndarray) -> Iterator[Subspace]:
    """Lagrangians X containing lower with dim(X meet D) = dim D - 1, for Lagrangian D.

    Parametrized by U = X meet D (a hyperplane of D containing lower meet D) and a
    line in (U + lower)^perp / (U + lower).
    """
    F = D.field
    n = D.dim
    base = lower & D
    for U in enumerate_between(base, D, n - 1):
        B = U + lower
        if not is_isotropic(B, gram):
            continue
        if B.dim == n:
            if B != D and (B & D) == U:
                yield B
            continue
        for X in enumerate_between(B, Subspace.full(F, D.n), n, gram):
            if X != D:
                yield X


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def q_integer(n: int, q: int) -> int:
    return sum(q**t for t in range(n))
