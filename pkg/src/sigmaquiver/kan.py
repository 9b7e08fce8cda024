"""The universal framed representation K_R W, its symplectic form and F -> F^perp.

Coordinates of K(i) = (+)_j Hom(Q(i,j), W(j)) are labelled (j, a, e): the value
of the j-th component on the a-th basis path of Q(i,j), in frame coordinate e.
Arrow matrices act on row vectors (x |-> x @ A), so an arrow h: i -> k has a
matrix of shape (dim K(i), dim K(k)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .dynkin import DynkinData, kan_dim
from .fields import GF, QQ, get_field, reduce_matrix
from .linalg import Subspace, annihilator, rank, standard_symplectic
from .paths import HomSpaceTable, PairingTable, build_hom_table, build_pairing

Label = tuple[int, int, int]


@dataclass(frozen=True)
class FrameData:
    dims: tuple[int, ...]
    sigma_mode: bool = False
    forms: dict[int, np.ndarray] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if any(x < 0 for x in self.dims):
            raise ValueError(f"frame dimensions must be nonnegative: {self.dims}")
        if self.sigma_mode:
            odd = [i + 1 for i, x in enumerate(self.dims) if x % 2]
            if odd:
                raise ValueError(f"symplectic frame needs even w_i, odd at vertices {odd}")
            for i, x in enumerate(self.dims, start=1):
                if x and i not in self.forms:
                    self.forms[i] = standard_symplectic(x)
            for i, g in self.forms.items():
                g = np.asarray(g)
                if g.shape != (self.dims[i - 1],) * 2 or not np.array_equal(g, -g.T):
                    raise ValueError(f"form at vertex {i} is not an antisymmetric {self.dims[i - 1]}-square matrix")
                if rank(g.tolist(), QQ) != g.shape[0]:
                    raise ValueError(f"form at vertex {i} is degenerate")


@dataclass
class QuiverRep:
    dynkin: DynkinData
    frame: FrameData
    vertex_dims: tuple[int, ...]
    arrows: dict[tuple[int, int], np.ndarray]
    evals: dict[int, np.ndarray]
    labels: dict[int, list[Label]]
    field: object = QQ
    relation_checked: bool = False

    def dim(self, i: int) -> int:
        return self.vertex_dims[i - 1]

    def over(self, q: int | GF) -> "QuiverRep":
        """Reduction to GF(q); integer data embed in any extension of the prime field."""
        F = q if isinstance(q, GF) else get_field(q)
        if self.field != QQ:
            if self.field.p != F.p:
                raise ValueError("cannot move between characteristics")
            return QuiverRep(self.dynkin, self.frame, self.vertex_dims, self.arrows, self.evals, self.labels, F, True)
        arrows = {h: _ro(reduce_matrix(m, F)) for h, m in self.arrows.items()}
        evals = {i: _ro(reduce_matrix(m, F)) for i, m in self.evals.items()}
        return QuiverRep(self.dynkin, self.frame, self.vertex_dims, arrows, evals, self.labels, F, True)

    def to_json(self) -> dict:
        return {
            "d": self.dynkin.d,
            "w": list(self.frame.dims),
            "vertex_dims": list(self.vertex_dims),
            "labels": {str(i): [list(x) for x in lab] for i, lab in sorted(self.labels.items())},
            "arrows": {f"{a}->{b}": _jmat(m) for (a, b), m in sorted(self.arrows.items())},
            "evals": {str(i): _jmat(m) for i, m in sorted(self.evals.items())},
        }


def _ro(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    m.setflags(write=False)
    return m


def _jmat(m) -> list:
    return [[int(x) if Fraction(x).denominator == 1 else str(Fraction(x)) for x in row] for row in np.asarray(m)]


def _labels(dyn: DynkinData, table: HomSpaceTable, w: Sequence[int], i: int) -> list[Label]:
    return [(j, a, e) for j in dyn.vertices for a in range(table.dim(i, j)) for e in range(w[j - 1])]


def build_kan(frame: FrameData, table: HomSpaceTable | None = None, dyn: DynkinData | None = None) -> QuiverRep:
    """K_R W over Q with integer matrices."""
    if table is None:
        from .dynkin import build_dynkin

        if dyn is None:
            dyn = build_dynkin((len(frame.dims) + 1) // 2)
        table = build_hom_table(dyn)
    dyn = table.dynkin
    w = frame.dims
    if len(w) != dyn.rank:
        raise ValueError(f"frame vector {w} does not match rank {dyn.rank}")
    labels = {i: _labels(dyn, table, w, i) for i in dyn.vertices}
    pos = {i: {lab: t for t, lab in enumerate(labels[i])} for i in dyn.vertices}
    arrows = {}
    for i in dyn.vertices:
        for k in dyn.neighbors(i):
            A = np.zeros((len(labels[i]), len(labels[k])), dtype=np.int64)
            for j in dyn.vertices:
                if not w[j - 1]:
                    continue
                for b, path in enumerate(table.basis[(k, j)]):
                    for a, c in table.reduce((i,) + path).items():
                        for e in range(w[j - 1]):
                            A[pos[i][(j, a, e)], pos[k][(j, b, e)]] = c
            arrows[(i, k)] = _ro(A)
    evals = {}
    for i in dyn.vertices:
        E = np.zeros((len(labels[i]), w[i - 1]), dtype=np.int64)
        if w[i - 1]:
            triv = table.index((i,))
            for e in range(w[i - 1]):
                E[pos[i][(i, triv, e)], e] = 1
        evals[i] = _ro(E)
    dims = tuple(len(labels[i]) for i in dyn.vertices)
    if dims != kan_dim(dyn, w):
        raise AssertionError(f"K_R W has dimensions {dims}, expected {kan_dim(dyn, w)}")
    rep = QuiverRep(dyn, frame, dims, arrows, evals, labels)
    check_relations(rep)
    rep.relation_checked = True
    return rep


def relation_sum(rep: QuiverRep, i: int) -> np.ndarray:
    """sum over arrows h: i -> k of sign * (h then h-bar), as an endomorphism of K(i)."""
    n = rep.dim(i)
    total = np.zeros((n, n), dtype=np.int64)
    for k in rep.dynkin.neighbors(i):
        s = 1 if k == i + 1 else -1
        total = total + s * (rep.arrows[(i, k)].astype(np.int64) @ rep.arrows[(k, i)].astype(np.int64))
    return total


def check_relations(rep: QuiverRep) -> None:
    for i in rep.dynkin.vertices:
        t = relation_sum(rep, i)
        if rep.field != QQ:
            t = t % rep.field.p
        if t.any():
            raise AssertionError(f"preprojective relation fails at vertex {i}")


# ---------------------------------------------------------------- symplectic form


@dataclass
class BigForm:
    """Blocks G[i] of shape (dim K(i), dim K(sigma i)); omega(x, y) = x G[i] y^T."""

    blocks: dict[int, np.ndarray]
    field: object = QQ

    def over(self, F: GF) -> "BigForm":
        if self.field != QQ:
            return BigForm(self.blocks, F)
        return BigForm({i: _ro(reduce_matrix(g, F)) for i, g in self.blocks.items()}, F)


def build_big_form(rep: QuiverRep, pairing: PairingTable | None = None, table: HomSpaceTable | None = None) -> BigForm:
    """omega(p (x) x, q (x) y) = (B_ij^{-T})[p, q] * omega_W(x, y), checked constructively."""
    frame, dyn = rep.frame, rep.dynkin
    if not frame.sigma_mode:
        raise ValueError("symplectic form needs a sigma-mode frame")
    if pairing is None:
        pairing = build_pairing(table or build_hom_table(dyn))
    blocks = {}
    for i in dyn.vertices:
        si = dyn.sigma(i)
        li, ls = rep.labels[i], rep.labels[si]
        G = np.zeros((len(li), len(ls)), dtype=object)
        pos = {lab: t for t, lab in enumerate(ls)}
        for r, (j, a, e) in enumerate(li):
            Bt = pairing.inverse_transpose[(i, j)]
            om = frame.forms[j]
            for b in range(Bt.shape[1]):
                for f in range(frame.dims[j - 1]):
                    val = Fraction(Bt[a, b]) * int(om[e, f])
                    if val:
                        G[r, pos[(j, b, f)]] = val
        blocks[i] = G
    blocks = {i: _integral(g) for i, g in blocks.items()}
    check_big_form(rep, blocks)
    return BigForm(blocks)


def _integral(g) -> np.ndarray:
    g = np.asarray(g, dtype=object)
    out = np.zeros(g.shape, dtype=np.int64)
    for idx, x in np.ndenumerate(g):
        x = Fraction(x)
        if x.denominator != 1:
            raise AssertionError("big form has non-integral entries")
        out[idx] = int(x)
    return _ro(out)


def check_big_form(rep: QuiverRep, blocks: dict[int, np.ndarray]) -> None:
    dyn = rep.dynkin
    for i in dyn.vertices:
        si = dyn.sigma(i)
        if not np.array_equal(blocks[si], -blocks[i].T):
            raise AssertionError(f"big form is not antisymmetric between {i} and {si}")
        if blocks[i].shape[0] and rank(blocks[i].tolist(), QQ) != blocks[i].shape[0]:
            raise AssertionError(f"big form block {i} is degenerate")
    for (i, k), A in rep.arrows.items():
        # omega(h x, y) = omega(x, sigma(h-bar) y) for h: i -> k, x in K(i), y in K(sigma k)
        sh = rep.arrows[(dyn.sigma(k), dyn.sigma(i))]
        lhs = A.astype(np.int64) @ blocks[k]
        rhs = blocks[i] @ sh.T.astype(np.int64)
        if not np.array_equal(lhs, rhs):
            raise AssertionError(f"arrow {i}->{k} is not adjoint to its sigma-reverse")


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class SubRepPoint:
    spaces: tuple[Subspace, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def at(self, i: int) -> Subspace:
        return self.spaces[i - 1]

    def sort_key(self) -> tuple:
        return tuple((s.dim, s.pivots, s.basis.tobytes()) for s in self.spaces)

    def __lt__(self, other: "SubRepPoint") -> bool:
        return self.sort_key() < other.sort_key()

    def with_spaces(self, changes: dict[int, Subspace]) -> "SubRepPoint":
        sp = list(self.spaces)
        for i, s in changes.items():
            sp[i - 1] = s
        return SubRepPoint(tuple(sp))

    def __add__(self, other: "SubRepPoint") -> "SubRepPoint":
        return SubRepPoint(tuple(a + b for a, b in zip(self.spaces, other.spaces)))

    def __and__(self, other: "SubRepPoint") -> "SubRepPoint":
        return SubRepPoint(tuple(a & b for a, b in zip(self.spaces, other.spaces)))

    def __le__(self, other: "SubRepPoint") -> bool:
        return all(a <= b for a, b in zip(self.spaces, other.spaces))

    def to_json(self) -> list:
        return [[[int(x) for x in row] for row in s.basis] for s in self.spaces]


def zero_point(rep: QuiverRep) -> SubRepPoint:
    return SubRepPoint(tuple(Subspace.zero(rep.field, rep.dim(i)) for i in rep.dynkin.vertices))


def full_point(rep: QuiverRep) -> SubRepPoint:
    return SubRepPoint(tuple(Subspace.full(rep.field, rep.dim(i)) for i in rep.dynkin.vertices))


def arrow_closed(rep: QuiverRep, src: Subspace, tgt: Subspace, i: int, k: int) -> bool:
    if src.dim == 0:
        return True
    return tgt.contains(rep.field.matmul(src.basis, rep.arrows[(i, k)]))


def is_subrep(rep: QuiverRep, pt: SubRepPoint) -> bool:
    for (i, k) in rep.arrows:
        if not arrow_closed(rep, pt.at(i), pt.at(k), i, k):
            return False
    return True


def perp(rep: QuiverRep, form: BigForm, pt: SubRepPoint) -> SubRepPoint:
    dyn = rep.dynkin
    return SubRepPoint(
        tuple(annihilator(pt.at(dyn.sigma(i)), form.blocks[i], side="right") for i in dyn.vertices)
    )


def perp_space(rep: QuiverRep, form: BigForm, s: Subspace, i: int) -> Subspace:
    """Annihilator in K(sigma i) of a subspace s of K(i)."""
    return annihilator(s, form.blocks[i], side="left")


def is_sigma_fixed(rep: QuiverRep, form: BigForm, pt: SubRepPoint) -> bool:
    return perp(rep, form, pt) == pt


def evaluation_kernel_trivial(rep: QuiverRep, pt: SubRepPoint, i: int) -> bool:
    """No nonzero x in F(i) is killed by eval and by every outgoing arrow."""
    s = pt.at(i)
    if s.dim == 0:
        return True
    F = rep.field
    cols = [rep.evals[i]] + [rep.arrows[(i, k)] for k in rep.dynkin.neighbors(i)]
    big = np.concatenate([np.asarray(c, dtype=np.int64) for c in cols], axis=1)
    return rank(F.matmul(s.basis, big), F) == s.dim


@dataclass
class Instance:
    """Everything needed to work over one field: the representation and (optionally) the form."""

    dynkin: DynkinData
    frame: FrameData
    table: HomSpaceTable
    rep_q: QuiverRep
    form_q: BigForm | None

    @cached_property
    def _cache(self) -> dict:
        return {}

    def over(self, q: int) -> tuple[QuiverRep, BigForm | None]:
        F = get_field(q)
        if F not in self._cache:
            self._cache[F] = (self.rep_q.over(F), self.form_q.over(F) if self.form_q else None)
        return self._cache[F]


def build_instance(d: int, w: Sequence[int], sigma_mode: bool) -> Instance:
    from .dynkin import build_dynkin

    dyn = build_dynkin(d)
    table = build_hom_table(dyn)
    frame = FrameData(tuple(int(x) for x in w), sigma_mode)
    rep = build_kan(frame, table)
    form = build_big_form(rep, build_pairing(table)) if sigma_mode else None
    return Instance(dyn, frame, table, rep, form)


def dump_kan_json(inst: Instance) -> str:
    out = inst.rep_q.to_json()
    if inst.form_q is not None:
        out["form_blocks"] = {str(i): _jmat(g) for i, g in sorted(inst.form_q.blocks.items())}
    return json.dumps(out, indent=1, sort_keys=True)
