"""The complex C_i(F), Hecke and iota-Hecke fibers, the wreath gluing and I(F).

The degree-0 differential of C_i(F) is taken to vanish on the W(i) summand, so
H^1 = F(i) / I(F) where I(F) is the sum of images of the neighbouring spaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynkin import weight_of
from .kan import BigForm, QuiverRep, SubRepPoint, is_sigma_fixed, is_subrep, perp, perp_space
from .linalg import Subspace, enumerate_between, lagrangians_meeting, preimage, rank


@dataclass(frozen=True)
class ComplexData:
    i: int
    d_minus: np.ndarray  # rows: basis of F(i); columns: W(i) then F(k) coordinates
    d_zero: np.ndarray  # rows: W(i) then F(k) coordinates; columns: F(i) coordinates
    h_dims: tuple[int, int, int]

    @property
    def phi(self) -> int:
        return self.h_dims[1]

    @property
    def eps(self) -> int:
        return self.h_dims[2]


def _coords(s: Subspace, rows: np.ndarray) -> np.ndarray:
    """Coordinates of rows (assumed inside s) in the echelon basis of s."""
    if not s.contains(rows):
        raise AssertionError("vectors are not inside the subspace")
    return np.asarray(rows, dtype=np.int64)[:, list(s.pivots)]


def complex_ci(rep: QuiverRep, pt: SubRepPoint, i: int) -> ComplexData:
    F = rep.field
    dyn = rep.dynkin
    nbrs = dyn.neighbors(i)
    Fi = pt.at(i)
    w_i = rep.frame.dims[i - 1]
    # d_minus: x |-> (eval x, h(x) for h: i -> k)
    blocks = [F.matmul(Fi.basis, rep.evals[i]) if Fi.dim else np.zeros((0, w_i), dtype=np.int64)]
    for k in nbrs:
        img = F.matmul(Fi.basis, rep.arrows[(i, k)]) if Fi.dim else np.zeros((0, rep.dim(k)), dtype=np.int64)
        blocks.append(_coords(pt.at(k), img) if Fi.dim else np.zeros((0, pt.at(k).dim), dtype=np.int64))
    d_minus = np.concatenate(blocks, axis=1)
    # d_zero: zero on W(i); sign(i,k) * h-bar on F(k)
    rows = [np.zeros((w_i, Fi.dim), dtype=np.int64)]
    for k in nbrs:
        Fk = pt.at(k)
        s = 1 if k == i + 1 else -1
        if Fk.dim:
            img = F.matmul(Fk.basis, rep.arrows[(k, i)])
            c = _coords(Fi, img)
            rows.append(c if s == 1 else F.neg(c))
        else:
            rows.append(np.zeros((0, Fi.dim), dtype=np.int64))
    d_zero = np.concatenate(rows, axis=0)
    if d_minus.size and d_zero.size and F.matmul(d_minus, d_zero).any():
        raise AssertionError(f"d_zero . d_minus != 0 at vertex {i}")
    r_minus = rank(d_minus, F) if d_minus.size else 0
    r_zero = rank(d_zero, F) if d_zero.size else 0
    middle = d_minus.shape[1]
    h_m1 = Fi.dim - r_minus
    h0 = middle - r_zero - r_minus
    h1 = Fi.dim - r_zero
    if h_m1:
        raise AssertionError(f"H^-1 of C_{i} is nonzero: the point is not stable")
    return ComplexData(i, d_minus, d_zero, (h_m1, h0, h1))


def phi_eps(rep: QuiverRep, pt: SubRepPoint, i: int) -> tuple[int, int]:
    c = complex_ci(rep, pt, i)
    return c.phi, c.eps


def script_i(rep: QuiverRep, pt: SubRepPoint, i: int) -> Subspace:
    """I(F): the sum of images h(F(k)) over arrows h: k -> i."""
    out = Subspace.zero(rep.field, rep.dim(i))
    for k in rep.dynkin.neighbors(i):
        out = out + pt.at(k).image(rep.arrows[(k, i)])
    return out


def upper_bound(rep: QuiverRep, pt: SubRepPoint, i: int) -> Subspace:
    """Largest X in K(i) with h(X) inside F(k) for every arrow h: i -> k."""
    out = Subspace.full(rep.field, rep.dim(i))
    for k in rep.dynkin.neighbors(i):
        out = out & preimage(rep.arrows[(i, k)], pt.at(k))
    return out


def hecke_fiber(rep: QuiverRep, pt: SubRepPoint, i: int, direction: str) -> list[SubRepPoint]:
    """up: subreps F' containing F with dim F'/F = e_i; down: F' inside F with dim F/F' = e_i."""
    Fi = pt.at(i)
    if direction == "up":
        cands = enumerate_between(Fi, upper_bound(rep, pt, i), Fi.dim + 1)
    elif direction == "down":
        cands = enumerate_between(script_i(rep, pt, i), Fi, Fi.dim - 1)
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    out = []
    for X in cands:
        g = pt.with_spaces({i: X})
        if not is_subrep(rep, g):
            raise AssertionError("sandwich candidate is not a subrepresentation")
        out.append(g)
    return out


def wr(f: SubRepPoint, g: SubRepPoint, i: int, sigma_i: int, mode: str = "low") -> SubRepPoint:
    """Intersection at i and sum at sigma(i) ("low"); "up" swaps the roles of i and sigma(i)."""
    if sigma_i == i:
        raise ValueError("gluing needs a vertex that is not sigma-fixed")
    if mode == "up":
        i, sigma_i = sigma_i, i
    elif mode != "low":
        raise ValueError(f"mode must be 'low' or 'up', got {mode!r}")
    for k, (a, b) in enumerate(zip(f.spaces, g.spaces), start=1):
        if k not in (i, sigma_i) and a != b:
            raise ValueError(f"points differ at vertex {k}, outside {{{i}, {sigma_i}}}")
    return f.with_spaces({i: f.at(i) & g.at(i), sigma_i: f.at(sigma_i) + g.at(sigma_i)})


def in_iota_corr(f1: SubRepPoint, f2: SubRepPoint, i: int, sigma_i: int) -> bool:
    """(f1, f2) in B_i: dim f1/(f1 meet f2) = e_sigma(i) and dim f2/(f1 meet f2) = e_i."""
    for k, (a, b) in enumerate(zip(f1.spaces, f2.spaces), start=1):
        m = (a & b).dim
        want1 = 1 if k == sigma_i else 0
        want2 = 1 if k == i else 0
        if a.dim - m != want1 or b.dim - m != want2:
            return False
    return True


def iota_fiber(
    rep: QuiverRep, form: BigForm, pt: SubRepPoint, i: int, direction: int, closed: bool = False, check: bool = True
) -> list[SubRepPoint]:
    """Partners G of a sigma-fixed point: (pt, G) in B_i for direction 1, (G, pt) in B_i for direction 2.

    sigma(i) != i: shrink pt at one vertex to a hyperplane containing I and glue
    with the annihilator.  sigma(i) = i: replace the Lagrangian F(i) by another
    Lagrangian meeting it in codimension one and containing I(F).  With closed,
    the point itself is appended when sigma(i) = i.
    """
    dyn = rep.dynkin
    if check and not is_sigma_fixed(rep, form, pt):
        raise ValueError("iota fibers are defined on sigma-fixed points only")
    if direction not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    si = dyn.sigma(i)
    out = []
    if si != i:
        # direction 2 at i shrinks F(i); direction 1 at i is direction 2 at sigma(i)
        a = i if direction == 2 else si
        sa = dyn.sigma(a)
        Fa = pt.at(a)
        for H in enumerate_between(script_i(rep, pt, a), Fa, Fa.dim - 1):
            g = pt.with_spaces({a: H, sa: perp_space(rep, form, H, a)})
            if check and not (is_subrep(rep, g) and is_sigma_fixed(rep, form, g)):
                raise AssertionError("glued point is not sigma-fixed")
            out.append(g)
    else:
        Fi = pt.at(i)
        for X in lagrangians_meeting(Fi, script_i(rep, pt, i), form.blocks[i]):
            g = pt.with_spaces({i: X})
            if check and not is_subrep(rep, g):
                raise AssertionError("Lagrangian replacement is not a subrepresentation")
            out.append(g)
        if closed:
            out.append(pt)
    out.sort()
    return out


def weight(rep: QuiverRep, pt: SubRepPoint) -> tuple[int, ...]:
    return weight_of(rep.dynkin, rep.frame.dims, pt.dims)


def duality_holds(rep: QuiverRep, form: BigForm, pt: SubRepPoint) -> bool:
    """eps_i(F) = phi_sigma(i)(F^perp) and phi_i(F) = eps_sigma(i)(F^perp) at every vertex."""
    dual = perp(rep, form, pt)
    for i in rep.dynkin.vertices:
        p, e = phi_eps(rep, pt, i)
        pd, ed = phi_eps(rep, dual, rep.dynkin.sigma(i))
        if e != pd or p != ed:
            return False
    return True
