"""F_q-points of quiver Grassmannians of K_R W and of their sigma-fixed loci.

The search fixes vertices one at a time, middle vertex first.  A new vertex u
adjacent to chosen vertices must contain the images of their spaces and lie in
the preimages of their spaces, so candidates are enumerated inside that
sandwich only.  In the sigma-fixed search the middle space is Lagrangian and
F(sigma u) is forced to be the annihilator of F(u).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

from .dynkin import DynkinData
from .kan import BigForm, QuiverRep, SubRepPoint, is_sigma_fixed, is_subrep, perp_space
from .linalg import Subspace, enumerate_between, enumerate_subspaces, preimage

Vec = tuple[int, ...]


@dataclass
class Stratum:
    v: Vec
    points: list[SubRepPoint]
    q: int
    kind: str = "L"  # "L" for the quiver Grassmannian, "R" for the fixed locus
    meta: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.points)


def vertex_order(dyn: DynkinData) -> list[int]:
    """Middle vertex first, then alternately outward, so every new vertex touches a chosen one."""
    order = [dyn.middle]
    for t in range(1, dyn.d):
        order += [dyn.middle - t, dyn.middle + t]
    return order


def sandwich(rep: QuiverRep, chosen: dict[int, Subspace], u: int) -> tuple[Subspace, Subspace]:
    F = rep.field
    lower = Subspace.zero(F, rep.dim(u))
    upper = Subspace.full(F, rep.dim(u))
    for k in rep.dynkin.neighbors(u):
        if k in chosen:
            lower = lower + chosen[k].image(rep.arrows[(k, u)])
            upper = upper & preimage(rep.arrows[(u, k)], chosen[k])
    return lower, upper


def _search_L(rep: QuiverRep, v: Vec, order: list[int], chosen: dict[int, Subspace]) -> Iterator[SubRepPoint]:
    if len(chosen) == len(order):
        yield SubRepPoint(tuple(chosen[i] for i in rep.dynkin.vertices))
        return
    u = order[len(chosen)]
    lower, upper = sandwich(rep, chosen, u)
    for s in enumerate_between(lower, upper, v[u - 1]):
        chosen[u] = s
        yield from _search_L(rep, v, order, chosen)
        del chosen[u]


def admissible(rep: QuiverRep, v: Sequence[int]) -> bool:
    return len(v) == rep.dynkin.rank and all(0 <= x <= rep.dim(i) for i, x in zip(rep.dynkin.vertices, v))


def _first_candidates(rep: QuiverRep, v: Vec, form: BigForm | None) -> list[Subspace]:
    m = rep.dynkin.middle
    F = rep.field
    gram = form.blocks[m] if form is not None else None
    return list(enumerate_subspaces(rep.dim(m), v[m - 1], F, gram))


def _L_from(rep: QuiverRep, v: Vec, firsts: Iterable[Subspace]) -> list[SubRepPoint]:
    order = vertex_order(rep.dynkin)
    out = []
    for s in firsts:
        out.extend(_search_L(rep, v, order, {order[0]: s}))
    return out


def r_precheck(rep: QuiverRep, v: Sequence[int]) -> bool:
    dyn = rep.dynkin
    return all(v[i - 1] + v[dyn.sigma(i) - 1] == rep.dim(i) for i in dyn.vertices)


def _search_R(rep: QuiverRep, form: BigForm, v: Vec, chosen: dict[int, Subspace]) -> Iterator[SubRepPoint]:
    dyn = rep.dynkin
    u = dyn.middle - (len(chosen) - 1) // 2 - 1  # next vertex left of the middle
    if u < 1:
        pt = SubRepPoint(tuple(chosen[i] for i in dyn.vertices))
        if not (is_subrep(rep, pt) and is_sigma_fixed(rep, form, pt)):
            raise AssertionError(f"sigma-fixed search produced an invalid point {pt}")
        yield pt
        return
    lower, upper = sandwich(rep, chosen, u)
    su = dyn.sigma(u)
    for s in enumerate_between(lower, upper, v[u - 1]):
        chosen[u] = s
        chosen[su] = perp_space(rep, form, s, u)
        # closure between sigma(u) and its chosen neighbour is the adjoint of the closure just imposed
        yield from _search_R(rep, form, v, chosen)
        del chosen[u], chosen[su]


def _R_from(rep: QuiverRep, form: BigForm, v: Vec, firsts: Iterable[Subspace]) -> list[SubRepPoint]:
    out = []
    for s in firsts:
        out.extend(_search_R(rep, form, v, {rep.dynkin.middle: s}))
    return out


def _chunks(xs: list, n: int) -> list[list]:
    return [xs[k::n] for k in range(n)]


def _run(args):
    kind, rep, form, v, firsts = args
    return _L_from(rep, v, firsts) if kind == "L" else _R_from(rep, form, v, firsts)


def _enumerate(kind: str, rep: QuiverRep, form: BigForm | None, v: Vec, jobs: int) -> list[SubRepPoint]:
    firsts = _first_candidates(rep, v, form if kind == "R" else None)
    if jobs <= 1 or len(firsts) < 2 * jobs:
        pts = _run((kind, rep, form, v, firsts))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = ex.map(_run, [(kind, rep, form, v, c) for c in _chunks(firsts, jobs)])
            pts = [p for part in parts for p in part]
    pts.sort()
    if len(set(pts)) != len(pts):
        raise AssertionError("duplicate points in enumeration")
    return pts


def enumerate_L(rep: QuiverRep, v: Sequence[int], jobs: int = 1) -> Stratum:
    v = tuple(int(x) for x in v)
    if not admissible(rep, v):
        return Stratum(v, [], rep.field.q, "L")
    return Stratum(v, _enumerate("L", rep, None, v, jobs), rep.field.q, "L")


def enumerate_R(rep: QuiverRep, form: BigForm, v: Sequence[int], jobs: int = 1) -> Stratum:
    v = tuple(int(x) for x in v)
    if not admissible(rep, v) or not r_precheck(rep, v):
        return Stratum(v, [], rep.field.q, "R")
    return Stratum(v, _enumerate("R", rep, form, v, jobs), rep.field.q, "R")


def dimension_vectors(rep: QuiverRep, kind: str = "L") -> list[Vec]:
    ranges = [range(rep.dim(i) + 1) for i in rep.dynkin.vertices]
    vs = [tuple(v) for v in product(*ranges)]
    if kind == "R":
        vs = [v for v in vs if r_precheck(rep, v)]
    return vs


def stratum_table(
    rep: QuiverRep, form: BigForm | None = None, v_range: Iterable[Sequence[int]] | None = None, jobs: int = 1
) -> list[tuple[Vec, int]]:
    kind = "R" if form is not None else "L"
    vs = dimension_vectors(rep, kind) if v_range is None else [tuple(v) for v in v_range]
    out = []
    for v in vs:
        st = enumerate_R(rep, form, v, jobs) if form is not None else enumerate_L(rep, v, jobs)
        out.append((v, st.count))
    return out


def all_strata(rep: QuiverRep, form: BigForm | None = None, jobs: int = 1) -> list[Stratum]:
    kind = "R" if form is not None else "L"
    out = []
    for v in dimension_vectors(rep, kind):
        st = enumerate_R(rep, form, v, jobs) if form is not None else enumerate_L(rep, v, jobs)
        if st.count:
            out.append(st)
    return out


def naive_enumerate(rep: QuiverRep, v: Sequence[int], form: BigForm | None = None) -> list[SubRepPoint]:
    """Oracle: every tuple of subspaces, filtered by closure (and sigma-fixedness)."""
    F = rep.field
    choices = [list(enumerate_subspaces(rep.dim(i), v[i - 1], F)) for i in rep.dynkin.vertices]
    out = []
    for combo in product(*choices):
        pt = SubRepPoint(tuple(combo))
        if is_subrep(rep, pt) and (form is None or is_sigma_fixed(rep, form, pt)):
            out.append(pt)
    out.sort()
    return out
