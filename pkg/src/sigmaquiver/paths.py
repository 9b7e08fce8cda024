"""Preprojective path category of the doubled A_{2d-1} quiver.

A path is a tuple of vertices (i, ..., j) with consecutive entries adjacent.
At each vertex k the relation  (k, k+1, k) - (k, k-1, k) = 0  holds (terms
leaving the diagram are dropped).  The quotient is computed degree by degree:
monomials of a fixed length and endpoints are ordered lexicographically
descending, the ideal is row reduced, and the non-pivot monomials (the
lexicographically least survivors) form the basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from .dynkin import DynkinData, build_dynkin
from .fields import QQ
from .linalg import q_inverse, rref

Path = tuple[int, ...]


@dataclass(frozen=True)
class FramedQuiver:
    dynkin: DynkinData

    @property
    def arrows(self) -> list[tuple[int, int]]:
        out = []
        for i in self.dynkin.vertices:
            out += [(i, j) for j in self.dynkin.neighbors(i)]
        # framing arrows i -> i' and back, written with negative labels for frame vertices
        out += [(i, -i) for i in self.dynkin.vertices] + [(-i, i) for i in self.dynkin.vertices]
        return out

    def sign(self, i: int, j: int) -> int:
        """Sign of the loop i -> j -> i in the relation at i."""
        if j == i + 1:
            return 1
        if j == i - 1:
            return -1
        raise ValueError(f"{i} -> {j} is not an unframed arrow")


def paths_between(dyn: DynkinData, i: int, j: int, length: int) -> list[Path]:
    n = dyn.rank
    out = []

    def walk(p):
        if len(p) == length + 1:
            if p[-1] == j:
                out.append(tuple(p))
            return
        rem = length + 1 - len(p)
        for nb in (p[-1] - 1, p[-1] + 1):
            if 1 <= nb <= n and abs(nb - j) <= rem - 1:
                walk(p + [nb])

    walk([i])
    return out


def relation_elements(dyn: DynkinData, i: int, j: int, length: int) -> list[dict[Path, int]]:
    """Spanning set of the degree-`length` part of the relation ideal from i to j."""
    fq = FramedQuiver(dyn)
    rels = []
    if length < 2:
        return rels
    for short in paths_between(dyn, i, j, length - 2):
        for t, k in enumerate(short):
            elem = {}
            for nb in dyn.neighbors(k):
                p = short[: t + 1] + (nb,) + short[t:]
                elem[p] = elem.get(p, 0) + fq.sign(k, nb)
            elem = {p: c for p, c in elem.items() if c}
            if elem:
                rels.append(elem)
    return rels


@dataclass
class HomSpaceTable:
    dynkin: DynkinData
    basis: dict[tuple[int, int], list[Path]]
    # normal form of every monomial of length <= 2d-2: path -> {basis index: coeff}
    normal: dict[Path, dict[int, int]] = field(repr=False)

    def dim(self, i: int, j: int) -> int:
        return len(self.basis[(i, j)])

    def index(self, p: Path) -> int:
        return self.basis[(p[0], p[-1])].index(p)

    def reduce(self, p: Path) -> dict[int, int]:
        """Coordinates of the class of monomial p in the basis of Q(p[0], p[-1])."""
        if len(p) - 1 > 2 * self.dynkin.d - 2:
            return {}
        return self.normal[tuple(p)]

    def reduce_vector(self, combo: dict[Path, int]) -> np.ndarray:
        i, j = next(iter(combo))[0], next(iter(combo))[-1]
        out = np.zeros(self.dim(i, j), dtype=np.int64)
        for p, c in combo.items():
            for a, x in self.reduce(p).items():
                out[a] += c * x
        return out

    def long_path(self, i: int) -> Path:
        """The unique basis path of length 2d-2 in Q(i, sigma(i))."""
        top = [p for p in self.basis[(i, self.dynkin.sigma(i))] if len(p) - 1 == 2 * self.dynkin.d - 2]
        if len(top) != 1:
            raise AssertionError(f"top degree of Q({i},{self.dynkin.sigma(i)}) has dimension {len(top)}")
        return top[0]

    def compose(self, p: dict[int, int] | Path, h: dict[int, int] | Path, i: int, j: int, k: int) -> dict[int, int]:
        """p in Q(i,j) after h in Q(k,i): the path h followed by p, as coordinates in Q(k,j)."""
        pv = {self.index(p): 1} if isinstance(p, tuple) else p
        hv = {self.index(h): 1} if isinstance(h, tuple) else h
        pb, hb = self.basis[(i, j)], self.basis[(k, i)]
        out: dict[int, int] = {}
        for a, x in pv.items():
            for b, y in hv.items():
                if pb[a][0] != i or hb[b][-1] != i:
                    raise ValueError("endpoint mismatch")
                for c, z in self.reduce(hb[b] + pb[a][1:]).items():
                    out[c] = out.get(c, 0) + x * y * z
        return {c: v for c, v in sorted(out.items()) if v}

    def to_json(self) -> dict:
        return {
            "d": self.dynkin.d,
            "basis": {f"{i},{j}": [list(p) for p in b] for (i, j), b in sorted(self.basis.items())},
            "long_path": {str(i): list(self.long_path(i)) for i in self.dynkin.vertices},
            "normal_forms": {
                ",".join(map(str, p)): {str(a): c for a, c in sorted(nf.items())}
                for p, nf in sorted(self.normal.items(), key=lambda kv: (len(kv[0]), kv[0]))
            },
        }


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise AssertionError(f"non-integral structure constant {x}")
    return int(x)


def build_hom_table(d_or_dyn: int | DynkinData) -> HomSpaceTable:
    dyn = d_or_dyn if isinstance(d_or_dyn, DynkinData) else build_dynkin(d_or_dyn)
    top = 2 * dyn.d - 2
    basis: dict[tuple[int, int], list[Path]] = {}
    normal: dict[Path, dict[int, int]] = {}
    pending: dict[tuple[int, int], list[tuple[Path, list[tuple[Path, Fraction]]]]] = {}
    for i, j in product(dyn.vertices, repeat=2):
        basis[(i, j)] = []
        pending[(i, j)] = []
        for length in range(top + 2):
            monos = sorted(paths_between(dyn, i, j, length), reverse=True)
            if not monos:
                continue
            col = {p: c for c, p in enumerate(monos)}
            rels = relation_elements(dyn, i, j, length)
            if rels:
                mat = [[0] * len(monos) for _ in rels]
                for r, elem in enumerate(rels):
                    for p, c in elem.items():
                        mat[r][col[p]] = c
                ech = rref(mat, QQ)
                R, piv = ech.echelon, ech.pivots
            else:
                R, piv = np.zeros((0, len(monos)), dtype=object), ()
            survivors = [p for c, p in enumerate(monos) if c not in piv]
            if length == top + 1:
                if survivors:
                    raise AssertionError(
                        f"paths {survivors} of length {length} survive: relation signs are inconsistent"
                    )
                continue
            survivors.sort()
            basis[(i, j)].extend(survivors)
            for t, pc in enumerate(piv):
                combo = [(monos[c], -R[t][c]) for c in range(len(monos)) if c not in piv and R[t][c] != 0]
                pending[(i, j)].append((monos[pc], combo))
    for key, b in basis.items():
        idx = {p: a for a, p in enumerate(b)}
        for p in b:
            normal[p] = {idx[p]: 1}
        for p, combo in pending[key]:
            nf: dict[int, int] = {}
            for s, c in combo:
                nf[idx[s]] = nf.get(idx[s], 0) + _as_int(c)
            normal[p] = {a: c for a, c in sorted(nf.items()) if c}
    return HomSpaceTable(dyn, basis, normal)


def sigma_path(dyn: DynkinData, p: Path) -> Path:
    return tuple(dyn.sigma(x) for x in p)


@dataclass
class PairingTable:
    dynkin: DynkinData
    B: dict[tuple[int, int], np.ndarray]

    @cached_property
    def inverse_transpose(self) -> dict[tuple[int, int], np.ndarray]:
        return {k: q_inverse(m).T.copy() for k, m in self.B.items()}


def pairing_value(table: HomSpaceTable, i: int, j: int, p: Path, q: Path) -> int:
    """Coefficient of the long path of Q(j, sigma j) in the class of (reverse p) then (sigma q)."""
    dyn = table.dynkin
    longest = table.index(table.long_path(j))
    composite = tuple(reversed(p)) + sigma_path(dyn, q)[1:]
    return table.reduce(composite).get(longest, 0)


def build_pairing(table: HomSpaceTable) -> PairingTable:
    dyn = table.dynkin
    B = {}
    for i, j in product(dyn.vertices, repeat=2):
        left, right = table.basis[(i, j)], table.basis[(dyn.sigma(i), j)]
        m = np.array([[pairing_value(table, i, j, p, q) for q in right] for p in left], dtype=object)
        m = m.reshape(len(left), len(right))
        if m.shape[0] != m.shape[1] or rref(m, QQ).rank != m.shape[0]:
            raise AssertionError(f"pairing B[{i},{j}] is degenerate")
        B[(i, j)] = m
    return PairingTable(dyn, B)


def dump_paths_json(table: HomSpaceTable, pairing: PairingTable | None = None) -> str:
    out = table.to_json()
    if pairing is not None:
        out["pairing"] = {f"{i},{j}": [[int(x) for x in row] for row in m] for (i, j), m in sorted(pairing.B.items())}
    return json.dumps(out, indent=1, sort_keys=True)
