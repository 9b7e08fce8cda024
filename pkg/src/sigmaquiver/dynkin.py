"""Root datum of type A_{2d-1} with the diagram involution i -> 2d - i."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

Vec = tuple[int, ...]


@dataclass(frozen=True)
class DynkinData:
    d: int
    cartan: np.ndarray = field(repr=False, compare=False)

    @property
    def rank(self) -> int:
        return 2 * self.d - 1

    @property
    def vertices(self) -> range:
        return range(1, self.rank + 1)

    def sigma(self, i: int) -> int:
        return 2 * self.d - i

    def c(self, i: int, j: int) -> int:
        return int(self.cartan[i - 1, j - 1])

    def neighbors(self, i: int) -> list[int]:
        return [j for j in (i - 1, i + 1) if 1 <= j <= self.rank]

    def is_fixed(self, i: int) -> bool:
        return self.sigma(i) == i

    @property
    def middle(self) -> int:
        return self.d

    def unit(self, i: int) -> Vec:
        return tuple(int(k == i) for k in self.vertices)

    @cached_property
    def cartan_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        # type A: (C^-1)_{ij} = min(i,j) (n+1-max(i,j)) / (n+1)
        n = self.rank
        return tuple(
            tuple(Fraction(min(i, j) * (n + 1 - max(i, j)), n + 1) for j in range(1, n + 1))
            for i in range(1, n + 1)
        )

    def __hash__(self) -> int:
        return hash(("A", self.d))


def build_dynkin(d: int) -> DynkinData:
    if d < 1:
        raise ValueError(f"half-rank d must be positive, got {d}")
    n = 2 * d - 1
    cartan = 2 * np.eye(n, dtype=np.int64)
    for i in range(n - 1):
        cartan[i, i + 1] = cartan[i + 1, i] = -1
    cartan.setflags(write=False)
    return DynkinData(d, cartan)


def _check(dyn: DynkinData, *vs: Sequence[int]) -> None:
    for v in vs:
        if len(v) != dyn.rank:
            raise ValueError(f"vector {tuple(v)} has length {len(v)}, expected {dyn.rank}")


def weight_of(dyn: DynkinData, w: Sequence[int], v: Sequence[int]) -> Vec:
    """w - C v."""
    _check(dyn, w, v)
    cv = dyn.cartan @ np.asarray(v, dtype=np.int64)
    return tuple(int(a - b) for a, b in zip(w, cv))


def sigma_vec(dyn: DynkinData, x: Sequence[int]) -> Vec:
    _check(dyn, x)
    return tuple(int(x[dyn.sigma(i) - 1]) for i in dyn.vertices)


def kan_dim(dyn: DynkinData, w: Sequence[int]) -> Vec:
    """Dimension vector of K_R W restricted to the unframed part.

    Solves C v' = w + sigma(w), i.e. w - C v' = w0(w) = -sigma(w).
    """
    _check(dyn, w)
    rhs = [a + b for a, b in zip(w, sigma_vec(dyn, w))]
    out = []
    for row in dyn.cartan_inverse:
        x = sum(c * r for c, r in zip(row, rhs))
        if x.denominator != 1 or x < 0:
            raise ArithmeticError(f"C^-1(w + sigma w) = {x} is not a nonnegative integer for w={tuple(w)}")
        out.append(int(x))
    return tuple(out)


def add(x: Sequence[int], y: Sequence[int]) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Sequence[int], y: Sequence[int]) -> Vec:
    return tuple(a - b for a, b in zip(x, y))
