"""Tensor-space (Potts) representation of ramified partition algebras.

A site carries one colour per level; level t has ``q[t]`` colours.  States
are indexed big-endian: site 1 is the most significant digit and, within a
site, level 1 is more significant than level 2.  With this ordering the
operator of a site-local diagram is literally ``np.kron`` of its site
factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import setpart as sp
from .algebra import AlgebraElement
from .errors import CapExceededError, ValidationError
from .ramified import RamifiedPartition, compose_ramified, make_ramified
from .rings import MultiPoly

DIM_CAP = 10 ** 6


@dataclass(frozen=True)
class ColorSpace:
    n: int
    q: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("n must be >= 0")
        if not self.q or any(not isinstance(x, int) or x < 1 for x in self.q):
            raise ValidationError(f"colour counts must be positive integers, got {self.q!r}")

    @property
    def site_dim(self) -> int:
        return prod(self.q)

    @property
    def dim(self) -> int:
        return self.site_dim ** self.n

    def level_weights(self) -> np.ndarray:
        """weights[i, t]: index stride of the level-t colour at site i."""
        d = len(self.q)
        inner = [prod(self.q[t + 1:]) for t in range(d)]
        return np.array([[self.site_dim ** (self.n - 1 - i) * inner[t] for t in range(d)]
                         for i in range(self.n)], dtype=np.int64).reshape(self.n, d)

    def index(self, coloring: Sequence[Sequence[int]]) -> int:
        """coloring[i][t] in range(q[t]) -> state index."""
        if len(coloring) != self.n:
            raise ValidationError(f"expected {self.n} sites")
        w = self.level_weights()
        out = 0
        for i, cs in enumerate(coloring):
            for t, c in enumerate(cs):
                if not 0 <= c < self.q[t]:
                    raise ValidationError(f"colour {c} out of range at site {i + 1}, level {t + 1}")
                out += c * int(w[i, t])
        return out

    def coloring(self, index: int) -> tuple[tuple[int, ...], ...]:
        if not 0 <= index < self.dim:
            raise ValidationError(f"state {index} out of range")
        out = []
        for i in range(self.n):
            site, index = divmod(index, self.site_dim ** (self.n - 1 - i))
            cs = []
            for t in range(len(self.q)):
                c, site = divmod(site, prod(self.q[t + 1:]))
                cs.append(c)
            out.append(tuple(cs))
        return tuple(out)


class SparseOperator:
    """Square matrix with exact rational entries, stored as {(row, col): value}."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries: Mapping[tuple[int, int], object] | None = None):
        self.dim = dim
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < dim and 0 <= c < dim):
                raise ValidationError(f"entry ({r}, {c}) outside a {dim}x{dim} operator")
            if v:
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def identity(cls, dim: int) -> "SparseOperator":
        return cls(dim, {(i, i): 1 for i in range(dim)})

    @classmethod
    def from_dense(cls, A) -> "SparseOperator":
        A = np.asarray(A)
        rows, cols = np.nonzero(A)
        return cls(A.shape[0], {(int(r), int(c)): _exact(A[r, c]) for r, c in zip(rows, cols)})

    def __eq__(self, other):
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __repr__(self):
        return f"SparseOperator(dim={self.dim}, nnz={len(self.entries)})"

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def _is_integral(self) -> bool:
        return all(isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)
                   for v in self.entries.values())

    def to_dense(self) -> np.ndarray:
        """int64 array when entries are small integers, object array otherwise."""
        vals = list(self.entries.values())
        small = self._is_integral() and all(abs(int(v)) < 2 ** 62 for v in vals)
        A = np.zeros((self.dim, self.dim), dtype=np.int64 if small else object)
        for (r, c), v in self.entries.items():
            A[r, c] = int(v) if small else v
        return A

    def transpose(self) -> "SparseOperator":
        return SparseOperator(self.dim, {(c, r): v for (r, c), v in self.entries.items()})

    def scale(self, c) -> "SparseOperator":
        return SparseOperator(self.dim, {k: v * c for k, v in self.entries.items()})

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseOperator(self.dim, out)

    def _check(self, other):
        if not isinstance(other, SparseOperator) or other.dim != self.dim:
            raise ValidationError("operator dimension mismatch")

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check(other)
        if self._is_integral() and other._is_integral():
            ma = max((abs(int(v)) for v in self.entries.values()), default=0)
            mb = max((abs(int(v)) for v in other.entries.values()), default=0)
            if ma * mb * self.dim < 2 ** 62:
                return SparseOperator.from_dense(self.to_dense() @ other.to_dense())
        rows: dict[int, list[tuple[int, object]]] = {}
        for (k, c), v in other.entries.items():
            rows.setdefault(k, []).append((c, v))
        out: dict[tuple[int, int], object] = {}
        for (r, k), v in self.entries.items():
            for c, w in rows.get(k, ()):
                out[(r, c)] = out.get((r, c), 0) + v * w
        return SparseOperator(self.dim, out)

    def triplets(self) -> str:
        """Coordinate dump, one ``row col value`` line per stored entry."""
        return "".join(f"{r} {c} {v}\n" for (r, c), v in sorted(self.entries.items()))


def _exact(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _check_dim(space: ColorSpace):
    if space.dim > DIM_CAP:
        raise CapExceededError(f"Potts space of dimension {space.dim} exceeds cap {DIM_CAP}")


def _level_offsets(p: sp.SetPartition, n: int, qt: int, wt: np.ndarray):
    """Row and column offsets of every colouring of level partition p that
    is constant on its blocks (wt[i] = stride of site i at this level)."""
    k = len(p.blocks)
    grid = np.indices((qt,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=np.int64)
    rows = np.zeros(grid.shape[1], dtype=np.int64)
    cols = np.zeros(grid.shape[1], dtype=np.int64)
    for b, blk in enumerate(p.blocks):
        for e in blk:
            if e < n:
                rows += grid[b] * wt[e]
            else:
                cols += grid[b] * wt[e - n]
    return rows, cols


def diagram_pattern(a: RamifiedPartition, q: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates (rows, cols) of the unit entries of R(a)."""
    if a.ground.kind != "double":
        raise ValidationError("Potts representation needs a double(n) ground")
    q = tuple(q)
    if len(q) != a.poset.d:
        raise ValidationError(f"expected {a.poset.d} colour counts, got {len(q)}")
    space = ColorSpace(a.n, q)
    _check_dim(space)
    w = space.level_weights()
    rows = np.zeros(1, dtype=np.int64)
    cols = np.zeros(1, dtype=np.int64)
    for t, p in enumerate(a.levels):
        r, c = _level_offsets(p, a.n, q[t], w[:, t] if a.n else np.zeros(0, dtype=np.int64))
        rows = (rows[:, None] + r[None, :]).ravel()
        cols = (cols[:, None] + c[None, :]).ravel()
    return rows, cols


def _numeric(c):
    if isinstance(c, MultiPoly):
        if not c.is_constant():
            raise ValidationError(f"symbolic coefficient {c} has no numeric Potts image")
        return c.constant_value()
    return c


def potts_rep(a: RamifiedPartition | AlgebraElement, q: Sequence[int]) -> SparseOperator:
    q = tuple(q)
    if any(not isinstance(x, (int, np.integer)) or x < 1 for x in q):
        raise ValidationError(f"colour counts must be positive integers, got {q!r}")
    q = tuple(int(x) for x in q)
    if isinstance(a, RamifiedPartition):
        rows, cols = diagram_pattern(a, q)
        dim = ColorSpace(a.n, q).dim
        return SparseOperator(dim, {(int(r), int(c)): 1 for r, c in zip(rows, cols)})
    if isinstance(a, AlgebraElement):
        dim = ColorSpace(a.algebra.n, q).dim
        _check_dim(ColorSpace(a.algebra.n, q))
        out: dict[tuple[int, int], object] = {}
        for d, c in a.terms.items():
            c = _numeric(c)
            rows, cols = diagram_pattern(d, q)
            for r, cc in zip(rows.tolist(), cols.tolist()):
                out[(r, cc)] = out.get((r, cc), 0) + c
        return SparseOperator(dim, out)
    raise ValidationError(f"cannot represent {type(a).__name__}")


def hom_check(a: RamifiedPartition, b: RamifiedPartition, q: Sequence[int]) -> bool:
    """R(a) R(b) == prod_t q_t**c_t * R(d(ab)), exactly."""
    d, exps = compose_ramified(a, b)
    factor = prod(x ** e for x, e in zip(q, exps))
    return potts_rep(a, q) @ potts_rep(b, q) == potts_rep(d, q).scale(factor)


def _site_diagram(a: RamifiedPartition, i: int) -> RamifiedPartition | None:
    """The restriction of a to {i, i'} (0-based), or None if a block leaves it."""
    n = a.n
    levels = []
    for p in a.levels:
        blocks = []
        for blk in p.blocks:
            if any(e not in (i, n + i) for e in blk):
                if any(e in (i, n + i) for e in blk):
                    return None
                continue
            blocks.append(tuple(0 if e == i else 1 for e in blk))
        levels.append(sp.make_partition(blocks, sp.double(1)))
    return make_ramified(levels, a.poset)


def kron_factorize(a: RamifiedPartition, q: Sequence[int]) -> list[np.ndarray] | None:
    """Per-site factors F_1..F_n with R(a) = F_1 (x) ... (x) F_n, or None."""
    factors = []
    for i in range(a.n):
        s = _site_diagram(a, i)
        if s is None:
            return None
        factors.append(potts_rep(s, q).to_dense())
    return factors


def kron_expand(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.int64)
    for f in factors:
        out = np.kron(out, f)
    return out


def all_ones(k: int) -> np.ndarray:
    return np.ones((k, k), dtype=np.int64)


def ordinary_potts(p: sp.SetPartition, Q: int) -> np.ndarray:
    """Dense Potts matrix of an ordinary partition diagram with Q colours,
    built by direct enumeration of row/column colourings."""
    n = p.ground.n
    dim = Q ** n
    if dim > 4096:
        raise CapExceededError("ordinary Potts oracle is for small cases only")
    A = np.zeros((dim, dim), dtype=np.int64)
    digits = [np.base_repr(s, Q).zfill(n) if n else "" for s in range(dim)]
    for r in range(dim):
        for c in range(dim):
            col = [int(x, Q) for x in digits[r]] + [int(x, Q) for x in digits[c]]
            if all(len({col[e] for e in blk}) == 1 for blk in p.blocks):
                A[r, c] = 1
    return A
