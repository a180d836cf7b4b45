"""Canonical set partitions of finite ground sets.

Elements are 0-based integers.  On a ``double(n)`` ground the unprimed
label ``i`` (1-based) is element ``i - 1`` and the primed label ``i'`` is
element ``n + i - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import CapExceededError, ValidationError

BELL_CAP = 12


@dataclass(frozen=True)
class GroundSet:
    kind: str  # "plain" or "double"
    n: int

    def __post_init__(self):
        if self.kind not in ("plain", "double"):
            raise ValidationError(f"unknown ground kind {self.kind!r}")
        if self.n < 0:
            raise ValidationError("ground size must be >= 0")

    @property
    def size(self) -> int:
        return 2 * self.n if self.kind == "double" else self.n

    def label(self, e: int) -> str:
        if self.kind == "double" and e >= self.n:
            return f"{e - self.n + 1}'"
        return str(e + 1)

    def __repr__(self):
        return f"{self.kind}({self.n})"


def plain(m: int) -> GroundSet:
    return GroundSet("plain", m)


def double(n: int) -> GroundSet:
    return GroundSet("double", n)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if rx < ry:
                self.parent[ry] = rx
            else:
                self.parent[rx] = ry


class SetPartition:
    """A partition of a ground set, stored canonically.

    Blocks are sorted ascending internally and ordered by their minimum,
    so structural equality is mathematical equality.
    """

    __slots__ = ("ground", "blocks", "_hash", "_index")

    def __init__(self, ground: GroundSet, blocks: tuple[tuple[int, ...], ...]):
        # trusted constructor; use make_partition for validation
        self.ground = ground
        self.blocks = blocks
        self._hash = hash((ground, blocks))
        self._index = None

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self._hash == other._hash and self.ground == other.ground and self.blocks == other.blocks

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.ground.kind, self.ground.n, self.blocks) < (
            other.ground.kind, other.ground.n, other.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self):
        g = self.ground
        body = ", ".join("{" + ",".join(g.label(e) for e in b) + "}" for b in self.blocks)
        return "{" + body + "}"

    @property
    def block_index(self) -> tuple[int, ...]:
        """Element -> index of its block (a restricted growth string)."""
        if self._index is None:
            idx = [0] * self.ground.size
            for k, b in enumerate(self.blocks):
                for e in b:
                    idx[e] = k
            self._index = tuple(idx)
        return self._index


def _canonical(ground: GroundSet, blocks: Iterable[Iterable[int]]) -> SetPartition:
    bs = sorted(tuple(sorted(b)) for b in blocks)
    return SetPartition(ground, tuple(bs))


def from_block_index(ground: GroundSet, index: Sequence[int]) -> SetPartition:
    groups: dict[int, list[int]] = {}
    for e, k in enumerate(index):
        groups.setdefault(k, []).append(e)
    return SetPartition(ground, tuple(sorted(tuple(v) for v in groups.values())))


def make_partition(blocks: Iterable[Iterable[int]], ground: GroundSet) -> SetPartition:
    seen: set[int] = set()
    out = []
    for b in blocks:
        b = tuple(b)
        if not b:
            raise ValidationError("empty block")
        for e in b:
            if not isinstance(e, int) or not 0 <= e < ground.size:
                raise ValidationError(f"element {e!r} out of range for {ground!r}")
            if e in seen:
                raise ValidationError(f"element {ground.label(e)} appears in two blocks")
            seen.add(e)
        out.append(b)
    for e in range(ground.size):
        if e not in seen:
            raise ValidationError(f"element {ground.label(e)} is not covered")
    return _canonical(ground, out)


def singletons(ground: GroundSet) -> SetPartition:
    return SetPartition(ground, tuple((e,) for e in range(ground.size)))


def trivial(ground: GroundSet) -> SetPartition:
    """The one-block partition."""
    if ground.size == 0:
        return SetPartition(ground, ())
    return SetPartition(ground, (tuple(range(ground.size)),))


def identity(n: int) -> SetPartition:
    return SetPartition(double(n), tuple((i, n + i) for i in range(n)))


def _check_same(a: SetPartition, b: SetPartition) -> None:
    if a.ground != b.ground:
        raise ValidationError(f"ground mismatch: {a.ground!r} vs {b.ground!r}")


def refines(a: SetPartition, b: SetPartition) -> bool:
    """True iff every block of ``a`` lies inside a block of ``b``."""
    _check_same(a, b)
    bi = b.block_index
    return all(all(bi[e] == bi[blk[0]] for e in blk) for blk in a.blocks)


def join(a: SetPartition, b: SetPartition) -> SetPartition:
    """Finest common coarsening."""
    _check_same(a, b)
    uf = _UnionFind(a.ground.size)
    for p in (a, b):
        for blk in p.blocks:
            for e in blk[1:]:
                uf.union(blk[0], e)
    return from_block_index(a.ground, [uf.find(e) for e in range(a.ground.size)])


def compose(a: SetPartition, b: SetPartition) -> tuple[SetPartition, int]:
    """Stack ``a`` over ``b``; return (d(ab), number of middle-only classes).

    Nodes 0..n-1 are the top row, n..2n-1 the middle row (a's primed row,
    identified with b's unprimed row) and 2n..3n-1 the bottom row.
    """
    _check_same(a, b)
    if a.ground.kind != "double":
        raise ValidationError("compose needs double(n) grounds")
    n = a.ground.n
    uf = _UnionFind(3 * n)
    for blk in a.blocks:
        r = blk[0]
        for e in blk[1:]:
            uf.union(r, e)
    for blk in b.blocks:
        r = blk[0] + n
        for e in blk[1:]:
            uf.union(r, e + n)
    find = uf.find
    roots_outer = set()
    index = []
    for e in range(n):
        r = find(e)
        roots_outer.add(r)
        index.append(r)
    for e in range(2 * n, 3 * n):
        r = find(e)
        roots_outer.add(r)
        index.append(r)
    middle = {find(e) for e in range(n, 2 * n)}
    return from_block_index(a.ground, index), len(middle - roots_outer)


def restrict(a: SetPartition, subset: Iterable[int]) -> SetPartition:
    """Intersect the blocks of ``a`` with ``subset``, dropping empties.

    The result is relabelled order-preservingly onto ``plain(len(subset))``.
    """
    s = sorted(set(subset))
    bad = [e for e in s if not 0 <= e < a.ground.size]
    if bad:
        raise ValidationError(f"element {bad[0]!r} is not in {a.ground!r}")
    pos = {e: k for k, e in enumerate(s)}
    blocks = []
    for blk in a.blocks:
        part = [pos[e] for e in blk if e in pos]
        if part:
            blocks.append(part)
    return _canonical(plain(len(s)), blocks)


def shape(a: SetPartition) -> tuple[int, ...]:
    return tuple(sorted((len(b) for b in a.blocks), reverse=True))


def is_propagating(block: Sequence[int], n: int) -> bool:
    return block[0] < n <= block[-1]


def prop_number(a: SetPartition) -> int:
    if a.ground.kind != "double":
        raise ValidationError("propagating number needs a double(n) ground")
    n = a.ground.n
    return sum(1 for b in a.blocks if is_propagating(b, n))


def stats(a: SetPartition) -> tuple[tuple[int, ...], int]:
    return shape(a), prop_number(a)


def restricted_growth_strings(m: int) -> Iterator[tuple[int, ...]]:
    """All restricted growth strings of length m, in lexicographic order."""
    if m == 0:
        yield ()
        return
    s = [0] * m
    mx = [0] * m  # mx[i] = max(s[:i+1])

    def rec(i: int):
        if i == m:
            yield tuple(s)
            return
        top = mx[i - 1] + 1
        for v in range(top + 1):
            s[i] = v
            mx[i] = max(mx[i - 1], v)
            yield from rec(i + 1)

    s[0] = 0
    mx[0] = 0
    yield from rec(1)


def enumerate_partitions(m: int | GroundSet, cap: int = BELL_CAP) -> list[SetPartition]:
    """All partitions of ``plain(m)`` (or of the given ground), canonical order."""
    ground = m if isinstance(m, GroundSet) else plain(m)
    if ground.size > cap:
        raise CapExceededError(f"enumerating partitions of {ground.size} elements exceeds cap {cap}")
    return [from_block_index(ground, rgs) for rgs in restricted_growth_strings(ground.size)]


_BELL = [1]


def bell(m: int) -> int:
    while len(_BELL) <= m:
        k = len(_BELL) - 1
        _BELL.append(sum(comb(k, j) * _BELL[j] for j in range(k + 1)))
    return _BELL[m]
