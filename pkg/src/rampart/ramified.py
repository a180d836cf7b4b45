"""Posets, ramified partitions and their combinatorics.

A ramified partition over a poset T on {1..d} is a tuple of set partitions
``levels[0..d-1]`` of one ground set such that ``t <= t'`` implies
``levels[t]`` refines ``levels[t']``.  For the chain of length 2,
``levels[0]`` is the inner partition and ``levels[1]`` the outer one.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial, prod
from typing import Iterable, Sequence

from . import setpart as sp
from .errors import CapExceededError, ValidationError
from .setpart import GroundSet, SetPartition

BASIS_CAP = 250_000


@dataclass(frozen=True)
class Poset:
    d: int
    leq: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        d = self.d
        if d < 1:
            raise ValidationError("poset degree must be >= 1")
        if len(self.leq) != d or any(len(r) != d for r in self.leq):
            raise ValidationError("relation must be d x d")
        r = self.leq
        for i in range(d):
            if not r[i][i]:
                raise ValidationError(f"not reflexive at {i + 1}")
            for j in range(d):
                if i != j and r[i][j] and r[j][i]:
                    raise ValidationError(f"not antisymmetric at ({i + 1}, {j + 1})")
                for k in range(d):
                    if r[i][j] and r[j][k] and not r[i][k]:
                        raise ValidationError(f"not transitive at ({i + 1}, {j + 1}, {k + 1})")

    @classmethod
    def from_relations(cls, d: int, pairs: Iterable[tuple[int, int]]) -> "Poset":
        """Transitive reflexive closure of 1-based pairs ``(s, t)`` meaning s <= t."""
        r = [[i == j for j in range(d)] for i in range(d)]
        for s, t in pairs:
            if not (1 <= s <= d and 1 <= t <= d):
                raise ValidationError(f"relation ({s}, {t}) out of range")
            r[s - 1][t - 1] = True
        for k in range(d):
            for i in range(d):
                if r[i][k]:
                    for j in range(d):
                        if r[k][j]:
                            r[i][j] = True
        return cls(d, tuple(tuple(row) for row in r))

    def covers(self) -> list[tuple[int, int]]:
        """0-based pairs (s, t) with s < t and nothing strictly between."""
        r, d = self.leq, self.d
        out = []
        for s in range(d):
            for t in range(d):
                if s != t and r[s][t] and not any(
                        k not in (s, t) and r[s][k] and r[k][t] for k in range(d)):
                    out.append((s, t))
        return out

    def linear_extension(self) -> list[int]:
        d, r = self.d, self.leq
        return sorted(range(d), key=lambda t: sum(r[s][t] for s in range(d)))

    @property
    def is_chain(self) -> bool:
        return all(self.leq[i][j] for i in range(self.d) for j in range(i, self.d))


def chain_poset(d: int) -> Poset:
    if d < 1:
        raise ValidationError("chain needs d >= 1")
    return Poset(d, tuple(tuple(i <= j for j in range(d)) for i in range(d)))


CHAIN1 = chain_poset(1)
CHAIN2 = chain_poset(2)


class RamifiedPartition:
    __slots__ = ("poset", "levels", "_hash")

    def __init__(self, poset: Poset, levels: tuple[SetPartition, ...]):
        # trusted constructor; make_ramified validates
        self.poset = poset
        self.levels = levels
        self._hash = hash(levels)

    def __eq__(self, other):
        if not isinstance(other, RamifiedPartition):
            return NotImplemented
        return self._hash == other._hash and self.levels == other.levels and self.poset == other.poset

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return tuple(reversed(self.levels)) < tuple(reversed(other.levels))

    @property
    def ground(self) -> GroundSet:
        return self.levels[0].ground

    @property
    def n(self) -> int:
        return self.ground.n

    def __repr__(self):
        if self.poset.is_chain:
            try:
                return f"R[{print_serial(self)}]"
            except ValidationError:
                pass
        return "R(" + ", ".join(map(repr, self.levels)) + ")"


def make_ramified(levels: Sequence[SetPartition], poset: Poset) -> RamifiedPartition:
    levels = tuple(levels)
    if len(levels) != poset.d:
        raise ValidationError(f"expected {poset.d} levels, got {len(levels)}")
    g = levels[0].ground
    for lv in levels:
        if lv.ground != g:
            raise ValidationError("levels do not share a ground set")
    for s, t in poset.covers():
        if not sp.refines(levels[s], levels[t]):
            raise ValidationError(
                f"level {s + 1} does not refine level {t + 1} although {s + 1} <= {t + 1}")
    return RamifiedPartition(poset, levels)


def diagonal(a: SetPartition, poset: Poset) -> RamifiedPartition:
    return RamifiedPartition(poset, (a,) * poset.d)


def unit(n: int, poset: Poset = CHAIN2) -> RamifiedPartition:
    return diagonal(sp.identity(n), poset)


def _sub_partitions(block: Sequence[int]) -> list[list[tuple[int, ...]]]:
    """All partitions of the elements of ``block`` as lists of sorted blocks."""
    out = []
    for rgs in sp.restricted_growth_strings(len(block)):
        groups: dict[int, list[int]] = {}
        for e, k in zip(block, rgs):
            groups.setdefault(k, []).append(e)
        out.append([tuple(v) for v in groups.values()])
    return out


def count_chain2(m: int) -> int:
    """Number of <2>-ramified partitions of an m-set, via the shape formula
    sum over shapes mu of g_mu * prod_i B(mu_i)."""
    total = 0
    for mu in integer_partitions(m):
        mult: dict[int, int] = {}
        for p in mu:
            mult[p] = mult.get(p, 0) + 1
        g = factorial(m) // (prod(factorial(p) for p in mu) * prod(factorial(k) for k in mult.values()))
        total += g * prod(sp.bell(p) for p in mu)
    return total


def integer_partitions(m: int, largest: int | None = None) -> list[tuple[int, ...]]:
    if largest is None:
        largest = m
    if m == 0:
        return [()]
    out = []
    for first in range(min(m, largest), 0, -1):
        for rest in integer_partitions(m - first, first):
            out.append((first,) + rest)
    return out


def enumerate_ramified(ground: GroundSet, poset: Poset, cap: int = BASIS_CAP) -> list[RamifiedPartition]:
    """All T-ramified partitions of ``ground``, sorted canonically."""
    if poset.is_chain:
        # finest level last: refine each block of the coarser level independently
        est = _chain_count(ground.size, poset.d)
        if est > cap:
            raise CapExceededError(f"{est} basis elements exceed cap {cap}")
        tops = sp.enumerate_partitions(ground, cap=max(sp.BELL_CAP, ground.size))
        chains = [(p,) for p in tops]
        for _ in range(poset.d - 1):
            nxt = []
            for ch in chains:
                coarse = ch[0]
                choices = [_sub_partitions(b) for b in coarse.blocks]
                for pick in product(*choices):
                    blocks = [blk for part in pick for blk in part]
                    nxt.append((sp._canonical(ground, blocks),) + ch)
            chains = nxt
        out = [RamifiedPartition(poset, ch) for ch in chains]
    else:
        parts = sp.enumerate_partitions(ground, cap=max(sp.BELL_CAP, ground.size))
        if len(parts) ** poset.d > cap * 100:
            raise CapExceededError("general-poset enumeration exceeds cap")
        order = poset.linear_extension()
        covers = poset.covers()
        partial: list[dict[int, SetPartition]] = [{}]
        for t in order:
            nxt = []
            for asg in partial:
                for p in parts:
                    ok = True
                    for s, u in covers:
                        if u == t and s in asg and not sp.refines(asg[s], p):
                            ok = False
                            break
                        if s == t and u in asg and not sp.refines(p, asg[u]):
                            ok = False
                            break
                    if ok:
                        nxt.append({**asg, t: p})
            partial = nxt
            if len(partial) > cap:
                raise CapExceededError(f"basis exceeds cap {cap}")
        out = [RamifiedPartition(poset, tuple(asg[t] for t in range(poset.d))) for asg in partial]
    out.sort()
    return out


@lru_cache(maxsize=None)
def _chain_count(m: int, d: int) -> int:
    if d == 1:
        return sp.bell(m)
    # refine each block of the top level by a (d-1)-chain
    total = 0
    for mu in integer_partitions(m):
        mult: dict[int, int] = {}
        for p in mu:
            mult[p] = mult.get(p, 0) + 1
        g = factorial(m) // (prod(factorial(p) for p in mu) * prod(factorial(k) for k in mult.values()))
        total += g * prod(_chain_count(p, d - 1) for p in mu)
    return total


@lru_cache(maxsize=16)
def enumerate_basis(n: int, poset: Poset = CHAIN2, cap: int = BASIS_CAP) -> tuple[RamifiedPartition, ...]:
    return tuple(enumerate_ramified(sp.double(n), poset, cap))


_compose_cache: dict = {}


def compose_ramified(a: RamifiedPartition, b: RamifiedPartition) -> tuple[RamifiedPartition, tuple[int, ...]]:
    """Levelwise composition; returns the diagram and per-level loop counts."""
    key = (a, b)
    hit = _compose_cache.get(key)
    if hit is not None:
        return hit
    if a.poset != b.poset:
        raise ValidationError("poset mismatch")
    if a.ground != b.ground:
        raise ValidationError(f"size mismatch: {a.ground!r} vs {b.ground!r}")
    levels = []
    exps = []
    for x, y in zip(a.levels, b.levels):
        d, c = sp.compose(x, y)
        levels.append(d)
        exps.append(c)
    for s, t in a.poset.covers():
        assert sp.refines(levels[s], levels[t]), "composition left the ramified basis"
    res = (RamifiedPartition(a.poset, tuple(levels)), tuple(exps))
    if len(_compose_cache) > 2_000_000:
        _compose_cache.clear()
    _compose_cache[key] = res
    return res


def _flip(p: SetPartition) -> SetPartition:
    n = p.ground.n
    sw = [(e + n) if e < n else (e - n) for e in range(2 * n)]
    return sp._canonical(p.ground, ([sw[e] for e in b] for b in p.blocks))


def opposite(a: RamifiedPartition) -> RamifiedPartition:
    if a.ground.kind != "double":
        raise ValidationError("opposite needs a double ground")
    return RamifiedPartition(a.poset, tuple(_flip(p) for p in a.levels))


def _shift_levels(p: SetPartition, q: SetPartition) -> SetPartition:
    n, m = p.ground.n, q.ground.n
    N = n + m

    def rp(e):  # relabel element of p into double(N)
        return e if e < n else e - n + N

    def rq(e):
        return e + n if e < m else e - m + N + n

    blocks = [[rp(e) for e in b] for b in p.blocks] + [[rq(e) for e in b] for b in q.blocks]
    return sp._canonical(sp.double(N), blocks)


def juxtapose(a: RamifiedPartition, b: RamifiedPartition) -> RamifiedPartition:
    """Place ``b`` to the right of ``a`` (sites of b shifted by a.n)."""
    if a.poset != b.poset:
        raise ValidationError("poset mismatch")
    if a.ground.kind != "double" or b.ground.kind != "double":
        raise ValidationError("juxtapose needs double grounds")
    return RamifiedPartition(a.poset, tuple(_shift_levels(p, q) for p, q in zip(a.levels, b.levels)))


def juxtapose_all(parts: Iterable[RamifiedPartition], poset: Poset = CHAIN2) -> RamifiedPartition:
    out = unit(0, poset)
    for p in parts:
        out = juxtapose(out, p)
    return out


# propagating indices (chain of length 2 only)

def prop_index(parts: Iterable[int]) -> tuple[int, ...]:
    """Dominant (weakly decreasing) form; zeros are kept."""
    parts = tuple(parts)
    if any(p < 0 for p in parts):
        raise ValidationError("propagating index parts must be >= 0")
    return tuple(sorted(parts, reverse=True))


def envelope(lam: Sequence[int]) -> int:
    return sum(p if p else 1 for p in lam)


def prop_indices(max_env: int) -> list[tuple[int, ...]]:
    """All propagating indices with envelope <= max_env."""
    out = []

    def rec(prefix: tuple[int, ...], budget: int, largest: int):
        out.append(prefix)
        for v in range(min(largest, budget), -1, -1):
            cost = v if v else 1
            if cost <= budget:
                rec(prefix + (v,), budget - cost, v)

    rec((), max_env, max_env)
    return sorted(out, key=lambda lam: (envelope(lam), len(lam), lam))


@dataclass(frozen=True)
class PropProfile:
    prop: tuple[int, int]
    lam: tuple[int, ...]
    env: int


def prop_profile(a: RamifiedPartition) -> PropProfile:
    if a.poset != CHAIN2:
        raise ValidationError("propagating index is only defined for the chain <2>")
    if a.ground.kind != "double":
        raise ValidationError("propagating index needs a double ground")
    n = a.n
    inner, outer = a.levels
    iidx = inner.block_index
    inner_prop = [sp.is_propagating(b, n) for b in inner.blocks]
    counts = []
    for ob in outer.blocks:
        if sp.is_propagating(ob, n):
            ks = {iidx[e] for e in ob}
            counts.append(sum(1 for k in ks if inner_prop[k]))
    lam = prop_index(counts)
    prop = (sum(inner_prop), len(counts))
    return PropProfile(prop, lam, envelope(lam))


# serial notation: outer parts written as {{...}{...}} juxtaposed

_TOKEN = re.compile(r"\s*(\{|\}|\d+'?|,)")


def print_serial(a: RamifiedPartition) -> str:
    if not a.poset.is_chain:
        raise ValidationError("serial notation needs a chain poset")
    g = a.ground

    def render(level: int, elems: Sequence[int]) -> str:
        if level < 0:
            return " ".join(g.label(e) for e in elems)
        es = set(elems)
        return "".join("{" + render(level - 1, blk) + "}" for blk in a.levels[level].blocks
                       if blk[0] in es)

    return render(a.poset.d - 1, range(g.size))


def parse_serial(text: str, n: int | None = None) -> RamifiedPartition:
    """Parse nested-brace notation; nesting depth gives the chain length."""
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValidationError(f"unexpected character {text[pos]!r} at offset {pos}")
        tok = m.group(1)
        if tok != ",":
            tokens.append((tok, m.start(1)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    # build a tree of nested lists
    stack: list[list] = [[]]
    for tok, at in tokens:
        if tok == "{":
            stack.append([])
        elif tok == "}":
            if len(stack) == 1:
                raise ValidationError(f"unbalanced '}}' at offset {at}")
            done = stack.pop()
            if not done:
                raise ValidationError(f"empty part closed at offset {at}")
            stack[-1].append(done)
        else:
            if len(stack) == 1:
                raise ValidationError(f"element {tok} outside braces at offset {at}")
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValidationError("unbalanced '{'")
    tree = stack[0]

    def depth(node) -> int:
        if isinstance(node, str):
            return 0
        ds = {depth(c) for c in node}
        if len(ds) != 1:
            raise ValidationError("inconsistent nesting depth")
        return ds.pop() + 1

    if not tree:
        d = 2
    else:
        d = depth(tree) - 1
    if d < 1:
        raise ValidationError("no parts found")

    labels = []

    def leaves(node):
        if isinstance(node, str):
            labels.append(node)
        else:
            for c in node:
                leaves(c)

    leaves(tree)
    nums = [int(t.rstrip("'")) for t in labels]
    if any(v < 1 for v in nums):
        raise ValidationError("labels start at 1")
    if n is None:
        n = max(nums, default=0)
    ground = sp.double(n)

    def enc(t: str) -> int:
        v = int(t.rstrip("'"))
        if v > n:
            raise ValidationError(f"label {t} exceeds n={n}")
        return (n + v - 1) if t.endswith("'") else v - 1

    levels = []
    # level t (0-based) collects blocks at depth t+1 from the leaves
    def collect(node, lvl_depth) -> list[list[int]]:
        if depth(node) == lvl_depth:
            flat = []
            leaves_of(node, flat)
            return [flat]
        out = []
        for c in node:
            out.extend(collect(c, lvl_depth))
        return out

    def leaves_of(node, acc):
        if isinstance(node, str):
            acc.append(enc(node))
        else:
            for c in node:
                leaves_of(c, acc)

    for t in range(d):
        blocks = [] if not tree else collect(tree, t + 1)
        levels.append(sp.make_partition(blocks, ground))
    return make_ramified(levels, chain_poset(d))


def to_json(a: RamifiedPartition) -> list:
    """Nested arrays of signed labels (primed labels negative), outermost level first."""
    if not a.poset.is_chain:
        raise ValidationError("JSON export needs a chain poset")
    n = a.n

    def lab(e):
        return e + 1 if e < n else -(e - n + 1)

    def render(level: int, elems):
        es = set(elems)
        if level < 0:
            return [lab(e) for e in sorted(es)]
        return [render(level - 1, blk) for blk in a.levels[level].blocks if blk[0] in es]

    return render(a.poset.d - 1, range(a.ground.size))


def from_json(data, n: int | None = None) -> RamifiedPartition:
    def walk(node):
        if isinstance(node, int):
            return f"{node}" if node > 0 else f"{-node}'"
        if not isinstance(node, list):
            raise ValidationError("JSON diagram must be nested arrays of integers")
        if node and all(isinstance(x, int) for x in node):
            return "{" + " ".join(walk(x) for x in node) + "}"
        return "{" + "".join(walk(x) for x in node) + "}"

    if isinstance(data, str):
        data = json.loads(data)
    return parse_serial("".join(walk(x) for x in data), n=n)
