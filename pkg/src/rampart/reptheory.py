"""Sections of the ideal filtration, trivial-index gram matrices and simple
module counting for the chain <2>."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import factorial, prod
from typing import Sequence

from . import setpart as sp
from .algebra import I_lambda
from .errors import CapExceededError, ValidationError
from .ramified import (
    CHAIN2,
    RamifiedPartition,
    compose_ramified,
    enumerate_basis,
    enumerate_ramified,
    envelope,
    integer_partitions,
    prop_index,
    prop_indices,
    prop_profile,
)
from .rings import MultiPoly, PolyMatrix, variables_q

GRAM_CAP = 5


@dataclass(frozen=True)
class SectionBasis:
    n: int
    lam: tuple[int, ...]
    diagrams: tuple[RamifiedPartition, ...]

    def __len__(self):
        return len(self.diagrams)


def section_basis(n: int, lam: Sequence[int]) -> SectionBasis:
    lam = prop_index(lam)
    if envelope(lam) > n:
        raise ValidationError(f"envelope of {lam} exceeds n={n}")
    ds = tuple(a for a in enumerate_basis(n, CHAIN2) if prop_profile(a).lam == lam)
    return SectionBasis(n, lam, ds)


def value_multiplicities(lam: Sequence[int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for v in lam:
        out[v] = out.get(v, 0) + 1
    return out


def wreath_group_order(lam: Sequence[int]) -> int:
    """|S[lambda]| = prod over distinct values v (multiplicity m) of (v!)^m m!."""
    return prod(factorial(v) ** m * factorial(m) for v, m in value_multiplicities(lam).items())


@lru_cache(maxsize=None)
def partition_count(v: int) -> int:
    return len(integer_partitions(v))


@lru_cache(maxsize=None)
def multipartition_count(c: int, m: int) -> int:
    """Number of c-tuples of integer partitions with total size m."""
    if c == 0:
        return int(m == 0)
    return sum(partition_count(k) * multipartition_count(c - 1, m - k) for k in range(m + 1))


def count_simples(lam: Sequence[int]) -> int:
    return prod(multipartition_count(partition_count(v), m)
                for v, m in value_multiplicities(prop_index(lam)).items())


def gamma_count(i: int) -> int:
    return sum(count_simples(lam) for lam in prop_indices(i) if envelope(lam) == i)


def total_simples(n: int) -> int:
    return sum(gamma_count(i) for i in range(n + 1))


# simple labels and wreath dimensions

@dataclass(frozen=True)
class SimpleLabel:
    """lam plus, for each distinct part value v, a p(v)-tuple of partitions
    (indexed by the partitions of v in integer_partitions order)."""
    lam: tuple[int, ...]
    factors: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]

    def __post_init__(self):
        mult = value_multiplicities(self.lam)
        if sorted(v for v, _ in self.factors) != sorted(mult):
            raise ValidationError("label factors do not match the values of lambda")
        for v, tup in self.factors:
            if len(tup) != partition_count(v):
                raise ValidationError(f"value {v} needs a {partition_count(v)}-tuple")
            if sum(sum(mu) for mu in tup) != mult[v]:
                raise ValidationError(f"value {v} needs total size {mult[v]}")


def _multipartitions(c: int, m: int):
    if c == 0:
        if m == 0:
            yield ()
        return
    for k in range(m + 1):
        for mu in integer_partitions(k):
            for rest in _multipartitions(c - 1, m - k):
                yield (mu,) + rest


def simple_labels(lam: Sequence[int]) -> list[SimpleLabel]:
    lam = prop_index(lam)
    mult = value_multiplicities(lam)
    values = sorted(mult, reverse=True)
    options = [[(v, t) for t in _multipartitions(partition_count(v), mult[v])] for v in values]
    return [SimpleLabel(lam, tuple(choice)) for choice in product(*options)]


def hook_dimension(mu: Sequence[int]) -> int:
    """Dimension of the Specht module S^mu (hook length formula)."""
    mu = [p for p in mu if p]
    size = sum(mu)
    conj = [sum(1 for p in mu if p > j) for j in range(mu[0])] if mu else []
    hooks = 1
    for i, row in enumerate(mu):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return factorial(size) // hooks


def wreath_irreducible_dim(label: SimpleLabel) -> int:
    total = 1
    for v, tup in label.factors:
        chars = [hook_dimension(mu) for mu in integer_partitions(v)]
        sizes = [sum(mu) for mu in tup]
        m = sum(sizes)
        d = factorial(m)
        for c, mu, s in zip(chars, tup, sizes):
            d = d * c ** s * hook_dimension(mu)
            d //= factorial(s)
        total *= d
    return total


# standard module bookkeeping

def half_diagrams(n: int, lam: Sequence[int]) -> set[RamifiedPartition]:
    lam = prop_index(lam)
    I = I_lambda(lam, n)
    out = set()
    for x in section_basis(n, lam).diagrams:
        d, _ = compose_ramified(x, I)
        if prop_profile(d).lam == lam:
            out.add(d)
    return out


def half_diagram_count(n: int, lam: Sequence[int]) -> int:
    """Free rank of the section P[lam]' over the group algebra of S[lam]."""
    total = len(half_diagrams(n, lam))
    order = wreath_group_order(lam)
    if total % order:
        raise AssertionError(f"{total} half diagrams are not a free S[{lam}]-set of order {order}")
    return total // order


def standard_dim(n: int, label: SimpleLabel) -> int:
    return half_diagram_count(n, label.lam) * wreath_irreducible_dim(label)


def standard_dims(n: int) -> dict[SimpleLabel, int]:
    out = {}
    for lam in prop_indices(n):
        rank = half_diagram_count(n, lam)
        for lab in simple_labels(lam):
            out[lab] = rank * wreath_irreducible_dim(lab)
    return out


# gram matrix of the lambda = () standard module

def gram_rows(n: int) -> list[RamifiedPartition]:
    return enumerate_ramified(sp.plain(n), CHAIN2)


# Variable Q1 weighs the outer-level join and Q2 the inner one; this is the
# labelling under which the published n = 2, 3, 4 determinants hold.
PUBLISHED_LEVELS = (1, 0)


def gram_exponents(n: int, level_order: Sequence[int] = PUBLISHED_LEVELS) -> list[list[tuple[int, ...]]]:
    rows = gram_rows(n)
    out = []
    for a in rows:
        row = []
        for b in rows:
            h = [len(sp.join(x, y)) for x, y in zip(a.levels, b.levels)]
            row.append(tuple(h[t] for t in level_order))
        out.append(row)
    return out


def gram_trivial(n: int, level_order: Sequence[int] = PUBLISHED_LEVELS) -> PolyMatrix:
    """Entry (a, b) = prod_k Q_k ** #parts(join(a_t, b_t)) with t = level_order[k].

    ``level_order=(0, 1)`` gives the composition-scalar labelling (Q1 inner).
    """
    if n > GRAM_CAP:
        raise CapExceededError(f"gram matrix capped at n={GRAM_CAP}")
    if sorted(level_order) != [0, 1]:
        raise ValidationError(f"level_order must be a permutation of (0, 1), got {level_order!r}")
    vs = variables_q(2)
    cache: dict[tuple[int, ...], MultiPoly] = {}
    entries = []
    for row in gram_exponents(n, level_order):
        out = []
        for h in row:
            if h not in cache:
                cache[h] = MultiPoly.monomial(h, vs)
            out.append(cache[h])
        entries.append(out)
    return PolyMatrix(entries, vs)


def factored_gram_det(n: int) -> MultiPoly:
    """Known closed forms of det gram_trivial(n) for n = 2, 3, 4, expanded."""
    vs = variables_q(2)
    Q1, Q2 = MultiPoly.var("Q1", vs), MultiPoly.var("Q2", vs)
    if n == 2:
        return Q1 ** 3 * Q2 ** 4 * (Q1 - 1) * (Q2 - 1)
    if n == 3:
        return Q1 ** 12 * Q2 ** 20 * (Q1 - 2) * (Q2 - 2) * (Q1 - 1) ** 7 * (Q2 - 1) ** 7
    if n == 4:
        return (Q1 ** 60 * Q2 ** 119 * (Q1 - 3) * (Q2 - 3) * (Q1 - 2) ** 13 * (Q2 - 2) ** 11
                * (Q1 - 1) ** 45 * (Q2 - 1) ** 48)
    raise ValidationError(f"no closed form recorded for n={n}")


def factored_gram_det_value(n: int, q1, q2):
    if n == 4:
        return (q1 ** 60 * q2 ** 119 * (q1 - 3) * (q2 - 3) * (q1 - 2) ** 13 * (q2 - 2) ** 11
                * (q1 - 1) ** 45 * (q2 - 1) ** 48)
    return factored_gram_det(n).evaluate((q1, q2))
