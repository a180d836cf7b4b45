from itertools import product

import pytest
from hypothesis import given, strategies as st

from rampart import setpart as sp
from rampart.errors import CapExceededError, ValidationError


def rgs_partitions(m):
    return st.lists(st.integers(0, m), min_size=m, max_size=m).map(
        lambda xs: sp.from_block_index(sp.plain(m), _as_rgs(xs)))


def _as_rgs(xs):
    seen = {}
    return [seen.setdefault(x, len(seen)) for x in xs]


def diagrams(n):
    return st.lists(st.integers(0, 2 * n), min_size=2 * n, max_size=2 * n).map(
        lambda xs: sp.from_block_index(sp.double(n), _as_rgs(xs)))


def naive_partitions(m):
    """All partitions of range(m) via every labelling, deduplicated."""
    out = set()
    for labels in product(range(m), repeat=m):
        groups = {}
        for e, k in enumerate(labels):
            groups.setdefault(k, []).append(e)
        out.add(frozenset(frozenset(g) for g in groups.values()))
    return out


def naive_compose(a, b):
    """Reachability by repeated relaxation over 3n nodes."""
    n = a.ground.n
    adj = {v: set() for v in range(3 * n)}
    for blk in a.blocks:
        for x in blk:
            for y in blk:
                adj[x].add(y)
    for blk in b.blocks:
        for x in blk:
            for y in blk:
                adj[x + n].add(y + n)
    comp = {}
    for v in range(3 * n):
        if v in comp:
            continue
        stack, seen = [v], {v}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        for x in seen:
            comp[x] = v
    outer = [e for e in range(n)] + [e for e in range(2 * n, 3 * n)]
    groups = {}
    for pos, e in enumerate(outer):
        groups.setdefault(comp[e], []).append(pos)
    middle = {comp[e] for e in range(n, 2 * n)} - {comp[e] for e in outer}
    return sp.make_partition(groups.values(), sp.double(n)), len(middle)


def test_make_partition_examples():
    g1 = sp.double(1)
    assert sp.make_partition([[0, 1]], g1) == sp.identity(1)
    a1 = sp.make_partition([[0], [1]], g1)
    assert a1.blocks == ((0,), (1,))
    assert sp.make_partition([[2], [1, 0]], sp.plain(3)).blocks == ((0, 1), (2,))


@pytest.mark.parametrize("blocks,needle", [
    ([[0, 1], [1, 2]], "2"),
    ([[0]], "not covered"),
    ([[0, 1, 5]], "5"),
    ([[]], "empty"),
])
def test_make_partition_errors_name_element(blocks, needle):
    with pytest.raises(ValidationError, match=needle):
        sp.make_partition(blocks, sp.plain(3))


def test_refines_examples():
    g = sp.plain(3)
    x = sp.make_partition([[0, 2], [1]], g)
    assert sp.refines(sp.singletons(g), x)
    assert sp.refines(sp.make_partition([[0], [1]], sp.plain(2)), sp.make_partition([[0, 1]], sp.plain(2)))
    assert not sp.refines(sp.make_partition([[0, 1], [2]], g), x)
    with pytest.raises(ValidationError):
        sp.refines(x, sp.singletons(sp.plain(2)))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_refines_is_partial_order(m):
    ps = sp.enumerate_partitions(m)
    for a in ps:
        assert sp.refines(a, a)
        for b in ps:
            if a != b and sp.refines(a, b):
                assert not sp.refines(b, a)
            for c in ps:
                if sp.refines(a, b) and sp.refines(b, c):
                    assert sp.refines(a, c)


def test_join_examples():
    g3 = sp.plain(3)
    x = sp.make_partition([[0, 1], [2]], g3)
    assert sp.join(x, x) == x
    assert sp.join(sp.singletons(g3), x) == x
    g4 = sp.plain(4)
    a = sp.make_partition([[0, 1], [2, 3]], g4)
    b = sp.make_partition([[1, 2], [0], [3]], g4)
    assert sp.join(a, b) == sp.trivial(g4)


@given(rgs_partitions(5), rgs_partitions(5), rgs_partitions(5))
def test_join_is_least_upper_bound(a, b, c):
    j = sp.join(a, b)
    assert sp.refines(a, j) and sp.refines(b, j)
    assert j == sp.join(b, a)
    assert sp.join(j, c) == sp.join(a, sp.join(b, c))
    if sp.refines(a, c) and sp.refines(b, c):
        assert sp.refines(j, c)


def test_compose_examples():
    one3 = sp.identity(3)
    assert sp.compose(one3, one3) == (one3, 0)
    a1 = sp.make_partition([[0], [1]], sp.double(1))
    assert sp.compose(a1, a1) == (a1, 1)


@pytest.mark.parametrize("n", [1, 2])
def test_compose_matches_oracle_exhaustive(n):
    ps = sp.enumerate_partitions(sp.double(n))
    for a in ps:
        for b in ps:
            assert sp.compose(a, b) == naive_compose(a, b)


@pytest.mark.parametrize("n", [3, 4])
@given(data=st.data())
def test_compose_matches_oracle_random(n, data):
    a = data.draw(diagrams(n))
    b = data.draw(diagrams(n))
    assert sp.compose(a, b) == naive_compose(a, b)


def test_compose_needs_double_ground():
    with pytest.raises(ValidationError):
        sp.compose(sp.singletons(sp.plain(2)), sp.singletons(sp.plain(2)))


def test_restrict_examples():
    x = sp.make_partition([[0, 1], [2]], sp.plain(3))
    assert sp.restrict(x, range(3)) == x
    assert sp.restrict(x, [0, 2]) == sp.make_partition([[0], [1]], sp.plain(2))
    with pytest.raises(ValidationError):
        sp.restrict(x, [0, 7])


@given(rgs_partitions(6), rgs_partitions(6), st.sets(st.integers(0, 5), min_size=1))
def test_restriction_preserves_refinement(a, b, subset):
    j = sp.join(a, b)
    assert sp.refines(sp.restrict(a, subset), sp.restrict(j, subset))


@pytest.mark.parametrize("m,count", [(2, 2), (4, 15), (5, 52)])
def test_enumerate_partitions_counts(m, count):
    ps = sp.enumerate_partitions(m)
    assert len(ps) == count == len(set(ps))


@pytest.mark.parametrize("m", range(0, 7))
def test_enumeration_matches_naive(m):
    got = {frozenset(frozenset(b) for b in p.blocks) for p in sp.enumerate_partitions(m)}
    assert got == naive_partitions(m)


def test_bell_recurrence():
    from math import comb
    for m in range(0, 11):
        assert sp.bell(m + 1) == sum(comb(m, k) * sp.bell(k) for k in range(m + 1))
    for m in range(0, 9):
        assert len(sp.enumerate_partitions(m)) == sp.bell(m)


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        sp.enumerate_partitions(13)
    assert len(sp.enumerate_partitions(3, cap=3)) == 5


def test_stats():
    assert sp.stats(sp.identity(3)) == ((2, 2, 2), 3)
    assert sp.stats(sp.make_partition([[0], [1]], sp.double(1))) == ((1, 1), 0)
    assert sp.stats(sp.trivial(sp.double(2))) == ((4,), 1)
    with pytest.raises(ValidationError):
        sp.prop_number(sp.singletons(sp.plain(2)))


@given(rgs_partitions(6))
def test_canonical_form_is_stable(p):
    again = sp.make_partition([list(reversed(b)) for b in reversed(p.blocks)], p.ground)
    assert again == p and hash(again) == hash(p)
    assert all(list(b) == sorted(b) for b in p.blocks)
    assert [b[0] for b in p.blocks] == sorted(b[0] for b in p.blocks)
