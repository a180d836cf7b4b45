import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from rampart import setpart as sp
from rampart.algebra import e_T, PartitionAlgebra, lambda_leq
from rampart.errors import ValidationError
from rampart.ramified import (
    CHAIN1,
    CHAIN2,
    Poset,
    chain_poset,
    compose_ramified,
    count_chain2,
    enumerate_basis,
    enumerate_ramified,
    envelope,
    from_json,
    juxtapose,
    make_ramified,
    opposite,
    parse_serial,
    print_serial,
    prop_index,
    prop_indices,
    prop_profile,
    to_json,
    unit,
)

BASIS1 = enumerate_basis(1)
BASIS2 = enumerate_basis(2)


def naive_chain_count(m, d=2):
    """Tuples of partitions of plain(m) refining upward, by filtering all d-tuples."""
    ps = sp.enumerate_partitions(m)
    return sum(1 for tup in product(ps, repeat=d)
               if all(sp.refines(tup[t], tup[t + 1]) for t in range(d - 1)))


def test_chain_posets():
    assert CHAIN1.d == 1 and CHAIN2.leq == ((True, True), (False, True))
    c3 = chain_poset(3)
    assert c3.leq[0][2] and c3.is_chain
    with pytest.raises(ValidationError):
        chain_poset(0)


def test_poset_validation():
    with pytest.raises(ValidationError, match="antisymmetric"):
        Poset(2, ((True, True), (True, True)))
    with pytest.raises(ValidationError, match="transitive"):
        Poset(3, ((True, True, False), (False, True, True), (False, False, True)))
    vee = Poset.from_relations(3, [(1, 2), (1, 3)])
    assert not vee.is_chain and sorted(vee.covers()) == [(0, 1), (0, 2)]


def test_make_ramified_examples():
    one = sp.identity(1)
    a1 = sp.make_partition([[0], [1]], sp.double(1))
    assert make_ramified((one, one), CHAIN2) == unit(1)
    make_ramified((a1, one), CHAIN2)
    with pytest.raises(ValidationError, match="level 1 does not refine level 2"):
        make_ramified((one, a1), CHAIN2)


def test_basis_sizes():
    assert len(BASIS1) == 3
    assert len(BASIS2) == 60
    assert len(enumerate_basis(1, CHAIN1)) == 2
    assert len(set(BASIS2)) == 60


@pytest.mark.parametrize("m,count", [(2, 3), (3, 12), (4, 60), (5, 358), (6, 2471)])
def test_count_chain2_values(m, count):
    assert count_chain2(m) == count


@pytest.mark.parametrize("m", range(0, 6))
def test_count_chain2_matches_bruteforce(m):
    assert count_chain2(m) == naive_chain_count(m) == len(enumerate_ramified(sp.plain(m), CHAIN2))


def test_count_chain2_matches_enumeration_to_eight():
    for m in (6, 7, 8):
        assert len(enumerate_ramified(sp.plain(m), CHAIN2)) == count_chain2(m)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_basis_count_is_chain_count(n):
    assert len(enumerate_basis(n)) == count_chain2(2 * n)


def test_general_poset_enumeration():
    vee = Poset.from_relations(3, [(1, 2), (1, 3)])
    ps = sp.enumerate_partitions(3)
    naive = sum(1 for a, b, c in product(ps, repeat=3) if sp.refines(a, b) and sp.refines(a, c))
    assert len(enumerate_ramified(sp.plain(3), vee)) == naive
    assert len(enumerate_ramified(sp.plain(3), chain_poset(3))) == naive_chain_count(3, 3)


def test_compose_identity_and_closure_exhaustive():
    for n, basis in ((1, BASIS1), (2, BASIS2)):
        one = unit(n)
        for a in basis:
            assert compose_ramified(one, a) == (a, (0, 0))
            for b in basis:
                d, _ = compose_ramified(a, b)
                make_ramified(d.levels, CHAIN2)


def test_compose_closure_random_n3():
    basis = enumerate_basis(3)
    rng = random.Random(7)
    for _ in range(1000):
        d, _ = compose_ramified(rng.choice(basis), rng.choice(basis))
        make_ramified(d.levels, CHAIN2)


def test_inner_only_closed_component_exists():
    # a product whose only closed component is an inner one: scalar Q1
    basis = enumerate_basis(3)
    hit = next(((a, b) for a in basis for b in basis if compose_ramified(a, b)[1] == (1, 0)), None)
    assert hit is not None


def test_e_T_squares_to_q_pi():
    for n in (1, 2, 3):
        e = next(iter(e_T(PartitionAlgebra(n)).terms))
        assert compose_ramified(e, e) == (e, (1, 1))


def test_compose_rejects_mismatch():
    with pytest.raises(ValidationError):
        compose_ramified(unit(1), unit(2))


def test_opposite():
    rng = random.Random(3)
    assert opposite(unit(3)) == unit(3)
    basis = enumerate_basis(3)
    for _ in range(100):
        a = rng.choice(basis)
        assert opposite(opposite(a)) == a
        assert prop_profile(opposite(a)).lam == prop_profile(a).lam


def test_juxtapose():
    assert juxtapose(unit(2), unit(1)) == unit(3)
    a = parse_serial("{{1}}{{1'}}")
    j = juxtapose(a, unit(2))
    assert j.ground == sp.double(3)
    assert print_serial(j) == "{{1}}{{2 2'}}{{3 3'}}{{1'}}"


def test_prop_profile_examples():
    a = parse_serial("{{1 2}{1' 2'}}")
    p = prop_profile(a)
    assert p.lam == (0,) and p.env == 1 and p.prop == (0, 1)
    for n in (1, 2, 3):
        p = prop_profile(unit(n))
        assert p.lam == (1,) * n and p.env == n


def test_prop_profile_consistency():
    for a in BASIS2:
        p = prop_profile(a)
        assert sum(p.lam) == p.prop[0] and len(p.lam) == p.prop[1]
        assert p.env == envelope(p.lam) <= 2


def test_envelope_never_grows():
    rng = random.Random(11)
    basis = enumerate_basis(3)
    for _ in range(500):
        a, b = rng.choice(basis), rng.choice(basis)
        assert prop_profile(compose_ramified(a, b)[0]).env <= prop_profile(a).env


def test_lambda_decreases_under_product_n2():
    for a in BASIS2:
        la = prop_profile(a).lam
        for b in BASIS2:
            d, _ = compose_ramified(a, b)
            assert lambda_leq(prop_profile(d).lam, la)


def test_prop_indices():
    assert sorted(prop_indices(1)) == [(), (0,), (1,)]
    assert len(prop_indices(2)) == 7
    assert prop_index([0, 2, 1]) == (2, 1, 0)
    assert envelope((3, 2, 2, 1, 1, 1, 0)) == 11


@pytest.mark.parametrize("text,levels", [
    ("{{1 1'}}", ([[0, 1]], [[0, 1]])),
    ("{{1}{1'}}", ([[0], [1]], [[0, 1]])),
    ("{{1}}{{1'}}", ([[0], [1]], [[0], [1]])),
])
def test_parse_serial_examples(text, levels):
    a = parse_serial(text)
    g = sp.double(1)
    assert a.levels == tuple(sp.make_partition(b, g) for b in levels)
    assert print_serial(a) == text


@pytest.mark.parametrize("bad", ["{{1}", "{{1 1}}{{1'}}", "{{1}}", "{{1 1'}{1}}", "{{1 2'}}{{2}{1'}}x"])
def test_parse_serial_errors(bad):
    with pytest.raises(ValidationError):
        parse_serial(bad)


def test_serial_and_json_round_trip():
    for a in BASIS1 + BASIS2:
        assert parse_serial(print_serial(a)) == a
        assert from_json(to_json(a)) == a


@given(st.randoms(use_true_random=False))
def test_serial_round_trip_random_n3(rnd):
    a = rnd.choice(enumerate_basis(3))
    assert parse_serial(print_serial(a), n=3) == a


def test_serial_deeper_chain():
    a = parse_serial("{{{1}}{{1'}}}")
    assert a.poset == chain_poset(3)
    assert print_serial(a) == "{{{1}}{{1'}}}"
