import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from rampart import potts
from rampart import setpart as sp
from rampart.algebra import PartitionAlgebra, diagonal_embed, special_diagram
from rampart.errors import CapExceededError, ValidationError
from rampart.potts import (
    ColorSpace,
    SparseOperator,
    all_ones,
    hom_check,
    kron_expand,
    kron_factorize,
    ordinary_potts,
    potts_rep,
)
from rampart.ramified import CHAIN1, CHAIN2, compose_ramified, diagonal, enumerate_basis, opposite, unit


def naive_potts(a, q):
    """Dense R(a) by testing every (row, column) colouring pair."""
    n, d = a.n, len(q)
    space = ColorSpace(n, tuple(q))
    colorings = list(product(product(*[range(x) for x in q]), repeat=n))
    A = np.zeros((space.dim, space.dim), dtype=np.int64)
    for top in colorings:
        for bottom in colorings:
            both = list(top) + list(bottom)
            if all(len({both[e][t] for e in blk}) == 1 for t in range(d) for blk in a.levels[t].blocks):
                A[space.index(top), space.index(bottom)] = 1
    return A


def test_color_space_round_trip():
    space = ColorSpace(3, (2, 3))
    assert space.dim == 216
    for s in range(space.dim):
        assert space.index(space.coloring(s)) == s
    # site 1 is the most significant digit, level 1 before level 2
    assert space.index(((1, 0), (0, 0), (0, 0))) == 108
    assert space.index(((0, 1), (0, 0), (0, 0))) == 36
    with pytest.raises(ValidationError):
        space.index(((2, 0), (0, 0), (0, 0)))
    with pytest.raises(ValidationError):
        ColorSpace(1, (0,))


@pytest.mark.parametrize("n,q", [(1, (2, 3)), (2, (2, 2)), (2, (1, 3))])
def test_matches_naive_oracle(n, q):
    rng = random.Random(n)
    basis = enumerate_basis(n)
    for a in rng.sample(basis, min(25, len(basis))):
        assert np.array_equal(potts_rep(a, q).to_dense(), naive_potts(a, q))


def test_unit_is_identity():
    for n in (0, 1, 2, 3):
        assert potts_rep(unit(n), (2, 3)) == SparseOperator.identity(6 ** n)


def test_homomorphism_exhaustive_n2():
    basis = enumerate_basis(2)
    reps = {a: potts_rep(a, (2, 2)) for a in basis}
    for a in basis:
        for b in basis:
            d, (c1, c2) = compose_ramified(a, b)
            assert reps[a] @ reps[b] == reps[d].scale(2 ** c1 * 2 ** c2)


def test_homomorphism_random_n3():
    basis = enumerate_basis(3)
    rng = random.Random(3)
    for _ in range(60):
        assert hom_check(rng.choice(basis), rng.choice(basis), (2, 3))


def test_pre_idempotent_square():
    a = special_diagram("Ai_Ai", 2, 1)
    R = potts_rep(a, (2, 3))
    assert R @ R == R.scale(6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kronecker_formulas(n):
    q1, q2 = 2, 3
    for i in range(1, n + 1):
        left, right = np.eye(6 ** (i - 1), dtype=np.int64), np.eye(6 ** (n - i), dtype=np.int64)
        both = kron_expand([left, all_ones(q1), all_ones(q2), right])
        inner = kron_expand([left, all_ones(q1), np.eye(q2, dtype=np.int64), right])
        assert np.array_equal(potts_rep(special_diagram("Ai_Ai", n, i), (q1, q2)).to_dense(), both)
        assert np.array_equal(potts_rep(special_diagram("Ai_1", n, i), (q1, q2)).to_dense(), inner)


def test_kron_factorize():
    a = special_diagram("Ai_Ai", 3, 2)
    factors = kron_factorize(a, (2, 3))
    assert [f.shape for f in factors] == [(6, 6)] * 3
    assert np.array_equal(factors[0], np.eye(6)) and np.array_equal(factors[1], all_ones(6))
    assert all(np.array_equal(f, np.eye(6)) for f in kron_factorize(unit(2), (2, 3)))
    assert kron_factorize(special_diagram("1_Aij", 2, 1, 2), (2, 3)) is None
    rng = random.Random(0)
    for a in rng.sample(enumerate_basis(2), 30):
        fs = kron_factorize(a, (2, 3))
        if fs is not None:
            assert np.array_equal(kron_expand(fs), potts_rep(a, (2, 3)).to_dense())


def test_opposite_is_transpose():
    for a in enumerate_basis(2):
        assert potts_rep(opposite(a), (2, 3)) == potts_rep(a, (2, 3)).transpose()


def test_diagonal_image_is_ordinary_potts():
    for p in sp.enumerate_partitions(sp.double(2)):
        assert np.array_equal(potts_rep(diagonal(p, CHAIN2), (2, 3)).to_dense(), ordinary_potts(p, 6))
    for p in sp.enumerate_partitions(sp.double(2)):
        assert np.array_equal(potts_rep(diagonal(p, CHAIN1), (4,)).to_dense(), ordinary_potts(p, 4))


def test_element_linear_extension():
    alg = PartitionAlgebra(2, q=(2, 3))
    a, b = special_diagram("Ai_Ai", 2, 1), special_diagram("si_si", 2, 1)
    x = alg.element({a: 3, b: Fraction(1, 2)})
    expect = potts_rep(a, (2, 3)).scale(3) + potts_rep(b, (2, 3)).scale(Fraction(1, 2))
    assert potts_rep(x, (2, 3)) == expect
    y = alg.element({b: 2})
    assert potts_rep(x * y, (2, 3)) == potts_rep(x, (2, 3)) @ potts_rep(y, (2, 3))
    ordinary = PartitionAlgebra(2, CHAIN1, q=(6,))
    p = ordinary.basis()[3]
    z = ordinary.basis_element(p, 5)
    image = potts_rep(diagonal_embed(z, target=alg), (2, 3)).to_dense()
    assert np.array_equal(image, 5 * ordinary_potts(p.levels[0], 6))


def test_symbolic_coefficients_rejected():
    alg = PartitionAlgebra(1)
    x = alg.basis_element(unit(1), alg.scalar((1, 0)))
    with pytest.raises(ValidationError):
        potts_rep(x, (2, 3))
    assert potts_rep(alg.one(), (2, 3)) == SparseOperator.identity(6)


def test_validation_and_cap(monkeypatch):
    with pytest.raises(ValidationError):
        potts_rep(unit(1), (2,))
    with pytest.raises(ValidationError):
        potts_rep(unit(1), (2, 0))
    monkeypatch.setattr(potts, "DIM_CAP", 100)
    with pytest.raises(CapExceededError):
        potts_rep(unit(3), (2, 3))


def test_sparse_operator_algebra():
    A = SparseOperator.from_dense(np.array([[1, 2], [0, 3]]))
    B = SparseOperator.from_dense(np.array([[0, 1], [1, 0]]))
    assert (A @ B).to_dense().tolist() == [[2, 1], [3, 0]]
    assert (A + A.scale(-1)).nnz == 0
    assert A.transpose().to_dense().tolist() == [[1, 0], [2, 3]]
    assert A.triplets() == "0 0 1\n0 1 2\n1 1 3\n"
    with pytest.raises(ValidationError):
        A @ SparseOperator.identity(3)
