import numpy as np
import pytest

from conftest import system
from heckecross.errors import NotEssential
from heckecross.reps import crossed_regular_rep
from heckecross.scalars import GaussQ, Mat
from heckecross.starmult import (
    FunctionsAlgebra,
    direct_sum,
    extend_rep,
    extend_rep_exact,
    functions_multiplier,
    ideal_generated,
    identity_multiplier,
    is_essential,
    is_semiprime,
    left_multiplier,
    matrix_algebra,
    meets_every_ideal,
    multiplier_algebra,
    operator_algebra,
    truncated_polynomial,
    universal_map,
    zero_product,
)

ONE, ZERO = GaussQ(1), GaussQ(0)


def test_essential_examples():
    assert is_essential(matrix_algebra(2))
    assert is_essential(truncated_polynomial(2))
    res = is_essential(zero_product())
    assert not res and res.witness == (ONE,)


def test_semiprime_examples():
    assert is_semiprime(matrix_algebra(2))
    assert is_semiprime(direct_sum(matrix_algebra(1), matrix_algebra(2)))
    res = is_semiprime(truncated_polynomial(2))
    assert not res and res.witness == (ZERO, ONE)
    res = is_semiprime(truncated_polynomial(3))
    assert not res and res.witness == (ZERO, ZERO, ONE)


@pytest.mark.parametrize("A", [matrix_algebra(2), truncated_polynomial(3), direct_sum(matrix_algebra(1), matrix_algebra(2))], ids=["M2", "X3", "M1+M2"])
def test_multipliers_of_unital_algebras(A):
    M = multiplier_algebra(A)
    assert len(M) == A.dim
    for T in M:
        assert T.is_adjointable()
        # T·L(A) = 0 would force T = 0
        assert any(any(any(r) for r in T.compose(left_multiplier(A, e)).T) for e in A.basis())
    alg = operator_algebra(M)
    assert alg.dim == A.dim
    assert bool(is_essential(alg))
    assert bool(is_semiprime(alg)) == bool(is_semiprime(A))


def test_multiplier_algebra_needs_essential():
    with pytest.raises(NotEssential):
        multiplier_algebra(zero_product(2))


def test_semiprime_essential_meets_every_ideal():
    A = direct_sum(matrix_algebra(1), matrix_algebra(2))
    ideals = [ideal_generated(A, [A.e(0)]), ideal_generated(A, [A.e(1)]), ideal_generated(A, [A.e(0), A.e(2)])]
    assert [len(I) for I in ideals] == [1, 4, 5]
    assert meets_every_ideal(A, ideals)
    assert is_essential(A)


def test_universal_map_into_multipliers():
    A = matrix_algebra(2)
    C = direct_sum(matrix_algebra(2), matrix_algebra(1))
    emb = [C.e(k) for k in range(4)]
    phi = universal_map(C, A, emb)
    assert phi.unique
    # the M1 summand annihilates A, so j(A) is not essential in C and φ has a kernel
    assert not phi.injective
    assert universal_map(A, A, A.basis()).injective


def test_functions_backend_multipliers_are_lazy_functions():
    A = FunctionsAlgebra()
    assert not A.has_unit_on(range(5))
    T = functions_multiplier(
        lambda f: {n: GaussQ(n) * c for n, c in f.items() if n},
        lambda f: {n: GaussQ(n) * c for n, c in f.items() if n},
        range(6),
    )
    assert T.fn(1000) == GaussQ(1000)
    assert T({3: ONE, 7: GaussQ(0, 1)}) == {3: GaussQ(3), 7: GaussQ(0, 7)}
    with pytest.raises(ValueError):
        functions_multiplier(lambda f: {n + 1: c for n, c in f.items()}, lambda f: f, range(3))


def test_diagonal_multiplier_extends_diagonally():
    # π(δ_n) = E_nn on C^4; T = multiplication by c(n)
    c = [GaussQ(2), GaussQ(0, 1), GaussQ(-1), GaussQ(3, 1)]
    pi = [np.diag([1.0 if k == n else 0.0 for k in range(4)]).astype(complex) for n in range(4)]
    cols = [[c[n] if m == n else 0 for m in range(4)] for n in range(4)]
    ext = extend_rep(pi, cols)
    assert np.max(np.abs(ext.matrix - np.diag([complex(z) for z in c]))) < 1e-12
    assert ext.residual < 1e-12 and ext.uniqueness_gap < 1e-12


def test_extension_of_left_multiplications_is_exact():
    A = matrix_algebra(2)
    pi = [Mat.unit(2, 2, i, j) for i in range(2) for j in range(2)]
    for k in range(4):
        assert extend_rep_exact(pi, left_multiplier(A, A.e(k))) == pi[k]
    assert extend_rep_exact(pi, identity_multiplier(A)) == Mat.identity(2)


@pytest.mark.parametrize("name", ["point_s3", "normal_s3a3", "transf_s3"])
def test_extension_of_left_multiplications_numeric(name):
    rep = crossed_regular_rep(system(name))
    A = rep.algebra
    n = A.dim
    for k in range(n):
        cols = [[A.table[k][b].get(j, 0) for j in range(n)] for b in range(n)]
        ext = extend_rep(rep.matrices, cols, factors=rep.factors())
        assert ext.residual < 1e-12
        assert np.max(np.abs(ext.matrix - rep.matrices[k])) < 1e-12
    ident = [[1 if j == b else 0 for j in range(n)] for b in range(n)]
    ext = extend_rep(rep.matrices, ident, factors=rep.factors())
    assert np.max(np.abs(ext.matrix - np.eye(rep.space_dim))) < 1e-12
