"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line with its wall time; conftest prints the
lines in the terminal summary.
"""

import functools
import random
import time

import numpy as np
import pytest

from conftest import GOOD, system
from heckecross import cli
from heckecross import crossed as cx
from heckecross import reps
from heckecross.errors import AxiomError
from heckecross.groups import HeckePair, symmetric_group
from heckecross.hecke import HeckeElement, hecke_basis, hecke_mul, hecke_star
from heckecross.identities import all_middles, random_element
from heckecross.scalars import GaussQ, Mat
from heckecross.scenario import load_fixture
from heckecross.sections import orbit_basis, orbit_basis_element
from heckecross.starmult import (
    extend_rep,
    extend_rep_exact,
    is_semiprime,
    left_multiplier,
    matrix_algebra,
    multiplier_algebra,
    truncated_polynomial,
)

SEED = 20240601
TAU = 1e-9
RESULTS: dict[int, str] = {}


def criterion(number, title, budget=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            verdict = "FAIL"
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                assert budget is None or elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
                verdict = "PASS"
            finally:
                elapsed = time.perf_counter() - start
                limit = f" (budget {budget}s)" if budget else ""
                RESULTS[number] = f"criterion {number:2d} {verdict}  {title}  [{elapsed:.2f}s{limit}]"

        return run

    return wrap


def report_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


# 1 ---------------------------------------------------------------------------


def _pair(G, *labels):
    return HeckePair(G, G.generate([G.element(l) for l in labels]))


@criterion(1, "Hecke axioms on three pairs, T^2 = 2 + T", budget=1.0)
def test_hecke_axioms():
    S3, S4 = symmetric_group(3), symmetric_group(4)
    for P in (_pair(S3, "(1,2)"), _pair(S4, "(1,2)", "(1,2,3)"), _pair(S4, "(1,2)(3,4)")):
        B = hecke_basis(P)
        prods = {(i, j): hecke_mul(a, b) for i, a in enumerate(B) for j, b in enumerate(B)}
        for i in range(len(B)):
            for j in range(len(B)):
                for k, c in enumerate(B):
                    assert hecke_mul(prods[i, j], c) == hecke_mul(B[i], prods[j, k])
        for i, a in enumerate(B):
            assert hecke_star(hecke_star(a)) == a
            for j, b in enumerate(B):
                assert hecke_star(prods[i, j]) == hecke_mul(hecke_star(b), hecke_star(a))
        for g in P.dc_reps:
            want = HeckeElement.basis_element(P, P.G.inv[g]).scale(GaussQ(P.delta(g)))
            assert hecke_star(HeckeElement.basis_element(P, g)) == want
    P = _pair(S3, "(1,2)")
    T = HeckeElement.basis_element(P, P.G.element("(2,3)"))
    one = HeckeElement.basis_element(P, P.G.identity)
    assert hecke_mul(T, T) == one.scale(GaussQ(2)) + T


# 2 ---------------------------------------------------------------------------


@criterion(2, "point scenario crossed product is the Hecke algebra", budget=1.0)
def test_point_crossed_product_is_hecke():
    S = system("point_s3")
    P = S.pair
    B = hecke_basis(P)
    assert S.dim == len(B)
    for a in B:
        assert cx.embed_hecke(S, a).star() == cx.embed_hecke(S, hecke_star(a))
        for b in B:
            assert cx.conv(cx.embed_hecke(S, a), cx.embed_hecke(S, b)) == cx.embed_hecke(S, hecke_mul(a, b))


# 3 ---------------------------------------------------------------------------


@criterion(3, "triple product formulas equal convolution on transf_s3 and dims2", budget=30.0)
def test_triple_product_oracle():
    for name in ("transf_s3", "transf_s3_dims2"):
        S = system(name)
        P = S.pair
        for g in P.dc_reps:
            for s in P.dc_reps:
                for mid in all_middles(S):
                    ref = cx.triple_product_by_conv(S, g, mid, s)
                    for method in ("auto", "first", "second", "third"):
                        assert cx.triple_product(S, g, mid, s, method) == ref, (name, g, mid, s, method)


# 4 ---------------------------------------------------------------------------


@criterion(4, "free fast path and free counting", budget=10.0)
def test_free_fast_path():
    for name in ("transf_s3", "transf_s3_dims2"):
        S = system(name)
        G, P = S.G, S.pair
        assert S.free
        for g in P.dc_reps:
            for s in P.dc_reps:
                for mid in all_middles(S):
                    assert cx.triple_product(S, g, mid, s, "free") == cx.triple_product(S, g, mid, s, "third")
        for w in G.elements:
            for v in G.elements:
                K = P.gamma_g(G.mul[w][v])
                index = len(K) // len(K.intersect(G.conjugate(S.gamma, w)))
                for y in S.groupoid.units:
                    c = cx.counting(S, w, v, y)
                    assert (c.n, c.d) == (1, index), (w, v, y)


# 5 ---------------------------------------------------------------------------


@criterion(5, "span decomposition round trip, 100 elements per scenario")
def test_decomposition_round_trip():
    for name in GOOD:
        S = system(name)
        rng = random.Random(f"{SEED}:{name}")
        for _ in range(100):
            f = random_element(S, rng)
            total = cx.zero(S)
            for a, x, g in cx.span_decompose(f):
                total = total + cx.span_element(S, a, x, g)
            assert total == f, name


# 6 ---------------------------------------------------------------------------


@criterion(6, "normal subgroup reduction on (S3, A3)")
def test_normal_reduction():
    S = system("normal_s3a3")
    assert cx.structure_table(S) == cx.normal_quotient_table(S)
    for u in S.G.elements:
        for v in S.G.elements:
            for y in S.groupoid.units:
                assert cx.counting(S, u, v, y).N == 1
                assert len(cx.e_set(S, u, v, y)) == 1


# 7 ---------------------------------------------------------------------------


@criterion(7, "trivial action tensor factorization")
def test_trivial_action_factorization():
    S = system("trivial_action")
    P = S.pair
    ob = S.base
    for k in range(len(orbit_basis(ob))):
        f = cx.embed_section(S, orbit_basis_element(ob, k))
        for g in P.dc_reps:
            h = cx.embed_hecke(S, HeckeElement.basis_element(P, g))
            assert f * h == h * f
    assert S.dim == len(orbit_basis(ob)) * len(hecke_basis(P))


# 8 ---------------------------------------------------------------------------


@criterion(8, "covariant pairs and representations correspond", budget=5.0)
def test_representation_bijection():
    pairs = [
        reps.point_pair(system("point_s3")),
        reps.point_pair(system("point_s4")),
        reps.invariant_section_pair(system("normal_s3a3")),
    ]
    for pair in pairs:
        S = pair.system
        Phi = reps.integrated_form(pair)
        back = reps.restrict_rep(S, Phi)
        assert reps.pair_distance(pair, back) < TAU
        assert reps.rep_distance(Phi, reps.integrated_form(back)) < TAU


# 9 ---------------------------------------------------------------------------


@criterion(9, "essential algebras, multipliers and extensions")
def test_multiplier_suite():
    res = is_semiprime(truncated_polynomial(2))
    assert not res
    assert res.witness == (GaussQ(0), GaussQ(1))
    for A in (matrix_algebra(2), matrix_algebra(3), truncated_polynomial(3)):
        assert len(multiplier_algebra(A)) == A.dim
    A = matrix_algebra(2)
    pi = [Mat.unit(2, 2, i, j) for i in range(2) for j in range(2)]
    for k, e in enumerate(A.basis()):
        assert extend_rep_exact(pi, left_multiplier(A, e)) == pi[k]
    for name in ("point_s3", "normal_s3a3", "transf_s3"):
        rep = reps.crossed_regular_rep(system(name))
        alg = rep.algebra
        n = alg.dim
        for k in range(n):
            cols = [[alg.table[k][b].get(j, 0) for j in range(n)] for b in range(n)]
            ext = extend_rep(rep.matrices, cols, factors=rep.factors())
            assert np.max(np.abs(ext.matrix - rep.matrices[k])) < 1e-12


# 10 --------------------------------------------------------------------------


@criterion(10, "bad fixtures rejected at the right stage, good fixtures verify")
def test_validation_pipeline(capsys):
    expected = {"bad_flip": ("gamma_good", (1, 1)), "bad_intersection": ("gamma_intersection", (0, 1))}
    for name, (stage, witness) in expected.items():
        with pytest.raises(AxiomError) as exc:
            load_fixture(name)
        assert exc.value.stage == stage
        assert tuple(exc.value.witness) == witness
        assert cli.main(["check-action", f"{name}.json"]) == 1
    for name in GOOD:
        assert cli.main(["verify-identities", f"{name}.json"]) == 0, name
    capsys.readouterr()

