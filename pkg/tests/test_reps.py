import numpy as np
import pytest

from conftest import system
from heckecross import crossed as cx
from heckecross import reps
from heckecross.errors import Degenerate, NotCovariant, NotUnital, ScenarioMismatch
from heckecross.hecke import HeckeElement, hecke_basis
from heckecross.scalars import GaussQ

TAU = 1e-9


def test_regular_hecke_rep_of_s3():
    P = system("point_s3").pair
    mu = reps.regular_rep(P)
    T = mu[P.G.element("(2,3)")]
    assert np.array_equal(mu[P.G.identity], np.eye(3))
    assert np.max(np.abs(T @ T - (2 * np.eye(3) + T))) < 1e-12
    assert reps.hecke_rep_residual(P, mu) < 1e-12
    x = HeckeElement(P, {P.dc_reps[1]: GaussQ(1, 2)})
    assert np.max(np.abs(reps.hecke_rep_of(mu, x.star()) - reps.hecke_rep_of(mu, x).conj().T)) < 1e-12


@pytest.mark.parametrize("name", ["point_s3", "point_s4", "pair4_s4"])
def test_regular_hecke_rep_is_a_unital_star_homomorphism(name):
    P = system(name).pair
    assert reps.hecke_rep_residual(P, reps.regular_rep(P)) < 1e-12


def pairs():
    return {
        "point_s3": reps.point_pair(system("point_s3")),
        "point_s4": reps.point_pair(system("point_s4")),
        "normal_s3a3": reps.invariant_section_pair(system("normal_s3a3")),
    }


@pytest.mark.parametrize("name", ["point_s3", "point_s4", "normal_s3a3"])
def test_round_trips_are_identities(name):
    pair = pairs()[name]
    S = pair.system
    assert reps.check_covariant(pair).ok
    Phi = reps.integrated_form(pair)
    back = reps.restrict_rep(S, Phi)
    assert reps.pair_distance(pair, back) < TAU
    assert reps.rep_distance(Phi, reps.integrated_form(back)) < TAU


@pytest.mark.parametrize("name", ["point_s3", "point_s4", "normal_s3a3"])
def test_consequences_of_covariance(name):
    pair = pairs()[name]
    first, second = reps.strange_identity_residuals(pair)
    assert first < TAU and second < TAU
    assert reps.unit_span_gap(pair) < TAU


def test_point_integrated_form_is_mu():
    pair = reps.point_pair(system("point_s3"))
    S = pair.system
    Phi = reps.integrated_form(pair)
    for g in S.pair.dc_reps:
        h = cx.embed_hecke(S, HeckeElement.basis_element(S.pair, g))
        assert np.max(np.abs(Phi(h.coords()) - pair.mu[g])) < 1e-12
    back = reps.restrict_rep(S, Phi)
    assert np.max(np.abs(back.pi.matrices[0] - np.eye(3))) < 1e-12


def test_integrated_form_on_span_elements_is_the_block_product():
    pair = reps.invariant_section_pair(system("normal_s3a3"))
    S = pair.system
    Phi = reps.integrated_form(pair)
    for g, x, i, j in S.basis():
        a = S.bundle.matrix_unit(x, i, j)
        f = cx.span_element(S, a, x, g)
        assert np.max(np.abs(Phi(f.coords()) - pair.block(a, x, g))) < 1e-12
    f = cx.basis_element(S, 3) + cx.basis_element(S, 1).scale(GaussQ(0, 2))
    assert np.max(np.abs(Phi(f.star().coords()) - Phi(f.coords()).conj().T)) < 1e-12


def test_perturbed_mu_is_rejected():
    pair = reps.invariant_section_pair(system("normal_s3a3"))
    g = pair.system.pair.dc_reps[1]
    bad = reps.perturb_mu(pair, g)
    report = reps.check_covariant(bad)
    assert not report.ok and report.max_residual > 0.05
    assert report.failing[0][0] == g or report.failing[0][1] == g
    with pytest.raises(NotCovariant):
        reps.integrated_form(bad)


def test_mu_must_be_unital():
    pair = reps.point_pair(system("point_s3"))
    bad = reps.perturb_mu(pair, pair.system.G.identity, (0, 0), 0.5)
    with pytest.raises(NotUnital):
        reps.check_covariant(bad)


def test_degenerate_representations_rejected():
    S = system("point_s3")
    alg = reps.crossed_alg(S)
    zero = reps.Rep(alg, [np.zeros((2, 2), dtype=complex) for _ in range(alg.dim)])
    assert not zero.is_nondegenerate()
    with pytest.raises(Degenerate):
        reps.restrict_rep(S, zero)


def test_constructors_check_their_scenarios():
    with pytest.raises(ScenarioMismatch):
        reps.point_pair(system("normal_s3a3"))
    with pytest.raises(ScenarioMismatch):
        reps.invariant_section_pair(system("transf_s3"))


def test_character_twist_is_covariant():
    S = system("normal_s3a3")
    odd = S.pair.dc_reps[1]
    pair = reps.invariant_section_pair(S, {S.G.identity: 1, odd: -1})
    assert reps.check_covariant(pair).ok
    Phi = reps.integrated_form(pair)
    assert reps.pair_distance(pair, reps.restrict_rep(S, Phi)) < TAU


def test_regular_crossed_rep_round_trip_on_free_scenario():
    S = system("transf_s3")
    Phi = reps.crossed_regular_rep(S)
    assert Phi.homomorphism_residual() < 1e-12
    assert Phi.homomorphism_residual(probes=4) < 1e-12
    pair = reps.restrict_rep(S, Phi)
    report = reps.check_covariant(pair)
    assert report.ok and report.free_form_gap < TAU
    assert reps.rep_distance(Phi, reps.integrated_form(pair)) < TAU
    assert reps.hecke_rep_residual(S.pair, pair.mu) < TAU


def test_hecke_part_of_the_integrated_form():
    pair = reps.invariant_section_pair(system("normal_s3a3"))
    S = pair.system
    Phi = reps.integrated_form(pair)
    for h in hecke_basis(S.pair):
        got = Phi(cx.embed_hecke(S, h).coords())
        assert np.max(np.abs(got - reps.hecke_rep_of(pair.mu, h))) < 1e-12
