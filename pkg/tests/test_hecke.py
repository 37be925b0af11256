from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckecross.errors import PairMismatch
from heckecross.groups import HeckePair, symmetric_group
from heckecross.hecke import (
    HeckeElement,
    double_coset_product,
    hecke_basis,
    hecke_mul,
    hecke_mul_cosets,
    hecke_star,
    hecke_structure_table,
)
from heckecross.scalars import GaussQ
from oracles import hecke_expand, hecke_indicator, hecke_product

S3 = symmetric_group(3)
S4 = symmetric_group(4)


def pair(G, *labels):
    return HeckePair(G, G.generate([G.element(l) for l in labels]))


PAIRS = {
    "s3_transposition": pair(S3, "(1,2)"),
    "s4_s3": pair(S4, "(1,2)", "(1,2,3)"),
    "s4_double_transposition": pair(S4, "(1,2)(3,4)"),
}

# structure constants from the brute-force convolution oracle, frozen
FROZEN = {
    "s3_transposition": {
        ("(2,3)", "(2,3)"): {"()": "2", "(2,3)": "1"},
    },
    "s4_s3": {
        ("(3,4)", "(3,4)"): {"()": "3", "(3,4)": "2"},
    },
    "s4_double_transposition": {
        ("(3,4)", "(3,4)"): {"()": "1"},
        ("(2,3)", "(2,3)"): {"()": "2", "(1,3)(2,4)": "2"},
        ("(2,3)", "(2,4,3)"): {"(3,4)": "2", "(1,3,2,4)": "2"},
        ("(2,3,4)", "(2,4,3)"): {"()": "2", "(1,3)(2,4)": "2"},
        ("(2,4)", "(1,3,2,4)"): {"(2,3,4)": "1"},
        ("(1,3,2,4)", "(1,3,2,4)"): {"()": "1"},
        ("(3,4)", "(2,3)"): {"(2,3,4)": "1"},
    },
}


def labelled(P, h):
    return {P.G.label(g): str(c) for g, c in sorted(h.coeffs.items())}


def test_t_squared_is_two_plus_t():
    P = PAIRS["s3_transposition"]
    one = HeckeElement.one(P)
    T = HeckeElement.basis_element(P, P.G.element("(2,3)"))
    assert T * T == one.scale(2) + T


@pytest.mark.parametrize("name", list(FROZEN))
def test_frozen_structure_constants(name):
    P = PAIRS[name]
    G = P.G
    for (a, b), expect in FROZEN[name].items():
        prod = HeckeElement.basis_element(P, G.element(a)) * HeckeElement.basis_element(P, G.element(b))
        assert labelled(P, prod) == expect


@pytest.mark.parametrize("name", list(PAIRS))
def test_table_matches_oracle(name):
    P = PAIRS[name]
    G = P.G
    gamma = sorted(P.gamma.members)
    for (g, s), h in hecke_structure_table(P).items():
        ref = hecke_expand(G, gamma, hecke_product(G, gamma, hecke_indicator(G, gamma, g), hecke_indicator(G, gamma, s)))
        assert {k: GaussQ(v) for k, v in ref.items()} == h.coeffs


@pytest.mark.parametrize("name", list(PAIRS))
def test_associative_on_basis_triples(name):
    B = hecke_basis(PAIRS[name])
    for a in B:
        for b in B:
            ab = a * b
            for c in B:
                assert ab * c == a * (b * c)


@pytest.mark.parametrize("name", list(PAIRS))
def test_star_is_twisted_anti_involution(name):
    P = PAIRS[name]
    B = hecke_basis(P)
    for a in B:
        assert a.star().star() == a
        for b in B:
            assert (a * b).star() == b.star() * a.star()
    g = P.dc_reps[-1]
    x = HeckeElement(P, {g: GaussQ(1, 2)})
    assert hecke_star(x) == HeckeElement(P, {P.dc_rep(P.G.inv[g]): GaussQ(1, -2) * GaussQ(P.delta(P.G.inv[g]))})


@pytest.mark.parametrize("name", list(PAIRS))
def test_three_presentations_agree(name):
    P = PAIRS[name]
    assert hecke_structure_table(P, "double_cosets") == hecke_structure_table(P, "cosets") == hecke_structure_table(P, "closed_form")
    for g in P.dc_reps:
        for s in P.dc_reps:
            assert double_coset_product(P, g, s) == hecke_mul(HeckeElement.basis_element(P, g), HeckeElement.basis_element(P, s))


gauss = st.builds(GaussQ, st.fractions(min_value=-5, max_value=5, max_denominator=4), st.integers(-3, 3))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_random_elements_form_star_algebra(data):
    P = PAIRS["s4_double_transposition"]
    reps = P.dc_reps

    def elem():
        return HeckeElement(P, {r: data.draw(gauss) for r in data.draw(st.lists(st.sampled_from(reps), max_size=3))})

    a, b, c = elem(), elem(), elem()
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).star() == b.star() * a.star()
    assert hecke_mul_cosets(a, b) == hecke_mul(a, b)
    assert HeckeElement.one(P) * a == a == a * HeckeElement.one(P)


def test_mismatched_pairs_rejected():
    a = HeckeElement.one(PAIRS["s3_transposition"])
    b = HeckeElement.one(PAIRS["s4_s3"])
    with pytest.raises(PairMismatch):
        a * b


def test_delta_is_one_for_finite_groups():
    for P in PAIRS.values():
        assert all(P.delta(g) == Fraction(1) for g in P.G.elements)
