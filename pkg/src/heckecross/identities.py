"""Executable invariant suites, one function per module, run by ``hx verify-identities``.

Each suite returns a list of Check records.  Exhaustive where the scenario is
small; above the thresholds below, span-generator tuples are sampled with a
fixed seed so that runs stay deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from . import crossed as cx
from .bundles import check_h_good_bundle, h_good_conditions, transport
from .crossed import CrossedSystem
from .groupoids import OrbitGroupoid, check_h_good
from .groups import coset_stats, double_cosets, orbit_double_coset_bijection, restricted_double_coset_bijection
from .hecke import HeckeElement, double_coset_product, hecke_mul, hecke_star, hecke_structure_table
from .scalars import ONE, GaussQ, Mat, is_psd
from .sections import (
    MultiplierOp,
    OrbitSection,
    Section,
    alpha_bar,
    as_multiplier,
    multiplier_to_section,
    orbit_basis,
    orbit_basis_element,
    unit_multiplier,
)

SEED = 20240601
EXHAUSTIVE_TRIPLES = 6000
SAMPLED_TRIPLES = 150
EXHAUSTIVE_PAIRS = 3000
SAMPLED_PAIRS = 300


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _run(suite: str, name: str, fn: Callable[[], object]) -> Check:
    try:
        res = fn()
    except AssertionError as exc:
        return Check(suite, name, False, str(exc) or "assertion failed")
    except Exception as exc:  # a crash is a failed identity, reported not raised
        return Check(suite, name, False, f"{type(exc).__name__}: {exc}")
    if res is None or res is True:
        return Check(suite, name, True)
    return Check(suite, name, bool(res), "" if res else f"witness {res!r}")


def _fail(msg: str, witness=None):
    raise AssertionError(f"{msg}: {witness!r}" if witness is not None else msg)


# -- groups -----------------------------------------------------------------


def groups_suite(S: CrossedSystem) -> list[Check]:
    G, P, gamma = S.G, S.pair, S.gamma
    gact = S.action.groupoid_action
    units = sorted(S.groupoid.units)

    def partition():
        for B, C in [(gamma, gamma), (G.trivial(), gamma), (gamma, G.trivial())]:
            seen = set()
            for d in double_cosets(G, B, C):
                if seen & d.members:
                    _fail("double cosets overlap", d.rep)
                seen |= d.members
            if seen != set(G.elements):
                _fail("double cosets do not cover G")

    def restricted():
        # C ⊆ A ⊆ G with B a unit stabilizer: B\A/C ↔ (B∩A)\A/C
        for y in units:
            B = gact.stabilizer(y)
            for g in P.dc_reps:
                restricted_double_coset_bijection(G, B, gamma, P.gamma_g(g))
                restricted_double_coset_bijection(G, B, G.whole(), gamma)

    def orbit_bijection():
        sa = gact.as_set_action()
        for x in S.groupoid.arrows:
            for K, H in [(gamma, gamma), (G.whole(), gamma)] + [(gamma, P.gamma_g(g)) for g in P.dc_reps]:
                orbit_double_coset_bijection(sa, x, K, H)

    def stats():
        for g in G.elements:
            st = coset_stats(P, g)
            if st.L != P.R(G.inv[g]):
                _fail("L(g) ≠ R(g⁻¹)", g)
            for h in G.elements:
                if P.delta(G.mul[g][h]) != P.delta(g) * P.delta(h):
                    _fail("Δ is not multiplicative", (g, h))

    return [
        _run("groups", "double coset partition", partition),
        _run("groups", "restricted double coset bijection", restricted),
        _run("groups", "orbit / double coset bijection", orbit_bijection),
        _run("groups", "L, R, Δ relations", stats),
    ]


# -- hecke ------------------------------------------------------------------


def hecke_suite(S: CrossedSystem) -> list[Check]:
    P = S.pair
    basis = [HeckeElement.basis_element(P, g) for g in P.dc_reps]

    def assoc():
        for a in basis:
            for b in basis:
                ab = a * b
                for c in basis:
                    if ab * c != a * (b * c):
                        _fail("not associative", (a, b, c))

    def star():
        scalars = [GaussQ(1), GaussQ(0, 1), GaussQ(Fraction(1, 2), -3)]
        for a in basis:
            if a.star().star() != a:
                _fail("star is not involutive", a)
            for z in scalars:
                if a.scale(z).star() != a.star().scale(z.conj()):
                    _fail("star is not conjugate linear", (a, z))
            for b in basis:
                if (a * b).star() != b.star() * a.star():
                    _fail("star is not anti-multiplicative", (a, b))

    def presentations():
        t1 = hecke_structure_table(P, "double_cosets")
        t2 = hecke_structure_table(P, "cosets")
        t3 = hecke_structure_table(P, "closed_form")
        if not (t1 == t2 == t3):
            bad = next(k for k in t1 if not (t1[k] == t2[k] == t3[k]))
            _fail("structure tables disagree", bad)

    return [
        _run("hecke", "associativity on basis triples", assoc),
        _run("hecke", "Δ-twisted anti-involution", star),
        _run("hecke", "double-coset, coset and closed-form products agree", presentations),
    ]


# -- groupoids --------------------------------------------------------------


def _subgroups_of(S: CrossedSystem):
    G, gamma = S.G, S.gamma
    subs = {gamma.member_set: gamma}
    for h in gamma.members:
        K = G.generate([h])
        subs.setdefault(K.member_set, K)
    return list(subs.values())


def groupoids_suite(S: CrossedSystem) -> list[Check]:
    G, gamma = S.G, S.gamma
    gact = S.action.groupoid_action
    X = S.groupoid

    def quotient():
        og = OrbitGroupoid(gact, gamma, check=True)
        for x in X.arrows:
            k = og.orbit_of[x]
            qg = og.groupoid
            if qg.src[k] != og.orbit_of[X.src[x]] or qg.rng[k] != og.orbit_of[X.rng[x]]:
                _fail("source/range of orbits", x)
        unit_orbits = {og.orbit_of[u] for u in X.units}
        if unit_orbits != set(og.groupoid.units):
            _fail("unit space of X/H differs from X⁰/H")

    def transfer():
        for K in _subgroups_of(S):
            if not check_h_good(gact, K):
                _fail("Γ-good but not K-good", sorted(K.members))
        for g in G.elements:
            if not check_h_good(gact, G.conjugate(gamma, g)):
                _fail("Γ-good but not gΓg⁻¹-good", g)

    def conditions():
        res = h_good_conditions(S.action, gamma)
        if len(set(res.values())) != 1:
            _fail("equivalent conditions disagree", res)

    return [
        _run("groupoids", "orbit groupoid well defined", quotient),
        _run("groupoids", "goodness passes to subgroups and conjugates", transfer),
        _run("groupoids", "four goodness conditions agree", conditions),
    ]


# -- bundles ----------------------------------------------------------------


def bundles_suite(S: CrossedSystem) -> list[Check]:
    G, act = S.G, S.action
    B = S.bundle
    X = S.groupoid
    ob = S.base

    def hom():
        for g1 in G.generators or G.elements:
            for g2 in G.elements:
                g12 = G.mul[g1][g2]
                for x in X.arrows:
                    for _, a in B.matrix_units(x):
                        y, b = act.alpha(g2, x, a)
                        if act.alpha(g1, y, b) != act.alpha(g12, x, a):
                            _fail("α_{g1g2} ≠ α_{g1}α_{g2}", (g1, g2, x))

    def psd():
        for x in X.arrows:
            units = [a for _, a in B.matrix_units(x)]
            combo = units[0]
            for k, a in enumerate(units[1:], 2):
                combo = combo + a.scale(GaussQ(k, 1 - k))
            for a in units + [combo]:
                if not is_psd(a.adjoint() @ a):
                    _fail("a*a is not positive", x)

    def orbit_product():
        og = ob.base
        gamma = S.gamma.members
        for k1, x in enumerate(og.reps):
            for k2, y in enumerate(og.reps):
                hs = [h for h in gamma if act.groupoid_action.act[X.src[x]][h] == X.rng[y]]
                if not hs:
                    continue
                for _, a in B.matrix_units(x):
                    for _, b in B.matrix_units(y):
                        outs = {ob.product_with(k1, a, k2, b, h) for h in hs}
                        if len(outs) != 1:
                            _fail("orbit product depends on h̃", (x, y))

    def transports():
        for k, x in enumerate(ob.reps):
            for y in ob.base.members(k):
                for _, a in B.matrix_units(x):
                    transport(ob, a, x, y)

    return [
        _run("bundles", "α is a homomorphism", hom),
        _run("bundles", "a*a positive semidefinite", psd),
        _run("bundles", "orbit product independent of h̃", orbit_product),
        _run("bundles", "transport is unique", transports),
    ]


# -- sections ---------------------------------------------------------------


def _h_tilde(S, H, x, y):
    """Least h ∈ H with s(x)h = r(y), or None."""
    act = S.action.groupoid_action.act
    X = S.groupoid
    for h in sorted(H.members):
        if act[X.src[x]][h] == X.rng[y]:
            return h
    return None


def sections_suite(S: CrossedSystem, rng: random.Random, limit: int = 40) -> list[Check]:
    G, act = S.G, S.action
    X = S.groupoid
    B = S.bundle
    gact = act.groupoid_action.act
    subgroups = [S.gamma] + [S.pair.gamma_g(g) for g in S.pair.dc_reps if len(S.pair.gamma_g(g)) < len(S.gamma)]

    def sample(ob):
        basis = orbit_basis(ob)
        ks = list(range(len(basis)))
        if len(ks) > limit:
            ks = sorted(rng.sample(ks, limit))
        return [(basis[k][0], orbit_basis_element(ob, k)) for k in ks]

    def embedding():
        for H in subgroups:
            ob = S.obundle(H)
            for _, f in sample(ob):
                T = as_multiplier(f)
                if T != MultiplierOp.left(f.lift()):
                    _fail("ι(f) is not left multiplication by the lift", f)
                if not T.check_adjointable():
                    _fail("ι(f) not adjointable", f)
                if multiplier_to_section(T, ob) != f:
                    _fail("round trip through multipliers", f)

    def with_units():
        for H in subgroups:
            ob = S.obundle(H)
            for x, f in sample(ob):
                a = f.data[x]
                for u in X.units:
                    lhs = as_multiplier(f) @ unit_multiplier(B, {u: 1})
                    h = _h_tilde(S, H, x, u)
                    if h is None:
                        rhs = MultiplierOp.zero(B)
                    else:
                        z, b = act.alpha(G.inv[h], x, a)
                        rhs = MultiplierOp.left(Section.at(B, z, b))
                    if lhs != rhs:
                        _fail("ι([a]_{xH})ι(1_u)", (x, u))

    def nested():
        H = S.gamma
        obH = S.base
        for K in subgroups:
            obK = S.obundle(K)
            for x, f in sample(obH)[:12]:
                a = f.data[x]
                for y, f2 in sample(obK)[:12]:
                    b = f2.data[y]
                    lhs = as_multiplier(f) @ as_multiplier(f2)
                    h = _h_tilde(S, H, x, y)
                    if h is None:
                        rhs = MultiplierOp.zero(B)
                    else:
                        z, ah = act.alpha(G.inv[h], x, a)
                        rhs = as_multiplier(OrbitSection.at(obK, X.comp[(z, y)], ah @ b))
                    if lhs != rhs:
                        _fail("ι([a]_{xH})ι([b]_{yK})", (x, y))

    def split():
        H = S.gamma
        for K in subgroups:
            obK = S.obundle(K)
            for x, f in sample(S.base):
                a = f.data[x]
                Sx = S.action.groupoid_action.stabilizer(x)
                total = MultiplierOp.zero(B)
                for d in double_cosets(G, Sx, K, A=H):
                    z, b = act.alpha(G.inv[d.rep], x, a)
                    total = total + as_multiplier(OrbitSection.at(obK, z, b))
                if total != as_multiplier(f):
                    _fail("ι([a]_{xH}) ≠ Σ ι([α_{h⁻¹}(a)]_{xhK})", x)

    def conj_units():
        for x, f in sample(S.base):
            a = f.data[x]
            for g in G.elements:
                cg = G.conjugate(S.gamma, g)
                pts = {gact[X.src[x]][G.mul[G.mul[g][k]][G.inv[g]]] for k in S.gamma.members}
                lhs = as_multiplier(f) @ unit_multiplier(B, {p: 1 for p in pts})
                rhs = as_multiplier(OrbitSection.at(S.obundle(S.pair.gamma_g(g)), x, a))
                if lhs != rhs:
                    _fail("ι([a]_{xH})ι(1_{s(x)gHg⁻¹}) ≠ ι([a]_{xHᵍ})", (x, g))

    def alpha_ext():
        for x, f in sample(S.base)[:15]:
            a = f.data[x]
            T = as_multiplier(f)
            for g in G.elements:
                z, b = act.alpha(g, x, a)
                conj = S.obundle(G.conjugate(S.gamma, g))
                if alpha_bar(act, g, T) != as_multiplier(OrbitSection.at(conj, z, b)):
                    _fail("ᾱ_g ι([a]_{xH}) ≠ ι([α_g(a)]_{(xg⁻¹)(gHg⁻¹)})", (x, g))
            for h in S.gamma.members:
                if alpha_bar(act, h, T) != T:
                    _fail("ᾱ_h moves C_c(A/H)", (x, h))
        for u in X.units:
            for g in G.elements:
                if alpha_bar(act, g, unit_multiplier(B, {u: 1})) != unit_multiplier(B, {gact[u][G.inv[g]]: 1}):
                    _fail("ᾱ on unit functions is not the point action", (u, g))

    def ops():
        elems = [f for _, f in sample(S.base)]
        for f in elems:
            if f.star().star() != f:
                _fail("(f*)* ≠ f", f)
        one = OrbitSection.unit(S.base)
        for f in elems:
            if one * f != f or f * one != f:
                _fail("unit section is not an identity", f)
        for f in elems[:10]:
            for g in elems[:10]:
                if (f * g).lift() != f.lift() * g.lift():
                    _fail("orbit product differs from lifted convolution", (f, g))

    return [
        _run("sections", "ι(f) = left multiplication, adjointable, invertible on its image", embedding),
        _run("sections", "products with unit indicators", with_units),
        _run("sections", "products across nested subgroups", nested),
        _run("sections", "splitting over S_x\\H/K", split),
        _run("sections", "cutting by 1_{s(x)gHg⁻¹}", conj_units),
        _run("sections", "extended action ᾱ", alpha_ext),
        _run("sections", "section *-algebra operations", ops),
    ]


# -- crossed ----------------------------------------------------------------


def random_element(S: CrossedSystem, rng: random.Random, terms: int = 4) -> cx.CrossedElement:
    """A crossed element with a few random Gaussian-rational span coordinates."""
    coords = {}
    for _ in range(terms):
        k = rng.randrange(S.dim)
        coords[k] = GaussQ(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), rng.randint(-2, 2))
    return cx.CrossedElement.from_coords(S, coords)


def _tuples(n: int, r: int, rng: random.Random, exhaustive: int, sampled: int) -> Iterable[tuple]:
    if n ** r <= exhaustive:
        import itertools

        return itertools.product(range(n), repeat=r)
    return [tuple(rng.randrange(n) for _ in range(r)) for _ in range(sampled)]


def all_middles(S: CrossedSystem) -> list:
    """Orbit basis sections [E_ij]_{xΓ} and unit orbits 1_{yΓ}."""
    mids = [(S.bundle.matrix_unit(x, i, j), x) for (x, i, j) in orbit_basis(S.base)]
    return mids + sorted({S.base.base.rep(u) for u in S.groupoid.units})


def crossed_suite(S: CrossedSystem, rng: random.Random) -> list[Check]:
    G, P = S.G, S.pair
    X = S.groupoid
    act = S.action
    gact = act.groupoid_action.act
    n = S.dim
    basis = [cx.basis_element(S, k) for k in range(n)]
    one = cx.identity(S)

    def algebra():
        for i, j, k in _tuples(n, 3, rng, EXHAUSTIVE_TRIPLES, SAMPLED_TRIPLES):
            a, b, c = basis[i], basis[j], basis[k]
            if (a * b) * c != a * (b * c):
                _fail("not associative", (i, j, k))
            if a * (b + c) != a * b + a * c:
                _fail("not distributive", (i, j, k))
        for i, j in _tuples(n, 2, rng, EXHAUSTIVE_PAIRS, SAMPLED_PAIRS):
            if (basis[i] * basis[j]).star() != basis[j].star() * basis[i].star():
                _fail("star is not anti-multiplicative", (i, j))
        for k, b in enumerate(basis):
            if b.star().star() != b:
                _fail("star is not involutive", k)
            if one * b != b or b * one != b:
                _fail("identity fails", k)

    def operator_backend():
        for i, j in list(_tuples(n, 2, rng, 40, 12)):
            if cx.conv(basis[i], basis[j], backend="operator") != basis[i] * basis[j]:
                _fail("operator convolution differs", (i, j))

    def embeddings():
        hecke = [HeckeElement.basis_element(P, g) for g in P.dc_reps]
        for h1 in hecke:
            if cx.embed_hecke(S, h1).star() != cx.embed_hecke(S, h1.star()):
                _fail("Hecke embedding does not preserve star", h1)
            for h2 in hecke:
                if cx.embed_hecke(S, h1) * cx.embed_hecke(S, h2) != cx.embed_hecke(S, h1 * h2):
                    _fail("Hecke embedding is not multiplicative", (h1, h2))
        secs = [orbit_basis_element(S.base, k) for k in range(len(orbit_basis(S.base)))]
        if len(secs) > 25:
            secs = rng.sample(secs, 25)
        for f1 in secs:
            e1 = cx.embed_section(S, f1)
            if e1.star() != cx.embed_section(S, f1.star()):
                _fail("section embedding does not preserve star", f1)
            for f2 in secs:
                if e1 * cx.embed_section(S, f2) != cx.embed_section(S, f1 * f2):
                    _fail("section embedding is not multiplicative", (f1, f2))
        for u in sorted(X.units):
            p = cx.unit_indicator(S, u)
            if p * p != p or p.star() != p:
                _fail("unit indicator is not a projection", u)

    def decomposition():
        for _ in range(20):
            f = random_element(S, rng)
            total = cx.zero(S)
            for a, x, g in cx.span_decompose(f):
                total = total + cx.span_element(S, a, x, g)
            if total != f:
                _fail("span decomposition does not reproduce f")

    def span_star():
        for k, (g, x, i, j) in enumerate(S.basis()):
            a = S.bundle.matrix_unit(x, i, j)
            z, b = act.alpha(G.inv[g], X.inv[x], a.adjoint())
            rhs = cx.span_element(S, b, z, G.inv[g]).scale(GaussQ(P.delta(g)))
            if basis[k].star() != rhs:
                _fail("star of span element", k)

    def alt_form():
        for k, (g, x, i, j) in enumerate(S.basis()):
            a = S.bundle.matrix_unit(x, i, j)
            z, b = act.alpha(G.inv[g], x, a)
            lhs = cx.unit_indicator(S, X.rng[x]) * cx.embed_hecke(S, HeckeElement.basis_element(P, g)) * cx.middle_element(S, (b, z))
            if lhs != basis[k]:
                _fail("1_{r(x)Γ} * ΓgΓ * [α_{g⁻¹}(a)]_{xgΓ}", k)

    def one_sided():
        mids = [(S.bundle.matrix_unit(x, i, j), x) for (x, i, j) in orbit_basis(S.base)]
        if len(mids) > 30:
            mids = rng.sample(mids, 30)
        for g in P.dc_reps:
            T = cx.embed_hecke(S, HeckeElement.basis_element(P, g))
            for a, x in mids:
                m = cx.middle_element(S, (a, x))
                Sx = act.groupoid_action.stabilizer(x)
                right = cx.zero(S)
                for d in double_cosets(G, Sx, P.gamma_g(g), A=S.gamma):
                    right = right + m * T * cx.unit_indicator(S, gact[X.src[x]][G.mul[d.rep][g]])
                if m * T != right:
                    _fail("[a]_{xΓ} * ΓgΓ splitting", (g, x))
                left = cx.zero(S)
                gi = G.inv[g]
                for d in double_cosets(G, Sx, P.gamma_g(gi), A=S.gamma):
                    left = left + cx.unit_indicator(S, gact[X.rng[x]][G.mul[d.rep][gi]]) * T * m
                if T * m != left:
                    _fail("ΓgΓ * [a]_{xΓ} splitting", (g, x))

    def counting_lemma():
        gamma = sorted(S.gamma.members)
        units = sorted(X.units)
        elems = list(G.elements)
        if len(elems) * len(elems) * len(units) * len(gamma) > 8000:
            pairs = [(rng.choice(elems), rng.choice(elems)) for _ in range(40)]
        else:
            pairs = [(w, v) for w in elems for v in elems]
        for w, v in pairs:
            for y in units:
                base = cx.counting(S, w, v, y)
                for t in gamma:
                    ti = G.inv[t]
                    for label, other in [
                        ("i", cx.counting(S, w, G.mul[v][t], y)),
                        ("ii", cx.counting(S, G.mul[t][w], v, y)),
                    ]:
                        if (other.n, other.d) != (base.n, base.d):
                            _fail(f"item {label}", (w, v, y, t))
                    lhs = cx.counting(S, w, G.mul[ti][v], gact[y][t])
                    rhs = cx.counting(S, G.mul[w][ti], v, y)
                    if (lhs.n, lhs.d) != (rhs.n, rhs.d):
                        _fail("item iii", (w, v, y, t))

    def counting_general():
        units = sorted(X.units)
        elems = list(G.elements)
        rng_local = random.Random(rng.random())
        for _ in range(30):
            w, v, y = rng_local.choice(elems), rng_local.choice(elems), rng_local.choice(units)
            base = cx.counting(S, w, v, y)
            wv = G.mul[w][v]
            gwv = P.gamma_g(wv).members
            target = {gact[gact[y][G.inv[w]]][t] for t in gwv}
            for wt in elems:
                if P.dc_of[wt] != P.dc_of[w]:
                    continue
                for vt in elems:
                    if P.dc_of[vt] != P.dc_of[v] or P.coset_of[G.mul[wt][vt]] != P.coset_of[wv]:
                        continue
                    for yt in act.groupoid_action.orbit(y, S.gamma):
                        if gact[yt][G.inv[wt]] not in target:
                            continue
                        other = cx.counting(S, wt, vt, yt)
                        if (other.n, other.d) != (base.n, base.d):
                            _fail("item iv", (w, v, y, wt, vt, yt))

    def products():
        mids = all_middles(S)
        if len(mids) * len(P.dc_reps) ** 2 > 400:
            mids = rng.sample(mids, max(1, 400 // len(P.dc_reps) ** 2))
        methods = ["first", "second", "third"] + (["free"] if S.free else [])
        for g in P.dc_reps:
            for s in P.dc_reps:
                for mid in mids:
                    ref = cx.triple_product_by_conv(S, g, mid, s)
                    for m in methods:
                        if cx.triple_product(S, g, mid, s, method=m) != ref:
                            _fail(f"{m} form differs from convolution", (g, mid if isinstance(mid, int) else mid[1], s))

    checks = [
        _run("crossed", "*-algebra axioms on span generators", algebra),
        _run("crossed", "operator and section convolutions agree", operator_backend),
        _run("crossed", "canonical embeddings are *-homomorphisms", embeddings),
        _run("crossed", "span decomposition round trip", decomposition),
        _run("crossed", "star of span elements", span_star),
        _run("crossed", "alternative spanning form", alt_form),
        _run("crossed", "one-sided products split over stabilizer double cosets", one_sided),
        _run("crossed", "counting numbers: translation invariance", counting_lemma),
        _run("crossed", "counting numbers: general invariance", counting_general),
        _run("crossed", "product formulas against convolution", products),
    ]
    if S.free:
        checks.append(_run("crossed", "free counting: n = 1 and d = index", lambda: free_counting(S)))
    if _is_trivial_action(S):
        checks.append(_run("crossed", "trivial action: commutation and dimension", lambda: trivial_action_factorization(S)))
    if _is_normal(S):
        checks.append(_run("crossed", "normal subgroup: group crossed product", lambda: normal_reduction(S)))
    if len(orbit_basis(S.base)) == 1 and S.bundle.dims[min(X.units)] == 1 and len(X) == 1:
        checks.append(_run("crossed", "point base: Hecke algebra", lambda: point_reduction(S)))
    return checks


def free_counting(S: CrossedSystem):
    G, P = S.G, S.pair
    for w in G.elements:
        for v in G.elements:
            wv = G.mul[w][v]
            K = P.gamma_g(wv)
            index = Fraction(len(K), len(K.intersect(G.conjugate(S.gamma, w))))
            for y in sorted(S.groupoid.units):
                c = cx.counting(S, w, v, y)
                if c.n != 1 or c.d != index:
                    _fail("free counting", (w, v, y, c.n, c.d, index))


def _is_trivial_action(S: CrossedSystem) -> bool:
    return all(all(r == x for r in row) for x, row in enumerate(S.action.groupoid_action.act)) and S.action.is_identity_cocycle


def _is_normal(S: CrossedSystem) -> bool:
    return all(len(S.pair.gamma_g(g)) == len(S.gamma) for g in S.G.elements)


def trivial_action_factorization(S: CrossedSystem):
    P = S.pair
    for (x, i, j) in orbit_basis(S.base):
        m = cx.middle_element(S, (S.bundle.matrix_unit(x, i, j), x))
        for g in P.dc_reps:
            T = cx.embed_hecke(S, HeckeElement.basis_element(P, g))
            if m * T != T * m:
                _fail("[a]_{xΓ} and ΓgΓ do not commute", (x, g))
    expected = len(orbit_basis(S.base)) * len(P.dc_reps)
    if S.dim != expected:
        _fail("dimension is not the tensor product dimension", (S.dim, expected))


def normal_reduction(S: CrossedSystem):
    if cx.structure_table(S) != cx.normal_quotient_table(S):
        _fail("structure constants differ from the group crossed product")
    G, P = S.G, S.pair
    for u in P.dc_reps:
        for v in P.dc_reps:
            for y in sorted(S.groupoid.units):
                if len(cx.e_set(S, u, v, y)) != 1:
                    _fail("E set is not a singleton", (u, v, y))
                if cx.counting(S, u, v, y).N != 1:
                    _fail("N ≠ 1", (u, v, y))


def point_reduction(S: CrossedSystem):
    P = S.pair
    for g in P.dc_reps:
        hg = HeckeElement.basis_element(P, g)
        eg = cx.embed_hecke(S, hg)
        if eg.star() != cx.embed_hecke(S, hecke_star(hg)):
            _fail("star differs from the Hecke star", g)
        for s in P.dc_reps:
            hs = HeckeElement.basis_element(P, s)
            if eg * cx.embed_hecke(S, hs) != cx.embed_hecke(S, hecke_mul(hg, hs)):
                _fail("product differs from the Hecke product", (g, s))
            if cx.triple_product(S, g, min(S.groupoid.units), s) != cx.embed_hecke(S, double_coset_product(P, g, s)):
                _fail("triple product differs from the usual expression", (g, s))


SUITES = ("groups", "hecke", "groupoids", "bundles", "sections", "crossed")


def run_all(S: CrossedSystem, seed: int = SEED, suites: Iterable[str] = SUITES, parallel: Callable | None = None) -> list[Check]:
    """All invariant suites in a fixed order; ``parallel`` maps a function over suite names."""
    def one(name: str) -> list[Check]:
        rng = random.Random(f"{seed}:{name}")
        if name == "sections":
            return sections_suite(S, rng, limit=40 if S.bundle.dim <= 60 else 10)
        if name == "crossed":
            return crossed_suite(S, rng)
        return {"groups": groups_suite, "hecke": hecke_suite, "groupoids": groupoids_suite, "bundles": bundles_suite}[name](S)

    names = list(suites)
    results = parallel(one, names) if parallel else map(one, names)
    return [c for group in results for c in group]
