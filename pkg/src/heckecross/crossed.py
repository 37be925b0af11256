"""The crossed product of C_c(A/Γ) by a finite Hecke pair.

An element is a compatible function on G/Γ whose value at gΓ lies in
C_c(A/Γᵍ).  Compatibility, f(γgΓ) = ᾱ_γ(f(gΓ)), means one value per double
coset determines everything, so only the values at canonical double-coset
representatives are stored.

Values are multipliers of C_c(A).  Since C_c(A) is unital here, ι(f) is left
multiplication by the lift of f, so products are computed on lifted sections
by default; ``backend="operator"`` runs the same sum through explicit
MultiplierOp compositions instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .bundles import BundleAction, OrbitBundle, check_h_good_bundle
from .errors import IntersectionFailure, NotHGood, NotInImage, NotInvariant, ScenarioMismatch, ShapeMismatch, WrongOrbitBundle
from .groupoids import check_h_intersection
from .groups import HeckePair, Subgroup, double_cosets
from .hecke import HeckeElement
from .scalars import ONE, ZERO, GaussQ, Mat
from .sections import (
    MultiplierOp,
    OrbitSection,
    Section,
    alpha_bar,
    alpha_section,
    as_multiplier,
    multiplier_to_section,
)


class CrossedSystem:
    """A bundle action together with Γ, checked against the standing assumptions."""

    def __init__(self, action: BundleAction, gamma: Subgroup, check: bool = True):
        if gamma.parent is not action.group:
            raise ScenarioMismatch("Γ is not a subgroup of the acting group", witness=None)
        if check:
            res = check_h_good_bundle(action, gamma)
            if not res:
                raise NotHGood(f"action is not Γ-good ({res.level} level)", witness=res.witness)
            res = check_h_intersection(action.groupoid_action, gamma)
            if not res:
                raise IntersectionFailure("Γ-intersection property fails", witness=res.witness)
        self.action = action
        self.bundle = action.bundle
        self.groupoid = action.bundle.base
        self.G = action.group
        self.gamma = gamma
        self.pair = HeckePair(self.G, gamma)
        self._obundles: dict[frozenset, OrbitBundle] = {}
        self._basis = None
        self._basis_index = None
        self.free = action.groupoid_action.unit_action_is_free()
        self._unit_section = Section.unit(self.bundle)

    def obundle(self, H: Subgroup) -> OrbitBundle:
        key = H.member_set
        ob = self._obundles.get(key)
        if ob is None:
            # subgroups of Γ inherit Γ-goodness, so no recheck
            ob = OrbitBundle(self.action, H, check=False)
            self._obundles[key] = ob
        return ob

    @property
    def base(self) -> OrbitBundle:
        """A/Γ."""
        return self.obundle(self.gamma)

    def obundle_at(self, g: int) -> OrbitBundle:
        """A/Γᵍ."""
        return self.obundle(self.pair.gamma_g(g))

    def basis(self) -> list[tuple[int, int, int, int]]:
        """Span basis: (double-coset rep g, Γᵍ-orbit rep x, i, j)."""
        if self._basis is None:
            out = []
            for g in self.pair.dc_reps:
                ob = self.obundle_at(g)
                for x in ob.reps:
                    r, c = self.bundle.shape(x)
                    out.extend((g, x, i, j) for i in range(r) for j in range(c))
            self._basis = out
            self._basis_index = {b: k for k, b in enumerate(out)}
        return self._basis

    def basis_index(self) -> dict:
        self.basis()
        return self._basis_index

    @property
    def dim(self) -> int:
        return len(self.basis())

    def __repr__(self):
        return f"CrossedSystem({self.pair}, {self.bundle})"


class CrossedElement:
    __slots__ = ("system", "values", "_full")

    def __init__(self, system: CrossedSystem, values: Mapping[int, OrbitSection]):
        self.system = system
        self.values = {g: v for g, v in sorted(values.items()) if not v.is_zero()}
        self._full: dict[int, Section] = {}

    def value_at_coset(self, c: int) -> Section | None:
        """Lifted value at the left coset with index c, or None if zero."""
        if c in self._full:
            return self._full[c]
        S = self.system
        d, gam = S.pair.coset_placement[c]
        v = self.values.get(S.pair.dc_reps[d])
        out = None if v is None else alpha_section(S.action, gam, v.lift())
        self._full[c] = out
        return out

    def value(self, g: int) -> Section:
        v = self.value_at_coset(self.system.pair.coset_of[g])
        return v if v is not None else Section(self.system.bundle)

    def support_cosets(self) -> list[int]:
        P = self.system.pair
        out = []
        for g in self.values:
            out.extend(P.coset_of[r] for r in P.double_coset(g).left_coset_reps)
        return sorted(out)

    def _same(self, other: "CrossedElement"):
        if other.system is not self.system:
            raise ScenarioMismatch("elements of different crossed products", witness=None)

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        self._same(other)
        out = dict(self.values)
        for g, v in other.values.items():
            out[g] = out[g] + v if g in out else v
        return CrossedElement(self.system, out)

    def __neg__(self):
        return CrossedElement(self.system, {g: -v for g, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CrossedElement":
        return CrossedElement(self.system, {g: v.scale(c) for g, v in self.values.items()})

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return conv(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def star(self) -> "CrossedElement":
        return star(self)

    def __eq__(self, other):
        return isinstance(other, CrossedElement) and other.system is self.system and other.values == self.values

    def __hash__(self):
        return hash(tuple(self.values.items()))

    def is_zero(self) -> bool:
        return not self.values

    def coords(self) -> dict[int, GaussQ]:
        index = self.system.basis_index()
        out = {}
        for g, v in self.values.items():
            for x, a in v.data.items():
                for i, row in enumerate(a.data):
                    for j, c in enumerate(row):
                        if c:
                            out[index[(g, x, i, j)]] = c
        return out

    @classmethod
    def from_coords(cls, system: CrossedSystem, coords: Mapping[int, object]) -> "CrossedElement":
        basis = system.basis()
        acc = None
        for k, c in sorted(coords.items()):
            c = GaussQ.of(c)
            if not c:
                continue
            g, x, i, j = basis[k]
            e = basis_element(system, k).scale(c)
            acc = e if acc is None else acc + e
        return acc if acc is not None else CrossedElement(system, {})

    def __repr__(self):
        G = self.system.G
        return "CrossedElement{" + ", ".join(f"{G.label(g)}: {v!r}" for g, v in self.values.items()) + "}"


def zero(system: CrossedSystem) -> CrossedElement:
    return CrossedElement(system, {})


def _descend(system: CrossedSystem, g: int, F: Section) -> OrbitSection:
    try:
        return OrbitSection.descend(F, system.obundle_at(g))
    except NotInvariant as exc:
        raise NotInImage(f"value at the coset of {g} left C_c(A/Γᵍ)", witness=exc.witness) from None


def make_element(system: CrossedSystem, assignments: Iterable[tuple[int, object]]) -> CrossedElement:
    """Element from (g, value) pairs; a value is an OrbitSection over A/Γᵍ or an invariant Section.

    Values given at non-canonical cosets are moved to the canonical
    representative with ᾱ; repeated double cosets are summed.
    """
    S = system
    P = S.pair
    out: dict[int, OrbitSection] = {}
    for g, val in assignments:
        want = S.obundle_at(g)
        if isinstance(val, OrbitSection):
            if val.obundle.subgroup != want.subgroup:
                raise WrongOrbitBundle(
                    f"value at {S.G.label(g)} lives over the wrong orbit bundle", witness=(g,)
                )
            F = val.lift()
        elif isinstance(val, Section):
            F = val
            try:
                OrbitSection.descend(F, want)
            except NotInvariant as exc:
                raise NotInvariant(f"value at {S.G.label(g)} is not Γᵍ-invariant", witness=(g, exc.witness)) from None
        else:
            raise TypeError(f"unsupported value type {type(val).__name__}")
        d, gam = P.coset_placement[P.coset_of[g]]
        rep = P.dc_reps[d]
        moved = alpha_section(S.action, S.G.inv[gam], F)
        v = OrbitSection.descend(moved, S.obundle_at(rep))
        out[rep] = out[rep] + v if rep in out else v
    return CrossedElement(S, out)


def conv(f1: CrossedElement, f2: CrossedElement, backend: str = "sections") -> CrossedElement:
    """(f1*f2)(gΓ) = Σ_{hΓ} f1(hΓ)·ᾱ_h(f2(h⁻¹gΓ)), evaluated at canonical reps only."""
    f1._same(f2)
    if backend == "operator":
        return _conv_operator(f1, f2)
    S = f1.system
    P = S.pair
    G = S.G
    canon = {P.coset_of[r]: r for r in P.dc_reps}
    supp2 = [(c, f2.value_at_coset(c)) for c in f2.support_cosets()]
    acc: dict[int, Section] = {}
    for c1 in f1.support_cosets():
        F1 = f1.value_at_coset(c1)
        h = P.coset_reps[c1]
        for c2, F2 in supp2:
            t = P.coset_of[G.mul[h][P.coset_reps[c2]]]
            rep = canon.get(t)
            if rep is None:
                continue
            term = F1 * alpha_section(S.action, h, F2)
            acc[rep] = acc[rep] + term if rep in acc else term
    return CrossedElement(S, {g: _descend(S, g, F) for g, F in acc.items() if not F.is_zero()})


def _conv_operator(f1: CrossedElement, f2: CrossedElement) -> CrossedElement:
    """Same sum through ι, ᾱ on operators, and multiplier_to_section."""
    S = f1.system
    P = S.pair
    G = S.G
    act = S.action

    def op_at(f: CrossedElement, c: int) -> MultiplierOp | None:
        d, gam = P.coset_placement[c]
        v = f.values.get(P.dc_reps[d])
        if v is None:
            return None
        return alpha_bar(act, gam, as_multiplier(v))

    out = {}
    for g in P.dc_reps:
        total = MultiplierOp.zero(S.bundle)
        for c1, h in enumerate(P.coset_reps):
            T1 = op_at(f1, c1)
            if T1 is None:
                continue
            T2 = op_at(f2, P.coset_of[G.mul[G.inv[h]][g]])
            if T2 is None:
                continue
            total = total + T1 @ alpha_bar(act, h, T2)
        if not total.is_zero():
            out[g] = multiplier_to_section(total, S.obundle_at(g))
    return CrossedElement(S, out)


def star(f: CrossedElement) -> CrossedElement:
    """f*(gΓ) = Δ(g⁻¹)·ᾱ_g(f(g⁻¹Γ))*."""
    S = f.system
    P = S.pair
    G = S.G
    out = {}
    for g in P.dc_reps:
        gi = G.inv[g]
        F = f.value_at_coset(P.coset_of[gi])
        if F is None:
            continue
        val = alpha_section(S.action, g, F).star().scale(GaussQ(P.delta(gi)))
        out[g] = _descend(S, g, val)
    return CrossedElement(S, out)


def span_element(system: CrossedSystem, a: Mat, x: int, g: int) -> CrossedElement:
    """[a]_{xΓ} * ΓgΓ * 1_{s(x)gΓ}: value [a]_{xΓᵍ} at gΓ, support ΓgΓ."""
    S = system
    P = S.pair
    G = S.G
    S.bundle.check_element(x, a)
    K = P.gamma_g(g)
    act = S.action.groupoid_action.act
    F: dict[int, Mat] = {}
    for k in K.members:
        z = act[x][k]
        if z not in F:
            F[z] = S.action.alpha(G.inv[k], x, a)[1]
    d, gam = P.coset_placement[P.coset_of[g]]
    rep = P.dc_reps[d]
    moved = alpha_section(S.action, G.inv[gam], Section(S.bundle, F, check=False))
    v = OrbitSection.descend(moved, S.obundle_at(rep))
    return CrossedElement(S, {rep: v})


def span_decompose(f: CrossedElement) -> list[tuple[Mat, int, int]]:
    """(a, x, g) with Σ span_element(a, x, g) = f."""
    return [(a, x, g) for g, v in f.values.items() for x, a in v.data.items()]


def basis_element(system: CrossedSystem, k: int) -> CrossedElement:
    g, x, i, j = system.basis()[k]
    return span_element(system, system.bundle.matrix_unit(x, i, j), x, g)


def embed_hecke(system: CrossedSystem, h: HeckeElement) -> CrossedElement:
    """f̃(gΓ) = f(ΓgΓ)·1."""
    S = system
    if h.pair != S.pair:
        raise ScenarioMismatch("Hecke element from another pair", witness=None)
    return CrossedElement(
        S, {g: OrbitSection.descend(S._unit_section.scale(c), S.obundle_at(g)) for g, c in h.coeffs.items()}
    )


def embed_section(system: CrossedSystem, f: OrbitSection) -> CrossedElement:
    """f ∈ C_c(A/Γ) placed at the coset Γ."""
    S = system
    if f.obundle is not S.base:
        raise WrongOrbitBundle("section is not over A/Γ of this system", witness=None)
    return CrossedElement(S, {S.G.identity: f})


def embed_units(system: CrossedSystem, f: Mapping[int, object]) -> CrossedElement:
    """A Γ-invariant function on units, as Σ f(u)·1_u placed at Γ."""
    S = system
    F = Section(S.bundle, {u: Mat.identity(S.bundle.dims[u]).scale(c) for u, c in f.items() if GaussQ.of(c)}, check=False)
    try:
        v = OrbitSection.descend(F, S.base)
    except NotInvariant as exc:
        raise NotInvariant("unit function is not Γ-invariant", witness=exc.witness) from None
    return CrossedElement(S, {S.G.identity: v})


def unit_indicator(system: CrossedSystem, y: int) -> CrossedElement:
    """1_{yΓ}."""
    return embed_units(system, {u: 1 for u in system.action.groupoid_action.orbit(y, system.gamma)})


def canonical_embedding(system: CrossedSystem, obj) -> CrossedElement:
    if isinstance(obj, HeckeElement):
        return embed_hecke(system, obj)
    if isinstance(obj, OrbitSection):
        return embed_section(system, obj)
    if isinstance(obj, Mapping):
        return embed_units(system, obj)
    raise TypeError(f"cannot embed {type(obj).__name__}")


def identity(system: CrossedSystem) -> CrossedElement:
    return embed_hecke(system, HeckeElement.one(system.pair))


@dataclass(frozen=True)
class CountingData:
    n: int
    d: int
    N: Fraction
    E: tuple[int, ...]


def e_set(system: CrossedSystem, u: int, v: int, y: int) -> tuple[int, ...]:
    """Reps in Γ of S_y \\ Γ / (uΓu⁻¹ ∩ vΓv⁻¹)."""
    S = system
    G = S.G
    stab = S.action.groupoid_action.stabilizer(y)
    C = G.conjugate(S.gamma, u).intersect(G.conjugate(S.gamma, v))
    return tuple(d.rep for d in double_cosets(G, stab, C, A=S.gamma))


def counting(system: CrossedSystem, w: int, v: int, y: int) -> CountingData:
    """n, d, N = n/d for (w, v, y), and E = E^y_{w⁻¹, v}."""
    S = system
    P = S.pair
    G = S.G
    act = S.action.groupoid_action.act
    gamma = S.gamma.members
    wv = G.mul[w][v]
    gwv = P.gamma_g(wv).members
    target = act[y][G.inv[w]]
    dc_v = P.dc_of[v]
    n = d = 0
    for r in P.left_coset_reps_of(w):
        ri = G.inv[r]
        if P.dc_of[G.mul[ri][wv]] != dc_v:
            continue
        pts = {act[y][G.mul[c][ri]] for c in gamma}
        if target in pts:
            n += 1
        if any(act[p][t] == target for p in pts for t in gwv):
            d += 1
    return CountingData(n, d, Fraction(n, d), e_set(S, G.inv[w], v, y))


def _middle(system: CrossedSystem, mid) -> tuple[Mat, int]:
    if isinstance(mid, int):
        if not system.groupoid.is_unit(mid):
            raise ShapeMismatch(f"arrow {mid} is not a unit", witness=(mid,))
        return Mat.identity(system.bundle.dims[mid]), mid
    a, x = mid
    system.bundle.check_element(x, a)
    return a, x


def middle_element(system: CrossedSystem, mid) -> CrossedElement:
    """Embed a middle factor: a unit y gives 1_{yΓ}, a pair (a, x) gives [a]_{xΓ}."""
    if isinstance(mid, int):
        return unit_indicator(system, mid)
    a, x = _middle(system, mid)
    return embed_section(system, OrbitSection.at(system.base, x, a))


def product_terms(system: CrossedSystem, g: int, mid, s: int, method: str = "auto") -> list[tuple[Fraction, Mat, int, int]]:
    """Terms (coefficient, b, z, h) of ΓgΓ * mid * ΓsΓ = Σ coef·([b]_{zΓ} * ΓhΓ * 1_{s(z)hΓ}).

    ``mid`` is a unit y (for 1_{yΓ}) or a pair (a, x) (for [a]_{xΓ}).
    ``method``: "third" (sum over u, v, γ), "first" (over w, v, γ),
    "second" (over v, γ), "free" (free-action form), or "auto", which
    picks "free" when G acts freely on units and "third" otherwise.
    """
    S = system
    if method == "auto":
        method = "free" if S.free else "third"
    a, x = _middle(S, mid)
    P = S.pair
    G = S.G
    inv, mul = G.inv, G.mul
    X = S.groupoid
    y = X.src[x]
    act = S.action.groupoid_action.act
    alpha = S.action.alpha
    terms: list[tuple[Fraction, Mat, int, int]] = []
    if method == "free":
        for u in P.left_coset_reps_of(inv[g]):
            for v in P.left_coset_reps_of(s):
                xu, au = alpha(inv[u], x, a)
                terms.append((Fraction(1), au, xu, mul[inv[u]][v]))
    elif method == "third":
        dg = P.delta(g)
        for u in P.left_coset_reps_of(inv[g]):
            for v in P.left_coset_reps_of(s):
                uv = mul[inv[u]][v]
                for gam in e_set(S, u, v, y):
                    N = counting(S, inv[u], v, act[y][gam]).N
                    z, b = alpha(mul[inv[u]][inv[gam]], x, a)
                    terms.append((dg * N / P.L(uv), b, z, uv))
    elif method == "first":
        for w in P.left_coset_reps_of(g):
            for v in P.left_coset_reps_of(s):
                wv = mul[w][v]
                for gam in e_set(S, inv[w], v, y):
                    N = counting(S, w, v, act[y][gam]).N
                    z, b = alpha(mul[w][inv[gam]], x, a)
                    terms.append((N / P.L(wv), b, z, wv))
    elif method == "second":
        Lg = P.L(g)
        for v in P.left_coset_reps_of(s):
            gv = mul[g][v]
            for gam in e_set(S, inv[g], v, y):
                N = counting(S, g, v, act[y][gam]).N
                z, b = alpha(mul[g][inv[gam]], x, a)
                terms.append((Lg * N / P.L(gv), b, z, gv))
    else:
        raise ValueError(f"unknown method {method!r}")
    return terms


def triple_product(system: CrossedSystem, g: int, mid, s: int, method: str = "auto") -> CrossedElement:
    """ΓgΓ * mid * ΓsΓ from the closed forms, assembled from span elements."""
    acc = zero(system)
    for coef, b, z, h in product_terms(system, g, mid, s, method):
        acc = acc + span_element(system, b, z, h).scale(GaussQ(coef))
    return acc


def triple_product_by_conv(system: CrossedSystem, g: int, mid, s: int) -> CrossedElement:
    """The definitional evaluation conv(ΓgΓ, conv(mid, ΓsΓ))."""
    P = system.pair
    left = embed_hecke(system, HeckeElement.basis_element(P, g))
    right = embed_hecke(system, HeckeElement.basis_element(P, s))
    return conv(left, conv(middle_element(system, mid), right))


def structure_table(system: CrossedSystem) -> dict[tuple[int, int], dict[int, GaussQ]]:
    """Coordinates of every product of span basis elements."""
    basis = [basis_element(system, k) for k in range(system.dim)]
    return {
        (k, l): conv(bk, bl).coords()
        for k, bk in enumerate(basis)
        for l, bl in enumerate(basis)
    }


def normal_quotient_table(system: CrossedSystem) -> dict[tuple[int, int], dict[int, GaussQ]]:
    """Structure constants of the G/Γ-group crossed product, Γ normal.

    Independent of ``conv``: products are (F1 δ_p)(F2 δ_q) = F1·ᾱ_p(F2) δ_{pq}
    on Γ-invariant sections, with p, q cosets multiplied in G/Γ.
    """
    S = system
    P = S.pair
    G = S.G
    if any(len(P.gamma_g(g)) != len(S.gamma) for g in G.elements):
        raise ScenarioMismatch("Γ is not normal", witness=None)
    index = S.basis_index()
    rep_of_coset = {P.coset_of[r]: r for r in P.dc_reps}
    parts = []
    for (g, x, i, j) in S.basis():
        F = OrbitSection(S.base, {x: S.bundle.matrix_unit(x, i, j)}, check=False).lift()
        parts.append((P.coset_of[g], g, F))
    table = {}
    for k, (p, gp, F1) in enumerate(parts):
        for l, (q, gq, F2) in enumerate(parts):
            F = F1 * alpha_section(S.action, gp, F2)
            pq = P.coset_of[G.mul[gp][gq]]
            rep = rep_of_coset[pq]
            v = OrbitSection.descend(F, S.base)
            coords = {}
            for z, a in v.data.items():
                for ii, row in enumerate(a.data):
                    for jj, c in enumerate(row):
                        if c:
                            coords[index[(rep, z, ii, jj)]] = c
            table[(k, l)] = coords
    return table
