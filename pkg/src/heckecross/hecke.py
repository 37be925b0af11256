"""The Hecke *-algebra of a finite Hecke pair over Q(i)."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import PairMismatch
from .groups import HeckePair
from .scalars import ONE, ZERO, GaussQ


class HeckeElement:
    """Finitely supported function on Γ\\G/Γ, keyed by canonical double-coset reps."""

    __slots__ = ("pair", "coeffs")

    def __init__(self, pair: HeckePair, coeffs: Mapping[int, object] | None = None):
        self.pair = pair
        clean: dict[int, GaussQ] = {}
        for g, c in (coeffs or {}).items():
            c = GaussQ.of(c)
            if c:
                r = pair.dc_rep(g)
                clean[r] = clean.get(r, ZERO) + c
        self.coeffs = {r: c for r, c in sorted(clean.items()) if c}

    @classmethod
    def basis_element(cls, pair: HeckePair, g: int) -> "HeckeElement":
        return cls(pair, {g: ONE})

    @classmethod
    def one(cls, pair: HeckePair) -> "HeckeElement":
        return cls(pair, {pair.G.identity: ONE})

    def __call__(self, g: int) -> GaussQ:
        return self.coeffs.get(self.pair.dc_rep(g), ZERO)

    def _same(self, other: "HeckeElement"):
        if other.pair is not self.pair and other.pair != self.pair:
            raise PairMismatch("elements belong to different Hecke pairs", witness=(self.pair, other.pair))

    def __add__(self, other):
        self._same(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, ZERO) + c
        return HeckeElement(self.pair, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "HeckeElement":
        c = GaussQ.of(c)
        return HeckeElement(self.pair, {g: c * v for g, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return hecke_mul(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def star(self) -> "HeckeElement":
        return hecke_star(self)

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and self.pair == other.pair and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        G = self.pair.G
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}·[{G.label(g)}]" for g, c in self.coeffs.items())


def hecke_mul(f1: HeckeElement, f2: HeckeElement) -> HeckeElement:
    """(f1*f2)(ΓgΓ) = Σ_{hΓ ∈ G/Γ} f1(ΓhΓ) f2(Γh⁻¹gΓ)."""
    f1._same(f2)
    pair = f1.pair
    G = pair.G
    out = {}
    # only cosets hΓ inside supp f1 contribute
    hs = [h for h in pair.coset_reps if pair.dc_rep(h) in f1.coeffs]
    for g in pair.dc_reps:
        acc = ZERO
        for h in hs:
            c2 = f2.coeffs.get(pair.dc_rep(G.mul[G.inv[h]][g]))
            if c2:
                acc = acc + f1.coeffs[pair.dc_rep(h)] * c2
        if acc:
            out[g] = acc
    return HeckeElement(pair, out)


def hecke_mul_cosets(f1: HeckeElement, f2: HeckeElement) -> HeckeElement:
    """Same product via Γ-left-invariant functions on G/Γ, scattered over supports.

    (F1*F2)(hkΓ) collects F1(hΓ)F2(kΓ) with one fixed rep h per coset; the
    result is then read back on double cosets after checking left invariance.
    """
    f1._same(f2)
    pair = f1.pair
    G = pair.G
    F1 = {c: f1(r) for c, r in enumerate(pair.coset_reps) if f1(r)}
    F2 = {c: f2(r) for c, r in enumerate(pair.coset_reps) if f2(r)}
    acc: dict[int, GaussQ] = {}
    for c1, v1 in F1.items():
        h = pair.coset_reps[c1]
        for c2, v2 in F2.items():
            t = pair.coset_of[G.mul[h][pair.coset_reps[c2]]]
            acc[t] = acc.get(t, ZERO) + v1 * v2
    out = {}
    for c, v in acc.items():
        d = pair.dc_of[pair.coset_reps[c]]
        prev = out.setdefault(d, v)
        if prev != v:
            raise AssertionError("product is not left Γ-invariant")
    for d in out:
        for r in pair.dcs[d].left_coset_reps:
            if acc.get(pair.coset_of[r], ZERO) != out[d]:
                raise AssertionError("product is not left Γ-invariant")
    return HeckeElement(pair, {pair.dc_reps[d]: v for d, v in out.items()})


def hecke_star(f: HeckeElement) -> HeckeElement:
    """f*(ΓgΓ) = Δ(g⁻¹)·conj(f(Γg⁻¹Γ))."""
    pair = f.pair
    G = pair.G
    out = {}
    for g in pair.dc_reps:
        gi = G.inv[g]
        c = f(gi)
        if c:
            out[g] = GaussQ(pair.delta(gi)) * c.conj()
    return HeckeElement(pair, out)


def hecke_basis(pair: HeckePair) -> list[HeckeElement]:
    return [HeckeElement.basis_element(pair, g) for g in pair.dc_reps]


def double_coset_product(pair: HeckePair, g: int, s: int) -> HeckeElement:
    """ΓgΓ*ΓsΓ = Σ_{[u]∈Γg⁻¹Γ/Γ, [v]∈ΓsΓ/Γ} Δ(g)/L(u⁻¹v) · Γu⁻¹vΓ."""
    G = pair.G
    out: dict[int, GaussQ] = {}
    dg = pair.delta(g)
    for u in pair.left_coset_reps_of(G.inv[g]):
        for v in pair.left_coset_reps_of(s):
            w = G.mul[G.inv[u]][v]
            r = pair.dc_rep(w)
            out[r] = out.get(r, ZERO) + GaussQ(dg / pair.L(w))
    return HeckeElement(pair, out)


def hecke_structure_table(pair: HeckePair, method: str = "double_cosets") -> dict[tuple[int, int], HeckeElement]:
    """Products of all basis pairs, keyed by (rep of left factor, rep of right factor)."""
    mul = {
        "double_cosets": hecke_mul,
        "cosets": hecke_mul_cosets,
        "closed_form": None,
    }[method]
    table = {}
    for g in pair.dc_reps:
        for s in pair.dc_reps:
            if mul is None:
                table[(g, s)] = double_coset_product(pair, g, s)
            else:
                table[(g, s)] = mul(HeckeElement.basis_element(pair, g), HeckeElement.basis_element(pair, s))
    return table
