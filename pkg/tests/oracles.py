"""Brute-force reference implementations used only by the tests.

Everything here works from the raw tables (group multiplication, groupoid
composition, action table, unitaries) and sums over whole groups or sets
rather than over chosen representatives, so it shares no code path with the
library beyond reading its input data.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


# -- groups and Hecke algebras ----------------------------------------------


def left_cosets(G, K):
    return {frozenset(G.mul[g][k] for k in K) for g in range(G.order)}


def double_coset_sets(G, B, C):
    return {frozenset(G.mul[G.mul[b][g]][c] for b in B for c in C) for g in range(G.order)}


def index_counts(G, gamma, g):
    """(L, R): left and right Γ-cosets inside ΓgΓ."""
    dc = next(d for d in double_coset_sets(G, gamma, gamma) if g in d)
    L = len({frozenset(G.mul[x][c] for c in gamma) for x in dc})
    R = len({frozenset(G.mul[c][x] for c in gamma) for x in dc})
    return L, R


def hecke_product(G, gamma, f1, f2):
    """(f1*f2)(g) = Σ_{hΓ} f1(h) f2(h⁻¹g) for functions given on all of G."""
    n = Fraction(1, len(gamma))
    return {
        g: sum((f1[h] * f2[G.mul[G.inv[h]][g]] for h in range(G.order)), Fraction(0)) * n
        for g in range(G.order)
    }


def hecke_indicator(G, gamma, g):
    dc = next(d for d in double_coset_sets(G, gamma, gamma) if g in d)
    return {x: Fraction(int(x in dc)) for x in range(G.order)}


def hecke_expand(G, gamma, f):
    """Coefficients of f on double cosets, keyed by least element."""
    out = {}
    for d in double_coset_sets(G, gamma, gamma):
        c = f[min(d)]
        if c:
            out[min(d)] = c
    return out


# -- counting numbers --------------------------------------------------------


def counting_sets(G, gamma, act, w, v, y):
    """(n, d) straight from the set definitions, cosets enumerated as sets."""
    gset = set(gamma)
    wv = G.mul[w][v]
    conj = {G.mul[G.mul[wv][c]][G.inv[wv]] for c in gamma}
    gamma_wv = gset & conj
    dc_w = next(d for d in double_coset_sets(G, gamma, gamma) if w in d)
    dc_v = next(d for d in double_coset_sets(G, gamma, gamma) if v in d)
    target = act[y][G.inv[w]]
    n = d = 0
    for coset in {frozenset(G.mul[x][c] for c in gamma) for x in dc_w}:
        r = min(coset)
        ri = G.inv[r]
        if not all(G.mul[G.mul[ri][wv]][c] in dc_v for c in gamma):
            continue
        pts = {act[y][G.mul[c][ri]] for c in gamma}
        if target in pts:
            n += 1
        if target in {act[p][t] for p in pts for t in gamma_wv}:
            d += 1
    return n, d


# -- crossed products over a Fell bundle -------------------------------------


class DenseModel:
    """Crossed-product elements as functions G → sections, values dense complex.

    f(gγ) = f(g) and f(γg) = ᾱ_γ f(g); products sum over the whole group.
    """

    def __init__(self, system):
        action = system.action
        self.G = system.G
        self.gamma = sorted(system.gamma.members)
        self.X = system.groupoid
        self.act = action.groupoid_action.act
        self.dims = system.bundle.dims
        self.V = {k: m.to_complex() for k, m in action.V.items()}
        self.trivial = action.is_identity_cocycle
        self.pairs = {}
        for (x, y), z in self.X.comp.items():
            self.pairs.setdefault(z, []).append((x, y))

    def shape(self, x):
        return self.dims[self.X.rng[x]], self.dims[self.X.src[x]]

    # sections: dict arrow -> ndarray
    def alpha(self, g, x, a):
        y = self.act[x][self.G.inv[g]]
        if self.trivial:
            return y, a
        X = self.X
        return y, self.V[(g, X.rng[x])] @ a @ self.V[(g, X.src[x])].conj().T

    def alpha_section(self, g, F):
        out = {}
        for x, a in F.items():
            y, b = self.alpha(g, x, a)
            out[y] = b
        return out

    def sec_mul(self, F1, F2):
        out = {}
        for z, pairs in self.pairs.items():
            acc = None
            for x, y in pairs:
                if x in F1 and y in F2:
                    t = F1[x] @ F2[y]
                    acc = t if acc is None else acc + t
            if acc is not None:
                out[z] = acc
        return out

    def sec_star(self, F):
        return {self.X.inv[x]: a.conj().T for x, a in F.items()}

    def sec_add(self, F1, F2, c=1.0):
        out = {x: a.copy() for x, a in F1.items()}
        for x, a in F2.items():
            out[x] = out[x] + c * a if x in out else c * a
        return out

    def unit_section(self, units=None):
        us = self.X.units if units is None else units
        return {u: np.eye(self.dims[u], dtype=complex) for u in us}

    def orbit_lift(self, x, a, K):
        F = {}
        for k in K:
            y, b = self.alpha(self.G.inv[k], x, a)
            F.setdefault(y, b)
        return F

    # crossed elements: dict g -> section, defined on all of G
    def conv(self, f1, f2):
        G = self.G
        scale = 1.0 / len(self.gamma)
        out = {}
        for g in range(G.order):
            acc = {}
            for h in range(G.order):
                a = f1.get(h)
                b = f2.get(G.mul[G.inv[h]][g])
                if not a or not b:
                    continue
                acc = self.sec_add(acc, self.sec_mul(a, self.alpha_section(h, b)), scale)
            if acc:
                out[g] = acc
        return out

    def star(self, f, delta):
        G = self.G
        out = {}
        for g in range(G.order):
            v = f.get(G.inv[g])
            if v:
                out[g] = {x: a * float(delta(G.inv[g])) for x, a in self.sec_star(self.alpha_section(g, v)).items()}
        return out

    def hecke(self, g):
        dc = next(d for d in double_coset_sets(self.G, self.gamma, self.gamma) if g in d)
        return {k: self.unit_section() for k in dc}

    def section_at_gamma(self, x, a):
        F = self.orbit_lift(x, a, self.gamma)
        return {c: F for c in self.gamma}

    def units_at_gamma(self, y):
        orbit = {self.act[y][c] for c in self.gamma}
        F = self.unit_section(sorted(orbit))
        return {c: F for c in self.gamma}

    def from_library(self, f):
        out = {}
        for g in range(self.G.order):
            v = f.value(g)
            if not v.is_zero():
                out[g] = {x: a.to_complex() for x, a in v.data.items()}
        return out

    def distance(self, f1, f2):
        worst = 0.0
        for g in set(f1) | set(f2):
            a, b = f1.get(g, {}), f2.get(g, {})
            for x in set(a) | set(b):
                sa = a.get(x, np.zeros(self.shape(x)))
                sb = b.get(x, np.zeros(self.shape(x)))
                worst = max(worst, float(np.max(np.abs(sa - sb))))
        return worst
