"""Covariant pairs, integrated forms, and restriction of crossed-product representations.

Numerical, with tolerance τ = 1e-9.  Everything algebraic (products,
counting data, span decompositions) comes exactly from the other modules;
only the representing matrices are floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Mapping, Sequence

import numpy as np

from . import crossed as cx
from .crossed import CrossedSystem
from .errors import Degenerate, NotCovariant, NotUnital, ScenarioMismatch
from .groups import HeckePair
from .hecke import HeckeElement
from .scalars import GaussQ, Mat
from .sections import OrbitSection, alpha_section, orbit_basis, orbit_basis_element
from .starmult import StarAlgebra, crossed_algebra, extend_rep, orbit_section_algebra, span_factors

TAU = 1e-9
EXACT_LIMIT = 128


def _pairwise_sum(mats: Sequence[np.ndarray], shape) -> np.ndarray:
    """Deterministic pairwise summation."""
    items = list(mats)
    if not items:
        return np.zeros(shape, dtype=complex)
    while len(items) > 1:
        items = [items[k] + items[k + 1] if k + 1 < len(items) else items[k] for k in range(0, len(items), 2)]
    return items[0]


def _dense(rows: Sequence[Mapping[int, object]], dim: int) -> np.ndarray:
    """Sparse coordinate dicts as rows of a dense complex matrix."""
    out = np.zeros((len(rows), dim), dtype=complex)
    for r, coords in enumerate(rows):
        for k, c in coords.items():
            out[r, k] = _c(c)
    return out


def _c(z) -> complex:
    return complex(GaussQ.of(z)) if not isinstance(z, (complex, float, int)) else complex(z)


@dataclass
class Rep:
    """π(e_k) for each basis element of a finite-dimensional *-algebra."""

    algebra: StarAlgebra
    matrices: list[np.ndarray]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def space_dim(self) -> int:
        return self.matrices[0].shape[0]

    def __call__(self, coords: Mapping[int, object] | Sequence[object]) -> np.ndarray:
        items = coords.items() if isinstance(coords, Mapping) else enumerate(coords)
        terms = [_c(c) * self.matrices[k] for k, c in items if c]
        n = self.space_dim
        return _pairwise_sum(terms, (n, n))

    def homomorphism_residual(self, probes: int | None = None, seed: int = 0) -> float:
        """max over basis pairs of ‖π(ab) − π(a)π(b)‖ and ‖π(a*) − π(a)†‖.

        Exact entrywise up to ``EXACT_LIMIT`` basis elements.  Beyond that, or
        when ``probes`` is given, the product part is compared on that many
        seeded random unit vectors, which is O(dim⁴) instead of O(dim⁵).
        """
        A = self.algebra
        n = self.space_dim
        M = np.stack(self.matrices)
        flat = M.reshape(A.dim, n * n)
        stars = _dense(A.star_images, A.dim)
        worst = float(np.max(np.abs((stars @ flat).reshape(M.shape) - M.conj().transpose(0, 2, 1)), initial=0.0))
        if probes is None and A.dim > EXACT_LIMIT:
            probes = 8
        if probes is None:
            for i in range(A.dim):
                lhs = (_dense(A.table[i], A.dim) @ flat).reshape(M.shape)
                worst = max(worst, float(np.max(np.abs(lhs - M[i] @ M))))
            return worst
        rng = np.random.default_rng(seed)
        V = rng.standard_normal((n, probes)) + 1j * rng.standard_normal((n, probes))
        V /= np.linalg.norm(V, axis=0)
        MV = M @ V
        MVflat = MV.reshape(A.dim, n * probes)
        for i in range(A.dim):
            lhs = (_dense(A.table[i], A.dim) @ MVflat).reshape(MV.shape)
            worst = max(worst, float(np.max(np.abs(lhs - M[i] @ MV))))
        return worst

    def essential_subspace(self, tolerance: float = TAU) -> np.ndarray:
        """Orthonormal basis of π(A)ℋ; the identity when π is nondegenerate."""
        n = self.space_dim
        key = ("essential", tolerance)
        if key not in self._cache:
            U, s, _ = np.linalg.svd(self.factors().R.T)
            r = int(np.sum(s > tolerance))
            self._cache[key] = np.eye(n, dtype=complex) if r == n else U[:, :r]
        return self._cache[key]

    def factors(self):
        """QR factors of the spanning vectors π(e_k), shared by every extension through this π."""
        if "factors" not in self._cache:
            self._cache["factors"] = span_factors(self.matrices)
        return self._cache["factors"]

    def is_nondegenerate(self, tolerance: float = TAU) -> bool:
        return self.essential_subspace(tolerance).shape[1] == self.space_dim


@dataclass
class CovariantPair:
    """π on ℋ, μ on W = π(C_c(A/Γ))ℋ given in the orthonormal basis ``W``."""

    system: CrossedSystem
    pi: Rep
    mu: dict[int, np.ndarray]
    W: np.ndarray
    _ext: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n, w = self.W.shape
        self._plain = n == w and np.array_equal(self.W, np.eye(n))

    def mu_of(self, g: int) -> np.ndarray:
        return self.mu[self.system.pair.dc_rep(g)]

    def pi_w(self, coords) -> np.ndarray:
        """π compressed to W."""
        if self._plain:
            return self.pi(coords)
        return self.W.conj().T @ self.pi(coords) @ self.W

    def pi_tilde_units(self, y: int) -> np.ndarray:
        """π̃(1_{yΓ}) on W, through the multiplier extension."""
        S = self.system
        key = ("units", S.base.base.rep(y))
        if key not in self._ext:
            self._ext[key] = self.W.conj().T @ _extend_left(self.pi, S, cx.unit_indicator(S, y)) @ self.W
        return self._ext[key]

    def pi_section(self, a: Mat, x: int) -> np.ndarray:
        """π([a]_{xΓ}) on W."""
        key = ("section", x, a.data)
        if key not in self._ext:
            self._ext[key] = self.pi_w(OrbitSection.at(self.system.base, x, a).coords())
        return self._ext[key]

    def block(self, b: Mat, z: int, h: int) -> np.ndarray:
        """π̃([b]_{zΓ}) μ(ΓhΓ) π̃(1_{s(z)hΓ})."""
        S = self.system
        tail = S.action.groupoid_action.act[S.groupoid.src[z]][h]
        return self.pi_section(b, z) @ self.mu_of(h) @ self.pi_tilde_units(tail)

    def embedded_mu(self, g: int) -> np.ndarray:
        """W μ W†, a basis-free form of μ(ΓgΓ) on ℋ."""
        return self.W @ self.mu_of(g) @ self.W.conj().T


def _extend_left(pi: Rep, S: CrossedSystem, unit_elem: cx.CrossedElement) -> np.ndarray:
    """π̃ of the multiplier 'left multiplication by a unit function' on C_c(A/Γ)."""
    ob = S.base
    f = unit_elem.values[S.G.identity]
    coords = [(f * orbit_basis_element(ob, k)).coords() for k in range(len(orbit_basis(ob)))]
    cols = [[coords[k].get(j, 0) for j in range(len(coords))] for k in range(len(coords))]
    ext = extend_rep(pi.matrices, cols, factors=pi.factors())
    if ext.residual > TAU or ext.uniqueness_gap > TAU:
        raise Degenerate("extension equations are inconsistent", witness=(ext.residual, ext.uniqueness_gap))
    return ext.matrix


# -- standard constructions -------------------------------------------------


def regular_rep(pair: HeckePair) -> dict[int, np.ndarray]:
    """μ(f)[kΓ, hΓ] = f(Γk⁻¹hΓ) on functions on G/Γ."""
    G = pair.G
    n = pair.n_cosets
    out = {}
    for g in pair.dc_reps:
        d = pair.dc_of[g]
        M = np.zeros((n, n), dtype=complex)
        for a, k in enumerate(pair.coset_reps):
            for b, h in enumerate(pair.coset_reps):
                if pair.dc_of[G.mul[G.inv[k]][h]] == d:
                    M[a, b] = 1.0
        out[g] = M
    return out


def hecke_rep_of(mu: Mapping[int, np.ndarray], h: HeckeElement) -> np.ndarray:
    n = next(iter(mu.values())).shape[0]
    return _pairwise_sum([_c(c) * mu[g] for g, c in h.coeffs.items()], (n, n))


def hecke_rep_residual(pair: HeckePair, mu: Mapping[int, np.ndarray]) -> float:
    """Distance of μ from a unital *-homomorphism, over basis pairs."""
    from .hecke import hecke_mul, hecke_star

    n = next(iter(mu.values())).shape[0]
    worst = float(np.max(np.abs(mu[pair.G.identity] - np.eye(n))))
    for g in pair.dc_reps:
        bg = HeckeElement.basis_element(pair, g)
        worst = max(worst, float(np.max(np.abs(hecke_rep_of(mu, hecke_star(bg)) - mu[g].conj().T))))
        for s in pair.dc_reps:
            prod = hecke_mul(bg, HeckeElement.basis_element(pair, s))
            worst = max(worst, float(np.max(np.abs(hecke_rep_of(mu, prod) - mu[g] @ mu[s]))))
    return worst


def section_algebra(system: CrossedSystem) -> StarAlgebra:
    alg = getattr(system, "_section_algebra", None)
    if alg is None:
        alg = orbit_section_algebra(system.base)
        system._section_algebra = alg
    return alg


def point_pair(system: CrossedSystem) -> CovariantPair:
    """π scalar on ℂ^{G/Γ}, μ the regular representation (one-point base)."""
    alg = section_algebra(system)
    if alg.dim != 1:
        raise ScenarioMismatch("point pair needs a one-dimensional C_c(A/Γ)", witness=alg.dim)
    mu = regular_rep(system.pair)
    n = system.pair.n_cosets
    pi = Rep(alg, [np.eye(n, dtype=complex)])
    return CovariantPair(system, pi, mu, np.eye(n, dtype=complex))


def invariant_section_pair(system: CrossedSystem, character: Mapping[int, complex] | None = None) -> CovariantPair:
    """Γ normal: ℋ = Γ-invariant sections of A, π = left multiplication, μ(ΓgΓ) = χ(g)·ᾱ_g.

    ``character`` is an optional unitary character of G/Γ given on coset reps.
    """
    S = system
    P = S.pair
    if any(len(P.gamma_g(g)) != len(S.gamma) for g in S.G.elements):
        raise ScenarioMismatch("Γ is not normal", witness=None)
    ob = S.base
    basis = orbit_basis(ob)
    elems = [orbit_basis_element(ob, k) for k in range(len(basis))]
    index = {b: k for k, b in enumerate(basis)}
    norms = [sqrt(len(ob.base.members(ob.base.orbit_of[x]))) for (x, _, _) in basis]
    n = len(elems)

    def matrix_of(image_coords: list[dict[int, GaussQ]]) -> np.ndarray:
        M = np.zeros((n, n), dtype=complex)
        for k, col in enumerate(image_coords):
            for j, c in col.items():
                M[j, k] = complex(c) * norms[j] / norms[k]
        return M

    alg = section_algebra(S)
    pi = Rep(alg, [matrix_of([(a * b).coords() for b in elems]) for a in elems])
    mu = {}
    for g in P.dc_reps:
        cols = []
        for b in elems:
            F = alpha_section(S.action, g, b.lift())
            cols.append(OrbitSection.descend(F, ob).coords())
        chi = 1.0 if character is None else complex(character[g])
        mu[g] = chi * matrix_of(cols)
    return CovariantPair(S, pi, mu, np.eye(n, dtype=complex))


# -- covariance -------------------------------------------------------------


@dataclass
class CovarianceReport:
    max_residual: float
    failing: list[tuple[int, int, int, tuple[int, int]]]
    free_form_gap: float | None
    tolerance: float

    @property
    def ok(self) -> bool:
        return not self.failing and (self.free_form_gap is None or self.free_form_gap <= self.tolerance)

    def __bool__(self):
        return self.ok


def check_covariant(pair: CovariantPair, tolerance: float = TAU) -> CovarianceReport:
    """Both sides of the covariance identity for all (g, s) and every orbit basis [E_ij]_{xΓ}."""
    S = pair.system
    P = S.pair
    if not pair.pi.is_nondegenerate(tolerance):
        raise Degenerate("π is degenerate", witness=pair.pi.essential_subspace(tolerance).shape[1])
    w = pair.W.shape[1]
    if np.max(np.abs(pair.mu_of(S.G.identity) - np.eye(w))) > tolerance:
        raise NotUnital("μ(Γ) is not the identity", witness=float(np.max(np.abs(pair.mu_of(S.G.identity) - np.eye(w)))))
    worst = 0.0
    free_gap = 0.0 if S.free else None
    failing = []
    for g in P.dc_reps:
        for s in P.dc_reps:
            for (x, i, j) in orbit_basis(S.base):
                a = S.bundle.matrix_unit(x, i, j)
                lhs = pair.mu_of(g) @ pair.pi_section(a, x) @ pair.mu_of(s)
                rhs = _terms_operator(pair, cx.product_terms(S, g, (a, x), s, method="third"))
                r = float(np.max(np.abs(lhs - rhs)))
                worst = max(worst, r)
                if r > tolerance:
                    failing.append((g, s, x, (i, j)))
                if S.free:
                    rhs_free = _terms_operator(pair, cx.product_terms(S, g, (a, x), s, method="free"))
                    free_gap = max(free_gap, float(np.max(np.abs(rhs_free - rhs))))
    return CovarianceReport(worst, failing, free_gap, tolerance)


def _terms_operator(pair: CovariantPair, terms) -> np.ndarray:
    w = pair.W.shape[1]
    return _pairwise_sum([float(coef) * pair.block(b, z, h) for coef, b, z, h in terms], (w, w))


def strange_identity_residuals(pair: CovariantPair) -> tuple[float, float]:
    """The two consequences of covariance relating μ and π̃ around a block.

    First: π̃(1_{r(x)Γ}) μ(ΓgΓ) π̃([α_{g⁻¹}(a)]_{xgΓ}) = π̃([a]_{xΓ}) μ(ΓgΓ) π̃(1_{s(x)gΓ}).
    Second: μ(ΓgΓ) π̃([a]_{xΓ}) = Σ_{γ∈E} π̃(1_{r(x)γg⁻¹Γ}) μ(ΓgΓ) π̃([a]_{xΓ}).
    """
    S = pair.system
    G = S.G
    X = S.groupoid
    act = S.action.groupoid_action.act
    first = second = 0.0
    for g in G.elements:
        gi = G.inv[g]
        for (x, i, j) in orbit_basis(S.base):
            a = S.bundle.matrix_unit(x, i, j)
            xg, b = S.action.alpha(gi, x, a)
            lhs = pair.pi_tilde_units(X.rng[x]) @ pair.mu_of(g) @ pair.pi_section(b, xg)
            rhs = pair.pi_section(a, x) @ pair.mu_of(g) @ pair.pi_tilde_units(act[X.src[x]][g])
            first = max(first, float(np.max(np.abs(lhs - rhs))))
            lhs = pair.mu_of(g) @ pair.pi_section(a, x)
            parts = [
                pair.pi_tilde_units(act[X.rng[x]][G.mul[gam][gi]]) @ pair.mu_of(g) @ pair.pi_section(a, x)
                for gam in cx.e_set(S, gi, G.identity, X.src[x])
            ]
            w = pair.W.shape[1]
            second = max(second, float(np.max(np.abs(lhs - _pairwise_sum(parts, (w, w))))))
    return first, second


def unit_span_gap(pair: CovariantPair, tolerance: float = TAU) -> float:
    """Distance between the column spaces of π(C_c(A/Γ)) and π̃(C_c(X⁰/Γ)), as projector difference."""
    S = pair.system
    n = pair.pi.space_dim
    A = np.hstack(pair.pi.matrices)
    units = sorted({S.base.base.rep(u) for u in S.groupoid.units})
    B = np.hstack([pair.W @ pair.pi_tilde_units(u) @ pair.W.conj().T for u in units])

    def proj(M):
        U, s, _ = np.linalg.svd(M, full_matrices=False)
        r = int(np.sum(s > tolerance))
        Q = U[:, :r]
        return Q @ Q.conj().T

    return float(np.max(np.abs(proj(A) - proj(B)))) if n else 0.0


# -- integrated form and restriction ----------------------------------------


def crossed_alg(system: CrossedSystem) -> StarAlgebra:
    alg = getattr(system, "_crossed_algebra", None)
    if alg is None:
        alg = crossed_algebra(system)
        system._crossed_algebra = alg
    return alg


def integrated_form(pair: CovariantPair, tolerance: float = TAU, check: bool = True) -> Rep:
    """Φ(f) = Σ π̃([a]_{xΓ}) μ(ΓgΓ) π̃(1_{s(x)gΓ}) over the span decomposition of f, on W."""
    S = pair.system
    if check:
        rep = check_covariant(pair, tolerance)
        if not rep:
            raise NotCovariant(
                f"covariance fails (residual {rep.max_residual:.3g})",
                witness=rep.failing[0] if rep.failing else rep.free_form_gap,
            )
    mats = []
    w = pair.W.shape[1]
    for k in range(S.dim):
        f = cx.basis_element(S, k)
        mats.append(_pairwise_sum([pair.block(a, x, g) for a, x, g in cx.span_decompose(f)], (w, w)))
    Phi = Rep(crossed_alg(S), mats)
    if check:
        r = Phi.homomorphism_residual()
        if r > tolerance:
            raise NotCovariant(f"integrated form is not a *-homomorphism (residual {r:.3g})", witness=r)
        if not Phi.is_nondegenerate(tolerance):
            raise Degenerate("integrated form is degenerate", witness=None)
    return Phi


def restrict_rep(system: CrossedSystem, Phi: Rep, tolerance: float = TAU) -> CovariantPair:
    """(Φ|, ω_Φ): restriction to C_c(A/Γ) and the multiplier extension on ℋ(G,Γ)."""
    S = system
    if not Phi.is_nondegenerate(tolerance):
        raise Degenerate("Φ is degenerate", witness=None)
    ob = S.base
    alg = section_algebra(S)
    pi_mats = [Phi(cx.embed_section(S, orbit_basis_element(ob, k)).coords()) for k in range(alg.dim)]
    pi = Rep(alg, pi_mats)
    W = pi.essential_subspace(tolerance)
    table = crossed_alg(S).table
    mu = {}
    for g in S.pair.dc_reps:
        left = cx.embed_hecke(S, HeckeElement.basis_element(S.pair, g)).coords()
        # left multiplication by the Hecke element, column b = coordinates of left * e_b
        cols = []
        for b in range(S.dim):
            acc = {}
            for i, c in left.items():
                for k, t in table[i][b].items():
                    acc[k] = acc.get(k, 0) + GaussQ.of(c) * t
            cols.append([acc.get(j, 0) for j in range(S.dim)])
        ext = extend_rep(Phi.matrices, cols, tolerance, factors=Phi.factors())
        if ext.residual > tolerance or ext.uniqueness_gap > tolerance:
            raise Degenerate("ω_Φ is not determined", witness=(g, ext.residual, ext.uniqueness_gap))
        mu[g] = W.conj().T @ ext.matrix @ W
    return CovariantPair(S, pi, mu, W)


def pair_distance(p: CovariantPair, q: CovariantPair) -> float:
    """Operator max-norm distance between two covariant pairs on the same ℋ."""
    if p.pi.space_dim != q.pi.space_dim:
        return float("inf")
    d = max(float(np.max(np.abs(a - b))) for a, b in zip(p.pi.matrices, q.pi.matrices))
    for g in p.system.pair.dc_reps:
        d = max(d, float(np.max(np.abs(p.embedded_mu(g) - q.embedded_mu(g)))))
    return d


def rep_distance(A: Rep, B: Rep) -> float:
    return max(float(np.max(np.abs(a - b))) for a, b in zip(A.matrices, B.matrices))


def perturb_mu(pair: CovariantPair, g: int, entry: tuple[int, int] = (0, 0), amount: float = 0.1) -> CovariantPair:
    """A copy of ``pair`` with one entry of μ(ΓgΓ) moved by ``amount``."""
    mu = {k: v.copy() for k, v in pair.mu.items()}
    mu[pair.system.pair.dc_rep(g)][entry] += amount
    return CovariantPair(pair.system, pair.pi, mu, pair.W)


def crossed_regular_rep(system: CrossedSystem) -> Rep:
    """Left multiplication on the crossed product itself.

    The inner product is ⟨f1, f2⟩ = Σ_{cosets} Σ_x tr(f1(c)(x)* f2(c)(x)) on
    lifted values, which is φ(f1* * f2) for an ᾱ-invariant trace φ, so
    left multiplication is a *-representation.  Matrices are expressed in an
    orthonormal basis obtained by Cholesky factorisation of the Gram matrix.
    """
    S = system
    P = S.pair
    alg = crossed_alg(S)
    n = S.dim
    elems = [cx.basis_element(S, k) for k in range(n)]
    full = []
    for f in elems:
        vals = {}
        for c in f.support_cosets():
            for x, a in f.value_at_coset(c).data.items():
                vals[(c, x)] = a.to_complex()
        full.append(vals)
    gram = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            common = full[i].keys() & full[j].keys()
            v = sum(np.trace(full[i][k].conj().T @ full[j][k]) for k in sorted(common))
            gram[i, j] = v
            gram[j, i] = np.conj(v)
    L = np.linalg.cholesky(gram)
    Linv = np.linalg.inv(L)
    mats = []
    for a in range(n):
        Lm = np.zeros((n, n), dtype=complex)
        for b in range(n):
            for k, c in alg.table[a][b].items():
                Lm[k, b] = complex(c)
        mats.append(L.conj().T @ Lm @ Linv.conj().T)
    return Rep(alg, mats)
