"""Fell bundles with matrix fibers, cocycle actions on them, and orbit bundles."""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import CocycleFailure, NotHGood, NotInOrbit, NotUnitary, ShapeMismatch, ZeroFiber
from .groupoids import CheckResult, Groupoid, GroupoidAction, OrbitGroupoid, check_h_good
from .groups import Subgroup
from .scalars import Mat, is_psd


class FellBundle:
    """Fiber over x is the space of n_{r(x)} × n_{s(x)} matrices.

    Basis of C_c(A): arrow-major, then row-major matrix units.
    """

    def __init__(self, base: Groupoid, dims: Mapping[int, int]):
        self.base = base
        self.dims = {u: int(dims[u]) for u in base.units}
        for u, d in self.dims.items():
            if d < 1:
                raise ZeroFiber(f"unit {u} has fiber dimension {d}", witness=(u,))
        basis = []
        offset = []
        for x in base.arrows:
            offset.append(len(basis))
            r, c = self.shape(x)
            basis.extend((x, i, j) for i in range(r) for j in range(c))
        self.basis: tuple[tuple[int, int, int], ...] = tuple(basis)
        self.offset: tuple[int, ...] = tuple(offset)

    def shape(self, x: int) -> tuple[int, int]:
        X = self.base
        return self.dims[X.rng[x]], self.dims[X.src[x]]

    def size(self, x: int) -> int:
        r, c = self.shape(x)
        return r * c

    @property
    def dim(self) -> int:
        return len(self.basis)

    def zero(self, x: int) -> Mat:
        return Mat.zeros(*self.shape(x))

    def matrix_unit(self, x: int, i: int, j: int) -> Mat:
        return Mat.unit(*self.shape(x), i, j)

    def matrix_units(self, x: int):
        r, c = self.shape(x)
        for i in range(r):
            for j in range(c):
                yield (i, j), Mat.unit(r, c, i, j)

    def check_element(self, x: int, a: Mat):
        if a.shape != self.shape(x):
            raise ShapeMismatch(f"element of shape {a.shape} does not fit fiber {self.shape(x)} at {x}", witness=(x, a.shape))

    def __repr__(self):
        return f"FellBundle({self.base}, dim C_c(A)={self.dim})"


def build_bundle(X: Groupoid, dims) -> FellBundle:
    """``dims`` may be an int (constant), a mapping unit → int, or a callable."""
    if isinstance(dims, int):
        dims = {u: dims for u in X.units}
    elif callable(dims):
        dims = {u: dims(u) for u in X.units}
    else:
        dims = {int(u): int(d) for u, d in dims.items()}
        missing = [u for u in X.units if u not in dims]
        if missing:
            raise ZeroFiber(f"no fiber dimension for unit {missing[0]}", witness=(missing[0],))
    return FellBundle(X, dims)


class BundleAction:
    """α_g(a) = V(g, r(x))·a·V(g, s(x))* for a ∈ A_x, landing in A_{xg⁻¹}."""

    def __init__(self, bundle: FellBundle, groupoid_action: GroupoidAction, V: Mapping[tuple[int, int], Mat], check: bool = True):
        self.bundle = bundle
        self.groupoid_action = groupoid_action
        self.group = groupoid_action.group
        self.V = dict(V)
        self._Vstar = {}
        self._trivial = all(m == Mat.identity(m.rows) for m in self.V.values()) if self.V else True
        if check:
            self._validate()
        self._Vstar = {k: m.adjoint() for k, m in self.V.items()}

    def _validate(self):
        G = self.group
        X = self.bundle.base
        act = self.groupoid_action.act
        dims = self.bundle.dims
        for u in X.units:
            for g in range(G.order):
                ug = act[u][g]
                if dims[ug] != dims[u]:
                    raise ShapeMismatch(f"fiber dimension changes along the orbit of unit {u}", witness=(u, g))
                m = self.V.get((g, u))
                want = (dims[act[u][G.inv[g]]], dims[u])
                if m is None or m.shape != want:
                    raise ShapeMismatch(f"V({g},{u}) missing or of wrong shape", witness=(g, u))
                if m.adjoint() @ m != Mat.identity(dims[u]):
                    raise NotUnitary(f"V({g},{u}) is not unitary", witness=(g, u))
        for g1 in range(G.order):
            for g2 in range(G.order):
                g12 = G.mul[g1][g2]
                g2i = G.inv[g2]
                for u in X.units:
                    if self.V[(g12, u)] != self.V[(g1, act[u][g2i])] @ self.V[(g2, u)]:
                        raise CocycleFailure(f"cocycle law fails at g1={g1}, g2={g2}, u={u}", witness=(g1, g2, u))
        self._Vstar = {k: m.adjoint() for k, m in self.V.items()}
        self._check_automorphisms()

    def _check_automorphisms(self):
        # the cocycle law makes g ↦ α_g a homomorphism, so generators suffice
        X = self.bundle.base
        B = self.bundle
        for g in self.group.generators:
            for x in X.arrows:
                for _, a in B.matrix_units(x):
                    if self.alpha(g, X.inv[x], a.adjoint())[1] != self.alpha(g, x, a)[1].adjoint():
                        raise CocycleFailure(f"α_{g} does not commute with the involution at {x}", witness=(g, x))
            for (x, y), z in X.comp.items():
                for _, a in B.matrix_units(x):
                    for _, b in B.matrix_units(y):
                        xg, ag = self.alpha(g, x, a)
                        yg, bg = self.alpha(g, y, b)
                        zg, abg = self.alpha(g, z, a @ b)
                        if X.comp.get((xg, yg)) != zg or ag @ bg != abg:
                            raise CocycleFailure(f"α_{g} is not multiplicative on {(x, y)}", witness=(g, x, y))

    @property
    def is_identity_cocycle(self) -> bool:
        return self._trivial

    def alpha(self, g: int, x: int, a: Mat) -> tuple[int, Mat]:
        """(x g⁻¹, α_g(a))."""
        X = self.bundle.base
        y = self.groupoid_action.act[x][self.group.inv[g]]
        if self._trivial:
            return y, a
        return y, self.V[(g, X.rng[x])] @ a @ self._Vstar[(g, X.src[x])]

    def alpha_value(self, g: int, x: int, a: Mat) -> Mat:
        return self.alpha(g, x, a)[1]

    def fixes_fiber(self, g: int, x: int) -> bool:
        """g ∈ S(A_x): α_{g⁻¹} maps A_x to itself and fixes every element."""
        gi = self.group.inv[g]
        if self.groupoid_action.act[x][g] != x:
            return False
        if self._trivial:
            return True
        return all(self.alpha(gi, x, a)[1] == a for _, a in self.bundle.matrix_units(x))


def identity_unitaries(bundle: FellBundle, gaction: GroupoidAction) -> dict:
    G = gaction.group
    return {(g, u): Mat.identity(bundle.dims[u]) for g in range(G.order) for u in bundle.base.units}


def unitaries_from_generators(bundle: FellBundle, gaction: GroupoidAction, gen_V: Mapping[tuple[int, int], Mat]) -> dict:
    """Extend V from generators by V(gs, u) = V(g, u s⁻¹)·V(s, u)."""
    G = gaction.group
    act = gaction.act
    units = bundle.base.units
    gens = sorted({s for s, _ in gen_V})
    V = {(G.identity, u): Mat.identity(bundle.dims[u]) for u in units}
    done = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                gs = G.mul[g][s]
                if gs in done:
                    continue
                si = G.inv[s]
                for u in units:
                    V[(gs, u)] = V[(g, act[u][si])] @ gen_V[(s, u)]
                done.add(gs)
                nxt.append(gs)
        frontier = nxt
    if len(done) != G.order:
        raise CocycleFailure("generator unitaries do not reach every group element", witness=None)
    return V


def twisted_unitaries(bundle: FellBundle, gaction: GroupoidAction, rho: Callable[[int], Mat], c: Callable[[int], Mat]) -> dict:
    """V(g, u) = c(ug⁻¹)·ρ(g)·c(u)* for a unitary representation ρ and unitaries c(u)."""
    G = gaction.group
    act = gaction.act
    return {
        (g, u): c(act[u][G.inv[g]]) @ rho(g) @ c(u).adjoint()
        for g in range(G.order)
        for u in bundle.base.units
    }


def attach_bundle_action(bundle: FellBundle, groupoid_action: GroupoidAction, V=None) -> BundleAction:
    """Validate the cocycle, unitarity and automorphism axioms. ``V=None`` means V ≡ I."""
    if groupoid_action.groupoid is not bundle.base:
        raise ShapeMismatch("action and bundle live over different groupoids", witness=None)
    if V is None:
        V = identity_unitaries(bundle, groupoid_action)
    elif callable(V):
        G = groupoid_action.group
        V = {(g, u): V(g, u) for g in range(G.order) for u in bundle.base.units}
    return BundleAction(bundle, groupoid_action, V)


def check_h_good_bundle(action: BundleAction, H: Subgroup) -> CheckResult:
    """s(x)h = s(x) ⇒ α_{h⁻¹} fixes A_x pointwise; groupoid failures reported first."""
    res = check_h_good(action.groupoid_action, H)
    if not res:
        return res
    X = action.bundle.base
    act = action.groupoid_action.act
    G = action.group
    for x in X.arrows:
        s = X.src[x]
        for h in H.members:
            if act[s][h] != s:
                continue
            hi = G.inv[h]
            for ij, a in action.bundle.matrix_units(x):
                if action.alpha(hi, x, a)[1] != a:
                    return CheckResult(False, (x, h, ij), "fiber")
    return CheckResult(True)


def h_good_conditions(action: BundleAction, H: Subgroup) -> dict[str, bool]:
    """Evaluate the four equivalent formulations of H-goodness separately."""
    X = action.bundle.base
    ga = action.groupoid_action

    def stab(x):
        return frozenset(ga.stabilizer(x, H).members)

    def fstab(x):
        return frozenset(h for h in H.members if action.fixes_fiber(h, x))

    fs = [fstab(x) for x in X.arrows]
    cond_i = bool(check_h_good_bundle(action, H))
    cond_ii = all(stab(X.src[x]) == fs[x] for x in X.arrows)
    cond_iii = all(
        len({stab(X.src[x]), stab(x), stab(X.rng[x]), fs[X.src[x]], fs[x], fs[X.rng[x]]}) == 1
        for x in X.arrows
    )
    cond_iv = all(
        len({stab(x), stab(y), fs[x], fs[y]}) == 1 for (x, y) in X.comp
    )
    return {"i": cond_i, "ii": cond_ii, "iii": cond_iii, "iv": cond_iv}


class OrbitBundle:
    """A/H: the fiber over an orbit is the fiber over its canonical rep."""

    def __init__(self, action: BundleAction, subgroup: Subgroup, check: bool = True):
        res = check_h_good_bundle(action, subgroup)
        if not res:
            raise NotHGood(f"bundle action is not H-good ({res.level} level)", witness=res.witness)
        self.action = action
        self.subgroup = subgroup
        self.base = OrbitGroupoid(action.groupoid_action, subgroup, check=check)
        self.bundle = action.bundle

    @property
    def groupoid(self) -> Groupoid:
        return self.base.groupoid

    @property
    def reps(self) -> tuple[int, ...]:
        return self.base.reps

    def shape(self, k: int) -> tuple[int, int]:
        return self.bundle.shape(self.base.reps[k])

    def to_rep(self, z: int, a: Mat) -> tuple[int, Mat]:
        """Move a ∈ A_z to the canonical rep of zH; returns (orbit index, value)."""
        k = self.base.orbit_of[z]
        h = self.base.lift_h[z]
        if h == self.action.group.identity:
            return k, a
        return k, self.action.alpha(h, z, a)[1]

    def from_rep(self, k: int, a: Mat, z: int) -> Mat:
        """The representative at z of the class [a] stored at rep k."""
        if self.base.orbit_of[z] != k:
            raise NotInOrbit(f"arrow {z} is not in orbit {k}", witness=(k, z))
        h = self.base.lift_h[z]
        G = self.action.group
        if h == G.identity:
            return a
        return self.action.alpha(G.inv[h], self.base.reps[k], a)[1]

    def product(self, k1: int, a: Mat, k2: int, b: Mat) -> tuple[int, Mat] | None:
        """[a][b] = [α_{h̃⁻¹}(a)·b] with the stored witness h̃; None if not composable."""
        ht = self.base.h_witness.get((k1, k2))
        if ht is None:
            return None
        X = self.bundle.base
        x, y = self.base.reps[k1], self.base.reps[k2]
        G = self.action.group
        xh, ah = self.action.alpha(G.inv[ht], x, a)
        return self.to_rep(X.comp[(xh, y)], ah @ b)

    def product_with(self, k1: int, a: Mat, k2: int, b: Mat, ht: int) -> tuple[int, Mat]:
        """Orbit product using an explicit h̃ ∈ H_{x,y} (for independence checks)."""
        X = self.bundle.base
        x, y = self.base.reps[k1], self.base.reps[k2]
        G = self.action.group
        xh, ah = self.action.alpha(G.inv[ht], x, a)
        return self.to_rep(X.comp[(xh, y)], ah @ b)

    def star(self, k: int, a: Mat) -> tuple[int, Mat]:
        x = self.base.reps[k]
        return self.to_rep(self.bundle.base.inv[x], a.adjoint())

    def stabilizer(self, k: int) -> Subgroup:
        return self.action.groupoid_action.stabilizer(self.base.reps[k], self.subgroup)


def orbit_bundle(action: BundleAction, H: Subgroup) -> OrbitBundle:
    return OrbitBundle(action, H)


def transport(obundle_or_action, a: Mat, x: int, y: int, H: Subgroup | None = None, verify: bool = True) -> Mat:
    """The unique representative in A_y of [a] for a ∈ A_x, y ∈ xH."""
    if isinstance(obundle_or_action, OrbitBundle):
        action, H = obundle_or_action.action, obundle_or_action.subgroup
    else:
        action = obundle_or_action
    G = action.group
    act = action.groupoid_action.act
    hs = [h for h in H.members if act[x][h] == y]
    if not hs:
        raise NotInOrbit(f"arrow {y} is not in the H-orbit of {x}", witness=(x, y))
    out = action.alpha(G.inv[hs[0]], x, a)[1]
    if verify:
        for h in hs[1:]:
            if action.alpha(G.inv[h], x, a)[1] != out:
                raise NotHGood("transport depends on the chosen group element", witness=(x, hs[0], h))
    return out


def star_square_is_psd(a: Mat) -> bool:
    """a*a is positive semidefinite, certified by exact LDL*."""
    return is_psd(a.adjoint() @ a)
