"""Finite discrete groupoids, right group actions on them, and orbit groupoids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import (
    AssociativityFailure,
    BreaksComposition,
    CompositionIllTyped,
    InverseFailure,
    NotAnAction,
    NotHGood,
)
from .groups import FiniteGroup, GroupSetAction, Subgroup, cyclic_group


class Groupoid:
    """Arrows ``0..n-1``; units are the arrows u with src(u) = rng(u) = u.

    ``comp[(x, y)]`` is the product xy, defined exactly when src(x) = rng(y).
    """

    def __init__(
        self,
        src: Sequence[int],
        rng: Sequence[int],
        inv: Sequence[int],
        comp: Mapping[tuple[int, int], int],
        labels: Sequence[str] | None = None,
        check: bool = True,
    ):
        self.n = len(src)
        self.src = tuple(src)
        self.rng = tuple(rng)
        self.inv = tuple(inv)
        self.comp = dict(comp)
        self.labels = tuple(labels) if labels is not None else tuple(str(x) for x in range(self.n))
        self.units = tuple(x for x in range(self.n) if self.src[x] == x)
        by_rng: dict[int, list[int]] = {u: [] for u in self.units}
        by_src: dict[int, list[int]] = {u: [] for u in self.units}
        for x in range(self.n):
            if self.src[x] in by_src:
                by_src[self.src[x]].append(x)
            if self.rng[x] in by_rng:
                by_rng[self.rng[x]].append(x)
        self.by_rng = {u: tuple(v) for u, v in by_rng.items()}
        self.by_src = {u: tuple(v) for u, v in by_src.items()}
        if check:
            self._validate()

    def _validate(self):
        n = self.n
        if not (len(self.rng) == len(self.inv) == n):
            raise CompositionIllTyped("src/rng/inv tables differ in length", witness=None)
        for x in range(n):
            for name, t in (("src", self.src), ("rng", self.rng), ("inv", self.inv)):
                if not 0 <= t[x] < n:
                    raise CompositionIllTyped(f"{name}({x}) out of range", witness=(x,))
            s, r = self.src[x], self.rng[x]
            if self.src[s] != s or self.rng[s] != s or self.src[r] != r or self.rng[r] != r:
                raise CompositionIllTyped(f"src/rng of arrow {x} are not units", witness=(x,))
        for (x, y), z in self.comp.items():
            if not (0 <= x < n and 0 <= y < n and 0 <= z < n):
                raise CompositionIllTyped(f"composition entry {(x, y)} out of range", witness=(x, y))
            if self.src[x] != self.rng[y]:
                raise CompositionIllTyped(f"{x}·{y} defined but src(x) != rng(y)", witness=(x, y))
            if self.src[z] != self.src[y] or self.rng[z] != self.rng[x]:
                raise CompositionIllTyped(f"{x}·{y} = {z} has wrong source or range", witness=(x, y))
        for x in range(n):
            for y in self.by_rng[self.src[x]]:
                if (x, y) not in self.comp:
                    raise CompositionIllTyped(f"{x}·{y} should be defined", witness=(x, y))
        for x in range(n):
            if self.comp[(self.rng[x], x)] != x or self.comp[(x, self.src[x])] != x:
                raise CompositionIllTyped(f"units do not act as identities on {x}", witness=(x,))
        for x in range(n):
            for y in self.by_rng[self.src[x]]:
                xy = self.comp[(x, y)]
                for z in self.by_rng[self.src[y]]:
                    if self.comp[(xy, z)] != self.comp[(x, self.comp[(y, z)])]:
                        raise AssociativityFailure(f"({x}{y}){z} != {x}({y}{z})", witness=(x, y, z))
        for x in range(n):
            xi = self.inv[x]
            if self.inv[xi] != x:
                raise InverseFailure(f"inverse is not involutive at {x}", witness=(x,))
            if self.src[xi] != self.rng[x] or self.comp.get((x, xi)) != self.rng[x] or self.comp.get((xi, x)) != self.src[x]:
                raise InverseFailure(f"inv({x}) is not a two-sided inverse", witness=(x,))

    def __len__(self):
        return self.n

    @property
    def arrows(self) -> range:
        return range(self.n)

    def composable(self, x: int, y: int) -> bool:
        return self.src[x] == self.rng[y]

    def mul(self, x: int, y: int) -> int:
        try:
            return self.comp[(x, y)]
        except KeyError:
            raise CompositionIllTyped(f"{x}·{y} is not defined", witness=(x, y)) from None

    def is_unit(self, x: int) -> bool:
        return self.src[x] == x

    def __repr__(self):
        return f"Groupoid(arrows={self.n}, units={len(self.units)})"


def trivial_set(size: int, labels: Sequence[str] | None = None) -> Groupoid:
    """A set viewed as a groupoid with only units."""
    ids = list(range(size))
    return Groupoid(ids, ids, ids, {(x, x): x for x in ids}, labels=labels)


def one_unit_group(group: FiniteGroup) -> Groupoid:
    """A group as a groupoid with the identity as its only unit."""
    n = group.order
    e = group.identity
    comp = {(x, y): group.mul[x][y] for x in range(n) for y in range(n)}
    return Groupoid([e] * n, [e] * n, group.inv, comp, labels=group.labels)


def transformation(group: FiniteGroup) -> Groupoid:
    """Arrows (s, t) ∈ G×G with (s,tr)(t,r) = (st,r); index s·|G| + t.

    src(s,t) = (e,t), rng(s,t) = (e,st), (s,t)⁻¹ = (s⁻¹,st).
    """
    n = group.order
    e = group.identity
    mul, inv = group.mul, group.inv

    def idx(s, t):
        return s * n + t

    src, rng, inverse, labels = [], [], [], []
    for s in range(n):
        for t in range(n):
            src.append(idx(e, t))
            rng.append(idx(e, mul[s][t]))
            inverse.append(idx(inv[s], mul[s][t]))
            labels.append(f"({group.label(s)},{group.label(t)})")
    comp = {}
    for s in range(n):
        for t in range(n):
            for r in range(n):
                comp[(idx(s, mul[t][r]), idx(t, r))] = idx(mul[s][t], r)
    return Groupoid(src, rng, inverse, comp, labels=labels)


def pair_groupoid(size: int) -> Groupoid:
    """Arrows (i, j) for i, j < size with (i,j)(j,k) = (i,k); index i·size + j."""
    n = size

    def idx(i, j):
        return i * n + j

    src = [idx(j, j) for i in range(n) for j in range(n)]
    rng = [idx(i, i) for i in range(n) for j in range(n)]
    inverse = [idx(j, i) for i in range(n) for j in range(n)]
    comp = {(idx(i, j), idx(j, k)): idx(i, k) for i in range(n) for j in range(n) for k in range(n)}
    labels = [f"({i},{j})" for i in range(n) for j in range(n)]
    return Groupoid(src, rng, inverse, comp, labels=labels)


def build_groupoid(spec, group: FiniteGroup | None = None) -> Groupoid:
    """Groupoid from explicit tables or a named constructor.

    Constructors: ``trivial_set`` (size), ``one_unit_group`` (a group spec or
    ``cyclic``), ``transformation`` (uses ``group``), ``pair`` (size).
    """
    if isinstance(spec, Groupoid):
        return spec
    if "constructor" in spec:
        kind = spec["constructor"]
        if kind == "trivial_set":
            return trivial_set(int(spec["size"]))
        if kind == "one_unit_group":
            from .groups import build_group

            return one_unit_group(build_group(spec["group"]))
        if kind == "transformation":
            if group is None:
                raise ValueError("transformation groupoid needs the acting group")
            return transformation(group)
        if kind == "pair":
            return pair_groupoid(int(spec["size"]))
        raise ValueError(f"unknown groupoid constructor {kind!r}")
    comp = {(int(a), int(b)): int(c) for a, b, c in spec["comp"]}
    return Groupoid(spec["src"], spec["rng"], spec["inv"], comp, labels=spec.get("labels"))


class GroupoidAction:
    """Right action of a finite group on a groupoid by automorphisms; ``act[x][g]``."""

    def __init__(self, groupoid: Groupoid, group: FiniteGroup, act: Sequence[Sequence[int]], check: bool = True):
        self.groupoid = groupoid
        self.group = group
        self.act = tuple(tuple(row) for row in act)
        if check:
            self._validate()

    def _validate(self):
        X, G = self.groupoid, self.group
        if len(self.act) != X.n:
            raise NotAnAction("action table has the wrong number of arrows", witness=None)
        for x, row in enumerate(self.act):
            if len(row) != G.order or any(not 0 <= y < X.n for y in row):
                raise NotAnAction(f"act({x}, ·) is not total", witness=(x,))
            if row[G.identity] != x:
                raise NotAnAction(f"identity moves arrow {x}", witness=(x, G.identity))
        for g in range(G.order):
            if len({self.act[x][g] for x in range(X.n)}) != X.n:
                raise NotAnAction(f"element {g} does not act bijectively", witness=(g,))
        for x in range(X.n):
            row = self.act[x]
            for g in range(G.order):
                xg = self.act[row[g]]
                mg = G.mul[g]
                for h in range(G.order):
                    if xg[h] != row[mg[h]]:
                        raise NotAnAction(f"(x g) h != x (g h) at {(x, g, h)}", witness=(x, g, h))
        for (x, y), z in X.comp.items():
            for g in range(G.order):
                xg, yg = self.act[x][g], self.act[y][g]
                if X.src[xg] != X.rng[yg]:
                    raise BreaksComposition(f"{x}g, {y}g not composable for g={g}", witness=(x, y, g))
                if X.comp[(xg, yg)] != self.act[z][g]:
                    raise BreaksComposition(f"(xg)(yg) != (xy)g at {(x, y, g)}", witness=(x, y, g))
        for x in range(X.n):
            for g in range(G.order):
                if self.act[X.inv[x]][g] != X.inv[self.act[x][g]]:
                    raise BreaksComposition(f"inv(x)g != inv(xg) at {(x, g)}", witness=(x, g))

    def __call__(self, x: int, g: int) -> int:
        return self.act[x][g]

    def as_set_action(self) -> GroupSetAction:
        return GroupSetAction(self.group, self.act, check=False)

    def unit_action_is_free(self, H: Subgroup | None = None) -> bool:
        H = H or self.group.whole()
        e = self.group.identity
        return all(self.act[u][h] != u for u in self.groupoid.units for h in H.members if h != e)

    def stabilizer(self, x: int, H: Subgroup | None = None) -> Subgroup:
        H = H or self.group.whole()
        return Subgroup(self.group, (h for h in H.members if self.act[x][h] == x), check=False)

    def orbit(self, x: int, H: Subgroup) -> frozenset:
        return frozenset(self.act[x][h] for h in H.members)


def attach_action(X: Groupoid, G: FiniteGroup, act) -> GroupoidAction:
    """Validate a right action given as a table, a callable, or the string ``"trivial"``."""
    if isinstance(act, str):
        if act != "trivial":
            raise ValueError(f"unknown named action {act!r}")
        table = [[x] * G.order for x in range(X.n)]
    elif callable(act):
        table = [[act(x, g) for g in range(G.order)] for x in range(X.n)]
    else:
        table = act
    return GroupoidAction(X, G, table)


def action_from_generators(X: Groupoid, G: FiniteGroup, gen_maps: Mapping[int, Sequence[int]]) -> GroupoidAction:
    """Extend arrow permutations given on generators to a table; x(gs) = (xg)s.

    Inconsistent generator data surfaces as NotAnAction from validation or
    from two words reaching the same element with different maps.
    """
    ident = tuple(range(X.n))
    maps: dict[int, tuple[int, ...]] = {G.identity: ident}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s, ms in gen_maps.items():
                gs = G.mul[g][s]
                new = tuple(ms[maps[g][x]] for x in range(X.n))
                if gs in maps:
                    if maps[gs] != new:
                        raise NotAnAction(f"generator data disagree at element {gs}", witness=(gs,))
                    continue
                maps[gs] = new
                nxt.append(gs)
        frontier = nxt
    if len(maps) != G.order:
        raise NotAnAction("generator maps do not reach every group element", witness=None)
    table = [[maps[g][x] for g in range(G.order)] for x in range(X.n)]
    return GroupoidAction(X, G, table)


def translation_action(X: Groupoid, G: FiniteGroup) -> GroupoidAction:
    """(s,t)g = (s,tg) on transformation(G)."""
    n = G.order
    return GroupoidAction(X, G, [[(x // n) * n + G.mul[x % n][g] for g in range(n)] for x in range(X.n)])


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: tuple | None = None
    level: str | None = None

    def __bool__(self):
        return self.holds


def check_h_good(action: GroupoidAction, H: Subgroup) -> CheckResult:
    """𝐬(x)h = 𝐬(x) ⇒ xh = x for all arrows x and h ∈ H."""
    X = action.groupoid
    for x in range(X.n):
        s = X.src[x]
        for h in H.members:
            if action.act[s][h] == s and action.act[x][h] != x:
                return CheckResult(False, (x, h), "groupoid")
    return CheckResult(True)


def check_h_intersection(action: GroupoidAction, H: Subgroup) -> CheckResult:
    """uH ∩ u(gHg⁻¹) = uHᵍ for all units u and g ∈ G, as sets of points."""
    G = action.group
    conj_cache = {}
    for g in range(G.order):
        gHg = G.conjugate(H, g)
        conj_cache[g] = (gHg, H.intersect(gHg))
    for u in action.groupoid.units:
        uH = action.orbit(u, H)
        for g in range(G.order):
            gHg, Hg = conj_cache[g]
            if uH & action.orbit(u, gHg) != action.orbit(u, Hg):
                return CheckResult(False, (u, g), "groupoid")
    return CheckResult(True)


class OrbitGroupoid:
    """X/H with canonical reps (least arrow) and fixed witnesses h̃ ∈ H_{x,y}."""

    def __init__(self, base: GroupoidAction, subgroup: Subgroup, check: bool = True):
        res = check_h_good(base, subgroup)
        if not res:
            raise NotHGood("action is not H-good", witness=res.witness)
        self.base = base
        self.subgroup = subgroup
        X = base.groupoid
        act = base.act
        H = subgroup.members
        orbit_of = [-1] * X.n
        reps: list[int] = []
        for x in range(X.n):
            if orbit_of[x] < 0:
                k = len(reps)
                reps.append(x)
                for h in H:
                    orbit_of[act[x][h]] = k
        self.reps: tuple[int, ...] = tuple(reps)
        self.orbit_of: tuple[int, ...] = tuple(orbit_of)
        # lift_h[z]: some h ∈ H with rep(z)·h = z
        lift_h = [None] * X.n
        for k, x in enumerate(reps):
            for h in H:
                z = act[x][h]
                if lift_h[z] is None:
                    lift_h[z] = h
        self.lift_h: tuple[int, ...] = tuple(lift_h)
        n = len(reps)
        src = [orbit_of[X.src[x]] for x in reps]
        rng = [orbit_of[X.rng[x]] for x in reps]
        inv = [orbit_of[X.inv[x]] for x in reps]
        comp = {}
        witness = {}
        for a, x in enumerate(reps):
            sx = X.src[x]
            for b, y in enumerate(reps):
                ry = X.rng[y]
                ht = next((h for h in H if act[sx][h] == ry), None)
                if ht is None:
                    continue
                witness[(a, b)] = ht
                comp[(a, b)] = orbit_of[X.comp[(act[x][ht], y)]]
        self.h_witness: dict[tuple[int, int], int] = witness
        # orbit of a unit contains only units, so unit orbits are exactly the units of X/H
        self.groupoid = Groupoid(src, rng, inv, comp, labels=[X.labels[x] for x in reps], check=check)
        if check:
            self._check_well_defined()

    def _check_well_defined(self):
        X = self.base.groupoid
        act = self.base.act
        H = self.subgroup.members
        orbits: dict[int, list[int]] = {}
        for z, k in enumerate(self.orbit_of):
            orbits.setdefault(k, []).append(z)
        for (a, b), c in self.groupoid.comp.items():
            for x in orbits[a]:
                sx = X.src[x]
                for y in orbits[b]:
                    for h in H:
                        if act[sx][h] == X.rng[y] and self.orbit_of[X.comp[(act[x][h], y)]] != c:
                            raise AssociativityFailure(
                                "orbit product depends on representatives", witness=(x, y, h)
                            )

    def __len__(self):
        return len(self.reps)

    def rep(self, z: int) -> int:
        return self.reps[self.orbit_of[z]]

    def orbit_index(self, z: int) -> int:
        return self.orbit_of[z]

    def members(self, k: int) -> frozenset:
        return self.base.orbit(self.reps[k], self.subgroup)

    def unit_orbits(self) -> tuple[int, ...]:
        return self.groupoid.units


def orbit_groupoid(action: GroupoidAction, H: Subgroup) -> OrbitGroupoid:
    return OrbitGroupoid(action, H)


def flip_example() -> tuple[GroupoidAction, Subgroup]:
    """ℤ₂ acting on ℤ₃-as-a-groupoid by inversion; not ℤ₂-good."""
    Z3 = cyclic_group(3)
    X = one_unit_group(Z3)
    Z2 = cyclic_group(2)
    action = attach_action(X, Z2, lambda x, g: x if g == 0 else Z3.inv[x])
    return action, Z2.whole()
