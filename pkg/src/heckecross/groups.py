"""Finite groups given by Cayley tables, with subgroups, cosets and double cosets.

Elements are the integers ``0..order-1``.  Permutation groups are built by
closure and their elements sorted by image tuple, so the identity is 0.
Permutations compose left to right: ``(g*h)(p) = h(g(p))``, which makes the
natural action of a permutation group on its points a right action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Protocol, Sequence

from .errors import NoIdentity, NoInverse, NonAssociative, NotAnAction, NotClosed, NotSubgroup


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse 1-based cycle notation such as ``(1,2)(3,4)`` or ``(1 2 3)``."""
    img = list(range(degree))
    body = text.replace(" ", ",").strip()
    if body in ("", "()", "e"):
        return tuple(img)
    for chunk in body.split(")"):
        chunk = chunk.strip(",")
        if not chunk:
            continue
        if not chunk.startswith("("):
            raise ValueError(f"bad cycle notation {text!r}")
        pts = [int(t) - 1 for t in chunk[1:].split(",") if t]
        if any(not 0 <= p < degree for p in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle {chunk!r} on {degree} points")
        cur = list(img)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            cur[a] = img[b]
        img = cur
    return tuple(img)


def cycle_label(perm: Sequence[int]) -> str:
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        parts.append("(" + ",".join(str(p + 1) for p in cyc) + ")")
    return "".join(parts) or "()"


class FiniteGroup:
    """A validated finite group on ``range(order)``."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Sequence[str] | None = None,
        perms: Sequence[tuple[int, ...]] | None = None,
        generators: Sequence[int] | None = None,
        check: bool = True,
    ):
        n = len(table)
        if n == 0:
            raise NoIdentity("empty group table", witness=None)
        self.order = n
        self.mul: tuple[tuple[int, ...], ...] = tuple(tuple(row) for row in table)
        for a, row in enumerate(self.mul):
            if len(row) != n:
                raise NotClosed(f"row {a} has length {len(row)}, expected {n}", witness=(a,))
            for b, c in enumerate(row):
                if not (isinstance(c, int) and 0 <= c < n):
                    raise NotClosed(f"{a}*{b} = {c!r} is not an element", witness=(a, b))
        ident = next(
            (e for e in range(n) if all(self.mul[e][a] == a == self.mul[a][e] for a in range(n))),
            None,
        )
        if ident is None:
            raise NoIdentity("no two-sided identity in the table", witness=None)
        self.identity = ident
        inv = []
        for a in range(n):
            b = next((b for b in range(n) if self.mul[a][b] == ident == self.mul[b][a]), None)
            if b is None:
                raise NoInverse(f"element {a} has no two-sided inverse", witness=(a,))
            inv.append(b)
        self.inv = tuple(inv)
        if check:
            m = self.mul
            for a in range(n):
                ma = m[a]
                for b in range(n):
                    ab = ma[b]
                    mb = m[b]
                    mab = m[ab]
                    for c in range(n):
                        if mab[c] != ma[mb[c]]:
                            raise NonAssociative(
                                f"({a}*{b})*{c} != {a}*({b}*{c})", witness=(a, b, c)
                            )
        self.perms = tuple(perms) if perms is not None else None
        self.labels = tuple(labels) if labels is not None else (
            tuple(cycle_label(p) for p in self.perms) if self.perms else tuple(str(a) for a in range(n))
        )
        self.generators = tuple(generators) if generators is not None else self._greedy_generators()
        self._perm_index = {p: i for i, p in enumerate(self.perms)} if self.perms else None

    @classmethod
    def from_cayley(cls, table, labels=None) -> "FiniteGroup":
        return cls(table, labels=labels)

    @classmethod
    def from_permutations(cls, generators: Iterable[Sequence[int]], degree: int) -> "FiniteGroup":
        gens = [tuple(g) for g in generators]
        for g in gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise NotClosed(f"{g} is not a permutation of {degree} points", witness=g)
        ident = tuple(range(degree))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for s in gens:
                    q = tuple(s[p[i]] for i in range(degree))
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        perms = sorted(seen)
        index = {p: i for i, p in enumerate(perms)}
        table = [[index[tuple(h[g[i]] for i in range(degree))] for h in perms] for g in perms]
        gen_idx = sorted({index[g] for g in gens})
        # closure of a permutation set is a group by construction
        return cls(table, perms=perms, generators=gen_idx, check=False)

    def _greedy_generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        span = {self.identity}
        for a in range(self.order):
            if a not in span:
                gens.append(a)
                span = set(self.generate(gens).members)
        return tuple(gens)

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def prod(self, *xs: int) -> int:
        acc = self.identity
        for x in xs:
            acc = self.mul[acc][x]
        return acc

    def conj(self, g: int, h: int) -> int:
        """g h g⁻¹."""
        return self.mul[self.mul[g][h]][self.inv[g]]

    def element(self, spec) -> int:
        """Element index from an index, an image tuple, or cycle notation."""
        if isinstance(spec, int):
            if not 0 <= spec < self.order:
                raise NotClosed(f"{spec} is not an element", witness=spec)
            return spec
        if self.perms is None:
            if isinstance(spec, str) and spec in self.labels:
                return self.labels.index(spec)
            raise ValueError(f"cannot interpret {spec!r} in a Cayley-table group")
        degree = len(self.perms[0])
        perm = parse_cycles(spec, degree) if isinstance(spec, str) else tuple(spec)
        try:
            return self._perm_index[perm]
        except KeyError:
            raise NotClosed(f"{spec!r} is not in the group", witness=spec) from None

    def label(self, g: int) -> str:
        return self.labels[g]

    @property
    def elements(self) -> range:
        return range(self.order)

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self, members)

    def generate(self, gens: Iterable[int]) -> "Subgroup":
        members = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for s in gens:
                    b = self.mul[a][s]
                    if b not in members:
                        members.add(b)
                        nxt.append(b)
            frontier = nxt
        return Subgroup(self, members, check=False)

    def whole(self) -> "Subgroup":
        return Subgroup(self, range(self.order), check=False)

    def trivial(self) -> "Subgroup":
        return Subgroup(self, [self.identity], check=False)

    def conjugate(self, H: "Subgroup", g: int) -> "Subgroup":
        """g H g⁻¹."""
        return Subgroup(self, (self.conj(g, h) for h in H.members), check=False)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def symmetric_group(n: int) -> FiniteGroup:
    if n == 1:
        return FiniteGroup.from_permutations([(0,)], 1)
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    return FiniteGroup.from_permutations(gens, n)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], generators=[1 % n])


def build_group(spec) -> FiniteGroup:
    """Group from ``{"cayley": table}`` or ``{"permutations": {"degree", "generators"}}``."""
    if isinstance(spec, FiniteGroup):
        return spec
    if "cayley" in spec:
        return FiniteGroup(spec["cayley"], labels=spec.get("labels"))
    if "permutations" in spec:
        p = spec["permutations"]
        degree = int(p["degree"])
        gens = [parse_cycles(g, degree) if isinstance(g, str) else tuple(g) for g in p["generators"]]
        return FiniteGroup.from_permutations(gens, degree)
    if "symmetric" in spec:
        return symmetric_group(int(spec["symmetric"]))
    if "cyclic" in spec:
        return cyclic_group(int(spec["cyclic"]))
    raise ValueError(f"unrecognized group spec keys {sorted(spec)}")


class Subgroup:
    """A subgroup, stored as its sorted member indices."""

    def __init__(self, parent: FiniteGroup, members: Iterable[int], check: bool = True):
        self.parent = parent
        self.members: tuple[int, ...] = tuple(sorted(set(members)))
        self._set = frozenset(self.members)
        if check:
            if parent.identity not in self._set:
                raise NotSubgroup("identity missing", witness=(parent.identity,))
            for a in self.members:
                if parent.inv[a] not in self._set:
                    raise NotSubgroup(f"inverse of {a} missing", witness=(a,))
                for b in self.members:
                    if parent.mul[a][b] not in self._set:
                        raise NotSubgroup(f"{a}*{b} leaves the subset", witness=(a, b))

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and other._set == self._set

    def __hash__(self):
        return hash(self._set)

    @property
    def member_set(self) -> frozenset:
        return self._set

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, self._set & other._set, check=False)

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __repr__(self):
        return "Subgroup{" + ", ".join(self.parent.label(a) for a in self.members) + "}"


def _require_subgroup(G: FiniteGroup, H: Subgroup, name: str):
    if not isinstance(H, Subgroup) or H.parent is not G:
        raise NotSubgroup(f"{name} is not a subgroup of the given group", witness=name)


@dataclass(frozen=True)
class DoubleCoset:
    rep: int
    left_coset_reps: tuple[int, ...]
    members: frozenset
    right_coset_reps: tuple[int, ...] = ()

    def __contains__(self, g):
        return g in self.members


def double_cosets(G: FiniteGroup, B: Subgroup, C: Subgroup, A: Subgroup | None = None) -> list[DoubleCoset]:
    """Double cosets BgC, in order of their least representative.

    With ``A`` given, only the classes meeting ``A`` are returned and each
    representative is the least element of ``BgC ∩ A``.
    """
    _require_subgroup(G, B, "B")
    _require_subgroup(G, C, "C")
    if A is not None:
        _require_subgroup(G, A, "A")
    domain = A.members if A is not None else range(G.order)
    mul = G.mul
    done: set[int] = set()
    out = []
    for a in domain:
        if a in done:
            continue
        ba = {mul[b][a] for b in B.members}
        members = frozenset(mul[x][c] for x in ba for c in C.members)
        done |= members
        lefts = sorted({min(mul[x][c] for c in C.members) for x in members})
        rights = sorted({min(mul[b][x] for b in B.members) for x in members})
        out.append(DoubleCoset(a, tuple(lefts), members, tuple(rights)))
    return out


@dataclass(frozen=True)
class CosetStats:
    L: int
    R: int
    delta: Fraction
    gamma_g: Subgroup


class CosetOracle(Protocol):
    """What a Hecke pair must answer; a finite table is one implementation."""

    def double_coset_reps(self) -> Sequence[int]: ...

    def left_coset_reps_of(self, g: int) -> Sequence[int]: ...

    def L(self, g: int) -> int: ...

    def R(self, g: int) -> int: ...


class HeckePair:
    """(G, Γ) with the coset and double-coset tables built eagerly."""

    def __init__(self, G: FiniteGroup, gamma: Subgroup):
        _require_subgroup(G, gamma, "Γ")
        self.G = G
        self.gamma = gamma
        mul = G.mul
        coset_of = [0] * G.order
        reps: list[int] = []
        for g in range(G.order):
            r = min(mul[g][c] for c in gamma.members)
            if r == g:
                reps.append(g)
        rep_index = {r: i for i, r in enumerate(reps)}
        for g in range(G.order):
            coset_of[g] = rep_index[min(mul[g][c] for c in gamma.members)]
        self.coset_reps: tuple[int, ...] = tuple(reps)
        self.coset_of: tuple[int, ...] = tuple(coset_of)
        self.dcs = double_cosets(G, gamma, gamma)
        self.dc_reps: tuple[int, ...] = tuple(d.rep for d in self.dcs)
        dc_of = [0] * G.order
        for i, d in enumerate(self.dcs):
            for g in d.members:
                dc_of[g] = i
        self.dc_of: tuple[int, ...] = tuple(dc_of)
        # for every left coset c: the double coset it lies in and γ ∈ Γ with c = γ·rep·Γ
        placement = []
        for c, r in enumerate(reps):
            d = dc_of[r]
            rep = self.dc_reps[d]
            gam = next(x for x in gamma.members if coset_of[mul[x][rep]] == c)
            placement.append((d, gam))
        self.coset_placement: tuple[tuple[int, int], ...] = tuple(placement)
        self._gamma_g: dict[int, Subgroup] = {}
        self._stats: dict[int, CosetStats] = {}

    def __eq__(self, other):
        return isinstance(other, HeckePair) and other.G is self.G and other.gamma == self.gamma

    def __hash__(self):
        return hash((id(self.G), self.gamma))

    @property
    def n_cosets(self) -> int:
        return len(self.coset_reps)

    def coset_index(self, g: int) -> int:
        return self.coset_of[g]

    def dc_rep(self, g: int) -> int:
        return self.dc_reps[self.dc_of[g]]

    def double_coset(self, g: int) -> DoubleCoset:
        return self.dcs[self.dc_of[g]]

    def double_coset_reps(self) -> Sequence[int]:
        return self.dc_reps

    def left_coset_reps_of(self, g: int) -> Sequence[int]:
        return self.double_coset(g).left_coset_reps

    def gamma_g(self, g: int) -> Subgroup:
        """Γ ∩ gΓg⁻¹."""
        if g not in self._gamma_g:
            self._gamma_g[g] = self.gamma.intersect(self.G.conjugate(self.gamma, g))
        return self._gamma_g[g]

    def stats(self, g: int) -> CosetStats:
        if g not in self._stats:
            self._stats[g] = coset_stats(self, g)
        return self._stats[g]

    def L(self, g: int) -> int:
        return self.stats(g).L

    def R(self, g: int) -> int:
        return self.stats(g).R

    def delta(self, g: int) -> Fraction:
        return self.stats(g).delta

    def __repr__(self):
        return f"HeckePair(|G|={self.G.order}, |Γ|={len(self.gamma)}, double cosets={len(self.dcs)})"


def coset_stats(pair, g: int) -> CosetStats:
    """L, R, Δ and Γᵍ, with both ways of counting L and R checked against each other."""
    if not isinstance(pair, HeckePair):
        pair = HeckePair(*pair)
    G, gamma = pair.G, pair.gamma
    dc = pair.double_coset(g)
    L, R = len(dc.left_coset_reps), len(dc.right_coset_reps)
    gg = pair.gamma_g(g)
    gg_inv = pair.gamma_g(G.inv[g])
    if L * len(gg) != len(gamma) or R * len(gg_inv) != len(gamma):
        raise AssertionError(f"coset counts disagree with index formulas at g={g}")
    return CosetStats(L, R, Fraction(L, R), gg)


class GroupSetAction:
    """A right action of a finite group on ``range(n_points)``; ``act[p][g]``."""

    def __init__(self, group: FiniteGroup, act: Sequence[Sequence[int]], check: bool = True):
        self.group = group
        self.act = tuple(tuple(row) for row in act)
        self.n_points = len(self.act)
        if check:
            G = group
            for p, row in enumerate(self.act):
                if len(row) != G.order or any(not 0 <= q < self.n_points for q in row):
                    raise NotAnAction(f"row {p} is not a total map into the points", witness=(p,))
                if row[G.identity] != p:
                    raise NotAnAction(f"identity moves point {p}", witness=(p, G.identity))
                for g in range(G.order):
                    pg = row[g]
                    for h in range(G.order):
                        if self.act[pg][h] != row[G.mul[g][h]]:
                            raise NotAnAction(
                                f"(p g) h != p (g h) at p={p}, g={g}, h={h}", witness=(p, g, h)
                            )

    @property
    def points(self) -> range:
        return range(self.n_points)

    def __call__(self, p: int, g: int) -> int:
        return self.act[p][g]

    def orbit(self, p: int, H: Subgroup) -> frozenset:
        return frozenset(self.act[p][h] for h in H.members)


def stabilizer(action: GroupSetAction, p: int) -> Subgroup:
    return Subgroup(action.group, (g for g in action.group.elements if action.act[p][g] == p))


def right_coset_action(G: FiniteGroup, K: Subgroup) -> tuple[GroupSetAction, list[frozenset]]:
    """G acting on K\\G by right multiplication; points ordered by least member."""
    cosets = sorted({frozenset(G.mul[k][g] for k in K.members) for g in G.elements}, key=min)
    where = {}
    for i, c in enumerate(cosets):
        for g in c:
            where[g] = i
    act = [[where[G.mul[min(c)][g]] for g in G.elements] for c in cosets]
    return GroupSetAction(G, act), cosets


def restricted_double_coset_bijection(G: FiniteGroup, B: Subgroup, A: Subgroup, C: Subgroup) -> dict:
    """The map [a] ↦ [a] from B\\A/C to (B∩A)\\A/C, checked to be a bijection.

    Returns the map on representatives.  Requires C ⊆ A.
    """
    if not C.issubset(A):
        raise NotSubgroup("C must lie inside A", witness=None)
    big = double_cosets(G, B, C, A=A)
    small = double_cosets(G, B.intersect(A), C, A=A)
    which_small = {}
    for j, d in enumerate(small):
        for a in d.members:
            which_small[a] = j
    forward = {d.rep: small[which_small[d.rep]].rep for d in big}
    backward = {}
    for d in small:
        hits = [b.rep for b in big if d.rep in b.members]
        if len(hits) != 1:
            raise AssertionError(f"class of {d.rep} has {len(hits)} preimages")
        backward[d.rep] = hits[0]
    if sorted(forward.values()) != sorted(backward) or any(backward[forward[r]] != r for r in forward):
        raise AssertionError("double coset map is not a bijection")
    return forward


def orbit_double_coset_bijection(action: GroupSetAction, x: int, K: Subgroup, H: Subgroup) -> dict:
    """The map xkH ↦ S_x k H from (xK)/H to S_x\\K/H, checked to be a bijection.

    Keys are H-orbits (frozensets of points) meeting xK; values are the
    representatives of the matching double cosets.
    """
    G = action.group
    dcs = double_cosets(G, stabilizer(action, x), H, A=K)
    dc_of = {}
    for d in dcs:
        for g in d.members:
            dc_of[g] = d.rep
    mapping: dict[frozenset, int] = {}
    for k in K.members:
        orb = action.orbit(action.act[x][k], H)
        if mapping.setdefault(orb, dc_of[k]) != dc_of[k]:
            raise AssertionError(f"orbit of x·{k} maps to two double cosets")
    if len(set(mapping.values())) != len(mapping) or len(mapping) != len(dcs):
        raise AssertionError("orbit map is not a bijection")
    return mapping
