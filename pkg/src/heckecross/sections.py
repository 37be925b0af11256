"""Section algebras C_c(A), C_c(A/H) and their image in the multipliers of C_c(A).

Because every fiber over a unit is a full matrix algebra, C_c(A) is unital and
its multipliers are exactly the left multiplications.  Operators are kept as
sparse exact matrices on the matrix-unit basis of C_c(A); with that basis
orthonormal for the trace pairing, the multiplier adjoint is the conjugate
transpose.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .bundles import BundleAction, FellBundle, OrbitBundle
from .errors import BundleMismatch, NotHGood, NotInImage, NotInvariant
from .groups import Subgroup
from .scalars import ONE, ZERO, GaussQ, Mat


class Section:
    """Finitely supported section of a Fell bundle: arrow → fiber element."""

    __slots__ = ("bundle", "data")

    def __init__(self, bundle: FellBundle, data: Mapping[int, Mat] | None = None, check: bool = True):
        self.bundle = bundle
        clean = {}
        for x, a in (data or {}).items():
            if check:
                bundle.check_element(x, a)
            if not a.is_zero():
                clean[x] = a
        self.data = dict(sorted(clean.items()))

    @classmethod
    def at(cls, bundle: FellBundle, x: int, a: Mat) -> "Section":
        return cls(bundle, {x: a})

    @classmethod
    def unit(cls, bundle: FellBundle, units: Iterable[int] | None = None) -> "Section":
        us = bundle.base.units if units is None else units
        return cls(bundle, {u: Mat.identity(bundle.dims[u]) for u in us})

    def _same(self, other: "Section"):
        if other.bundle is not self.bundle:
            raise BundleMismatch("sections over different bundles", witness=None)

    def __add__(self, other: "Section") -> "Section":
        self._same(other)
        out = dict(self.data)
        for x, b in other.data.items():
            out[x] = out[x] + b if x in out else b
        return Section(self.bundle, out, check=False)

    def __neg__(self):
        return Section(self.bundle, {x: -a for x, a in self.data.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Section":
        c = GaussQ.of(c)
        return Section(self.bundle, {x: a.scale(c) for x, a in self.data.items()}, check=False)

    def __mul__(self, other: "Section") -> "Section":
        self._same(other)
        X = self.bundle.base
        by_rng: dict[int, list[tuple[int, Mat]]] = {}
        for y, b in other.data.items():
            by_rng.setdefault(X.rng[y], []).append((y, b))
        out: dict[int, Mat] = {}
        for x, a in self.data.items():
            for y, b in by_rng.get(X.src[x], ()):
                z = X.comp[(x, y)]
                ab = a @ b
                out[z] = out[z] + ab if z in out else ab
        return Section(self.bundle, out, check=False)

    def star(self) -> "Section":
        inv = self.bundle.base.inv
        return Section(self.bundle, {inv[x]: a.adjoint() for x, a in self.data.items()}, check=False)

    def __eq__(self, other):
        return isinstance(other, Section) and other.bundle is self.bundle and other.data == self.data

    def __hash__(self):
        return hash(tuple(self.data.items()))

    def is_zero(self) -> bool:
        return not self.data

    def __call__(self, x: int) -> Mat:
        return self.data.get(x) or self.bundle.zero(x)

    def coords(self) -> dict[int, GaussQ]:
        B = self.bundle
        out = {}
        for x, a in self.data.items():
            off = B.offset[x]
            for i, row in enumerate(a.data):
                for j, v in enumerate(row):
                    if v:
                        out[off + i * a.cols + j] = v
        return out

    @classmethod
    def from_coords(cls, bundle: FellBundle, coords: Mapping[int, GaussQ]) -> "Section":
        grouped: dict[int, dict[tuple[int, int], GaussQ]] = {}
        for k, v in coords.items():
            if v:
                x, i, j = bundle.basis[k]
                grouped.setdefault(x, {})[(i, j)] = v
        data = {}
        for x, entries in grouped.items():
            r, c = bundle.shape(x)
            data[x] = Mat([[entries.get((i, j), ZERO) for j in range(c)] for i in range(r)])
        return cls(bundle, data, check=False)

    def __repr__(self):
        return "Section{" + ", ".join(f"{x}: {a!r}" for x, a in self.data.items()) + "}"


def alpha_section(action: BundleAction, g: int, F: Section) -> Section:
    """ᾱ_g(F)(x) = α_g(F(xg))."""
    if g == action.group.identity or (action.is_identity_cocycle and all(
        action.groupoid_action.act[x][g] == x for x in F.data
    )):
        return F
    out = {}
    for z, a in F.data.items():
        y, b = action.alpha(g, z, a)
        out[y] = b
    return Section(F.bundle, out, check=False)


class OrbitSection:
    """Finitely supported section of A/H, keyed by canonical rep arrows."""

    __slots__ = ("obundle", "data", "_lift")

    def __init__(self, obundle: OrbitBundle, data: Mapping[int, Mat] | None = None, check: bool = True):
        self.obundle = obundle
        clean = {}
        ob = obundle.base
        for x, a in (data or {}).items():
            if check:
                if ob.rep(x) != x:
                    # accept any representative and move it to the canonical one
                    k, a = obundle.to_rep(x, a)
                    x = ob.reps[k]
                obundle.bundle.check_element(x, a)
            if not a.is_zero():
                clean[x] = clean[x] + a if x in clean else a
        self.data = {x: a for x, a in sorted(clean.items()) if not a.is_zero()}
        self._lift = None

    @classmethod
    def at(cls, obundle: OrbitBundle, x: int, a: Mat) -> "OrbitSection":
        """[a]_{xH} for a ∈ A_x; x need not be the canonical rep."""
        return cls(obundle, {x: a})

    @classmethod
    def unit(cls, obundle: OrbitBundle, unit_orbits: Iterable[int] | None = None) -> "OrbitSection":
        """1 on the given unit-orbit reps (all by default)."""
        ob = obundle.base
        reps = [ob.reps[k] for k in ob.groupoid.units] if unit_orbits is None else [ob.rep(u) for u in unit_orbits]
        dims = obundle.bundle.dims
        return cls(obundle, {u: Mat.identity(dims[u]) for u in reps}, check=False)

    @property
    def subgroup(self) -> Subgroup:
        return self.obundle.subgroup

    def _same(self, other: "OrbitSection"):
        if other.obundle is not self.obundle:
            raise BundleMismatch("orbit sections over different orbit bundles", witness=None)

    def __add__(self, other: "OrbitSection") -> "OrbitSection":
        self._same(other)
        out = dict(self.data)
        for x, b in other.data.items():
            out[x] = out[x] + b if x in out else b
        return OrbitSection(self.obundle, out, check=False)

    def __neg__(self):
        return OrbitSection(self.obundle, {x: -a for x, a in self.data.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "OrbitSection":
        c = GaussQ.of(c)
        return OrbitSection(self.obundle, {x: a.scale(c) for x, a in self.data.items()}, check=False)

    def __mul__(self, other: "OrbitSection") -> "OrbitSection":
        self._same(other)
        ob = self.obundle
        orbit_of = ob.base.orbit_of
        reps = ob.base.reps
        out: dict[int, Mat] = {}
        for x, a in self.data.items():
            for y, b in other.data.items():
                res = ob.product(orbit_of[x], a, orbit_of[y], b)
                if res is None:
                    continue
                k, c = res
                z = reps[k]
                out[z] = out[z] + c if z in out else c
        return OrbitSection(ob, out, check=False)

    def star(self) -> "OrbitSection":
        ob = self.obundle
        out = {}
        for x, a in self.data.items():
            k, b = ob.star(ob.base.orbit_of[x], a)
            out[ob.base.reps[k]] = b
        return OrbitSection(ob, out, check=False)

    def __eq__(self, other):
        return isinstance(other, OrbitSection) and other.obundle is self.obundle and other.data == self.data

    def __hash__(self):
        return hash(tuple(self.data.items()))

    def is_zero(self) -> bool:
        return not self.data

    def __call__(self, x: int) -> Mat:
        """Representative of the value at the orbit of x, placed in A_x."""
        ob = self.obundle
        k = ob.base.orbit_of[x]
        a = self.data.get(ob.base.reps[k])
        if a is None:
            return ob.bundle.zero(x)
        return ob.from_rep(k, a, x)

    def lift(self) -> Section:
        """The H-invariant section of C_c(A) with the same values along each orbit."""
        if self._lift is None:
            ob = self.obundle
            base = ob.base
            out = {}
            for x, a in self.data.items():
                k = base.orbit_of[x]
                for z in base.members(k):
                    out[z] = ob.from_rep(k, a, z)
            self._lift = Section(ob.bundle, out, check=False)
        return self._lift

    @classmethod
    def descend(cls, F: Section, obundle: OrbitBundle) -> "OrbitSection":
        """Inverse of ``lift``; raises NotInvariant unless F is constant along orbits."""
        if F.bundle is not obundle.bundle:
            raise BundleMismatch("section and orbit bundle differ", witness=None)
        base = obundle.base
        vals = {}
        for z, a in F.data.items():
            k, b = obundle.to_rep(z, a)
            x = base.reps[k]
            if x in vals:
                if vals[x] != b:
                    raise NotInvariant(f"section takes two values along the orbit of {x}", witness=(x, z))
            else:
                vals[x] = b
        f = cls(obundle, vals, check=False)
        if f.lift() != F:
            bad = next(z for z in set(F.data) | set(f.lift().data) if F(z) != f.lift()(z))
            raise NotInvariant(f"section is not {len(obundle.subgroup)}-invariant at {bad}", witness=(bad,))
        return f

    def coords(self) -> dict[int, GaussQ]:
        """Coordinates on the orbit basis: (orbit rep, i, j) in orbit order."""
        index = orbit_basis_index(self.obundle)
        out = {}
        for x, a in self.data.items():
            for i, row in enumerate(a.data):
                for j, v in enumerate(row):
                    if v:
                        out[index[(x, i, j)]] = v
        return out

    def __repr__(self):
        return "OrbitSection{" + ", ".join(f"{x}: {a!r}" for x, a in self.data.items()) + "}"


def orbit_basis(obundle: OrbitBundle) -> list[tuple[int, int, int]]:
    """Basis of C_c(A/H): canonical rep, then row-major matrix units."""
    out = []
    for x in obundle.base.reps:
        r, c = obundle.bundle.shape(x)
        out.extend((x, i, j) for i in range(r) for j in range(c))
    return out


def orbit_basis_index(obundle: OrbitBundle) -> dict:
    idx = getattr(obundle, "_basis_index", None)
    if idx is None:
        idx = {b: k for k, b in enumerate(orbit_basis(obundle))}
        obundle._basis_index = idx
    return idx


def orbit_basis_element(obundle: OrbitBundle, k: int) -> OrbitSection:
    x, i, j = orbit_basis(obundle)[k]
    return OrbitSection(obundle, {x: obundle.bundle.matrix_unit(x, i, j)}, check=False)


def section_ops(f1, f2) -> dict:
    """The three *-algebra operations on a pair of (orbit) sections."""
    return {"mul": f1 * f2, "star": f1.star(), "add": f1 + f2}


class MultiplierOp:
    """Exact sparse operator on C_c(A): ``cols[c][r]`` is the (r, c) entry."""

    __slots__ = ("bundle", "cols")

    def __init__(self, bundle: FellBundle, cols: Mapping[int, Mapping[int, GaussQ]]):
        self.bundle = bundle
        self.cols = {c: {r: v for r, v in sorted(col.items()) if v} for c, col in sorted(cols.items())}
        self.cols = {c: col for c, col in self.cols.items() if col}

    @property
    def dim(self) -> int:
        return self.bundle.dim

    @classmethod
    def identity(cls, bundle: FellBundle) -> "MultiplierOp":
        return cls(bundle, {k: {k: ONE} for k in range(bundle.dim)})

    @classmethod
    def zero(cls, bundle: FellBundle) -> "MultiplierOp":
        return cls(bundle, {})

    @classmethod
    def left(cls, F: Section) -> "MultiplierOp":
        """L_F: b ↦ F·b."""
        B = F.bundle
        cols = {}
        for k, (y, i, j) in enumerate(B.basis):
            cols[k] = (F * Section(B, {y: B.matrix_unit(y, i, j)}, check=False)).coords()
        return cls(B, cols)

    @classmethod
    def from_linear_map(cls, bundle: FellBundle, fn: Callable[[Section], Section]) -> "MultiplierOp":
        cols = {}
        for k, (y, i, j) in enumerate(bundle.basis):
            cols[k] = fn(Section(bundle, {y: bundle.matrix_unit(y, i, j)}, check=False)).coords()
        return cls(bundle, cols)

    def apply(self, F: Section) -> Section:
        out: dict[int, GaussQ] = {}
        for c, v in F.coords().items():
            for r, w in self.cols.get(c, {}).items():
                out[r] = out.get(r, ZERO) + w * v
        return Section.from_coords(self.bundle, out)

    def __matmul__(self, other: "MultiplierOp") -> "MultiplierOp":
        cols = {}
        for c, col in other.cols.items():
            acc: dict[int, GaussQ] = {}
            for m, v in col.items():
                for r, w in self.cols.get(m, {}).items():
                    acc[r] = acc.get(r, ZERO) + w * v
            cols[c] = acc
        return MultiplierOp(self.bundle, cols)

    def __add__(self, other: "MultiplierOp") -> "MultiplierOp":
        cols = {c: dict(col) for c, col in self.cols.items()}
        for c, col in other.cols.items():
            tgt = cols.setdefault(c, {})
            for r, v in col.items():
                tgt[r] = tgt.get(r, ZERO) + v
        return MultiplierOp(self.bundle, cols)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "MultiplierOp":
        c = GaussQ.of(c)
        return MultiplierOp(self.bundle, {k: {r: c * v for r, v in col.items()} for k, col in self.cols.items()})

    def adjoint(self) -> "MultiplierOp":
        cols: dict[int, dict[int, GaussQ]] = {}
        for c, col in self.cols.items():
            for r, v in col.items():
                cols.setdefault(r, {})[c] = v.conj()
        return MultiplierOp(self.bundle, cols)

    def __eq__(self, other):
        return isinstance(other, MultiplierOp) and other.bundle is self.bundle and other.cols == self.cols

    def __hash__(self):
        return hash(tuple((c, tuple(col.items())) for c, col in self.cols.items()))

    def is_zero(self) -> bool:
        return not self.cols

    def check_adjointable(self, basis: Iterable[int] | None = None) -> bool:
        """⟨Tb, c⟩ = ⟨b, T*c⟩ for the pairing ⟨a, b⟩ = a*b, on basis pairs."""
        B = self.bundle
        Ts = self.adjoint()
        idx = list(range(B.dim)) if basis is None else list(basis)
        elems = {k: Section(B, {B.basis[k][0]: B.matrix_unit(*B.basis[k])}, check=False) for k in idx}
        images = {k: self.apply(e) for k, e in elems.items()}
        simages = {k: Ts.apply(e) for k, e in elems.items()}
        return all(images[b].star() * elems[c] == elems[b].star() * simages[c] for b in idx for c in idx)

    def to_sparse_triples(self) -> list[tuple[int, int, str]]:
        return [(r, c, str(v)) for c, col in self.cols.items() for r, v in col.items()]

    def __repr__(self):
        return f"MultiplierOp(dim={self.dim}, nnz={sum(len(c) for c in self.cols.values())})"


def as_multiplier(f: OrbitSection) -> MultiplierOp:
    """ι(f), column by column: [a]_{xH}·b_y = (α_{h̃⁻¹}(a) b)_{x h̃ y} with s(x)h̃ = r(y)."""
    ob = f.obundle
    action = ob.action
    B = ob.bundle
    X = B.base
    G = action.group
    act = action.groupoid_action.act
    H = ob.subgroup.members
    # per orbit rep: the map r(y) ↦ h̃
    witnesses = {}
    for x in f.data:
        sx = X.src[x]
        w = {}
        for h in H:
            w.setdefault(act[sx][h], h)
        witnesses[x] = w
    cols = {}
    for k, (y, i, j) in enumerate(B.basis):
        b = B.matrix_unit(y, i, j)
        acc: dict[int, Mat] = {}
        ry = X.rng[y]
        for x, a in f.data.items():
            ht = witnesses[x].get(ry)
            if ht is None:
                continue
            xh, ah = action.alpha(G.inv[ht], x, a)
            z = X.comp[(xh, y)]
            v = ah @ b
            acc[z] = acc[z] + v if z in acc else v
        cols[k] = Section(B, acc, check=False).coords()
    return MultiplierOp(B, cols)


def unit_multiplier(bundle: FellBundle, f) -> MultiplierOp:
    """Diagonal operator b_y ↦ f(r(y)) b_y; ``f`` a mapping or callable on units."""
    get = f if callable(f) else (lambda u: f.get(u, 0))
    X = bundle.base
    cols = {}
    for k, (y, _, _) in enumerate(bundle.basis):
        v = GaussQ.of(get(X.rng[y]))
        if v:
            cols[k] = {k: v}
    return MultiplierOp(bundle, cols)


def orbit_indicator(action: BundleAction, u: int, H: Subgroup) -> dict[int, int]:
    """1_{uH} as a function on units."""
    return {v: 1 for v in action.groupoid_action.orbit(u, H)}


def multiplier_to_section(T: MultiplierOp, obundle: OrbitBundle) -> OrbitSection:
    """Read f with ι(f) = T by applying T to the identity at each unit."""
    B = obundle.bundle
    X = B.base
    F: dict[int, Mat] = {}
    for u in X.units:
        img = T.apply(Section(B, {u: Mat.identity(B.dims[u])}, check=False))
        for z, a in img.data.items():
            if X.src[z] != u:
                raise NotInImage(f"T(1_{u}) has mass at arrow {z} with the wrong source", witness=(u, z))
            F[z] = a
    try:
        f = OrbitSection.descend(Section(B, F, check=False), obundle)
    except NotInvariant as exc:
        raise NotInImage("operator values are not H-invariant", witness=exc.witness) from None
    if as_multiplier(f) != T:
        raise NotInImage("round trip through the section differs from the operator", witness=None)
    return f


def alpha_operator(action: BundleAction, g: int) -> MultiplierOp:
    """W_g: the matrix of ᾱ_g on C_c(A)."""
    B = action.bundle
    return MultiplierOp.from_linear_map(B, lambda F: alpha_section(action, g, F))


def alpha_bar(action: BundleAction, g: int, T: MultiplierOp) -> MultiplierOp:
    """ᾱ_g(T) = W_g T W_{g⁻¹}."""
    return alpha_operator(action, g) @ T @ alpha_operator(action, action.group.inv[g])


def left_operator(F: Section) -> MultiplierOp:
    return MultiplierOp.left(F)
