"""Essential and semiprime *-algebras, multipliers, and extension of representations.

Finite-dimensional algebras are given by exact structure constants over Q(i).
Elements are coordinate tuples.  Linear systems are solved exactly with
sympy's Gaussian-rational domain; the numeric side of ``extend_rep`` uses
numpy least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import Degenerate, NotEssential
from .scalars import ONE, ZERO, GaussQ, Mat

Vec = tuple  # of GaussQ


# -- exact linear algebra over Q(i) ---------------------------------------


def _to_dom(z: GaussQ):
    return QQ_I(QQ(z.re.numerator, z.re.denominator), QQ(z.im.numerator, z.im.denominator))


def _from_dom(z) -> GaussQ:
    return GaussQ(Fraction(int(z.x.numerator), int(z.x.denominator)), Fraction(int(z.y.numerator), int(z.y.denominator)))


def _dm(rows: Sequence[Sequence[GaussQ]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[_to_dom(c) for c in r] for r in rows], (len(rows), ncols), QQ_I)


def nullspace(rows: Sequence[Sequence[GaussQ]], ncols: int) -> list[Vec]:
    """Basis of {v : rows·v = 0}, in reduced form."""
    if not rows:
        return [tuple(ONE if k == j else ZERO for k in range(ncols)) for j in range(ncols)]
    ns = _dm(rows, ncols).nullspace()
    return [tuple(_from_dom(c) for c in r) for r in ns.to_list()]


def rank(rows: Sequence[Sequence[GaussQ]], ncols: int) -> int:
    if not rows:
        return 0
    return _dm(rows, ncols).rank()


def row_basis(vectors: Sequence[Vec], ncols: int) -> list[Vec]:
    """Reduced basis of the span of ``vectors``."""
    if not vectors:
        return []
    rref, pivots = _dm(vectors, ncols).rref()
    rows = rref.to_list()
    return [tuple(_from_dom(c) for c in rows[k]) for k in range(len(pivots))]


def solve(columns: Sequence[Vec], target: Vec) -> Vec | None:
    """Coefficients c with Σ c_k columns[k] = target, or None."""
    n = len(target)
    m = len(columns)
    if m == 0:
        return () if all(not t for t in target) else None
    rows = [[columns[k][i] for k in range(m)] + [-target[i]] for i in range(n)]
    for v in nullspace(rows, m + 1):
        if v[m]:
            s = v[m]
            return tuple(c / s for c in v[:m])
    return None


# -- finite-dimensional *-algebras ----------------------------------------


class StarAlgebra:
    """Structure constants e_i e_j = Σ_k table[i][j][k] e_k and a conjugate-linear star."""

    def __init__(
        self,
        dim: int,
        table: Mapping[tuple[int, int], Mapping[int, object]],
        star: Sequence[Mapping[int, object]],
        names: Sequence[str] | None = None,
        check: bool = True,
    ):
        self.dim = dim
        self.table = [[{} for _ in range(dim)] for _ in range(dim)]
        for (i, j), out in table.items():
            self.table[i][j] = {k: GaussQ.of(c) for k, c in out.items() if GaussQ.of(c)}
        self.star_images = [{k: GaussQ.of(c) for k, c in s.items() if GaussQ.of(c)} for s in star]
        self.names = list(names) if names is not None else [f"e{k}" for k in range(dim)]
        if check:
            self.check_axioms()

    # elements
    def zero(self) -> Vec:
        return (ZERO,) * self.dim

    def e(self, k: int) -> Vec:
        return tuple(ONE if j == k else ZERO for j in range(self.dim))

    def basis(self) -> list[Vec]:
        return [self.e(k) for k in range(self.dim)]

    def vec(self, coords: Mapping[int, object]) -> Vec:
        out = [ZERO] * self.dim
        for k, c in coords.items():
            out[k] = GaussQ.of(c)
        return tuple(out)

    def add(self, a: Vec, b: Vec) -> Vec:
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, c, a: Vec) -> Vec:
        c = GaussQ.of(c)
        return tuple(c * x for x in a)

    def mul(self, a: Vec, b: Vec) -> Vec:
        out = [ZERO] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            row = self.table[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, c in row[j].items():
                    out[k] = out[k] + xy * c
        return tuple(out)

    def star(self, a: Vec) -> Vec:
        out = [ZERO] * self.dim
        for i, x in enumerate(a):
            if x:
                xc = x.conj()
                for k, c in self.star_images[i].items():
                    out[k] = out[k] + xc * c
        return tuple(out)

    def is_zero(self, a: Vec) -> bool:
        return not any(a)

    def left_matrix(self, a: Vec) -> list[list[GaussQ]]:
        """Matrix of b ↦ ab in the basis (column j = a·e_j)."""
        cols = [self.mul(a, self.e(j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def right_matrix(self, b: Vec) -> list[list[GaussQ]]:
        cols = [self.mul(self.e(j), b) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def unit(self) -> Vec | None:
        """The identity element if there is one."""
        n = self.dim
        # u·e_j = e_j and e_j·u = e_j, linear in u
        rows, rhs = [], []
        for j in range(n):
            for k in range(n):
                rows.append([self.table[i][j].get(k, ZERO) for i in range(n)])
                rhs.append(ONE if k == j else ZERO)
                rows.append([self.table[j][i].get(k, ZERO) for i in range(n)])
                rhs.append(ONE if k == j else ZERO)
        cols = [tuple(r[i] for r in rows) for i in range(n)]
        return solve(cols, tuple(rhs))

    def check_axioms(self):
        """Associativity, anti-multiplicative and involutive star, on basis elements."""
        B = self.basis()
        for k, b in enumerate(B):
            if self.star(self.star(b)) != b:
                raise ValueError(f"star is not involutive at {self.names[k]}")
        for i, a in enumerate(B):
            for j, b in enumerate(B):
                ab = self.mul(a, b)
                if self.star(ab) != self.mul(self.star(b), self.star(a)):
                    raise ValueError(f"star is not anti-multiplicative at ({self.names[i]}, {self.names[j]})")
                if not any(ab):
                    continue
                for k, c in enumerate(B):
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)):
                        raise ValueError(
                            f"not associative at ({self.names[i]}, {self.names[j]}, {self.names[k]})"
                        )

    def __repr__(self):
        return f"StarAlgebra(dim={self.dim})"


@dataclass
class AlgebraCheck:
    holds: bool
    witness: Vec | None = None

    def __bool__(self):
        return self.holds


def is_essential(A: StarAlgebra) -> AlgebraCheck:
    """aA = 0 forces a = 0; the witness is a nonzero kernel vector."""
    n = A.dim
    rows = []
    for j in range(n):
        rows.extend(A.right_matrix(A.e(j)))
    ker = nullspace(rows, n)
    return AlgebraCheck(True) if not ker else AlgebraCheck(False, ker[0])


def radical(A: StarAlgebra) -> list[Vec]:
    """Basis of the Jacobson radical.

    In characteristic 0 it is {a : tr L_a = 0 and tr L_{a e_j} = 0 for all j};
    that set is a two-sided ideal of elements with nilpotent L_a.
    """
    n = A.dim
    # tr L_{e_i} and tr L_{e_i e_j} as linear functionals of a
    tr_basis = [sum((A.table[i][k].get(k, ZERO) for k in range(n)), ZERO) for i in range(n)]

    def tr(v: Vec) -> GaussQ:
        return sum((c * t for c, t in zip(v, tr_basis) if c), ZERO)

    rows = [list(tr_basis)]
    for j in range(n):
        rows.append([tr(A.mul(A.e(i), A.e(j))) for i in range(n)])
    return nullspace(rows, n)


def _product_span(A: StarAlgebra, U: list[Vec], V: list[Vec]) -> list[Vec]:
    return row_basis([A.mul(u, v) for u in U for v in V], A.dim)


def is_semiprime(A: StarAlgebra) -> AlgebraCheck:
    """aAa = 0 forces a = 0.

    For finite dimension this is rad A = 0.  A witness comes from the last
    nonzero power J^k of the radical: J^k·A·J^k ⊆ J^{2k} = 0.
    """
    J = radical(A)
    if not J:
        return AlgebraCheck(True)
    power = J
    while True:
        nxt = _product_span(A, power, J)
        if not nxt:
            break
        power = nxt
    a = power[0]
    lead = next(c for c in a if c)
    a = tuple(c / lead for c in a)
    for e in A.basis():
        if any(A.mul(A.mul(a, e), a)):
            raise AssertionError("radical witness does not annihilate the algebra")
    return AlgebraCheck(False, a)


def meets_every_ideal(A: StarAlgebra, ideals: Iterable[list[Vec]]) -> AlgebraCheck:
    """Every listed nonzero ideal I has I·A ≠ 0 (the annihilator meets it trivially)."""
    for I in ideals:
        if not I:
            continue
        if not any(any(A.mul(x, e)) for x in I for e in A.basis()):
            return AlgebraCheck(False, I[0])
    return AlgebraCheck(True)


def ideal_generated(A: StarAlgebra, gens: Iterable[Vec]) -> list[Vec]:
    """Two-sided ideal generated by ``gens`` (closed under left and right multiplication)."""
    span = row_basis(list(gens), A.dim)
    while True:
        more = span + [A.mul(e, x) for e in A.basis() for x in span] + [A.mul(x, e) for e in A.basis() for x in span]
        nxt = row_basis(more, A.dim)
        if len(nxt) == len(span):
            return nxt
        span = nxt


def annihilator(A: StarAlgebra) -> list[Vec]:
    """{a : aA = 0}."""
    n = A.dim
    rows = []
    for j in range(n):
        rows.extend(A.right_matrix(A.e(j)))
    return nullspace(rows, n)


# -- multipliers ----------------------------------------------------------


@dataclass(frozen=True)
class AdjointableMap:
    """T with ⟨Ta, b⟩ = ⟨a, T*b⟩ for ⟨a, b⟩ = a*b; matrices act on coordinate columns."""

    algebra: StarAlgebra = field(compare=False)
    T: tuple
    T_star: tuple

    def apply(self, a: Vec) -> Vec:
        return _matvec(self.T, a)

    def apply_star(self, a: Vec) -> Vec:
        return _matvec(self.T_star, a)

    def compose(self, other: "AdjointableMap") -> "AdjointableMap":
        return AdjointableMap(self.algebra, _matmul(self.T, other.T), _matmul(other.T_star, self.T_star))

    def adjoint(self) -> "AdjointableMap":
        return AdjointableMap(self.algebra, self.T_star, self.T)

    def is_adjointable(self) -> bool:
        A = self.algebra
        for a in A.basis():
            for b in A.basis():
                if A.mul(A.star(self.apply(a)), b) != A.mul(A.star(a), self.apply_star(b)):
                    return False
        return True


def _matvec(M, v: Vec) -> Vec:
    return tuple(sum((c * x for c, x in zip(row, v) if c and x), ZERO) for row in M)


def _matmul(A, B):
    n = len(B[0]) if B else 0
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(len(B)) if A[i][k] and B[k][j]), ZERO) for j in range(n))
        for i in range(len(A))
    )


def left_multiplier(A: StarAlgebra, a: Vec) -> AdjointableMap:
    return AdjointableMap(A, _freeze(A.left_matrix(a)), _freeze(A.left_matrix(A.star(a))))


def identity_multiplier(A: StarAlgebra) -> AdjointableMap:
    I = tuple(tuple(ONE if i == j else ZERO for j in range(A.dim)) for i in range(A.dim))
    return AdjointableMap(A, I, I)


def _freeze(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def multiplier_algebra(A: StarAlgebra) -> list[AdjointableMap]:
    """Basis of the adjointable maps on A.

    Unknowns are conj(T) and S = T*, so that (T e_i)* e_j = e_i* (S e_j)
    is a linear system over Q(i).
    """
    if not is_essential(A):
        raise NotEssential("multiplier algebra needs an essential algebra", witness=is_essential(A).witness)
    n = A.dim
    nn = n * n
    # (T e_i)* = Σ_k conj(T_ki) star(e_k); unknown U_ki = conj(T_ki) at index k*n+i
    se = [A.star(A.e(k)) for k in range(n)]
    left = [[A.mul(se[k], A.e(j)) for j in range(n)] for k in range(n)]
    right = [[A.mul(se[i], A.e(k)) for k in range(n)] for i in range(n)]
    rows = []
    for i in range(n):
        for j in range(n):
            for m in range(n):
                row = [ZERO] * (2 * nn)
                for k in range(n):
                    row[k * n + i] = left[k][j][m]
                    # S_kj at index nn + k*n + j
                    row[nn + k * n + j] = -right[i][k][m]
                if any(row):
                    rows.append(row)
    out = []
    for v in nullspace(rows, 2 * nn):
        T = tuple(tuple(v[k * n + i].conj() for i in range(n)) for k in range(n))
        S = tuple(tuple(v[nn + k * n + j] for j in range(n)) for k in range(n))
        out.append(AdjointableMap(A, T, S))
    _check_essential_ideal(A, out)
    return out


def _flat(T) -> Vec:
    return tuple(c for row in T for c in row)


def _check_essential_ideal(A: StarAlgebra, basis: list[AdjointableMap]):
    """L(A) ⊆ M(A) is an ideal, and T·L(A) = 0 forces T = 0 on the span."""
    n = A.dim
    cols = [_flat(T.T) for T in basis]
    Ls = [left_multiplier(A, A.e(k)) for k in range(n)]
    for L in Ls:
        if solve(cols, _flat(L.T)) is None:
            raise AssertionError("a left multiplication is not adjointable")
    for T in basis:
        for k, L in enumerate(Ls):
            if T.compose(L).T != left_multiplier(A, T.apply(A.e(k))).T:
                raise AssertionError("T∘L_a ≠ L_{Ta}")
    # T ↦ (T∘L_{e_k})_k restricted to the span must be injective
    images = [tuple(c for L in Ls for c in _flat(T.compose(L).T)) for T in basis]
    if basis and rank(images, len(images[0])) != len(basis):
        raise AssertionError("L(A) is not essential in M(A)")


def operator_algebra(maps: list[AdjointableMap]) -> StarAlgebra:
    """The *-algebra spanned by ``maps`` (closed under composition and adjoint)."""
    cols = [_flat(T.T) for T in maps]
    table, star = {}, []
    for i, S in enumerate(maps):
        c = solve(cols, _flat(S.adjoint().T))
        if c is None:
            raise ValueError("span is not closed under adjoint")
        star.append({k: x for k, x in enumerate(c) if x})
        for j, T in enumerate(maps):
            c = solve(cols, _flat(S.compose(T).T))
            if c is None:
                raise ValueError("span is not closed under composition")
            table[(i, j)] = {k: x for k, x in enumerate(c) if x}
    return StarAlgebra(len(maps), table, star)


@dataclass
class UniversalMap:
    """φ: C → M(A), φ(c)(a) = c·a for A an ideal of C through ``embedding``."""

    images: list[AdjointableMap]
    injective: bool
    unique: bool


def universal_map(C: StarAlgebra, A: StarAlgebra, embedding: Sequence[Vec]) -> UniversalMap:
    """``embedding[k]`` is the image in C of the k-th basis element of A."""
    n = A.dim
    emb = list(embedding)

    def pull(c_vec: Vec) -> Vec:
        x = solve(emb, c_vec)
        if x is None:
            raise ValueError("embedded A is not an ideal of C")
        return x

    def phi_matrix(c: Vec) -> tuple:
        cols = [pull(C.mul(c, emb[k])) for k in range(n)]
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    images = []
    for c in C.basis():
        images.append(AdjointableMap(A, phi_matrix(c), phi_matrix(C.star(c))))
    for T in images:
        if not T.is_adjointable():
            raise AssertionError("φ(c) is not adjointable")
    for k in range(n):
        # φ∘j = L
        phi_j = _zero_mat(n)
        for m, coef in enumerate(emb[k]):
            if coef:
                phi_j = _add(phi_j, _scale(coef, images[m].T))
        if phi_j != left_multiplier(A, A.e(k)).T:
            raise AssertionError("φ∘j ≠ L")
    Ls = [left_multiplier(A, A.e(k)) for k in range(n)]
    # any ψ(c) with ψ(c)∘L_a = L_{ca} is determined when T ↦ (T∘L_a)_a is injective
    probe = []
    for i in range(n):
        for j in range(n):
            E = tuple(tuple(ONE if (r, s) == (i, j) else ZERO for s in range(n)) for r in range(n))
            probe.append(tuple(c for L in Ls for c in _flat(_matmul(E, L.T))))
    unique = rank(probe, len(probe[0])) == n * n
    flat = [_flat(T.T) for T in images]
    injective = rank(flat, n * n) == C.dim
    return UniversalMap(images, injective, unique)


def _zero_mat(n):
    return tuple(tuple(ZERO for _ in range(n)) for _ in range(n))


def _add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def _scale(c, A):
    return tuple(tuple(c * a for a in r) for r in A)


# -- constructors ---------------------------------------------------------


def from_table(
    dim: int,
    products: Mapping[tuple[int, int], Mapping[int, object]],
    star: Sequence[Mapping[int, object]] | None = None,
    names=None,
) -> StarAlgebra:
    if star is None:
        star = [{k: 1} for k in range(dim)]
    return StarAlgebra(dim, products, star, names)


def truncated_polynomial(n: int) -> StarAlgebra:
    """C[X]/⟨X^n⟩ with X* = X, basis 1, X, ..., X^{n-1}."""
    table = {(i, j): {i + j: 1} for i in range(n) for j in range(n) if i + j < n}
    names = ["1"] + [f"X^{k}" if k > 1 else "X" for k in range(1, n)]
    return StarAlgebra(n, table, [{k: 1} for k in range(n)], names)


def matrix_algebra(n: int) -> StarAlgebra:
    """M_n with matrix units E_ij at index i*n+j."""
    table = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                table[(i * n + j, j * n + l)] = {i * n + l: 1}
    star = [{j * n + i: 1} for i in range(n) for j in range(n)]
    names = [f"E{i}{j}" for i in range(n) for j in range(n)]
    return StarAlgebra(n * n, table, star, names)


def direct_sum(*algebras: StarAlgebra) -> StarAlgebra:
    table, star, names, off = {}, [], [], 0
    for A in algebras:
        for i in range(A.dim):
            for j in range(A.dim):
                if A.table[i][j]:
                    table[(off + i, off + j)] = {off + k: c for k, c in A.table[i][j].items()}
            star.append({off + k: c for k, c in A.star_images[i].items()})
        names.extend(A.names)
        off += A.dim
    return StarAlgebra(off, table, star, names, check=False)


def zero_product(dim: int = 1) -> StarAlgebra:
    return StarAlgebra(dim, {}, [{k: 1} for k in range(dim)])


def orbit_section_algebra(obundle) -> StarAlgebra:
    """C_c(A/H) on its orbit basis."""
    from .sections import orbit_basis, orbit_basis_element

    basis = orbit_basis(obundle)
    elems = [orbit_basis_element(obundle, k) for k in range(len(basis))]
    table = {(i, j): (a * b).coords() for i, a in enumerate(elems) for j, b in enumerate(elems)}
    star = [a.star().coords() for a in elems]
    return StarAlgebra(len(elems), table, star, [str(b) for b in basis], check=False)


def crossed_algebra(system) -> StarAlgebra:
    """The crossed product on its span basis."""
    from .crossed import basis_element, structure_table

    table = structure_table(system)
    star = [basis_element(system, k).star().coords() for k in range(system.dim)]
    return StarAlgebra(system.dim, table, star, [str(b) for b in system.basis()], check=False)


# -- finitely supported functions on N ------------------------------------


class FunctionsAlgebra:
    """Finitely supported functions N → Q(i) under pointwise operations.

    Essential but not unital; its multipliers are all functions N → Q(i),
    which are handled lazily as callables.
    """

    def mul(self, f: Mapping[int, GaussQ], g: Mapping[int, GaussQ]) -> dict[int, GaussQ]:
        return {n: f[n] * g[n] for n in f.keys() & g.keys() if f[n] * g[n]}

    def star(self, f: Mapping[int, GaussQ]) -> dict[int, GaussQ]:
        return {n: c.conj() for n, c in f.items()}

    def delta(self, n: int) -> dict[int, GaussQ]:
        return {n: ONE}

    def annihilates(self, f: Mapping[int, GaussQ]) -> bool:
        """f·δ_n = 0 for all n (only points in the support matter)."""
        return all(not self.mul(f, self.delta(n)) for n in f)

    def has_unit_on(self, points: Iterable[int]) -> bool:
        """No finitely supported e acts as identity on δ_n for n outside supp e."""
        pts = list(points)
        e = {n: ONE for n in pts}
        outside = max(pts, default=-1) + 1
        return bool(self.mul(e, self.delta(outside)))


@dataclass(frozen=True)
class PointwiseMultiplier:
    fn: Callable[[int], GaussQ]

    def __call__(self, f: Mapping[int, GaussQ]) -> dict[int, GaussQ]:
        out = {}
        for n, c in f.items():
            v = GaussQ.of(self.fn(n)) * c
            if v:
                out[n] = v
        return out

    def adjoint(self) -> "PointwiseMultiplier":
        fn = self.fn
        return PointwiseMultiplier(lambda n: GaussQ.of(fn(n)).conj())

    def compose(self, other: "PointwiseMultiplier") -> "PointwiseMultiplier":
        f, g = self.fn, other.fn
        return PointwiseMultiplier(lambda n: GaussQ.of(f(n)) * GaussQ.of(g(n)))


def functions_multiplier(
    T: Callable[[Mapping[int, GaussQ]], Mapping[int, GaussQ]],
    T_star: Callable[[Mapping[int, GaussQ]], Mapping[int, GaussQ]],
    points: Iterable[int],
) -> PointwiseMultiplier:
    """Read an adjointable map on the functions algebra as a pointwise function.

    On each probed δ_n the adjointability pairing forces T δ_n = c_n δ_n;
    the coefficient c_n is read off lazily beyond the probed points.
    """
    A = FunctionsAlgebra()
    for n in points:
        img = dict(T(A.delta(n)))
        if set(img) - {n}:
            raise ValueError(f"T moves δ_{n} off its support")
        for m in points:
            lhs = A.mul(A.star(img), A.delta(m))
            rhs = A.mul(A.star(A.delta(n)), dict(T_star(A.delta(m))))
            if lhs != rhs:
                raise ValueError(f"not adjointable at ({n}, {m})")

    def coefficient(n: int) -> GaussQ:
        return dict(T(A.delta(n))).get(n, ZERO)

    return PointwiseMultiplier(coefficient)


# -- extension of representations -----------------------------------------


@dataclass
class Extension:
    """π̃(T) on π(A)ℋ, with the residual of the defining equations."""

    matrix: np.ndarray
    residual: float
    uniqueness_gap: float


def _stack(mats: Sequence[np.ndarray]) -> np.ndarray:
    return np.hstack(list(mats))


@dataclass
class SpanFactors:
    """QR factors of the two spanning sets used by ``extend_rep``; reusable across maps T."""

    M: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    M2: np.ndarray
    Q2: np.ndarray
    R2: np.ndarray


def span_factors(pi: Sequence[np.ndarray]) -> SpanFactors:
    pi = [np.asarray(p, dtype=complex) for p in pi]
    if not pi:
        raise Degenerate("empty algebra", witness=None)
    m = len(pi)
    M = _stack(pi)
    # second spanning set: e_k + 2e_{k+1}, cyclically (invertible change of basis)
    M2 = _stack([pi[k] + 2 * pi[(k + 1) % m] for k in range(m)])
    return SpanFactors(M, *np.linalg.qr(M.T), M2, *np.linalg.qr(M2.T))


def extend_rep(
    pi: Sequence[np.ndarray],
    coords: Callable[[int], Sequence[object]] | Sequence[Sequence[object]],
    tolerance: float = 1e-9,
    factors: SpanFactors | None = None,
) -> Extension:
    """π̃(T)[π(a_i)ξ] = π(T a_i)ξ by least squares over the spanning vectors.

    ``pi[k]`` is π(e_k); ``coords`` gives the coordinates of T(e_k).
    Uniqueness is checked against a second spanning set of mixed basis
    elements.  ``factors`` may carry ``span_factors(pi)`` computed earlier.
    """
    pi = [np.asarray(p, dtype=complex) for p in pi]
    if not pi:
        raise Degenerate("empty algebra", witness=None)
    H = pi[0].shape[0]
    F = factors if factors is not None else span_factors(pi)
    r = int(np.sum(np.linalg.svd(F.R, compute_uv=False) > tolerance))
    if r < H:
        raise Degenerate("π(A)ℋ is a proper subspace", witness=r)
    get = coords if callable(coords) else coords.__getitem__
    images = []
    for k in range(len(pi)):
        c = [complex(GaussQ.of(x)) if not isinstance(x, (complex, float)) else complex(x) for x in get(k)]
        images.append(sum((ck * p for ck, p in zip(c, pi) if ck), np.zeros((H, H), dtype=complex)))
    N = _stack(images)
    X = _solve_right(N, F.Q, F.R)
    residual = float(np.max(np.abs(X @ F.M - N))) if N.size else 0.0
    m = len(pi)
    N2 = _stack([images[k] + 2 * images[(k + 1) % m] for k in range(m)])
    X2 = _solve_right(N2, F.Q2, F.R2)
    gap = float(np.max(np.abs(X - X2)))
    return Extension(X, residual, gap)


def _solve_right(N: np.ndarray, Q: np.ndarray, R: np.ndarray) -> np.ndarray:
    """X with X M = N where Mᵀ = QR and M has full row rank: X Rᵀ = N Q̄."""
    return np.linalg.solve(R, (N @ Q.conj()).T).T


def extend_rep_exact(pi: Sequence[Mat], T: AdjointableMap) -> Mat:
    """Exact π̃(T) for π given by exact matrices; raises Degenerate unless π(A)ℋ = ℋ."""
    H = pi[0].shape[0]
    n = len(pi)
    # unknown X (H×H) with X·π(e_k) = Σ_j T_jk π(e_j); solve column-blocks jointly
    M_cols = [tuple(p.data[r][c] for r in range(H)) for p in pi for c in range(H)]
    targets = []
    for k in range(n):
        acc = Mat.zeros(H, H)
        for j in range(n):
            if T.T[j][k]:
                acc = acc + pi[j].scale(T.T[j][k])
        targets.append(acc)
    N_cols = [tuple(t.data[r][c] for r in range(H)) for t in targets for c in range(H)]
    if rank(M_cols, H) < H:
        raise Degenerate("π(A)ℋ is a proper subspace", witness=rank(M_cols, H))
    # rows of X: x_r·M = N_r, i.e. M^T x_r^T = N_r^T
    Mt = [tuple(col[r] for col in M_cols) for r in range(H)]
    rows = []
    for r in range(H):
        target = tuple(col[r] for col in N_cols)
        x = solve(Mt, target)
        if x is None:
            raise AssertionError("extension equations are inconsistent")
        rows.append(x)
    return Mat(rows)
