"""Exact Gaussian rationals and small dense matrices over them."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


def _frac(x) -> Fraction:
    if type(x) is Fraction:
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a Fraction or string")
    return Fraction(x)


class GaussQ:
    """An element re + im*i of Q(i), both parts exact rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def of(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, str):
            return parse_gauss(x)
        if isinstance(x, complex):
            return cls(_exact_float(x.real), _exact_float(x.imag))
        if isinstance(x, float):
            return cls(_exact_float(x))
        return cls(x)

    def __add__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.of(other)
        return GaussQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.of(other)
        return GaussQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussQ.of(other) - self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.of(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussQ(a * c, 0)
        return GaussQ(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ.of(other)
        n = other.abs2()
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * other.conj() * GaussQ(1 / n)

    def __rtruediv__(self, other):
        return GaussQ.of(other) / self

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({format_gauss(self)!r})"

    def __str__(self):
        return format_gauss(self)


def _exact_float(x: float) -> Fraction:
    f = Fraction(x)
    if f.denominator > 1 << 20:
        raise ValueError(f"float {x!r} is not a short dyadic; give it as a string")
    return f


ZERO = GaussQ(0)
ONE = GaussQ(1)
I = GaussQ(0, 1)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_gauss(z: GaussQ) -> str:
    if not z.im:
        return format_rational(z.re)
    im = format_rational(abs(z.im)) + "*i"
    sign = "-" if z.im < 0 else "+"
    if not z.re:
        return ("-" if z.im < 0 else "") + im
    return f"{format_rational(z.re)}{sign}{im}"


def parse_gauss(text: str) -> GaussQ:
    """Parse forms like ``3``, ``-1/2``, ``1/2+3/4*i``, ``-i`` and ``2*i``."""
    body = text.replace(" ", "")
    try:
        if not body.endswith("i"):
            return GaussQ(Fraction(body))
        body = body[:-1]
        if body.endswith("*"):
            body = body[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_part, im_text = Fraction(body[:cut]), body[cut:]
        else:
            re_part, im_text = Fraction(0), body
        if im_text in ("", "+"):
            im_part = Fraction(1)
        elif im_text == "-":
            im_part = Fraction(-1)
        else:
            im_part = Fraction(im_text)
        return GaussQ(re_part, im_part)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a Gaussian rational: {text!r}") from None


class Mat:
    """Immutable dense matrix over Q(i).

    Fibers of the bundles are full rectangular matrix spaces, so this is the
    element type of every fiber.  Shapes may have zero rows or columns only
    transiently; fibers themselves never do.
    """

    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, rows: Sequence[Sequence], cols: int | None = None):
        data = tuple(tuple(GaussQ.of(v) for v in row) for row in rows)
        self.rows = len(data)
        self.cols = len(data[0]) if data else (cols or 0)
        if any(len(r) != self.cols for r in data):
            raise ValueError("ragged matrix")
        self.data = data
        self._hash = None

    @classmethod
    def _raw(cls, data: tuple, rows: int, cols: int) -> "Mat":
        m = object.__new__(cls)
        m.data = data
        m.rows = rows
        m.cols = cols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, r: int, c: int) -> "Mat":
        return cls._raw(tuple((ZERO,) * c for _ in range(r)), r, c)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls._raw(
            tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def unit(cls, r: int, c: int, i: int, j: int, value=ONE) -> "Mat":
        v = GaussQ.of(value)
        return cls._raw(
            tuple(tuple(v if (a, b) == (i, j) else ZERO for b in range(c)) for a in range(r)), r, c
        )

    @classmethod
    def scalar(cls, value) -> "Mat":
        return cls._raw(((GaussQ.of(value),),), 1, 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def entries(self) -> Iterable[GaussQ]:
        for row in self.data:
            yield from row

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 1 and self.cols == 1 and other.cols == 1:
            return Mat._raw(((self.data[0][0] * other.data[0][0],),), 1, 1)
        ocols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for row in self.data:
            nz = [(k, v) for k, v in enumerate(row) if v]
            out_row = []
            for col in ocols:
                acc = ZERO
                for k, v in nz:
                    w = col[k]
                    if w:
                        acc = acc + v * w
                out_row.append(acc)
            out.append(tuple(out_row))
        return Mat._raw(tuple(out), self.rows, other.cols)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Mat._raw(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.data, other.data)),
            self.rows,
            self.cols,
        )

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self.data), self.rows, self.cols)

    def scale(self, c) -> "Mat":
        c = GaussQ.of(c)
        return Mat._raw(tuple(tuple(c * a for a in r) for r in self.data), self.rows, self.cols)

    def adjoint(self) -> "Mat":
        return Mat._raw(
            tuple(tuple(self.data[i][j].conj() for i in range(self.rows)) for j in range(self.cols)),
            self.cols,
            self.rows,
        )

    def is_zero(self) -> bool:
        return not any(v for row in self.data for v in row)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def to_complex(self):
        import numpy as np

        return np.array(
            [[complex(v) for v in row] for row in self.data], dtype=complex
        ).reshape(self.rows, self.cols)

    def __repr__(self):
        body = "; ".join(", ".join(format_gauss(v) for v in row) for row in self.data)
        return f"Mat[{self.rows}x{self.cols}]({body})"


def is_psd(m: Mat) -> bool:
    """Exact positive-semidefiniteness of a Hermitian matrix via LDL*.

    Pivots are taken on the diagonal; a zero pivot forces the whole remaining
    row to vanish, otherwise the matrix is indefinite.
    """
    if m.rows != m.cols or m != m.adjoint():
        return False
    a = [list(row) for row in m.data]
    n = m.rows
    for k in range(n):
        p = a[k][k]
        if p.re < 0:
            return False
        if not p:
            if any(a[k][j] for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = a[i][k] / p
            if not f:
                continue
            for j in range(k, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return True
