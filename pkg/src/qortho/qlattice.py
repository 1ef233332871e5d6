"""Exact scalar kernel on the exponential lattice x(s) = (q^s - 1)/(q - 1).

Everything is rational: the deformation is stored as ``v = q^(1/2)`` so that
half-integer powers of ``q`` stay in the field of fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

Scalar = Fraction
Number = Union[int, Fraction]


def as_scalar(value: Number | str) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to an exact Fraction."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    return Fraction(value)


@dataclass(frozen=True)
class QContext:
    """Deformation parameter carried as v = q^(1/2)."""

    v: Fraction
    q: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        v = as_scalar(self.v)
        if v <= 0:
            raise ValueError(f"v must be positive, got {v}")
        if v == 1:
            raise ValueError("v = 1 is the classical limit and is not a valid q-context")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "q", v * v)

    def qpow(self, k: int) -> Fraction:
        return _qpow(self.v, k)

    def vpow(self, k: int) -> Fraction:
        """v^k, i.e. q^(k/2)."""
        return _vpow(self.v, k)


@lru_cache(maxsize=None)
def _vpow(v: Fraction, k: int) -> Fraction:
    return v**k


@lru_cache(maxsize=None)
def _qpow(v: Fraction, k: int) -> Fraction:
    return _vpow(v, 2 * k)


class Poly:
    """Exact polynomial in X = x(s), coefficients stored low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()) -> None:
        c = [Fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def const(cls, c: Number) -> Poly:
        return cls((c,))

    @classmethod
    def X(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> Poly:
        out = cls.const(1)
        for a in roots:
            out = out * cls((-Fraction(a), 1))
        return out

    @classmethod
    def interpolate(cls, points: Sequence[Number], values: Sequence[Number]) -> Poly:
        """Newton divided-difference interpolation through distinct points."""
        if len(points) != len(values):
            raise ValueError("points and values differ in length")
        xs = [Fraction(a) for a in points]
        dd = [Fraction(b) for b in values]
        n = len(xs)
        for level in range(1, n):
            for i in range(n - 1, level - 1, -1):
                denom = xs[i] - xs[i - level]
                if denom == 0:
                    raise ValueError("interpolation points must be distinct")
                dd[i] = (dd[i] - dd[i - 1]) / denom
        out = cls()
        for i in range(n - 1, -1, -1):
            out = out * cls((-xs[i], 1)) + cls.const(dd[i])
        return out

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.leading == 1

    def monic(self) -> Poly:
        if self.is_zero():
            raise ZeroDivisionError("the zero polynomial has no monic normalization")
        return self.scale(1 / self.leading)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def scale(self, c: Number) -> Poly:
        return Poly(a * c for a in self.coeffs)

    def __call__(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __add__(self, other: Poly | Number) -> Poly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-a for a in self.coeffs)

    def __sub__(self, other: Poly | Number) -> Poly:
        return self + (-_as_poly(other))

    def __rsub__(self, other: Number) -> Poly:
        return _as_poly(other) - self

    def __mul__(self, other: Poly | Number) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(a) for a in self.coeffs]})"

    def compose_affine(self, a: Number, b: Number) -> Poly:
        """Return f(aX + b)."""
        lin = Poly((b, a))
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * lin + Poly.const(c)
        return out

    def derivative(self) -> Poly:
        return Poly(k * a for k, a in enumerate(self.coeffs) if k)

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        lead = other.leading
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            quot[k - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq])

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def to_strings(self) -> list[str]:
        return [str(a) for a in self.coeffs] or ["0"]

    @classmethod
    def from_strings(cls, items: Iterable[str]) -> Poly:
        return cls(Fraction(s) for s in items)


def _as_poly(value: Poly | Number) -> Poly:
    return value if isinstance(value, Poly) else Poly.const(value)


@dataclass(frozen=True)
class GridFunction:
    """Exact values on consecutive integer sites base, base+1, ..."""

    base: int
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("a grid function needs at least one site")
        object.__setattr__(self, "values", tuple(Fraction(a) for a in self.values))

    @classmethod
    def tabulate(cls, fn: Callable[[int], Number], lo: int, hi: int) -> GridFunction:
        return cls(lo, tuple(fn(s) for s in range(lo, hi + 1)))

    @property
    def top(self) -> int:
        return self.base + len(self.values) - 1

    @property
    def sites(self) -> range:
        return range(self.base, self.top + 1)

    def __getitem__(self, s: int) -> Fraction:
        if not self.base <= s <= self.top:
            raise IndexError(f"site {s} outside [{self.base}, {self.top}]")
        return self.values[s - self.base]

    def restrict(self, lo: int, hi: int) -> GridFunction:
        if lo < self.base or hi > self.top:
            raise IndexError(f"[{lo}, {hi}] not covered by [{self.base}, {self.top}]")
        return GridFunction(lo, self.values[lo - self.base : hi - self.base + 1])

    def pointwise(self, fn: Callable[[int, Fraction], Number]) -> GridFunction:
        return GridFunction(self.base, tuple(fn(s, a) for s, a in zip(self.sites, self.values)))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.values)

    def max_abs(self) -> Fraction:
        return max(abs(a) for a in self.values)


@lru_cache(maxsize=None)
def lattice_x(ctx: QContext, s: int) -> Fraction:
    return (ctx.qpow(s) - 1) / (ctx.q - 1)


def delta_x_half(ctx: QContext, s: int) -> Fraction:
    """Lattice step x(s) - x(s-1) = q^(s-1/2)."""
    return ctx.vpow(2 * s - 1)


@lru_cache(maxsize=None)
def q_stirling_value(ctx: QContext, s: int, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = Fraction(1)
    for j in range(k):
        out *= lattice_x(ctx, s - j)
    return out


@lru_cache(maxsize=None)
def shifted_stirling_poly(ctx: QContext, k: int, shift: int = 0) -> Poly:
    """[s+shift]^(k) as a polynomial in X, using x(s+t) = q^t X + x(t)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = Poly.const(1)
    for j in range(k):
        t = shift - j
        out = out * Poly((lattice_x(ctx, t), ctx.qpow(t)))
    return out


def q_stirling_poly(ctx: QContext, k: int) -> Poly:
    return shifted_stirling_poly(ctx, k, 0)


def q_number_sym(ctx: QContext, n: int) -> Fraction:
    v = ctx.v
    return (v**n - v ** (-n)) / (v - 1 / v)


@lru_cache(maxsize=None)
def q_gamma_int(ctx: QContext, n: int) -> Fraction:
    if n <= 0:
        raise ValueError(f"q-Gamma has a pole at n = {n}")
    out = Fraction(1)
    for k in range(1, n):
        out *= lattice_x(ctx, k)
    return out


@lru_cache(maxsize=None)
def q_factorial_sym(ctx: QContext, n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = Fraction(1)
    for k in range(1, n + 1):
        out *= q_number_sym(ctx, k)
    return out


def q_pochhammer(ctx: QContext, a: Number, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = Fraction(1)
    for j in range(k):
        out *= 1 - a * ctx.qpow(j)
    return out


@lru_cache(maxsize=None)
def q_binomial_bracket(ctx: QContext, m: int, k: int) -> Fraction:
    if k < 0 or k > m:
        return Fraction(0)
    q = ctx.q
    return q_pochhammer(ctx, q, m) / (q_pochhammer(ctx, q, k) * q_pochhammer(ctx, q, m - k))


def to_stirling_basis(f: Poly, basis: Callable[[int], Poly]) -> list[Fraction]:
    """Coefficients c_k with f = sum c_k basis(k), for a basis with deg basis(k) = k."""
    rem = f
    coeffs = [Fraction(0)] * (f.degree + 1)
    for k in range(f.degree, -1, -1):
        b = basis(k)
        c = rem.coeff(k) / b.leading
        coeffs[k] = c
        if c:
            rem = rem - b.scale(c)
    return coeffs
