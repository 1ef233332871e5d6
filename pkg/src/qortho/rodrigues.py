"""Closed-form Rodrigues constructions, evaluated on the grid and interpolated.

Two readings of the q-formula are provided.  ``form="literal"`` conjugates each
∇^{n_i} by (p_i q^{2 n_i}/β_i)^s, innermost component last.  ``form="corrected"``
nests the components the other way round and carries the cross exponent
S_i = n_{i+1} + ... + n_r in the conjugation factors; this is the version that
reproduces the solver for every multi-index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .qlattice import (
    GridFunction,
    Poly,
    QContext,
    delta_x_half,
    lattice_x,
    q_binomial_bracket,
    q_factorial_sym,
    q_gamma_int,
    q_stirling_value,
)
from .solver import MultiIndex, _check
from .weights import ClassicalParams, KravchukParams

FORMS = ("literal", "corrected")


class RodriguesTranscriptionError(ArithmeticError):
    """The assembled grid values are not those of a polynomial of degree |n|."""


@dataclass(frozen=True)
class RodriguesResult:
    poly: Poly
    raw_leading: Fraction
    constant_G: Fraction


def nabla_pow_grid(ctx: QContext, f: GridFunction, m: int) -> GridFunction:
    """m-fold ∇f(s) = (f(s) - f(s-1))/q^(s-1/2); the output starts m sites later."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m >= len(f.values):
        raise IndexError(f"∇^{m} needs more than {len(f.values)} sites")
    out = f
    for _ in range(m):
        vals = out.values
        out = GridFunction(
            out.base + 1,
            tuple((vals[j] - vals[j - 1]) / delta_x_half(ctx, out.base + j) for j in range(1, len(vals))),
        )
    return out


def q_leibniz_expansion(ctx: QContext, f: GridFunction, m: int, form: str = "corrected") -> GridFunction:
    """Closed-sum ∇^m.

    ``corrected``: q^(m/2 - ms) Σ_k [m,k] (-1)^k q^C(k,2) f(s-k), which follows from
    ∇^m = q^(m/2-ms) ∏_{j<m} (1 - q^j E^{-1}) and the q-binomial theorem.
    ``literal``: exponent C(m+1,2)/2 and weight q^C(m-k,2); it matches the
    composition only for m ≤ 1 on this lattice.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if m >= len(f.values):
        raise IndexError(f"∇^{m} needs more than {len(f.values)} sites")

    def value(s: int) -> Fraction:
        if form == "corrected":
            pre = ctx.vpow(m - 2 * m * s)
            weight = lambda k: ctx.qpow(comb(k, 2))
        else:
            pre = ctx.vpow(comb(m + 1, 2) - 2 * m * s)
            weight = lambda k: ctx.qpow(comb(m - k, 2))
        total = sum(
            (q_binomial_bracket(ctx, m, k) * (-1) ** k * weight(k) * f[s - k] for k in range(m + 1)),
            Fraction(0),
        )
        return pre * total

    return GridFunction.tabulate(value, f.base + m, f.top)


def rodrigues_constant(params: KravchukParams, n: Sequence[int]) -> Fraction:
    n = _check(params, n)
    ctx, N, d = params.ctx, params.N, n.norm
    out = Fraction((-1) ** d) * q_stirling_value(ctx, N, d) * ctx.vpow(-5 * d)
    for i in range(1, params.r + 1):
        p, ni = params.p[i - 1], n[i - 1]
        denom = Fraction(1)
        for j in range(1, ni + 1):
            denom *= ctx.qpow(-j) * (p * (ctx.qpow(d - n.prefix(i) - j - 1) - 1) + 1)
        if denom == 0:
            raise ZeroDivisionError("Rodrigues constant has a vanishing factor")
        out *= p**ni / denom
    for i in range(1, params.r):
        out *= ctx.qpow(n[i - 1] * sum(n[i:]))
    return out


def _reciprocal_gamma_product(ctx: QContext, a: int, b: int) -> Fraction:
    """1/(Γ_q(a)Γ_q(b)), zero at the poles a ≤ 0 or b ≤ 0."""
    if a <= 0 or b <= 0:
        return Fraction(0)
    return 1 / (q_gamma_int(ctx, a) * q_gamma_int(ctx, b))


def _conjugated_nabla(ctx: QContext, g: GridFunction, inner: Fraction, outer: Fraction, m: int) -> GridFunction:
    g = g.pointwise(lambda s, a: inner**s * a)
    g = nabla_pow_grid(ctx, g, m)
    return g.pointwise(lambda s, a: outer**s * a)


def _assemble(points: Sequence[Fraction], values: Sequence[Fraction], d: int, label: str) -> tuple[Poly, Fraction]:
    poly = Poly.interpolate(points[: d + 1], values[: d + 1])
    mismatched = [s for s, (x, y) in enumerate(zip(points, values)) if poly(x) != y]
    if mismatched:
        raise RodriguesTranscriptionError(
            f"{label}: grid values are not polynomial of degree ≤ {d} (mismatch at s={mismatched})"
        )
    if poly.degree != d:
        raise RodriguesTranscriptionError(f"{label}: degree {poly.degree} differs from |n| = {d}")
    return poly.monic(), poly.leading


def rodrigues_q_grid(params: KravchukParams, n: Sequence[int], form: str = "literal") -> GridFunction:
    """Right-hand side of the q-Rodrigues formula on s = 0..N, before interpolation."""
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    n = _check(params, n)
    ctx, N, d, q = params.ctx, params.N, n.norm, params.ctx.q
    base = q_factorial_sym(ctx, N - d)
    g = GridFunction.tabulate(
        lambda s: ctx.qpow(s * (s - 1) // 2)
        * base
        * _reciprocal_gamma_product(ctx, N - d - s + 1, s + 1),
        -d,
        N,
    )
    order = range(params.r, 0, -1) if form == "literal" else range(1, params.r + 1)
    for i in order:
        ni, ratio = n[i - 1], params.p[i - 1] / params.beta[i - 1]
        if form == "literal":
            inner, outer = ratio * q ** (2 * ni), 1 / ratio
        else:
            tail = sum(n[i:])
            inner, outer = ratio * q ** (2 * ni + tail), q ** (-tail) / ratio
        g = _conjugated_nabla(ctx, g, inner, outer, ni)
    G = rodrigues_constant(params, n)
    return GridFunction.tabulate(
        lambda s: G
        * q_gamma_int(ctx, N - s + 1)
        * q_gamma_int(ctx, s + 1)
        / (ctx.qpow(comb(s, 2)) * q_factorial_sym(ctx, N))
        * g[s],
        0,
        N,
    )


def rodrigues_q(params: KravchukParams, n: Sequence[int], form: str = "literal") -> RodriguesResult:
    n = MultiIndex(n)
    grid = rodrigues_q_grid(params, n, form)
    points = [lattice_x(params.ctx, s) for s in range(params.N + 1)]
    poly, lead = _assemble(points, grid.values, n.norm, f"q-Rodrigues ({form})")
    return RodriguesResult(poly, lead, rodrigues_constant(params, n))


def rodrigues_classical(params: ClassicalParams, n: Sequence[int]) -> RodriguesResult:
    n = _check(params, n)
    N, d = params.N, n.norm
    g = GridFunction.tabulate(lambda x: comb(N - d, x) if 0 <= x <= N - d else 0, -d, N)
    for i in range(params.r, 0, -1):
        ratio = params.p[i - 1] / (1 - params.p[i - 1])
        g = g.pointwise(lambda x, a: ratio**x * a)
        for _ in range(n[i - 1]):
            vals = g.values
            g = GridFunction(g.base + 1, tuple(vals[j] - vals[j - 1] for j in range(1, len(vals))))
        g = g.pointwise(lambda x, a: ratio ** (-x) * a)
    const = Fraction(1)
    for j in range(d):
        const *= j - N
    for p, ni in zip(params.p, n):
        const *= p**ni
    values = [const * Fraction(factorial(x) * factorial(N - x), factorial(N)) * g[x] for x in range(N + 1)]
    poly, lead = _assemble([Fraction(x) for x in range(N + 1)], values, d, "classical Rodrigues")
    return RodriguesResult(poly, lead, const)
