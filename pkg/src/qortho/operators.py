"""Difference operators on the q-lattice and on the uniform lattice.

Everything is polynomial-to-polynomial in X = x(s); the backward shift is the
exact substitution x(s-1) = (X - 1)/q and the forward shift is x(s+1) = qX + 1.

Several identities are offered in two forms.  ``literal`` applies each identity
exactly as stated; ``corrected`` uses the parameter shifts that make the
identity hold for every multi-index (see README, "Known discrepancies").
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .qlattice import (
    GridFunction,
    Poly,
    QContext,
    delta_x_half,
    lattice_x,
    q_number_sym,
    shifted_stirling_poly,
    to_stirling_basis,
)
from .solver import MultiIndex, NormalityError, _check, bareiss_solve, solve_type2_classical, solve_type2_q
from .weights import ClassicalParams, KravchukParams, q_weight_value

FORMS = ("literal", "corrected")
CONVENTIONS = ("operand-degree", "fixed-norm", "shifted-norm")


@dataclass(frozen=True)
class Residual:
    """A residual both as a polynomial and as values on the lattice sites 0..N."""

    poly: Poly
    grid: GridFunction

    def is_zero(self) -> bool:
        return self.poly.is_zero() and self.grid.is_zero()

    def norm(self) -> Fraction:
        return self.grid.max_abs()


def _residual(ctx: QContext | None, poly: Poly, N: int) -> Residual:
    node = (lambda s: lattice_x(ctx, s)) if ctx is not None else Fraction
    return Residual(poly, GridFunction.tabulate(lambda s: poly(node(s)), 0, max(N, 0)))


def _check_form(form: str) -> None:
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")


# -- Δ and ∇ ------------------------------------------------------------------


def op_delta(ctx: QContext, f: Poly) -> Poly:
    """Δf = (f(s+1) - f(s))/q^(s-1/2) via Δ[s]^(k) = q^(3/2-k) x(k) [s]^(k-1)."""
    coeffs = to_stirling_basis(f, lambda k: shifted_stirling_poly(ctx, k, 0))
    out = Poly()
    for k, c in enumerate(coeffs):
        if k and c:
            out = out + shifted_stirling_poly(ctx, k - 1, 0).scale(c * ctx.vpow(3 - 2 * k) * lattice_x(ctx, k))
    return out


def op_nabla(ctx: QContext, f: Poly) -> Poly:
    """∇f = (f(s) - f(s-1))/q^(s-1/2) via ∇[s+1]^(k) = q^(3/2-k) x(k) [s]^(k-1)."""
    coeffs = to_stirling_basis(f, lambda k: shifted_stirling_poly(ctx, k, 1))
    out = Poly()
    for k, c in enumerate(coeffs):
        if k and c:
            out = out + shifted_stirling_poly(ctx, k - 1, 0).scale(c * ctx.vpow(3 - 2 * k) * lattice_x(ctx, k))
    return out


def delta_pointwise(ctx: QContext, f: Poly, s: int) -> Fraction:
    return (f(lattice_x(ctx, s + 1)) - f(lattice_x(ctx, s))) / delta_x_half(ctx, s)


def nabla_pointwise(ctx: QContext, f: Poly, s: int) -> Fraction:
    return (f(lattice_x(ctx, s)) - f(lattice_x(ctx, s - 1))) / delta_x_half(ctx, s)


def backward_shift(ctx: QContext, f: Poly) -> Poly:
    """f evaluated at x(s-1) = (X - 1)/q."""
    return f.compose_affine(1 / ctx.q, -1 / ctx.q)


def forward_shift(ctx: QContext, f: Poly) -> Poly:
    """f evaluated at x(s+1) = qX + 1."""
    return f.compose_affine(ctx.q, 1)


# -- raising ------------------------------------------------------------------


@dataclass(frozen=True)
class RaisingSpec:
    p: Fraction
    beta: Fraction
    N: int
    m: int

    def denominator(self, ctx: QContext) -> Fraction:
        return self.p * (ctx.qpow(self.m - 1) - 1) + 1


def raising_apply(spec: RaisingSpec, ctx: QContext, f: Poly) -> Poly:
    """Expanded, weight-free form of the raising operator."""
    D = spec.denominator(ctx)
    if D == 0:
        raise ValueError(f"degenerate raising operator {spec}")
    q, X = ctx.q, Poly.X()
    multiplier = Poly((spec.p * lattice_x(ctx, spec.N + 1), -(spec.p + q * spec.beta)))
    out = (multiplier * f).scale(1 / (q * D)) + (X * (f - backward_shift(ctx, f))).scale(spec.beta / D)
    return out.scale(ctx.qpow(spec.m) * ctx.v)


def raising_weight_form(spec: RaisingSpec, ctx: QContext, f: Poly, s: int) -> Fraction:
    """The same operator through the weight quotient, evaluated at one site in [1, N]."""
    if not 1 <= s <= spec.N:
        raise ValueError(f"site {s} outside [1, {spec.N}]")
    p, b, N = spec.p, spec.beta, spec.N

    def weighted(t: int) -> Fraction:
        return q_weight_value(ctx, p, b, N, t) * f(lattice_x(ctx, t))

    nabla = (weighted(s) - weighted(s - 1)) / delta_x_half(ctx, s)
    scale = p * b * ctx.qpow(spec.m + 2 * N + 1) * q_number_sym(ctx, N + 1) / spec.denominator(ctx)
    return scale / q_weight_value(ctx, p, ctx.q**2 * b, N + 1, s) * nabla


def raised_params(params: KravchukParams, i: int, form: str = "literal") -> KravchukParams:
    """Parameters of the image family under the i-th raising operator."""
    _check_form(form)
    q = params.ctx.q
    other = 1 if form == "literal" else q
    factors = [q * q if j == i else other for j in range(1, params.r + 1)]
    return params.scale_beta(factors).with_N(params.N + 1)


def lowered_params(params: KravchukParams, i: int, form: str = "literal") -> KravchukParams:
    """Parameters of the i-th family in the lowering expansion."""
    _check_form(form)
    q = params.ctx.q
    other = 1 if form == "literal" else 1 / q
    factors = [1 / (q * q) if j == i else other for j in range(1, params.r + 1)]
    return params.scale_beta(factors).with_N(params.N - 1)


def raising_identity_residual(params: KravchukParams, n: Sequence[int], i: int, form: str = "literal") -> Poly:
    """𝒟_i K_n + q^(1/2) K_{n+e_i} with the image family chosen by ``form``."""
    n = _check(params, n)
    K = solve_type2_q(params, n)
    spec = RaisingSpec(params.p[i - 1], params.beta[i - 1], params.N, n.norm)
    image = solve_type2_q(raised_params(params, i, form), n.shifted(i))
    return raising_apply(spec, params.ctx, K) + image.scale(params.ctx.v)


# -- lowering -----------------------------------------------------------------


def lowering_coeffs(params: KravchukParams, n: Sequence[int]) -> list[Fraction]:
    n = _check(params, n)
    ctx, d = params.ctx, n.norm
    out = []
    for p, ni in zip(params.p, n):
        ratio = (p * (ctx.qpow(ni) - 1) + 1) / (p * (ctx.qpow(d) - 1) + 1)
        out.append(ctx.qpow(d - ni) * ctx.v * ratio * lattice_x(ctx, ni))
    return out


def lowering_identity_check(params: KravchukParams, n: Sequence[int], form: str = "literal") -> Poly:
    """ΔK_n - Σ ξ_i K_{n-e_i}; terms with n_i = 0 drop out."""
    n = _check(params, n)
    if n.norm == 0:
        raise ValueError("lowering expansion needs |n| ≥ 1")
    out = op_delta(params.ctx, solve_type2_q(params, n))
    for i, xi in enumerate(lowering_coeffs(params, n), start=1):
        if n[i - 1]:
            out = out - solve_type2_q(lowered_params(params, i, form), n.shifted(i, -1)).scale(xi)
    return out


@dataclass(frozen=True)
class LoweringExpansion:
    """Exact coordinates of ΔK_n in the family {K_{n-e_i}}; ``residual`` is what is left over."""

    coefficients: tuple[Fraction | None, ...]
    residual: Poly


def lowering_expansion(params: KravchukParams, n: Sequence[int], form: str = "corrected") -> LoweringExpansion:
    """Project ΔK_n onto span{K_{n-e_i}} by exact elimination on the coefficient vectors."""
    n = _check(params, n)
    target = op_delta(params.ctx, solve_type2_q(params, n))
    active = [i for i in range(1, params.r + 1) if n[i - 1]]
    basis = [solve_type2_q(lowered_params(params, i, form), n.shifted(i, -1)) for i in active]
    width = n.norm
    # Pick an independent set of coefficient rows to form a square system.
    rows = [[b.coeff(k) for b in basis] + [target.coeff(k)] for k in range(width)]
    chosen: list[list[Fraction]] = []
    for row in rows:
        trial = chosen + [row]
        if _rank([r[:-1] for r in trial]) == len(trial):
            chosen = trial
        if len(chosen) == len(basis):
            break
    coeffs = bareiss_solve(chosen) if len(chosen) == len(basis) else None
    if coeffs is None:
        return LoweringExpansion(tuple(None for _ in range(params.r)), target)
    residual = target
    full: list[Fraction | None] = [Fraction(0)] * params.r
    for i, c, b in zip(active, coeffs, basis):
        residual = residual - b.scale(c)
        full[i - 1] = c
    return LoweringExpansion(tuple(full), residual)


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


# -- the (r+1)-order equation ---------------------------------------------------


def _m_for(convention: str, operand: Poly, norm: int) -> int:
    if convention == "operand-degree":
        return max(operand.degree, 0)
    if convention == "fixed-norm":
        return norm
    if convention == "shifted-norm":
        return norm + 1
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def _chain(params: KravchukParams, indices: Sequence[int], f: Poly, convention: str, norm: int) -> Poly:
    """Apply ∏ 𝒟^{p_j, β_j/q², N-1} with the rightmost index acting first."""
    ctx = params.ctx
    for j in reversed(indices):
        m = _m_for(convention, f, norm)
        spec = RaisingSpec(params.p[j - 1], params.beta[j - 1] / ctx.q**2, params.N - 1, m)
        f = raising_apply(spec, ctx, f)
    return f


def diffeq_sides_q(params: KravchukParams, n: Sequence[int], convention: str = "operand-degree") -> tuple[Poly, Poly]:
    n = _check(params, n)
    ctx, r, d = params.ctx, params.r, n.norm
    K = solve_type2_q(params, n)
    everyone = list(range(1, r + 1))
    lhs = _chain(params, everyone, op_delta(ctx, K), convention, d)
    rhs = Poly()
    for i, xi in enumerate(lowering_coeffs(params, n), start=1):
        if n[i - 1]:
            others = [j for j in everyone if j != i]
            rhs = rhs - _chain(params, others, K, convention, d).scale(ctx.v * xi)
    return lhs, rhs


def diffeq_residual_q(params: KravchukParams, n: Sequence[int], convention: str = "operand-degree") -> Residual:
    lhs, rhs = diffeq_sides_q(params, n, convention)
    return _residual(params.ctx, lhs - rhs, params.N)


def adjudicate_convention(
    cases: Sequence[tuple[KravchukParams, Sequence[int]]], conventions: Sequence[str] = CONVENTIONS
) -> dict[str, bool]:
    """For each convention, whether every case has an identically zero residual."""
    return {c: all(diffeq_residual_q(p, n, c).is_zero() for p, n in cases) for c in conventions}


# -- r = 1 hypergeometric form --------------------------------------------------


@dataclass(frozen=True)
class HypergeometricData:
    a2: Poly
    a1: Poly
    sigma: Poly
    tau: Poly
    lambda_n: Fraction
    N: int


def hypergeometric_lambda(ctx: QContext, p: Fraction, n: int) -> Fraction:
    return ctx.vpow(2 - n) * q_number_sym(ctx, n) * (p * (ctx.qpow(n) - 1) + 1) / (1 - p)


def hypergeometric_data_r1(ctx: QContext, p: Fraction, N: int, n: int, form: str = "literal") -> HypergeometricData:
    """Coefficients of the second-order equation for a single measure.

    ``corrected`` uses x(N) in the constant term of a1 and σ = a2.
    """
    _check_form(form)
    p = Fraction(p)
    q, v = ctx.q, ctx.v
    a2 = Poly((0, 1, q - 1))
    tail = ctx.qpow(N) - 1 if form == "literal" else lattice_x(ctx, N)
    a1 = Poly((v * p * q * tail / (1 - p), -v * (p * (q - 1) + 1) / (1 - p)))
    if form == "literal":
        step = Poly((1, q - 1)).scale(1 / v)  # q^(s-1/2) written in X
        sigma = a2 - (a1 * step).scale(Fraction(1, 2))
    else:
        sigma = a2
    return HypergeometricData(a2, a1, sigma, a1, hypergeometric_lambda(ctx, p, n), N)


def hypergeometric_residual(
    ctx: QContext, data: HypergeometricData, y: Poly, lam: Fraction | None = None
) -> GridFunction:
    lam = data.lambda_n if lam is None else lam

    def at(s: int) -> Fraction:
        x0, xp, xm = lattice_x(ctx, s), lattice_x(ctx, s + 1), lattice_x(ctx, s - 1)
        fwd = (y(xp) - y(x0)) / (xp - x0)
        bwd = (y(x0) - y(xm)) / (x0 - xm)
        return data.sigma(x0) * (fwd - bwd) / delta_x_half(ctx, s) + data.tau(x0) * fwd + lam * y(x0)

    return GridFunction.tabulate(at, 0, data.N)


# -- classical family ---------------------------------------------------------


def classical_raising_apply(p: Fraction, N: int, f: Poly) -> Poly:
    """ℒ^{p,N} f = p(N+1-x) f(x) - (1-p) x f(x-1)."""
    p = Fraction(p)
    X = Poly.X()
    return Poly((p * (N + 1), -p)) * f - (X * f.compose_affine(1, -1)).scale(1 - p)


def classical_delta(f: Poly) -> Poly:
    return f.compose_affine(1, 1) - f


def classical_diffeq_sides(params: ClassicalParams, n: Sequence[int], form: str = "literal") -> tuple[Poly, Poly]:
    _check_form(form)
    n = _check(params, n)
    r, N = params.r, params.N
    K = solve_type2_classical(params, n)

    def index(j: int, i: int | None) -> int:
        if form == "corrected" and i is not None and j > i:
            return N + r - j
        return N + r - j - 1

    lhs = classical_delta(K)
    for i in range(r, 0, -1):
        lhs = classical_raising_apply(params.p[i - 1], index(i, None), lhs)
    rhs = Poly()
    for i in range(1, r + 1):
        if not n[i - 1]:
            continue
        term = K
        for j in range(r, 0, -1):
            if j != i:
                term = classical_raising_apply(params.p[j - 1], index(j, i), term)
        rhs = rhs - term.scale(n[i - 1])
    return lhs, rhs


def classical_diffeq_residual(params: ClassicalParams, n: Sequence[int], form: str = "literal") -> Residual:
    lhs, rhs = classical_diffeq_sides(params, n, form)
    return _residual(None, lhs - rhs, params.N)


def recurrence_residual(params: ClassicalParams, n: Sequence[int], k: int) -> Poly:
    n = _check(params, n)
    N, d, ps = params.N, n.norm, params.p
    if d + 1 > N:
        raise ValueError(f"|n| + 1 = {d + 1} exceeds N = {N}")
    K = solve_type2_classical(params, n)
    rhs = solve_type2_classical(params, n.shifted(k))
    middle = (N - d) * ps[k - 1] + sum((ni * (1 - p) for ni, p in zip(n, ps)), Fraction(0))
    rhs = rhs + K.scale(middle)
    for i, (ni, p) in enumerate(zip(n, ps), start=1):
        if ni:
            rhs = rhs + solve_type2_classical(params, n.shifted(i, -1)).scale(ni * p * (p - 1) * (d - N - 1))
    return Poly.X() * K - rhs


def safe_solve(solver: Callable[..., Poly], *args: object) -> Poly | None:
    try:
        return solver(*args)
    except NormalityError:
        return None
