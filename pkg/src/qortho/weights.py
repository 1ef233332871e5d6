"""Discrete orthogonality measures for the q-Kravchuk and Kravchuk families."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .qlattice import (
    Number,
    QContext,
    as_scalar,
    delta_x_half,
    lattice_x,
    q_factorial_sym,
    q_gamma_int,
)


@dataclass(frozen=True)
class KravchukParams:
    """Vector measure data. β is independent of p because operators shift it."""

    ctx: QContext
    p: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]
    N: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(as_scalar(a) for a in self.p))
        object.__setattr__(self, "beta", tuple(as_scalar(b) for b in self.beta))
        if len(self.p) != len(self.beta):
            raise ValueError("p and beta must have the same length")
        if not self.p:
            raise ValueError("at least one measure is required")

    @classmethod
    def canonical(cls, v: Number, p: Sequence[Number], N: int) -> KravchukParams:
        ps = tuple(as_scalar(a) for a in p)
        return cls(QContext(as_scalar(v)), ps, tuple(1 - a for a in ps), N)

    @property
    def r(self) -> int:
        return len(self.p)

    def with_N(self, N: int) -> KravchukParams:
        return replace(self, N=N)

    def scale_beta(self, factors: Sequence[Number]) -> KravchukParams:
        return replace(self, beta=tuple(b * f for b, f in zip(self.beta, factors)))


@dataclass(frozen=True)
class ClassicalParams:
    p: tuple[Fraction, ...]
    N: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(as_scalar(a) for a in self.p))
        if not self.p:
            raise ValueError("at least one measure is required")

    @property
    def r(self) -> int:
        return len(self.p)

    def with_N(self, N: int) -> ClassicalParams:
        return replace(self, N=N)

    def q_deformation(self, v: Number) -> KravchukParams:
        """The q-system with β = 1 - p sharing these p and N."""
        return KravchukParams.canonical(v, self.p, self.N)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(params: KravchukParams | ClassicalParams) -> ValidationReport:
    report = ValidationReport()
    bad = report.violations
    if params.N < 0:
        bad.append(f"N: must be nonnegative, got {params.N}")
    for i, a in enumerate(params.p, start=1):
        if not 0 < a < 1:
            bad.append(f"p[{i}]: {a} not in (0, 1)")
    if len(set(params.p)) != len(params.p):
        bad.append("p: entries must be pairwise distinct")
    if isinstance(params, KravchukParams):
        for i, b in enumerate(params.beta, start=1):
            if b <= 0:
                bad.append(f"beta[{i}]: {b} must be positive")
        # Normality of the shifted systems hinges on the ratios, not on p alone.
        ratios = [a / b for a, b in zip(params.p, params.beta) if b]
        if len(ratios) == len(params.p) and len(set(ratios)) != len(ratios):
            bad.append("p/beta: ratios p_i/beta_i must be pairwise distinct")
        v = params.ctx.v
        if v <= 0 or v == 1:
            bad.append(f"v: {v} must be positive and different from 1")
        for i, j, m in q_power_relations(params):
            report.warnings.append(
                f"p/beta: ratio {i} is q^{m} times ratio {j}; multi-indices with n_{i} ≥ 1 and n_{j} ≥ {m + 1} are not normal"
            )
    return report


def _integer_log(t: Fraction, q: Fraction) -> int | None:
    """m ≥ 1 with t = q^m, if any."""
    if q == 1 or t <= 0:
        return None
    base = q if q > 1 else 1 / q
    target = t if q > 1 else 1 / t
    m, acc = 0, Fraction(1)
    while acc < target:
        acc *= base
        m += 1
    return m if acc == target and m >= 1 else None


def q_power_relations(params: KravchukParams) -> list[tuple[int, int, int]]:
    """Triples (i, j, m) with p_i/β_i = q^m · p_j/β_j for some integer m ≥ 1.

    The i-th weight is then the j-th one times the degree-m polynomial
    ((q-1)X + 1)^m, and the orthogonality rows become dependent once n_j > m.
    """
    if any(b <= 0 for b in params.beta) or params.ctx.q == 1:
        return []
    ratios = [a / b for a, b in zip(params.p, params.beta)]
    out = []
    for i, ri in enumerate(ratios, start=1):
        for j, rj in enumerate(ratios, start=1):
            if i != j:
                m = _integer_log(ri / rj, params.ctx.q)
                if m is not None:
                    out.append((i, j, m))
    return out


def predicted_non_normal(params: KravchukParams, n: Sequence[int]) -> bool:
    """Degeneracy forced by an integer q-power relation between two ratios."""
    return any(n[i - 1] >= 1 and n[j - 1] >= m + 1 for i, j, m in q_power_relations(params))


def _check_site(s: int, N: int) -> None:
    if not 0 <= s <= N:
        raise ValueError(f"site {s} outside the support [0, {N}]")


@lru_cache(maxsize=None)
def q_weight_value(ctx: QContext, p: Fraction, beta: Fraction, N: int, s: int) -> Fraction:
    """υ^{p,β,N}(s) from raw parameters; zero outside [0, N]."""
    if not 0 <= s <= N:
        return Fraction(0)
    return (
        ctx.qpow(s * (s - 1) // 2)
        * q_factorial_sym(ctx, N)
        * p**s
        * beta ** (N - s)
        / (q_gamma_int(ctx, s + 1) * q_gamma_int(ctx, N - s + 1))
    )


def q_weight(params: KravchukParams, i: int, s: int) -> Fraction:
    """υ_i(s) for component ``i`` (1-based)."""
    _check_site(s, params.N)
    return q_weight_value(params.ctx, params.p[i - 1], params.beta[i - 1], params.N, s)


def pearson_ratio(params: KravchukParams, i: int, s: int) -> Fraction:
    """υ_i(s)/υ_i(s-1) in closed form."""
    if not 1 <= s <= params.N:
        raise ValueError(f"site {s} outside [1, {params.N}]")
    ctx, p, b, N = params.ctx, params.p[i - 1], params.beta[i - 1], params.N
    return p / (ctx.q * b) * (lattice_x(ctx, N + 1) - lattice_x(ctx, s)) / lattice_x(ctx, s)


def measure_mass(params: KravchukParams, i: int, s: int) -> Fraction:
    return q_weight(params, i, s) * delta_x_half(params.ctx, s)


def omega_weight(ctx: QContext, p: Number, N: int, s: int) -> Fraction:
    """Single-measure q-Kravchuk weight written with the ratio p/(1-p)."""
    _check_site(s, N)
    p = as_scalar(p)
    return (
        (p / (1 - p)) ** s
        * ctx.qpow(s * (s - 1) // 2)
        * q_factorial_sym(ctx, N)
        * (1 - p) ** N
        / (q_gamma_int(ctx, N - s + 1) * q_gamma_int(ctx, s + 1))
    )


def classical_weight(params: ClassicalParams, i: int, x: int) -> Fraction:
    _check_site(x, params.N)
    p = params.p[i - 1]
    return comb(params.N, x) * p**x * (1 - p) ** (params.N - x)
