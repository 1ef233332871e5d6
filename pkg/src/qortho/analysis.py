"""Exact real-root counting and isolation, and q → 1 limit scans."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .qlattice import Number, Poly, as_scalar, lattice_x
from .rodrigues import rodrigues_classical, rodrigues_q
from .solver import MultiIndex, _check, solve_type2_classical, solve_type2_q
from .weights import ClassicalParams, validate

RATIO_BAND = (Fraction(17, 10), Fraction(23, 10))


@dataclass(frozen=True)
class RootReport:
    count_positive: int
    isolating_intervals: tuple[tuple[Fraction, Fraction], ...]
    decimal_approximations: tuple[str, ...]


@dataclass(frozen=True)
class LimitScan:
    v_sequence: tuple[Fraction, ...]
    deviations: tuple[Fraction, ...]
    ratios: tuple[Fraction, ...]

    def strictly_decreasing(self, last: int | None = None) -> bool:
        devs = self.deviations if last is None else self.deviations[-last:]
        return all(a > b for a, b in zip(devs, devs[1:]))

    def ratios_in_band(self, last: int = 3, band: tuple[Fraction, Fraction] = RATIO_BAND) -> bool:
        tail = self.ratios[-last:] if last else ()
        return len(tail) == min(last, len(self.ratios)) and all(band[0] <= r <= band[1] for r in tail)


def sturm_sequence(poly: Poly) -> list[Poly]:
    if poly.is_zero():
        raise ValueError("the zero polynomial has no Sturm sequence")
    seq = [poly, poly.derivative()]
    while not seq[-1].is_zero():
        seq.append(-seq[-2].divmod(seq[-1])[1])
    return seq[:-1]


def _variations(seq: Sequence[Poly], x: Fraction) -> int:
    signs = [v > 0 for v in (p(x) for p in seq) if v != 0]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def sturm_count(poly: Poly, lo: Number, hi: Number) -> int:
    """Number of distinct real roots in (lo, hi]; endpoints may be roots of any multiplicity."""
    lo, hi = as_scalar(lo), as_scalar(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi}]")
    if poly.is_zero():
        raise ValueError("the zero polynomial has no Sturm sequence")
    seq = sturm_sequence(square_free_part(poly))
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(poly: Poly) -> Fraction:
    if poly.is_zero():
        raise ValueError("the zero polynomial has no root bound")
    lead = abs(poly.leading)
    return 1 + max((abs(c) / lead for c in poly.coeffs[:-1]), default=Fraction(0))


def square_free_part(poly: Poly) -> Poly:
    if poly.degree <= 0:
        return poly
    g = poly.gcd(poly.derivative())
    return poly.divmod(g)[0] if g.degree > 0 else poly


def has_simple_roots(poly: Poly) -> bool:
    return poly.degree <= 0 or poly.gcd(poly.derivative()).degree == 0


def render_decimal(x: Fraction, digits: int) -> str:
    """Fixed-point decimal string with ``digits`` places (presentation only)."""
    with localcontext() as ctx:
        ctx.prec = digits + max(len(str(abs(x.numerator))), len(str(x.denominator))) + 10
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return str(value.quantize(Decimal(1).scaleb(-digits)))


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with the smallest denominator in the open interval (lo, hi)."""
    fl = lo.numerator // lo.denominator
    if fl + 1 < hi:
        return Fraction(fl + 1)
    a, b = lo - fl, hi - fl
    if a == 0:
        return fl + Fraction(1, (1 / b).__floor__() + 1)
    return fl + 1 / _simplest_between(1 / b, 1 / a)


def isolate_roots(poly: Poly, precision: int) -> RootReport:
    """Bisection on Sturm counts down to width < 10^-precision; exact rational roots become points."""
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if poly.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    width = Fraction(1, 10**precision)
    found: list[tuple[Fraction, Fraction]] = []

    def split(g: Poly, seq: list[Poly], lo: Fraction, hi: Fraction) -> None:
        if g.degree == 1:
            root = -g.coeff(0) / g.coeff(1)
            if lo < root <= hi:
                found.append((root, root))
            return
        count = _variations(seq, lo) - _variations(seq, hi)
        if count == 0:
            return
        if count == 1 and hi - lo < width:
            guess = _simplest_between(lo, hi)
            found.append((guess, guess) if g(guess) == 0 else (lo, hi))
            return
        mid = (lo + hi) / 2
        if g(mid) == 0:
            found.append((mid, mid))
            g = g.divmod(Poly((-mid, 1)))[0]
            seq = sturm_sequence(g) if g.degree > 0 else [g]
        split(g, seq, lo, mid)
        split(g, seq, mid, hi)

    g = square_free_part(poly)
    if g.degree > 0:
        bound = cauchy_bound(g)
        split(g, sturm_sequence(g), -bound, bound)
    found.sort()
    return RootReport(
        count_positive=sum(1 for lo, _ in found if lo >= 0),
        isolating_intervals=tuple(found),
        decimal_approximations=tuple(render_decimal((lo + hi) / 2, precision) for lo, hi in found),
    )


def positive_root_count(poly: Poly) -> int:
    """Distinct roots in (0, Cauchy bound)."""
    if poly.degree <= 0:
        return 0
    return sturm_count(poly, 0, cauchy_bound(poly))


def scan_points(delta: Number, steps: int) -> tuple[Fraction, ...]:
    """v_k = 1 + δ 2^(-k) for k = 1..steps."""
    delta = as_scalar(delta)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    return tuple(1 + delta / 2**k for k in range(1, steps + 1))


def limit_scan(
    cparams: ClassicalParams, n: Sequence[int], delta: Number, steps: int, path: str = "solver"
) -> LimitScan:
    """Max-over-grid distance between the q-polynomial at v_k and the classical one.

    ``path="solver"`` compares the solved polynomials; ``path="rodrigues"`` compares
    the Rodrigues constructions (corrected q-form against the classical form).
    """
    n = _check(cparams, n)
    if path not in ("solver", "rodrigues"):
        raise ValueError(f"unknown path {path!r}")
    N = cparams.N
    if path == "solver":
        target = solve_type2_classical(cparams, n)
    else:
        target = rodrigues_classical(cparams, n).poly
    reference = [target(Fraction(s)) for s in range(N + 1)]
    vs = scan_points(delta, steps)
    deviations = []
    for v in vs:
        params = cparams.q_deformation(v)
        report = validate(params)
        if not report.ok:
            raise ValueError(f"invalid scan point v={v}: {report.violations}")
        K = solve_type2_q(params, n) if path == "solver" else rodrigues_q(params, n, "corrected").poly
        deviations.append(max(abs(K(lattice_x(params.ctx, s)) - ref) for s, ref in enumerate(reference)))
    ratios = tuple(a / b if b else Fraction(0) for a, b in zip(deviations, deviations[1:]))
    return LimitScan(vs, tuple(deviations), ratios)


def multi_index_sweep(r: int, max_norm: int) -> list[MultiIndex]:
    """All multi-indices of length r with |n| ≤ max_norm, in graded lexicographic order."""
    out: list[MultiIndex] = []

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == r:
            out.append(MultiIndex(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a)

    rec([], max_norm)
    return sorted(out, key=lambda m: (m.norm, tuple(-a for a in m)))
