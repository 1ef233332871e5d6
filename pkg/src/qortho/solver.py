"""Ground-truth type II multiple orthogonal polynomials from the orthogonality system."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import lcm
from typing import Iterable, Sequence

from .qlattice import Poly, delta_x_half, lattice_x, q_stirling_poly, q_stirling_value
from .weights import ClassicalParams, KravchukParams, classical_weight, q_weight


class NormalityError(ArithmeticError):
    """The orthogonality system for a multi-index is singular."""

    def __init__(self, params: object, n: Sequence[int]) -> None:
        super().__init__(f"normality failure: singular system for n={tuple(n)} with {params}")
        self.params = params
        self.n = tuple(n)


class MultiIndex(tuple):
    """Immutable tuple of nonnegative integers with norm and prefix sums."""

    def __new__(cls, entries: Iterable[int]) -> MultiIndex:
        items = tuple(int(a) for a in entries)
        if any(a < 0 for a in items):
            raise ValueError(f"multi-index entries must be nonnegative: {items}")
        return super().__new__(cls, items)

    @property
    def norm(self) -> int:
        return sum(self)

    def prefix(self, i: int) -> int:
        """|n|_i = n_1 + ... + n_{i-1} (1-based i)."""
        return sum(self[: i - 1])

    def shifted(self, i: int, by: int = 1) -> MultiIndex:
        """n + by·e_i (1-based i)."""
        items = list(self)
        items[i - 1] += by
        return MultiIndex(items)

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)}"


def _check(params: KravchukParams | ClassicalParams, n: Sequence[int]) -> MultiIndex:
    n = MultiIndex(n)
    if len(n) != params.r:
        raise ValueError(f"multi-index length {len(n)} does not match r = {params.r}")
    if n.norm > params.N:
        raise ValueError(f"|n| = {n.norm} exceeds N = {params.N}")
    return n


@dataclass(frozen=True)
class OrthoSystem:
    """Gram rows ``(i, k)`` against the basis polynomials 0..|n|."""

    matrix: tuple[tuple[Fraction, ...], ...]
    rows: tuple[tuple[int, int], ...]


def inner_sum_q(params: KravchukParams, i: int, f: Poly, k: int) -> Fraction:
    ctx = params.ctx
    return sum(
        (
            f(lattice_x(ctx, s)) * q_stirling_value(ctx, s, k) * q_weight(params, i, s) * delta_x_half(ctx, s)
            for s in range(params.N + 1)
        ),
        Fraction(0),
    )


def orthosystem_q(params: KravchukParams, n: Sequence[int]) -> OrthoSystem:
    n = _check(params, n)
    ctx, d = params.ctx, n.norm
    labels = tuple((i, k) for i in range(1, params.r + 1) for k in range(n[i - 1]))
    matrix = []
    for i, k in labels:
        masses = [q_stirling_value(ctx, s, k) * q_weight(params, i, s) * delta_x_half(ctx, s) for s in range(params.N + 1)]
        matrix.append(
            tuple(
                sum((m * q_stirling_value(ctx, s, j) for s, m in enumerate(masses)), Fraction(0))
                for j in range(d + 1)
            )
        )
    return OrthoSystem(tuple(matrix), labels)


def falling_test_poly(j: int) -> Poly:
    """The Pochhammer symbol (-x)_j as a polynomial in x."""
    out = Poly.const(1)
    for m in range(j):
        out = out * Poly((m, -1))
    return out


def orthosystem_classical(params: ClassicalParams, n: Sequence[int]) -> OrthoSystem:
    n = _check(params, n)
    d = n.norm
    labels = tuple((i, k) for i in range(1, params.r + 1) for k in range(n[i - 1]))
    matrix = []
    for i, k in labels:
        test = falling_test_poly(k)
        masses = [test(x) * classical_weight(params, i, x) for x in range(params.N + 1)]
        matrix.append(
            tuple(sum((m * Fraction(x) ** j for x, m in enumerate(masses)), Fraction(0)) for j in range(d + 1))
        )
    return OrthoSystem(tuple(matrix), labels)


def _integer_rows(matrix: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale every row by the lcm of its denominators; row scaling keeps solutions."""
    out = []
    for row in matrix:
        m = reduce(lcm, (a.denominator for a in row), 1)
        out.append([int(a * m) for a in row])
    return out


def bareiss_solve(augmented: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Solve the square system [A | b] by fraction-free elimination.

    Returns None when A is singular. Pivot: first nonzero entry in row order.
    """
    a = _integer_rows(augmented)
    n = len(a)
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            return None
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        for r in range(k + 1, n):
            for c in range(k + 1, n + 1):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]) // prev
            a[r][k] = 0
        prev = a[k][k]
    x: list[Fraction] = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = Fraction(a[k][n]) - sum((a[k][c] * x[c] for c in range(k + 1, n)), Fraction(0))
        x[k] = acc / a[k][k]
    return x


def bareiss_determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    scales = []
    for row in matrix:
        scales.append(reduce(lcm, (a.denominator for a in row), 1))
    a = _integer_rows(matrix)
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign, prev = 1, 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]) // prev
            a[r][k] = 0
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], reduce(lambda u, w: u * w, scales, 1))


def _monic_from_system(system: OrthoSystem, d: int, basis: Sequence[Poly], params: object, n: Sequence[int]) -> Poly:
    if d == 0:
        return Poly.const(1)
    augmented = [list(row[:d]) + [-row[d]] for row in system.matrix]
    coeffs = bareiss_solve(augmented)
    if coeffs is None:
        raise NormalityError(params, n)
    out = basis[d]
    for c, b in zip(coeffs, basis):
        out = out + b.scale(c)
    return out.monic()


@lru_cache(maxsize=4096)
def solve_type2_q(params: KravchukParams, n: Sequence[int]) -> Poly:
    n = _check(params, n)
    d = n.norm
    basis = [q_stirling_poly(params.ctx, j) for j in range(d + 1)]
    return _monic_from_system(orthosystem_q(params, n), d, basis, params, n)


@lru_cache(maxsize=4096)
def solve_type2_classical(params: ClassicalParams, n: Sequence[int]) -> Poly:
    n = _check(params, n)
    d = n.norm
    basis = [Poly((0,) * j + (1,)) for j in range(d + 1)]
    return _monic_from_system(orthosystem_classical(params, n), d, basis, params, n)


def orthogonality_residuals(params: KravchukParams, n: Sequence[int], K: Poly) -> list[Fraction]:
    n = _check(params, n)
    return [inner_sum_q(params, i, K, k) for i in range(1, params.r + 1) for k in range(n[i - 1])]


def orthogonality_residuals_classical(params: ClassicalParams, n: Sequence[int], K: Poly) -> list[Fraction]:
    n = _check(params, n)
    out = []
    for i in range(1, params.r + 1):
        for k in range(n[i - 1]):
            test = falling_test_poly(k)
            out.append(
                sum((K(x) * test(x) * classical_weight(params, i, x) for x in range(params.N + 1)), Fraction(0))
            )
    return out


def normality_check(params: KravchukParams | ClassicalParams, n: Sequence[int]) -> bool:
    n = _check(params, n)
    d = n.norm
    if d == 0:
        return True
    system = orthosystem_q(params, n) if isinstance(params, KravchukParams) else orthosystem_classical(params, n)
    return bareiss_determinant([row[:d] for row in system.matrix]) != 0
