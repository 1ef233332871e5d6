"""Named verification checks shared by the CLI and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .analysis import cauchy_bound, has_simple_roots, positive_root_count
from .operators import (
    CONVENTIONS,
    classical_diffeq_residual,
    classical_raising_apply,
    diffeq_residual_q,
    hypergeometric_data_r1,
    hypergeometric_residual,
    lowering_expansion,
    lowering_identity_check,
    raising_identity_residual,
    recurrence_residual,
)
from .qlattice import Poly
from .rodrigues import RodriguesTranscriptionError, rodrigues_classical, rodrigues_q
from .solver import (
    MultiIndex,
    NormalityError,
    orthogonality_residuals,
    orthogonality_residuals_classical,
    solve_type2_classical,
    solve_type2_q,
)
from .weights import ClassicalParams, KravchukParams

CHECK_NAMES = ("orthogonality", "rodrigues", "raising", "lowering", "diffeq", "hypergeometric", "recurrence", "zeros")

PASS, FAIL, TRIVIAL, NA, ERROR = "pass", "fail", "trivially satisfied", "not applicable", "error"


@dataclass
class CheckResult:
    name: str
    status: str
    residual_norm: Fraction | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status in (FAIL, ERROR)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "residual_norm": None if self.residual_norm is None else str(self.residual_norm),
            "detail": _jsonable(self.detail),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Poly):
        return value.to_strings()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def poly_norm(p: Poly) -> Fraction:
    return max((abs(c) for c in p.coeffs), default=Fraction(0))


def _vector_norm(values: Sequence[Fraction]) -> Fraction:
    return max((abs(c) for c in values), default=Fraction(0))


def _from_norm(name: str, norm: Fraction, **detail: Any) -> CheckResult:
    return CheckResult(name, PASS if norm == 0 else FAIL, norm, detail)


def _guard(name: str, fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except (NormalityError, RodriguesTranscriptionError, ZeroDivisionError, ValueError) as exc:
        return CheckResult(name, ERROR, None, {"error": f"{type(exc).__name__}: {exc}"})


# -- q-family -----------------------------------------------------------------


def orthogonality_q(params: KravchukParams, n: Sequence[int], K: Poly | None = None) -> CheckResult:
    n = MultiIndex(n)
    if n.norm == 0 and K is None:
        return CheckResult("orthogonality", TRIVIAL, Fraction(0))

    def run() -> CheckResult:
        poly = solve_type2_q(params, n) if K is None else K
        res = orthogonality_residuals(params, n, poly)
        return _from_norm("orthogonality", _vector_norm(res), residuals=res)

    return _guard("orthogonality", run)


def rodrigues_check_q(params: KravchukParams, n: Sequence[int], form: str = "literal") -> CheckResult:
    n = MultiIndex(n)

    def run() -> CheckResult:
        result = rodrigues_q(params, n, form)
        diff = result.poly - solve_type2_q(params, n)
        return _from_norm(
            "rodrigues", poly_norm(diff), form=form, raw_leading=result.raw_leading, raw_leading_is_one=result.raw_leading == 1
        )

    return _guard("rodrigues", run)


def raising_check_q(params: KravchukParams, n: Sequence[int], form: str = "literal") -> CheckResult:
    n = MultiIndex(n)

    def run() -> CheckResult:
        norms = {i: poly_norm(raising_identity_residual(params, n, i, form)) for i in range(1, params.r + 1)}
        return _from_norm("raising", max(norms.values()), form=form, per_component=norms)

    return _guard("raising", run)


def lowering_check_q(params: KravchukParams, n: Sequence[int], form: str = "literal") -> CheckResult:
    """``literal``: the stated expansion with its coefficients.  ``corrected``: membership of ΔK
    in the span of the corrected family, with the exact coordinates reported."""
    n = MultiIndex(n)
    if n.norm == 0:
        return CheckResult("lowering", TRIVIAL, Fraction(0))

    def run() -> CheckResult:
        if form == "literal":
            return _from_norm("lowering", poly_norm(lowering_identity_check(params, n, "literal")), form=form)
        exp = lowering_expansion(params, n, "corrected")
        return _from_norm("lowering", poly_norm(exp.residual), form=form, coordinates=list(exp.coefficients))

    return _guard("lowering", run)


def diffeq_check_q(params: KravchukParams, n: Sequence[int], conventions: Sequence[str] = CONVENTIONS) -> CheckResult:
    n = MultiIndex(n)
    if n.norm == 0:
        return CheckResult("diffeq", TRIVIAL, Fraction(0), {"adjudicated": list(conventions)})

    def run() -> CheckResult:
        norms = {c: diffeq_residual_q(params, n, c).norm() for c in conventions}
        zero = [c for c, v in norms.items() if v == 0]
        best = min(norms.values())
        return CheckResult("diffeq", PASS if zero else FAIL, best, {"per_convention": norms, "adjudicated": zero})

    return _guard("diffeq", run)


def hypergeometric_check_q(params: KravchukParams, n: Sequence[int], form: str = "literal") -> CheckResult:
    n = MultiIndex(n)
    if params.r != 1:
        return CheckResult("hypergeometric", NA, detail={"reason": "defined for a single measure only"})

    def run() -> CheckResult:
        K = solve_type2_q(params, n)
        data = hypergeometric_data_r1(params.ctx, params.p[0], params.N, n[0], form)
        res = hypergeometric_residual(params.ctx, data, K)
        return _from_norm("hypergeometric", res.max_abs(), form=form, lambda_n=data.lambda_n)

    return _guard("hypergeometric", run)


def zeros_check(K: Poly, degree: int) -> CheckResult:
    if degree == 0:
        return CheckResult("zeros", TRIVIAL, Fraction(0), {"count": 0})
    count = positive_root_count(K)
    simple = has_simple_roots(K)
    ok = count == degree and simple
    return CheckResult(
        "zeros", PASS if ok else FAIL, Fraction(abs(count - degree)),
        {"count_in_(0,bound)": count, "expected": degree, "simple": simple, "bound": cauchy_bound(K)},
    )


def zeros_check_q(params: KravchukParams, n: Sequence[int], K: Poly | None = None) -> CheckResult:
    n = MultiIndex(n)
    return _guard("zeros", lambda: zeros_check(solve_type2_q(params, n) if K is None else K, n.norm))


# -- classical family ---------------------------------------------------------


def orthogonality_classical(params: ClassicalParams, n: Sequence[int], K: Poly | None = None) -> CheckResult:
    n = MultiIndex(n)
    if n.norm == 0 and K is None:
        return CheckResult("orthogonality", TRIVIAL, Fraction(0))

    def run() -> CheckResult:
        poly = solve_type2_classical(params, n) if K is None else K
        res = orthogonality_residuals_classical(params, n, poly)
        return _from_norm("orthogonality", _vector_norm(res), residuals=res)

    return _guard("orthogonality", run)


def rodrigues_check_classical(params: ClassicalParams, n: Sequence[int]) -> CheckResult:
    def run() -> CheckResult:
        result = rodrigues_classical(params, n)
        diff = result.poly - solve_type2_classical(params, n)
        return _from_norm("rodrigues", poly_norm(diff), raw_leading=result.raw_leading)

    return _guard("rodrigues", run)


def raising_check_classical(params: ClassicalParams, n: Sequence[int]) -> CheckResult:
    n = MultiIndex(n)

    def run() -> CheckResult:
        K = solve_type2_classical(params, n)
        raised = params.with_N(params.N + 1)
        norms = {
            i: poly_norm(classical_raising_apply(params.p[i - 1], params.N, K) + solve_type2_classical(raised, n.shifted(i)))
            for i in range(1, params.r + 1)
        }
        return _from_norm("raising", max(norms.values()), per_component=norms)

    return _guard("raising", run)


def diffeq_check_classical(params: ClassicalParams, n: Sequence[int], form: str = "literal") -> CheckResult:
    n = MultiIndex(n)
    if n.norm == 0:
        return CheckResult("diffeq", TRIVIAL, Fraction(0), {"form": form})
    return _guard("diffeq", lambda: _from_norm("diffeq", classical_diffeq_residual(params, n, form).norm(), form=form))


def recurrence_check_classical(params: ClassicalParams, n: Sequence[int]) -> CheckResult:
    n = MultiIndex(n)
    if n.norm + 1 > params.N:
        return CheckResult("recurrence", NA, detail={"reason": "needs |n| + 1 ≤ N"})

    def run() -> CheckResult:
        norms = {k: poly_norm(recurrence_residual(params, n, k)) for k in range(1, params.r + 1)}
        return _from_norm("recurrence", max(norms.values()), per_direction=norms)

    return _guard("recurrence", run)


def zeros_check_classical(params: ClassicalParams, n: Sequence[int], K: Poly | None = None) -> CheckResult:
    n = MultiIndex(n)
    return _guard("zeros", lambda: zeros_check(solve_type2_classical(params, n) if K is None else K, n.norm))


# -- dispatch -----------------------------------------------------------------


def run_check(
    name: str,
    params: KravchukParams | ClassicalParams,
    n: Sequence[int],
    form: str = "literal",
    conventions: Sequence[str] = CONVENTIONS,
    K: Poly | None = None,
) -> CheckResult:
    """Run one named check; ``K`` overrides the solved polynomial where that makes sense."""
    if name not in CHECK_NAMES:
        raise ValueError(f"unknown check {name!r}; expected one of {CHECK_NAMES}")
    n = MultiIndex(n)
    if isinstance(params, KravchukParams):
        table: dict[str, Callable[[], CheckResult]] = {
            "orthogonality": lambda: orthogonality_q(params, n, K),
            "rodrigues": lambda: rodrigues_check_q(params, n, form),
            "raising": lambda: raising_check_q(params, n, form),
            "lowering": lambda: lowering_check_q(params, n, form),
            "diffeq": lambda: diffeq_check_q(params, n, conventions),
            "hypergeometric": lambda: hypergeometric_check_q(params, n, form),
            "recurrence": lambda: CheckResult("recurrence", NA, detail={"reason": "classical family only"}),
            "zeros": lambda: zeros_check_q(params, n, K),
        }
    else:
        table = {
            "orthogonality": lambda: orthogonality_classical(params, n, K),
            "rodrigues": lambda: rodrigues_check_classical(params, n),
            "raising": lambda: raising_check_classical(params, n),
            "lowering": lambda: CheckResult("lowering", NA, detail={"reason": "q-family only"}),
            "diffeq": lambda: diffeq_check_classical(params, n, form),
            "hypergeometric": lambda: CheckResult("hypergeometric", NA, detail={"reason": "q-family only"}),
            "recurrence": lambda: recurrence_check_classical(params, n),
            "zeros": lambda: zeros_check_classical(params, n, K),
        }
    return table[name]()
