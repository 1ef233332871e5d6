from fractions import Fraction as F

import pytest
from hypothesis import given, seed
from hypothesis import strategies as st

from qortho.qlattice import QContext, delta_x_half, lattice_x
from qortho.weights import (
    ClassicalParams,
    KravchukParams,
    classical_weight,
    measure_mass,
    omega_weight,
    pearson_ratio,
    predicted_non_normal,
    q_power_relations,
    q_weight,
    validate,
)

P_VALUES = (F(1, 5), F(1, 3), F(1, 2), F(2, 3))
V_VALUES = (F(4, 5), F(5, 4), F(2))


def test_trivial_weight():
    assert q_weight(KravchukParams.canonical(F(2), [F(1, 3)], 0), 1, 0) == 1


def test_outside_support_rejected():
    params = KravchukParams.canonical(F(2), [F(1, 3)], 3)
    for s in (-1, 4):
        with pytest.raises(ValueError):
            q_weight(params, 1, s)


def test_ratio_chain_example():
    # v=2, p=1/3, beta=2/3, N=2, s=1, built from the s=0 value by the closed-form ratio.
    params = KravchukParams.canonical(F(2), [F(1, 3)], 2)
    q = params.ctx.q
    start = q_weight(params, 1, 0)
    assert start == F(5, 2) * F(4, 9) / 5  # [2]! beta^2 / Gamma_q(3)
    expected = start * (F(1, 3) / (q * F(2, 3))) * (lattice_x(params.ctx, 3) - lattice_x(params.ctx, 1)) / 1
    assert q_weight(params, 1, 1) == expected


@pytest.mark.parametrize("v", V_VALUES)
@pytest.mark.parametrize("p", P_VALUES)
def test_single_measure_matches_omega(v, p):
    ctx = QContext(v)
    for N in range(7):
        params = KravchukParams.canonical(v, [p], N)
        for s in range(N + 1):
            assert q_weight(params, 1, s) == omega_weight(ctx, p, N, s)
            assert measure_mass(params, 1, s) == omega_weight(ctx, p, N, s) * delta_x_half(ctx, s)


@seed(20261018)
@given(
    st.sampled_from(V_VALUES + (F(1, 2), F(7, 3))),
    st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50),
    st.fractions(min_value=F(1, 20), max_value=5, max_denominator=20),
    st.integers(min_value=1, max_value=9),
)
def test_pearson_ratio_matches_quotient(v, p, beta, N):
    params = KravchukParams(QContext(v), (p,), (beta,), N)
    for s in range(1, N + 1):
        assert q_weight(params, 1, s) == q_weight(params, 1, s - 1) * pearson_ratio(params, 1, s)


def test_pearson_examples():
    params = KravchukParams.canonical(F(2), [F(1, 3)], 3)
    ctx, q = params.ctx, params.ctx.q
    assert pearson_ratio(params, 1, 2) == q_weight(params, 1, 2) / q_weight(params, 1, 1)
    top = F(1, 3) / (q * F(2, 3)) * (lattice_x(ctx, 4) - lattice_x(ctx, 3)) / lattice_x(ctx, 3)
    assert pearson_ratio(params, 1, 3) == top
    with pytest.raises(ValueError):
        pearson_ratio(params, 1, 0)


def test_pearson_classical_limit():
    p, N, s = F(1, 3), 5, 2
    target = p / (1 - p) * F(N + 1 - s, s)
    gaps = []
    for k in range(4, 9):
        params = KravchukParams.canonical(1 + F(1, 2**k), [p], N)
        gaps.append(abs(pearson_ratio(params, 1, s) - target))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < F(1, 20)


def test_weights_positive_and_mass():
    params = KravchukParams(QContext(F(2)), (F(1, 3), F(1, 2)), (F(2, 3), F(1, 2)), 4)
    assert measure_mass(KravchukParams.canonical(F(2), [F(1, 3)], 0), 1, 0) == F(1, 2)
    for i in (1, 2):
        masses = [measure_mass(params, i, s) for s in range(5)]
        assert all(m > 0 for m in masses) and sum(masses) > 0


def test_normalized_weight_tends_to_binomial():
    p, N = F(1, 3), 4
    cparams = ClassicalParams((p,), N)
    gaps = []
    for k in range(3, 8):
        params = KravchukParams.canonical(1 + F(1, 2**k), [p], N)
        values = [q_weight(params, 1, s) for s in range(N + 1)]
        total = sum(values)
        gaps.append(max(abs(w / total - classical_weight(cparams, 1, s)) for s, w in enumerate(values)))
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    assert all(F(3, 2) < r < F(5, 2) for r in ratios[-2:])


class TestClassical:
    def test_examples(self):
        assert [classical_weight(ClassicalParams((F(1, 3),), 1), 1, x) for x in (0, 1)] == [F(2, 3), F(1, 3)]
        assert [classical_weight(ClassicalParams((F(1, 2),), 2), 1, x) for x in range(3)] == [F(1, 4), F(1, 2), F(1, 4)]

    @pytest.mark.parametrize("N", range(9))
    def test_sums_to_one(self, N):
        params = ClassicalParams((F(2, 7),), N)
        assert sum(classical_weight(params, 1, x) for x in range(N + 1)) == 1

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            classical_weight(ClassicalParams((F(1, 2),), 2), 1, 3)


class TestValidate:
    def test_duplicate_p(self):
        report = validate(KravchukParams.canonical(F(2), [F(1, 3), F(1, 3)], 3))
        assert not report.ok and any("distinct" in v for v in report.violations)

    def test_v_one(self):
        params = KravchukParams.canonical(F(2), [F(1, 3)], 3)
        object.__setattr__(params.ctx, "v", F(1))
        assert not validate(params).ok

    def test_valid(self):
        report = validate(KravchukParams.canonical(F(2), [F(1, 3), F(1, 2)], 3))
        assert report.ok and report.violations == []

    @pytest.mark.parametrize("p", [F(0), F(1), F(3, 2)])
    def test_p_range(self, p):
        assert not validate(ClassicalParams((p,), 3)).ok

    def test_q_power_warning(self):
        params = KravchukParams.canonical(F(2), [F(1, 5), F(1, 2)], 5)
        report = validate(params)
        assert report.ok and len(report.warnings) == 1
        assert q_power_relations(params) == [(2, 1, 1)]
        assert predicted_non_normal(params, (2, 1))
        assert not predicted_non_normal(params, (1, 2))

    def test_no_warning_for_generic_v(self):
        assert validate(KravchukParams.canonical(F(5, 4), [F(1, 5), F(1, 2)], 5)).warnings == []
