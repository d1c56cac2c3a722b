"""Verification-suite machinery tests (small, fast configurations)."""

import random

import pytest

from kahlerstar.expressions import eval_value, parse, to_source
from kahlerstar.geometry import build_chart
from kahlerstar.operators import StarVariant
from kahlerstar.verify import (
    CheckResult,
    RandomChartSpec,
    check_associativity,
    check_covariance,
    check_finite_differences,
    check_flat_vanishing,
    check_gauge,
    check_oracle_agreement,
    check_prop1,
    check_separation,
    check_structural,
    random_chart,
    random_polynomial,
    random_potential,
)

FS = "log(1+z1*zb1)"


def test_check_result_pass_rule():
    assert CheckResult("x", 1e-9, 1e-8, "").passed
    assert not CheckResult("x", 2e-8, 1e-8, "").passed
    assert CheckResult("x", 0.0, 0.0, "").passed


def test_random_potential_epsilon_zero_is_flat():
    spec = RandomChartSpec(n=2, epsilon=0.0, seed=5)
    potential = random_potential(spec)
    flat = parse("z1*zb1+z2*zb2", 2)
    # every perturbation term carries a zero coefficient; values agree exactly
    rng = random.Random(1)
    for _ in range(5):
        z = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(2)]
        zb = [v.conjugate() for v in z]
        assert eval_value(potential, z, zb) == eval_value(flat, z, zb)


def test_random_potential_deterministic():
    spec = RandomChartSpec(n=1, degree=3, epsilon=0.1, seed=42)
    assert random_potential(spec) == random_potential(spec)
    assert to_source(random_potential(spec)) == to_source(random_potential(spec))


def test_random_potential_seed42_metric_bound():
    spec = RandomChartSpec(n=1, degree=3, epsilon=0.1, seed=42)
    _, ctx, _ = random_chart(spec)
    g00 = ctx.g_dn[0][0].value()
    assert 0.5 <= abs(g00) <= 1.5


def test_random_potential_is_real_on_diagonal():
    spec = RandomChartSpec(n=2, degree=2, epsilon=0.2, seed=9)
    potential = random_potential(spec)
    rng = random.Random(2)
    for _ in range(5):
        z = [complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)) for _ in range(2)]
        zb = [v.conjugate() for v in z]
        value = eval_value(potential, z, zb)
        assert abs(value.imag) < 1e-14


def test_associativity_on_presets():
    ctx = build_chart(FS, (0.3 + 0.1j,), order=10)
    rng = random.Random(3)
    f = random_polynomial(rng, 1, 2)
    g = random_polynomial(rng, 1, 2)
    h = random_polynomial(rng, 1, 2)
    for variant in StarVariant:
        for result in check_associativity(ctx, variant, f, g, h):
            assert result.passed, result


def test_associativity_needs_jet_order():
    ctx = build_chart(FS, (0.0,), order=8)
    with pytest.raises(ValueError):
        check_associativity(ctx, StarVariant.STANDARD, "zb1", "z1*zb1", "z1")


def test_separation_checks_pass():
    ctx = build_chart(FS, (0.4,), order=10)
    rng = random.Random(4)
    results = check_separation(
        ctx,
        random_polynomial(rng, 1, kind="holomorphic"),
        random_polynomial(rng, 1),
        random_polynomial(rng, 1, kind="antiholomorphic"),
    )
    assert len(results) == 8
    for result in results:
        assert result.residual == 0.0


def test_prop1_structural_flat_exact():
    ctx = build_chart("z1*zb1+z2*zb2", (0.2, -0.3 + 0.1j), order=10)
    rng = random.Random(6)
    f = random_polynomial(rng, 2, 2)
    g = random_polynomial(rng, 2, 2)
    for result in check_prop1(ctx, f, g):
        assert result.residual == 0.0
    flat = check_flat_vanishing(ctx, f, g)
    assert flat.residual == 0.0 and flat.tolerance == 0.0
    for result in check_structural(ctx, f, g):
        assert result.passed, result


def test_prop1_fubini_study():
    ctx = build_chart(FS, (0.7,), order=10)
    for result in check_prop1(ctx, "zb1^2+z1*zb1", "z1^3"):
        assert result.residual <= 1e-10, result


def test_gauge_check():
    ctx = build_chart(FS, (0.2,), order=10)
    result = check_gauge(
        parse(FS, 1), parse("z1^3", 1), parse("zb1^3", 1), ctx, "zb1^2", "z1^2+z1*zb1"
    )
    assert result.passed, result
    with pytest.raises(ValueError):
        check_gauge(parse(FS, 1), parse("zb1", 1), parse("zb1", 1), ctx, "zb1", "z1")


def test_covariance_identity_and_affine():
    identity = check_covariance("z1*zb1", ["z1"], ["z1"], (0.4,), "zb1^2", "z1^2")
    assert identity.residual <= 1e-12
    affine = check_covariance("z1*zb1", ["2*z1"], ["0.5*z1"], (0.4,), "zb1^2", "z1^2")
    assert affine.residual <= 1e-10


def test_covariance_moebius():
    result = check_covariance(
        FS, ["z1/(1-z1)"], ["z1/(1+z1)"], (0.3,), "zb1^2+z1*zb1", "z1^2+z1"
    )
    assert result.residual <= 1e-7, result


def test_covariance_rejects_non_inverse():
    with pytest.raises(ValueError):
        check_covariance("z1*zb1", ["2*z1"], ["z1"], (0.4,), "zb1", "z1")


def test_oracle_agreement_trials():
    results = check_oracle_agreement(RandomChartSpec(n=1, seed=11), trials=2)
    assert len(results) == 6
    for result in results:
        assert result.passed, result


def test_finite_differences_on_presets():
    for potential, point in [("z1*zb1", (0.5,)), (FS, (0.3 + 0.2j,)), ("-(log(1-z1*zb1))", (0.2,))]:
        result = check_finite_differences(potential, point)
        assert result.passed, result
