"""Jet ring and analytic-operation tests."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerstar.jets import (
    Jet,
    iter_multi_indices_upto,
    jet_matrix_inverse,
    multi_binomial,
    solve_linear_system,
)


def jet_of(n, trunc, entries):
    return Jet(n, trunc, {tuple(k): v for k, v in entries.items()})


def test_product_of_linear_factors():
    # (1 + z) * (1 + zb) at n=1, J=2
    a = jet_of(1, 2, {(0, 0): 1, (1, 0): 1})
    b = jet_of(1, 2, {(0, 0): 1, (0, 1): 1})
    p = a * b
    assert p.coeff((0,), (0,)) == 1
    assert p.coeff((1,), (0,)) == 1
    assert p.coeff((0,), (1,)) == 1
    assert p.coeff((1,), (1,)) == 1


def test_multiplicative_identity():
    rng = random.Random(7)
    a = _random_jet(rng, n=2, trunc=3)
    one = Jet.constant(1.0, 2, 3)
    assert (a * one - a).max_abs() == 0.0


def test_truncation_forces_zero():
    # (z*zb) * (z*zb) at J=3 drops the degree-4 term entirely
    zzb = jet_of(1, 3, {(1, 1): 1})
    assert (zzb * zzb).coeffs == {}


def test_incompatible_jets_raise():
    a = Jet.constant(1.0, 1, 3)
    b = Jet.constant(1.0, 1, 4)
    c = Jet.constant(1.0, 2, 3)
    with pytest.raises(ValueError):
        a * b
    with pytest.raises(ValueError):
        a * c
    with pytest.raises(ValueError):
        a + b


def test_reciprocal_geometric_series():
    a = jet_of(1, 4, {(0, 0): 1, (1, 1): 1})  # 1 + z*zb
    r = a.reciprocal()
    assert r.coeff((0,), (0,)) == pytest.approx(1)
    assert r.coeff((1,), (1,)) == pytest.approx(-1)
    assert r.coeff((2,), (2,)) == pytest.approx(1)


def test_reciprocal_of_constant():
    assert Jet.constant(2.0, 1, 5).reciprocal().value() == pytest.approx(0.5)


def test_reciprocal_defining_property():
    rng = random.Random(3)
    for _ in range(10):
        a = _random_jet(rng, n=1, trunc=5, unit_constant=True)
        prod = a * a.reciprocal()
        assert (prod - 1.0).max_abs() < 1e-12


def test_reciprocal_requires_nonzero_value():
    with pytest.raises(ArithmeticError):
        jet_of(1, 3, {(1, 0): 1}).reciprocal()


def test_log_series():
    a = jet_of(1, 6, {(0, 0): 1, (1, 1): 1})  # 1 + z*zb
    lg = a.log()
    assert lg.coeff((1,), (1,)) == pytest.approx(1)
    assert lg.coeff((2,), (2,)) == pytest.approx(-0.5)
    assert lg.coeff((3,), (3,)) == pytest.approx(1 / 3)


def test_exp_series():
    z = Jet.coordinate(1, 3, 0, 0.0)
    e = z.exp()
    assert e.coeff((3,), (0,)) == pytest.approx(1 / 6)


def test_exp_log_roundtrip():
    rng = random.Random(11)
    for _ in range(10):
        a = _random_jet(rng, n=2, trunc=4, unit_constant=True)
        back = a.log().exp()
        assert (back - a).max_abs() < 1e-12


def test_log_branch_cut_rejected():
    with pytest.raises(ArithmeticError):
        Jet.constant(-1.0, 1, 3).log()
    with pytest.raises(ArithmeticError):
        Jet.constant(0.0, 1, 3).log()


def test_derivative_extraction():
    # jet of z^2 * zb
    a = jet_of(1, 4, {(2, 1): 1})
    assert a.derivative_at((2,), (1,)) == pytest.approx(2.0)  # 2! * 1! * 1
    assert a.derivative_at((0,), (0,)) == 0.0

    lg = jet_of(1, 6, {(0, 0): 1, (1, 1): 1}).log()
    assert lg.derivative_at((2,), (2,)) == pytest.approx(-2.0)


def test_derivative_extraction_order_limit():
    a = Jet.constant(1.0, 1, 2)
    with pytest.raises(ValueError):
        a.derivative_at((2,), (1,))


def test_integer_powers():
    a = jet_of(1, 4, {(0, 0): 2, (1, 0): 1})  # 2 + z
    assert ((a**3) - a * a * a).max_abs() < 1e-12
    assert ((a**-2) * a * a - 1.0).max_abs() < 1e-13
    assert (a**0 - 1.0).max_abs() == 0.0


# -- ring axioms (property-based) -------------------------------------------


def _coeff_dict(n, trunc, values):
    keys = list(iter_multi_indices_upto(2 * n, trunc))
    keys = [k for k in keys if len(k) == 2 * n]
    return {k: v for k, v in zip(keys, values)}


@st.composite
def jets(draw, n=1, trunc=3):
    keys = [k for k in iter_multi_indices_upto(2 * n, trunc)]
    values = draw(
        st.lists(
            st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False),
            min_size=len(keys),
            max_size=len(keys),
        )
    )
    return Jet(n, trunc, dict(zip(keys, values)))


@settings(max_examples=60, deadline=None)
@given(jets(), jets(), jets())
def test_ring_axioms(a, b, c):
    scale = max(a.max_abs(), b.max_abs(), c.max_abs(), 1.0)
    tol = 1e-10 * scale**3
    assert ((a * b) - (b * a)).max_abs() <= tol
    assert ((a * b) * c - a * (b * c)).max_abs() <= tol
    assert (a * (b + c) - (a * b + a * c)).max_abs() <= tol


@settings(max_examples=40, deadline=None)
@given(jets(n=2, trunc=2), jets(n=2, trunc=2))
def test_leibniz_convolution(a, b):
    prod = a * b
    n, trunc = a.n, a.trunc
    for alpha in iter_multi_indices_upto(n, trunc):
        for beta in iter_multi_indices_upto(n, trunc - sum(alpha)):
            expected = 0j
            for a1 in iter_multi_indices_upto(n, sum(alpha)):
                if any(x > y for x, y in zip(a1, alpha)):
                    continue
                a2 = tuple(x - y for x, y in zip(alpha, a1))
                for b1 in iter_multi_indices_upto(n, sum(beta)):
                    if any(x > y for x, y in zip(b1, beta)):
                        continue
                    b2 = tuple(x - y for x, y in zip(beta, b1))
                    expected += (
                        multi_binomial(alpha, a1)
                        * multi_binomial(beta, b1)
                        * a.derivative_at(a1, b1)
                        * b.derivative_at(a2, b2)
                    )
            got = prod.derivative_at(alpha, beta)
            scale = max(1.0, abs(expected))
            assert abs(got - expected) <= 1e-9 * scale


def _random_jet(rng, n, trunc, unit_constant=False):
    coeffs = {}
    for key in iter_multi_indices_upto(2 * n, trunc):
        if len(key) != 2 * n:
            continue
        coeffs[key] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * 0.4
    if unit_constant:
        coeffs[(0,) * (2 * n)] = 1.0 + 0j
    return Jet(n, trunc, coeffs)


def test_truncation_coherence():
    rng = random.Random(5)
    for _ in range(5):
        a = _random_jet(rng, n=2, trunc=4, unit_constant=True)
        b = _random_jet(rng, n=2, trunc=4)
        al, bl = a.truncated(3), b.truncated(3)
        assert (a * b).truncated(3) == al * bl
        assert a.reciprocal().truncated(3) == al.reciprocal()
        assert a.log().truncated(3) == al.log()
        assert b.exp().truncated(3) == bl.exp()


# -- linear solver -----------------------------------------------------------


def test_solve_linear_system_roundtrip():
    rng = random.Random(13)
    n, trunc = 2, 4
    matrix = [[_random_jet(rng, n, trunc) for _ in range(2)] for _ in range(2)]
    # keep the constant term well-conditioned
    matrix[0][0] = matrix[0][0] + 3.0
    matrix[1][1] = matrix[1][1] + 3.0
    rhs = [_random_jet(rng, n, trunc) for _ in range(2)]
    x = solve_linear_system(matrix, rhs)
    for i in range(2):
        lhs = matrix[i][0] * x[0] + matrix[i][1] * x[1]
        assert (lhs - rhs[i]).max_abs() < 1e-11


def test_jet_matrix_inverse():
    rng = random.Random(17)
    n, trunc = 2, 4
    matrix = [[_random_jet(rng, n, trunc) for _ in range(2)] for _ in range(2)]
    matrix[0][0] = matrix[0][0] + 2.0
    matrix[1][1] = matrix[1][1] + 2.0
    inv = jet_matrix_inverse(matrix)
    for k in range(2):
        for m in range(2):
            prod = matrix[k][0] * inv[0][m] + matrix[k][1] * inv[1][m]
            target = 1.0 if k == m else 0.0
            assert (prod - target).max_abs() < 1e-11


def test_singular_system_rejected():
    one = Jet.constant(1.0, 1, 2)
    zero = Jet.zero(1, 2)
    with pytest.raises(ArithmeticError):
        solve_linear_system([[zero, zero], [zero, zero]], [one, one])
