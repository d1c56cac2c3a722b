"""Parser, printer, evaluation and substitution tests."""

import random

import pytest

from kahlerstar.expressions import (
    Add,
    Div,
    EvaluationError,
    Exp,
    ExpressionError,
    HolomorphyClass,
    Literal,
    Log,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    classify,
    eval_jet,
    eval_value,
    formal_conjugate,
    parse,
    parse_complex,
    substitute,
    to_source,
)


def test_parse_product_of_variables():
    ast = parse("z1*zb1", 1)
    assert ast == Mul(Var(1, False), Var(1, True))


def test_parse_log_over_sum():
    ast = parse("log(1+z1*zb1)", 1)
    assert ast == Log(Add(Literal(1.0 + 0j), Mul(Var(1, False), Var(1, True))))


def test_variable_index_out_of_range():
    with pytest.raises(ExpressionError) as err:
        parse("z3", 2)
    assert "out of range" in str(err.value)


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionError) as err:
        parse("z1 + * z2", 2)
    assert err.value.position == 5


def test_unbalanced_parenthesis():
    with pytest.raises(ExpressionError):
        parse("log(1+z1*zb1", 1)


def test_complex_literals():
    assert parse("2.5", 0) == Literal(2.5 + 0j)
    assert parse("0.5i", 0) == Literal(0.5j)
    assert parse("1+2i", 0) == Literal(1 + 2j)
    assert parse("i", 0) == Literal(1j)
    # unary minus binds loosest
    assert parse_complex("-0.5+0.2i") == -0.5 - 0.2j
    assert parse_complex("0.2i-0.5") == -0.5 + 0.2j


def test_integer_powers_only():
    assert parse("z1^3", 1) == Pow(Var(1, False), 3)
    assert parse("z1^-2", 1) == Pow(Var(1, False), -2)
    with pytest.raises(ExpressionError):
        parse("z1^1.5", 1)


def test_eval_monomial_at_origin():
    jet = eval_jet(parse("z1*zb1", 1), (0,), (0,), 2)
    assert jet.coeffs == {(1, 1): 1.0 + 0j}


def test_eval_log_series():
    jet = eval_jet(parse("log(1+z1*zb1)", 1), (0,), (0,), 4)
    assert jet.coeff((1,), (1,)) == pytest.approx(1.0)
    assert jet.coeff((2,), (2,)) == pytest.approx(-0.5)


def test_eval_pole_raises():
    with pytest.raises(EvaluationError):
        eval_jet(parse("1/z1", 1), (0,), (0,), 3)


def test_eval_branch_violation():
    with pytest.raises(EvaluationError):
        eval_jet(parse("log(z1-1)", 1), (0,), (0,), 3)


def test_substitute_moebius():
    e = parse("z1*zb1", 1)
    repl = [parse("z1/(1+z1)", 1), parse("zb1/(1+zb1)", 1)]
    composed = substitute(e, repl)
    expected = parse("(z1/(1+z1))*(zb1/(1+zb1))", 1)
    assert composed == expected


def test_substitute_identity():
    e = parse("log(1+z1*zb1)", 1)
    assert substitute(e, [Var(1, False), Var(1, True)]) == e


def test_substitute_log_exp_inverse():
    e = substitute(parse("log(z1)", 1), [Exp(Var(1, False)), Var(1, True)])
    assert e == Log(Exp(Var(1, False)))
    jet = eval_jet(e, (0,), (0,), 5)
    w = eval_jet(Var(1, False), (0,), (0,), 5)
    assert (jet - w).max_abs() < 1e-12


def test_substitute_arity_mismatch():
    with pytest.raises(ValueError):
        substitute(parse("z2", 2), [Var(1, False), Var(1, True)])


def test_substitution_matches_hand_composition():
    rng = random.Random(23)
    e = parse("z1^2*zb1 + 3*z1 - zb1^2", 1)
    m = [parse("z1+z1^2", 1), parse("zb1-1", 1)]
    composed = substitute(e, m)
    for _ in range(5):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        zb = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        inner_z = eval_value(m[0], (z,), (zb,))
        inner_zb = eval_value(m[1], (z,), (zb,))
        direct = eval_value(e, (inner_z,), (inner_zb,))
        via_subst = eval_value(composed, (z,), (zb,))
        assert abs(direct - via_subst) < 1e-12


def test_classify():
    assert classify(parse("z1^2 + z2", 2)) is HolomorphyClass.HOLOMORPHIC
    assert classify(parse("zb1*z1", 1)) is HolomorphyClass.MIXED
    assert classify(parse("3", 1)) is HolomorphyClass.CONSTANT
    assert classify(parse("zb2^3-zb1", 2)) is HolomorphyClass.ANTIHOLOMORPHIC


def test_formal_conjugate():
    e = parse("(1+2i)*z1^2 + zb2", 2)
    c = formal_conjugate(e)
    assert c == parse("(1-2i)*zb1^2 + z2", 2)


def _random_ast(rng, n, depth):
    if depth == 0 or rng.random() < 0.3:
        choice = rng.random()
        if choice < 0.5:
            re_ = round(rng.uniform(-2, 2), 3)
            im = round(rng.uniform(-2, 2), 3) if rng.random() < 0.5 else 0.0
            return Literal(complex(re_, im))
        return Var(rng.randint(1, n), rng.random() < 0.5)
    kind = rng.randint(0, 6)
    if kind == 0:
        return Add(_random_ast(rng, n, depth - 1), _random_ast(rng, n, depth - 1))
    if kind == 1:
        return Sub(_random_ast(rng, n, depth - 1), _random_ast(rng, n, depth - 1))
    if kind == 2:
        return Mul(_random_ast(rng, n, depth - 1), _random_ast(rng, n, depth - 1))
    if kind == 3:
        return Div(_random_ast(rng, n, depth - 1), _random_ast(rng, n, depth - 1))
    if kind == 4:
        return Neg(_random_ast(rng, n, depth - 1))
    if kind == 5:
        return Pow(_random_ast(rng, n, depth - 1), rng.randint(-3, 4))
    return Exp(_random_ast(rng, n, depth - 1))


def test_print_parse_roundtrip():
    # The parser folds literal constants (1+2i, negated literals), so the
    # round trip is checked on parser-normalized trees.
    rng = random.Random(31)
    for _ in range(80):
        normalized = parse(to_source(_random_ast(rng, 2, 3)), 2)
        src = to_source(normalized)
        assert parse(src, 2) == normalized, src
