"""Property suite: every checkable identity of the construction, with residuals.

Each check returns :class:`CheckResult` records carrying the measured
residual, the tolerance it is held to and a context descriptor (preset or
seed, point, jet order).  :func:`run_suite` assembles the default suite
over the built-in presets and seeded random Hermitian polynomial charts.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, replace

from .expressions import (
    Add,
    Expr,
    HolomorphyClass,
    Literal,
    Mul,
    Pow,
    Var,
    classify,
    eval_jet,
    eval_value,
    formal_conjugate,
    parse,
    substitute,
)
from .geometry import (
    ChartContext,
    SingularMetricError,
    as_chart_jet,
    build_chart,
    curvature,
    jacobi_residual,
    metric_derivative_values,
)
from .jets import iter_multi_indices_upto
from .operators import (
    StarVariant,
    c1,
    c2,
    c2_expanded,
    c3,
    c3_tilde,
    operator_breakdown,
    star_product,
    star_product_jets,
)
from .oracle import build_left_mult

__all__ = [
    "DEFAULT_TOLERANCES",
    "CheckResult",
    "RandomChartSpec",
    "random_polynomial",
    "random_potential",
    "random_chart",
    "check_associativity",
    "check_separation",
    "check_prop1",
    "check_structural",
    "check_flat_vanishing",
    "check_gauge",
    "check_covariance",
    "check_oracle_agreement",
    "check_finite_differences",
    "run_suite",
    "preset_charts",
]

DEFAULT_TOLERANCES = {
    "oracle_agreement": 1e-8,
    "associativity": 1e-8,
    "separation": 1e-10,
    "prop1": 1e-10,
    "c3_decomposition": 1e-11,
    "c2_forms": 1e-10,
    "curvature_raising": 1e-10,
    "jacobi": 1e-10,
    "flat_vanishing": 0.0,
    "gauge": 1e-8,
    "covariance": 1e-7,
    "finite_differences": 1e-6,
}

#: preset configurations of the default suite: name, dimension, base point
SUITE_PRESETS = (
    ("flat", 1, (0.4 - 0.2j,)),
    ("flat", 2, (0.3 + 0.1j, -0.1 + 0.2j)),
    ("fubini-study", 1, (0.3 + 0.1j,)),
    ("poincare-disk", 1, (0.2 - 0.1j,)),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    context: str

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "context": self.context,
        }


@dataclass(frozen=True)
class RandomChartSpec:
    """Seeded recipe for a random Hermitian polynomial chart.

    The potential is the flat one plus an ``epsilon``-sized Hermitian
    perturbation with monomial bidegrees between 1 and ``degree``; the
    metric is required to be positive definite at the evaluation point.
    """

    n: int
    degree: int = 3
    epsilon: float = 0.1
    seed: int = 0


def _disk_coefficient(rng: random.Random) -> complex:
    return cmath.rect(math.sqrt(rng.random()), rng.uniform(0.0, 2.0 * math.pi))


def _monomial(alpha, beta) -> Expr:
    factors: list[Expr] = []
    for i, e in enumerate(alpha):
        if e == 1:
            factors.append(Var(i + 1, False))
        elif e > 1:
            factors.append(Pow(Var(i + 1, False), e))
    for i, e in enumerate(beta):
        if e == 1:
            factors.append(Var(i + 1, True))
        elif e > 1:
            factors.append(Pow(Var(i + 1, True), e))
    if not factors:
        return Literal(1.0 + 0j)
    node = factors[0]
    for f in factors[1:]:
        node = Mul(node, f)
    return node


def _sum_terms(terms) -> Expr:
    node = terms[0]
    for t in terms[1:]:
        node = Add(node, t)
    return node


def random_polynomial(rng: random.Random, n: int, degree: int = 3, kind: str = "mixed") -> Expr:
    """Random polynomial with unit-disk coefficients.

    ``kind`` restricts the variables: ``mixed`` uses bidegrees up to
    ``degree`` in each group, ``holomorphic``/``antiholomorphic`` use one
    group only (and no constant term, so the result is never degenerate).
    """
    zero = (0,) * n
    terms = []
    if kind == "mixed":
        for alpha in iter_multi_indices_upto(n, degree):
            for beta in iter_multi_indices_upto(n, degree):
                terms.append(Mul(Literal(_disk_coefficient(rng)), _monomial(alpha, beta)))
    elif kind in ("holomorphic", "antiholomorphic"):
        barred = kind == "antiholomorphic"
        for alpha in iter_multi_indices_upto(n, degree):
            if sum(alpha) == 0:
                continue
            mono = _monomial(zero, alpha) if barred else _monomial(alpha, zero)
            terms.append(Mul(Literal(_disk_coefficient(rng)), mono))
    else:
        raise ValueError(f"unknown polynomial kind {kind!r}")
    return _sum_terms(terms)


def random_potential(spec: RandomChartSpec, at=None) -> Expr:
    """Random Hermitian polynomial potential, deterministic in the seed.

    Resamples (up to 100 times) until the metric is positive definite at
    ``at`` (the origin when omitted).
    """
    rng = random.Random(spec.seed)
    n = spec.n
    at = tuple(0j for _ in range(n)) if at is None else tuple(at)
    flat_terms = [Mul(Var(k, False), Var(k, True)) for k in range(1, n + 1)]
    indices = [a for a in iter_multi_indices_upto(n, spec.degree) if sum(a) >= 1]
    for _ in range(100):
        terms = list(flat_terms)
        for alpha in indices:
            for beta in indices:
                c = _disk_coefficient(rng) * spec.epsilon
                terms.append(Mul(Literal(c), _monomial(alpha, beta)))
                terms.append(Mul(Literal(c.conjugate()), _monomial(beta, alpha)))
        candidate = _sum_terms(terms)
        try:
            build_chart(candidate, at, order=6, n=n)
        except SingularMetricError:
            continue
        return candidate
    raise SingularMetricError(
        "no positive-definite random potential found within the resample limit (100)"
    )


def random_chart(spec: RandomChartSpec, order: int = 10):
    """Chart for a :class:`RandomChartSpec`: ``(potential, context, rng)``.

    The base point is drawn from a seed-derived stream inside the square of
    half-width 0.3; the returned ``rng`` continues that stream and is meant
    for drawing test functions.
    """
    rng = random.Random(f"{spec.seed}:chart")
    point = tuple(
        complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)) for _ in range(spec.n)
    )
    potential = random_potential(spec, at=point)
    ctx = build_chart(potential, point, order=order, n=spec.n)
    return potential, ctx, rng


def _fmt_point(z0) -> str:
    return "(" + ", ".join(f"{z:.4g}" for z in z0) + ")"


# -- individual checks -----------------------------------------------------------


def check_associativity(
    ctx: ChartContext,
    variant: StarVariant,
    f,
    g,
    h,
    tol: float = DEFAULT_TOLERANCES["associativity"],
    label: str = "",
) -> list[CheckResult]:
    """Associativity residual per formal order 0..3.

    Inner products are carried as jets of order ``ctx.order - 6`` so that
    the outer operators can still differentiate them three times.
    """
    t_inner = ctx.order - 6
    if t_inner < 3:
        raise ValueError("insufficient jet order for nested star evaluation (need >= 9)")
    fj, gj, hj = (as_chart_jet(x, ctx) for x in (f, g, h))
    fg = star_product_jets(fj, gj, ctx, variant, t_inner)
    gh = star_product_jets(gj, hj, ctx, variant, t_inner)
    ft = fj.truncated(t_inner)
    ht = hj.truncated(t_inner)
    order3 = c3_tilde if variant is StarVariant.MODIFIED else c3
    ops = (
        lambda a, b: a.value() * b.value(),
        lambda a, b: c1(a, b, ctx),
        lambda a, b: c2(a, b, ctx),
        lambda a, b: order3(a, b, ctx),
    )
    results = []
    for r in range(4):
        total = 0j
        for i in range(r + 1):
            j = r - i
            total += ops[i](fg[j], ht) - ops[i](ft, gh[j])
        results.append(
            CheckResult(
                name=f"associativity_{variant.value}_order{r}",
                residual=abs(total),
                tolerance=tol,
                context=label,
            )
        )
    return results


def check_separation(
    ctx: ChartContext,
    a,
    f,
    b,
    tol: float = DEFAULT_TOLERANCES["separation"],
    label: str = "",
) -> list[CheckResult]:
    """``a * f = af`` for holomorphic ``a`` and ``f * b = bf`` for
    antiholomorphic ``b``, at every formal order 1..3 and for both
    third-order variants."""
    results = []
    left_std = star_product(a, f, ctx, StarVariant.STANDARD)
    right_std = star_product(f, b, ctx, StarVariant.STANDARD)
    for r in range(1, 4):
        results.append(
            CheckResult(f"separation_hol_order{r}", abs(left_std[r]), tol, label)
        )
        results.append(
            CheckResult(f"separation_anti_order{r}", abs(right_std[r]), tol, label)
        )
    left_mod = star_product(a, f, ctx, StarVariant.MODIFIED)
    right_mod = star_product(f, b, ctx, StarVariant.MODIFIED)
    results.append(CheckResult("separation_hol_order3_modified", abs(left_mod[3]), tol, label))
    results.append(CheckResult("separation_anti_order3_modified", abs(right_mod[3]), tol, label))
    return results


def check_prop1(
    ctx: ChartContext,
    f,
    g,
    tol: float = DEFAULT_TOLERANCES["prop1"],
    label: str = "",
) -> list[CheckResult]:
    """The two contracted metric-derivative identities behind the proof that
    the auxiliary operators agree up to regular terms, plus ``S == S~``."""
    n = ctx.n
    gu0 = [[ctx.g_up[l][k].value() for k in range(n)] for l in range(n)]
    gd0 = [[ctx.g_dn[k][l].value() for l in range(n)] for k in range(n)]
    dgu, dgu_bar = metric_derivative_values(ctx)

    first = 0.0
    for l in range(n):
        for q in range(n):
            for nn in range(n):
                for p in range(n):
                    lhs = sum(
                        gu0[nn][m] * dgu_bar[q][l][a] * dgu[m][b][p] * gd0[a][b]
                        for m in range(n)
                        for a in range(n)
                        for b in range(n)
                    )
                    rhs = sum(dgu_bar[q][l][m] * dgu[m][nn][p] for m in range(n))
                    first = max(first, abs(lhs - rhs))

    second = 0.0
    for m in range(n):
        for q in range(n):
            for p in range(n):
                for k in range(n):
                    lhs = sum(
                        gu0[nn][m] * dgu_bar[nn][q][s] * dgu[p][t][k] * gd0[s][t]
                        for nn in range(n)
                        for s in range(n)
                        for t in range(n)
                    )
                    rhs = sum(dgu_bar[nn][q][m] * dgu[p][nn][k] for nn in range(n))
                    second = max(second, abs(lhs - rhs))

    bd = operator_breakdown(f, g, ctx)
    return [
        CheckResult("prop1_first_identity", first, tol, label),
        CheckResult("prop1_second_identity", second, tol, label),
        CheckResult("prop1_s_equals_stilde", abs(bd.s - bd.s_tilde), tol, label),
    ]


def check_structural(
    ctx: ChartContext,
    f,
    g,
    label: str = "",
    tolerances: dict | None = None,
) -> list[CheckResult]:
    """Decomposition of the third-order operator, the two second-order
    forms, curvature index raising and the Jacobi identity."""
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tols.update(tolerances)
    n = ctx.n
    bd = operator_breakdown(f, g, ctx)
    decomposition = abs(c3(f, g, ctx) - (bd.p / 6.0 - bd.q / 4.0))
    forms = abs(c2(f, g, ctx) - c2_expanded(f, g, ctx))
    data = curvature(ctx)
    gu0 = [[ctx.g_up[l][k].value() for k in range(n)] for l in range(n)]
    raising = 0.0
    for q in range(n):
        for p in range(n):
            for k in range(n):
                for l in range(n):
                    raised = sum(
                        gu0[q][c] * gu0[b][p] * data.r_dn[c][b][k][l]
                        for c in range(n)
                        for b in range(n)
                    )
                    raising = max(raising, abs(data.r_up[q][p][k][l] - raised))
    return [
        CheckResult("c3_decomposition", decomposition, tols["c3_decomposition"], label),
        CheckResult("c2_expanded_equals_covariant", forms, tols["c2_forms"], label),
        CheckResult("curvature_raising_consistency", raising, tols["curvature_raising"], label),
        CheckResult("jacobi_identity", jacobi_residual(ctx), tols["jacobi"], label),
    ]


def check_flat_vanishing(
    ctx: ChartContext,
    f,
    g,
    tol: float = DEFAULT_TOLERANCES["flat_vanishing"],
    label: str = "",
) -> CheckResult:
    """On a flat chart the operators Q, R, S, S~ vanish exactly: every one
    of their terms carries a derivative of the constant inverse metric."""
    bd = operator_breakdown(f, g, ctx)
    residual = max(abs(bd.q), abs(bd.r), abs(bd.s), abs(bd.s_tilde))
    return CheckResult("flat_qrss_vanish", residual, tol, label)


def check_gauge(
    potential: Expr,
    h: Expr,
    k: Expr,
    ctx: ChartContext,
    f,
    g,
    tol: float = DEFAULT_TOLERANCES["gauge"],
    label: str = "",
) -> CheckResult:
    """Recursion values are unchanged under a potential gauge shift.

    ``h`` must be holomorphic and ``k`` antiholomorphic; the shifted
    potential produces different left-multiplication operators but the same
    bidifferential operator values.
    """
    if classify(h) not in (HolomorphyClass.HOLOMORPHIC, HolomorphyClass.CONSTANT):
        raise ValueError("gauge term h must be holomorphic")
    if classify(k) not in (HolomorphyClass.ANTIHOLOMORPHIC, HolomorphyClass.CONSTANT):
        raise ValueError("gauge term k must be antiholomorphic")
    shifted = build_chart(Add(Add(potential, h), k), ctx.z0, ctx.zb0, order=ctx.order, n=ctx.n)
    base_ops = build_left_mult(f, ctx, r_max=3)
    shifted_ops = build_left_mult(f, shifted, r_max=3)
    residual = max(
        abs(base_ops[r].apply(g, ctx) - shifted_ops[r].apply(g, shifted)) for r in (1, 2, 3)
    )
    return CheckResult("gauge_invariance", residual, tol, label)


def check_covariance(
    potential,
    forward,
    inverse,
    z0,
    f,
    g,
    order: int = 10,
    tol: float = DEFAULT_TOLERANCES["covariance"],
    label: str = "",
) -> CheckResult:
    """Operator values agree across a holomorphic change of coordinates.

    ``forward`` maps the chart coordinates to the new ones and ``inverse``
    maps back; both are lists of ``n`` holomorphic expressions (the barred
    halves are derived as formal conjugates).  The potential and the test
    functions are pulled back syntactically and everything is re-evaluated
    in the new chart at the image point.
    """
    n = len(z0)
    potential = parse(potential, n) if isinstance(potential, str) else potential
    forward = [parse(e, n) if isinstance(e, str) else e for e in forward]
    inverse = [parse(e, n) if isinstance(e, str) else e for e in inverse]
    f = parse(f, n) if isinstance(f, str) else f
    g = parse(g, n) if isinstance(g, str) else g
    for e in (*forward, *inverse):
        if classify(e) not in (HolomorphyClass.HOLOMORPHIC, HolomorphyClass.CONSTANT):
            raise ValueError("coordinate maps must be holomorphic expressions")

    z0 = tuple(complex(v) for v in z0)
    zb0 = tuple(v.conjugate() for v in z0)
    w0 = tuple(eval_value(e, z0, zb0) for e in forward)
    wb0 = tuple(eval_value(formal_conjugate(e), z0, zb0) for e in forward)
    back = tuple(eval_value(e, w0, wb0) for e in inverse)
    if max(abs(a - b) for a, b in zip(back, z0)) > 1e-10:
        raise ValueError("inverse(forward(z0)) does not return to the base point")
    jacobian = [[eval_jet(e, z0, zb0, 1).derivative_at(_unit(n, k), (0,) * n) for k in range(n)] for e in forward]
    det = _det(jacobian)
    if abs(det) < 1e-10:
        raise ValueError("coordinate map is not biholomorphic near the point (singular Jacobian)")

    replacements = list(inverse) + [formal_conjugate(e) for e in inverse]
    ctx_z = build_chart(potential, z0, order=order, n=n)
    ctx_w = build_chart(substitute(potential, replacements), w0, wb0, order=order, n=n)
    f_w = substitute(f, replacements)
    g_w = substitute(g, replacements)

    residual = 0.0
    for op in (c1, c2, c3, c3_tilde):
        residual = max(residual, abs(op(f, g, ctx_z) - op(f_w, g_w, ctx_w)))
    return CheckResult("covariance", residual, tol, label)


def _unit(n: int, k: int):
    v = [0] * n
    v[k] = 1
    return tuple(v)


def _det(m) -> complex:
    size = len(m)
    if size == 1:
        return m[0][0]
    if size == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0j
    for j in range(size):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total


def oracle_agreement_checks(
    ctx: ChartContext,
    f,
    g,
    tol: float = DEFAULT_TOLERANCES["oracle_agreement"],
    label: str = "",
) -> list[CheckResult]:
    """Covariant formulas against the recursion, relative residual per order."""
    ops = build_left_mult(f, ctx, r_max=3)
    results = []
    for r, formula in ((1, c1), (2, c2), (3, c3)):
        via_oracle = ops[r].apply(g, ctx)
        rel = abs(formula(f, g, ctx) - via_oracle) / (1.0 + abs(via_oracle))
        results.append(CheckResult(f"oracle_agreement_r{r}", rel, tol, label))
    return results


def check_oracle_agreement(
    spec: RandomChartSpec,
    trials: int = 1,
    order: int = 10,
    tol: float = DEFAULT_TOLERANCES["oracle_agreement"],
) -> list[CheckResult]:
    """Oracle agreement over ``trials`` consecutive seeds of ``spec``."""
    results = []
    for t in range(trials):
        trial_spec = replace(spec, seed=spec.seed + t)
        _, ctx, rng = random_chart(trial_spec, order)
        f = random_polynomial(rng, spec.n)
        g = random_polynomial(rng, spec.n)
        label = (
            f"random seed={trial_spec.seed} n={spec.n} eps={spec.epsilon} "
            f"d={spec.degree} point={_fmt_point(ctx.z0)} J={order}"
        )
        results.extend(oracle_agreement_checks(ctx, f, g, tol, label))
    return results


def check_finite_differences(
    potential,
    z0,
    order: int = 10,
    tol: float = DEFAULT_TOLERANCES["finite_differences"],
    label: str = "",
    step: float = 1e-5,
) -> CheckResult:
    """First-order jet derivatives against central finite differences."""
    n = len(z0)
    potential = parse(potential, n) if isinstance(potential, str) else potential
    z0 = tuple(complex(v) for v in z0)
    zb0 = tuple(v.conjugate() for v in z0)
    jet = eval_jet(potential, z0, zb0, order)
    zero = (0,) * n
    worst = 0.0
    for k in range(n):
        e = _unit(n, k)
        analytic = jet.derivative_at(e, zero)
        plus = tuple(z + (step if i == k else 0) for i, z in enumerate(z0))
        minus = tuple(z - (step if i == k else 0) for i, z in enumerate(z0))
        numeric = (eval_value(potential, plus, zb0) - eval_value(potential, minus, zb0)) / (
            2 * step
        )
        worst = max(worst, abs(analytic - numeric) / (1.0 + abs(analytic)))

        analytic_bar = jet.derivative_at(zero, e)
        plus_b = tuple(z + (step if i == k else 0) for i, z in enumerate(zb0))
        minus_b = tuple(z - (step if i == k else 0) for i, z in enumerate(zb0))
        numeric_bar = (
            eval_value(potential, z0, plus_b) - eval_value(potential, z0, minus_b)
        ) / (2 * step)
        worst = max(worst, abs(analytic_bar - numeric_bar) / (1.0 + abs(analytic_bar)))
    return CheckResult("jet_finite_differences", worst, tol, label)


# -- the default suite --------------------------------------------------------------


def preset_charts(order: int = 10):
    """Contexts for the suite presets: ``(name, potential, ctx, label)``."""
    from .presets import preset_potential

    charts = []
    for name, n, point in SUITE_PRESETS:
        potential = preset_potential(name, n)
        ctx = build_chart(potential, point, order=order, n=n)
        label = f"preset={name} n={n} point={_fmt_point(point)} J={order}"
        charts.append((name, potential, ctx, label))
    return charts


def _chart_checks(potential, ctx, rng, label, flat=False) -> list[CheckResult]:
    n = ctx.n
    f = random_polynomial(rng, n)
    g = random_polynomial(rng, n)
    h = random_polynomial(rng, n)
    a = random_polynomial(rng, n, kind="holomorphic")
    b = random_polynomial(rng, n, kind="antiholomorphic")
    gauge_h = random_polynomial(rng, n, kind="holomorphic")
    gauge_k = random_polynomial(rng, n, kind="antiholomorphic")

    results = []
    results.extend(oracle_agreement_checks(ctx, f, g, label=label))
    for variant in StarVariant:
        results.extend(check_associativity(ctx, variant, f, g, h, label=label))
    results.extend(check_separation(ctx, a, f, b, label=label))
    results.extend(check_prop1(ctx, f, g, label=label))
    results.extend(check_structural(ctx, f, g, label=label))
    if flat:
        results.append(check_flat_vanishing(ctx, f, g, label=label))
    results.append(check_gauge(potential, gauge_h, gauge_k, ctx, f, g, label=label))
    return results


def _covariance_cases(order: int) -> list[CheckResult]:
    f, g = "zb1^2+z1*zb1", "z1^2+z1"
    cases = [
        ("identity_map", "z1*zb1", ["z1"], ["z1"], (0.4 - 0.2j,)),
        ("affine_map", "z1*zb1", ["2*z1"], ["0.5*z1"], (0.4 - 0.2j,)),
        ("moebius_map", "log(1+z1*zb1)", ["z1/(1-z1)"], ["z1/(1+z1)"], (0.3,)),
    ]
    results = []
    for tag, potential, fwd, inv, z0 in cases:
        label = f"map={tag} point={_fmt_point(z0)} J={order}"
        check = check_covariance(potential, fwd, inv, z0, f, g, order=order, label=label)
        results.append(replace(check, name=f"covariance_{tag}"))
    return results


def run_suite(
    trials: int = 20,
    seed: int = 0,
    order: int = 10,
    epsilon: float = 0.1,
    degree: int = 3,
    tol: float | None = None,
) -> list[CheckResult]:
    """The full default suite on presets plus ``trials`` random charts.

    A non-``None`` ``tol`` overrides every tolerance, which deliberately
    allows forcing failures (for example below double precision).  Results
    are sorted by name and context; identical inputs give identical output.
    """
    results: list[CheckResult] = []

    for name, potential, ctx, label in preset_charts(order):
        rng = random.Random(f"{seed}:{name}:{ctx.n}")
        results.extend(_chart_checks(potential, ctx, rng, label, flat=(name == "flat")))
        results.append(
            check_finite_differences(potential, ctx.z0, order=order, label=label)
        )

    for i in range(trials):
        spec = RandomChartSpec(n=1 + i % 2, degree=degree, epsilon=epsilon, seed=seed + i)
        potential, ctx, rng = random_chart(spec, order)
        label = (
            f"random seed={spec.seed} n={spec.n} eps={epsilon} d={degree} "
            f"point={_fmt_point(ctx.z0)} J={order}"
        )
        results.extend(_chart_checks(potential, ctx, rng, label))

    results.extend(_covariance_cases(order))

    if tol is not None:
        results = [replace(r, tolerance=tol) for r in results]
    results.sort(key=lambda r: (r.name, r.context))
    return results
