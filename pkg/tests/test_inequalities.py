"""Li-Yau bound, its scalar ingredients f and h, and the derived
parabolic inequalities."""

import math

import numpy as np
import pytest

import _oracles as oracle
from dunklheat.inequalities import (
    DEFAULT_COORDS,
    GridExtrema,
    LiYauDecomposition,
    VerificationReport,
    f_of_a,
    gradient_form_check,
    h_of_a,
    harnack_check,
    iter_liyau_reports,
    kernel_solution_field,
    liyau_coordinate_table,
    liyau_deficit_1d,
    liyau_functional,
    liyau_grid_extrema,
    liyau_report,
    log_convexity_check,
    log_convexity_midpoint_check,
    log_kernel_field,
)
from dunklheat.kernel import log_kernel, log_kernel_derivatives, moment_ratios
from dunklheat.operators import ScalarField, SpaceTimeField, dunkl_laplacian
from dunklheat.quadrature import DomainError

KAPPA_GRID = [0.25, 0.5, 1.0, 2.5]


# ---------------------------------------------------------------------------
# f


def test_f_at_zero_is_exactly_zero():
    for kappa in KAPPA_GRID:
        assert f_of_a(0.0, kappa) == 0.0


def test_f_frozen_values():
    # frozen from the brute-force oracle at 1e5 panels
    assert abs(f_of_a(3.0, 0.5) - 2.851008823591248) < 1e-11
    assert abs(f_of_a(1.0, 1.0) - 0.39856280511574305) < 1e-11
    assert abs(f_of_a(10.0, 2.5) - 13.603335039095823) < 1e-10


def test_f_against_brute_force_both_branches():
    rng = np.random.default_rng(71)
    tilts = np.concatenate(
        [rng.uniform(-200.0, 200.0, 8), rng.uniform(-1.0, 1.0, 4), [0.999, -0.999, 1.001, -1.001]]
    )
    for a in tilts:
        kappa = float(rng.choice(KAPPA_GRID))
        got = f_of_a(float(a), kappa)
        want = oracle.brute_force_f(float(a), kappa, n_panels=20_000)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), (a, kappa)


@pytest.mark.parametrize("kappa", KAPPA_GRID)
def test_f_nonnegative_across_tilt_range(kappa):
    for a in np.linspace(-200.0, 200.0, 41):
        assert f_of_a(float(a), kappa) >= -1e-10


def test_f_small_tilt_keeps_relative_accuracy():
    # f(a) = 2 var(0) a^2 (1 + O(a)); the integral branch must track the
    # quadratic with relative, not absolute, accuracy
    for kappa in (0.25, 2.5):
        lead = 2.0 * oracle.variance_at_zero(kappa)
        for a in (1e-3, 1e-5, 1e-7):
            ratio = f_of_a(a, kappa) / (lead * a * a)
            assert abs(ratio - 1.0) <= 1.0 * a + 1e-12, (kappa, a, ratio)


def test_f_domain_errors():
    with pytest.raises(DomainError):
        f_of_a(float("nan"), 0.5)
    with pytest.raises(DomainError):
        f_of_a(1.0, 0.0)


# ---------------------------------------------------------------------------
# h


def test_h_zero_and_exact_antisymmetry():
    assert h_of_a(0.0, 0.5) == 0.0
    rng = np.random.default_rng(73)
    for _ in range(15):
        a = float(rng.uniform(-40.0, 40.0))
        kappa = float(rng.choice(KAPPA_GRID))
        assert h_of_a(a, kappa) + h_of_a(-a, kappa) == 0.0


@pytest.mark.parametrize("kappa", KAPPA_GRID)
def test_h_increasing_and_signed(kappa):
    grid = np.linspace(-5.0, 5.0, 101)
    values = [h_of_a(float(a), kappa) for a in grid]
    assert all(values[i] < values[i + 1] for i in range(len(values) - 1))
    assert h_of_a(2.0, kappa) > 0.0 > h_of_a(-2.0, kappa)


# ---------------------------------------------------------------------------
# reports


def test_report_build_and_pass_logic():
    r = VerificationReport.build("demo", (1.0,), lhs=1.0, rhs=2.0, tolerance=1e-9)
    assert r.deficit == 1.0 and r.passed
    r = VerificationReport.build("demo", (1.0,), lhs=2.0, rhs=1.0, tolerance=1e-9)
    assert r.deficit == -1.0 and not r.passed
    r = VerificationReport.build("demo", (1.0,), lhs=1.0, rhs=1.0, tolerance=1e-9, deficit=-5e-10)
    assert r.passed  # explicit stable deficit wins


def test_report_rejects_bad_fields():
    with pytest.raises(DomainError):
        VerificationReport.build("demo", (1.0,), lhs=float("inf"), rhs=1.0, tolerance=1e-9)
    with pytest.raises(DomainError):
        VerificationReport(
            claim_id="demo",
            grid_point=(1.0,),
            lhs=0.0,
            rhs=1.0,
            deficit=1.0,
            passed=False,  # inconsistent with deficit >= -tol
            tolerance=1e-9,
        )


# ---------------------------------------------------------------------------
# the Li-Yau functional


def test_zero_multiplicity_is_the_sharp_gaussian_case():
    dec = liyau_functional(0.5, [1.0, -2.0], [0.3, 4.0], [0.0, 0.0])
    assert dec.total == 2.0  # d/(2t) exactly
    assert dec.bound == 2.0
    assert dec.deficit == 0.0
    for d in (1, 3):
        dec = liyau_functional(0.07, [1.0] * d, [-2.0] * d, [0.0] * d)
        assert abs(dec.bound - dec.total) < 1e-12 * dec.bound
        assert dec.deficit == 0.0


def test_equality_at_zero_right_argument():
    # y = 0 makes every a_i = 0, killing both deficit terms: the bound is
    # attained, which is the sharpness half of the statement
    dec = liyau_functional(0.01, [0.3, -10.0], [0.0, 0.0], [0.25, 2.5])
    assert dec.deficit == 0.0
    assert dec.bound - dec.total == 0.0


def test_decomposition_fields_are_consistent():
    t, x, y, kappa = 0.5, [1.0, -2.0], [0.3, 1.5], [0.5, 1.5]
    dec = liyau_functional(t, x, y, kappa)
    assert isinstance(dec, LiYauDecomposition)
    assert len(dec.coordinates) == 2
    assert dec.bound == (2 + 2.0 * 2.0) / (2.0 * t)
    for i, c in enumerate(dec.coordinates):
        assert c.axis == i
        assert c.a == x[i] * y[i] / (2.0 * t)
        assert c.variance_term >= 0.0
        assert c.f_value >= 0.0
        dxx = -1.0 / (2.0 * t) + c.variance_term
        assert abs(c.i_value - (dxx + c.j_value)) < 1e-14
        assert abs(c.deficit - (c.variance_term + (c.j_value + kappa[i] / t))) < 1e-13
    assert abs(dec.total - (-sum(c.i_value for c in dec.coordinates))) < 1e-14


@pytest.mark.parametrize(
    "t,x,y,kappa",
    [
        (0.5, [1.0, -2.0], [0.3, 1.5], [0.5, 1.5]),
        (0.01, [3.0], [10.0], [2.5]),
        (7.0, [-0.3, 0.9], [1.0, -1.0], [0.25, 1.0]),
        (0.5, [0.0, 1.1], [1.3, 2.0], [0.5, 1.5]),  # on a hyperplane
    ],
)
def test_functional_matches_generic_dunkl_laplacian(t, x, y, kappa):
    # two computation paths: analytic per-coordinate moments against the
    # generic difference operator applied to the log-kernel field
    field = log_kernel_field(t, y, kappa)
    generic = dunkl_laplacian(field, np.asarray(x, dtype=float), kappa)
    dec = liyau_functional(t, x, y, kappa)
    assert abs(-generic - dec.total) <= 1e-8 * max(1.0, abs(dec.total))


def test_hyperplane_coordinate_takes_limit_branch():
    t, kappa = 0.5, [1.5]
    dec = liyau_functional(t, [0.0], [2.0], kappa)
    c = dec.coordinates[0]
    ratios = moment_ratios(0.0, 1.5)
    dxx = -1.0 / (2.0 * t) + 4.0 / (4.0 * t * t) * ratios.variance
    assert abs(c.i_value - 4.0 * dxx) < 1e-13  # (1 + 2 kappa) d_xx log p
    assert c.deficit >= 0.0


def test_unbalanced_deficit_is_nonnegative_on_random_grid():
    rng = np.random.default_rng(79)
    for _ in range(60):
        t = float(10.0 ** rng.uniform(-2.0, 2.0))
        d = int(rng.integers(1, 4))
        x = rng.uniform(-10.0, 10.0, d)
        y = rng.uniform(-10.0, 10.0, d)
        kappa = rng.uniform(0.05, 2.5, d)
        report = liyau_report(t, x, y, kappa)
        assert report.claim_id == "liyau_log_kernel"
        assert report.passed
        assert report.deficit >= -1e-9
        # the report deficit (stable form) agrees with rhs - lhs
        assert abs(report.deficit - (report.rhs - report.lhs)) <= 1e-10 * max(
            1.0, abs(report.rhs)
        )


def test_dimension_and_time_validation():
    with pytest.raises(DomainError):
        liyau_functional(0.0, [1.0], [1.0], [0.5])
    with pytest.raises(DomainError):
        liyau_functional(1.0, [1.0, 2.0], [1.0], [0.5, 0.5])
    with pytest.raises(DomainError):
        liyau_functional(1.0, [float("nan")], [1.0], [0.5])


# ---------------------------------------------------------------------------
# grid scan engine


def test_table_entries_match_scalar_deficits():
    table = liyau_coordinate_table(0.1, 0.5, coords=(-3.0, 0.0, 1.0))
    for ix, u in enumerate(table.coords):
        for iy, v in enumerate(table.coords):
            assert table.deficit[ix, iy] == liyau_deficit_1d(0.1, u, v, 0.5)


def test_full_grid_reports_match_direct_evaluation():
    coords = (-1.0, 0.0, 3.0)
    reports = list(iter_liyau_reports([0.5], [0.5, 1.5], coords=coords))
    assert len(reports) == 3 ** 4
    for r in reports[:: 7]:
        t, x, y = r.grid_point
        direct = liyau_report(t, x, y, [0.5, 1.5])
        assert abs(r.deficit - direct.deficit) <= 1e-13 * max(1.0, abs(direct.deficit))
        assert abs(r.lhs - direct.lhs) <= 1e-12 * max(1.0, abs(direct.lhs))


def test_extrema_agree_with_enumeration():
    coords = (-1.0, -0.3, 0.0, 3.0)
    ex = liyau_grid_extrema(0.1, [0.5, 2.5], coords=coords)
    assert isinstance(ex, GridExtrema)
    reports = list(iter_liyau_reports([0.1], [0.5, 2.5], coords=coords))
    assert ex.n_points == len(reports)
    assert ex.min_deficit == min(r.deficit for r in reports)
    y0_max = max(
        r.deficit for r in reports if all(v == 0.0 for v in r.grid_point[2])
    )
    assert ex.max_deficit_y0 == y0_max


def test_extrema_argmin_reconstructs_a_real_point():
    ex = liyau_grid_extrema(0.1, [0.5, 2.5], coords=DEFAULT_COORDS)
    x, y = ex.argmin
    direct = liyau_report(0.1, x, y, [0.5, 2.5])
    assert abs(direct.deficit - ex.min_deficit) <= 1e-12 * max(1.0, abs(ex.min_deficit))


def test_extrema_need_zero_in_grid():
    with pytest.raises(DomainError):
        liyau_grid_extrema(0.1, [0.5], coords=(1.0, 2.0))


def test_grid_deficit_nonnegative_for_sampled_slice():
    # one (t, kappa) slice of the full product grid certification
    ex = liyau_grid_extrema(0.01, [2.5, 0.25], coords=DEFAULT_COORDS)
    assert ex.min_deficit >= -1e-9
    assert ex.max_deficit_y0 <= 1e-8
    assert ex.n_points == 9 ** 4


# ---------------------------------------------------------------------------
# space-time fields


def test_log_kernel_field_matches_kernel_module():
    t, y, kappa = 0.4, [0.5, -1.0], [0.5, 1.5]
    field = log_kernel_field(t, y, kappa)
    x = np.array([1.2, 0.7])
    kp = log_kernel_derivatives(t, x, y, kappa)
    assert field.value(x) == log_kernel(t, x, y, kappa)
    np.testing.assert_array_equal(field.gradient(x), kp.grad_x_log_p)
    np.testing.assert_array_equal(field.hessian_diag(x), kp.hess_diag_x_log_p)


def test_kernel_solution_field_derivatives():
    u = kernel_solution_field([0.5, -1.0], [0.5, 1.5])
    t = 0.7
    x = np.array([1.0, 2.0])
    val = u.value(t, x)
    assert val > 0.0
    slice_field = ScalarField.from_callable(lambda z: u.value(t, z))
    np.testing.assert_allclose(u.gradient(t, x), slice_field.gradient(x), rtol=1e-7)
    np.testing.assert_allclose(
        u.hessian_diag(t, x), slice_field.hessian_diag(x), rtol=1e-6
    )
    dt = oracle.central_d1(lambda s: u.value(s, x), t, 1e-4 * t)
    assert abs(u.time_derivative(t, x) - dt) <= 1e-7 * max(1.0, abs(dt))
    frozen = u.at(t)
    assert frozen.value(x) == val
    assert frozen.analytic is True


# ---------------------------------------------------------------------------
# gradient form


def test_gradient_form_on_kernel_solutions():
    kappa = [0.5, 1.5]
    u = kernel_solution_field([0.5, -1.0], kappa)
    lam = 2.0
    rng = np.random.default_rng(83)
    for _ in range(25):
        t = float(10.0 ** rng.uniform(-1.0, 1.0))
        x = rng.uniform(-3.0, 3.0, 2)
        beta = (2 + 2.0 * lam) / (2.0 * t)
        r = gradient_form_check(u, t, x, beta)
        assert r.claim_id == "gradient_form" and r.passed


def test_gradient_form_lhs_is_the_log_derivative_combination():
    kappa = [0.5, 1.5]
    u = kernel_solution_field([0.5, -1.0], kappa)
    t, x = 0.7, np.array([1.0, 2.0])
    kp = log_kernel_derivatives(t, x, [0.5, -1.0], kappa)
    g = np.asarray(kp.grad_x_log_p)
    want = float(g @ g) - kp.dt_log_p
    r = gradient_form_check(u, t, x, beta=10.0)
    assert abs(r.lhs - want) <= 1e-10 * max(1.0, abs(want))


def test_gradient_form_gaussian_equality_at_center():
    # kappa = 0, x = y0: grad log u = 0 and -d_t log u = d/(2t)
    u = kernel_solution_field([1.0, -2.0], [0.0, 0.0])
    t = 0.6
    r = gradient_form_check(u, t, [1.0, -2.0], beta=2.0 / (2.0 * t))
    assert abs(r.deficit) < 1e-12


def test_gradient_form_rejects_nonpositive_field():
    bad = SpaceTimeField(
        value=lambda t, x: -1.0,
        gradient=lambda t, x: np.zeros(1),
        hessian_diag=lambda t, x: np.zeros(1),
        time_derivative=lambda t, x: 0.0,
    )
    with pytest.raises(DomainError):
        gradient_form_check(bad, 1.0, [0.0], beta=1.0)


def test_gradient_form_constant_field_passes_any_nonnegative_beta():
    const = SpaceTimeField(
        value=lambda t, x: 3.0,
        gradient=lambda t, x: np.zeros(2),
        hessian_diag=lambda t, x: np.zeros(2),
        time_derivative=lambda t, x: 0.0,
    )
    r = gradient_form_check(const, 1.0, [1.0, 2.0], beta=0.0)
    assert r.lhs == 0.0 and r.passed


# ---------------------------------------------------------------------------
# Harnack


def test_harnack_on_kernel_solutions():
    kappa = [0.5, 1.5]
    u = kernel_solution_field([0.5, -1.0], kappa)
    rng = np.random.default_rng(89)
    for _ in range(50):
        s = float(10.0 ** rng.uniform(-1.0, 0.5))
        t = s * float(rng.uniform(1.05, 10.0))
        x = rng.uniform(-3.0, 3.0, 2)
        y = rng.uniform(-3.0, 3.0, 2)
        r = harnack_check(u, s, x, t, y, lambda_kappa=2.0, d=2)
        assert r.claim_id == "harnack" and r.passed


def test_harnack_gaussian_log_assembly():
    # kappa = 0: both sides have closed forms; check the report's fields
    u = kernel_solution_field([0.0], [0.0])
    s, t = 0.5, 1.25
    x, y = np.array([1.0]), np.array([-0.5])
    r = harnack_check(u, s, x, t, y, lambda_kappa=0.0, d=1)
    lhs = oracle.gaussian_log_kernel(s, 1.0, 0.0)
    rhs = (
        oracle.gaussian_log_kernel(t, -0.5, 0.0)
        + 0.5 * math.log(t / s)
        + (1.0 - (-0.5)) ** 2 / (4.0 * (t - s))
    )
    assert abs(r.lhs - lhs) < 1e-12
    assert abs(r.rhs - rhs) < 1e-12
    assert r.passed


def test_harnack_degenerates_to_equality():
    u = kernel_solution_field([0.0, 0.0], [1.0, 1.0])
    s = 1.0
    t = s * (1.0 + 1e-9)
    r = harnack_check(u, s, [0.7, -0.2], t, [0.7, -0.2], lambda_kappa=2.0, d=2)
    assert r.passed and abs(r.deficit) < 1e-4


def test_harnack_rejects_bad_times():
    u = kernel_solution_field([0.0], [0.5])
    with pytest.raises(DomainError):
        harnack_check(u, 1.0, [0.0], 1.0, [0.0], lambda_kappa=0.5, d=1)
    with pytest.raises(DomainError):
        harnack_check(u, 2.0, [0.0], 1.0, [0.0], lambda_kappa=0.5, d=1)
    with pytest.raises(DomainError):
        harnack_check(u, -1.0, [0.0], 1.0, [0.0], lambda_kappa=0.5, d=1)


# ---------------------------------------------------------------------------
# log-convexity of the normalized kernel


def test_convexity_diagonal_nonnegative_on_random_grid():
    rng = np.random.default_rng(97)
    for _ in range(40):
        t = float(10.0 ** rng.uniform(-2.0, 2.0))
        d = int(rng.integers(1, 3))
        x = rng.uniform(-10.0, 10.0, d)
        y = rng.uniform(-10.0, 10.0, d)
        kappa = rng.uniform(0.05, 2.5, d)
        r = log_convexity_check(t, x, y, kappa)
        assert r.claim_id == "log_convexity_diag" and r.passed


def test_convexity_trivial_cases():
    r = log_convexity_check(0.5, [1.0, 2.0], [0.0, 0.0], [0.5, 1.5])
    assert r.lhs == 0.0  # y = 0: the normalized kernel is constant in the tilt
    r = log_convexity_check(0.5, [1.0], [3.0], [0.0])
    assert r.lhs == 0.0  # Gaussian: log q is linear


def test_midpoint_convexity_random_pairs():
    rng = np.random.default_rng(101)
    kappa = [0.5, 1.5]
    y = [3.0, 0.7]
    for _ in range(30):
        t = float(10.0 ** rng.uniform(-1.0, 1.0))
        z1 = rng.uniform(-5.0, 5.0, 2)
        z2 = rng.uniform(-5.0, 5.0, 2)
        r = log_convexity_midpoint_check(t, z1, z2, y, kappa)
        assert r.claim_id == "log_convexity_midpoint" and r.passed


def test_midpoint_equality_for_identical_points():
    z = [1.0, -0.5]
    r = log_convexity_midpoint_check(0.5, z, z, [3.0, 0.7], [0.5, 1.5])
    assert r.deficit == 0.0
