"""The parabolic inequalities for the sign-flip Dunkl Laplacian.

Everything here reduces to one-dimensional facts about the tilted moment
ratios: the Li-Yau bound decomposes coordinate-wise, and each coordinate
deficit is a sum of two nonnegative pieces

    deficit_i = (y_i^2 / 4t^2) var(a_i)  +  (kappa_i / x_i^2) f(a_i),

with a_i = x_i y_i / (2t), var the tilted variance, and f the reflection
defect of the log-kernel.  Deficits are always computed in this cancelled
form; the report-level rhs - lhs agrees with it to round-off but would lose
digits on its own when t is small.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .kernel import (
    _DEFAULT_REL_TOL,
    log_kernel,
    log_kernel_derivatives,
    moment_ratios,
)
from .operators import (
    MultiplicityZ2,
    ScalarField,
    SpaceTimeField,
    reflection_epsilon,
)
from .quadrature import DomainError, gauss_jacobi_rule

__all__ = [
    "DEFAULT_COORDS",
    "DEFAULT_KAPPAS",
    "DEFAULT_TIMES",
    "DEFAULT_TOLERANCE",
    "CoordinateTable",
    "GridExtrema",
    "LiYauCoordinate",
    "LiYauDecomposition",
    "VerificationReport",
    "f_of_a",
    "gradient_form_check",
    "h_of_a",
    "harnack_check",
    "iter_liyau_reports",
    "kernel_solution_field",
    "liyau_coordinate_table",
    "liyau_deficit_1d",
    "liyau_functional",
    "liyau_grid_extrema",
    "liyau_report",
    "log_convexity_check",
    "log_convexity_midpoint_check",
    "log_kernel_field",
]

DEFAULT_TOLERANCE = 1e-9
DEFAULT_TIMES = tuple(float(t) for t in np.logspace(-2.0, 2.0, 9))
DEFAULT_COORDS = (-10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0)
DEFAULT_KAPPAS = (0.25, 0.5, 1.0, 2.5)

# below this |a| the direct formula for f loses all digits to cancellation
# (f ~ 2 var(0) a^2 while its terms are O(1)); switch to the integral form
_F_DIRECT_SWITCH = 1.0
_F_RULE_NODES = 32


# ---------------------------------------------------------------------------
# the two scalar functions carrying the whole Li-Yau argument


def f_of_a(a: float, kappa_i: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """f(a) = 2a r1(a) + log m0(-a) - log m0(a), the reflection defect of
    the one-dimensional log-kernel.  Nonnegative for every tilt.

    For |a| >= 1 the displayed formula is evaluated directly.  Below that it
    cancels catastrophically (the value is ~ 2 var(0) a^2 against O(1)
    terms), so the equivalent integral form

        f(a) = integral_{-a}^{a} (s + a) var(s) ds

    is used instead: every factor is nonnegative, so the result carries
    full relative accuracy all the way down to f(0) = 0.
    """
    a = float(a)
    if not math.isfinite(a):
        raise DomainError(f"tilt must be finite, got {a!r}")
    if a == 0.0:
        return 0.0
    if abs(a) >= _F_DIRECT_SWITCH:
        plus = moment_ratios(a, kappa_i, rel_tol)
        minus = moment_ratios(-a, kappa_i, rel_tol)
        return 2.0 * a * plus.r1 + minus.log_m0 - plus.log_m0
    # f(a) = int_{-a}^{a} (s + a) var(s) ds (oriented); s = a*node turns it
    # into a^2 int_{-1}^1 (1 + node) var(a*node) dnode, a sum of positives
    rule = gauss_jacobi_rule(0.0, 0.0, _F_RULE_NODES)
    total = 0.0
    for node, weight in zip(rule.nodes, rule.weights):
        total += weight * (1.0 + node) * moment_ratios(a * node, kappa_i, rel_tol).variance
    return float(a * a * total)


def h_of_a(a: float, kappa_i: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """h(a) / (m0(a) m0(-a)) = r1(a) - r1(-a).

    The unscaled h is a difference of products of moment integrals and
    overflows for |a| > ~350; dividing by the positive factor m0(a) m0(-a)
    preserves the sign, the zero at a = 0, and the monotonicity.
    """
    a = float(a)
    if not math.isfinite(a):
        raise DomainError(f"tilt must be finite, got {a!r}")
    if a == 0.0:
        return 0.0
    return moment_ratios(a, kappa_i, rel_tol).r1 - moment_ratios(-a, kappa_i, rel_tol).r1


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class VerificationReport:
    """One checked inequality at one grid point.

    The deficit is rhs - lhs, possibly recomputed in a cancellation-free
    form by the producing check; pass holds iff deficit >= -tolerance.
    """

    claim_id: str
    grid_point: tuple
    lhs: float
    rhs: float
    deficit: float
    passed: bool
    tolerance: float

    def __post_init__(self):
        for name in ("lhs", "rhs", "deficit", "tolerance"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"report field {name} is not finite")
        if self.passed != (self.deficit >= -self.tolerance):
            raise DomainError("pass flag inconsistent with deficit and tolerance")

    @classmethod
    def build(cls, claim_id, grid_point, lhs, rhs, tolerance, deficit=None):
        if deficit is None:
            deficit = rhs - lhs
        return cls(
            claim_id=claim_id,
            grid_point=tuple(grid_point),
            lhs=float(lhs),
            rhs=float(rhs),
            deficit=float(deficit),
            passed=bool(deficit >= -tolerance),
            tolerance=float(tolerance),
        )


# ---------------------------------------------------------------------------
# the Li-Yau functional


@dataclass(frozen=True)
class LiYauCoordinate:
    """Per-coordinate pieces of the Li-Yau sum.

    i_value is the full coordinate contribution to the Laplacian of the
    log-kernel; j_value its reflection part; deficit the cancelled-form
    distance to the per-coordinate bound -(1 + 2 kappa_i)/(2t).
    """

    axis: int
    a: float
    variance_term: float
    f_value: float
    j_value: float
    i_value: float
    deficit: float


@dataclass(frozen=True)
class LiYauDecomposition:
    """-Delta_kappa(log p_t(., y))(x) <= (d + 2 lambda_kappa)/(2t), split
    into its coordinate contributions; total is the left-hand side."""

    t: float
    x: np.ndarray
    y: np.ndarray
    kappa: MultiplicityZ2
    coordinates: tuple[LiYauCoordinate, ...]
    total: float
    bound: float

    def __post_init__(self):
        self.x.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def deficit(self) -> float:
        """bound - total, assembled from the per-coordinate cancelled forms."""
        return float(sum(c.deficit for c in self.coordinates))

    def report(self, tol: float = DEFAULT_TOLERANCE) -> "VerificationReport":
        return VerificationReport.build(
            claim_id="liyau_log_kernel",
            grid_point=(self.t, tuple(self.x), tuple(self.y)),
            lhs=self.total,
            rhs=self.bound,
            tolerance=tol,
            deficit=self.deficit,
        )


def _liyau_coordinate(t, u, v, kappa_i, axis, rel_tol) -> LiYauCoordinate:
    if kappa_i == 0.0:
        # Gaussian coordinate: I = -1/(2t) meets the bound exactly
        return LiYauCoordinate(
            axis=axis,
            a=0.0 if v == 0.0 else u * v / (2.0 * t),
            variance_term=0.0,
            f_value=0.0,
            j_value=0.0,
            i_value=-1.0 / (2.0 * t),
            deficit=0.0,
        )
    a = u * v / (2.0 * t)
    ratios = moment_ratios(a, kappa_i, rel_tol)
    variance_term = v * v / (4.0 * t * t) * ratios.variance
    dxx = -1.0 / (2.0 * t) + variance_term
    if abs(u) < 1e-7 * (1.0 + abs(u)):
        # the analytic reflection term divides by u^2; at the hyperplane the
        # coordinate contribution is the removable-singularity limit
        # (1 + 2 kappa) d_uu log p, matching the generic Dunkl Laplacian
        f_value = f_of_a(a, kappa_i, rel_tol)
        j_value = 2.0 * kappa_i * dxx
        i_value = (1.0 + 2.0 * kappa_i) * dxx
        deficit = (1.0 + 2.0 * kappa_i) * variance_term
    else:
        f_value = f_of_a(a, kappa_i, rel_tol)
        reflection_term = kappa_i / (u * u) * f_value
        j_value = -kappa_i / t + reflection_term
        i_value = dxx + j_value
        deficit = variance_term + reflection_term
    return LiYauCoordinate(
        axis=axis,
        a=a,
        variance_term=variance_term,
        f_value=f_value,
        j_value=j_value,
        i_value=i_value,
        deficit=deficit,
    )


def _prepare_grid_point(t, x, y, kappa):
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise DomainError(f"time must be finite and > 0, got {t!r}")
    kappa = MultiplicityZ2.of(kappa)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size != kappa.d or y.size != kappa.d:
        raise DomainError(
            f"points have dimensions {x.size}, {y.size}; multiplicity has {kappa.d}"
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("points must be finite")
    return float(t), x, y, kappa


def liyau_functional(t, x, y, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> LiYauDecomposition:
    """Evaluate -Delta_kappa(log p_t(., y))(x) coordinate by coordinate.

    Coordinates with |x_i| below the hyperplane threshold take the limit
    branch of the generic Dunkl Laplacian; all others use the analytic
    moment-ratio form.  The two agree to 1e-8 wherever both are usable.
    """
    t, x, y, kappa = _prepare_grid_point(t, x, y, kappa)
    eps = reflection_epsilon(x)
    coords = []
    for i in range(kappa.d):
        u = x[i]
        # the scan tables use the same branch rule with the coordinate's own
        # scale; the full-point epsilon only differs for |x_i| in the dead
        # zone between the two, which the default grids never touch
        if abs(u) < eps:
            u = 0.0
        coords.append(_liyau_coordinate(t, u, y[i], kappa.values[i], i, rel_tol))
    total = -sum(c.i_value for c in coords)
    bound = (kappa.d + 2.0 * kappa.lambda_total) / (2.0 * t)
    return LiYauDecomposition(
        t=t,
        x=x.copy(),
        y=y.copy(),
        kappa=kappa,
        coordinates=tuple(coords),
        total=float(total),
        bound=float(bound),
    )


def liyau_report(
    t,
    x,
    y,
    kappa,
    tol: float = DEFAULT_TOLERANCE,
    rel_tol: float = _DEFAULT_REL_TOL,
) -> VerificationReport:
    """Li-Yau bound for the heat kernel at one grid point."""
    return liyau_functional(t, x, y, kappa, rel_tol).report(tol)


# ---------------------------------------------------------------------------
# grid scans: the deficit is an exact sum of per-coordinate terms, so a
# product grid reduces to one small table per (t, kappa_i)


def liyau_deficit_1d(t, u, v, kappa_i, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """The coordinate deficit at one (t, x_i, y_i)."""
    return _liyau_coordinate(float(t), float(u), float(v), float(kappa_i), 0, rel_tol).deficit


@dataclass(frozen=True)
class CoordinateTable:
    """Per-coordinate values on a coords x coords grid at fixed (t, kappa_i)."""

    t: float
    kappa_i: float
    coords: tuple[float, ...]
    deficit: np.ndarray  # [ix, iy]
    i_value: np.ndarray  # [ix, iy]

    def __post_init__(self):
        self.deficit.setflags(write=False)
        self.i_value.setflags(write=False)


def liyau_coordinate_table(
    t: float,
    kappa_i: float,
    coords: Sequence[float] = DEFAULT_COORDS,
    rel_tol: float = _DEFAULT_REL_TOL,
) -> CoordinateTable:
    coords = tuple(float(c) for c in coords)
    n = len(coords)
    deficit = np.empty((n, n))
    i_value = np.empty((n, n))
    for ix, u in enumerate(coords):
        for iy, v in enumerate(coords):
            c = _liyau_coordinate(float(t), u, v, float(kappa_i), 0, rel_tol)
            deficit[ix, iy] = c.deficit
            i_value[ix, iy] = c.i_value
    return CoordinateTable(
        t=float(t), kappa_i=float(kappa_i), coords=coords, deficit=deficit, i_value=i_value
    )


@dataclass(frozen=True)
class GridExtrema:
    """Exact extrema of the Li-Yau deficit over a full product grid.

    Since deficit(t, x, y) = sum_i deficit_i(t, x_i, y_i) exactly, the
    minimum over the product grid is the sum of per-coordinate minima; the
    argmin assembles per-coordinate argmins.  max_deficit_y0 ranges over the
    sub-grid y = 0 where the bound is attained.
    """

    t: float
    kappa: MultiplicityZ2
    n_points: int
    min_deficit: float
    argmin: tuple
    max_deficit_y0: float
    argmax_y0: tuple


def liyau_grid_extrema(
    t: float,
    kappa,
    coords: Sequence[float] = DEFAULT_COORDS,
    rel_tol: float = _DEFAULT_REL_TOL,
    _table_cache: dict | None = None,
) -> GridExtrema:
    kappa = MultiplicityZ2.of(kappa)
    coords = tuple(float(c) for c in coords)
    if 0.0 not in coords:
        raise DomainError("coordinate grid must contain 0 for the y = 0 extrema")
    zero_at = coords.index(0.0)
    min_total = 0.0
    max_y0_total = 0.0
    argmin_x, argmin_y, argmax_x = [], [], []
    for k in kappa.values:
        key = (t, k, coords, rel_tol)
        if _table_cache is not None and key in _table_cache:
            table = _table_cache[key]
        else:
            table = liyau_coordinate_table(t, k, coords, rel_tol)
            if _table_cache is not None:
                _table_cache[key] = table
        flat = int(np.argmin(table.deficit))
        ix, iy = divmod(flat, len(coords))
        min_total += table.deficit[ix, iy]
        argmin_x.append(coords[ix])
        argmin_y.append(coords[iy])
        col = table.deficit[:, zero_at]
        jx = int(np.argmax(col))
        max_y0_total += col[jx]
        argmax_x.append(coords[jx])
    n = len(coords) ** (2 * kappa.d)
    return GridExtrema(
        t=float(t),
        kappa=kappa,
        n_points=n,
        min_deficit=float(min_total),
        argmin=(tuple(argmin_x), tuple(argmin_y)),
        max_deficit_y0=float(max_y0_total),
        argmax_y0=(tuple(argmax_x), (0.0,) * kappa.d),
    )


def iter_liyau_reports(
    t_values: Sequence[float],
    kappa,
    coords: Sequence[float] = DEFAULT_COORDS,
    tol: float = DEFAULT_TOLERANCE,
    rel_tol: float = _DEFAULT_REL_TOL,
) -> Iterator[VerificationReport]:
    """All Li-Yau reports on the product grid, assembled from coordinate
    tables; rows stream in lexicographic (t, x, y) order."""
    kappa = MultiplicityZ2.of(kappa)
    coords = tuple(float(c) for c in coords)
    n = len(coords)
    d = kappa.d
    for t in sorted(float(v) for v in t_values):
        tables = [liyau_coordinate_table(t, k, coords, rel_tol) for k in kappa.values]
        bound = (d + 2.0 * kappa.lambda_total) / (2.0 * t)
        for combo in itertools.product(range(n), repeat=2 * d):
            ix = combo[:d]
            iy = combo[d:]
            x = tuple(coords[j] for j in ix)
            y = tuple(coords[j] for j in iy)
            total = -sum(tables[i].i_value[ix[i], iy[i]] for i in range(d))
            deficit = sum(tables[i].deficit[ix[i], iy[i]] for i in range(d))
            yield VerificationReport.build(
                claim_id="liyau_log_kernel",
                grid_point=(t, x, y),
                lhs=float(total),
                rhs=bound,
                tolerance=tol,
                deficit=float(deficit),
            )


# ---------------------------------------------------------------------------
# fields built from the kernel


def _validate_center(y, kappa):
    kappa = MultiplicityZ2.of(kappa)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.size != kappa.d:
        raise DomainError(f"point has dimension {y.size}, multiplicity has {kappa.d}")
    if not np.all(np.isfinite(y)):
        raise DomainError("point must be finite")
    return y, kappa


def log_kernel_field(t, y, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> ScalarField:
    """x -> log p_t(x, y) with its analytic derivatives, for feeding the
    generic Dunkl operators."""
    y, kappa = _validate_center(y, kappa)
    t = float(t)
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"time must be finite and > 0, got {t!r}")
    return ScalarField(
        value=lambda x: log_kernel(t, x, y, kappa, rel_tol),
        gradient=lambda x: np.asarray(
            log_kernel_derivatives(t, x, y, kappa, rel_tol).grad_x_log_p
        ),
        hessian_diag=lambda x: np.asarray(
            log_kernel_derivatives(t, x, y, kappa, rel_tol).hess_diag_x_log_p
        ),
    )


def kernel_solution_field(y0, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> SpaceTimeField:
    """u(t, x) = p_t(x, y0), the fundamental solution centred at y0.

    Derivatives of the value are assembled from the log-derivatives:
    grad u = u grad log u, d_ii u = u (d_ii log u + (d_i log u)^2).
    """
    y0, kappa = _validate_center(y0, kappa)

    def value(t, x):
        return math.exp(log_kernel(t, x, y0, kappa, rel_tol))

    def gradient(t, x):
        kp = log_kernel_derivatives(t, x, y0, kappa, rel_tol)
        return math.exp(kp.log_p) * np.asarray(kp.grad_x_log_p)

    def hessian_diag(t, x):
        kp = log_kernel_derivatives(t, x, y0, kappa, rel_tol)
        g = np.asarray(kp.grad_x_log_p)
        return math.exp(kp.log_p) * (np.asarray(kp.hess_diag_x_log_p) + g * g)

    def time_derivative(t, x):
        kp = log_kernel_derivatives(t, x, y0, kappa, rel_tol)
        return math.exp(kp.log_p) * kp.dt_log_p

    return SpaceTimeField(
        value=value,
        gradient=gradient,
        hessian_diag=hessian_diag,
        time_derivative=time_derivative,
    )


# ---------------------------------------------------------------------------
# the derived parabolic inequalities


def gradient_form_check(
    u: SpaceTimeField,
    t: float,
    x,
    beta: float,
    tol: float = DEFAULT_TOLERANCE,
) -> VerificationReport:
    """|grad u|^2/u^2 - (d_t u)/u <= beta at (t, x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    value = float(u.value(t, x))
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"field must be positive at the check point, got {value!r}")
    grad = np.asarray(u.gradient(t, x), dtype=float)
    dt = float(u.time_derivative(t, x))
    lhs = float(grad @ grad) / (value * value) - dt / value
    return VerificationReport.build(
        claim_id="gradient_form",
        grid_point=(float(t), tuple(x)),
        lhs=lhs,
        rhs=float(beta),
        tolerance=tol,
    )


def harnack_check(
    u: SpaceTimeField,
    s: float,
    x,
    t: float,
    y,
    lambda_kappa: float,
    d: int,
    tol: float = DEFAULT_TOLERANCE,
) -> VerificationReport:
    """u(s, x) <= u(t, y) (t/s)^(lambda + d/2) exp(|x-y|^2 / (4(t-s))).

    Compared in log space: the right-hand side overflows long before the
    inequality gets interesting.
    """
    s = float(s)
    t = float(t)
    if not (0.0 < s < t):
        raise DomainError(f"need 0 < s < t, got s={s!r}, t={t!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    us = float(u.value(s, x))
    ut = float(u.value(t, y))
    if not (us > 0.0 and ut > 0.0):
        raise DomainError("field must be positive at both check points")
    gap = float((x - y) @ (x - y))
    lhs = math.log(us)
    rhs = math.log(ut) + (lambda_kappa + d / 2.0) * math.log(t / s) + gap / (4.0 * (t - s))
    return VerificationReport.build(
        claim_id="harnack",
        grid_point=(s, tuple(x), t, tuple(y)),
        lhs=lhs,
        rhs=rhs,
        tolerance=tol,
    )


def log_convexity_check(
    t,
    x,
    y,
    kappa,
    tol: float = DEFAULT_TOLERANCE,
    rel_tol: float = _DEFAULT_REL_TOL,
) -> VerificationReport:
    """Convexity of x -> log(p_t(x, y) / p_t(x, 0)).

    The normalized log-kernel splits coordinate-wise and its Hessian is
    diagonal with entries (y_i/2t)^2 var(a_i); convexity is exactly their
    nonnegativity.  lhs is the largest violation, rhs is 0.
    """
    t, x, y, kappa = _prepare_grid_point(t, x, y, kappa)
    worst = -math.inf
    for i in range(kappa.d):
        k = kappa.values[i]
        if k == 0.0:
            entry = 0.0  # Gaussian: log q is linear in x_i
        else:
            a = x[i] * y[i] / (2.0 * t)
            entry = (y[i] / (2.0 * t)) ** 2 * moment_ratios(a, k, rel_tol).variance
        worst = max(worst, -entry)
    return VerificationReport.build(
        claim_id="log_convexity_diag",
        grid_point=(t, tuple(x), tuple(y)),
        lhs=float(worst),
        rhs=0.0,
        tolerance=tol,
    )


def log_convexity_midpoint_check(
    t,
    z1,
    z2,
    y,
    kappa,
    tol: float = DEFAULT_TOLERANCE,
    rel_tol: float = _DEFAULT_REL_TOL,
) -> VerificationReport:
    """Midpoint convexity of log q_t(., y) checked by direct evaluation:
    log q((z1+z2)/2) <= (log q(z1) + log q(z2)) / 2."""
    t, z1, y, kappa = _prepare_grid_point(t, z1, y, kappa)
    z2 = np.atleast_1d(np.asarray(z2, dtype=float))
    if z2.size != kappa.d or not np.all(np.isfinite(z2)):
        raise DomainError("second point must be finite with matching dimension")

    def log_q(z):
        zero = np.zeros(kappa.d)
        return log_kernel(t, z, y, kappa, rel_tol) - log_kernel(t, z, zero, kappa, rel_tol)

    mid = 0.5 * (z1 + z2)
    lhs = log_q(mid)
    rhs = 0.5 * (log_q(z1) + log_q(z2))
    return VerificationReport.build(
        claim_id="log_convexity_midpoint",
        grid_point=(t, tuple(z1), tuple(z2), tuple(y)),
        lhs=float(lhs),
        rhs=float(rhs),
        tolerance=tol,
    )
