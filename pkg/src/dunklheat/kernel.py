"""Heat kernel of the Dunkl Laplacian for Z_2^d.

The d-dimensional kernel is a product of 1d kernels

    p_t(u, v) = exp(-(u^2 + v^2)/(4t)) E_kappa(u/sqrt(2t), v/sqrt(2t))
                / (c_kappa (2t)^(kappa + 1/2)),

where E_kappa is the rank-one Dunkl kernel: the average of exp(s a), with
tilt a = u v / (2t), against the density (1-s)^(kappa-1) (1+s)^kappa on
[-1, 1].  Everything the package computes about the kernel reduces to the
first three tilted moments m_k(a) = int s^k (1-s)^(kappa-1) (1+s)^kappa
e^(s a) ds, always handled in log space: log m0 carries the size, and the
ratios r1 = m1/m0, r2 = m2/m0 carry the shape (r1 is d/da log m0, and
r2 - r1^2 >= 0 is the variance of s under the tilted density).

Two quadrature branches cover all tilts.  Gauss-Jacobi on [-1, 1] resolves
|a| <= 50; its node demand grows linearly with |a| because e^(sa) becomes a
boundary layer at s = sign(a).  Beyond that the exact substitution
1 -+ s = r/|a| maps the moments onto a generalized Gauss-Laguerre rule
whose node demand is flat in |a|, so tilts of order 10^4 (small t, far
corners of a grid) cost the same as tilts of order 10^2.

kappa = 0 coordinates never touch quadrature: the kernel degenerates to the
Gauss-Weierstrass kernel and every formula has a closed form.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _accel
from .operators import MultiplicityZ2
from .quadrature import (
    NODE_CAP,
    NODE_START,
    ConvergenceError,
    DomainError,
    gauss_jacobi_rule,
    gauss_laguerre_rule,
    log_gamma,
    node_ladder,
)

__all__ = [
    "KernelPoint",
    "MomentRatios",
    "TILT_SWITCH",
    "e_kappa",
    "kernel",
    "kernel_1d",
    "kernel_derivatives_1d_batch",
    "log_e_kappa",
    "log_gaussian_mass",
    "log_kernel",
    "log_kernel_1d",
    "log_kernel_derivatives",
    "moment_ratios",
    "moment_stats",
]

# Jacobi-vs-Laguerre branch boundary; both branches hold 1e-12 accuracy in a
# wide window around it (regression-tested), so the exact value is not delicate.
TILT_SWITCH = 50.0

_DEFAULT_REL_TOL = 1e-10


def log_gaussian_mass(kappa: float) -> float:
    """log of c_kappa = int exp(-u^2/2) |u|^(2 kappa) du
    = 2^(kappa + 1/2) Gamma(kappa + 1/2).

    This is the per-coordinate normalizer that makes the kernel a Markov
    density for the measure |u|^(2 kappa) du.
    """
    kappa = float(kappa)
    if kappa < 0.0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    return (kappa + 0.5) * math.log(2.0) + log_gamma(kappa + 0.5)


def _log_e_normalizer(kappa: float) -> float:
    # C_kappa = Gamma(kappa + 1/2) / (sqrt(pi) Gamma(kappa)); C_kappa m0(0) = 1
    return log_gamma(kappa + 0.5) - 0.5 * math.log(math.pi) - log_gamma(kappa)


def _validate_time(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"time must be positive and finite, got {t!r}")
    return t


def _adaptive_eval(evaluate, a_sub, rel_tol, max_nodes):
    """Double the node count until (log m0, r1, r2) settle entry by entry.

    evaluate(n, a) returns the three arrays at rule order n; two successive
    orders within rel_tol certify an entry.  The log m0 comparison is
    absolute on the log scale, which is relative on m0 itself.
    """
    out = np.empty((3, a_sub.size))
    pending = np.arange(a_sub.size)
    prev = None
    for n in node_ladder(NODE_START, max_nodes):
        cur = np.stack(evaluate(n, a_sub[pending]))
        if prev is not None:
            ok = (
                (np.abs(cur[0] - prev[0]) <= rel_tol * np.maximum(1.0, np.abs(cur[0])))
                & (np.abs(cur[1] - prev[1]) <= rel_tol)
                & (np.abs(cur[2] - prev[2]) <= rel_tol)
            )
            out[:, pending[ok]] = cur[:, ok]
            pending = pending[~ok]
            if pending.size == 0:
                return out
            prev = cur[:, ~ok]
        else:
            prev = cur
    worst = float(np.abs(a_sub[pending]).max())
    raise ConvergenceError(
        f"tilted moments did not settle within {max_nodes} nodes "
        f"(rel_tol={rel_tol}, {pending.size} tilts pending, worst |a|={worst})"
    )


def moment_stats(a, kappa: float, rel_tol: float = _DEFAULT_REL_TOL, max_nodes: int = NODE_CAP):
    """(log m0, r1, r2) for a batch of tilts, as a (3, len(a)) array.

    Requires kappa > 0; kappa = 0 callers use their Gaussian closed forms
    and never need moments.
    """
    kappa = float(kappa)
    if not kappa > 0.0:
        raise DomainError(f"moment_stats requires kappa > 0, got {kappa}")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if not np.all(np.isfinite(a)):
        raise DomainError("tilts must be finite")
    out = np.empty((3, a.size))

    abs_a = np.abs(a)
    small = abs_a <= TILT_SWITCH
    idx = np.flatnonzero(small)
    if idx.size:

        def eval_jacobi(n, sub):
            rule = gauss_jacobi_rule(kappa - 1.0, kappa, n)
            s0, s1, s2 = _accel.jacobi_tilted_sums(rule.nodes, rule.weights, sub)
            return np.abs(sub) + np.log(s0), s1 / s0, s2 / s0

        out[:, idx] = _adaptive_eval(eval_jacobi, a[idx], rel_tol, max_nodes)

    idx = np.flatnonzero(a > TILT_SWITCH)
    if idx.size:
        # 1 - s = r/a: weight becomes r^(kappa-1) e^(-r), the leftover factor
        # (2 - r/a)^kappa is smooth, and log m0 = a - kappa log a + log(sum)
        def eval_pos(n, sub):
            rule = gauss_laguerre_rule(kappa - 1.0, n)
            s0, s1, s2 = _accel.laguerre_tilted_sums(rule.nodes, rule.weights, sub, kappa)
            return sub - kappa * np.log(sub) + np.log(s0), s1 / s0, s2 / s0

        out[:, idx] = _adaptive_eval(eval_pos, a[idx], rel_tol, max_nodes)

    idx = np.flatnonzero(a < -TILT_SWITCH)
    if idx.size:
        # mirror substitution 1 + s = r/|a|: weight r^kappa e^(-r), factor
        # (2 - r/|a|)^(kappa-1), s = -(1 - r/|a|) so the odd moment flips sign
        def eval_neg(n, sub):
            aa = -sub
            rule = gauss_laguerre_rule(kappa, n)
            s0, s1, s2 = _accel.laguerre_tilted_sums(rule.nodes, rule.weights, aa, kappa - 1.0)
            return aa - (kappa + 1.0) * np.log(aa) + np.log(s0), -s1 / s0, s2 / s0

        out[:, idx] = _adaptive_eval(eval_neg, a[idx], rel_tol, max_nodes)

    if not (np.all(out[1] > -1.0) and np.all(out[1] < 1.0)):
        raise RuntimeError("moment ratio r1 escaped (-1, 1)")
    if not (np.all(out[2] > 0.0) and np.all(out[2] < 1.0)):
        raise RuntimeError("moment ratio r2 escaped (0, 1)")
    if np.any(out[2] - out[1] * out[1] < 0.0):
        raise RuntimeError("tilted moment variance went negative")
    return out


@dataclass(frozen=True)
class MomentRatios:
    """log m0 and the first two moment ratios of the tilted density at one
    tilt.  variance = r2 - r1^2 is the tilted density's variance of s, the
    quantity whose nonnegativity drives every inequality downstream."""

    a: float
    kappa: float
    log_m0: float
    r1: float
    r2: float

    @property
    def variance(self) -> float:
        return self.r2 - self.r1 * self.r1


_MOMENT_CACHE: dict[tuple, MomentRatios] = {}
_MOMENT_LOCK = threading.Lock()


def moment_ratios(
    a: float,
    kappa: float,
    rel_tol: float = _DEFAULT_REL_TOL,
    max_nodes: int = NODE_CAP,
) -> MomentRatios:
    """Cached scalar interface to moment_stats.

    Scans hit the same tilt for many grid points (a depends only on
    x_i y_i / (2t)), so memoizing on the exact float arguments removes most
    quadrature work.
    """
    key = (float(a), float(kappa), float(rel_tol), int(max_nodes))
    with _MOMENT_LOCK:
        hit = _MOMENT_CACHE.get(key)
    if hit is not None:
        return hit
    log_m0, r1, r2 = (float(v) for v in moment_stats(a, kappa, rel_tol, max_nodes)[:, 0])
    ratios = MomentRatios(a=float(a), kappa=float(kappa), log_m0=log_m0, r1=r1, r2=r2)
    with _MOMENT_LOCK:
        return _MOMENT_CACHE.setdefault(key, ratios)


def log_e_kappa(x: float, y: float, kappa: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """log E_kappa(x, y) for a single coordinate pair.

    E_0(x, y) = e^(x y) exactly; for kappa > 0 the integral representation
    C_kappa m0(x y) applies, and E_kappa(x, 0) = 1 because C_kappa m0(0) = 1.
    """
    kappa = float(kappa)
    if kappa < 0.0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    a = float(x) * float(y)
    if kappa == 0.0:
        return a
    if a == 0.0:
        return 0.0
    return _log_e_normalizer(kappa) + float(moment_ratios(a, kappa, rel_tol).log_m0)


def e_kappa(x: float, y: float, kappa: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """E_kappa(x, y) itself; raises OverflowError where only the log form
    can represent the value."""
    return math.exp(log_e_kappa(x, y, kappa, rel_tol))


def _log_kernel_1d_prefactor(t: float, kappa: float) -> float:
    return -log_gaussian_mass(kappa) - (kappa + 0.5) * math.log(2.0 * t)


def log_kernel_1d(t: float, u: float, v: float, kappa: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """log p_t(u, v) for one coordinate."""
    t = _validate_time(t)
    kappa = float(kappa)
    u = float(u)
    v = float(v)
    if kappa == 0.0:
        return -0.5 * math.log(4.0 * math.pi * t) - (u - v) ** 2 / (4.0 * t)
    a = u * v / (2.0 * t)
    log_e = 0.0 if a == 0.0 else _log_e_normalizer(kappa) + float(
        moment_ratios(a, kappa, rel_tol).log_m0
    )
    return _log_kernel_1d_prefactor(t, kappa) - (u * u + v * v) / (4.0 * t) + log_e


def kernel_1d(t: float, u: float, v: float, kappa: float, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """p_t(u, v) for one coordinate (symmetric and strictly positive)."""
    return math.exp(log_kernel_1d(t, u, v, kappa, rel_tol))


def _prepare_point(t, x, y, kappa):
    t = _validate_time(t)
    kappa = MultiplicityZ2.of(kappa)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.size != kappa.d or y.size != kappa.d:
        raise DomainError(
            f"points have dimensions {x.size}, {y.size}; multiplicity has {kappa.d}"
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("points must be finite")
    return t, x, y, kappa


def log_kernel(t, x, y, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """log p_t(x, y), the sum of the per-coordinate logs."""
    t, x, y, kappa = _prepare_point(t, x, y, kappa)
    return float(
        sum(log_kernel_1d(t, x[i], y[i], kappa.values[i], rel_tol) for i in range(kappa.d))
    )


def kernel(t, x, y, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> float:
    """p_t(x, y).  Underflows to 0.0 in the far field; use log_kernel there."""
    return math.exp(min(log_kernel(t, x, y, kappa, rel_tol), 709.0))


@dataclass(frozen=True)
class KernelPoint:
    """One kernel evaluation with every analytic derivative the inequality
    suite needs: log p, its space gradient and diagonal space Hessian, and
    its time derivative.  Kept in log space throughout because far-field
    values underflow doubles long before the log does anything
    interesting."""

    t: float
    x: np.ndarray
    y: np.ndarray
    kappa: MultiplicityZ2
    log_p: float
    grad_x_log_p: np.ndarray
    hess_diag_x_log_p: np.ndarray
    dt_log_p: float

    def __post_init__(self):
        for arr in (self.x, self.y, self.grad_x_log_p, self.hess_diag_x_log_p):
            arr.setflags(write=False)
        if not math.isfinite(self.log_p) or not math.isfinite(self.dt_log_p):
            raise DomainError("kernel point has non-finite entries")

    @property
    def p(self) -> float:
        return math.exp(self.log_p) if self.log_p < 709.0 else math.inf


def log_kernel_derivatives(t, x, y, kappa, rel_tol: float = _DEFAULT_REL_TOL) -> KernelPoint:
    """Derivatives of log p_t(., y) at x, assembled per coordinate.

    For kappa_i > 0, with a_i = x_i y_i / (2t) and the moment ratios at a_i:

        d_i   log p = -x_i/(2t) + y_i/(2t) r1
        d_ii  log p = -1/(2t) + y_i^2/(4t^2) (r2 - r1^2)
        d_t   log p = sum_i [ -(kappa_i + 1/2)/t + (x_i^2 + y_i^2)/(4t^2)
                              - (a_i/t) r1 ]

    kappa_i = 0 coordinates use the Gaussian closed forms (the same
    expressions with r1 = r2 = 1).
    """
    t, x, y, kappa = _prepare_point(t, x, y, kappa)
    d = kappa.d
    grad = np.empty(d)
    hess = np.empty(d)
    dt_total = 0.0
    log_total = 0.0
    for i in range(d):
        k = kappa.values[i]
        u = x[i]
        v = y[i]
        if k == 0.0:
            log_total += -0.5 * math.log(4.0 * math.pi * t) - (u - v) ** 2 / (4.0 * t)
            grad[i] = -(u - v) / (2.0 * t)
            hess[i] = -1.0 / (2.0 * t)
            dt_total += -0.5 / t + (u - v) ** 2 / (4.0 * t * t)
            continue
        a = u * v / (2.0 * t)
        if a == 0.0:
            log_m0, r1, r2 = (
                -_log_e_normalizer(k),
                1.0 / (2.0 * k + 1.0),
                1.0 / (2.0 * k + 1.0),
            )
        else:
            ratios = moment_ratios(a, k, rel_tol)
            log_m0, r1, r2 = ratios.log_m0, ratios.r1, ratios.r2
        log_total += (
            _log_kernel_1d_prefactor(t, k)
            - (u * u + v * v) / (4.0 * t)
            + _log_e_normalizer(k)
            + log_m0
        )
        grad[i] = -u / (2.0 * t) + v / (2.0 * t) * r1
        hess[i] = -1.0 / (2.0 * t) + v * v / (4.0 * t * t) * (r2 - r1 * r1)
        dt_total += -(k + 0.5) / t + (u * u + v * v) / (4.0 * t * t) - (a / t) * r1
    return KernelPoint(
        t=t,
        x=x.copy(),
        y=y.copy(),
        kappa=kappa,
        log_p=float(log_total),
        grad_x_log_p=grad,
        hess_diag_x_log_p=hess,
        dt_log_p=float(dt_total),
    )


def kernel_derivatives_1d_batch(
    t: float,
    u: float,
    v,
    kappa: float,
    rel_tol: float = _DEFAULT_REL_TOL,
    max_nodes: int = NODE_CAP,
):
    """(log p, d/du log p, d2/du2 log p, d/dt log p) for one coordinate at a
    batch of right arguments v, the workhorse of semigroup quadrature."""
    t = _validate_time(t)
    kappa = float(kappa)
    u = float(u)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if kappa == 0.0:
        diff = u - v
        log_p = -0.5 * math.log(4.0 * math.pi * t) - diff * diff / (4.0 * t)
        d1 = -diff / (2.0 * t)
        d2 = np.full(v.shape, -1.0 / (2.0 * t))
        dt = -0.5 / t + diff * diff / (4.0 * t * t)
        return log_p, d1, d2, dt
    a = u * v / (2.0 * t)
    log_m0 = np.empty(v.shape)
    r1 = np.empty(v.shape)
    r2 = np.empty(v.shape)
    zero = a == 0.0
    if zero.any():
        log_m0[zero] = -_log_e_normalizer(kappa)
        r1[zero] = 1.0 / (2.0 * kappa + 1.0)
        r2[zero] = 1.0 / (2.0 * kappa + 1.0)
    live = ~zero
    if live.any():
        log_m0[live], r1[live], r2[live] = moment_stats(a[live], kappa, rel_tol, max_nodes)
    log_p = (
        _log_kernel_1d_prefactor(t, kappa)
        - (u * u + v * v) / (4.0 * t)
        + _log_e_normalizer(kappa)
        + log_m0
    )
    d1 = -u / (2.0 * t) + v / (2.0 * t) * r1
    d2 = -1.0 / (2.0 * t) + v * v / (4.0 * t * t) * (r2 - r1 * r1)
    dt = -(kappa + 0.5) / t + (u * u + v * v) / (4.0 * t * t) - (a / t) * r1
    return log_p, d1, d2, dt
