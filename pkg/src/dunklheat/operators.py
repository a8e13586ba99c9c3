"""Dunkl operators for the reflection group Z_2^d acting by sign flips.

The difference-differential operator attached to coordinate i is

    D_i f(x) = d_i f(x) + kappa_i / x_i * (f(x) - f(r_i x)),

with r_i the sign flip of coordinate i, and the Dunkl Laplacian is

    L f = Delta f + sum_i kappa_i / x_i^2 * (2 x_i d_i f(x) - f(x) + f(r_i x)).

Both difference quotients have removable singularities on the hyperplanes
x_i = 0; within a scaled tolerance of a hyperplane the evaluation switches
to the Taylor limit, which costs one order of accuracy (error O(x_i))
instead of losing everything to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import DomainError

__all__ = [
    "EPS_REFLECTION_SCALE",
    "ChainRuleResidual",
    "MultiplicityZ2",
    "PSI_CUBE",
    "PSI_EXP",
    "PSI_LOG",
    "PSI_SQUARE",
    "RootSystemZ2",
    "ScalarField",
    "SmoothFunction",
    "SpaceTimeField",
    "chain_rule_residual",
    "compose_field",
    "dunkl_derivative",
    "dunkl_gradient",
    "dunkl_laplacian",
    "pi_psi",
    "reflect",
    "reflection_epsilon",
]

# hyperplane threshold is relative to the point's size: 1e-7 * (1 + |x|)
EPS_REFLECTION_SCALE = 1e-7


@dataclass(frozen=True)
class MultiplicityZ2:
    """Multiplicity function on the roots of Z_2^d: one kappa_i >= 0 per
    coordinate, constant on each conjugacy class (here: each coordinate)."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise DomainError("multiplicity needs at least one coordinate")
        for k in self.values:
            if not (math.isfinite(k) and k >= 0.0):
                raise DomainError(f"multiplicities must be finite and >= 0, got {k!r}")

    @classmethod
    def of(cls, values) -> "MultiplicityZ2":
        if isinstance(values, cls):
            return values
        if np.isscalar(values):
            return cls((float(values),))
        return cls(tuple(float(v) for v in values))

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def lambda_total(self) -> float:
        """lambda_kappa = sum_i kappa_i, the homogeneity shift of the measure."""
        return float(sum(self.values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class RootSystemZ2:
    """The root system {+-sqrt(2) e_i} normalized to |alpha|^2 = 2, so the
    general reflection formula collapses to a per-coordinate sign flip."""

    d: int

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")

    @property
    def positive_roots(self) -> np.ndarray:
        return math.sqrt(2.0) * np.eye(self.d)

    def reflect(self, x: np.ndarray, axis: int) -> np.ndarray:
        return reflect(x, axis)


def reflect(x: np.ndarray, axis: int) -> np.ndarray:
    """Image of x under the sign flip of the given coordinate (0-based)."""
    x = np.asarray(x, dtype=float)
    if not 0 <= axis < x.size:
        raise DomainError(f"axis {axis} out of range for dimension {x.size}")
    out = x.copy()
    out[axis] = -out[axis]
    return out


def reflection_epsilon(x: np.ndarray) -> float:
    """Distance below which a coordinate counts as sitting on its hyperplane."""
    return EPS_REFLECTION_SCALE * (1.0 + float(np.linalg.norm(x)))


@dataclass(frozen=True)
class ScalarField:
    """A scalar function with analytic first and diagonal second derivatives.

    value, gradient, hessian_diag are callables of a point in R^d.  Fields
    built by `from_callable` differentiate numerically instead and are
    flagged `analytic=False`: good to ~1e-10 (gradient) and ~1e-9 (hessian),
    not to the 1e-12 the analytic contracts assume.
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian_diag: Callable[[np.ndarray], np.ndarray]
    analytic: bool = True

    @classmethod
    def from_callable(cls, f: Callable[[np.ndarray], float], rel_step: float = 1e-5):
        """Finite-difference adapter (fourth-order central stencils)."""

        def gradient(x):
            x = np.asarray(x, dtype=float)
            out = np.empty(x.size)
            for i in range(x.size):
                h = rel_step * (1.0 + abs(x[i]))
                e = np.zeros(x.size)
                e[i] = 1.0
                out[i] = (
                    -f(x + 2 * h * e) + 8 * f(x + h * e) - 8 * f(x - h * e) + f(x - 2 * h * e)
                ) / (12 * h)
            return out

        def hessian_diag(x):
            x = np.asarray(x, dtype=float)
            out = np.empty(x.size)
            fx = f(x)
            for i in range(x.size):
                # round-off grows like eps/h^2: the second derivative needs a
                # much larger step than the first
                h = math.sqrt(rel_step) * (1.0 + abs(x[i]))
                e = np.zeros(x.size)
                e[i] = 1.0
                out[i] = (
                    -f(x + 2 * h * e)
                    + 16 * f(x + h * e)
                    - 30 * fx
                    + 16 * f(x - h * e)
                    - f(x - 2 * h * e)
                ) / (12 * h * h)
            return out

        return cls(value=f, gradient=gradient, hessian_diag=hessian_diag, analytic=False)


@dataclass(frozen=True)
class SpaceTimeField:
    """A positive space-time function u(t, x) with the derivatives the
    parabolic inequalities consume: space gradient, diagonal space Hessian,
    and time derivative.  All callables take (t, x)."""

    value: Callable[[float, np.ndarray], float]
    gradient: Callable[[float, np.ndarray], np.ndarray]
    hessian_diag: Callable[[float, np.ndarray], np.ndarray]
    time_derivative: Callable[[float, np.ndarray], float]
    analytic: bool = True

    def at(self, t: float) -> ScalarField:
        """Freeze time: the spatial slice as a ScalarField."""
        return ScalarField(
            value=lambda x: self.value(t, x),
            gradient=lambda x: self.gradient(t, x),
            hessian_diag=lambda x: self.hessian_diag(t, x),
            analytic=self.analytic,
        )


@dataclass(frozen=True)
class SmoothFunction:
    """A C^2 map psi: R -> R with its first two derivatives, for composition
    against scalar fields."""

    name: str
    value: Callable[[float], float]
    deriv: Callable[[float], float]
    second_deriv: Callable[[float], float]


PSI_LOG = SmoothFunction("log", math.log, lambda t: 1.0 / t, lambda t: -1.0 / (t * t))
PSI_EXP = SmoothFunction("exp", math.exp, math.exp, math.exp)
PSI_SQUARE = SmoothFunction("square", lambda t: t * t, lambda t: 2.0 * t, lambda t: 2.0)
PSI_CUBE = SmoothFunction(
    "cube", lambda t: t**3, lambda t: 3.0 * t * t, lambda t: 6.0 * t
)


def compose_field(psi: SmoothFunction, f: ScalarField) -> ScalarField:
    """psi composed with f, with chain-rule derivatives."""

    def value(x):
        return psi.value(f.value(x))

    def gradient(x):
        return psi.deriv(f.value(x)) * f.gradient(x)

    def hessian_diag(x):
        fx = f.value(x)
        g = f.gradient(x)
        return psi.second_deriv(fx) * g * g + psi.deriv(fx) * f.hessian_diag(x)

    return ScalarField(
        value=value, gradient=gradient, hessian_diag=hessian_diag, analytic=f.analytic
    )


def _prepare(x, kappa):
    x = np.asarray(x, dtype=float)
    kappa = MultiplicityZ2.of(kappa)
    if kappa.d != x.size:
        raise DomainError(f"point has dimension {x.size}, multiplicity has {kappa.d}")
    return x, kappa


def dunkl_derivative(f: ScalarField, x, axis: int, kappa) -> float:
    """D_i f(x).  On the hyperplane |x_i| < eps the difference quotient is
    replaced by its limit (1 + 2 kappa_i) d_i f(x)."""
    x, kappa = _prepare(x, kappa)
    if not 0 <= axis < x.size:
        raise DomainError(f"axis {axis} out of range for dimension {x.size}")
    k = kappa.values[axis]
    di = float(f.gradient(x)[axis])
    if k == 0.0:
        return di
    if abs(x[axis]) < reflection_epsilon(x):
        return (1.0 + 2.0 * k) * di
    return di + k / x[axis] * (f.value(x) - f.value(reflect(x, axis)))


def dunkl_gradient(f: ScalarField, x, kappa) -> np.ndarray:
    """All d Dunkl derivatives at once."""
    x, kappa = _prepare(x, kappa)
    return np.array([dunkl_derivative(f, x, i, kappa) for i in range(x.size)])


def dunkl_laplacian(f: ScalarField, x, kappa) -> float:
    """L f(x) = Delta f(x) + sum_i kappa_i/x_i^2 (2 x_i d_i f - f + f o r_i).

    The i-th correction term takes its removable-singularity limit
    2 kappa_i d_ii f(x) when |x_i| < eps, so the whole i-th contribution
    degenerates to (1 + 2 kappa_i) d_ii f(x) there.
    """
    x, kappa = _prepare(x, kappa)
    grad = np.asarray(f.gradient(x), dtype=float)
    hess = np.asarray(f.hessian_diag(x), dtype=float)
    total = float(hess.sum())
    eps = reflection_epsilon(x)
    fx = None
    for i, k in enumerate(kappa.values):
        if k == 0.0:
            continue
        if abs(x[i]) < eps:
            total += 2.0 * k * hess[i]
        else:
            if fx is None:
                fx = f.value(x)
            total += k / (x[i] * x[i]) * (
                2.0 * x[i] * grad[i] - fx + f.value(reflect(x, i))
            )
    return total


def pi_psi(f: ScalarField, psi: SmoothFunction, x, kappa) -> float:
    """The reflection defect Pi_psi(f)(x) = sum_i kappa_i/x_i^2 *
    [psi(f(r_i x)) - psi(f(x)) - psi'(f(x)) (f(r_i x) - f(x))].

    Each summand is a Bregman divergence of psi, so the total is >= 0 for
    convex psi and <= 0 for concave psi (log).  The hyperplane limit of the
    i-th term is 2 kappa_i psi''(f(x)) (d_i f(x))^2: the divergence is
    psi''(f) delta^2/2 + O(delta^3) with delta = f(r_i x) - f(x) =
    -2 x_i d_i f + O(x_i^2).
    """
    x, kappa = _prepare(x, kappa)
    fx = float(f.value(x))
    total = 0.0
    eps = reflection_epsilon(x)
    grad = None
    for i, k in enumerate(kappa.values):
        if k == 0.0:
            continue
        if abs(x[i]) < eps:
            if grad is None:
                grad = np.asarray(f.gradient(x), dtype=float)
            total += 2.0 * k * psi.second_deriv(fx) * grad[i] * grad[i]
        else:
            fr = float(f.value(reflect(x, i)))
            bregman = psi.value(fr) - psi.value(fx) - psi.deriv(fx) * (fr - fx)
            total += k / (x[i] * x[i]) * bregman
    return total


@dataclass(frozen=True)
class ChainRuleResidual:
    """L(psi o f) against psi'(f) L f + psi''(f) |grad f|^2 + Pi_psi(f)."""

    lhs: float
    rhs: float
    scale: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs


def chain_rule_residual(f: ScalarField, psi: SmoothFunction, x, kappa) -> ChainRuleResidual:
    """Evaluate both sides of the chain rule for the Dunkl Laplacian.

    The identity is exact; the returned residual is pure numerical error and
    its contract is |residual| <= 1e-8 * scale for analytic fields, where
    scale is the largest magnitude among the rhs terms and the lhs.
    """
    x, kappa = _prepare(x, kappa)
    lhs = dunkl_laplacian(compose_field(psi, f), x, kappa)
    fx = float(f.value(x))
    grad = np.asarray(f.gradient(x), dtype=float)
    term_lap = psi.deriv(fx) * dunkl_laplacian(f, x, kappa)
    term_grad = psi.second_deriv(fx) * float(grad @ grad)
    term_pi = pi_psi(f, psi, x, kappa)
    rhs = term_lap + term_grad + term_pi
    scale = max(abs(lhs), abs(term_lap), abs(term_grad), abs(term_pi), 1.0)
    return ChainRuleResidual(lhs=lhs, rhs=rhs, scale=scale)
