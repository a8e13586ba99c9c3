"""Gauss quadrature with endpoint weights: Jacobi rules on [-1, 1] and
generalized Laguerre rules on [0, inf), built by Golub-Welsch.

The Jacobi weight (1-s)^alpha (1+s)^beta is singular at s = 1 whenever
alpha < 0 (alpha = kappa - 1 with kappa < 1 in the intended use); the rule
absorbs the singularity exactly by construction, so only the bounded smooth
part of an integrand is ever sampled.  Nodes are the eigenvalues of the
symmetric tridiagonal matrix of recurrence coefficients
(scipy.linalg.eigh_tridiagonal); weights are mu0 times the squared first
eigenvector components.

Rules are immutable and cached: scans request the same (alpha, beta, n)
thousands of times and adaptive callers walk the same doubling ladder.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "NODE_CAP",
    "NODE_START",
    "ConvergenceError",
    "DomainError",
    "HalflineRule",
    "JacobiRule",
    "gauss_jacobi_rule",
    "gauss_laguerre_rule",
    "halfline_rule",
    "log_gamma",
    "node_ladder",
]

NODE_START = 32
NODE_CAP = 4096

_WEIGHT_SUM_RTOL = 1e-12


class DomainError(ValueError):
    """Parameter outside the documented domain of an operation."""


class ConvergenceError(RuntimeError):
    """Adaptive refinement hit its node cap without meeting tolerance."""


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0.

    Thin wrapper over math.lgamma, kept as the single audit point for every
    Gamma evaluation in the package.
    """
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


@dataclass(frozen=True)
class JacobiRule:
    """n-point Gauss rule for integrals of f(s) (1-s)^alpha (1+s)^beta ds
    over [-1, 1].

    Exact for polynomial f up to degree 2n - 1.  Arrays are read-only; rules
    are shared through the cache and must never be mutated.
    """

    alpha: float
    beta: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of integrand values sampled at `nodes`."""
        return float(self.weights @ np.asarray(values))


@dataclass(frozen=True)
class HalflineRule:
    """n-point Gauss rule for integrals of f(u) u^exponent e^(-u) du over
    [0, inf), with exponent = kappa - 1/2 in the intended use (the image of
    the weight |y|^(2 kappa) e^(-c y^2) under u = c y^2)."""

    exponent: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of integrand values sampled at `nodes`."""
        return float(self.weights @ np.asarray(values))


_CACHE: dict[tuple, object] = {}
_CACHE_LOCK = threading.Lock()


def _key_float(x: float) -> float:
    # 15 significant digits: collapses -0.0/0.0 and string-parsed duplicates
    # without ever merging genuinely distinct parameters.
    return float(f"{float(x):.15g}")


def _cached(key, builder):
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    rule = builder()
    with _CACHE_LOCK:
        # first writer wins so every caller sees one identical object
        return _CACHE.setdefault(key, rule)


def _validate_order(n) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"node count must be an integer, got {n!r}")
    if n < 1:
        raise DomainError(f"node count must be >= 1, got {n}")
    return int(n)


def _golub_welsch(diag, off, mu0):
    if diag.size == 1:
        return diag.copy(), np.array([mu0])
    vals, vecs = eigh_tridiagonal(diag, off)
    return vals, mu0 * vecs[0, :] ** 2


def _build_jacobi(alpha: float, beta: float, n: int) -> JacobiRule:
    ab = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if n > 1:
        k = np.arange(1.0, n)
        diag[1:] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
    off = np.empty(n - 1) if n > 1 else np.empty(0)
    if n > 1:
        # k = 1 needs its own formula: the generic one is 0/0 when ab = -1
        off[0] = math.sqrt(
            4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0))
        )
    if n > 2:
        k = np.arange(2.0, n)
        s = 2.0 * k + ab
        off[1:] = np.sqrt(
            4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s * s - 1.0))
        )
    mu0 = math.exp(
        (ab + 1.0) * math.log(2.0)
        + log_gamma(alpha + 1.0)
        + log_gamma(beta + 1.0)
        - log_gamma(ab + 2.0)
    )
    nodes, weights = _golub_welsch(diag, off, mu0)

    if not (np.all(nodes > -1.0) and np.all(nodes < 1.0)):
        raise RuntimeError(f"Jacobi nodes escaped (-1, 1) for {(alpha, beta, n)}")
    if n > 1 and not np.all(np.diff(nodes) > 0.0):
        raise RuntimeError(f"Jacobi nodes not strictly increasing for {(alpha, beta, n)}")
    if not np.all(weights > 0.0):
        raise RuntimeError(f"nonpositive Jacobi weight for {(alpha, beta, n)}")
    if abs(float(weights.sum()) - mu0) > _WEIGHT_SUM_RTOL * mu0:
        raise RuntimeError(f"Jacobi weight sum off for {(alpha, beta, n)}")
    return JacobiRule(alpha=alpha, beta=beta, nodes=nodes, weights=weights)


def gauss_jacobi_rule(alpha: float, beta: float, n: int) -> JacobiRule:
    """Cached n-point Gauss-Jacobi rule for exponents alpha, beta > -1.

    Weight sum equals 2^(alpha+beta+1) B(alpha+1, beta+1); nodes of
    successive orders interlace.  Raises DomainError for exponents <= -1 or
    a non-positive order.
    """
    n = _validate_order(n)
    alpha = float(alpha)
    beta = float(beta)
    if not (alpha > -1.0 and beta > -1.0):
        raise DomainError(f"Jacobi exponents must exceed -1, got {(alpha, beta)}")
    key = ("jacobi", _key_float(alpha), _key_float(beta), n)
    return _cached(key, lambda: _build_jacobi(alpha, beta, n))


def _build_laguerre(exponent: float, n: int):
    k = np.arange(float(n))
    diag = 2.0 * k + exponent + 1.0
    off = np.sqrt(k[1:] * (k[1:] + exponent)) if n > 1 else np.empty(0)
    mu0 = math.exp(log_gamma(exponent + 1.0))
    nodes, weights = _golub_welsch(diag, off, mu0)

    if not np.all(nodes > 0.0):
        raise RuntimeError(f"Laguerre nodes escaped (0, inf) for {(exponent, n)}")
    if n > 1 and not np.all(np.diff(nodes) > 0.0):
        raise RuntimeError(f"Laguerre nodes not strictly increasing for {(exponent, n)}")
    # far-tail weights underflow to exactly 0.0 at large n; that is the only
    # nonpositive value tolerated
    if not np.all(weights >= 0.0):
        raise RuntimeError(f"negative Laguerre weight for {(exponent, n)}")
    if abs(float(weights.sum()) - mu0) > _WEIGHT_SUM_RTOL * mu0:
        raise RuntimeError(f"Laguerre weight sum off for {(exponent, n)}")
    return nodes, weights


def gauss_laguerre_rule(exponent: float, n: int) -> HalflineRule:
    """Cached n-point generalized Gauss-Laguerre rule, weight u^exponent e^(-u).

    exponent must exceed -1.  Weight sum equals Gamma(exponent + 1).
    """
    n = _validate_order(n)
    exponent = float(exponent)
    if not exponent > -1.0:
        raise DomainError(f"Laguerre exponent must exceed -1, got {exponent}")
    key = ("laguerre", _key_float(exponent), n)

    def build():
        nodes, weights = _build_laguerre(exponent, n)
        return HalflineRule(exponent=exponent, nodes=nodes, weights=weights)

    return _cached(key, build)


def halfline_rule(kappa: float, n: int) -> HalflineRule:
    """Cached rule for integrals of g(y) y^(2 kappa) e^(-c y^2) dy over
    [0, inf): substituting u = c y^2 gives weight u^(kappa - 1/2) e^(-u)
    (times the constant c^(-kappa-1/2) / 2, which the caller owns).

    kappa must be positive; kappa = 0 integrals are plain Gaussian moments
    and never come through here.
    """
    kappa = float(kappa)
    if not kappa > 0.0:
        raise DomainError(f"halfline_rule requires kappa > 0, got {kappa}")
    return gauss_laguerre_rule(kappa - 0.5, n)


def node_ladder(start: int = NODE_START, cap: int = NODE_CAP):
    """Yield the adaptive node counts start, 2*start, ... up to cap."""
    start = _validate_order(start)
    cap = _validate_order(cap)
    if cap < start:
        raise DomainError(f"node cap {cap} below start {start}")
    n = start
    while n <= cap:
        yield n
        n *= 2
