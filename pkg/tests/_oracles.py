"""Independent reference computations used only by the test suite.

Everything here deliberately avoids the package's own quadrature and moment
machinery: the fast paths are judged against brute-force graded panels,
elementary closed forms, and high-precision special-function identities.
"""

import math

import mpmath
import numpy as np
from scipy.special import gammaln

# 4-point Gauss-Legendre rule on [-1, 1], used only as the per-panel rule of
# the brute-force integrator below.
_GL4_NODES = np.array(
    [
        -0.8611363115940526,
        -0.3399810435848563,
        0.3399810435848563,
        0.8611363115940526,
    ]
)
_GL4_WEIGHTS = np.array(
    [
        0.3478548451374538,
        0.6521451548625461,
        0.6521451548625461,
        0.3478548451374538,
    ]
)


def _graded_panel_points(n_panels, floor=1e-60):
    """Panel endpoints on (0, 1], geometrically graded toward 0.

    The substituted integrands below behave like w^(2*kappa-1) at w = 0,
    which uniform panels cannot resolve for kappa < 1/2.  Geometric grading
    makes every panel small relative to its distance from the singularity;
    the dropped piece [0, floor] contributes at most floor^(2*kappa).
    """
    edges = np.geomspace(floor, 1.0, n_panels + 1)
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    points = mid[:, None] + half[:, None] * _GL4_NODES[None, :]
    weights = half[:, None] * _GL4_WEIGHTS[None, :]
    return points.ravel(), weights.ravel()


def brute_force_log_moments(a, kappa, n_panels=100_000):
    """Return (log_m0, r1, r2) for m_k = integral of s^k (1-s)^(kappa-1)
    (1+s)^kappa e^(a s) ds over [-1, 1], k = 0, 1, 2.

    Split at s = 0 and substitute 1-s = w^2 on the right half, 1+s = v^2 on
    the left half, so the weight's endpoint singularity becomes an algebraic
    factor at the panel grid's graded end.  Every exponential is evaluated
    shifted by exp(-|a|) so nothing overflows.
    """
    a = float(a)
    kappa = float(kappa)
    if kappa <= 0:
        raise ValueError("brute-force moments need kappa > 0")
    m = abs(a)

    # right half: s = 1 - w^2, ds = -2w dw, contribution
    #   2 * exp(a) * int_0^1 w^(2k-1) (1-w^2)^k (2-w^2)^kappa exp(-a w^2) dw
    w, pw = _graded_panel_points(n_panels)
    w2 = w * w
    s_right = 1.0 - w2
    base_right = (
        2.0
        * np.power(w, 2.0 * kappa - 1.0)
        * np.power(2.0 - w2, kappa)
        * np.exp((a - m) - a * w2)
    )
    r0 = float(pw @ base_right)
    r1_ = float(pw @ (base_right * s_right))
    r2_ = float(pw @ (base_right * s_right * s_right))

    # left half: s = v^2 - 1, ds = 2v dv, contribution
    #   2 * exp(-a) * int_0^1 v^(2k+1) (2-v^2)^(kappa-1) (v^2-1)^k exp(a v^2) dv
    v, pv = _graded_panel_points(n_panels)
    v2 = v * v
    s_left = v2 - 1.0
    base_left = (
        2.0
        * np.power(v, 2.0 * kappa + 1.0)
        * np.power(2.0 - v2, kappa - 1.0)
        * np.exp((-a - m) + a * v2)
    )
    l0 = float(pv @ base_left)
    l1 = float(pv @ (base_left * s_left))
    l2 = float(pv @ (base_left * s_left * s_left))

    m0s = r0 + l0
    m1s = r1_ + l1
    m2s = r2_ + l2
    return m + math.log(m0s), m1s / m0s, m2s / m0s


def brute_force_f(a, kappa, n_panels=100_000):
    """f(a) = 2 a r1(a) + log m0(-a) - log m0(a), all from brute force."""
    log_m0_pos, r1_pos, _ = brute_force_log_moments(a, kappa, n_panels)
    log_m0_neg, _, _ = brute_force_log_moments(-a, kappa, n_panels)
    return 2.0 * a * r1_pos + log_m0_neg - log_m0_pos


def brute_force_log_e(x, y, kappa, n_panels=100_000):
    """log E_kappa(x, y) from the brute-force m0 and the exact constant."""
    log_c = gammaln(kappa + 0.5) - 0.5 * math.log(math.pi) - gammaln(kappa)
    log_m0, _, _ = brute_force_log_moments(x * y, kappa, n_panels)
    return float(log_c + log_m0)


# ---------------------------------------------------------------------------
# closed forms


def r1_at_zero(kappa):
    """m1(0)/m0(0) = 1/(2 kappa + 1), by two Beta-integral reductions."""
    return 1.0 / (2.0 * kappa + 1.0)


def r2_at_zero(kappa):
    """m2(0)/m0(0), which the same Beta reduction collapses to 1/(2 kappa + 1)."""
    return 1.0 / (2.0 * kappa + 1.0)


def variance_at_zero(kappa):
    """r2(0) - r1(0)^2 = 2 kappa / (2 kappa + 1)^2."""
    return 2.0 * kappa / (2.0 * kappa + 1.0) ** 2


def log_m0_kappa_one(a):
    """kappa = 1 weight is just (1+s): m0(a) = 2 e^a / a - 2 sinh(a) / a^2.

    Evaluated in mpmath because the two terms cancel to O(a^2) near 0.
    """
    with mpmath.workdps(50):
        aa = mpmath.mpf(a)
        if aa == 0:
            return math.log(2.0)
        m0 = 2 * mpmath.e**aa / aa - 2 * mpmath.sinh(aa) / aa**2
        return float(mpmath.log(m0))


def r1_kappa_one(a):
    """m1/m0 for kappa = 1, elementary after two integrations by parts."""
    with mpmath.workdps(50):
        aa = mpmath.mpf(a)
        if aa == 0:
            return float(mpmath.mpf(1) / 3)
        # m1(a) = int s (1+s) e^(as) ds over [-1, 1]
        e_p = mpmath.e**aa
        e_m = mpmath.e**-aa
        m0 = 2 * e_p / aa - (e_p - e_m) / aa**2
        m1 = (
            2 * e_p / aa
            - (3 * e_p + e_m) / aa**2
            + 2 * (e_p - e_m) / aa**3
        )
        return float(m1 / m0)


def log_m0_kappa_half(a):
    """kappa = 1/2: m0(a) = pi (I0(a) + I1(a)) via s = cos(theta)."""
    with mpmath.workdps(50):
        aa = mpmath.mpf(a)
        val = mpmath.pi * (mpmath.besseli(0, aa) + mpmath.besseli(1, aa))
        return float(mpmath.log(val))


def log_e_kappa_half(x, y):
    """E_(1/2)(x, y) = I0(xy) + I1(xy); the normalizer C_(1/2) is 1/pi."""
    with mpmath.workdps(50):
        aa = mpmath.mpf(x) * mpmath.mpf(y)
        return float(mpmath.log(mpmath.besseli(0, aa) + mpmath.besseli(1, aa)))


def gaussian_log_kernel(t, u, v):
    """kappa = 0 closed form: log of the 1d Gauss-Weierstrass kernel."""
    return -0.5 * math.log(4.0 * math.pi * t) - (u - v) ** 2 / (4.0 * t)


def gaussian_log_kernel_derivatives(t, u, v):
    """(d/du, d2/du2, d/dt) of gaussian_log_kernel."""
    return (
        -(u - v) / (2.0 * t),
        -1.0 / (2.0 * t),
        -0.5 / t + (u - v) ** 2 / (4.0 * t * t),
    )


# ---------------------------------------------------------------------------
# quadrature references


def jacobi_monomial_integral(alpha, beta, m):
    """int s^m (1-s)^alpha (1+s)^beta ds over [-1, 1], exact Beta sum.

    The alternating binomial sum cancels badly in doubles for larger m, so it
    runs at 60 digits and rounds once at the end.
    """
    with mpmath.workdps(60):
        al = mpmath.mpf(alpha)
        be = mpmath.mpf(beta)
        total = mpmath.mpf(0)
        for j in range(m + 1):
            total += (
                mpmath.binomial(m, j)
                * mpmath.mpf(2) ** j
                * (-1) ** (m - j)
                * mpmath.beta(be + j + 1, al + 1)
            )
        return float(mpmath.mpf(2) ** (al + be + 1) * total)


def laguerre_monomial_integral(exponent, m):
    """int u^(exponent + m) e^(-u) du over [0, inf) = Gamma(exponent + m + 1)."""
    return float(np.exp(gammaln(exponent + m + 1.0)))


# ---------------------------------------------------------------------------
# finite differences (for validating analytic derivatives)


def central_d1(f, x, h):
    """Fourth-order central first derivative."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def central_d2(f, x, h):
    """Fourth-order central second derivative."""
    return (
        -f(x + 2 * h)
        + 16 * f(x + h)
        - 30 * f(x)
        + 16 * f(x - h)
        - f(x - 2 * h)
    ) / (12 * h * h)
