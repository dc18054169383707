"""Jacobi polynomials, their main asymptotic terms, and Bessel/Gamma helpers.

Everything is evaluated by the forward three-term recurrence in the degree,
which is stable on [-1, 1] and needs no coefficient tables.  Gamma ratios go
through log-Gamma so that degrees in the thousands do not overflow.  The
normalization is P_n(1) = binomial(n + alpha, n) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "REGIME_WINDOW_CONSTANT",
    "JacobiParams",
    "AsymptoticFrame",
    "jacobi_recurrence_rows",
    "jacobi_eval",
    "jacobi_degree_table",
    "jacobi_binomial",
    "binomial_main_term",
    "chebyshev_half_case",
    "jacobi_theta_derivative",
    "interior_main_term",
    "edge_main_term",
    "bessel_j",
]

# Width constant c of the edge/interior split: edge is theta <= c/(n+1),
# interior is c/(n+1) <= theta <= pi - c/(n+1).
REGIME_WINDOW_CONSTANT = 1.0


@dataclass(frozen=True)
class JacobiParams:
    """Weight exponents (alpha, beta), stored doubled so half-integers are exact.

    Instances derived from the space catalog satisfy alpha >= beta >= 0; the
    evaluation routines themselves accept anything with alpha, beta > -1.
    """

    twice_alpha: int
    twice_beta: int

    def __post_init__(self) -> None:
        if self.twice_alpha <= -2 or self.twice_beta <= -2:
            raise ValueError(
                f"jacobi parameters must exceed -1, got alpha={self.twice_alpha / 2}, "
                f"beta={self.twice_beta / 2}"
            )

    @classmethod
    def of(cls, alpha: float, beta: float) -> "JacobiParams":
        """Build from plain numbers; they must be exact half-integers."""
        ta, tb = 2 * alpha, 2 * beta
        if ta != round(ta) or tb != round(tb):
            raise ValueError(f"({alpha}, {beta}) is not a half-integer pair")
        return cls(int(round(ta)), int(round(tb)))

    @property
    def alpha(self) -> float:
        return self.twice_alpha / 2.0

    @property
    def beta(self) -> float:
        return self.twice_beta / 2.0

    def shifted(self, by: int = 1) -> "JacobiParams":
        """Both exponents moved by an integer, as in derivative identities."""
        return JacobiParams(self.twice_alpha + 2 * by, self.twice_beta + 2 * by)

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.twice_beta, self.twice_alpha)


@dataclass(frozen=True)
class AsymptoticFrame:
    """Shifted degree and phase entering the oscillatory main terms."""

    n: int
    n_tilde: float
    gamma_phase: float

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("degree must be nonnegative")
        if not self.n_tilde > self.n:
            raise ValueError("shifted degree must exceed the degree")

    @classmethod
    def for_degree(cls, params: JacobiParams, n: int) -> "AsymptoticFrame":
        a, b = params.alpha, params.beta
        return cls(n=n, n_tilde=n + (a + b + 1.0) / 2.0, gamma_phase=-(a + 0.5) * math.pi / 2.0)


def _check_params(params: JacobiParams) -> tuple[float, float]:
    if params.alpha <= -1 or params.beta <= -1:
        raise ValueError("jacobi parameters must exceed -1")
    return params.alpha, params.beta


def _check_x(x):
    x = np.asarray(x)
    if x.dtype != np.longdouble:
        x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    if np.any(np.abs(x) > 1.0):
        raise ValueError("argument outside [-1, 1]")
    return x


def jacobi_recurrence_rows(alpha: float, beta: float, n_max: int, x, out_dtype=float):
    """Yield (n, values) for P_n^{(alpha,beta)} at the points x, n = 0..n_max.

    This is the raw engine: it takes plain floats and runs the forward
    three-term recurrence, emitting one degree per step so callers can scan
    large degree ranges in O(1) memory.  The recurrence is carried in
    extended precision (where the platform provides it) so that degrees in
    the thousands keep roughly ten spare digits; for half-integer parameters
    every recurrence coefficient is exactly representable.
    """
    if alpha <= -1 or beta <= -1:
        raise ValueError("jacobi parameters must exceed -1")
    if n_max < 0:
        raise ValueError("degree must be nonnegative")
    x = _check_x(x)
    a, b = float(alpha), float(beta)
    wide = np.asarray(x, dtype=np.longdouble)
    p_prev = np.ones_like(wide)
    yield 0, np.asarray(p_prev, dtype=out_dtype)
    if n_max == 0:
        return
    p = ((a + b + 2.0) * wide + np.longdouble(a - b)) / 2.0
    yield 1, np.asarray(p, dtype=out_dtype)
    for n in range(2, n_max + 1):
        den = np.longdouble(2.0 * n * (n + a + b) * (2 * n + a + b - 2.0))
        c0 = np.longdouble((2 * n + a + b - 1.0) * (a * a - b * b))
        c1 = np.longdouble((2 * n + a + b - 1.0) * (2 * n + a + b) * (2 * n + a + b - 2.0))
        c2 = np.longdouble(2.0 * (n + a - 1.0) * (n + b - 1.0) * (2 * n + a + b))
        p, p_prev = ((c0 + c1 * wide) * p - c2 * p_prev) / den, p
        yield n, np.asarray(p, dtype=out_dtype)


def jacobi_eval(params: JacobiParams, n: int, x):
    """P_n^{(alpha,beta)}(x) for |x| <= 1, scalar or array argument."""
    a, b = _check_params(params)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.isscalar(x)
    xa = _check_x(x)
    value = None
    for _, row in jacobi_recurrence_rows(a, b, n, xa):
        value = row
    return float(value) if scalar else value


def jacobi_degree_table(params: JacobiParams, degrees, x) -> dict[int, np.ndarray]:
    """Values at x for several degrees, collected from one recurrence sweep."""
    wanted = sorted(set(int(n) for n in degrees))
    if not wanted:
        return {}
    out: dict[int, np.ndarray] = {}
    remaining = set(wanted)
    a, b = _check_params(params)
    for n, row in jacobi_recurrence_rows(a, b, wanted[-1], x):
        if n in remaining:
            out[n] = row
            remaining.discard(n)
    return out


def jacobi_binomial(alpha: float, n: int) -> float:
    """binomial(n + alpha, n) = Gamma(n+alpha+1) / (Gamma(n+1) Gamma(alpha+1))."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    return float(np.exp(gammaln(n + alpha + 1.0) - gammaln(n + 1.0) - gammaln(alpha + 1.0)))


def binomial_main_term(alpha: float, n: int) -> float:
    """Leading growth n^alpha / Gamma(alpha+1) of binomial(n + alpha, n)."""
    if n == 0:
        return 1.0 if alpha == 0 else 0.0
    return float(np.exp(alpha * math.log(n) - gammaln(alpha + 1.0)))


def chebyshev_half_case(n: int, theta):
    """Closed form binomial(n+1/2, n) * sin((n+1)theta) / ((n+1) sin(theta)).

    Valid for all theta; the removable singularities at multiples of pi are
    filled with the continuous limit (+C at even multiples, (-1)^n C at odd).
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.isscalar(theta)
    th = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(th)):
        raise ValueError("angle must be finite")
    c = jacobi_binomial(0.5, n)
    s = np.sin(th)
    singular = np.abs(s) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = c * np.sin((n + 1.0) * th) / ((n + 1.0) * s)
    if np.any(singular):
        at_odd_pi = np.cos(th) < 0.0
        limit = np.where(at_odd_pi, (-1.0) ** n * c, c)
        vals = np.where(singular, limit, vals)
    return float(vals) if scalar else vals


def jacobi_theta_derivative(params: JacobiParams, n: int, theta):
    """d/dtheta of P_n^{(alpha,beta)}(cos(theta)).

    Equals -(sin(theta)/2) (n+alpha+beta+1) P_{n-1}^{(alpha+1,beta+1)}(cos(theta));
    degree 0 gives exactly 0.
    """
    a, b = _check_params(params)
    scalar = np.isscalar(theta)
    th = np.asarray(theta, dtype=float)
    if n == 0:
        out = np.zeros_like(th)
        return float(out) if scalar else out
    shifted = jacobi_eval(params.shifted(1), n - 1, np.cos(th))
    out = -0.5 * np.sin(th) * (n + a + b + 1.0) * shifted
    return float(out) if scalar else out


def interior_main_term(params: JacobiParams, frame: AsymptoticFrame, theta):
    """Oscillatory main term of P_n^{(alpha,beta)}(cos(theta)) away from the poles.

    pi^{-1/2} n^{-1/2} (sin(theta/2))^{-alpha-1/2} (cos(theta/2))^{-beta-1/2}
    cos(n_tilde * theta + gamma), restricted to the window
    c/(n+1) <= theta <= pi - c/(n+1).
    """
    a, b = _check_params(params)
    n = frame.n
    if n < 1:
        raise ValueError("interior main term needs degree >= 1")
    scalar = np.isscalar(theta)
    th = np.asarray(theta, dtype=float)
    lo = REGIME_WINDOW_CONSTANT / (n + 1.0)
    if np.any(th < lo - 1e-15) or np.any(th > math.pi - lo + 1e-15):
        raise ValueError(f"angle outside the interior window [{lo:.3g}, pi - {lo:.3g}]")
    out = (
        math.pi ** -0.5
        * n ** -0.5
        * np.sin(th / 2.0) ** (-a - 0.5)
        * np.cos(th / 2.0) ** (-b - 0.5)
        * np.cos(frame.n_tilde * th + frame.gamma_phase)
    )
    return float(out) if scalar else out


def edge_main_term(params: JacobiParams, frame: AsymptoticFrame, theta, mirror: bool = False):
    """Bessel-type main term of P_n^{(alpha,beta)}(cos(theta)) near a pole.

    Near theta = 0 (mirror=False) this is

        (sin(theta/2))^{-alpha} (cos(theta/2))^{-beta} n_tilde^{-alpha}
        (Gamma(n+alpha+1)/n!) (theta/sin(theta))^{1/2} J_alpha(n_tilde * theta);

    with mirror=True the same expression near theta = pi, with beta in place
    of alpha, pi - theta in place of theta, and an extra (-1)^n.
    """
    a, b = _check_params(params)
    n = frame.n
    scalar = np.isscalar(theta)
    th = np.asarray(theta, dtype=float)
    width = REGIME_WINDOW_CONSTANT / (n + 1.0)
    if mirror:
        if np.any(th < math.pi - width - 1e-15) or np.any(th > math.pi + 1e-15):
            raise ValueError(f"angle outside the edge window [pi - {width:.3g}, pi]")
        order, phi, sign = b, math.pi - th, (-1.0) ** n
    else:
        if np.any(th < -1e-15) or np.any(th > width + 1e-15):
            raise ValueError(f"angle outside the edge window [0, {width:.3g}]")
        order, phi, sign = a, th, 1.0
    gamma_ratio = np.exp(gammaln(n + order + 1.0) - gammaln(n + 1.0))
    s = np.sin(th)
    tiny = np.abs(phi) < 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        bess = np.vectorize(lambda t: bessel_j(order, frame.n_tilde * t), otypes=[float])(
            np.where(tiny, 1.0, phi)
        )
        out = (
            sign
            * np.sin(th / 2.0) ** (-a)
            * np.cos(th / 2.0) ** (-b)
            * frame.n_tilde ** (-order)
            * gamma_ratio
            * np.sqrt(np.where(tiny, 1.0, phi) / np.where(tiny, 1.0, s))
            * bess
        )
    if np.any(tiny):
        # continuous limit at the pole itself: P_n(+-1) under the binomial
        # normalization.
        limit = sign * jacobi_binomial(order, n)
        out = np.where(tiny, limit, out)
    return float(out) if scalar else out


def _bessel_series(order: float, x: float) -> float:
    # Alternating power series; safe for x <= ~12 where cancellation stays
    # below a few digits.
    half = x / 2.0
    if half == 0.0:
        return 1.0 if order == 0 else 0.0
    term = math.exp(order * math.log(half) - math.lgamma(order + 1.0))
    total = term
    k = 0
    while k < 400:
        k += 1
        term *= -half * half / (k * (order + k))
        total += term
        if k > half + 8 and abs(term) <= 1e-20 * (abs(total) + 1e-300):
            break
    return total


def _bessel_backward_recurrence(order: float, x: float) -> float:
    # Miller's algorithm: run the order recurrence downward from a trial seed
    # and normalize with sum_k (order+2k) Gamma(order+k)/k! J_{order+2k}(x)
    # = (x/2)^order.
    start = int(math.ceil(x + order + 15.0 * x ** (1.0 / 3.0) + 30.0))
    if start % 2:
        start += 1
    f = np.zeros(start + 2)
    f[start] = 1e-160
    for m in range(start, 0, -1):
        f[m - 1] = 2.0 * (order + m) / x * f[m] - f[m + 1]
        if abs(f[m - 1]) > 1e250:
            f[m - 1 :] /= 1e250
    ks = np.arange(start // 2 + 1)
    log_w = np.where(
        ks == 0,
        gammaln(order + 1.0),
        np.log(np.maximum(order + 2.0 * ks, 1e-300)) + gammaln(order + ks) - gammaln(ks + 1.0),
    )
    norm = float(np.sum(np.exp(log_w) * f[2 * ks]))
    return f[0] * math.exp(order * math.log(x / 2.0)) / norm


def bessel_j(order: float, x: float) -> float:
    """Bessel function of the first kind, J_order(x), for order >= 0, x >= 0.

    Power series below x = 12, backward recurrence above; relative accuracy
    around 1e-11 over the supported range x <= 64 (and well beyond).
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if x < 0:
        raise ValueError("argument must be nonnegative")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if x <= 12.0:
        return _bessel_series(order, x)
    return _bessel_backward_recurrence(order, x)
