"""Norms on the circle and two-sided estimates for Jacobi convolution operators.

The kernel of interest is k(theta) = P_n^{(alpha,beta)}(cos(theta)) acting by
(T f)(theta) = int k(theta - theta') f(theta') dtheta' on the 2*pi circle with
plain Lebesgue measure.  Upper bounds come from Young's inequality (the
L^{p/2} norm of the kernel) or, at p = 2, from the exact Fourier multiplier;
lower bounds come from a candidate family refined by a fixed-budget power
iteration and are best-effort diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .spaces import AliasingError
from .special import JacobiParams, jacobi_eval

__all__ = [
    "PeriodicGrid",
    "lp_norm_periodic",
    "kernel_samples",
    "kernel_lp_norm",
    "envelope_A",
    "envelope_A_tilde",
    "fourier_multiplier",
    "opnorm_l2_exact",
    "NormBracket",
    "opnorm_bracket",
    "tensor_opnorm_upper",
    "ExponentFit",
    "fit_exponent",
]

_KINK_TOL = 1e-12
UPPER_YOUNG = "young"
UPPER_EXACT_MULTIPLIER = "exact_multiplier"


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid theta_j = 2*pi*j/size on the circle."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 8:
            raise ValueError("grid needs at least 8 points")

    @classmethod
    def for_degree(cls, n: int) -> "PeriodicGrid":
        # At least 4x oversampling of the top frequency; rounded up to an
        # FFT-friendly length.
        return cls(next_fast_len(max(8192, 8 * (n + 1))))

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.size) / self.size

    @property
    def weight(self) -> float:
        return 2.0 * math.pi / self.size


def lp_norm_periodic(grid: PeriodicGrid, samples, p) -> float:
    """Rectangle-rule L^p norm of samples over the grid; p may be inf.

    Exact (to roundoff) for trigonometric polynomials of degree below size/2
    whenever p is an even integer.
    """
    f = np.asarray(samples, dtype=float)
    if f.shape != (grid.size,):
        raise ValueError("sample count must match the grid size")
    if not np.all(np.isfinite(f)):
        raise ValueError("samples must be finite")
    if p == math.inf or p == "inf":
        return float(np.max(np.abs(f)))
    p = float(p)
    if p <= 0:
        raise ValueError("p must be positive or inf")
    return float(np.sum(np.abs(f) ** p * grid.weight) ** (1.0 / p))


def kernel_samples(params: JacobiParams, n: int, grid: PeriodicGrid) -> np.ndarray:
    return jacobi_eval(params, n, np.cos(grid.thetas))


def kernel_lp_norm(params: JacobiParams, n: int, q, grid: PeriodicGrid | None = None) -> float:
    """L^q norm over the circle of the kernel P_n^{(alpha,beta)}(cos(theta))."""
    if grid is None:
        grid = PeriodicGrid.for_degree(n)
    return lp_norm_periodic(grid, kernel_samples(params, n, grid), q)


def envelope_A(delta: float, p: float, n: int) -> float:
    """Two-branch growth envelope: (n+1)^(delta - 1/p) above the kink
    p = 1/(delta + 1/2), and (n+1)^(-1/2) at or below it."""
    if delta < 0 or p <= 0 or n < 0:
        raise ValueError("need delta >= 0, p > 0, n >= 0")
    kink = 1.0 / (delta + 0.5)
    if p > kink + _KINK_TOL:
        return float((n + 1.0) ** (delta - 1.0 / p))
    return float((n + 1.0) ** -0.5)


def envelope_A_tilde(delta: float, p: float, n: int) -> float:
    """Same as envelope_A but carrying log^{delta+1/2}(n+2) at the kink."""
    if delta < 0 or p <= 0 or n < 0:
        raise ValueError("need delta >= 0, p > 0, n >= 0")
    kink = 1.0 / (delta + 0.5)
    if abs(p - kink) <= _KINK_TOL:
        return float((n + 1.0) ** -0.5 * math.log(n + 2.0) ** (delta + 0.5))
    return envelope_A(delta, p, n)


def _multiplier_values(params: JacobiParams, n: int, grid: PeriodicGrid) -> np.ndarray:
    if grid.size <= 2 * n + 1:
        raise AliasingError(
            f"grid of size {grid.size} aliases kernel frequencies; need more than {2 * n + 1}"
        )
    k = kernel_samples(params, n, grid)
    return np.fft.fft(k) * grid.weight


def fourier_multiplier(params: JacobiParams, n: int, grid: PeriodicGrid | None = None):
    """Frequencies m and multiplier values khat(m) = int k e^{-im theta} dtheta."""
    if grid is None:
        grid = PeriodicGrid.for_degree(n)
    khat = _multiplier_values(params, n, grid)
    ms = np.fft.fftfreq(grid.size, d=1.0 / grid.size).astype(int)
    keep = np.abs(ms) <= n
    order = np.argsort(ms[keep])
    return ms[keep][order], khat[keep].real[order]


def opnorm_l2_exact(params: JacobiParams, n: int, grid: PeriodicGrid | None = None) -> float:
    """Exact L^2 -> L^2 norm of convolution with the kernel: max_m |khat(m)|.

    The winning multiplier bins are re-summed in extended precision, since a
    single float64 FFT leaves the small coefficients of a large kernel with
    only about ten accurate digits.
    """
    if grid is None:
        grid = PeriodicGrid.for_degree(n)
    if grid.size <= 2 * n + 1:
        raise AliasingError(
            f"grid of size {grid.size} aliases kernel frequencies; need more than {2 * n + 1}"
        )
    from .special import jacobi_recurrence_rows

    m_count = grid.size
    # Uniform nodes and phase factors built from one extended-precision node
    # array; e^(-i m theta_j) reuses theta at index (m j mod M), so nodes and
    # phases stay exactly consistent.
    two_pi = 2.0 * np.arccos(np.longdouble(-1.0))
    thetas = two_pi * np.arange(m_count, dtype=np.longdouble) / m_count
    wide = None
    for _, row in jacobi_recurrence_rows(
        params.alpha, params.beta, n, np.cos(thetas), out_dtype=np.longdouble
    ):
        wide = row
    coarse = np.abs(np.fft.fft(np.asarray(wide, dtype=float))) * grid.weight
    candidates = np.argsort(coarse)[-6:]
    ms = np.fft.fftfreq(m_count, d=1.0 / m_count).astype(int)
    cos_nodes = np.cos(thetas)
    sin_nodes = np.sin(thetas)
    weight = np.longdouble(2.0) * np.arccos(np.longdouble(-1.0)) / m_count
    best = 0.0
    for idx in candidates:
        t = (int(ms[idx]) * np.arange(m_count, dtype=np.int64)) % m_count
        re = float(np.dot(wide, cos_nodes[t]) * weight)
        im = float(np.dot(wide, sin_nodes[t]) * weight)
        best = max(best, math.hypot(re, im))
    return best


@dataclass(frozen=True)
class NormBracket:
    """Two-sided estimate of an operator norm, with provenance."""

    lower: float
    upper: float
    lower_witness: str
    upper_method: str
    refined: bool = True

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper * (1.0 + 1e-12)):
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")


def _grid_lp(f: np.ndarray, p: float, weight: float) -> float:
    if p == math.inf:
        return float(np.max(np.abs(f)))
    return float(np.sum(np.abs(f) ** p * weight) ** (1.0 / p))


def _boyd_refine(apply_op, f0: np.ndarray, p: float, weight: float, budget: int):
    # Alternating maximization of <Tf, u> over unit balls; each full sweep is
    # nondecreasing in the Rayleigh ratio, so we track the best value and stop
    # once it plateaus.
    p_dual = p / (p - 1.0)
    f = f0 / _grid_lp(f0, p_dual, weight)
    best = 0.0
    stall = 0
    for _ in range(budget):
        g = apply_op(f)
        lam = _grid_lp(g, p, weight)
        if not math.isfinite(lam):
            return best, True
        if lam <= best * (1.0 + 1e-13):
            stall += 1
            if stall >= 10:
                break
        else:
            stall = 0
            best = lam
        g = g / max(np.max(np.abs(g)), 1e-300)
        u = np.sign(g) * np.abs(g) ** (p - 1.0)
        h = apply_op(u)
        h = h / max(np.max(np.abs(h)), 1e-300)
        f_next = np.sign(h) * np.abs(h) ** (p - 1.0)
        norm = _grid_lp(f_next, p_dual, weight)
        if not (math.isfinite(norm) and norm > 0):
            return best, True
        f = f_next / norm
    return best, False


def _bump(thetas: np.ndarray, width: float) -> np.ndarray:
    d = np.minimum(thetas, 2.0 * math.pi - thetas)
    out = np.zeros_like(thetas)
    inside = d < width
    out[inside] = np.cos(0.5 * math.pi * d[inside] / width) ** 2
    return out


def opnorm_bracket(
    params: JacobiParams,
    n: int,
    p: float,
    grid: PeriodicGrid | None = None,
    seed: int = 0,
    iteration_budget: int = 200,
) -> NormBracket:
    """Bracket the L^{p'} -> L^p norm of convolution with the degree-n kernel.

    p = 2 is exact (Fourier multiplier).  For p > 2 the upper bound is the
    kernel's L^{p/2} norm via Young's inequality, and the lower bound is the
    best Rayleigh ratio over a candidate family (single exponentials, bumps
    of dyadic widths down to 1/(4n), the kernel itself, one seeded random
    start), each refined by at most iteration_budget power-iteration steps.
    """
    if p < 2:
        raise ValueError("bracket requires p >= 2")
    if grid is None:
        grid = PeriodicGrid.for_degree(n)
    khat = _multiplier_values(params, n, grid)
    mult = np.abs(khat)
    top_m = _argmax_freq(mult, grid)
    if p == 2:
        value = opnorm_l2_exact(params, n, grid)
        return NormBracket(value, value, f"exponential m={top_m}", UPPER_EXACT_MULTIPLIER)

    k = kernel_samples(params, n, grid)
    upper = lp_norm_periodic(grid, k, p / 2.0)
    weight = grid.weight
    fk = np.fft.fft(k)

    def apply_op(f: np.ndarray) -> np.ndarray:
        return np.fft.ifft(np.fft.fft(f) * fk).real * weight

    p_dual = p / (p - 1.0)
    # Single exponentials admit a closed-form ratio |khat(m)| (2 pi)^(1/p - 1/p').
    exp_ratio = float(np.max(mult)) * (2.0 * math.pi) ** (1.0 / p - 1.0 / p_dual)
    lower = exp_ratio
    witness = f"exponential m={top_m}"

    thetas = grid.thetas
    candidates: list[tuple[str, np.ndarray]] = [
        (f"cos({top_m} theta)", np.cos(top_m * thetas)),
        ("kernel", k.copy()),
    ]
    width = 1.0
    floor = 1.0 / (4.0 * max(n, 1))
    j = 0
    while width >= floor:
        candidates.append((f"bump width 2^-{j}", _bump(thetas, width)))
        j += 1
        width *= 0.5
    rng = np.random.default_rng(seed)
    candidates.append(("random start", rng.standard_normal(grid.size)))

    refined = True
    for name, start in candidates:
        if np.max(np.abs(start)) == 0.0:
            continue
        value, diverged = _boyd_refine(apply_op, start, p, weight, iteration_budget)
        if diverged:
            refined = False
            continue
        if value > lower:
            lower = value
            witness = f"{name} (power iteration)"
    lower = min(lower, upper)  # guard roundoff at rank-one equality cases
    return NormBracket(lower, upper, witness, UPPER_YOUNG, refined)


def _argmax_freq(mult: np.ndarray, grid: PeriodicGrid) -> int:
    ms = np.fft.fftfreq(grid.size, d=1.0 / grid.size).astype(int)
    return int(ms[int(np.argmax(mult))])


def tensor_opnorm_upper(factors, p: float, grids=None) -> float:
    """Certified upper bound for the tensor-product kernel operator on T^k:
    the product of the per-factor bracket uppers."""
    if grids is None:
        grids = [None] * len(list(factors))
    out = 1.0
    for (params, n), grid in zip(factors, grids):
        out *= opnorm_bracket(params, n, p, grid=grid).upper
    return out


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares line through (log n, log value)."""

    slope: float
    intercept: float
    max_residual: float
    sample_count: int

    def __post_init__(self) -> None:
        if self.sample_count < 3:
            raise ValueError("need at least 3 samples")
        if not math.isfinite(self.max_residual):
            raise ValueError("residual must be finite")


def fit_exponent(points) -> ExponentFit:
    """Fit value ~ C * n^slope on log-log axes.

    Points are (n, value) with n strictly increasing and values positive.
    """
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    ns = np.array([float(n) for n, _ in pts])
    vals = np.array([float(v) for _, v in pts])
    if np.any(vals <= 0):
        raise ValueError("values must be positive")
    if np.any(np.diff(ns) <= 0):
        raise ValueError("abscissas must be strictly increasing")
    x = np.log(ns)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.max(np.abs(resid))), len(pts))
