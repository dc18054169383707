"""Catalog of compact rank-one symmetric spaces and their spherical functions.

Each space carries the Jacobi pair (alpha, beta) with alpha = (d-2)/2, the
Laplace eigenvalue shift a (eigenvalues are n^2 + a n), and evaluation
helpers: normalized spherical functions, their integer-frequency Fourier
expansions, representation dimensions obtained from the quadrature identity
k(n) = 1 / int Phi_n^2 dmu, and the derivative/small-angle diagnostics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .special import (
    JacobiParams,
    jacobi_degree_table,
    jacobi_eval,
    jacobi_theta_derivative,
)

__all__ = [
    "AliasingError",
    "QuadratureOrderError",
    "Kind",
    "CrossSpace",
    "sphere",
    "real_projective",
    "complex_projective",
    "quaternionic_projective",
    "octonionic_plane",
    "catalog",
    "space_to_dict",
    "space_from_dict",
    "FourierExpansion",
    "spherical_eval",
    "spherical_table",
    "fourier_expansion",
    "rep_dimension",
    "spherical_gram",
    "laplace_eigenvalue",
    "spherical_theta_derivative",
    "derivative_bound_ratio",
    "small_angle_closeness",
]


class AliasingError(ValueError):
    """A sampling grid is too small to resolve every frequency present."""


class QuadratureOrderError(ValueError):
    """A quadrature rule is too short for the polynomial degree at hand."""


class Kind(str, enum.Enum):
    SPHERE = "sphere"
    COMPLEX_PROJECTIVE = "complex_projective"
    QUATERNIONIC_PROJECTIVE = "quaternionic_projective"
    OCTONIONIC_PLANE = "octonionic_plane"


# beta for each family; alpha is always (d-2)/2.
_TWICE_BETA = {
    Kind.SPHERE: lambda d: d - 2,
    Kind.COMPLEX_PROJECTIVE: lambda d: 0,
    Kind.QUATERNIONIC_PROJECTIVE: lambda d: 2,
    Kind.OCTONIONIC_PLANE: lambda d: 6,
}


@dataclass(frozen=True)
class CrossSpace:
    """A compact rank-one symmetric space.

    even_degrees_only marks the real-projective quotient of a sphere, which
    keeps the same (alpha, beta) but only even spectral degrees.
    """

    kind: Kind
    dimension: int
    params: JacobiParams
    eigenvalue_shift: int
    even_degrees_only: bool = False

    def __post_init__(self) -> None:
        d = self.dimension
        if d < 2:
            raise ValueError("dimension must be at least 2")
        if self.kind is Kind.COMPLEX_PROJECTIVE and d % 2:
            raise ValueError("complex projective space needs even dimension")
        if self.kind is Kind.QUATERNIONIC_PROJECTIVE and d % 4:
            raise ValueError("quaternionic projective space needs dimension divisible by 4")
        if self.kind is Kind.OCTONIONIC_PLANE and d != 16:
            raise ValueError("the octonionic plane has dimension 16")
        if self.params.twice_alpha != d - 2:
            raise ValueError("alpha must equal (d-2)/2")
        if not (0 <= self.params.twice_beta <= self.params.twice_alpha):
            raise ValueError("beta must satisfy 0 <= beta <= alpha")
        expected_shift = (self.params.twice_alpha + self.params.twice_beta + 2) // 2
        if 2 * expected_shift != self.params.twice_alpha + self.params.twice_beta + 2:
            raise ValueError("alpha + beta + 1 must be an integer")
        if self.eigenvalue_shift != expected_shift or self.eigenvalue_shift <= 0:
            raise ValueError("eigenvalue shift must equal alpha + beta + 1")

    def degrees(self, n_max: int) -> list[int]:
        step = 2 if self.even_degrees_only else 1
        return list(range(0, n_max + 1, step))

    def label(self) -> str:
        tag = {
            Kind.SPHERE: "S",
            Kind.COMPLEX_PROJECTIVE: "CP",
            Kind.QUATERNIONIC_PROJECTIVE: "HP",
            Kind.OCTONIONIC_PLANE: "OP",
        }[self.kind]
        if self.kind is Kind.SPHERE and self.even_degrees_only:
            return f"RP{self.dimension}"
        return f"{tag}{self.dimension}"


def _make(kind: Kind, d: int, even_degrees_only: bool = False) -> CrossSpace:
    params = JacobiParams(d - 2, _TWICE_BETA[kind](d))
    shift = (params.twice_alpha + params.twice_beta + 2) // 2
    return CrossSpace(kind, d, params, shift, even_degrees_only)


def sphere(d: int) -> CrossSpace:
    return _make(Kind.SPHERE, d)


def real_projective(d: int) -> CrossSpace:
    """RP^d, served through the sphere with even degrees only."""
    return _make(Kind.SPHERE, d, even_degrees_only=True)


def complex_projective(d: int) -> CrossSpace:
    """CP^{d/2} of real dimension d (d even)."""
    return _make(Kind.COMPLEX_PROJECTIVE, d)


def quaternionic_projective(d: int) -> CrossSpace:
    """HP^{d/4} of real dimension d (d divisible by 4)."""
    return _make(Kind.QUATERNIONIC_PROJECTIVE, d)


def octonionic_plane() -> CrossSpace:
    return _make(Kind.OCTONIONIC_PLANE, 16)


def catalog() -> tuple[CrossSpace, ...]:
    """A representative sample covering every family and parameter pattern."""
    return (
        sphere(2),
        sphere(3),
        sphere(4),
        sphere(5),
        sphere(6),
        complex_projective(4),
        complex_projective(6),
        quaternionic_projective(8),
        octonionic_plane(),
    )


def space_to_dict(space: CrossSpace) -> dict:
    return {
        "kind": space.kind.value,
        "dimension": space.dimension,
        "alpha": space.params.alpha,
        "beta": space.params.beta,
        "a": space.eigenvalue_shift,
        "even_degrees_only": space.even_degrees_only,
    }


def space_from_dict(data: dict) -> CrossSpace:
    space = _make(
        Kind(data["kind"]),
        int(data["dimension"]),
        bool(data.get("even_degrees_only", False)),
    )
    if "alpha" in data and 2 * data["alpha"] != space.params.twice_alpha:
        raise ValueError("alpha inconsistent with dimension")
    if "beta" in data and 2 * data["beta"] != space.params.twice_beta:
        raise ValueError("beta inconsistent with the catalog")
    if "a" in data and int(data["a"]) != space.eigenvalue_shift:
        raise ValueError("eigenvalue shift inconsistent with the catalog")
    return space


# ---------------------------------------------------------------------------
# spherical functions
# ---------------------------------------------------------------------------

def spherical_eval(space: CrossSpace, n: int, theta):
    """Phi_n(theta): the degree-n Jacobi polynomial at cos(theta), normalized
    so that Phi_n(0) = 1 exactly."""
    scalar = np.isscalar(theta)
    th = np.asarray(theta, dtype=float)
    p = jacobi_eval(space.params, n, np.cos(th))
    norm = jacobi_eval(space.params, n, 1.0)
    out = p / norm
    return float(out) if scalar else out


def spherical_table(space: CrossSpace, degrees, theta) -> dict[int, np.ndarray]:
    """Normalized values for several degrees from one recurrence sweep."""
    th = np.asarray(theta, dtype=float)
    wanted = sorted(set(int(n) for n in degrees))
    raw = jacobi_degree_table(space.params, wanted, np.cos(th))
    norms = jacobi_degree_table(space.params, wanted, np.array([1.0]))
    return {n: raw[n] / norms[n][0] for n in wanted}


@dataclass(frozen=True)
class FourierExpansion:
    """Integer-frequency expansion Phi_n(theta) = sum_j c_j exp(i m_j theta)."""

    terms: tuple[tuple[int, float], ...]

    def frequencies(self) -> np.ndarray:
        return np.array([m for m, _ in self.terms], dtype=int)

    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=float)

    def coefficient(self, m: int) -> float:
        for freq, c in self.terms:
            if freq == m:
                return c
        return 0.0

    def support(self, tol: float = 1e-12) -> set[int]:
        c = self.coefficients()
        cutoff = tol * float(np.max(np.abs(c))) if len(c) else 0.0
        return {int(m) for (m, v) in self.terms if abs(v) > cutoff}

    def synthesize(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        m = self.frequencies()
        c = self.coefficients()
        return np.real(np.exp(1j * np.outer(th, m)) @ c.astype(complex))


def fourier_expansion(space: CrossSpace, n: int, grid_size: int | None = None) -> FourierExpansion:
    """Fourier coefficients of Phi_n by trigonometric quadrature on a uniform grid.

    The grid must oversample the top frequency n, otherwise aliasing folds
    coefficients on top of each other and the call is rejected.
    """
    if grid_size is None:
        grid_size = max(64, 1 << (2 * n + 2).bit_length())
    if grid_size <= 2 * n + 1:
        raise AliasingError(
            f"grid of size {grid_size} aliases frequencies of Phi_{n}; need more than {2 * n + 1}"
        )
    theta = 2.0 * math.pi * np.arange(grid_size) / grid_size
    samples = spherical_eval(space, n, theta)
    coefs = np.fft.fft(samples) / grid_size
    ms = np.fft.fftfreq(grid_size, d=1.0 / grid_size).astype(int)
    keep = np.abs(ms) <= n
    worst_imag = float(np.max(np.abs(coefs[keep].imag))) if np.any(keep) else 0.0
    if worst_imag > 1e-7:
        raise AliasingError(f"unexpectedly complex coefficients (imag {worst_imag:.2e})")
    order = np.argsort(ms[keep])
    pairs = tuple(
        (int(m), float(c)) for m, c in zip(ms[keep][order], coefs[keep].real[order])
    )
    return FourierExpansion(pairs)


# ---------------------------------------------------------------------------
# the radial measure and representation dimensions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _measure_rule(twice_alpha: int, twice_beta: int, order: int):
    # Probability measure on [0, pi] with density ~ sin(t/2)^(2a+1) cos(t/2)^(2b+1),
    # pulled back to Gauss-Jacobi nodes in x = cos(theta).
    a, b = twice_alpha / 2.0, twice_beta / 2.0
    x, w = roots_jacobi(order, a, b)
    log_total = (a + b + 1.0) * math.log(2.0) + float(
        gammaln(a + 1.0) + gammaln(b + 1.0) - gammaln(a + b + 2.0)
    )
    return x, w / math.exp(log_total)


def measure_nodes(space: CrossSpace, order: int):
    """Nodes x = cos(theta) and probability weights for the radial measure."""
    return _measure_rule(space.params.twice_alpha, space.params.twice_beta, order)


def _require_order(order: int | None, needed: int, n: int) -> int:
    if order is None:
        return needed
    if order < needed:
        raise QuadratureOrderError(
            f"quadrature order {order} too low for degree {n}; need at least {needed}"
        )
    return order


@lru_cache(maxsize=65536)
def _rep_dimension_cached(space: CrossSpace, n: int, order: int) -> float:
    x, w = measure_nodes(space, order)
    phi = jacobi_eval(space.params, n, x) / jacobi_eval(space.params, n, 1.0)
    return float(1.0 / np.sum(w * phi * phi))


def rep_dimension(space: CrossSpace, n: int, order: int | None = None) -> float:
    """Dimension k(n) of the degree-n spherical representation.

    Computed as 1 / int Phi_n^2 dmu by Gauss-Jacobi quadrature, which is exact
    once the rule integrates polynomials of degree 2n.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    order = _require_order(order, n + 8, n)
    return _rep_dimension_cached(space, n, order)


def spherical_gram(space: CrossSpace, n_max: int, order: int | None = None) -> np.ndarray:
    """Matrix of int Phi_i Phi_j dmu for 0 <= i, j <= n_max."""
    order = _require_order(order, n_max + 8, n_max)
    x, w = measure_nodes(space, order)
    table = spherical_table(space, range(n_max + 1), np.arccos(np.clip(x, -1, 1)))
    rows = np.vstack([table[n] for n in range(n_max + 1)])
    return (rows * w) @ rows.T


def laplace_eigenvalue(space: CrossSpace, n: int) -> int:
    """Eigenvalue n^2 + a n of -Laplace on the degree-n joint eigenspace."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return n * n + space.eigenvalue_shift * n


# ---------------------------------------------------------------------------
# derivative and small-angle diagnostics
# ---------------------------------------------------------------------------

def spherical_theta_derivative(space: CrossSpace, n: int, theta):
    """Phi_n'(theta), through the parameter-shifted polynomial identity."""
    d = jacobi_theta_derivative(space.params, n, theta)
    return d / jacobi_eval(space.params, n, 1.0)


def derivative_bound_ratio(space: CrossSpace, n: int, grid=None) -> float:
    """sup over interior grid angles of |Phi_n'(theta)| / ((n+1)^2 sin(theta))."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    if grid is None:
        grid = 4096
    if np.isscalar(grid):
        m = int(grid)
        theta = math.pi * (np.arange(m) + 0.5) / m
    else:
        theta = np.asarray(grid, dtype=float)
        if np.any(theta <= 0) or np.any(theta >= math.pi):
            raise ValueError("grid must stay strictly inside (0, pi)")
    deriv = spherical_theta_derivative(space, n, theta)
    return float(np.max(np.abs(deriv) / ((n + 1.0) ** 2 * np.sin(theta))))


def small_angle_closeness(space: CrossSpace, n: int, epsilon: float, samples: int = 129) -> float:
    """sup of |Phi_n(theta) - 1| over |theta| <= epsilon/(n+1)."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    theta = np.linspace(0.0, epsilon / (n + 1.0), samples)
    return float(np.max(np.abs(spherical_eval(space, n, theta) - 1.0)))
