"""Products of rank-one spaces: lattice shells, extremizers, and restriction norms.

A shell at spectral level L collects the degree tuples (n_1, ..., n_r) with
sum_i (n_i^2 + a_i n_i) = L, optionally restricted to the comparable range
n_1 >= ... >= n_r >= n_1/2.  The shell extremizer

    f(theta) = sum_shell prod_i sqrt(k_i(n_i)) Phi_{i,n_i}(theta_i)

has L^2 norm |shell|^(1/2) over the product, and its L^p norms along affine
submanifolds of the maximal flat T^r are computed by tensor-grid quadrature.
Exponent bookkeeping (tau, the product/joint exponents, and the general
baseline rho) is done in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

from .spaces import CrossSpace, rep_dimension, spherical_table
from .torus import ExponentFit, fit_exponent

__all__ = [
    "ResolutionError",
    "ProductManifold",
    "LatticeShell",
    "enumerate_shell",
    "count_unconstrained",
    "count_constrained",
    "trend_levels",
    "extremizer_eval",
    "extremizer_l2_norm",
    "FlatSubmanifold",
    "restriction_lp_norm",
    "pointwise_lower_check",
    "tau_exponent",
    "baseline_rho",
    "ExponentTable",
    "exponent_table",
    "SharpnessRow",
    "sharpness_report",
    "diagonal_levels",
]


class ResolutionError(ValueError):
    """A quadrature grid cannot resolve the oscillation it is asked to integrate."""


@dataclass(frozen=True)
class ProductManifold:
    """An ordered product of rank-one factors, sorted by ascending dimension."""

    factors: tuple[CrossSpace, ...]

    def __post_init__(self) -> None:
        if len(self.factors) < 2:
            raise ValueError("a product needs at least two factors")
        dims = [f.dimension for f in self.factors]
        if dims != sorted(dims):
            raise ValueError("factors must be sorted by ascending dimension")

    @classmethod
    def of(cls, *factors: CrossSpace) -> "ProductManifold":
        return cls(tuple(sorted(factors, key=lambda f: f.dimension)))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def dimension(self) -> int:
        return sum(f.dimension for f in self.factors)


@dataclass(frozen=True)
class LatticeShell:
    """Degree tuples at one spectral level, in ascending lexicographic order."""

    level: int
    members: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("level must be nonnegative")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def spectral_parameter(self) -> float:
        return math.sqrt(self.level)


def _max_degree(shift: int, budget: int) -> int:
    # Largest n with n^2 + shift*n <= budget.
    if budget < 0:
        return -1
    n = int((-shift + math.sqrt(shift * shift + 4.0 * budget)) / 2.0)
    while n * n + shift * n > budget:
        n -= 1
    while (n + 1) * (n + 1) + shift * (n + 1) <= budget:
        n += 1
    return n


def enumerate_shell(
    manifold: ProductManifold, level: int, ordering_constraint: bool = True
) -> LatticeShell:
    """Exhaustively enumerate the shell at the given level.

    With the constraint on, tuples must satisfy n_1 >= ... >= n_r >= n_1/2
    (checked as 2 n_r >= n_1 in integers).  With it off, every tuple solving
    sum_i (n_i^2 + a_i n_i) = level is returned.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    shifts = [f.eigenvalue_shift for f in manifold.factors]
    steps = [2 if f.even_degrees_only else 1 for f in manifold.factors]
    r = manifold.rank
    members: list[tuple[int, ...]] = []

    def eig(i: int, n: int) -> int:
        return n * n + shifts[i] * n

    if ordering_constraint:

        def recurse(i: int, remaining: int, hi: int, head: int, prefix: list[int]) -> None:
            if i == r:
                if remaining == 0:
                    members.append(tuple(prefix))
                return
            lo = (head + 1) // 2 if head >= 0 else 0
            top = min(hi, _max_degree(shifts[i], remaining))
            for n in range(top, lo - 1, -1):
                if steps[i] == 2 and n % 2:
                    continue
                rest = remaining - eig(i, n)
                if rest < 0:
                    continue
                recurse(i + 1, rest, n, head if head >= 0 else n, prefix + [n])

        recurse(0, level, _max_degree(shifts[0], level), -1, [])
    else:

        def recurse_free(i: int, remaining: int, prefix: list[int]) -> None:
            if i == r:
                if remaining == 0:
                    members.append(tuple(prefix))
                return
            top = _max_degree(shifts[i], remaining)
            for n in range(0, top + 1, steps[i]):
                recurse_free(i + 1, remaining - eig(i, n), prefix + [n])

        recurse_free(0, level, [])
    return LatticeShell(level, tuple(sorted(members)))


def count_unconstrained(manifold: ProductManifold, level_max: int) -> np.ndarray:
    """Counts of unconstrained shell tuples for every level 0..level_max.

    Dynamic program: convolve the per-factor eigenvalue indicator vectors.
    Matches len(enumerate_shell(..., ordering_constraint=False)) levelwise.
    """
    counts = np.zeros(level_max + 1, dtype=np.int64)
    counts[0] = 1
    for factor in manifold.factors:
        nxt = np.zeros_like(counts)
        step = 2 if factor.even_degrees_only else 1
        for n in range(0, _max_degree(factor.eigenvalue_shift, level_max) + 1, step):
            e = n * n + factor.eigenvalue_shift * n
            nxt[e:] += counts[: level_max + 1 - e]
        counts = nxt
    return counts


def count_constrained(manifold: ProductManifold, level_max: int) -> np.ndarray:
    """Counts of ordering-constrained shell tuples for every level 0..level_max.

    One backtracking sweep over all admissible tuples with total eigenvalue
    at most level_max; matches len(enumerate_shell(..., True)) levelwise.
    """
    shifts = [f.eigenvalue_shift for f in manifold.factors]
    steps = [2 if f.even_degrees_only else 1 for f in manifold.factors]
    r = manifold.rank
    counts = np.zeros(level_max + 1, dtype=np.int64)

    def recurse(i: int, used: int, hi: int, head: int) -> None:
        if i == r:
            counts[used] += 1
            return
        lo = (head + 1) // 2 if head >= 0 else 0
        top = min(hi, _max_degree(shifts[i], level_max - used))
        for n in range(top, lo - 1, -1):
            if steps[i] == 2 and n % 2:
                continue
            recurse(i + 1, used + n * n + shifts[i] * n, n, head if head >= 0 else n)

    recurse(0, 0, _max_degree(shifts[0], level_max), -1)
    return counts


def trend_levels(
    manifold: ProductManifold,
    level_min: int,
    level_max: int,
    count: int = 12,
    window: float = 0.06,
) -> list[int]:
    """Pick one level near each geometric target whose constrained shell size
    sits closest to the population trend.

    This damps the arithmetic fluctuation of shell sizes so that level sweeps
    measure the growth rate rather than the scatter of individual shells.
    """
    if not 0 < level_min < level_max:
        raise ValueError("need 0 < level_min < level_max")
    counts = count_constrained(manifold, level_max)
    levels = np.nonzero(counts)[0]
    levels = levels[levels >= max(2, level_min // 4)]
    if len(levels) < count:
        raise ValueError("not enough nonempty shells below level_max")
    sizes = counts[levels].astype(float)
    log_n = 0.5 * np.log(levels.astype(float))
    # Fit the trend only from 70% of level_min up: the smallest shells sit
    # well below the asymptotic growth law and would tilt the line.
    in_fit = levels >= 0.7 * level_min
    if np.count_nonzero(in_fit) < max(count, 8):
        in_fit = np.ones_like(in_fit, dtype=bool)
    trend = np.polyfit(log_n[in_fit], np.log(sizes[in_fit]), 1)
    predicted = np.polyval(trend, log_n)
    picked: set[int] = set()
    for target in np.geomspace(level_min, level_max, count):
        in_window = (levels >= target * (1 - window)) & (levels <= target * (1 + window))
        if not np.any(in_window):
            continue
        idx = np.nonzero(in_window)[0]
        best = idx[np.argmin(np.abs(np.log(sizes[idx]) - predicted[idx]))]
        picked.add(int(levels[best]))
    return sorted(picked)


# ---------------------------------------------------------------------------
# the extremizer
# ---------------------------------------------------------------------------

@lru_cache(maxsize=65536)
def _sqrt_dim(space: CrossSpace, n: int) -> float:
    return math.sqrt(rep_dimension(space, n))


def _member_amplitudes(manifold: ProductManifold, shell: LatticeShell) -> np.ndarray:
    return np.array(
        [
            np.prod([_sqrt_dim(sp, n) for sp, n in zip(manifold.factors, member)])
            for member in shell.members
        ]
    )


def extremizer_eval(manifold: ProductManifold, shell: LatticeShell, theta) -> float:
    """f(theta) = sum over the shell of prod_i sqrt(k_i(n_i)) Phi_{i,n_i}(theta_i)."""
    if len(shell) == 0:
        raise ValueError("shell is empty")
    theta = tuple(float(t) for t in theta)
    if len(theta) != manifold.rank:
        raise ValueError("theta must have one coordinate per factor")
    values = []
    for i, space in enumerate(manifold.factors):
        degrees = {m[i] for m in shell.members}
        table = spherical_table(space, degrees, np.array([theta[i]]))
        values.append({n: float(v[0]) for n, v in table.items()})
    total = 0.0
    for member, amp in zip(shell.members, _member_amplitudes(manifold, shell)):
        total += amp * np.prod([values[i][n] for i, n in enumerate(member)])
    return float(total)


def extremizer_l2_norm(shell: LatticeShell) -> float:
    """L^2 norm over the whole product: |shell|^(1/2), by orthonormality of
    the sqrt(k) Phi factors."""
    return math.sqrt(len(shell))


# ---------------------------------------------------------------------------
# affine submanifolds of the maximal flat
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatSubmanifold:
    """Affine map u -> A u + b from a box in T^k into the flat T^r.

    box is a tuple of (lo, hi) pairs, or None for the full torus in every
    parameter direction.  The area density of an affine map is the constant
    J = sqrt(det(A^T A)).
    """

    matrix: tuple[tuple[float, ...], ...]
    offset: tuple[float, ...]
    box: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        a = self.matrix_array
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        r, k = a.shape
        if not 0 <= k <= r:
            raise ValueError("intrinsic dimension must lie in [0, rank]")
        if len(self.offset) != r:
            raise ValueError("offset must have one entry per factor")
        if k > 0 and np.linalg.matrix_rank(a) != k:
            raise ValueError("matrix must have full column rank")
        if self.box is not None:
            if len(self.box) != k:
                raise ValueError("box must have one interval per parameter")
            if any(hi <= lo for lo, hi in self.box):
                raise ValueError("box intervals must be nondegenerate")

    @classmethod
    def of(cls, matrix, offset, box=None) -> "FlatSubmanifold":
        m = tuple(tuple(float(v) for v in row) for row in matrix)
        b = tuple(float(v) for v in offset)
        bx = None if box is None else tuple((float(lo), float(hi)) for lo, hi in box)
        return cls(m, b, bx)

    @property
    def matrix_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    @property
    def k(self) -> int:
        return self.matrix_array.shape[1]

    @property
    def density(self) -> float:
        if self.k == 0:
            return 1.0
        a = self.matrix_array
        return float(math.sqrt(np.linalg.det(a.T @ a)))


def _axis_lengths(sub: FlatSubmanifold) -> list[float]:
    if sub.box is None:
        return [2.0 * math.pi] * sub.k
    return [hi - lo for lo, hi in sub.box]


def _axis_los(sub: FlatSubmanifold) -> list[float]:
    if sub.box is None:
        return [0.0] * sub.k
    return [lo for lo, _ in sub.box]


def _column_frequencies(shell: LatticeShell, a: np.ndarray) -> np.ndarray:
    n_max = np.max(np.array(shell.members), axis=0)
    return np.abs(a).T @ n_max  # per parameter axis


def _accumulate_members(shell, amps, factor_value, shape) -> np.ndarray:
    f = np.zeros(shape)
    for member, amp in zip(shell.members, amps):
        prod = factor_value(0, member[0]).copy()
        for i in range(1, len(member)):
            prod *= factor_value(i, member[i])
        f += amp * prod
    return f


def _restriction_general(manifold, shell, sub, p, axes_nodes, cell, amps) -> float:
    a = sub.matrix_array
    r, k = a.shape
    grids = np.meshgrid(*axes_nodes, indexing="ij")
    tables: list[dict[int, np.ndarray]] = []
    for i in range(r):
        theta_i = sub.offset[i] + sum(a[i, j] * grids[j] for j in range(k))
        degrees = {m[i] for m in shell.members}
        tables.append(spherical_table(manifold.factors[i], degrees, theta_i.ravel()))

    f = _accumulate_members(
        shell, amps, lambda i, n: tables[i][n], grids[0].size
    )
    if p == math.inf:
        return float(np.max(np.abs(f)))
    return float((np.sum(np.abs(f) ** p) * cell * sub.density) ** (1.0 / p))


def _restriction_lattice(manifold, shell, sub, p, points_per_wavelength, amps) -> float:
    # Integer matrix fast path: with one common grid step h on every axis the
    # factor arguments live on a one-dimensional lattice, so spherical values
    # come from small lookup tables instead of full tensor grids.
    a = sub.matrix_array.astype(int)
    r, k = a.shape
    freqs = _column_frequencies(shell, a)
    lengths = _axis_lengths(sub)
    los = _axis_los(sub)
    full_torus = sub.box is None
    if full_torus:
        m_common = max(8, int(np.ceil(points_per_wavelength * float(np.max(freqs)))))
        sizes = [m_common] * k
        h = 2.0 * math.pi / m_common
    else:
        h = min(
            2.0 * math.pi / (points_per_wavelength * max(float(f), 1.0)) for f in freqs
        )
        sizes = [max(8, int(math.ceil(length / h))) for length in lengths]
        # The integrated box snaps up to whole grid cells.

    index_grids = np.meshgrid(*[np.arange(m, dtype=np.int64) for m in sizes], indexing="ij")
    f_shape = index_grids[0].size
    cell = h ** k

    factor_tables: list[dict[int, np.ndarray]] = []
    index_flat: list[np.ndarray] = []
    for i in range(r):
        t = sum(int(a[i, j]) * index_grids[j] for j in range(k))
        t = np.asarray(t, dtype=np.int64)
        if full_torus:
            t %= sizes[0]
            t_lo, t_hi = 0, sizes[0] - 1
        else:
            t_lo, t_hi = int(t.min()), int(t.max())
            t = t - t_lo
        base = sub.offset[i] + (h / 2.0) * float(np.sum(a[i])) + (
            0.0 if full_torus else float(np.dot(a[i], los))
        )
        lattice = base + h * np.arange(t_lo, t_hi + 1)
        degrees = {m[i] for m in shell.members}
        factor_tables.append(spherical_table(manifold.factors[i], degrees, lattice))
        index_flat.append(t.ravel())

    f = _accumulate_members(
        shell, amps, lambda i, n: factor_tables[i][n][index_flat[i]], f_shape
    )
    if p == math.inf:
        return float(np.max(np.abs(f)))
    return float((np.sum(np.abs(f) ** p) * cell * sub.density) ** (1.0 / p))


_LATTICE_THRESHOLD = 200_000


def restriction_lp_norm(
    manifold: ProductManifold,
    shell: LatticeShell,
    sub: FlatSubmanifold,
    p,
    points_per_wavelength: float = 8.0,
) -> float:
    """L^p norm of the shell extremizer along the submanifold.

    Tensor midpoint quadrature with at least points_per_wavelength samples
    per wavelength of the highest kernel frequency on each parameter axis;
    k = 0 degenerates to a point evaluation.  Large integer-matrix jobs go
    through the lattice lookup path, whose box snaps up to whole grid cells.
    """
    if len(shell) == 0:
        raise ValueError("shell is empty")
    if p != math.inf and p < 2:
        raise ValueError("p must be >= 2 or inf")
    if len(sub.offset) != manifold.rank:
        raise ValueError("submanifold lives in a flat of the wrong rank")
    if sub.k == 0:
        return abs(extremizer_eval(manifold, shell, sub.offset))
    if points_per_wavelength < 2:
        raise ResolutionError(
            f"{points_per_wavelength} points per wavelength cannot resolve the integrand; need >= 2"
        )
    a = sub.matrix_array
    freqs = _column_frequencies(shell, a)
    lengths = _axis_lengths(sub)
    los = _axis_los(sub)
    sizes = [
        max(8, int(math.ceil(points_per_wavelength * f * length / (2.0 * math.pi))))
        for f, length in zip(freqs, lengths)
    ]
    total = int(np.prod(sizes))
    amps = _member_amplitudes(manifold, shell)
    integer_matrix = bool(np.all(a == np.round(a)))
    if integer_matrix and total > _LATTICE_THRESHOLD:
        return _restriction_lattice(manifold, shell, sub, p, points_per_wavelength, amps)
    if total > 10 * _LATTICE_THRESHOLD:
        raise ResolutionError(
            f"direct grid of {total} points is too large and the matrix is not integer"
        )
    axes_nodes = [
        lo + (np.arange(m) + 0.5) * (length / m)
        for lo, length, m in zip(los, lengths, sizes)
    ]
    cell = float(np.prod([length / m for length, m in zip(lengths, sizes)]))
    return _restriction_general(manifold, shell, sub, p, axes_nodes, cell, amps)


def pointwise_lower_check(
    manifold: ProductManifold,
    shell: LatticeShell,
    epsilon: float = 0.05,
    samples_per_axis: int = 5,
) -> float:
    """inf over the polydisc |theta_i| <= epsilon/N of |f| / f(0).

    f(0) equals the sum of the amplitude products, so the returned ratio is 1
    at the origin and stays near 1 for small epsilon.
    """
    if len(shell) == 0:
        raise ValueError("shell is empty")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if samples_per_axis ** manifold.rank > 10**7:
        raise ValueError("polydisc grid too large; lower samples_per_axis")
    n_big = max(shell.spectral_parameter, 1.0)
    axis = np.linspace(-epsilon / n_big, epsilon / n_big, samples_per_axis)
    tables = []
    for i, space in enumerate(manifold.factors):
        degrees = {m[i] for m in shell.members}
        tables.append(spherical_table(space, degrees, axis))
    amps = _member_amplitudes(manifold, shell)
    f = np.zeros((samples_per_axis,) * manifold.rank)
    for member, amp in zip(shell.members, amps):
        rows = [tables[i][n] for i, n in enumerate(member)]
        f += amp * reduce(np.multiply.outer, rows)
    return float(np.min(np.abs(f)) / np.sum(amps))


# ---------------------------------------------------------------------------
# exponent algebra (exact rationals)
# ---------------------------------------------------------------------------

def _as_p(p) -> Fraction | float:
    if p == math.inf:
        return math.inf
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        return math.inf if p.strip() in ("inf", "infinity") else Fraction(p)
    if isinstance(p, float):
        return Fraction(p).limit_denominator(10**9)
    raise TypeError(f"cannot interpret {p!r} as an exponent")


def _inv(p) -> Fraction:
    return Fraction(0) if p == math.inf else 1 / p


def tau_exponent(d: int, p) -> Fraction:
    """The per-factor exponent: -1/p for p >= 4/(d-1), else -(d-1)/4."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    p = _as_p(p)
    if p != math.inf and p <= 0:
        raise ValueError("p must be positive")
    threshold = Fraction(4, d - 1)
    if p == math.inf or p >= threshold:
        return -_inv(p)
    return -Fraction(d - 1, 4)


def baseline_rho(k: int, d: int, p):
    """General-manifold baseline exponent rho(k, d, p), or None with a note
    when the stated branches do not cover (k, d, p)."""
    p = _as_p(p)
    if p != math.inf and p < 2:
        return None, "stated for p >= 2 only"
    if k < 1 or k > d - 1:
        return None, f"no stated branch for k = {k} with d = {d}"
    if k == d - 1:
        split = Fraction(2 * d, d - 1)
        if p == math.inf or p >= split:
            return Fraction(d - 1, 2) - (d - 1) * _inv(p), ""
        return Fraction(d - 1, 4) - Fraction(d - 2, 2) * _inv(p), ""
    if k == d - 2:
        if p == 2:
            return None, "p = 2, k = d-2 carries an extra (log N)^(1/2)"
        return Fraction(d - 1, 2) - k * _inv(p), ""
    return Fraction(d - 1, 2) - k * _inv(p), ""


@dataclass(frozen=True)
class ExponentTable:
    """All exponents attached to one (dimension list, k, p) configuration."""

    dims: tuple[int, ...]
    k: int
    p: object
    taus: tuple[Fraction, ...]
    product_exponent: Fraction | None
    joint_exponent: Fraction | None
    no_loss_exponent: Fraction | None
    baseline_exponent: Fraction | None
    baseline_note: str
    improvement: Fraction | None


def exponent_table(d_list, k: int, p) -> ExponentTable:
    """Exponents for restriction to a k-dimensional flat submanifold.

    Dimensions are sorted ascending (the sum of the k smallest taus is the
    stated bound).  Entries whose stated validity range excludes p are None.
    """
    dims = tuple(sorted(int(d) for d in d_list))
    if len(dims) < 2:
        raise ValueError("need at least two factors")
    if not 0 <= k <= len(dims):
        raise ValueError("k must lie in [0, number of factors]")
    p_val = _as_p(p)
    taus = tuple(tau_exponent(d, p_val) for d in dims)
    d = sum(dims)
    r = len(dims)
    in_range = p_val == math.inf or p_val >= 2
    tau_sum = sum(taus[:k], Fraction(0))
    product_exp = Fraction(d - 2, 2) + tau_sum if in_range else None
    joint_exp = Fraction(d - r, 2) + tau_sum if in_range else None
    no_loss = Fraction(d - 2, 2) - k * _inv(p_val) if in_range else None
    rho, note = baseline_rho(k, d, p_val)
    improvement = rho - product_exp if (rho is not None and product_exp is not None) else None
    return ExponentTable(
        dims, k, p_val, taus, product_exp, joint_exp, no_loss, rho, note, improvement
    )


# ---------------------------------------------------------------------------
# sharpness sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharpnessRow:
    level: int
    spectral_parameter: float
    shell_size: int
    ratio: float
    envelope: float


def diagonal_levels(manifold: ProductManifold, degrees) -> list[int]:
    """Levels of the symmetric tuples (n, ..., n); their shells are nonempty."""
    return [
        sum(n * n + f.eigenvalue_shift * n for f in manifold.factors) for n in degrees
    ]


def sharpness_report(
    manifold: ProductManifold,
    sub: FlatSubmanifold,
    p,
    levels,
    points_per_wavelength: float = 8.0,
) -> tuple[list[SharpnessRow], ExponentFit]:
    """Measured restriction/L^2 ratios across a level sweep, with the target
    envelope N^((d-2)/2 - k/p) and the fitted slope of the ratio."""
    p = float(p)
    rows: list[SharpnessRow] = []
    exponent = (manifold.dimension - 2) / 2.0 - (sub.k / p if p != math.inf else 0.0)
    for level in levels:
        shell = enumerate_shell(manifold, level, ordering_constraint=True)
        if len(shell) == 0:
            continue
        ratio = restriction_lp_norm(
            manifold, shell, sub, p, points_per_wavelength
        ) / extremizer_l2_norm(shell)
        n_big = shell.spectral_parameter
        rows.append(SharpnessRow(level, n_big, len(shell), ratio, n_big ** exponent))
    if not rows:
        raise ValueError("no nonempty shells in the sweep")
    fit = fit_exponent([(row.spectral_parameter, row.ratio) for row in rows])
    return rows, fit
