"""Monte Carlo verification of the closed-form densities.

Draws are split into fixed-size chunks; chunk ``i`` always uses the ``i``-th
stream spawned from the seed, and partial results are reduced in chunk order.
Results therefore do not depend on ``n_jobs``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from .densities import (
    EnsembleParams,
    joint_marginal_pdf,
    marginal_pdf,
    truncation_limit,
)
from .quadrature import quad_1d, quad_2d
from .sampling import MatrixPairSpec, gram_eigenvalues, sample_pairs, spawn_rngs

__all__ = [
    "SIGMA_RULE",
    "DensityReport",
    "BinnedComparison",
    "run_chunks",
    "random_pick",
    "eigen_moments",
    "cross_moment",
    "estimate_moments",
    "binned_density_compare",
]

SIGMA_RULE = 3.0
CHUNK_SIZE = 20_000
MIN_DRAWS = 1000


@dataclass(frozen=True)
class DensityReport:
    """One simulated statistic against its theoretical value.

    ``passed`` is ``|empirical - theoretical| <= 3 * std_error``.
    """

    statistic: str
    empirical: float
    theoretical: float
    std_error: float
    n_samples: int
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = abs(self.empirical - self.theoretical) <= SIGMA_RULE * self.std_error
        object.__setattr__(self, "passed", bool(ok))

    @property
    def z_score(self):
        if self.std_error == 0:
            return 0.0 if self.empirical == self.theoretical else math.inf
        return (self.empirical - self.theoretical) / self.std_error

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass(frozen=True)
class BinnedComparison:
    """Per-bin count comparison plus the multiple-comparison summary."""

    reports: list
    overflow: DensityReport
    coverage: float
    fraction_within: float
    max_abs_z: float
    min_fraction: float

    @property
    def passed(self):
        return self.fraction_within >= self.min_fraction


def _chunk_sizes(n_draws, chunk_size):
    full, rest = divmod(int(n_draws), chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunks(fn, n_draws, seed, n_jobs=1, chunk_size=CHUNK_SIZE):
    """Apply ``fn(rng, size)`` to each chunk; results come back in chunk order."""
    sizes = _chunk_sizes(n_draws, chunk_size)
    rngs = spawn_rngs(seed, len(sizes))
    if n_jobs == 1:
        return [fn(rng, size) for rng, size in zip(rngs, sizes)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, rngs, sizes))


def random_pick(eigs, rng):
    """One uniformly chosen column per row of ``eigs`` (shape ``(N, m)``)."""
    idx = rng.integers(eigs.shape[1], size=eigs.shape[0])
    return eigs[np.arange(eigs.shape[0]), idx]


def _moment_sums(spec):
    def draw(rng, size):
        h, g = sample_pairs(spec, size, rng)
        b = random_pick(gram_eigenvalues(h), rng)
        a = random_pick(gram_eigenvalues(g), rng)
        stats = np.stack([b, b * b, b * a])
        return stats.sum(axis=1), (stats**2).sum(axis=1), size

    return draw


def eigen_moments(m, n, tol=1e-12):
    """Mean and second moment of a randomly selected eigenvalue, by quadrature."""
    upper = truncation_limit(m, n)
    mean, _ = quad_1d(lambda x: x * marginal_pdf(x, m, n), 0.0, upper, tol=tol)
    second, _ = quad_1d(lambda x: x * x * marginal_pdf(x, m, n), 0.0, upper, tol=tol)
    return mean, second


def cross_moment(params, tol=1e-11):
    """``E[beta alpha]`` under the joint marginal density, by 2-D quadrature."""
    upper = truncation_limit(params.m, params.n)
    value, _ = quad_2d(
        lambda b, a: b * a * joint_marginal_pdf(b, a, params),
        (0.0, upper),
        (0.0, upper),
        tol=tol,
    )
    return value


def estimate_moments(spec, n_draws, seed, n_jobs=1):
    """Simulated vs theoretical moments of randomly selected eigenvalues.

    Returns reports for ``E[beta]``, ``E[beta^2]`` and ``E[beta alpha]``; for
    ``m = n = 2`` a fourth report compares ``E[beta alpha]`` with
    ``4 + |rho|^2``.
    """
    if n_draws < MIN_DRAWS:
        raise ValueError(f"n_draws must be >= {MIN_DRAWS}")
    parts = run_chunks(_moment_sums(spec), n_draws, seed, n_jobs)
    s1 = np.zeros(3)
    s2 = np.zeros(3)
    count = 0
    for p1, p2, size in parts:
        s1 += p1
        s2 += p2
        count += size
    mean = s1 / count
    var = np.maximum(s2 / count - mean**2, 0.0) * count / (count - 1)
    se = np.sqrt(var / count)

    params = EnsembleParams(spec.m, spec.n, abs(spec.rho))
    first, second = eigen_moments(spec.m, spec.n)
    cross = cross_moment(params)
    reports = [
        DensityReport("mean_beta", mean[0], first, se[0], count),
        DensityReport("second_moment_beta", mean[1], second, se[1], count),
        DensityReport("cross_moment_beta_alpha", mean[2], cross, se[2], count),
    ]
    if spec.m == 2 and spec.n == 2:
        reports.append(
            DensityReport(
                "cross_moment_closed_form", mean[2], 4.0 + abs(spec.rho) ** 2, se[2], count
            )
        )
    return reports


def _bin_masses(params, edges_b, edges_a, tol):
    masses = np.empty((edges_b.size - 1, edges_a.size - 1))
    for i in range(edges_b.size - 1):
        for j in range(edges_a.size - 1):
            masses[i, j], _ = quad_2d(
                lambda b, a: joint_marginal_pdf(b, a, params),
                (edges_b[i], edges_b[i + 1]),
                (edges_a[j], edges_a[j + 1]),
                tol=tol,
                atol=1e-14,
            )
    return masses


def binned_density_compare(
    spec, n_draws, edges_beta, seed, edges_alpha=None, n_jobs=1, min_fraction=0.97, tol=1e-10
):
    """Histogram of randomly selected eigenvalue pairs vs integrated density.

    Each bin gets a report with binomial standard error
    ``sqrt(N p (1 - p))``; draws outside the grid form an overflow cell with
    its own report. The comparison passes when at least ``min_fraction`` of
    the bins lie within three standard errors.
    """
    edges_b = np.asarray(edges_beta, dtype=float)
    edges_a = edges_b if edges_alpha is None else np.asarray(edges_alpha, dtype=float)
    for e in (edges_b, edges_a):
        if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0) or e[0] < 0:
            raise ValueError("bin edges must be >= 0, strictly increasing, at least two")
    if n_draws < MIN_DRAWS:
        raise ValueError(f"n_draws must be >= {MIN_DRAWS}")
    params = EnsembleParams(spec.m, spec.n, abs(spec.rho))
    masses = _bin_masses(params, edges_b, edges_a, tol)
    if np.any(masses <= 0):
        raise ValueError("grid has bins with zero probability mass")

    def draw(rng, size):
        h, g = sample_pairs(spec, size, rng)
        b = random_pick(gram_eigenvalues(h), rng)
        a = random_pick(gram_eigenvalues(g), rng)
        counts, _, _ = np.histogram2d(b, a, bins=[edges_b, edges_a])
        return counts

    counts = sum(run_chunks(draw, n_draws, seed, n_jobs))
    n = int(n_draws)
    reports = []
    for i in range(masses.shape[0]):
        for j in range(masses.shape[1]):
            p = masses[i, j]
            reports.append(
                DensityReport(
                    f"bin[{i},{j}]", float(counts[i, j]), n * p, math.sqrt(n * p * (1 - p)), n
                )
            )
    coverage = float(masses.sum())
    p_out = max(1.0 - coverage, 0.0)
    overflow = DensityReport(
        "overflow", float(n - counts.sum()), n * p_out, math.sqrt(n * p_out * (1 - p_out)), n
    )
    within = sum(r.passed for r in reports) / len(reports)
    max_z = max(abs(r.z_score) for r in reports)
    return BinnedComparison(reports, overflow, coverage, within, max_z, min_fraction)
