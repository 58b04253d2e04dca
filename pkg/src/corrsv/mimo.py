"""Eigen-channel correlation of a time-varying Rayleigh MIMO channel.

Under Clarke's isotropic model every sub-channel has temporal correlation
``rho_h(tau) = J0(2 pi f_D tau)``. The pair ``(H(t), H(t - tau))`` is then a
correlated Gaussian pair with ``rho = rho_h(tau)``, so each lag is simulated
by drawing independent pairs directly rather than generating a time series.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .montecarlo import DensityReport, run_chunks
from .sampling import MatrixPairSpec, gram_eigenvalues, sample_pairs
from .specfun import bessel_j0

__all__ = [
    "MimoConfig",
    "EigenCorrRow",
    "default_lags",
    "clarke_rho",
    "eigen_corr_theoretical",
    "eigen_corr_simulate",
    "same_instant_corr",
    "cross_moment_report",
    "corr_with_se",
]


def default_lags(f_d=1.0, count=25, lo=0.001, hi=1.5):
    """``tau = 0`` followed by ``count`` lags with ``f_d * tau`` evenly spaced in ``[lo, hi]``."""
    return np.concatenate([[0.0], np.linspace(lo, hi, count) / f_d])


@dataclass(frozen=True)
class MimoConfig:
    n_r: int = 2
    n_t: int = 2
    f_d: float = 1.0
    lags: tuple = field(default_factory=lambda: tuple(default_lags()))
    trials: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.n_r < 1 or self.n_t < 1:
            raise ValueError("antenna counts must be positive")
        if not self.f_d > 0:
            raise ValueError("f_d must be > 0")
        lags = tuple(float(t) for t in self.lags)
        if any(t < 0 for t in lags) or list(lags) != sorted(lags):
            raise ValueError("lags must be nonnegative and sorted ascending")
        if self.trials < 1000:
            raise ValueError("trials must be >= 1000")
        object.__setattr__(self, "lags", lags)

    @property
    def m(self):
        return min(self.n_r, self.n_t)

    @property
    def n(self):
        return max(self.n_r, self.n_t)


@dataclass(frozen=True)
class EigenCorrRow:
    tau: float
    fd_tau: float
    rho_h: float
    k: int
    l: int
    pairing: str
    empirical: float
    theoretical: float
    std_error: float
    n_samples: int


def clarke_rho(f_d, tau):
    """Clarke's temporal correlation ``J0(2 pi f_d tau)``."""
    return bessel_j0(2.0 * math.pi * f_d * np.asarray(tau, dtype=float))


def eigen_corr_theoretical(k, l, tau, f_d):
    """Correlation coefficient of eigen-channels ``k`` and ``l`` of a 2x2 channel.

    ``1`` (``k == l``) or ``-1/2`` (``k != l``) at ``tau == 0``; otherwise
    ``J0(2 pi f_d tau)^2 / 4`` for every pair of indices.
    """
    if k not in (1, 2) or l not in (1, 2):
        raise ValueError("eigen-channel indices must be 1 or 2 for a 2x2 system")
    if tau == 0:
        return 1.0 if k == l else -0.5
    return clarke_rho(f_d, tau) ** 2 / 4.0


def corr_with_se(x, y):
    """Sample correlation and its delta-method standard error.

    Uses the influence function of the correlation coefficient, valid for
    non-Gaussian data: ``u v - r (u^2 + v^2) / 2`` on standardized ``u, v``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = (x - x.mean()) / x.std()
    v = (y - y.mean()) / y.std()
    r = float(np.mean(u * v))
    infl = u * v - 0.5 * r * (u * u + v * v)
    return r, float(infl.std(ddof=1) / math.sqrt(x.size))


def _permuted(eigs, rng):
    # random relabelling makes the eigenvalues exchangeable (unordered)
    order = np.argsort(rng.random(eigs.shape), axis=1)
    return np.take_along_axis(eigs, order, axis=1)


def _lag_draws(spec):
    def draw(rng, size):
        h, g = sample_pairs(spec, size, rng)
        lam_h = gram_eigenvalues(h)
        lam_g = gram_eigenvalues(g)
        return lam_h, lam_g, _permuted(lam_h, rng), _permuted(lam_g, rng)

    return draw


def eigen_corr_simulate(config, n_jobs=1):
    """Simulated eigen-channel correlation per lag, with the theoretical curve.

    For each ``tau > 0`` and each index pair ``(k, l)`` two estimates are
    produced: ``pairing="random"`` labels the eigenvalues of each matrix in
    random order (the unordered convention), ``pairing="rank"`` sorts both in
    descending order. The theoretical value ``J0^2 / 4`` applies to the
    random labelling for ``2x2`` systems; rank rows carry ``nan``. ``tau = 0``
    rows are analytic.
    """
    m = config.m
    square2 = config.n_r == 2 and config.n_t == 2
    rows = []
    for lag_index, tau in enumerate(config.lags):
        rho_h = float(clarke_rho(config.f_d, tau))
        fd_tau = config.f_d * tau
        if tau == 0:
            for k in range(1, m + 1):
                for l in range(1, m + 1):
                    theo = eigen_corr_theoretical(k, l, 0.0, config.f_d) if square2 else math.nan
                    rows.append(EigenCorrRow(tau, fd_tau, rho_h, k, l, "analytic", theo, theo, 0.0, 0))
            continue
        spec = MatrixPairSpec(m, config.n, rho_h)
        parts = run_chunks(_lag_draws(spec), config.trials, [config.seed, lag_index], n_jobs)
        lam_h, lam_g, perm_h, perm_g = (np.concatenate(x) for x in zip(*parts))
        for pairing, xh, xg in (("random", perm_h, perm_g), ("rank", lam_h, lam_g)):
            for k in range(1, m + 1):
                for l in range(1, m + 1):
                    r, se = corr_with_se(xh[:, k - 1], xg[:, l - 1])
                    theo = math.nan
                    if pairing == "random" and square2:
                        theo = eigen_corr_theoretical(k, l, tau, config.f_d)
                    rows.append(
                        EigenCorrRow(tau, fd_tau, rho_h, k, l, pairing, r, theo, se, config.trials)
                    )
    return rows


def same_instant_corr(n_r, n_t, trials, seed, n_jobs=1):
    """Correlation of two distinct randomly chosen eigenvalues of one matrix.

    For ``2x2`` the theoretical value is ``(E[phi varphi] - 4) / 4 = -1/2``.
    """
    m, n = min(n_r, n_t), max(n_r, n_t)
    if m < 2:
        raise ValueError("need at least two eigenvalues")
    spec = MatrixPairSpec(m, n, 0.0)

    def draw(rng, size):
        h, _ = sample_pairs(spec, size, rng)
        lam = _permuted(gram_eigenvalues(h), rng)
        return lam[:, 0], lam[:, 1]

    parts = run_chunks(draw, trials, seed, n_jobs)
    x = np.concatenate([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])
    r, se = corr_with_se(x, y)
    theo = -0.5 if (m, n) == (2, 2) else math.nan
    return DensityReport("same_instant_corr", r, theo, se, int(trials))


def cross_moment_report(rho, trials, seed, n_r=2, n_t=2, pairing=(1, 2), n_jobs=1):
    """Simulated ``E[lambda_k(t) lambda_l(t - tau)]`` against ``4 + |rho|^2``.

    ``rho`` plays the role of ``rho_h(tau)``; eigenvalues are randomly
    labelled and ``pairing`` selects ``(k, l)``.
    """
    if (n_r, n_t) != (2, 2):
        raise ValueError("the closed form 4 + |rho|^2 is for 2x2 systems")
    spec = MatrixPairSpec(2, 2, rho)
    k, l = pairing

    def draw(rng, size):
        _, _, ph, pg = _lag_draws(spec)(rng, size)
        prod = ph[:, k - 1] * pg[:, l - 1]
        return prod.sum(), (prod * prod).sum(), size

    parts = run_chunks(draw, trials, seed, n_jobs)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    count = sum(p[2] for p in parts)
    mean = s1 / count
    se = math.sqrt(max(s2 / count - mean * mean, 0.0) / (count - 1))
    return DensityReport(
        f"cross_moment_k{k}_l{l}", float(mean), 4.0 + abs(complex(rho)) ** 2, se, count
    )
