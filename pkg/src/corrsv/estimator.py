"""Scikit-learn style wrapper around the joint eigenvalue density.

Each row of ``X`` holds one observed pair of spectra: the ``m`` eigenvalues
of ``HH^H`` followed by the ``m`` eigenvalues of ``GG^H``.
"""

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .densities import EnsembleParams, joint_eigen_logpdf
from .sampling import MatrixPairSpec, gram_eigenvalues, make_rng, sample_pairs

__all__ = ["CorrelatedEigenDensity"]


class CorrelatedEigenDensity(DensityMixin, BaseEstimator):
    """Joint density of the eigenvalues of a correlated Gram-matrix pair.

    Parameters
    ----------
    m, n : int
        Matrix shape, ``1 <= m <= n``.
    rho_abs : float or None
        Correlation modulus. ``None`` estimates it in :meth:`fit` by the
        method of moments: for randomly selected eigenvalues
        ``cov(beta, alpha) = rho^2 n / m``.

    Attributes
    ----------
    rho_abs_ : float
        Modulus used for scoring.
    params_ : EnsembleParams
    n_features_in_ : int
        Always ``2 * m``.
    """

    def __init__(self, m=2, n=2, rho_abs=None):
        self.m = m
        self.n = n
        self.rho_abs = rho_abs

    def _split(self, X, reset):
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != 2 * self.m:
            raise ValueError(f"X must have 2*m = {2 * self.m} columns, got {X.shape[1]}")
        if np.any(X < 0):
            raise ValueError("eigenvalues must be nonnegative")
        if reset:
            self.n_features_in_ = X.shape[1]
        return X[:, : self.m], X[:, self.m :]

    def fit(self, X, y=None):
        beta, alpha = self._split(X, reset=True)
        if self.rho_abs is None:
            if beta.shape[0] < 2:
                raise ValueError("estimating rho_abs needs at least two rows")
            # every (k, l) pairing is an equally valid random selection
            cov = np.mean(
                [np.cov(beta[:, k], alpha[:, l])[0, 1] for k in range(self.m) for l in range(self.m)]
            )
            rho2 = np.clip(cov * self.m / self.n, 0.0, 1.0 - 1e-9)
            self.rho_abs_ = float(np.sqrt(rho2))
        else:
            self.rho_abs_ = float(self.rho_abs)
        self.params_ = EnsembleParams(self.m, self.n, self.rho_abs_)
        return self

    def score_samples(self, X):
        """Log density of each row."""
        check_is_fitted(self, "params_")
        beta, alpha = self._split(X, reset=False)
        return np.array([joint_eigen_logpdf(b, a, self.params_) for b, a in zip(beta, alpha)])

    def score(self, X, y=None):
        """Mean log-likelihood of the rows of ``X``."""
        return float(np.mean(self.score_samples(X)))

    def sample(self, n_samples=1, random_state=None):
        """Draw eigenvalue pairs from the fitted ensemble, shape ``(n_samples, 2m)``."""
        check_is_fitted(self, "params_")
        spec = MatrixPairSpec(self.m, self.n, self.rho_abs_)
        h, g = sample_pairs(spec, n_samples, make_rng(random_state))
        return np.hstack([gram_eigenvalues(h), gram_eigenvalues(g)])
