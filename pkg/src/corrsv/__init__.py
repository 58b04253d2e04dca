"""Joint singular-value densities of correlated complex Gaussian matrix pairs.

Submodules
----------
specfun      Bessel, Laguerre and Hille-Hardy special functions
sampling     correlated matrix pairs, PCG64 streams, Hermitian eigenvalues
densities    closed-form joint, marginal and special-case densities
quadrature   adaptive Gauss-Kronrod integration
montecarlo   moment and binned-density verification against simulation
mimo         eigen-channel correlation of a Clarke-fading MIMO channel
estimator    scikit-learn style density estimator
cli          command-line interface
"""

from .densities import (
    EnsembleParams,
    joint_eigen_logpdf,
    joint_eigen_pdf,
    joint_marginal_logpdf,
    joint_marginal_pdf,
    joint_singular_logpdf,
    joint_singular_pdf,
    marginal_logpdf,
    marginal_pdf,
    same_matrix_pair_pdf,
)
from .estimator import CorrelatedEigenDensity
from .montecarlo import DensityReport, binned_density_compare, estimate_moments
from .sampling import MatrixPairSpec, sample_pairs
from .specfun import DomainError

__version__ = "0.1.0"

__all__ = [
    "CorrelatedEigenDensity",
    "DensityReport",
    "DomainError",
    "EnsembleParams",
    "MatrixPairSpec",
    "binned_density_compare",
    "estimate_moments",
    "joint_eigen_logpdf",
    "joint_eigen_pdf",
    "joint_marginal_logpdf",
    "joint_marginal_pdf",
    "joint_singular_logpdf",
    "joint_singular_pdf",
    "marginal_logpdf",
    "marginal_pdf",
    "same_matrix_pair_pdf",
    "sample_pairs",
]
