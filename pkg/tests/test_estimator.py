import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from corrsv.densities import EnsembleParams, joint_eigen_logpdf
from corrsv.estimator import CorrelatedEigenDensity


def test_params_roundtrip_and_clone():
    est = CorrelatedEigenDensity(m=2, n=3, rho_abs=0.4)
    assert est.get_params() == {"m": 2, "n": 3, "rho_abs": 0.4}
    est.set_params(rho_abs=0.7)
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est


def test_fixed_rho_scores_match_density():
    est = CorrelatedEigenDensity(2, 2, 0.5).fit(np.ones((1, 4)))
    X = np.array([[1.0, 2.0, 0.5, 3.0], [0.3, 4.0, 1.1, 2.2]])
    params = EnsembleParams(2, 2, 0.5)
    ref = [joint_eigen_logpdf(x[:2], x[2:], params) for x in X]
    np.testing.assert_allclose(est.score_samples(X), ref)
    assert est.score(X) == pytest.approx(np.mean(ref))
    assert est.n_features_in_ == 4


def test_moment_estimate_of_rho():
    truth = CorrelatedEigenDensity(2, 3, 0.6).fit(np.ones((1, 4)))
    X = truth.sample(40_000, random_state=1)
    fitted = CorrelatedEigenDensity(2, 3).fit(X)
    assert fitted.rho_abs_ == pytest.approx(0.6, abs=0.03)
    # the generating value should score at least as well as a clearly wrong one
    wrong = CorrelatedEigenDensity(2, 3, 0.1).fit(X)
    assert truth.score(X[:500]) > wrong.score(X[:500])


def test_sample_shape_and_determinism():
    est = CorrelatedEigenDensity(3, 4, 0.2).fit(np.ones((1, 6)))
    a = est.sample(10, random_state=3)
    assert a.shape == (10, 6) and np.all(a >= 0)
    assert np.array_equal(a, est.sample(10, random_state=3))


def test_validation_errors():
    est = CorrelatedEigenDensity(2, 2, 0.5)
    with pytest.raises(NotFittedError):
        est.score_samples(np.ones((1, 4)))
    with pytest.raises(ValueError):
        est.fit(np.ones((3, 3)))
    with pytest.raises(ValueError):
        est.fit(-np.ones((3, 4)))
    with pytest.raises(ValueError):
        est.fit(np.array([[1.0, np.nan, 1.0, 1.0]]))
    with pytest.raises(ValueError):
        CorrelatedEigenDensity(2, 2).fit(np.ones((1, 4)))
