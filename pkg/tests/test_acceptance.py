"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v``; the lines bypass output capture.
"""

import math
import time

import numpy as np
import pytest

from corrsv.densities import (
    EnsembleParams,
    biortho_P,
    biortho_Q,
    joint_marginal_pdf,
    marginal_pdf,
    mrc_joint_pdf,
    same_matrix_pair_pdf,
    siso_joint_pdf,
    truncation_limit,
    weight_function,
)
from corrsv.mimo import MimoConfig, cross_moment_report, default_lags, eigen_corr_simulate
from corrsv.montecarlo import binned_density_compare, eigen_moments, estimate_moments
from corrsv.quadrature import quad_1d, quad_2d
from corrsv.sampling import MatrixPairSpec
from corrsv.specfun import hille_hardy_closed, hille_hardy_series, hille_hardy_terms_needed

SEED = 7


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def test_01_normalization(report):
    worst, slowest = 0.0, 0.0
    for m, n, rho in ((1, 1, 0.5), (2, 2, 0.3), (2, 3, 0.8)):
        params = EnsembleParams(m, n, rho)
        u = truncation_limit(m, n)
        t0 = time.perf_counter()
        v, _ = quad_2d(lambda b, a: joint_marginal_pdf(b, a, params), (0, u), (0, u), tol=1e-10)
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(v - 1))
    report(1, worst <= 1e-6 and slowest < 10, f"normalization max |I - 1| = {worst:.2e} (tol 1e-6), slowest {slowest:.2f} s (< 10 s)")


def test_02_marginalization(report):
    worst = 0.0
    alphas = np.linspace(0.1, 9.1, 10)
    for n in (2, 3):
        for rho in (0.3, 0.8):
            params = EnsembleParams(2, n, rho)
            u = truncation_limit(2, n)
            v, _ = quad_1d(lambda b: joint_marginal_pdf(b[None, :], alphas[:, None], params), 0, u, tol=1e-12, atol=0)
            worst = max(worst, float(np.max(np.abs(v / marginal_pdf(alphas, 2, n) - 1))))
    report(2, worst <= 1e-6, f"marginalization max relative error {worst:.2e} at 10 points x 4 settings (tol 1e-6)")


def test_03_moments(report):
    mean, second = eigen_moments(2, 2)
    prod, _ = quad_2d(lambda x, y: x * y * same_matrix_pair_pdf(x, y, 2, 2), (0, 40), (0, 40), tol=1e-11)
    ok = abs(mean - 2) <= 1e-8 and abs(second - 8) <= 1e-7 and abs(prod - 2) <= 1e-6
    report(
        3,
        ok,
        f"E[lambda] = {mean:.12f} (2 +- 1e-8), E[lambda^2] = {second:.12f} (8 +- 1e-7), "
        f"E[phi phi'] = {prod:.12f} (2 +- 1e-6)",
    )


def test_04_cross_moment(report):
    parts, ok, slowest = [], True, 0.0
    for rho in (0.2, 0.5, 0.8):
        for pairing in ((1, 1), (1, 2)):
            t0 = time.perf_counter()
            rep = cross_moment_report(rho, 200_000, SEED, pairing=pairing)
            slowest = max(slowest, time.perf_counter() - t0)
            ok &= rep.passed
            parts.append(f"rho={rho} k,l={pairing[0]},{pairing[1]}: z={rep.z_score:+.2f}")
    ok &= slowest < 30
    report(4, ok, f"E[lambda_k lambda_l] vs 4+|rho|^2 within 3 sigma ({'; '.join(parts)}); slowest {slowest:.2f} s (< 30 s)")


def test_05_eigen_channel_correlation(report):
    t0 = time.perf_counter()
    config = MimoConfig(lags=tuple(default_lags(1.0)), trials=200_000, seed=SEED)
    rows = eigen_corr_simulate(config)
    elapsed = time.perf_counter() - t0
    zero = [(r.k, r.l, r.empirical) for r in rows if r.tau == 0]
    zero_ok = zero == [(1, 1, 1.0), (1, 2, -0.5), (2, 1, -0.5), (2, 2, 1.0)]
    sim = [r for r in rows if r.pairing == "random"]
    bad = [r for r in sim if abs(r.empirical - r.theoretical) > 3 * r.std_error or abs(r.empirical - r.theoretical) > 0.02]
    max_dev = max(abs(r.empirical - r.theoretical) for r in sim)
    max_z = max(abs(r.empirical - r.theoretical) / r.std_error for r in sim)
    n_lags = len({r.tau for r in sim})
    ok = zero_ok and not bad and n_lags == 25 and elapsed < 300
    report(
        5,
        ok,
        f"{n_lags} lags x 4 (k,l), {len(bad)} rows outside 3 sigma or 0.02; max |dev| = {max_dev:.4f}, "
        f"max |z| = {max_z:.2f}; tau=0 rows exact: {zero_ok}; {elapsed:.1f} s (< 300 s)",
    )


def test_06_biorthogonality(report):
    worst = 0.0
    for rho in (0.3, 0.9):
        for nu in (0, 1, 2):
            params = EnsembleParams(1, 1 + nu, rho)
            u = truncation_limit(1, 1 + nu)
            for k in range(5):
                for l in range(5):
                    v, _ = quad_2d(
                        lambda b, a: weight_function(b, a, params) * biortho_P(k, b, params) * biortho_Q(l, a, params),
                        (0, u),
                        (0, u),
                        tol=1e-11,
                    )
                    worst = max(worst, abs(v - (k == l)))
    report(6, worst <= 1e-8, f"max |<w P_k, Q_l> - delta_kl| = {worst:.2e} over k,l <= 4 (tol 1e-8)")


def test_07_hille_hardy(report):
    xs = np.linspace(0, 10, 5)
    x, y = np.meshgrid(xs, xs, indexing="ij")
    worst = 0.0
    for z in (0.3, 0.7, 0.95):
        for nu in (0, 1, 3):
            terms = hille_hardy_terms_needed(x, y, z, nu)
            s = hille_hardy_series(x, y, z, nu, terms)
            c = hille_hardy_closed(x, y, z, nu)
            worst = max(worst, float(np.max(np.abs(s - c) / np.abs(c))))
    report(7, worst <= 1e-9, f"series vs closed form max relative error {worst:.2e} on 5x5x3x3 grid (tol 1e-9)")


def test_08_special_case_chain(report):
    pts = np.random.default_rng(SEED).uniform(0.01, 8, size=(20, 2))
    worst = 0.0
    for b, a in pts:
        mrc = mrc_joint_pdf(b, a, 1, 0.6)
        worst = max(
            worst,
            abs(joint_marginal_pdf(b, a, EnsembleParams(1, 1, 0.6)) / mrc - 1),
            abs(siso_joint_pdf(b, a, 0.6) / mrc - 1),
        )
        # and for n > 1 the single-row joint marginal is the MRC form
        worst = max(worst, abs(joint_marginal_pdf(b, a, EnsembleParams(1, 3, 0.6)) / mrc_joint_pdf(b, a, 3, 0.6) - 1))
    report(8, worst <= 1e-12, f"m=1 -> MRC -> SISO max relative difference {worst:.2e} on 20 points (tol 1e-12)")


def test_09_phase_invariance(report):
    real = estimate_moments(MatrixPairSpec(2, 2, 0.5), 200_000, SEED)
    cplx = estimate_moments(MatrixPairSpec.from_polar(2, 2, 0.5, 2.1), 200_000, SEED + 1)
    parts, ok = [], True
    for a, b in zip(real[:3], cplx[:3]):
        sigma = math.hypot(a.std_error, b.std_error)
        z = (a.empirical - b.empirical) / sigma
        ok &= abs(z) <= 3
        parts.append(f"{a.statistic} z={z:+.2f}")
    report(9, ok, f"rho=0.5 vs 0.5 e^(2.1j) within 3 combined sigma ({'; '.join(parts)})")


def test_10_binned_density(report):
    bc = binned_density_compare(MatrixPairSpec(1, 1, 0.5), 100_000, np.linspace(0, 5, 11), seed=SEED)
    report(
        10,
        bc.fraction_within >= 0.97,
        f"{bc.fraction_within:.0%} of 100 bins within 3 sigma (need >= 97%), max |z| = {bc.max_abs_z:.2f}, "
        f"grid covers {bc.coverage:.4f} of the mass, overflow z = {bc.overflow.z_score:+.2f}",
    )
