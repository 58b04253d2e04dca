"""Verification suite behind ``corrsv verify``.

Every case is a dict with keys in this order::

    name, kind, empirical, theoretical, tolerance_or_sigma, pass[, error]

``kind`` says how ``tolerance_or_sigma`` is read:

* ``"abs"``   -- pass iff ``|empirical - theoretical| <= tolerance``
* ``"rel"``   -- pass iff ``|empirical - theoretical| <= tolerance * |theoretical|``
* ``"sigma"`` -- Monte Carlo; the field holds the standard error ``s`` and the
  case passes iff ``|empirical - theoretical| <= 3 s``
* ``"fraction"`` -- binned comparison; passes iff the fraction of bins within
  three standard errors is at least ``theoretical - tolerance``

A case that raises is recorded with ``pass = false`` and an ``error`` message.
"""

import math

import numpy as np

from .densities import (
    EnsembleParams,
    biortho_P,
    biortho_Q,
    joint_marginal_pdf,
    kernel_K,
    marginal_pdf,
    mrc_joint_pdf,
    same_matrix_pair_pdf,
    truncation_limit,
    weight_function,
)
from .montecarlo import SIGMA_RULE, binned_density_compare, cross_moment, eigen_moments, estimate_moments
from .quadrature import quad_1d, quad_2d
from .sampling import MatrixPairSpec
from .specfun import hille_hardy_closed, hille_hardy_series, hille_hardy_terms_needed

__all__ = ["SCHEMA_VERSION", "make_case", "report_case", "verify_suite"]

SCHEMA_VERSION = "1.0"

_MARGINAL_POINTS = (0.1, 0.7, 1.5, 3.0, 6.0)
_HH_POINTS = (0.5, 2.0, 6.0)
_KERNEL_POINTS = ((0.3, 1.2), (1.0, 4.0), (2.5, 0.6))


def make_case(name, kind, empirical, theoretical, tol):
    """Build a case dict and decide ``pass`` according to ``kind``."""
    empirical = float(empirical)
    theoretical = float(theoretical)
    diff = abs(empirical - theoretical)
    if kind == "abs":
        ok = diff <= tol
    elif kind == "rel":
        ok = diff <= tol * abs(theoretical)
    elif kind == "sigma":
        ok = diff <= SIGMA_RULE * tol
    elif kind == "fraction":
        ok = empirical >= theoretical - tol
    else:
        raise ValueError(f"unknown case kind {kind!r}")
    return {
        "name": name,
        "kind": kind,
        "empirical": empirical,
        "theoretical": theoretical,
        "tolerance_or_sigma": float(tol),
        "pass": bool(ok and math.isfinite(empirical)),
    }


def report_case(report):
    """Case dict from a :class:`~corrsv.montecarlo.DensityReport`."""
    return make_case(report.statistic, "sigma", report.empirical, report.theoretical, report.std_error)


def _failed(name, exc):
    return {
        "name": name,
        "kind": "error",
        "empirical": None,
        "theoretical": None,
        "tolerance_or_sigma": None,
        "pass": False,
        "error": f"{type(exc).__name__}: {exc}",
    }


def _normalization(params):
    upper = truncation_limit(params.m, params.n)
    v, _ = quad_2d(lambda b, a: joint_marginal_pdf(b, a, params), (0, upper), (0, upper), tol=1e-10)
    yield make_case("normalization_joint_marginal", "abs", v, 1.0, 1e-6)
    v, _ = quad_1d(lambda a: marginal_pdf(a, params.m, params.n), 0, upper, tol=1e-12)
    yield make_case("normalization_marginal", "abs", v, 1.0, 1e-8)


def _marginalization(params):
    upper = truncation_limit(params.m, params.n)
    alphas = np.array(_MARGINAL_POINTS)
    # vector-valued integrand: one component per alpha
    v, _ = quad_1d(
        lambda b: joint_marginal_pdf(b[None, :], alphas[:, None], params), 0, upper, tol=1e-12, atol=0
    )
    for a, got in zip(alphas, v):
        yield make_case(f"marginalization_alpha={a:g}", "rel", got, marginal_pdf(a, params.m, params.n), 1e-6)


def _biorthogonality(params, kmax=3):
    upper = truncation_limit(params.m, params.n)
    for k in range(kmax + 1):
        for l in range(kmax + 1):
            v, _ = quad_2d(
                lambda b, a: weight_function(b, a, params) * biortho_P(k, b, params) * biortho_Q(l, a, params),
                (0, upper),
                (0, upper),
                tol=1e-11,
            )
            yield make_case(f"biorthogonality_k={k}_l={l}", "abs", v, float(k == l), 1e-8)


def _hille_hardy(params):
    z = params.rho_abs**2
    pts = np.array(_HH_POINTS)
    terms = hille_hardy_terms_needed(pts[:, None], pts[None, :], z, params.nu)
    for x in _HH_POINTS:
        for y in _HH_POINTS:
            s = hille_hardy_series(x, y, z, params.nu, terms)
            c = hille_hardy_closed(x, y, z, params.nu)
            yield make_case(f"hille_hardy_x={x:g}_y={y:g}", "rel", s, c, 1e-9)


def _moments_quadrature(params):
    m, n, rho = params.m, params.n, params.rho_abs
    mean, second = eigen_moments(m, n)
    # Wishart traces: E tr W = mn, E tr W^2 = mn(m+n)
    yield make_case("quadrature_mean_alpha", "rel", mean, n, 1e-9)
    yield make_case("quadrature_second_moment_alpha", "rel", second, n * (m + n), 1e-8)
    yield make_case("quadrature_cross_moment", "rel", cross_moment(params), n * n + rho**2 * n / m, 1e-8)


def _same_matrix(params):
    m, n = params.m, params.n
    upper = truncation_limit(m, n)
    v, _ = quad_2d(lambda x, y: x * y * same_matrix_pair_pdf(x, y, m, n), (0, upper), (0, upper), tol=1e-11)
    # (E[(tr W)^2] - E tr W^2) / (m (m - 1))
    yield make_case("quadrature_same_matrix_product", "rel", v, n * (n - 1), 1e-8)
    for x, y in _KERNEL_POINTS:
        det = kernel_K(x, x, params) * kernel_K(y, y, params) - kernel_K(x, y, params) * kernel_K(y, x, params)
        yield make_case(
            f"kernel_determinant_phi={x:g}_varphi={y:g}",
            "rel",
            same_matrix_pair_pdf(x, y, m, n),
            det / (m * (m - 1)),
            1e-10,
        )


def _special_case(params):
    for b, a in ((0.2, 0.9), (1.0, 1.0), (3.0, 5.0)):
        yield make_case(
            f"single_row_form_beta={b:g}_alpha={a:g}",
            "rel",
            joint_marginal_pdf(b, a, params),
            mrc_joint_pdf(b, a, params.n, params.rho_abs),
            1e-12,
        )


def _monte_carlo(spec, trials, seed, n_jobs):
    for r in estimate_moments(spec, trials, [seed, 0], n_jobs=n_jobs):
        yield report_case(r)


def _binned(spec, trials, seed, n_jobs):
    m, n = spec.m, spec.n
    upper = n + 3.0 * math.sqrt(m * n)
    bc = binned_density_compare(spec, trials, np.linspace(0, upper, 11), [seed, 1], n_jobs=n_jobs)
    yield make_case("binned_fraction_within_3sigma", "fraction", bc.fraction_within, 1.0, 1.0 - bc.min_fraction)
    yield report_case(bc.overflow)


def verify_suite(m, n, rho_abs, rho_phase=0.0, trials=200_000, seed=0, n_jobs=1):
    """Run every check for one ensemble and return the JSON-ready report."""
    params = EnsembleParams(m, n, rho_abs)
    spec = MatrixPairSpec.from_polar(m, n, rho_abs, rho_phase)
    groups = [
        ("normalization", lambda: _normalization(params)),
        ("marginalization", lambda: _marginalization(params)),
        ("hille_hardy", lambda: _hille_hardy(params)),
        ("moments_quadrature", lambda: _moments_quadrature(params)),
        ("monte_carlo_moments", lambda: _monte_carlo(spec, trials, seed, n_jobs)),
        ("binned", lambda: _binned(spec, trials, seed, n_jobs)),
    ]
    if rho_abs > 0:
        groups.insert(2, ("biorthogonality", lambda: _biorthogonality(params)))
    if m >= 2:
        groups.append(("same_matrix", lambda: _same_matrix(params)))
    if m == 1 and rho_abs > 0:
        groups.append(("single_row", lambda: _special_case(params)))

    cases = []
    for name, build in groups:
        try:
            for case in build():
                cases.append(case)
        except Exception as exc:  # recorded in the report, never raised
            cases.append(_failed(name, exc))
    return {
        "schema_version": SCHEMA_VERSION,
        "suite": "verify",
        "params": {
            "m": m,
            "n": n,
            "rho_abs": float(rho_abs),
            "rho_phase": float(rho_phase),
            "trials": int(trials),
            "seed": int(seed),
        },
        "cases": cases,
        "all_pass": all(c["pass"] for c in cases),
    }
