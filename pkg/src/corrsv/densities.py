"""Closed-form densities for the singular values of a correlated matrix pair.

Notation: ``beta = s**2`` and ``alpha = r**2`` are eigenvalues of ``HH^H``
and ``GG^H``; ``nu = n - m``; ``h_k = k! / (k + nu)!``; every density depends
on ``|rho|`` only. Log-scale functions are the primitives; the natural-scale
functions exponentiate them.

Small ``|rho|`` is numerically delicate: the closed forms divide by powers of
``|rho|`` that a vanishing Bessel determinant (or a cancelling sum of Laguerre
products) compensates. Below a per-``m`` threshold the densities switch to
series representations built from the Hille-Hardy expansion, which are finite
and exact at ``rho = 0``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .specfun import DomainError, laguerre_table, log_bessel_i, log_factorial

__all__ = [
    "EnsembleParams",
    "omega_constant",
    "joint_singular_logpdf",
    "joint_singular_pdf",
    "joint_eigen_logpdf",
    "joint_eigen_pdf",
    "log_weight_function",
    "weight_function",
    "biortho_P",
    "biortho_Q",
    "weighted_Pbar",
    "weighted_Qbar",
    "kernel_K",
    "joint_marginal_logpdf",
    "joint_marginal_pdf",
    "joint_marginal_sr_pdf",
    "marginal_logpdf",
    "marginal_pdf",
    "same_matrix_pair_pdf",
    "same_matrix_pair_logpdf",
    "mrc_joint_pdf",
    "siso_joint_pdf",
    "gamma_tail_bound",
    "truncation_limit",
]

COINCIDENCE_RTOL = 1e-12
_MAX_SERIES_LEVEL = 400
_MAX_TAIL_TERMS = 3000


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble shape ``m <= n`` and correlation modulus ``0 <= rho_abs < 1``."""

    m: int
    n: int
    rho_abs: float = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        if int(self.n) != self.n or self.n < self.m:
            raise DomainError(f"n must be an integer >= m, got {self.n!r}")
        if not 0 <= self.rho_abs < 1:
            raise DomainError(f"rho_abs must lie in [0, 1), got {self.rho_abs!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rho_abs", float(self.rho_abs))

    @property
    def nu(self):
        return self.n - self.m


def _log_h(k, nu):
    return log_factorial(k) - log_factorial(k + nu)


def _h_array(kmax, nu):
    return np.array([math.exp(_log_h(k, nu)) for k in range(kmax + 1)])


def _log_norm_lue(m, nu):
    # log of m! * prod_{j<m} j! (j+nu)!
    return log_factorial(m) + sum(log_factorial(j) + log_factorial(j + nu) for j in range(m))


def _xlogy(a, y):
    # a * log(y) with 0 * log(0) = 0
    y = np.asarray(y, dtype=float)
    if a == 0:
        return np.zeros_like(y)
    with np.errstate(divide="ignore"):
        return a * np.log(y)


def _nonneg(x, name):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite")
    if np.any(x < 0):
        raise DomainError(f"{name} must be >= 0")
    return x


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def omega_constant(m, n):
    """Log of the SVD Jacobian constant ``2^m pi^(mn) / prod_{j=1..m} j! (j+nu-1)!``."""
    if m < 1 or n < m:
        raise DomainError("need n >= m >= 1")
    nu = n - m
    return (
        m * math.log(2.0)
        + m * n * math.log(math.pi)
        - sum(log_factorial(j) + log_factorial(j + nu - 1) for j in range(1, m + 1))
    )


# ---------------------------------------------------------------------------
# vector densities


def _vector_series_threshold(m):
    # below this |rho| the Bessel determinant loses more than ~6 digits
    if m == 1:
        return 1e-6
    return 10.0 ** (-6.0 / (m * (m - 1)))


def _check_spectrum(x, m, name):
    x = _nonneg(x, name).ravel()
    if x.size != m:
        raise DomainError(f"{name} must have length m={m}, got {x.size}")
    return x


def _coincident(x):
    xs = np.sort(x)
    gaps = np.diff(xs)
    return bool(np.any(gaps <= COINCIDENCE_RTOL * np.maximum(np.abs(xs[1:]), 1e-300)))


def _signed_logdet_scaled(logmat):
    # determinant of exp(logmat) with row and column factors pulled out
    row = np.max(logmat, axis=1)
    if np.any(row == -np.inf):
        return 0.0, -np.inf
    scaled = logmat - row[:, None]
    col = np.max(scaled, axis=0)
    if np.any(col == -np.inf):
        return 0.0, -np.inf
    sign, logdet = np.linalg.slogdet(np.exp(scaled - col[None, :]))
    return sign, logdet + row.sum() + col.sum()


def _joint_eigen_closed(beta, alpha, params):
    m, nu, rho = params.m, params.nu, params.rho_abs
    c = 1.0 - rho * rho
    z = 2.0 * rho * np.sqrt(np.outer(beta, alpha)) / c
    sign_det, logdet = _signed_logdet_scaled(log_bessel_i(nu, z))
    dbeta = _signed_log_vandermonde(beta)
    dalpha = _signed_log_vandermonde(alpha)
    sign = sign_det * dbeta[0] * dalpha[0]
    if sign <= 0 or not np.isfinite(logdet):
        return -np.inf
    log_num = (
        -(beta.sum() + alpha.sum()) / c
        + dbeta[1]
        + dalpha[1]
        + float(np.sum(_xlogy(0.5 * nu, beta * alpha)))
        + logdet
    )
    log_den = (
        log_factorial(m)
        + _log_norm_lue(m, nu)
        + (m * params.n - m) * math.log(rho)
        + m * math.log(c)
    )
    return log_num - log_den


def _signed_log_vandermonde(x):
    sign = 1.0
    total = 0.0
    for k in range(1, x.size):
        d = x[k] - x[:k]
        sign *= float(np.prod(np.sign(d)))
        with np.errstate(divide="ignore"):
            total += float(np.sum(np.log(np.abs(d))))
    return sign, total


def _partitions(total, parts, max_part=None):
    # non-increasing sequences of length `parts` (zeros allowed) summing to `total`
    if max_part is None:
        max_part = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, max_part), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _joint_eigen_series(beta, alpha, params):
    # Cauchy-Binet expansion of det[e(b_k) e(a_l) sum_j h_j rho^2j L_j(b_k) L_j(a_l)]:
    # sum over index sets S, weight rho^(2 * excess(S)) prod h_S det L_S(beta) det L_S(alpha)
    m, nu, rho = params.m, params.nu, params.rho_abs
    rho2 = rho * rho
    kmax = m - 1 + 64
    lb = laguerre_table(kmax, nu, beta)
    la = laguerre_table(kmax, nu, alpha)
    h = _h_array(kmax, nu)
    total = 0.0
    quiet = 0
    weight = 1.0
    for level in range(_MAX_SERIES_LEVEL + 1):
        if level > 0:
            weight *= rho2
            if weight == 0.0:
                break
        if m - 1 + level > kmax:
            kmax = 2 * kmax
            lb = laguerre_table(kmax, nu, beta)
            la = laguerre_table(kmax, nu, alpha)
            h = _h_array(kmax, nu)
        contrib = 0.0
        for lam in _partitions(level, m):
            idx = np.arange(m) + np.array(lam[::-1])
            contrib += (
                float(np.prod(h[idx]))
                * np.linalg.det(lb[idx, :])
                * np.linalg.det(la[idx, :])
            )
        contrib *= weight
        total += contrib
        if level > 0 and abs(contrib) <= 1e-17 * abs(total):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    dbeta = _signed_log_vandermonde(beta)
    dalpha = _signed_log_vandermonde(alpha)
    sign = dbeta[0] * dalpha[0] * math.copysign(1.0, total)
    if sign <= 0 or total == 0:
        return -np.inf
    log_e = float(np.sum(_xlogy(nu, beta) - beta + _xlogy(nu, alpha) - alpha))
    return (
        log_e
        + dbeta[1]
        + dalpha[1]
        + math.log(abs(total))
        - log_factorial(m)
        - _log_norm_lue(m, nu)
    )


def joint_eigen_logpdf(beta, alpha, params):
    """Log joint density of the unordered eigenvalues of ``HH^H`` and ``GG^H``.

    Parameters
    ----------
    beta, alpha : array_like, shape (m,)
        Eigenvalues of the two Gram matrices, any order.
    params : EnsembleParams

    Returns
    -------
    float
        ``-inf`` when two entries of ``beta`` (or of ``alpha``) coincide to
        relative precision ``1e-12``, where the density vanishes.
    """
    beta = _check_spectrum(beta, params.m, "beta")
    alpha = _check_spectrum(alpha, params.m, "alpha")
    if params.m > 1 and (_coincident(beta) or _coincident(alpha)):
        return -np.inf
    if params.nu > 0 and (np.any(beta == 0) or np.any(alpha == 0)):
        return -np.inf
    if params.rho_abs < _vector_series_threshold(params.m):
        return _joint_eigen_series(beta, alpha, params)
    return _joint_eigen_closed(beta, alpha, params)


def joint_eigen_pdf(beta, alpha, params):
    return math.exp(joint_eigen_logpdf(beta, alpha, params))


def joint_singular_logpdf(s, r, params):
    """Log joint density of the unordered singular values of ``H`` and ``G``.

    Related to :func:`joint_eigen_logpdf` by the Jacobian ``prod 4 s_k r_k``.
    """
    s = _check_spectrum(s, params.m, "s")
    r = _check_spectrum(r, params.m, "r")
    base = joint_eigen_logpdf(s * s, r * r, params)
    if base == -np.inf:
        return base
    return base + float(np.sum(np.log(4.0 * s * r)))


def joint_singular_pdf(s, r, params):
    return math.exp(joint_singular_logpdf(s, r, params))


# ---------------------------------------------------------------------------
# weight function and bi-orthogonal system


def log_weight_function(beta, alpha, params):
    """Log of the two-variable weight ``w(beta, alpha)``.

    ``(beta alpha)^(nu/2) exp(-(beta+alpha)/(1-rho^2)) I_nu(2 rho sqrt(beta alpha)/(1-rho^2))
    / ((1-rho^2) rho^nu)``; at ``rho = 0`` only the leading Hille-Hardy term
    ``(beta alpha)^nu exp(-beta-alpha) / nu!`` survives.
    """
    beta = _nonneg(beta, "beta")
    alpha = _nonneg(alpha, "alpha")
    nu, rho = params.nu, params.rho_abs
    ba = beta * alpha
    if rho == 0.0:
        out = _xlogy(nu, ba) - beta - alpha - log_factorial(nu)
        return _scalar(out)
    c = 1.0 - rho * rho
    z = 2.0 * rho * np.sqrt(ba) / c
    out = (
        _xlogy(0.5 * nu, ba)
        - (beta + alpha) / c
        + log_bessel_i(nu, z)
        - math.log(c)
        - nu * math.log(rho)
    )
    return _scalar(out)


def weight_function(beta, alpha, params):
    return np.exp(log_weight_function(beta, alpha, params))


def _biortho(k, x, params):
    if params.rho_abs == 0:
        raise DomainError("bi-orthogonal polynomials need rho_abs > 0")
    x = _nonneg(x, "x")
    lk = laguerre_table(k, params.nu, x)[k]
    return _scalar(math.exp(0.5 * _log_h(k, params.nu)) * params.rho_abs ** (-k) * lk)


def biortho_P(k, x, params):
    """``P_k(x) = sqrt(h_k) |rho|^-k L_k^nu(x)``."""
    return _biortho(k, x, params)


def biortho_Q(l, x, params):
    """``Q_l(x)``; same form as :func:`biortho_P`."""
    return _biortho(l, x, params)


def _weighted(k, x, params):
    x = _nonneg(x, "x")
    nu = params.nu
    lk = laguerre_table(k, nu, x)[k]
    log_e = _xlogy(nu, x) - x
    return _scalar(math.exp(0.5 * _log_h(k, nu)) * params.rho_abs**k * np.exp(log_e) * lk)


def weighted_Pbar(k, alpha, params):
    """``int P_k(beta) w(beta, alpha) dbeta = sqrt(h_k) alpha^nu e^-alpha |rho|^k L_k(alpha)``."""
    return _weighted(k, alpha, params)


def weighted_Qbar(l, beta, params):
    """``int Q_l(alpha) w(beta, alpha) dalpha``; mirror of :func:`weighted_Pbar`."""
    return _weighted(l, beta, params)


def kernel_K(x1, x2, params):
    """Correlation kernel ``sum_{k<m} P_k(x1) Qbar_k(x2)`` in its ``rho``-free form."""
    x1, x2 = np.broadcast_arrays(_nonneg(x1, "x1"), _nonneg(x2, "x2"))
    m, nu = params.m, params.nu
    l1 = laguerre_table(m - 1, nu, x1)
    l2 = laguerre_table(m - 1, nu, x2)
    s = np.tensordot(_h_array(m - 1, nu), l1 * l2, axes=1)
    return _scalar(s * np.exp(_xlogy(nu, x2) - x2))


# ---------------------------------------------------------------------------
# scalar joint marginal


def _scalar_series_threshold(m):
    # the literal double sum cancels terms of relative size |rho|^-(2(m-1))
    if m == 1:
        return 0.0
    return 10.0 ** (-6.0 / (2 * (m - 1)))


def _joint_marginal_series(beta, alpha, params):
    # p = p(beta) p(alpha) + e(b) e(a) / m^2 * [sum_{k<m} h_k A_k rho^2(m-1-k)]
    #                                        * [sum_{j>=m} h_j A_j rho^2(j-m+1)]
    m, nu, rho = params.m, params.nu, params.rho_abs
    rho2 = rho * rho
    lb = laguerre_table(m, nu, beta)
    la = laguerre_table(m, nu, alpha)
    h = _h_array(m - 1, nu)
    sb = np.tensordot(h, lb[:m] ** 2, axes=1)
    sa = np.tensordot(h, la[:m] ** 2, axes=1)
    head = np.zeros(beta.shape)
    for k in range(m):
        head += h[k] * lb[k] * la[k] * rho2 ** (m - 1 - k)
    tail = np.zeros(beta.shape)
    if rho2 > 0:
        coef = math.exp(_log_h(m, nu)) * rho2
        lb_prev, lb_cur = lb[m - 1], lb[m]
        la_prev, la_cur = la[m - 1], la[m]
        for j in range(m, m + _MAX_TAIL_TERMS):
            term = coef * lb_cur * la_cur
            tail += term
            if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(tail), 1e-300)) and j > m + 2:
                break
            coef *= rho2 * (j + 1) / (j + 1 + nu)
            lb_prev, lb_cur = lb_cur, ((2 * j + nu + 1 - beta) * lb_cur - (j + nu) * lb_prev) / (j + 1)
            la_prev, la_cur = la_cur, ((2 * j + nu + 1 - alpha) * la_cur - (j + nu) * la_prev) / (j + 1)
    inner = sb * sa + head * tail
    with np.errstate(divide="ignore", invalid="ignore"):
        log_inner = np.where(inner > 0, np.log(np.where(inner > 0, inner, 1.0)), -np.inf)
    out = _xlogy(nu, beta * alpha) - beta - alpha - 2.0 * math.log(m) + log_inner
    return out


def _joint_marginal_closed(beta, alpha, params):
    m, nu, rho = params.m, params.nu, params.rho_abs
    rho2 = rho * rho
    lb = laguerre_table(m - 1, nu, beta)
    la = laguerre_table(m - 1, nu, alpha)
    h = _h_array(m - 1, nu)
    prod = lb * la
    s1 = np.zeros(beta.shape)
    for k in range(m):
        s1 += h[k] * prod[k] / rho2**k
    s2 = np.zeros(beta.shape)
    for k in range(m):
        for l in range(k + 1, m):
            s2 += (
                h[k]
                * h[l]
                * (
                    (lb[k] * la[l]) ** 2
                    + (lb[l] * la[k]) ** 2
                    - (rho2 ** (l - k) + rho2 ** (k - l)) * prod[k] * prod[l]
                )
            )
    log_w = np.asarray(log_weight_function(beta, alpha, params))
    log_e = _xlogy(nu, beta * alpha) - beta - alpha
    with np.errstate(divide="ignore"):
        t1 = log_w + np.log(np.abs(s1))
        t2 = log_e + np.log(np.abs(s2))
    top = np.maximum(t1, t2)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    acc = np.sign(s1) * np.exp(t1 - safe_top) + np.sign(s2) * np.exp(t2 - safe_top)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            (acc > 0) & np.isfinite(top),
            safe_top + np.log(np.where(acc > 0, acc, 1.0)),
            -np.inf,
        )
    return out - 2.0 * math.log(m)


def joint_marginal_logpdf(beta, alpha, params):
    """Log joint density of one randomly selected eigenvalue from each matrix.

    Broadcasts over array arguments. For ``|rho|`` below a threshold that
    depends on ``m`` the cancellation-free rearrangement
    ``p(beta) p(alpha) + correction`` is used; otherwise the closed form with
    the weight function and the double sum over ``k < l``.
    At ``rho_abs == 0`` the result is exactly ``log p(beta) + log p(alpha)``.
    """
    beta = _nonneg(beta, "beta")
    alpha = _nonneg(alpha, "alpha")
    beta, alpha = np.broadcast_arrays(beta, alpha)
    if params.rho_abs == 0 or params.rho_abs < _scalar_series_threshold(params.m):
        out = _joint_marginal_series(beta, alpha, params)
    else:
        out = _joint_marginal_closed(beta, alpha, params)
    return _scalar(out)


def joint_marginal_pdf(beta, alpha, params):
    """Joint density ``p(beta, alpha)``; see :func:`joint_marginal_logpdf`."""
    return np.exp(joint_marginal_logpdf(beta, alpha, params))


def joint_marginal_sr_pdf(s, r, params):
    """Joint density of randomly selected singular values, ``4 s r p(s^2, r^2)``."""
    s = _nonneg(s, "s")
    r = _nonneg(r, "r")
    return 4.0 * s * r * joint_marginal_pdf(s * s, r * r, params)


def marginal_logpdf(alpha, m, n):
    """Log density of one randomly selected eigenvalue of a Wishart-type ``GG^H``."""
    if m < 1 or n < m:
        raise DomainError("need n >= m >= 1")
    alpha = _nonneg(alpha, "alpha")
    nu = n - m
    lt = laguerre_table(m - 1, nu, alpha)
    s = np.tensordot(_h_array(m - 1, nu), lt**2, axes=1)
    return _scalar(np.log(s) + _xlogy(nu, alpha) - alpha - math.log(m))


def marginal_pdf(alpha, m, n):
    """``p(alpha) = (1/m) sum_{k<m} h_k [L_k^nu(alpha)]^2 alpha^nu e^-alpha``.

    >>> round(marginal_pdf(1.0, 1, 1), 12) == round(math.exp(-1), 12)
    True
    """
    return np.exp(marginal_logpdf(alpha, m, n))


def same_matrix_pair_pdf(phi, varphi, m, n):
    """Joint density of two distinct randomly selected eigenvalues of one matrix.

    Requires ``m >= 2``. Vanishes on the diagonal ``phi == varphi``.
    """
    if m < 2:
        raise DomainError("two distinct eigenvalues need m >= 2")
    if n < m:
        raise DomainError("need n >= m")
    phi = _nonneg(phi, "phi")
    varphi = _nonneg(varphi, "varphi")
    phi, varphi = np.broadcast_arrays(phi, varphi)
    nu = n - m
    lp = laguerre_table(m - 1, nu, phi)
    lv = laguerre_table(m - 1, nu, varphi)
    h = _h_array(m - 1, nu)
    total = np.zeros(phi.shape)
    for k in range(m):
        for l in range(m):
            if k == l:
                continue
            total += h[k] * h[l] * ((lp[k] * lv[l]) ** 2 - lp[k] * lp[l] * lv[k] * lv[l])
    out = np.exp(_xlogy(nu, phi * varphi) - phi - varphi) * total / (m * (m - 1))
    return _scalar(np.maximum(out, 0.0))


def same_matrix_pair_logpdf(phi, varphi, m, n):
    p = np.asarray(same_matrix_pair_pdf(phi, varphi, m, n))
    with np.errstate(divide="ignore"):
        return _scalar(np.log(p))


def mrc_joint_pdf(beta, alpha, n, rho_abs):
    """Single-row case ``m = 1``: correlated Gamma(n) pair with Bessel coupling."""
    beta = _nonneg(beta, "beta")
    alpha = _nonneg(alpha, "alpha")
    if not 0 < rho_abs < 1:
        raise DomainError("rho_abs must lie in (0, 1)")
    nu = n - 1
    c = 1.0 - rho_abs**2
    ba = beta * alpha
    z = 2.0 * rho_abs * np.sqrt(ba) / c
    log_p = (
        _xlogy(0.5 * nu, ba)
        - (beta + alpha) / c
        + log_bessel_i(nu, z)
        - log_factorial(nu)
        - math.log(c)
        - nu * math.log(rho_abs)
    )
    return _scalar(np.exp(log_p))


def siso_joint_pdf(beta, alpha, rho_abs):
    """``m = n = 1``: ``exp(-(beta+alpha)/c) I_0(2 rho sqrt(beta alpha)/c) / c``, ``c = 1 - rho^2``."""
    beta = _nonneg(beta, "beta")
    alpha = _nonneg(alpha, "alpha")
    c = 1.0 - rho_abs**2
    z = 2.0 * rho_abs * np.sqrt(beta * alpha) / c
    return _scalar(np.exp(-(beta + alpha) / c + log_bessel_i(0, z)) / c)


# ---------------------------------------------------------------------------
# truncation of semi-infinite integrals


def truncation_limit(m, n):
    """Upper limit ``max(50, 10 (m + n))`` used for eigenvalue integrals."""
    return float(max(50, 10 * (m + n)))


def gamma_tail_bound(m, n, upper):
    """Upper bound on ``P(alpha > upper)`` for a randomly selected eigenvalue.

    Any eigenvalue is at most ``tr(GG^H)``, a Gamma(mn, 1) variable, so the
    bound is the regularized upper incomplete gamma ``Q(mn, upper)``.
    """
    k = m * n
    log_terms = [j * math.log(upper) - log_factorial(j) for j in range(k)]
    top = max(log_terms)
    return math.exp(-upper + top + math.log(sum(math.exp(t - top) for t in log_terms)))
