"""Scalar special functions used by the closed-form densities.

All routines accept numpy arrays for the continuous argument and broadcast
elementwise; integer orders and degrees are plain Python ints.
"""

import math

import mpmath
import numpy as np

__all__ = [
    "bessel_i_scaled",
    "log_bessel_i_scaled",
    "log_bessel_i",
    "laguerre",
    "laguerre_table",
    "bessel_j0",
    "log_factorial",
    "hille_hardy_series",
    "hille_hardy_closed",
    "hille_hardy_condition",
    "hille_hardy_terms_needed",
]

MAX_BESSEL_ORDER = 64
MAX_LAGUERRE_DEGREE = 128

_SERIES_SWITCH = 30.0
_RESCALE = 1e200
# largest tolerated ratio of absolute-term sum to sum in double precision
MAX_SERIES_CANCELLATION = 1e5


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _check_order(nu, limit=MAX_BESSEL_ORDER):
    if int(nu) != nu or nu < 0:
        raise DomainError(f"order must be a nonnegative integer, got {nu!r}")
    if nu > limit:
        raise DomainError(f"order {nu} exceeds supported limit {limit}")
    return int(nu)


def _nonneg_array(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError(f"{name} contains NaN")
    if np.any(x < 0):
        raise DomainError(f"{name} must be >= 0")
    return x


def _log_ive_series(nu, z):
    # log of e^-z * sum_k (z/2)^(nu+2k) / (k! (k+nu)!), with running rescale
    half = 0.5 * z
    q = half * half
    log_t0 = nu * np.log(half) - z - math.lgamma(nu + 1)
    term = np.ones_like(z)
    total = np.ones_like(z)
    log_scale = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term[active] *= q[active] / (k * (k + nu))
        total[active] += term[active]
        big = active & (total > _RESCALE)
        if big.any():
            total[big] /= _RESCALE
            term[big] /= _RESCALE
            log_scale[big] += math.log(_RESCALE)
        # terms rise until k ~ z/2; only stop once they are falling and negligible
        falling = q < (k + 1) * (k + 1 + nu)
        active &= ~(falling & (term < 1e-17 * total))
    return log_t0 + log_scale + np.log(total)


def _log_ive_asymptotic(nu, z):
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    k = 0
    while active.any() and k < 200:
        k += 1
        new = term * (-(mu - (2 * k - 1) ** 2) / (8.0 * k * z))
        # stop at the smallest term of the divergent expansion
        growing = np.abs(new) > np.abs(term)
        done = growing | (np.abs(new) < 1e-17 * np.abs(total))
        upd = active & ~growing
        total[upd] += new[upd]
        term[upd] = new[upd]
        active &= ~done
    return -0.5 * np.log(2.0 * math.pi * z) + np.log(total)


def log_bessel_i_scaled(nu, z):
    """Natural log of ``exp(-z) * I_nu(z)`` for integer ``nu`` and ``z >= 0``.

    Uses the ascending power series (carried in scaled form with running
    rescaling) below ``max(30, nu**2)`` and the large-argument expansion
    above it. Returns ``-inf`` at ``z == 0`` for ``nu >= 1``.
    """
    nu = _check_order(nu)
    z = _nonneg_array(z, "z")
    out = np.empty_like(z)
    zero = z == 0
    out[zero] = 0.0 if nu == 0 else -np.inf
    switch = max(_SERIES_SWITCH, float(nu * nu))
    ser = ~zero & (z < switch)
    asy = ~zero & ~ser
    if ser.any():
        out[ser] = _log_ive_series(nu, z[ser])
    if asy.any():
        out[asy] = _log_ive_asymptotic(nu, z[asy])
    return out if out.ndim else float(out)


def bessel_i_scaled(nu, z):
    """Exponentially scaled modified Bessel function ``exp(-z) * I_nu(z)``.

    Parameters
    ----------
    nu : int
        Order, ``0 <= nu <= 64``.
    z : float or array_like
        Argument, ``z >= 0``.

    Returns
    -------
    float or numpy.ndarray
        Value in ``(0, 1]`` for ``nu == 0`` and ``[0, 1)`` otherwise.
    """
    return np.exp(log_bessel_i_scaled(nu, z))


def log_bessel_i(nu, z):
    """Natural log of the unscaled ``I_nu(z)``; finite far past overflow of ``I_nu``."""
    return log_bessel_i_scaled(nu, z) + np.asarray(z, dtype=float)


def laguerre_table(kmax, nu, x):
    """Values of ``L_k^nu(x)`` for ``k = 0..kmax`` stacked along axis 0.

    Upward three-term recurrence
    ``(k+1) L_{k+1} = (2k + nu + 1 - x) L_k - (k + nu) L_{k-1}``.
    """
    if int(kmax) != kmax or kmax < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {kmax!r}")
    if int(nu) != nu or nu < 0:
        raise DomainError(f"parameter nu must be a nonnegative integer, got {nu!r}")
    x = _nonneg_array(x, "x")
    out = np.empty((int(kmax) + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = nu + 1.0 - x
    for k in range(1, int(kmax)):
        out[k + 1] = ((2 * k + nu + 1 - x) * out[k] - (k + nu) * out[k - 1]) / (k + 1)
    return out


def laguerre(k, nu, x):
    """Associated Laguerre polynomial ``L_k^nu(x)`` for ``x >= 0``.

    >>> laguerre(1, 2, 3.0)
    0.0
    >>> laguerre(2, 1, 2.0)
    -1.0
    """
    if k > MAX_LAGUERRE_DEGREE:
        raise DomainError(f"degree {k} exceeds supported limit {MAX_LAGUERRE_DEGREE}")
    val = laguerre_table(k, nu, x)[-1]
    return val if val.ndim else float(val)


def _j0_asymptotic(x):
    # Hankel expansion: b_k = a_k(0) / x^k, P takes even k, Q odd k, alternating
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any() and k < 100:
        k += 1
        new = term * (-((2 * k - 1) ** 2)) / (8.0 * k * x)
        growing = np.abs(new) > np.abs(term)
        upd = active & ~growing
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q[upd] += sign * new[upd]
        else:
            p[upd] += sign * new[upd]
        term = np.where(upd, new, term)
        active &= ~(growing | (np.abs(new) < 1e-18))
    chi = x - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _j0_series(x):
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
        if np.all(np.abs(term) < 1e-18):
            break
    return total


def bessel_j0(x):
    """Bessel function of the first kind of order zero.

    Power series for ``|x| <= 12``, Hankel asymptotic expansion beyond.
    Computed on ``|x|`` so the result is exactly even.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("x contains NaN")
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax <= 12.0
    if small.any():
        out[small] = _j0_series(ax[small])
    if (~small).any():
        out[~small] = _j0_asymptotic(ax[~small])
    return out if out.ndim else float(out)


_LOG_FACT_EXACT = 256
_log_fact_table = [math.log(math.factorial(i)) for i in range(_LOG_FACT_EXACT)]


def log_factorial(n):
    """``ln(n!)``; exact table below 256, ``lgamma`` above."""
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n < _LOG_FACT_EXACT:
        return _log_fact_table[n]
    return math.lgamma(n + 1.0)


def _hille_hardy_terms(x, y, z, nu, terms):
    x = _nonneg_array(x, "x")
    y = _nonneg_array(y, "y")
    if not abs(z) < 1:
        raise DomainError(f"|z| must be < 1, got {z!r}")
    nu = _check_order(nu, limit=MAX_LAGUERRE_DEGREE)
    if terms < 1:
        raise DomainError("terms must be positive")
    x, y = np.broadcast_arrays(x, y)
    coef = 1.0 / math.factorial(nu)
    lx_prev, lx = np.zeros_like(x), np.ones_like(x)
    ly_prev, ly = np.zeros_like(y), np.ones_like(y)
    total = np.zeros_like(x)
    absolute = np.zeros_like(x)
    for k in range(terms):
        t = coef * lx * ly
        total += t
        absolute += np.abs(t)
        coef *= z * (k + 1) / (k + 1 + nu)
        lx, lx_prev = ((2 * k + nu + 1 - x) * lx - (k + nu) * lx_prev) / (k + 1), lx
        ly, ly_prev = ((2 * k + nu + 1 - y) * ly - (k + nu) * ly_prev) / (k + 1), ly
    return total, absolute


def _hille_hardy_mp(x, y, z, nu, terms):
    # same partial sum in extended precision; working digits grow until they
    # exceed the cancellation loss (log10 of absolute sum / |sum|) by 20
    dps = 30
    while True:
        with mpmath.workdps(dps):
            xm, ym, zm = mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(z)
            coef = 1 / mpmath.factorial(nu)
            lx_prev, lx = mpmath.mpf(0), mpmath.mpf(1)
            ly_prev, ly = mpmath.mpf(0), mpmath.mpf(1)
            total = mpmath.mpf(0)
            absolute = mpmath.mpf(0)
            for k in range(terms):
                t = coef * lx * ly
                total += t
                absolute += abs(t)
                coef *= zm * (k + 1) / (k + 1 + nu)
                lx, lx_prev = ((2 * k + nu + 1 - xm) * lx - (k + nu) * lx_prev) / (k + 1), lx
                ly, ly_prev = ((2 * k + nu + 1 - ym) * ly - (k + nu) * ly_prev) / (k + 1), ly
            if total == 0:
                needed = dps + 50
            else:
                needed = int(mpmath.log10(absolute / abs(total))) + 20
            if dps >= needed:
                return float(total)
            dps = needed + 10


def hille_hardy_series(x, y, z, nu, terms):
    """Partial sum ``sum_{k<terms} k! z^k L_k^nu(x) L_k^nu(y) / (k+nu)!``.

    Converges to :func:`hille_hardy_closed` as ``terms`` grows, for ``|z| < 1``.
    Terms alternate in sign and can exceed the sum by many orders of
    magnitude (``x`` far from ``y`` with ``z`` near 1); points whose
    cancellation would cost more than ``1e-11`` relative accuracy in double
    precision are re-summed with ``mpmath`` at sufficient working precision.
    """
    total, absolute = _hille_hardy_terms(x, y, z, nu, terms)
    with np.errstate(divide="ignore", invalid="ignore"):
        lossy = ~(absolute <= MAX_SERIES_CANCELLATION * np.abs(total))
    if np.any(lossy):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        total = np.array(total, dtype=float)
        for idx in zip(*np.nonzero(np.atleast_1d(lossy))):
            i = idx if total.ndim else ()
            total[i] = _hille_hardy_mp(float(xb[i]), float(yb[i]), z, int(nu), terms)
    return total if total.ndim else float(total)


def hille_hardy_condition(x, y, z, nu, terms):
    """Ratio of the absolute-term sum to the partial sum of the series.

    Large values flag cancellation: the series then cannot reproduce the
    closed form to better than roughly ``condition * 1e-16`` relative.
    """
    total, absolute = _hille_hardy_terms(x, y, z, nu, terms)
    with np.errstate(divide="ignore"):
        out = absolute / np.abs(total)
    return out if out.ndim else float(out)


def hille_hardy_terms_needed(x, y, z, nu, rtol=1e-13, max_terms=200_000):
    """Smallest number of terms whose truncation error is below ``rtol`` relative.

    Uses ``|L_k^nu(x)| <= C(k+nu, k) e^(x/2)``, so term ``k`` is bounded by
    ``|z|^k C(k+nu, k) e^((x+y)/2) / nu!``; the tail is summed geometrically and
    compared with the closed form. The largest count over all points is returned.
    """
    x = _nonneg_array(x, "x")
    y = _nonneg_array(y, "y")
    if not 0 < abs(z) < 1:
        return 1
    nu = _check_order(nu)
    closed = np.abs(np.atleast_1d(hille_hardy_closed(x, y, abs(z), nu)))
    log_scale = np.max(0.5 * (np.atleast_1d(x) + np.atleast_1d(y)) - np.log(closed))
    log_z = math.log(abs(z))
    target = math.log(rtol) - log_scale + math.lgamma(nu + 1)
    for k in range(1, max_terms):
        # ratio of consecutive bounds is z (k+1+nu)/(k+1) <= r_k, decreasing in k
        ratio = abs(z) * (k + 1 + nu) / (k + 1)
        if ratio < 1:
            log_bound = k * log_z + math.lgamma(k + nu + 1) - math.lgamma(k + 1) - math.lgamma(nu + 1)
            if log_bound - math.log1p(-ratio) < target:
                return k
    raise DomainError("series needs more than max_terms terms")


def hille_hardy_closed(x, y, z, nu):
    """Closed form of the Hille-Hardy generating function, ``0 <= z < 1``.

    ``(xyz)^(-nu/2) / (1-z) * exp(-z (x+y) / (1-z)) * I_nu(2 sqrt(xyz) / (1-z))``,
    with the ``xyz -> 0`` limit ``1 / (nu! (1-z)^(nu+1))`` at the boundary.
    """
    x = _nonneg_array(x, "x")
    y = _nonneg_array(y, "y")
    if not 0 <= z < 1:
        raise DomainError(f"closed form needs 0 <= z < 1, got {z!r}")
    nu = _check_order(nu)
    x, y = np.broadcast_arrays(x, y)
    xyz = x * y * z
    arg = 2.0 * np.sqrt(xyz) / (1.0 - z)
    log_pref = -math.log1p(-z) - z * (x + y) / (1.0 - z)
    out = np.empty_like(x)
    zero = xyz == 0
    out[zero] = np.exp(log_pref[zero] - nu * math.log1p(-z) - math.lgamma(nu + 1))
    nz = ~zero
    if nz.any():
        out[nz] = np.exp(
            log_pref[nz] - 0.5 * nu * np.log(xyz[nz]) + log_bessel_i(nu, arg[nz])
        )
    return out if out.ndim else float(out)
