"""Correlated complex Gaussian matrix pairs and their singular values.

Random numbers come from ``numpy.random.Generator`` backed by PCG64. Standard
normals are produced by the generator's ``standard_normal`` (ziggurat
method), so a fixed seed reproduces draws bit for bit on a given numpy
release. Independent streams are derived with
``numpy.random.SeedSequence(seed).spawn(k)``; stream ``i`` always belongs to
chunk ``i`` regardless of how chunks are scheduled.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "MatrixPairSpec",
    "SpectrumSample",
    "make_rng",
    "spawn_rngs",
    "complex_normal",
    "sample_pair",
    "sample_pairs",
    "singular_values",
    "gram_eigenvalues",
    "hermitian_eigvalsh",
    "matrix_pair_log_density",
    "vandermonde",
]


class SpecError(ValueError):
    """Invalid ensemble specification."""


@dataclass(frozen=True)
class MatrixPairSpec:
    """Shape and cross-correlation of the pair ``(H, G)``.

    ``rho`` is complex; ``E[h_ij conj(g_pq)] = rho * delta_ip * delta_jq``.
    """

    m: int
    n: int
    rho: complex = 0.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise SpecError(f"m must be a positive integer, got {self.m!r}")
        if int(self.n) != self.n or self.n < self.m:
            raise SpecError(f"n must be an integer >= m, got n={self.n!r}, m={self.m!r}")
        rho = complex(self.rho)
        if not np.isfinite(rho) or abs(rho) >= 1:
            raise SpecError(f"|rho| must be < 1, got {self.rho!r}")
        object.__setattr__(self, "rho", rho)

    @property
    def nu(self):
        return self.n - self.m

    @classmethod
    def from_polar(cls, m, n, rho_abs, rho_phase=0.0):
        return cls(m, n, complex(rho_abs * np.exp(1j * rho_phase)))


@dataclass(frozen=True)
class SpectrumSample:
    """Singular values of a sampled pair, each sorted in descending order."""

    s: np.ndarray
    r: np.ndarray

    @property
    def beta(self):
        return self.s**2

    @property
    def alpha(self):
        return self.r**2


def make_rng(seed):
    """PCG64 generator for an integer seed, ``SeedSequence`` or generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed, count):
    """``count`` independent generators derived from ``seed`` by index."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(count)]


def complex_normal(rng, shape):
    """i.i.d. CN(0, 1): real and imaginary parts independent N(0, 1/2)."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * math.sqrt(0.5)


def sample_pairs(spec, size, rng):
    """Draw ``size`` independent pairs; returns arrays of shape ``(size, m, n)``.

    ``G = conj(rho) * H + sqrt(1 - |rho|^2) * W`` with ``W`` an independent
    copy of ``H``, which gives ``E[h conj(g)] = rho`` entrywise.
    """
    if not isinstance(spec, MatrixPairSpec):
        raise SpecError("spec must be a MatrixPairSpec")
    rng = make_rng(rng)
    shape = (int(size), spec.m, spec.n)
    h = complex_normal(rng, shape)
    w = complex_normal(rng, shape)
    g = np.conj(spec.rho) * h + math.sqrt(1.0 - abs(spec.rho) ** 2) * w
    return h, g


def sample_pair(spec, rng):
    """Draw one ``(H, G)`` pair of ``m x n`` complex matrices."""
    h, g = sample_pairs(spec, 1, rng)
    return h[0], g[0]


def _jacobi_eigvalsh(a, tol=1e-13, max_sweeps=60):
    # cyclic complex Jacobi on a batch of Hermitian matrices, shape (B, m, m)
    a = np.array(a, dtype=complex, copy=True)
    m = a.shape[-1]
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    scale = np.where(scale > 0, scale, 1.0)
    for _ in range(max_sweeps):
        off = np.abs(a[:, ~np.eye(m, dtype=bool)])
        if off.size == 0 or np.all(off.max(axis=-1) < tol * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[:, p, q]
                mag = np.abs(apq)
                # entries below 1e-18 relative are already negligible; rotating
                # on subnormal magnitudes would overflow the phase
                todo = mag > 1e-18 * scale
                if not todo.any():
                    continue
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                # phase removal makes the 2x2 block real symmetric
                phase = np.where(todo, apq / np.where(todo, mag, 1.0), 1.0)
                theta = 0.5 * np.arctan2(2.0 * mag, aqq - app)
                c = np.cos(theta)
                s = np.sin(theta)
                # columns: A <- A J, J = [[c, s*phase], [-s*conj(phase), c]]
                ap = a[:, :, p].copy()
                aq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * ap - (s * np.conj(phase))[:, None] * aq
                a[:, :, q] = (s * phase)[:, None] * ap + c[:, None] * aq
                # rows: A <- J^H A
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
                a[:, q, :] = (s * np.conj(phase))[:, None] * rp + c[:, None] * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")
    return np.diagonal(a, axis1=-2, axis2=-1).real


def hermitian_eigvalsh(a):
    """Eigenvalues of Hermitian matrices ``(..., m, m)``, descending.

    Closed form for ``m <= 2``; cyclic Jacobi rotations otherwise.
    """
    a = np.asarray(a)
    batch = a.shape[:-2]
    m = a.shape[-1]
    a = a.reshape((-1, m, m))
    if m == 1:
        ev = a[:, :, 0].real
    elif m == 2:
        p = a[:, 0, 0].real
        q = a[:, 1, 1].real
        c2 = np.abs(a[:, 0, 1]) ** 2
        mean = 0.5 * (p + q)
        rad = np.sqrt((0.5 * (p - q)) ** 2 + c2)
        hi = mean + rad
        det = p * q - c2
        # smaller root via det / hi avoids cancellation in mean - rad
        lo = np.where(hi > 0, det / np.where(hi > 0, hi, 1.0), mean - rad)
        ev = np.stack([hi, lo], axis=-1)
    else:
        ev = _jacobi_eigvalsh(a)
    ev = -np.sort(-ev, axis=-1)
    return ev.reshape(batch + (m,))


def gram_eigenvalues(mat):
    """Eigenvalues of ``M M^H`` for ``M`` of shape ``(..., m, n)``, ``m <= n``, descending."""
    mat = np.asarray(mat)
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    if mat.shape[-2] > mat.shape[-1]:
        raise ValueError("expected m <= n; transpose the matrix first")
    gram = mat @ np.conj(np.swapaxes(mat, -1, -2))
    return np.maximum(hermitian_eigvalsh(gram), 0.0)


def singular_values(mat):
    """Singular values of ``M`` (``m <= n``), descending, from the Gram eigenvalues."""
    return np.sqrt(gram_eigenvalues(mat))


def matrix_pair_log_density(h, g, rho):
    """Log of the joint density of a correlated pair ``(H, G)``.

    ``-2mn ln(pi) - mn ln(1 - |rho|^2) - tr(HH^H + GG^H - conj(rho) HG^H - rho GH^H) / (1 - |rho|^2)``
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if h.shape != g.shape or h.ndim != 2:
        raise ValueError(f"H and G must be matrices of equal shape, got {h.shape} and {g.shape}")
    rho = complex(rho)
    if abs(rho) >= 1:
        raise SpecError(f"|rho| must be < 1, got {rho!r}")
    mn = h.size
    one_minus = 1.0 - abs(rho) ** 2
    tr = (
        np.vdot(h, h)
        + np.vdot(g, g)
        - np.conj(rho) * np.vdot(g, h)
        - rho * np.vdot(h, g)
    )
    # vdot(a, b) = sum conj(a) b = tr(B A^H)
    mag = max(abs(np.vdot(h, h)) + abs(np.vdot(g, g)), 1.0)
    assert abs(tr.imag) <= 1e-12 * mag, "trace of a Hermitian combination must be real"
    return -2 * mn * math.log(math.pi) - mn * math.log(one_minus) - tr.real / one_minus


def vandermonde(x):
    """``prod_{k>l} (x_k - x_l)``; ``1`` for a single element."""
    x = np.asarray(x, dtype=float).ravel()
    out = 1.0
    for k in range(1, x.size):
        out *= float(np.prod(x[k] - x[:k]))
    return out
