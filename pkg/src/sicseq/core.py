"""Dense complex linear algebra helpers shared by the whole package.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)`` and kets are
complex arrays of shape ``(d,)``.  All comparisons use an absolute tolerance.
"""

import os
from functools import reduce

import numpy as np

DEFAULT_TOL = float(os.environ.get("SICSEQ_TOL", "1e-10"))


def omega(d):
    """Principal d-th root of unity, exp(2 pi i / d)."""
    return np.exp(2j * np.pi / d)


def as_operator(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    return a


def as_ket(v, normalized=False, tol=DEFAULT_TOL):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"ket must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("ket has non-finite entries")
    if normalized and abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"ket is not normalized (norm {np.linalg.norm(v):.3e})")
    return v


def dagger(a):
    return np.conj(np.transpose(a))


def kron(*ops):
    """Kronecker product; the leftmost factor is the most significant index."""
    if not ops:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, ops)


def trace(a):
    return np.trace(a)


def matmul(*ops):
    return reduce(np.matmul, ops)


def projector(v):
    return np.outer(v, np.conj(v))


def approx_equal(a, b, tol=DEFAULT_TOL):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.max(np.abs(a - b), initial=0.0) <= tol)


def eigvalsh(a):
    """Ascending eigenvalues of a Hermitian operator (LAPACK ``heevd``)."""
    return np.linalg.eigvalsh(a)


def is_hermitian(a, tol=DEFAULT_TOL):
    return approx_equal(a, dagger(a), tol)


def is_unitary(u, tol=DEFAULT_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return approx_equal(u @ dagger(u), np.eye(len(u)), tol)


def is_hermitian_psd(a, tol=DEFAULT_TOL):
    if not is_hermitian(a, tol):
        return False
    return bool(eigvalsh((a + dagger(a)) / 2)[0] >= -tol)


def is_density_matrix(rho, tol=DEFAULT_TOL):
    return is_hermitian_psd(rho, tol) and abs(trace(rho) - 1.0) <= tol


def same_ray(a, b, tol=DEFAULT_TOL):
    """True if two normalized kets agree up to a global phase."""
    return bool(abs(abs(np.vdot(a, b)) - 1.0) <= tol)


def phase_between(a, b):
    """Phase ``p`` with ``b ~ p * a``, taken from the overlap."""
    ov = np.vdot(a, b)
    return ov / abs(ov) if abs(ov) > 0 else 1.0 + 0j


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_ket(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(d, rng):
    """Full-rank random state G G^dag / tr from a d x d complex Gaussian G."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ dagger(g)
    return rho / trace(rho).real


def pure_density(v):
    v = np.asarray(v, dtype=complex)
    return projector(v / np.linalg.norm(v))
