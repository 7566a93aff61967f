"""Heisenberg-Weyl covariant SIC POMs and their diagonal-Kraus + Fourier decomposition."""

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, as_ket, dagger, omega, projector
from .povm import POM, Basis, KrausSet, SequentialScheme


@dataclass(frozen=True)
class HWGroup:
    dim: int
    Z: np.ndarray
    X: np.ndarray

    def element(self, k, j):
        """X^k Z^j."""
        return np.linalg.matrix_power(self.X, k % self.dim) @ np.linalg.matrix_power(self.Z, j % self.dim)


def hw_generators(d):
    """Clock Z = sum |n> w^n <n| and shift X = sum |n+1><n|."""
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    Z = np.diag(omega(d) ** np.arange(d))
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    return HWGroup(d, Z, X)


def _fiducial(fid, tol):
    try:
        return as_ket(fid, normalized=True, tol=tol)
    except ValueError as exc:
        raise ValueError(f"fiducial: {exc}") from None


def hw_orbit(fid, tol=DEFAULT_TOL):
    """Kets X^k Z^j |fid> keyed by (k, j)."""
    fid = _fiducial(fid, tol)
    g = hw_generators(fid.size)
    return {(k, j): g.element(k, j) @ fid for k in range(g.dim) for j in range(g.dim)}


def hw_sic_from_fiducial(fid, tol=DEFAULT_TOL):
    orbit = hw_orbit(fid, tol)
    d = len(next(iter(orbit.values())))
    labels = tuple(orbit)
    return POM(tuple(projector(orbit[lab]) / d for lab in labels), labels)


def fourier_basis(d):
    """Kets with amplitudes w^(m j) / sqrt(d); ket j is column j of the DFT matrix."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    m = np.arange(d)
    return Basis.from_columns(omega(d) ** np.outer(m, m) / np.sqrt(d))


def decompose_hw(fid, tol=DEFAULT_TOL):
    """Diagonal Kraus operators followed by a Fourier-basis measurement.

    Outcome (k, j) of the composed scheme reproduces X^k Z^j |fid><fid| Z^-j X^-k / d.
    The Kraus operator A_k carries conj(alpha_{p-k}) at diagonal position p so that
    dagger(A_k) |f_j><f_j| A_k has the orbit ket as its range.
    """
    fid = _fiducial(fid, tol)
    d = fid.size
    p = np.arange(d)
    kraus = KrausSet(tuple(np.diag(np.conj(fid[(p - k) % d])) for k in range(d)))
    f = fourier_basis(d)
    return SequentialScheme(kraus, tuple(f for _ in range(d)))


def conjugate_pom(pom, u):
    return POM(tuple(u @ o @ dagger(u) for o in pom.outcomes), pom.labels)
