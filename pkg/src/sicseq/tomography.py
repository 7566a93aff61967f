"""Linear-inversion state tomography from the outcome statistics of an IC POM."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import DEFAULT_TOL, dagger, eigvalsh, is_hermitian
from .povm import is_ic

PINV_CUTOFF = 1e-12


@lru_cache(maxsize=None)
def gell_mann_basis(d):
    """Orthonormal Hermitian operator basis: identity/sqrt(d), then the generalized Gell-Mann matrices.

    Order after the identity: symmetric (j<k), antisymmetric (j<k), diagonal l=1..d-1.
    Every element G satisfies tr(G_a G_b) = delta_ab.
    """
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            ops.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j / np.sqrt(2)
            m[k, j] = 1j / np.sqrt(2)
            ops.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    out = np.array(ops)
    out.setflags(write=False)
    return out


def to_coordinates(rho):
    g = gell_mann_basis(rho.shape[0])
    return np.einsum("aij,ji->a", g, rho).real


def from_coordinates(x):
    d = int(round(np.sqrt(len(x))))
    return np.einsum("a,aij->ij", x, gell_mann_basis(d))


@dataclass
class MeasurementMatrix:
    pom: object
    matrix: np.ndarray

    @property
    def rank(self):
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        return int(np.sum(sv > PINV_CUTOFF * sv[0]))

    @property
    def condition_number(self):
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        return float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf


def measurement_matrix(pom):
    """Rows: outcomes; columns: Gell-Mann coordinates.  M @ to_coordinates(rho) = probabilities."""
    g = gell_mann_basis(pom.dim)
    m = np.einsum("kij,aji->ka", pom.stack(), g).real
    return MeasurementMatrix(pom, m)


def trace_distance(a, b):
    if not (is_hermitian(a, 1e-8) and is_hermitian(b, 1e-8)):
        raise ValueError("trace distance needs Hermitian operators")
    diff = a - b
    return float(0.5 * np.sum(np.abs(eigvalsh((diff + dagger(diff)) / 2))))


def fidelity(a, b):
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 for PSD a, b."""
    w, v = np.linalg.eigh(a)
    sa = (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)
    inner = eigvalsh(sa @ b @ sa)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


def project_to_density(rho):
    """Clip negative eigenvalues and restore unit trace."""
    w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
    w = np.clip(w, 0, None)
    if w.sum() <= 0:
        return np.eye(len(w)) / len(w)
    w = w / w.sum()
    return (v * w) @ dagger(v)


@dataclass
class TomographyReport:
    reconstructed: np.ndarray
    residual_norm: float
    psd_projected: bool
    min_eigenvalue: float
    trace_distance: float = None
    fidelity: float = None

    def compare(self, truth):
        self.trace_distance = trace_distance(self.reconstructed, truth)
        self.fidelity = fidelity(project_to_density(self.reconstructed), truth)
        return self


def reconstruct(probabilities, pom, project_psd=False, truth=None, tol=DEFAULT_TOL):
    """Least-squares state estimate with the trace fixed to one."""
    p = np.asarray(probabilities, dtype=float)
    if p.shape != (len(pom),):
        raise ValueError(f"expected {len(pom)} probabilities, got {p.shape}")
    if abs(p.sum() - 1) > 1e-6:
        raise ValueError(f"probabilities sum to {p.sum()}, not 1")
    if not is_ic(pom, tol):
        raise ValueError("POM is not informationally complete; the state is not determined")
    mm = measurement_matrix(pom).matrix
    d = pom.dim
    # identity coordinate is fixed by unit trace
    rhs = p - mm[:, 0] / np.sqrt(d)
    x_rest = np.linalg.pinv(mm[:, 1:], rcond=PINV_CUTOFF) @ rhs
    x = np.concatenate([[1 / np.sqrt(d)], x_rest])
    rho = from_coordinates(x)
    residual = float(np.linalg.norm(mm @ x - p))
    min_ev = float(eigvalsh(rho)[0])
    if project_psd:
        rho = project_to_density(rho)
    report = TomographyReport(rho, residual, bool(project_psd), min_ev)
    if truth is not None:
        report.compare(truth)
    return report


def counts_to_frequencies(counts):
    counts = np.asarray(counts, dtype=float)
    if counts.sum() <= 0:
        raise ValueError("no counts")
    return counts / counts.sum()


def self_test(pom, states, rng=None, shots=None):
    """Round-trip trace distances for a list of states; sampled when ``shots`` is given."""
    from .povm import born_probabilities

    dists = []
    for rho in states:
        p = born_probabilities(pom, rho)
        if shots:
            p = counts_to_frequencies(rng.multinomial(shots, p))
        dists.append(reconstruct(p, pom, truth=rho).trace_distance)
    return np.array(dists)
