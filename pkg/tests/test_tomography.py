import numpy as np
import pytest

from sicseq.catalog import catalog_pom, catalog_scheme
from sicseq.core import is_density_matrix, pure_density, random_density, random_ket
from sicseq.optics import build_apparatus
from sicseq.povm import POM, born_probabilities, compose_sequential
from sicseq.tomography import (
    counts_to_frequencies,
    fidelity,
    from_coordinates,
    gell_mann_basis,
    measurement_matrix,
    project_to_density,
    reconstruct,
    self_test,
    to_coordinates,
    trace_distance,
)


def computational_pom(d):
    return POM(tuple(np.diag(np.eye(d)[k]) for k in range(d)))


@pytest.mark.parametrize("d", (2, 3, 5))
def test_gell_mann_orthonormal(d):
    g = gell_mann_basis(d)
    gram = np.einsum("aij,bji->ab", g, g)
    assert np.allclose(gram, np.eye(d * d))
    for op in g:
        assert np.allclose(op, op.conj().T)


def test_coordinates_round_trip(rng):
    rho = random_density(4, rng)
    assert np.allclose(from_coordinates(to_coordinates(rho)), rho)


def test_measurement_matrix_ranks():
    assert measurement_matrix(computational_pom(2)).rank == 2
    mm = measurement_matrix(catalog_pom(2))
    assert mm.rank == 4 and np.isfinite(mm.condition_number)
    assert measurement_matrix(catalog_pom(8)).rank == 64


def test_measurement_matrix_reproduces_born(rng):
    pom = catalog_pom(3)
    rho = random_density(3, rng)
    m = measurement_matrix(pom).matrix
    assert np.allclose(m @ to_coordinates(rho), born_probabilities(pom, rho))


def test_trace_distance_examples(rng):
    rho = random_density(3, rng)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-15)
    assert trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)
    assert trace_distance(np.diag([1.0, 0]), np.eye(2) / 2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        trace_distance(np.array([[0, 1], [0, 0]]), np.eye(2) / 2)


def test_fidelity_examples(rng):
    v = random_ket(3, rng)
    assert fidelity(pure_density(v), pure_density(v)) == pytest.approx(1.0)
    assert fidelity(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(0.0, abs=1e-12)


def test_uniform_probabilities_give_maximally_mixed():
    for d in (2, 3, 4, 8):
        rep = reconstruct(np.full(d * d, 1 / d**2), catalog_pom(d))
        assert np.allclose(rep.reconstructed, np.eye(d) / d, atol=1e-12)


def test_pure_state_dim4(rng):
    pom = catalog_pom(4)
    v = random_ket(4, rng)
    rep = reconstruct(born_probabilities(pom, pure_density(v)), pom, truth=pure_density(v))
    assert rep.trace_distance < 1e-8
    # sqrt of near-zero eigenvalues turns 1e-16 roundoff into ~1e-8
    assert rep.fidelity == pytest.approx(1.0, abs=1e-6)
    assert rep.residual_norm < 1e-12


@pytest.mark.parametrize("d", (2, 3, 4, 8))
def test_round_trip_catalog(d, rng):
    states = [random_density(d, rng) for _ in range(50)]
    assert self_test(catalog_pom(d), states).max() < 1e-8


def test_reconstruct_errors():
    pom = catalog_pom(2)
    with pytest.raises(ValueError):
        reconstruct(np.full(4, 0.3), pom)
    with pytest.raises(ValueError):
        reconstruct(np.full(3, 1 / 3), pom)
    with pytest.raises(ValueError):
        reconstruct(np.array([0.5, 0.5]), computational_pom(2))


def test_psd_projection(rng):
    pom = catalog_pom(2)
    # an extreme pure state with noisy frequencies typically leaves the Bloch ball
    p = born_probabilities(pom, pure_density(np.array([1, 0])))
    p = counts_to_frequencies(p * 100 + np.array([3, -3, 2, -2]))
    raw = reconstruct(p, pom)
    proj = reconstruct(p, pom, project_psd=True)
    assert raw.min_eigenvalue < 0
    assert proj.psd_projected and is_density_matrix(proj.reconstructed)
    assert np.trace(raw.reconstructed).real == pytest.approx(1.0)


def test_project_to_density_identity_on_states(rng):
    rho = random_density(3, rng)
    assert np.allclose(project_to_density(rho), rho)


def test_optics_and_born_reconstruct_same_state(rng):
    for d in (2, 3, 4, 8):
        scheme = catalog_scheme(d)
        pom = compose_sequential(scheme)
        app = build_apparatus(scheme)
        rho = random_density(d, rng)
        a = reconstruct(app.distribution(rho), pom).reconstructed
        b = reconstruct(born_probabilities(pom, rho), pom).reconstructed
        assert trace_distance(a, b) < 1e-8


def test_counts_to_frequencies():
    assert np.allclose(counts_to_frequencies([1, 3]), [0.25, 0.75])
    with pytest.raises(ValueError):
        counts_to_frequencies([0, 0])


def test_sampled_error_scaling():
    pom = catalog_pom(2)
    rng = np.random.default_rng(5)
    states = [random_density(2, rng) for _ in range(50)]
    shots = np.array([10**3, 10**4, 10**5, 10**6])
    med = [np.median(self_test(pom, states, np.random.default_rng(int(n)), int(n))) for n in shots]
    slope = np.polyfit(np.log10(shots), np.log10(med), 1)[0]
    assert -0.6 <= slope <= -0.4
    assert med[-1] < 5e-3
