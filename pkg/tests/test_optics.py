import numpy as np
import pytest

from sicseq.catalog import catalog_scheme, hw_fiducial, qutrit_family_scheme
from sicseq.core import dagger, pure_density, random_density, random_ket, random_unitary
from sicseq.hwsic import decompose_hw, fourier_basis
from sicseq.optics import (
    QUTRIT_FT_BLOCKS,
    BeamSplitter,
    Circuit,
    PhaseShifter,
    build_apparatus,
    cascade_for_targets,
    qutrit_fourier_assignment,
    qutrit_fourier_circuit,
    reck_decompose,
    sample_clicks,
    simulate,
    solve_bs_cascade,
    stage1_circuit,
)
from sicseq.povm import KrausSet, SequentialScheme, Basis, born_probabilities, compose_sequential
from sicseq.serialize import circuit_from_json, circuit_to_json


def routed(params, d):
    """Amplitudes reaching each branch of one cascade."""
    out, carried = [], 1.0 + 0j
    for r, t in params:
        out.append(-np.conj(r) * carried)
        carried *= t
    out.append(carried)
    return np.array(out)


def test_beam_splitter_validation():
    with pytest.raises(ValueError):
        BeamSplitter(0, 1, 0.5, 0.5)
    with pytest.raises(ValueError):
        BeamSplitter(1, 1, 1.0, 0.0)
    bs = BeamSplitter(0, 1, 0.6, 0.8j)
    blk = bs.block()
    assert np.allclose(blk @ dagger(blk), np.eye(2))


def test_circuit_rejects_bad_mode():
    with pytest.raises(ValueError):
        Circuit(2, [PhaseShifter(2, 0.1)])


def test_simulate_examples():
    v = np.array([0.6, 0.8j])
    assert np.allclose(simulate(Circuit(2), v), v)
    s = 1 / np.sqrt(2)
    out = simulate(Circuit(2, [BeamSplitter(0, 1, s, s)]), np.array([1.0, 0.0]))
    assert np.allclose(np.abs(out) ** 2, [0.5, 0.5])
    with pytest.raises(ValueError):
        simulate(Circuit(3), v)
    with pytest.raises(ValueError):
        simulate(Circuit(2), np.array([1.0, 1.0]))


def test_cascade_balanced_qubit():
    params = solve_bs_cascade(np.array([1, 1]) / np.sqrt(2))
    for path in params:
        assert len(path) == 1
        r, t = path[0]
        assert abs(r) ** 2 == pytest.approx(0.5) and abs(t) ** 2 == pytest.approx(0.5)


def test_cascade_with_zero_amplitude():
    alphas = np.array([1, 1j, 0]) / np.sqrt(2)
    for p, path in enumerate(solve_bs_cascade(alphas)):
        targets = [alphas[(p - g) % 3] for g in range(3)]
        assert np.allclose(routed(path, 3), targets, atol=1e-14)


def test_cascade_exhausted_chain():
    params = cascade_for_targets([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(routed(params, 4), [1, 0, 0, 0])


def test_cascade_rejects_unnormalized():
    with pytest.raises(ValueError):
        cascade_for_targets([1.0, 1.0])


@pytest.mark.parametrize("d", range(2, 9))
def test_cascade_routes_targets(d, rng):
    alphas = random_ket(d, rng)
    for p, path in enumerate(solve_bs_cascade(alphas)):
        targets = np.array([alphas[(p - g) % d] for g in range(d)])
        amps = routed(path, d)
        assert np.allclose(amps, targets, atol=1e-12)
        assert np.linalg.norm(amps) == pytest.approx(1.0)


def test_stage1_on_basis_states(rng):
    d = 4
    fid = random_ket(d, rng)
    diagonals = np.array([[fid[(p - g) % d] for p in range(d)] for g in range(d)])
    circ = stage1_circuit(diagonals)
    for p in range(d):
        v = np.zeros(d * d, dtype=complex)
        v[(d - 1) * d + p] = 1
        out = simulate(circ, v).reshape(d, d)
        assert np.allclose(out[:, p], diagonals[:, p], atol=1e-12)
        assert np.allclose(np.delete(out, p, axis=1), 0)


def test_reck_identity_is_trivial():
    circ = reck_decompose(np.eye(4))
    assert circ.count(BeamSplitter) == 0
    assert np.allclose(circ.transfer_matrix(), np.eye(4))


def test_reck_rejects_non_unitary():
    with pytest.raises(ValueError):
        reck_decompose(np.diag([1.0, 2.0]))


def test_reck_fourier_qutrit():
    f = fourier_basis(3).matrix()
    circ = reck_decompose(f)
    assert np.max(np.abs(circ.transfer_matrix() - f)) < 1e-10
    assert circ.count(BeamSplitter) <= 3


def test_reck_round_trip(rng):
    for i in range(50):
        d = 2 + i % 7
        u = random_unitary(d, rng)
        circ = reck_decompose(u)
        assert circ.count(BeamSplitter) <= d * (d - 1) // 2
        assert np.max(np.abs(circ.transfer_matrix() - u)) < 1e-10


def test_qutrit_fourier_blocks_unitary():
    for blk in QUTRIT_FT_BLOCKS:
        assert np.allclose(blk @ dagger(blk), np.eye(2))
        assert abs(np.linalg.det(blk)) == pytest.approx(1.0)


def test_qutrit_fourier_circuit():
    assignment, _, _ = qutrit_fourier_assignment()
    assert assignment == ((0, 1), (0, 2), (0, 1))
    circ = qutrit_fourier_circuit()
    assert circ.count(BeamSplitter) == 3
    assert np.max(np.abs(circ.transfer_matrix() - fourier_basis(3).matrix())) < 1e-10


def apparatus_error(scheme, states):
    app = build_apparatus(scheme)
    pom = compose_sequential(scheme)
    worst = 0.0
    for rho in states:
        worst = max(worst, np.max(np.abs(app.distribution(rho) - born_probabilities(pom, rho))))
    return worst


@pytest.mark.parametrize(
    "scheme",
    [
        catalog_scheme(2),
        qutrit_family_scheme(0.0),
        qutrit_family_scheme(np.pi / 12),
        qutrit_family_scheme(np.pi / 6),
        catalog_scheme(4),
        decompose_hw(hw_fiducial(4)),
        decompose_hw(hw_fiducial(8)),
        catalog_scheme(8),
    ],
    ids=["tetra", "qutrit0", "qutrit-pi12", "qutrit-pi6", "dim4", "hw4", "hw8", "hoggar"],
)
def test_born_agreement(scheme, rng):
    d = scheme.dim
    pure = [pure_density(random_ket(d, rng)) for _ in range(100)]
    mixed = [random_density(d, rng) for _ in range(10)]
    assert apparatus_error(scheme, pure + mixed) < 1e-10


def test_apparatus_isometry():
    for scheme in (catalog_scheme(2), qutrit_family_scheme(0.3), catalog_scheme(8)):
        t = build_apparatus(scheme).transfer_matrix()
        assert np.max(np.abs(dagger(t) @ t - np.eye(scheme.dim))) < 1e-10


def test_pure_ket_input_matches_density(rng):
    app = build_apparatus(catalog_scheme(4))
    v = random_ket(4, rng)
    assert np.allclose(app.distribution(v), app.distribution(pure_density(v)))


def test_detector_labels():
    app = build_apparatus(catalog_scheme(3))
    assert app.labels == [(k, j) for k in range(3) for j in range(3)]


def test_generic_second_bases_use_reck(rng):
    d = 3
    diag_kraus = KrausSet((np.diag([0.6, 0.8, 0.0]), np.diag([0.8, 0.6, 1.0])))
    bases = (Basis.from_columns(random_unitary(d, rng)), Basis.from_columns(random_unitary(d, rng)))
    scheme = SequentialScheme(diag_kraus, bases)
    states = [random_density(d, rng) for _ in range(10)]
    assert apparatus_error(scheme, states) < 1e-10


def test_non_diagonal_kraus_rejected(rng):
    u = random_unitary(2, rng)
    scheme = SequentialScheme(KrausSet((u,)), (Basis.computational(2),))
    with pytest.raises(ValueError):
        build_apparatus(scheme)


def test_sample_clicks():
    app = build_apparatus(catalog_scheme(2))
    rho = np.eye(2) / 2
    counts = sample_clicks(app, rho, 10**6, seed=3)
    assert counts.sum() == 10**6
    sigma = np.sqrt(10**6 * (1 / 4) * (3 / 4))
    assert np.all(np.abs(counts - 10**6 / 4) < 5 * sigma)
    assert np.array_equal(counts, sample_clicks(app, rho, 10**6, seed=3))
    with pytest.raises(ValueError):
        sample_clicks(app, rho, 0, seed=3)


def test_circuit_json_round_trip():
    app = build_apparatus(qutrit_family_scheme(0.2))
    for circ in [app.stage1] + app.stage2:
        back = circuit_from_json(circuit_to_json(circ))
        assert np.array_equal(back.transfer_matrix(), circ.transfer_matrix())
