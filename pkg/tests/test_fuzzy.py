import numpy as np
import pytest

from sicseq.catalog import (
    DIM4_LAMBDA,
    SIGMA1_BASIS,
    SIGMA2_BASIS,
    catalog_ansatz,
    dim4_ansatz,
    dim4_kraus,
    tetrahedron_ansatz,
)
from sicseq.core import random_unitary
from sicseq.fuzzy import (
    AnsatzScheme,
    FuzzyParams,
    ansatz_pom,
    check_conditions,
    check_sic_directly,
    fuzzy_kraus,
    fuzzy_pom,
)
from sicseq.hwsic import fourier_basis
from sicseq.povm import Basis, is_sic, validate_pom


def fourier_ansatz(d, lam):
    f = fourier_basis(d)
    return AnsatzScheme(FuzzyParams(d, lam), tuple(f for _ in range(d)))


def perturbed(scheme, rng, eps):
    """Rotate each basis by a random unitary close to the identity."""
    bases = []
    for b in scheme.bases:
        h = rng.normal(size=(scheme.d, scheme.d)) + 1j * rng.normal(size=(scheme.d, scheme.d))
        h = (h + h.conj().T) / 2
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(1j * eps * w)) @ v.conj().T
        bases.append(Basis.from_columns(u @ b.matrix()))
    return AnsatzScheme(scheme.params, tuple(bases))


def test_params_window():
    FuzzyParams(3, -0.5)
    FuzzyParams(3, 1.0)
    with pytest.raises(ValueError):
        FuzzyParams(3, -0.51)
    with pytest.raises(ValueError):
        FuzzyParams(4, 1.01)
    p = FuzzyParams(4, 0.25)
    assert p.alpha == pytest.approx(np.sqrt(0.75))
    assert p.beta == pytest.approx(np.sqrt(1.75))


def test_fuzzy_pom_limits():
    for o in fuzzy_pom(FuzzyParams(3, 0.0)).outcomes:
        assert np.allclose(o, np.eye(3) / 3)
    for k, o in enumerate(fuzzy_pom(FuzzyParams(3, 1.0)).outcomes):
        assert np.allclose(o, np.diag(np.eye(3)[k]))


def test_fuzzy_pom_dim4_entries():
    pom = fuzzy_pom(FuzzyParams(4, DIM4_LAMBDA))
    s5 = np.sqrt(5)
    for k, o in enumerate(pom.outcomes):
        expected = np.full(4, (5 - s5) / 20)
        expected[k] = (5 + 3 * s5) / 20
        assert np.allclose(np.diag(o).real, expected, atol=1e-15)
    assert validate_pom(pom).ok


def test_fuzzy_kraus_qubit_matches_tetrahedron_diagonals():
    ops = fuzzy_kraus(FuzzyParams(2, 1 / np.sqrt(3)))
    hi, lo = np.sqrt(0.5 + 1 / np.sqrt(12)), np.sqrt(0.5 - 1 / np.sqrt(12))
    assert np.allclose(ops[0], np.diag([hi, lo]))
    assert np.allclose(ops[1], np.diag([lo, hi]))


def test_fuzzy_kraus_qutrit_negative_half():
    for k, a in enumerate(fuzzy_kraus(FuzzyParams(3, -0.5))):
        expected = np.zeros(3)
        expected[[(k + 1) % 3, (k + 2) % 3]] = 1 / np.sqrt(2)
        assert np.allclose(a.conj().T, np.diag(expected), atol=1e-15)


def test_fuzzy_kraus_projective_limit():
    for k, a in enumerate(fuzzy_kraus(FuzzyParams(4, 1.0))):
        assert np.allclose(a, np.diag(np.eye(4)[k]))


@pytest.mark.parametrize("d", (2, 3, 4, 6))
def test_fuzzy_kraus_completeness_across_window(d):
    for lam in np.linspace(-1 / (d - 1), 1, 50):
        params = FuzzyParams(d, lam)
        ks = fuzzy_kraus(params)
        assert ks.completeness_error() < 1e-12
        for a, o in zip(ks, fuzzy_pom(params).outcomes):
            assert np.allclose(a.conj().T @ a, o, atol=1e-12)


def test_ansatz_pom_tetrahedron():
    assert is_sic(ansatz_pom(tetrahedron_ansatz())).ok


def test_ansatz_pom_qutrit_fourier():
    assert is_sic(ansatz_pom(fourier_ansatz(3, -0.5))).ok


def test_ansatz_projective_never_sic(rng):
    bases = tuple(Basis.from_columns(random_unitary(3, rng)) for _ in range(3))
    pom = ansatz_pom(AnsatzScheme(FuzzyParams(3, 1.0), bases))
    for (k, j), o in zip(pom.labels, pom.outcomes):
        w = abs(bases[k].kets[j][k]) ** 2
        assert np.allclose(o, w * np.diag(np.eye(3)[k]))
    assert not is_sic(pom).ok


def test_conditions_tetrahedron():
    rep = check_conditions(tetrahedron_ansatz())
    assert rep.ok and rep.lam_sign == 1 and rep.cross_form == "general"


def test_conditions_qutrit_negative_fourier():
    rep = check_conditions(fourier_ansatz(3, -0.5))
    assert rep.ok and rep.lam_sign == -1 and "-1/2" in rep.cross_form


def test_conditions_qutrit_positive_fourier_fails():
    scheme = fourier_ansatz(3, 0.5)
    rep = check_conditions(scheme)
    assert rep.lam_ok and rep.unbiased_ok and not rep.cross_ok
    assert not check_sic_directly(scheme)


def test_conditions_dim4_catalog():
    scheme = dim4_ansatz()
    assert check_conditions(scheme).ok
    assert check_sic_directly(scheme)


def test_negative_root_outside_window_in_dim4():
    with pytest.raises(ValueError):
        FuzzyParams(4, -DIM4_LAMBDA)


def test_random_bases_dim4_fail(rng):
    for _ in range(10):
        bases = tuple(Basis.from_columns(random_unitary(4, rng)) for _ in range(4))
        scheme = AnsatzScheme(FuzzyParams(4, DIM4_LAMBDA), bases)
        assert not check_sic_directly(scheme)
        assert not check_conditions(scheme).ok


@pytest.mark.parametrize("lam", (1 / np.sqrt(3), -1 / np.sqrt(3)))
def test_qubit_both_signs(lam):
    for bases in ((SIGMA1_BASIS, SIGMA2_BASIS), (SIGMA2_BASIS, SIGMA1_BASIS)):
        scheme = AnsatzScheme(FuzzyParams(2, lam), bases)
        assert check_conditions(scheme).ok
        assert check_sic_directly(scheme)


def test_dim4_kraus_squares_are_fuzzy():
    pom = fuzzy_pom(FuzzyParams(4, DIM4_LAMBDA))
    for a in dim4_kraus():
        sq = a.conj().T @ a
        assert any(np.max(np.abs(sq - o)) < 1e-12 for o in pom.outcomes)
    chi2, n2 = 2 + np.sqrt(5), 5 + np.sqrt(5)
    assert (1 + 3 / np.sqrt(5)) / 4 == pytest.approx(chi2 / n2, abs=1e-15)


def test_agreement_corpus(rng):
    """The condition checker and the direct SIC test never disagree."""
    corpus = [catalog_ansatz(2), catalog_ansatz(4)]
    corpus += [catalog_ansatz(3, g) for g in np.linspace(0, np.pi / 6, 7)]
    corpus += [fourier_ansatz(3, 0.5), fourier_ansatz(3, -0.5), fourier_ansatz(2, 1 / np.sqrt(3))]
    base = [catalog_ansatz(2), catalog_ansatz(3, 0.1), catalog_ansatz(4)]
    for i in range(60):
        corpus.append(perturbed(base[i % 3], rng, 10 ** rng.uniform(-4, -1)))
    for d in (2, 3, 4, 5):
        for lam in (1 / np.sqrt(1 + d), 0.3, -0.2):
            bases = tuple(Basis.from_columns(random_unitary(d, rng)) for _ in range(d))
            corpus.append(AnsatzScheme(FuzzyParams(d, lam), bases))
    for scheme in corpus:
        assert bool(check_conditions(scheme)) == check_sic_directly(scheme)
