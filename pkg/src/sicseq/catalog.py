"""Explicit SIC POMs and their two-step realizations in dimensions 2, 3, 4 and 8."""

from dataclasses import dataclass
from functools import lru_cache
import itertools
import warnings

import numpy as np

from .core import DEFAULT_TOL, dagger, kron, omega, projector, same_ray
from .fuzzy import AnsatzScheme, FuzzyParams
from .hwsic import fourier_basis
from .povm import POM, Basis, KrausSet, SequentialScheme

SQ2 = np.sqrt(2.0)
SQ3 = np.sqrt(3.0)
SQ5 = np.sqrt(5.0)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

# eigenbases of sigma_1 and sigma_2, "+" eigenvector first
SIGMA1_BASIS = Basis((np.array([1, 1]) / SQ2, np.array([1, -1]) / SQ2))
SIGMA2_BASIS = Basis((np.array([1, 1j]) / SQ2, np.array([1, -1j]) / SQ2))


@dataclass(frozen=True)
class MubSet:
    """Bases pairwise unbiased; the computational basis is implied, not stored."""

    bases: tuple

    @property
    def dim(self):
        return self.bases[0].dim

    def all_bases(self, include_computational=True):
        extra = (Basis.computational(self.dim),) if include_computational else ()
        return extra + tuple(self.bases)


@dataclass
class MubReport:
    deviations: np.ndarray
    count: int

    @property
    def worst(self):
        return float(np.max(self.deviations))

    def ok(self, tol=DEFAULT_TOL):
        return self.worst <= tol


def mub_pair_check(mubs, include_computational=True):
    """Worst |<a|b>|^2 - 1/d deviation for every pair of distinct bases."""
    bases = mubs.all_bases(include_computational)
    d = mubs.dim
    n = len(bases)
    dev = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        ov = np.abs(dagger(bases[i].matrix()) @ bases[j].matrix()) ** 2
        dev[i, j] = dev[j, i] = float(np.max(np.abs(ov - 1.0 / d)))
    return MubReport(dev, n)


def kets_to_pom(kets, weight, labels=None):
    return POM(tuple(weight * projector(k) for k in kets), labels)


# --- dimension 2 -------------------------------------------------------------

TETRA_N = np.sqrt(3 + SQ3)
TETRA_CHI = np.sqrt(2 + SQ3)
TETRA_LAMBDA = 1 / SQ3


def qubit_template(norm, chi):
    """The two 2x2 matrices whose columns give the tetrahedron (or the two MUB)."""
    m1 = np.array([[chi, chi], [1, -1]], dtype=complex) / norm
    m2 = np.array([[1, 1], [1j * chi, -1j * chi]], dtype=complex) / norm
    return m1, m2


def tetrahedron_kets():
    m1, m2 = qubit_template(TETRA_N, TETRA_CHI)
    return [m1[:, 0], m1[:, 1], m2[:, 0], m2[:, 1]]


def tetrahedron_pom():
    labels = ((0, 0), (0, 1), (1, 0), (1, 1))
    return kets_to_pom(tetrahedron_kets(), 0.5, labels)


def tetrahedron_ansatz():
    return AnsatzScheme(FuzzyParams(2, TETRA_LAMBDA), (SIGMA1_BASIS, SIGMA2_BASIS))


def tetrahedron_scheme():
    """Fuzzy Kraus with lambda = 1/sqrt(3); sigma_1 after outcome 0, sigma_2 after outcome 1."""
    return tetrahedron_ansatz().sequential()


def tetrahedron_mubs():
    return MubSet((SIGMA1_BASIS, SIGMA2_BASIS))


def qubit_hw_fiducial():
    """HW fiducial with Bloch vector (1, 1, 1)/sqrt(3)."""
    c = np.sqrt((1 + 1 / SQ3) / 2)
    s = np.sqrt((1 - 1 / SQ3) / 2)
    return np.array([c, np.exp(1j * np.pi / 4) * s])


# --- dimension 3 -------------------------------------------------------------

QUTRIT_LAMBDA = -0.5
GAMMA_MAX = np.pi / 6


@dataclass(frozen=True)
class QutritGamma:
    gamma: float

    def __post_init__(self):
        if not (-1e-15 <= self.gamma <= GAMMA_MAX + 1e-15):
            warnings.warn(
                f"gamma={self.gamma} outside [0, pi/6]; the POM repeats an equivalent member",
                stacklevel=3,
            )


def _gamma(g):
    return g if isinstance(g, QutritGamma) else QutritGamma(float(g))


def qutrit_ket(k, j, gamma):
    w = omega(3)
    v = np.zeros(3, dtype=complex)
    v[k % 3] = 1.0
    v[(k + 1) % 3] = -np.exp(2j * gamma) * w**j
    return v / SQ2


def qutrit_fiducial(gamma=0.0):
    return qutrit_ket(0, 0, _gamma(gamma).gamma)


def qutrit_family_direct(g):
    gamma = _gamma(g).gamma
    labels = tuple(itertools.product(range(3), range(3)))
    # weight 1/d so that the nine outcomes sum to the identity
    return kets_to_pom([qutrit_ket(k, j, gamma) for k, j in labels], 1 / 3, labels)


def qutrit_phase_unitary(k, gamma):
    """Diagonal U_k^dag = |k><k| - e^{2i gamma}|k+1><k+1| + |k+2><k+2|."""
    diag = np.ones(3, dtype=complex)
    diag[(k + 1) % 3] = -np.exp(2j * gamma)
    return np.diag(diag)


def qutrit_second_basis(k, gamma):
    """Kets U_k |f_j>: applying U_k^dag and then detecting the Fourier basis."""
    u_k = dagger(qutrit_phase_unitary(k, gamma))
    return Basis.from_columns(u_k @ fourier_basis(3).matrix())


def qutrit_mubs():
    """Three bases with kets w^(a m^2 + j m)/sqrt(3), a = 0, 1, 2; a = 0 is the Fourier basis."""
    m = np.arange(3)
    return MubSet(tuple(
        Basis.from_columns(omega(3) ** ((a * m[:, None] ** 2 + np.outer(m, m)) % 3) / SQ3)
        for a in range(3)
    ))


def qutrit_ansatz(g):
    gamma = _gamma(g).gamma
    return AnsatzScheme(
        FuzzyParams(3, QUTRIT_LAMBDA), tuple(qutrit_second_basis(k, gamma) for k in range(3))
    )


def qutrit_family_scheme(g):
    return qutrit_ansatz(g).sequential()


# --- dimension 4 -------------------------------------------------------------

DIM4_N = np.sqrt(5 + SQ5)
DIM4_CHI = np.sqrt(2 + SQ5)
DIM4_LAMBDA = 1 / SQ5


def dim4_template(norm, chi):
    """Four 4x4 matrices; their columns are SIC kets or MUB kets depending on (norm, chi)."""
    c, i = chi, 1j
    mats = [
        [[c, c, c, c], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]],
        [[1, 1, 1, 1], [1, -1, 1, -1], [i * c, i * c, -i * c, -i * c], [-i, i, i, -i]],
        [[1, 1, 1, 1], [i * c, -i * c, i * c, -i * c], [i, i, -i, -i], [-1, 1, 1, -1]],
        [[1, 1, 1, 1], [i, -i, i, -i], [1, 1, -1, -1], [-i * c, i * c, i * c, -i * c]],
    ]
    return [np.array(m, dtype=complex) / norm for m in mats]


# template matrix t has its chi entry in row DIM4_CHI_ROW[t]
DIM4_CHI_ROW = (0, 2, 1, 3)


def dim4_kraus():
    """A_1..A_4: diag with chi at position i, all over N."""
    ops = []
    for i in range(4):
        diag = np.ones(4, dtype=complex)
        diag[i] = DIM4_CHI
        ops.append(np.diag(diag) / DIM4_N)
    return KrausSet(tuple(ops))


def dim4_unitaries():
    """U_1..U_4; U_i is the basis change paired with A_i."""
    i = 1j
    mats = [
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]],
        [[1, 1, 1, 1], [i, -i, i, -i], [i, i, -i, -i], [-1, 1, 1, -1]],
        [[1, 1, 1, 1], [1, -1, 1, -1], [i, i, -i, -i], [-i, i, i, -i]],
        [[1, 1, 1, 1], [i, -i, i, -i], [1, 1, -1, -1], [-i, i, i, -i]],
    ]
    return [np.array(m, dtype=complex) / 2 for m in mats]


CZ = np.diag([1, 1, 1, -1]).astype(complex)


def dim4_mub_kets():
    """The four bases as tensor products of sigma_1 / sigma_2 eigenkets, two of them entangled by CZ."""
    x, y = SIGMA1_BASIS.kets, SIGMA2_BASIS.kets

    def product(a, b, gate=None):
        kets = [kron(u, v) for u in a for v in b]
        return [gate @ k for k in kets] if gate is not None else kets

    return [product(x, x), product(y, y), product(y, x, CZ), product(x, y, CZ)]


def dim4_pom():
    kets = []
    labels = []
    for t, mat in enumerate(dim4_template(DIM4_N, DIM4_CHI)):
        for c in range(4):
            kets.append(mat[:, c])
            labels.append((DIM4_CHI_ROW[t], c))
    return kets_to_pom(kets, 0.25, tuple(labels))


def dim4_ansatz():
    return AnsatzScheme(
        FuzzyParams(4, DIM4_LAMBDA), tuple(Basis.from_columns(u) for u in dim4_unitaries())
    )


def dim4_scheme():
    return SequentialScheme(dim4_kraus(), tuple(Basis.from_columns(u) for u in dim4_unitaries()))


def dim4_mubs():
    return MubSet(tuple(Basis(tuple(kets)) for kets in dim4_mub_kets()))


@lru_cache(maxsize=None)
def dim4_catalog():
    return dim4_pom(), dim4_scheme(), dim4_mubs()


def reduced_first_qubit(ket):
    m = np.asarray(ket).reshape(2, 2)
    return m @ dagger(m)


# --- HW fiducials found numerically for d = 4, 8 ------------------------------
# Each satisfies |<psi|X^k Z^j|psi>|^2 = 1/(d+1) for (k, j) != (0, 0) to ~1e-15.

HW_FIDUCIAL_4 = np.array([
    complex(0.20118858648686588, 0.0),
    complex(0.30763455310591914, -0.25698329627163197),
    complex(1.4931540298737076e-16, -0.4857122140912641),
    complex(-0.10644596661905338, 0.742695510362896),
])

HW_FIDUCIAL_8 = np.array([
    complex(0.3121865594266053, 0.0),
    complex(0.12861850651963724, 0.1851011646030791),
    complex(0.18897422180519372, 0.0038917597135684698),
    complex(-0.4145055289108876, 0.19819139954686693),
    complex(0.5296137124380762, -0.282926557402025),
    complex(0.06243237362901753, 0.036682925377056),
    complex(0.015587755195509296, -0.4155703515431061),
    complex(0.139204331190732, 0.21636132628338123),
])


def hw_fiducial(d, gamma=0.0):
    """Catalog HW fiducial for d in {2, 3, 4, 8}."""
    if d == 2:
        return qubit_hw_fiducial()
    if d == 3:
        return qutrit_fiducial(gamma)
    if d == 4:
        v = HW_FIDUCIAL_4
    elif d == 8:
        v = HW_FIDUCIAL_8
    else:
        raise ValueError(f"no catalog HW fiducial for d={d}")
    return v / np.linalg.norm(v)


# --- dimension 8 -------------------------------------------------------------

W8 = np.exp(1j * np.pi / 4)
W8C = np.conj(W8)

HOGGAR_PHI = np.array([SQ2, 0, -W8C, W8C, -W8, -W8C, 0, 0]) / np.sqrt(6)

_HOGGAR_A = np.array([
    [0, -1j * SQ2, W8C, 1j * W8C, -W8C, -1j * W8, 0, 0],
    [-W8C, W8C, -1j * SQ2, 0, 0, 0, 1j * W8, 1j * W8C],
    [W8C, 1j * W8C, 0, SQ2, 0, 0, -1j * W8C, W8],
    [-W8, -W8C, 0, 0, -1j * SQ2, 0, -1j * W8C, -1j * W8C],
    [-W8C, 1j * W8, 0, 0, 0, SQ2, -1j * W8C, W8C],
    [0, 0, 1j * W8, 1j * W8C, 1j * W8C, 1j * W8C, SQ2, 0],
    [0, 0, 1j * W8C, W8, -1j * W8C, W8C, 0, 1j * SQ2],
    [SQ2, 0, -W8C, W8C, -W8, -W8C, 0, 0],
]) * 2 / SQ3

TRIPLETS = tuple(itertools.product((1, 2), repeat=3))


def _pow(op, e):
    return op if e % 2 else ID2


def hoggar_kraus_diagonals():
    """The eight diagonal operators A_1..A_8 (index 0..7 here)."""
    return [np.diag(row) for row in _HOGGAR_A]


def hoggar_kraus_index(k, l, m):
    """0-based index of A for triplet (k, l, m): binary (k, l, m) mod 2, m least significant, 000 -> A_8."""
    value = 4 * (k % 2) + 2 * (l % 2) + (m % 2)
    return (value - 1) % 8


def hoggar_ket(k, l, m, n, r, s):
    """Z^n X^k (x) Z^r X^l (x) Z^s X^m |phi>, exponents taken mod 2."""
    g = kron(
        _pow(SIGMA3, n) @ _pow(SIGMA1, k),
        _pow(SIGMA3, r) @ _pow(SIGMA1, l),
        _pow(SIGMA3, s) @ _pow(SIGMA1, m),
    )
    return g @ HOGGAR_PHI


def mub_generator(k, l, m):
    """G(k,l,m) = (1 + Z^k Z^l Z^m + Z^(1-k) Z^(1-l) Z^(1-m) - ZZZ)/2, exponents mod 2."""
    return 0.5 * (
        np.eye(8)
        + kron(_pow(SIGMA3, k), _pow(SIGMA3, l), _pow(SIGMA3, m))
        + kron(_pow(SIGMA3, 1 - k), _pow(SIGMA3, 1 - l), _pow(SIGMA3, 1 - m))
        - kron(SIGMA3, SIGMA3, SIGMA3)
    )


def _qubit_basis_for(parity):
    # odd X exponent pairs with the sigma_2 basis, even with sigma_1
    return SIGMA2_BASIS if parity % 2 else SIGMA1_BASIS


def hoggar_mub_basis(k, l, m):
    """Basis paired with the Kraus operator of triplet (k, l, m).

    The generator is taken at the cyclic shift (m, k, l); other orderings still
    reproduce the orbit kets but break mutual unbiasedness between the bases.
    """
    g = mub_generator(m, k, l)
    b1, b2, b3 = (_qubit_basis_for(x) for x in (k, l, m))
    # label (n, r, s) in TRIPLETS order; label n picks eigenket n mod 2, i.e. sigma_3^n applied to the + ket
    kets = [g @ kron(b1.kets[n % 2], b2.kets[r % 2], b3.kets[s % 2]) for n, r, s in TRIPLETS]
    return Basis(tuple(kets))


def hoggar_pom():
    labels = tuple(itertools.product((1, 2), repeat=6))
    return kets_to_pom([hoggar_ket(*lab) for lab in labels], 1 / 8, labels)


def hoggar_scheme():
    """First step dagger(A)/sqrt(8), ordered A_1..A_8; second step the paired MUB."""
    diags = hoggar_kraus_diagonals()
    by_index = {hoggar_kraus_index(*t): t for t in TRIPLETS}
    first = KrausSet(tuple(dagger(diags[i]) / np.sqrt(8) for i in range(8)))
    second = tuple(hoggar_mub_basis(*by_index[i]) for i in range(8))
    return SequentialScheme(first, second)


def hoggar_mubs():
    return MubSet(tuple(hoggar_mub_basis(*t) for t in TRIPLETS))


@lru_cache(maxsize=None)
def hoggar_catalog():
    return hoggar_pom(), hoggar_scheme(), hoggar_mubs()


def hoggar_structure_matches(tol=DEFAULT_TOL):
    """For each triplet, map basis label (n, r, s) to the orbit label with A|e> ~ orbit ket.

    Returns {(k,l,m): {(n,r,s): (n',r',s')}}; raises if some ket has no partner.
    """
    diags = hoggar_kraus_diagonals()
    result = {}
    for t in TRIPLETS:
        a = diags[hoggar_kraus_index(*t)]
        basis = hoggar_mub_basis(*t)
        orbit = {lab: hoggar_ket(*t, *lab) for lab in TRIPLETS}
        mapping = {}
        for idx, lab in enumerate(TRIPLETS):
            v = a @ basis.kets[idx]
            hits = [o for o, ket in orbit.items() if same_ray(v, ket, tol)]
            if len(hits) != 1:
                raise ValueError(f"triplet {t}, basis ket {lab}: {len(hits)} matching orbit kets")
            mapping[lab] = hits[0]
        if len(set(mapping.values())) != 8:
            raise ValueError(f"triplet {t}: matching is not a bijection")
        result[t] = mapping
    return result


def three_qubit_paulis():
    """All 64 operators Z^n X^k (x) Z^r X^l (x) Z^s X^m."""
    return [hoggar_ket_operator(*lab) for lab in itertools.product((1, 2), repeat=6)]


def hoggar_ket_operator(k, l, m, n, r, s):
    return kron(
        _pow(SIGMA3, n) @ _pow(SIGMA1, k),
        _pow(SIGMA3, r) @ _pow(SIGMA1, l),
        _pow(SIGMA3, s) @ _pow(SIGMA1, m),
    )


# --- lookup by name -----------------------------------------------------------

BUILTIN_NAMES = ("tetrahedron", "qutrit-family", "dim4", "hoggar")


def catalog_pom(d, gamma=0.0):
    if d == 2:
        return tetrahedron_pom()
    if d == 3:
        return qutrit_family_direct(gamma)
    if d == 4:
        return dim4_catalog()[0]
    if d == 8:
        return hoggar_catalog()[0]
    raise ValueError(f"no catalog SIC POM for d={d}")


def catalog_scheme(d, gamma=0.0):
    if d == 2:
        return tetrahedron_scheme()
    if d == 3:
        return qutrit_family_scheme(gamma)
    if d == 4:
        return dim4_catalog()[1]
    if d == 8:
        return hoggar_catalog()[1]
    raise ValueError(f"no catalog scheme for d={d}")


def catalog_mubs(d):
    if d == 2:
        return tetrahedron_mubs()
    if d == 3:
        return qutrit_mubs()
    if d == 4:
        return dim4_catalog()[2]
    if d == 8:
        return hoggar_catalog()[2]
    raise ValueError(f"no catalog MUB set for d={d}")


def catalog_ansatz(d, gamma=0.0):
    if d == 2:
        return tetrahedron_ansatz()
    if d == 3:
        return qutrit_ansatz(gamma)
    if d == 4:
        return dim4_ansatz()
    raise ValueError(f"no fuzzy ansatz in the catalog for d={d}")


def builtin_dim(name):
    return {"tetrahedron": 2, "qutrit-family": 3, "dim4": 4, "hoggar": 8}[name]
