"""POMs, Kraus sets, bases and the composition of two successive measurements."""

from dataclasses import dataclass
import itertools

import numpy as np

from .core import DEFAULT_TOL, as_ket, as_operator, dagger, eigvalsh, is_density_matrix, projector


class InvalidMeasurement(ValueError):
    pass


def _label_str(label):
    if isinstance(label, tuple):
        return ",".join(str(x) for x in label)
    return str(label)


@dataclass(frozen=True)
class POM:
    """Ordered outcome operators with one label per outcome."""

    outcomes: tuple
    labels: tuple = None

    def __post_init__(self):
        outs = tuple(as_operator(o) for o in self.outcomes)
        if not outs:
            raise InvalidMeasurement("POM has no outcomes")
        d = outs[0].shape[0]
        if any(o.shape != (d, d) for o in outs):
            raise InvalidMeasurement("POM outcomes have inconsistent dimensions")
        labels = self.labels
        if labels is None:
            labels = tuple(range(len(outs)))
        labels = tuple(labels)
        if len(labels) != len(outs):
            raise InvalidMeasurement("one label per outcome is required")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self):
        return self.outcomes[0].shape[0]

    def __len__(self):
        return len(self.outcomes)

    def stack(self):
        return np.array(self.outcomes)

    def label_strings(self):
        return [_label_str(lab) for lab in self.labels]

    def outcome(self, label):
        return self.outcomes[self.labels.index(label)]


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(as_operator(a) for a in self.operators)
        if not ops:
            raise InvalidMeasurement("Kraus set is empty")
        d = ops[0].shape[0]
        if any(a.shape != (d, d) for a in ops):
            raise InvalidMeasurement("Kraus operators have inconsistent dimensions")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return self.operators[0].shape[0]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, i):
        return self.operators[i]

    def completeness_error(self):
        total = sum(dagger(a) @ a for a in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def is_complete(self, tol=DEFAULT_TOL):
        return self.completeness_error() <= tol

    def effects(self):
        return [dagger(a) @ a for a in self.operators]


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis; ``kets[j]`` is the j-th basis vector."""

    kets: tuple

    def __post_init__(self):
        kets = tuple(as_ket(k) for k in self.kets)
        if not kets:
            raise InvalidMeasurement("basis is empty")
        d = kets[0].size
        if len(kets) != d or any(k.size != d for k in kets):
            raise InvalidMeasurement(f"a basis of C^{d} needs {d} kets of length {d}")
        object.__setattr__(self, "kets", kets)

    @classmethod
    def from_columns(cls, u):
        u = np.asarray(u, dtype=complex)
        return cls(tuple(u[:, j] for j in range(u.shape[1])))

    @classmethod
    def computational(cls, d):
        return cls.from_columns(np.eye(d))

    @property
    def dim(self):
        return self.kets[0].size

    def matrix(self):
        """Unitary whose columns are the basis kets."""
        return np.column_stack(self.kets)

    def gram_error(self):
        m = self.matrix()
        return float(np.max(np.abs(dagger(m) @ m - np.eye(self.dim))))

    def is_orthonormal(self, tol=DEFAULT_TOL):
        return self.gram_error() <= tol

    def projectors(self):
        return [projector(k) for k in self.kets]


@dataclass(frozen=True)
class SequentialScheme:
    """First-step Kraus operators followed by an outcome-dependent basis measurement."""

    first: KrausSet
    second: tuple

    def __post_init__(self):
        second = tuple(self.second)
        if len(second) != len(self.first):
            raise InvalidMeasurement("need one second-step basis per first-step outcome")
        if any(b.dim != self.first.dim for b in second):
            raise InvalidMeasurement("second-step bases do not match the Kraus dimension")
        object.__setattr__(self, "second", second)

    @property
    def dim(self):
        return self.first.dim

    def validate(self, tol=DEFAULT_TOL):
        if not self.first.is_complete(tol):
            raise InvalidMeasurement(
                f"Kraus operators are not complete (error {self.first.completeness_error():.3e})"
            )
        for n, b in enumerate(self.second):
            if not b.is_orthonormal(tol):
                raise InvalidMeasurement(f"second basis {n} is not orthonormal")


@dataclass
class PomCheck:
    ok: bool
    worst_eigenvalue: float
    completeness_deviation: float
    worst_outcome: object = None

    def __bool__(self):
        return bool(self.ok)


def validate_pom(pom, tol=DEFAULT_TOL):
    """Check positivity of every outcome and completeness of the sum."""
    if len(pom) == 0:
        raise InvalidMeasurement("empty outcome list")
    worst, worst_label = np.inf, None
    herm_err = 0.0
    for lab, o in zip(pom.labels, pom.outcomes):
        herm_err = max(herm_err, float(np.max(np.abs(o - dagger(o)))))
        ev = eigvalsh((o + dagger(o)) / 2)[0]
        if ev < worst:
            worst, worst_label = float(ev), lab
    dev = float(np.max(np.abs(sum(pom.outcomes) - np.eye(pom.dim))))
    ok = bool(worst >= -tol and dev <= tol and herm_err <= tol)
    return PomCheck(ok, worst, dev, worst_label)


def born_probabilities(pom, rho, tol=DEFAULT_TOL):
    rho = as_operator(rho)
    if rho.shape[0] != pom.dim:
        raise ValueError(f"state has dimension {rho.shape[0]}, POM has {pom.dim}")
    if not is_density_matrix(rho, tol):
        raise ValueError("rho is not a density matrix")
    # tr(P rho) = sum_ab P_ab rho_ba
    p = np.einsum("kab,ba->k", pom.stack(), rho).real
    if p.min() < -tol:
        raise ValueError(f"negative probability {p.min():.3e} beyond tolerance")
    if p.min() < 0:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return p


def post_state(kraus, rho, tol=DEFAULT_TOL):
    """Conditional state and probability after the outcome with this Kraus operator."""
    kraus = as_operator(kraus)
    unnorm = kraus @ rho @ dagger(kraus)
    p = float(np.trace(unnorm).real)
    if p <= tol:
        raise ValueError(f"outcome probability {p:.3e} is too small to condition on")
    return unnorm / p, p


def compose_sequential(scheme, tol=DEFAULT_TOL):
    scheme.validate(tol)
    outcomes, labels = [], []
    for n, (a, basis) in enumerate(zip(scheme.first, scheme.second)):
        for m, ket in enumerate(basis.kets):
            v = dagger(a) @ ket
            outcomes.append(projector(v))
            labels.append((n, m))
    return POM(tuple(outcomes), tuple(labels))


def marginalize_first(pom):
    """Sum the second-step index out of an (n, m)-labelled POM."""
    if not all(isinstance(lab, tuple) and len(lab) == 2 for lab in pom.labels):
        raise InvalidMeasurement("labels must be (n, m) pairs")
    firsts = sorted({lab[0] for lab in pom.labels})
    seconds = sorted({lab[1] for lab in pom.labels})
    grid = set(itertools.product(firsts, seconds))
    if grid != set(pom.labels) or len(grid) != len(pom.labels):
        raise InvalidMeasurement("labels do not form a complete grid")
    outs = []
    for n in firsts:
        outs.append(sum(o for lab, o in zip(pom.labels, pom.outcomes) if lab[0] == n))
    return POM(tuple(outs), tuple(firsts))


@dataclass
class SicReport:
    ok: bool
    self_deviation: float
    pair_deviation: float
    worst_pair: tuple
    max_second_eigenvalue: float
    reason: str = ""

    def __bool__(self):
        return bool(self.ok)


def overlap_matrix(pom):
    """Hilbert-Schmidt inner products tr(P_a P_b)."""
    s = pom.stack()
    return np.einsum("aij,bji->ab", s, s).real


def is_sic(pom, tol=DEFAULT_TOL):
    d = pom.dim
    if len(pom) != d * d:
        return SicReport(False, np.inf, np.inf, None, np.nan, f"{len(pom)} outcomes, need {d * d}")
    second = max(float(eigvalsh(o)[-2]) for o in pom.outcomes) if d > 1 else 0.0
    g = overlap_matrix(pom)
    target = np.full_like(g, 1.0 / (d * d * (d + 1)))
    np.fill_diagonal(target, 1.0 / d**2)
    dev = np.abs(g - target)
    self_dev = float(np.max(np.diag(dev)))
    np.fill_diagonal(dev, -1.0)
    a, b = np.unravel_index(np.argmax(dev), dev.shape)
    pair_dev = float(dev[a, b])
    ok = bool(self_dev <= tol and pair_dev <= tol and second <= tol)
    reason = "" if ok else "overlaps or ranks differ from the SIC values"
    return SicReport(ok, self_dev, pair_dev, (pom.labels[a], pom.labels[b]), second, reason)


def is_ic(pom, tol=DEFAULT_TOL):
    """Outcomes span the full d^2-dimensional operator space."""
    sv = np.linalg.svd(overlap_matrix(pom), compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0]))
    return rank == pom.dim**2


def match_outcomes(pom_a, pom_b, tol=DEFAULT_TOL):
    """Pair outcomes of two POMs by Frobenius distance.

    Returns ``perm`` with ``pom_b.outcomes[perm[i]] ~ pom_a.outcomes[i]``.
    Raises if no perfect matching within ``tol`` exists.
    """
    if len(pom_a) != len(pom_b) or pom_a.dim != pom_b.dim:
        raise InvalidMeasurement("POMs differ in size")
    a, b = pom_a.stack(), pom_b.stack()
    dist = np.linalg.norm((a[:, None] - b[None, :]).reshape(len(a), len(b), -1), axis=2)
    perm, used = [], set()
    for i in range(len(a)):
        order = np.argsort(dist[i])
        j = next((int(j) for j in order if int(j) not in used), None)
        if j is None or dist[i, j] > tol:
            raise InvalidMeasurement(f"outcome {pom_a.labels[i]} has no partner within {tol}")
        used.add(j)
        perm.append(j)
    return perm


def same_multiset(pom_a, pom_b, tol=DEFAULT_TOL):
    try:
        match_outcomes(pom_a, pom_b, tol)
    except InvalidMeasurement:
        return False
    return True
