"""Fuzzy first measurements and the conditions under which the two-step ansatz is a SIC POM."""

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL
from .povm import POM, KrausSet, SequentialScheme, compose_sequential, is_sic

CONDITION_TOL = 1e-9


@dataclass(frozen=True)
class FuzzyParams:
    d: int
    lam: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d}")
        lo = -1.0 / (self.d - 1)
        # small slack so that exact endpoints computed in floating point are accepted
        if not (lo - 1e-12 <= self.lam <= 1 + 1e-12):
            raise ValueError(f"lambda={self.lam} outside the positivity window [{lo}, 1]")

    @property
    def alpha(self):
        return np.sqrt(max(1.0 - self.lam, 0.0))

    @property
    def beta(self):
        return np.sqrt(max(1.0 + self.lam * (self.d - 1), 0.0))


@dataclass(frozen=True)
class AnsatzScheme:
    params: FuzzyParams
    bases: tuple

    def __post_init__(self):
        bases = tuple(self.bases)
        if len(bases) != self.params.d or any(b.dim != self.params.d for b in bases):
            raise ValueError(f"need {self.params.d} bases of dimension {self.params.d}")
        for b in bases:
            if not b.is_orthonormal(1e-9):
                raise ValueError("ansatz bases must be orthonormal")
        object.__setattr__(self, "bases", bases)

    @property
    def d(self):
        return self.params.d

    def sequential(self):
        return SequentialScheme(fuzzy_kraus(self.params), self.bases)


def fuzzy_pom(params):
    d, lam = params.d, params.lam
    outs = tuple((1 - lam) / d * np.eye(d) + lam * np.diag(np.eye(d)[k]) for k in range(d))
    return POM(outs, tuple(range(d)))


def fuzzy_kraus(params):
    """Positive diagonal Kraus operators of the fuzzy measurement."""
    d, lam = params.d, params.lam
    off = np.sqrt(max((1 - lam) / d, 0.0))
    on = np.sqrt(max((1 + (d - 1) * lam) / d, 0.0))
    ops = []
    for k in range(d):
        diag = np.full(d, off)
        diag[k] = on
        ops.append(np.diag(diag).astype(complex))
    return KrausSet(tuple(ops))


def ansatz_pom(scheme):
    return compose_sequential(scheme.sequential())


@dataclass
class ConditionReport:
    lam_ok: bool
    lam_sign: int
    lam_deviation: float
    unbiased_ok: bool
    unbiased_deviation: float
    cross_ok: bool
    cross_deviation: float
    cross_form: str
    worst_cross: tuple = None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return bool(self.lam_ok and self.unbiased_ok and self.cross_ok)

    def __bool__(self):
        return self.ok

    def rows(self):
        return [
            ("lambda", self.lam_ok, self.lam_deviation),
            ("unbiased", self.unbiased_ok, self.unbiased_deviation),
            ("cross", self.cross_ok, self.cross_deviation),
        ]


def _cross_general(scheme):
    """Worst deviation of |<n(m)| [a + (b - a)(|m><m| + |k><k|)] |j(k)>|^2 from 1/(a^2 (d+1))."""
    d = scheme.d
    a, b = scheme.params.alpha, scheme.params.beta
    target = 1.0 / (a * a * (d + 1)) if a > 0 else np.inf
    mats = [basis.matrix() for basis in scheme.bases]
    worst, where = 0.0, None
    for m in range(d):
        for k in range(d):
            if k == m:
                continue
            diag = np.full(d, a)
            diag[[m, k]] = b
            # rows n, columns j
            amp = mats[m].conj().T @ (diag[:, None] * mats[k])
            dev = np.abs(np.abs(amp) ** 2 - target)
            n, j = np.unravel_index(np.argmax(dev), dev.shape)
            if dev[n, j] > worst:
                worst, where = float(dev[n, j]), (m, int(n), k, int(j))
    return worst, where


def _cross_qutrit(scheme, sign):
    """Specialized qutrit forms selected by the sign of lambda."""
    mats = [basis.matrix() for basis in scheme.bases]
    worst, where = 0.0, None
    for m in range(3):
        for k in range(3):
            if k == m:
                continue
            if sign > 0:
                op = np.ones(3)
                op[[m, k]] += 1.0
                amp = mats[m].conj().T @ (op[:, None] * mats[k])
                dev = np.abs(np.abs(amp) ** 2 - 1.0)
            else:
                l = 3 - m - k
                amp = np.outer(mats[m][l, :].conj(), mats[k][l, :])
                dev = np.abs(np.abs(amp) ** 2 - 1.0 / 9.0)
            n, j = np.unravel_index(np.argmax(dev), dev.shape)
            if dev[n, j] > worst:
                worst, where = float(dev[n, j]), (m, int(n), k, int(j))
    return worst, where


def check_conditions(scheme, tol=CONDITION_TOL):
    """Evaluate the sharpness, unbiasedness and cross-basis conditions."""
    d, lam = scheme.d, scheme.params.lam
    root = 1.0 / np.sqrt(1 + d)
    signs = (1, -1) if d <= 3 else (1,)
    devs = {s: abs(lam - s * root) for s in signs}
    sign = min(devs, key=devs.get)
    lam_dev = devs[sign]
    lam_ok = lam_dev <= tol
    notes = []

    unbiased_dev = 0.0
    for m, basis in enumerate(scheme.bases):
        unbiased_dev = max(unbiased_dev, float(np.max(np.abs(np.abs(basis.matrix()[m, :]) ** 2 - 1.0 / d))))

    if d == 3 and lam_ok:
        cross_dev, where = _cross_qutrit(scheme, sign)
        form = "qutrit, lambda=+1/2" if sign > 0 else "qutrit, lambda=-1/2"
    else:
        cross_dev, where = _cross_general(scheme)
        form = "general"
    return ConditionReport(
        lam_ok=bool(lam_ok),
        lam_sign=sign,
        lam_deviation=float(lam_dev),
        unbiased_ok=bool(unbiased_dev <= tol),
        unbiased_deviation=unbiased_dev,
        cross_ok=bool(cross_dev <= tol),
        cross_deviation=cross_dev,
        cross_form=form,
        worst_cross=where,
        notes=notes,
    )


def check_sic_directly(scheme, tol=DEFAULT_TOL):
    return is_sic(ansatz_pom(scheme), tol).ok
