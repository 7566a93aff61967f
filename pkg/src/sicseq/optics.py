"""Single-photon linear-optics simulation of the two-step measurement.

A photon in path mode ``p`` carries the qudit.  Stage 1 is a cascade of beam
splitters on every input path that routes amplitude into ``d`` groups of ``d``
modes (group g, internal mode p); the amplitude reaching (g, p) is the p-th
diagonal entry of the g-th Kraus operator.  Stage 2 applies, inside each group,
the unitary that rotates the group's second-step basis onto the detectors.

Beam-splitter convention: on modes (a, b) the element acts as

    [a']   [ t    r ] [a]
    [b'] = [-r*   t*] [b]

so an amplitude entering on ``a`` alone leaves ``-r*`` on ``b``.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from .core import DEFAULT_TOL, dagger, is_unitary
from .hwsic import fourier_basis
from .povm import compose_sequential, born_probabilities


@dataclass(frozen=True)
class BeamSplitter:
    a: int
    b: int
    t: complex
    r: complex

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("beam splitter needs two distinct modes")
        if abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1) > 1e-9:
            raise ValueError(f"|t|^2 + |r|^2 = {abs(self.t) ** 2 + abs(self.r) ** 2}, not 1")

    def block(self):
        t, r = complex(self.t), complex(self.r)
        return np.array([[t, r], [-np.conj(r), np.conj(t)]])

    @property
    def modes(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phase: float

    @property
    def modes(self):
        return (self.mode,)


@dataclass
class Circuit:
    modes: int
    elements: list = field(default_factory=list)

    def __post_init__(self):
        for el in self.elements:
            self._check(el)

    def _check(self, el):
        if any(not 0 <= m < self.modes for m in el.modes):
            raise ValueError(f"element {el} addresses a mode outside 0..{self.modes - 1}")

    def append(self, el):
        self._check(el)
        self.elements.append(el)
        return self

    def extend(self, els):
        for el in els:
            self.append(el)
        return self

    def apply(self, amps):
        """Propagate amplitudes (last axis = modes) through the elements in order."""
        out = np.array(amps, dtype=complex, copy=True)
        for el in self.elements:
            if isinstance(el, PhaseShifter):
                out[..., el.mode] *= np.exp(1j * el.phase)
            else:
                blk = el.block()
                va, vb = out[..., el.a].copy(), out[..., el.b].copy()
                out[..., el.a] = blk[0, 0] * va + blk[0, 1] * vb
                out[..., el.b] = blk[1, 0] * va + blk[1, 1] * vb
        return out

    def transfer_matrix(self):
        # rows of apply(eye) are images of unit vectors; transpose to get columns
        return self.apply(np.eye(self.modes, dtype=complex)).T

    def count(self, kind):
        return sum(isinstance(el, kind) for el in self.elements)


def simulate(circuit, state, tol=DEFAULT_TOL):
    state = np.asarray(state, dtype=complex)
    if state.shape != (circuit.modes,):
        raise ValueError(f"input has {state.shape} amplitudes, circuit has {circuit.modes} modes")
    if abs(np.linalg.norm(state) - 1) > tol:
        raise ValueError("input state is not normalized")
    return circuit.apply(state)


# --- stage 1: beam-splitter cascades ------------------------------------------


def cascade_for_targets(targets, tol=DEFAULT_TOL):
    """Beam-splitter amplitudes (r_n, t_n), n = 0..d-2, for one input path.

    The photon continues along the chain; splitter n sends amplitude
    ``-conj(r_n) * prod_{i<n} t_i`` to output branch n, and whatever survives
    all splitters leaves on the last branch.  The amplitudes are chosen so that
    branch g receives exactly ``targets[g]``.
    """
    targets = np.asarray(targets, dtype=complex)
    if abs(np.linalg.norm(targets) - 1) > 1e-9:
        raise ValueError("cascade targets must have unit norm")
    d = targets.size
    if d == 1:
        return []
    params = []
    carried = 1.0 + 0j
    for n in range(d - 1):
        remaining = np.linalg.norm(targets[n:])
        if abs(carried) <= tol:
            if remaining > 1e-9:
                raise ValueError("transmission exhausted with amplitude still to route")
            params.append((0j, 1.0 + 0j))
            continue
        r = -np.conj(targets[n] / carried)
        if abs(r) > 1 + 1e-9:
            raise ValueError(f"infeasible splitter at branch {n}: |r| = {abs(r)}")
        r = r / max(abs(r), 1.0)
        if n < d - 2:
            t = np.sqrt(max(1 - abs(r) ** 2, 0.0)) + 0j
        else:
            # last splitter: its transmission carries the final target phase too
            t = targets[d - 1] / carried if abs(carried) > tol else 1.0 + 0j
            if abs(abs(t) ** 2 + abs(r) ** 2 - 1) > 1e-9:
                t = np.sqrt(max(1 - abs(r) ** 2, 0.0)) + 0j
        params.append((complex(r), complex(t)))
        carried = carried * t
    return params


def solve_bs_cascade(alphas, tol=DEFAULT_TOL):
    """Per-path cascades that route input path p to group g with amplitude alphas[(p - g) % d]."""
    alphas = np.asarray(alphas, dtype=complex)
    d = alphas.size
    return [cascade_for_targets([alphas[(p - g) % d] for g in range(d)], tol) for p in range(d)]


def _mode(g, p, d):
    return g * d + p


def stage1_circuit(diagonals, tol=DEFAULT_TOL):
    """Circuit on d*d modes; input path p is injected at mode (d-1, p).

    ``diagonals[g][p]`` is the amplitude routed from path p into group g.
    """
    diagonals = np.asarray(diagonals, dtype=complex)
    d = diagonals.shape[1]
    groups = diagonals.shape[0]
    circ = Circuit(groups * d)
    last = groups - 1
    for p in range(d):
        params = cascade_for_targets(diagonals[:, p], tol)
        for n, (r, t) in enumerate(params):
            circ.append(BeamSplitter(_mode(last, p, d), _mode(n, p, d), t, r))
    return circ


# --- stage 2: triangular decomposition of unitaries ----------------------------


def two_mode_elements(u, a, b):
    """Elements realizing an arbitrary 2x2 unitary on modes (a, b): a phase shifter on b, then a beam splitter."""
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    delta = float(np.angle(det))
    v = u @ np.diag([1, np.exp(-1j * delta)])
    return [PhaseShifter(b, delta), BeamSplitter(a, b, v[0, 0], v[0, 1])]


def reck_decompose(u, tol=DEFAULT_TOL):
    """Triangular mesh of at most n(n-1)/2 beam splitters, then output phase shifters.

    Columns of ``u`` are nulled row by row from the bottom with SU(2) rotations on
    neighbouring columns, ``u G_1 ... G_K = D``, so ``u = D G_K^dag ... G_1^dag``.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, max(tol, 1e-9)):
        raise ValueError("reck_decompose needs a unitary matrix")
    n = u.shape[0]
    work = u.copy()
    rotations = []
    for row in range(n - 1, 0, -1):
        for col in range(row):
            x, y = work[row, col], work[row, col + 1]
            norm = np.hypot(abs(x), abs(y))
            if abs(x) <= 1e-15:
                continue
            a, b = y / norm, np.conj(x) / norm
            g = np.array([[a, b], [-np.conj(b), np.conj(a)]])
            work[:, [col, col + 1]] = work[:, [col, col + 1]] @ g
            work[row, col] = 0.0
            rotations.append((col, g))
    circ = Circuit(n)
    for col, g in rotations:
        gd = dagger(g)
        circ.append(BeamSplitter(col, col + 1, gd[0, 0], gd[0, 1]))
    for m in range(n):
        ph = float(np.angle(work[m, m]))
        if abs(ph) > 1e-15:
            circ.append(PhaseShifter(m, ph))
    return circ


# --- the three-splitter qutrit Fourier circuit --------------------------------

_SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

QUTRIT_FT_BLOCKS = (
    (_SIGMA3 + _SIGMA1) / np.sqrt(2),
    (_SIGMA3 + np.sqrt(2) * _SIGMA1) / np.sqrt(3),
    (_SIGMA3 + _SIGMA2) / np.sqrt(2),
)


def _embed(block, a, b, n=3):
    m = np.eye(n, dtype=complex)
    m[np.ix_([a, b], [a, b])] = block
    return m


def qutrit_fourier_assignment(target=None, tol=1e-10):
    """First ordered mode-pair assignment (BS1, BS2, BS3) matching ``target`` up to phases.

    Returns (pairs, input_phases, output_phases) with
    ``target = diag(out) @ B3 @ B2 @ B1 @ diag(in)``.
    """
    if target is None:
        target = fourier_basis(3).matrix()
    pairs = [(a, b) for a in range(3) for b in range(3) if a != b]
    for assignment in itertools.product(pairs, repeat=3):
        m = np.eye(3, dtype=complex)
        for blk, (a, b) in zip(QUTRIT_FT_BLOCKS, assignment):
            m = _embed(blk, a, b) @ m
        if np.max(np.abs(np.abs(m) - np.abs(target))) > tol:
            continue
        ratio = target / m
        col = ratio[0, :]
        row = ratio[:, 0] / ratio[0, 0]
        if np.max(np.abs(ratio - np.outer(row, col))) <= tol:
            return assignment, np.angle(col), np.angle(row)
    raise ValueError("no mode-pair assignment reproduces the target up to phases")


def qutrit_fourier_circuit():
    """Three beam splitters (plus phase shifters) realizing the 3x3 DFT exactly."""
    assignment, phase_in, phase_out = qutrit_fourier_assignment()
    circ = Circuit(3)
    circ.extend(PhaseShifter(m, float(ph)) for m, ph in enumerate(phase_in))
    for blk, (a, b) in zip(QUTRIT_FT_BLOCKS, assignment):
        circ.extend(two_mode_elements(blk, a, b))
    circ.extend(PhaseShifter(m, float(ph)) for m, ph in enumerate(phase_out))
    return circ


# --- the full apparatus -------------------------------------------------------


def _diagonal_factor(b, c, tol):
    """Unit-modulus diagonal D with b = D c, or None."""
    dmat = b @ dagger(c)
    off = dmat - np.diag(np.diag(dmat))
    if np.max(np.abs(off)) > tol or np.max(np.abs(np.abs(np.diag(dmat)) - 1)) > tol:
        return None
    return np.angle(np.diag(dmat))


@dataclass
class Apparatus:
    d: int
    stage1: Circuit
    stage2: list
    labels: list
    groups: int

    def transfer_matrix(self):
        """Map from the d input paths to the detector modes (rows ordered like ``labels``)."""
        d = self.d
        inject = np.zeros((self.groups * d, d), dtype=complex)
        for p in range(d):
            inject[_mode(self.groups - 1, p, d), p] = 1.0
        t1 = self.stage1.transfer_matrix() @ inject
        blocks = [c.transfer_matrix() for c in self.stage2]
        t2 = np.zeros((self.groups * d, self.groups * d), dtype=complex)
        for g, blk in enumerate(blocks):
            t2[g * d:(g + 1) * d, g * d:(g + 1) * d] = blk
        return t2 @ t1

    def distribution(self, rho):
        t = self.transfer_matrix()
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim == 1:
            amps = t @ rho
            return np.abs(amps) ** 2
        return np.einsum("ia,ab,ib->i", t, rho, t.conj()).real

    def element_count(self):
        return len(self.stage1.elements) + sum(len(c.elements) for c in self.stage2)


def build_apparatus(scheme, tol=DEFAULT_TOL):
    """Optical realization of a scheme whose first-step Kraus operators are diagonal."""
    scheme.validate(tol)
    d = scheme.dim
    groups = len(scheme.first)
    diagonals = []
    for g, a in enumerate(scheme.first):
        if np.max(np.abs(a - np.diag(np.diag(a)))) > tol:
            raise ValueError(f"Kraus operator {g} is not diagonal; outside the optical recipe")
        diagonals.append(np.diag(a))
    stage1 = stage1_circuit(np.array(diagonals), tol)

    # shared rotation with per-group phase shifters when the bases differ only by diagonal phases
    refs = [fourier_basis(d).matrix(), scheme.second[0].matrix()]
    shared = None
    for ref in refs:
        phases = [_diagonal_factor(b.matrix(), ref, 1e-9) for b in scheme.second]
        if all(ph is not None for ph in phases):
            shared = (ref, phases)
            break

    stage2 = []
    if shared is not None:
        ref, phases = shared
        core = reck_decompose(dagger(ref), tol)
        for ph in phases:
            # measuring D c means applying D^dag, then the shared rotation c^dag
            circ = Circuit(d, [PhaseShifter(m, float(-x)) for m, x in enumerate(ph) if abs(x) > 1e-15])
            circ.extend(core.elements)
            stage2.append(circ)
    else:
        for b in scheme.second:
            stage2.append(reck_decompose(dagger(b.matrix()), tol))
    labels = [(g, j) for g in range(groups) for j in range(d)]
    return Apparatus(d, stage1, stage2, labels, groups)


def sample_clicks(apparatus, rho, shots, seed):
    if shots <= 0:
        raise ValueError("shots must be positive")
    probs = apparatus.distribution(rho)
    probs = np.clip(probs, 0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    return rng.multinomial(int(shots), probs)


def pom_distribution(scheme, rho):
    return born_probabilities(compose_sequential(scheme), rho)
