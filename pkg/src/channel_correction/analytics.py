"""Closed-form expressions for single-rail qubits under loss and noiseless amplification."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy import integrate, optimize

from .fock import DensityOperator, partial_trace


@dataclass(frozen=True)
class SubspaceMatrix:
    """Two-mode density matrix restricted to the {|00>,|01>,|10>,|11>} block.

    ``d`` is the coefficient of |01><10|. ``off_block`` records the largest
    other off-diagonal entry inside the block, which the concurrence formula
    assumes to vanish.
    ``tol`` is the slack on the validity checks; rounded tabulated matrices
    need more than the default.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    d: complex
    off_block: float = 0.0
    tol: float = field(default=1e-9, compare=False, repr=False)

    def __post_init__(self):
        pops = (self.p00, self.p01, self.p10, self.p11)
        if min(pops) < -self.tol:
            raise ValueError(f"negative population in {pops}")
        if sum(pops) > 1 + self.tol:
            raise ValueError(f"populations sum to {sum(pops)} > 1")
        bound = sqrt(max(self.p01, 0.0) * max(self.p10, 0.0))
        if abs(self.d) > bound + self.tol:
            raise ValueError(f"|d|={abs(self.d):.6g} exceeds sqrt(p01 p10)={bound:.6g}")


def concurrence(m: SubspaceMatrix) -> float:
    """C = 2 max(|d| - sqrt(p00 p11), 0)."""
    return 2.0 * max(abs(m.d) - sqrt(max(m.p00, 0.0) * max(m.p11, 0.0)), 0.0)


def extract_subspace(rho: DensityOperator, modes: tuple[str, str] | None = None) -> SubspaceMatrix:
    """Read the {0,1}x{0,1} block of a two-mode state, normalized to unit trace.

    Populations are not renormalized to the block: weight in higher photon
    numbers simply does not appear in p00..p11.
    """
    if modes is not None:
        rho = partial_trace(rho, modes)
        if rho.labels != tuple(modes):
            raise ValueError(f"modes {modes} must follow register order {rho.labels}")
    if len(rho.register) != 2:
        raise ValueError("extract_subspace needs a two-mode state")
    rho = rho.normalized()
    get = rho.element
    p00 = get((0, 0), (0, 0)).real
    p01 = get((0, 1), (0, 1)).real
    p10 = get((1, 0), (1, 0)).real
    p11 = get((1, 1), (1, 1)).real if rho.n_max >= 2 else 0.0
    d = get((0, 1), (1, 0))
    block = [rho.basis.index(o) for o in ((0, 0), (0, 1), (1, 0), (1, 1)) if o in rho.basis]
    mat = np.abs(rho.matrix[np.ix_(block, block)])
    np.fill_diagonal(mat, 0.0)
    mat[1, 2] = mat[2, 1] = 0.0
    return SubspaceMatrix(p00, p01, p10, p11, d, off_block=float(mat.max(initial=0.0)))


# ----------------------------------------------------------------------------
# single-mode qubit formulas
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class QubitSpec:
    """alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm}, expected 1")

    @classmethod
    def from_alpha(cls, alpha: float) -> QubitSpec:
        return cls(alpha, sqrt(max(1.0 - alpha * alpha, 0.0)))


def loss_output(q: QubitSpec, transmission: float) -> np.ndarray:
    """Qubit after pure loss: |b|^2 (1-T)|0><0| + (a|0> + sqrt(T) b|1>)(h.c.)."""
    return _damped(q, transmission, 1.0)


def ha_output(q: QubitSpec, transmission: float, gain: float) -> tuple[np.ndarray, float]:
    """Lossy qubit after successful noiseless amplification with amplitude gain ``gain``.

    The returned probability is that of an ideal quantum-scissors realization
    with resource bias 1/(1+g^2), summed over both heralding outcomes.
    """
    b2 = abs(q.beta) ** 2
    norm = 1.0 + transmission * b2 * (gain**2 - 1.0)
    return _damped(q, transmission, gain) / norm, norm / (1.0 + gain**2)


def _damped(q: QubitSpec, t: float, g: float) -> np.ndarray:
    vec = np.array([q.alpha, g * sqrt(t) * q.beta], dtype=complex)
    rho = np.outer(vec, vec.conj())
    rho[0, 0] += abs(q.beta) ** 2 * (1.0 - t)
    return rho


def fidelity_after_ha(beta_sq: float, transmission: float, gain: float) -> float:
    b, t, g = beta_sq, transmission, gain
    num = b * (1 - t) * (1 - b) + (1 - b + g * sqrt(t) * b) ** 2
    return num / (1 + t * b * (g * g - 1))


def average_fidelity(transmission: float, gain: float, *, return_error: bool = False):
    """Mean of ``fidelity_after_ha`` over |beta|^2 uniform on [0, 1]."""
    val, err = integrate.quad(fidelity_after_ha, 0.0, 1.0, args=(transmission, gain), epsabs=1e-13, epsrel=1e-13, limit=200)
    return (val, err) if return_error else val


def optimal_gain(transmission: float, g_max: float = 1e3) -> tuple[float, float]:
    """Gain g >= 1 maximizing the average fidelity; returns (g*, F_av(g*))."""
    res = optimize.minimize_scalar(
        lambda lg: -average_fidelity(transmission, np.exp(lg)),
        bounds=(0.0, np.log(g_max)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    g = float(np.exp(res.x))
    best = average_fidelity(transmission, g)
    at_one = average_fidelity(transmission, 1.0)
    return (1.0, at_one) if at_one >= best else (g, best)


def biased_output(epsilon: float, transmission: float) -> SubspaceMatrix:
    """Biased entangled pair after loss and amplification with g sqrt(eps T) = sqrt(1 - eps).

    The input is sqrt(eps)|0_f 1_e> + sqrt(1-eps)|1_f 0_e> with mode e
    through the channel; modes are ordered (f, e).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    norm = 2 * (1 - epsilon) + (1 - transmission) * epsilon
    one = (1 - epsilon) / norm
    return SubspaceMatrix(epsilon * (1 - transmission) / norm, one, one, 0.0, one)


def matched_gain(epsilon: float, transmission: float) -> float:
    return sqrt((1 - epsilon) / (epsilon * transmission))


# ----------------------------------------------------------------------------
# interference
# ----------------------------------------------------------------------------


def hom_visibility(coincidence_min: float, coincidence_baseline: float) -> float:
    if coincidence_baseline <= 0:
        raise ValueError("baseline coincidence rate must be positive")
    return 1.0 - coincidence_min / coincidence_baseline


def simulate_hom(xi: float) -> tuple[float, float]:
    """Coincidence probability of two single photons on a 50:50 splitter.

    Returns ``(coincidence at zero delay, coincidence for distinguishable
    photons)``. The photons overlap with probability ``xi``.
    """
    from .detection import Detector, DetectorModel, HeraldPattern, herald
    from .fock import PureState, apply_unitary, with_vacuum
    from .optics import beam_splitter, distinguishability_split

    def coincidence(x: float) -> float:
        state = PureState.fock(("x", "y"), (1, 1), 2)
        state = distinguishability_split(state, "y", x, "y~")
        state = with_vacuum(state, ["x~"])
        state = apply_unitary(state, beam_splitter(0.5, "x", "y"))
        state = apply_unitary(state, beam_splitter(0.5, "x~", "y~"))
        dets = {"P1": Detector(("x", "x~")), "P2": Detector(("y", "y~"))}
        _, p = herald(state, HeraldPattern({"P1": "click", "P2": "click"}), dets)
        return p

    return coincidence(xi), coincidence(0.0)
