"""Optical components as mode transformations and channels on Fock states.

Polarization is carried by pairs of spatial modes (one label for H, one for
V), so wave plates are two-mode transformations and a polarizing beam splitter
is a relabelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, cos, pi, sin, sqrt

import numpy as np

from .fock import (
    DEFAULT_NMAX,
    DensityOperator,
    ModeUnitary,
    PureState,
    State,
    apply_unitary,
    basis_index,
    with_vacuum,
)


@dataclass(frozen=True)
class ChannelSpec:
    """Pure-loss channel with transmission ``T`` (loss ``L = 1 - T``)."""

    transmission: float

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.transmission}")

    @classmethod
    def from_loss(cls, loss: float) -> ChannelSpec:
        if not 0.0 <= loss <= 1.0:
            raise ValueError(f"loss must lie in [0, 1], got {loss}")
        return cls(1.0 - loss)

    @property
    def loss(self) -> float:
        return 1.0 - self.transmission


@dataclass(frozen=True)
class SourceSpec:
    """Photon-pair source.

    ``pair_probability`` is the per-pulse pair probability p (the squeezing
    amplitude is taken as sqrt(p)). ``deterministic`` replaces the SPDC
    expansion by exactly one pair per pulse, the noise-free limit.
    """

    pair_probability: float = 0.00123
    indistinguishability: float = 1.0
    deterministic: bool = False

    def __post_init__(self):
        if not 0.0 <= self.pair_probability < 0.1:
            raise ValueError(f"pair probability must lie in [0, 0.1), got {self.pair_probability}")
        if not 0.0 <= self.indistinguishability <= 1.0:
            raise ValueError(f"indistinguishability must lie in [0, 1], got {self.indistinguishability}")


# ----------------------------------------------------------------------------
# passive elements
# ----------------------------------------------------------------------------


def beam_splitter(transmission: float, i: str, j: str) -> ModeUnitary:
    """Real beam splitter: a_i -> sqrt(T) a_i + sqrt(1-T) a_j, a_j -> sqrt(1-T) a_i - sqrt(T) a_j."""
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {transmission}")
    t, r = sqrt(transmission), sqrt(1.0 - transmission)
    return ModeUnitary((i, j), np.array([[t, r], [r, -t]]))


def half_wave_plate(theta: float, h_mode: str, v_mode: str) -> ModeUnitary:
    if h_mode == v_mode:
        raise ValueError("wave plate needs distinct H and V modes")
    c, s = cos(2 * theta), sin(2 * theta)
    return ModeUnitary((h_mode, v_mode), np.array([[c, s], [s, -c]]))


def quarter_wave_plate(theta: float, h_mode: str, v_mode: str) -> ModeUnitary:
    if h_mode == v_mode:
        raise ValueError("wave plate needs distinct H and V modes")
    c, s = cos(theta), sin(theta)
    m = np.array(
        [
            [c * c + 1j * s * s, (1 - 1j) * s * c],
            [(1 - 1j) * s * c, s * s + 1j * c * c],
        ]
    )
    return ModeUnitary((h_mode, v_mode), m)


def phase_shift(phi: float, mode: str) -> ModeUnitary:
    return ModeUnitary((mode,), np.array([[np.exp(1j * phi)]]))


def pbs(h_in: str, v_in: str, h_out: str, v_out: str) -> ModeUnitary:
    """Polarizing beam splitter as a mode relabelling.

    H is transmitted ``h_in -> h_out`` and V reflected ``v_in -> v_out`` with
    phase +1. Output labels that differ from the inputs are swapped with them,
    which keeps the map unitary.
    """
    if h_in == v_in or h_out == v_out or h_out == v_in or v_out == h_in:
        raise ValueError("PBS port labels clash")
    modes = list(dict.fromkeys([h_in, v_in, h_out, v_out]))
    k = len(modes)
    pos = {m: n for n, m in enumerate(modes)}
    perm = list(range(k))
    for src, dst in ((h_in, h_out), (v_in, v_out)):
        if src != dst:
            perm[pos[src]], perm[pos[dst]] = pos[dst], pos[src]
    mat = np.zeros((k, k))
    for col, row in enumerate(perm):
        mat[row, col] = 1.0
    return ModeUnitary(tuple(modes), mat)


# ----------------------------------------------------------------------------
# loss
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LossChannel:
    spec: ChannelSpec
    mode: str

    def kraus_operators(self, n_max: int) -> list[np.ndarray]:
        """Single-mode Kraus set K_k = sum_n sqrt(C(n,k) (1-T)^k T^(n-k)) |n-k><n|."""
        t = self.spec.transmission
        ops = []
        for k in range(n_max + 1):
            K = np.zeros((n_max + 1, n_max + 1))
            for n in range(k, n_max + 1):
                K[n - k, n] = sqrt(comb(n, k) * (1 - t) ** k * t ** (n - k))
            ops.append(K)
        return ops

    def __call__(self, state: State) -> DensityOperator:
        return apply_loss(state.to_density() if isinstance(state, PureState) else state, self.spec.transmission, self.mode)


def loss_channel(spec: ChannelSpec, mode: str) -> LossChannel:
    return LossChannel(spec, mode)


def apply_loss(state: State, transmission: float, mode: str, env: str | None = None) -> State:
    """Attenuate ``mode``.

    Density operators get the Kraus map in place. Pure states are dilated
    instead: the lost light is routed to a fresh environment mode (default
    label ``"env:<mode>"`` with a numeric suffix if taken) that stays in the
    register until traced out.
    """
    if transmission == 1.0:
        return state
    if isinstance(state, PureState):
        env = env or _fresh_label(state, f"env:{mode}")
        state = with_vacuum(state, [env])
        return apply_unitary(state, beam_splitter(transmission, mode, env))

    pos = state.register.index[mode]
    basis = state.basis
    idx = basis_index(len(state.register), state.n_max)
    kraus = LossChannel(ChannelSpec(transmission), mode).kraus_operators(state.n_max)
    out = np.zeros_like(state.matrix)
    for K in kraus:
        full = np.zeros_like(state.matrix)
        for col, occ in enumerate(basis):
            n = occ[pos]
            for m in range(n + 1):
                if K[m, n] != 0:
                    row = idx[occ[:pos] + (m,) + occ[pos + 1 :]]
                    full[row, col] = K[m, n]
        out += full @ state.matrix @ full.T
    return DensityOperator(state.register, out, state.n_max)


def _fresh_label(state: State, stem: str) -> str:
    if stem not in state.register:
        return stem
    k = 1
    while f"{stem}#{k}" in state.register:
        k += 1
    return f"{stem}#{k}"


# ----------------------------------------------------------------------------
# sources and resource states
# ----------------------------------------------------------------------------


def spdc_state(spec: SourceSpec, signal: str = "s", idler: str = "i", n_max: int = DEFAULT_NMAX) -> PureState:
    """Two-mode squeezed vacuum sum_n p^(n/2) |n, n>, truncated at n_max photons and normalized."""
    if n_max < 4:
        raise ValueError(f"n_max={n_max} cannot hold two pairs")
    if spec.deterministic:
        return PureState.fock((signal, idler), (1, 1), n_max)
    lam = sqrt(spec.pair_probability)
    terms = {(n, n): lam**n for n in range(n_max // 2 + 1)}
    return PureState((signal, idler), terms, n_max).normalized()


def eta_from_hwp_angle(theta: float) -> float:
    """Resource bias set by the wave-plate angle, eta = sin(2 theta)."""
    return sin(2 * theta)


def resource_state(eta: float, a: str = "a", v: str = "v", n_max: int = DEFAULT_NMAX) -> PureState:
    """sqrt(eta)|1_a 0_v> + sqrt(1-eta)|0_a 1_v>."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return PureState((a, v), {(1, 0): sqrt(eta), (0, 1): sqrt(1 - eta)}, n_max)


def prepare_path_entangled(
    modes: tuple[str, str] = ("f", "e"),
    source: SourceSpec | None = None,
    idler: str | None = None,
    n_max: int = DEFAULT_NMAX,
) -> PureState:
    """(|1,0> + |0,1>)/sqrt(2) on ``modes`` from a photon split by a pi/8 half-wave plate.

    Without a source the photon is ideal. With a source, the photon is the
    signal arm of an SPDC pair whose idler stays in the register (label
    ``idler``, default ``"<first mode>:herald"``) so the caller can herald on
    it; higher-order pairs are split by the same plate.
    """
    h, v = modes
    if source is None:
        state = PureState.fock((h, v), (1, 0), n_max)
    else:
        idler = idler or f"{h}:herald"
        state = spdc_state(source, h, idler, n_max)
        state = with_vacuum(state, [v])
    return apply_unitary(state, half_wave_plate(pi / 8, h, v))


def distinguishability_split(state: State, mode: str, xi: float, unmatched: str | None = None) -> State:
    """Move weight 1 - xi of ``mode`` into an orthogonal internal sub-mode.

    The unmatched sub-mode (default label ``"<mode>~"``) never interferes with
    anything that only acts on ``mode``; detectors should cover both labels.
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"indistinguishability must lie in [0, 1], got {xi}")
    unmatched = unmatched or f"{mode}~"
    state = with_vacuum(state, [unmatched])
    if xi == 1.0:
        return state
    return apply_unitary(state, beam_splitter(xi, mode, unmatched))
