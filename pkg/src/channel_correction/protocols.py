"""Heralded amplification, entanglement swapping and the full channel pipelines.

Both heralded stages are the same circuit: the input meets one arm of a
single-photon resource on a 50:50 splitter and success is "exactly one of the
two ports fires". The two outcomes differ by a phase flip on the output mode,
which is undone by feed-forward so that both outcomes can be pooled.

Pipelines are simulated on sparse pure states (losses are dilated into
environment modes) and heralded once at the end, which is equivalent to
heralding stage by stage because the detected modes are never touched again.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

from .analytics import SubspaceMatrix, concurrence, extract_subspace, matched_gain
from .config import ExperimentConfig
from .detection import Detector, DetectorModel, HeraldPattern, herald
from .fock import DensityOperator, PureState, State, apply_unitary, tensor, with_vacuum
from .optics import (
    SourceSpec,
    apply_loss,
    beam_splitter,
    distinguishability_split,
    half_wave_plate,
    phase_shift,
    resource_state,
    spdc_state,
)

IDEAL_DETECTOR = DetectorModel("pnr", 1.0)


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class AmplifierSpec:
    """Quantum-scissors amplifier with resource bias ``eta``; nominal gain g^2 = (1-eta)/eta."""

    eta: float
    delivery_efficiency: float = 1.0
    detector: DetectorModel = IDEAL_DETECTOR
    indistinguishability: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not 0.0 <= self.delivery_efficiency <= 1.0:
            raise ValueError("delivery efficiency outside [0, 1]")

    @classmethod
    def from_gain(cls, gain: float, **kw) -> AmplifierSpec:
        return cls(1.0 / (1.0 + gain * gain), **kw)

    @property
    def gain_squared(self) -> float:
        return (1.0 - self.eta) / self.eta

    @property
    def gain(self) -> float:
        return sqrt(self.gain_squared)


def _interfere(state: State, input_mode: str, ancilla_mode: str, xi: float):
    """50:50 interference of input and ancilla; returns the state and the two port mode groups."""
    if xi < 1.0:
        state = distinguishability_split(state, ancilla_mode, xi, f"{ancilla_mode}~")
        state = with_vacuum(state, [f"{input_mode}~"])
        state = apply_unitary(state, beam_splitter(0.5, f"{input_mode}~", f"{ancilla_mode}~"))
        ports = ((input_mode, f"{input_mode}~"), (ancilla_mode, f"{ancilla_mode}~"))
    else:
        ports = ((input_mode,), (ancilla_mode,))
    return apply_unitary(state, beam_splitter(0.5, input_mode, ancilla_mode)), ports


def scissors_pattern(ports: tuple[str, str], output_mode: str | None) -> HeraldPattern:
    """One-and-only-one click across ``ports``; the ancilla-side port flips the output phase."""
    ff = {ports[1]: phase_shift(pi, output_mode)} if output_mode else {}
    return HeraldPattern(exclusive=(ports,), feedforward=ff)


def heralded_amplifier(
    state: State,
    spec: AmplifierSpec,
    input_mode: str = "e",
    output_mode: str = "v",
    ancilla_mode: str = "a",
    ports: tuple[str, str] = ("D1", "D2"),
) -> tuple[DensityOperator, float]:
    """Noiselessly amplify ``input_mode``; the result lives on ``output_mode``.

    Other modes of ``state`` are carried along. The returned operator is
    sub-normalized with trace equal to the success probability.
    """
    for m in (output_mode, ancilla_mode):
        if m in state.register:
            raise ValueError(f"mode {m!r} already present in the input state")
    resource = resource_state(spec.eta, ancilla_mode, output_mode, state.n_max + 1)
    if isinstance(state, DensityOperator):
        resource = resource.to_density()
    joint = tensor(state, resource, state.n_max + 1)
    joint = apply_loss(joint, spec.delivery_efficiency, ancilla_mode)
    joint, (p1, p2) = _interfere(joint, input_mode, ancilla_mode, spec.indistinguishability)
    dets = {ports[0]: Detector(p1, spec.detector), ports[1]: Detector(p2, spec.detector)}
    keep = [m for m in state.register.labels if m != input_mode] + [output_mode]
    return herald(joint, scissors_pattern(ports, output_mode), dets, keep=keep)


def entanglement_swap(
    state: State,
    input_mode: str = "g",
    partner_mode: str = "f",
    detector: DetectorModel = DetectorModel("threshold", 1.0),
    output_mode: str | None = None,
    xi: float = 1.0,
    ports: tuple[str, str] = ("D3", "D4"),
) -> tuple[DensityOperator, float]:
    """Single-rail Bell measurement between ``input_mode`` and ``partner_mode``.

    ``output_mode`` is the far end of the partner's entangled pair; it receives
    the feed-forward phase correction.
    """
    joint, (p1, p2) = _interfere(state, input_mode, partner_mode, xi)
    dets = {ports[0]: Detector(p1, detector), ports[1]: Detector(p2, detector)}
    keep = [m for m in state.register.labels if m not in (input_mode, partner_mode)]
    return herald(joint, scissors_pattern(ports, output_mode), dets, keep=keep)


# ----------------------------------------------------------------------------
# pipelines
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PipelineResult:
    rho_hv: DensityOperator
    p_channel_ready: float
    p_state_sent: float

    @property
    def subspace(self) -> SubspaceMatrix:
        return extract_subspace(self.rho_hv)

    @property
    def concurrence(self) -> float:
        return concurrence(self.subspace)


def _source(spec: SourceSpec, signal: str, idler: str, nmax: int) -> PureState:
    if nmax < 4:
        raise TruncationError(f"nmax={nmax} cannot represent two pairs per source")
    return spdc_state(spec, signal, idler, nmax)


def _corrected_state(config: ExperimentConfig):
    eff = config.efficiencies
    n = config.nmax
    s1 = _source(config.source, "f", "h", n)
    s2 = _source(config.ancilla_source, "a", "t", n)
    state = tensor(s1, s2, 2 * n)
    state = with_vacuum(state, ["e", "g", "v"])
    state = apply_unitary(state, half_wave_plate(pi / 8, "f", "e"))
    state = apply_unitary(state, half_wave_plate(pi / 8, "h", "g"))
    state = apply_unitary(state, beam_splitter(config.eta, "a", "v"))
    state = apply_loss(state, config.transmission, "e")
    state = apply_loss(state, eff.resource_delivery, "a")
    state, (d1, d2) = _interfere(state, "e", "a", config.xi_ha)
    state, (d3, d4) = _interfere(state, "g", "f", config.xi_es)
    state = apply_loss(state, eff.out_h, "h")
    state = apply_loss(state, eff.out_v, "v")
    dets = {
        "D1": Detector(d1, config.detector("d1")),
        "D2": Detector(d2, config.detector("d2")),
        "D3": Detector(d3, config.detector("d3")),
        "D4": Detector(d4, config.detector("d4")),
        "Dt": Detector(("t",), config.detector("ancilla_herald")),
    }
    ready = scissors_pattern(("D1", "D2"), "v") & HeraldPattern({"Dt": "click"})
    sent = ready & scissors_pattern(("D3", "D4"), "v")
    return state, dets, ready, sent


def corrected_channel(config: ExperimentConfig) -> PipelineResult:
    """Entanglement distributed to (h, v) through the amplifier-corrected channel.

    ``p_channel_ready`` is the probability of the amplifier herald together
    with the ancilla herald; ``p_state_sent`` additionally requires the swap
    herald.
    """
    state, dets, ready, sent = _corrected_state(config)
    _, p_ready = herald(state, ready, dets, keep=())
    rho, p_sent = herald(state, sent, dets, keep=("h", "v"))
    return PipelineResult(rho, p_ready, p_sent)


def direct_transmission(config: ExperimentConfig) -> DensityOperator:
    """Heralded (f, e) pair with e sent straight through the loss.

    Sub-normalized: the trace is the probability of the source herald.
    """
    eff = config.efficiencies
    state = _source(config.source, "f", "f:herald", config.nmax)
    state = with_vacuum(state, ["e"])
    state = apply_unitary(state, half_wave_plate(pi / 8, "f", "e"))
    state = apply_loss(state, config.transmission, "e")
    state = apply_loss(state, eff.out_f, "f")
    state = apply_loss(state, eff.out_e, "e")
    dets = {"H": Detector(("f:herald",), config.detector("direct_herald"))}
    rho, _ = herald(state, HeraldPattern({"H": "click"}), dets, keep=("f", "e"))
    return rho


def direct_concurrence(config: ExperimentConfig) -> float:
    return concurrence(extract_subspace(direct_transmission(config)))


def biased_corrected_channel(
    epsilon: float,
    transmission: float,
    gain: float | None = None,
    detector: DetectorModel = IDEAL_DETECTOR,
) -> DensityOperator:
    """sqrt(eps)|0_f 1_e> + sqrt(1-eps)|1_f 0_e>, loss on e, then amplification onto v.

    ``gain`` defaults to the matched value g sqrt(eps T) = sqrt(1 - eps).
    Returns the sub-normalized state on (f, v).
    """
    g = matched_gain(epsilon, transmission) if gain is None else gain
    pair = PureState(("f", "e"), {(0, 1): sqrt(epsilon), (1, 0): sqrt(1 - epsilon)}, 2).to_density()
    pair = apply_loss(pair, transmission, "e")
    rho, _ = heralded_amplifier(pair, AmplifierSpec.from_gain(g, detector=detector), "e", "v")
    return rho
