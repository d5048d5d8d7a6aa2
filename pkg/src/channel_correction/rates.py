"""Operation rates and the transmission-equivalent gain of the corrected channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

from .config import REPETITION_RATE_HZ, ExperimentConfig
from .protocols import PipelineResult, corrected_channel, direct_concurrence, direct_transmission


@dataclass(frozen=True)
class RateReport:
    """Per-pulse herald probabilities and the matching rates at ``repetition_rate``.

    The operation rate of the corrected channel is the probability that a state
    is sent given the channel was prepared; for direct transmission it is the
    probability of heralding the input pair.
    """

    p_channel_ready: float
    p_state_sent: float
    p_direct: float
    repetition_rate: float = REPETITION_RATE_HZ

    def __post_init__(self):
        if min(self.p_channel_ready, self.p_state_sent, self.p_direct) < 0:
            raise ValueError("negative probability")
        if self.p_state_sent > self.p_channel_ready * (1 + 1e-9) + 1e-15:
            raise ValueError("state-sent probability exceeds channel-ready probability")

    @property
    def channel_ready_rate(self) -> float:
        return self.p_channel_ready * self.repetition_rate

    @property
    def state_sent_rate(self) -> float:
        return self.p_state_sent * self.repetition_rate

    @property
    def direct_rate(self) -> float:
        return self.p_direct * self.repetition_rate

    @property
    def corrected_operation_rate(self) -> float:
        return self.p_state_sent / self.p_channel_ready if self.p_channel_ready > 0 else 0.0

    @property
    def operation_rate_ratio(self) -> float:
        """Corrected over direct operation rate (nan when the direct channel never fires)."""
        return self.corrected_operation_rate / self.p_direct if self.p_direct > 0 else math.nan


def operation_rates(
    config: ExperimentConfig,
    repetition_rate: float = REPETITION_RATE_HZ,
    result: PipelineResult | None = None,
) -> RateReport:
    result = result or corrected_channel(config)
    p_direct = direct_transmission(config).trace_weight
    return RateReport(result.p_channel_ready, result.p_state_sent, p_direct, repetition_rate)


@dataclass(frozen=True)
class TransmissionGain:
    db: float
    effective_transmission: float
    saturated: bool = False


def effective_transmission_gain(
    c_corrected: float, loss: float, config: ExperimentConfig, xtol: float = 1e-13
) -> TransmissionGain:
    """Transmission T' at which direct transmission (same noise model) reaches ``c_corrected``.

    Returns 10 log10(T' / (1 - loss)). When even a lossless direct channel falls
    short, the result is pinned at T' = 1 and flagged as saturated.
    """
    t0 = 1.0 - loss

    def curve(t: float) -> float:
        return direct_concurrence(config.with_(loss=1.0 - t))

    def db(t: float) -> float:
        return 10 * math.log10(t / t0) if t > 0 and t0 > 0 else math.inf

    top = curve(1.0)
    if c_corrected >= top:
        return TransmissionGain(db(1.0), 1.0, saturated=c_corrected > top)
    lo = 1e-12
    if c_corrected <= curve(lo):
        return TransmissionGain(db(lo), lo, saturated=True)
    t = optimize.brentq(lambda x: curve(x) - c_corrected, lo, 1.0, xtol=xtol, rtol=1e-15, maxiter=500)
    return TransmissionGain(db(t), t)
