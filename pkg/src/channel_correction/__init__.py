"""Simulation and analytics for lossy single-rail channels corrected by heralded amplification."""

from .analytics import SubspaceMatrix, concurrence, extract_subspace
from .config import ExperimentConfig, load_config, preset
from .protocols import AmplifierSpec, corrected_channel, direct_transmission, entanglement_swap, heralded_amplifier

__all__ = [
    "AmplifierSpec",
    "ExperimentConfig",
    "SubspaceMatrix",
    "concurrence",
    "corrected_channel",
    "direct_transmission",
    "entanglement_swap",
    "extract_subspace",
    "heralded_amplifier",
    "load_config",
    "preset",
]
