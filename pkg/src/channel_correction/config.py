"""Experiment configuration, presets and JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .detection import DetectorModel
from .optics import SourceSpec

PAPER_PAIR_PROBABILITY = 0.00123
# midpoint of the 0.635-0.757 delivery-efficiency range
MEASURED_EFFICIENCY = 0.5 * (0.635 + 0.757)
SOURCE_HERALD_EFFICIENCY = 0.8
REPETITION_RATE_HZ = 81e6

DEFAULT_LOSSES = (0.9884, 0.958, 0.903)
DEFAULT_ETAS = (0.0012, 0.0049, 0.0076, 0.0302, 0.0670, 0.1170, 0.1786, 0.2500)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Efficiencies:
    """Per-port detection/delivery efficiencies.

    d1, d2: amplifier heralds; d3, d4: swap heralds; ancilla_herald: idler of
    the ancilla source; direct_herald: idler of the entangled source when used
    as a heralded single-photon source; out_*: final analysis of each output
    mode; resource_delivery: extra loss on the ancilla photon before it meets
    the input.
    """

    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0
    d4: float = 1.0
    ancilla_herald: float = 1.0
    direct_herald: float = 1.0
    out_h: float = 1.0
    out_v: float = 1.0
    out_f: float = 1.0
    out_e: float = 1.0
    resource_delivery: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"efficiency {f.name}={v} outside [0, 1]")

    @classmethod
    def uniform(cls, value: float) -> Efficiencies:
        return cls(**{f.name: value for f in fields(cls)})

    @classmethod
    def from_value(cls, value, base: Efficiencies | None = None) -> Efficiencies:
        """Accept a single number (applied to every port) or a per-port mapping."""
        base = base or cls()
        if isinstance(value, (int, float)):
            return cls.uniform(float(value))
        if not isinstance(value, dict):
            raise ConfigError(f"efficiencies must be a number or a mapping, got {type(value).__name__}")
        names = {f.name for f in fields(cls)}
        unknown = set(value) - names
        if unknown:
            raise ConfigError(f"unknown efficiency ports {sorted(unknown)}")
        return replace(base, **{k: float(v) for k, v in value.items()})


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything the corrected-channel and direct-transmission models need.

    ``nmax`` caps the photon number emitted by each source (so ``nmax // 2``
    pairs per source); the joint state holds up to ``2 * nmax`` photons.
    """

    loss: float = 0.9884
    eta: float = 0.0049
    source: SourceSpec = SourceSpec(PAPER_PAIR_PROBABILITY)
    ancilla_source: SourceSpec = SourceSpec(PAPER_PAIR_PROBABILITY)
    amplifier_detector: str = "threshold"
    swap_detector: str = "threshold"
    efficiencies: Efficiencies = field(default_factory=Efficiencies)
    xi_ha: float = 1.0
    xi_es: float = 1.0
    nmax: int = 4
    preset: str = "custom"

    def __post_init__(self):
        if not 0.0 <= self.loss <= 1.0:
            raise ConfigError(f"loss {self.loss} outside [0, 1]")
        if not 0.0 < self.eta < 1.0:
            raise ConfigError(f"eta {self.eta} outside (0, 1)")
        for name in ("xi_ha", "xi_es"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} outside [0, 1]")
        for name in ("amplifier_detector", "swap_detector"):
            if getattr(self, name) not in ("threshold", "pnr"):
                raise ConfigError(f"{name} must be 'threshold' or 'pnr'")
        if int(self.nmax) != self.nmax or self.nmax < 1:
            raise ConfigError(f"nmax must be a positive integer, got {self.nmax}")

    @property
    def transmission(self) -> float:
        return 1.0 - self.loss

    @property
    def gain_squared(self) -> float:
        return (1.0 - self.eta) / self.eta

    def detector(self, port: str) -> DetectorModel:
        kind = self.amplifier_detector if port in ("d1", "d2") else self.swap_detector
        if port in ("ancilla_herald", "direct_herald"):
            kind = "threshold"
        return DetectorModel(kind, getattr(self.efficiencies, port))

    def with_(self, **changes) -> ExperimentConfig:
        return replace(self, **changes)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "preset": self.preset,
            "loss": self.loss,
            "eta": self.eta,
            "nmax": self.nmax,
            "sources": {
                "entangled": asdict(self.source),
                "ancilla": asdict(self.ancilla_source),
            },
            "detectors": {"amplifier": self.amplifier_detector, "swap": self.swap_detector},
            "efficiencies": asdict(self.efficiencies),
            "indistinguishability": {"amplifier": self.xi_ha, "swap": self.xi_es},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        known = {"preset", "loss", "eta", "nmax", "sources", "detectors", "efficiencies", "indistinguishability"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        base = preset(data.get("preset", "ideal"))
        try:
            kw: dict[str, Any] = {}
            for key in ("loss", "eta"):
                if key in data:
                    kw[key] = float(data[key])
            if "nmax" in data:
                kw["nmax"] = int(data["nmax"])
            sources = data.get("sources", {})
            for key, attr in (("entangled", "source"), ("ancilla", "ancilla_source")):
                if key in sources:
                    kw[attr] = replace(getattr(base, attr), **sources[key])
            det = data.get("detectors", {})
            if "amplifier" in det:
                kw["amplifier_detector"] = det["amplifier"]
            if "swap" in det:
                kw["swap_detector"] = det["swap"]
            if "efficiencies" in data:
                kw["efficiencies"] = Efficiencies.from_value(data["efficiencies"], base.efficiencies)
            xi = data.get("indistinguishability", {})
            if "amplifier" in xi:
                kw["xi_ha"] = float(xi["amplifier"])
            if "swap" in xi:
                kw["xi_es"] = float(xi["swap"])
            return replace(base, preset=data.get("preset", "custom"), **kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def preset(name: str) -> ExperimentConfig:
    """``ideal``: lossless optics, unit-efficiency threshold detection, perfect interference.
    ``measured``: mid-range delivery efficiencies, 0.8 source heralding, HOM visibilities 0.97/0.99.
    ``custom``: same starting point as ``ideal``, meant to be overridden.
    """
    if name in ("ideal", "custom"):
        return ExperimentConfig(preset=name)
    if name == "measured":
        e = MEASURED_EFFICIENCY
        eff = Efficiencies(
            d1=e, d2=e, d3=e, d4=e,
            ancilla_herald=SOURCE_HERALD_EFFICIENCY,
            direct_herald=SOURCE_HERALD_EFFICIENCY,
            out_h=e, out_v=e, out_f=e, out_e=e,
        )
        return ExperimentConfig(efficiencies=eff, xi_ha=0.97, xi_es=0.99, preset="measured")
    raise ConfigError(f"unknown preset {name!r}")


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)
