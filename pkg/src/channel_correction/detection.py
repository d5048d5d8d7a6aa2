"""Detector POVMs and heralding.

Detectors are destructive: after heralding, the detected modes are traced out
and the returned state is sub-normalized with trace equal to the herald
probability. Dark counts are not modelled.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from math import comb
from typing import Literal, Union

import numpy as np

from .fock import (
    DensityOperator,
    ModeRegister,
    ModeUnitary,
    PovmElement,
    PureState,
    State,
    apply_unitary,
    basis_index,
    effect_weights,
    partial_trace,
)

Outcome = Union[Literal["click", "no_click"], int]


@dataclass(frozen=True)
class DetectorModel:
    kind: Literal["threshold", "pnr"] = "threshold"
    efficiency: float = 1.0

    def __post_init__(self):
        if self.kind not in ("threshold", "pnr"):
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency}")

    def response(self, outcome: Outcome, n: int) -> float:
        """P(outcome | n photons arrive)."""
        eff = self.efficiency
        dark = (1.0 - eff) ** n
        if outcome == "no_click":
            return dark
        if outcome == "click":
            return 1.0 - dark
        if self.kind == "threshold":
            raise ValueError("threshold detectors only report 'click' or 'no_click'")
        k = int(outcome)
        if k < 0 or k > n:
            return 0.0
        return comb(n, k) * eff**k * (1.0 - eff) ** (n - k)

    @property
    def single_event(self) -> Outcome:
        """The outcome read as "one detection event" by this kind of detector."""
        return "click" if self.kind == "threshold" else 1


@dataclass(frozen=True)
class Detector:
    """A physical detector port covering one or more modes."""

    modes: tuple[str, ...]
    model: DetectorModel = DetectorModel()

    def __post_init__(self):
        modes = (self.modes,) if isinstance(self.modes, str) else tuple(self.modes)
        object.__setattr__(self, "modes", modes)


def povm_elements(model: DetectorModel, modes, n_max: int) -> dict[Outcome, PovmElement]:
    """Complete POVM of a detector up to ``n_max`` photons."""
    modes = (modes,) if isinstance(modes, str) else tuple(modes)
    outcomes: list[Outcome] = ["no_click", "click"] if model.kind == "threshold" else list(range(n_max + 1))
    return {
        o: PovmElement(modes, (lambda n, o=o: model.response(o, n)), name=f"{model.kind}:{o}") for o in outcomes
    }


@dataclass(frozen=True)
class HeraldPattern:
    """Required detector outcomes.

    ``required`` maps port name to an outcome. Each tuple in ``exclusive`` is a
    "one and only one" group: exactly one port registers a single detection
    event and the others stay dark. ``feedforward`` maps a port to a mode
    transformation applied to the kept modes whenever that port is the one that
    fired in its group.
    """

    required: Mapping[str, Outcome] = field(default_factory=dict)
    exclusive: tuple[tuple[str, ...], ...] = ()
    feedforward: Mapping[str, ModeUnitary] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "exclusive", tuple(tuple(g) for g in self.exclusive))
        if not self.required and not self.exclusive:
            raise ValueError("empty herald pattern")
        seen = set(self.required)
        for group in self.exclusive:
            if not group:
                raise ValueError("empty exclusive group")
            if seen & set(group):
                raise ValueError(f"port reused across herald groups: {sorted(seen & set(group))}")
            seen |= set(group)

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(self.required) + tuple(p for g in self.exclusive for p in g)

    def __and__(self, other: HeraldPattern) -> HeraldPattern:
        return HeraldPattern(
            {**self.required, **other.required},
            self.exclusive + other.exclusive,
            {**self.feedforward, **other.feedforward},
        )


def _resolve(detectors: Mapping[str, Detector | DetectorModel], pattern: HeraldPattern) -> dict[str, Detector]:
    out = {}
    for port in pattern.ports:
        if port not in detectors:
            raise KeyError(f"no detector for port {port!r}")
        d = detectors[port]
        out[port] = d if isinstance(d, Detector) else Detector((port,), d)
    return out


def _branches(pattern: HeraldPattern, dets: dict[str, Detector]):
    """Yield (effects, fired ports) for every mutually exclusive way the pattern can occur."""
    fixed = [
        PovmElement(dets[p].modes, (lambda n, d=dets[p], o=o: d.model.response(o, n)), name=f"{p}:{o}")
        for p, o in pattern.required.items()
    ]
    choices = []
    for group in pattern.exclusive:
        options = []
        for fired in group:
            effects = []
            for p in group:
                o = dets[p].model.single_event if p == fired else "no_click"
                effects.append(PovmElement(dets[p].modes, (lambda n, d=dets[p], o=o: d.model.response(o, n)), name=f"{p}:{o}"))
            options.append((effects, fired))
        choices.append(options)
    for combo in itertools.product(*choices):
        effects = list(fixed)
        fired = []
        for eff, port in combo:
            effects.extend(eff)
            fired.append(port)
        yield effects, fired


def herald(
    state: State,
    pattern: HeraldPattern,
    detectors: Mapping[str, Detector | DetectorModel],
    keep: Sequence[str] | None = None,
) -> tuple[DensityOperator, float]:
    """Condition ``state`` on ``pattern``.

    Detected modes are traced out, as are any other modes not listed in
    ``keep`` (default: every undetected mode). Returns the sub-normalized
    conditional state on ``keep`` and its trace, the herald probability.
    """
    dets = _resolve(detectors, pattern)
    detected = {m for d in dets.values() for m in d.modes}
    missing = detected - set(state.register.labels)
    if missing:
        raise KeyError(f"detected modes not in state: {sorted(missing)}")
    if keep is None:
        keep = [m for m in state.register.labels if m not in detected]
    keep = [m for m in state.register.labels if m in set(keep)]
    if detected & set(keep):
        raise ValueError("cannot keep a detected mode")

    branches = list(_branches(pattern, dets))
    if isinstance(state, PureState):
        result = _herald_pure(state, branches, pattern, keep)
    else:
        result = _herald_dense(state, branches, pattern, keep)
    return result, result.trace_weight


def _feedforward(rho: DensityOperator, pattern: HeraldPattern, fired: Sequence[str]) -> DensityOperator:
    for port in fired:
        u = pattern.feedforward.get(port)
        if u is not None and all(m in rho.register for m in u.modes):
            rho = apply_unitary(rho, u)
    return rho


def _herald_dense(rho, branches, pattern, keep) -> DensityOperator:
    total = None
    for effects, fired in branches:
        s = np.sqrt(effect_weights(rho, effects))
        cond = DensityOperator(rho.register, s[:, None] * rho.matrix * s[None, :], rho.n_max)
        cond = _feedforward(partial_trace(cond, keep), pattern, fired)
        total = cond if total is None else DensityOperator(total.register, total.matrix + cond.matrix, total.n_max)
    return total


def _herald_pure(state: PureState, branches, pattern, keep) -> DensityOperator:
    reg = state.register
    kept = reg.positions(keep)
    others = tuple(i for i in range(len(reg)) if i not in set(kept))
    kept_idx = basis_index(len(kept), state.n_max)
    rows: dict[tuple, int] = {}
    entries_r, entries_c, entries_v = [], [], []
    for occ, amp in state.amplitudes.items():
        key = tuple(occ[i] for i in others)
        r = rows.setdefault(key, len(rows))
        entries_r.append(r)
        entries_c.append(kept_idx[tuple(occ[i] for i in kept)])
        entries_v.append(amp)
    vecs = np.zeros((len(rows), len(kept_idx)), dtype=complex)
    np.add.at(vecs, (np.array(entries_r, dtype=int), np.array(entries_c, dtype=int)), np.array(entries_v))
    keys = list(rows)
    out_reg = ModeRegister(tuple(keep))
    total = np.zeros((len(kept_idx), len(kept_idx)), dtype=complex)
    other_labels = [reg.labels[i] for i in others]
    for effects, fired in branches:
        w = np.ones(len(keys))
        for e in effects:
            pos = [other_labels.index(m) for m in e.modes]
            table = [e.weight(n) for n in range(state.n_max + 1)]
            w *= np.array([table[sum(k[p] for p in pos)] for k in keys])
        nz = w > 0
        if not nz.any():
            continue
        v = vecs[nz]
        cond = (v.T * w[nz]) @ v.conj()
        rho = _feedforward(DensityOperator(out_reg, cond, state.n_max), pattern, fired)
        total += rho.matrix
    return DensityOperator(out_reg, total, state.n_max)
