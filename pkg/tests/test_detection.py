import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from channel_correction.detection import Detector, DetectorModel, HeraldPattern, herald, povm_elements
from channel_correction.fock import PureState, effect_weights, fock_basis
from channel_correction.optics import phase_shift

BELL = PureState(("a", "b"), {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)}, 2)


@pytest.mark.parametrize(
    "eff, n, expected",
    [(1.0, 2, 1.0), (0.5, 1, 0.5), (0.5, 2, 0.75), (0.5, 0, 0.0)],
)
def test_threshold_click(eff, n, expected):
    assert DetectorModel("threshold", eff).response("click", n) == pytest.approx(expected)


def test_pnr_binomial():
    m = DetectorModel("pnr", 0.6)
    assert m.response(1, 2) == pytest.approx(2 * 0.6 * 0.4)
    assert m.response(3, 2) == 0
    assert m.response("no_click", 2) == pytest.approx(0.16)


def test_invalid_model():
    with pytest.raises(ValueError):
        DetectorModel("bolometer")
    with pytest.raises(ValueError):
        DetectorModel("pnr", 1.5)


@settings(max_examples=40)
@given(st.sampled_from(["threshold", "pnr"]), st.floats(0, 1), st.integers(1, 6))
def test_povm_completeness(kind, eff, n_max):
    elements = povm_elements(DetectorModel(kind, eff), "a", n_max)
    for n in range(n_max + 1):
        assert sum(e.weight(n) for e in elements.values()) == pytest.approx(1.0)


def test_effect_weights_over_mode_group():
    state = PureState.vacuum(("a", "b"), 2)
    e = povm_elements(DetectorModel("pnr"), ("a", "b"), 2)[2]
    w = effect_weights(state, [e])
    expected = [float(sum(o) == 2) for o in fock_basis(2, 2)]
    np.testing.assert_allclose(w, expected)


def test_single_click_on_bell_collapses_partner():
    rho, p = herald(BELL, HeraldPattern({"D": "click"}), {"D": Detector(("a",))})
    assert p == pytest.approx(0.5)
    assert rho.labels == ("b",)
    assert rho.element((0,), (0,)) == pytest.approx(0.5)


def test_exclusive_on_vacuum_is_zero():
    vac = PureState.vacuum(("x", "y"), 2)
    _, p = herald(vac, HeraldPattern(exclusive=(("D1", "D2"),)), {"D1": Detector("x"), "D2": Detector("y")})
    assert p == 0


def test_exclusive_rejects_double_click():
    both = PureState.fock(("x", "y"), (1, 1), 2)
    _, p = herald(both, HeraldPattern(exclusive=(("D1", "D2"),)), {"D1": Detector("x"), "D2": Detector("y")})
    assert p == 0


def test_threshold_accepts_bunched_pnr_rejects():
    two = PureState.fock(("x", "y"), (2, 0), 2)
    pat = HeraldPattern(exclusive=(("D1", "D2"),))
    _, p_thr = herald(two, pat, {"D1": Detector("x"), "D2": Detector("y")})
    _, p_pnr = herald(two, pat, {"D1": Detector("x", DetectorModel("pnr")), "D2": Detector("y", DetectorModel("pnr"))})
    assert (p_thr, p_pnr) == (1.0, 0.0)


def test_pattern_validation():
    with pytest.raises(ValueError):
        HeraldPattern()
    with pytest.raises(ValueError):
        HeraldPattern({"A": "click"}, exclusive=(("A", "B"),))
    combined = HeraldPattern({"A": "click"}) & HeraldPattern(exclusive=(("B", "C"),))
    assert combined.ports == ("A", "B", "C")


def test_missing_detector():
    with pytest.raises(KeyError):
        herald(BELL, HeraldPattern({"D": "click"}), {})


def test_feedforward_applies_on_fired_port():
    # |1_x 0_y>|+> vs |0_x 1_y>|-> on mode z; correcting the y branch restores |+>
    amp = 0.5
    state = PureState(
        ("x", "y", "z"),
        {(1, 0, 0): amp, (1, 0, 1): amp, (0, 1, 0): amp, (0, 1, 1): -amp},
        2,
    )
    pat = HeraldPattern(exclusive=(("D1", "D2"),), feedforward={"D2": phase_shift(math.pi, "z")})
    rho, p = herald(state, pat, {"D1": Detector("x"), "D2": Detector("y")})
    assert p == pytest.approx(1.0)
    assert rho.element((0,), (1,)).real == pytest.approx(0.5)
    dense, p2 = herald(state.to_density(), pat, {"D1": Detector("x"), "D2": Detector("y")})
    np.testing.assert_allclose(dense.matrix, rho.matrix, atol=1e-14)
    assert p2 == pytest.approx(p)
