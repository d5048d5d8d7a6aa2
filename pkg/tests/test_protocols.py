import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from channel_correction.analytics import QubitSpec, biased_output, concurrence, extract_subspace, ha_output, loss_output
from channel_correction.config import Efficiencies, ExperimentConfig, preset
from channel_correction.detection import DetectorModel
from channel_correction.fock import PureState, tensor
from channel_correction.optics import SourceSpec, apply_loss
from channel_correction.rates import operation_rates
from channel_correction.protocols import (
    AmplifierSpec,
    TruncationError,
    biased_corrected_channel,
    corrected_channel,
    direct_concurrence,
    direct_transmission,
    entanglement_swap,
    heralded_amplifier,
)

PNR = DetectorModel("pnr", 1.0)


def qubit(alpha, beta, mode="e", n_max=2):
    return PureState((mode,), {(0,): alpha, (1,): beta}, n_max)


def amplified(alpha, t, g, **kw):
    q = QubitSpec.from_alpha(alpha)
    rho = apply_loss(qubit(q.alpha, q.beta).to_density(), t, "e")
    out, p = heralded_amplifier(rho, AmplifierSpec.from_gain(g, **kw))
    return out, p


def test_amplifier_spec():
    s = AmplifierSpec.from_gain(2.0)
    assert s.eta == pytest.approx(0.2)
    assert s.gain_squared == pytest.approx(4.0)
    with pytest.raises(ValueError):
        AmplifierSpec(0.0)


def test_scissors_on_fock_inputs_brute_force():
    # eta = 1/2, lossless: both |0> and |1> succeed with probability 1/2
    for occ in ((1.0, 0.0), (0.0, 1.0)):
        _, p = heralded_amplifier(qubit(*occ), AmplifierSpec(0.5))
        assert p == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("eta, delivery, eff", [(0.3, 0.8, 0.9), (0.5, 1.0, 1.0), (0.1, 0.5, 0.7)])
def test_scissors_vacuum_input(eta, delivery, eff):
    rho, p = heralded_amplifier(qubit(1.0, 0.0), AmplifierSpec(eta, delivery, DetectorModel("pnr", eff)))
    assert p == pytest.approx(eta * delivery * eff, abs=1e-14)
    assert rho.normalized().element((0,), (0,)) == pytest.approx(1.0)


def test_scissors_example_point():
    rho, p = amplified(1 / math.sqrt(2), 0.5, 2.0)
    ref, p_ref = ha_output(QubitSpec.from_alpha(1 / math.sqrt(2)), 0.5, 2.0)
    np.testing.assert_allclose(rho.normalized().matrix[:2, :2], ref, atol=1e-12)
    assert p == pytest.approx(p_ref, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.3, 8))
def test_scissors_matches_closed_form(alpha, t, g):
    rho, p = amplified(alpha, t, g)
    ref, p_ref = ha_output(QubitSpec.from_alpha(alpha), t, g)
    np.testing.assert_allclose(rho.normalized().matrix[:2, :2], ref, atol=1e-10)
    assert p == pytest.approx(p_ref, abs=1e-12)


def test_unit_gain_reduces_to_loss():
    q = QubitSpec.from_alpha(0.6)
    rho, _ = amplified(0.6, 0.4, 1.0)
    np.testing.assert_allclose(rho.normalized().matrix[:2, :2], loss_output(q, 0.4), atol=1e-12)


def test_scissors_rejects_clashing_modes():
    with pytest.raises(ValueError):
        heralded_amplifier(qubit(1.0, 0.0, mode="v"), AmplifierSpec(0.5), input_mode="v")


def test_scissors_carries_spectator_modes():
    bell = PureState(("f", "e"), {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)}, 2)
    rho, p = heralded_amplifier(bell, AmplifierSpec(0.5, detector=PNR))
    assert rho.labels == ("f", "v")
    assert concurrence(extract_subspace(rho)) == pytest.approx(1.0)
    assert p == pytest.approx(0.5)


def _bell(m1, m2):
    return PureState((m1, m2), {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)}, 2)


def test_swap_ideal_bell_pairs():
    state = tensor(_bell("h", "g"), _bell("f", "y"), 4)
    rho, p = entanglement_swap(state, "g", "f", PNR, output_mode="y")
    assert rho.labels == ("h", "y")
    assert p == pytest.approx(0.5)
    assert concurrence(extract_subspace(rho)) == pytest.approx(1.0, abs=1e-12)


def test_swap_without_feedforward_averages_out():
    state = tensor(_bell("h", "g"), _bell("f", "y"), 4)
    rho, _ = entanglement_swap(state, "g", "f", PNR)
    assert concurrence(extract_subspace(rho)) == pytest.approx(0.0, abs=1e-12)


def test_swap_vacuum_input():
    vac = PureState.vacuum(("g", "f"), 2)
    _, p = entanglement_swap(vac, "g", "f", PNR)
    assert p == 0


def test_threshold_swap_admits_double_occupancy():
    base = preset("ideal").with_(loss=0.0, eta=0.5)
    thr = corrected_channel(base)
    pnr = corrected_channel(base.with_(swap_detector="pnr"))
    assert thr.p_state_sent > pnr.p_state_sent
    assert thr.subspace.p11 > pnr.subspace.p11


def test_direct_ideal_photon_concurrence_is_sqrt_t():
    cfg = preset("ideal").with_(source=SourceSpec(deterministic=True))
    for loss in (0.0, 0.5, 0.9884):
        assert direct_concurrence(cfg.with_(loss=loss)) == pytest.approx(math.sqrt(1 - loss), abs=1e-12)


def test_direct_herald_weight():
    rho = direct_transmission(preset("measured"))
    assert rho.trace_weight == pytest.approx(0.8 * 0.00123, rel=2e-3)


def test_corrected_channel_lossless_deterministic_is_bell():
    ideal = SourceSpec(deterministic=True)
    cfg = ExperimentConfig(loss=0.0, eta=0.5, source=ideal, ancilla_source=ideal, swap_detector="pnr", amplifier_detector="pnr")
    res = corrected_channel(cfg)
    assert res.concurrence == pytest.approx(1.0, abs=1e-12)
    assert res.p_state_sent <= res.p_channel_ready


def test_pipeline_state_is_physical():
    res = corrected_channel(preset("measured"))
    res.rho_hv.check()
    assert res.subspace.off_block < 1e-12
    assert 0 <= res.concurrence <= 1


def test_truncation_guard():
    with pytest.raises(TruncationError):
        corrected_channel(preset("ideal").with_(nmax=3))


def test_biased_channel_fock_path_matches_closed_form():
    for eps, t in ((0.5, 0.3), (0.05, 0.1), (0.2, 0.9)):
        rho = biased_corrected_channel(eps, t)
        m = extract_subspace(rho)
        ref = biased_output(eps, t)
        assert (m.p00, m.p01, m.p10, m.p11, abs(m.d)) == pytest.approx(
            (ref.p00, ref.p01, ref.p10, ref.p11, ref.d), abs=1e-12
        )


def test_zero_efficiency_gives_zero_rates():
    cfg = preset("ideal").with_(efficiencies=Efficiencies.uniform(0.0))
    res = corrected_channel(cfg)
    assert res.p_channel_ready == 0 and res.p_state_sent == 0


def test_pnr_swap_halves_operation_rate_relative_to_direct():
    # with photon-number resolution the swap rejects bunched events, so on
    # average every other prepared channel fails to send a state
    cfg = preset("ideal").with_(loss=0.9884, eta=0.5, swap_detector="pnr")
    assert operation_rates(cfg).operation_rate_ratio == pytest.approx(0.5, rel=0.02)


def test_threshold_pnr_acceptance_ratio_high_loss():
    # f and g each hold the photon with probability 1/2: PNR keeps the
    # single-photon events (1/2), threshold also the bunched ones (1/4)
    cfg = preset("ideal").with_(loss=0.9884, eta=0.5)
    ratio = corrected_channel(cfg.with_(swap_detector="pnr")).p_state_sent / corrected_channel(cfg).p_state_sent
    assert ratio == pytest.approx(2 / 3, rel=0.01)
