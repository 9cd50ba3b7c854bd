"""Frame protocol: timing, feedback encoding, fallback, energy accounting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wptsim import (AdcConfig, ConfigError, DiodeMomentModel, DomainError,
                    FeedbackMsg, FrameConfig, LinkModel, ProtocolError,
                    ToneGrid, UP_FALLBACK, decode_feedback, dc_power_moment,
                    effective_tones, encode_feedback, gen_nested, gen_random,
                    run_frame, run_session, run_training, stream, up_weights)

from conftest import make_channel


# ---------------------------------------------------------------------------
# frame timing

def test_frame_config_split_is_exact():
    cfg = FrameConfig(k_codewords=8, t_s=0.010, t_frame=2.0)
    assert cfg.t_training == 0.08
    assert cfg.t_p == 1.92           # exact in binary floating point
    assert cfg.t_training + cfg.t_p == cfg.t_frame


def test_frame_config_rejects_training_overrun():
    with pytest.raises(ConfigError):
        FrameConfig(k_codewords=200, t_s=0.010, t_frame=2.0)
    with pytest.raises(ConfigError):
        FrameConfig(k_codewords=200, t_s=0.010, t_frame=2.0 - 1e-12)


def test_frame_config_training_overhead():
    cfg = FrameConfig(k_codewords=8, t_s=0.010, t_frame=2.0)
    assert cfg.training_overhead == pytest.approx(0.04, rel=1e-12)


def test_link_model_domain():
    with pytest.raises(DomainError):
        LinkModel(delivery_probability=1.5)
    with pytest.raises(DomainError):
        LinkModel(delivery_probability=-0.1)
    with pytest.raises(DomainError):
        LinkModel(delivery_probability=0.5, latency=-1.0)


# ---------------------------------------------------------------------------
# feedback encoding

@given(st.integers(min_value=0, max_value=6))
@settings(max_examples=7)
def test_feedback_round_trip_all_indices(log2k):
    k = 2 ** log2k
    for k_star in range(1, k + 1):
        msg = encode_feedback(k_star, k)
        assert len(msg.index_bits) == log2k
        assert decode_feedback(msg, k) == k_star


def test_feedback_k1_empty_payload():
    msg = encode_feedback(1, 1)
    assert msg.index_bits == ""
    assert decode_feedback(msg, 1) == 1


def test_feedback_msb_first():
    assert encode_feedback(5, 8).index_bits == "100"   # index 4 as 3 bits


def test_encode_rejects_out_of_range():
    with pytest.raises(DomainError):
        encode_feedback(0, 8)
    with pytest.raises(DomainError):
        encode_feedback(9, 8)


def test_decode_rejects_wrong_length():
    with pytest.raises(ProtocolError):
        decode_feedback(FeedbackMsg(frame_id=0, index_bits="10"), 8)


def test_decode_rejects_non_binary():
    with pytest.raises(ProtocolError):
        decode_feedback(FeedbackMsg(frame_id=0, index_bits="1x0"), 8)


def test_decode_rejects_overflow_index():
    # K=5 needs 3 bits but only indices 1..5 are valid
    with pytest.raises(ProtocolError):
        decode_feedback(FeedbackMsg(frame_id=0, index_bits="111"), 5)


# ---------------------------------------------------------------------------
# training sweep and frame execution

def _setup(k=4, m=2, n=2, seed=20):
    grid = ToneGrid.centered(2.4e9, 10e6, n)
    book = gen_nested(m, grid, 1.0, k, stream(seed, 4))
    ch = make_channel(seed, m, grid, pathloss_db=10.0)
    model = DiodeMomentModel()
    return grid, book, ch, model


def test_run_training_ideal_returns_raw_dc():
    grid, book, ch, model = _setup()
    readings = run_training(book, ch, model)
    assert len(readings) == 4
    for e, r in zip(book.entries, readings):
        expected = dc_power_moment(model, effective_tones(ch, e), grid)
        assert r == pytest.approx(expected, rel=1e-12)


def test_run_training_adc_quantizes():
    _, book, ch, model = _setup()
    adc = AdcConfig()
    readings = run_training(book, ch, model, adc=adc)
    step = 3.3 / 4095
    for r in readings:
        assert r == pytest.approx(round(r / step) * step, abs=1e-12)


def test_run_frame_energy_accounting():
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    link = LinkModel(delivery_probability=1.0)
    report = run_frame(cfg, book, ch, model, None, link, None, stream(21, 6))
    raw = run_training(book, ch, model)
    assert report.energy_training == pytest.approx(sum(raw) * 0.010,
                                                   rel=1e-12)
    assert report.energy_wpt == pytest.approx(report.p_dc_wpt * cfg.t_p,
                                              rel=1e-12)
    assert report.energy_total == report.energy_training + report.energy_wpt
    assert report.selected_index == int(np.argmax(raw)) + 1
    assert report.applied_index == report.selected_index
    assert report.feedback_delivered


def test_run_frame_applies_best_codeword_dc():
    grid, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    link = LinkModel(delivery_probability=1.0)
    report = run_frame(cfg, book, ch, model, None, link, None, stream(22, 6))
    best = max(dc_power_moment(model, effective_tones(ch, e), grid)
               for e in book.entries)
    assert report.p_dc_wpt == pytest.approx(best, rel=1e-12)


def test_run_frame_lost_feedback_first_frame_applies_uniform():
    grid, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    lost = LinkModel(delivery_probability=0.0)
    report = run_frame(cfg, book, ch, model, None, lost, None, stream(23, 6))
    assert not report.feedback_delivered
    assert report.applied_index == UP_FALLBACK
    up = up_weights(2, grid, 1.0)
    expected = dc_power_moment(model, effective_tones(ch, up), grid)
    assert report.p_dc_wpt == pytest.approx(expected, rel=1e-12)


def test_run_frame_lost_feedback_keeps_previous_applied():
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    lost = LinkModel(delivery_probability=0.0)
    report = run_frame(cfg, book, ch, model, None, lost, 3, stream(24, 6))
    assert report.applied_index == 3


def test_run_frame_rejects_k_mismatch():
    _, book, ch, model = _setup(k=4)
    cfg = FrameConfig(k_codewords=8, t_s=0.010, t_frame=2.0)
    with pytest.raises(ConfigError):
        run_frame(cfg, book, ch, model, None, LinkModel(), None,
                  stream(25, 6))


def test_run_frame_rejects_latency_beyond_wpt_phase():
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    slow = LinkModel(delivery_probability=1.0, latency=cfg.t_p)
    with pytest.raises(ConfigError):
        run_frame(cfg, book, ch, model, None, slow, None, stream(26, 6))


def test_run_session_threads_fallback_state():
    # scripted link: deliver on frame 0, lose afterwards; the applied index
    # carried into later frames must be frame 0's decoded selection
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    links = [LinkModel(delivery_probability=1.0),
             LinkModel(delivery_probability=0.0),
             LinkModel(delivery_probability=0.0)]
    reports = run_session(cfg, book, ch, model, None, links, 3, stream(27, 6))
    assert reports[0].feedback_delivered
    first_applied = reports[0].applied_index
    assert first_applied >= 1
    assert reports[1].applied_index == first_applied
    assert reports[2].applied_index == first_applied


def test_run_session_all_lost_stays_uniform():
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    lost = LinkModel(delivery_probability=0.0)
    reports = run_session(cfg, book, ch, model, None, lost, 4, stream(28, 6))
    assert [r.applied_index for r in reports] == [UP_FALLBACK] * 4


def test_run_session_callable_channel_source():
    grid, book, _, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    seen = []

    def source(i):
        seen.append(i)
        return make_channel(40 + i, 2, grid, pathloss_db=10.0)

    reports = run_session(cfg, book, source, model, None, LinkModel(), 3,
                          stream(29, 6))
    assert seen == [0, 1, 2]
    assert [r.frame_id for r in reports] == [0, 1, 2]


def test_run_session_rejects_zero_frames():
    _, book, ch, model = _setup()
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    with pytest.raises(DomainError):
        run_session(cfg, book, ch, model, None, LinkModel(), 0, stream(30, 6))


def test_adc_selection_can_differ_from_ideal_but_stays_valid():
    _, book, ch, model = _setup(k=8, seed=31)
    cfg = FrameConfig(k_codewords=8, t_s=0.010, t_frame=2.0)
    adc = AdcConfig()
    report = run_frame(cfg, book, ch, model, adc, LinkModel(), None,
                       stream(31, 6))
    assert 1 <= report.selected_index <= 8
    assert len(report.measurements) == 8


def test_measurements_are_reported_per_codeword():
    _, book, ch, model = _setup(k=4)
    cfg = FrameConfig(k_codewords=4, t_s=0.010, t_frame=2.0)
    report = run_frame(cfg, book, ch, model, None, LinkModel(), None,
                       stream(32, 6))
    assert len(report.measurements) == 4
    assert report.measurements[report.selected_index - 1] == \
        max(report.measurements)
