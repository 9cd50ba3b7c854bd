"""Waveform synthesis, moments, and PAPR against independent references."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wptsim import (ChannelRealization, DimensionError, DomainError,
                    EffectiveTones, ToneGrid, WaveformWeights, ZeroWaveformError,
                    effective_tones, moments_by_averaging, papr,
                    received_rf_power, rf_power_by_averaging, stream,
                    synthesize_transmit_waveform, waveform_moments)
from wptsim.timedomain import received_waveform, sample_times

from conftest import make_channel, random_weights


# ---------------------------------------------------------------------------
# tone grid

def test_centered_grid_tone_spacing():
    grid = ToneGrid.centered(2.4e9, 10e6, 8)
    f = grid.frequencies_hz
    assert len(f) == 8
    assert np.allclose(np.diff(f), 10e6 / 8)
    # tones straddle the carrier symmetrically
    assert abs(np.mean(f) - 2.4e9) < 1e-3


def test_single_tone_grid_sits_on_carrier():
    grid = ToneGrid.centered(2.4e9, 10e6, 1)
    assert grid.frequencies_hz[0] == pytest.approx(2.4e9, rel=1e-15)


def test_grid_delta_f():
    grid = ToneGrid.centered(2.4e9, 10e6, 4)
    assert grid.delta_f == pytest.approx(2.5e6, rel=1e-15)


def test_grid_rejects_nonuniform_spacing():
    w = 2 * np.pi * np.array([1e9, 1.1e9, 1.3e9])
    with pytest.raises(DomainError):
        ToneGrid(n_tones=3, center_frequency_hz=1.1e9, bandwidth_hz=0.3e9,
                 angular_frequencies=w)


def test_grid_rejects_decreasing_frequencies():
    w = 2 * np.pi * np.array([1.2e9, 1.1e9])
    with pytest.raises(DomainError):
        ToneGrid(n_tones=2, center_frequency_hz=1.15e9, bandwidth_hz=0.2e9,
                 angular_frequencies=w)


def test_default_grids_are_commensurate():
    for n in range(1, 9):
        assert ToneGrid.centered(2.4e9, 10e6, n).is_commensurate()


def test_incommensurate_grid_detected():
    # carrier not a half-multiple of the tone spacing
    grid = ToneGrid.centered(2.4e9 + 137.0, 10e6, 4)
    assert not grid.is_commensurate()


# ---------------------------------------------------------------------------
# weights container

def test_weights_reject_over_budget():
    w = np.full((1, 1), 2.0, dtype=complex)   # (1/2)*4 = 2 > 1
    with pytest.raises(DomainError):
        WaveformWeights(m_antennas=1, n_tones=1, weights=w, power_budget=1.0)


def test_weights_reject_shape_mismatch():
    with pytest.raises(DimensionError):
        WaveformWeights(m_antennas=2, n_tones=3,
                        weights=np.zeros((3, 2), dtype=complex),
                        power_budget=1.0)


def test_transmit_power_is_half_norm_squared():
    gen = stream(1, 99)
    w = random_weights(gen, 3, 4, 2.0)
    assert w.transmit_power == pytest.approx(
        0.5 * np.sum(np.abs(w.weights) ** 2), rel=1e-15)


# ---------------------------------------------------------------------------
# synthesis

def test_synthesis_matches_manual_cosine_sum():
    grid = ToneGrid.centered(2.4e9, 10e6, 3)
    gen = stream(2, 99)
    weights = random_weights(gen, 2, 3, 1.5)
    t = sample_times(grid, oversampling=8)[:64]
    x = synthesize_transmit_waveform(weights, grid, antenna_index=2, time_points=t)
    manual = np.zeros_like(t)
    for n in range(3):
        s = weights.weights[1, n]
        manual += np.abs(s) * np.cos(grid.angular_frequencies[n] * t
                                     + np.angle(s))
    assert np.allclose(x, manual, atol=1e-12)


def test_synthesis_antenna_index_is_one_based():
    grid = ToneGrid.centered(2.4e9, 10e6, 1)
    gen = stream(3, 99)
    weights = random_weights(gen, 2, 1, 1.0)
    t = np.zeros(1)
    with pytest.raises(DomainError):
        synthesize_transmit_waveform(weights, grid, antenna_index=0,
                                     time_points=t)
    with pytest.raises(DomainError):
        synthesize_transmit_waveform(weights, grid, antenna_index=3,
                                     time_points=t)


def test_effective_tones_is_channel_weight_inner_product():
    grid = ToneGrid.centered(2.4e9, 10e6, 2)
    ch = make_channel(5, 3, grid)
    gen = stream(5, 99)
    weights = random_weights(gen, 3, 2, 1.0)
    tones = effective_tones(ch, weights)
    manual = np.array([np.sum(ch.gains[:, n] * weights.weights[:, n])
                       for n in range(2)])
    assert np.allclose(tones.amplitudes, manual, rtol=1e-15)


def test_effective_tones_shape_mismatch():
    grid2 = ToneGrid.centered(2.4e9, 10e6, 2)
    grid3 = ToneGrid.centered(2.4e9, 10e6, 3)
    ch = make_channel(5, 2, grid2)
    gen = stream(5, 98)
    with pytest.raises(DimensionError):
        effective_tones(ch, random_weights(gen, 2, 3, 1.0))


# ---------------------------------------------------------------------------
# moments: frozen scalars, independent quadruple-sum oracle, time-domain oracle

def _tones(amps) -> EffectiveTones:
    a = np.asarray(amps, dtype=complex)
    return EffectiveTones(amplitudes=a)


def test_single_tone_moments_frozen():
    # |a| = sqrt(2): mean square 1, mean fourth power 1.5
    grid = ToneGrid.centered(2.4e9, 10e6, 1)
    m2, m4 = waveform_moments(_tones([np.sqrt(2.0)]), grid)
    assert m2 == pytest.approx(1.0, rel=1e-12)
    assert m4 == pytest.approx(1.5, rel=1e-12)


def test_single_tone_phase_invariance():
    grid = ToneGrid.centered(2.4e9, 10e6, 1)
    m2a, m4a = waveform_moments(_tones([np.sqrt(2.0)]), grid)
    m2b, m4b = waveform_moments(_tones([np.sqrt(2.0) * np.exp(0.7j)]), grid)
    assert m2a == pytest.approx(m2b, rel=1e-12)
    assert m4a == pytest.approx(m4b, rel=1e-12)


def _m4_quadruple_sum(a: np.ndarray) -> float:
    """Direct O(N^4) frequency-pairing sum, independent of the library."""
    n = len(a)
    total = 0.0
    for n1 in range(n):
        for n2 in range(n):
            for n3 in range(n):
                n4 = n1 + n2 - n3
                if 0 <= n4 < n:
                    total += (a[n1] * a[n2] * np.conj(a[n3])
                              * np.conj(a[n4])).real
    return 0.375 * total


@given(st.integers(min_value=0, max_value=10_000),
       st.integers(min_value=1, max_value=5))
@settings(max_examples=60)
def test_m4_matches_quadruple_sum(seed, n):
    grid = ToneGrid.centered(2.4e9, 10e6, n)
    gen = stream(seed, 7, n)
    a = gen.normal(size=n) + 1j * gen.normal(size=n)
    _, m4 = waveform_moments(_tones(a), grid)
    assert m4 == pytest.approx(_m4_quadruple_sum(a), rel=1e-10, abs=1e-30)


def test_rf_power_is_half_sum_of_squares():
    tones = _tones([1.0 + 1.0j, 2.0])
    assert received_rf_power(tones) == pytest.approx(3.0, rel=1e-15)


@given(st.integers(min_value=0, max_value=10_000),
       st.integers(min_value=1, max_value=8),
       st.integers(min_value=1, max_value=4))
@settings(max_examples=40)
def test_moments_match_time_domain_average(seed, n, m):
    grid = ToneGrid.centered(2.4e9, 10e6, n)
    ch = make_channel(seed, m, grid, pathloss_db=10.0)
    gen = stream(seed, 8)
    tones = effective_tones(ch, random_weights(gen, m, n, 2.0))
    m2, m4 = waveform_moments(tones, grid)
    ref2, ref4 = moments_by_averaging(tones, grid)
    assert m2 == pytest.approx(ref2, rel=1e-9)
    assert m4 == pytest.approx(ref4, rel=1e-9)


def test_rf_power_matches_time_domain_average():
    grid = ToneGrid.centered(2.4e9, 10e6, 4)
    ch = make_channel(11, 2, grid, pathloss_db=0.0)
    gen = stream(11, 8)
    tones = effective_tones(ch, random_weights(gen, 2, 4, 1.0))
    assert received_rf_power(tones) == pytest.approx(
        rf_power_by_averaging(tones, grid), rel=1e-9)


def test_time_domain_refuses_incommensurate_grid():
    grid = ToneGrid.centered(2.4e9 + 137.0, 10e6, 2)
    tones = _tones([1.0, 1.0])
    with pytest.raises(DomainError):
        moments_by_averaging(tones, grid)


def test_received_waveform_is_real_cosine_sum():
    grid = ToneGrid.centered(2.4e9, 10e6, 2)
    tones = _tones([1.0 + 0.5j, 0.25j])
    t = sample_times(grid, oversampling=8)[:16]
    y = received_waveform(tones, grid, t)
    manual = sum(np.abs(a) * np.cos(w * t + np.angle(a))
                 for a, w in zip(tones.amplitudes, grid.angular_frequencies))
    assert np.allclose(y, manual, atol=1e-12)


@given(st.integers(min_value=0, max_value=10_000),
       st.integers(min_value=1, max_value=8))
@settings(max_examples=40)
def test_moments_nonnegative(seed, n):
    grid = ToneGrid.centered(2.4e9, 10e6, n)
    gen = stream(seed, 9)
    a = gen.normal(size=n) + 1j * gen.normal(size=n)
    m2, m4 = waveform_moments(_tones(a), grid)
    assert m2 >= 0.0
    assert m4 >= 0.0


# ---------------------------------------------------------------------------
# PAPR

def test_papr_equal_inphase_tones_is_twice_n():
    for n in (1, 2, 4, 8):
        grid = ToneGrid.centered(2.4e9, 10e6, n)
        tones = _tones(np.full(n, np.sqrt(2.0)))
        assert papr(tones, grid) == pytest.approx(2.0 * n, rel=1e-9)


def test_papr_single_tone_is_two():
    grid = ToneGrid.centered(2.4e9, 10e6, 1)
    assert papr(_tones([3.7]), grid) == pytest.approx(2.0, rel=1e-9)


@given(st.integers(min_value=0, max_value=10_000),
       st.integers(min_value=1, max_value=8))
@settings(max_examples=30)
def test_papr_bounds(seed, n):
    grid = ToneGrid.centered(2.4e9, 10e6, n)
    gen = stream(seed, 10)
    a = gen.normal(size=n) + 1j * gen.normal(size=n)
    value = papr(_tones(a), grid)
    assert 1.0 - 1e-9 <= value <= 2.0 * n * (1.0 + 1e-9)


def test_papr_zero_waveform_rejected():
    grid = ToneGrid.centered(2.4e9, 10e6, 2)
    with pytest.raises(ZeroWaveformError):
        papr(_tones([0.0, 0.0]), grid)


def test_papr_needs_enough_oversampling():
    grid = ToneGrid.centered(2.4e9, 10e6, 2)
    with pytest.raises(DomainError):
        papr(_tones([1.0, 1.0]), grid, oversampling=4)
