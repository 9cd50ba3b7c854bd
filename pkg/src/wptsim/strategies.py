"""Transmitter strategies: uniform power, scaled matched filter, selection.

UP spreads the budget evenly over antennas and tones with real weights and
needs no channel knowledge.  SMF matches the per-tone channel direction and
scales tone magnitudes by ||h_n||^beta, so larger beta concentrates power on
the strong tones; with a single tone it reduces to maximum ratio
transmission regardless of beta.  Codeword selection is a plain argmax over
dc readings with a lowest-index tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DegenerateChannelError, DomainError
from .waveform import ToneGrid, WaveformWeights


@dataclass(frozen=True)
class SmfParams:
    """Scaled-matched-filter knobs: magnitude exponent and power budget."""

    beta: float = 3.0
    power_budget: float = 1.0

    def __post_init__(self):
        if self.beta < 1:
            raise DomainError(f"beta must be >= 1, got {self.beta}")
        if not self.power_budget > 0:
            raise DomainError("power_budget must be > 0")


def up_weights(m_antennas: int, grid: ToneGrid, power: float) -> WaveformWeights:
    """Open-loop uniform allocation: every weight sqrt(2P/(M*N)), real."""
    if m_antennas < 1:
        raise DomainError(f"m_antennas must be >= 1, got {m_antennas}")
    if not power > 0:
        raise DomainError(f"power must be > 0, got {power}")
    n = grid.n_tones
    w = np.full((m_antennas, n), np.sqrt(2.0 * power / (m_antennas * n)),
                dtype=complex)
    return WaveformWeights(m_antennas=m_antennas, n_tones=n, weights=w,
                           power_budget=power)


def smf_weights(channel: ChannelRealization, params: SmfParams) -> WaveformWeights:
    """Scaled matched filter: s_n = c * ||h_n||^beta * h_n^H / ||h_n||.

    The scale c = sqrt(2P / sum_n ||h_n||^(2*beta)) meets the power budget
    with equality.  Tones with zero channel norm get zero weight; a channel
    that is zero on every tone has no matched direction and raises.
    """
    h = channel.gains
    norms = np.linalg.norm(h, axis=0)
    if not np.any(norms > 0):
        raise DegenerateChannelError("channel is zero on every tone")
    c = np.sqrt(2.0 * params.power_budget / np.sum(norms ** (2.0 * params.beta)))
    # s_n = c * ||h_n||^(beta-1) * conj(h_n), with 0 weight on dead tones
    scale = np.zeros_like(norms)
    alive = norms > 0
    scale[alive] = c * norms[alive] ** (params.beta - 1.0)
    s = np.conj(h) * scale[None, :]
    # remove the last few ulps of constraint slack so equality holds exactly
    p_now = 0.5 * np.sum(np.abs(s) ** 2)
    s = s * np.sqrt(params.power_budget / p_now)
    return WaveformWeights(m_antennas=channel.m_antennas,
                           n_tones=channel.grid.n_tones, weights=s,
                           power_budget=params.power_budget)


def select_codeword(measurements) -> int:
    """1-based index of the largest reading; ties go to the lowest index."""
    arr = np.asarray(measurements, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DomainError("measurements must be a non-empty 1-D sequence")
    return int(np.argmax(arr)) + 1


def feedback_bits(k_codewords: int) -> int:
    """Bits needed to feed back a codeword index: ceil(log2 K), 0 for K=1."""
    if k_codewords < 1:
        raise DomainError(f"k_codewords must be >= 1, got {k_codewords}")
    return (k_codewords - 1).bit_length()
