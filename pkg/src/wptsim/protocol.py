"""Closed-loop frame simulation: training sweep, feedback, WPT phase.

Each frame of length t_frame has two phases.  During training the
transmitter dwells t_s seconds on each of the K codewords while the
receiver measures the resulting dc level; the receiver then feeds back the
ceil(log2 K)-bit index of the best codeword over a lossy link.  The remaining
t_p = t_frame - K*t_s seconds are the WPT phase, transmitted with the
selected codeword if the feedback arrived, otherwise with a fallback: the
previous frame's applied codeword, or the uniform-power codeword on the
first frame (marker index 0).  The receiver harvests during both phases
and the report accounts each phase's energy separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .channel import ChannelRealization
from .errors import ConfigError, DimensionError, DomainError, ProtocolError
from .rectenna import (AdcConfig, DiodeMomentModel, dc_power_moment,
                       dc_power_table, measure_dc)
from .strategies import feedback_bits, select_codeword
from .waveform import WaveformWeights, effective_tones, received_rf_power

#: applied_index value meaning "open-loop uniform power fallback"
UP_FALLBACK = 0


@dataclass(frozen=True)
class FrameConfig:
    """Frame timing: per-codeword dwell, total length, codebook size."""

    k_codewords: int
    t_s: float = 0.010
    t_frame: float = 2.0

    def __post_init__(self):
        if self.k_codewords < 1:
            raise DomainError(f"k_codewords must be >= 1, got {self.k_codewords}")
        if not self.t_s > 0:
            raise ConfigError(f"t_s must be > 0, got {self.t_s}")
        if not self.k_codewords * self.t_s < self.t_frame:
            raise ConfigError(
                f"training K*t_s = {self.k_codewords * self.t_s} must be "
                f"strictly less than t_frame = {self.t_frame}")

    @property
    def t_training(self) -> float:
        """Training phase length K*t_s in seconds."""
        return self.k_codewords * self.t_s

    @property
    def t_p(self) -> float:
        """WPT phase length t_frame - K*t_s in seconds."""
        return self.t_frame - self.k_codewords * self.t_s

    @property
    def training_overhead(self) -> float:
        """Fraction of the frame spent sweeping the codebook."""
        return self.k_codewords * self.t_s / self.t_frame


@dataclass(frozen=True)
class LinkModel:
    """Feedback link: Bernoulli delivery, optional latency (< t_p)."""

    delivery_probability: float = 1.0
    latency: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.delivery_probability <= 1.0:
            raise DomainError("delivery_probability must be in [0, 1]")
        if self.latency < 0:
            raise DomainError(f"latency must be >= 0, got {self.latency}")


@dataclass(frozen=True)
class FeedbackMsg:
    """Index report: (k* - 1) in binary, most-significant bit first."""

    frame_id: int
    index_bits: str


@dataclass(frozen=True)
class FrameReport:
    """Everything observable about one frame."""

    frame_id: int
    measurements: tuple
    selected_index: int
    applied_index: int          # 1..K, or UP_FALLBACK (0)
    feedback_delivered: bool
    energy_training: float
    energy_wpt: float
    energy_total: float
    p_dc_wpt: float             # dc power during the WPT phase, watts
    p_rf_wpt: float             # received RF power during the WPT phase, watts


def encode_feedback(k_star: int, k_codewords: int,
                    frame_id: int = 0) -> FeedbackMsg:
    """Bit message for a selected index; length feedback_bits(K)."""
    if not 1 <= k_star <= k_codewords:
        raise DomainError(f"k_star {k_star} outside [1, {k_codewords}]")
    n_bits = feedback_bits(k_codewords)
    bits = format(k_star - 1, f"0{n_bits}b") if n_bits else ""
    return FeedbackMsg(frame_id=frame_id, index_bits=bits)


def decode_feedback(msg: FeedbackMsg, k_codewords: int) -> int:
    """Recover the 1-based index; wrong bit length is a protocol error."""
    n_bits = feedback_bits(k_codewords)
    if len(msg.index_bits) != n_bits:
        raise ProtocolError(
            f"expected {n_bits} bits for K={k_codewords}, "
            f"got {len(msg.index_bits)}")
    if n_bits == 0:
        return 1
    if any(b not in "01" for b in msg.index_bits):
        raise ProtocolError(f"non-binary feedback payload {msg.index_bits!r}")
    index = int(msg.index_bits, 2) + 1
    if index > k_codewords:
        raise ProtocolError(f"decoded index {index} outside [1, {k_codewords}]")
    return index


def _dc_power(rect_model, tones, grid) -> float:
    if isinstance(rect_model, DiodeMomentModel):
        return dc_power_moment(rect_model, tones, grid)
    return dc_power_table(rect_model, tones, grid)


def _codeword_dc(codebook: Codebook, channel: ChannelRealization,
                 rect_model) -> list[float]:
    if (codebook.m_antennas, codebook.n_tones) != \
            (channel.m_antennas, channel.grid.n_tones):
        raise DimensionError(
            f"codebook ({codebook.m_antennas}, {codebook.n_tones}) vs channel "
            f"({channel.m_antennas}, {channel.grid.n_tones})")
    return [_dc_power(rect_model, effective_tones(channel, e), channel.grid)
            for e in codebook.entries]


def run_training(codebook: Codebook, channel: ChannelRealization, rect_model,
                 adc: AdcConfig | None = None,
                 rng: np.random.Generator | None = None) -> list[float]:
    """Sweep the codebook on a constant channel and record the readings.

    With an AdcConfig the reading is the quantized voltage from measure_dc;
    with adc=None ("ideal" mode) it is the raw dc power in watts.
    """
    dcs = _codeword_dc(codebook, channel, rect_model)
    if adc is None:
        return dcs
    return [measure_dc(adc, p, rng)[1] for p in dcs]


def _applied_weights(codebook: Codebook, applied_index: int) -> WaveformWeights:
    if applied_index != UP_FALLBACK:
        return codebook.entries[applied_index - 1]
    first = codebook.entries[0]
    # UP magnitudes depend only on dimensions and budget, not the grid
    return WaveformWeights(
        m_antennas=first.m_antennas, n_tones=first.n_tones,
        weights=np.full((first.m_antennas, first.n_tones),
                        np.sqrt(2.0 * first.power_budget
                                / (first.m_antennas * first.n_tones)),
                        dtype=complex),
        power_budget=first.power_budget)


def run_frame(config: FrameConfig, codebook: Codebook,
              channel: ChannelRealization, rect_model,
              adc: AdcConfig | None, link: LinkModel,
              fallback_state: int | None, rng: np.random.Generator,
              frame_id: int = 0) -> FrameReport:
    """One closed-loop frame on a constant channel.

    Args:
        fallback_state: applied_index of the previous frame, or None on the
            first frame (then the fallback is the UP codeword, marker 0).

    Returns:
        FrameReport; energy_total is exactly energy_training + energy_wpt.
    """
    if config.k_codewords != codebook.k_codewords:
        raise ConfigError(
            f"config expects K={config.k_codewords}, codebook has "
            f"{codebook.k_codewords}")
    if link.latency >= config.t_p:
        raise ConfigError(
            f"feedback latency {link.latency} must be < t_p = {config.t_p}")
    dcs = _codeword_dc(codebook, channel, rect_model)
    if adc is None:
        measurements = list(dcs)
    else:
        measurements = [measure_dc(adc, p, rng)[1] for p in dcs]
    k_star = select_codeword(measurements)
    msg = encode_feedback(k_star, codebook.k_codewords, frame_id=frame_id)
    delivered = bool(rng.random() < link.delivery_probability)
    if delivered:
        applied = decode_feedback(msg, codebook.k_codewords)
    elif fallback_state is None:
        applied = UP_FALLBACK
    else:
        applied = fallback_state
    applied_w = _applied_weights(codebook, applied)
    tones = effective_tones(channel, applied_w)
    p_dc = _dc_power(rect_model, tones, channel.grid)
    p_rf = received_rf_power(tones)
    e_train = float(sum(dcs)) * config.t_s
    e_wpt = p_dc * config.t_p
    return FrameReport(frame_id=frame_id, measurements=tuple(measurements),
                       selected_index=k_star, applied_index=applied,
                       feedback_delivered=delivered,
                       energy_training=e_train, energy_wpt=e_wpt,
                       energy_total=e_train + e_wpt,
                       p_dc_wpt=p_dc, p_rf_wpt=p_rf)


def run_session(config: FrameConfig, codebook: Codebook, channel_source,
                rect_model, adc: AdcConfig | None, link,
                n_frames: int, rng: np.random.Generator) -> list[FrameReport]:
    """n_frames closed-loop frames with the fallback state threaded through.

    Args:
        channel_source: a ChannelRealization used for every frame, or a
            callable frame_index -> ChannelRealization for evolving fades.
        link: one LinkModel for all frames, or a sequence of per-frame
            LinkModels (scripted loss patterns).
    """
    if n_frames < 1:
        raise DomainError(f"n_frames must be >= 1, got {n_frames}")
    reports = []
    fallback: int | None = None
    for i in range(n_frames):
        ch = channel_source(i) if callable(channel_source) else channel_source
        frame_link = link[i] if isinstance(link, (list, tuple)) else link
        report = run_frame(config, codebook, ch, rect_model, adc, frame_link,
                           fallback_state=fallback, rng=rng, frame_id=i)
        reports.append(report)
        fallback = report.applied_index
    return reports
