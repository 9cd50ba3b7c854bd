"""Multi-sine signal core: tone grids, transmit weights, received tones.

A transmitter with M antennas radiates N sinusoids at uniformly spaced
angular frequencies w_1 < ... < w_N.  The complex weight s[m, n] fixes the
magnitude and phase of tone n on antenna m, so antenna m transmits

    x_m(t) = Re{ sum_n s[m, n] * exp(j w_n t) }.

After a linear channel with per-tone gains h[m, n] the receiver observes a
single multi-sine with effective amplitudes a_n = sum_m h[m, n] s[m, n], and
every power quantity of interest reduces to a closed form in the a_n:

    received RF power   P_RF = (1/2) sum_n |a_n|^2
    second moment       m2 = <y(t)^2> = (1/2) sum_n |a_n|^2
    fourth moment       m4 = <y(t)^4>
                           = (3/8) sum_{n1+n2=n3+n4} a_n1 a_n2 conj(a_n3) conj(a_n4)

The moment closed forms hold exactly when the time average runs over one
fundamental period 1/df of the uniformly spaced grid; see `timedomain` for
the brute-force counterpart used to cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, ZeroWaveformError

_REL_TOL = 1e-9


@dataclass(frozen=True)
class ToneGrid:
    """Uniformly spaced tone frequencies centered on a carrier.

    Attributes:
        n_tones: number of sinusoids N >= 1.
        center_frequency_hz: carrier the grid is centered on, Hz.
        bandwidth_hz: total occupied bandwidth B > 0, Hz; tone spacing is B/N.
        angular_frequencies: the N values w_n in rad/s, strictly increasing.
    """

    n_tones: int
    center_frequency_hz: float
    bandwidth_hz: float
    angular_frequencies: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_tones < 1:
            raise DomainError(f"n_tones must be >= 1, got {self.n_tones}")
        if not self.bandwidth_hz > 0:
            raise DomainError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if not self.center_frequency_hz > 0:
            raise DomainError("center_frequency_hz must be > 0")
        w = np.asarray(self.angular_frequencies, dtype=float)
        if w.shape != (self.n_tones,):
            raise DimensionError(
                f"angular_frequencies shape {w.shape} != ({self.n_tones},)")
        if self.n_tones > 1:
            gaps = np.diff(w)
            if np.any(gaps <= 0):
                raise DomainError("angular_frequencies must be strictly increasing")
            expected = 2.0 * np.pi * self.bandwidth_hz / self.n_tones
            if np.any(np.abs(gaps - expected) > _REL_TOL * expected):
                raise DomainError("tone spacing must equal 2*pi*B/N")
        w.flags.writeable = False
        object.__setattr__(self, "angular_frequencies", w)

    @classmethod
    def centered(cls, center_frequency_hz: float, bandwidth_hz: float,
                 n_tones: int) -> "ToneGrid":
        """Grid with spacing B/N whose mean frequency equals the carrier."""
        df = bandwidth_hz / n_tones
        offsets = np.arange(1, n_tones + 1) - (n_tones + 1) / 2.0
        freqs = center_frequency_hz + offsets * df
        return cls(n_tones=n_tones, center_frequency_hz=center_frequency_hz,
                   bandwidth_hz=bandwidth_hz,
                   angular_frequencies=2.0 * np.pi * freqs)

    @property
    def delta_f(self) -> float:
        """Tone spacing B/N in Hz; 1/delta_f is the fundamental period."""
        return self.bandwidth_hz / self.n_tones

    @property
    def frequencies_hz(self) -> np.ndarray:
        return self.angular_frequencies / (2.0 * np.pi)

    def is_commensurate(self, rel_tol: float = 1e-9) -> bool:
        """True when 2*f_c is an integer multiple of the tone spacing.

        Under this condition every spectral line of y(t)^2 and y(t)^4 falls
        on the delta_f lattice, so averaging over exactly one fundamental
        period is exact rather than approximate.  The defaults (2.4 GHz
        carrier, 10 MHz band) satisfy it for every N.
        """
        ratio = 2.0 * self.center_frequency_hz / self.delta_f
        return abs(ratio - round(ratio)) <= rel_tol * ratio


@dataclass(frozen=True)
class WaveformWeights:
    """Per-antenna, per-tone complex transmit weights under a power budget.

    The radiated power of the weight matrix is (1/2) * sum |s[m, n]|^2 and
    must not exceed power_budget (strategies allocate it with equality).
    """

    m_antennas: int
    n_tones: int
    weights: np.ndarray = field(repr=False)
    power_budget: float

    def __post_init__(self):
        if self.m_antennas < 1 or self.n_tones < 1:
            raise DomainError("m_antennas and n_tones must be >= 1")
        if not self.power_budget > 0:
            raise DomainError(f"power_budget must be > 0, got {self.power_budget}")
        s = np.asarray(self.weights, dtype=complex)
        if s.shape != (self.m_antennas, self.n_tones):
            raise DimensionError(
                f"weights shape {s.shape} != ({self.m_antennas}, {self.n_tones})")
        if not np.all(np.isfinite(s.view(float))):
            raise DomainError("weights must be finite")
        p = 0.5 * float(np.sum(np.abs(s) ** 2))
        if p > self.power_budget * (1.0 + _REL_TOL):
            raise DomainError(
                f"radiated power {p!r} exceeds budget {self.power_budget!r}")
        s.flags.writeable = False
        object.__setattr__(self, "weights", s)

    @property
    def transmit_power(self) -> float:
        """Radiated power (1/2) sum |s|^2 in watts."""
        return 0.5 * float(np.sum(np.abs(self.weights) ** 2))


@dataclass(frozen=True)
class EffectiveTones:
    """Per-tone complex amplitudes a_n of the waveform seen by the receiver."""

    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size < 1:
            raise DimensionError("amplitudes must be a non-empty 1-D array")
        if not np.all(np.isfinite(a.view(float))):
            raise DomainError("amplitudes must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_tones(self) -> int:
        return self.amplitudes.size


def synthesize_transmit_waveform(weights: WaveformWeights, grid: ToneGrid,
                                 antenna_index: int,
                                 time_points) -> np.ndarray:
    """Time-domain waveform of one antenna, x_m(t) = Re{sum_n s[m,n] e^{j w_n t}}.

    Args:
        weights: transmit weight matrix.
        grid: tone grid supplying the w_n.
        antenna_index: 1-based antenna selector in [1, M].
        time_points: sample instants in seconds.

    Returns:
        Real samples of x_m at the given instants.
    """
    if weights.n_tones != grid.n_tones:
        raise DimensionError(
            f"weights carry {weights.n_tones} tones, grid has {grid.n_tones}")
    if not 1 <= antenna_index <= weights.m_antennas:
        raise DomainError(
            f"antenna_index {antenna_index} outside [1, {weights.m_antennas}]")
    t = np.asarray(time_points, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("time_points must be finite")
    s = weights.weights[antenna_index - 1]
    phases = np.exp(1j * np.outer(t, grid.angular_frequencies))
    return np.real(phases @ s)


def effective_tones(channel, weights: WaveformWeights) -> EffectiveTones:
    """Combine channel gains and weights into received per-tone amplitudes."""
    gains = channel.gains
    if gains.shape != weights.weights.shape:
        raise DimensionError(
            f"channel gains {gains.shape} vs weights {weights.weights.shape}")
    return EffectiveTones(amplitudes=np.sum(gains * weights.weights, axis=0))


def received_rf_power(tones: EffectiveTones) -> float:
    """RF power of the received multi-sine, (1/2) sum |a_n|^2, watts."""
    return 0.5 * float(np.sum(np.abs(tones.amplitudes) ** 2))


def waveform_moments(tones: EffectiveTones, grid: ToneGrid) -> tuple[float, float]:
    """Closed-form second and fourth moments of the received waveform.

    m2 = (1/2) sum_n |a_n|^2 and m4 = (3/8) * sum over all index quadruples
    with n1 + n2 = n3 + n4 of a_n1 a_n2 conj(a_n3) conj(a_n4).  The quadruple
    sum factors over the diagonals k = n1 + n2 into the autoconvolution
    c_k = sum_{n1+n2=k} a_n1 a_n2, giving m4 = (3/8) sum_k |c_k|^2, which is
    manifestly real and non-negative.

    Args:
        tones: received per-tone amplitudes.
        grid: tone grid; only used to check the amplitudes match its size
            (uniform spacing, which the closed forms rely on, is a ToneGrid
            construction invariant).

    Returns:
        (m2, m4) in W and W^2 respectively.
    """
    if tones.n_tones != grid.n_tones:
        raise DimensionError(
            f"tones carry {tones.n_tones} amplitudes, grid has {grid.n_tones}")
    a = tones.amplitudes
    m2 = 0.5 * float(np.sum(np.abs(a) ** 2))
    c = np.convolve(a, a)
    m4 = 0.375 * float(np.sum(np.abs(c) ** 2))
    return m2, m4


def papr(tones: EffectiveTones, grid: ToneGrid, oversampling: int = 32) -> float:
    """Peak-to-average power ratio of the received waveform.

    Samples y(t) uniformly over one fundamental period 1/delta_f at
    ``oversampling`` points per cycle of the highest tone and returns
    max(y^2) / mean(y^2).  A single tone gives 2 (peak cos^2 = 1 against a
    mean of 1/2); N equal in-phase tones give 2N.

    Args:
        tones: received per-tone amplitudes.
        grid: tone grid supplying frequencies and the fundamental period.
        oversampling: samples per cycle of the highest tone, >= 8.  The
            sampled peak underestimates the true peak by O(1/oversampling^2).
    """
    if tones.n_tones != grid.n_tones:
        raise DimensionError(
            f"tones carry {tones.n_tones} amplitudes, grid has {grid.n_tones}")
    if oversampling < 8:
        raise DomainError(f"oversampling must be >= 8, got {oversampling}")
    a = tones.amplitudes
    if not np.any(np.abs(a) > 0):
        raise ZeroWaveformError("papr of the zero waveform is undefined")
    f_max = grid.angular_frequencies[-1] / (2.0 * np.pi)
    period = 1.0 / grid.delta_f
    n_samples = int(oversampling * np.ceil(f_max / grid.delta_f))
    t = np.arange(n_samples) * (period / n_samples)
    y = np.real(np.exp(1j * np.outer(t, grid.angular_frequencies)) @ a)
    y2 = y ** 2
    return float(np.max(y2) / np.mean(y2))
