"""Frequency-selective Rayleigh channel between transmit array and rectenna.

Each antenna sees an independent tapped delay line with L complex Gaussian
taps g[m, l] ~ CN(0, var_l).  Tap variances follow an exponential power
delay profile var_l proportional to pdp_decay^l (l = 0..L-1), normalized so
their sum equals the linear pathloss 10^(-pathloss_db/10).  The per-tone
gain of the channel is the delay line's transfer function sampled on the
tone grid:

    h[m, n] = sum_l g[m, l] * exp(-j * w_n * l * tap_spacing).

With one tap the channel is flat across tones; with the default profile
(L=8, 100 ns spacing, decay 0.7) tones spread over 10 MHz fade almost
independently.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .errors import ConfigError, DimensionError, DomainError
from .waveform import ToneGrid


@dataclass(frozen=True)
class ChannelModelParams:
    """Tapped-delay-line model parameters.

    Attributes:
        n_taps: number of delay taps L >= 1.
        tap_spacing_s: delay between consecutive taps, seconds, > 0.
        pdp_decay: per-tap geometric decay of the power delay profile, (0, 1].
        pathloss_db: average attenuation; sum of tap variances is
            10^(-pathloss_db/10).
        seed: 64-bit seed owned by this parameter set; realizations derive
            their tap streams from it.
    """

    n_taps: int = 8
    tap_spacing_s: float = 100e-9
    pdp_decay: float = 0.7
    pathloss_db: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.n_taps < 1:
            raise DomainError(f"n_taps must be >= 1, got {self.n_taps}")
        if not self.tap_spacing_s > 0:
            raise DomainError("tap_spacing_s must be > 0")
        if not 0 < self.pdp_decay <= 1:
            raise DomainError(f"pdp_decay must be in (0, 1], got {self.pdp_decay}")
        if self.pathloss_db < 0:
            raise DomainError(f"pathloss_db must be >= 0, got {self.pathloss_db}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of per-tone complex gains for an M-antenna link."""

    m_antennas: int
    grid: ToneGrid
    gains: np.ndarray = field(repr=False)
    location_label: str = ""

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=complex)
        if g.shape != (self.m_antennas, self.grid.n_tones):
            raise DimensionError(
                f"gains shape {g.shape} != ({self.m_antennas}, {self.grid.n_tones})")
        if not np.all(np.isfinite(g.view(float))):
            raise DomainError("gains must be finite")
        g.flags.writeable = False
        object.__setattr__(self, "gains", g)


@dataclass(frozen=True)
class Location:
    """A labeled receiver position with its own channel statistics."""

    label: str
    params: ChannelModelParams


def tap_variances(params: ChannelModelParams) -> np.ndarray:
    """Per-tap variances of the exponential profile, summing to the pathloss."""
    profile = params.pdp_decay ** np.arange(params.n_taps)
    profile = profile / profile.sum()
    return profile * 10.0 ** (-params.pathloss_db / 10.0)


def sample_taps(params: ChannelModelParams, m_antennas: int,
                rng: np.random.Generator) -> np.ndarray:
    """Draw an (M, L) matrix of complex Gaussian taps from the profile.

    Variates are consumed row-major (all of antenna 1 first), so the first
    rows of a larger array equal a smaller array's draw from the same
    stream and per-antenna fades stay comparable across antenna counts.
    """
    if m_antennas < 1:
        raise DomainError(f"m_antennas must be >= 1, got {m_antennas}")
    std = np.sqrt(tap_variances(params) / 2.0)
    block = rng.standard_normal((m_antennas, 2 * params.n_taps))
    return (block[:, :params.n_taps] + 1j * block[:, params.n_taps:]) * std


def frequency_response(taps: np.ndarray, params: ChannelModelParams,
                       grid: ToneGrid) -> np.ndarray:
    """Per-tone gains h[m, n] = sum_l taps[m, l] e^{-j w_n l tap_spacing}."""
    taps = np.asarray(taps, dtype=complex)
    if taps.ndim != 2 or taps.shape[1] != params.n_taps:
        raise DimensionError(
            f"taps shape {taps.shape} incompatible with n_taps={params.n_taps}")
    delays = np.arange(params.n_taps) * params.tap_spacing_s
    steering = np.exp(-1j * np.outer(delays, grid.angular_frequencies))
    return taps @ steering


def realize_channel(params: ChannelModelParams, m_antennas: int,
                    grid: ToneGrid, frame: int = 0,
                    label: str = "") -> ChannelRealization:
    """Deterministic realization for (params.seed, frame).

    The tap stream is Philox-keyed by (seed, TAPS, frame), so the same
    arguments reproduce the same channel on any machine, and consecutive
    frames get independent fades.
    """
    gen = rngmod.stream(params.seed, rngmod.TAPS, frame)
    taps = sample_taps(params, m_antennas, gen)
    gains = frequency_response(taps, params, grid)
    return ChannelRealization(m_antennas=m_antennas, grid=grid, gains=gains,
                              location_label=label)


def make_locations(count: int, base_seed: int,
                   params_template: ChannelModelParams,
                   pathloss_range_db: tuple[float, float]) -> list[Location]:
    """Labeled locations L1..Lcount with independent pathloss and seeds.

    Pathloss values are drawn uniformly from pathloss_range_db using the
    stream (base_seed, PATHLOSS); location i receives the child seed
    derive_seed(base_seed, LOCATION_SEED, i).  Both derivations are pure
    functions of base_seed, so a campaign's geometry is reproducible.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    lo, hi = pathloss_range_db
    if hi < lo:
        raise DomainError(f"empty pathloss range [{lo}, {hi}]")
    gen = rngmod.stream(base_seed, rngmod.PATHLOSS)
    losses = gen.uniform(lo, hi, count)
    locations = []
    for i in range(count):
        params = dataclasses.replace(
            params_template, pathloss_db=float(losses[i]),
            seed=rngmod.derive_seed(base_seed, rngmod.LOCATION_SEED, i + 1))
        locations.append(Location(label=f"L{i + 1}", params=params))
    return locations


def save_channel(channel: ChannelRealization, path) -> None:
    """Write gains as text, one line per (m, n): ``m n real imag``.

    Floats are written with repr so a round-trip is bit-exact.
    """
    lines = []
    for m in range(channel.m_antennas):
        for n in range(channel.grid.n_tones):
            g = channel.gains[m, n]
            lines.append(f"{m + 1} {n + 1} {float(g.real)!r} {float(g.imag)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_channel(path, grid: ToneGrid, label: str = "") -> ChannelRealization:
    """Read a channel written by save_channel back onto the given grid."""
    entries = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ConfigError(f"{path}:{lineno}: expected 'm n real imag'")
            try:
                m, n = int(parts[0]), int(parts[1])
                val = complex(float(parts[2]), float(parts[3]))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
            if (m, n) in entries:
                raise ConfigError(f"{path}:{lineno}: duplicate entry ({m}, {n})")
            entries[(m, n)] = val
    if not entries:
        raise ConfigError(f"{path}: empty channel file")
    m_antennas = max(m for m, _ in entries)
    n_tones = max(n for _, n in entries)
    if n_tones != grid.n_tones:
        raise DimensionError(
            f"{path}: file has {n_tones} tones, grid has {grid.n_tones}")
    gains = np.zeros((m_antennas, n_tones), dtype=complex)
    for m in range(1, m_antennas + 1):
        for n in range(1, n_tones + 1):
            if (m, n) not in entries:
                raise ConfigError(f"{path}: missing entry ({m}, {n})")
            gains[m - 1, n - 1] = entries[(m, n)]
    return ChannelRealization(m_antennas=m_antennas, grid=grid, gains=gains,
                              location_label=label)
