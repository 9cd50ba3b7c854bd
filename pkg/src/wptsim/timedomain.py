"""Brute-force time-domain evaluation of multi-sine quantities.

Everything here is obtained by synthesizing the received waveform y(t) on a
dense uniform grid over one fundamental period and averaging powers of the
samples.  No result is taken from the closed forms in `waveform`; the two
paths are kept independent so each can certify the other.

Exactness: uniform-rectangle averaging of a trigonometric polynomial over
one period is exact (to rounding) once the sample count exceeds the highest
harmonic order present.  y^4 contains lines up to 4*f_max plus carrier
mixes at 2*f_c and 4*f_c; all of them land on the delta_f lattice exactly
when 2*f_c is an integer multiple of delta_f (ToneGrid.is_commensurate).
On such grids the oracle matches the closed forms to machine precision; on
incommensurate grids it would be biased at O(delta_f/f_c), so it refuses.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .waveform import EffectiveTones, ToneGrid


def sample_times(grid: ToneGrid, oversampling: int = 32) -> np.ndarray:
    """Uniform sample instants covering one fundamental period [0, 1/delta_f).

    The count is oversampling * ceil(f_max / delta_f), i.e. ``oversampling``
    samples per cycle of the highest tone, which for oversampling >= 8
    safely exceeds the 4*f_max/delta_f harmonics of y^4.
    """
    if oversampling < 8:
        raise DomainError(f"oversampling must be >= 8, got {oversampling}")
    f_max = grid.angular_frequencies[-1] / (2.0 * np.pi)
    n = int(oversampling * np.ceil(f_max / grid.delta_f))
    period = 1.0 / grid.delta_f
    return np.arange(n) * (period / n)


def received_waveform(tones: EffectiveTones, grid: ToneGrid,
                      time_points) -> np.ndarray:
    """y(t) = Re{sum_n a_n e^{j w_n t}} sampled at the given instants."""
    t = np.asarray(time_points, dtype=float)
    return np.real(np.exp(1j * np.outer(t, grid.angular_frequencies))
                   @ tones.amplitudes)


def moments_by_averaging(tones: EffectiveTones, grid: ToneGrid,
                         oversampling: int = 32) -> tuple[float, float]:
    """(mean of y^2, mean of y^4) over one fundamental period.

    These equal the closed-form m2 and m4 exactly on commensurate grids.
    """
    if not grid.is_commensurate():
        raise DomainError(
            "time averaging over 1/delta_f is only exact when 2*f_c is an "
            "integer multiple of delta_f; refusing an incommensurate grid")
    t = sample_times(grid, oversampling)
    y = received_waveform(tones, grid, t)
    return float(np.mean(y ** 2)), float(np.mean(y ** 4))


def rf_power_by_averaging(tones: EffectiveTones, grid: ToneGrid,
                          oversampling: int = 16) -> float:
    """Time-average of y^2 over one period; cross-check for received_rf_power."""
    if not grid.is_commensurate():
        raise DomainError(
            "time averaging over 1/delta_f is only exact when 2*f_c is an "
            "integer multiple of delta_f; refusing an incommensurate grid")
    t = sample_times(grid, oversampling)
    y = received_waveform(tones, grid, t)
    return float(np.mean(y ** 2))
