"""Codebook construction and Lloyd-style training.

A codebook is an ordered set of K waveform/beamforming codewords, all on
the same power sphere.  Nested codebooks keep the prefix property (the
first K entries of the big book are the exported K-book) with the uniform
power codeword pinned at entry 1, which makes best-of-K dc power
non-decreasing in K for every single channel realization.

train_lloyd alternates two monotone steps against a training set of channel
realizations and the smooth moment rectifier:

  ASSIGN  each channel to the codeword maximizing its dc power
          (ties to the lowest index);
  UPDATE  each codeword by projected gradient ascent on its cluster's
          average dc power, starting from the incumbent, with backtracking
          step halving until the objective does not decrease and projection
          back onto the power sphere.

Empty clusters are re-seeded with the SMF solution of the currently
worst-served training channel.  Both steps can only raise the average
training objective, so it is non-decreasing across iterations.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .errors import CodebookIOError, DimensionError, DomainError
from .rectenna import DiodeMomentModel
from .strategies import SmfParams, smf_weights, up_weights
from .waveform import ToneGrid, WaveformWeights

_POWER_REL_TOL = 1e-9


@dataclass(frozen=True)
class Codebook:
    """K codewords of identical dimensions, all meeting the budget exactly."""

    k_codewords: int
    entries: tuple
    nested: bool = False
    provenance: str = ""

    def __post_init__(self):
        entries = tuple(self.entries)
        if self.k_codewords < 1 or len(entries) != self.k_codewords:
            raise DomainError(
                f"expected {self.k_codewords} entries, got {len(entries)}")
        first = entries[0]
        for i, e in enumerate(entries):
            if not isinstance(e, WaveformWeights):
                raise DomainError(f"entry {i + 1} is not a WaveformWeights")
            if (e.m_antennas, e.n_tones) != (first.m_antennas, first.n_tones):
                raise DimensionError(
                    f"entry {i + 1} has shape ({e.m_antennas}, {e.n_tones}), "
                    f"expected ({first.m_antennas}, {first.n_tones})")
            if e.power_budget != first.power_budget:
                raise DomainError("entries must share one power budget")
            if abs(e.transmit_power - e.power_budget) > \
                    _POWER_REL_TOL * e.power_budget:
                raise DomainError(
                    f"entry {i + 1} power {e.transmit_power!r} != budget "
                    f"{e.power_budget!r}")
        object.__setattr__(self, "entries", entries)

    @property
    def m_antennas(self) -> int:
        return self.entries[0].m_antennas

    @property
    def n_tones(self) -> int:
        return self.entries[0].n_tones

    @property
    def power_budget(self) -> float:
        return self.entries[0].power_budget

    def prefix(self, k: int) -> "Codebook":
        """The codebook formed by the first k entries (requires nested)."""
        if not self.nested:
            raise DomainError("prefix export requires a nested codebook")
        if not 1 <= k <= self.k_codewords:
            raise DomainError(f"k must be in [1, {self.k_codewords}], got {k}")
        return Codebook(k_codewords=k, entries=self.entries[:k], nested=True,
                        provenance=f"{self.provenance} prefix[{k}]")


def _sphere(weights: np.ndarray, power: float) -> np.ndarray:
    """Rescale onto the power sphere (1/2)||s||^2 = power."""
    norm_sq = np.sum(np.abs(weights) ** 2)
    if norm_sq == 0:
        raise DomainError("cannot project the zero matrix onto the power sphere")
    return weights * np.sqrt(2.0 * power / norm_sq)


def _entry(weights: np.ndarray, power: float) -> WaveformWeights:
    w = _sphere(weights, power)
    return WaveformWeights(m_antennas=w.shape[0], n_tones=w.shape[1],
                           weights=w, power_budget=power)


def gen_random(m: int, grid: ToneGrid, power: float, k: int,
               rng: np.random.Generator, provenance: str = "") -> Codebook:
    """K i.i.d. complex-Gaussian codewords rescaled onto the power sphere."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    n = grid.n_tones
    entries = []
    for _ in range(k):
        w = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        entries.append(_entry(w, power))
    return Codebook(k_codewords=k, entries=tuple(entries), nested=False,
                    provenance=provenance or f"gen_random k={k}")


def gen_nested(m: int, grid: ToneGrid, power: float, k_max: int,
               rng: np.random.Generator, provenance: str = "") -> Codebook:
    """Prefix-nested codebook: entry 1 is the UP codeword, the rest random."""
    if k_max < 1 or (k_max & (k_max - 1)) != 0:
        raise DomainError(f"k_max must be a power of two, got {k_max}")
    n = grid.n_tones
    entries = [up_weights(m, grid, power)]
    for _ in range(k_max - 1):
        w = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        entries.append(_entry(w, power))
    return Codebook(k_codewords=k_max, entries=tuple(entries), nested=True,
                    provenance=provenance or f"gen_nested k_max={k_max}")


# ---------------------------------------------------------------------------
# batched dc evaluation and its gradient (moment model)

def _amplitudes(gains: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # (C, M, N) x (M, N) -> per-channel effective tones (C, N)
    return np.einsum("cmn,mn->cn", gains, weights)


def _autoconv(a: np.ndarray) -> np.ndarray:
    # row-wise autoconvolution c_k = sum_{i+j=k} a_i a_j, shape (C, 2N-1)
    n = a.shape[1]
    out = np.zeros((a.shape[0], 2 * n - 1), dtype=complex)
    for k in range(2 * n - 1):
        i0 = max(0, k - n + 1)
        i1 = min(k, n - 1)
        out[:, k] = np.sum(a[:, i0:i1 + 1] * a[:, k - i1:k - i0 + 1][:, ::-1],
                           axis=1)
    return out


def _dc_batch(gains: np.ndarray, weights: np.ndarray,
              model: DiodeMomentModel) -> np.ndarray:
    """dc power of one codeword on a batch of channels, shape (C,)."""
    a = _amplitudes(gains, weights)
    m2 = 0.5 * np.sum(np.abs(a) ** 2, axis=1)
    m4 = 0.375 * np.sum(np.abs(_autoconv(a)) ** 2, axis=1)
    z = model.k2 * m2 + model.k4 * m4
    return model.alpha * z * z


def _dc_and_grad(gains: np.ndarray, weights: np.ndarray,
                 model: DiodeMomentModel) -> tuple[float, np.ndarray]:
    """Mean dc over a channel batch and its Wirtinger ascent direction.

    The gradient is d(mean dc)/d(conj s): with a_n = sum_m h[m,n] s[m,n],
    d m2/d conj(a_p) = a_p / 2 and
    d m4/d conj(a_p) = (3/4) sum_q conj(a_q) c_{p+q} with c the
    autoconvolution of a; the chain rule multiplies by conj(h[m,p]).
    """
    c_count, _, n = gains.shape
    a = _amplitudes(gains, weights)
    conv = _autoconv(a)
    m2 = 0.5 * np.sum(np.abs(a) ** 2, axis=1)
    m4 = 0.375 * np.sum(np.abs(conv) ** 2, axis=1)
    z = model.k2 * m2 + model.k4 * m4
    dc = model.alpha * z * z
    dm2 = 0.5 * a
    dm4 = np.empty_like(a)
    a_conj = np.conj(a)
    for p in range(n):
        dm4[:, p] = 0.75 * np.sum(a_conj * conv[:, p:p + n], axis=1)
    dz = model.k2 * dm2 + model.k4 * dm4
    ddc = (2.0 * model.alpha) * z[:, None] * dz
    grad = np.einsum("cn,cmn->mn", ddc, np.conj(gains)) / c_count
    return float(np.mean(dc)), grad


def _ascend(weights: np.ndarray, gains: np.ndarray, model: DiodeMomentModel,
            power: float, inner_steps: int = 4,
            max_halvings: int = 40) -> np.ndarray:
    """Projected gradient ascent from the incumbent; never decreases."""
    best = weights
    for _ in range(inner_steps):
        f_cur, grad = _dc_and_grad(gains, best, model)
        g_norm = np.linalg.norm(grad)
        if g_norm == 0:
            break
        step = np.linalg.norm(best) / g_norm
        improved = False
        for _ in range(max_halvings):
            trial = _sphere(best + step * grad, power)
            f_trial, _ = _dc_and_grad(gains, trial, model)
            if f_trial >= f_cur:
                improved = f_trial > f_cur
                best = trial
                break
            step *= 0.5
        if not improved:
            break
    return best


def train_lloyd(training_channels, k: int, rect_model: DiodeMomentModel,
                iters: int = 30, rng: np.random.Generator | None = None,
                init: Codebook | None = None, power: float | None = None,
                inner_steps: int = 4, on_iteration=None) -> Codebook:
    """Alternating assign/ascend codebook training on the moment model.

    Args:
        training_channels: sequence of ChannelRealization, length >= k.
        k: codebook size.
        rect_model: smooth moment rectifier the objective is built on.
        iters: maximum alternations; stops early if the assignment is stable.
        rng: picks the initial codewords when no init codebook is given.
        init: optional starting codebook (e.g. an SMF solution to refine);
            its power budget is reused.
        power: codeword power budget, required when init is None.
        inner_steps: gradient-ascent steps per cluster per iteration.
        on_iteration: optional callback (iteration, mean training dc power),
            called once per iteration with a non-decreasing value.

    Returns:
        Trained codebook (not nested).
    """
    channels = list(training_channels)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if len(channels) < k:
        raise DomainError(
            f"training set of {len(channels)} is smaller than k={k}")
    if iters < 1:
        raise DomainError(f"iters must be >= 1, got {iters}")
    if not isinstance(rect_model, DiodeMomentModel):
        raise DomainError("training requires the smooth moment model")
    gains = np.stack([ch.gains for ch in channels])
    _, m, n = gains.shape
    grid = channels[0].grid
    for ch in channels:
        if ch.gains.shape != (m, n):
            raise DimensionError("training channels must share dimensions")

    if init is not None:
        if (init.m_antennas, init.n_tones) != (m, n):
            raise DimensionError("init codebook does not match the channels")
        if init.k_codewords != k:
            raise DomainError(
                f"init codebook has {init.k_codewords} entries, expected {k}")
        power = init.power_budget
        words = [e.weights.copy() for e in init.entries]
    else:
        if power is None:
            raise DomainError("power is required when no init codebook is given")
        if rng is None:
            raise DomainError("rng is required when no init codebook is given")
        # seed with the SMF solutions of k distinct training channels
        picks = rng.choice(len(channels), size=k, replace=False)
        smf = SmfParams(beta=3.0, power_budget=power)
        words = [smf_weights(channels[int(i)], smf).weights.copy()
                 for i in picks]

    dc_matrix = np.column_stack([_dc_batch(gains, w, rect_model) for w in words])
    assign = np.argmax(dc_matrix, axis=1)
    smf = SmfParams(beta=3.0, power_budget=power)
    iterations_run = 0
    for it in range(iters):
        iterations_run = it + 1
        for kk in range(k):
            members = np.flatnonzero(assign == kk)
            if members.size == 0:
                served = dc_matrix[np.arange(len(channels)), assign]
                worst = int(np.argmin(served))
                words[kk] = smf_weights(channels[worst], smf).weights.copy()
            else:
                words[kk] = _ascend(words[kk], gains[members], rect_model,
                                    power, inner_steps=inner_steps)
            dc_matrix[:, kk] = _dc_batch(gains, words[kk], rect_model)
        if on_iteration is not None:
            objective = float(np.mean(dc_matrix[np.arange(len(channels)),
                                                assign]))
            on_iteration(it, objective)
        new_assign = np.argmax(dc_matrix, axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign

    cfg = f"k={k} iters={iters} n_train={len(channels)} inner={inner_steps}"
    digest = hashlib.sha256(cfg.encode()).hexdigest()[:8]
    entries = tuple(_entry(w, power) for w in words)
    return Codebook(k_codewords=k, entries=entries, nested=False,
                    provenance=f"train_lloyd {cfg} ran={iterations_run} "
                               f"cfg={digest}")


# ---------------------------------------------------------------------------
# file format: "wptcb v1 M N K P nested" header, provenance line,
# then K blocks of M*N lines "m n real imag"

def save_codebook(book: Codebook, path) -> None:
    """Write the versioned text format; floats as repr for bit-exactness."""
    lines = [f"wptcb v1 {book.m_antennas} {book.n_tones} {book.k_codewords} "
             f"{float(book.power_budget)!r} {int(book.nested)}",
             "provenance " + " ".join(book.provenance.split())]
    for entry in book.entries:
        for mi in range(book.m_antennas):
            for ni in range(book.n_tones):
                w = entry.weights[mi, ni]
                lines.append(f"{mi + 1} {ni + 1} "
                             f"{float(w.real)!r} {float(w.imag)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_codebook(path) -> Codebook:
    """Read a codebook written by save_codebook; strict, line-diagnosed."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CodebookIOError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 7 or header[0] != "wptcb":
        raise CodebookIOError(f"{path}:1: malformed header")
    if header[1] != "v1":
        raise CodebookIOError(f"{path}:1: unsupported version {header[1]!r}")
    try:
        m, n, k = int(header[2]), int(header[3]), int(header[4])
        power = float(header[5])
        nested = bool(int(header[6]))
    except ValueError as exc:
        raise CodebookIOError(f"{path}:1: {exc}") from exc
    if len(lines) < 2 or not lines[1].startswith("provenance"):
        raise CodebookIOError(f"{path}:2: missing provenance line")
    provenance = lines[1][len("provenance"):].strip()
    expected = 2 + k * m * n
    if len(lines) != expected:
        raise CodebookIOError(
            f"{path}: expected {expected} lines for K={k}, M={m}, N={n}; "
            f"got {len(lines)}")
    entries = []
    lineno = 2
    for _ in range(k):
        w = np.empty((m, n), dtype=complex)
        for mi in range(m):
            for ni in range(n):
                parts = lines[lineno].split()
                lineno += 1
                if len(parts) != 4:
                    raise CodebookIOError(
                        f"{path}:{lineno}: expected 'm n real imag'")
                try:
                    fm, fn = int(parts[0]), int(parts[1])
                    val = complex(float(parts[2]), float(parts[3]))
                except ValueError as exc:
                    raise CodebookIOError(f"{path}:{lineno}: {exc}") from exc
                if (fm, fn) != (mi + 1, ni + 1):
                    raise CodebookIOError(
                        f"{path}:{lineno}: expected entry ({mi + 1}, {ni + 1}),"
                        f" found ({fm}, {fn})")
                w[mi, ni] = val
        entries.append(WaveformWeights(m_antennas=m, n_tones=n, weights=w,
                                       power_budget=power))
    return Codebook(k_codewords=k, entries=tuple(entries), nested=nested,
                    provenance=provenance)
