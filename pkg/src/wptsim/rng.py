"""Deterministic random streams.

All randomness in the package flows through counter-based Philox generators
keyed by an integer path: ``stream(seed, purpose, *indices)``.  Two calls
with the same (seed, path) return generators that produce identical draws on
every platform and in every process, and distinct paths give statistically
independent streams.  This is what makes campaign output byte-reproducible
regardless of execution order or parallelism.

Concretely, the path is fed to ``numpy.random.SeedSequence(entropy=seed,
spawn_key=path)`` and the resulting state keys a ``numpy.random.Philox``
bit generator.  ``derive_seed`` exposes the same mixing to produce child
64-bit seeds (used when a location needs a seed of its own).
"""

from __future__ import annotations

import numpy as np

# purpose namespaces; first element of every derived path
TAPS = 1            # channel tap draws, sub-keyed by frame index
PATHLOSS = 2        # per-location pathloss draws
LOCATION_SEED = 3   # child seeds handed to locations
CODEBOOK = 4        # random codebook entries
TRAINING = 5        # codebook training (init selection)
SESSION = 6         # protocol session internals (ADC noise, feedback loss)
ORACLE = 7          # self-check case generation


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given seed and integer path."""
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic 64-bit child seed for (seed, path)."""
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
