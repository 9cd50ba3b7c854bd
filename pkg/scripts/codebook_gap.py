#!/usr/bin/env python3
"""Trained-codebook loss versus codebook size.

Trains Lloyd codebooks for K = 2 .. 64 on one channel ensemble (M=4, N=8
by default) and reports the mean held-out dc power relative to the scaled
matched filter with cubic emphasis.  The gap shrinks with every index bit
but saturates well short of 0 dB; the saturation level is the quantization
cost of describing an M*N-dimensional codeword with log2(K) bits.

Usage: python3 scripts/codebook_gap.py [--antennas M] [--tones N]
       [--train 1000] [--held 500] [--iters 30] [--seed 42]
"""

import argparse
import sys

import numpy as np

from wptsim import (ChannelModelParams, ChannelRealization, DiodeMomentModel,
                    SmfParams, ToneGrid, dc_power_moment, effective_tones,
                    frequency_response, sample_taps, smf_weights, stream,
                    train_lloyd)
import wptsim.rng as rngmod


def draw_channels(seed, count, m, grid, base):
    params = ChannelModelParams(pathloss_db=60.0, seed=seed)
    out = []
    for i in range(count):
        taps = sample_taps(params, m, stream(seed, rngmod.TAPS, base + i))
        gains = frequency_response(taps, params, grid)
        out.append(ChannelRealization(m_antennas=m, grid=grid, gains=gains))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--antennas", type=int, default=4)
    ap.add_argument("--tones", type=int, default=8)
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--held", type=int, default=500)
    ap.add_argument("--iters", type=int, default=30)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    grid = ToneGrid.centered(2.4e9, 10e6, args.tones)
    model = DiodeMomentModel()
    power = 2.0
    train = draw_channels(args.seed, args.train, args.antennas, grid, 0)
    held = draw_channels(args.seed, args.held, args.antennas, grid,
                         args.train)

    smf = SmfParams(beta=3.0, power_budget=power)
    dc_smf = np.mean([dc_power_moment(model,
                                      effective_tones(c, smf_weights(c, smf)),
                                      grid) for c in held])
    print(f"M={args.antennas} N={args.tones}, {args.train} training / "
          f"{args.held} held-out channels")
    print(f"  matched-filter reference: {dc_smf:.4e} W")
    for k in (2, 4, 8, 16, 32, 64):
        book = train_lloyd(train, k, model, iters=args.iters,
                           rng=stream(args.seed, rngmod.TRAINING, k),
                           power=power)
        dc_k = np.mean([max(dc_power_moment(model, effective_tones(c, e),
                                            grid) for e in book.entries)
                        for c in held])
        gap = 10.0 * np.log10(dc_k / dc_smf)
        print(f"  K={k:>2} ({(k - 1).bit_length()} bits): "
              f"{dc_k:.4e} W  gap {gap:+7.3f} dB")
    return 0


if __name__ == "__main__":
    sys.exit(main())
