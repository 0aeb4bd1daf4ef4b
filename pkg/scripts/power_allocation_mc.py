"""Fading-averaged bottleneck exponent with optimal versus uniform terminal powers."""

import argparse
import math
import time

import numpy as np

from twrc.bottleneck import LinkModel, RatePair
from twrc.channel import ChannelConfig
from twrc.power import paired_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--points", type=int, default=10)
    args = ap.parse_args()

    cfg = ChannelConfig.from_snr_db(args.snr_db)
    l1, l2 = LinkModel.pair(cfg)
    print(f"{'R':>7} {'optimal':>9} {'uniform':>9} {'gain':>8} {'3 se':>8} {'sec':>5}")
    for r in np.linspace(0, min(l1.capacity, l2.capacity), args.points):
        t0 = time.perf_counter()
        opt, uni = paired_samples(cfg, RatePair(r, r), args.samples, args.seed)
        se = math.hypot(opt.std(ddof=1), uni.std(ddof=1)) / math.sqrt(args.samples)
        print(f"{r:7.4f} {opt.mean():9.5f} {uni.mean():9.5f} {opt.mean() - uni.mean():8.5f} "
              f"{3 * se:8.5f} {time.perf_counter() - t0:5.1f}")


if __name__ == "__main__":
    main()
