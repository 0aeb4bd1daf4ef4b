"""Compare the exact, closed-form and quasi-optimal rate splits over a sum-rate sweep."""

import argparse

import numpy as np

from twrc.bottleneck import LinkModel, Method, allocate_rates, decisive_sum_rate, quasi_decisive_sum_rate
from twrc.channel import ChannelConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()

    l1, l2 = LinkModel.pair(ChannelConfig.from_snr_db(args.snr_db))
    top = l1.capacity + l2.capacity
    print(f"Rd* = {decisive_sum_rate(l1, l2):.4f}, quasi Rd = {quasi_decisive_sum_rate(l1, l2):.4f}, "
          f"C1 + C2 = {top:.4f}")
    print(f"{'R':>7} {'exact r1':>9} {'exact r2':>9} {'E exact':>9} {'E theorem':>9} {'E quasi':>9}")
    for R in np.linspace(0, top * 0.999, args.points):
        ex = allocate_rates(l1, l2, R, Method.EXACT)
        th = allocate_rates(l1, l2, R, Method.THEOREM)
        qu = allocate_rates(l1, l2, R, Method.QUASI)
        print(f"{R:7.4f} {ex.pair.r1:9.4f} {ex.pair.r2:9.4f} {ex.bottleneck:9.5f} "
              f"{th.bottleneck:9.5f} {qu.bottleneck:9.5f}")


if __name__ == "__main__":
    main()
