"""Exponent versus rate for both links, two-way and one-way relaying."""

import argparse
import csv
import sys

import numpy as np

from twrc.channel import ChannelConfig, Link, Mode, link_stats
from twrc.exponents import link_summary, rcee


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--points", type=int, default=57)
    ap.add_argument("--max-rate", type=float, default=1.4)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["mode", "link", "rate", "rho_opt", "exponent"])
    for mode in Mode:
        cfg = ChannelConfig.from_snr_db(args.snr_db, mode=mode)
        for link in Link:
            s = link_stats(cfg, link)
            summ = link_summary(s)
            print(f"# {mode.value} L{int(link)}: C={summ.capacity:.4f} R0={summ.cutoff_rate:.4f} "
                  f"Rcr={summ.critical_rate:.4f}", file=sys.stderr)
            for r in np.linspace(0, args.max_rate, args.points):
                res = rcee(s, r)
                w.writerow([mode.value, int(link), f"{r:.9g}", f"{res.rho_opt:.9g}", f"{res.exponent:.9g}"])


if __name__ == "__main__":
    main()
