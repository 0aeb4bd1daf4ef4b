"""Command-line front end.

Every subcommand writes one CSV table (header row, LF endings, floats with 9
significant digits) to ``--out`` or stdout. A table is assembled completely
in memory before anything is written, so a failure never leaves a partial
file behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from twrc.bottleneck import (
    LinkModel,
    Method,
    RatePair,
    allocate_rates,
    decisive_sum_rate,
    exponent_plane,
    plateau_edge,
)
from twrc.channel import ChannelConfig, Link, Mode, link_stats
from twrc.errors import InfeasibleSumRate, TwrcError
from twrc.exponents import capacity, critical_rate, cutoff_rate, rcee
from twrc.power import paired_samples
from twrc import reference
from twrc.scenario import ScenarioFile, expand_grid

log = logging.getLogger("twrc")

# Rate-allocation rows whose bottleneck differs from the exact solver by more
# than this are flagged.
DISAGREEMENT_TOL = 1e-3
REPRODUCE_SEED = 20240601
REPRODUCE_SAMPLES = 20_000


class Table:
    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: list[list] = []

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".9g")
    return str(v)


def _write(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    Path(out).write_bytes(text.encode("utf-8"))


def parse_grid(text: str) -> tuple[float, ...]:
    """``"a,b,c"`` lists values, ``"start:stop:num"`` expands a linspace, ``""`` is empty."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range grids are start:stop:num, got {text!r}")
        try:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range grid {text!r}") from None
        if num < 0:
            raise argparse.ArgumentTypeError("grid size must be nonnegative")
        return expand_grid({"start": start, "stop": stop, "num": num})
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _scenario(args) -> ScenarioFile:
    sc = ScenarioFile.load(args.scenario) if args.scenario else ScenarioFile()
    return sc.updated(
        snr_db=args.snr_db,
        mode=Mode(args.mode) if args.mode else None,
        tol=args.tol,
        samples=getattr(args, "samples", None),
        seed=getattr(args, "seed", None),
    )


def _grid(arg, fallback):
    return fallback if arg is None else arg


# --- subcommands --------------------------------------------------------------


def exponent_table(sc: ScenarioFile, link: Link, rates: Iterable[float]) -> Table:
    stats = link_stats(sc.channel(), link)
    t = Table(["rate", "rho_opt", "exponent"])
    for r in rates:
        res = rcee(stats, r)
        t.add(float(r), res.rho_opt, res.exponent)
    return t


def summary_table(sc: ScenarioFile, snr_grid: Iterable[float]) -> Table:
    t = Table(["snr_db", "capacity_1", "capacity_2", "cutoff_1", "cutoff_2",
               "critical_1", "critical_2", "sum_rate_owrc"])
    for snr in snr_grid:
        cfg = sc.channel(snr_db=snr)
        s1, s2 = link_stats(cfg, Link.L1), link_stats(cfg, Link.L2)
        ow = cfg.with_mode(Mode.ONE_WAY)
        owrc_sum = capacity(link_stats(ow, Link.L1)) + capacity(link_stats(ow, Link.L2))
        t.add(float(snr), capacity(s1), capacity(s2), cutoff_rate(s1), cutoff_rate(s2),
              critical_rate(s1), critical_rate(s2), owrc_sum)
    return t


def plane_table(sc: ScenarioFile, r1: Sequence[float], r2: Sequence[float]) -> Table:
    l1, l2 = LinkModel.pair(sc.channel())
    z = exponent_plane(l1, l2, r1, r2)
    t = Table(["r1", "r2", "bottleneck"])
    for i, a in enumerate(r1):
        for j, b in enumerate(r2):
            t.add(float(a), float(b), float(z[i, j]))
    return t


def rate_alloc_table(sc: ScenarioFile, sum_rates: Iterable[float], method: Method) -> Table:
    l1, l2 = LinkModel.pair(sc.channel())
    t = Table(["sum_rate", "r1", "r2", "bottleneck", "branch", "Rd_star", "Rd_star_quasi", "flag"])
    for R in sum_rates:
        res = allocate_rates(l1, l2, R, method)
        flag = "ok"
        if not res.feasible:
            flag = "infeasible"
        elif method is not Method.EXACT:
            try:
                ref = allocate_rates(l1, l2, R, Method.EXACT).bottleneck
            except InfeasibleSumRate:
                ref = None
            if ref is not None and abs(ref - res.bottleneck) > DISAGREEMENT_TOL:
                flag = "method_disagreement"
        t.add(float(R), res.pair.r1, res.pair.r2, res.bottleneck, res.branch.value,
              res.decisive_sum_rate, res.quasi_decisive_sum_rate, flag)
    return t


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    return float(np.mean(x)), (float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else math.inf)


def power_alloc_table(sc: ScenarioFile, rates: Iterable[float]) -> Table:
    cfg = sc.channel()
    t = Table(["rate", "exponent_optimal", "std_err_optimal", "exponent_uniform", "std_err_uniform"])
    for r in rates:
        opt, uni = paired_samples(cfg, RatePair(r, r), sc.samples, sc.seed, eps=sc.tol)
        t.add(float(r), *_mean_se(opt), *_mean_se(uni))
    return t


# --- reproduction ------------------------------------------------------------


def _check(report: Table, name: str, computed: float, target: float, tol: float):
    ok = abs(computed - target) <= tol
    report.add(name, computed, target, tol, "pass" if ok else "fail")


def reproduce(out_dir: Path, samples: int, seed: int) -> dict[str, str]:
    """Regenerate every curve for the default scenario and compare against published values."""
    sc = ScenarioFile(samples=samples, seed=seed)
    l1, l2 = LinkModel.pair(sc.channel())
    files: dict[str, str] = {}

    curves = Table(["mode", "link", "rate", "rho_opt", "exponent"])
    for mode in Mode:
        for link in Link:
            for row in exponent_table(sc.updated(mode=mode), link, np.linspace(0, 1.4, 29)).rows:
                curves.add(mode.value, int(link), *row)
    files["exponent_curves.csv"] = curves.render()
    files["rate_summary.csv"] = summary_table(sc, np.arange(0.0, 31.0, 2.5)).render()
    grid = np.linspace(0.0, 1.4, 15)
    files["exponent_plane.csv"] = plane_table(sc, grid, grid).render()

    edges = Table(["r2", "r1_min"])
    for r2 in reference.PLATEAU_EDGES:
        edges.add(float(r2), plateau_edge(l1, l2, r2))
    files["plateau_edges.csv"] = edges.render()

    sums = sorted(set(reference.EXACT_ALLOCATION) | set(reference.QUASI_ALLOCATION) | {0.0})
    alloc = Table(["method"] + rate_alloc_table(sc, [], Method.EXACT).columns)
    for method in (Method.EXACT, Method.QUASI, Method.THEOREM):
        ok_sums = [R for R in sums if method is not Method.EXACT or R <= l1.capacity + l2.capacity]
        for row in rate_alloc_table(sc, ok_sums, method).rows:
            alloc.add(method.value, *row)
    files["rate_allocation.csv"] = alloc.render()

    rates = np.linspace(0.0, min(l1.capacity, l2.capacity), 10)
    power = power_alloc_table(sc, rates)
    files["power_allocation.csv"] = power.render()

    report = Table(["check", "computed", "reference", "tolerance", "status"])
    target, tol = reference.DECISIVE_SUM_RATE
    _check(report, "decisive_sum_rate", decisive_sum_rate(l1, l2), target, tol)
    for table, method in ((reference.EXACT_ALLOCATION, Method.EXACT), (reference.QUASI_ALLOCATION, Method.QUASI)):
        for R, ((r1, r2), e) in table.items():
            if method is Method.EXACT and R > l1.capacity + l2.capacity:
                continue
            res = allocate_rates(l1, l2, R, method)
            tag = f"{method.value}@{R:g}"
            _check(report, f"{tag}:r1", res.pair.r1, r1, reference.PAIR_TOL)
            _check(report, f"{tag}:r2", res.pair.r2, r2, reference.PAIR_TOL)
            if e == 0.0:
                _check(report, f"{tag}:exponent", res.bottleneck, 0.0, reference.ZERO_EXPONENT_MAX)
            elif e < reference.EXPONENT_TOL:
                _check(report, f"{tag}:exponent", res.bottleneck, e, reference.NEAR_ZERO_REL * e)
            else:
                _check(report, f"{tag}:exponent", res.bottleneck, e, reference.EXPONENT_TOL)
    for r2, r1 in reference.PLATEAU_EDGES.items():
        _check(report, f"plateau_edge@{r2:g}", plateau_edge(l1, l2, r2), r1, reference.PAIR_TOL)
    for row in power.rows:
        r, eo, so, eu, su = row
        margin = eo - eu - 3 * math.hypot(so, su)
        report.add(f"power_gain@{r:.6g}", eo - eu, 3 * math.hypot(so, su), 0.0,
                   "pass" if margin > 0 else "fail")
    files["report.csv"] = report.render()

    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_bytes(text.encode("utf-8"))
    return files


# --- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--scenario", help="JSON scenario file")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--snr-db", type=float, help="SNR = P/N0 in dB")
    p.add_argument("--tol", type=float, help="bisection tolerance for power allocation (nats)")
    p.add_argument("--out", help="output CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twrc", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="random coding exponent of one link over a rate grid")
    _common(p)
    p.add_argument("--link", type=int, choices=[1, 2], default=1)
    p.add_argument("--rates", type=parse_grid, help="rate grid, a,b,c or start:stop:num")

    p = sub.add_parser("summary", help="capacity, cutoff and critical rates over an SNR grid")
    _common(p)
    p.add_argument("--snr-grid", type=parse_grid, help="SNR grid in dB")

    p = sub.add_parser("plane", help="bottleneck exponent over an (R1, R2) grid")
    _common(p)
    p.add_argument("--r1", type=parse_grid)
    p.add_argument("--r2", type=parse_grid)

    p = sub.add_parser("rate-alloc", help="optimal split of a sum rate")
    _common(p)
    p.add_argument("--sum-rate", type=parse_grid)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.EXACT.value)

    p = sub.add_parser("power-alloc", help="fading-averaged exponent with optimal and uniform powers")
    _common(p)
    p.add_argument("--rates", type=parse_grid, help="common rate R1 = R2 grid")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("reproduce-paper", help="regenerate all curves and a comparison report")
    p.add_argument("--out", default="reproduction", help="output directory")
    p.add_argument("--samples", type=int, default=REPRODUCE_SAMPLES)
    p.add_argument("--seed", type=int, default=REPRODUCE_SEED)
    return ap


def run(args) -> str:
    if args.command == "reproduce-paper":
        if args.samples < 1:
            raise TwrcError("--samples must be at least 1")
        files = reproduce(Path(args.out), args.samples, args.seed)
        return files["report.csv"]
    sc = _scenario(args)
    if args.command == "exponent":
        return exponent_table(sc, Link(args.link), _grid(args.rates, sc.rate_grid)).render()
    if args.command == "summary":
        return summary_table(sc, _grid(args.snr_grid, sc.snr_grid_db or (sc.snr_db,))).render()
    if args.command == "plane":
        return plane_table(sc, _grid(args.r1, sc.plane_r1), _grid(args.r2, sc.plane_r2)).render()
    if args.command == "rate-alloc":
        return rate_alloc_table(sc, _grid(args.sum_rate, sc.sum_rates), Method(args.method)).render()
    if args.command == "power-alloc":
        return power_alloc_table(sc, _grid(args.rates, sc.rate_grid)).render()
    raise AssertionError(args.command)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = run(args)
    except (TwrcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.command != "reproduce-paper" else None
    _write(text, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
