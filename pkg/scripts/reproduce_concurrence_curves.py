"""Corrected vs direct concurrence over the default loss/eta grid, next to the measured values."""

import argparse

from channel_correction.config import preset
from channel_correction.harness import SweepSpec, emit, load_fixtures, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="measured", choices=("ideal", "measured"))
    ap.add_argument("--out", default="out/curves")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    rows = run_sweep(SweepSpec(config=preset(args.preset)), jobs=args.jobs)
    emit(rows, args.out, "csv")
    measured = load_fixtures()["corrected_concurrence"]
    print(f"{'L':>7} {'eta':>7} {'C_hv model':>11} {'C_hv data':>14} {'C_fe model':>11}")
    for r in rows:
        if r.kind != "corrected":
            continue
        table = {eta: (c, sd) for eta, c, sd in measured[f"{r.loss:g}"]}
        c, sd = table.get(r.eta, (float("nan"), float("nan")))
        print(f"{r.loss:7.4f} {r.eta:7.4f} {r.c_hv:11.4f} {c:8.3f}+/-{sd:<5.3f} {r.c_fe:11.4f}")


if __name__ == "__main__":
    main()
