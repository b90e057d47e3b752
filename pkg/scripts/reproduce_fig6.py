"""Simulated BER sweeps for alpha = inf and 6.02 dB, with IB reports and SVG plots.

    python scripts/reproduce_fig6.py --out results/fig6 --jobs 4
"""
import argparse
from pathlib import Path

from dynantenna.experiment import (preset_fig6, run_sweep, sweep_beams,
                                   format_ib_report, write_ib_report, write_sweep_csv)
from dynantenna.svgplot import sweep_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/fig6")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for choice in ("inf", "6.02"):
        spec = preset_fig6(choice, args.seed)
        result = run_sweep(spec, jobs=args.jobs)
        write_sweep_csv(result, out / f"sweep_alpha_{choice}.csv")
        beams = sweep_beams(result, spec.threshold)
        write_ib_report(beams, out / f"ib_alpha_{choice}.txt", spec.threshold)
        print(f"alpha = {choice} dB")
        print(format_ib_report(beams, spec.threshold))
        for plane in ("E", "H"):
            series = [(f"{m}-QAM", *result.curve(plane, m)) for m in spec.orders]
            svg = sweep_svg(series, "ber", spec.threshold, f"{plane}-plane, alpha={choice} dB")
            (out / f"ber_{plane}_alpha_{choice}.svg").write_text(svg)


if __name__ == "__main__":
    main()
