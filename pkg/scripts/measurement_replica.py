"""Bench-style sweep: PRBS-11 data, 10 dB power ratio, 16/256-QAM.

The hardware switched at 1 kHz with an unstated symbol rate, so the number
of symbols per switching half-period is a free parameter (--block-len).
"""
import argparse
from pathlib import Path

from dynantenna.experiment import (format_ib_report, preset_measurement,
                                   run_sweep, sweep_beams, write_sweep_csv)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha-db", type=float, default=10.0)
    ap.add_argument("--block-len", type=int, nargs="+", default=[1, 16, 256])
    ap.add_argument("--out", default="results/measurement")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for block in args.block_len:
        spec = preset_measurement(args.alpha_db, block)
        result = run_sweep(spec, jobs=args.jobs)
        write_sweep_csv(result, out / f"sweep_block{block}.csv")
        print(f"block_len = {block}")
        print(format_ib_report(sweep_beams(result, spec.threshold), spec.threshold))


if __name__ == "__main__":
    main()
