"""Differential phase slope of both principal planes against the port power ratio.

Prints a table (E-plane fit over +-80 deg, H-plane over all angles) for
the calibrated reference spacing.
"""
import argparse
import math

import numpy as np

from dynantenna.experiment import reference_spacing
from dynantenna.model import TwoElementModel, synthesize
from dynantenna.pattern import fit_phase_slope, gain_db, make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spacing", type=float, default=None)
    ap.add_argument("--alphas", default="0,1,2,3,4,5,6.02,8,10,15,20,inf")
    args = ap.parse_args()
    d = args.spacing or reference_spacing()
    grid = make_grid(-180, 180, 1)
    print(f"spacing = {d:.5f} wavelengths")
    print(f"{'alpha_dB':>9} {'E_slope':>9} {'H_slope':>9} {'E_peak_dB':>10}")
    for tok in args.alphas.split(","):
        alpha = math.inf if tok.strip() == "inf" else float(tok)
        m = TwoElementModel(d, alpha, "short_dipole")
        e = synthesize(TwoElementModel(d, alpha), "E", grid)
        h = synthesize(TwoElementModel(d, alpha), "H", grid)
        peak = float(np.max(gain_db(synthesize(m, "E", grid).state1)))
        print(f"{tok:>9} {fit_phase_slope(e, 80).slope:9.4f} "
              f"{fit_phase_slope(h, 180).slope:9.4f} {peak:10.3f}")


if __name__ == "__main__":
    main()
