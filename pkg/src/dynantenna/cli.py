"""Command-line front end: ``dynantenna <command> [flags]``.

Exit codes: 0 success, 2 bad input or flags, 3 numeric/runtime failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

from .channel import LinkConfig, PolicyKind, SwitchPolicy, run_link
from .errors import NumericError
from .experiment import (preset_fig6, preset_measurement, read_pattern_csv,
                         read_sweep_csv, reference_spacing, run_sweep, sweep_beams,
                         SweepSpec, write_ib_report, format_ib_report,
                         write_pattern_csv, write_sweep_csv)
from .metrics import IB_THRESHOLD
from .model import TwoElementModel, synthesize
from .pattern import Plane, fit_phase_slope, make_grid
from .svgplot import sweep_svg

EXIT_INPUT = 2
EXIT_NUMERIC = 3

PRESETS = {
    "fig6-inf": lambda seed: preset_fig6("inf", seed),
    "fig6-6.02": lambda seed: preset_fig6("6.02", seed),
    "measurement": lambda seed: preset_measurement(10.0, 1, seed),
}


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _InputError(f"{self.prog}: error: {message}")


def _alpha(text: str) -> float:
    t = text.strip().lower().lstrip("+±")
    if t in ("inf", "infinity"):
        return math.inf
    v = float(t)
    if v < 0 or math.isnan(v):
        raise argparse.ArgumentTypeError(f"alpha must be >= 0 dB or 'inf', got {text}")
    return v


def _orders(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynantenna", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write an analytic two-state pattern CSV")
    s.add_argument("--spacing", type=_positive, default=None,
                   help="element spacing in wavelengths (default: calibrated reference)")
    s.add_argument("--alpha-db", type=_alpha, default=math.inf, help="power ratio in dB or 'inf'")
    s.add_argument("--plane", choices=["E", "H"], default="E")
    s.add_argument("--step", type=_positive, default=1.0, help="grid step in degrees")
    s.add_argument("--element", choices=["isotropic", "short-dipole"], default="isotropic")
    s.add_argument("--freq-hz", type=float, default=None)
    s.add_argument("--out", required=True)

    s = sub.add_parser("slope", help="fit the differential phase slope of a pattern")
    s.add_argument("--pattern", required=True)
    s.add_argument("--fit-range", type=_positive, default=None,
                   help="half-range in degrees (default 80 for E, 180 for H)")

    s = sub.add_parser("link", help="simulate one link at one angle")
    s.add_argument("--pattern", required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--mod", type=int, default=16)
    s.add_argument("--snr-db", type=float, default=40.0)
    s.add_argument("--bits", type=int, default=48000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--policy", choices=[k.value for k in PolicyKind], default="alternate")
    s.add_argument("--block-len", type=int, default=1)
    s.add_argument("--bit-source", choices=["random", "prbs11"], default="random")

    s = sub.add_parser("sweep", help="BER/EVM sweep over the pattern grid")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--pattern")
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--alpha-db", type=_alpha, help="analytic model at the reference spacing")
    s.add_argument("--mod", type=_orders, default=None, help="comma-separated QAM orders")
    s.add_argument("--snr-db", type=float, default=None)
    s.add_argument("--bits", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)

    s = sub.add_parser("ib", help="extract information beams from a sweep CSV")
    s.add_argument("--sweep", required=True)
    s.add_argument("--threshold", type=float, default=IB_THRESHOLD)
    s.add_argument("--out", default="-")

    s = sub.add_parser("preset", help="print a named sweep preset as JSON")
    s.add_argument("name", choices=sorted(PRESETS))
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("plot", help="write an SVG plot of a sweep metric")
    s.add_argument("--sweep", required=True)
    s.add_argument("--metric", choices=["ber", "evm", "phase"], default="ber")
    s.add_argument("--plane", choices=["E", "H"], default="E")
    s.add_argument("--mod", type=_orders, default=None)
    s.add_argument("--threshold", type=float, default=IB_THRESHOLD)
    s.add_argument("--polar", action="store_true")
    s.add_argument("--out", required=True)
    return p


def _spec_json(spec: SweepSpec) -> str:
    d = asdict(spec)
    d["planes"] = [p.value for p in spec.planes]
    d["policy"] = {"kind": spec.policy.kind.value, "block_len": spec.policy.block_len}
    if spec.model is not None:
        d["model"] = {"spacing_wl": spec.model.spacing_wl,
                      "power_ratio_db": "inf" if math.isinf(spec.model.power_ratio_db)
                      else spec.model.power_ratio_db,
                      "element_factor": spec.model.element_factor.value}
    return json.dumps(d, indent=2)


def _cmd_synth(a):
    model = TwoElementModel(a.spacing if a.spacing is not None else reference_spacing(),
                            a.alpha_db, a.element.replace("-", "_"))
    dp = synthesize(model, a.plane, make_grid(-180, 180, a.step), a.freq_hz)
    write_pattern_csv(dp, a.out)
    print(f"wrote {a.out}: plane={a.plane} angles={len(dp.grid)} spacing={model.spacing_wl:.6f}")


def _cmd_slope(a):
    dp = read_pattern_csv(a.pattern)
    r = a.fit_range if a.fit_range is not None else (80.0 if dp.plane is Plane.E else 180.0)
    fit = fit_phase_slope(dp, r)
    print(f"slope={fit.slope:.6f} intercept_deg={fit.intercept_deg:.6f} "
          f"rms_residual_deg={fit.rms_residual_deg:.6f} fit_range_deg={fit.fit_range_deg:g}")


def _cmd_link(a):
    dp = read_pattern_csv(a.pattern)
    cfg = LinkConfig(snr_db=a.snr_db, n_bits=a.bits, order=a.mod, seed=a.seed,
                     policy=SwitchPolicy(a.policy, a.block_len), bit_source=a.bit_source)
    r = run_link(dp, a.theta, cfg)
    print(f"theta={a.theta:g} order={a.mod} ber={r.ber!r} n_bit_errors={r.n_bit_errors} "
          f"evm_rms={r.evm_rms:.6g} mag_err_rms={r.mag_err_rms:.6g} "
          f"phase_err_rms_deg={r.phase_err_rms_deg:.6g} "
          f"h1={r.h1.real:.6g}{r.h1.imag:+.6g}j h2={r.h2.real:.6g}{r.h2.imag:+.6g}j")


def _cmd_sweep(a):
    if a.preset:
        spec = PRESETS[a.preset](a.seed)
    elif a.pattern:
        spec = SweepSpec(pattern_path=a.pattern, master_seed=a.seed)
    else:
        spec = SweepSpec(model=TwoElementModel(reference_spacing(), a.alpha_db), master_seed=a.seed)
    changes = {k: v for k, v in (("orders", a.mod), ("snr_db", a.snr_db), ("n_bits", a.bits))
               if v is not None}
    if changes:
        spec = replace(spec, **changes)
    result = run_sweep(spec, jobs=max(1, a.jobs))
    write_sweep_csv(result, a.out)
    print(f"wrote {a.out}: {len(result.rows)} rows")


def _cmd_ib(a):
    beams = sweep_beams(read_sweep_csv(a.sweep), a.threshold)
    if a.out == "-":
        sys.stdout.write(format_ib_report(beams, a.threshold))
    else:
        write_ib_report(beams, a.out, a.threshold)
        print(f"wrote {a.out}")


def _cmd_preset(a):
    print(_spec_json(PRESETS[a.name](a.seed)))


def _cmd_plot(a):
    result = read_sweep_csv(a.sweep)
    field = {"ber": "ber", "evm": "evm_rms", "phase": "phase_err_rms_deg"}[a.metric]
    orders = a.mod or tuple(o for p, o in result.keys() if p.value == a.plane)
    series = []
    for order in orders:
        theta, vals = result.curve(a.plane, order, field)
        if theta.size == 0:
            raise ValueError(f"{a.sweep}: no rows for plane={a.plane} order={order}")
        series.append((f"{order}-QAM", theta, vals))
    svg = sweep_svg(series, a.metric, a.threshold, f"{a.plane}-plane", polar=a.polar)
    with open(a.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {a.out}")


_COMMANDS = {"synth": _cmd_synth, "slope": _cmd_slope, "link": _cmd_link,
             "sweep": _cmd_sweep, "ib": _cmd_ib, "preset": _cmd_preset, "plot": _cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _InputError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        _COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
