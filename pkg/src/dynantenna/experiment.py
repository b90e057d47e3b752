"""Sweep orchestration, scenario presets and the CSV/text file formats.

File layouts
------------
Pattern CSV::

    # freq_hz=<float>            (optional)
    plane,state,theta_deg,mag_db,phase_deg

Sweep CSV::

    plane,theta_deg,order,ber,evm_rms,mag_err_rms,phase_err_rms_deg,h1_re,h1_im,h2_re,h2_im,dphi_deg

IB report: one ``plane=.. order=.. start=.. end=.. width=..`` line per
interval, closed by ``total_width=.. threshold=..`` for each (plane, order).
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import LinkConfig, PolicyKind, SwitchPolicy, run_link
from .metrics import IB_THRESHOLD, InformationBeam, extract_ib
from .modem import bits_per_symbol
from .model import TwoElementModel, calibrate_spacing, synthesize
from .pattern import DynamicPattern, PatternCut, Plane, differential_phase, make_grid

__all__ = [
    "REFERENCE_SLOPE", "reference_spacing", "SweepSpec", "SweepRow", "SweepResult",
    "run_sweep", "preset_fig6", "preset_measurement", "sweep_beams",
    "write_pattern_csv", "read_pattern_csv", "write_sweep_csv", "read_sweep_csv",
    "write_ib_report", "format_ib_report", "row_seed",
]

#: Single-port E-plane slope magnitude the reference spacing is fitted to.
REFERENCE_SLOPE = 1.66
_PLANE_CODE = {Plane.E: 0, Plane.H: 1}
_PATTERN_HEADER = ["plane", "state", "theta_deg", "mag_db", "phase_deg"]
_SWEEP_HEADER = ["plane", "theta_deg", "order", "ber", "evm_rms", "mag_err_rms",
                 "phase_err_rms_deg", "h1_re", "h1_im", "h2_re", "h2_im", "dphi_deg"]

_ref_spacing: float | None = None


def reference_spacing() -> float:
    """Spacing calibrated to :data:`REFERENCE_SLOPE` over +-80 deg (cached)."""
    global _ref_spacing
    if _ref_spacing is None:
        _ref_spacing = calibrate_spacing(REFERENCE_SLOPE, 80.0)
    return _ref_spacing


def _fmt(x) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.  Give exactly one of ``model`` or ``pattern_path``."""

    model: TwoElementModel | None = None
    pattern_path: str | None = None
    planes: tuple[Plane, ...] = (Plane.E, Plane.H)
    orders: tuple[int, ...] = (4, 16, 256)
    snr_db: float = 40.0
    n_bits: int = 48000
    policy: SwitchPolicy = field(default_factory=SwitchPolicy)
    master_seed: int = 0
    threshold: float = IB_THRESHOLD
    bit_source: str = "random"
    e_step_deg: float = 1.0
    h_step_deg: float = 2.0

    def __post_init__(self):
        if (self.model is None) == (self.pattern_path is None):
            raise ValueError("give exactly one of model or pattern_path")
        object.__setattr__(self, "planes", tuple(Plane(p) for p in self.planes))
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if not self.orders:
            raise ValueError("orders must be non-empty")
        if not self.planes:
            raise ValueError("planes must be non-empty")
        for m in self.orders:
            if self.n_bits % bits_per_symbol(m):
                raise ValueError(f"n_bits={self.n_bits} not divisible by log2({m})")
        if not 0 <= self.threshold <= 1:
            raise ValueError("threshold must be a probability")

    def patterns(self) -> list[DynamicPattern]:
        if self.pattern_path is not None:
            dp = read_pattern_csv(self.pattern_path)
            return [dp]
        out = []
        for plane in self.planes:
            step = self.e_step_deg if plane is Plane.E else self.h_step_deg
            out.append(synthesize(self.model, plane, make_grid(-180, 180, step)))
        return out


@dataclass(frozen=True)
class SweepRow:
    plane: Plane
    theta_deg: float
    order: int
    ber: float
    evm_rms: float
    mag_err_rms: float
    phase_err_rms_deg: float
    h1: complex
    h2: complex
    dphi_deg: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def select(self, plane, order) -> list[SweepRow]:
        plane = Plane(plane)
        return [r for r in self.rows if r.plane is plane and r.order == order]

    def curve(self, plane, order, metric: str = "ber"):
        rows = self.select(plane, order)
        return (np.array([r.theta_deg for r in rows]),
                np.array([getattr(r, metric) for r in rows]))

    def keys(self) -> list[tuple[Plane, int]]:
        seen = []
        for r in self.rows:
            if (r.plane, r.order) not in seen:
                seen.append((r.plane, r.order))
        return seen


def row_seed(master_seed: int, plane: Plane, angle_index: int, order: int) -> int:
    """64-bit per-row seed, independent of execution order."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), _PLANE_CODE[Plane(plane)],
                                 int(angle_index), int(order)])
    lo, hi = ss.generate_state(2, np.uint32)
    return (int(hi) << 32) | int(lo)


def _run_task(task):
    dp, idx, order, cfg = task
    theta = float(dp.grid.values[idx])
    try:
        return run_link(dp, theta, cfg)
    except ValueError as exc:
        raise type(exc)(f"plane={dp.plane.value} theta={theta:g} order={order}: {exc}") from exc


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Run one link per (plane, grid angle, order).

    Rows are ordered by plane, then order, then angle.  Each row draws
    from its own seed (see :func:`row_seed`) so ``jobs`` does not change
    the result.
    """
    tasks, meta = [], []
    for dp in spec.patterns():
        dphi = differential_phase(dp)
        for order in spec.orders:
            for idx in range(len(dp.grid)):
                cfg = LinkConfig(snr_db=spec.snr_db, n_bits=spec.n_bits, order=order,
                                 policy=spec.policy, bit_source=spec.bit_source,
                                 seed=row_seed(spec.master_seed, dp.plane, idx, order))
                tasks.append((dp, idx, order, cfg))
                meta.append((dp.plane, float(dp.grid.values[idx]), order, float(dphi[idx])))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_task(t) for t in tasks]
    rows = tuple(
        SweepRow(plane, theta, order, r.ber, r.evm_rms, r.mag_err_rms,
                 r.phase_err_rms_deg, r.h1, r.h2, dphi)
        for (plane, theta, order, dphi), r in zip(meta, results))
    return SweepResult(rows)


def sweep_beams(result: SweepResult, threshold: float = IB_THRESHOLD
                ) -> dict[tuple[Plane, int], InformationBeam]:
    beams = {}
    for plane, order in result.keys():
        theta, b = result.curve(plane, order)
        beams[(plane, order)] = extract_ib(theta, b, threshold)
    return beams


def preset_fig6(alpha_choice="inf", master_seed: int = 0) -> SweepSpec:
    """Simulated-pattern sweep at alpha = inf or 6.02 dB (4/16/256-QAM, 40 dB, 48 kb)."""
    key = str(alpha_choice).lower().lstrip("+")
    if key in ("inf", "infinity"):
        alpha = math.inf
    elif key in ("6.02", "6.02db"):
        alpha = 6.02
    else:
        raise ValueError(f"alpha choice must be 'inf' or '6.02', got {alpha_choice!r}")
    return SweepSpec(model=TwoElementModel(reference_spacing(), alpha),
                     planes=(Plane.E, Plane.H), orders=(4, 16, 256), snr_db=40.0,
                     n_bits=48000, policy=SwitchPolicy(PolicyKind.ALTERNATE),
                     master_seed=master_seed, threshold=IB_THRESHOLD)


def preset_measurement(alpha_db: float = 10.0, block_len: int = 1,
                       master_seed: int = 0) -> SweepSpec:
    """Bench-style sweep: PRBS-11 data, 16/256-QAM, 1 deg E / 2 deg H grids.

    The symbols per switching period of the hardware are unknown, hence
    ``block_len`` is left to the caller.
    """
    return SweepSpec(model=TwoElementModel(reference_spacing(), alpha_db),
                     planes=(Plane.E, Plane.H), orders=(16, 256), snr_db=40.0,
                     n_bits=48000,
                     policy=SwitchPolicy(PolicyKind.BLOCK_ALTERNATE, block_len),
                     master_seed=master_seed, bit_source="prbs11")


# -- pattern CSV --------------------------------------------------------------

def write_pattern_csv(dp: DynamicPattern, path) -> None:
    with open(path, "w", newline="") as fh:
        if dp.freq_hz is not None:
            fh.write(f"# freq_hz={_fmt(dp.freq_hz)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_PATTERN_HEADER)
        for state, cut in ((1, dp.state1), (2, dp.state2)):
            for theta, g in zip(cut.grid.values, cut.gains):
                mag = abs(g)
                mag_db = 20 * math.log10(mag) if mag > 0 else -math.inf
                w.writerow([dp.plane.value, state, _fmt(theta), _fmt(mag_db),
                            _fmt(math.degrees(np.angle(g)))])


def _grid_from_angles(theta, where):
    theta = np.asarray(theta)
    if theta.size < 2:
        raise ValueError(f"{where}: need at least two angles")
    step = (theta[-1] - theta[0]) / (theta.size - 1)
    if not np.allclose(np.diff(theta), step, rtol=0, atol=1e-6):
        raise ValueError(f"{where}: angles are not a uniform grid")
    return make_grid(theta[0], theta[-1], round(step, 9))


def read_pattern_csv(path) -> DynamicPattern:
    path = Path(path)
    freq = None
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for ln in lines:
        s = ln.strip()
        if s.startswith("#"):
            if s[1:].strip().startswith("freq_hz="):
                freq = float(s.split("=", 1)[1])
            continue
        if s:
            body.append(ln)
    reader = csv.DictReader(io.StringIO("\n".join(body)))
    missing = set(_PATTERN_HEADER) - set(reader.fieldnames or [])
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    data = {1: {}, 2: {}}
    planes = set()
    for lineno, row in enumerate(reader, start=2):
        try:
            state = int(row["state"])
            theta = float(row["theta_deg"])
            g = 10 ** (float(row["mag_db"]) / 20) * np.exp(1j * math.radians(float(row["phase_deg"])))
            plane = Plane(row["plane"].strip())
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}: row {lineno}: {exc}") from exc
        if state not in data:
            raise ValueError(f"{path}: row {lineno}: state must be 1 or 2")
        if theta in data[state]:
            raise ValueError(f"{path}: row {lineno}: duplicate (state {state}, theta {theta:g})")
        data[state][theta] = g
        planes.add(plane)
    for state in (1, 2):
        if not data[state]:
            raise ValueError(f"{path}: state {state} missing")
    if len(planes) != 1:
        raise ValueError(f"{path}: rows mix planes {sorted(p.value for p in planes)}")
    plane = planes.pop()
    th1, th2 = sorted(data[1]), sorted(data[2])
    if th1 != th2:
        raise ValueError(f"{path}: state 1 and state 2 grids differ")
    grid = _grid_from_angles(th1, path)
    cuts = [PatternCut(plane, grid, np.array([data[s][t] for t in th1]), freq) for s in (1, 2)]
    return DynamicPattern(*cuts)


# -- sweep CSV ----------------------------------------------------------------

def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_SWEEP_HEADER)
        for r in result.rows:
            w.writerow([r.plane.value, _fmt(r.theta_deg), r.order, _fmt(r.ber),
                        _fmt(r.evm_rms), _fmt(r.mag_err_rms), _fmt(r.phase_err_rms_deg),
                        _fmt(r.h1.real), _fmt(r.h1.imag), _fmt(r.h2.real), _fmt(r.h2.imag),
                        _fmt(r.dphi_deg)])


def read_sweep_csv(path) -> SweepResult:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(_SWEEP_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(SweepRow(
                    plane=Plane(row["plane"]), theta_deg=float(row["theta_deg"]),
                    order=int(row["order"]), ber=float(row["ber"]),
                    evm_rms=float(row["evm_rms"]), mag_err_rms=float(row["mag_err_rms"]),
                    phase_err_rms_deg=float(row["phase_err_rms_deg"]),
                    h1=complex(float(row["h1_re"]), float(row["h1_im"])),
                    h2=complex(float(row["h2_re"]), float(row["h2_im"])),
                    dphi_deg=float(row["dphi_deg"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: row {lineno}: {exc}") from exc
    return SweepResult(tuple(rows))


# -- IB report ----------------------------------------------------------------

def format_ib_report(beams: dict, threshold: float = IB_THRESHOLD) -> str:
    if not beams:
        return f"no recoverable region\ntotal_width=0 threshold={threshold:g}\n"
    lines = []
    for (plane, order), beam in beams.items():
        p = Plane(plane).value
        if not beam.intervals:
            lines.append(f"plane={p} order={order} no recoverable region")
        for iv in beam.intervals:
            lines.append(f"plane={p} order={order} start={iv[0]:g} end={iv[1]:g} "
                         f"width={InformationBeam.width(iv):g}")
        lines.append(f"total_width={beam.total_width_deg:g} threshold={beam.threshold:g}")
    return "\n".join(lines) + "\n"


def write_ib_report(beams: dict, path, threshold: float = IB_THRESHOLD) -> None:
    Path(path).write_text(format_ib_report(beams, threshold))
