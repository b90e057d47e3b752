"""Two-state complex pattern cuts and differential-phase analysis.

A :class:`DynamicPattern` holds the far-field cuts of the two switching
states on a shared angle grid.  Everything here is a pure function of
immutable inputs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError

__all__ = [
    "Plane", "AngleGrid", "PatternCut", "DynamicPattern", "PhaseSlopeFit",
    "make_grid", "differential_phase", "fit_phase_slope", "staticness",
    "gain_db", "DB_FLOOR",
]

#: Floor used when a zero amplitude is shown in dB.
DB_FLOOR = -120.0

_GRID_TOL = 1e-9


class Plane(str, enum.Enum):
    E = "E"
    H = "H"


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Uniform, strictly increasing grid of angles in degrees."""

    start_deg: float
    stop_deg: float
    step_deg: float
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.step_deg > 0:
            raise ValueError(f"step must be positive, got {self.step_deg}")
        if not self.stop_deg > self.start_deg:
            raise ValueError("stop must exceed start")
        if self.start_deg < -180 - _GRID_TOL or self.stop_deg > 180 + _GRID_TOL:
            raise ValueError(
                f"grid [{self.start_deg}, {self.stop_deg}] leaves [-180, 180]")
        span = (self.stop_deg - self.start_deg) / self.step_deg
        n = round(span)
        if abs(span - n) > 1e-6:
            raise ValueError(
                f"span {self.stop_deg - self.start_deg} is not a multiple of step {self.step_deg}")
        vals = self.start_deg + self.step_deg * np.arange(n + 1, dtype=float)
        vals[-1] = self.stop_deg
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, AngleGrid):
            return NotImplemented
        return len(self) == len(other) and np.allclose(
            self.values, other.values, rtol=0, atol=_GRID_TOL)

    def __hash__(self):
        return hash((len(self), round(self.start_deg, 6), round(self.step_deg, 6)))

    def index_of(self, theta_deg: float) -> int:
        """Nearest grid index; raises if theta lies outside the grid."""
        half = self.step_deg / 2
        if theta_deg < self.start_deg - half - _GRID_TOL or theta_deg > self.stop_deg + half + _GRID_TOL:
            raise ValueError(
                f"theta={theta_deg} outside grid [{self.start_deg}, {self.stop_deg}]")
        return int(np.argmin(np.abs(self.values - theta_deg)))


def make_grid(start_deg: float, stop_deg: float, step_deg: float) -> AngleGrid:
    """Build an :class:`AngleGrid`; ``(-180, 180, 1)`` gives 361 angles."""
    return AngleGrid(float(start_deg), float(stop_deg), float(step_deg))


@dataclass(frozen=True, eq=False)
class PatternCut:
    """Complex far-field amplitude of one state along one principal plane."""

    plane: Plane
    grid: AngleGrid
    gains: np.ndarray
    freq_hz: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "plane", Plane(self.plane))
        g = np.array(self.gains, dtype=complex)
        if g.shape != (len(self.grid),):
            raise ValueError(
                f"{g.size} gains for a grid of {len(self.grid)} angles")
        if not np.all(np.isfinite(g)):
            raise ValueError("pattern gains must be finite")
        if not np.any(g != 0):
            raise ValueError("pattern gains are all zero")
        g.setflags(write=False)
        object.__setattr__(self, "gains", g)


@dataclass(frozen=True, eq=False)
class DynamicPattern:
    """The two switching states sampled on the same plane and grid."""

    state1: PatternCut
    state2: PatternCut

    def __post_init__(self):
        a, b = self.state1, self.state2
        if a.plane != b.plane:
            raise ValueError("states are cut in different planes")
        if a.grid != b.grid:
            raise ValueError("states use different angle grids")
        if a.freq_hz != b.freq_hz:
            raise ValueError("states carry different frequencies")

    @property
    def plane(self) -> Plane:
        return self.state1.plane

    @property
    def grid(self) -> AngleGrid:
        return self.state1.grid

    @property
    def freq_hz(self):
        return self.state1.freq_hz


@dataclass(frozen=True)
class PhaseSlopeFit:
    slope: float
    intercept_deg: float
    fit_range_deg: float
    rms_residual_deg: float


def differential_phase(dp: DynamicPattern) -> np.ndarray:
    """Unwrapped state-1 minus state-2 phase in degrees.

    The branch is chosen so the value at the grid angle nearest 0 deg lies
    in (-180, 180].
    """
    g1, g2 = dp.state1.gains, dp.state2.gains
    if np.any(g1 == 0) or np.any(g2 == 0):
        bad = dp.grid.values[(g1 == 0) | (g2 == 0)]
        raise NumericError(f"phase undefined: zero gain at theta={bad[0]:g}")
    wrapped = np.angle(g1 * np.conj(g2))
    unwrapped = np.unwrap(wrapped)
    i0 = int(np.argmin(np.abs(dp.grid.values)))
    # np.angle returns (-pi, pi], so the anchor shift is an exact 2*pi multiple
    unwrapped = unwrapped - (unwrapped[i0] - wrapped[i0])
    return np.degrees(unwrapped)


def fit_phase_slope(dp: DynamicPattern, fit_half_range_deg: float = 80.0) -> PhaseSlopeFit:
    """Least-squares line through the differential phase over +-fit_half_range_deg.

    Slope is in degrees of differential phase per degree of angle.  The
    E-plane convention is 80 deg; use 180 for an H-plane cut.
    """
    r = float(fit_half_range_deg)
    if not 0 < r <= 180:
        raise ValueError(f"fit half-range must be in (0, 180], got {r}")
    theta = dp.grid.values
    mask = np.abs(theta) <= r + _GRID_TOL
    if mask.sum() < 3:
        raise ValueError(f"only {mask.sum()} grid points within +-{r} deg")
    x = theta[mask]
    y = differential_phase(dp)[mask]
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    return PhaseSlopeFit(float(slope), float(intercept), r,
                         float(math.sqrt(np.mean(resid ** 2))))


def staticness(dp: DynamicPattern) -> float:
    """Peak state difference relative to the state-1 peak (0 for a static pattern)."""
    peak = np.max(np.abs(dp.state1.gains))
    if peak == 0:
        raise NumericError("state 1 is identically zero")
    return float(np.max(np.abs(dp.state1.gains - dp.state2.gains)) / peak)


def gain_db(cut: PatternCut) -> np.ndarray:
    """20*log10|gain| with zero amplitudes clamped to :data:`DB_FLOOR`."""
    mag = np.abs(cut.gains)
    out = np.full(mag.shape, DB_FLOOR)
    nz = mag > 0
    out[nz] = np.maximum(20 * np.log10(mag[nz]), DB_FLOOR)
    return out
