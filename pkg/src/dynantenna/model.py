"""Analytic two-element model of the switched dual-monopole radiator.

The two closely spaced monopoles are treated as a pair of co-directed
point sources separated by ``spacing_wl`` wavelengths along the
polarization axis.  State 1 drives element 1 harder; state 2 swaps the
amplitudes, which makes the two E-plane patterns complex conjugates of
each other.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .pattern import (AngleGrid, DynamicPattern, PatternCut, Plane,
                      fit_phase_slope, make_grid)

__all__ = [
    "ElementFactor", "TwoElementModel", "AmplitudePair", "amplitudes",
    "array_factor", "synthesize", "calibrate_spacing",
]


class ElementFactor(str, enum.Enum):
    ISOTROPIC = "isotropic"
    SHORT_DIPOLE = "short_dipole"


@dataclass(frozen=True)
class AmplitudePair:
    a1: float
    a2: float


def amplitudes(power_ratio_db: float) -> AmplitudePair:
    """Unit-power amplitude split with ``a1/a2 = 10**(alpha/20)``.

    >>> amplitudes(0.0)
    AmplitudePair(a1=0.7071067811865475, a2=0.7071067811865475)
    """
    alpha = float(power_ratio_db)
    if math.isnan(alpha) or alpha < 0:
        raise ValueError(f"power ratio must be >= 0 dB, got {power_ratio_db}")
    if math.isinf(alpha):
        return AmplitudePair(1.0, 0.0)
    ratio = 10 ** (alpha / 20)
    a2 = 1 / math.sqrt(1 + ratio ** 2)
    return AmplitudePair(ratio * a2, a2)


@dataclass(frozen=True)
class TwoElementModel:
    spacing_wl: float
    power_ratio_db: float = math.inf
    element_factor: ElementFactor = ElementFactor.ISOTROPIC

    def __post_init__(self):
        if not 0 < self.spacing_wl <= 2:
            raise ValueError(f"spacing must be in (0, 2] wavelengths, got {self.spacing_wl}")
        if math.isnan(self.power_ratio_db) or self.power_ratio_db < 0:
            raise ValueError(f"power ratio must be >= 0 dB, got {self.power_ratio_db}")
        object.__setattr__(self, "element_factor", ElementFactor(self.element_factor))

    @property
    def amps(self) -> AmplitudePair:
        return amplitudes(self.power_ratio_db)


def _element(model: TwoElementModel, theta_rad, plane: Plane):
    if model.element_factor is ElementFactor.SHORT_DIPOLE and plane is Plane.E:
        return np.cos(theta_rad)
    return np.ones_like(theta_rad)


def array_factor(model: TwoElementModel, state: int, theta_deg, plane=Plane.E):
    """E-plane complex amplitude of ``state`` (1 or 2) at ``theta_deg``.

    Accepts a scalar or an array of angles.
    """
    if state not in (1, 2):
        raise ValueError(f"state must be 1 or 2, got {state}")
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    if np.any(np.abs(theta) > math.pi + 1e-12):
        raise ValueError("theta outside [-180, 180]")
    p = model.amps
    beta = math.pi * model.spacing_wl * np.sin(theta)
    lead, lag = (p.a1, p.a2) if state == 1 else (p.a2, p.a1)
    af = lead * np.exp(1j * beta) + lag * np.exp(-1j * beta)
    af = af * _element(model, theta, Plane(plane))
    return af[()] if np.ndim(af) == 0 else af


def synthesize(model: TwoElementModel, plane, grid: AngleGrid,
               freq_hz: float | None = None) -> DynamicPattern:
    """Sample both states of ``model`` on ``grid``.

    In the H-plane the element offset is perpendicular to the cut, so there
    is no path difference and both states reduce to ``a1 + a2``.
    """
    plane = Plane(plane)
    theta = grid.values
    if plane is Plane.E:
        g1 = array_factor(model, 1, theta, plane)
        g2 = array_factor(model, 2, theta, plane)
    else:
        p = model.amps
        g1 = np.full(len(theta), p.a1 + p.a2, dtype=complex)
        g2 = g1.copy()
    return DynamicPattern(PatternCut(plane, grid, g1, freq_hz),
                          PatternCut(plane, grid, g2, freq_hz))


def calibrate_spacing(target_slope_mag: float, fit_half_range_deg: float = 80.0,
                      step_deg: float = 1.0, tol: float = 1e-9) -> float:
    """Spacing (wavelengths) whose single-port E-plane slope magnitude hits the target.

    Bisection over (0, 1] at alpha = +inf on a ``step_deg`` grid.
    """
    target = float(target_slope_mag)
    if not target > 0:
        raise ValueError("target slope must be positive")
    grid = make_grid(-180, 180, step_deg)

    def slope(d):
        dp = synthesize(TwoElementModel(d, math.inf), Plane.E, grid)
        return abs(fit_phase_slope(dp, fit_half_range_deg).slope)

    lo, hi = 1e-9, 1.0
    if not slope(lo) <= target <= slope(hi):
        raise NumericError(
            f"slope {target} unreachable for spacing in (0, 1] (max {slope(hi):.4f})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slope(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
