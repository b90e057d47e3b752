"""Dynamic-antenna directional modulation: patterns, QAM links and information beams."""
from .channel import LinkConfig, LinkResult, SwitchPolicy, run_link
from .metrics import InformationBeam, extract_ib, zero_noise_oracle
from .model import TwoElementModel, amplitudes, array_factor, calibrate_spacing, synthesize
from .pattern import (AngleGrid, DynamicPattern, PatternCut, Plane, differential_phase,
                      fit_phase_slope, make_grid)

__all__ = [
    "LinkConfig", "LinkResult", "SwitchPolicy", "run_link",
    "InformationBeam", "extract_ib", "zero_noise_oracle",
    "TwoElementModel", "amplitudes", "array_factor", "calibrate_spacing", "synthesize",
    "AngleGrid", "DynamicPattern", "PatternCut", "Plane", "differential_phase",
    "fit_phase_slope", "make_grid",
]
__version__ = "0.1.0"
