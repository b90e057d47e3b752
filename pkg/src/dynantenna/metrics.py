"""Link quality metrics, information-beam extraction and the zero-noise oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .modem import constellation, demodulate_labels

__all__ = [
    "ber", "evm_rms", "magnitude_error_rms", "phase_error_rms",
    "zero_noise_oracle", "InformationBeam", "extract_ib", "IB_THRESHOLD",
]

IB_THRESHOLD = 1e-3


def ber(tx_bits, rx_bits) -> float:
    tx, rx = np.asarray(tx_bits), np.asarray(rx_bits)
    if tx.shape != rx.shape:
        raise ValueError(f"bit arrays differ in length: {tx.size} vs {rx.size}")
    if tx.size == 0:
        raise ValueError("empty bit arrays")
    return float(np.count_nonzero(tx != rx) / tx.size)


def _pair(a, b):
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty input")
    return a, b


def evm_rms(eq_rx, ref) -> float:
    """RMS error vector normalised to RMS reference amplitude (a ratio, not %)."""
    eq_rx, ref = _pair(eq_rx, ref)
    return float(np.sqrt(np.mean(np.abs(eq_rx - ref) ** 2) / np.mean(np.abs(ref) ** 2)))


def magnitude_error_rms(eq_rx, decided) -> float:
    eq_rx, decided = _pair(eq_rx, decided)
    diff = np.abs(eq_rx) - np.abs(decided)
    return float(np.sqrt(np.mean(diff ** 2) / np.mean(np.abs(decided) ** 2)))


def phase_error_rms(eq_rx, decided) -> float:
    """RMS of the wrapped phase difference, in degrees."""
    eq_rx, decided = _pair(eq_rx, decided)
    dphi = np.angle(eq_rx) - np.angle(decided)
    dphi = (dphi + np.pi) % (2 * np.pi) - np.pi
    return float(np.degrees(np.sqrt(np.mean(dphi ** 2))))


def zero_noise_oracle(h1: complex, h2: complex, order: int) -> float:
    """BER of the switched channel without noise, by exhaustive enumeration.

    Every constellation point is sent through both states with equal
    probability and equalised by the mean tap ``(h1 + h2) / 2``.
    """
    tap = (complex(h1) + complex(h2)) / 2
    if abs(tap) < 1e-300:
        raise NumericError("mean tap is zero; equalisation undefined")
    c = constellation(order)
    labels = np.arange(order)
    errors = 0
    for h in (complex(h1), complex(h2)):
        decided = demodulate_labels(c.points * h / tap, order)
        errors += sum(bin(int(x)).count("1") for x in decided ^ labels)
    return errors / (2 * order * c.k)


@dataclass(frozen=True)
class InformationBeam:
    """Angular intervals where BER stays at or below ``threshold``.

    An interval with ``start > end`` wraps through +-180 deg.
    """

    intervals: tuple[tuple[float, float], ...]
    total_width_deg: float
    threshold: float

    @staticmethod
    def width(interval) -> float:
        s, e = interval
        return e - s if e >= s else e - s + 360.0

    def containing(self, theta_deg: float = 0.0):
        for iv in self.intervals:
            s, e = iv
            inside = s <= theta_deg <= e if e >= s else (theta_deg >= s or theta_deg <= e)
            if inside:
                return iv
        return None

    def width_at(self, theta_deg: float = 0.0) -> float:
        """Width of the interval containing ``theta_deg`` (0 if none)."""
        iv = self.containing(theta_deg)
        return 0.0 if iv is None else self.width(iv)

    def describe(self) -> list[str]:
        return [f"{s:g}° ≤ θ ≤ {e:g}°" for s, e in self.intervals]


def _wrap180(a):
    # into [-180, 180)
    return (np.asarray(a, dtype=float) + 180.0) % 360.0 - 180.0


def extract_ib(angles, bers, threshold: float = IB_THRESHOLD) -> InformationBeam:
    """Maximal runs of consecutive grid angles with ``ber <= threshold``.

    Angles are folded into [-180, 180) and sorted, so +180 and -180 are one
    sample (the worse BER is kept).  When the samples cover the full circle
    on a uniform grid, runs touching the seam are merged.
    """
    ang = np.asarray(angles, dtype=float).ravel()
    b = np.asarray(bers, dtype=float).ravel()
    if ang.size != b.size:
        raise ValueError("angles and bers differ in length")
    if ang.size == 0:
        raise ValueError("empty input")
    folded = np.round(_wrap180(ang), 9)
    uniq, inv = np.unique(folded, return_inverse=True)
    worst = np.full(uniq.size, -np.inf)
    np.maximum.at(worst, inv, b)
    ok = worst <= threshold

    circular = False
    if uniq.size >= 2:
        steps = np.diff(uniq)
        step = steps[0]
        circular = (np.allclose(steps, step, rtol=0, atol=1e-6)
                    and abs(uniq.size * step - 360.0) < 1e-6)

    n = uniq.size
    if ok.all():
        if circular:
            return InformationBeam(((-180.0, 180.0),), 360.0, threshold)
        iv = (float(uniq[0]), float(uniq[-1]))
        return InformationBeam((iv,), iv[1] - iv[0], threshold)

    runs = []
    i = 0
    while i < n:
        if ok[i]:
            j = i
            while j + 1 < n and ok[j + 1]:
                j += 1
            runs.append([i, j])
            i = j + 1
        else:
            i += 1
    if circular and len(runs) >= 2 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        last = runs.pop()
        runs[0][0] = last[0]

    intervals = tuple((float(uniq[s]), float(uniq[e])) for s, e in runs)
    total = sum(InformationBeam.width(iv) for iv in intervals)
    return InformationBeam(intervals, total, threshold)
