"""Switched-state link: per-symbol pattern gain, AWGN and a genie single tap."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .metrics import ber, evm_rms, magnitude_error_rms, phase_error_rms
from .modem import (Prbs11, bits_per_symbol, constellation, demodulate_labels,
                    modulate, random_bits, _labels_to_bits)
from .pattern import DynamicPattern

__all__ = [
    "PolicyKind", "SwitchPolicy", "LinkConfig", "LinkResult",
    "state_sequence", "channel_gains", "equalizer_tap", "run_link",
]


class PolicyKind(str, enum.Enum):
    ALTERNATE = "alternate"
    RANDOM = "random_equiprobable"
    BLOCK_ALTERNATE = "block_alternate"


@dataclass(frozen=True)
class SwitchPolicy:
    kind: PolicyKind = PolicyKind.ALTERNATE
    block_len: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if int(self.block_len) < 1:
            raise ValueError(f"block_len must be >= 1, got {self.block_len}")


@dataclass(frozen=True)
class LinkConfig:
    """One link realisation.

    ``snr_db`` is Es/N0 at the receiver; ``math.inf`` disables noise.
    """

    snr_db: float = 40.0
    n_bits: int = 48000
    order: int = 16
    policy: SwitchPolicy = field(default_factory=SwitchPolicy)
    seed: int = 0
    bit_source: str = "random"

    def __post_init__(self):
        k = bits_per_symbol(self.order)
        if self.n_bits < k or self.n_bits % k:
            raise ValueError(f"n_bits={self.n_bits} must be a positive multiple of {k}")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"invalid snr_db {self.snr_db}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.bit_source not in ("random", "prbs11"):
            raise ValueError(f"unknown bit source {self.bit_source!r}")


@dataclass(frozen=True)
class LinkResult:
    ber: float
    evm_rms: float
    mag_err_rms: float
    phase_err_rms_deg: float
    h1: complex
    h2: complex
    n_bit_errors: int


def state_sequence(policy: SwitchPolicy, n_symbols: int, seed=None) -> np.ndarray:
    """Antenna state (1 or 2) used for each symbol."""
    if n_symbols < 0:
        raise ValueError("n_symbols must be non-negative")
    i = np.arange(n_symbols)
    if policy.kind is PolicyKind.ALTERNATE:
        return (i % 2 + 1).astype(np.int8)
    if policy.kind is PolicyKind.BLOCK_ALTERNATE:
        return ((i // policy.block_len) % 2 + 1).astype(np.int8)
    return np.random.default_rng(seed).integers(1, 3, size=n_symbols, dtype=np.int8)


def channel_gains(dp: DynamicPattern, theta_deg: float) -> tuple[complex, complex]:
    """State gains at the grid sample nearest ``theta_deg``."""
    i = dp.grid.index_of(theta_deg)
    return complex(dp.state1.gains[i]), complex(dp.state2.gains[i])


def equalizer_tap(rx, tx) -> complex:
    """Least-squares single complex tap mapping ``tx`` onto ``rx``."""
    rx = np.asarray(rx, dtype=complex)
    tx = np.asarray(tx, dtype=complex)
    if rx.shape != tx.shape or rx.size == 0:
        raise ValueError("rx and tx must be equal, non-empty lengths")
    energy = np.vdot(tx, tx).real
    if energy <= 0:
        raise NumericError("transmit block has zero energy")
    return complex(np.vdot(tx, rx) / energy)


def _source_bits(config: LinkConfig, ss: np.random.SeedSequence) -> np.ndarray:
    if config.bit_source == "prbs11":
        seed_reg = int(ss.generate_state(1)[0]) % 2047 + 1
        return Prbs11(seed_reg).bits(config.n_bits)
    return random_bits(ss, config.n_bits)


def run_link(dp: DynamicPattern, theta_deg: float, config: LinkConfig,
             bits=None) -> LinkResult:
    """Send one block through the switched channel at ``theta_deg``.

    Noise power is set from the block-mean received power so the SNR does
    not depend on the absolute pattern gain.  ``bits`` overrides the
    configured source (its length must match ``config.n_bits``).
    """
    h1, h2 = channel_gains(dp, theta_deg)
    if h1 == 0 or h2 == 0:
        raise NumericError(f"zero pattern gain at theta={theta_deg:g}")
    bits_ss, state_ss, noise_ss = np.random.SeedSequence(config.seed).spawn(3)
    if bits is None:
        bits = _source_bits(config, bits_ss)
    else:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.size != config.n_bits:
            raise ValueError(f"got {bits.size} bits, config says {config.n_bits}")
    x = modulate(bits, config.order)
    states = state_sequence(config.policy, x.size, state_ss)
    y = np.where(states == 1, h1, h2) * x

    p_rx = float(np.mean(np.abs(y) ** 2))
    if p_rx == 0:
        raise NumericError("received block is all zero")
    if math.isfinite(config.snr_db):
        n0 = p_rx / 10 ** (config.snr_db / 10)
        rng = np.random.default_rng(noise_ss)
        y = y + math.sqrt(n0 / 2) * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))

    tap = equalizer_tap(y, x)
    if tap == 0:
        raise NumericError("equaliser tap is zero")
    z = y / tap
    labels = demodulate_labels(z, config.order)
    c = constellation(config.order)
    rx_bits = _labels_to_bits(labels, c.k)
    decided = c.points[labels]
    return LinkResult(
        ber=ber(bits, rx_bits),
        evm_rms=evm_rms(z, x),
        mag_err_rms=magnitude_error_rms(z, decided),
        phase_err_rms_deg=phase_error_rms(z, decided),
        h1=h1, h2=h2,
        n_bit_errors=int(np.count_nonzero(bits != rx_bits)),
    )
