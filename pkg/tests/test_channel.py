import math

import numpy as np
import pytest

from dynantenna.channel import (LinkConfig, PolicyKind, SwitchPolicy,
                                channel_gains, equalizer_tap, run_link,
                                state_sequence)
from dynantenna.errors import NumericError
from dynantenna.metrics import zero_noise_oracle
from dynantenna.model import TwoElementModel, synthesize
from dynantenna.modem import constellation, modulate
from dynantenna.pattern import (DynamicPattern, PatternCut, differential_phase,
                                make_grid)

D = 0.3238
E_GRID = make_grid(-180, 180, 1)


def _enumerating_bits(M, reps=2):
    # every label twice in a row, so alternate switching sends each through both states
    k = int(math.log2(M))
    labels = np.repeat(np.arange(M), 2 * reps)
    return ((labels[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.uint8).ravel()


def _flat_pattern(h1, h2):
    g = make_grid(-1, 1, 1)
    return DynamicPattern(PatternCut("E", g, [h1] * 3), PatternCut("E", g, [h2] * 3))


class TestStateSequence:
    def test_alternate(self):
        assert state_sequence(SwitchPolicy(), 5).tolist() == [1, 2, 1, 2, 1]

    def test_block(self):
        assert state_sequence(SwitchPolicy("block_alternate", 2), 5).tolist() == [1, 1, 2, 2, 1]

    def test_random_seeded(self):
        p = SwitchPolicy(PolicyKind.RANDOM)
        a, b = state_sequence(p, 1000, 4), state_sequence(p, 1000, 4)
        assert np.array_equal(a, b)
        assert set(a.tolist()) == {1, 2}
        assert abs(np.mean(a == 1) - 0.5) < 0.05

    def test_bad_block(self):
        with pytest.raises(ValueError):
            SwitchPolicy("block_alternate", 0)


class TestGains:
    def test_boresight(self):
        h1, h2 = channel_gains(synthesize(TwoElementModel(D, 10), "E", E_GRID), 0)
        assert h1 == h2

    def test_h_plane(self):
        m = TwoElementModel(D, 10)
        dp = synthesize(m, "H", make_grid(-180, 180, 2))
        for th in (-180, -37, 90, 178):
            assert channel_gains(dp, th) == (m.amps.a1 + m.amps.a2,) * 2

    def test_e_plane_split(self):
        h1, h2 = channel_gains(synthesize(TwoElementModel(0.32, math.inf), "E", E_GRID), 10)
        assert math.degrees(np.angle(h1) - np.angle(h2)) == pytest.approx(360 * 0.32 * math.sin(math.radians(10)), abs=1e-9)

    def test_nearest_grid(self):
        dp = synthesize(TwoElementModel(D, math.inf), "E", E_GRID)
        assert channel_gains(dp, 10.4) == channel_gains(dp, 10)

    def test_outside(self):
        dp = synthesize(TwoElementModel(D, math.inf), "E", make_grid(-10, 10, 1))
        with pytest.raises(ValueError):
            channel_gains(dp, 30)


class TestTap:
    def test_scale(self):
        tx = constellation(16).points
        assert equalizer_tap(2 * tx, tx) == pytest.approx(2)
        assert equalizer_tap(tx, tx) == pytest.approx(1)

    def test_mean_of_states(self):
        h1, h2 = 0.9 * np.exp(0.4j), 0.7 * np.exp(-0.2j)
        x = modulate(np.random.default_rng(1).integers(0, 2, 400_000), 16)
        s = np.random.default_rng(2).integers(1, 3, x.size)
        tap = equalizer_tap(np.where(s == 1, h1, h2) * x, x)
        assert tap == pytest.approx((h1 + h2) / 2, abs=5e-3)

    def test_zero_energy(self):
        with pytest.raises(NumericError):
            equalizer_tap([1, 2], [0, 0])

    @pytest.mark.parametrize("psi", [5.0, 20.0, 45.0])
    def test_conjugate_split(self, psi):
        h1 = 0.8 * np.exp(1j * math.radians(psi))
        x = np.repeat(constellation(16).points, 2)
        s = np.tile([1, 2], x.size // 2)
        rx = np.where(s == 1, h1, np.conj(h1)) * x
        z = rx / equalizer_tap(rx, x)
        sign = np.where(s == 1, 1, -1)
        assert np.allclose(z, x * (1 + sign * 1j * math.tan(math.radians(psi))), atol=1e-9, rtol=0)
        assert np.allclose(np.abs(z / x), 1 / math.cos(math.radians(psi)), atol=1e-9, rtol=0)


class TestRunLink:
    @pytest.mark.parametrize("alpha", [0.0, 6.02, 10.0, math.inf])
    def test_boresight(self, alpha):
        dp = synthesize(TwoElementModel(D, alpha), "E", E_GRID)
        assert run_link(dp, 0, LinkConfig(40, 48000, 16, seed=3)).ber == 0

    def test_h_plane(self):
        dp = synthesize(TwoElementModel(D, math.inf), "H", make_grid(-180, 180, 2))
        for th in range(-180, 181, 30):
            assert run_link(dp, th, LinkConfig(order=16, seed=th + 180)).ber == 0

    def test_half_ber_at_fifty_degrees(self):
        d = math.radians(50) / (math.pi * math.sin(math.radians(30)))
        dp = synthesize(TwoElementModel(d, math.inf), "E", E_GRID)
        assert differential_phase(dp)[210] / 2 == pytest.approx(50, abs=1e-9)
        assert run_link(dp, 30, LinkConfig(40, 48000, 4, seed=1)).ber == pytest.approx(0.5, abs=0.02)

    @pytest.mark.parametrize("M", [4, 16, 256])
    def test_noise_free_equals_oracle(self, M):
        bits = _enumerating_bits(M)
        for alpha in (6.02, math.inf):
            dp = synthesize(TwoElementModel(D, alpha), "E", E_GRID)
            for th in range(-180, 181, 3):
                h1, h2 = channel_gains(dp, th)
                cfg = LinkConfig(math.inf, bits.size, M)
                assert run_link(dp, th, cfg, bits=bits).ber == zero_noise_oracle(h1, h2, M), (alpha, th)

    def test_monotone_main_lobe(self):
        dp = synthesize(TwoElementModel(D, math.inf), "E", E_GRID)
        # 256-QAM stops being monotone past ~21 deg: a two-level slip can flip
        # fewer Gray bits than a one-level slip
        for M, top in ((4, 40), (16, 40), (256, 20)):
            exact = [zero_noise_oracle(*channel_gains(dp, th), M) for th in range(0, top + 1)]
            assert all(a <= b for a, b in zip(exact, exact[1:])), M
            bers = [run_link(dp, th, LinkConfig(40, 48000, M, seed=5)).ber for th in range(0, top + 1)]
            # plateaus of the noisy estimate wobble by Monte Carlo noise only
            slack = [3 * math.sqrt(max(b, 1e-6) * (1 - b) / 48000) for b in bers]
            assert all(a <= b + s for a, b, s in zip(bers, bers[1:], slack)), M

    def test_deterministic(self):
        dp = synthesize(TwoElementModel(D, 6.02), "E", E_GRID)
        cfg = LinkConfig(40, 48000, 16, SwitchPolicy(PolicyKind.RANDOM), seed=99)
        assert run_link(dp, 25, cfg) == run_link(dp, 25, cfg)

    def test_seed_matters(self):
        dp = synthesize(TwoElementModel(D, 6.02), "E", E_GRID)
        a = run_link(dp, 25, LinkConfig(seed=1))
        b = run_link(dp, 25, LinkConfig(seed=2))
        assert a.evm_rms != b.evm_rms

    def test_prbs_source(self):
        dp = synthesize(TwoElementModel(D, 10), "E", E_GRID)
        r = run_link(dp, 0, LinkConfig(order=256, bit_source="prbs11",
                                       policy=SwitchPolicy("block_alternate", 100)))
        assert r.ber == 0

    def test_error_metrics_psi10(self):
        dp = _flat_pattern(*(lambda h: (h, np.conj(h)))(np.exp(1j * math.radians(10))))
        r = run_link(dp, 0, LinkConfig(math.inf, 4800, 16, seed=0))
        assert r.phase_err_rms_deg == pytest.approx(10, abs=0.1)
        assert r.mag_err_rms == pytest.approx(1 / math.cos(math.radians(10)) - 1, abs=0.002)
        assert r.evm_rms == pytest.approx(math.tan(math.radians(10)), abs=0.005)

    def test_boresight_errors_vanish(self):
        dp = synthesize(TwoElementModel(D, math.inf), "E", E_GRID)
        r = run_link(dp, 0, LinkConfig(math.inf, 4800, 16))
        assert max(r.evm_rms, r.mag_err_rms, r.phase_err_rms_deg) < 1e-12

    def test_bad_config(self):
        with pytest.raises(ValueError):
            LinkConfig(n_bits=10, order=16)
        with pytest.raises(ValueError):
            LinkConfig(snr_db=float("nan"))

    def test_zero_gain(self):
        with pytest.raises(NumericError):
            run_link(DynamicPattern(PatternCut("E", make_grid(-1, 1, 1), [0, 1, 1]),
                                    PatternCut("E", make_grid(-1, 1, 1), [1, 1, 1])), -1, LinkConfig())


def test_256qam_oracle_not_monotone_beyond_main_edge():
    dp = synthesize(TwoElementModel(D, math.inf), "E", E_GRID)
    exact = [zero_noise_oracle(*channel_gains(dp, th), 256) for th in range(0, 41)]
    assert any(a > b for a, b in zip(exact, exact[1:]))
