import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aimcsim.tile import TileConfig, clip, quantize, s_shape_adc


class TestClip:
    def test_basic(self):
        np.testing.assert_array_equal(
            clip(np.array([-5.0, 0.3, 5.0]), -1.0, 1.0),
            np.array([-1.0, 0.3, 1.0]))

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            clip(0.0, 1.0, -1.0)


class TestQuantize:
    def test_midpoint_oracle(self):
        # 8-bit symmetric grid on [-1, 1]: step 2/254, so 0.5 -> 64/127
        # (63.5 steps rounds away from zero).
        assert quantize(0.5, 1.0, 8) == pytest.approx(64.0 / 127.0, abs=1e-15)
        assert quantize(-0.5, 1.0, 8) == pytest.approx(-64.0 / 127.0, abs=1e-15)

    def test_extremes_hit_bound_exactly(self):
        assert quantize(1.0, 1.0, 8) == 1.0
        assert quantize(-1.0, 1.0, 8) == -1.0
        assert quantize(3.7, 1.0, 8) == 1.0

    def test_zero_is_a_level(self):
        assert quantize(0.0, 1.0, 4) == 0.0
        assert quantize(1e-9, 1.0, 4) == 0.0

    def test_bits_none_only_clips(self):
        z = np.array([-2.0, -0.123456, 0.654321, 2.0])
        np.testing.assert_array_equal(
            quantize(z, 1.0, None), np.array([-1.0, -0.123456, 0.654321, 1.0]))

    def test_level_count(self):
        z = np.linspace(-1.5, 1.5, 20001)
        for bits in (2, 3, 4, 8):
            levels = np.unique(quantize(z, 1.0, bits))
            assert len(levels) == 2 ** bits - 1

    def test_step_scale_widens_grid(self):
        z = np.linspace(-1, 1, 10001)
        coarse = np.unique(quantize(z, 1.0, 8, step_scale=4.0))
        fine = np.unique(quantize(z, 1.0, 8, step_scale=1.0))
        assert len(coarse) < len(fine)
        # Doubled step at 8 bits matches the 2/254-wide grid scaled by 2
        # inside the bound.
        assert quantize(0.5, 1.0, 8, step_scale=2.0) == pytest.approx(
            32.0 / 127.0 * 2.0, abs=1e-15)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            quantize(0.0, -1.0, 8)
        with pytest.raises(ValueError):
            quantize(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            quantize(0.0, float("inf"), 8)

    @given(z=st.floats(-1e6, 1e6), bits=st.integers(2, 12))
    @settings(max_examples=200, deadline=None)
    def test_odd_symmetry(self, z, bits):
        assert quantize(-z, 10.0, bits) == -quantize(z, 10.0, bits)

    @given(z1=st.floats(-20, 20), z2=st.floats(-20, 20),
           bits=st.integers(2, 10))
    @settings(max_examples=200, deadline=None)
    def test_monotone(self, z1, z2, bits):
        lo, hi = min(z1, z2), max(z1, z2)
        assert quantize(lo, 10.0, bits) <= quantize(hi, 10.0, bits)

    @given(z=st.floats(-10, 10), bits=st.integers(2, 10))
    @settings(max_examples=200, deadline=None)
    def test_error_bounded_by_half_step(self, z, bits):
        bound = 10.0
        delta = 2.0 * bound / (2.0 ** bits - 2.0)
        q = quantize(z, bound, bits)
        assert abs(q - np.clip(z, -bound, bound)) <= delta / 2.0 + 1e-9


class TestSShape:
    def test_identity_when_flat(self):
        z = np.linspace(-10, 10, 11)
        np.testing.assert_array_equal(s_shape_adc(z, np.zeros(11)), z)

    def test_scalar_oracle(self):
        # zeta = 1/4, z = 10: gain (1 + 1/2)^2 = 9/4, response
        # (9/4)*10 / (1 + 2.5) = 45/7.
        assert s_shape_adc(10.0, 0.25) == pytest.approx(45.0 / 7.0, rel=1e-12)

    def test_small_signal_gain_above_unity(self):
        # The shared prefactor overcompensates small signals when the
        # converters saturate: slope at 0 is (1 + 2*mean|zeta|)^2.
        z = 1e-9
        out = s_shape_adc(z, np.array([0.25, 0.25]))
        assert out[0] / z == pytest.approx(2.25, rel=1e-6)

    def test_compresses_large_signals(self):
        big = s_shape_adc(100.0, 0.5)
        bigger = s_shape_adc(1000.0, 0.5)
        # Saturating: output grows far slower than input.
        assert bigger < 10 * big

    @given(z=st.floats(-100, 100), zeta=st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_odd_in_z(self, z, zeta):
        assert s_shape_adc(-z, zeta) == pytest.approx(-s_shape_adc(z, zeta),
                                                      rel=1e-12, abs=1e-12)


class TestTileConfigValidation:
    def test_defaults_valid(self):
        cfg = TileConfig()
        assert cfg.adc_bits == 8 and cfg.out_bound == 10.0

    def test_quantizing_adc_needs_finite_bound(self):
        with pytest.raises(ValueError):
            TileConfig(out_bound=float("inf"))
        TileConfig(adc_bits=None, out_bound=float("inf"))  # fine

    def test_ideal_constructor_transparent(self):
        cfg = TileConfig.ideal()
        assert cfg.dac_bits is None and cfg.adc_bits is None
        assert np.isinf(cfg.out_bound)
        assert cfg.out_noise == 0.0 and cfg.w_noise0 == 0.0
        assert cfg.ir_drop_scale == 0.0

    def test_bad_values(self):
        with pytest.raises(ValueError):
            TileConfig(dac_bits=1)
        with pytest.raises(ValueError):
            TileConfig(out_noise=-0.1)
        with pytest.raises(ValueError):
            TileConfig(v_read=0.0)
