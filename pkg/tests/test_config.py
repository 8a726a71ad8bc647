import pytest

from aimcsim.config import (ConfigKeyError, ConfigValueError, bundle_with_overrides,
                            default_bundle, load_config)
from aimcsim.pcm import PcmModelParams
from aimcsim.tile import TileConfig


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestDefaults:
    def test_default_bundle_matches_dataclass_defaults(self):
        b = default_bundle()
        assert b.tile == TileConfig()
        assert b.pcm == PcmModelParams()
        assert b.faults is None
        assert b.run == {} and b.hwa == {}
        assert len(b.config_hash) == 16

    def test_empty_file_equals_defaults(self, tmp_path):
        b = load_config(write(tmp_path, ""))
        assert b.tile == TileConfig()
        assert b.config_hash == default_bundle().config_hash


class TestParsing:
    def test_standard_table_names(self, tmp_path):
        b = load_config(write(tmp_path, """
[tile]
inp_res = 8
out_res = 8
out_noise = 0.04
out_bound = 10.0
w_noise = 0.0175
max_input_size = 512
max_output_size = 512
v_read = 0.2

[pcm]
g_max = 25.0
"""))
        t = b.tile
        assert t.dac_bits == 8 and t.adc_bits == 8
        assert t.out_noise == 0.04 and t.out_bound == 10.0
        assert t.w_noise0 == 0.0175
        assert t.max_rows == 512 and t.max_cols == 512
        assert t.v_read == 0.2
        assert b.pcm.g_max == 25.0

    def test_bits_accept_none(self, tmp_path):
        b = load_config(write(tmp_path, "[tile]\ninp_res = none\nout_res = off\n"))
        assert b.tile.dac_bits is None
        assert b.tile.adc_bits is None

    def test_ir_ratio_is_reciprocal_gamma(self, tmp_path):
        b = load_config(write(tmp_path, "[tile]\nir_drop_g_ratio = 571428.57\n"))
        assert b.tile.ir_gamma == pytest.approx(1.0 / 571428.57)

    def test_ratio_conflicts_with_gamma(self, tmp_path):
        p = write(tmp_path, "[tile]\nir_gamma = 1.75e-6\nir_drop_g_ratio = 571428.57\n")
        with pytest.raises(ConfigKeyError, match="conflicts"):
            load_config(p)

    def test_fit_parsing(self, tmp_path):
        b = load_config(write(
            tmp_path, "[pcm]\nmu_nu_fit = -0.0155, 0.0244, 0.049, 0.1\n"))
        fit = b.pcm.mu_nu_fit
        assert (fit.a, fit.b) == (-0.0155, 0.0244)
        assert fit(1.0) == pytest.approx(0.049)

    def test_fit_needs_four_numbers(self, tmp_path):
        with pytest.raises(ConfigValueError, match="4 numbers"):
            load_config(write(tmp_path, "[pcm]\nmu_nu_fit = 1, 2, 3\n"))

    def test_faults_section(self, tmp_path):
        b = load_config(write(
            tmp_path, "[faults]\nstuck_reset = 0.01\nstuck_set = 0.002\n"))
        assert b.faults is not None
        assert b.faults.frac_stuck_reset == 0.01
        assert b.faults.frac_stuck_set == 0.002
        assert b.faults.frac_stuck_random == 0.0

    def test_run_and_hwa_sections(self, tmp_path):
        b = load_config(write(tmp_path, """
[run]
seed = 7
t_eval = 3600
drift_compensation = yes

[hwa]
dataset = spirals
dims = 2, 576, 3
eval_times = 1.0, 3600.0
distill = false
"""))
        assert b.run == {"seed": 7, "t_eval": 3600.0, "drift_compensation": True}
        assert b.hwa["dims"] == (2, 576, 3)
        assert b.hwa["eval_times"] == (1.0, 3600.0)
        assert b.hwa["distill"] is False


class TestStrictness:
    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigKeyError, match=r"\[devices\]"):
            load_config(write(tmp_path, "[devices]\ng_max = 25\n"))

    def test_unknown_key_names_the_key(self, tmp_path):
        with pytest.raises(ConfigKeyError, match="out_resolution"):
            load_config(write(tmp_path, "[tile]\nout_resolution = 8\n"))

    def test_bad_float(self, tmp_path):
        with pytest.raises(ConfigValueError, match="banana"):
            load_config(write(tmp_path, "[tile]\nout_noise = banana\n"))

    def test_bad_bool(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[run]\ndrift_compensation = maybe\n"))

    def test_invalid_model_value_reported_as_value_error(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "[pcm]\ng_max = -5\n"))

    def test_malformed_ini(self, tmp_path):
        with pytest.raises(ConfigValueError):
            load_config(write(tmp_path, "not an ini file at all\n"))


class TestHashing:
    def test_same_content_same_hash(self, tmp_path):
        a = load_config(write(tmp_path, "[tile]\nout_noise = 0.1\n", "a.ini"))
        b = load_config(write(tmp_path, "[tile]\nout_noise = 0.1\n", "b.ini"))
        assert a.config_hash == b.config_hash

    def test_value_changes_hash(self, tmp_path):
        a = load_config(write(tmp_path, "[tile]\nout_noise = 0.1\n", "a.ini"))
        b = load_config(write(tmp_path, "[tile]\nout_noise = 0.2\n", "b.ini"))
        assert a.config_hash != b.config_hash

    def test_key_order_does_not_matter(self, tmp_path):
        a = load_config(write(tmp_path, "[tile]\ninp_res = 4\nout_res = 6\n", "a.ini"))
        b = load_config(write(tmp_path, "[tile]\nout_res = 6\ninp_res = 4\n", "b.ini"))
        assert a.config_hash == b.config_hash

    def test_threads_excluded_from_hash(self, tmp_path):
        a = load_config(write(tmp_path, "[run]\nseed = 1\nthreads = 1\n", "a.ini"))
        b = load_config(write(tmp_path, "[run]\nseed = 1\nthreads = 8\n", "b.ini"))
        assert a.config_hash == b.config_hash
        assert a.run["threads"] == 1 and b.run["threads"] == 8


class TestOverrides:
    def test_override_updates_run_and_hash(self):
        base = default_bundle()
        b = bundle_with_overrides(base, seed=3, t_eval=3600.0)
        assert b.run == {"seed": 3, "t_eval": 3600.0}
        assert b.config_hash != base.config_hash
        assert b.tile is base.tile

    def test_none_overrides_ignored(self):
        base = default_bundle()
        b = bundle_with_overrides(base, seed=None, repeats=None)
        assert b.run == {}

    def test_override_hash_deterministic(self):
        h1 = bundle_with_overrides(default_bundle(), seed=5).config_hash
        h2 = bundle_with_overrides(default_bundle(), seed=5).config_hash
        h3 = bundle_with_overrides(default_bundle(), seed=6).config_hash
        assert h1 == h2 != h3

    def test_threads_override_does_not_change_hash(self):
        base = default_bundle()
        a = bundle_with_overrides(base, seed=1, threads=1)
        b = bundle_with_overrides(base, seed=1, threads=16)
        assert a.config_hash == b.config_hash
