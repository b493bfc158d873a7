# probfem/tests/test_config.py
import json

import pytest

from probfem.config import Config, _deep_merge, available_presets, preset_name
from probfem.inference.sampler import ChainConfig
from probfem.likelihoods.bfem import BfemConfig
from probfem.likelihoods.rmfem import PseudomarginalConfig
from probfem.models import MethodKind, ProblemKind


class TestDeepMerge:
    """Test merging of nested override dicts."""

    def test_nested_keys_merged(self):
        """Test that nested dicts keep keys the override does not name."""
        merged = _deep_merge({"chain": {"n_burn": 10, "n_samples": 20}}, {"chain": {"n_burn": 5}})
        assert merged == {"chain": {"n_burn": 5, "n_samples": 20}}

    def test_scalars_replaced(self):
        assert _deep_merge({"h": 0.2}, {"h": 0.1}) == {"h": 0.1}

    def test_base_not_mutated(self):
        base = {"chain": {"n_burn": 10}}
        _deep_merge(base, {"chain": {"n_burn": 1}})
        assert base == {"chain": {"n_burn": 10}}


class TestPresets:
    """Test the built-in presets."""

    def test_available_presets(self):
        assert available_presets() == ["pullout", "three-point", "three-point-paper"]

    def test_preset_name(self):
        assert preset_name("three_point") == "three-point"
        assert preset_name("three_point", paper_scale=True) == "three-point-paper"

    @pytest.mark.parametrize("name", ["pullout", "three-point", "three-point-paper"])
    def test_presets_are_valid(self, name):
        """Test that every shipped preset validates."""
        config = Config.load_preset(name)
        assert config.experiment.h > 0

    def test_pullout_preset_values(self):
        exp = Config.load_preset("pullout").experiment
        assert exp.problem == ProblemKind.PULLOUT
        assert exp.sigma_e == 1e-3
        assert exp.load == 10.0

    def test_three_point_preset_values(self):
        exp = Config.load_preset("three-point").experiment
        assert exp.problem == ProblemKind.THREE_POINT
        assert exp.sigma_e == 1e-4
        assert exp.h == 0.2

    def test_missing_preset(self):
        with pytest.raises(FileNotFoundError, match="Preset not found: nope"):
            Config.load_preset("nope")

    def test_preset_with_overrides(self):
        config = Config.load_preset("pullout", {"method": "bfem", "chain": {"n_burn": 7}})
        assert config.experiment.method == MethodKind.BFEM
        assert config.experiment.chain.n_burn == 7
        assert config.experiment.chain.n_samples == 10000


class TestConfigLoading:
    """Test configuration loading from files."""

    def test_file_with_preset(self, tmp_path):
        """Test that a file naming a preset is merged over it."""
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({"preset": "pullout", "h": 0.25, "method": "statfem"}))
        exp = Config.load(path).experiment
        assert exp.h == 0.25
        assert exp.method == MethodKind.STATFEM
        assert exp.sigma_e == 1e-3

    def test_complete_file(self, tmp_path):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({"problem": "pullout", "method": "exact", "h": 0.5, "sigma_e": 0.01}))
        exp = Config.load(path).experiment
        assert exp.method == MethodKind.EXACT
        assert exp.chain.n_burn == 10000

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Config file not found"):
            Config.load(tmp_path / "nonexistent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(ValueError, match="Invalid JSON"):
            Config.load(path)

    def test_non_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ValueError, match="must contain a JSON object"):
            Config.load(path)

    def test_unknown_key_rejected(self, tmp_path):
        """Test that typos in experiment files are reported."""
        path = tmp_path / "typo.json"
        path.write_text(json.dumps({"preset": "pullout", "n_burn": 10}))
        with pytest.raises(ValueError, match="n_burn"):
            Config.load(path)

    def test_exact_rejected_for_three_point(self):
        with pytest.raises(ValueError, match="only available for the pullout problem"):
            Config.load_preset("three-point", {"method": "exact"})


class TestOverrides:
    """Test command-line overrides."""

    def test_seed_output_method(self):
        config = Config.load_preset("pullout").with_overrides(seed=9, output_dir="out/x", method="rmfem")
        assert config.experiment.seed == 9
        assert config.experiment.output_dir == "out/x"
        assert config.experiment.method == MethodKind.RMFEM

    def test_paper_scale_three_point(self):
        config = Config.load_preset("three-point", {"method": "bfem"}).with_overrides(paper_scale=True)
        exp = config.experiment
        assert exp.h == 0.05
        assert exp.data_h == 0.002
        assert exp.chain.n_samples == 10000
        assert exp.method == MethodKind.BFEM

    def test_paper_scale_without_preset(self):
        """Test that problems without a paper-scale preset are unchanged."""
        config = Config.load_preset("pullout")
        assert config.with_overrides(paper_scale=True).experiment.model_dump() == config.experiment.model_dump()

    def test_original_unchanged(self):
        config = Config.load_preset("pullout")
        config.with_overrides(seed=4)
        assert config.experiment.seed == 0


class TestDerivedConfigs:
    """Test the dataclass settings handed to the numerical layers."""

    def test_chain_config(self):
        config = Config.load_preset("pullout", {"seed": 3, "chain": {"adapt_covariance": True}})
        chain = config.chain_config()
        assert isinstance(chain, ChainConfig)
        assert chain.seed == 3
        assert chain.adapt_covariance is True
        assert chain.target_acceptance == 0.234

    def test_pseudomarginal_config(self):
        config = Config.load_preset("three-point", {"rmfem": {"p": 1.5}})
        pm = config.pseudomarginal_config()
        assert isinstance(pm, PseudomarginalConfig)
        assert pm.M == 10
        assert pm.p == 1.5

    def test_bfem_config(self):
        config = Config.load_preset("pullout", {"bfem_refinement_levels": 2})
        assert config.bfem_config() == BfemConfig(refinement_levels=2)

    def test_statfem_prior_config(self):
        config = Config.load_preset("pullout", {"statfem": {"ell_center": 0.5}})
        assert config.statfem_prior_config().ell_center == 0.5
