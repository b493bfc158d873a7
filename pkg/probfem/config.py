# probfem/config.py
import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from probfem.inference.sampler import ChainConfig
from probfem.likelihoods.bfem import BfemConfig
from probfem.likelihoods.rmfem import PseudomarginalConfig
from probfem.likelihoods.statfem import StatfemPriorConfig
from probfem.models import ExperimentConfig

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"


def _deep_merge(base: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Nested dicts are merged key by key, everything else is replaced."""
    merged = copy.deepcopy(base)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def preset_name(problem: str, paper_scale: bool = False) -> str:
    name = problem.replace("_", "-")
    return f"{name}-paper" if paper_scale else name


def available_presets():
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


class Config:
    """
    Experiment configuration with preset support.

    Supports loading from:
    - Preset configurations (pullout, three-point, three-point-paper)
    - Experiment files naming a preset plus overrides
    - Complete experiment files
    """

    def __init__(self, preset=None, overrides=None):
        """
        Initialize configuration.

        Args:
            preset: Optional preset name to load
            overrides: Optional dict deep-merged over the preset

        Raises:
            ValueError: If the merged settings are not a valid experiment
        """
        data = self._load_preset(preset, overrides) if preset else dict(overrides or {})
        self.experiment = ExperimentConfig(**data)

    @staticmethod
    def _load_preset(name: str, overrides=None) -> Dict[str, Any]:
        """
        Load preset data merged with overrides.

        Raises:
            FileNotFoundError: If preset file doesn't exist
            ValueError: If the preset is not valid JSON
        """
        preset_file = PRESET_DIR / f"{name}.json"
        if not preset_file.exists():
            raise FileNotFoundError(f"Preset not found: {name}")
        try:
            with open(preset_file, encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in preset {name}: {e}")
        return _deep_merge(data, overrides)

    @staticmethod
    def load_preset(name: str, overrides=None) -> "Config":
        return Config(preset=name, overrides=overrides)

    @classmethod
    def load(cls, path: Path) -> "Config":
        """
        Load an experiment file.

        A file with a "preset" key is merged over that preset; other files
        must be complete experiment configurations.

        Raises:
            FileNotFoundError: If the file does not exist
            ValueError: If JSON is invalid or keys are unknown
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in config file {path}: {e}")
        if not isinstance(data, dict):
            raise ValueError(f"Config file {path} must contain a JSON object")

        preset = data.pop("preset", None)
        if preset:
            return cls.load_preset(preset, data)
        return cls(overrides=data)

    def with_overrides(self, paper_scale: bool = False, seed: Optional[int] = None,
                       output_dir: Optional[str] = None, method: Optional[str] = None) -> "Config":
        """Copy with command-line overrides applied."""
        data = self.experiment.model_dump(mode="json", exclude_unset=False)
        if paper_scale:
            name = preset_name(data["problem"], paper_scale=True)
            if (PRESET_DIR / f"{name}.json").exists():
                scaled = self._load_preset(name)
                scaled.pop("method", None)
                data = _deep_merge(data, scaled)
            else:
                logger.info(f"No paper-scale preset for {data['problem']}; settings unchanged")
        if seed is not None:
            data["seed"] = seed
        if output_dir is not None:
            data["output_dir"] = output_dir
        if method is not None:
            data["method"] = method
        return Config(overrides=data)

    def chain_config(self) -> ChainConfig:
        return ChainConfig(seed=self.experiment.seed, **self.experiment.chain.model_dump())

    def pseudomarginal_config(self) -> PseudomarginalConfig:
        return PseudomarginalConfig(**self.experiment.rmfem.model_dump())

    def bfem_config(self) -> BfemConfig:
        return BfemConfig(refinement_levels=self.experiment.bfem_refinement_levels)

    def statfem_prior_config(self) -> StatfemPriorConfig:
        return StatfemPriorConfig(**self.experiment.statfem.model_dump())
