# probfem/models.py
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from probfem.inference.priors import marginal_from_dict


class ProblemKind(str, Enum):
    PULLOUT = "pullout"
    THREE_POINT = "three_point"


class MethodKind(str, Enum):
    FEM = "fem"
    BFEM = "bfem"
    RMFEM = "rmfem"
    STATFEM = "statfem"
    EXACT = "exact"


class ChainSettings(BaseModel):
    """Random-walk Metropolis settings."""
    n_burn: int = Field(default=10000, ge=1, description="Burn-in steps with tempering and adaptation")
    n_samples: int = Field(default=10000, ge=1, description="Retained samples")
    target_acceptance: float = Field(default=0.234, gt=0, lt=1, description="Target acceptance rate")
    adaptation_exponent: float = Field(default=0.6, gt=0.5, le=1, description="Robbins-Monro step decay t^-a")
    window: int = Field(default=100, ge=1, description="Steps in the acceptance-rate window")
    adapt_covariance: bool = Field(default=False, description="Use the empirical burn-in covariance as proposal shape")

    model_config = {"extra": "forbid"}


class RmfemSettings(BaseModel):
    """Random mesh perturbation settings."""
    M: int = Field(default=100, ge=1, description="Perturbed meshes per likelihood estimate")
    p: float = Field(default=1.0, gt=0, description="Perturbation exponent on the local mesh size")
    radius: float = Field(default=0.25, ge=0, description="Perturbation radius relative to h_i^p")
    workers: int = Field(default=1, ge=1, description="Threads evaluating replicas")

    model_config = {"extra": "forbid"}


class StatfemSettings(BaseModel):
    """Log-normal hyperpriors of (rho, ell_d, sigma_d)."""
    rho_sigma: float = Field(default=0.5, gt=0, description="Log-std of rho around 1")
    ell_sigma: float = Field(default=0.5, gt=0, description="Log-std of ell_d around its center")
    sigma_d_sigma: float = Field(default=1.0, gt=0, description="Log-std of sigma_d around its center")
    ell_center: Optional[float] = Field(default=None, gt=0, description="Center of ell_d; defaults to the sensor spacing")
    sigma_d_center: Optional[float] = Field(default=None, gt=0, description="Center of sigma_d; defaults to sigma_e")

    model_config = {"extra": "forbid"}


class ExperimentConfig(BaseModel):
    """One inverse problem solved with one likelihood."""
    problem: ProblemKind = Field(description="Forward problem")
    method: MethodKind = Field(description="Likelihood model")
    h: float = Field(gt=0, description="Element size of the computational mesh")
    sigma_e: float = Field(gt=0, description="Observation noise standard deviation")
    seed: int = Field(default=0, ge=0, description="Chain seed")
    data_seed: int = Field(default=12345, ge=0, description="Seed of the observation noise")
    data_h: Optional[float] = Field(default=None, gt=0, description="Element size of the data mesh (three_point)")
    ground_truth: Optional[Dict[str, float]] = Field(default=None, description="True parameters; problem default if omitted")
    load: float = Field(default=10.0, description="End load F of the pullout bar")
    bfem_refinement_levels: int = Field(default=1, ge=1, description="Refinements of the BFEM reference mesh")
    chain: ChainSettings = Field(default_factory=ChainSettings, description="Sampler settings")
    rmfem: RmfemSettings = Field(default_factory=RmfemSettings, description="RM-FEM settings")
    statfem: StatfemSettings = Field(default_factory=StatfemSettings, description="statFEM hyperpriors")
    prior: Optional[Dict[str, Dict[str, Any]]] = Field(
        default=None,
        description="Marginals replacing the default prior, e.g. {\"EA\": {\"type\": \"lognormal\", \"mu\": 0, \"sigma\": 0.2}}",
    )
    output_dir: str = Field(default="results", description="Directory receiving the result bundle")

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def check_method(self):
        if self.method == MethodKind.EXACT and self.problem != ProblemKind.PULLOUT:
            raise ValueError("method 'exact' is only available for the pullout problem")
        for marginal in (self.prior or {}).values():
            marginal_from_dict(marginal)
        return self


class ParameterSummary(BaseModel):
    mean: float = Field(description="Posterior mean")
    std: float = Field(description="Posterior standard deviation")
    q025: float = Field(description="2.5% quantile")
    median: float = Field(description="Median")
    q975: float = Field(description="97.5% quantile")

    model_config = {"extra": "forbid"}


class ExperimentResult(BaseModel):
    """Result bundle of one run."""
    problem: ProblemKind = Field(description="Forward problem")
    method: MethodKind = Field(description="Likelihood model")
    h: float = Field(description="Element size")
    seed: int = Field(description="Chain seed")
    parameters: Dict[str, ParameterSummary] = Field(description="Posterior marginal summaries")
    ground_truth: Dict[str, float] = Field(description="True parameters")
    acceptance_rate: float = Field(description="Acceptance rate after burn-in")
    n_failed: int = Field(default=0, description="Likelihood evaluations that failed")
    data_hash: str = Field(description="sha256 of the observation vector")
    config_hash: str = Field(description="sha256 of the canonical config JSON")
    runtime_seconds: float = Field(default=0.0, description="Wall-clock time")
    output_dir: str = Field(description="Bundle directory")
    files: List[str] = Field(default_factory=list, description="Files written to the bundle")
    extras: Dict[str, Any] = Field(default_factory=dict, description="Problem-specific diagnostics")

    model_config = {"extra": "forbid"}


class MethodMetrics(BaseModel):
    """Comparison metrics of one bundle."""
    label: str = Field(description="method@h")
    method: MethodKind = Field(description="Likelihood model")
    h: float = Field(description="Element size")
    covers_truth: bool = Field(description="Ground truth inside the 95% credible region")
    overconfident: bool = Field(description="Ground truth outside the 95% credible region")
    mean_error: Dict[str, float] = Field(description="Posterior mean minus ground truth")
    mean_error_norm: float = Field(description="Euclidean norm of the mean error")
    std_ratio: Dict[str, float] = Field(default_factory=dict, description="Marginal std over exact-posterior std")
    mean_error_in_exact_std: Dict[str, float] = Field(
        default_factory=dict, description="|mean - exact mean| in exact-posterior stds")
    converging: Optional[bool] = Field(default=None, description="Mean error non-increasing as h decreases")

    model_config = {"extra": "forbid"}
