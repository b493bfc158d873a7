# probfem/report_generator.py
"""Result bundle writer for posterior sampling runs.

This module writes JSON, CSV and Markdown outputs of a finished chain:
- summary.json and meta.json with posterior statistics and provenance
- marginals/<param>.csv fixed-bin histograms over the prior range
- summary.md with text histograms of every marginal
"""
import csv
import json
import math
from dataclasses import asdict, is_dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import gaussian_kde

from probfem import __version__
from probfem.inference.sampler import Chain

MARGINAL_BINS = 50
KDE_GRID = 100


def _to_serializable(obj: Any) -> Any:
    """Convert object to JSON-serializable format."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _to_serializable(v) for k, v in asdict(obj).items()}
    elif isinstance(obj, dict):
        return {str(k): _to_serializable(v) for k, v in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [_to_serializable(item) for item in obj]
    elif isinstance(obj, np.ndarray):
        return _to_serializable(obj.tolist())
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, Path):
        return str(obj)
    elif isinstance(obj, float) and not math.isfinite(obj):
        return None
    elif hasattr(obj, "model_dump"):
        return _to_serializable(obj.model_dump(mode="json"))
    return obj


def _generate_histogram(values: Sequence[float], bins: int = 20, width: int = 40,
                        value_range: Optional[tuple] = None) -> List[str]:
    """Generate a text-based histogram.

    Args:
        values: Sample values
        bins: Number of bins
        width: Maximum width of the bars
        value_range: Optional (min, max); defaults to the data range

    Returns:
        List of strings representing the histogram
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return ["  (No data)"]
    lo, hi = value_range if value_range else (values.min(), values.max())
    if lo == hi:
        return [f"  All values: {lo:.4g} (count: {values.size})"]

    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    max_count = counts.max() if counts.max() > 0 else 1
    lines = []
    for count, start, end in zip(counts, edges[:-1], edges[1:]):
        bar = "█" * int(count / max_count * width)
        lines.append(f"  {start:10.4g} - {end:10.4g} | {bar} ({count})")
    return lines


def _calculate_stats(values: Sequence[float]) -> Dict[str, float]:
    """Calculate statistical summary for a list of values."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return {"count": 0, "min": 0.0, "max": 0.0, "mean": 0.0, "std": 0.0, "median": 0.0}
    q025, median, q975 = np.quantile(values, [0.025, 0.5, 0.975])
    return {
        "count": int(values.size),
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
        "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "median": float(median),
        "q025": float(q025),
        "q975": float(q975),
    }


def write_json(data: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_to_serializable(data), f, indent=2, ensure_ascii=False)
    return path


def write_marginals(chain: Chain, bounds: Sequence[tuple], directory: Path,
                    bins: int = MARGINAL_BINS) -> List[Path]:
    """One CSV per parameter: bin_left, bin_right, count over the prior range."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, (name, (lo, hi)) in enumerate(zip(chain.parameter_names, bounds)):
        counts, edges = np.histogram(chain.samples[:, i], bins=bins, range=(lo, hi))
        path = directory / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["bin_left", "bin_right", "count"])
            for left, right, count in zip(edges[:-1], edges[1:], counts):
                writer.writerow([repr(float(left)), repr(float(right)), int(count)])
        paths.append(path)
    return paths


def write_kde_grid(samples: np.ndarray, names: Sequence[str], path: Path,
                   grid: int = KDE_GRID) -> Path:
    """Gaussian KDE of two parameters on a grid x grid lattice over the sample range."""
    samples = np.asarray(samples, dtype=float)
    lo, hi = samples.min(axis=0), samples.max(axis=0)
    pad = 0.1 * (hi - lo)
    axes = [np.linspace(lo[i] - pad[i], hi[i] + pad[i], grid) for i in range(2)]
    X, Y = np.meshgrid(*axes, indexing="ij")
    density = gaussian_kde(samples.T)(np.vstack([X.ravel(), Y.ravel()]))
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([names[0], names[1], "density"])
        for x, y, d in zip(X.ravel(), Y.ravel(), density):
            writer.writerow([repr(float(x)), repr(float(y)), repr(float(d))])
    return path


def write_table(path: Path, header: Sequence[str], rows: Sequence[Sequence[float]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return path


class ReportGenerator:
    """Generates summary reports of a finished chain in JSON and Markdown."""

    def __init__(self, experiment: Any, chain: Chain, ground_truth: Dict[str, float],
                 bounds: Sequence[tuple], extras: Optional[Dict[str, Any]] = None):
        """Initialize the report generator.

        Args:
            experiment: ExperimentConfig of the run
            chain: Finished chain
            ground_truth: True forward parameters
            bounds: Prior range of every chain parameter, for histograms
            extras: Problem-specific diagnostics
        """
        self.experiment = experiment
        self.chain = chain
        self.ground_truth = ground_truth
        self.bounds = list(bounds)
        self.extras = extras or {}
        self.timestamp = datetime.now()

    def generate_report_data(self) -> Dict[str, Any]:
        """Structured summary of the run."""
        summary = self.chain.summary()
        return {
            "meta": {
                "generated": self.timestamp.isoformat(),
                "tool_version": __version__,
            },
            "experiment": _to_serializable(self.experiment),
            "ground_truth": self.ground_truth,
            "parameters": summary["parameters"],
            "statistics": {
                name: _calculate_stats(self.chain.samples[:, i])
                for i, name in enumerate(self.chain.parameter_names)
            },
            "sampler": {
                "acceptance_rate": summary["acceptance_rate"],
                "final_burn_in_acceptance": summary["final_burn_in_acceptance"],
                "final_scale": summary["final_scale"],
                "window_acceptance": self.chain.window_acceptance,
                "proposal_cov": self.chain.proposal_cov,
                "n_failed": self.chain.n_failed,
                "seed": self.chain.seed,
            },
            "extras": self.extras,
        }

    def save_json(self, output_path: Path) -> Path:
        return write_json(self.generate_report_data(), output_path)

    def save_markdown(self, output_path: Path) -> Path:
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write("\n".join(self._generate_markdown_content()))
        return output_path

    def _generate_markdown_content(self) -> List[str]:
        return self._md_header() + self._md_parameters() + self._md_histograms() + self._md_footer()

    def _md_header(self) -> List[str]:
        exp = self.experiment
        return [
            f"# Posterior summary: {exp.problem.value} / {exp.method.value}",
            "",
            f"- Mesh size h: {exp.h}",
            f"- Noise sigma_e: {exp.sigma_e}",
            f"- Chain seed: {exp.seed}, data seed: {exp.data_seed}",
            f"- Samples: {self.chain.n_samples} after {exp.chain.n_burn} burn-in steps",
            f"- Acceptance rate: {self.chain.acceptance_rate:.3f}",
            "",
        ]

    def _md_parameters(self) -> List[str]:
        lines = [
            "## Parameters",
            "",
            "| Parameter | Truth | Mean | Std | 2.5% | 97.5% |",
            "|-----------|-------|------|-----|------|-------|",
        ]
        for name, stats in self.chain.summary()["parameters"].items():
            truth = self.ground_truth.get(name)
            truth_text = f"{truth:.4g}" if truth is not None else "-"
            lines.append(f"| {name} | {truth_text} | {stats['mean']:.4g} | {stats['std']:.3g} | "
                         f"{stats['q025']:.4g} | {stats['q975']:.4g} |")
        lines.append("")
        return lines

    def _md_histograms(self) -> List[str]:
        lines = ["## Marginals", ""]
        for i, name in enumerate(self.chain.parameter_names):
            lines.append(f"### {name}")
            lines.append("```")
            lines.extend(_generate_histogram(self.chain.samples[:, i], bins=20))
            lines.append("```")
            lines.append("")
        return lines

    def _md_footer(self) -> List[str]:
        return ["---", f"Generated {self.timestamp.isoformat(timespec='seconds')} by probfem {__version__}", ""]
