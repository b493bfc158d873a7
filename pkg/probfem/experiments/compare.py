# probfem/experiments/compare.py
"""Cross-method comparison of result bundles."""
import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import gaussian_kde

from probfem.errors import DataMismatchError
from probfem.models import MethodKind, MethodMetrics

logger = logging.getLogger(__name__)

CREDIBLE_LEVEL = 0.95
_KDE_POINTS = 4000


@dataclass
class Bundle:
    """Samples and provenance of one run, loaded from its directory."""
    path: Path
    method: str
    h: float
    data_hash: str
    ground_truth: Dict[str, float]
    names: List[str]
    samples: np.ndarray

    @property
    def label(self) -> str:
        return f"{self.method}@h={self.h:g}"

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, self.names.index(name)]


def load_bundle(path) -> Bundle:
    """Read meta.json and chain.csv of a result directory.

    Raises:
        FileNotFoundError: if the directory lacks either file
    """
    path = Path(path)
    meta_file, chain_file = path / "meta.json", path / "chain.csv"
    for f in (meta_file, chain_file):
        if not f.exists():
            raise FileNotFoundError(f"Bundle file not found: {f}")
    with open(meta_file, encoding="utf-8") as f:
        meta = json.load(f)
    with open(chain_file, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    names = [n for n in header if n not in ("log_likelihood", "log_posterior")]
    return Bundle(path=path, method=meta["method"], h=float(meta["h"]), data_hash=meta["data_hash"],
                  ground_truth={k: float(v) for k, v in meta["ground_truth"].items()},
                  names=names, samples=rows[:, :len(names)])


def _transform(values: np.ndarray) -> np.ndarray:
    """Log of strictly positive columns, identity elsewhere."""
    out = np.array(values, dtype=float)
    positive = np.all(out > 0, axis=0)
    out[..., positive] = np.log(out[..., positive])
    return out


def credible_region_contains(samples: np.ndarray, point: np.ndarray, level: float = CREDIBLE_LEVEL,
                             seed: int = 0) -> bool:
    """True if point lies in the highest-density region holding `level` of the posterior mass.

    The density is a Gaussian KDE of (a subsample of) the samples; point is
    inside when fewer than `level` of the samples have a lower density.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    point = np.asarray(point, dtype=float).reshape(1, -1)
    if samples.shape[0] > _KDE_POINTS:
        idx = np.random.default_rng(seed).choice(samples.shape[0], _KDE_POINTS, replace=False)
        samples = samples[idx]
    both = _transform(np.vstack([samples, point]))
    samples, point = both[:-1], both[-1:]
    if np.any(np.std(samples, axis=0) == 0):
        return bool(np.allclose(samples[0], point[0]))
    kde = gaussian_kde(samples.T)
    density_at_point = kde(point.T)[0]
    densities = kde(samples.T)
    return bool(np.mean(densities > density_at_point) < level)


def compare_posteriors(bundles: Sequence[Bundle]) -> List[MethodMetrics]:
    """Per-bundle coverage, mean error, std ratios and convergence flags.

    Raises:
        ValueError: for fewer than two bundles
        DataMismatchError: if the bundles were sampled on different data
    """
    if len(bundles) < 2:
        raise ValueError(f"at least two bundles are required, got {len(bundles)}")
    hashes = {b.data_hash for b in bundles}
    if len(hashes) > 1:
        raise DataMismatchError(f"bundles use different observation data: {sorted(hashes)}")

    exact = next((b for b in bundles if b.method == MethodKind.EXACT.value), None)
    errors: Dict[int, float] = {}
    metrics = []
    for i, bundle in enumerate(bundles):
        names = [n for n in bundle.ground_truth if n in bundle.names]
        truth = np.array([bundle.ground_truth[n] for n in names])
        samples = np.column_stack([bundle.column(n) for n in names])
        mean_error = {n: float(samples[:, j].mean() - truth[j]) for j, n in enumerate(names)}
        covers = credible_region_contains(samples, truth)
        std_ratio, in_exact_std = {}, {}
        if exact is not None:
            for n in names:
                exact_column = exact.column(n)
                exact_std = float(np.std(exact_column, ddof=1))
                std_ratio[n] = float(np.std(bundle.column(n), ddof=1) / exact_std)
                in_exact_std[n] = float(abs(bundle.column(n).mean() - exact_column.mean()) / exact_std)
        errors[i] = float(np.linalg.norm(list(mean_error.values())))
        metrics.append(MethodMetrics(
            label=bundle.label,
            method=MethodKind(bundle.method),
            h=bundle.h,
            covers_truth=covers,
            overconfident=not covers,
            mean_error=mean_error,
            mean_error_norm=errors[i],
            std_ratio=std_ratio,
            mean_error_in_exact_std=in_exact_std,
        ))

    for method in {b.method for b in bundles}:
        members = sorted((i for i, b in enumerate(bundles) if b.method == method),
                         key=lambda i: -bundles[i].h)
        if len(members) < 2:
            continue
        sequence = [errors[i] for i in members]
        converging = all(b <= a for a, b in zip(sequence[:-1], sequence[1:]))
        for i in members:
            metrics[i].converging = converging
    return metrics


def format_metrics_markdown(metrics: Sequence[MethodMetrics]) -> str:
    """Markdown table of comparison metrics."""
    lines = [
        "| Method | Covers truth | Mean error norm | Std ratio vs exact | Mean shift (exact std) | Converging |",
        "|--------|--------------|-----------------|--------------------|------------------------|------------|",
    ]
    for m in metrics:
        ratio = ", ".join(f"{k}={v:.2f}" for k, v in m.std_ratio.items()) or "-"
        shift = ", ".join(f"{k}={v:.2f}" for k, v in m.mean_error_in_exact_std.items()) or "-"
        converging = "-" if m.converging is None else ("yes" if m.converging else "no")
        lines.append(f"| {m.label} | {'yes' if m.covers_truth else 'no'} | {m.mean_error_norm:.4g} | "
                     f"{ratio} | {shift} | {converging} |")
    return "\n".join(lines)


def compare_directories(paths: Sequence, output: Optional[Path] = None) -> List[MethodMetrics]:
    """Load bundles, compare them and optionally write metrics.json and metrics.md."""
    metrics = compare_posteriors([load_bundle(p) for p in paths])
    if output is not None:
        output = Path(output)
        output.mkdir(parents=True, exist_ok=True)
        with open(output / "metrics.json", "w", encoding="utf-8") as f:
            json.dump([m.model_dump(mode="json") for m in metrics], f, indent=2)
        with open(output / "metrics.md", "w", encoding="utf-8") as f:
            f.write(format_metrics_markdown(metrics) + "\n")
        logger.info(f"Wrote comparison of {len(metrics)} bundles to {output}")
    return metrics
