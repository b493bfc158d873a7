# probfem/inference/priors.py
"""Independent log-normal and uniform priors with an optional joint constraint."""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

LOG_SQRT_2PI = 0.5 * float(np.log(2.0 * np.pi))


def lognormal_logpdf(x, mu: float, sigma: float):
    """log density of X with log X ~ N(mu, sigma^2); -inf for x <= 0."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.log(x)
        out = -log_x - np.log(sigma) - LOG_SQRT_2PI - 0.5 * ((log_x - mu) / sigma) ** 2
    out = np.where(x > 0, out, -np.inf)
    return float(out) if out.ndim == 0 else out


def uniform_logpdf(x, a: float, b: float):
    """log density of U(a, b); -inf outside [a, b]."""
    if not b > a:
        raise ValueError(f"uniform support must satisfy a < b, got [{a}, {b}]")
    x = np.asarray(x, dtype=float)
    out = np.where((x >= a) & (x <= b), -np.log(b - a), -np.inf)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LogNormal:
    """log X ~ N(mu, sigma^2)."""
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def dist(self):
        return stats.lognorm(s=self.sigma, scale=np.exp(self.mu))

    @property
    def mean(self) -> float:
        return float(np.exp(self.mu + 0.5 * self.sigma ** 2))

    @property
    def variance(self) -> float:
        return float((np.exp(self.sigma ** 2) - 1.0) * np.exp(2 * self.mu + self.sigma ** 2))

    def logpdf(self, x):
        return lognormal_logpdf(x, self.mu, self.sigma)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.lognormal(self.mu, self.sigma, size=size)

    def bounds(self):
        """Range used for histograms: the central 99.9% interval."""
        return tuple(float(v) for v in self.dist.ppf([0.0005, 0.9995]))


@dataclass(frozen=True)
class Uniform:
    """U(a, b)."""
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"uniform support must satisfy a < b, got [{self.a}, {self.b}]")

    @property
    def dist(self):
        return stats.uniform(loc=self.a, scale=self.b - self.a)

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def logpdf(self, x):
        return uniform_logpdf(x, self.a, self.b)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.uniform(self.a, self.b, size=size)

    def bounds(self):
        return float(self.a), float(self.b)


Marginal = Union[LogNormal, Uniform]


def marginal_from_dict(data: dict) -> Marginal:
    """Build a marginal from {"type": "lognormal", "mu": .., "sigma": ..} or {"type": "uniform", "a": .., "b": ..}."""
    kind = data.get("type")
    keys = {"lognormal": ("mu", "sigma"), "uniform": ("a", "b")}.get(kind)
    if keys is None:
        raise ValueError(f"Unknown prior type: {kind}")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValueError(f"{kind} prior needs {missing}")
    first, second = (float(data[k]) for k in keys)
    return LogNormal(first, second) if kind == "lognormal" else Uniform(first, second)


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """Product of independent marginals, optionally conditioned on a predicate.

    The conditioned prior is only known up to a constant; the sampler never
    needs the constant.
    """
    names: tuple
    marginals: tuple
    predicate: Optional[Callable[[np.ndarray], bool]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.names) != len(self.marginals):
            raise ValueError(f"{len(self.names)} names for {len(self.marginals)} marginals")
        if not self.names:
            raise ValueError("a prior needs at least one parameter")

    @property
    def dim(self) -> int:
        return len(self.marginals)

    def logpdf(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} parameters, got shape {x.shape}")
        total = 0.0
        for value, marginal in zip(x, self.marginals):
            total += marginal.logpdf(value)
            if total == -np.inf:
                return -np.inf
        if self.predicate is not None and not self.predicate(x):
            return -np.inf
        return float(total)

    def mean(self) -> np.ndarray:
        return np.array([m.mean for m in self.marginals])

    def covariance(self) -> np.ndarray:
        """Diagonal covariance of the unconditioned marginals."""
        return np.diag([m.variance for m in self.marginals])

    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.covariance()))

    def bounds(self) -> List[tuple]:
        return [m.bounds() for m in self.marginals]

    def sample(self, rng: np.random.Generator, size: Optional[int] = None,
               max_draws: int = 10 ** 6) -> np.ndarray:
        """Independent draws, rejecting those that fail the predicate.

        Raises:
            RuntimeError: if max_draws candidates yield too few accepted draws
        """
        count = 1 if size is None else int(size)
        accepted = []
        drawn = 0
        while len(accepted) < count:
            if drawn >= max_draws:
                raise RuntimeError(f"only {len(accepted)} of {count} prior draws accepted in {max_draws} tries")
            batch = min(max(2 * (count - len(accepted)), 16), max_draws - drawn)
            candidates = np.column_stack([m.sample(rng, size=batch) for m in self.marginals])
            drawn += batch
            for candidate in candidates:
                if self.predicate is None or self.predicate(candidate):
                    accepted.append(candidate)
                    if len(accepted) == count:
                        break
        out = np.array(accepted)
        return out[0] if size is None else out

    def join(self, other: "PriorSpec") -> "PriorSpec":
        """Independent product prior over (self, other) parameters."""
        n = self.dim
        left, right = self.predicate, other.predicate
        if left is None and right is None:
            predicate = None
        else:
            def predicate(x):
                return ((left is None or left(x[:n])) and (right is None or right(x[n:])))
        return PriorSpec(self.names + other.names, self.marginals + other.marginals, predicate)

    def with_marginals(self, data: dict) -> "PriorSpec":
        """Copy with the marginals of the named parameters rebuilt from marginal dicts."""
        unknown = sorted(set(data) - set(self.names))
        if unknown:
            raise ValueError(f"Unknown prior parameters: {unknown}")
        custom = prior_from_dict(list(data), data)
        replaced = dict(zip(custom.names, custom.marginals))
        marginals = tuple(replaced.get(n, m) for n, m in zip(self.names, self.marginals))
        return PriorSpec(self.names, marginals, self.predicate)


def prior_sample(prior: PriorSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """n draws from the (conditioned) prior, shape (n, dim)."""
    return prior.sample(rng, size=n)


def pullout_prior(sigma: float = 0.1) -> PriorSpec:
    """log EA ~ N(log 1, sigma^2), log k ~ N(log 100, sigma^2)."""
    return PriorSpec(("EA", "k"), (LogNormal(0.0, sigma), LogNormal(float(np.log(100.0)), sigma)))


def hole_prior(admissible: Optional[Callable[[np.ndarray], bool]] = None,
               length: float = 5.0, height: float = 1.0) -> PriorSpec:
    """Uniform priors on (x, y, d, alpha, r), conditioned on an admissible hole."""
    return PriorSpec(
        ("x", "y", "d", "alpha", "r"),
        (Uniform(0.0, length), Uniform(0.0, height), Uniform(0.0, 0.5),
         Uniform(0.0, 2 * np.pi), Uniform(0.0, 0.5)),
        admissible,
    )


def prior_from_dict(names: Sequence[str], data: dict, predicate=None) -> PriorSpec:
    """PriorSpec from {name: marginal dict}, in the order of names."""
    missing = [n for n in names if n not in data]
    if missing:
        raise ValueError(f"prior missing parameters: {missing}")
    return PriorSpec(tuple(names), tuple(marginal_from_dict(data[n]) for n in names), predicate)
