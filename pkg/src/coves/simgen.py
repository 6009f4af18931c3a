"""Dataset generators for the power studies.

Two designs:

* A parametric normal model with a right-tail inflation of the control
  group's errors,

      Z = 5 + gamma*C + (1 + eta*1{e>0}*1{D=0}) * e,    e ~ N(0,1),

  under four covariate scenarios (no effect / common effect / group
  mean shift / group scale change).

* A targeted design driven by a pair of empirical distributions
  (outcome F, covariate G): each observation draws one uniform u and
  sets C = G^-1(u) and Z = F^-1(u), with the control group's outcome
  inflated above the 0.65 level by 8*(u-0.65)^(1/4).  The shared u
  couples covariate and outcome comonotonically and leaves the
  covariate law identical across groups.

All randomness flows through a counter-based generator feeding uniforms
into the inverse normal CDF, so streams are reproducible bit-for-bit
from an integer seed on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.special import ndtri

from .coves_test import Dataset
from .errors import DataError

TAIL_KINK = 0.65
TAIL_SCALE = 8.0

_SCENARIO_TABLE = {
    # scenario: (gamma, control C (mean, sd), treatment C (mean, sd))
    1: (0.0, (2.5, 0.5), (2.5, 0.5)),
    2: (1.0, (2.5, 0.5), (2.5, 0.5)),
    3: (1.0, (2.5, 0.5), (3.0, 0.5)),
    4: (1.0, (2.5, 0.5), (2.5, 1.0)),
}


@dataclass
class EmpiricalDist:
    """A finite sample defining a distribution via its order statistics."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.sort(np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise DataError("empirical distribution must be nonempty")
        if not np.all(np.isfinite(self.values)):
            raise DataError("empirical distribution values must be finite")

    @classmethod
    def from_file(cls, path) -> "EmpiricalDist":
        """Plain text, one finite real per line, no header."""
        vals = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    vals.append(float(text))
                except ValueError:
                    raise DataError(
                        f"{path}: line {lineno}: not a number: {text!r}"
                    ) from None
        return cls(np.asarray(vals))


def empirical_inverse_cdf(dist: EmpiricalDist, u):
    """Left-continuous generalized inverse: the ceil(u*n)-th order statistic."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("u must lie strictly in (0, 1)")
    k = np.clip(np.ceil(u * dist.values.size).astype(int), 1, dist.values.size)
    out = dist.values[k - 1]
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of the normal model under one covariate scenario."""

    scenario: int
    gamma: float
    eta: float
    c_mean_control: float
    c_sd_control: float
    c_mean_treat: float
    c_sd_treat: float

    def __post_init__(self):
        if self.eta < 0.0:
            raise ValueError("eta must be nonnegative")
        if self.c_sd_control <= 0.0 or self.c_sd_treat <= 0.0:
            raise ValueError("covariate standard deviations must be positive")

    @classmethod
    def from_scenario(cls, scenario: int, eta: float, gamma: float | None = None):
        """Fixed scenario-to-parameter mapping; gamma may be overridden."""
        if scenario not in _SCENARIO_TABLE:
            raise ValueError(f"scenario must be 1..4, got {scenario}")
        g, (m0, s0), (m1, s1) = _SCENARIO_TABLE[scenario]
        return cls(
            scenario=scenario,
            gamma=g if gamma is None else float(gamma),
            eta=float(eta),
            c_mean_control=m0,
            c_sd_control=s0,
            c_mean_treat=m1,
            c_sd_treat=s1,
        )


def _open_uniforms(seed: int, size: int) -> np.ndarray:
    """Uniforms strictly inside (0, 1) from a counter-based stream."""
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    raw = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    return (raw + 0.5) * 2.0**-53


def _normals(u: np.ndarray) -> np.ndarray:
    return ndtri(u)


def sample_scenario(spec: ScenarioSpec, m: int, n: int, seed: int) -> Dataset:
    """m treatment and n control observations from the normal model."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    total = m + n
    u = _open_uniforms(seed, 2 * total)
    d = np.concatenate([np.ones(m, dtype=int), np.zeros(n, dtype=int)])
    mean = np.where(d == 1, spec.c_mean_treat, spec.c_mean_control)
    sd = np.where(d == 1, spec.c_sd_treat, spec.c_sd_control)
    c = mean + sd * _normals(u[:total])
    e = _normals(u[total:])
    inflate = 1.0 + spec.eta * ((e > 0.0) & (d == 0))
    z = 5.0 + spec.gamma * c + inflate * e
    return Dataset(z=z, d=d, c=c)


def tail_shift(u):
    """Control-group outcome lift above the kink: 8*(u-0.65)^(1/4) for u > 0.65."""
    u = np.asarray(u, dtype=float)
    out = np.where(u > TAIL_KINK, TAIL_SCALE * np.abs(u - TAIL_KINK) ** 0.25, 0.0)
    return float(out) if out.ndim == 0 else out


def sample_targeted(
    f_dist: EmpiricalDist, g_dist: EmpiricalDist, m: int, n: int, seed: int
) -> Dataset:
    """Comonotonic draws from the empirical pair, control tail inflated."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    u = _open_uniforms(seed, m + n)
    d = np.concatenate([np.ones(m, dtype=int), np.zeros(n, dtype=int)])
    c = empirical_inverse_cdf(g_dist, u)
    z = empirical_inverse_cdf(f_dist, u)
    z = z + np.where(d == 0, tail_shift(u), 0.0)
    return Dataset(z=z, d=d, c=c)


def load_standin() -> tuple[EmpiricalDist, EmpiricalDist]:
    """The shipped stand-in (outcome, covariate) empirical pair."""
    pkg = resources.files("coves.data")
    f = EmpiricalDist(np.loadtxt(str(pkg / "standin_f.txt")))
    g = EmpiricalDist(np.loadtxt(str(pkg / "standin_g.txt")))
    return f, g


@dataclass(frozen=True)
class ScenarioSampler:
    """Picklable (m, n, seed) -> Dataset generator for the Monte Carlo engine."""

    spec: ScenarioSpec

    def __call__(self, m: int, n: int, seed: int) -> Dataset:
        return sample_scenario(self.spec, m, n, seed)


@dataclass(eq=False)
class TargetedSampler:
    """Picklable (m, n, seed) -> Dataset generator for the targeted design."""

    f_dist: EmpiricalDist
    g_dist: EmpiricalDist

    def __call__(self, m: int, n: int, seed: int) -> Dataset:
        return sample_targeted(self.f_dist, self.g_dist, m, n, seed)
