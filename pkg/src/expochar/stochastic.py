"""Seeded Monte Carlo checks of the maxima identity and a GoF test for exponentiality.

Under an exponential parent,

    max(X_1..X_{n-s}) + X_{n-s+1}/(n-s+1) + ... + X_n/n  =d  max(X_1..X_n),

and for ``s = n-1`` the left side is just ``X_1 + X_2/2 + ... + X_n/n``.  The
goodness-of-fit test resamples the mean-scaled data. It compares the
distribution of weighted subset sums with that of subset maxima, then
calibrates the distance by running the same pipeline on unit-exponential
samples.

Randomness
----------
All generators are ``numpy.random.Generator(PCG64(SeedSequence(seed,
spawn_key=key)))``.  The key encodes the role of a stream. ``(0,)`` is the
observed data pipeline, ``(1, r)`` is null replicate ``r``, and power studies
use ``(2, k, r)`` for data and ``(3, k, r)`` for the test of trial ``r`` of
spec ``k``.  Every replicate owns its stream, so results do not depend on
``n_jobs``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.special import kolmogorov

from ._validation import check_gof_sample, check_subset_size

DEFAULT_SEED = 20160512

FAMILIES: dict[str, dict[str, float]] = {
    "exponential": {"rate": 1.0},
    "weibull": {"shape": 2.0, "scale": 1.0},
    "gamma": {"shape": 1.0, "rate": 1.0},
    "lognormal": {"mu": 0.0, "sigma": 1.0},
    "uniform": {"upper": 1.0},
    "half-normal": {"sd": 1.0},
}

STATISTICS = ("ks", "cvm")


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key)``."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def derive_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(int(seed), spawn_key=key).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class DistributionSpec:
    """A continuous family on ``[0, inf)`` with its parameters.

    Missing parameters take the family defaults in :data:`FAMILIES`.
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        defaults = FAMILIES[self.family]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"{self.family} takes {sorted(defaults)}, got unexpected {sorted(unknown)}")
        merged = {k: float(self.params.get(k, v)) for k, v in defaults.items()}
        for k, v in merged.items():
            if not math.isfinite(v):
                raise ValueError(f"{self.family} parameter {k} must be finite, got {v}")
            if k != "mu" and v <= 0:
                raise ValueError(f"{self.family} parameter {k} must be positive, got {v}")
        object.__setattr__(self, "params", merged)

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        p = self.params
        if self.family == "exponential":
            return rng.exponential(1.0 / p["rate"], size)
        if self.family == "weibull":
            return p["scale"] * rng.weibull(p["shape"], size)
        if self.family == "gamma":
            return rng.gamma(p["shape"], 1.0 / p["rate"], size)
        if self.family == "lognormal":
            return rng.lognormal(p["mu"], p["sigma"], size)
        if self.family == "uniform":
            return rng.uniform(0.0, p["upper"], size)
        return np.abs(rng.normal(0.0, p["sd"], size))

    def label(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    seed: int
    spec: DistributionSpec


def sample(spec: DistributionSpec, m: int, seed: int) -> SampleBatch:
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    values = spec.draw(stream(seed), m)
    values.flags.writeable = False
    return SampleBatch(values, seed, spec)


def lhs_replicates(n: int, s: int, spec: DistributionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of ``max(X_1..X_{n-s}) + sum_{j>n-s} X_j / j``."""
    if not 1 <= s <= n - 1:
        raise ValueError(f"need 1 <= s <= n-1, got s={s}, n={n}")
    x = spec.draw(rng, (size, n))
    weights = 1.0 / np.arange(n - s + 1, n + 1)
    return x[:, : n - s].max(axis=1) + x[:, n - s :] @ weights


def rhs_replicates(n: int, spec: DistributionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return spec.draw(rng, (size, n)).max(axis=1)


def lhs_replicate(n: int, s: int, spec: DistributionSpec, rng: np.random.Generator) -> float:
    return float(lhs_replicates(n, s, spec, 1, rng)[0])


def rhs_replicate(n: int, spec: DistributionSpec, rng: np.random.Generator) -> float:
    return float(rhs_replicates(n, spec, 1, rng)[0])


def _ecdf_gaps(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scaled ecdf gaps ``na*nb*(ecdf_a - ecdf_b)`` at the distinct pooled points.

    Ties across and within samples are resolved by reading the cumulative
    counts at the last position of each run of equal pooled values.  Returns
    the gaps (int64) and the pooled multiplicities of those points.
    """
    na, nb = len(a), len(b)
    pooled = np.concatenate([a, b])
    step = np.concatenate([np.full(na, nb, dtype=np.int64), np.full(nb, -na, dtype=np.int64)])
    order = np.argsort(pooled, kind="stable")
    vals = pooled[order]
    gap = np.cumsum(step[order])
    ends = np.flatnonzero(np.append(vals[1:] != vals[:-1], True))
    mult = np.diff(np.concatenate([[-1], ends]))
    return gap[ends], mult


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS distance and its asymptotic p-value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    na, nb = a.size, b.size
    gaps, _ = _ecdf_gaps(a, b)
    D = int(np.abs(gaps).max()) / (na * nb)
    en = na * nb / (na + nb)
    p = float(kolmogorov(math.sqrt(en) * D))
    return D, min(1.0, max(p, np.finfo(float).tiny))


@dataclass(frozen=True)
class EqualityCheckReport:
    n: int
    s: int
    N: int
    spec: DistributionSpec
    ks_statistic: float
    p_value: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "N": self.N,
            "family": self.spec.family,
            "params": dict(self.spec.params),
            "ks_statistic": self.ks_statistic,
            "p_value": self.p_value,
            "seed": self.seed,
        }


def equality_check(n: int, s: int, spec: DistributionSpec, N: int, seed: int = DEFAULT_SEED) -> EqualityCheckReport:
    """Simulate both sides ``N`` times each and compare them with a KS test."""
    if N < 100:
        raise ValueError(f"N must be >= 100, got {N}")
    left = lhs_replicates(n, s, spec, N, stream(seed, 0))
    right = rhs_replicates(n, spec, N, stream(seed, 1))
    D, p = ks_two_sample(left, right)
    return EqualityCheckReport(n, s, N, spec, D, p, seed)


# --- goodness of fit -------------------------------------------------------


def ordered_subsets(m: int, n: int, B: int, rng: np.random.Generator) -> np.ndarray:
    """``B`` uniformly random ordered ``n``-subsets of ``range(m)``, one per row.

    Element ``j`` is uniform over the ``m - j`` items not yet taken.  It is
    drawn as an offset and shifted past the earlier picks in increasing order.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    out = np.empty((B, n), dtype=np.int64)
    for j in range(n):
        v = rng.integers(0, m - j, B)
        if j:
            for taken in np.sort(out[:, :j], axis=1).T:
                v += v >= taken
        out[:, j] = v
    return out


def resample_clouds(u: np.ndarray, n: int, B: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Weighted subset sums and, from independent subsets, subset maxima."""
    m = u.shape[0]
    weights = 1.0 / np.arange(1, n + 1)
    sums = u[ordered_subsets(m, n, B, rng)] @ weights
    maxima = u[ordered_subsets(m, n, B, rng)].max(axis=1)
    return sums, maxima


def _raw_statistic(u: np.ndarray, n: int, B: int, kind: str, rng: np.random.Generator) -> int:
    # Integer-valued so that p-value comparisons and reports are exact.
    gaps, mult = _ecdf_gaps(*resample_clouds(u, n, B, rng))
    # gaps are B * B * (ecdf difference); both clouds have B points
    if kind == "ks":
        return int(np.abs(gaps).max()) // B
    return int(((gaps // B) ** 2 * mult).sum())


def _scale_statistic(raw: int, B: int, kind: str) -> float:
    if kind == "ks":
        return raw / B
    return raw / (2 * B**3)


def _null_chunk(m, n, B, kind, seed, rs):
    out = []
    for r in rs:
        rng = stream(seed, 1, r)
        x = rng.exponential(1.0, m)
        out.append(_raw_statistic(x / x.mean(), n, B, kind, rng))
    return out


def _chunks(total: int, parts: int) -> list[range]:
    size = -(-total // parts)
    return [range(i, min(i + size, total)) for i in range(0, total, size)]


@lru_cache(maxsize=64)
def _null_raws_cached(m, n, B, kind, M_null, seed, n_jobs):
    if n_jobs in (None, 1):
        return tuple(_null_chunk(m, n, B, kind, seed, range(M_null)))
    workers = Parallel(n_jobs=n_jobs)._effective_n_jobs()
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_null_chunk)(m, n, B, kind, seed, rs) for rs in _chunks(M_null, 4 * workers)
    )
    return tuple(v for part in parts for v in part)


def null_statistics(m: int, n: int, B: int, kind: str, M_null: int, seed: int, n_jobs=None) -> np.ndarray:
    """Raw null statistics from ``M_null`` unit-exponential samples of size ``m``."""
    raws = _null_raws_cached(int(m), int(n), int(B), kind, int(M_null), int(seed), None if n_jobs in (None, 1) else n_jobs)
    return np.asarray(raws, dtype=np.int64)


def monte_carlo_pvalue(observed, null) -> float:
    null = np.asarray(null)
    return (1 + int(np.count_nonzero(null >= observed))) / (null.size + 1)


@dataclass(frozen=True)
class GofReport:
    statistic_kind: str
    value: float
    p_value: float
    m: int
    n: int
    B: int
    M_null: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _check_gof_config(n, B, statistic_kind, M_null):
    n = check_subset_size(n)
    if statistic_kind not in STATISTICS:
        raise ValueError(f"statistic_kind must be one of {STATISTICS}, got {statistic_kind!r}")
    if B < 1:
        raise ValueError(f"B must be positive, got {B}")
    if M_null < 1:
        raise ValueError(f"M_null must be positive, got {M_null}")
    return n


def gof_exponentiality(
    data,
    n: int = 3,
    B: int = 2000,
    statistic_kind: str = "ks",
    M_null: int = 500,
    seed: int = DEFAULT_SEED,
    n_jobs=None,
) -> GofReport:
    """Monte Carlo test of exponentiality based on sums versus maxima.

    The data are divided by their mean, so the result is unchanged when the
    data are rescaled.  ``B`` ordered ``n``-subsets give sums weighted
    ``1, 1/2, .., 1/n``, and ``B`` independent subsets give maxima.  The
    statistic is the KS or Cramer-von Mises distance between the two
    clouds. Its p-value is ``(1 + #{null >= observed}) / (M_null + 1)``.
    """
    n = _check_gof_config(n, B, statistic_kind, M_null)
    x = check_gof_sample(data, n)
    m = x.shape[0]
    raw = _raw_statistic(x / x.mean(), n, B, statistic_kind, stream(seed, 0))
    null = null_statistics(m, n, B, statistic_kind, M_null, seed, n_jobs)
    return GofReport(
        statistic_kind,
        _scale_statistic(raw, B, statistic_kind),
        monte_carlo_pvalue(raw, null),
        m,
        n,
        B,
        M_null,
        seed,
    )


@dataclass(frozen=True)
class PowerRow:
    spec: DistributionSpec
    rejections: int
    trials: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.trials

    def to_dict(self) -> dict:
        return {**self.spec.to_dict(), "rejections": self.rejections, "trials": self.trials,
                "rejection_rate": self.rejection_rate}


def _power_chunk(spec, k, m, n, B, kind, seed, null, alpha, rs):
    hits = 0
    for r in rs:
        x = spec.draw(stream(seed, 2, k, r), m)
        raw = _raw_statistic(x / x.mean(), n, B, kind, stream(seed, 3, k, r))
        hits += monte_carlo_pvalue(raw, null) <= alpha
    return hits


def power_study(
    specs: Sequence[DistributionSpec],
    m: int,
    n: int = 3,
    B: int = 2000,
    M_null: int = 500,
    trials: int = 100,
    alpha: float = 0.05,
    seed: int = DEFAULT_SEED,
    statistic_kind: str = "ks",
    n_jobs=None,
) -> list[PowerRow]:
    """Rejection rate of the GoF test at level ``alpha`` for each spec.

    One null calibration of ``M_null`` replicates is shared by every trial.
    After mean scaling the null does not depend on the rate.
    """
    n = _check_gof_config(n, B, statistic_kind, M_null)
    if trials < 50:
        raise ValueError(f"trials must be >= 50, got {trials}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if m < max(2 * n, 20):
        raise ValueError(f"m must be >= {max(2 * n, 20)}, got {m}")
    null = null_statistics(m, n, B, statistic_kind, M_null, seed, n_jobs)
    rows = []
    for k, spec in enumerate(specs):
        if n_jobs in (None, 1):
            hits = _power_chunk(spec, k, m, n, B, statistic_kind, seed, null, alpha, range(trials))
        else:
            hits = sum(Parallel(n_jobs=n_jobs)(
                delayed(_power_chunk)(spec, k, m, n, B, statistic_kind, seed, null, alpha, rs)
                for rs in _chunks(trials, 8)
            ))
        rows.append(PowerRow(spec, int(hits), trials))
    return rows


