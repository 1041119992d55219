"""Finite-dimensional Monte Carlo for the noisy sample covariance.

Draws ``X = Sigma^{1/2} W``, releases ``X_t = X + sqrt(t) Z`` and returns the
eigenvalues of ``X_t X_t^T / n``; the remaining functions compare those
spectra with the asymptotic predictions.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import EigensolverFailure, NoGap
from .privacy import SigmaSpec
from .spectral import (
    AtomicDistribution,
    SupportSet,
    ToyModel,
    asymptotic_cdf,
    density,
    general_density,
    general_support,
    support,
)

__all__ = [
    "DISTRIBUTIONS",
    "SimConfig",
    "EmpiricalSpectrum",
    "GapReport",
    "DebiasCurve",
    "sample_spectrum",
    "simulate",
    "symmetric_eigvals",
    "gap_violation_check",
    "ks_statistic",
    "ks_distance",
    "empirical_cdf",
    "asymptotic_law_cdf",
    "mass_split",
    "debiasing_error",
    "thread_count",
]

DISTRIBUTIONS = ("gaussian", "rademacher", "uniform")
MAX_P = 1000
MAX_N = 100_000
NEGATIVE_CLAMP = -1e-10
RESIDUAL_TOL = 1e-8
_ROLES = {"W": 0, "Z": 1, "rotation": 2}


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo experiment: dimensions, population spectrum, mechanism, laws, seed."""

    p: int
    n: int
    sigma: SigmaSpec
    t: float = 0.0
    entry_dist: str = "gaussian"
    noise_dist: str = "gaussian"
    seed: int = 0
    trials: int = 1
    rotate: bool = False
    allow_large: bool = False

    def __post_init__(self) -> None:
        if self.p < 1 or self.n < 1 or self.trials < 1:
            raise ValueError("p, n and trials must all be >= 1")
        if self.sigma.p != self.p:
            raise ValueError(f"spectrum has {self.sigma.p} entries but p = {self.p}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"t must be finite and >= 0, got {self.t}")
        for name in (self.entry_dist, self.noise_dist):
            if name not in DISTRIBUTIONS:
                raise ValueError(f"unknown entry law {name!r}; choose from {DISTRIBUTIONS}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.allow_large and (self.p > MAX_P or self.n > MAX_N):
            raise ValueError(f"p <= {MAX_P} and n <= {MAX_N} unless allow_large is set")

    @property
    def c(self) -> float:
        return self.p / self.n

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "sigma": list(self.sigma.eigenvalues),
            "t": self.t,
            "entry_dist": self.entry_dist,
            "noise_dist": self.noise_dist,
            "seed": self.seed,
            "trials": self.trials,
            "rotate": self.rotate,
        }


@dataclass(frozen=True)
class EmpiricalSpectrum:
    eigenvalues: np.ndarray
    config: SimConfig
    trial: int


def thread_count() -> int:
    env = os.environ.get("SPECSEP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _rng(seed: int, trial: int, role: str) -> np.random.Generator:
    # Counter-based generator keyed by (seed, trial, role): streams never overlap
    # and do not depend on scheduling.
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial, _ROLES[role]))
    return np.random.Generator(np.random.Philox(ss))


def _draw(rng: np.random.Generator, law: str, shape: tuple[int, int]) -> np.ndarray:
    if law == "gaussian":
        return rng.standard_normal(shape)
    if law == "rademacher":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if law == "uniform":
        root3 = math.sqrt(3.0)
        return rng.uniform(-root3, root3, size=shape)
    raise ValueError(f"unknown entry law {law!r}")


def symmetric_eigvals(a: np.ndarray, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix, with a residual check.

    Raises
    ------
    EigensolverFailure
        If LAPACK does not converge or ``max_i |A v_i - l_i v_i|`` exceeds
        ``1e-8 ||A||_2``.
    """
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if check:
        norm = max(abs(vals[0]), abs(vals[-1]), np.finfo(float).tiny)
        resid = np.linalg.norm(a @ vecs - vecs * vals, axis=0).max()
        if not resid <= RESIDUAL_TOL * norm:
            raise EigensolverFailure(f"eigen-residual {resid:.3e} exceeds {RESIDUAL_TOL} * ||A|| = {norm:.3e}")
    return vals


def sample_spectrum(cfg: SimConfig, trial: int) -> EmpiricalSpectrum:
    """Eigenvalues of one realization of ``(1/n) X_t X_t^T``."""
    w = _draw(_rng(cfg.seed, trial, "W"), cfg.entry_dist, (cfg.p, cfg.n))
    x = np.sqrt(cfg.sigma.array())[:, None] * w
    if cfg.rotate:
        q = stats.ortho_group.rvs(cfg.p, random_state=_rng(cfg.seed, trial, "rotation"))
        x = q @ x
    if cfg.t > 0:
        x += math.sqrt(cfg.t) * _draw(_rng(cfg.seed, trial, "Z"), cfg.noise_dist, (cfg.p, cfg.n))
    cov = (x @ x.T) / cfg.n
    vals = symmetric_eigvals(cov)
    vals = np.where((vals < 0) & (vals >= NEGATIVE_CLAMP), 0.0, vals)
    if vals[0] < 0:
        raise EigensolverFailure(f"eigenvalue {vals[0]:.3e} of a PSD matrix below the clamp threshold")
    return EmpiricalSpectrum(vals, cfg, trial)


def simulate(cfg: SimConfig, threads: int | None = None) -> list[EmpiricalSpectrum]:
    """All trials of ``cfg``; the output does not depend on ``threads``."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or cfg.trials == 1:
        return [sample_spectrum(cfg, k) for k in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda k: sample_spectrum(cfg, k), range(cfg.trials)))


# ---------------------------------------------------------------------------
# Comparisons with the asymptotic law
# ---------------------------------------------------------------------------


def _top_gap(sup: SupportSet) -> tuple[float, float]:
    if len(sup.intervals) < 2:
        raise NoGap("the support is connected; there is no gap")
    return sup.intervals[-2][1], sup.intervals[-1][0]


@dataclass
class GapReport:
    """Eigenvalues found inside the (shrunk) gap below the top support component."""

    gap: tuple[float, float] | None
    window: tuple[float, float] | None
    counts: list[int] = field(default_factory=list)
    violations: list[np.ndarray] = field(default_factory=list)

    @property
    def clean_trials(self) -> int:
        return sum(1 for k in self.counts if k == 0)

    @property
    def total(self) -> int:
        return sum(self.counts)


def gap_violation_check(spectra: list[EmpiricalSpectrum], sup: SupportSet, margin_frac: float = 0.05) -> GapReport:
    if not 0 <= margin_frac < 0.5:
        raise ValueError("margin_frac must lie in [0, 0.5)")
    if not spectra:
        return GapReport(None, None)
    lo, hi = _top_gap(sup)
    width = hi - lo
    window = (lo + margin_frac * width, hi - margin_frac * width)
    report = GapReport((lo, hi), window)
    for spec in spectra:
        ev = spec.eigenvalues
        bad = ev[(ev >= window[0]) & (ev <= window[1])]
        report.counts.append(int(bad.size))
        report.violations.append(bad)
    return report


def empirical_cdf(values) -> callable:
    data = np.sort(np.asarray(values, dtype=float))

    def cdf(x):
        return np.searchsorted(data, np.asarray(x, dtype=float), side="right") / data.size

    return cdf


def ks_statistic(samples, cdf, cdf_left=None) -> float:
    """``sup_x |F_n(x) - F(x)|`` for a CDF ``F`` (``cdf_left`` gives ``F(x-)`` if ``F`` has jumps)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    uniq, first = np.unique(x, return_index=True)
    last = np.append(first[1:], n)  # F_n(u) = last / n, F_n(u-) = first / n
    right = cdf(uniq)
    left = right if cdf_left is None else cdf_left(uniq)
    return float(max(np.max(np.abs(last / n - right)), np.max(np.abs(first / n - left))))


def asymptotic_law_cdf(law: ToyModel | AtomicDistribution, t: float, c: float | None = None):
    """CDF and left-limit CDF of the limiting spectral law at noise power ``t``."""
    if isinstance(law, ToyModel):
        sup = support(law, t)

        def fn(x):
            return density(law, t, x)

    else:
        if c is None:
            raise ValueError("aspect ratio c is required for an atomic population law")
        h = law.shift(t)
        sup = general_support(h, c)

        def fn(x):
            return general_density(h, c, x)

    cdf = asymptotic_cdf(fn, sup)
    mass0 = sup.zero_atom_mass

    def left(x):
        x = np.asarray(x, dtype=float)
        return cdf(x) - np.where(x == 0.0, mass0, 0.0)

    return cdf, left


def ks_distance(spectra: list[EmpiricalSpectrum], law: ToyModel | AtomicDistribution, t: float) -> float:
    """Kolmogorov-Smirnov distance between pooled eigenvalues and the limiting law.

    For an atomic population law the aspect ratio is taken from the first
    spectrum's configuration.
    """
    pooled = np.concatenate([s.eigenvalues for s in spectra])
    c = spectra[0].config.c if spectra else None
    cdf, left = asymptotic_law_cdf(law, t, c)
    return ks_statistic(pooled, cdf, left)


def mass_split(spectrum: EmpiricalSpectrum, sup: SupportSet) -> tuple[float, float]:
    """Fractions of eigenvalues at or below, and above, the midpoint of the top gap."""
    lo, hi = _top_gap(sup)
    mid = 0.5 * (lo + hi)
    ev = spectrum.eigenvalues
    upper = int(np.count_nonzero(ev > mid))
    return (ev.size - upper) / ev.size, upper / ev.size


@dataclass(frozen=True)
class DebiasCurve:
    n_values: np.ndarray
    errors: np.ndarray

    @property
    def slope(self) -> float:
        """Least-squares slope of log(error) against log(n)."""
        return float(np.polyfit(np.log(self.n_values), np.log(self.errors), 1)[0])


def debiasing_error(
    sigma: SigmaSpec,
    n_list,
    t: float,
    seed: int = 0,
    trials: int = 20,
    entry_dist: str = "gaussian",
    noise_dist: str = "gaussian",
) -> DebiasCurve:
    """Mean squared Frobenius error of ``Sigma_t - t I`` as an estimate of ``Sigma``, per ``n``."""
    p = sigma.p
    target = np.diag(sigma.array())
    root = np.sqrt(sigma.array())[:, None]
    errors = []
    for n in n_list:
        acc = 0.0
        for k in range(trials):
            trial_seed = (seed, int(n))
            x = root * _draw(_rng(_mix(trial_seed), k, "W"), entry_dist, (p, int(n)))
            if t > 0:
                x += math.sqrt(t) * _draw(_rng(_mix(trial_seed), k, "Z"), noise_dist, (p, int(n)))
            est = (x @ x.T) / n - t * np.eye(p)
            acc += float(np.sum((est - target) ** 2))
        errors.append(acc / trials)
    return DebiasCurve(np.asarray(n_list, dtype=float), np.array(errors))


def _mix(key: tuple[int, int]) -> int:
    return int(np.random.SeedSequence(entropy=key[0], spawn_key=(key[1],)).generate_state(1, np.uint64)[0])
