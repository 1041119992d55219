"""Leakage measures of the additive Gaussian-noise mechanism and the
privacy-utility functions built on the spectral-gap utility.

Mutual information is in nats throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import DegenerateSpike, OutOfRange
from .spectral import ToyModel
from .utility import conjecture_diagnostics, default_grid, utility

__all__ = [
    "SigmaSpec",
    "PrivacyProfile",
    "spike_count",
    "p_it_gaussian",
    "p_it_toy",
    "p_it_toy_inverse",
    "p_et_gaussian",
    "p_et_toy",
    "p_et_toy_inverse",
    "privacy_profile",
    "g_it",
    "g_et",
    "grid_supremum",
    "i_mmse_residual",
    "i_mmse_residual_fd",
    "high_privacy_bound",
    "scalar_high_privacy_asymptote",
    "scalar_non_gaussianity",
    "noise_non_gaussianity",
    "non_gaussianity_bound",
    "NOISE_LAWS",
]


@dataclass(frozen=True)
class SigmaSpec:
    """Covariance matrix given by its spectrum."""

    eigenvalues: tuple[float, ...]

    def __post_init__(self) -> None:
        eig = tuple(float(v) for v in self.eigenvalues)
        object.__setattr__(self, "eigenvalues", eig)
        if not eig:
            raise ValueError("spectrum must have at least one entry")
        if any(not math.isfinite(v) or v < 0 for v in eig):
            raise ValueError("eigenvalues must be finite and nonnegative")

    @classmethod
    def toy(cls, r: float, s: float, p: int) -> "SigmaSpec":
        """``floor(r p)`` copies of ``s`` followed by zeros."""
        k = spike_count(r, p)
        return cls((float(s),) * k + (0.0,) * (p - k))

    @property
    def p(self) -> int:
        return len(self.eigenvalues)

    @property
    def trace(self) -> float:
        return math.fsum(self.eigenvalues)

    def array(self) -> np.ndarray:
        return np.array(self.eigenvalues)


@dataclass(frozen=True)
class PrivacyProfile:
    t_grid: np.ndarray
    p_it_values: np.ndarray
    p_et_values: np.ndarray
    provenance: dict = field(default_factory=dict)


def spike_count(r: float, p: int) -> int:
    """``floor(r p)``, reading ``r`` by its decimal representation.

    ``0.29 * 100`` is 28.999999999999996 in binary floating point; taking
    ``r`` as the decimal it prints as gives the intended 29.
    """
    if p < 1 or int(p) != p:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    return math.floor(Fraction(repr(float(r))) * int(p))


def _check_t(t: float) -> None:
    if not t > 0:
        raise ValueError(f"noise power must be > 0, got {t}")


def p_it_gaussian(sigma: SigmaSpec, t: float) -> float:
    """``1/2 log det(I + Sigma/t)`` for Gaussian data and noise."""
    _check_t(t)
    return 0.5 * math.fsum(math.log1p(v / t) for v in sigma.eigenvalues)


def p_it_toy(r: float, s: float, p: int, t: float) -> float:
    _check_t(t)
    return spike_count(r, p) / 2 * math.log1p(s / t)


def p_it_toy_inverse(r: float, s: float, p: int, eps: float) -> float:
    """Noise power at which the toy mutual-information leakage equals ``eps``."""
    k = spike_count(r, p)
    if k == 0:
        raise DegenerateSpike(f"floor(r p) = 0 for r={r}, p={p}: leakage is identically 0")
    if not eps > 0:
        raise OutOfRange(f"eps must be > 0, got {eps}")
    return s / math.expm1(2 * eps / k)


def p_et_gaussian(sigma: SigmaSpec, t: float) -> float:
    """``Tr[(I + Sigma/t)^{-1} Sigma]``: MMSE of the data given its noisy release."""
    _check_t(t)
    return math.fsum(t * v / (t + v) for v in sigma.eigenvalues)


def p_et_toy(r: float, s: float, p: int, t: float) -> float:
    _check_t(t)
    return spike_count(r, p) * t * s / (t + s)


def p_et_toy_inverse(r: float, s: float, p: int, eps: float) -> float:
    k = spike_count(r, p)
    if k == 0:
        raise DegenerateSpike(f"floor(r p) = 0 for r={r}, p={p}: MMSE leakage is identically 0")
    if not 0 < eps < k * s:
        raise OutOfRange(f"eps must lie in (0, {k * s}), got {eps}")
    return eps * s / (k * s - eps)


def privacy_profile(sigma: SigmaSpec, t_grid: Sequence[float], **provenance) -> PrivacyProfile:
    grid = np.asarray(t_grid, dtype=float)
    return PrivacyProfile(
        grid,
        np.array([p_it_gaussian(sigma, t) for t in grid]),
        np.array([p_et_gaussian(sigma, t) for t in grid]),
        dict(provenance),
    )


# ---------------------------------------------------------------------------
# Privacy-utility functions
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _utility_monotone(model: ToyModel) -> bool:
    return not conjecture_diagnostics(model).u_monotone_violations


def grid_supremum(model: ToyModel, t_min: float, grid: Sequence[float] | None = None) -> float:
    """``sup U(t)`` over ``t >= t_min``, taken on ``{t_min}`` plus grid points above it."""
    pts = default_grid(model) if grid is None else np.asarray(grid, dtype=float)
    pts = np.concatenate([[t_min], pts[pts > t_min]])
    return max(utility(model, float(t)) for t in pts)


def g_it(model: ToyModel, p: int, eps: float, check: bool = True) -> float:
    """Largest utility subject to mutual-information leakage at most ``eps``.

    Uses ``U(P_IT^{-1}(eps))``, which is the supremum when ``U`` is
    non-increasing.  With ``check`` the monotonicity is verified on the
    default grid first; on a recorded violation the grid supremum is used.
    """
    t = p_it_toy_inverse(model.r, model.s, p, eps)
    if check and not _utility_monotone(model):
        return grid_supremum(model, t)
    return utility(model, t)


def g_et(model: ToyModel, p: int, eps: float, check: bool = True) -> float:
    """Largest utility subject to MMSE leakage at least ``eps``."""
    t = p_et_toy_inverse(model.r, model.s, p, eps)
    if check and not _utility_monotone(model):
        return grid_supremum(model, t)
    return utility(model, t)


# ---------------------------------------------------------------------------
# I-MMSE and high-privacy asymptotics
# ---------------------------------------------------------------------------


def i_mmse_residual(r: float, s: float, p: int, t: float) -> float:
    """``-2 t^2 dP_IT/dt - P_ET`` for the toy closed forms.

    Evaluated in exact rational arithmetic on the (binary) inputs, so the
    identity shows up as an exact zero.
    """
    _check_t(t)
    k = Fraction(spike_count(r, p))
    S, T = Fraction(s), Fraction(t)
    dp_it = -(k / 2) * S / (T * (T + S))
    p_et = k * T * S / (T + S)
    return float(-2 * T**2 * dp_it - p_et)


def i_mmse_residual_fd(sigma: SigmaSpec, t: float, rel_step: float = 1e-5) -> float:
    """I-MMSE residual for a general spectrum with a central-difference derivative."""
    _check_t(t)
    h = rel_step * t
    dp_it = (p_it_gaussian(sigma, t + h) - p_it_gaussian(sigma, t - h)) / (2 * h)
    return -2 * t**2 * dp_it - p_et_gaussian(sigma, t)


def high_privacy_bound(sigma: SigmaSpec, t: float) -> float:
    """``p Tr(Sigma) / (2t)``: leading-order bound on the leakage as ``t`` grows."""
    _check_t(t)
    return sigma.p * sigma.trace / (2 * t)


def scalar_high_privacy_asymptote(variance: float, t: float) -> float:
    """``variance / (2t)``, the large-``t`` behaviour of the scalar leakage."""
    _check_t(t)
    return variance / (2 * t)


# ---------------------------------------------------------------------------
# Non-Gaussian noise
# ---------------------------------------------------------------------------

_SMOOTH_SD = 0.5
_SMOOTH_SHIFT = math.sqrt(1 - _SMOOTH_SD**2)

# Unit-variance noise densities.  Rademacher noise itself has no density (its
# non-Gaussianity is infinite), so a Gaussian-smoothed +-1 mixture stands in.
NOISE_LAWS: dict[str, tuple[Callable[[float], float], tuple[float, float]]] = {
    "gaussian": (stats.norm.pdf, (-math.inf, math.inf)),
    "laplace": (stats.laplace(scale=1 / math.sqrt(2)).pdf, (-math.inf, math.inf)),
    "uniform": (stats.uniform(loc=-math.sqrt(3), scale=2 * math.sqrt(3)).pdf, (-math.sqrt(3), math.sqrt(3))),
    "rademacher_smoothed": (
        lambda x: 0.5 * (stats.norm.pdf(x, -_SMOOTH_SHIFT, _SMOOTH_SD) + stats.norm.pdf(x, _SMOOTH_SHIFT, _SMOOTH_SD)),
        (-math.inf, math.inf),
    ),
}


def scalar_non_gaussianity(pdf: Callable[[float], float], bounds=(-math.inf, math.inf), scale: float = 1.0) -> float:
    """KL divergence of a zero-mean law from the Gaussian with the same variance.

    ``pdf`` is the density of the unscaled variable; the law of ``scale * X``
    is used.  The result does not depend on ``scale``.
    """
    mean = integrate.quad(lambda x: x * pdf(x), *bounds)[0]
    var = integrate.quad(lambda x: (x - mean) ** 2 * pdf(x), *bounds)[0] * scale**2

    def integrand(y):
        f = pdf(y / scale) / scale
        if f <= 0:
            return 0.0
        return f * (math.log(f) - stats.norm.logpdf(y, mean * scale, math.sqrt(var)))

    lo, hi = (b * scale for b in bounds)
    val, _ = integrate.quad(integrand, lo, hi, limit=200)
    return max(val, 0.0)


@lru_cache(maxsize=None)
def noise_non_gaussianity(name: str) -> float:
    """Per-entry non-Gaussianity (nats) of a built-in unit-variance noise law."""
    if name not in NOISE_LAWS:
        raise KeyError(f"unknown noise law {name!r}; choose from {sorted(NOISE_LAWS)}")
    if name == "gaussian":
        return 0.0
    pdf, bounds = NOISE_LAWS[name]
    return scalar_non_gaussianity(pdf, bounds)


def non_gaussianity_bound(p_it_g: float, d_noise_scalar: float, p: int) -> float:
    """Upper bound ``P_IT^G + p D(sqrt(t) Z_11)`` valid for any data and noise law."""
    if d_noise_scalar < 0:
        raise ValueError("non-Gaussianity is nonnegative")
    return p_it_g + p * d_noise_scalar
