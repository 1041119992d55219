"""Limiting eigenvalue law of the noisy sample covariance.

For a population spectrum ``H`` and aspect ratio ``c = p/n`` the Cauchy
transform ``G`` of the limiting law solves

    G = sum_k w_k / (z - tau_k * (1 - c + c z G)).

For the two-atom toy model this is a cubic in ``G``; its discriminant, read
as a polynomial in the real spectral variable, is negative exactly on the
continuous support.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple, Sequence

import mpmath
import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate
from scipy.optimize import brentq

from .errors import OutOfRange, RootIsolationFailure, RootSelectionAmbiguity

__all__ = [
    "ToyModel",
    "AtomicDistribution",
    "CubicCoeffs",
    "SupportSet",
    "DensityCurve",
    "cubic_coefficients",
    "cubic_discriminant",
    "delta",
    "delta_roots",
    "support",
    "cauchy_transform",
    "density",
    "density_curve",
    "general_cauchy",
    "general_density",
    "general_support",
    "support_mass",
    "asymptotic_cdf",
    "SEARCH_FACTOR",
]

# Root residual and support endpoint tolerances.
ROOT_TOL = 1e-10
ENDPOINT_TOL = 1e-8
# Upper search bound is (largest atom) * (1 + sqrt(c))^2 * SEARCH_FACTOR.
SEARCH_FACTOR = 1.5
FALLBACK_ITERATIONS = 200
FALLBACK_DAMPING = 0.5
# Switch to extended precision when an extremum of the normalized reduced
# discriminant is smaller than this; MP_DPS is the working precision then.
FRAGILE_LEVEL = 1e-9
MP_DPS = 60
# Smallest resolvable noise power relative to the spike, t = 0 aside.  Below
# it the far root of the cubic (of size ~1/t) swamps the others in double
# precision and the noise micro-bulk cannot be integrated reliably.
MIN_RELATIVE_NOISE = 1e-10


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToyModel:
    """Population spectrum with mass ``1 - r`` at 0 and mass ``r`` at ``s``.

    Parameters
    ----------
    c : float
        Aspect ratio p/n.
    r : float
        Fraction of population eigenvalues equal to the spike, in (0, 1).
    s : float
        Spike eigenvalue.
    """

    c: float
    r: float
    s: float

    def __post_init__(self) -> None:
        for name in ("c", "r", "s"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.c <= 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if not 0 < self.r < 1:
            raise ValueError(f"r must lie in (0, 1), got {self.r}")
        if self.s <= 0:
            raise ValueError(f"s must be > 0, got {self.s}")

    def population(self, t: float = 0.0) -> "AtomicDistribution":
        """Population law of ``Sigma + t I``: atoms at ``t`` and ``s + t``."""
        return AtomicDistribution((1.0 - self.r, self.r), (float(t), self.s + t))

    def search_bound(self, t: float) -> float:
        return (self.s + t) * (1.0 + math.sqrt(self.c)) ** 2 * SEARCH_FACTOR


@dataclass(frozen=True)
class AtomicDistribution:
    """Finitely supported probability law on ``[0, inf)``.

    Atoms are stored sorted by location.  Use :meth:`from_atoms` to build one
    from unsorted ``(weight, location)`` pairs.
    """

    weights: tuple[float, ...]
    locations: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(v) for v in self.weights)
        x = tuple(float(v) for v in self.locations)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "locations", x)
        if len(w) != len(x) or not w:
            raise ValueError("weights and locations must be non-empty and of equal length")
        if any(not math.isfinite(v) or v <= 0 for v in w):
            raise ValueError("weights must be finite and strictly positive")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(w)!r}")
        if any(not math.isfinite(v) or v < 0 for v in x):
            raise ValueError("locations must be finite and nonnegative")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ValueError("locations must be distinct and sorted ascending")

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]]) -> "AtomicDistribution":
        pairs = sorted((float(loc), float(w)) for w, loc in atoms)
        return cls(tuple(w for _, w in pairs), tuple(loc for loc, _ in pairs))

    @classmethod
    def from_spectrum(cls, eigenvalues: Sequence[float]) -> "AtomicDistribution":
        """Eigenvalue distribution of a matrix with the given spectrum."""
        values, counts = np.unique(np.asarray(eigenvalues, dtype=float), return_counts=True)
        weights = tuple(float(k) / float(counts.sum()) for k in counts)
        return cls(weights, tuple(float(v) for v in values))

    def shift(self, t: float) -> "AtomicDistribution":
        return AtomicDistribution(self.weights, tuple(x + t for x in self.locations))

    @property
    def zero_mass(self) -> float:
        return self.weights[0] if self.locations[0] == 0.0 else 0.0

    def positive_atoms(self) -> tuple[np.ndarray, np.ndarray]:
        w = np.array(self.weights)
        x = np.array(self.locations)
        keep = x > 0
        return w[keep], x[keep]


class CubicCoeffs(NamedTuple):
    """Coefficients of ``A G^3 + B G^2 + C G + D`` (scalars or arrays)."""

    A: complex
    B: complex
    C: complex
    D: complex


@dataclass(frozen=True)
class SupportSet:
    """Support of a limiting spectral law.

    ``intervals`` is sorted and disjoint.  A degenerate ``(0.0, 0.0)`` entry
    stands for an atom at the origin whose mass is ``zero_atom_mass``.
    """

    intervals: tuple[tuple[float, float], ...]
    zero_atom_mass: float = 0.0

    def __post_init__(self) -> None:
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)) or a < 0 or b < a:
                raise ValueError(f"invalid support interval {(a, b)}")
        for (_, b), (a, _) in zip(ivs, ivs[1:]):
            if not b < a:
                raise ValueError("support intervals must be disjoint and sorted")

    @property
    def continuous(self) -> tuple[tuple[float, float], ...]:
        return tuple(iv for iv in self.intervals if iv[1] > iv[0])

    @property
    def has_zero_atom(self) -> bool:
        return bool(self.intervals) and self.intervals[0] == (0.0, 0.0)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        hit = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            hit |= (x >= a) & (x <= b)
        return hit


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    zero_atom_mass: float = 0.0

    def total_mass(self) -> float:
        return float(np.trapezoid(self.values, self.grid)) + self.zero_atom_mass


# ---------------------------------------------------------------------------
# Polynomial helpers
# ---------------------------------------------------------------------------


def _batch_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of each row of ``coeffs`` (highest degree first), via companion eigenvalues."""
    coeffs = np.asarray(coeffs, dtype=complex)
    lead = coeffs[:, 0]
    deg = coeffs.shape[1] - 1
    # A leading coefficient below rounding level relative to the rest means one
    # root near -c1/c0 (possibly at infinity) and the others from the deflated
    # polynomial; the companion matrix of such a row loses the small roots.
    tiny = np.abs(lead) <= 1e-16 * np.max(np.abs(coeffs[:, 1:]), axis=1)
    if deg > 1 and np.any(tiny):
        out = np.empty((coeffs.shape[0], deg), dtype=complex)
        out[tiny, : deg - 1] = _batch_roots(coeffs[tiny, 1:])
        far = np.full(int(tiny.sum()), np.inf + 0j)
        nz = lead[tiny] != 0
        with np.errstate(over="ignore"):
            far[nz] = -coeffs[tiny, 1][nz] / lead[tiny][nz]
        out[tiny, deg - 1] = far
        if np.any(~tiny):
            out[~tiny] = _batch_roots(coeffs[~tiny])
        return out
    comp = np.zeros((coeffs.shape[0], deg, deg), dtype=complex)
    comp[:, 0, :] = -coeffs[:, 1:] / lead[:, None]
    idx = np.arange(deg - 1)
    comp[:, idx + 1, idx] = 1.0
    return np.linalg.eigvals(comp)


def _scaled_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of row-wise polynomials after rescaling the variable.

    ``G = rho * y`` with ``rho`` the geometric mean of the root magnitudes,
    ``|c_deg / c_0|**(1/deg)``, so the substituted coefficients are of
    comparable size even when the roots are far from unit scale.  The
    rescaling is done in logarithms to avoid overflow.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = coeffs.shape[1] - 1
    mag = np.abs(coeffs)
    with np.errstate(divide="ignore"):
        logc = np.log(mag)
    ends = np.isfinite(logc[:, 0]) & np.isfinite(logc[:, -1])
    log_rho = np.where(ends, (np.where(ends, logc[:, -1] - logc[:, 0], 0.0)) / deg, 0.0)
    logmag = logc + np.arange(deg, -1, -1)[None, :] * log_rho[:, None]
    top = np.max(logmag, axis=1, keepdims=True)
    phase = np.where(mag > 0, np.exp(1j * np.angle(coeffs)), 0.0)
    scaled = phase * np.exp(logmag - top)
    y = _batch_roots(scaled)
    finite = np.isfinite(y)
    return np.where(finite, np.where(finite, y, 0.0) * np.exp(log_rho)[:, None], np.inf + 0j)


def _lowest_root(coeffs: np.ndarray) -> np.ndarray:
    """Per row, the root with the most negative imaginary part, Newton-polished.

    The polish matters when one real root is far larger than the others: the
    companion eigenvalues then carry an absolute error proportional to it.
    """
    roots = _scaled_roots(coeffs)
    pick = roots[np.arange(roots.shape[0]), np.argmin(roots.imag, axis=1)]
    return _newton_polish(coeffs, pick)


def _horner(coeffs: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of row-wise polynomials (highest first) at ``g``."""
    val = np.zeros_like(g)
    der = np.zeros_like(g)
    for k in range(coeffs.shape[1]):
        der = der * g + val
        val = val * g + coeffs[:, k]
    return val, der


def _newton_polish(coeffs: np.ndarray, g: np.ndarray, steps: int = 3) -> np.ndarray:
    for _ in range(steps):
        val, der = _horner(coeffs, g)
        ok = np.abs(der) > 0
        step = np.where(ok, val / np.where(ok, der, 1.0), 0.0)
        # Only accept steps that reduce the residual.
        trial = g - step
        tval, _ = _horner(coeffs, trial)
        g = np.where(np.abs(tval) <= np.abs(val), trial, g)
    return g


# ---------------------------------------------------------------------------
# Toy-model cubic
# ---------------------------------------------------------------------------


def _check_noise(model: ToyModel, t: float) -> None:
    if not (math.isfinite(t) and t >= 0):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    if 0 < t < MIN_RELATIVE_NOISE * model.s:
        raise OutOfRange(
            f"t={t!r} is below the resolvable range: use t = 0 or t >= {MIN_RELATIVE_NOISE:g} * s"
        )


def cubic_coefficients(model: ToyModel, t: float, z) -> CubicCoeffs:
    """Coefficients of the cubic whose root in ``D_{c,z}`` is ``G_t(z)``.

    Works elementwise on array ``z``.  At ``t = 0`` the leading coefficient
    vanishes and the polynomial is quadratic.
    """
    _check_noise(model, t)
    c, r, s = model.c, model.r, model.s
    z = np.asarray(z) if not np.isscalar(z) else z
    a = t * (1 - c) - z
    b = (t + s) * (1 - c) - z
    A = t * (t + s) * c**2 * z**2
    B = a * (t + s) * c * z + b * t * c * z
    C = r * t * c * z + (1 - r) * (t + s) * c * z + a * b
    D = r * a + (1 - r) * b
    return CubicCoeffs(A, B, C, D)


def cubic_discriminant(coeffs: CubicCoeffs | Sequence) -> float:
    """``18ABCD - 4B^3 D + B^2 C^2 - 4AC^3 - 27A^2 D^2``.

    Positive for three distinct real roots, negative for one real root and a
    complex pair.
    """
    A, B, C, D = coeffs
    return 18 * A * B * C * D - 4 * B**3 * D + B**2 * C**2 - 4 * A * C**3 - 27 * A**2 * D**2


def delta(model: ToyModel, t: float, x):
    """Discriminant of the toy cubic at real ``x``; negative on the continuous support."""
    x = np.asarray(x, dtype=float)
    out = cubic_discriminant(cubic_coefficients(model, t, x))
    return float(out) if out.ndim == 0 else out


def _reduced_delta_coefficients(c, r, s, t) -> list:
    """Coefficients (lowest first) of ``Q`` with ``delta(x) = x^4 Q(x)``.

    Closed-form symbolic expansion of the five-term discriminant; the
    coefficients of ``x^0 .. x^3`` vanish identically.  Plain arithmetic, so
    it also runs on mpmath numbers.
    """
    q0 = (c**2 * t**2 * (c - 1) ** 2 * (s + t) ** 2
          * (c**2 * r**2 * s**2 + 2 * c**2 * r * s * t + c**2 * t**2 - 2 * c * r * s**2
             - 4 * c * r * s * t + 2 * c * s * t + s**2))
    q1 = 2 * c**2 * t * (s + t) * (
        2 * c**3 * r**3 * s**3 - c**3 * r**2 * s**3 + 4 * c**3 * r**2 * s**2 * t
        - 3 * c**3 * r * s**2 * t + c**3 * r * s * t**2 - 2 * c**3 * s * t**2 - c**3 * t**3
        - 5 * c**2 * r**2 * s**3 - 10 * c**2 * r**2 * s**2 * t + 2 * c**2 * r * s**3
        + 9 * c**2 * r * s**2 * t - c**2 * r * s * t**2 - 3 * c**2 * s**2 * t - c**2 * s * t**2
        - c**2 * t**3 + 4 * c * r * s**3 + 6 * c * r * s**2 * t + 6 * c * r * s * t**2
        - c * s**3 - c * s**2 * t - 3 * c * s * t**2 - s**3 - 2 * s**2 * t)
    q2 = c**2 * (
        c**2 * r**2 * s**4 - 8 * c**2 * r**2 * s**3 * t - 8 * c**2 * r**2 * s**2 * t**2
        + 6 * c**2 * r * s**3 * t - 4 * c**2 * r * s**2 * t**2 - 8 * c**2 * r * s * t**3
        + 6 * c**2 * s**2 * t**2 + 6 * c**2 * s * t**3 + c**2 * t**4 - 2 * c * r * s**4
        - 10 * c * r * s**3 * t - 18 * c * r * s**2 * t**2 - 12 * c * r * s * t**3
        + 6 * c * s**3 * t + 10 * c * s**2 * t**2 + 6 * c * s * t**3 + s**4 + 6 * s**3 * t
        + 6 * s**2 * t**2)
    q3 = -2 * c**2 * s * (c * r * s**2 - 2 * c * r * s * t - 2 * c * r * t**2 + 2 * c * s * t
                          + c * t**2 + s**2 + 2 * s * t)
    q4 = c**2 * s**2
    return [q0, q1, q2, q3, q4]


def _delta_polynomial(model: ToyModel, t: float) -> tuple[Polynomial, float]:
    """Reduced discriminant as a polynomial in ``u = x / L``.

    Returns the polynomial (exact zero factors of ``u`` removed, normalized
    to unit max coefficient) and the length scale ``L``, the upper search
    bound, so the search interval is ``u`` in [0, 1].
    """
    L = model.search_bound(t)
    coef = np.array([q * L**k for k, q in enumerate(_reduced_delta_coefficients(model.c, model.r, model.s, t))])
    nz = np.flatnonzero(coef)
    if nz.size == 0:
        raise RootIsolationFailure("discriminant vanishes identically")
    coef = coef[nz[0] : nz[-1] + 1]
    return Polynomial(coef / np.max(np.abs(coef))), L


def _sign_change_roots(
    f: Callable[[np.ndarray], np.ndarray],
    candidates: Iterable[float],
    lo: float,
    hi: float,
    n_grid: int = 65,
) -> tuple[list[float], np.ndarray, np.ndarray]:
    """Bracket and polish the sign changes of ``f`` on ``[lo, hi]``.

    Sample points are the candidate abscissae (approximate roots and extrema
    supplied by the caller), a uniform safety grid, and all midpoints.
    Returns the roots plus the samples and their ``f < 0`` flags.
    """
    pts = np.concatenate([np.linspace(lo, hi, n_grid), np.fromiter(candidates, float)])
    pts = np.unique(pts[(pts >= lo) & (pts <= hi)])
    samples = np.unique(np.concatenate([pts, 0.5 * (pts[1:] + pts[:-1])]))
    vals = f(samples)
    neg = vals < 0
    # Exact zeros flanked by negative values are tangential touches inside the closure.
    zero = np.flatnonzero(vals == 0.0)
    for i in zero:
        j = i
        while j + 1 < len(vals) and vals[j + 1] == 0.0:
            j += 1
        if 0 < i and j + 1 < len(vals) and neg[i - 1] and neg[j + 1]:
            neg[i : j + 1] = True
    roots = []
    for i in np.flatnonzero(neg[1:] != neg[:-1]):
        a, b = samples[i], samples[i + 1]
        if vals[i] == 0.0:
            roots.append(float(a))
            continue
        if vals[i + 1] == 0.0:
            roots.append(float(b))
            continue
        try:
            roots.append(brentq(lambda v: float(f(np.array([v]))[0]), a, b, xtol=1e-16 * max(hi, 1.0), rtol=4 * np.finfo(float).eps, maxiter=500))
        except (RuntimeError, ValueError) as exc:
            raise RootIsolationFailure(f"bisection failed on [{a}, {b}]: {exc}") from exc
    return roots, samples, neg


def _negative_intervals(
    f: Callable[[np.ndarray], np.ndarray], candidates: Iterable[float], lo: float, hi: float
) -> tuple[list[tuple[float, float]], list[float]]:
    roots, samples, neg = _sign_change_roots(f, candidates, lo, hi)
    if neg[-1]:
        raise RootIsolationFailure(f"function still negative at the search bound {hi}")
    intervals: list[tuple[float, float]] = []
    start = samples[0] if neg[0] else None
    k = 0
    for i in range(len(samples) - 1):
        if neg[i] == neg[i + 1]:
            continue
        root = roots[k]
        k += 1
        if neg[i + 1]:
            start = root
        else:
            if intervals and intervals[-1][1] >= start:
                intervals[-1] = (intervals[-1][0], root)
            else:
                intervals.append((start, root))
    return intervals, roots


def _real_candidates(poly: Polynomial, im_tol: float = 1e-3) -> list[float]:
    out: list[float] = []
    for q in (poly, poly.deriv()):
        if q.degree() < 1:
            continue
        try:
            rts = q.roots()
        except np.linalg.LinAlgError:
            continue
        out.extend(float(v.real) for v in np.atleast_1d(rts) if abs(v.imag) <= im_tol)
    return out


def _mp_delta_evaluator(model: ToyModel, t: float, L: float) -> tuple[Callable, list[float]]:
    """Extended-precision version of the reduced discriminant in ``u``.

    Returns a vectorized evaluator (float in, float out) and the real
    critical points of the polynomial on [0, 1].
    """
    with mpmath.workdps(MP_DPS):
        coef = _reduced_delta_coefficients(*(mpmath.mpf(v) for v in (model.c, model.r, model.s, t)))
        Lm = mpmath.mpf(L)
        coef = [q * Lm**k for k, q in enumerate(coef)]
        while coef and coef[0] == 0:
            coef.pop(0)
        high = coef[::-1]
        deriv = [k * q for k, q in enumerate(coef)][1:][::-1]
        crit = []
        if len(deriv) > 1:
            for v in mpmath.polyroots(deriv, maxsteps=200, extraprec=2 * MP_DPS):
                v = mpmath.mpc(v)
                if abs(v.imag) <= mpmath.mpf(10) ** (-MP_DPS // 2) and 0 <= v.real <= 1:
                    crit.append(float(v.real))

    def evaluate(u: np.ndarray) -> np.ndarray:
        with mpmath.workdps(MP_DPS):
            return np.array([float(mpmath.polyval(high, mpmath.mpf(float(v)))) for v in np.atleast_1d(u)])

    return evaluate, crit


def _is_fragile(q: Polynomial, cands: Sequence[float]) -> bool:
    """True when a local extremum of ``q`` on [0, 1] is within rounding reach of zero."""
    dq = q.deriv()
    for u in cands:
        if 0.0 <= u <= 1.0 and abs(dq(u)) <= 1e-6 * max(1.0, abs(dq.coef).max()) and abs(q(u)) < FRAGILE_LEVEL:
            return True
    return False


@lru_cache(maxsize=4096)
def _toy_regions(model: ToyModel, t: float) -> tuple[tuple[tuple[float, float], ...], tuple[float, ...]]:
    q, L = _delta_polynomial(model, t)
    try:
        cands = _real_candidates(q)
    except np.linalg.LinAlgError:
        cands = []
    # Dense fallback grid when the companion step found nothing useful.
    if not cands:
        cands = list(np.linspace(0.0, 1.0, 4097))
    f: Callable = q
    if _is_fragile(q, [float(v) for v in np.atleast_1d(q.deriv().roots()).real] if q.degree() > 1 else []):
        f, crit = _mp_delta_evaluator(model, t, L)
        cands = cands + crit
    ivs, roots = _negative_intervals(f, cands, 0.0, 1.0)
    merged: list[tuple[float, float]] = []
    for a, b in ivs:
        a, b = a * L, b * L
        if merged and a - merged[-1][1] <= 8 * np.finfo(float).eps * max(a, 1.0):
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    ivs = tuple(merged)
    roots = tuple(v * L for v in roots if v > 0)
    return ivs, roots


def delta_roots(model: ToyModel, t: float) -> np.ndarray:
    """Positive real roots of ``delta`` where it changes sign, ascending."""
    _check_noise(model, t)
    return np.array(_toy_regions(model, float(t))[1])


def _zero_mass(h: AtomicDistribution, c: float) -> float:
    return max(h.zero_mass, 1.0 - 1.0 / c, 0.0)


def _with_zero_atom(intervals, mass: float) -> SupportSet:
    ivs = list(intervals)
    if mass > 0 and not (ivs and ivs[0][0] == 0.0):
        ivs.insert(0, (0.0, 0.0))
    return SupportSet(tuple(ivs), mass)


def support(model: ToyModel, t: float) -> SupportSet:
    """Support of the limiting law ``F^{c, H_t}`` from the sign of ``delta``.

    Raises
    ------
    RootIsolationFailure
        If the sign structure of the discriminant cannot be resolved.
    """
    _check_noise(model, t)
    ivs, _ = _toy_regions(model, float(t))
    return _with_zero_atom(ivs, _zero_mass(model.population(t), model.c))


# ---------------------------------------------------------------------------
# Cauchy transform and density
# ---------------------------------------------------------------------------


def _fixed_point(h: AtomicDistribution, c: float, z: np.ndarray, iters: int, damping: float) -> np.ndarray:
    """Damped iteration on the companion transform, mapped back to ``G``.

    The companion map ``m -> -1 / (z - c sum w tau / (1 + tau m))`` keeps
    ``m`` in the upper half-plane for every ``c``; iterating ``G`` directly
    can settle on a spurious fixed point once ``c > 1``.
    """
    w = np.array(h.weights)
    tau = np.array(h.locations)
    m = -1.0 / z
    for _ in range(iters):
        new = -1.0 / (z - c * np.sum(w * tau / (1.0 + m[:, None] * tau), axis=1))
        m = (1 - damping) * m + damping * new
    return -(m + (1 - c) / z) / c


def _select_roots(roots: np.ndarray, c: float, z: np.ndarray, h: AtomicDistribution) -> np.ndarray:
    tol_sel = 1e-12 * np.abs(1.0 / z)
    # A root at infinity (vanishing leading coefficient) gives NaN and is never admissible.
    with np.errstate(invalid="ignore"):
        test = ((1 - c) / z)[:, None] + c * roots
    ok = test.imag < -tol_sel[:, None]
    count = ok.sum(axis=1)
    chosen = np.where(count == 1, roots[np.arange(len(z)), np.argmax(ok, axis=1)], np.nan)
    bad = np.flatnonzero(count != 1)
    if bad.size:
        ref = _fixed_point(h, c, z[bad], FALLBACK_ITERATIONS, FALLBACK_DAMPING)
        dist = np.abs(roots[bad] - ref[:, None])
        pick = np.argmin(dist, axis=1)
        picked = roots[bad, pick]
        scale = np.maximum(np.abs(picked), np.abs(1.0 / z[bad]))
        if np.any(dist[np.arange(bad.size), pick] > 1e-6 * scale):
            raise RootSelectionAmbiguity(
                f"{bad.size} point(s) near z={z[bad][0]!r} have {int(count[bad][0])} admissible roots "
                "and the fixed-point fallback did not settle"
            )
        chosen[bad] = picked
    return chosen


def _as_complex_array(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr.reshape(-1), arr.ndim == 0


def cauchy_transform(model: ToyModel, t: float, z):
    """Cauchy transform ``G_t(z)`` for ``Im z > 0`` (scalar or array).

    The admissible root is the unique one with ``Im((1-c)/z + cG) < 0``.
    """
    zz, scalar = _as_complex_array(z)
    if np.any(zz.imag <= 0):
        raise ValueError("cauchy_transform requires Im z > 0")
    A, B, C, D = cubic_coefficients(model, t, zz)
    if t == 0:
        coeffs = np.stack([B, C, D], axis=1)
    else:
        coeffs = np.stack([A, B, C, D], axis=1)
    roots = _scaled_roots(coeffs)
    g = _select_roots(roots, model.c, zz, model.population(t))
    g = _newton_polish(coeffs, g)
    return complex(g[0]) if scalar else g.reshape(np.shape(z))


def density(model: ToyModel, t: float, x):
    """Density of the continuous part of ``F^{c, H_t}`` at real ``x``.

    Solves the real cubic at ``z = x`` directly; the density is ``|Im G|/pi``
    for the complex root with negative imaginary part, and zero wherever the
    discriminant is nonnegative.
    """
    xs = np.asarray(x, dtype=float)
    flat = xs.reshape(-1)
    out = np.zeros(flat.shape)
    inside = (delta(model, t, flat) < 0) & (flat > 0)
    if np.any(inside):
        A, B, C, D = cubic_coefficients(model, t, flat[inside])
        coeffs = np.stack([B, C, D], axis=1) if t == 0 else np.stack([A, B, C, D], axis=1)
        out[inside] = -_lowest_root(coeffs).imag / np.pi
    out = np.maximum(out, 0.0)
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


def density_curve(model: ToyModel, t: float, grid) -> DensityCurve:
    grid = np.asarray(grid, dtype=float)
    sup = support(model, t)
    return DensityCurve(grid, density(model, t, grid), sup.zero_atom_mass)


# ---------------------------------------------------------------------------
# General atomic population
# ---------------------------------------------------------------------------


def _general_coeffs(h: AtomicDistribution, c: float, z: np.ndarray) -> np.ndarray:
    """Polynomial in ``G`` (highest first) from clearing denominators, one row per ``z``.

    ``z G prod(l_k) - w_0 prod(l_k) - z sum_k w_k prod_{j != k} l_j`` with
    ``l_k = z - tau_k (1 - c + c z G)`` over the strictly positive atoms.
    """
    w, tau = h.positive_atoms()
    w0 = h.zero_mass
    n = z.shape[0]
    # Lowest-degree-first coefficient arrays, shape (n, deg + 1).
    lin = [np.stack([z - tk * (1 - c), -tk * c * z], axis=1) for tk in tau]

    def mul(p, q):
        out = np.zeros((n, p.shape[1] + q.shape[1] - 1), dtype=complex)
        for i in range(p.shape[1]):
            out[:, i : i + q.shape[1]] += p[:, i : i + 1] * q
        return out

    one = np.ones((n, 1), dtype=complex)
    prod_all = one
    for ell in lin:
        prod_all = mul(prod_all, ell)
    deg = len(tau) + 1
    poly = np.zeros((n, deg + 1), dtype=complex)
    poly[:, 1:] += z[:, None] * prod_all
    poly[:, : prod_all.shape[1]] -= w0 * prod_all
    for k in range(len(tau)):
        rest = one
        for j, ell in enumerate(lin):
            if j != k:
                rest = mul(rest, ell)
        poly[:, : rest.shape[1]] -= w[k] * z[:, None] * rest
    return poly[:, ::-1]


def general_cauchy(h: AtomicDistribution, c: float, z):
    """Cauchy transform of ``F^{c,H}`` for an atomic population law ``H``."""
    zz, scalar = _as_complex_array(z)
    if np.any(zz.imag <= 0):
        raise ValueError("general_cauchy requires Im z > 0")
    w, _ = h.positive_atoms()
    if w.size == 0:
        g = 1.0 / zz
    else:
        coeffs = _general_coeffs(h, c, zz)
        roots = _scaled_roots(coeffs)
        g = _select_roots(roots, c, zz, h)
        g = _newton_polish(coeffs, g)
    return complex(g[0]) if scalar else g.reshape(np.shape(z))


def _x_of_m(m, c, w, tau):
    m = np.asarray(m, dtype=float)
    return -1.0 / m + c * np.sum(w * tau / (1.0 + np.multiply.outer(m, tau)), axis=-1)


def _dx_of_m(m, c, w, tau):
    m = np.asarray(m, dtype=float)
    return 1.0 / m**2 - c * np.sum(w * tau**2 / (1.0 + np.multiply.outer(m, tau)) ** 2, axis=-1)


@lru_cache(maxsize=1024)
def general_support(h: AtomicDistribution, c: float) -> SupportSet:
    """Support of ``F^{c,H}`` for atomic ``H``.

    Uses the inverse of the companion Stieltjes transform,
    ``x(m) = -1/m + c sum_k w_k tau_k / (1 + tau_k m)``: a real ``x > 0`` lies
    outside the support iff ``x = x(m)`` for a real ``m`` where ``x(m)`` is
    increasing.  Edges are the values of ``x`` at its critical points.
    """
    w, tau = h.positive_atoms()
    mass0 = _zero_mass(h, c)
    if w.size == 0:
        return SupportSet(((0.0, 0.0),), 1.0)
    # Numerator of x'(m): prod (1 + tau m)^2 - c m^2 sum_k w_k tau_k^2 prod_{j!=k} (1 + tau_j m)^2
    sq = [Polynomial([1.0, tk]) ** 2 for tk in tau]
    num = Polynomial([1.0])
    for q in sq:
        num = num * q
    m2 = Polynomial([0.0, 0.0, 1.0])
    for k in range(len(tau)):
        rest = Polynomial([1.0])
        for j, q in enumerate(sq):
            if j != k:
                rest = rest * q
        num = num - c * w[k] * tau[k] ** 2 * m2 * rest
    poles = sorted({0.0, *(-1.0 / tau)})
    crit = [float(v.real) for v in num.roots() if abs(v.imag) <= 1e-6 * max(1.0, abs(v))]
    # Polish critical points on sign changes of x'.
    polished = []
    for m0 in crit:
        if any(abs(m0 - p) < 1e-12 for p in poles):
            continue
        try:
            step = 1e-7 * max(abs(m0), 1e-3)
            a, b = m0 - step, m0 + step
            fa, fb = _dx_of_m(a, c, w, tau), _dx_of_m(b, c, w, tau)
            if fa * fb < 0:
                m0 = brentq(lambda v: float(_dx_of_m(v, c, w, tau)), a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        except ValueError:
            pass
        polished.append(m0)
    breaks = sorted(set(poles) | set(polished))
    pole_set = set(poles)
    edges = [-math.inf, *breaks, math.inf]

    def limit(m: float, from_right: bool) -> float:
        if math.isinf(m):
            return 0.0
        if m in pole_set:
            if m == 0.0:
                return -math.inf if from_right else math.inf
            return math.inf if from_right else -math.inf
        return float(_x_of_m(m, c, w, tau))

    excluded = []
    for lo, hi in zip(edges, edges[1:]):
        if math.isinf(lo):
            mid = hi - max(1.0, abs(hi))
        elif math.isinf(hi):
            mid = lo + max(1.0, abs(lo))
        else:
            mid = 0.5 * (lo + hi)
        if _dx_of_m(mid, c, w, tau) > 0:
            a, b = limit(lo, True), limit(hi, False)
            if b > 0:
                excluded.append((max(a, 0.0), b))
    excluded.sort()
    # Complement of the union of open excluded intervals within (0, inf).
    scale = float(tau.max())
    ivs = []
    cursor = 0.0
    for a, b in excluded:
        if a > cursor + 1e-12 * scale:
            ivs.append((cursor, a))
        cursor = max(cursor, b)
    if not math.isinf(cursor):
        raise RootIsolationFailure("support appears unbounded; critical point search failed")
    return _with_zero_atom(ivs, mass0)


def general_density(h: AtomicDistribution, c: float, x):
    """Density of the continuous part of ``F^{c,H}`` at real ``x``.

    The zero atom, of mass ``max(H({0}), 1 - 1/c, 0)``, is not included; it is
    available as ``general_support(h, c).zero_atom_mass``.
    """
    xs = np.asarray(x, dtype=float)
    flat = xs.reshape(-1)
    out = np.zeros(flat.shape)
    sup = general_support(h, c)
    inside = np.zeros(flat.shape, dtype=bool)
    for a, b in sup.continuous:
        inside |= (flat > a) & (flat < b)
    inside &= flat > 0
    if np.any(inside):
        coeffs = _general_coeffs(h, c, flat[inside].astype(complex))
        out[inside] = np.maximum(-_lowest_root(coeffs).imag, 0.0) / np.pi
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


# ---------------------------------------------------------------------------
# Integration helpers
# ---------------------------------------------------------------------------


def support_mass(fn: Callable[[np.ndarray], np.ndarray], sup: SupportSet) -> float:
    """Integral of ``fn`` over the continuous support, plus the zero atom.

    Each interval is mapped by ``x = l + (u - l)(1 - cos theta)/2`` so that
    square-root edge behaviour becomes smooth before adaptive quadrature.
    """
    total = sup.zero_atom_mass
    for a, b in sup.continuous:
        half = 0.5 * (b - a)

        def integrand(theta, a=a, half=half):
            x = a + half * (1.0 - math.cos(theta))
            return float(fn(np.array([x]))[0]) * half * math.sin(theta)

        # A lower edge very close to the origin (relative to the width) comes
        # with a steep 1/x-like rise; geometric breakpoints let quad see it.
        rel = a / (b - a)
        brk = None
        if 0 < rel < 1e-3:
            q = 10.0 ** -np.arange(1, min(16, int(-math.log10(max(rel, 1e-16))) + 2))
            brk = np.sort(np.arccos(1 - 2 * q))
        val, _ = integrate.quad(integrand, 0.0, math.pi, points=brk, limit=400, epsabs=1e-12, epsrel=1e-10)
        total += val
    return total


def asymptotic_cdf(
    fn: Callable[[np.ndarray], np.ndarray], sup: SupportSet, nodes: int = 2049
) -> Callable[[np.ndarray], np.ndarray]:
    """Cumulative distribution of a law with density ``fn`` on ``sup``.

    Each interval is tabulated on a cosine-spaced grid (cumulative trapezoid
    in the angle variable) and interpolated linearly in ``x``.
    """
    xs_all = [np.array([0.0])]
    cdf_all = [np.array([sup.zero_atom_mass])]
    running = sup.zero_atom_mass
    for a, b in sup.continuous:
        theta = np.linspace(0.0, math.pi, nodes)
        half = 0.5 * (b - a)
        xs = a + half * (1.0 - np.cos(theta))
        vals = fn(xs) * half * np.sin(theta)
        cum = integrate.cumulative_trapezoid(vals, theta, initial=0.0)
        xs_all.append(xs)
        cdf_all.append(running + cum)
        running += cum[-1]
    grid = np.concatenate(xs_all)
    table = np.concatenate(cdf_all)
    order = np.argsort(grid, kind="stable")
    grid, table = grid[order], table[order]

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, grid, table, left=0.0, right=running)
        return np.where(x < 0, 0.0, out)

    return cdf
