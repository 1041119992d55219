"""Spectral-gap utility of the toy model and diagnostics for its monotonicity.

The utility at noise power ``t`` is the distance between the two connected
components of the limiting support (zero once they merge).  At ``t = 0``
the lower component is the atom at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoMergeFound, SpecSepError
from .spectral import ToyModel, delta_roots, support

__all__ = [
    "UtilityCurve",
    "TStarResult",
    "ConjectureReport",
    "components",
    "component_count",
    "utility",
    "utility_from_roots",
    "t_upper",
    "t_star",
    "t_star_search",
    "default_grid",
    "utility_curve",
    "conjecture_diagnostics",
    "diagnose_curve",
]

DIAGNOSTIC_TOL = 1e-9


@dataclass(frozen=True)
class UtilityCurve:
    model: ToyModel
    t_grid: np.ndarray
    u_values: np.ndarray
    n_values: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.u_values < 0):
            raise ValueError("utility values must be nonnegative")
        if np.any((self.u_values == 0) != (self.n_values == 1)):
            raise ValueError("utility must vanish exactly when the support is connected")

    def rows(self):
        for t, u, n in zip(self.t_grid, self.u_values, self.n_values):
            yield float(t), float(u), int(n)


@dataclass(frozen=True)
class TStarResult:
    t_star: float
    t_upper: float
    transitions: tuple[tuple[float, float], ...] = ()
    conjecture1_violation: bool = False


@dataclass
class ConjectureReport:
    model: ToyModel | None
    grid: np.ndarray
    n_monotone_violations: list[tuple[float, float]] = field(default_factory=list)
    u_monotone_violations: list[tuple[float, float]] = field(default_factory=list)
    u_convexity_violations: list[tuple[float, float, float]] = field(default_factory=list)

    @property
    def verdicts(self) -> dict[str, str]:
        def verdict(bad):
            return "consistent on grid" if not bad else f"violated at {len(bad)} point(s)"

        return {
            "N non-increasing": verdict(self.n_monotone_violations),
            "U non-increasing": verdict(self.u_monotone_violations),
            "U convex": verdict(self.u_convexity_violations),
        }

    @property
    def clean(self) -> bool:
        return not (self.n_monotone_violations or self.u_monotone_violations or self.u_convexity_violations)


def components(model: ToyModel, t: float) -> list[tuple[float, float]]:
    """Connected components of the support used by the utility.

    For ``t > 0`` these are the continuous intervals.  At ``t = 0`` the atom
    at the origin is a component of its own unless a bulk already touches 0.
    """
    sup = support(model, t)
    if t == 0:
        return list(sup.intervals)
    return list(sup.continuous)


def component_count(model: ToyModel, t: float) -> int:
    """Number of connected components ``N(t)``; always 1 or 2 for the toy model."""
    n = len(components(model, t))
    if n not in (1, 2):
        raise SpecSepError(f"support of the toy model at t={t} has {n} components")
    return n


def utility(model: ToyModel, t: float) -> float:
    """Gap between the two support components, or 0 once they have merged."""
    comps = components(model, t)
    if len(comps) == 1:
        return 0.0
    if len(comps) != 2:
        raise SpecSepError(f"support of the toy model at t={t} has {len(comps)} components")
    return comps[1][0] - comps[0][1]


def utility_from_roots(model: ToyModel, t: float) -> float:
    """Utility as the third minus the second positive root of the discriminant.

    Only defined for ``t > 0`` with a split support (four sign-change roots).
    """
    roots = delta_roots(model, t)
    if len(roots) == 2:
        return 0.0
    if len(roots) != 4:
        raise SpecSepError(f"expected 2 or 4 positive roots of delta, found {len(roots)}")
    return float(roots[2] - roots[1])


def t_upper(model: ToyModel, max_doublings: int = 60) -> float:
    """Smallest ``s * 2**k`` (k >= 0) at which the support is connected."""
    t = model.s
    for _ in range(max_doublings):
        if component_count(model, t) == 1:
            return t
        t *= 2.0
    raise NoMergeFound(f"support still split at t={t} after {max_doublings} doublings")


def t_star_search(
    model: ToyModel, tol: float = 1e-8, n_scan: int = 200, t_max: float | None = None
) -> TStarResult:
    """Locate the merge point of the two support components.

    A coarse uniform scan on ``[0, t_max]`` counts the transitions of
    ``N(t)``; the last 2 -> 1 transition is refined by bisection.  More than
    one transition contradicts the conjectured monotonicity of ``N`` and is
    flagged rather than hidden.
    """
    upper = t_upper(model) if t_max is None else float(t_max)
    if component_count(model, 0.0) == 1:
        return TStarResult(0.0, upper)
    grid = np.linspace(0.0, upper, n_scan)
    counts = np.array([component_count(model, t) for t in grid])
    if counts[-1] == 2:
        raise NoMergeFound(f"support still split at t_max={upper}")
    change = np.flatnonzero(counts[1:] != counts[:-1])
    transitions = tuple((float(grid[i]), float(grid[i + 1])) for i in change)
    merges = [i for i in change if counts[i] == 2]
    lo, hi = grid[merges[-1]], grid[merges[-1] + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if component_count(model, mid) == 2:
            lo = mid
        else:
            hi = mid
    return TStarResult(float(hi), upper, transitions, len(transitions) > 1)


def t_star(model: ToyModel, tol: float = 1e-8) -> float:
    """Critical noise power: utility is positive below it and zero above."""
    return t_star_search(model, tol).t_star


def default_grid(model: ToyModel, n_points: int = 200) -> np.ndarray:
    """``t = 0`` plus log-spaced points on ``(0, t_upper]``."""
    upper = t_upper(model)
    return np.concatenate([[0.0], np.geomspace(upper * 1e-4, upper, n_points)])


def utility_curve(model: ToyModel, t_grid=None) -> UtilityCurve:
    grid = default_grid(model) if t_grid is None else np.asarray(t_grid, dtype=float)
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be nonnegative and strictly increasing")
    comps = [components(model, t) for t in grid]
    n = np.array([len(cs) for cs in comps])
    if np.any((n < 1) | (n > 2)):
        raise SpecSepError("toy model support with more than two components")
    u = np.array([cs[1][0] - cs[0][1] if len(cs) == 2 else 0.0 for cs in comps])
    return UtilityCurve(model, grid, u, n)


def diagnose_curve(curve: UtilityCurve, tol: float = DIAGNOSTIC_TOL) -> ConjectureReport:
    """Grid-level checks: N and U non-increasing, U convex.

    Convexity is tested against the chord through the neighbouring points,
    which reduces to the midpoint rule on uniform grids.
    """
    t, u, n = curve.t_grid, curve.u_values, curve.n_values
    report = ConjectureReport(curve.model, t)
    for i in range(len(t) - 1):
        if n[i + 1] > n[i]:
            report.n_monotone_violations.append((float(t[i]), float(t[i + 1])))
        if u[i + 1] > u[i] + tol:
            report.u_monotone_violations.append((float(t[i]), float(t[i + 1])))
    for i in range(len(t) - 2):
        lam = (t[i + 1] - t[i]) / (t[i + 2] - t[i])
        chord = (1 - lam) * u[i] + lam * u[i + 2]
        if u[i + 1] > chord + tol:
            report.u_convexity_violations.append((float(t[i]), float(t[i + 1]), float(t[i + 2])))
    return report


def conjecture_diagnostics(model: ToyModel, t_grid=None, tol: float = DIAGNOSTIC_TOL) -> ConjectureReport:
    grid = default_grid(model) if t_grid is None else np.asarray(t_grid, dtype=float)
    if grid.size < 3:
        raise ValueError("conjecture diagnostics need at least three grid points")
    return diagnose_curve(utility_curve(model, grid), tol)
