"""``specsep`` command line: configuration, dispatch and result files.

Every output embeds the resolved configuration and the tool version, so a
JSON result can be fed back through ``--config`` to reproduce it exactly.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import NoGap, SpecSepError
from .privacy import (
    SigmaSpec,
    g_et,
    g_it,
    p_it_toy,
    privacy_profile,
    spike_count,
)
from .simulate import (
    SimConfig,
    gap_violation_check,
    ks_distance,
    mass_split,
    simulate,
)
from .spectral import (
    AtomicDistribution,
    ToyModel,
    density,
    general_density,
    general_support,
    support,
)
from .svgplot import histogram_panels, line_plot
from .utility import conjecture_diagnostics, default_grid, t_star_search, utility_curve

COMMANDS = ("support", "density", "utility", "privacy", "tradeoff", "simulate", "verify", "conjectures")
FORMATS = ("csv", "json", "svg")

KS_THRESHOLD = 0.05
GAP_CLEAN_FRACTION = 0.95
MASS_SPLIT_FRACTION = 0.9

EXAMPLE1_SPECTRUM = [[0.0, 35], [7.0, 10], [10.0, 5]]
PRESETS: dict[str, dict[str, Any]] = {
    "example1": {"spectrum": EXAMPLE1_SPECTRUM, "p": 50, "n": 2000, "t": [0.0, 5.0, 10.0, 20.0]},
    "fig1": {"spectrum": EXAMPLE1_SPECTRUM, "p": 50, "n": 2000, "t": [0.0, 5.0, 10.0, 20.0]},
    "fig2": {"spectrum": [[0.0, 350], [7.0, 100], [10.0, 50]], "c": 0.025, "p": 500, "n": 20000, "t": [0.0]},
    "fig3": {"c": 0.025, "r": 0.3, "s": 10.0, "t_max": 30.0},
    "fig4": {"c": 0.025, "r": 0.3, "s": 10.0, "p": 50, "eps_max": 12.0},
    "fig5": {"c": 0.025, "r": 0.3, "s": 10.0, "t": [10.0], "p": 400, "n": 16000, "trials": 20, "margin": 0.05},
}


class UsageError(Exception):
    """Bad command-line or configuration input (exit status 2)."""


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    c: float | None = None
    r: float | None = None
    s: float | None = None
    spectrum: list | None = None
    p: int | None = None
    n: int | None = None
    t: list | None = None
    t_max: float | None = None
    t_points: int = 201
    x_min: float | None = None
    x_max: float | None = None
    x_points: int = 801
    eps_max: float | None = None
    eps_points: int = 200
    measure: str = "it"
    trials: int = 1
    seed: int = 0
    entry_dist: str = "gaussian"
    noise_dist: str = "gaussian"
    margin: float = 0.05
    tol: float = 1e-8
    bins: int = 60
    rotate: bool = False
    format: str = "csv"
    out: str | None = None

    def embedded(self) -> dict:
        """Resolved configuration as written into output files (output path excluded)."""
        data = asdict(self)
        data.pop("out")
        return data


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _spectrum_arg(text: str) -> list:
    """``value:multiplicity,...`` -> ``[[value, multiplicity], ...]``."""
    out = []
    try:
        for item in text.split(","):
            value, _, mult = item.partition(":")
            out.append([float(value), int(mult) if mult else 1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected value:multiplicity pairs, got {text!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specsep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"specsep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_file", help="JSON config (or a previous JSON result)")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--c", type=float, help="aspect ratio p/n")
    common.add_argument("--r", type=float, help="spike fraction in (0, 1)")
    common.add_argument("--s", type=float, help="spike eigenvalue")
    common.add_argument("--spectrum", type=_spectrum_arg, help="population spectrum, e.g. 0:35,7:10,10:5")
    common.add_argument("--p", type=int, help="dimension")
    common.add_argument("--n", type=int, help="sample size")
    common.add_argument("--t", type=_float_list, help="noise power(s), comma separated")
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--t-points", dest="t_points", type=int)
    common.add_argument("--x-min", dest="x_min", type=float)
    common.add_argument("--x-max", dest="x_max", type=float)
    common.add_argument("--x-points", dest="x_points", type=int)
    common.add_argument("--eps-max", dest="eps_max", type=float)
    common.add_argument("--eps-points", dest="eps_points", type=int)
    common.add_argument("--measure", choices=("it", "et"))
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--entry-dist", dest="entry_dist", choices=("gaussian", "rademacher", "uniform"))
    common.add_argument("--noise-dist", dest="noise_dist", choices=("gaussian", "rademacher", "uniform"))
    common.add_argument("--margin", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--bins", type=int)
    common.add_argument("--rotate", action="store_true")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _read_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    if isinstance(data, dict) and "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise UsageError("--config: expected a JSON object")
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise UsageError(f"--config: unknown key(s) {', '.join(unknown)}")
    return data


def parse_config(argv: list[str] | None = None, file: str | None = None) -> RunConfig:
    """Resolve a :class:`RunConfig`: flags over config file over preset over defaults."""
    try:
        ns = vars(build_parser().parse_args(argv))
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line") from None
    command = ns.pop("command")
    file = ns.pop("config_file", file)
    file_values = _read_config_file(file) if file else {}
    if file_values.get("command", command) != command:
        raise UsageError(f"--config was written for '{file_values['command']}', not '{command}'")
    preset = ns.get("preset", file_values.get("preset"))
    merged: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise UsageError(f"--preset: unknown preset {preset!r}")
        merged.update(PRESETS[preset])
    merged.update(file_values)
    merged.update(ns)
    merged["command"] = command
    merged["preset"] = preset
    if isinstance(merged.get("t"), (int, float)):
        merged["t"] = [float(merged["t"])]
    cfg = RunConfig(**merged)
    _validate(cfg)
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise UsageError(f"missing required --{name.replace('_', '-')}")


def _check(cond: bool, flag: str, valid: str, value) -> None:
    if not cond:
        raise UsageError(f"--{flag}={value!r} out of range; expected {valid}")


def _validate(cfg: RunConfig) -> None:
    if cfg.c is not None:
        _check(math.isfinite(cfg.c) and cfg.c > 0, "c", "c > 0", cfg.c)
    if cfg.r is not None:
        _check(0 < cfg.r < 1, "r", "0 < r < 1", cfg.r)
    if cfg.s is not None:
        _check(math.isfinite(cfg.s) and cfg.s > 0, "s", "s > 0", cfg.s)
    if cfg.p is not None:
        _check(cfg.p >= 1, "p", "p >= 1", cfg.p)
    if cfg.n is not None:
        _check(cfg.n >= 1, "n", "n >= 1", cfg.n)
    if cfg.t is not None:
        _check(len(cfg.t) >= 1 and all(math.isfinite(v) and v >= 0 for v in cfg.t), "t", "t >= 0", cfg.t)
    if cfg.t_max is not None:
        _check(cfg.t_max > 0, "t-max", "t-max > 0", cfg.t_max)
    _check(cfg.t_points >= 3, "t-points", ">= 3", cfg.t_points)
    _check(cfg.x_points >= 2, "x-points", ">= 2", cfg.x_points)
    if cfg.eps_max is not None:
        _check(cfg.eps_max > 0, "eps-max", "eps-max > 0", cfg.eps_max)
    _check(cfg.eps_points >= 1, "eps-points", ">= 1", cfg.eps_points)
    _check(cfg.measure in ("it", "et"), "measure", "it or et", cfg.measure)
    _check(cfg.trials >= 1, "trials", ">= 1", cfg.trials)
    _check(0 <= cfg.seed < 2**64, "seed", "0 <= seed < 2**64", cfg.seed)
    _check(0 <= cfg.margin < 0.5, "margin", "0 <= margin < 0.5", cfg.margin)
    _check(cfg.tol > 0, "tol", "tol > 0", cfg.tol)
    _check(cfg.bins >= 1, "bins", ">= 1", cfg.bins)
    _check(cfg.format in FORMATS, "format", "csv, json or svg", cfg.format)
    if cfg.spectrum is not None:
        ok = all(len(item) == 2 and item[0] >= 0 and int(item[1]) >= 1 for item in cfg.spectrum)
        _check(ok and len(cfg.spectrum) > 0, "spectrum", "value:multiplicity pairs, value >= 0", cfg.spectrum)


# ---------------------------------------------------------------------------
# Model construction helpers
# ---------------------------------------------------------------------------


def _toy(cfg: RunConfig) -> ToyModel:
    _require(cfg, "c", "r", "s")
    return ToyModel(cfg.c, cfg.r, cfg.s)


def _single_t(cfg: RunConfig) -> float:
    _require(cfg, "t")
    if len(cfg.t) != 1:
        raise UsageError(f"--t: '{cfg.command}' takes a single noise power")
    return cfg.t[0]


def _expanded_spectrum(cfg: RunConfig) -> list[float]:
    return [float(v) for v, k in cfg.spectrum for _ in range(int(k))]


def _aspect_ratio(cfg: RunConfig) -> float:
    if cfg.c is not None:
        return cfg.c
    if cfg.p is not None and cfg.n is not None:
        return cfg.p / cfg.n
    raise UsageError("missing required --c (or both --p and --n)")


def _population(cfg: RunConfig) -> AtomicDistribution:
    return AtomicDistribution.from_spectrum(_expanded_spectrum(cfg))


def _sigma(cfg: RunConfig) -> SigmaSpec:
    if cfg.spectrum is not None:
        sigma = SigmaSpec(tuple(_expanded_spectrum(cfg)))
        if cfg.p is not None and cfg.p != sigma.p:
            raise UsageError(f"--spectrum has {sigma.p} entries but --p={cfg.p}")
        return sigma
    _require(cfg, "r", "s", "p")
    return SigmaSpec.toy(cfg.r, cfg.s, cfg.p)


def _dimensions(cfg: RunConfig) -> tuple[int, int]:
    sigma_p = cfg.p if cfg.p is not None else (sum(int(k) for _, k in cfg.spectrum) if cfg.spectrum else None)
    if sigma_p is None:
        raise UsageError("missing required --p")
    if cfg.n is not None:
        n = cfg.n
    elif cfg.c is not None:
        n = int(round(sigma_p / cfg.c))
    else:
        raise UsageError("missing required --n (or --c)")
    if cfg.c is not None and abs(sigma_p / n - cfg.c) > 1e-9 * cfg.c:
        raise UsageError(f"--c={cfg.c} disagrees with p/n = {sigma_p}/{n}")
    return sigma_p, n


# ---------------------------------------------------------------------------
# Subcommands: each returns (columns, rows, result-dict, svg-or-None)
# ---------------------------------------------------------------------------


def _cmd_support(cfg: RunConfig):
    t = _single_t(cfg)
    if cfg.spectrum is not None:
        sup = general_support(_population(cfg).shift(t), _aspect_ratio(cfg))
    else:
        sup = support(_toy(cfg), t)
    rows = [(a, b) for a, b in sup.intervals]
    result = {"intervals": [list(iv) for iv in sup.intervals], "zero_atom_mass": sup.zero_atom_mass, "n_intervals": len(sup)}
    return ("lower", "upper"), rows, result, None


def _density_fn(cfg: RunConfig, t: float):
    if cfg.spectrum is not None:
        h, c = _population(cfg).shift(t), _aspect_ratio(cfg)
        return (lambda x: general_density(h, c, x)), general_support(h, c), max(h.locations) * (1 + math.sqrt(c)) ** 2 * 1.2
    model = _toy(cfg)
    return (lambda x: density(model, t, x)), support(model, t), model.search_bound(t) / 1.25


def _cmd_density(cfg: RunConfig):
    t = _single_t(cfg)
    fn, sup, default_max = _density_fn(cfg, t)
    x = np.linspace(cfg.x_min or 0.0, cfg.x_max if cfg.x_max is not None else default_max, cfg.x_points)
    f = fn(x)
    result = {"x": x.tolist(), "f": f.tolist(), "zero_atom_mass": sup.zero_atom_mass}
    svg = line_plot([("density", x, f)], f"limiting density, t = {t:g}", "x", "f(x)")
    return ("x", "f"), list(zip(x, f)), result, svg


def _cmd_utility(cfg: RunConfig):
    model = _toy(cfg)
    grid = default_grid(model) if cfg.t_max is None else np.linspace(0.0, cfg.t_max, cfg.t_points)
    curve = utility_curve(model, grid)
    ts = t_star_search(model, cfg.tol)
    result = {
        "t": curve.t_grid.tolist(),
        "utility": curve.u_values.tolist(),
        "n_components": curve.n_values.tolist(),
        "t_star": ts.t_star,
        "t_upper": ts.t_upper,
        "conjecture1_violation": ts.conjecture1_violation,
    }
    svg = line_plot([("U(t)", curve.t_grid, curve.u_values)], f"utility (t* = {ts.t_star:.6g})", "t", "U(t)")
    return ("t", "utility", "n_components"), list(curve.rows()), result, svg


def _cmd_privacy(cfg: RunConfig):
    sigma = _sigma(cfg)
    top = max(sigma.eigenvalues) or 1.0
    t_max = cfg.t_max if cfg.t_max is not None else 10.0 * top
    grid = np.linspace(t_max / cfg.t_points, t_max, cfg.t_points)
    prof = privacy_profile(sigma, grid)
    result = {"t": grid.tolist(), "p_it": prof.p_it_values.tolist(), "p_et": prof.p_et_values.tolist(), "units": "mutual information in nats"}
    svg = line_plot([("P_IT (nats)", grid, prof.p_it_values), ("P_ET", grid, prof.p_et_values)], "privacy leakage", "t", "leakage")
    return ("t", "p_it", "p_et"), list(zip(grid, prof.p_it_values, prof.p_et_values)), result, svg


def _cmd_tradeoff(cfg: RunConfig):
    model = _toy(cfg)
    _require(cfg, "p", "eps_max")
    k = spike_count(model.r, cfg.p)
    if cfg.measure == "et" and cfg.eps_max >= k * model.s:
        raise UsageError(f"--eps-max={cfg.eps_max} out of range; expected < floor(r p) s = {k * model.s}")
    eps = np.linspace(cfg.eps_max / cfg.eps_points, cfg.eps_max, cfg.eps_points)
    g_fn = g_it if cfg.measure == "it" else g_et
    g = np.array([g_fn(model, cfg.p, float(e)) for e in eps])
    ts = t_star_search(model, cfg.tol).t_star
    result = {"epsilon": eps.tolist(), "g": g.tolist(), "measure": cfg.measure, "t_star": ts}
    if cfg.measure == "it":
        result["units"] = "epsilon is mutual information in nats"
    if cfg.measure == "it" and ts > 0:
        result["epsilon_threshold"] = p_it_toy(model.r, model.s, cfg.p, ts)
    svg = line_plot([(f"g_{cfg.measure.upper()}", eps, g)], "privacy-utility trade-off", "epsilon", "g(epsilon)")
    return ("epsilon", "g"), list(zip(eps, g)), result, svg


def _sim_config(cfg: RunConfig, t: float) -> SimConfig:
    sigma = _sigma(cfg)
    p, n = _dimensions(cfg)
    if sigma.p != p:
        raise UsageError(f"spectrum has {sigma.p} entries but --p={p}")
    return SimConfig(p, n, sigma, t, cfg.entry_dist, cfg.noise_dist, cfg.seed, cfg.trials, cfg.rotate)


def _cmd_simulate(cfg: RunConfig):
    _require(cfg, "t")
    runs = []
    rows = []
    panels = []
    for t in cfg.t:
        sim = _sim_config(cfg, t)
        spectra = simulate(sim)
        runs.append({"t": t, "spectra": [s.eigenvalues.tolist() for s in spectra]})
        for s in spectra:
            for i, v in enumerate(s.eigenvalues):
                rows.append((t, s.trial, i, v) if len(cfg.t) > 1 else (s.trial, i, v))
        pooled = np.concatenate([s.eigenvalues for s in spectra])
        if cfg.spectrum is not None:
            h = AtomicDistribution.from_spectrum(sim.sigma.eigenvalues).shift(t)
            fn = lambda x, h=h: general_density(h, sim.c, x)  # noqa: E731
        else:
            model = ToyModel(sim.c, cfg.r, cfg.s)
            fn = lambda x, model=model, t=t: density(model, t, x)  # noqa: E731
        # Histogram of the continuous part only; the zero atom would swamp it.
        shown = pooled[pooled > 1e-8 * max(pooled.max(), 1.0)]
        xs = np.linspace(0.0, float(pooled.max()) * 1.05, 600)
        panels.append((f"t = {t:g}", shown if shown.size else pooled, (xs, fn(xs))))
    cols = ("t", "trial", "index", "eigenvalue") if len(cfg.t) > 1 else ("trial", "index", "eigenvalue")
    svg = histogram_panels(panels, bins=cfg.bins)
    return cols, rows, {"runs": runs}, svg


def _cmd_verify(cfg: RunConfig):
    model = _toy(cfg)
    t = _single_t(cfg)
    sim = _sim_config(cfg, t)
    if abs(sim.c - model.c) > 1e-9 * model.c:
        raise UsageError(f"--c={model.c} disagrees with p/n = {sim.c}")
    spectra = simulate(sim)
    sup = support(model, t)
    checks = []
    ks = ks_distance(spectra, model, t)
    checks.append(("ks_distance", ks, KS_THRESHOLD, ks <= KS_THRESHOLD))
    try:
        gap = gap_violation_check(spectra, sup, cfg.margin)
        need = math.ceil(GAP_CLEAN_FRACTION * sim.trials)
        checks.append(("gap_clean_trials", gap.clean_trials, need, gap.clean_trials >= need))
        k = spike_count(model.r, sim.p)
        exact = sum(1 for s in spectra if round(mass_split(s, sup)[1] * sim.p) == k)
        need = math.ceil(MASS_SPLIT_FRACTION * sim.trials)
        checks.append(("mass_split_exact_trials", exact, need, exact >= need))
    except NoGap:
        pass
    passed = all(c[3] for c in checks)
    result = {"checks": [dict(zip(("check", "value", "threshold", "pass"), c)) for c in checks], "passed": passed}
    rows = [(name, value, thr, "PASS" if ok else "FAIL") for name, value, thr, ok in checks]
    xs = np.linspace(0, model.search_bound(t) / 1.3, 600)
    svg = histogram_panels([(f"verify t = {t:g}", np.concatenate([s.eigenvalues for s in spectra]), (xs, density(model, t, xs)))], bins=cfg.bins)
    return ("check", "value", "threshold", "result"), rows, result, svg


def _cmd_conjectures(cfg: RunConfig):
    model = _toy(cfg)
    grid = default_grid(model) if cfg.t_max is None else np.linspace(0.0, cfg.t_max, cfg.t_points)
    rep = conjecture_diagnostics(model, grid)
    lists = {
        "N non-increasing": rep.n_monotone_violations,
        "U non-increasing": rep.u_monotone_violations,
        "U convex": rep.u_convexity_violations,
    }
    result = {
        "verdicts": rep.verdicts,
        "violations": {k: [list(v) for v in vs] for k, vs in lists.items()},
        "grid_points": len(grid),
    }
    rows = [(k, len(vs), rep.verdicts[k]) for k, vs in lists.items()]
    curve = utility_curve(model, grid)
    svg = line_plot([("U(t)", curve.t_grid, curve.u_values)], "utility on the diagnostic grid", "t", "U(t)")
    return ("check", "violations", "verdict"), rows, result, svg


DISPATCH = {
    "support": _cmd_support,
    "density": _cmd_density,
    "utility": _cmd_utility,
    "privacy": _cmd_privacy,
    "tradeoff": _cmd_tradeoff,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "conjectures": _cmd_conjectures,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_, str)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def render(cfg: RunConfig, columns, rows, result, svg) -> str:
    meta = json.dumps({"tool": "specsep", "version": __version__, "config": cfg.embedded()}, sort_keys=True)
    if cfg.format == "json":
        doc = {"tool": "specsep", "version": __version__, "config": cfg.embedded(), "result": result}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if cfg.format == "svg":
        if svg is None:
            raise UsageError(f"--format svg is not available for '{cfg.command}'")
        return svg.replace("<metadata></metadata>", f"<metadata>{_escape(meta)}</metadata>", 1)
    buf = io.StringIO()
    buf.write(f"# {meta}\n")
    for key in ("units", "t_star", "epsilon_threshold", "zero_atom_mass", "passed"):
        if key in result:
            value = result[key]
            buf.write(f"# {key}: {value if isinstance(value, str) else _fmt(value)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    """Execute one resolved configuration; returns the process exit status."""
    columns, rows, result, svg = DISPATCH[cfg.command](cfg)
    text = render(cfg, columns, rows, result, svg)
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    if cfg.command == "verify" and not result["passed"]:
        print("verify: one or more checks failed", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"specsep: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except UsageError as exc:
        print(f"specsep: usage error: {exc}", file=sys.stderr)
        return 2
    except (SpecSepError, ValueError) as exc:
        name = type(exc).__name__
        print(f"specsep: {name}: {exc}", file=sys.stderr)
        if cfg.format == "json":
            sys.stdout.write(json.dumps({"error": {"type": name, "message": str(exc)}}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
