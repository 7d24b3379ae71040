"""Command-line interface: figure data, oracle verification, output statistics.

Every command resolves its configuration from built-in defaults, an optional
flat key=value config file, repeatable --set overrides and dedicated flags
(later sources win), then emits a deterministic CSV: identical configuration
gives byte-identical output.  Numbers are written in shortest round-trip
form.  When the CSV goes to a file, a PNG rendering of the same data is
written next to it unless --no-plot is given.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import master, plotting, sweeps
from .model import PhysicalParams
from .tdse import IntegrationError, verify_dk2

__all__ = ["main", "ConfigError"]


class ConfigError(ValueError):
    """Invalid configuration key, value or combination."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

_MODEL_KEYS = {
    "omega_b": ("float", 0.0),
    "omega_f": ("float", 0.0),
    "u_f": ("float", 0.0),
    "chi": ("float", 1.0),
}

_SCHEMA = {
    "fig2": {
        **_MODEL_KEYS,
        "k": ("float", 20.0),
        "m_scatter": ("float", 0.5),
        "n_b": ("int_list", (0, 2, 5)),
        "start": ("float", 0.0),
        "stop": ("float", 30.0),
        "count": ("int", 300),
        "spacing": ("str", "linear"),
    },
    "fig3": {
        **_MODEL_KEYS,
        "T": ("float", 0.01),
        "n_b": ("int", 1),
        "m_list": ("float_list", (0.0, 0.5, 5.0, 10.0, 50.0)),
        "start": ("float", 100.0),
        "stop": ("float", 1000.0),
        "count": ("int", 46),
        "spacing": ("str", "linear"),
    },
    "fig4": {
        **_MODEL_KEYS,
        "k": ("float", 10.0),
        "m_scatter": ("float", 0.5),
        "n_b": ("int_list", (0, 2, 5)),
        "entropy_mode": ("str", "amplitude"),
        "start": ("float", 0.0),
        "stop": ("float", 30.0),
        "count": ("int", 300),
        "spacing": ("str", "linear"),
    },
    "verify": {
        "window": ("float", 8.0),
        "tol": ("float", 1e-10),
        "threshold": ("float", 1e-3),
        "k_list": ("float_list", sweeps.VERIFY_K_VALUES),
        "T_list": ("float_list", sweeps.VERIFY_T_VALUES),
        "n_b_list": ("int_list", sweeps.VERIFY_NB_VALUES),
        "m_list": ("float_list", sweeps.VERIFY_M_VALUES),
    },
    "steady": {
        **_MODEL_KEYS,
        "k": ("float", 20.0),
        "m_scatter": ("float", 0.5),
        "T": ("float", 25.0),
        "gamma": ("float", 0.0025),
        "N_ex": ("float", 4.0),
        "tau": ("float", None),
        "n_max": ("int", None),
    },
    "evolve": {
        **_MODEL_KEYS,
        "k": ("float", 20.0),
        "m_scatter": ("float", 0.5),
        "T": ("float", 25.0),
        "gamma": ("float", 0.0025),
        "N_ex": ("float", 4.0),
        "tau": ("float", None),
        "n_max": ("int", None),
        "horizon": ("float", None),
        "dt": ("float", None),
        "initial": ("str", "vacuum"),
    },
}

_ALIASES = {"t_ramp": "T", "n_ex": "N_ex", "window_multiple": "window"}


def _coerce(command: str, key: str, raw):
    key = _ALIASES.get(key, key)
    schema = _SCHEMA[command]
    if key not in schema:
        allowed = ", ".join(sorted(schema))
        raise ConfigError(f"unknown key {key!r} for {command} (allowed: {allowed})")
    kind = schema[key][0]
    if not isinstance(raw, str):
        return key, raw
    try:
        if kind == "float":
            return key, float(raw)
        if kind == "int":
            return key, int(raw)
        if kind == "int_list":
            return key, tuple(int(tok) for tok in raw.split(",") if tok.strip())
        if kind == "float_list":
            return key, tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return key, raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


def _parse_config_file(path: Path) -> list[tuple[str, str]]:
    entries = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        entries.append((key.strip(), value.strip()))
    return entries


def _resolve_config(command: str, args) -> dict:
    cfg = {key: default for key, (_, default) in _SCHEMA[command].items()}
    overrides: list[tuple[str, str]] = []
    if args.config is not None:
        overrides.extend(_parse_config_file(Path(args.config)))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides.append((key.strip(), value.strip()))
    if getattr(args, "entropy_mode", None) is not None:
        overrides.append(("entropy_mode", args.entropy_mode))
    if getattr(args, "window", None) is not None:
        overrides.append(("window", str(args.window)))
    if getattr(args, "tol", None) is not None:
        overrides.append(("tol", str(args.tol)))
    for key, value in overrides:
        key, coerced = _coerce(command, key, value)
        cfg[key] = coerced
    return cfg


def _build_params(cfg: dict) -> PhysicalParams:
    return PhysicalParams(
        omega_b=cfg.get("omega_b", 0.0),
        omega_f=cfg.get("omega_f", 0.0),
        u_f=cfg.get("u_f", 0.0),
        u_x=cfg.get("m_scatter", 0.0),
        u_b=0.0,
        chi=cfg.get("chi", 1.0),
        k=cfg.get("k", 20.0),
        t_ramp=cfg.get("T", 1.0),
    )


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _config_comment(command: str, cfg: dict) -> str:
    parts = [f"{key}={_fmt(cfg[key])}" for key in sorted(cfg) if cfg[key] is not None]
    return f"# config: command={command} " + " ".join(parts)


def _emit_csv(out: Path | None, command: str, cfg: dict, header: list[str],
              rows, footer: list[str] | None = None) -> None:
    lines = [f"# dksweep {command}", _config_comment(command, cfg)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(footer or [])
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _figure_path(args) -> Path | None:
    if args.no_plot:
        return None
    if getattr(args, "plot", None) is not None:
        return Path(args.plot)
    if args.out is not None:
        return Path(args.out).with_suffix(".png")
    return None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_fig2(args) -> int:
    cfg = _resolve_config("fig2", args)
    params = _build_params(cfg)
    grid = sweeps.axis_grid(cfg["start"], cfg["stop"], cfg["count"], cfg["spacing"])
    result = sweeps.production_vs_time(params, grid, tuple(cfg["n_b"]))
    out = Path(args.out) if args.out else None
    _emit_csv(out, "fig2", cfg, ["T", *result.labels], result.rows())
    fig_path = _figure_path(args)
    if fig_path is not None:
        plotting.render_curves(result.x, result.columns, result.labels,
                               "sweep timescale T (1/chi)",
                               "molecule production probability P",
                               "production vs sweep timescale", fig_path)
    return 0


def _cmd_fig3(args) -> int:
    cfg = _resolve_config("fig3", args)
    params = _build_params(cfg)
    grid = sweeps.axis_grid(cfg["start"], cfg["stop"], cfg["count"], cfg["spacing"])
    result = sweeps.production_vs_amplitude(params, grid, cfg["n_b"],
                                            tuple(cfg["m_list"]))
    out = Path(args.out) if args.out else None
    _emit_csv(out, "fig3", cfg, ["k", *result.labels], result.rows())
    fig_path = _figure_path(args)
    if fig_path is not None:
        plotting.render_curves(result.x, result.columns, result.labels,
                               "sweep amplitude k (chi)",
                               "molecule production probability P",
                               "production vs sweep amplitude", fig_path)
    return 0


def _cmd_fig4(args) -> int:
    cfg = _resolve_config("fig4", args)
    params = _build_params(cfg)
    grid = sweeps.axis_grid(cfg["start"], cfg["stop"], cfg["count"], cfg["spacing"])
    result = sweeps.entropy_vs_time(params, grid, tuple(cfg["n_b"]),
                                    entropy_mode=cfg["entropy_mode"])
    out = Path(args.out) if args.out else None
    _emit_csv(out, "fig4", cfg, ["T", *result.labels], result.rows())
    fig_path = _figure_path(args)
    if fig_path is not None:
        plotting.render_curves(result.x, result.columns, result.labels,
                               "sweep timescale T (1/chi)",
                               "entanglement entropy S",
                               "entropy vs sweep timescale", fig_path)
    return 0


def _cmd_verify(args) -> int:
    cfg = _resolve_config("verify", args)
    points = sweeps.default_verify_points(
        k_values=cfg["k_list"], t_values=cfg["T_list"],
        n_b_values=cfg["n_b_list"], m_values=cfg["m_list"])
    report = verify_dk2(points, window_multiple=cfg["window"], tol=cfg["tol"],
                        threshold=cfg["threshold"])
    rows = [
        (r.point.params.k, r.point.params.t_ramp, r.point.n_b,
         r.point.params.m_scatter, r.a, r.c, r.analytic, r.numeric, r.deviation)
        for r in report.results
    ]
    footer = [f"# skipped: k={p.params.k:g} T={p.params.t_ramp:g} "
              f"n_b={p.n_b} ({reason})" for p, reason in report.skipped]
    header = ["k", "T", "n_b", "m_scatter", "a", "c", "analytic", "numeric", "abs_dev"]
    summary = report.summary_lines()
    if args.out is not None:
        _emit_csv(Path(args.out), "verify", cfg, header, rows, footer)
        print("\n".join(summary))
    else:
        _emit_csv(None, "verify", cfg, header, rows, footer)
        print("\n".join(summary), file=sys.stderr)
    return 0 if report.passed else 2


def _pump_loss_from_cfg(cfg: dict) -> master.PumpLossParams:
    gamma = cfg["gamma"]
    if cfg.get("tau") is not None:
        pl = master.PumpLossParams.from_pulse(gamma, cfg["T"], cfg["tau"],
                                              n_max=cfg.get("n_max"))
    else:
        pl = master.PumpLossParams.from_n_ex(gamma, cfg["N_ex"],
                                             n_max=cfg.get("n_max"))
    for note in master.feasibility_notes(pl):
        print(f"warning: {note}", file=sys.stderr)
    return pl


def _stats_footer(stats: master.OutputStats) -> list[str]:
    q = "undefined" if stats.mandel_q is None else repr(stats.mandel_q)
    return [
        f"# mean = {_fmt(stats.mean)}",
        f"# variance = {_fmt(stats.variance)}",
        f"# mandel_q = {q}",
        f"# tv_poisson = {_fmt(stats.tv_poisson)}",
        f"# linewidth = {_fmt(stats.linewidth)}",
    ]


def _cmd_steady(args) -> int:
    cfg = _resolve_config("steady", args)
    params = _build_params(cfg)
    pump = _pump_loss_from_cfg(cfg)
    table = master.transition_table(params, pump.n_max)
    dist = master.steady_state(table, pump)
    stats = master.statistics(dist, pump.gamma, pump.n_ex)
    rows = list(enumerate(dist.probs))
    resolved = dict(cfg, n_max=pump.n_max)
    out = Path(args.out) if args.out else None
    _emit_csv(out, "steady", resolved, ["n", "p_n"], rows, _stats_footer(stats))
    fig_path = _figure_path(args)
    if fig_path is not None:
        note = (f"mean = {stats.mean:.4g}\n"
                f"Q = {'undefined' if stats.mandel_q is None else f'{stats.mandel_q:.4g}'}\n"
                f"tv_poisson = {stats.tv_poisson:.3g}")
        plotting.render_distribution(np.arange(dist.probs.size), dist.probs,
                                     "steady molecule-number distribution",
                                     fig_path, annotation=note)
    return 0


def _initial_distribution(spec: str, table, pump: master.PumpLossParams) -> master.NumberDistribution:
    size = pump.n_max + 1
    if spec == "vacuum":
        probs = np.zeros(size)
        probs[0] = 1.0
        return master.NumberDistribution(probs=probs)
    if spec == "steady":
        return master.steady_state(table, pump)
    kind, _, arg = spec.partition(":")
    if kind == "fock":
        try:
            level = int(arg)
        except ValueError:
            raise ConfigError(f"bad initial state {spec!r}") from None
        if not 0 <= level <= pump.n_max:
            raise ConfigError(f"fock level {level} outside 0..{pump.n_max}")
        probs = np.zeros(size)
        probs[level] = 1.0
        return master.NumberDistribution(probs=probs)
    if kind == "poisson":
        try:
            mu = float(arg)
        except ValueError:
            raise ConfigError(f"bad initial state {spec!r}") from None
        if mu < 0.0 or mu > pump.n_max / 2:
            raise ConfigError(f"poisson mean {mu} too large for n_max = {pump.n_max}")
        probs = master.poisson_pmf(mu, pump.n_max)
        return master.NumberDistribution(probs=probs / probs.sum())
    raise ConfigError(
        f"initial must be vacuum, steady, fock:<n> or poisson:<mu>, got {spec!r}")


def _cmd_evolve(args) -> int:
    cfg = _resolve_config("evolve", args)
    params = _build_params(cfg)
    pump = _pump_loss_from_cfg(cfg)
    table = master.transition_table(params, pump.n_max)
    horizon = cfg["horizon"] if cfg.get("horizon") is not None else 2.0 / pump.gamma
    dt = cfg["dt"] if cfg.get("dt") is not None else 0.1 / (pump.gamma * pump.n_max + pump.r_a)
    initial = _initial_distribution(cfg["initial"], table, pump)
    dist = master.evolve_master(initial, table, pump, horizon, dt)
    stats = master.statistics(dist, pump.gamma, pump.n_ex)
    rows = list(enumerate(dist.probs))
    resolved = dict(cfg, n_max=pump.n_max, horizon=horizon, dt=dt)
    out = Path(args.out) if args.out else None
    _emit_csv(out, "evolve", resolved, ["n", "p_n"], rows, _stats_footer(stats))
    fig_path = _figure_path(args)
    if fig_path is not None:
        plotting.render_distribution(np.arange(dist.probs.size), dist.probs,
                                     f"distribution after horizon {horizon:g}",
                                     fig_path)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="flat key = value configuration file")
    common.add_argument("--out", metavar="PATH", help="CSV output path (default stdout)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--entropy-mode", choices=["amplitude", "probability"],
                        dest="entropy_mode", help="entropy definition for fig4")
    common.add_argument("--window", type=float, metavar="M",
                        help="integration window in units of T (oracle runs)")
    common.add_argument("--tol", type=float, metavar="X",
                        help="integrator tolerance (oracle runs)")
    common.add_argument("--no-plot", action="store_true",
                        help="do not render a PNG next to the CSV")
    common.add_argument("--plot", metavar="PATH",
                        help="render the PNG to this explicit path")

    parser = _Parser(prog="dksweep",
                     description="tanh-sweep photoassociation: transition "
                                 "probabilities, entanglement and molecular "
                                 "output statistics")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("fig2", _cmd_fig2, "production probability P vs sweep timescale T"),
        ("fig3", _cmd_fig3, "production probability P vs sweep amplitude k"),
        ("fig4", _cmd_fig4, "entanglement entropy S vs sweep timescale T"),
        ("verify", _cmd_verify, "closed form vs integrator oracle on the regime grid"),
        ("steady", _cmd_steady, "steady molecule-number distribution and statistics"),
        ("evolve", _cmd_evolve, "evolve a number distribution under pump and loss"),
    ):
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"dksweep: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:   # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"dksweep: error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, master.TailMassError) as exc:
        print(f"dksweep: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"dksweep: i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
