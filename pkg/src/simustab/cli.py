"""``simustab`` command line: analyze, solve, sweep or reproduce a built-in example.

Exit codes: 0 ok (and stable sweep), 1 configuration or I/O error,
2 infeasible data or unstable verdict, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import fixtures
from .errors import ConfigError, InfeasibilityError, NumericalError, SimustabError
from .pipeline import run_pipeline
from .ratmat import RationalFunction, RationalMatrix
from .stabdata import PlantPair
from .synth import make_grid

logger = logging.getLogger("simustab")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 1, 2, 3
BLOCKS = ("N0", "D0", "N1", "D1")


def _entry(x, where):
    if isinstance(x, bool):
        raise ConfigError(where, "booleans are not valid entries")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, dict):
        if set(x) - {"num", "den"} or "num" not in x:
            raise ConfigError(where, 'rational entries need "num" and optional "den" only')
        try:
            num = [float(c) for c in x["num"]]
            den = [float(c) for c in x.get("den", [1.0])]
        except (TypeError, ValueError):
            raise ConfigError(where, "coefficients must be numbers") from None
        if not num or not den or not any(den):
            raise ConfigError(where, "empty or zero coefficient list")
        return RationalFunction(num, den)
    raise ConfigError(where, f"expected a number or {{num, den}}, got {type(x).__name__}")


def parse_block(rows, name):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError(f"plants.{name}", "must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ConfigError(f"plants.{name}", "rows have different lengths")
    return RationalMatrix([[_entry(x, f"plants.{name}[{i}][{j}]") for j, x in enumerate(r)]
                           for i, r in enumerate(rows)])


def parse_plants(cfg):
    plants = cfg.get("plants")
    if not isinstance(plants, dict):
        raise ConfigError("plants", "missing or not an object")
    blocks = {}
    for name in BLOCKS:
        if name not in plants:
            raise ConfigError(f"plants.{name}", "missing")
        blocks[name] = parse_block(plants[name], name)
    try:
        return PlantPair(**blocks)
    except ValueError as exc:
        raise ConfigError("plants", str(exc)) from None


def dump_plants(pp: PlantPair):
    """Inverse of :func:`parse_plants`: the ``plants`` section of a config."""
    def entry(e):
        if len(e.poles) == 0 and e.num.degree <= 0:
            return float(e.num.coeffs[0])
        return {"num": e.num.coeffs.tolist(), "den": e.den.coeffs.tolist()}
    return {name: [[entry(e) for e in row] for row in getattr(pp, name).entries]
            for name in BLOCKS}


def parse_grid(text, field="grid"):
    if text is None:
        return make_grid()
    if isinstance(text, list):
        vals = text
    else:
        try:
            a, b, c = (float(t) for t in str(text).split(":"))
        except ValueError:
            raise ConfigError(field, "expected start:step:end") from None
        if b <= 0 or c < a:
            raise ConfigError(field, "need step > 0 and end >= start")
        vals = make_grid(a, b, c)
    try:
        vals = [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError(field, "grid values must be numbers") from None
    if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
        raise ConfigError(field, "grid must be non-empty and inside [0, 1]")
    return vals


def load_sigma(arg):
    """Preset name or path to a JSON array of rows."""
    if arg is None or arg in fixtures.SIGMA_PRESETS:
        return arg
    path = Path(arg)
    if not path.exists():
        raise ConfigError("sigma", f"neither a preset nor a file: {arg}")
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("sigma", f"cannot read {arg}: {exc}") from None


def load_config(path):
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be an object")
    return cfg


def _settings(cfg, args):
    alpha = args.alpha if args.alpha is not None else cfg.get("alpha", 1.0)
    if not isinstance(alpha, (int, float)) or isinstance(alpha, bool) or alpha <= 0:
        raise ConfigError("alpha", "must be a positive number")
    mode = args.mode or cfg.get("mode", "auto")
    if mode not in ("auto", "direct", "sqrt"):
        raise ConfigError("mode", f"unknown mode {mode!r}")
    grid = parse_grid(args.grid if args.grid is not None else cfg.get("grid"))
    tol = cfg.get("tolerances", {})
    if not isinstance(tol, dict) or set(tol) - {"simplicity", "rank_gap", "stability", "cancel"}:
        raise ConfigError("tolerances", "unknown keys or not an object")
    tol = dict(tol)
    if args.tol is not None:
        tol["stability"] = args.tol
    sigma = load_sigma(args.sigma) if args.sigma is not None else cfg.get("sigma")
    return dict(sigma=sigma, alpha=float(alpha), mode=mode, grid=grid, tolerances=tol)


def _zero_list(zeros):
    return [{"s": z.s, "tag": z.conjugate_tag} for z in zeros]


def build_report(command, res):
    rep = {"command": command, "m": res.plants.m,
           "unstable_zeros": _zero_list(res.zeros), "mode": res.mode}
    if res.disc is not None:
        rep["data"] = {
            "n": res.normalized.n,
            "nodes": [{"z": nd.z, "W": nd.W} for nd in res.disc.nodes],
            "normalized_nodes": [{"z": nd.z, "W": nd.W} for nd in res.normalized.nodes],
        }
    if res.interpolant is not None:
        sol = res.interpolant.solution
        rep["cee"] = {"P": sol.P, "A": sol.A, "B": sol.B, "G": sol.G, "Sigma": sol.Sigma,
                      "residual": sol.residual, "steps": sol.steps,
                      "newton_iterations": sol.newton_iterations}
        r = res.solution_report
        rep["checks"] = {"interp_residual": r.interp_residual, "min_herm_eig": r.min_herm_eig,
                         "pole_radius": r.pole_radius,
                         "controllability_rank": r.controllability_rank, "state_dim": r.state_dim}
    if res.sweep is not None:
        rep["sweep"] = {
            "stable": res.sweep.stable, "max_re": res.sweep.max_re,
            "stability_tol": res.sweep.stability_tol,
            "lambdas": [{"lambda": r.lam, "max_re": r.max_re, "stable": r.stable,
                         "marginal": r.marginal, "poles": r.poles} for r in res.sweep.results],
        }
        rep["compensator"] = {"cancel_residual": res.factors.cancel_residual,
                              "coprime_margin": res.factors.coprime_margin}
        rep["bezout"] = {repr(k): v for k, v in res.bezout.items()}
        if res.axis is not None:
            rep["axis_check"] = {"min_distance": res.axis.min_distance, "where": res.axis.where,
                                 "samples": res.axis.samples, "omega": res.axis.omega}
    return rep


def _summary(res, out=sys.stdout):
    zs = ", ".join(f"{z.s.real:.6g}{z.s.imag:+.6g}j" for z in res.zeros) or "none"
    print(f"unstable zeros: {zs}", file=out)
    print(f"mode: {res.mode}", file=out)
    if res.interpolant is not None:
        sol, r = res.interpolant.solution, res.solution_report
        print(f"CEE residual {sol.residual:.3g} after {sol.steps} continuation steps; "
              f"interpolation residual {r.interp_residual:.3g}; min eig He F {r.min_herm_eig:.4g}",
              file=out)
    if res.sweep is not None:
        for r in res.sweep.results:
            print(f"  lambda={r.lam:.4g}  max Re = {r.max_re:.6g}  {'stable' if r.stable else 'UNSTABLE'}",
                  file=out)
        print(f"verdict: {'stable' if res.sweep.stable else 'not stable'}", file=out)


def build_parser():
    p = argparse.ArgumentParser(prog="simustab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=("analyze", "solve", "sweep", "reproduce"))
    p.add_argument("example", nargs="?", help="example name for reproduce")
    p.add_argument("--config")
    p.add_argument("--sigma", help="preset name or JSON file with the rows of Sigma")
    p.add_argument("--alpha", type=float)
    p.add_argument("--mode", choices=("auto", "direct", "sqrt"))
    p.add_argument("--grid", help="lambda grid start:step:end")
    p.add_argument("--out", help="output directory (SIMUSTAB_OUT overrides)")
    p.add_argument("--format", default="csv,json,svg")
    p.add_argument("--tol", type=float, help="stability tolerance on max Re of closed-loop poles")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(argv=None, out=sys.stdout, err=sys.stderr):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        if set(formats) - {"csv", "json", "svg"}:
            raise ConfigError("format", f"unknown format in {args.format!r}")
        if args.command == "reproduce":
            if args.example not in fixtures.EXAMPLES:
                raise ConfigError("example", f"choose one of {sorted(fixtures.EXAMPLES)}")
            ex = fixtures.EXAMPLES[args.example]
            cfg = {"sigma": ex["sigma"], "mode": ex["mode"]}
            settings = _settings(cfg, args)
            plants = ex["plants"]()
            stage = "sweep"
        else:
            if args.example is not None:
                raise ConfigError("example", f"unexpected argument {args.example!r}")
            if not args.config:
                raise ConfigError("config", "--config is required")
            cfg = load_config(args.config)
            settings = _settings(cfg, args)
            plants = parse_plants(cfg)
            stage = args.command
        res = run_pipeline(plants, stage=stage, **settings)
    except ConfigError as exc:
        print(f"simustab: config error: {exc}", file=err)
        return EXIT_CONFIG
    except InfeasibilityError as exc:
        print(f"simustab: infeasible: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"simustab: numerical failure: {type(exc).__name__}: {exc}", file=err)
        return EXIT_NUMERICAL
    except (SimustabError, ValueError) as exc:
        print(f"simustab: {type(exc).__name__}: {exc}", file=err)
        return EXIT_CONFIG

    _summary(res, out)
    outdir = os.environ.get("SIMUSTAB_OUT") or args.out
    if outdir:
        from .emit import write_outputs

        try:
            digests = write_outputs(outdir, build_report(args.command, res), res.sweep, formats)
        except OSError as exc:
            print(f"simustab: cannot write output to {outdir}: {exc.strerror or exc}", file=err)
            return EXIT_CONFIG
        for name in sorted(digests):
            print(f"wrote {Path(outdir) / name}  sha256={digests[name]}", file=out)
    if res.sweep is not None and not res.sweep.stable:
        return EXIT_INFEASIBLE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
