"""Command-line front end: ``regcomply <command> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 budget guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .geometry import (
    DegenerateConeError,
    cone_areas_3d,
    compliance_nonuniform_3d,
    compliance_uniform_3d,
    c_published,
    published_cone_area,
)
from .ksupport import ConvergenceError
from .model import DomainError, SparsityModel
from .optimize import OPT_MEASURES, optimality_certificate, optimize_weights
from .oracle import BudgetError, GridSpec, brute_B_sigma, brute_D_sigma, standard_battery
from .report import COMMANDS, SEARCH_KEYS, ConfigError, RunConfig, document, dumps_csv, dumps_json, write_atomic
from .rip import B_L_ell1, B_sigma, D_L_ell1, D_sigma, delta_nec, delta_suff, f_ratio
from .sampling import CapacityError, mc_compliance

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_BUDGET = 0, 2, 3, 4


def _model(cfg: RunConfig) -> SparsityModel:
    return SparsityModel(cfg.resolved_n(), cfg.k)


def _per_weight(cfg: RunConfig, fn):
    runs = [fn(w) for w in cfg.weight_vectors()]
    return runs[0] if len(runs) == 1 else {"runs": runs}


def _measure3d(cfg: RunConfig) -> dict:
    def one(w):
        if w.n != 3:
            raise ConfigError("measure3d needs exactly three weights")
        areas = cone_areas_3d(w)
        axis = int(areas.argmax())
        mu = 1.0 / w.w
        published = [published_cone_area(i, mu) for i in range(3)]
        return {
            "w": w.tolist(),
            "areas": areas,
            "area": areas[axis],
            "max_axis": axis,
            "u": compliance_uniform_3d(w),
            "nu": compliance_nonuniform_3d(w),
            "published_c": [c_published(i, mu) for i in range(3)],
            "published_areas": published,
            "published_formula_area": published[axis],
            "published_deviation": areas[axis] - published[axis],
        }

    return _per_weight(cfg, one)


def _mc(cfg: RunConfig) -> dict:
    model = _model(cfg)

    def one(w):
        est = mc_compliance(w, model, cfg.mode, cfg.samples, cfg.seed)
        return {"w": w.tolist(), "mode": cfg.mode, **est.to_dict()}

    return _per_weight(cfg, one)


def _rip_nec(cfg: RunConfig) -> dict:
    model = _model(cfg)

    def one(w):
        r = delta_nec(w, model, cfg.search, certify=cfg.certify)
        return {
            "w": w.tolist(),
            "B": r.details["B"],
            "gamma": r.details["gamma"],
            "delta": r.value,
            "report": r.to_dict(),
        }

    return _per_weight(cfg, one)


def _rip_suff(cfg: RunConfig) -> dict:
    model = _model(cfg)

    def one(w):
        r = delta_suff(w, model, cfg.search, certify=cfg.certify)
        return {"w": w.tolist(), "D": r.details["D"], "delta": r.value, "report": r.to_dict()}

    return _per_weight(cfg, one)


def _require_measure(cfg: RunConfig) -> str:
    if cfg.measure not in OPT_MEASURES:
        raise ConfigError(f"--measure must be one of {OPT_MEASURES}")
    return cfg.measure


def _optimize(cfg: RunConfig) -> dict:
    measure = _require_measure(cfg)
    trace = optimize_weights(measure, _model(cfg), cfg.search, samples=cfg.samples)
    return trace.to_dict()


def _certify(cfg: RunConfig) -> dict:
    measure = _require_measure(cfg)
    model = _model(cfg)
    (w,) = cfg.weight_vectors()[:1]
    rep = optimality_certificate(measure, w, model, cfg.trials, cfg.seed, samples=cfg.samples)
    return rep.to_dict()


def _oracle(cfg: RunConfig) -> dict:
    if cfg.n is None and cfg.weights == "ones":
        cases = standard_battery()
    else:
        model = _model(cfg)
        cases = [(w, model) for w in cfg.weight_vectors()]
    rows = []
    for w, model in cases:
        grid = GridSpec.default_for(model)
        entry = {"w": w.tolist(), "n": model.n, "k": model.k, "grid_levels": grid.levels}
        for name, fast, brute in (("B", B_sigma, brute_B_sigma), ("D", D_sigma, brute_D_sigma)):
            r = fast(w, model, cfg.search)
            ref, witness = brute(w, model, grid)
            gap = 0.0 if ref == r.value else abs(r.value - ref) / max(abs(ref), abs(r.value))
            entry[name] = {
                "evaluator": r.value,
                "method": r.method,
                "oracle": ref,
                "oracle_witness": witness,
                "relative_gap": gap,
            }
        rows.append(entry)
    worst = max(max(e["B"]["relative_gap"], e["D"]["relative_gap"]) for e in rows)
    return {"cases": rows, "max_relative_gap": worst}


def _curves(cfg: RunConfig) -> dict:
    columns = ["L", "u", "B_L", "f_u", "D_L"]
    rows = []
    for L in range(1, cfg.max_l + 1):
        u = L / cfg.k
        rows.append([L, u, B_L_ell1(L, cfg.k), float(f_ratio(u)), D_L_ell1(L, cfg.k)])
    return {"k": cfg.k, "columns": columns, "rows": rows}


DISPATCH = {
    "measure3d": _measure3d,
    "mc": _mc,
    "rip-nec": _rip_nec,
    "rip-suff": _rip_suff,
    "optimize": _optimize,
    "certify": _certify,
    "oracle": _oracle,
    "curves": _curves,
}


def execute(cfg: RunConfig):
    """Dispatch a validated config and return the raw result."""
    cfg.validate()
    return DISPATCH[cfg.command](cfg)


def render(cfg: RunConfig, result, timestamp: str | None = None) -> str:
    timestamp = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc = document(cfg, result, __version__, timestamp)
    return dumps_json(doc) if cfg.format == "json" else dumps_csv(doc)


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg``, emit its output once, and return the exit status."""
    stdout = stdout or sys.stdout
    try:
        text = render(cfg, execute(cfg))
    except (ConvergenceError, DegenerateConeError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"regcomply: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (BudgetError, CapacityError) as exc:
        print(f"regcomply: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, DomainError) as exc:
        print(f"regcomply: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regcomply", description="Compliance measures of weighted l1 regularizers.")
    p.add_argument("--version", action="version", version=f"regcomply {__version__}")
    p.add_argument("command", nargs="?", choices=COMMANDS, default=None)
    p.add_argument("--config", help="JSON file with run settings; flags override its values")
    # every flag defaults to None so that only flags actually given override the file
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--weights", default=None, help='"ones", a comma list such as 1,0.5,0.5, or random:count:seed')
    p.add_argument("--measure", default=None, help=f"one of {', '.join(OPT_MEASURES)}")
    p.add_argument("--mode", choices=("U", "NU"), default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--max-l", dest="max_l", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--grid-steps", dest="grid_steps", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p.add_argument("--certify", action="store_true", default=None, help="cross-check suprema with the brute oracle")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                settings = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(settings, dict):
            raise ConfigError("config file must hold a JSON object")
        settings = dict(settings)
    search = dict(settings.pop("search", None) or {})
    for key, value in vars(args).items():
        if key == "config" or value is None:
            continue
        if key in SEARCH_KEYS:
            search[key] = value
        else:
            settings[key] = value
    settings["search"] = search
    if settings.get("command") is None:
        raise ConfigError("no command given")
    return RunConfig.from_dict(settings)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"regcomply: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
