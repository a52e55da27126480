"""Batch command-line front end.

Five verbs, all file-driven and deterministic:

  analyze   equivalent-equation tensors of a scheme config -> tensors.json
  classify  isotropy order + closed-form cross-check       -> classification.json
  family    build an isotropic parameter family            -> family.json
  simulate  Gaussian-pulse anisotropy run                  -> profiles.csv, summary.json
  oracle    dispersion cross-validation of the tensors     -> oracle.json

Exit codes: 0 success, 1 validation problem (bad flag, malformed config or
rational, unknown key, relaxation rate out of range), 2 infeasible family.
Stdout carries a one-line summary per run; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .expansion import dispersion_check, equivalent_tensors, tensor_report
from .families import FamilySpec, build_family
from .isotropy import classification_report
from .scheme import (
    ConfigError,
    InfeasibleFamilyError,
    scheme_from_config,
    scheme_to_config,
)
from .sim import SimConfig, anisotropy_error, profiles_csv, simulate

_S_ALIASES = {"xx": "pxx", "xy": "pxy"}


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (2 is reserved)."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="lbiso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="scheme config JSON")
        p.add_argument("--output", default=".", help="directory for artifacts")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a coefficient before validation")

    p = sub.add_parser("analyze", help="equivalent-equation tensors")
    add_common(p)
    p.add_argument("--max-order", type=int, default=None)

    p = sub.add_parser("classify", help="isotropy order classification")
    add_common(p)
    p.add_argument("--max-order", type=int, default=None)

    p = sub.add_parser("family", help="build an isotropic family member")
    p.add_argument("scheme", choices=("d2q9", "d2q13"))
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--case", default=None)
    add_common(p, config=False)

    p = sub.add_parser("simulate", help="Gaussian-pulse anisotropy benchmark")
    add_common(p)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--dx", type=float, default=0.02)

    p = sub.add_parser("oracle", help="dispersion cross-check of the tensors")
    add_common(p)
    p.add_argument("--max-order", type=int, default=None)

    return parser


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh, parse_float=str)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None


def _split_override(item):
    key, sep, value = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"malformed --set {item!r}, expected KEY=VALUE")
    return key, value


def _apply_overrides(config, items):
    """Route KEY=VALUE overrides into a scheme config before validation."""
    for item in items:
        key, value = _split_override(item)
        if key == "c0_squared":
            config["c0_squared"] = value
        elif key.startswith("s_"):
            name = key[2:]
            config.setdefault("s", {})[_S_ALIASES.get(name, name)] = value
        else:
            config.setdefault("E", {})[key] = value
    return config


def _scheme_from_args(args):
    config = _apply_overrides(_load_config(args.config), args.overrides)
    return scheme_from_config(config)


def _default_order(scheme):
    return 5 if scheme.scheme_id == "d2q9" else 3


def _write(directory, name, text):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _write_json(directory, name, obj):
    return _write(directory, name, json.dumps(obj, indent=2) + "\n")


def _cmd_analyze(args) -> int:
    scheme = _scheme_from_args(args)
    m = args.max_order or _default_order(scheme)
    tensors = equivalent_tensors(scheme, m)
    report = {"scheme": scheme.scheme_id, "max_order": m,
              "tensors": tensor_report(scheme, tensors)}
    path = _write_json(args.output, "tensors.json", report)
    print(f"{path}: orders 1..{m}")
    return 0


def _cmd_classify(args) -> int:
    scheme = _scheme_from_args(args)
    report = classification_report(scheme, args.max_order)
    path = _write_json(args.output, "classification.json", report)
    print(f"{path}: order_achieved={report['order_achieved']}")
    return 0


def _cmd_family(args) -> int:
    free = dict(_split_override(item) for item in args.overrides)
    spec = FamilySpec(args.scheme, args.order, case=args.case, free=free)
    scheme = build_family(spec)
    path = _write_json(args.output, "family.json", scheme_to_config(scheme))
    case = f" case={args.case}" if args.case else ""
    print(f"{path}: {args.scheme} order {args.order}{case}")
    return 0


def _cmd_simulate(args) -> int:
    scheme = _scheme_from_args(args)
    config = SimConfig(scheme, grid=args.grid, dx=args.dx, steps=args.steps)
    metrics = anisotropy_error(simulate(config), config)
    summary = {
        "scheme": scheme_to_config(scheme),
        "grid": config.grid,
        "dx": config.dx,
        "steps": config.steps,
        "init": config.init,
        "errors": {
            "max_abs_rho0_minus_rho_pi4": metrics.err_pi4,
            "max_abs_rho0_minus_rho_atan12": metrics.err_atan12,
            "max_abs_rho0_minus_rho_pi2": metrics.err_pi2,
        },
    }
    csv_path = _write(args.output, "profiles.csv", profiles_csv(metrics))
    json_path = _write_json(args.output, "summary.json", summary)
    print(f"{json_path} {csv_path}: pi4={metrics.err_pi4:.3e} "
          f"atan12={metrics.err_atan12:.3e} pi2={metrics.err_pi2:.3e}")
    return 0


def _cmd_oracle(args) -> int:
    scheme = _scheme_from_args(args)
    m = args.max_order or _default_order(scheme)
    tensors = equivalent_tensors(scheme, m)
    result = dispersion_check(scheme, tensors)
    report = {
        "scheme": scheme.scheme_id,
        "max_order": m,
        "slope": result.slope,
        "samples": [[k, err] for k, err in result.samples],
        "skipped": list(result.skipped),
    }
    path = _write_json(args.output, "oracle.json", report)
    print(f"{path}: slope={result.slope:.3f} (analysis order {m})")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "classify": _cmd_classify,
    "family": _cmd_family,
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except InfeasibleFamilyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
