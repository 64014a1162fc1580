"""Command-line entry point: one subcommand per experiment family.

Exit codes: 0 success, 2 config validation failure, 3 solver non-convergence
(the best iterate and its residuals are persisted in the output directory).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import KINDS, ConfigError, run
from .solver import SolverError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3

# subcommand -> accepted experiment kinds
_FAMILIES = {
    "solve": ("solve-1d", "solve-2d", "oracle-verify"),
    "blowup": ("blowup",),
    "membership": ("membership",),
    "nta": ("nta",),
    "exponent": ("exponent",),
    "measure": ("measure-identity",),
    "study": ("convergence-study",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biharmlab",
        description="Biharmonic obstacle problem laboratory: solve instances, "
                    "trace blow-ups, check flatness-class membership and NTA "
                    "geometry, fit exponents, verify the contact-measure identity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kinds in _FAMILIES.items():
        p = sub.add_parser(name, help=f"run a {'/'.join(kinds)} experiment")
        p.add_argument("--config", required=True, help="path to the experiment JSON")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized perturbations (overrides config)")
    return parser


def _fail_validation(out: str | None, message: str) -> int:
    err = {"error": "validation", "message": message}
    sys.stderr.write(message + "\n")
    if out:
        outp = Path(out)
        try:
            outp.mkdir(parents=True, exist_ok=True)
            (outp / "error.json").write_text(json.dumps(err, indent=2, sort_keys=True) + "\n")
        except OSError:
            pass
    return EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg_path = Path(args.config)
    try:
        cfg = json.loads(cfg_path.read_text())
    except FileNotFoundError:
        return _fail_validation(args.out, f"config file not found: {cfg_path}")
    except json.JSONDecodeError as exc:
        return _fail_validation(args.out, f"config is not valid JSON: {exc}")
    if not isinstance(cfg, dict) or not cfg:
        return _fail_validation(args.out, "config must be a non-empty JSON object")
    kind = cfg.get("kind")
    allowed = _FAMILIES[args.command]
    if kind not in allowed:
        return _fail_validation(
            args.out,
            f"subcommand {args.command!r} expects kind in {allowed}, got {kind!r}",
        )
    try:
        summary = run(cfg, args.out, seed=args.seed)
    except ConfigError as exc:
        return _fail_validation(args.out, f"invalid config: {exc}")
    except SolverError as exc:
        sys.stderr.write(f"solver failed to certify: {exc}\n")
        sys.stderr.write("best iterate persisted in the output directory\n")
        return EXIT_NONCONVERGENCE
    sys.stdout.write(f"{kind}: summary written to {Path(args.out) / 'summary.json'} "
                     f"(config {summary['config_hash'][:12]})\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
