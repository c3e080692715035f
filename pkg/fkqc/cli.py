"""
Command-line interface for the Fibonacci-chain Frenkel-Kontorova tools.
"""

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Tuple

from . import __version__
from .config import get_settings
from .energy import rotation_report, type_distance
from .errors import FKQCError, InsufficientWindowError, NumericalError, ValidationError
from .fibword import one_sided_word, two_sided_window
from .golden import DEFAULT_THETA
from .minimal import (OptimizerSettings, combinatorics_certificate, lift, optimize_level,
                      rotation_number_level, sandwich_bound)
from .models import AILParams, AnchorFn, PotentialSpec, RunManifest
from .parser import AnchorTableParser
from .solver import METHODS, boundary_residuals, equilibrium, lambda_threshold
from .verify import SUITES, VerificationRunner

logger = logging.getLogger(__name__)

EXAMPLES = """\
Examples:
  fkqc word --level 5
  fkqc word --two-sided --from -5 --to 4
  fkqc equilibrium --theta default --n 100 --method tridiagonal --out run
  fkqc equilibrium --anchor h1 --n 100 --out run
  fkqc minimal --level 5 --window 50 --out run
  fkqc verify --suite all
"""


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(
        prog="fkqc",
        description="Frenkel-Kontorova models on the Fibonacci quasi-crystal",
        epilog=EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", parser_class=UsageParser)
    sub.required = True

    word = sub.add_parser("word", help="print u^(level) or a window of the two-sided word")
    word.add_argument("--level", type=int, help="level i of u^(i)")
    word.add_argument("--two-sided", action="store_true", help="read the two-sided word w")
    word.add_argument("--from", dest="start", type=int, help="first index of the window")
    word.add_argument("--to", dest="stop", type=int, help="last index of the window (inclusive)")
    word.add_argument("--json", action="store_true", help="print JSON instead of plain letters")
    word.set_defaults(func=cmd_word)

    eq = sub.add_parser("equilibrium", help="anti-integrable equilibrium of a given type")
    anchor = eq.add_mutually_exclusive_group()
    anchor.add_argument("--theta", help="rotation number: 'default', a rational or 'a + b*tau'")
    anchor.add_argument("--anchor", choices=["h1"], help="built-in anchor (h1: signed square)")
    anchor.add_argument("--anchor-file", help="anchor table with 'i, h_i' lines")
    eq.add_argument("--lambda", dest="lam", type=float, default=1.0, help="substrate strength")
    eq.add_argument("--lambdas", type=float, nargs="+", help="sweep over several lambda values")
    eq.add_argument("--n", type=int, default=100, help="window half-width")
    eq.add_argument("--tol", type=float, default=1e-12, help="sup-change tolerance")
    eq.add_argument("--max-iter", type=int, default=100, help="fixed-point iteration limit")
    eq.add_argument("--method", choices=METHODS, default="fixed-point")
    eq.add_argument("--closure", choices=["anchor", "zero"], default="anchor",
                    help="boundary closure of the tridiagonal system")
    eq.add_argument("--format", choices=["csv", "json"], default="csv")
    eq.add_argument("--jobs", type=int, default=1, help="worker processes for --lambdas")
    eq.add_argument("--out", default=".", help="output directory")
    eq.set_defaults(func=cmd_equilibrium)

    mn = sub.add_parser("minimal", help="level-l minimal configuration of rotation number (3 tau + 1)/2")
    mn.add_argument("--level", type=int, required=True)
    mn.add_argument("--window", type=int, default=50, help="index window [-window, window]")
    mn.add_argument("--seed", type=int, default=0)
    mn.add_argument("--restarts", type=int, default=20)
    mn.add_argument("--out", default=".", help="output directory")
    mn.set_defaults(func=cmd_minimal)

    vf = sub.add_parser("verify", help="run the invariant suites")
    vf.add_argument("--suite", choices=SUITES + ("all",), default="all")
    vf.add_argument("--samples", type=int, default=1000, help="random samples per sampled check")
    vf.add_argument("--seed", type=int, default=0)
    vf.set_defaults(func=cmd_verify)
    return parser


def _parameters(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _write_csv(path: Path, header: List[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_word(args: argparse.Namespace) -> int:
    if args.two_sided:
        if args.start is None or args.stop is None:
            raise ValidationError("--two-sided needs --from and --to")
        word = two_sided_window(args.start, args.stop + 1)
    else:
        if args.level is None:
            raise ValidationError("word needs --level or --two-sided")
        word = one_sided_word(args.level)

    if args.json:
        print(json.dumps({
            "letters": word.letters,
            "ref_index": word.ref_index,
            "length": word.length.to_json(),
        }, sort_keys=True))
    else:
        print(str(word))
    return 0


def _anchor_from_args(args: argparse.Namespace) -> AnchorFn:
    if args.anchor_file:
        return AnchorTableParser().parse_file(args.anchor_file)
    if args.anchor == "h1":
        return AnchorFn.signed_square()
    if args.theta is None or args.theta == "default":
        return AnchorFn.linear(DEFAULT_THETA)
    return AnchorFn.linear(AnchorTableParser.parse_value(args.theta))


EQUILIBRIUM_COLUMNS = ["i", "x_i", "g_i", "h_i", "residual_i"]


def solve_equilibrium(params: AILParams, method: str) -> Tuple[List[tuple], dict]:
    """Solve one equilibrium and return its table rows and summary."""
    result = equilibrium(params, method)
    config = result.configuration
    window = config.meta["window"]
    spec = PotentialSpec(lam=params.lam)
    residual = boundary_residuals(config, window, spec)
    rows = [
        (int(i), float(x), float(g), float(h), float(r))
        for i, x, g, h, r in zip(config.indices, config.positions, window.g_inner,
                                 window.h_inner, residual)
    ]
    summary = {
        "lambda": params.lam,
        "threshold": lambda_threshold(params.anchor, params.n),
        "iterations": result.iterations,
        "final_delta": result.final_delta,
        "max_residual": float(max(abs(r) for r in residual)),
        "type_distance": type_distance(config, params.anchor),
        "anchor": params.anchor.describe(),
    }
    if params.n >= 10:
        summary["rotation"] = rotation_report(config).to_json()
    return rows, summary


def _sweep_point(lam: float, args_dict: dict, anchor: AnchorFn) -> Tuple[List[tuple], dict]:
    params = AILParams(lam=lam, anchor=anchor, n=args_dict["n"], tol=args_dict["tol"],
                       max_iter=args_dict["max_iter"], closure=args_dict["closure"])
    return solve_equilibrium(params, args_dict["method"])


def _write_table(out: Path, stem: str, fmt: str, rows: List[tuple]) -> str:
    if fmt == "csv":
        path = out / f"{stem}.csv"
        _write_csv(path, EQUILIBRIUM_COLUMNS, rows)
    else:
        path = out / f"{stem}.json"
        columns = {name: [row[k] for row in rows] for k, name in enumerate(EQUILIBRIUM_COLUMNS)}
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(columns, f, indent=2)
            f.write("\n")
    return path.name


def cmd_equilibrium(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    anchor = _anchor_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    args_dict = _parameters(args)
    outputs = []

    if args.lambdas:
        if args.jobs < 1:
            raise ValidationError(f"--jobs must be >= 1, got {args.jobs}")
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                runs = list(pool.map(_sweep_point, args.lambdas,
                                     [args_dict] * len(args.lambdas),
                                     [anchor] * len(args.lambdas)))
        else:
            runs = [_sweep_point(lam, args_dict, anchor) for lam in args.lambdas]
        results = {"sweep": []}
        for k, (rows, summary) in enumerate(runs):
            name = _write_table(out, f"equilibrium_{k:03d}", args.format, rows)
            outputs.append(name)
            results["sweep"].append(dict(summary, output=name))
    else:
        rows, results = _sweep_point(args.lam, args_dict, anchor)
        outputs.append(_write_table(out, "equilibrium", args.format, rows))

    manifest = RunManifest(
        command="equilibrium",
        parameters=args_dict,
        version=__version__,
        outputs=outputs,
        results=results,
    )
    manifest.write(out / "manifest.json")
    logger.info("%s finished in %.2f s", manifest.command, time.perf_counter() - started)
    print(f"Wrote {', '.join(outputs)} and manifest.json to {out}")
    return 0


def cmd_minimal(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    settings = OptimizerSettings(restarts=args.restarts, seed=args.seed)
    geometry = optimize_level(args.level, settings)
    level_config = lift(args.level, geometry, args.window)
    config = level_config.configuration
    rows = [(int(n), float(t)) for n, t in zip(config.indices, config.positions)]
    _write_csv(out / "minimal.csv", ["n", "theta_n"], rows)

    results = {
        "rotation_number": rotation_number_level(args.level).to_json(),
        "optimizer": geometry.report.to_json(),
        "circumferences": [c.to_json() for c in geometry.circumferences],
        "free_points": [p.tolist() for p in geometry.free_points],
        "sandwich": sandwich_bound(level_config).to_json(),
    }
    try:
        results["certificate"] = combinatorics_certificate(level_config).to_json()
    except InsufficientWindowError as e:
        logger.warning("certificate skipped: %s", e)
        results["certificate"] = {"skipped": str(e)}
    if args.window >= 10:
        results["rotation"] = rotation_report(config).to_json()
    if not geometry.report.converged:
        print("Warning: optimizer did not converge on every circle; best iterate written")

    manifest = RunManifest(
        command="minimal",
        parameters=_parameters(args),
        seed=args.seed,
        version=__version__,
        outputs=["minimal.csv"],
        results=results,
    )
    manifest.write(out / "manifest.json")
    logger.info("%s finished in %.2f s", manifest.command, time.perf_counter() - started)
    print(f"Wrote minimal.csv and manifest.json to {out}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    passed, total = VerificationRunner(samples=args.samples, seed=args.seed).run(args.suite)
    return 0 if passed == total else 2


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else get_settings().log_level
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None):
    """Main entry point for the CLI."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        code = args.func(args)
    except (ValidationError, FileNotFoundError) as e:
        print(f"Error: {e}")
        sys.exit(1)
    except NumericalError as e:
        print(f"Error: {e}")
        deltas = getattr(e, "deltas", None)
        if deltas:
            print(f"  last sup-changes: {', '.join(f'{d:.3e}' for d in deltas[-3:])}")
        sys.exit(2)
    except FKQCError as e:
        print(f"\nError: {e}")
        sys.exit(2)
    sys.exit(code)


if __name__ == "__main__":
    main()
