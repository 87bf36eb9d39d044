"""Command-line interface: ``hedonic-mc {gen,solve,experiment,fit,info,export}``.

Exit codes: 0 success, 1 other failure, 2 usage error, 3 invalid game,
4 checkpoint mismatch. Errors are one line on stderr, prefixed by their
category.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analysis
from .errors import HedonicError, ResumeError, ValidationError
from .experiment import CoreSizeHistogram, ExperimentConfig, census, run_experiment
from .game import MAX_PLAYERS, PreferenceMatrix, count_games
from .generator import MAX_ENUMERABLE, parse_seed, random_game
from .partitions import bell_number
from .solver import find_core

EXIT_OTHER, EXIT_USAGE, EXIT_INVALID, EXIT_CHECKPOINT = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _players(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= n <= MAX_PLAYERS:
        raise argparse.ArgumentTypeError(f"player count must be within 1..{MAX_PLAYERS}")
    return n


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _non_negative(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _seed(text):
    try:
        return parse_seed(text)
    except HedonicError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_sizes(text: str) -> tuple:
    """``"2..7"``, ``"5"`` or ``"3,5,9"``."""
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split(".."))
            sizes = tuple(range(lo, hi + 1))
        else:
            sizes = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse sizes {text!r}") from None
    if not sizes or any(not 2 <= n <= MAX_PLAYERS for n in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be within 2..{MAX_PLAYERS}")
    return sizes


def _families(text):
    fams = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [f for f in fams if f not in analysis.FAMILIES]
    if bad or not fams:
        raise argparse.ArgumentTypeError(f"unknown distribution(s) {bad}; choose from {analysis.FAMILIES}")
    return fams


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress informational output")
    common.add_argument("--out", type=Path, help="output file (default: standard output)")

    p = _Parser(prog="hedonic-mc", description="Random hedonic games, their cores, and core-size statistics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate one random game as JSON")
    g.add_argument("--players", type=_players, required=True)
    g.add_argument("--seed", type=_seed, default=0, help="64-bit seed, decimal or 0x-hex")
    g.add_argument("--index", type=_non_negative, default=0, help="game index within the seed's stream family")
    g.add_argument("--format", choices=("json", "text"), default="json")

    s = sub.add_parser("solve", parents=[common], help="compute the core of a game file")
    s.add_argument("game", type=Path, help="game file (JSON or compact text)")
    s.add_argument("--mode", choices=("full", "first"), default="full")
    s.add_argument("--json", action="store_true", help="print the full result JSON instead of the core size")

    e = sub.add_parser("experiment", parents=[common], help="Monte Carlo core-size census")
    e.add_argument("--sizes", type=parse_sizes, default=tuple(range(2, 8)))
    e.add_argument("--games", type=_positive, default=100_000, help="games per size")
    e.add_argument("--seed", type=_seed, default=0)
    e.add_argument("--workers", type=_positive, default=1)
    e.add_argument("--mode", choices=("full", "first"), default="full")
    e.add_argument("--checkpoint", type=Path)
    e.add_argument("--checkpoint-interval", type=_positive, default=10_000)
    e.add_argument("--resume", action="store_true", help="continue from --checkpoint")
    e.add_argument("--census", action="store_true", help=f"enumerate every game (sizes <= {MAX_ENUMERABLE})")

    f = sub.add_parser("fit", parents=[common], help="fit distributions to an experiment CSV")
    f.add_argument("results", type=Path)
    f.add_argument("--sizes", type=parse_sizes)
    f.add_argument("--dist", type=_families, default=("weibull", "gamma"))
    f.add_argument("--zero-policy", choices=analysis.ZERO_POLICIES, default="drop_zeros")

    i = sub.add_parser("info", parents=[common], help="exact Bell numbers and game counts")
    grp = i.add_mutually_exclusive_group(required=True)
    grp.add_argument("--bell", type=_players, metavar="N")
    grp.add_argument("--count-games", type=_players, metavar="N")

    x = sub.add_parser("export", parents=[common], help="frequency/CDF tables for plotting")
    x.add_argument("results", type=Path)
    x.add_argument("--sizes", type=parse_sizes)
    x.add_argument("--dist", type=_families, help="add fitted-CDF columns for these families")
    x.add_argument("--zero-policy", choices=analysis.ZERO_POLICIES, default="drop_zeros")
    return p


def _emit(args, text: str) -> None:
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _mode(args) -> str:
    return "first_only" if args.mode == "first" else "full"


def _load_game(path: Path) -> PreferenceMatrix:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read game file: {exc}") from None
    if text.lstrip().startswith("{"):
        return PreferenceMatrix.from_json(text)
    return PreferenceMatrix.from_text(text)


def _load_histogram(path: Path, sizes) -> CoreSizeHistogram:
    try:
        hist = CoreSizeHistogram.from_csv(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read results file: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"bad results file: {exc}") from None
    if sizes is not None:
        missing = [n for n in sizes if n not in hist.counts]
        if missing:
            raise UsageError(f"results file has no rows for sizes {missing}")
        hist = CoreSizeHistogram({n: hist.counts[n] for n in sizes})
    return hist


def cmd_gen(args) -> int:
    game = random_game(args.seed, args.players, args.index)
    _emit(args, (game.to_json() if args.format == "json" else game.to_text()) + "\n")
    return 0


def cmd_solve(args) -> int:
    game = _load_game(args.game)
    result = find_core(game, _mode(args))
    if args.out is not None:
        args.out.write_text(result.to_json() + "\n")
    print(result.to_json() if args.json else result.core_size)
    return 0


def cmd_experiment(args) -> int:
    if args.census:
        big = [n for n in args.sizes if n > MAX_ENUMERABLE]
        if big:
            raise UsageError(f"--census supports sizes up to {MAX_ENUMERABLE}, got {big}")
        hist = CoreSizeHistogram()
        for n in args.sizes:
            hist.add_counts(n, census(n, _mode(args)).row(n))
    else:
        config = ExperimentConfig(
            sizes=args.sizes,
            games_per_size=args.games,
            seed=args.seed,
            mode=_mode(args),
            worker_count=args.workers,
            checkpoint_interval=args.checkpoint_interval,
        )
        if args.resume and args.checkpoint is None:
            raise UsageError("--resume needs --checkpoint")
        hist = run_experiment(config, checkpoint=args.checkpoint, resume=args.resume)
    _emit(args, hist.to_csv())
    return 0


def _fit_size(row, families, policy):
    fits, failures = [], {}
    for fam in families:
        try:
            fits.append(analysis.fit(fam, row, zero_policy=policy))
        except HedonicError as exc:
            failures[fam] = f"{exc.category}: {exc}"
    entry = {"fits": [f.to_dict() for f in fits]}
    if failures:
        entry["no_fit"] = failures
    if len(fits) > 1:
        ranking = analysis.model_compare(fits)
        entry["ranking"] = {"aic": ranking.by_aic, "bic": ranking.by_bic}
    return entry, fits


def cmd_fit(args) -> int:
    hist = _load_histogram(args.results, args.sizes)
    report = {"zero_policy": args.zero_policy, "sizes": {}}
    for n in hist.sizes():
        entry, _ = _fit_size(hist.row(n), args.dist, args.zero_policy)
        report["sizes"][str(n)] = entry
    _emit(args, json.dumps(report, indent=2) + "\n")
    return 0


def cmd_info(args) -> int:
    value = bell_number(args.bell) if args.bell is not None else count_games(args.count_games)
    print(value)
    return 0


def cmd_export(args) -> int:
    hist = _load_histogram(args.results, args.sizes)
    fits = {}
    if args.dist:
        for n in hist.sizes():
            fits[n] = _fit_size(hist.row(n), args.dist, args.zero_policy)[1]
    _emit(args, analysis.export_distribution_tables(hist, fits))
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "experiment": cmd_experiment,
    "fit": cmd_fit,
    "info": cmd_info,
    "export": cmd_export,
}


def _fail(category: str, message: str, code: int) -> int:
    print(f"{category}: {message}".replace("\n", " "), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("usage-error", str(exc), EXIT_USAGE)
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage-error", str(exc), EXIT_USAGE)
    except ValidationError as exc:
        return _fail(exc.category, str(exc), EXIT_INVALID)
    except ResumeError as exc:
        return _fail(exc.category, str(exc), EXIT_CHECKPOINT)
    except HedonicError as exc:
        return _fail(exc.category, str(exc), EXIT_OTHER)
    except (OSError, ValueError) as exc:
        return _fail("error", str(exc), EXIT_OTHER)


if __name__ == "__main__":
    sys.exit(main())
