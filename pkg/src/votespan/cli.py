"""Command-line surface for votespan.

Subcommands:

* ``pli``: print the linear-independence probability curve for a
  dependence profile over a range of ensemble sizes.
* ``size``: solve the smallest ensemble size whose probability of
  linear independence reaches a confidence threshold.
* ``estimate``: estimate dependence probabilities from a vote-dump CSV.
* ``experiment``: run the prequential grid, write the CSV reports, and
  render the companion figures.

Exit codes: 0 success, 2 validation or ingestion failure, 3 work-budget
exceeded, 4 numerical failure (rank deficiency, undefined correlation).

An optional ``--config`` file (``key = value`` lines, ``#`` comments,
keys named after long flags) supplies experiment defaults; explicit
flags win over file values.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .errors import (
    RepresentationalDeficiencyError,
    ResourceBudgetError,
    UndefinedCorrelationError,
    ValidationError,
)
from .algebra import RANK_TOL
from .estimation import estimate_p
from .harness import (
    GridConfig,
    MethodSpec,
    SUMMARY_HEADER,
    csv_dataset,
    rbf_dataset,
    run_experiment_grid,
    write_reports,
)
from .pli import (
    DEFAULT_MAX_N,
    DependenceProfile,
    SizingRequest,
    pli_exact,
    solve_inc,
    solve_sinc,
)
from .streams import read_vote_dump

DEFAULT_THRESHOLD = 0.9999


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def _resolve_profile(m: int, p_text: str) -> DependenceProfile:
    """A full profile when m-1 values are given, uniform when one is."""
    values = _parse_floats(p_text)
    if len(values) == m - 1:
        return DependenceProfile(m, values)
    if len(values) == 1:
        return DependenceProfile.uniform(m, values[0])
    raise ValidationError(
        f"--p needs 1 or {m - 1} values for m={m}, got {len(values)}"
    )


def _parse_n_range(text: str) -> range:
    """Either a single size or an inclusive ``start..end`` range."""
    first, sep, last = text.partition("..")
    try:
        start = int(first)
        end = int(last) if sep else start
    except ValueError:
        raise ValidationError(
            f"expected N or START..END, got {text!r}"
        ) from None
    if start < 0 or end < start:
        raise ValidationError(f"bad size range {text!r}")
    return range(start, end + 1)


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _format_value(value) -> str:
    if value is None:
        return "--"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


TRUE_WORDS = frozenset({"true", "1", "yes", "on"})
FALSE_WORDS = frozenset({"false", "0", "no", "off"})
FLAG_KEYS = frozenset({"plot", "reproducible"})


def _config_argv(path: str) -> list[str]:
    """Translate a config file into argv tokens, booleans included."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}") from None
    tokens: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("_", "-")
        value = value.strip()
        if not sep or not key or not value:
            raise ValidationError(
                f"config line {line_no}: expected key = value, got {raw!r}"
            )
        if key in FLAG_KEYS:
            word = value.lower()
            if word in TRUE_WORDS:
                tokens.append(f"--{key}")
            elif word in FALSE_WORDS:
                if key == "plot":
                    tokens.append("--no-plot")
            else:
                raise ValidationError(
                    f"config line {line_no}: {key} must be true or false"
                )
        else:
            tokens.extend([f"--{key}", value])
    return tokens


def _inject_config(argv: list[str]) -> list[str]:
    """Splice config-file tokens after the subcommand; flags still win.

    argparse lets later occurrences override earlier ones, so putting
    the file's tokens first gives explicit flags precedence.
    """
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None or not argv:
        return argv
    return argv[:1] + _config_argv(path) + argv[1:]


def cmd_pli(args: argparse.Namespace) -> int:
    profile = _resolve_profile(args.m, args.p)
    print("n,pli")
    for n in _parse_n_range(args.n):
        print(f"{n},{_format_value(pli_exact(profile, n))}")
    return 0


def cmd_size(args: argparse.Namespace) -> int:
    profile = _resolve_profile(args.m, args.p)
    request = SizingRequest(args.threshold, args.max_n)
    inc = solve_inc(profile, request)
    sinc = solve_sinc(args.m, profile.mean_p, request)
    print("quantity,value")
    print(f"INC,{_format_value(inc)}")
    print(f"SINC,{_format_value(sinc)}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    matrices = read_vote_dump(args.votes)
    report = estimate_p(matrices, tol=args.tol,
                        shuffle_seed=args.shuffle_seed)
    n = matrices[0].shape[0]
    print("quantity,value")
    print(f"m,{report.profile.m}")
    print(f"instances,{report.instances}")
    for l, p in enumerate(report.profile.p, start=1):
        print(f"p_{l},{_format_value(p)}")
    print(f"full_rank_fraction,{_format_value(report.full_rank_fraction)}")
    print(f"pli_at_{n},{_format_value(pli_exact(report.profile, n))}")
    return 0


HT_ONLY = ("grace_period", "delta", "tie_threshold")


def _build_method(args: argparse.Namespace) -> MethodSpec:
    params = [(key, getattr(args, key)) for key in HT_ONLY
              if getattr(args, key) is not None]
    if params and args.learner != "ht":
        names = ", ".join(key for key, _ in params)
        raise ValidationError(
            f"{names}: only the ht learner takes these flags"
        )
    name = args.method_name or f"{args.learner}-{args.combiner}"
    return MethodSpec(
        name=name,
        combiner=args.combiner,
        learner=args.learner,
        bag_lambda=args.bag_lambda,
        learner_params=tuple(params),
    )


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.dataset == "rbf":
        dataset = rbf_dataset(
            "rbf", m=args.m, n_features=args.features,
            n_centroids=args.centroids, spread=args.spread,
        )
    else:
        dataset = csv_dataset(args.dataset)
    method = _build_method(args)
    config = GridConfig(
        sizes=_parse_sizes(args.sizes),
        seeds=args.seeds,
        instance_limit=args.instances,
        threshold=args.threshold,
        max_n=args.max_n,
        tol=args.tol,
        workers=args.workers,
    )
    result = run_experiment_grid([dataset], [method], config)
    paths = write_reports(result, args.out, reproducible=args.reproducible)
    print(",".join(SUMMARY_HEADER))
    for s in result.summaries:
        cells = (s.dataset, s.method, s.m, s.sinc, s.inc, s.n_inc,
                 s.acc_pct_of_max, s.correlation)
        print(",".join(_format_value(cell) for cell in cells))
    written = [paths[key] for key in ("raw", "summary", "profiles", "curve")]
    if args.plot:
        from .plots import render_experiment_figures

        written.extend(render_experiment_figures(result, args.out))
    for path in written:
        print(f"wrote {path}")
    return 0


def _add_profile_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, required=True,
                        help="number of classes")
    parser.add_argument(
        "--p", required=True,
        help="dependence probabilities: m-1 comma-separated values for a "
             "full profile, or one value applied uniformly",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votespan",
        description="Vote-vector independence probabilities and ideal "
                    "ensemble sizing for stream ensembles.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    pli = commands.add_parser(
        "pli", help="print the independence probability curve as CSV")
    _add_profile_flags(pli)
    pli.add_argument("--n", required=True,
                     help="ensemble size N or inclusive range START..END")
    pli.set_defaults(func=cmd_pli)

    size = commands.add_parser(
        "size", help="solve the smallest size reaching a threshold")
    _add_profile_flags(size)
    size.add_argument("--t", "--threshold", dest="threshold", type=float,
                      default=DEFAULT_THRESHOLD,
                      help="confidence threshold (default %(default)s)")
    size.add_argument("--max-n", type=int, default=DEFAULT_MAX_N,
                      help="give up past this size (default %(default)s)")
    size.set_defaults(func=cmd_size)

    estimate = commands.add_parser(
        "estimate", help="estimate dependence probabilities from a dump")
    estimate.add_argument("--votes", required=True,
                          help="vote-dump CSV (instance_id, classifier_id, "
                               "score_0, ...)")
    estimate.add_argument("--tol", type=float, default=RANK_TOL,
                          help="rank tolerance (default %(default)s)")
    estimate.add_argument("--shuffle-seed", type=int, default=None,
                          help="shuffle rows per instance with this seed")
    estimate.set_defaults(func=cmd_estimate)

    experiment = commands.add_parser(
        "experiment", help="run the prequential grid and write reports")
    experiment.add_argument("--config", default=None,
                            help="key = value file of experiment defaults; "
                                 "explicit flags win")
    experiment.add_argument("--dataset", default="rbf",
                            help="'rbf' or a dataset CSV path "
                                 "(default %(default)s)")
    experiment.add_argument("--m", type=int, default=4,
                            help="class count for synthetic streams "
                                 "(default %(default)s)")
    experiment.add_argument("--features", type=int, default=20,
                            help="synthetic feature count "
                                 "(default %(default)s)")
    experiment.add_argument("--centroids", type=int, default=50,
                            help="synthetic centroid count "
                                 "(default %(default)s)")
    experiment.add_argument("--spread", type=float, default=6.0,
                            help="synthetic centroid spread "
                                 "(default %(default)s)")
    experiment.add_argument("--instances", type=int, default=100_000,
                            help="per-cell stream cap (default %(default)s)")
    experiment.add_argument("--combiner", choices=("majority", "geometric"),
                            default="majority")
    experiment.add_argument("--learner", choices=("ht", "nb"), default="ht")
    experiment.add_argument("--bag-lambda", type=float, default=1.0,
                            help="expected bagging replications "
                                 "(default %(default)s)")
    experiment.add_argument("--grace-period", type=int, default=None,
                            help="tree split-check interval")
    experiment.add_argument("--delta", type=float, default=None,
                            help="tree split-confidence parameter")
    experiment.add_argument("--tie-threshold", type=float, default=None,
                            help="tree tie-break margin")
    experiment.add_argument("--method-name", default=None,
                            help="label for reports "
                                 "(default learner-combiner)")
    experiment.add_argument("--sizes", default="2,4,8,16,32,64,128",
                            help="comma-separated ensemble sizes "
                                 "(default %(default)s)")
    experiment.add_argument("--seeds", type=int, default=10,
                            help="seeds per cell (default %(default)s)")
    experiment.add_argument("--t", "--threshold", dest="threshold",
                            type=float, default=DEFAULT_THRESHOLD,
                            help="sizing threshold (default %(default)s)")
    experiment.add_argument("--max-n", type=int, default=DEFAULT_MAX_N,
                            help="sizing search cap (default %(default)s)")
    experiment.add_argument("--tol", type=float, default=RANK_TOL,
                            help="rank tolerance (default %(default)s)")
    experiment.add_argument("--out", default="votespan_results",
                            help="output directory (default %(default)s)")
    experiment.add_argument("--workers", type=int,
                            default=max(1, os.cpu_count() or 1),
                            help="parallel grid workers "
                                 "(default: available cores)")
    experiment.add_argument("--reproducible", action="store_true",
                            help="omit the timestamp header so reruns are "
                                 "byte-identical")
    experiment.add_argument("--plot", default=True,
                            action=argparse.BooleanOptionalAction,
                            help="render figures next to the CSVs")
    experiment.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    tokens = list(sys.argv[1:] if argv is None else argv)
    try:
        tokens = _inject_config(tokens)
        args = build_parser().parse_args(tokens)
        return args.func(args)
    except ResourceBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (RepresentationalDeficiencyError, UndefinedCorrelationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
