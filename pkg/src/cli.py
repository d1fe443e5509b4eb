"""
Command-line entry point: one subcommand per module.

Stdout carries only report bytes; logs go to stderr. Exit codes: 0 on
success, 2 on a validation error, 3 when a hard assertion fails, 64 on a
usage error, 1 on interrupt.
"""

import argparse
import logging
import math
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from src.aj_packets import packet_rows
from src.arith import (
    SignatureProfile,
    definite_form_exists,
    group_order,
    group_order_mod,
    gross_form_exists,
    induction_growth_exponent,
    kottwitz_sign,
    omega_and_bounds,
    scan_squarefree,
    sxdh_ledger,
)
from src.arthur import (
    gsk_deficiencies,
    nilpotent_partitions,
    nu_sigma,
    orbit_summary,
    principal_levi_of,
    rate_invariant,
    rate_oracle,
    shape_catalog_SO5,
    shape_rate_SO5,
)
from src.config import Settings, get_settings
from src.errors import DensitometerError, DomainError
from src.graphs import (
    Digraph,
    nonbacktracking_lift,
    parse_cayley_spec,
    random_regular_lift,
    read_graph_file,
    read_undirected_graph,
)
from src.lie_core import build_root_datum, parse_weight
from src.nbrw import DEFAULT_R_GRID, run_jobs, spectrum, walk_report
from src.report import COLUMNS, FORMATS, render, write_output
from src.spherical import UnramifiedParam, decay_threshold, lr_converges, partial_sum_series, rate_from_eigenvalue

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
EXIT_VALIDATION = 2
EXIT_ASSERTION = 3
EXIT_USAGE = 64

# Reports whose validators enforce hard bounds; their failures exit 3
HARD_BOUND_MODELS = frozenset({"WalkReport", "CoveringReport", "SpectrumReport", "PacketReport", "LedgerRow"})


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class ExperimentConfig(BaseModel):
    """Everything that determines the output bytes of one invocation."""

    command: str
    format: str
    seed: int
    dense_limit: Optional[int] = None
    params: Dict[str, Any]


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}")


def _common_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="csv", help="Output format (default: csv)")
    common.add_argument("--seed", type=int, default=0, help="Random seed recorded in the output (default: 0)")
    common.add_argument("--dense-limit", type=int, default=None, help="Largest n for dense linear algebra")
    common.add_argument("--out", default=None, help="Write the report to this file instead of stdout")
    common.add_argument("--log-level", default=None, help="Logging level (default: from DENSITOMETER_LOG_LEVEL)")
    return common


def _add_graph_source(sub: argparse.ArgumentParser) -> None:
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", metavar="FILE", help="Digraph file: header 'n d' then 'src dst' lines")
    source.add_argument("--nb-lift", metavar="FILE", help="Undirected regular graph to lift")
    source.add_argument("--cayley", metavar="SPEC", help="cyclic:N, symmetric:N or sl2:P")
    source.add_argument("--random-regular", nargs="+", type=int, metavar="N K [SEED]",
                        help="NB lift of a seeded random K-regular graph on N vertices (SEED defaults to --seed)")
    sub.add_argument("--arc-transitive", action="store_true", help="Mark an --nb-lift graph vertex-transitive")
    sub.add_argument("--seeds", type=_int_list, default=None,
                     help="Comma separated seeds for --random-regular (one row each)")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="densitometer", description="Rates of decay, cohomological packets and walk experiments")
    subs = parser.add_subparsers(dest="command", required=True)

    rates = subs.add_parser("rates", parents=[common], help="Rate table of the SO5 A-shapes or of one nu")
    rates.add_argument("--group", default="SO5", choices=["SO5"])
    rates.add_argument("--nu", default=None, help="Single parameter, e.g. 1/2,0")
    rates.add_argument("--family", default="B", choices=["B", "C"])
    rates.add_argument("--rank", type=int, default=2)

    orbits = subs.add_parser("orbits", parents=[common], help="Nilpotent orbits with weighted Dynkin diagrams")
    orbits.add_argument("--family", default="C", choices=["B", "C"])
    orbits.add_argument("--N", type=int, default=4)

    packets = subs.add_parser("packets", parents=[common], help="Cohomological A-packets of SO5")
    packets.add_argument("--form", default=None, choices=["split", "hyperbolic", "compact"])
    packets.add_argument("--levi", default=None, choices=["T", "M", "S", "G"])

    spherical = subs.add_parser("spherical", parents=[common], help="Truncated L^r sums of spherical functions")
    spherical.add_argument("--nu", default="1/2,0")
    spherical.add_argument("--p", type=int, default=3)
    spherical.add_argument("--r", type=_rational, default=Fraction(5, 2))
    spherical.add_argument("--radii", type=_int_list, default=[5, 10, 20, 40])
    spherical.add_argument("--family", default="B", choices=["B", "C"])
    spherical.add_argument("--rank", type=int, default=2)

    walk = subs.add_parser("walk", parents=[common], help="Mixing, distances and collisions of a digraph")
    _add_graph_source(walk)
    walk.add_argument("--eps", type=_rational, default=Fraction(1, 4))
    walk.add_argument("--ad-eps", type=_rational, default=Fraction(1, 10))
    walk.add_argument("--horizon", type=int, default=None)

    spec = subs.add_parser("spectrum", parents=[common], help="Eigenvalue magnitudes and density counts")
    _add_graph_source(spec)
    spec.add_argument("--r-grid", type=_float_list, default=list(DEFAULT_R_GRID))
    spec.add_argument("--mode", default="dense", choices=["dense", "power", "auto"])
    spec.add_argument("--steps", type=int, default=400, help="Power-iteration steps")

    subs.add_parser("ledger", parents=[common], help="Proven exponents against rate targets")

    gross = subs.add_parser("gross", parents=[common], help="Kottwitz signs and Gross inner forms")
    gross.add_argument("--n", type=int, default=2)
    gross.add_argument("--a", type=_int_list, default=None, help="Signature parameters a_v, e.g. 2,2")
    gross.add_argument("--max-degree", type=int, default=8, help="Definite forms for degrees 1..D when --a is absent")

    counts = subs.add_parser("counts", parents=[common], help="Group orders and arithmetic counts")
    counts.add_argument("--kind", required=True, choices=["order", "omega", "gsk", "induction", "scan"])
    counts.add_argument("--family", default="Sp", choices=["Sp", "SO_odd"])
    counts.add_argument("--rank", type=int, default=2)
    counts.add_argument("--p", type=int, default=2)
    counts.add_argument("--level", type=int, default=1)
    counts.add_argument("--q", type=int, default=None, help="Modulus (order mod q, or omega of q)")
    counts.add_argument("--k", type=int, default=1)
    counts.add_argument("--n", type=int, default=2)
    counts.add_argument("--limit", type=int, default=10_000)
    return parser


def _rates_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    if args.nu:
        rd = build_root_datum(args.family, args.rank)
        nu = parse_weight(args.nu)
        return [{
            "family": args.family,
            "rank": args.rank,
            "nu": str(nu),
            "rate": rate_invariant(nu, rd),
            "oracle": rate_oracle(nu, rd),
            "decay_threshold": decay_threshold(UnramifiedParam(nu, 2), rd),
        }]
    b2 = build_root_datum("B", 2)
    return [
        {
            "shape": row.shape.name,
            "pairs": str(row.shape),
            "partition": str(row.orbit),
            "nu_sigma": str(nu_sigma(row.orbit, b2)),
            "rate": row.rate,
            "principal_levi": principal_levi_of(row.orbit).value,
            "worst_rate": shape_rate_SO5(row.shape.name),
        }
        for row in shape_catalog_SO5()
    ]


def _orbits_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    return [orbit_summary(orbit) for orbit in nilpotent_partitions(args.family, args.N)]


def _packets_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    return packet_rows(args.form, args.levi)


def _spherical_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    rd = build_root_datum(args.family, args.rank)
    param = UnramifiedParam(parse_weight(args.nu), args.p)
    threshold = decay_threshold(param, rd)
    converges = lr_converges(param, args.r, rd)
    return [
        {
            "nu": str(param.nu),
            "p": args.p,
            "r": args.r,
            "radius": radius,
            "partial_sum": value,
            "threshold": threshold,
            "converges": converges,
        }
        for radius, value in partial_sum_series(param, args.r, args.radii, rd)
    ]


def load_graphs(args, settings: Settings) -> List[Digraph]:
    """Graphs named by the source flags; --seeds fans out --random-regular."""
    if args.graph:
        return [read_graph_file(args.graph)]
    if args.nb_lift:
        base = read_undirected_graph(args.nb_lift)
        return [nonbacktracking_lift(base, arc_transitive=args.arc_transitive, label=f"nb-{base.name}")]
    if args.cayley:
        return [parse_cayley_spec(args.cayley, cap=settings.closure_cap)]
    if len(args.random_regular) not in (2, 3):
        raise DomainError("--random-regular takes N K [SEED]")
    n, k = args.random_regular[:2]
    seed = args.random_regular[2] if len(args.random_regular) == 3 else args.seed
    seeds = args.seeds or [seed]
    return [random_regular_lift(n, k, s) for s in seeds]


def _walk_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    graphs = load_graphs(args, settings)
    jobs = [
        (lambda g=g: walk_report(g, eps=args.eps, ad_eps=args.ad_eps, horizon=args.horizon,
                                 seed=args.seed, settings=settings))
        for g in graphs
    ]
    return [report.model_dump() for report in run_jobs(jobs, settings.threads)]


def _spectrum_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    graphs = load_graphs(args, settings)
    jobs = [
        (lambda g=g: spectrum(g, r_grid=args.r_grid, dense_limit=settings.dense_limit,
                              mode=args.mode, steps=args.steps, seed=args.seed))
        for g in graphs
    ]
    rows = []
    for report in run_jobs(jobs, settings.threads):
        top = report.top_nontrivial
        top_rate = rate_from_eigenvalue(top, report.d) if top > 0 and report.d >= 2 else ""
        for r, count, exact in zip(report.r_grid, report.density_counts, report.counts_exact):
            rows.append({
                "graph_id": report.graph_id,
                "n": report.n,
                "d": report.d,
                "mode": report.mode,
                "trivial_count": report.trivial_count,
                "top_nontrivial": top,
                "top_rate": top_rate,
                "r": r,
                "density_count": count,
                "count_exact": exact,
            })
    return rows


def _ledger_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    return [row.model_dump() for row in sxdh_ledger()]


def _gross_row(n: int, a_list: Sequence[int]) -> Dict[str, Any]:
    profile = SignatureProfile(n, tuple(a_list))
    signs = [kottwitz_sign(n, a) for a in profile.a_list]
    product = math.prod(signs)
    return {
        "n": n,
        "a_list": ",".join(str(a) for a in profile.a_list),
        "signs": ",".join(f"{s:+d}" for s in signs),
        "sign_product": product,
        "gross_form_exists": gross_form_exists(profile),
    }


def _gross_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    if args.a:
        return [_gross_row(args.n, args.a)]
    rows = []
    for degree in range(1, args.max_degree + 1):
        row = _gross_row(args.n, [args.n] * degree)
        if row["gross_form_exists"] != definite_form_exists(args.n, degree):
            raise AssertionError(f"definite-form criteria disagree at degree {degree}")
        rows.append(row)
    return rows


def _counts_rows(args, settings: Settings) -> List[Dict[str, Any]]:
    kind = args.kind
    if kind == "order":
        if args.q is not None:
            key = f"{args.family} rank {args.rank} mod {args.q}"
            return [{"kind": kind, "key": key, "value": group_order_mod(args.family, args.rank, args.q)}]
        key = f"{args.family} rank {args.rank} over Z/{args.p}^{args.level}"
        return [{"kind": kind, "key": key, "value": group_order(args.family, args.rank, args.p, args.level)}]
    if kind == "omega":
        if args.q is None or args.q < 1:
            raise DomainError("--kind omega needs a positive --q")
        from sympy import factorint

        report = omega_and_bounds(sorted(factorint(args.q).items()))
        return [{"kind": kind, "key": k, "value": v} for k, v in report.model_dump().items()]
    if kind == "gsk":
        delta, delta_2 = gsk_deficiencies(args.k, args.n)
        return [
            {"kind": kind, "key": "delta", "value": delta},
            {"kind": kind, "key": "delta_2", "value": delta_2},
        ]
    if kind == "induction":
        return [
            {"kind": kind, "key": name, "value": induction_growth_exponent(name)}
            for name in ("Borel", "Klingen", "Siegel")
        ]
    report = scan_squarefree(args.limit)
    return [{"kind": kind, "key": k, "value": v} for k, v in report.model_dump().items()]


HANDLERS: Dict[str, Callable] = {
    "rates": _rates_rows,
    "orbits": _orbits_rows,
    "packets": _packets_rows,
    "spherical": _spherical_rows,
    "walk": _walk_rows,
    "spectrum": _spectrum_rows,
    "ledger": _ledger_rows,
    "gross": _gross_rows,
    "counts": _counts_rows,
}

_COMMON_KEYS = ("command", "format", "seed", "dense_limit", "out", "log_level")


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one subcommand and write its report.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = get_settings(dense_limit=args.dense_limit, log_level=args.log_level)
        _configure_logging(settings.log_level)
        params = {k: v for k, v in sorted(vars(args).items()) if k not in _COMMON_KEYS}
        config = ExperimentConfig(
            command=args.command,
            format=args.format,
            seed=args.seed,
            dense_limit=args.dense_limit,
            params={k: _config_value(v) for k, v in params.items()},
        )
        logger.info("Running %s with %s", args.command, config.params)
        rows = HANDLERS[args.command](args, settings)
        columns = COLUMNS["rate"] if args.command == "rates" and args.nu else COLUMNS[args.command]
        text = render(rows, args.format, columns, config.model_dump())
        write_output(text, args.out)
    except ValidationError as e:
        message = " ".join(str(e).split())
        if e.title in HARD_BOUND_MODELS:
            print(f"assertion failed: {message}", file=sys.stderr)
            return EXIT_ASSERTION
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DensitometerError, ValueError) as e:
        message = " ".join(str(e).split())
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssertionError as e:
        print(f"assertion failed: {e}", file=sys.stderr)
        return EXIT_ASSERTION
    except Exception:
        logger.exception("%s failed", args.command)
        return 1
    return 0


def _config_value(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, list):
        return [_config_value(v) for v in value]
    return value


def main() -> None:
    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n\nInterrupted by user.", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
