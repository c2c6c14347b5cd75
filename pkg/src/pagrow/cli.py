"""Command-line surface: growth, exact evaluation, oracle cross-checks,
Monte Carlo comparisons, benchmarking, and the acceptance suite.

Every run echoes its full configuration (JSON, sorted keys) to stderr, and
identical argv produces byte-identical data output.  Exit codes: 0 success,
1 usage error, 2 failed verification, 3 numeric warning escalated by
--strict.  CSV uses LF line endings and no trailing whitespace; JSON is
UTF-8 with sorted keys.  Column and key layouts are frozen in FORMATS.md.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import warnings
from fractions import Fraction

from .errors import CancellationWarning, PagrowError
from .numerics import EXACT, FLOAT
from .pmf import DegreePmf, format_probability

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_NUMERIC_STRICT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _seed_default() -> int:
    return int(os.environ.get("PAGROW_SEED", "0"))


def _build_parser() -> _Parser:
    p = _Parser(prog="pagrow", description=__doc__.splitlines()[0])
    p.add_argument("--strict", action="store_true",
                   help="escalate numeric warnings to exit code 3")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, fmt=True, mode=False):
        sp.add_argument("--out", help="write data output to this file instead of stdout")
        # also accepted after the subcommand; SUPPRESS keeps the global value
        sp.add_argument("--strict", action="store_true", default=argparse.SUPPRESS,
                        help=argparse.SUPPRESS)
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help="RNG master seed (default: $PAGROW_SEED or 0)")
        if fmt:
            sp.add_argument("--format", choices=["csv", "json", "edgelist"], default="csv")
        if mode:
            sp.add_argument("--mode", choices=["exact", "float"], default=None)

    sp = sub.add_parser("grow", help="grow a k-neighbour graph, emit edges or histogram")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed-graph", choices=["kloops", "complete"], default="kloops")
    sp.add_argument("--j", type=int, default=None, help="complete-seed size")
    sp.add_argument("--histogram", action="store_true", help="emit the degree histogram")
    sp.add_argument("--trace", type=int, default=None, help="emit a t,degree trace of this vertex")
    sp.add_argument("--neighbour-mode", choices=["slots", "distinct"], default="slots")
    common(sp)

    sp = sub.add_parser("lcd", help="grow a contracted single-edge (LCD) graph")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--histogram", action="store_true")
    common(sp)

    sp = sub.add_parser("exact-pmf", help="exact degree distribution of vertex i at time n")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed-graph", choices=["kloops", "complete"], default="kloops")
    sp.add_argument("--j", type=int, default=None)
    common(sp, seed=False, mode=True)

    sp = sub.add_parser("exact-moments", help="expected degree and second moment of vertex i")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    common(sp, seed=False, mode=True)

    sp = sub.add_parser("alpha", help="limiting degree-sequence proportions")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d-max", type=int, required=True)
    common(sp, seed=False)

    sp = sub.add_parser("oracle", help="cross-check the closed form against an oracle")
    sp.add_argument("--which", choices=["dp", "gf", "process"], default="dp")
    sp.add_argument("--alpha", type=int, default=None)
    sp.add_argument("--sigma", type=int, default=None)
    sp.add_argument("--a0", default=None)
    sp.add_argument("--b0", default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--i", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--seed-graph", choices=["kloops", "complete"], default="kloops")
    sp.add_argument("--j", type=int, default=None)
    common(sp, seed=False)

    sp = sub.add_parser("mc", help="Monte Carlo comparison against the exact formulas")
    sp.add_argument("--check", required=True,
                    choices=["mean", "distribution", "degree-sequence", "pa-class", "models-tv"])
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--i", type=int, default=None)
    sp.add_argument("--R", type=int, default=1000)
    sp.add_argument("--d-max", type=int, default=10)
    sp.add_argument("--d", default=None, help="comma-separated degrees for pa-class")
    sp.add_argument("--trials", type=int, default=1000000)
    sp.add_argument("--threads", type=int, default=1)
    common(sp)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--only", default=None, help="comma-separated criterion numbers")
    common(sp, seed=False, fmt=False)

    sp = sub.add_parser("bench", help="growth throughput benchmark")
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--n", type=int, default=1000000)
    common(sp)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    echo = {k: v for k, v in sorted(vars(args).items()) if k != "out" and v is not None}
    if hasattr(args, "seed"):
        args.seed = _seed_default() if args.seed is None else args.seed
        echo["seed"] = args.seed
    print(json.dumps({"config": echo}, sort_keys=True), file=sys.stderr)

    handler = _HANDLERS[args.command]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            text, code = handler(args)
        except _UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except PagrowError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if text:
        _write_output(text, args.out)
    if args.strict and any(issubclass(w.category, CancellationWarning) for w in caught):
        return EXIT_NUMERIC_STRICT
    return code


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _mode(args):
    if getattr(args, "mode", None) is None:
        return None
    return EXACT if args.mode == "exact" else FLOAT


def _seed_graph(args, k):
    from .growth import SeedGraph

    if args.seed_graph == "complete":
        if args.j is None:
            raise _UsageError("--seed-graph complete requires --j")
        return SeedGraph.complete_kj(k, args.j)
    return SeedGraph.k_loops(k)


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _graph_output(g, args) -> str:
    if args.histogram:
        from .graph import degree_histogram

        hist = sorted(degree_histogram(g).items())
        if args.format == "json":
            return _json_text({"degree_histogram": [[d, c] for d, c in hist]})
        return _csv(hist, ["degree", "count"])
    if args.format == "json":
        return _json_text({"edges": [[u, v] for u, v in g.edges()]})
    if args.format == "edgelist":
        buf = io.StringIO()
        g.dump_edge_list(buf)
        return buf.getvalue()
    return _csv(g.edges(), ["u", "v"])


def _cmd_grow(args):
    from .growth import GrowthConfig, grow_kneighbour, write_degree_trace
    from .rng import RngStream

    cfg = GrowthConfig(
        k=args.k, n=args.n, rng=RngStream(args.seed), seed=_seed_graph(args, args.k),
        trace_vertex=args.trace, neighbour_mode=args.neighbour_mode,
    )
    result = grow_kneighbour(cfg)
    if args.trace:
        buf = io.StringIO()
        write_degree_trace(result, buf)
        return buf.getvalue(), EXIT_OK
    return _graph_output(result.graph, args), EXIT_OK


def _cmd_lcd(args):
    from .growth import grow_lcd
    from .rng import RngStream

    g = grow_lcd(args.k, args.n, RngStream(args.seed))
    return _graph_output(g, args), EXIT_OK


def _pmf_output(p: DegreePmf, args) -> str:
    if args.format == "json":
        return _json_text(
            {
                "mode": "exact" if p.exact else "float",
                "support": [str(v) if isinstance(v, Fraction) else v for v in p.values()],
                "probabilities": [format_probability(q, p.exact) for q in p.probs],
            }
        )
    buf = io.StringIO()
    p.to_csv(buf)
    return buf.getvalue()


def _cmd_exact_pmf(args):
    from .urn import degree_pmf_from_seed

    p = degree_pmf_from_seed(args.k, _seed_graph(args, args.k), args.i, args.n, _mode(args))
    return _pmf_output(p, args), EXIT_OK


def _cmd_exact_moments(args):
    from .urn import (
        expected_degree,
        expected_degree_asymptotic,
        expected_degree_gamma,
        expected_degree_second_moment,
    )

    # expectation tables default to float above n = 1e4, exact otherwise
    mode = _mode(args) or (FLOAT if args.n > 10_000 else EXACT)
    if mode.exact:
        mean = expected_degree(args.k, args.i, args.n)
        second = expected_degree_second_moment(args.k, args.i, args.n)
        var = second - mean * mean
        fmt = lambda x: format_probability(x, True)
    else:
        mean = expected_degree_gamma(args.k, args.i, args.n)
        from .urn import kloops_urn_spec, urn_second_moment

        spec, m = kloops_urn_spec(args.k, args.i, args.n)
        second = urn_second_moment(spec, m, FLOAT)
        var = second - mean * mean
        fmt = lambda x: format_probability(x, False)
    rows = [
        ("mean_product_form", fmt(mean)),
        ("mean_gamma_form", format_probability(expected_degree_gamma(args.k, args.i, args.n), False)),
        ("mean_asymptotic", format_probability(expected_degree_asymptotic(args.k, args.i, args.n), False)),
        ("second_moment", fmt(second)),
        ("variance", fmt(var)),
    ]
    if args.format == "json":
        return _json_text({name: value for name, value in rows}), EXIT_OK
    return _csv(rows, ["statistic", "value"]), EXIT_OK


def _cmd_alpha(args):
    from .urn import alpha_degree_seq

    rows = [(d, alpha_degree_seq(args.k, d)) for d in range(args.k, args.d_max + 1)]
    if args.format == "json":
        return _json_text({"alpha": [[d, str(a)] for d, a in rows]}), EXIT_OK
    return _csv(rows, ["d", "alpha"]), EXIT_OK


def _cmd_oracle(args):
    from .growth import enumerate_process_distribution
    from .urn import (
        TriangularUrnSpec,
        degree_pmf_from_seed,
        urn_gf_oracle,
        urn_pmf,
        urn_pmf_dp_oracle,
    )

    if args.alpha is not None:
        for name in ("sigma", "a0", "b0", "m"):
            if getattr(args, name) is None:
                raise _UsageError(f"raw urn oracle check requires --{name}")
        spec = TriangularUrnSpec(args.alpha, args.sigma, Fraction(args.a0), Fraction(args.b0))
        closed = urn_pmf(spec, args.m, EXACT)
        oracle = urn_gf_oracle(spec, args.m) if args.which == "gf" else urn_pmf_dp_oracle(spec, args.m)
        if args.which == "process":
            raise _UsageError("process oracle needs --k/--i/--n, not raw urn parameters")
    else:
        for name in ("k", "i", "n"):
            if getattr(args, name) is None:
                raise _UsageError(f"adapter oracle check requires --{name}")
        seed = _seed_graph(args, args.k)
        closed = degree_pmf_from_seed(args.k, seed, args.i, args.n, EXACT)
        if args.which == "process":
            oracle = enumerate_process_distribution(args.k, args.i, args.n, seed)
        else:
            from .urn import complete_urn_spec, kloops_urn_spec

            spec, m = (
                kloops_urn_spec(args.k, args.i, args.n)
                if seed.variant == "k-loops"
                else complete_urn_spec(args.k, seed.j, args.i, args.n)
            )
            ball = urn_gf_oracle(spec, m) if args.which == "gf" else urn_pmf_dp_oracle(spec, m)
            oracle = DegreePmf(closed.support_offset, 1, ball.probs, exact=True)

    a, b = closed.as_dict(), oracle.as_dict()
    support = sorted(set(a) | set(b))
    rows = []
    all_equal = True
    for v in support:
        pa, pb = a.get(v, Fraction(0)), b.get(v, Fraction(0))
        equal = pa == pb
        all_equal = all_equal and equal
        rows.append((v, format_probability(pa, True), format_probability(pb, True),
                     "true" if equal else "false"))
    code = EXIT_OK if all_equal else EXIT_VERIFY_FAILED
    if args.format == "json":
        obj = {
            "oracle": args.which,
            "agree": all_equal,
            "rows": [[str(v), c, o, e] for v, c, o, e in rows],
        }
        return _json_text(obj), code
    return _csv(rows, ["value", "closed", "oracle", "equal"]), code


def _cmd_mc(args):
    from .analytics import (
        check_pa_class,
        collect_step_increments,
        compare_degree_distribution,
        compare_mean_degree,
        compare_models_tv,
        median_degree_sequence_report,
        report_to_dict,
        reports_to_text,
        run_replicas,
    )
    from .growth import GrowthConfig, grow_kneighbour
    from .rng import RngStream
    from .urn import degree_pmf_from_seed, expected_degree

    if args.check in ("mean", "distribution", "models-tv") and args.i is None:
        raise _UsageError(f"--check {args.check} requires --i")
    if args.check == "mean":
        cfg = GrowthConfig(k=args.k, n=args.n, rng=RngStream(args.seed), trace_vertex=args.i)
        s = run_replicas(cfg, args.R, parallelism=args.threads)
        report = compare_mean_degree(s, expected_degree(args.k, args.i, args.n))
    elif args.check == "distribution":
        cfg = GrowthConfig(k=args.k, n=args.n, rng=RngStream(args.seed), trace_vertex=args.i)
        s = run_replicas(cfg, args.R, parallelism=args.threads)
        from .growth import SeedGraph

        exact = degree_pmf_from_seed(args.k, SeedGraph.k_loops(args.k), args.i, args.n)
        report = compare_degree_distribution(s, exact)
    elif args.check == "degree-sequence":
        graphs = [
            grow_kneighbour(GrowthConfig(k=args.k, n=args.n, rng=RngStream(args.seed, r))).graph
            for r in range(max(args.R, 1))
        ]
        report = median_degree_sequence_report(graphs, args.k, args.d_max)
    elif args.check == "pa-class":
        d_values = [int(x) for x in (args.d or "4,10,20").split(",")]
        cfg = GrowthConfig(k=args.k, n=args.n, rng=RngStream(args.seed))
        snaps = collect_step_increments(cfg, d_values, trials=args.trials)
        report = check_pa_class(snaps)
    else:
        report = compare_models_tv(
            args.k, args.i, args.n, args.R, master_seed=args.seed, parallelism=args.threads
        )
    code = EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    if args.format == "json":
        return _json_text(report_to_dict(report)), code
    return reports_to_text([report]), code


def _cmd_verify(args):
    from .acceptance import run_acceptance

    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_acceptance(only=only, stream=sys.stderr)
    lines = [
        f"criterion {r.number:>2}  {'PASS' if r.passed else 'FAIL'}  "
        f"[{r.elapsed:7.2f}s]  {r.title}"
        for r in results
    ]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} criteria passed")
    text = "\n".join(lines) + "\n"
    return text, EXIT_OK if n_fail == 0 else EXIT_VERIFY_FAILED


def _cmd_bench(args):
    from .acceptance import growth_benchmark

    stats = growth_benchmark(args.k, args.n, args.seed)
    rows = sorted(stats.items())
    if args.format == "json":
        return _json_text(stats), EXIT_OK
    return _csv(rows, ["metric", "value"]), EXIT_OK


_HANDLERS = {
    "grow": _cmd_grow,
    "lcd": _cmd_lcd,
    "exact-pmf": _cmd_exact_pmf,
    "exact-moments": _cmd_exact_moments,
    "alpha": _cmd_alpha,
    "oracle": _cmd_oracle,
    "mc": _cmd_mc,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


if __name__ == "__main__":
    sys.exit(main())
