"""Command-line front end: build, query, benchmark, generate, inspect.

Every subcommand is a thin adapter over the library; exit codes are 0 for
success, 1 for usage errors, 2 for data errors (unreadable files, unknown
nodes, malformed input).
"""

from __future__ import annotations

import argparse
import sys
import time

from .bitvec import BitVectorError, word_count
from .engine import LocrQuery
from .graph import (
    CycleError,
    ParseError,
    UnknownNodeError,
    collapse,
    load_graph,
    save_graph,
)
from .harness import (
    METHODS,
    RMAT_DEFAULT_PROBS,
    assign_zipf_labels,
    gen_rmat,
    gen_worstcase,
    generate_query_set,
    load_query_set,
    run_benchmark,
    save_query_set,
    worstcase_queries,
    write_label_frequencies,
)
from .index import build_index, load_index, read_section_sizes, save_index, IndexFormatError

_DATA_ERRORS = (
    ParseError,
    IndexFormatError,
    BitVectorError,
    UnknownNodeError,
    CycleError,
    ValueError,
    OSError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_probs(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("need four comma-separated probabilities")
    return tuple(parts)  # type: ignore[return-value]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bitpath", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-index", help="index a tab-separated edge list")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("query", help="answer queries against an index")
    p.add_argument("index")
    p.add_argument("--method", choices=sorted(METHODS), default="bitpath")
    p.add_argument("--source")
    p.add_argument("--dest")
    p.add_argument("--labels", default="", help="comma-separated label order")
    p.add_argument("--queries", help="query file, one per line")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="time a query set under a per-query timeout")
    p.add_argument("index")
    p.add_argument("--queries", required=True)
    p.add_argument("--method", choices=sorted(METHODS), default="bitpath")
    p.add_argument("--timeout", type=float, default=10.0, help="seconds per query")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.add_argument("--plot", help="also render the per-length figure to this file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-rmat", help="generate a labeled power-law graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--nodes", type=int, required=True, help="power of two")
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--labels", type=int, default=64)
    p.add_argument("--zipf-s", type=float, default=2.95)
    p.add_argument("--probs", type=_parse_probs, default=RMAT_DEFAULT_PROBS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_rmat)

    p = sub.add_parser("gen-queries", help="sample verified positive/negative queries")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--positives", type=int, default=100)
    p.add_argument("--negatives", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep-prob", type=float, default=0.5)
    p.add_argument("--strategy", choices=("uniform", "topo_weighted"), default="uniform")
    p.add_argument("--max-len", type=int, default=30)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("gen-worstcase", help="generate the backtracking ladder family")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--e-param", type=int, required=True)
    p.add_argument("--seq-len", type=int, default=4)
    p.set_defaults(func=cmd_gen_worstcase)

    p = sub.add_parser("stats", help="inspect an index file")
    p.add_argument("index")
    p.add_argument("--label-freq", help="write the label frequency CSV here")
    p.add_argument("--plot", help="render the label frequency figure here")
    p.set_defaults(func=cmd_stats)

    return parser


def cmd_build_index(args) -> int:
    g = load_graph(args.graph)
    started = time.perf_counter()
    cg = collapse(g)
    idx = build_index(cg)
    elapsed = time.perf_counter() - started
    size = save_index(idx, args.output)
    n = cg.base.node_count
    print(f"edges: {cg.base.edge_count}")
    print(f"nodes: {n}")
    print(f"labels: {len(cg.labels)}")
    print(f"max-indeg: {max(cg.in_degree, default=0)}")
    print(f"max-outdeg: {max(cg.out_degree, default=0)}")
    print(f"avg-in/outdeg: {cg.base.edge_count / n if n else 0:.2f}")
    print(f"largest-depth: {max(cg.topo_depth, default=0)}")
    print(f"sccs: {cg.multi_scc_count}")
    print(f"build-time: {elapsed:.2f} s")
    print(f"index-bytes: {size} -> {args.output}")
    return 0


def _parse_query_file(path: str) -> list[LocrQuery]:
    queries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) == 4 and fields[3] in ("pos", "neg"):
                fields = fields[:3]
            if len(fields) not in (2, 3):
                raise ParseError(f"line {lineno}: expected 2-4 tab-separated fields")
            labels = tuple(l for l in fields[2].split(",") if l) if len(fields) == 3 else ()
            queries.append(LocrQuery(fields[0], fields[1], labels))
    return queries


def cmd_query(args) -> int:
    idx = load_index(args.index)
    method = METHODS[args.method]
    if args.queries:
        for query in _parse_query_file(args.queries):
            print(method(idx, query).line())
        return 0
    if not args.source or not args.dest:
        raise ParseError("need --source and --dest (or --queries FILE)")
    labels = tuple(l for l in args.labels.split(",") if l)
    result = method(idx, LocrQuery(args.source, args.dest, labels))
    if args.verbose:
        print(result.line())
    else:
        print(result.verdict)
    return 0


def cmd_bench(args) -> int:
    idx = load_index(args.index)
    with open(args.queries, encoding="utf-8") as fh:
        entries = load_query_set(fh)
    report = run_benchmark(args.method, idx, entries, timeout_s=args.timeout)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            report.write_csv(fh)
        print(
            f"{report.processed} queries timed, {report.abandoned} abandoned "
            f"-> {args.output}",
            file=sys.stderr,
        )
    else:
        report.write_csv(sys.stdout)
    if args.plot:
        from .plots import plot_bench_reports

        plot_bench_reports([report], args.plot)
    return 0


def cmd_gen_rmat(args) -> int:
    g = gen_rmat(args.nodes, args.edges, quadrant_probs=args.probs, seed=args.seed)
    if args.labels:
        g = assign_zipf_labels(g, args.labels, s=args.zipf_s, seed=args.seed)
    save_graph(g, args.output)
    print(f"nodes: {g.node_count}")
    print(f"edges: {g.edge_count}")
    print(f"labels: {g.label_count}")
    return 0


def cmd_gen_queries(args) -> int:
    cg = collapse(load_graph(args.graph))
    entries = generate_query_set(
        cg,
        positives=args.positives,
        negatives=args.negatives,
        seed=args.seed,
        keep_prob=args.keep_prob,
        strategy=args.strategy,
        max_len=args.max_len,
    )
    with open(args.output, "w", encoding="utf-8") as fh:
        save_query_set(entries, fh)
    print(f"wrote {len(entries)} queries -> {args.output}")
    return 0


def cmd_gen_worstcase(args) -> int:
    g = gen_worstcase(args.e_param, label_seq_len=args.seq_len)
    save_graph(g, args.output)
    success, fail = worstcase_queries(args.seq_len)
    print(f"nodes: {g.node_count}")
    print(f"edges: {g.edge_count}")
    print(f"satisfiable: {success.line()}")
    print(f"failing: {fail.line()}")
    return 0


def cmd_stats(args) -> int:
    idx = load_index(args.index)
    sections = read_section_sizes(args.index)
    for name, size in sections.items():
        print(f"section {name}: {size} bytes")
    vec_bytes = sum(v.serialized_size() for v in idx.n_succ_e + idx.n_pred_e)
    n_words = word_count(idx.universe)
    plain_bytes = (25 + 8 * n_words) * (len(idx.n_succ_e) + len(idx.n_pred_e))
    ratio = plain_bytes / vec_bytes if vec_bytes else 1.0
    print(f"edge-universe: {idx.universe}")
    print(f"per-node vectors: {len(idx.n_succ_e) + len(idx.n_pred_e)}")
    print(f"vector-bytes: {vec_bytes}")
    print(f"plain-equivalent-bytes: {plain_bytes}")
    print(f"compression-ratio: {ratio:.1f}")
    rows = [
        (idx.graph_ref.labels.names[l], idx.el_id[l].ones_count)
        for l in range(len(idx.graph_ref.labels))
    ]
    rows.sort(key=lambda r: (-r[1], r[0]))
    if args.label_freq:
        with open(args.label_freq, "w", encoding="utf-8", newline="") as fh:
            write_label_frequencies(rows, fh)
        print(f"label frequencies -> {args.label_freq}")
    if args.plot:
        from .plots import plot_label_frequencies

        plot_label_frequencies(rows, args.plot)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
