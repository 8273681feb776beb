"""Synthetic graphs, query synthesis, ground-truth oracle, benchmark runner.

Graphs come from a recursive-quadrant (R-MAT style) sampler with Zipf label
assignment, or from a hand-shaped ladder family on which failing queries
force edge-by-edge backtracking.  Query sets are sampled from backward walks
over the condensed graph: positives keep a random subsequence of a real
path's labels, negatives inject an absent label, shuffle, and survive only
if a decision procedure confirms them unsatisfiable.
"""

from __future__ import annotations

import csv
import random
import statistics
import string
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from . import baselines
from .engine import LocrQuery, QueryResult, QueryTimeout, evaluate, resolve_labels
from .graph import CollapsedGraph, LabeledGraph, NameTable, collapse
from .index import BitPathIndex, build_index

RMAT_DEFAULT_PROBS = (0.45, 0.15, 0.15, 0.25)
ORACLE_EDGE_GUARD = 500
UNLABELED = "_"

Oracle = Callable[[CollapsedGraph, LocrQuery], bool]


# ---------------------------------------------------------------------------
# graph generation


def gen_rmat(
    node_budget: int,
    edge_budget: int,
    quadrant_probs: Sequence[float] = RMAT_DEFAULT_PROBS,
    seed: int = 0,
) -> LabeledGraph:
    """Recursive-quadrant sampling of distinct directed edges.

    All ``node_budget`` nodes are registered (isolated ones included), every
    edge carries the placeholder label; duplicates are resampled until the
    budget is met.
    """
    if node_budget <= 0 or node_budget & (node_budget - 1):
        raise ValueError(f"node budget {node_budget} is not a power of two")
    if edge_budget > node_budget * node_budget:
        raise ValueError(
            f"edge budget {edge_budget} exceeds {node_budget}^2 possible edges"
        )
    if abs(sum(quadrant_probs) - 1.0) > 1e-9 or len(quadrant_probs) != 4:
        raise ValueError("quadrant probabilities must be four values summing to 1")
    levels = node_budget.bit_length() - 1
    rng = np.random.default_rng(seed)
    cutoffs = np.cumsum(quadrant_probs)[:3]
    seen: set[tuple[int, int]] = set()
    ordered: list[tuple[int, int]] = []
    stall = 0
    while len(ordered) < edge_budget:
        batch = max(1024, edge_budget - len(ordered))
        if levels:
            quads = np.searchsorted(cutoffs, rng.random((batch, levels)), side="right")
            weights = 1 << np.arange(levels - 1, -1, -1)
            tails = ((quads >> 1) * weights).sum(axis=1)
            heads = ((quads & 1) * weights).sum(axis=1)
        else:
            tails = heads = np.zeros(batch, dtype=np.int64)
        before = len(ordered)
        for t, h in zip(tails.tolist(), heads.tolist()):
            if (t, h) not in seen:
                seen.add((t, h))
                ordered.append((t, h))
                if len(ordered) == edge_budget:
                    break
        stall = stall + 1 if len(ordered) == before else 0
        if stall > 200:
            raise RuntimeError(
                "edge budget unreachable: quadrant probabilities concentrate "
                "the mass on too few distinct edges"
            )
    g = LabeledGraph()
    g.nodes = NameTable(f"n{i}" for i in range(node_budget))
    label = g.labels.add(UNLABELED)
    for t, h in ordered:
        g.add_edge_ids(t, h, label)
    return g


def assign_zipf_labels(
    g: LabeledGraph, label_count: int, s: float = 2.95, seed: int = 0
) -> LabeledGraph:
    """Redraw every edge label from a Zipf(s) distribution over ranked labels.

    Label ``l1`` is the most frequent; rank k is drawn with probability
    proportional to k^-s.
    """
    if label_count < 1:
        raise ValueError("need at least one label")
    if s <= 0:
        raise ValueError("the Zipf exponent must be positive")
    weights = np.arange(1, label_count + 1, dtype=np.float64) ** -s
    weights /= weights.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(label_count, size=len(g.edges), p=weights)
    out = LabeledGraph()
    out.nodes = g.nodes
    out.labels = NameTable(f"l{k}" for k in range(1, label_count + 1))
    for (tail, head, _), label in zip(g.edges, draws.tolist()):
        out.add_edge_ids(tail, head, label)
    return out


def label_frequencies(g: LabeledGraph) -> list[tuple[str, int]]:
    """(label, edge count) rows, most frequent first."""
    counts = [0] * len(g.labels)
    for _, _, label in g.edges:
        counts[label] += 1
    rows = [(g.labels.names[l], counts[l]) for l in range(len(g.labels))]
    rows.sort(key=lambda row: (-row[1], row[0]))
    return rows


def write_label_frequencies(rows: Iterable[tuple[str, int]], out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(["label", "frequency"])
    for label, frequency in rows:
        writer.writerow([label, frequency])


def _worstcase_labels(length: int) -> list[str]:
    if length > len(string.ascii_lowercase):
        raise ValueError("sequence length beyond 26 is not supported")
    return list(string.ascii_lowercase[:length])


def gen_worstcase(e_param: int, label_seq_len: int = 4) -> LabeledGraph:
    """Ladder family on which a reordered query backtracks edge by edge.

    ``x`` reaches ``e_param`` first-rung nodes, each of which reaches every
    second-rung source through a shared hub, while the later rungs pair up
    one to one; only the rung's own pairing continues toward ``y``, but every
    branch stays inside both endpoints' closures, so the candidate sets never
    shrink below ``e_param`` until the final rung fails.  The in-order label
    sequence is satisfiable; swapping the last two labels is not, and costs
    a number of recursive calls superlinear in ``e_param``.
    """
    if e_param < 1:
        raise ValueError("e_param must be at least 1")
    if label_seq_len < 1:
        raise ValueError("label_seq_len must be at least 1")
    labels = _worstcase_labels(label_seq_len)
    filler = "zz"
    g = LabeledGraph()
    if label_seq_len == 1:
        g.add_edge("x", labels[0], "y")
        return g
    e = e_param
    for i in range(1, e + 1):
        g.add_edge("x", labels[0], "h")
        g.add_edge("h", labels[1], f"n{i}")
        g.add_edge(f"n{i}", filler, "w")
        g.add_edge(f"n{i}", filler, f"p{i}")
    if label_seq_len == 2:
        for i in range(1, e + 1):
            g.add_edge(f"n{i}", filler, "y")
        return g
    rung_names = ["s", "t", "u"] + [f"u{j}" for j in range(4, label_seq_len)]
    for i in range(1, e + 1):
        g.add_edge("w", filler, f"s{i}")
        for j, label in enumerate(labels[2:]):
            g.add_edge(f"{rung_names[j]}{i}", label, f"{rung_names[j + 1]}{i}")
        g.add_edge(f"t{i}", filler, f"p{i}")
        g.add_edge(f"{rung_names[label_seq_len - 2]}{i}", filler, "y")
    return g


def worstcase_queries(label_seq_len: int = 4) -> tuple[LocrQuery, LocrQuery]:
    """The canonical satisfiable query and its failing reordering."""
    labels = _worstcase_labels(label_seq_len)
    success = LocrQuery("x", "y", tuple(labels))
    if label_seq_len < 2:
        return success, LocrQuery("y", "x", tuple(labels))
    swapped = labels[:-2] + [labels[-1], labels[-2]]
    return success, LocrQuery("x", "y", tuple(swapped))


# ---------------------------------------------------------------------------
# path sampling and query synthesis


@dataclass(frozen=True)
class PathSample:
    """A backward-sampled walk: collapsed endpoints plus forward-order labels."""

    start: int
    end: int
    labels: tuple[int, ...]


def sample_paths(
    cg: CollapsedGraph,
    count: int,
    strategy: str = "uniform",
    max_len: int = 30,
    seed: int = 0,
) -> list[PathSample]:
    """Backward walks from uniformly chosen leaves.

    Each step picks a parent uniformly or with weight proportional to the
    parent's topological depth plus one (the deep-parent bias discovers
    longer paths).  A walk stops at a root or after ``max_len`` edges; a
    start that yields no edges is retried up to ten times.
    """
    if strategy not in ("uniform", "topo_weighted"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not cg.leaves:
        raise ValueError("graph has no leaves to start backward walks from")
    if cg.base.edges and all(tail == head for tail, head, _ in cg.base.edges):
        raise ValueError(
            "no backward walks possible: every collapsed edge is a self-edge"
        )
    rng = random.Random(seed)
    paths = []
    for _ in range(count):
        best: PathSample | None = None
        for _ in range(10):
            leaf = rng.choice(cg.leaves)
            node = leaf
            labels_backward: list[int] = []
            while len(labels_backward) < max_len:
                incoming = cg.walk_in[node]
                if not incoming:
                    break
                parents = sorted({tail for tail, _ in incoming})
                if strategy == "topo_weighted":
                    weights = [cg.topo_depth[p] + 1 for p in parents]
                    parent = rng.choices(parents, weights=weights)[0]
                else:
                    parent = rng.choice(parents)
                labels_backward.append(rng.choice([l for t, l in incoming if t == parent]))
                node = parent
            if labels_backward:
                best = PathSample(node, leaf, tuple(reversed(labels_backward)))
                break
            best = PathSample(node, leaf, ())
        paths.append(best)
    return paths


def _query_for(cg: CollapsedGraph, path: PathSample, seq: Sequence[int]) -> LocrQuery:
    names = cg.base.nodes.names
    return LocrQuery(
        names[path.start],
        names[path.end],
        tuple(cg.labels.names[l] for l in seq),
    )


def make_positive(
    cg: CollapsedGraph, path: PathSample, keep_prob: float = 0.5, seed: int = 0
) -> LocrQuery:
    """Keep each path label independently; satisfiable by construction.

    An empty subsequence is re-rolled once, then accepted as a plain
    reachability query.
    """
    if not 0 < keep_prob < 1:
        raise ValueError("keep probability must be strictly between 0 and 1")
    rng = random.Random(seed)
    seq = [l for l in path.labels if rng.random() < keep_prob]
    if not seq and path.labels:
        seq = [l for l in path.labels if rng.random() < keep_prob]
    return _query_for(cg, path, seq)


def make_negative(
    cg: CollapsedGraph,
    path: PathSample,
    seed: int = 0,
    oracle: Oracle | None = None,
    keep_prob: float = 0.5,
) -> LocrQuery | None:
    """Inject a label absent from the path and shuffle; None means discard.

    The endpoints stay reachable (the sampled path connects them), so a kept
    query is reachable-but-unsatisfiable.  The oracle guards against some
    other path satisfying the shuffled sequence by accident.
    """
    rng = random.Random(seed)
    on_path = set(path.labels)
    absent = [l for l in range(len(cg.labels)) if l not in on_path]
    if not absent:
        return None
    seq = [l for l in path.labels if rng.random() < keep_prob]
    seq.append(rng.choice(absent))
    rng.shuffle(seq)
    query = _query_for(cg, path, seq)
    check = oracle if oracle is not None else brute_force_oracle
    if check(cg, query):
        return None
    return query


# ---------------------------------------------------------------------------
# ground truth


def brute_force_oracle(cg: CollapsedGraph, query: LocrQuery) -> bool:
    """Exhaustive (node, matched-count) state search; the ground truth.

    Unlike the production evaluators this enumerates non-greedy matchings
    too: an edge whose label matches the next needed one may also be crossed
    without consuming it, and self-edge labels are consumed one at a time.
    The state space is finite, so the fixpoint is exact.
    """
    if cg.base.edge_count > ORACLE_EDGE_GUARD:
        raise ValueError(
            f"oracle refuses graphs over {ORACLE_EDGE_GUARD} edges "
            f"(got {cg.base.edge_count})"
        )
    x = cg.resolve_node(query.source)
    y = cg.resolve_node(query.destination)
    seq = resolve_labels(cg, query.label_seq)
    if seq is None:
        return False
    k = len(seq)
    self_labels = cg.self_edge_labels
    seen = {(x, 0)}
    stack = [(x, 0)]
    while stack:
        node, matched = stack.pop()
        if node == y and matched == k:
            return True
        moves = []
        if matched < k and seq[matched] in self_labels[node]:
            moves.append((node, matched + 1))
        for head, label in cg.walk_out[node]:
            moves.append((head, matched))
            if matched < k and label == seq[matched]:
                moves.append((head, matched + 1))
        for state in moves:
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return False


def engine_backed_verifier(target: CollapsedGraph | BitPathIndex) -> Oracle:
    """Unsatisfiability checker for graphs past the oracle guard.

    Answers through the engine over the bit-vector index (building it when
    given a bare graph).  The engine must already have passed the
    oracle-equivalence suite; this keeps the negative-query discard rule
    usable at benchmark scale without circular trust at oracle-checkable
    scale.
    """
    idx = target if isinstance(target, BitPathIndex) else build_index(target)

    def check(_: CollapsedGraph, query: LocrQuery) -> bool:
        return evaluate(idx, query).answer

    return check


# ---------------------------------------------------------------------------
# query sets


@dataclass(frozen=True)
class QuerySetEntry:
    query: LocrQuery
    polarity: str  # "pos" | "neg"
    origin_len: int


def generate_query_set(
    cg: CollapsedGraph,
    positives: int,
    negatives: int,
    seed: int = 0,
    keep_prob: float = 0.5,
    strategy: str = "uniform",
    max_len: int = 30,
    oracle: Oracle | None = None,
) -> list[QuerySetEntry]:
    """Sample paths and derive verified positive/negative queries.

    Negatives are verified with the brute-force oracle when the graph is
    small enough, otherwise with the engine-backed verifier.
    """
    if oracle is None:
        oracle = (
            brute_force_oracle
            if cg.base.edge_count <= ORACLE_EDGE_GUARD
            else engine_backed_verifier(cg)
        )
    entries: list[QuerySetEntry] = []
    need_pos, need_neg = positives, negatives
    round_no = 0
    while need_pos > 0 or need_neg > 0:
        if round_no > 200:
            raise RuntimeError("query generation stalled; graph too degenerate")
        batch = max(need_pos + need_neg, 16)
        paths = sample_paths(
            cg, batch, strategy=strategy, max_len=max_len, seed=seed * 1_000_003 + round_no
        )
        for i, path in enumerate(paths):
            item_seed = (seed * 1_000_003 + round_no) * 131_071 + i
            if need_pos > 0:
                query = make_positive(cg, path, keep_prob=keep_prob, seed=item_seed)
                entries.append(QuerySetEntry(query, "pos", len(path.labels)))
                need_pos -= 1
            elif need_neg > 0:
                query = make_negative(
                    cg, path, seed=item_seed, oracle=oracle, keep_prob=keep_prob
                )
                if query is not None:
                    entries.append(QuerySetEntry(query, "neg", len(path.labels)))
                    need_neg -= 1
            else:
                break
        round_no += 1
    return entries


def save_query_set(entries: Iterable[QuerySetEntry], out: TextIO) -> None:
    for entry in entries:
        out.write(f"{entry.query.line()}\t{entry.polarity}\n")


def load_query_set(lines: Iterable[str]) -> list[QuerySetEntry]:
    entries = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4 or fields[3] not in ("pos", "neg"):
            raise ValueError(f"line {lineno}: expected 4th column pos|neg")
        labels = tuple(l for l in fields[2].split(",") if l)
        query = LocrQuery(fields[0], fields[1], labels)
        entries.append(QuerySetEntry(query, fields[3], len(labels)))
    return entries


# ---------------------------------------------------------------------------
# benchmark runner

METHODS: dict[str, Callable[..., QueryResult]] = {
    "bitpath": evaluate,
    "dfs": baselines.dfs_query,
    "fdfs": baselines.fdfs_query,
    "bbfs": baselines.bbfs_query,
}


@dataclass
class LengthStats:
    length: int
    count: int
    mean_ns: float
    stddev_ns: float
    timeouts: int


@dataclass
class BenchReport:
    method: str
    timeout_s: float
    rows: list[LengthStats]

    @property
    def processed(self) -> int:
        return sum(row.count for row in self.rows)

    @property
    def abandoned(self) -> int:
        return sum(row.timeouts for row in self.rows)

    def mean_ns(self) -> float:
        """Overall mean over completed queries (0 when none completed)."""
        total = sum(row.mean_ns * row.count for row in self.rows)
        return total / self.processed if self.processed else 0.0

    def write_csv(self, out: TextIO) -> None:
        writer = csv.writer(out)
        writer.writerow(["method", "length", "count", "mean_ns", "stddev_ns", "timeouts"])
        for row in self.rows:
            writer.writerow(
                [
                    self.method,
                    row.length,
                    row.count,
                    f"{row.mean_ns:.0f}",
                    f"{row.stddev_ns:.0f}",
                    row.timeouts,
                ]
            )


def run_benchmark(
    method: str,
    target: BitPathIndex | CollapsedGraph,
    queries: Sequence[QuerySetEntry] | Sequence[LocrQuery],
    timeout_s: float = 10.0,
) -> BenchReport:
    """Time every query under a cooperative deadline and bucket by length.

    Queries that hit the deadline are abandoned: counted per length but
    excluded from the mean and deviation.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; pick one of {sorted(METHODS)}")
    if timeout_s <= 0:
        raise ValueError("timeout must be positive")
    if method in ("bitpath", "fdfs") and not isinstance(target, BitPathIndex):
        raise TypeError(f"method {method!r} needs a built index, not a bare graph")
    fn = METHODS[method]
    elapsed: dict[int, list[int]] = {}
    timeouts: dict[int, int] = {}
    for item in queries:
        query = item.query if isinstance(item, QuerySetEntry) else item
        length = len(query.label_seq)
        deadline = time.perf_counter_ns() + int(timeout_s * 1e9)
        try:
            result = fn(target, query, deadline_ns=deadline)
        except QueryTimeout:
            timeouts[length] = timeouts.get(length, 0) + 1
            continue
        elapsed.setdefault(length, []).append(result.elapsed_ns)
    rows = []
    for length in sorted(set(elapsed) | set(timeouts)):
        times = elapsed.get(length, [])
        rows.append(
            LengthStats(
                length=length,
                count=len(times),
                mean_ns=statistics.fmean(times) if times else 0.0,
                stddev_ns=statistics.pstdev(times) if times else 0.0,
                timeouts=timeouts.get(length, 0),
            )
        )
    return BenchReport(method=method, timeout_s=timeout_s, rows=rows)
