"""Order-constrained reachability evaluation over the bit-vector indexes.

A query (source, destination, label sequence) asks whether some walk between
the endpoints carries the labels as a subsequence.  Evaluation intersects
the source's successor edges, the destination's predecessor edges, and one
per-label edge set; the position whose candidate set is smallest splits the
sequence, and the two halves recurse over each candidate edge.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bitvec import CompressedBitVector, intersect
from .graph import CollapsedGraph, UnknownNodeError
from .index import BitPathIndex

SPLIT_POLICIES = ("greedy", "fixed")


class QueryTimeout(Exception):
    """Cooperative deadline expired inside an evaluation loop."""


@dataclass(frozen=True)
class LocrQuery:
    """Endpoints by original node name plus the ordered label constraint."""

    source: str
    destination: str
    label_seq: tuple[str, ...] = ()

    def line(self) -> str:
        return f"{self.source}\t{self.destination}\t{','.join(self.label_seq)}"

    @classmethod
    def from_line(cls, line: str) -> "LocrQuery":
        fields = line.rstrip("\n").split("\t")
        if len(fields) == 2:
            fields.append("")
        if len(fields) < 3:
            raise ValueError(f"query line needs source, destination, labels: {line!r}")
        labels = tuple(l for l in fields[2].split(",") if l)
        return cls(fields[0], fields[1], labels)


@dataclass
class QueryResult:
    answer: bool
    dnc_calls: int = 0
    intersections: int = 0
    elapsed_ns: int = 0
    visited: int = 0

    @property
    def verdict(self) -> str:
        return "YES" if self.answer else "NO"

    def line(self) -> str:
        return f"{self.verdict}\t{self.elapsed_ns}\t{self.dnc_calls}\t{self.intersections}"


def _check_node(idx: BitPathIndex, node: int) -> None:
    if not 0 <= node < idx.graph_ref.base.node_count:
        raise UnknownNodeError(f"unknown collapsed node id {node}")


def reachable(idx: BitPathIndex, x: int, y: int) -> bool:
    """True iff y is reachable from x (reflexively) on the collapsed graph."""
    _check_node(idx, x)
    _check_node(idx, y)
    if x == y:
        return True
    return intersect(idx.n_succ_e[x], idx.n_pred_e[y]).ones_count > 0


@dataclass
class _Run:
    """Mutable per-evaluation state: counters, policy, optional deadline."""

    idx: BitPathIndex
    split_policy: str = "greedy"
    deadline_ns: int | None = None
    dnc_calls: int = 0
    intersections: int = 0
    _label_cache: dict = field(default_factory=dict)

    def check_deadline(self) -> None:
        if self.deadline_ns is not None and time.perf_counter_ns() > self.deadline_ns:
            raise QueryTimeout

    def candidates(
        self, x: int, y: int, seq: tuple[int, ...]
    ) -> tuple[CompressedBitVector, int]:
        """Candidate edge set and split position for a non-empty sequence."""
        idx = self.idx
        base = intersect(idx.n_succ_e[x], idx.n_pred_e[y])
        if self.split_policy == "fixed":
            self.intersections += 1
            return intersect(base, idx.el_id[seq[0]]), 0
        best = None
        best_pos = 0
        cache: dict[int, CompressedBitVector] = {}
        for pos, label in enumerate(seq):
            vec = cache.get(label)
            if vec is None:
                vec = intersect(base, idx.el_id[label])
                cache[label] = vec
                self.intersections += 1
            if best is None or vec.ones_count < best.ones_count:
                best = vec
                best_pos = pos
        return best, best_pos

    def divide_and_conquer(self, x: int, y: int, seq: tuple[int, ...]) -> bool:
        self.dnc_calls += 1
        self.check_deadline()
        idx = self.idx
        cg = idx.graph_ref
        # Length pruning by topological depth is only sound when no node can
        # soak up extra labels through self-edges (labels there may repeat
        # without bound, which no static depth can budget for).
        if not cg.has_self_edges and cg.topo_depth[y] - cg.topo_depth[x] < len(seq):
            return False
        if not seq:
            if x == y:
                return True
            return intersect(idx.n_succ_e[x], idx.n_pred_e[y]).ones_count > 0
        min_edges, split_pos = self.candidates(x, y, seq)
        if min_edges.ones_count == 0:
            return False
        if len(seq) == 1:
            return True
        left, right = seq[:split_pos], seq[split_pos + 1 :]
        for pos in min_edges.iter_ones():
            tail, head, _ = idx.eid_edges[pos]
            # An empty side is already witnessed: the candidate edge sits in
            # both endpoints' closures, so the plain reachability holds.
            if left and not self.divide_and_conquer(x, tail, left):
                continue
            if not right or self.divide_and_conquer(head, y, right):
                return True
        return False


def greedy_pruning(
    idx: BitPathIndex, x: int, y: int, label_seq: tuple[int, ...]
) -> tuple[CompressedBitVector, int]:
    """Smallest candidate edge set over the sequence and its position.

    Cardinalities are evaluated once per distinct label; ties go to the
    smallest position.  An empty result is a legitimate dead end.
    """
    _check_node(idx, x)
    _check_node(idx, y)
    if not label_seq:
        raise ValueError("greedy pruning needs a non-empty label sequence")
    return _Run(idx).candidates(x, y, label_seq)


def divide_and_conquer(
    idx: BitPathIndex,
    x: int,
    y: int,
    label_seq: tuple[int, ...],
    split_policy: str = "greedy",
) -> bool:
    _check_node(idx, x)
    _check_node(idx, y)
    return _Run(idx, split_policy=split_policy).divide_and_conquer(x, y, tuple(label_seq))


def resolve_labels(cg: CollapsedGraph, label_seq: tuple[str, ...]) -> tuple[int, ...] | None:
    """Label names to ids; None when any label is absent from the dictionary
    (nothing can ever carry it, so the query is a NO, not an error)."""
    ids = []
    for name in label_seq:
        label = cg.labels.get(name)
        if label is None:
            return None
        ids.append(label)
    return tuple(ids)


def same_node_answer(cg: CollapsedGraph, z: int, seq: tuple[int, ...]) -> bool:
    """Endpoints inside one component: every needed label must be available
    as a self-edge; order and repetition are free within the component."""
    have = cg.self_edge_labels[z]
    return all(label in have for label in seq)


def evaluate(
    idx: BitPathIndex,
    query: LocrQuery,
    split_policy: str = "greedy",
    deadline_ns: int | None = None,
) -> QueryResult:
    """Answer one query, filling instrumentation counters.

    Unknown endpoint names raise; unknown labels answer NO.  Raises
    QueryTimeout when the deadline passes mid-evaluation.
    """
    if split_policy not in SPLIT_POLICIES:
        raise ValueError(f"split policy must be one of {SPLIT_POLICIES}")
    cg = idx.graph_ref
    start = time.perf_counter_ns()
    x = cg.resolve_node(query.source)
    y = cg.resolve_node(query.destination)
    seq = resolve_labels(cg, query.label_seq)
    if seq is None:
        return QueryResult(False, elapsed_ns=time.perf_counter_ns() - start)
    if x == y:
        answer = same_node_answer(cg, x, seq)
        return QueryResult(answer, elapsed_ns=time.perf_counter_ns() - start)
    run = _Run(idx, split_policy=split_policy, deadline_ns=deadline_ns)
    answer = run.divide_and_conquer(x, y, seq)
    return QueryResult(
        answer,
        dnc_calls=run.dnc_calls,
        intersections=run.intersections,
        elapsed_ns=time.perf_counter_ns() - start,
    )
