"""Competitive traversal baselines sharing the engine's query semantics.

All three methods run on the collapsed graph: plain directed DFS with the
walk direction chosen by endpoint degrees, the same DFS focused by per-node
reachability lookups in the bit-vector indexes, and a bidirectional BFS that
tracks the best matched prefix/suffix per node.  Traversal states are
(node, matched-count) pairs; self-edges are consumed in place, never walked.
"""

from __future__ import annotations

import time
from collections.abc import Container, Sequence
from typing import Callable

from .bitvec import intersect
from .engine import LocrQuery, QueryResult, QueryTimeout, resolve_labels, same_node_answer
from .graph import CollapsedGraph
from .index import BitPathIndex


def consume_self_loops(
    self_labels: Container[int], seq: Sequence[int], consumed: int
) -> int:
    """Advance past every next-needed label available as a self-edge.

    Inside a collapsed component labels may repeat and reorder freely, so a
    run of needed labels is consumable as long as each one is present.
    """
    k = len(seq)
    while consumed < k and seq[consumed] in self_labels:
        consumed += 1
    return consumed


def _graph_of(target: BitPathIndex | CollapsedGraph) -> CollapsedGraph:
    return target.graph_ref if isinstance(target, BitPathIndex) else target


def _prepare(cg: CollapsedGraph, query: LocrQuery):
    """Shared endpoint/label resolution; returns an early answer or a plan."""
    x = cg.resolve_node(query.source)
    y = cg.resolve_node(query.destination)
    seq = resolve_labels(cg, query.label_seq)
    if seq is None:
        return False, None
    if x == y:
        return same_node_answer(cg, x, seq), None
    return None, (x, y, seq)


class _Deadline:
    __slots__ = ("at",)

    def __init__(self, deadline_ns: int | None):
        self.at = deadline_ns

    def check(self) -> None:
        if self.at is not None and time.perf_counter_ns() > self.at:
            raise QueryTimeout


def _directed_dfs(
    cg: CollapsedGraph,
    start: int,
    target: int,
    seq: tuple[int, ...],
    forward: bool,
    deadline: _Deadline,
    keep_node: Callable[[int], bool] | None = None,
) -> tuple[bool, int]:
    """DFS over (node, consumed) states; returns (answer, states expanded).

    ``keep_node`` is the focused variant's hook: nodes it rejects are never
    expanded.
    """
    adjacency = cg.walk_out if forward else cg.walk_in
    self_labels = cg.self_edge_labels
    k = len(seq)
    visited: set[tuple[int, int]] = set()
    expanded = 0
    stack = [(start, 0)]
    while stack:
        deadline.check()
        node, consumed = stack.pop()
        consumed = consume_self_loops(self_labels[node], seq, consumed)
        state = (node, consumed)
        if state in visited:
            continue
        if keep_node is not None and not keep_node(node):
            continue
        visited.add(state)
        expanded += 1
        if node == target and consumed == k:
            return True, expanded
        for other, label in adjacency[node]:
            advanced = consumed + 1 if consumed < k and label == seq[consumed] else consumed
            if (other, advanced) not in visited:
                stack.append((other, advanced))
    return False, expanded


def dfs_query(
    target: BitPathIndex | CollapsedGraph,
    query: LocrQuery,
    deadline_ns: int | None = None,
) -> QueryResult:
    """Optimized DFS: walk forward from the source when its out-degree does
    not exceed the destination's in-degree, otherwise walk the reversed
    graph from the destination with the label order reversed."""
    cg = _graph_of(target)
    start_ns = time.perf_counter_ns()
    answer, plan = _prepare(cg, query)
    expanded = 0
    if plan is not None:
        x, y, seq = plan
        deadline = _Deadline(deadline_ns)
        if cg.out_degree[x] <= cg.in_degree[y]:
            answer, expanded = _directed_dfs(cg, x, y, seq, True, deadline)
        else:
            answer, expanded = _directed_dfs(cg, y, x, seq[::-1], False, deadline)
    return QueryResult(answer, visited=expanded, elapsed_ns=time.perf_counter_ns() - start_ns)


def fdfs_query(
    idx: BitPathIndex,
    query: LocrQuery,
    deadline_ns: int | None = None,
) -> QueryResult:
    """Focused DFS: prune any node from which the fixed endpoint is no longer
    reachable, deciding reachability by one successor/predecessor index
    intersection per node and caching the bit."""
    if not isinstance(idx, BitPathIndex):
        raise TypeError("focused DFS needs the bit-vector indexes")
    cg = idx.graph_ref
    start_ns = time.perf_counter_ns()
    answer, plan = _prepare(cg, query)
    expanded = 0
    intersections = 0
    if plan is not None:
        x, y, seq = plan
        deadline = _Deadline(deadline_ns)
        cache: dict[int, bool] = {}
        forward = cg.out_degree[x] <= cg.in_degree[y]

        def keep(node: int) -> bool:
            nonlocal intersections
            bit = cache.get(node)
            if bit is None:
                if forward:
                    bit = node == y or intersect(idx.n_succ_e[node], idx.n_pred_e[y]).ones_count > 0
                else:
                    bit = node == x or intersect(idx.n_succ_e[x], idx.n_pred_e[node]).ones_count > 0
                intersections += 1
                cache[node] = bit
            return bit

        if forward:
            answer, expanded = _directed_dfs(cg, x, y, seq, True, deadline, keep)
        else:
            answer, expanded = _directed_dfs(cg, y, x, seq[::-1], False, deadline, keep)
    return QueryResult(
        answer,
        intersections=intersections,
        visited=expanded,
        elapsed_ns=time.perf_counter_ns() - start_ns,
    )


def bbfs_query(
    target: BitPathIndex | CollapsedGraph,
    query: LocrQuery,
    deadline_ns: int | None = None,
) -> QueryResult:
    """Bidirectional BFS with per-node best prefix/suffix match counts.

    The forward frontier tracks how many leading labels a node has seen, the
    reverse frontier how many trailing ones; a node is re-enqueued only when
    its best count strictly improves, and the sides alternate expanding the
    smaller frontier.  Any node whose prefix and suffix cover the whole
    sequence witnesses a satisfying walk.
    """
    cg = _graph_of(target)
    start_ns = time.perf_counter_ns()
    answer, plan = _prepare(cg, query)
    expanded = 0
    if plan is not None:
        x, y, seq = plan
        answer, expanded = _bbfs(cg, x, y, seq, _Deadline(deadline_ns))
    return QueryResult(answer, visited=expanded, elapsed_ns=time.perf_counter_ns() - start_ns)


def _bbfs(
    cg: CollapsedGraph,
    x: int,
    y: int,
    seq: tuple[int, ...],
    deadline: _Deadline,
) -> tuple[bool, int]:
    k = len(seq)
    rev_seq = seq[::-1]
    self_labels = cg.self_edge_labels
    best_prefix = {x: consume_self_loops(self_labels[x], seq, 0)}
    best_suffix = {y: consume_self_loops(self_labels[y], rev_seq, 0)}
    forward_frontier = [x]
    reverse_frontier = [y]
    expanded = 0
    while forward_frontier or reverse_frontier:
        go_forward = bool(forward_frontier) and (
            not reverse_frontier or len(forward_frontier) <= len(reverse_frontier)
        )
        frontier = forward_frontier if go_forward else reverse_frontier
        best = best_prefix if go_forward else best_suffix
        other_best = best_suffix if go_forward else best_prefix
        needle = seq if go_forward else rev_seq
        adjacency = cg.walk_out if go_forward else cg.walk_in
        next_frontier: list[int] = []
        for node in frontier:
            deadline.check()
            expanded += 1
            count = best[node]
            for other, label in adjacency[node]:
                advanced = count + 1 if count < k and label == needle[count] else count
                advanced = consume_self_loops(self_labels[other], needle, advanced)
                if advanced > best.get(other, -1):
                    best[other] = advanced
                    opposite = other_best.get(other)
                    if opposite is not None and advanced + opposite >= k:
                        return True, expanded
                    next_frontier.append(other)
        if go_forward:
            forward_frontier = next_frontier
        else:
            reverse_frontier = next_frontier
    return False, expanded
