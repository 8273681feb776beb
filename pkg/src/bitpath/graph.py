"""Edge-labeled directed graphs and their condensation.

Graphs are parsed from tab-separated edge lists into dense node/label
dictionaries, condensed by collapsing strongly connected components into
single nodes (keeping each collapsed edge label as a self-edge), and
annotated with longest-path topological depths.
"""

from __future__ import annotations

from typing import Iterable


class ParseError(ValueError):
    """Malformed edge-list input."""


class CycleError(ValueError):
    """A non-self cycle survived condensation; the collapse is broken."""


class UnknownNodeError(KeyError):
    """Query endpoint not present in the node dictionary."""

    def __str__(self) -> str:  # KeyError quotes its payload; keep the message readable
        return self.args[0]


class NameTable:
    """Dense string<->id dictionary, ids assigned in first-appearance order."""

    __slots__ = ("names", "ids")

    def __init__(self, names: Iterable[str] = ()):
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> int:
        existing = self.ids.get(name)
        if existing is not None:
            return existing
        new_id = len(self.names)
        self.ids[name] = new_id
        self.names.append(name)
        return new_id

    def get(self, name: str) -> int | None:
        return self.ids.get(name)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.ids


class LabeledGraph:
    """Directed graph with dictionary-encoded nodes and edge labels.

    Edges are (tail, head, label) id triples; exact duplicates are dropped,
    parallel edges with distinct labels are kept.
    """

    def __init__(self):
        self.nodes = NameTable()
        self.labels = NameTable()
        self.edges: list[tuple[int, int, int]] = []
        self._edge_set: set[tuple[int, int, int]] = set()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def label_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def add_edge(self, tail: str, label: str, head: str) -> bool:
        """Register a named edge; returns False for an exact duplicate."""
        return self.add_edge_ids(self.nodes.add(tail), self.nodes.add(head), self.labels.add(label))

    def add_edge_ids(self, tail: int, head: int, label: int) -> bool:
        triple = (tail, head, label)
        if triple in self._edge_set:
            return False
        self._edge_set.add(triple)
        self.edges.append(triple)
        return True


def parse_edge_list(lines: Iterable[str]) -> LabeledGraph:
    """Parse `tail<TAB>label<TAB>head` lines; `#` starts a comment line."""
    g = LabeledGraph()
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        g.add_edge(fields[0], fields[1], fields[2])
    return g


def load_graph(path: str) -> LabeledGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def save_graph(g: LabeledGraph, path: str) -> None:
    """Write the edge list in the tab-separated input format."""
    with open(path, "w", encoding="utf-8") as fh:
        for tail, head, label in g.edges:
            fh.write(f"{g.nodes.names[tail]}\t{g.labels.names[label]}\t{g.nodes.names[head]}\n")


def find_sccs(g: LabeledGraph) -> list[int]:
    """Tarjan's strongly connected components, iteratively.

    Returns a component id per node; two nodes share an id iff each reaches
    the other.  The explicit stack keeps very deep graphs from blowing the
    interpreter recursion limit.
    """
    n = g.node_count
    adj: list[list[int]] = [[] for _ in range(n)]
    for tail, head, _ in g.edges:
        adj[tail].append(head)

    UNVISITED = -1
    index = [UNVISITED] * n
    lowlink = [0] * n
    on_stack = [False] * n
    comp = [UNVISITED] * n
    stack: list[int] = []
    counter = 0
    comp_count = 0

    for start in range(n):
        if index[start] != UNVISITED:
            continue
        # (node, next-successor position) frames emulate the recursion.
        frames = [(start, 0)]
        while frames:
            v, i = frames.pop()
            if i == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while i < len(adj[v]):
                w = adj[v][i]
                i += 1
                if index[w] == UNVISITED:
                    frames.append((v, i))
                    frames.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            if lowlink[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = comp_count
                    if w == v:
                        break
                comp_count += 1
            if frames:
                parent = frames[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return comp


class CollapsedGraph:
    """SCC condensation: a DAG except for label-preserving self-edges.

    Keeps the original node dictionary for query resolution, the total
    scc_map from original to collapsed ids, per-node self-edge label sets,
    and longest-path topological depths.
    """

    def __init__(self, orig_nodes: NameTable, base: LabeledGraph, scc_map: list[int], multi_scc_count: int):
        self.orig_nodes = orig_nodes
        self.base = base
        self.scc_map = scc_map
        self.multi_scc_count = multi_scc_count

        n = base.node_count
        self.self_edge_labels: list[frozenset[int]] = [frozenset()] * n
        self_sets: list[set[int]] = [set() for _ in range(n)]
        out_deg = [0] * n
        in_deg = [0] * n
        # Adjacency sorted by (label, other) pins the edge-id assignment order.
        out_sorted: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        in_sorted: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        walk_out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        walk_in: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for tail, head, label in base.edges:
            out_deg[tail] += 1
            in_deg[head] += 1
            out_sorted[tail].append((label, head))
            in_sorted[head].append((label, tail))
            if tail == head:
                self_sets[tail].add(label)
            else:
                walk_out[tail].append((head, label))
                walk_in[head].append((tail, label))
        for v in range(n):
            out_sorted[v].sort()
            in_sorted[v].sort()
            walk_out[v].sort(key=lambda e: (e[1], e[0]))
            walk_in[v].sort(key=lambda e: (e[1], e[0]))
            self.self_edge_labels[v] = frozenset(self_sets[v])
        self.out_degree = out_deg
        self.in_degree = in_deg
        self.out_edges_sorted = out_sorted
        self.in_edges_sorted = in_sorted
        self.walk_out = walk_out
        self.walk_in = walk_in
        self.has_self_edges = any(self_sets[v] for v in range(n))
        self.roots = [v for v in range(n) if not walk_in[v]]
        self.leaves = [v for v in range(n) if not walk_out[v]]
        self.topo_depth = compute_topo_depth(self)

    @property
    def labels(self) -> NameTable:
        return self.base.labels

    @property
    def node_count(self) -> int:
        return self.base.node_count

    @property
    def edge_count(self) -> int:
        return self.base.edge_count

    def resolve_node(self, name: str) -> int:
        """Original node name -> collapsed node id."""
        orig = self.orig_nodes.get(name)
        if orig is None:
            raise UnknownNodeError(f"unknown node: {name!r}")
        return self.scc_map[orig]


def collapse_sccs(g: LabeledGraph, sccs: list[int]) -> CollapsedGraph:
    """Condense each component to one node.

    Every intra-component edge label survives as a self-edge on the collapsed
    node (at most once per label); inter-component edges are re-targeted and
    deduplicated.  Collapsed ids are ranked by smallest original member, so a
    DAG collapses to itself with an identity scc_map.
    """
    members: dict[int, int] = {}  # component id -> smallest original member
    sizes: dict[int, int] = {}
    for node, comp in enumerate(sccs):
        if comp not in members:
            members[comp] = node
        sizes[comp] = sizes.get(comp, 0) + 1
    order = sorted(members, key=members.get)
    collapsed_id = {comp: i for i, comp in enumerate(order)}

    base = LabeledGraph()
    for comp in order:
        base.nodes.add(g.nodes.names[members[comp]])
    base.labels = g.labels
    scc_map = [collapsed_id[comp] for comp in sccs]
    for tail, head, label in g.edges:
        base.add_edge_ids(scc_map[tail], scc_map[head], label)
    multi = sum(1 for comp in order if sizes[comp] > 1)
    return CollapsedGraph(g.nodes, base, scc_map, multi)


def collapse(g: LabeledGraph) -> CollapsedGraph:
    return collapse_sccs(g, find_sccs(g))


def compute_topo_depth(cg: CollapsedGraph) -> list[int]:
    """Longest-path depth per node, inflated by self-edge label counts.

    A node's depth counts the most edges on any root-to-node path, plus the
    number of distinct self-edge labels at each node along the way (its own
    included): each such label can extend a path by one traversal.
    """
    n = cg.base.node_count
    indeg = [len(cg.walk_in[v]) for v in range(n)]
    depth = [len(cg.self_edge_labels[v]) for v in range(n)]
    queue = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while queue:
        next_queue: list[int] = []
        for u in queue:
            seen += 1
            for v, _ in cg.walk_out[u]:
                if depth[u] + 1 + len(cg.self_edge_labels[v]) > depth[v]:
                    depth[v] = depth[u] + 1 + len(cg.self_edge_labels[v])
                indeg[v] -= 1
                if indeg[v] == 0:
                    next_queue.append(v)
        queue = next_queue
    if seen != n:
        raise CycleError("non-self cycle in collapsed graph; condensation is broken")
    return depth
