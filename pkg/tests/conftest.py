from __future__ import annotations

import random
from pathlib import Path

import pytest

from bitpath.graph import LabeledGraph, collapse, load_graph

DATA = Path(__file__).parent / "data"

# Expected answer set for the eleven-node fixture and the (a, b, c) order
# constraint: sources 1-4 reach the c-edges with a then b available first.
FIG1_ABC_PAIRS = {
    ("1", "8"), ("1", "11"), ("2", "8"), ("2", "11"),
    ("3", "8"), ("3", "11"), ("4", "11"), ("4", "8"),
}


@pytest.fixture(scope="session")
def movies_graph():
    return load_graph(str(DATA / "movies.tsv"))


@pytest.fixture(scope="session")
def movies_cg(movies_graph):
    return collapse(movies_graph)


@pytest.fixture(scope="session")
def movies_index(movies_cg):
    from bitpath.index import build_index

    return build_index(movies_cg)


@pytest.fixture(scope="session")
def fig1_graph():
    return load_graph(str(DATA / "fig1.tsv"))


@pytest.fixture(scope="session")
def fig1_cg(fig1_graph):
    return collapse(fig1_graph)


@pytest.fixture(scope="session")
def fig1_index(fig1_cg):
    from bitpath.index import build_index

    return build_index(fig1_cg)


def random_labeled_graph(
    rng: random.Random,
    max_nodes: int = 50,
    max_edges: int = 150,
    max_labels: int = 8,
) -> LabeledGraph:
    """Random directed multigraph, cycles and self-loops included."""
    g = LabeledGraph()
    n = rng.randint(2, max_nodes)
    n_labels = rng.randint(1, max_labels)
    labels = [f"l{i}" for i in range(n_labels)]
    m = rng.randint(1, max_edges)
    for _ in range(m):
        g.add_edge(
            f"v{rng.randrange(n)}",
            rng.choice(labels),
            f"v{rng.randrange(n)}",
        )
    return g


def random_queries(rng: random.Random, g: LabeledGraph, count: int = 10):
    """Mixed query batch: random endpoints, lengths 0-5, path-guided half."""
    from bitpath.engine import LocrQuery

    names = g.nodes.names
    label_names = g.labels.names
    out: list[LocrQuery] = []
    adjacency: dict[int, list[tuple[int, int]]] = {}
    for tail, head, label in g.edges:
        adjacency.setdefault(tail, []).append((head, label))
    for _ in range(count):
        if rng.random() < 0.5 or not g.edges:
            src = rng.choice(names)
            dst = rng.choice(names)
            seq = tuple(rng.choice(label_names) for _ in range(rng.randint(0, 5)))
        else:
            # Walk a real path and subsample its labels: usually satisfiable.
            node = rng.choice(list(adjacency))
            src = names[node]
            seq_ids: list[int] = []
            for _ in range(rng.randint(1, 6)):
                if node not in adjacency:
                    break
                head, label = rng.choice(adjacency[node])
                seq_ids.append(label)
                node = head
            dst = names[node]
            seq = tuple(
                label_names[l] for l in seq_ids if rng.random() < 0.6
            )[:5]
        out.append(LocrQuery(src, dst, seq))
    return out
