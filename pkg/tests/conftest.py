import random
from collections import deque

import pytest

from lobsterctrl.graph import Graph, LobsterSpec, build_lobster

# The 7-vertex benchmark graph used throughout: a star-of-pendants tree
# whose Laplacian, controllability verdicts, and critical sets are all
# known in closed form.
FIG_EDGES = [(1, 2), (2, 3), (2, 4), (4, 5), (4, 6), (4, 7)]


@pytest.fixture
def fig_graph() -> Graph:
    return Graph.from_edges(7, FIG_EDGES)


@pytest.fixture
def p5() -> Graph:
    return build_lobster(LobsterSpec.make(5, [(), (), (), (), ()]))


@pytest.fixture
def k2() -> Graph:
    return Graph.from_edges(2, [(1, 2)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def random_tree(n: int, rng: random.Random) -> Graph:
    """Uniform-ish random tree: each vertex attaches to a random earlier one."""
    edges = [(rng.randint(1, v - 1), v) for v in range(2, n + 1)]
    return Graph.from_edges(n, edges)


def random_connected_graph(n: int, rng: random.Random, extra_edges: int = 0) -> Graph:
    """Random tree plus a few random extra edges."""
    tree = random_tree(n, rng)
    edges = set(tree.edges)
    candidates = [
        (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in edges
    ]
    rng.shuffle(candidates)
    edges.update(candidates[:extra_edges])
    return Graph.from_edges(n, sorted(edges))


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Test-local BFS, independent of the package helpers."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist
