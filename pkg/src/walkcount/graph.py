"""
Simple graphs, proper edge colorings and the two graph families walked on:
complete graphs of even order and complete bipartite graphs K_{n,n}.

Bipartite graphs label V1 as 0..n1-1 and V2 as n1..n1+n2-1.
"""
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import networkx as nx

from .errors import ColoringError, DomainError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SimpleGraph:
    """
    An undirected graph on vertices 0..vertex_count-1 without loops or
    multi-edges.

    :param vertex_count: number of vertices
    :param edges: unordered vertex pairs; stored as (min, max)
    :param parts: partition sizes (n1, n2) when built as a complete bipartite graph
    """
    vertex_count: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    parts: tuple[int, int] | None = None

    def __post_init__(self):
        if self.vertex_count < 1:
            raise DomainError(f"A graph needs at least one vertex, got {self.vertex_count}")
        edges = set()
        for u, v in self.edges:
            if u == v:
                raise DomainError(f"Loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise DomainError(f"Edge ({u}, {v}) outside {self.vertex_count} vertices")
            edges.add(_edge(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(edges))

    def neighbors(self, v: int) -> list[int]:
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def is_regular(self) -> int | None:
        """The common degree, or None when degrees differ"""
        degrees = {self.degree(v) for v in range(self.vertex_count)}
        return degrees.pop() if len(degrees) == 1 else None

    def as_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class ColoredGraph:
    """
    A d-regular graph of even order with an edge coloring in colors 0..d-1.
    The coloring is not required to be proper here; walk spaces check it.
    """
    graph: SimpleGraph
    degree: int
    color: Mapping[Edge, int]
    _by_color: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.graph.vertex_count % 2:
            raise ColoringError(f"Only even-order graphs are colored, got {self.graph.vertex_count} vertices")
        if self.graph.is_regular() != self.degree:
            raise ColoringError(f"Graph is not {self.degree}-regular")
        color = {_edge(*e): int(c) for e, c in self.color.items()}
        if set(color) != set(self.graph.edges):
            raise ColoringError("Every edge needs exactly one color")
        object.__setattr__(self, "color", color)
        by_color: dict[tuple[int, int], int] = {}
        for (u, v), c in sorted(color.items()):
            by_color.setdefault((u, c), v)
            by_color.setdefault((v, c), u)
        object.__setattr__(self, "_by_color", by_color)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def endpoint(self, v: int, c: int) -> int:
        """e_c(v): the neighbor of v along the edge of color c"""
        try:
            return self._by_color[(v, c)]
        except KeyError:
            raise ColoringError(f"Vertex {v} has no incident edge of color {c}") from None

    def color_of(self, u: int, v: int) -> int:
        return self.color[_edge(u, v)]


def complete_bipartite(n1: int, n2: int) -> SimpleGraph:
    if n1 < 1 or n2 < 1:
        raise DomainError(f"Partition sizes must be >= 1, got ({n1}, {n2})")
    edges = frozenset((u, n1 + v) for u in range(n1) for v in range(n2))
    return SimpleGraph(n1 + n2, edges, parts=(n1, n2))


def complete_graph(n: int) -> SimpleGraph:
    if n < 1:
        raise DomainError(f"A graph needs at least one vertex, got {n}")
    return SimpleGraph(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))


def edge_color_bipartite(g: SimpleGraph) -> ColoredGraph:
    """Round-robin 1-factorization of K_{n,n}: color(u, n+v) = (u+v) mod n"""
    if g.parts is None:
        raise ColoringError("Graph was not built as a complete bipartite graph")
    n1, n2 = g.parts
    if n1 != n2:
        raise ColoringError(f"Round-robin coloring needs n1 = n2, got ({n1}, {n2})")
    n = n1
    color = {(u, n + v): (u + v) % n for u in range(n) for v in range(n)}
    return ColoredGraph(g, n, color)


def edge_color_complete_even(g: SimpleGraph) -> ColoredGraph:
    """
    Circle-method 1-factorization of K_n, n even: vertex n-1 sits at the
    center, round r pairs it with r and pairs r+i with r-i (mod n-1).
    """
    n = g.vertex_count
    if n % 2:
        raise ColoringError(f"Odd-order complete graphs are not class 1, got n={n}")
    if len(g.edges) != n * (n - 1) // 2:
        raise ColoringError(f"Graph on {n} vertices is not complete")
    m = n - 1
    color: dict[Edge, int] = {}
    for r in range(m):
        color[_edge(r, n - 1)] = r
        for i in range(1, n // 2):
            color[_edge((r + i) % m, (r - i) % m)] = r
    return ColoredGraph(g, m, color)


def is_properly_colored(cg: ColoredGraph) -> bool:
    seen: dict[int, set[int]] = defaultdict(set)
    for (u, v), c in cg.color.items():
        if not 0 <= c < cg.degree:
            return False
        for w in (u, v):
            if c in seen[w]:
                return False
            seen[w].add(c)
    return True


def color_classes(cg: ColoredGraph) -> dict[int, list[Edge]]:
    classes: dict[int, list[Edge]] = defaultdict(list)
    for e, c in sorted(cg.color.items()):
        classes[c].append(e)
    return dict(sorted(classes.items()))


def is_connected(g: SimpleGraph) -> bool:
    return nx.is_connected(g.as_networkx())


def is_bipartite(g: SimpleGraph) -> bool:
    return nx.is_bipartite(g.as_networkx())


def graph_to_json(g: SimpleGraph | ColoredGraph) -> dict[str, Any]:
    """Edge-list form; colored graphs add a color per edge"""
    if isinstance(g, ColoredGraph):
        data = graph_to_json(g.graph)
        data["degree"] = g.degree
        data["colors"] = [g.color[tuple(e)] for e in data["edges"]]
        return data
    data: dict[str, Any] = {"vertex_count": g.vertex_count, "edges": [list(e) for e in sorted(g.edges)]}
    if g.parts is not None:
        data["parts"] = list(g.parts)
    return data


def graph_from_json(data: Mapping[str, Any]) -> SimpleGraph | ColoredGraph:
    try:
        edges: Iterable[Edge] = [(int(u), int(v)) for u, v in data["edges"]]
        parts = tuple(data["parts"]) if "parts" in data else None
        g = SimpleGraph(int(data["vertex_count"]), frozenset(edges), parts=parts)  # type: ignore[arg-type]
        if "colors" not in data:
            return g
        color = {_edge(u, v): int(c) for (u, v), c in zip(edges, data["colors"], strict=True)}
        return ColoredGraph(g, int(data["degree"]), color)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, DomainError | ColoringError):
            raise
        raise DomainError(f"Malformed graph JSON: {e}") from e


def save_graph(g: SimpleGraph | ColoredGraph, path: str | Path):
    with open(path, "w") as f:
        json.dump(graph_to_json(g), f, indent=2)
    logger.info("Saved graph with %d vertices to %s", g.vertex_count, path)


def load_graph(path: str | Path) -> SimpleGraph | ColoredGraph:
    with open(path) as f:
        return graph_from_json(json.load(f))
