"""
Finite d-out-regular digraphs and the families the walk laboratory runs on:
edge-list files, non-backtracking lifts of regular graphs, Cayley digraphs
of permutation groups and seeded random regular lifts.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import sparse

from src.config import get_settings
from src.errors import CapExceededError, DomainError, GraphFormatError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetryHint:
    """What is known about the automorphism group acting on the vertices."""

    vertex_transitive: bool = False
    orbit_count: int = 1
    representatives: Tuple[int, ...] = (0,)


class Digraph:
    """
    A digraph in which every vertex has exactly d out-neighbors (multi-edges allowed).

    The neighbor table is read-only; derived operators are computed lazily
    and cached.
    """

    def __init__(
        self,
        out_neighbors,
        label: str = "digraph",
        symmetry_hint: Optional[SymmetryHint] = None,
    ):
        table = np.array(out_neighbors, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] == 0:
            raise GraphFormatError(f"{label}: need an (n, d) neighbor table with n, d >= 1")
        n = table.shape[0]
        bad = np.argwhere((table < 0) | (table >= n))
        if len(bad):
            v, j = bad[0]
            raise GraphFormatError(f"{label}: vertex {v} points to out-of-range id {table[v, j]}")
        table.setflags(write=False)
        self.out_neighbors = table
        self.label = label
        self.symmetry_hint = symmetry_hint

    @property
    def n(self) -> int:
        return self.out_neighbors.shape[0]

    @property
    def d(self) -> int:
        return self.out_neighbors.shape[1]

    def __repr__(self) -> str:
        return f"Digraph({self.label!r}, n={self.n}, d={self.d})"

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """A[x, y] = number of arcs x -> y."""
        rows = np.repeat(np.arange(self.n), self.d)
        data = np.ones(rows.size)
        return sparse.coo_matrix(
            (data, (rows, self.out_neighbors.ravel())), shape=(self.n, self.n)
        ).tocsr()

    @cached_property
    def transition(self) -> sparse.csr_matrix:
        """Row-stochastic T = A / d."""
        return (self.adjacency / self.d).tocsr()

    @cached_property
    def forward(self) -> sparse.csr_matrix:
        """T transposed: pushes a distribution one step along the arcs."""
        return self.transition.T.tocsr()

    @cached_property
    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.out_neighbors.ravel(), minlength=self.n)

    @property
    def is_vertex_transitive(self) -> bool:
        return bool(self.symmetry_hint and self.symmetry_hint.vertex_transitive)

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((x, int(y)) for x in range(self.n) for y in self.out_neighbors[x])
        return g


def _parse_pair(line: str, lineno: int) -> Tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise GraphFormatError(f"line {lineno}: expected 'src dst', got {line!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphFormatError(f"line {lineno}: non-integer vertex id in {line!r}")


def _content_lines(lines: Iterable[str]):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def from_edge_list(lines: Iterable[str], n: Optional[int] = None, label: str = "edge-list") -> Digraph:
    """
    Build a digraph from "src dst" lines.

    Args:
        lines: Edge lines with 0-indexed ids; blank lines and '#' comments are skipped
        n: Vertex count; inferred as max id + 1 when omitted
        label: Graph id used in reports

    Returns:
        Digraph with d inferred from the out-degrees; repeated lines are multi-edges
    """
    edges = [_parse_pair(line, lineno) for lineno, line in _content_lines(lines)]
    return _from_edges(edges, n, label)


def _from_edges(edges: List[Tuple[int, int]], n: Optional[int], label: str) -> Digraph:
    if not edges:
        raise GraphFormatError(f"{label}: empty edge list")
    top = max(max(u, v) for u, v in edges)
    low = min(min(u, v) for u, v in edges)
    if low < 0:
        raise GraphFormatError(f"{label}: negative vertex id {low}")
    if n is None:
        n = top + 1
    elif top >= n:
        raise GraphFormatError(f"{label}: vertex id {top} out of range for n = {n}")

    out: List[List[int]] = [[] for _ in range(n)]
    for u, v in edges:
        out[u].append(v)
    d = len(out[0])
    for v, nbrs in enumerate(out):
        if len(nbrs) != d:
            raise GraphFormatError(
                f"{label}: vertex {v} has out-degree {len(nbrs)}, vertex 0 has {d}"
            )
    return Digraph(out, label=label)


def read_graph_file(path: Union[str, Path]) -> Digraph:
    """
    Read the `n d` header format followed by one `src dst` line per arc.

    Args:
        path: Graph file

    Returns:
        Digraph labelled with the file stem
    """
    path = Path(path)
    if not path.exists():
        raise GraphFormatError(f"graph file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        content = list(_content_lines(f))
    if not content:
        raise GraphFormatError(f"{path}: empty graph file")
    lineno, header = content[0]
    n, d = _parse_pair(header, lineno)
    edges = [_parse_pair(line, ln) for ln, line in content[1:]]
    g = _from_edges(edges, n, path.stem)
    if g.d != d:
        raise GraphFormatError(f"{path}: header says d = {d}, edges give d = {g.d}")
    logger.info("Read %s from %s", g, path)
    return g


def write_graph_file(g: Digraph, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{g.n} {g.d}\n")
        for x in range(g.n):
            for y in g.out_neighbors[x]:
                f.write(f"{x} {int(y)}\n")


def nonbacktracking_lift(
    graph: nx.Graph,
    arc_transitive: bool = False,
    label: Optional[str] = None,
) -> Digraph:
    """
    Directed-edge digraph of a k-regular graph.

    Vertices are the arcs (u, v) in sorted order; the out-neighbors of
    (u, v) are the arcs (v, w) with w != u.

    Args:
        graph: Undirected k-regular simple graph
        arc_transitive: Mark the lift vertex-transitive (true for Petersen, K4, ...)
        label: Graph id; defaults to "nb-<graph name>"

    Returns:
        Digraph with n' = n k vertices and d = k - 1
    """
    if graph.is_directed() or graph.is_multigraph():
        raise GraphFormatError("non-backtracking lift needs a simple undirected graph")
    degrees = {deg for _, deg in graph.degree()}
    if len(degrees) != 1:
        raise GraphFormatError(f"non-regular input graph (degrees {sorted(degrees)})")
    (k,) = degrees
    if k < 2:
        raise DomainError(f"degree {k} lift has no outgoing moves")
    if k == 2:
        logger.warning("k = 2 lift is a union of directed cycles; walks do not branch")

    order = {node: i for i, node in enumerate(graph.nodes())}
    arcs = sorted(
        (order[u], order[v]) for a, b in graph.edges() for u, v in ((a, b), (b, a))
    )
    index = {arc: i for i, arc in enumerate(arcs)}
    nbrs: Dict[int, List[int]] = {}
    for u, v in arcs:
        nbrs.setdefault(u, []).append(v)

    table = [[index[(v, w)] for w in nbrs[v] if w != u] for u, v in arcs]
    hint = SymmetryHint(vertex_transitive=True) if arc_transitive else None
    name = label or f"nb-{graph.name or 'graph'}"
    return Digraph(table, label=name, symmetry_hint=hint)


def read_undirected_graph(path: Union[str, Path]) -> nx.Graph:
    """Undirected "u v" edge list (integer ids) for non-backtracking lifts."""
    path = Path(path)
    if not path.exists():
        raise GraphFormatError(f"graph file not found: {path}")
    try:
        graph = nx.read_edgelist(path, nodetype=int, comments="#")
    except (TypeError, ValueError) as e:
        raise GraphFormatError(f"{path}: {e}")
    if graph.number_of_edges() == 0:
        raise GraphFormatError(f"{path}: empty edge list")
    graph.name = path.stem
    return graph


def random_regular_lift(n: int, k: int, seed: int) -> Digraph:
    """NB lift of networkx.random_regular_graph(k, n, seed); the seed is part of the id."""
    if n * k % 2:
        raise DomainError(f"n * k must be even, got n = {n}, k = {k}")
    graph = nx.random_regular_graph(k, n, seed=seed)
    return nonbacktracking_lift(graph, label=f"rr-n{n}-k{k}-s{seed}")


def girth(graph: nx.Graph) -> float:
    """Length of the shortest cycle (math.inf for a forest)."""
    best = math.inf
    for root in graph.nodes():
        dist = {root: 0}
        parent = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in graph.neighbors(u):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def _array_form(generator, degree: Optional[int] = None) -> Tuple[int, ...]:
    if hasattr(generator, "array_form"):
        form = list(generator.array_form)
        if degree is not None and len(form) < degree:
            form += list(range(len(form), degree))
        return tuple(form)
    return tuple(int(i) for i in generator)


def cayley_digraph(generators: Sequence, cap: Optional[int] = None, label: str = "cayley") -> Digraph:
    """
    Right Cayley digraph of the group generated by permutations.

    Args:
        generators: Multiset of permutations (index sequences or sympy Permutations)
        cap: Maximum group size; defaults to the configured closure cap
        label: Graph id

    Returns:
        Digraph on the closure from the identity (BFS order), arcs g -> g s
    """
    if not generators:
        raise DomainError("need at least one generator")
    degree = max(
        len(g.array_form) if hasattr(g, "array_form") else len(g) for g in generators
    )
    gens = [_array_form(g, degree) for g in generators]
    for s in gens:
        if len(s) != degree or sorted(s) != list(range(degree)):
            raise DomainError(f"generator {s} is not a permutation of {degree} points")
    cap = cap or get_settings().closure_cap

    identity = tuple(range(degree))
    index = {identity: 0}
    elements = [identity]
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = tuple(g[j] for j in s)
            if h not in index:
                if len(index) >= cap:
                    raise CapExceededError(f"{label}: group closure exceeds cap {cap}")
                index[h] = len(elements)
                elements.append(h)
                queue.append(h)

    table = [[index[tuple(g[j] for j in s)] for s in gens] for g in elements]
    logger.info("%s: closure has %d elements", label, len(elements))
    return Digraph(table, label=label, symmetry_hint=SymmetryHint(vertex_transitive=True))


def linear_action_generators(matrices: Sequence[Sequence[Sequence[int]]], p: int) -> List[Tuple[int, ...]]:
    """
    Permutations of F_p^2 minus zero induced by 2x2 matrices.

    Args:
        matrices: Invertible integer matrices, reduced mod p
        p: Prime

    Returns:
        One permutation per matrix, on the nonzero vectors in lexicographic order
    """
    vectors = [v for v in product(range(p), repeat=2) if v != (0, 0)]
    index = {v: i for i, v in enumerate(vectors)}
    perms = []
    for m in matrices:
        (a, b), (c, d) = m
        if (a * d - b * c) % p == 0:
            raise DomainError(f"matrix {m} is singular mod {p}")
        perms.append(tuple(index[((a * x + b * y) % p, (c * x + d * y) % p)] for x, y in vectors))
    return perms


def parse_cayley_spec(text: str, cap: Optional[int] = None) -> Digraph:
    """
    Build a Cayley digraph from "cyclic:N", "symmetric:N" or "sl2:P".

    Args:
        text: Family and size separated by a colon
        cap: Closure cap override

    Returns:
        Cayley digraph labelled with the spec string
    """
    kind, _, arg = text.partition(":")
    try:
        size = int(arg)
    except ValueError:
        raise DomainError(f"bad Cayley spec {text!r}; expected e.g. cyclic:5")
    if kind == "cyclic":
        if size < 2:
            raise DomainError("cyclic group needs N >= 2")
        gens = [tuple((i + 1) % size for i in range(size))]
    elif kind == "symmetric":
        if size < 2:
            raise DomainError("symmetric group needs N >= 2")
        swap = (1, 0) + tuple(range(2, size))
        cycle = tuple((i + 1) % size for i in range(size))
        gens = [swap, cycle] if size > 2 else [swap]
    elif kind == "sl2":
        from sympy import isprime

        if not isprime(size):
            raise DomainError(f"sl2 needs a prime, got {size}")
        gens = linear_action_generators([((1, 1), (0, 1)), ((1, 0), (1, 1))], size)
    else:
        raise DomainError(f"unknown Cayley family {kind!r}; expected cyclic, symmetric or sl2")
    return cayley_digraph(gens, cap=cap, label=text)


def complete_digraph_with_loops(n: int) -> Digraph:
    """K_n with a loop at every vertex: d = n and T is the uniform projector."""
    return Digraph(
        [list(range(n)) for _ in range(n)],
        label=f"complete-loops-{n}",
        symmetry_hint=SymmetryHint(vertex_transitive=True),
    )


def directed_cycle(n: int) -> Digraph:
    return Digraph(
        [[(x + 1) % n] for x in range(n)],
        label=f"cycle-{n}",
        symmetry_hint=SymmetryHint(vertex_transitive=True),
    )


if __name__ == "__main__":
    petersen = nonbacktracking_lift(nx.petersen_graph(), arc_transitive=True, label="nb-petersen")
    print(petersen, "girth of base:", girth(nx.petersen_graph()))
    print(parse_cayley_spec("symmetric:3"))
    print(parse_cayley_spec("sl2:3"))
