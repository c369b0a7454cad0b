"""Finite undirected graphs with exact colouring invariants.

Small, exact, immutable: the graphs that steer the algebra constructions
here have at most a few dozen nodes, and the invariants that matter
(chromatic number, girth) must be exact, so everything is direct search
with light pruning.  Infinity (acyclic girth) is the module-level
``INFINITY`` sentinel and serializes as the string "inf".
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidArgumentError

INFINITY = float("inf")


@dataclass(frozen=True)
class Graph:
    """Undirected irreflexive graph; edges stored canonically as i<j pairs."""

    node_count: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        for (i, j) in self.edges:
            if not (0 <= i < j < self.node_count):
                raise InvalidArgumentError(
                    f"edge ({i},{j}) not canonical for {self.node_count} nodes"
                )

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return (min(i, j), max(i, j)) in self.edges

    def neighbours(self, i: int) -> set[int]:
        out = set()
        for (a, b) in self.edges:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for (a, b) in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


def make_graph(kind: str, *params: int) -> Graph:
    """Build one of the stock graphs.

    kinds: "complete" (n), "cycle" (k), "clique_union" (count, size),
    "band" (M, N) — M nodes, edges {(i,j): 0 < |i-j| < N}.
    """
    if any(p < 1 for p in params):
        raise InvalidArgumentError(f"make_graph({kind}): size parameters must be >= 1")
    if kind == "complete":
        (n,) = params
        return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))
    if kind == "cycle":
        (k,) = params
        if k == 1:
            # a single node; no loops in an irreflexive graph
            return Graph(1, frozenset())
        if k == 2:
            return Graph(2, frozenset({(0, 1)}))
        edges = {(i, i + 1) for i in range(k - 1)}
        edges.add((0, k - 1))
        return Graph(k, frozenset(edges))
    if kind == "clique_union":
        count, size = params
        edges = set()
        for c in range(count):
            base = c * size
            for i in range(size):
                for j in range(i + 1, size):
                    edges.add((base + i, base + j))
        return Graph(count * size, frozenset(edges))
    if kind == "band":
        m, n = params
        edges = {
            (i, j)
            for i in range(m)
            for j in range(i + 1, m)
            if 0 < j - i < n
        }
        return Graph(m, frozenset(edges))
    raise InvalidArgumentError(f"unknown graph kind {kind!r}")


def is_colouring(g: Graph, f: dict[int, object]) -> bool:
    """True iff f is a total proper colouring: adjacent nodes get distinct colours."""
    missing = [v for v in range(g.node_count) if v not in f]
    if missing:
        raise InvalidArgumentError(f"colouring is partial, missing nodes {missing}")
    return all(f[a] != f[b] for (a, b) in g.edges)


def _greedy_clique(adj: list[set[int]]) -> list[int]:
    """Greedy max clique (lower bound for chromatic number)."""
    order = sorted(range(len(adj)), key=lambda v: -len(adj[v]))
    clique: list[int] = []
    for v in order:
        if all(v in adj[u] for u in clique):
            clique.append(v)
    return clique


def _dsatur_bound(adj: list[set[int]]) -> int:
    """DSATUR greedy colouring; returns the number of colours used."""
    n = len(adj)
    if n == 0:
        return 0
    colour = [-1] * n
    neigh_colours: list[set[int]] = [set() for _ in range(n)]
    for _ in range(n):
        # pick uncoloured vertex with max saturation, ties by degree
        best, best_key = -1, (-1, -1)
        for v in range(n):
            if colour[v] == -1:
                key = (len(neigh_colours[v]), len(adj[v]))
                if key > best_key:
                    best, best_key = v, key
        c = 0
        while c in neigh_colours[best]:
            c += 1
        colour[best] = c
        for u in adj[best]:
            neigh_colours[u].add(c)
    return max(colour) + 1


def chromatic_number(g: Graph) -> int:
    """Exact chromatic number by branch and bound over colour classes.

    Greedy DSATUR gives the upper bound, a greedy clique the lower bound;
    the search assigns vertices in degree order and never opens more
    colour classes than the incumbent.  0 for the empty graph.
    """
    n = g.node_count
    if n == 0:
        return 0
    adj = g.adjacency()
    if not g.edges:
        return 1
    lower = len(_greedy_clique(adj))
    best = _dsatur_bound(adj)
    if lower == best:
        return best
    order = sorted(range(n), key=lambda v: -len(adj[v]))
    colour = [-1] * n

    def assign(idx: int, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if idx == n:
            best = used
            return
        v = order[idx]
        taken = {colour[u] for u in adj[v] if colour[u] != -1}
        for c in range(used + 1):  # existing classes, then one fresh class
            if c in taken:
                continue
            new_used = max(used, c + 1)
            if new_used >= best:
                continue
            colour[v] = c
            assign(idx + 1, new_used)
            colour[v] = -1
            if best == lower:
                return

    assign(0, 0)
    return best


def girth(g: Graph) -> int | float:
    """Length of the shortest cycle; INFINITY for acyclic graphs.

    BFS from every node; every non-tree edge with both ends reached closes
    a walk of length dist[u]+dist[w]+1 that contains a cycle no longer than
    itself, and some root sees the shortest cycle exactly.
    """
    adj = g.adjacency()
    n = g.node_count
    best = INFINITY
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        queue = [root]
        while queue:
            nxt = []
            for u in queue:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
            queue = nxt
        for (u, w) in g.edges:
            if u in dist and w in dist and parent[u] != w and parent[w] != u:
                cand = dist[u] + dist[w] + 1
                if cand < best:
                    best = cand
    return best


# ---------------------------------------------------------------------------
# serialization

def graph_to_json_dict(g: Graph) -> dict:
    return {"nodes": g.node_count, "edges": [list(e) for e in sorted(g.edges)]}


def graph_from_json_dict(d: dict) -> Graph:
    try:
        n = int(d["nodes"])
        edges = frozenset((int(i), int(j)) for (i, j) in d["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"bad graph JSON: {exc}") from exc
    return Graph(n, edges)


def graph_to_dot(g: Graph) -> str:
    """DOT text, one line per edge; isolated nodes get declaration lines."""
    lines = ["graph G {"]
    touched = set()
    for (i, j) in sorted(g.edges):
        touched.add(i)
        touched.add(j)
    for v in range(g.node_count):
        if v not in touched:
            lines.append(f"  {v};")
    for (i, j) in sorted(g.edges):
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_from_dot(text: str) -> Graph:
    edges = set()
    nodes: set[int] = set()
    for raw in text.splitlines():
        line = raw.strip().rstrip(";")
        if not line or line.startswith("graph") or line == "}":
            continue
        if "--" in line:
            a, b = (part.strip() for part in line.split("--", 1))
            i, j = int(a), int(b)
            nodes.update((i, j))
            edges.add((min(i, j), max(i, j)))
        else:
            nodes.add(int(line))
    count = max(nodes) + 1 if nodes else 0
    return Graph(count, frozenset(edges))
