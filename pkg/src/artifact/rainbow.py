"""Coloured graphs and the two-parameter atom structures built from them.

Edges of a complete graph carry labels from a fixed stock: *greens* (a
numbered family plus a tinted family indexed by one parameter set),
*whites*, and *reds* indexed by ordered pairs of distinct elements of a
second parameter set.  Some triangles are forbidden — all-green
triangles, a numbered green doubled against its own white, two tinted
greens against the zeroth white, and red triangles whose indices do not
fit a single assignment of red indices to the three corners.  In ordered
mode one extra rule ties tinted greens to red indices through integer
order.

An atom of the dimension-n structure is a surjection from the n
coordinates onto a consistent coloured graph, taken up to renaming the
graph's nodes; concretely (kernel partition of the coordinates, label
matrix between kernel classes).  Two atoms are i-related exactly when
they agree after deleting coordinate i, and an atom is diagonal at (i,j)
when those coordinates collapse.  Relations are therefore agreement
faces, which the structure machinery turns into shared-mask partitions.

Coloured graphs may also carry a shade tag on node tuples of size n-1
(cone bases, for instance).  The default shade family has a single
unconstrained shade, which cannot distinguish anything, so atoms carry
no shade data; a `yellow_policy` hook lets callers reject candidate
atom graphs wholesale when a constrained shade discipline is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .errors import InvalidArgumentError, ResourceLimitError
from .structures import AtomStructure

DEFAULT_ATOM_CAP = 50_000

Colour = tuple  # ("g", i) | ("g0", tint) | ("w", i) | ("r", a, b)


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class RainbowSig:
    """Colour stock for dimension-n coloured graphs.

    green_tints indexes the tinted greens, red_indices the reds; reds are
    placed on an edge as an ordered pair of distinct indices and read
    reversed from the opposite direction.  ordered_mode switches on the
    order-preservation rule between two tinted greens and a red.
    """

    n: int
    green_tints: tuple[int, ...]
    red_indices: tuple[int, ...]
    ordered_mode: bool = False
    yellow_shades: tuple[str, ...] = ("0",)

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgumentError("dimension must be >= 2")
        for name, seq in (("green tints", self.green_tints), ("red indices", self.red_indices)):
            if list(seq) != sorted(set(seq)):
                raise InvalidArgumentError(f"{name} must be strictly increasing")
        if not self.yellow_shades:
            raise InvalidArgumentError("need at least one shade")

    @property
    def numbered_greens(self) -> list[Colour]:
        return [("g", i) for i in range(1, self.n - 1)]

    @property
    def tinted_greens(self) -> list[Colour]:
        return [("g0", t) for t in self.green_tints]

    @property
    def whites(self) -> list[Colour]:
        return [("w", i) for i in range(self.n - 1)]

    @property
    def reds(self) -> list[Colour]:
        """All placeable red labels: ordered pairs of distinct indices."""
        return [
            ("r", a, b)
            for a in self.red_indices
            for b in self.red_indices
            if a != b
        ]

    def edge_labels(self) -> list[Colour]:
        return self.numbered_greens + self.tinted_greens + self.whites + self.reds

    def check_colour(self, c: Colour) -> None:
        if not isinstance(c, tuple) or not c:
            raise InvalidArgumentError(f"not a colour: {c!r}")
        kind = c[0]
        if kind == "g":
            ok = len(c) == 2 and 1 <= c[1] <= self.n - 2
        elif kind == "g0":
            ok = len(c) == 2 and c[1] in self.green_tints
        elif kind == "w":
            ok = len(c) == 2 and 0 <= c[1] <= self.n - 2
        elif kind == "r":
            ok = (
                len(c) == 3
                and c[1] != c[2]
                and c[1] in self.red_indices
                and c[2] in self.red_indices
            )
        else:
            ok = False
        if not ok:
            raise InvalidArgumentError(f"colour {c!r} is not in this signature")


def rainbow_signature(
    greens: int | Iterable[int],
    reds: int | Iterable[int],
    n: int,
    *,
    ordered_mode: bool = False,
) -> RainbowSig:
    """Signature from parameter sets given as sizes or explicit index windows."""
    tints = tuple(range(greens)) if isinstance(greens, int) else tuple(sorted(set(greens)))
    idx = tuple(range(reds)) if isinstance(reds, int) else tuple(sorted(set(reds)))
    return RainbowSig(n, tints, idx, ordered_mode=ordered_mode)


# ---------------------------------------------------------------------------
# colour names (used by JSON and DOT)


def colour_name(c: Colour) -> str:
    if c[0] == "r":
        return f"r:{c[1]},{c[2]}"
    return f"{c[0]}:{c[1]}"


def colour_from_name(s: str) -> Colour:
    try:
        kind, rest = s.split(":", 1)
        if kind == "r":
            a, b = rest.split(",")
            return ("r", int(a), int(b))
        if kind in ("g", "g0", "w"):
            return (kind, int(rest))
    except ValueError as exc:
        raise InvalidArgumentError(f"bad colour name {s!r}") from exc
    raise InvalidArgumentError(f"bad colour name {s!r}")


def _flip(c: Colour) -> Colour:
    """The same label read from the opposite end of the edge."""
    if c[0] == "r":
        return ("r", c[2], c[1])
    return c


# ---------------------------------------------------------------------------
# coloured graphs


class ColouredGraph:
    """Nodes with edge labels on canonical pairs and shades on node tuples.

    labels maps (u, v) with u < v to a colour; reading an edge from its
    higher end reverses red index order.  hyper maps sorted node tuples
    to shade tags.  Instances are treated as immutable: the with_* helpers
    return extended copies, which keeps game trees safe.
    """

    __slots__ = ("nodes", "labels", "hyper")

    def __init__(self, nodes: Iterable[int] = (), labels=None, hyper=None):
        self.nodes = tuple(sorted(set(nodes)))
        node_set = set(self.nodes)
        self.labels = dict(labels or {})
        for (u, v) in self.labels:
            if not (u < v and u in node_set and v in node_set):
                raise InvalidArgumentError(f"bad edge key ({u},{v})")
        self.hyper = dict(hyper or {})
        for tup in self.hyper:
            if list(tup) != sorted(set(tup)) or not set(tup) <= node_set:
                raise InvalidArgumentError(f"bad shaded tuple {tup}")

    def label(self, u: int, v: int) -> Colour | None:
        """Oriented label of the edge read from u towards v, if present."""
        if u == v:
            raise InvalidArgumentError("an edge needs two distinct nodes")
        if u < v:
            return self.labels.get((u, v))
        c = self.labels.get((v, u))
        return None if c is None else _flip(c)

    def with_label(self, u: int, v: int, c: Colour) -> "ColouredGraph":
        """Copy with the edge (u, v) labelled c as read from u towards v."""
        if u == v:
            raise InvalidArgumentError("an edge needs two distinct nodes")
        labels = dict(self.labels)
        if u < v:
            labels[(u, v)] = c
        else:
            labels[(v, u)] = _flip(c)
        return ColouredGraph(set(self.nodes) | {u, v}, labels, self.hyper)

    def with_node(self, v: int) -> "ColouredGraph":
        return ColouredGraph(set(self.nodes) | {v}, self.labels, self.hyper)

    def with_shade(self, nodes: Iterable[int], shade: str) -> "ColouredGraph":
        hyper = dict(self.hyper)
        hyper[tuple(sorted(nodes))] = shade
        return ColouredGraph(self.nodes, self.labels, hyper)

    def without_node(self, v: int) -> "ColouredGraph":
        nodes = [x for x in self.nodes if x != v]
        labels = {e: c for e, c in self.labels.items() if v not in e}
        hyper = {t: s for t, s in self.hyper.items() if v not in t}
        return ColouredGraph(nodes, labels, hyper)

    def subgraph(self, keep: Iterable[int]) -> "ColouredGraph":
        keep_set = set(keep)
        return ColouredGraph(
            keep_set & set(self.nodes),
            {e: c for e, c in self.labels.items() if set(e) <= keep_set},
            {t: s for t, s in self.hyper.items() if set(t) <= keep_set},
        )

    def is_complete(self) -> bool:
        want = len(self.nodes) * (len(self.nodes) - 1) // 2
        return len(self.labels) == want

    def consistent(self, sig: RainbowSig, yellow_policy=None) -> bool:
        """Every fully labelled triangle allowed, and the shade hook happy."""
        for x, y, z in combinations(self.nodes, 3):
            if (x, y) in self.labels and (y, z) in self.labels and (x, z) in self.labels:
                if not _triangle_ok(sig, self.labels, x, y, z):
                    return False
        if yellow_policy is not None and not yellow_policy(sig, self):
            return False
        return True

    def first_bad_triangle(self, sig: RainbowSig) -> tuple[int, int, int] | None:
        for x, y, z in combinations(self.nodes, 3):
            if (x, y) in self.labels and (y, z) in self.labels and (x, z) in self.labels:
                if not _triangle_ok(sig, self.labels, x, y, z):
                    return (x, y, z)
        return None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ColouredGraph)
            and self.nodes == other.nodes
            and self.labels == other.labels
            and self.hyper == other.hyper
        )

    def __hash__(self) -> int:
        return hash((
            self.nodes,
            tuple(sorted(self.labels.items())),
            tuple(sorted(self.hyper.items())),
        ))

    def __repr__(self) -> str:
        return f"ColouredGraph(nodes={len(self.nodes)}, edges={len(self.labels)})"

    def to_json_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [
                {"u": u, "v": v, "colour": colour_name(c)}
                for (u, v), c in sorted(self.labels.items())
            ],
            "shaded": [
                {"nodes": list(t), "shade": f"y:{s}"}
                for t, s in sorted(self.hyper.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ColouredGraph":
        try:
            nodes = [int(x) for x in d["nodes"]]
            labels = {}
            for e in d.get("edges", []):
                labels[(int(e["u"]), int(e["v"]))] = colour_from_name(e["colour"])
            hyper = {}
            for h in d.get("shaded", []):
                tag = h["shade"]
                if not tag.startswith("y:"):
                    raise InvalidArgumentError(f"bad shade tag {tag!r}")
                hyper[tuple(int(x) for x in h["nodes"])] = tag[2:]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"bad coloured-graph JSON: {exc}") from exc
        return cls(nodes, labels, hyper)

    def to_dot(self) -> str:
        lines = ["graph coloured {"]
        used = set()
        for (u, v), c in sorted(self.labels.items()):
            used.update((u, v))
            kind = c[0]
            pen = {"g": "green", "g0": "darkgreen", "w": "gray", "r": "red"}[kind]
            lines.append(f'  {u} -- {v} [label="{colour_name(c)}", color={pen}];')
        for v in self.nodes:
            if v not in used:
                lines.append(f"  {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# forbidden triangles


def _read(labels: dict, u: int, v: int) -> Colour:
    c = labels[(u, v)] if u < v else labels[(v, u)]
    return c if u < v else _flip(c)


def _order_preserving(p1: tuple[int, int], p2: tuple[int, int]) -> bool:
    """Is {p1, p2} an order-preserving partial function?"""
    (a, b), (c, d) = p1, p2
    if a == c:
        return b == d
    if a < c:
        return b < d
    return b > d


def _triangle_ok(sig: RainbowSig, labels: dict, a: int, b: int, c: int) -> bool:
    """Whether the fully labelled triangle {a, b, c} is allowed.

    The red rule reads the three edges in one orientation and demands a
    single index per corner; relabelling the corners flips reds
    coherently, so the verdict does not depend on the chosen orientation.
    """
    x, y, z = sorted((a, b, c))
    exy = _read(labels, x, y)
    eyz = _read(labels, y, z)
    exz = _read(labels, x, z)
    cols = (exy, eyz, exz)
    kinds = [col[0] for col in cols]

    if all(k in ("g", "g0") for k in kinds):
        return False

    greens_numbered = [col for col in cols if col[0] == "g"]
    whites = [col for col in cols if col[0] == "w"]
    if len(greens_numbered) == 2 and greens_numbered[0] == greens_numbered[1] and whites:
        if whites[0][1] == greens_numbered[0][1]:
            return False

    tinted = [(e, col) for e, col in zip(((x, y), (y, z), (x, z)), cols) if col[0] == "g0"]
    if len(tinted) == 2 and whites and whites[0][1] == 0:
        return False

    if kinds == ["r", "r", "r"]:
        # corner assignment: x gets exy's first and exz's first index,
        # y gets exy's second and eyz's first, z the two remaining
        return exy[1] == exz[1] and exy[2] == eyz[1] and eyz[2] == exz[2]

    if sig.ordered_mode and len(tinted) == 2 and "r" in kinds:
        (e1, g1), (e2, g2) = tinted
        shared = set(e1) & set(e2)
        apex1 = (set(e1) - shared).pop()
        apex2 = (set(e2) - shared).pop()
        red = _read(labels, apex1, apex2)
        if not _order_preserving((g1[1], red[1]), (g2[1], red[2])):
            return False

    return True


def is_forbidden_triple(sig: RainbowSig, c1: Colour, c2: Colour, c3: Colour) -> bool:
    """Forbidden-triangle test on a colour triple.

    The triple is read as the labels of the edges (x,y), (y,z), (x,z) of
    a triangle, in that orientation; red index order matters.  Symmetric
    patterns (greens and whites) are matched in any arrangement.
    """
    for c in (c1, c2, c3):
        sig.check_colour(c)
    labels = {(0, 1): c1, (1, 2): c2, (0, 2): c3}
    return not _triangle_ok(sig, labels, 0, 1, 2)


# ---------------------------------------------------------------------------
# cones


def cone(sig: RainbowSig, base: ColouredGraph, tint: int) -> ColouredGraph:
    """Attach a tinted apex over an (n-1)-node base.

    The apex joins the first base node by the tinted green and the j-th
    base node by the j-th numbered green; no other edge is green, so the
    base must be green-free.  The base tuple gets the default shade.
    """
    if tint not in sig.green_tints:
        raise InvalidArgumentError(f"tint {tint} is not a green tint")
    if len(base.nodes) != sig.n - 1:
        raise InvalidArgumentError(
            f"cone base needs {sig.n - 1} nodes, got {len(base.nodes)}"
        )
    if any(c[0] in ("g", "g0") for c in base.labels.values()):
        raise InvalidArgumentError("cone base must be green-free")
    xs = base.nodes
    apex = xs[-1] + 1
    labels = dict(base.labels)
    labels[(xs[0], apex)] = ("g0", tint)
    for j in range(1, sig.n - 1):
        labels[(xs[j], apex)] = ("g", j)
    hyper = dict(base.hyper)
    hyper.setdefault(tuple(xs), sig.yellow_shades[0])
    return ColouredGraph(xs + (apex,), labels, hyper)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True, order=True)
class RainbowAtom:
    """A surjection pattern: kernel partition of the coordinates plus the
    label matrix between kernel classes (classes ordered by least member)."""

    partition: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[tuple[int, int], Colour], ...]

    @property
    def node_count(self) -> int:
        return len(self.partition)

    def class_of(self, coord: int) -> int:
        for k, cls in enumerate(self.partition):
            if coord in cls:
                return k
        raise InvalidArgumentError(f"coordinate {coord} out of range")

    def collapsed(self, i: int, j: int) -> bool:
        return self.class_of(i) == self.class_of(j)

    def graph(self) -> ColouredGraph:
        return ColouredGraph(range(self.node_count), dict(self.labels))

    def name(self) -> str:
        parts = "|".join("".join(str(x) for x in cls) for cls in self.partition)
        if not self.labels:
            return parts
        edges = ";".join(
            f"{u}{v}={colour_name(c)}" for (u, v), c in self.labels
        )
        return f"{parts};{edges}"

    def restrict(self, i: int):
        """Agreement face off coordinate i: the atom with i deleted,
        renamed canonically.  Equal faces = related at i."""
        survivors = []
        for idx, cls in enumerate(self.partition):
            rest = tuple(x for x in cls if x != i)
            if rest:
                survivors.append((idx, rest))
        survivors.sort(key=lambda t: t[1][0])
        renum = {old: new for new, (old, _) in enumerate(survivors)}
        parts = tuple(rest for _, rest in survivors)
        labs = []
        for (u, v), c in self.labels:
            if u in renum and v in renum:
                nu, nv = renum[u], renum[v]
                if nu < nv:
                    labs.append(((nu, nv), c))
                else:
                    labs.append(((nv, nu), _flip(c)))
        return (parts, tuple(sorted(labs)))


def atom_from_assignment(
    sig: RainbowSig, graph: ColouredGraph, assignment: Sequence[int]
) -> RainbowAtom | None:
    """The atom an n-tuple of board nodes induces, or None when an edge
    between two assigned nodes is unlabelled.  Shades are not part of
    atom identity (single unconstrained default shade)."""
    if len(assignment) != sig.n:
        raise InvalidArgumentError(f"assignment must have {sig.n} coordinates")
    node_set = set(graph.nodes)
    first: dict[int, int] = {}
    classes: list[list[int]] = []
    node_of: list[int] = []
    for k, v in enumerate(assignment):
        if v not in node_set:
            raise InvalidArgumentError(f"node {v} is not on the board")
        if v in first:
            classes[first[v]].append(k)
        else:
            first[v] = len(classes)
            classes.append([k])
            node_of.append(v)
    labels = {}
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            c = graph.label(node_of[a], node_of[b])
            if c is None:
                return None
            labels[(a, b)] = c
    return RainbowAtom(
        tuple(tuple(cls) for cls in classes),
        tuple(sorted(labels.items())),
    )


# ---------------------------------------------------------------------------
# enumeration


def _set_partitions(n: int):
    """Partitions of range(n); classes ordered by least member, members sorted."""
    parts: list[list[int]] = []

    def rec(x: int):
        if x == n:
            yield tuple(tuple(cls) for cls in parts)
            return
        for cls in parts:
            cls.append(x)
            yield from rec(x + 1)
            cls.pop()
        parts.append([x])
        yield from rec(x + 1)
        parts.pop()

    yield from rec(0)


def _labelings(sig: RainbowSig, m: int):
    """All consistent total labelings of the complete graph on m nodes,
    assigned edge by edge with triangles checked as soon as they close."""
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    stock = sig.edge_labels()
    lab: dict[tuple[int, int], Colour] = {}

    def rec(k: int):
        if k == len(edges):
            yield dict(lab)
            return
        u, v = edges[k]
        for c in stock:
            lab[(u, v)] = c
            ok = True
            for w in range(m):
                if w == u or w == v:
                    continue
                e1 = (w, u) if w < u else (u, w)
                e2 = (w, v) if w < v else (v, w)
                if e1 in lab and e2 in lab and not _triangle_ok(sig, lab, u, v, w):
                    ok = False
                    break
            if ok:
                yield from rec(k + 1)
        del lab[(u, v)]

    yield from rec(0)


def enumerate_atoms(
    sig: RainbowSig,
    *,
    atom_cap: int = DEFAULT_ATOM_CAP,
    yellow_policy: Callable[[RainbowSig, ColouredGraph], bool] | None = None,
) -> list[RainbowAtom]:
    """All atoms of the dimension-n structure over this signature, in
    canonical sorted order.  One atom per equivalence class by
    construction: the kernel fixes the node names and ordering."""
    atoms: list[RainbowAtom] = []
    for parts in _set_partitions(sig.n):
        m = len(parts)
        for lab in _labelings(sig, m):
            if yellow_policy is not None:
                if not yellow_policy(sig, ColouredGraph(range(m), lab)):
                    continue
            atoms.append(RainbowAtom(parts, tuple(sorted(lab.items()))))
            if len(atoms) > atom_cap:
                raise ResourceLimitError(
                    f"atom enumeration exceeded atom_cap={atom_cap}",
                    limit_name="atom_cap",
                    limit_value=atom_cap,
                )
    atoms.sort()
    return atoms


# ---------------------------------------------------------------------------
# the atom structure


class RainbowStructure(AtomStructure):
    """Atom structure that keeps its signature and atom objects around."""

    __slots__ = ("sig", "atoms", "atom_index")


def rainbow_atom_structure(
    greens: int | Iterable[int],
    reds: int | Iterable[int],
    n: int,
    *,
    ordered_mode: bool = False,
    atom_cap: int = DEFAULT_ATOM_CAP,
    yellow_policy: Callable[[RainbowSig, ColouredGraph], bool] | None = None,
) -> RainbowStructure:
    """Dimension-n atom structure over the given parameter sets.

    Relations: related at i iff equal after deleting coordinate i;
    diagonal at (i,j) iff the two coordinates collapse.
    """
    sig = rainbow_signature(greens, reds, n, ordered_mode=ordered_mode)
    atoms = enumerate_atoms(sig, atom_cap=atom_cap, yellow_policy=yellow_policy)
    faces = [[a.restrict(i) for a in atoms] for i in range(n)]
    diag_sets = {
        (i, j): [k for k, a in enumerate(atoms) if a.collapsed(i, j)]
        for i in range(n)
        for j in range(i + 1, n)
    }
    s = RainbowStructure.from_faces(
        n, faces, diag_sets, atom_names=[a.name() for a in atoms]
    )
    s.sig = sig
    s.atoms = tuple(atoms)
    s.atom_index = {a: k for k, a in enumerate(atoms)}
    return s
