"""Relation-algebra atom structures given by forbidden triples, and the
cylindric structures of their n-by-n basic matrices.

A structure holds named atoms, a nonempty identity set, an involutive
converse, and a consistency predicate on ordered triples (a, b, c) read
as "c fits under a composed with b".  Consistency is stored as its
complement, an explicit forbidden-triple set, which must be closed under
the Peircean transforms of each triple; the builders emit closed sets
and the default constructor rejects anything else.

Builders: the graph-coloured family (one identity atom plus an atom per
(vertex, colour) pair, where a monochromatic triangle needs a graph edge
among its vertices), the three-colour indexed family (a doubled colour
index forbids every index above it), and atom splitting, which replaces
one non-identity atom by copies that are forbidden together exactly
where the original's self-triples were, while the identity law keeps
distinct copies apart.

Basic matrices over a structure are n-by-n matrices with identity
diagonal, converse-symmetric entries, and every (i,j,k) entry triangle
consistent.  They form a cylindric-style atom structure: related at i
when agreeing outside row and column i, diagonal at (i,j) when the
(i,j) entry is an identity atom.  For the graph-coloured family the same
structure also arises directly from labelled n-point configurations
(kernel partition plus a vertex-colour label per point pair), and the
two constructions are isomorphic — checked, not assumed.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .bao import AxiomReport, AxiomResult
from .errors import InvalidArgumentError, ResourceLimitError
from .graphs import Graph
from .structures import AtomStructure, are_isomorphic

DEFAULT_MATRIX_CAP = 50_000


# ---------------------------------------------------------------------------
# the structure type


def peircean_transforms(triple: tuple[int, int, int], converse: Sequence[int]):
    """The six readings of one composition fact (a, b, c): c <= a;b."""
    a, b, c = triple
    ac, bc, cc = converse[a], converse[b], converse[c]
    return {
        (a, b, c),
        (ac, c, b),
        (c, bc, a),
        (bc, ac, cc),
        (cc, a, bc),
        (b, cc, ac),
    }


def peircean_closure(
    triples: Iterable[tuple[int, int, int]], converse: Sequence[int]
) -> frozenset:
    out = set()
    for t in triples:
        out |= peircean_transforms(t, converse)
    return frozenset(out)


class RaAtomStructure:
    """Finite atom structure for a relation algebra, by forbidden triples.

    With validate=True (the default) the forbidden set must already be
    Peircean-closed and the converse involutive; validate=False skips
    those checks so that deliberately broken structures can be built and
    fed to check_ra_atom_structure for diagnosis.
    """

    __slots__ = ("atom_names", "index", "identity", "converse", "forbidden")

    def __init__(
        self,
        atom_names: Sequence[str],
        identity: Iterable[int | str],
        converse: Sequence[int],
        forbidden: Iterable[tuple[int, int, int]],
        *,
        validate: bool = True,
    ):
        self.atom_names = tuple(atom_names)
        if len(set(self.atom_names)) != len(self.atom_names) or not self.atom_names:
            raise InvalidArgumentError("atom names must be nonempty and unique")
        self.index = {name: k for k, name in enumerate(self.atom_names)}
        k = len(self.atom_names)
        self.identity = frozenset(self._resolve(x) for x in identity)
        if not self.identity:
            raise InvalidArgumentError("identity set must be nonempty")
        self.converse = tuple(converse)
        if sorted(self.converse) != list(range(k)):
            raise InvalidArgumentError("converse must be a permutation of the atoms")
        self.forbidden = frozenset(
            (self._resolve(a), self._resolve(b), self._resolve(c))
            for (a, b, c) in forbidden
        )
        if validate:
            for a in range(k):
                if self.converse[self.converse[a]] != a:
                    raise InvalidArgumentError(
                        f"converse is not involutive at {self.atom_names[a]}"
                    )
            for e in self.identity:
                if self.converse[e] not in self.identity:
                    raise InvalidArgumentError("converse must fix the identity set")
            for t in self.forbidden:
                for u in peircean_transforms(t, self.converse):
                    if u not in self.forbidden:
                        raise InvalidArgumentError(
                            f"forbidden set is not Peircean-closed: has "
                            f"{self.triple_names(t)} but not {self.triple_names(u)}"
                        )

    def _resolve(self, x: int | str) -> int:
        if isinstance(x, str):
            if x not in self.index:
                raise InvalidArgumentError(f"unknown atom {x!r}")
            return self.index[x]
        if not (0 <= x < len(self.atom_names)):
            raise InvalidArgumentError(f"atom index {x} out of range")
        return x

    @property
    def atom_count(self) -> int:
        return len(self.atom_names)

    def consistent(self, a: int | str, b: int | str, c: int | str) -> bool:
        """Whether c fits under a composed with b."""
        t = (self._resolve(a), self._resolve(b), self._resolve(c))
        return t not in self.forbidden

    def triple_names(self, t: tuple[int, int, int]) -> tuple[str, str, str]:
        return tuple(self.atom_names[x] for x in t)

    def __repr__(self) -> str:
        return f"RaAtomStructure(atoms={self.atom_count}, forbidden={len(self.forbidden)})"

    def to_json_dict(self) -> dict:
        return {
            "atoms": list(self.atom_names),
            "identity": sorted(self.atom_names[e] for e in self.identity),
            "converse": {
                self.atom_names[a]: self.atom_names[self.converse[a]]
                for a in range(self.atom_count)
            },
            "forbidden": sorted(list(self.triple_names(t)) for t in self.forbidden),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RaAtomStructure":
        try:
            names = [str(x) for x in d["atoms"]]
            index = {name: k for k, name in enumerate(names)}
            conv = [0] * len(names)
            for src, dst in d["converse"].items():
                conv[index[src]] = index[dst]
            forbidden = [tuple(t) for t in d["forbidden"]]
            identity = list(d["identity"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"bad atom-structure JSON: {exc}") from exc
        return cls(names, identity, conv, forbidden)


# ---------------------------------------------------------------------------
# validity checking


def check_ra_atom_structure(R: RaAtomStructure) -> AxiomReport:
    """Atom-level relation-algebra conditions with witnesses.

    Checks: identity nonempty, converse involutive and identity-fixing,
    the identity atoms acting as a two-sided unit, and invariance of
    consistency under the six Peircean transforms (exhaustive, cubic).
    """
    report = AxiomReport()
    k = R.atom_count

    report.results.append(AxiomResult(
        "identity-nonempty", "identity set is nonempty", bool(R.identity),
        "direct", None))

    witness = None
    for a in range(k):
        if R.converse[R.converse[a]] != a:
            witness = {
                "atom": R.atom_names[a],
                "converse": R.atom_names[R.converse[a]],
                "double_converse": R.atom_names[R.converse[R.converse[a]]],
            }
            break
    report.results.append(AxiomResult(
        "converse-involution", "conv(conv(a)) = a", witness is None,
        "exhaustive over atoms", witness))

    witness = None
    for e in R.identity:
        if R.converse[e] not in R.identity:
            witness = {"identity_atom": R.atom_names[e]}
            break
    report.results.append(AxiomResult(
        "converse-fixes-identity", "conv maps identity atoms to identity atoms",
        witness is None, "exhaustive over identity atoms", witness))

    # unit laws: {c : some e in identity with (a, e, c) consistent} = {a},
    # and symmetrically on the left
    right = None
    left = None
    for a in range(k):
        hits_r = {c for c in range(k) for e in R.identity if R.consistent(a, e, c)}
        if hits_r != {a} and right is None:
            right = {"atom": R.atom_names[a],
                     "composes_to": sorted(R.atom_names[c] for c in hits_r)}
        hits_l = {c for c in range(k) for e in R.identity if R.consistent(e, a, c)}
        if hits_l != {a} and left is None:
            left = {"atom": R.atom_names[a],
                    "composes_to": sorted(R.atom_names[c] for c in hits_l)}
    report.results.append(AxiomResult(
        "identity-right-unit", "a ; identity = a", right is None,
        "exhaustive over atoms", right))
    report.results.append(AxiomResult(
        "identity-left-unit", "identity ; a = a", left is None,
        "exhaustive over atoms", left))

    witness = None
    for t in R.forbidden:
        for u in peircean_transforms(t, R.converse):
            if u not in R.forbidden:
                witness = {"forbidden": R.triple_names(t), "missing": R.triple_names(u)}
                break
        if witness:
            break
    report.results.append(AxiomResult(
        "cycle-closure", "consistency is invariant under Peircean transforms",
        witness is None, "exhaustive over forbidden triples", witness))
    return report


# ---------------------------------------------------------------------------
# builders


def alpha_of_graph(g: Graph, n: int) -> RaAtomStructure:
    """One identity atom plus an atom per (vertex, colour < n) pair.

    All atoms self-converse.  A triple is consistent when one member is
    the identity and the other two are equal, or no member is the
    identity and the colours are not all equal, or all three share a
    colour and the three vertices span at least one graph edge.
    """
    if n < 1:
        raise InvalidArgumentError("need at least one colour")
    names = ["Id"] + [f"v{a}:{i}" for a in range(g.node_count) for i in range(n)]
    k = len(names)

    def vertex_colour(x: int) -> tuple[int, int]:
        return divmod(x - 1, n)

    def consistent(a: int, b: int, c: int) -> bool:
        trio = (a, b, c)
        if 0 in trio:
            # an identity member forces the other two to be equal; with two
            # identity members that cascades to all three being the identity
            for pos in range(3):
                if trio[pos] == 0:
                    rest = [trio[q] for q in range(3) if q != pos]
                    if rest[0] != rest[1]:
                        return False
            return True
        (va, ca), (vb, cb), (vc, cc) = map(vertex_colour, trio)
        if not (ca == cb == cc):
            return True
        verts = {va, vb, vc}
        return any(g.has_edge(u, v) for u, v in combinations(sorted(verts), 2))

    forbidden = [
        (a, b, c)
        for a in range(k)
        for b in range(k)
        for c in range(k)
        if not consistent(a, b, c)
    ]
    return RaAtomStructure(names, ["Id"], range(k), forbidden)


def rybh_algebra(M: int) -> RaAtomStructure:
    """Three colour families with M indices each, all self-converse.

    Forbidden: permutations of (identity, x, y) for x != y, and a
    doubled colour index against the same colour at any index >= it.
    """
    if M < 1:
        raise InvalidArgumentError("need at least one index")
    names = ["Id"] + [f"{c}:{i}" for c in ("r", "y", "b") for i in range(M)]
    k = len(names)
    index = {name: pos for pos, name in enumerate(names)}
    seeds = []
    for x in range(k):
        for y in range(k):
            if x != y:
                seeds.append((0, x, y))
    for colour in ("r", "y", "b"):
        for i in range(M):
            for j in range(i, M):
                seeds.append((index[f"{colour}:{i}"], index[f"{colour}:{i}"],
                              index[f"{colour}:{j}"]))
    conv = list(range(k))
    return RaAtomStructure(names, ["Id"], conv, peircean_closure(seeds, conv))


def split_atom(R: RaAtomStructure, target: int | str, parts: int) -> RaAtomStructure:
    """Replace one self-converse non-identity atom by `parts` copies.

    A triple not involving copies keeps its old verdict; a triple
    involving copies takes the verdict of its projection (copies read as
    the original atom), except that the identity law separates distinct
    copies: (identity, copy_k, copy_l) is forbidden for k != l.  For the
    three-colour family this reproduces the known split table; for other
    atoms it is the same pattern, applied structurally.
    """
    t = R._resolve(target)
    if t in R.identity:
        raise InvalidArgumentError("cannot split an identity atom")
    if R.converse[t] != t:
        raise InvalidArgumentError("can only split a self-converse atom")
    if parts < 1:
        raise InvalidArgumentError("need at least one part")
    base = R.atom_names[t].replace(":", "")
    copy_names = [f"{base}:{p}" for p in range(parts)]
    names = (
        list(R.atom_names[:t]) + copy_names + list(R.atom_names[t + 1:])
    )
    if len(set(names)) != len(names):
        raise InvalidArgumentError("split copy names collide with existing atoms")

    def project(x: int) -> int:
        if x < t:
            return x
        if x < t + parts:
            return t
        return x - parts + 1

    def embed(x: int) -> int:
        # old index -> a new index (the first copy for the target)
        return x if x <= t else x + parts - 1

    k = len(names)
    conv = [0] * k
    for x in range(k):
        old = project(x)
        if old == t:
            conv[x] = x
        else:
            conv[x] = embed(R.converse[old])
    copies = list(range(t, t + parts))
    forbidden = {
        (a, b, c)
        for a in range(k)
        for b in range(k)
        for c in range(k)
        if (project(a), project(b), project(c)) in R.forbidden
    }
    identity = [embed(e) for e in R.identity]
    for e in identity:
        for x in copies:
            for y in copies:
                if x != y:
                    forbidden |= peircean_transforms((e, x, y), conv)
    return RaAtomStructure(names, identity, conv, forbidden)


# ---------------------------------------------------------------------------
# basic matrices


class MatrixStructure(AtomStructure):
    """Atom structure of basic matrices; keeps the matrices around."""

    __slots__ = ("ra", "side", "matrices", "matrix_index")


def basic_matrices(
    R: RaAtomStructure, n: int, *, matrix_cap: int = DEFAULT_MATRIX_CAP
) -> MatrixStructure:
    """All n-by-n basic matrices over R, as a dimension-n atom structure.

    A matrix fixes an upper-triangle entry per position (diagonal from
    the identity set, the rest arbitrary atoms), the lower triangle
    being converses; every entry triangle (m_ij, m_jk, m_ik) over all
    index triples must be consistent.  Matrices are related at i when
    they agree outside row and column i; diagonal at (i, j) when the
    (i, j) entry is an identity atom.  An empty result is a structure
    with zero atoms, reported as such rather than an error.
    """
    if n < 1:
        raise InvalidArgumentError("matrix dimension must be >= 1")
    positions = [(i, j) for i in range(n) for j in range(i, n)]
    pos_index = {p: k for k, p in enumerate(positions)}
    identity_choices = sorted(R.identity)
    all_atoms = list(range(R.atom_count))
    entries: dict[tuple[int, int], int] = {}
    matrices: list[tuple[int, ...]] = []

    def entry(i: int, j: int) -> int | None:
        if i <= j:
            return entries.get((i, j))
        e = entries.get((j, i))
        return None if e is None else R.converse[e]

    def triples_ok(i0: int, j0: int) -> bool:
        # all index triples whose three positions are set and which use
        # the newly assigned position {i0, j0}
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    pairs = ((i, j), (j, k), (i, k))
                    if all({p[0], p[1]} != {i0, j0} for p in pairs):
                        continue
                    vals = [entry(*p) for p in pairs]
                    if None in vals:
                        continue
                    if not R.consistent(*vals):
                        return False
        return True

    def rec(k: int) -> None:
        if k == len(positions):
            matrices.append(tuple(entries[p] for p in positions))
            if len(matrices) > matrix_cap:
                raise ResourceLimitError(
                    f"basic-matrix enumeration exceeded matrix_cap={matrix_cap}",
                    limit_name="matrix_cap",
                    limit_value=matrix_cap,
                )
            return
        i, j = positions[k]
        stock = identity_choices if i == j else all_atoms
        for a in stock:
            entries[(i, j)] = a
            if triples_ok(i, j):
                rec(k + 1)
        del entries[(i, j)]

    rec(0)
    matrices.sort()

    def full(mat: tuple[int, ...], i: int, j: int) -> int:
        if i <= j:
            return mat[pos_index[(i, j)]]
        return R.converse[mat[pos_index[(j, i)]]]

    faces = [
        [
            tuple(
                mat[pos_index[(i, j)]]
                for (i, j) in positions
                if i != axis and j != axis
            )
            for mat in matrices
        ]
        for axis in range(n)
    ]
    diag_sets = {
        (i, j): [
            k for k, mat in enumerate(matrices) if full(mat, i, j) in R.identity
        ]
        for i in range(n)
        for j in range(i + 1, n)
    }
    names = [
        ",".join(R.atom_names[x] for x in mat) for mat in matrices
    ]
    s = MatrixStructure.from_faces(n, faces, diag_sets, atom_names=names)
    s.ra = R
    s.side = n
    s.matrices = tuple(matrices)
    s.matrix_index = {m: k for k, m in enumerate(matrices)}
    return s


# ---------------------------------------------------------------------------
# labelled point configurations (the direct construction)


class MonkStructure(AtomStructure):
    """Atom structure of labelled point configurations over a graph."""

    __slots__ = ("graph", "colour_count", "configs", "config_index")


def monk_ca_atom_structure(
    g: Graph, n: int, *, atom_cap: int = DEFAULT_MATRIX_CAP
) -> MonkStructure:
    """Dimension-n structure of labelled n-point configurations.

    A configuration is a kernel partition of the n coordinates plus one
    (vertex, colour < n) label per pair of distinct kernel classes;
    a label triangle must use more than one colour or its vertices must
    span a graph edge.  Related at i when equal after deleting
    coordinate i; diagonal at (i, j) when the coordinates collapse.
    """
    if n < 1:
        raise InvalidArgumentError("dimension must be >= 1")
    stock = [(v, c) for v in range(g.node_count) for c in range(n)]

    def triangle_ok(lab, u, v, w):
        (va, ca) = lab[(u, v)]
        (vb, cb) = lab[(v, w)]
        (vc, cc) = lab[(u, w)]
        if not (ca == cb == cc):
            return True
        verts = sorted({va, vb, vc})
        return any(g.has_edge(x, y) for x, y in combinations(verts, 2))

    configs: list[tuple] = []
    for parts in _partitions(n):
        m = len(parts)
        edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
        lab: dict[tuple[int, int], tuple[int, int]] = {}

        def rec(k: int):
            if k == len(edges):
                configs.append((parts, tuple(sorted(lab.items()))))
                if len(configs) > atom_cap:
                    raise ResourceLimitError(
                        f"configuration enumeration exceeded atom_cap={atom_cap}",
                        limit_name="atom_cap",
                        limit_value=atom_cap,
                    )
                return
            u, v = edges[k]
            for a in stock:
                lab[(u, v)] = a
                ok = True
                for w in range(m):
                    if w in (u, v):
                        continue
                    x, y, z = sorted((u, v, w))
                    if (x, y) in lab and (y, z) in lab and (x, z) in lab:
                        if not triangle_ok(lab, x, y, z):
                            ok = False
                            break
                if ok:
                    rec(k + 1)
            del lab[(u, v)]

        rec(0)
    configs.sort()

    def restrict(config, i):
        parts, labels = config
        survivors = []
        for idx, cls in enumerate(parts):
            rest = tuple(x for x in cls if x != i)
            if rest:
                survivors.append((idx, rest))
        survivors.sort(key=lambda t: t[1][0])
        renum = {old: new for new, (old, _) in enumerate(survivors)}
        new_parts = tuple(rest for _, rest in survivors)
        labs = []
        for (u, v), a in labels:
            if u in renum and v in renum:
                nu, nv = sorted((renum[u], renum[v]))
                labs.append(((nu, nv), a))
        return (new_parts, tuple(sorted(labs)))

    def collapsed(config, i, j):
        return any(i in cls and j in cls for cls in config[0])

    faces = [[restrict(c, i) for c in configs] for i in range(n)]
    diag_sets = {
        (i, j): [k for k, c in enumerate(configs) if collapsed(c, i, j)]
        for i in range(n)
        for j in range(i + 1, n)
    }
    names = []
    for parts, labels in configs:
        head = "|".join("".join(str(x) for x in cls) for cls in parts)
        body = ";".join(f"{u}{v}=v{a}:{c}" for (u, v), (a, c) in labels)
        names.append(f"{head};{body}" if body else head)
    s = MonkStructure.from_faces(n, faces, diag_sets, atom_names=names)
    s.graph = g
    s.colour_count = n
    s.configs = tuple(configs)
    s.config_index = {c: k for k, c in enumerate(configs)}
    return s


def _partitions(n: int):
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


def iso_atom_structures(s1: AtomStructure, s2: AtomStructure) -> bool:
    """Exhaustive isomorphism decision between two atom structures."""
    return are_isomorphic(s1, s2)
