"""Atom structures: the relational frames underlying finite algebras.

An atom structure of dimension n over k atoms carries one binary relation
per index i < n (accessibility for the i-th cylindrifier) and one
distinguished atom set per index pair i < j (the diagonal).  Atoms are
0..k-1 and element sets are bitsets (Python ints), so the cylindrifier of
a singleton is a precomputed mask and everything lifts by union.

Structures built from "agreement faces" (two atoms related at i iff they
agree off coordinate i) additionally store a face id per atom per index;
those ids make the relation an equivalence by construction and give the
isomorphism search an exact fast path that scales to thousands of atoms.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .errors import InvalidArgumentError, ResourceLimitError

ISO_BACKTRACK_ATOM_CAP = 12


class AtomStructure:
    """Dimension-n relational frame on atoms 0..atom_count-1.

    t_cols[i][b] is the bitset {a : a is an i-successor of b}; lifted by
    union this is the i-th cylindrifier of the complex algebra.  diag maps
    each pair (i, j) with i < j to the bitset of diagonal atoms.
    """

    __slots__ = ("dim", "atom_count", "t_cols", "diag", "faces", "atom_names")

    def __init__(
        self,
        dim: int,
        atom_count: int,
        t_cols: list[list[int]],
        diag: dict[tuple[int, int], int],
        faces: list[list[Hashable]] | None = None,
        atom_names: list[str] | None = None,
    ):
        if dim < 1:
            raise InvalidArgumentError("dimension must be >= 1")
        if atom_count < 0:
            raise InvalidArgumentError("atom count must be >= 0")
        if len(t_cols) != dim:
            raise InvalidArgumentError("need one successor table per index")
        top = (1 << atom_count) - 1
        for i, col in enumerate(t_cols):
            if len(col) != atom_count:
                raise InvalidArgumentError(f"successor table {i} has wrong length")
            for mask in col:
                if mask & ~top:
                    raise InvalidArgumentError(f"successor mask out of range at index {i}")
        for (i, j), mask in diag.items():
            if not (0 <= i < j < dim):
                raise InvalidArgumentError(f"diagonal key ({i},{j}) not canonical")
            if mask & ~top:
                raise InvalidArgumentError(f"diagonal mask ({i},{j}) out of range")
        self.dim = dim
        self.atom_count = atom_count
        self.t_cols = t_cols
        self.diag = dict(diag)
        for i in range(dim):
            for j in range(i + 1, dim):
                self.diag.setdefault((i, j), 0)
        self.faces = faces
        self.atom_names = atom_names

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_pairs(
        cls,
        dim: int,
        atom_count: int,
        t_pairs: Sequence[Iterable[tuple[int, int]]],
        diag_sets: dict[tuple[int, int], Iterable[int]],
        atom_names: list[str] | None = None,
    ) -> "AtomStructure":
        """Build from explicit relation pairs: (a, b) meaning a is an i-successor of b."""
        if len(t_pairs) != dim:
            raise InvalidArgumentError("need one pair list per index")
        t_cols = [[0] * atom_count for _ in range(dim)]
        for i, pairs in enumerate(t_pairs):
            for (a, b) in pairs:
                if not (0 <= a < atom_count and 0 <= b < atom_count):
                    raise InvalidArgumentError(f"pair ({a},{b}) out of range")
                t_cols[i][b] |= 1 << a
        diag = {}
        for key, atoms in diag_sets.items():
            i, j = key
            mask = 0
            for a in atoms:
                if not (0 <= a < atom_count):
                    raise InvalidArgumentError(f"diagonal atom {a} out of range")
                mask |= 1 << a
            diag[(i, j)] = mask
        return cls(dim, atom_count, t_cols, diag, atom_names=atom_names)

    @classmethod
    def from_faces(
        cls,
        dim: int,
        faces: Sequence[Sequence[Hashable]],
        diag_sets: dict[tuple[int, int], Iterable[int]],
        atom_names: list[str] | None = None,
    ) -> "AtomStructure":
        """Build from agreement faces: a ~_i b iff faces[i][a] == faces[i][b].

        Each relation is then an equivalence; successor masks are shared
        per class, which keeps memory flat at thousands of atoms.
        """
        if len(faces) != dim:
            raise InvalidArgumentError("need one face list per index")
        atom_count = len(faces[0]) if faces else 0
        t_cols: list[list[int]] = []
        face_lists: list[list[Hashable]] = []
        for i in range(dim):
            col_faces = list(faces[i])
            if len(col_faces) != atom_count:
                raise InvalidArgumentError(f"face list {i} has wrong length")
            classes: dict[Hashable, int] = {}
            for a, fid in enumerate(col_faces):
                classes[fid] = classes.get(fid, 0) | (1 << a)
            t_cols.append([classes[fid] for fid in col_faces])
            face_lists.append(col_faces)
        diag = {}
        for key, atoms in diag_sets.items():
            mask = 0
            for a in atoms:
                mask |= 1 << a
            diag[key] = mask
        return cls(dim, atom_count, t_cols, diag, faces=face_lists, atom_names=atom_names)

    # -- accessors ---------------------------------------------------------

    @property
    def top(self) -> int:
        return (1 << self.atom_count) - 1

    def successors(self, i: int, b: int) -> int:
        """Bitset of i-successors of atom b (the cylindrifier of {b})."""
        return self.t_cols[i][b]

    def related(self, i: int, a: int, b: int) -> bool:
        return bool(self.t_cols[i][b] >> a & 1)

    def diag_mask(self, i: int, j: int) -> int:
        """Diagonal bitset for any index order; the (i,i) diagonal is everything."""
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise InvalidArgumentError(f"diagonal index ({i},{j}) out of range")
        if i == j:
            return self.top
        key = (i, j) if i < j else (j, i)
        return self.diag[key]

    def t_pairs(self, i: int) -> list[tuple[int, int]]:
        out = []
        for b in range(self.atom_count):
            mask = self.t_cols[i][b]
            while mask:
                low = mask & -mask
                out.append((low.bit_length() - 1, b))
                mask ^= low
        return out

    def atom_name(self, a: int) -> str:
        if self.atom_names is not None:
            return self.atom_names[a]
        return str(a)

    def relation_equal(self, other: "AtomStructure") -> bool:
        """Literal equality of dimensions, relations and diagonals."""
        return (
            self.dim == other.dim
            and self.atom_count == other.atom_count
            and self.t_cols == other.t_cols
            and self.diag == other.diag
        )

    def __repr__(self) -> str:
        return f"AtomStructure(dim={self.dim}, atoms={self.atom_count})"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": self.atom_count,
            "T": [sorted(self.t_pairs(i)) for i in range(self.dim)],
            "D": {
                f"{i},{j}": sorted(
                    a for a in range(self.atom_count) if self.diag[(i, j)] >> a & 1
                )
                for (i, j) in sorted(self.diag)
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "AtomStructure":
        try:
            dim = int(d["dim"])
            atom_count = int(d["atoms"])
            t_pairs = [[(int(a), int(b)) for (a, b) in pairs] for pairs in d["T"]]
            diag_sets = {}
            for key, atoms in d["D"].items():
                i, j = (int(part) for part in key.split(","))
                diag_sets[(i, j)] = [int(a) for a in atoms]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"bad atom-structure JSON: {exc}") from exc
        return cls.from_pairs(dim, atom_count, t_pairs, diag_sets)


# ---------------------------------------------------------------------------
# isomorphism


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _refine_signatures(s: AtomStructure) -> list:
    """Iterated neighbourhood colouring (1-dimensional refinement).

    Start from diagonal membership plus per-index successor/predecessor
    counts, then repeatedly fold in the multiset of neighbour colours
    until the class count stabilizes.  Isomorphic atoms always end up in
    equal colour classes (the colouring is invariant), so distinct
    signatures prune the search hard.
    """
    n = s.atom_count
    if s.faces is not None:
        pred = s.t_cols  # face relations are symmetric
    else:
        pred = [[0] * n for _ in range(s.dim)]
        for i in range(s.dim):
            for b in range(n):
                for a in _bits(s.t_cols[i][b]):
                    pred[i][a] |= 1 << b
    colour = []
    for a in range(n):
        diag_vec = tuple(bool(s.diag[key] >> a & 1) for key in sorted(s.diag))
        degs = tuple(
            (s.t_cols[i][a].bit_count(), pred[i][a].bit_count())
            for i in range(s.dim)
        )
        colour.append((diag_vec, degs))
    classes = len(set(colour))
    while True:
        # ids must not depend on atom order, or the colouring would stop
        # being a permutation invariant
        ids = {key: k for k, key in enumerate(sorted(set(colour), key=repr))}
        code = [ids[c] for c in colour]
        new_colour = []
        for a in range(n):
            neigh = tuple(
                (
                    tuple(sorted(code[x] for x in _bits(s.t_cols[i][a]))),
                    tuple(sorted(code[x] for x in _bits(pred[i][a]))),
                )
                for i in range(s.dim)
            )
            new_colour.append((code[a], neigh))
        new_classes = len(set(new_colour))
        colour = new_colour
        if new_classes == classes:
            return colour
        classes = new_classes


def _signature_codes(s1: AtomStructure, s2: AtomStructure) -> tuple[list[int], list[int]] | None:
    """Shared integer codes for the refined signatures of both structures.

    Returns None when the signature multisets differ (no isomorphism).
    """
    sig1 = [repr(c) for c in _refine_signatures(s1)]
    sig2 = [repr(c) for c in _refine_signatures(s2)]
    if sorted(sig1) != sorted(sig2):
        return None
    ids = {key: k for k, key in enumerate(sorted(set(sig1)))}
    return [ids[c] for c in sig1], [ids[c] for c in sig2]


def _iso_faces(s1: AtomStructure, s2: AtomStructure) -> list[int] | None:
    """Exact isomorphism search when both structures carry face ids.

    A bijection respects each relation iff it maps i-faces to i-faces
    bijectively, so the partial map only has to keep per-index face
    dictionaries consistent — O(dim) work per assignment, which scales to
    the large generated structures.
    """
    n = s1.atom_count
    codes = _signature_codes(s1, s2)
    if codes is None:
        return None
    code1, code2 = codes
    by_code: dict[int, list[int]] = {}
    for b in range(n):
        by_code.setdefault(code2[b], []).append(b)
    face_fwd: list[dict] = [dict() for _ in range(s1.dim)]
    face_bwd: list[dict] = [dict() for _ in range(s1.dim)]
    mapping = [-1] * n
    used = [False] * n
    # most-constrained first: smallest signature class, then atom order
    order = sorted(range(n), key=lambda a: (len(by_code[code1[a]]), code1[a], a))
    if n == 0:
        return []

    def undo(touched: list) -> None:
        for (i, fa, fb) in touched:
            del face_fwd[i][fa]
            del face_bwd[i][fb]

    def try_assign(a: int, b: int) -> list | None:
        """Extend the face dictionaries for a -> b, or None if inconsistent."""
        touched: list = []
        for i in range(s1.dim):
            fa, fb = s1.faces[i][a], s2.faces[i][b]
            cur = face_fwd[i].get(fa)
            if cur is not None:
                if cur != fb:
                    undo(touched)
                    return None
                continue
            if fb in face_bwd[i]:
                undo(touched)
                return None
            face_fwd[i][fa] = fb
            face_bwd[i][fb] = fa
            touched.append((i, fa, fb))
        for key in s1.diag:
            if (s1.diag[key] >> a & 1) != (s2.diag[key] >> b & 1):
                undo(touched)
                return None
        mapping[a] = b
        used[b] = True
        return touched

    # explicit stack: recursion depth would be one frame per atom, which
    # overflows on the generated structures with thousands of atoms
    idx = 0
    cand: list = [None] * n
    applied: list = [None] * n
    cand[0] = iter(by_code[code1[order[0]]])
    while True:
        advanced = False
        for b in cand[idx]:
            if used[b]:
                continue
            touched = try_assign(order[idx], b)
            if touched is None:
                continue
            applied[idx] = (b, touched)
            idx += 1
            if idx == n:
                return mapping
            cand[idx] = iter(by_code[code1[order[idx]]])
            advanced = True
            break
        if advanced:
            continue
        idx -= 1
        if idx < 0:
            return None
        b, touched = applied[idx]
        mapping[order[idx]] = -1
        used[b] = False
        undo(touched)


def _iso_generic(s1: AtomStructure, s2: AtomStructure) -> list[int] | None:
    """Backtracking over atom bijections with signature pruning (small frames)."""
    n = s1.atom_count
    if n > ISO_BACKTRACK_ATOM_CAP:
        raise ResourceLimitError(
            f"generic isomorphism backtracking is capped at {ISO_BACKTRACK_ATOM_CAP} atoms "
            f"(got {n}); only face-built structures are searched beyond that",
            limit_name="iso_backtrack_atom_cap",
            limit_value=ISO_BACKTRACK_ATOM_CAP,
        )
    codes = _signature_codes(s1, s2)
    if codes is None:
        return None
    code1, code2 = codes
    mapping = [-1] * n
    used = [False] * n

    def consistent(a: int, b: int) -> bool:
        for key in s1.diag:
            if (s1.diag[key] >> a & 1) != (s2.diag[key] >> b & 1):
                return False
        for i in range(s1.dim):
            if s1.related(i, a, a) != s2.related(i, b, b):
                return False
            for a2 in range(n):
                b2 = mapping[a2]
                if b2 == -1 or a2 == a:
                    continue
                if s1.related(i, a, a2) != s2.related(i, b, b2):
                    return False
                if s1.related(i, a2, a) != s2.related(i, b2, b):
                    return False
        return True

    def backtrack(a: int) -> bool:
        if a == n:
            return True
        for b in range(n):
            if used[b] or code1[a] != code2[b]:
                continue
            if not consistent(a, b):
                continue
            mapping[a] = b
            used[b] = True
            if backtrack(a + 1):
                return True
            mapping[a] = -1
            used[b] = False
        return False

    if backtrack(0):
        return mapping
    return None


def find_isomorphism(s1: AtomStructure, s2: AtomStructure) -> list[int] | None:
    """An atom bijection preserving all relations and diagonals, or None.

    Face-built structures use the scalable face-dictionary search; others
    fall back to capped generic backtracking.
    """
    if s1.dim != s2.dim or s1.atom_count != s2.atom_count:
        return None
    if s1.faces is not None and s2.faces is not None:
        result = _iso_faces(s1, s2)
    else:
        result = _iso_generic(s1, s2)
    if result is not None:
        verify_isomorphism(s1, s2, result)
    return result


def are_isomorphic(s1: AtomStructure, s2: AtomStructure) -> bool:
    return find_isomorphism(s1, s2) is not None


def verify_isomorphism(s1: AtomStructure, s2: AtomStructure, mapping: list[int]) -> None:
    """Raise if mapping is not a relation-and-diagonal-preserving bijection."""
    n = s1.atom_count
    if sorted(mapping) != list(range(n)):
        raise InvalidArgumentError("mapping is not a bijection")
    for key in s1.diag:
        img = 0
        for a in _bits(s1.diag[key]):
            img |= 1 << mapping[a]
        if img != s2.diag[key]:
            raise InvalidArgumentError(f"diagonal {key} not preserved")
    if s1.faces is not None and s2.faces is not None:
        # face relations: a ~_i b iff equal face ids, so it is enough that
        # the induced face maps are functions and injective per index
        for i in range(s1.dim):
            fwd: dict = {}
            bwd: dict = {}
            for a in range(n):
                fa, fb = s1.faces[i][a], s2.faces[i][mapping[a]]
                if fwd.setdefault(fa, fb) != fb or bwd.setdefault(fb, fa) != fa:
                    raise InvalidArgumentError(f"relation {i} not preserved at atom {a}")
        return
    for i in range(s1.dim):
        for b in range(n):
            img = 0
            for a in _bits(s1.t_cols[i][b]):
                img |= 1 << mapping[a]
            if img != s2.t_cols[i][mapping[b]]:
                raise InvalidArgumentError(f"relation {i} not preserved at atom {b}")
