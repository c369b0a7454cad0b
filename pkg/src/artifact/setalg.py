"""Concrete cylindric set algebras over finite bases, full or relativized.

A space is a nonempty set V of length-n sequences over a finite base U.
Its algebra is the powerset of V: the i-th cylindrifier relates sequences
agreeing everywhere except coordinate i (intersected with V), and the
(i,j) diagonal collects the sequences with equal i-th and j-th entries.
Atoms are the singletons, so the whole thing plugs straight into the
bitset algebra machinery.

Sequences are encoded as base-|U| integers (coordinate 0 least
significant) for serialization; in-memory they are tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .bao import FiniteBao
from .errors import InvalidArgumentError
from .structures import AtomStructure


@dataclass(frozen=True)
class SetAlgebraSpace:
    base_size: int
    dim: int
    unit: tuple[tuple[int, ...], ...]  # sorted, deduplicated

    def __post_init__(self):
        if self.base_size < 1 or self.dim < 1:
            raise InvalidArgumentError("base size and dimension must be >= 1")
        if not self.unit:
            raise InvalidArgumentError("unit must be nonempty")
        for s in self.unit:
            if len(s) != self.dim or any(not 0 <= v < self.base_size for v in s):
                raise InvalidArgumentError(f"sequence {s} does not fit the space")
        if list(self.unit) != sorted(set(self.unit)):
            raise InvalidArgumentError("unit must be sorted and duplicate-free")

    @property
    def is_full(self) -> bool:
        return len(self.unit) == self.base_size ** self.dim

    def index_of(self, s: tuple[int, ...]) -> int:
        lo, hi = 0, len(self.unit)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.unit[mid] < s:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.unit) and self.unit[lo] == s:
            return lo
        raise KeyError(s)


def space_from_sequences(base_size: int, dim: int, seqs) -> SetAlgebraSpace:
    return SetAlgebraSpace(base_size, dim, tuple(sorted(set(map(tuple, seqs)))))


def full_space(base_size: int, dim: int) -> SetAlgebraSpace:
    """The space with unit = all of ^dim U."""
    if base_size < 1 or dim < 1:
        raise InvalidArgumentError("base size and dimension must be >= 1")
    return space_from_sequences(
        base_size, dim, product(range(base_size), repeat=dim))


def union_of_squares_space(base_size: int, dim: int, bases) -> SetAlgebraSpace:
    """Unit = union of full cubes ^dim(B) for each provided B ⊆ U.

    Such units are exactly the locally square ones, hence handy test
    material; no further theory is attached to them.
    """
    seqs = set()
    for base in bases:
        base = tuple(base)
        if any(not 0 <= v < base_size for v in base):
            raise InvalidArgumentError(f"cube base {base} outside the base set")
        seqs.update(product(base, repeat=dim))
    return space_from_sequences(base_size, dim, seqs)


def c4_failure_space() -> SetAlgebraSpace:
    """Stored witness: a relativized unit whose cylindrifiers do not commute.

    V = {(0,0), (0,1), (1,1)} over a 2-element base: cylindrifying {(0,0)}
    at 1 then 0 reaches all of V, the other order stops at {(0,0),(0,1)}.
    """
    return space_from_sequences(2, 2, [(0, 0), (0, 1), (1, 1)])


def ops_on(space: SetAlgebraSpace) -> FiniteBao:
    """The (relativized) set algebra of the space as a bitset algebra.

    Agreement-off-i is an equivalence on V, so the structure is built from
    faces: the face of s at i is s with coordinate i blanked.
    """
    faces = []
    for i in range(space.dim):
        faces.append([s[:i] + (-1,) + s[i + 1:] for s in space.unit])
    diag_sets = {}
    for i in range(space.dim):
        for j in range(i + 1, space.dim):
            diag_sets[(i, j)] = [
                k for k, s in enumerate(space.unit) if s[i] == s[j]
            ]
    names = [",".join(map(str, s)) for s in space.unit]
    structure = AtomStructure.from_faces(space.dim, faces, diag_sets, atom_names=names)
    kind = "full" if space.is_full else "relativized"
    algebra = FiniteBao(structure, provenance=f"{kind}-set-algebra(|U|={space.base_size}, n={space.dim})")
    algebra.space = space  # type: ignore[attr-defined]
    return algebra


def element_to_sequences(space: SetAlgebraSpace, mask: int) -> list[tuple[int, ...]]:
    out = []
    k = 0
    m = mask
    while m:
        if m & 1:
            out.append(space.unit[k])
        m >>= 1
        k += 1
    return out


def sequences_to_element(space: SetAlgebraSpace, seqs) -> int:
    mask = 0
    for s in seqs:
        mask |= 1 << space.index_of(tuple(s))
    return mask


# ---------------------------------------------------------------------------
# substitutions and closure kinds


def _replacement(i: int, j: int):
    """The map sending i to j and fixing everything else."""
    def tau(k: int) -> int:
        return j if k == i else k
    return tau


def _transposition(i: int, j: int):
    def tau(k: int) -> int:
        if k == i:
            return j
        if k == j:
            return i
        return k
    return tau


def compose_with(s: tuple[int, ...], tau) -> tuple[int, ...]:
    """s∘tau, i.e. the sequence with entry s[tau(k)] at position k."""
    return tuple(s[tau(k)] for k in range(len(s)))


def unit_closure_kind(space: SetAlgebraSpace) -> set[str]:
    """Which closure conditions the unit satisfies, checked directly.

    "diagonalizable": composing any member with any replacement [i|j]
    stays inside the unit.  "locally_square": composing with any
    transformation of the coordinate set stays inside (implies the
    former; both are still checked independently).
    """
    members = set(space.unit)
    kinds = set()
    diagonalizable = True
    for s in space.unit:
        for i in range(space.dim):
            for j in range(space.dim):
                if compose_with(s, _replacement(i, j)) not in members:
                    diagonalizable = False
                    break
            if not diagonalizable:
                break
        if not diagonalizable:
            break
    if diagonalizable:
        kinds.add("diagonalizable")
    locally_square = True
    for s in space.unit:
        for tau_vec in product(range(space.dim), repeat=space.dim):
            if tuple(s[t] for t in tau_vec) not in members:
                locally_square = False
                break
        if not locally_square:
            break
    if locally_square:
        kinds.add("locally_square")
    return kinds


def substitution_op(space: SetAlgebraSpace, kind: str, i: int, j: int):
    """Substitution operator on elements of ops_on(space).

    The operator sends X to {s in V : s∘tau in X} where tau is the
    transposition [i,j] or the replacement [i|j] (i goes to j).  The
    defining condition reads membership in X, so sequences whose
    composite leaves the unit drop out.  On full units the transposition
    case coincides with the polyadic image semantics (tested).
    """
    if not (0 <= i < space.dim and 0 <= j < space.dim):
        raise InvalidArgumentError(f"substitution indices ({i},{j}) out of range")
    if kind == "transposition":
        tau = _transposition(i, j)
    elif kind == "replacement":
        tau = _replacement(i, j)
    else:
        raise InvalidArgumentError(f"unknown substitution kind {kind!r}")
    members = {s: k for k, s in enumerate(space.unit)}
    source_bit: list[int | None] = []
    for s in space.unit:
        t = compose_with(s, tau)
        source_bit.append(members.get(t))

    def op(mask: int) -> int:
        out = 0
        for k, src in enumerate(source_bit):
            if src is not None and (mask >> src) & 1:
                out |= 1 << k
        return out

    return op


def weakened_commutativity_check(algebra: FiniteBao) -> tuple[bool, tuple | None]:
    """Sandwich law: cyl(i, cyl(j, cyl(i, x))) = cyl(j, cyl(i, cyl(j, x))).

    Locally square units satisfy this even where plain commutativity of
    cylindrifiers fails (changing one coordinate twice lets the walk
    re-enter whichever cube the target lives in).  Checked on atoms —
    both sides are compositions of completely additive operators.
    Returns (holds, witness-or-None).
    """
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            for a in range(algebra.atom_count):
                x = 1 << a
                lhs = algebra.cyl(i, algebra.cyl(j, algebra.cyl(i, x)))
                rhs = algebra.cyl(j, algebra.cyl(i, algebra.cyl(j, x)))
                if lhs != rhs:
                    return False, (i, j, a)
    return True, None


# ---------------------------------------------------------------------------
# serialization


def seq_to_int(space: SetAlgebraSpace, s: tuple[int, ...]) -> int:
    code = 0
    for v in reversed(s):
        code = code * space.base_size + v
    return code


def int_to_seq(base_size: int, dim: int, code: int) -> tuple[int, ...]:
    out = []
    for _ in range(dim):
        out.append(code % base_size)
        code //= base_size
    if code:
        raise InvalidArgumentError("sequence code out of range")
    return tuple(out)


def space_to_json_dict(space: SetAlgebraSpace) -> dict:
    return {
        "base": space.base_size,
        "dim": space.dim,
        "unit": sorted(seq_to_int(space, s) for s in space.unit),
    }


def space_from_json_dict(d: dict) -> SetAlgebraSpace:
    try:
        base = int(d["base"])
        dim = int(d["dim"])
        seqs = [int_to_seq(base, dim, int(code)) for code in d["unit"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"bad space JSON: {exc}") from exc
    return space_from_sequences(base, dim, seqs)
