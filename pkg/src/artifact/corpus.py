"""Stored test structures: corrupted axiom-breakers and a small-frame corpus.

The three corrupted structures are deterministic edits of the 4-atom
structure of the full two-dimensional set algebra over a 2-element base;
each breaks exactly one law, with the others intact:

* drop a reflexive pair            -> the increasing law (C2) fails
* swap in a non-commuting partition -> commutativity (C4) fails
* fatten a diagonal                 -> diagonal separation (C7) fails

`small_structures` collects dimension-3 frames with at most 10 atoms for
solver cross-validation runs.
"""

from __future__ import annotations

import random

from .setalg import full_space, ops_on, space_from_sequences
from .structures import AtomStructure


def _base_structure() -> AtomStructure:
    """4 atoms: the sequences (0,0),(0,1),(1,0),(1,1) in sorted order."""
    from .bao import atom_structure_of

    return atom_structure_of(ops_on(full_space(2, 2)))


def corrupted_c2_structure() -> AtomStructure:
    s = _base_structure()
    t_cols = [list(col) for col in s.t_cols]
    t_cols[0][0] = 0  # relation emptied on atom 0: nothing reaches it at index 0
    return AtomStructure(s.dim, s.atom_count, t_cols, s.diag)


def corrupted_c4_structure() -> AtomStructure:
    s = _base_structure()
    # replace the index-0 relation by the equivalence {{0}, {1,2,3}}: still
    # reflexive, symmetric, transitive (C2/C3 intact) but it does not
    # commute with the index-1 partition {{0,1},{2,3}}
    t_cols = [list(col) for col in s.t_cols]
    t_cols[0] = [0b0001, 0b1110, 0b1110, 0b1110]
    return AtomStructure(s.dim, s.atom_count, t_cols, s.diag)


def corrupted_c7_structure() -> AtomStructure:
    s = _base_structure()
    # diagonal was {0, 3}; adding atom 1 puts two diagonal atoms (1 and 3)
    # into one index-0 class, so cylindrification merges them
    diag = dict(s.diag)
    diag[(0, 1)] |= 0b0010
    return AtomStructure(s.dim, s.atom_count, [list(c) for c in s.t_cols], diag)


def corrupted_structures() -> list[tuple[str, AtomStructure, str]]:
    """(name, structure, code of the axiom designed to fail)."""
    return [
        ("dropped-reflexive-pair", corrupted_c2_structure(), "C2"),
        ("non-commuting-partition", corrupted_c4_structure(), "C4"),
        ("fattened-diagonal", corrupted_c7_structure(), "C7"),
    ]


def random_structure(rng: random.Random, atom_count: int, dim: int = 3,
                     equivalences: bool = True) -> AtomStructure:
    """Seeded random frame.  With equivalences=True each relation is a random
    partition (so the increasing/absorption laws hold); otherwise arbitrary.
    """
    t_cols: list[list[int]] = []
    for _ in range(dim):
        if equivalences:
            labels = [rng.randrange(max(1, atom_count // 2)) for _ in range(atom_count)]
            classes: dict[int, int] = {}
            for a, lab in enumerate(labels):
                classes[lab] = classes.get(lab, 0) | (1 << a)
            t_cols.append([classes[lab] for lab in labels])
        else:
            t_cols.append([rng.getrandbits(atom_count) for _ in range(atom_count)])
    diag = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            diag[(i, j)] = rng.getrandbits(atom_count)
    return AtomStructure(dim, atom_count, t_cols, diag)


def small_structures() -> list[tuple[str, AtomStructure]]:
    """Frames of dimension 2 or 3 with <= 10 atoms for game cross-validation."""
    from .bao import atom_structure_of, relativize

    out: list[tuple[str, AtomStructure]] = []
    out.append(("full-2-2", atom_structure_of(ops_on(full_space(2, 2)))))
    out.append(("full-2-3", atom_structure_of(ops_on(full_space(2, 3)))))
    out.append(("full-3-2", atom_structure_of(ops_on(full_space(3, 2)))))
    one = AtomStructure(3, 1, [[1], [1], [1]], {(0, 1): 1, (0, 2): 1, (1, 2): 1})
    out.append(("one-atom-all-diagonal", one))
    lonely = AtomStructure(3, 1, [[1], [1], [1]], {(0, 1): 0, (0, 2): 0, (1, 2): 0})
    out.append(("one-atom-off-diagonal", lonely))
    # a relativized full algebra: knock one point out of the 2,3 cube
    space = space_from_sequences(
        2, 3, [s for s in full_space(2, 3).unit if s != (1, 1, 1)])
    out.append(("relativized-2-3-minus-point",
                atom_structure_of(ops_on(space))))
    rng = random.Random(2024)
    for k in range(2):
        out.append((f"random-partition-6-{k}", random_structure(rng, 6)))
    return out
