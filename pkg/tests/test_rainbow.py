from itertools import combinations, permutations, product

import pytest

from artifact.bao import check_ca_axioms, complex_algebra
from artifact.errors import InvalidArgumentError, ResourceLimitError
from artifact.rainbow import (
    ColouredGraph,
    RainbowSig,
    _flip,
    _triangle_ok,
    atom_from_assignment,
    colour_from_name,
    colour_name,
    cone,
    enumerate_atoms,
    is_forbidden_triple,
    rainbow_atom_structure,
    rainbow_signature,
)
from artifact.structures import AtomStructure, are_isomorphic


# --- signature ---

def test_inventory_four_greens_three_reds():
    sig = rainbow_signature(4, 3, 3)
    assert sig.numbered_greens == [("g", 1)]
    assert len(sig.tinted_greens) == 4
    assert sig.whites == [("w", 0), ("w", 1)]
    assert len(sig.reds) == 6  # ordered pairs of distinct indices
    assert len(sig.edge_labels()) == 13


def test_signature_validation():
    with pytest.raises(InvalidArgumentError):
        RainbowSig(1, (0,), (0, 1))
    with pytest.raises(InvalidArgumentError):
        RainbowSig(3, (1, 0), (0, 1))
    with pytest.raises(InvalidArgumentError):
        rainbow_signature(2, 2, 3).check_colour(("g0", 17))
    with pytest.raises(InvalidArgumentError):
        rainbow_signature(2, 2, 3).check_colour(("r", 0, 0))
    with pytest.raises(InvalidArgumentError):
        rainbow_signature(2, 2, 3).check_colour(("purple", 1))


# --- forbidden triples ---

def test_doubled_numbered_green_against_its_white():
    sig = rainbow_signature(4, 3, 3)
    assert is_forbidden_triple(sig, ("g", 1), ("g", 1), ("w", 1))
    # any arrangement of the same multiset
    assert is_forbidden_triple(sig, ("g", 1), ("w", 1), ("g", 1))
    assert is_forbidden_triple(sig, ("w", 1), ("g", 1), ("g", 1))
    # the white must carry the same number
    assert not is_forbidden_triple(sig, ("g", 1), ("g", 1), ("w", 0))


def test_matching_red_triple_allowed():
    sig = rainbow_signature(4, 3, 3)
    assert not is_forbidden_triple(sig, ("r", 0, 1), ("r", 1, 2), ("r", 0, 2))
    # broken index chain
    assert is_forbidden_triple(sig, ("r", 0, 1), ("r", 0, 1), ("r", 0, 1))
    assert is_forbidden_triple(sig, ("r", 0, 1), ("r", 1, 2), ("r", 2, 0))


def test_green_triangles_forbidden():
    sig = rainbow_signature(4, 3, 3)
    greens = sig.numbered_greens + sig.tinted_greens
    for c1, c2, c3 in product(greens, repeat=3):
        assert is_forbidden_triple(sig, c1, c2, c3)


def test_two_tinted_greens_against_zeroth_white():
    sig = rainbow_signature(4, 3, 3)
    assert is_forbidden_triple(sig, ("g0", 2), ("g0", 3), ("w", 0))
    assert is_forbidden_triple(sig, ("g0", 2), ("g0", 2), ("w", 0))
    assert not is_forbidden_triple(sig, ("g0", 2), ("g0", 3), ("w", 1))


def test_ordered_rule():
    sig = rainbow_signature(range(-2, 1), range(3), 3, ordered_mode=True)
    # layout (x,y)=first, (y,z)=second, (x,z)=third: the two tinted edges
    # share y, apexes are x (tint -1) and z (tint 0), red read from x to z
    assert is_forbidden_triple(sig, ("g0", -1), ("g0", 0), ("r", 1, 0))
    assert not is_forbidden_triple(sig, ("g0", -1), ("g0", 0), ("r", 0, 1))
    # equal tints can never share a red edge in ordered mode
    assert is_forbidden_triple(sig, ("g0", 0), ("g0", 0), ("r", 0, 1))
    # without ordered mode the same triples are allowed
    plain = rainbow_signature(range(-2, 1), range(3), 3)
    assert not is_forbidden_triple(plain, ("g0", -1), ("g0", 0), ("r", 1, 0))


def _relabelled(labels, perm):
    out = {}
    for (u, v), c in labels.items():
        pu, pv = perm[u], perm[v]
        if pu < pv:
            out[(pu, pv)] = c
        else:
            out[(pv, pu)] = _flip(c)
    return out


@pytest.mark.parametrize("ordered", [False, True])
def test_triangle_verdict_is_relabelling_invariant(ordered):
    sig = rainbow_signature(range(-1, 1), range(3), 3, ordered_mode=ordered)
    stock = sig.edge_labels()
    for c1, c2, c3 in product(stock, repeat=3):
        labels = {(0, 1): c1, (1, 2): c2, (0, 2): c3}
        verdict = _triangle_ok(sig, labels, 0, 1, 2)
        for perm in permutations(range(3)):
            assert _triangle_ok(sig, _relabelled(labels, perm), 0, 1, 2) == verdict, (
                c1, c2, c3, perm)


# --- enumeration ---

def test_atom_count_four_greens_three_reds():
    s = rainbow_atom_structure(4, 3, 3)
    # arithmetic cross-check: 13 labels; 3-node graphs = 13^3 minus
    # all-green (5^3), doubled g_1 vs w_1 (3 placements), tinted pair vs
    # w_0 (3 placements x 4^2 tints), broken reds (6^3 minus the 6
    # injective corner assignments)
    three_node = 13**3 - 5**3 - 3 - 3 * 16 - (6**3 - 6)
    assert s.atom_count == 1 + 3 * 13 + three_node == 1851


def test_ordered_window_count_matches_direct_product():
    sig = rainbow_signature(range(-2, 1), range(3), 3, ordered_mode=True)
    stock = sig.edge_labels()
    direct = sum(
        _triangle_ok(sig, {(0, 1): c1, (1, 2): c2, (0, 2): c3}, 0, 1, 2)
        for c1, c2, c3 in product(stock, repeat=3)
    )
    s = rainbow_atom_structure(sig.green_tints, sig.red_indices, 3, ordered_mode=True)
    assert s.atom_count == 1 + 3 * len(stock) + direct


def oracle_atom_count(sig):
    """Independent enumeration: all surjections onto all consistent
    complete graphs, deduplicated by minimizing over node bijections."""
    n = sig.n
    stock = sig.edge_labels()
    graphs_by_size = {}
    for m in range(1, n + 1):
        edges = list(combinations(range(m), 2))
        out = []
        for combo in product(stock, repeat=len(edges)):
            lab = dict(zip(edges, combo))
            if all(_triangle_ok(sig, lab, *t) for t in combinations(range(m), 3)):
                out.append(lab)
        graphs_by_size[m] = out
    seen = set()
    for m in range(1, n + 1):
        for a in product(range(m), repeat=n):
            if set(a) != set(range(m)):
                continue
            for lab in graphs_by_size[m]:
                key = min(
                    (
                        tuple(perm[x] for x in a),
                        tuple(sorted(_relabelled(lab, perm).items())),
                    )
                    for perm in permutations(range(m))
                )
                seen.add(key)
    return len(seen)


def test_enumeration_matches_surjection_oracle():
    for ordered in (False, True):
        sig = rainbow_signature(2, 2, 3, ordered_mode=ordered)
        assert len(enumerate_atoms(sig)) == oracle_atom_count(sig)


def test_no_atom_has_a_green_triangle():
    s = rainbow_atom_structure(3, 2, 3)
    for atom in s.atoms:
        labels = dict(atom.labels)
        for t in combinations(range(atom.node_count), 3):
            tri = [labels[e] for e in combinations(t, 2)]
            assert not all(c[0] in ("g", "g0") for c in tri)


def test_collapsed_coordinates_are_the_diagonal():
    s = rainbow_atom_structure(2, 2, 3)
    for i in range(3):
        for j in range(i + 1, 3):
            mask = 0
            for k, atom in enumerate(s.atoms):
                if atom.collapsed(i, j):
                    mask |= 1 << k
            assert mask == s.diag_mask(i, j)


def test_relations_reflexive():
    s = rainbow_atom_structure(2, 2, 3)
    for i in range(3):
        for a in range(s.atom_count):
            assert s.related(i, a, a)


def test_atom_counts_monotone_in_parameters():
    base = rainbow_atom_structure(2, 2, 3).atom_count
    more_greens = rainbow_atom_structure(3, 2, 3).atom_count
    even_more = rainbow_atom_structure(4, 2, 3).atom_count
    more_reds = rainbow_atom_structure(2, 3, 3).atom_count
    assert base <= more_greens <= even_more
    assert base <= more_reds


def test_atom_cap():
    with pytest.raises(ResourceLimitError) as exc:
        rainbow_atom_structure(4, 3, 3, atom_cap=100)
    assert exc.value.limit_name == "atom_cap"
    assert exc.value.limit_value == 100
    assert "100" in str(exc.value)


# --- the structure and its algebra ---

def test_axioms_pass_small():
    s = rainbow_atom_structure(2, 2, 3)
    report = check_ca_axioms(complex_algebra(s))
    assert report.all_passed


def test_axioms_pass_four_greens_three_reds():
    s = rainbow_atom_structure(4, 3, 3)
    assert check_ca_axioms(complex_algebra(s)).all_passed


def test_axioms_pass_ordered_mode():
    s = rainbow_atom_structure(range(-2, 1), range(3), 3, ordered_mode=True)
    assert check_ca_axioms(complex_algebra(s)).all_passed


def test_structure_isomorphic_to_shuffled_relabelling():
    import random

    s = rainbow_atom_structure(4, 3, 3)
    order = list(range(s.atom_count))
    random.Random(11).shuffle(order)
    faces = [[s.atoms[a].restrict(i) for a in order] for i in range(3)]
    diag_sets = {
        (i, j): [k for k, a in enumerate(order) if s.atoms[a].collapsed(i, j)]
        for i in range(3)
        for j in range(i + 1, 3)
    }
    shuffled = AtomStructure.from_faces(3, faces, diag_sets)
    assert are_isomorphic(s, shuffled)


# --- cones ---

def white_base(sig):
    g = ColouredGraph(range(sig.n - 1))
    for u, v in combinations(range(sig.n - 1), 2):
        g = g.with_label(u, v, ("w", 0))
    return g


def test_cone_shape():
    sig = rainbow_signature(4, 3, 3)
    c = cone(sig, white_base(sig), 2)
    greens = [col for col in c.labels.values() if col[0] in ("g", "g0")]
    assert len(greens) == sig.n - 1
    assert c.label(0, 2) == ("g0", 2)
    assert c.label(1, 2) == ("g", 1)
    assert c.consistent(sig)
    assert c.hyper[(0, 1)] == sig.yellow_shades[0]


def test_cone_argument_errors():
    sig = rainbow_signature(4, 3, 3)
    with pytest.raises(InvalidArgumentError):
        cone(sig, white_base(sig), 9)
    with pytest.raises(InvalidArgumentError):
        cone(sig, ColouredGraph([0]), 0)
    green_base = ColouredGraph([0, 1]).with_label(0, 1, ("g", 1))
    with pytest.raises(InvalidArgumentError):
        cone(sig, green_base, 0)


def _twin_cones(sig, t1, t2):
    """Two cones over the same white base; apex edge left open."""
    g = cone(sig, white_base(sig), t1)
    apex1 = g.nodes[-1]
    apex2 = apex1 + 1
    g = g.with_label(0, apex2, ("g0", t2))
    for j in range(1, sig.n - 1):
        g = g.with_label(j, apex2, ("g", j))
    return g, apex1, apex2


def test_twin_cone_apexes_force_a_red():
    sig = rainbow_signature(4, 3, 3)
    g, a1, a2 = _twin_cones(sig, 0, 1)
    verdicts = {}
    for c in sig.edge_labels():
        verdicts[c] = g.with_label(a1, a2, c).consistent(sig)
    for c, ok in verdicts.items():
        assert ok == (c[0] == "r"), c
    assert any(verdicts.values())


def test_ordered_chain_first_indices_strictly_decrease():
    # three cones on one base, tints 0 > -1 > -2; every consistent red
    # completion of the three apex edges must assign strictly descending
    # red indices to the apexes in tint order
    sig = rainbow_signature(range(-2, 1), range(5), 3, ordered_mode=True)
    g = cone(sig, white_base(sig), 0)
    apex = {0: g.nodes[-1]}
    for k, tint in enumerate((-1, -2), start=1):
        a = g.nodes[-1] + 1
        g = g.with_label(0, a, ("g0", tint)).with_label(1, a, ("g", 1))
        apex[-k] = a
    completions = []
    for r21 in sig.reds:
        for r32 in sig.reds:
            for r31 in sig.reds:
                h = (
                    g.with_label(apex[-1], apex[0], r21)
                    .with_label(apex[-2], apex[-1], r32)
                    .with_label(apex[-2], apex[0], r31)
                )
                if h.consistent(sig):
                    completions.append((r21, r32))
    assert completions
    for r21, r32 in completions:
        # first index read from the newer apex: strictly decreasing
        assert r32[1] < r21[1]


# --- board atoms ---

def test_atom_from_assignment():
    sig = rainbow_signature(4, 3, 3)
    s = rainbow_atom_structure(4, 3, 3)
    c = cone(sig, white_base(sig), 2)
    atom = atom_from_assignment(sig, c, (0, 1, 2))
    assert atom is not None
    assert atom.node_count == 3
    assert atom in s.atom_index
    assert dict(atom.labels)[(0, 2)] == ("g0", 2)
    squashed = atom_from_assignment(sig, c, (0, 0, 2))
    assert squashed.node_count == 2
    assert squashed.collapsed(0, 1)
    open_graph = ColouredGraph([0, 1, 2]).with_label(0, 1, ("w", 0))
    assert atom_from_assignment(sig, open_graph, (0, 1, 2)) is None
    with pytest.raises(InvalidArgumentError):
        atom_from_assignment(sig, c, (0, 1))


def test_restriction_defines_relations():
    # brute-force comparison on a small structure: related at i iff the
    # deleted-coordinate quotients agree
    s = rainbow_atom_structure(2, 2, 3)
    for i in range(3):
        for a, atom_a in enumerate(s.atoms):
            for b, atom_b in enumerate(s.atoms):
                assert s.related(i, a, b) == (atom_a.restrict(i) == atom_b.restrict(i))


# --- serialization ---

def test_colour_names_round_trip():
    for c in [("g", 1), ("g0", -2), ("w", 0), ("r", 0, 1), ("r", 2, 0)]:
        assert colour_from_name(colour_name(c)) == c
    with pytest.raises(InvalidArgumentError):
        colour_from_name("blue:1")
    with pytest.raises(InvalidArgumentError):
        colour_from_name("r:1")


def test_coloured_graph_json_round_trip():
    sig = rainbow_signature(4, 3, 3)
    g = cone(sig, white_base(sig), 1)
    d = g.to_json_dict()
    back = ColouredGraph.from_json_dict(d)
    assert back == g
    assert d["shaded"][0]["shade"] == "y:0"


def test_coloured_graph_dot():
    sig = rainbow_signature(4, 3, 3)
    g = cone(sig, white_base(sig), 1)
    dot = g.to_dot()
    assert "g0:1" in dot and "graph coloured {" in dot


def test_oriented_label_reading():
    g = ColouredGraph([0, 1]).with_label(1, 0, ("r", 0, 1))
    assert g.label(1, 0) == ("r", 0, 1)
    assert g.label(0, 1) == ("r", 1, 0)
