"""The explicit challenger script for rainbow structures.

Rather than searching the full game tree, the challenger plays the
rainbow structure's losing line directly: open with the all-white base,
then demand cone after cone over that same base with pairwise distinct
green tints — ascending, or descending when the signature is
order-sensitive.  Every fresh apex must take a colour against each
earlier apex, and the triangle rules squeeze those edges into reds whose
index pattern cannot stay consistent once the apexes outnumber the red
indices: some demand then has no legal answer at all.

The builder's alternatives are enumerated exhaustively at every step, so
a reported win is a complete refutation table.  When tints or the round
budget run out before the squeeze completes, the result is inconclusive
— a value, not an error.  When the node budget fills first, the
challenger deletes the oldest live apex before the next demand (the
node-reuse game allows exactly that), keeping the base intact.
"""

from __future__ import annotations

from ..errors import InvalidArgumentError
from ..networks import (
    atom_networks,
    challenge_is_valid,
    delete_node,
    response_networks,
)
from ..rainbow import ColouredGraph, RainbowAtom, RainbowStructure, cone
from .atomic import CertBuilder, GameResult, _Board, _challenge_json


def scripted_forall_rainbow(S, m: int, depth: int) -> GameResult:
    """Challenger-side scripted search on a rainbow structure: winner
    "forall" with a full refutation table, or "inconclusive"."""
    if not isinstance(S, RainbowStructure):
        raise InvalidArgumentError("the script needs a rainbow-built structure")
    if m < 1:
        raise InvalidArgumentError("node budget m must be >= 1")
    if depth < 0:
        raise InvalidArgumentError("depth must be >= 0")
    n = S.dim
    sig = S.sig
    game = {
        "kind": "F",
        "m": m,
        "k": None,
        "exact_history": False,
        "solver": "scripted",
    }

    base_nodes = tuple(range(n - 1))
    white = ("w", 0)
    base_labels = {
        (i, j): white for i in range(n - 1) for j in range(i + 1, n - 1)
    }
    base_graph = ColouredGraph(base_nodes, base_labels)
    opening_atom = RainbowAtom(
        tuple((i,) for i in range(n - 2)) + ((n - 2, n - 1),),
        tuple(sorted(base_labels.items())),
    )
    a0 = S.atom_index.get(opening_atom)
    if a0 is None:
        raise InvalidArgumentError("opening atom missing from this structure")

    tints = sorted(sig.green_tints, reverse=sig.ordered_mode)
    cone_atoms = []
    for t in tints:
        g = cone(sig, base_graph, t)
        atom = RainbowAtom(
            tuple((i,) for i in range(n)), tuple(sorted(g.labels.items()))
        )
        idx = S.atom_index.get(atom)
        if idx is None:
            raise InvalidArgumentError(f"cone atom for tint {t} missing")
        cone_atoms.append((t, idx))

    x_challenge = base_nodes + (base_nodes[-1],)
    board = _Board(S)
    cb = CertBuilder(board)
    budgets = {"responses": 0, "positions": 0, "rounds": 0}
    blockers: list[dict] = []

    def refute(N, apexes, tint_pos, rounds_left, round_no):
        """Entry index of a complete refutation from this position, or
        None when the script cannot conclude here."""
        key, _ = board.intern(N)
        mk = (key, tuple(apexes), tint_pos)
        if mk in cb.index:
            return cb.index[mk]
        if rounds_left <= 0:
            blockers.append({"reason": "depth-exhausted", "round": round_no})
            return None
        if tint_pos >= len(cone_atoms):
            blockers.append({"reason": "tints-exhausted", "round": round_no})
            return None
        delete = None
        base = N
        live = list(apexes)
        if len(N.nodes) == m:
            if not live:
                blockers.append(
                    {"reason": "node-budget-too-small", "round": round_no}
                )
                return None
            delete = live.pop(0)  # oldest apex; the base is never touched
            base = delete_node(N, delete)
        tint, atom = cone_atoms[tint_pos]
        ch = (x_challenge, n - 1, atom)
        if not challenge_is_valid(S, base, *ch):
            blockers.append(
                {"reason": "challenge-invalid", "round": round_no, "tint": tint}
            )
            return None
        responses = []
        seen = set()
        for M in response_networks(S, base, *ch, m):
            budgets["responses"] += 1
            kM, _ = board.intern(M)
            if kM in seen:
                continue
            seen.add(kM)
            if set(M.nodes) == set(base.nodes):
                child_apexes = live
            else:
                apex = next(u for u in M.nodes if u not in base.nodes)
                child_apexes = live + [apex]
            child = refute(
                M, child_apexes, tint_pos + 1, rounds_left - 1, round_no + 1
            )
            if child is None:
                return None
            responses.append(
                {"response": M.to_json_dict(S), "next_entry": child}
            )
        entry = {
            "state": cb.state_ref(key),
            "target": board.id_of(key),
            "delete": delete,
            "challenge": _challenge_json(ch),
            "responses": responses,
        }
        budgets["positions"] += 1
        budgets["rounds"] = max(budgets["rounds"], round_no)
        return cb.add(mk, entry)

    roots = []
    opened = False
    for N0 in atom_networks(S, a0, max_nodes=m):
        opened = True
        root = refute(N0, [], 0, depth, 1)
        if root is None:
            cert = {"type": "scripted-partial", "blockers": blockers[:5]}
            return GameResult("inconclusive", game, cert, budgets)
        roots.append({"network": N0.to_json_dict(S), "root_entry": root})
    if not opened:
        cert = {"type": "scripted-partial", "blockers": [{"reason": "no-opening"}]}
        return GameResult("inconclusive", game, cert, budgets)

    states, entries, roots = cb.finish(roots)
    cert = {
        "type": "refutation-table",
        "atom": a0,
        "openings": roots,
        "states": states,
        "entries": entries,
    }
    return GameResult("forall", game, cert, budgets)
