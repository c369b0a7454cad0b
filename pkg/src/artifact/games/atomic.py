"""Exact solvers for the atomic network games.

The challenger opens by naming an atom; the builder must lay it down as
a network.  Every later round challenges a network with a witness
demand (x̄, i, a): produce a node z with the tuple x̄[i := z] labelled a,
either already present or added fresh within the node budget m.  The
node-reuse variant ("F") additionally lets the challenger delete one
node, with all labels through it, before demanding.

Finite games are solved by backward induction over canonical network
positions — optionally with the exact set of played networks as state,
since the challenger may aim a demand at any earlier network — and the
unbounded game by the greatest fixpoint of "every demand has an answer
that stays inside the set" over all networks on at most m nodes.
History adds nothing in the unbounded game (a play stays safe forever
exactly when each of its networks does), so that solver is positional.

Certificates are tables over interned states; the verifier replays
them move by move without trusting the solver's bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidArgumentError, ResourceLimitError
from ..networks import (
    all_networks,
    atom_networks,
    challenges,
    delete_node,
    response_networks,
)

DEFAULT_STATE_CAP = 400_000
DEFAULT_NETWORK_CAP = 20_000


@dataclass
class GameResult:
    """Outcome of a solved or scripted game with a replayable certificate."""

    winner: str  # "exists" | "forall" | "inconclusive"
    game: dict  # kind, m, k, exact_history, solver
    certificate: dict | None
    budgets: dict

    def to_json_dict(self) -> dict:
        return {
            "winner": self.winner,
            "game": dict(self.game),
            "certificate": self.certificate,
            "budgets": dict(self.budgets),
        }


def game_result_from_json_dict(d: dict) -> GameResult:
    try:
        winner = d["winner"]
        game = dict(d["game"])
        budgets = dict(d["budgets"])
        cert = d.get("certificate")
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"bad game result payload: {exc}") from exc
    if winner not in ("exists", "forall", "inconclusive"):
        raise InvalidArgumentError(f"bad winner {winner!r}")
    if cert is not None and not isinstance(cert, dict):
        raise InvalidArgumentError("certificate must be a dict or null")
    return GameResult(winner, game, cert, budgets)


class _Board:
    """Interns networks by canonical key and hands out stable ids."""

    def __init__(self, S):
        self.S = S
        self.by_key: dict = {}
        self.ids: dict = {}
        self.networks: list = []

    def intern(self, N):
        key = N.canonical_key()
        rep = self.by_key.get(key)
        if rep is None:
            rep = N
            self.by_key[key] = N
            self.ids[key] = len(self.networks)
            self.networks.append(N)
        return key, rep

    def id_of(self, key) -> int:
        return self.ids[key]


def _forall_moves(S, N, kind):
    """Challenger move prefixes in canonical order: challenge in place
    first, then each single-node deletion when reuse is on."""
    yield None, N
    if kind == "F" and len(N.nodes) > 1:
        for d in N.nodes:
            yield d, delete_node(N, d)


def _challenge_json(ch):
    x, i, a = ch
    return {"tuple": list(x), "index": i, "atom": a}


def challenge_from_json(d):
    try:
        return tuple(d["tuple"]), d["index"], d["atom"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"bad challenge payload: {exc}") from exc


def solve_atomic_game(
    S,
    kind: str = "G",
    *,
    m: int,
    k: int | None = None,
    exact_history: bool = False,
    state_cap: int = DEFAULT_STATE_CAP,
    network_cap: int = DEFAULT_NETWORK_CAP,
):
    """Winner and certificate for the m-node atomic game on S.

    kind "G" is the plain game, "F" the node-reuse variant; k counts
    rounds (the opening included), k=None plays unbounded rounds via the
    fixpoint.  exact_history switches the finite solver from the
    positional abstraction to full played-set state.
    """
    if kind not in ("G", "F"):
        raise InvalidArgumentError(f"game kind must be 'G' or 'F', got {kind!r}")
    if m < 1:
        raise InvalidArgumentError("node budget m must be >= 1")
    if k is not None and k < 0:
        raise InvalidArgumentError("round count k must be >= 0")
    if k is None:
        return _solve_fixpoint(S, kind, m, network_cap)
    return _solve_finite(S, kind, m, k, exact_history, state_cap)


# ------------------------------------------------------------- finite k


def _solve_finite(S, kind, m, k, exact_history, state_cap):
    board = _Board(S)
    game = {
        "kind": kind,
        "m": m,
        "k": k,
        "exact_history": exact_history,
        "solver": "backward-induction",
    }
    if k == 0:
        return GameResult(
            winner="exists",
            game=game,
            certificate={"type": "strategy-table", "openings": [], "states": [],
                         "entries": []},
            budgets={"states": 0, "networks": 0, "rounds": 0},
        )

    memo: dict = {}
    losing: dict = {}

    def check_cap():
        if len(memo) > state_cap:
            raise ResourceLimitError(
                f"game state count exceeded state_cap={state_cap}",
                limit_name="state_cap",
                limit_value=state_cap,
            )

    def survive_pos(key, r):
        if r == 0:
            return True
        mk = (key, r)
        if mk in memo:
            return memo[mk]
        check_cap()
        N = board.by_key[key]
        verdict = True
        for d, base in _forall_moves(S, N, kind):
            for ch in challenges(S, base):
                ok = False
                for M in response_networks(S, base, *ch, m):
                    kM, _ = board.intern(M)
                    if survive_pos(kM, r - 1):
                        ok = True
                        break
                if not ok:
                    losing[mk] = (None, d, ch)
                    verdict = False
                    break
            if not verdict:
                break
        memo[mk] = verdict
        return verdict

    def survive_hist(played, r):
        if r == 0:
            return True
        mk = (played, r)
        if mk in memo:
            return memo[mk]
        check_cap()
        verdict = True
        for tid in sorted(played):
            T = board.networks[tid]
            for d, base in _forall_moves(S, T, kind):
                for ch in challenges(S, base):
                    ok = False
                    for M in response_networks(S, base, *ch, m):
                        kM, _ = board.intern(M)
                        nxt = played | {board.id_of(kM)}
                        if survive_hist(nxt, r - 1):
                            ok = True
                            break
                    if not ok:
                        losing[mk] = (tid, d, ch)
                        verdict = False
                        break
                if not verdict:
                    break
            if not verdict:
                break
        memo[mk] = verdict
        return verdict

    def survives_opening(key):
        if exact_history:
            return survive_hist(frozenset((board.id_of(key),)), k - 1)
        return survive_pos(key, k - 1)

    bad_atom = None
    opening_choice: dict[int, tuple] = {}
    for a in range(S.atom_count):
        pick = None
        for N in atom_networks(S, a, max_nodes=m):
            key, _ = board.intern(N)
            if survives_opening(key):
                pick = (key, N)
                break
        if pick is None:
            bad_atom = a
            break
        opening_choice[a] = pick

    budgets = {"states": len(memo), "networks": len(board.networks), "rounds": k}
    if bad_atom is None:
        cert = _finite_strategy_cert(
            S, board, kind, m, k, exact_history, memo, opening_choice
        )
        budgets["networks"] = len(board.networks)
        return GameResult("exists", game, cert, budgets)
    cert = _finite_refutation_cert(
        S, board, kind, m, k, exact_history, memo, losing, bad_atom
    )
    budgets["networks"] = len(board.networks)
    return GameResult("forall", game, cert, budgets)


class CertBuilder:
    """Accumulates table certificates: interned state networks plus
    entries in post-order, so every link points at an earlier entry and
    the table is acyclic by construction."""

    def __init__(self, board):
        self.board = board
        self.used: set[int] = set()
        self.entries: list[dict] = []
        self.index: dict = {}

    def state_ref(self, state):
        if isinstance(state, frozenset):
            self.used.update(state)
            return sorted(state)
        sid = self.board.id_of(state)
        self.used.add(sid)
        return sid

    def add(self, memo_key, entry) -> int:
        idx = len(self.entries)
        self.entries.append(entry)
        self.index[memo_key] = idx
        return idx

    def finish(self, openings):
        order = sorted(self.used)
        remap = {sid: i for i, sid in enumerate(order)}
        states = [
            self.board.networks[sid].to_json_dict(self.board.S) for sid in order
        ]

        def fix(ref):
            if isinstance(ref, list):
                return [remap[x] for x in ref]
            return remap[ref]

        for e in self.entries:
            e["state"] = fix(e["state"])
            if "target" in e:
                e["target"] = remap[e["target"]]
            for mv in e.get("moves", ()):
                mv["target"] = remap[mv["target"]]
        return states, self.entries, openings


def _finite_strategy_cert(S, board, kind, m, k, exact_history, memo, opening_choice):
    cb = CertBuilder(board)

    def build(state, r) -> int:
        mk = (state, r)
        if mk in cb.index:
            return cb.index[mk]
        if exact_history:
            targets = [(tid, board.networks[tid]) for tid in sorted(state)]
        else:
            sid = board.id_of(state)
            targets = [(sid, board.by_key[state])]
        moves = []
        if r > 0:
            for tid, T in targets:
                for d, base in _forall_moves(S, T, kind):
                    for ch in challenges(S, base):
                        picked = None
                        for M in response_networks(S, base, *ch, m):
                            kM, _ = board.intern(M)
                            if exact_history:
                                nxt = state | {board.id_of(kM)}
                            else:
                                nxt = kM
                            if memo.get((nxt, r - 1), r - 1 == 0):
                                picked = (M, nxt)
                                break
                        # a surviving state always has an answer
                        M, nxt = picked
                        child = build(nxt, r - 1)
                        moves.append(
                            {
                                "target": tid,
                                "delete": d,
                                "challenge": _challenge_json(ch),
                                "response": M.to_json_dict(S),
                                "next_entry": child,
                            }
                        )
        entry = {
            "state": cb.state_ref(state),
            "rounds_left": r,
            "moves": moves,
        }
        return cb.add(mk, entry)

    openings = []
    for a, (key, N) in sorted(opening_choice.items()):
        state = frozenset((board.id_of(key),)) if exact_history else key
        root = build(state, k - 1)
        openings.append(
            {"atom": a, "network": N.to_json_dict(S), "root_entry": root}
        )

    states, entries, openings = cb.finish(openings)
    return {
        "type": "strategy-table",
        "openings": openings,
        "states": states,
        "entries": entries,
    }


def _finite_refutation_cert(S, board, kind, m, k, exact_history, memo, losing, atom):
    cb = CertBuilder(board)

    def build(state, r) -> int:
        mk = (state, r)
        if mk in cb.index:
            return cb.index[mk]
        tid, d, ch = losing[mk]
        if exact_history:
            T = board.networks[tid]
        else:
            tid = board.id_of(state)
            T = board.by_key[state]
        base = T if d is None else delete_node(T, d)
        responses = []
        seen = set()
        for M in response_networks(S, base, *ch, m):
            kM, _ = board.intern(M)
            if kM in seen:
                continue
            seen.add(kM)
            nxt = state | {board.id_of(kM)} if exact_history else kM
            child = build(nxt, r - 1)
            responses.append(
                {"response": M.to_json_dict(S), "next_entry": child}
            )
        entry = {
            "state": cb.state_ref(state),
            "target": tid,
            "delete": d,
            "challenge": _challenge_json(ch),
            "responses": responses,
        }
        return cb.add(mk, entry)

    roots = []
    for N in atom_networks(S, atom, max_nodes=m):
        key, _ = board.intern(N)
        state = frozenset((board.id_of(key),)) if exact_history else key
        root = build(state, k - 1)
        roots.append({"network": N.to_json_dict(S), "root_entry": root})

    states, entries, roots = cb.finish(roots)
    return {
        "type": "refutation-table",
        "atom": atom,
        "openings": roots,
        "states": states,
        "entries": entries,
    }


# ---------------------------------------------------------------- omega


def _solve_fixpoint(S, kind, m, network_cap):
    game = {
        "kind": kind,
        "m": m,
        "k": None,
        "exact_history": False,
        "solver": "greatest-fixpoint",
    }
    nets = all_networks(S, m, network_cap=network_cap)
    board = _Board(S)
    for N in nets:
        board.intern(N)
    alive = set(board.by_key)
    stage: dict = {}
    losing: dict = {}
    elim_count = 0
    changed = True
    while changed:
        changed = False
        for key in sorted(alive):
            N = board.by_key[key]
            move = _fatal_move(S, board, N, kind, m, alive)
            if move is not None:
                alive.discard(key)
                stage[key] = elim_count
                losing[key] = move
                elim_count += 1
                changed = True
    budgets = {
        "networks": len(nets),
        "eliminated": elim_count,
        "core": len(alive),
        "states": len(nets),
    }

    bad_atom = None
    opening_choice: dict[int, tuple] = {}
    for a in range(S.atom_count):
        pick = None
        for N in atom_networks(S, a, max_nodes=m):
            if N.canonical_key() in alive:
                pick = N
                break
        if pick is None:
            bad_atom = a
            break
        opening_choice[a] = pick

    if bad_atom is None:
        remap, states = _core_states(board, alive)
        openings = [
            {
                "atom": a,
                "network": N.to_json_dict(S),
                "core_state": remap[board.id_of(N.canonical_key())],
            }
            for a, N in sorted(opening_choice.items())
        ]
        cert = {
            "type": "fixpoint-core",
            "states": states,
            "core": sorted(remap.values()),
            "openings": openings,
        }
        return GameResult("exists", game, cert, budgets)

    cert = _omega_refutation_cert(S, board, kind, m, stage, losing, bad_atom)
    return GameResult("forall", game, cert, budgets)


def _core_states(board, alive):
    ids = sorted(board.id_of(key) for key in alive)
    remap = {sid: i for i, sid in enumerate(ids)}
    states = [board.networks[sid].to_json_dict(board.S) for sid in ids]
    return remap, states


def _fatal_move(S, board, N, kind, m, alive):
    """First challenger move every answer to which leaves the alive set,
    or None when N withstands all of them."""
    for d, base in _forall_moves(S, N, kind):
        for ch in challenges(S, base):
            answered = False
            for M in response_networks(S, base, *ch, m):
                if M.canonical_key() in alive:
                    answered = True
                    break
            if not answered:
                return d, ch
    return None


def _omega_refutation_cert(S, board, kind, m, stage, losing, atom):
    cb = CertBuilder(board)

    def build(key) -> int:
        if key in cb.index:
            return cb.index[key]
        d, ch = losing[key]
        N = board.by_key[key]
        base = N if d is None else delete_node(N, d)
        responses = []
        seen = set()
        for M in response_networks(S, base, *ch, m):
            kM, _ = board.intern(M)
            if kM in seen:
                continue
            seen.add(kM)
            # every answer was eliminated strictly earlier, so this recursion
            # descends the elimination order and terminates
            child = build(kM)
            responses.append(
                {"response": M.to_json_dict(S), "next_entry": child}
            )
        entry = {
            "state": cb.state_ref(key),
            "target": board.id_of(key),
            "delete": d,
            "challenge": _challenge_json(ch),
            "responses": responses,
        }
        return cb.add(key, entry)

    roots = []
    for N in atom_networks(S, atom, max_nodes=m):
        key, _ = board.intern(N)
        root = build(key)
        roots.append({"network": N.to_json_dict(S), "root_entry": root})

    states, entries, roots = cb.finish(roots)
    return {
        "type": "refutation-table",
        "atom": atom,
        "openings": roots,
        "states": states,
        "entries": entries,
    }
