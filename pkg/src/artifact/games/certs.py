"""Certificate verification and the non-membership pipeline.

Verification replays a certificate against the structure using only the
network primitives: every claimed move is re-checked for legality, every
exhaustiveness claim is re-enumerated and compared, and links must point
strictly backwards in the table so the walk terminates.  The solvers'
internal bookkeeping is never trusted.
"""

from __future__ import annotations

from ..errors import InvalidArgumentError
from ..networks import (
    atom_networks,
    challenge_is_valid,
    delete_node,
    challenges,
    is_network,
    network_from_json_dict,
    response_networks,
)
from ..rainbow import RainbowStructure
from .atomic import (
    GameResult,
    _forall_moves,
    challenge_from_json,
    game_result_from_json_dict,
    solve_atomic_game,
)
from .scripted import scripted_forall_rainbow


def _fail(reason, **extra):
    return {"ok": False, "reason": reason, **extra}


def _ok(**extra):
    return {"ok": True, **extra}


def verify_game_certificate(S, result) -> dict:
    """Independently replay a game result's certificate against S."""
    if isinstance(result, dict):
        result = game_result_from_json_dict(result)
    if not isinstance(result, GameResult):
        raise InvalidArgumentError("expected a GameResult or its JSON dict")
    if result.winner == "inconclusive":
        return _ok(note="inconclusive results claim nothing")
    cert = result.certificate
    if cert is None:
        return _fail("a decided result needs a certificate")
    ctype = cert.get("type") if isinstance(cert, dict) else None
    try:
        if ctype == "fixpoint-core":
            return _verify_core(S, result.game, cert, result.winner)
        if ctype == "strategy-table":
            return _verify_strategy(S, result.game, cert, result.winner)
        if ctype == "refutation-table":
            return _verify_refutation(S, result.game, cert, result.winner)
    except (KeyError, TypeError, IndexError, ValueError, InvalidArgumentError) as exc:
        return _fail(f"malformed certificate: {exc!r}")
    return _fail(f"unknown certificate type {ctype!r}")


def _parse_states(S, cert):
    nets = []
    canon_to_id = {}
    for idx, d in enumerate(cert["states"]):
        N = network_from_json_dict(d, S)
        if not is_network(S, N):
            return None, None, _fail(f"state {idx} is not a network")
        key = N.canonical_key()
        if key in canon_to_id:
            return None, None, _fail(f"states {canon_to_id[key]} and {idx} coincide")
        canon_to_id[key] = idx
        nets.append(N)
    return nets, canon_to_id, None


def _realizes(N, atom):
    return any(a == atom for a in N.labels.values())


# ------------------------------------------------------- fixpoint core


def _verify_core(S, game, cert, winner):
    if winner != "exists":
        return _fail("a fixpoint core certifies a builder win only")
    kind, m = game["kind"], game["m"]
    nets, canon_to_id, err = _parse_states(S, cert)
    if err:
        return err
    core_ids = list(cert["core"])
    if len(set(core_ids)) != len(core_ids):
        return _fail("duplicate core ids")
    if any(not (0 <= i < len(nets)) for i in core_ids):
        return _fail("core id out of range")
    core_canons = {nets[i].canonical_key() for i in core_ids}
    for i in core_ids:
        N = nets[i]
        for d, base in _forall_moves(S, N, kind):
            for ch in challenges(S, base):
                answered = any(
                    M.canonical_key() in core_canons
                    for M in response_networks(S, base, *ch, m)
                )
                if not answered:
                    return _fail(
                        "core is not closed",
                        state=i,
                        delete=d,
                        challenge=list(ch[0]) + [ch[1], ch[2]],
                    )
    seen_atoms = set()
    for op in cert["openings"]:
        a = op["atom"]
        if a in seen_atoms:
            return _fail(f"atom {a} opened twice")
        seen_atoms.add(a)
        N = network_from_json_dict(op["network"], S)
        if not is_network(S, N):
            return _fail(f"opening for atom {a} is not a network")
        if not _realizes(N, a):
            return _fail(f"opening for atom {a} does not realize it")
        cs = op["core_state"]
        if cs not in core_ids:
            return _fail(f"opening for atom {a} points outside the core")
        if nets[cs].canonical_key() != N.canonical_key():
            return _fail(f"opening for atom {a} mismatches its core state")
    if seen_atoms != set(range(S.atom_count)):
        return _fail("openings do not cover every atom")
    return _ok(core=len(core_ids))


# ------------------------------------------------------ strategy table


def _legal_response(S, base, ch, M, m):
    x, i, a = ch
    if M.dim != base.dim:
        return False
    if M.nodes == base.nodes:
        if M.labels != base.labels:
            return False
        return any(
            base.labels[x[:i] + (z,) + x[i + 1:]] == a for z in base.nodes
        )
    fresh = next((u for u in range(m) if u not in base.nodes), None)
    if fresh is None or M.nodes != tuple(sorted(base.nodes + (fresh,))):
        return False
    for t, b in base.labels.items():
        if M.labels[t] != b:
            return False
    y = x[:i] + (fresh,) + x[i + 1:]
    return M.labels[y] == a and is_network(S, M)


def _state_ids(ref, nets, hist):
    if hist:
        if not isinstance(ref, list) or ref != sorted(set(ref)):
            raise InvalidArgumentError(f"bad played-set reference {ref!r}")
        ids = ref
    else:
        ids = [ref]
    for i in ids:
        if not (0 <= i < len(nets)):
            raise InvalidArgumentError(f"state id {i} out of range")
    return ids


def _verify_strategy(S, game, cert, winner):
    if winner != "exists":
        return _fail("a strategy table certifies a builder win only")
    kind, m, k, hist = game["kind"], game["m"], game["k"], game["exact_history"]
    if k is None:
        return _fail("strategy tables are for finite-round games")
    if k == 0:
        return _ok(note="zero rounds, vacuous")
    nets, canon_to_id, err = _parse_states(S, cert)
    if err:
        return err
    entries = cert["entries"]
    verified: set[int] = set()

    def verify_entry(idx):
        if idx in verified:
            return None
        e = entries[idx]
        r = e["rounds_left"]
        ids = _state_ids(e["state"], nets, hist)
        if r == 0:
            if e["moves"]:
                return _fail(f"entry {idx} moves after the last round")
            verified.add(idx)
            return None
        legal = {}
        for tid in ids:
            T = nets[tid]
            for d, base in _forall_moves(S, T, kind):
                for ch in challenges(S, base):
                    legal[(tid, d, ch)] = base
        covered = set()
        for mv in e["moves"]:
            ch = challenge_from_json(mv["challenge"])
            key3 = (mv["target"], mv["delete"], ch)
            if key3 not in legal:
                return _fail(f"entry {idx} answers an illegal move", move=key3[:2])
            if key3 in covered:
                return _fail(f"entry {idx} lists a move twice")
            covered.add(key3)
            base = legal[key3]
            M = network_from_json_dict(mv["response"], S)
            if not _legal_response(S, base, ch, M, m):
                return _fail(f"entry {idx} plays an illegal answer", move=key3[:2])
            child_idx = mv["next_entry"]
            if not (0 <= child_idx < idx):
                return _fail(f"entry {idx} link does not point backwards")
            child = entries[child_idx]
            if child["rounds_left"] != r - 1:
                return _fail(f"entry {idx} child at wrong round count")
            mkey = M.canonical_key()
            if hist:
                mid = canon_to_id.get(mkey)
                if mid is None:
                    return _fail(f"entry {idx} answer missing from states")
                want_state = sorted(set(ids) | {mid})
                if child["state"] != want_state:
                    return _fail(f"entry {idx} child has wrong played set")
            else:
                if nets[child["state"]].canonical_key() != mkey:
                    return _fail(f"entry {idx} child state mismatches answer")
            bad = verify_entry(child_idx)
            if bad:
                return bad
        if covered != set(legal):
            missing = next(iter(set(legal) - covered))
            return _fail(
                f"entry {idx} leaves a move unanswered",
                move=(missing[0], missing[1], list(missing[2][0]) + [missing[2][1], missing[2][2]]),
            )
        verified.add(idx)
        return None

    seen_atoms = set()
    for op in cert["openings"]:
        a = op["atom"]
        if a in seen_atoms:
            return _fail(f"atom {a} opened twice")
        seen_atoms.add(a)
        N = network_from_json_dict(op["network"], S)
        if not is_network(S, N):
            return _fail(f"opening for atom {a} is not a network")
        if not _realizes(N, a):
            return _fail(f"opening for atom {a} does not realize it")
        ridx = op["root_entry"]
        if not (0 <= ridx < len(entries)):
            return _fail(f"opening for atom {a} has a bad root link")
        root = entries[ridx]
        if root["rounds_left"] != k - 1:
            return _fail(f"opening for atom {a} enters at the wrong round")
        ids = _state_ids(root["state"], nets, hist)
        key = N.canonical_key()
        if hist:
            if len(ids) != 1 or nets[ids[0]].canonical_key() != key:
                return _fail(f"opening for atom {a} mismatches its root state")
        elif nets[ids[0]].canonical_key() != key:
            return _fail(f"opening for atom {a} mismatches its root state")
        bad = verify_entry(ridx)
        if bad:
            return bad
    if seen_atoms != set(range(S.atom_count)):
        return _fail("openings do not cover every atom")
    return _ok(entries=len(verified))


# ---------------------------------------------------- refutation table


def _verify_refutation(S, game, cert, winner):
    if winner != "forall":
        return _fail("a refutation table certifies a challenger win only")
    kind, m, k, hist = game["kind"], game["m"], game["k"], game["exact_history"]
    nets, canon_to_id, err = _parse_states(S, cert)
    if err:
        return err
    atom = cert["atom"]
    if not (0 <= atom < S.atom_count):
        return _fail(f"atom {atom} out of range")
    want = {N.canonical_key(): N for N in atom_networks(S, atom, max_nodes=m)}
    entries = cert["entries"]
    verified: dict = {}

    def verify_entry(idx, rounds_left):
        # rounds_left None = unbounded; otherwise the challenge must fit
        prev = verified.get(idx)
        if prev is not None and (rounds_left is None or prev >= rounds_left):
            return None
        if rounds_left is not None and rounds_left < 1:
            return _fail(f"entry {idx} challenges with no rounds left")
        e = entries[idx]
        ids = _state_ids(e["state"], nets, hist)
        tid = e["target"]
        if hist:
            if tid not in ids:
                return _fail(f"entry {idx} aims outside its played set")
        elif tid != ids[0]:
            return _fail(f"entry {idx} target differs from its state")
        T = nets[tid]
        d = e["delete"]
        if d is None:
            base = T
        else:
            if kind != "F":
                return _fail(f"entry {idx} deletes outside the reuse game")
            if d not in T.nodes or len(T.nodes) == 1:
                return _fail(f"entry {idx} deletes an impossible node")
            base = delete_node(T, d)
        ch = challenge_from_json(e["challenge"])
        if not challenge_is_valid(S, base, *ch):
            return _fail(f"entry {idx} poses an invalid challenge")
        recomputed = {}
        for M in response_networks(S, base, *ch, m):
            recomputed.setdefault(M.canonical_key(), M)
        listed = set()
        for resp in e["responses"]:
            M = network_from_json_dict(resp["response"], S)
            key = M.canonical_key()
            if key not in recomputed:
                return _fail(f"entry {idx} lists a phantom answer")
            if key in listed:
                return _fail(f"entry {idx} lists an answer twice")
            listed.add(key)
            child_idx = resp["next_entry"]
            if not (0 <= child_idx < idx):
                return _fail(f"entry {idx} link does not point backwards")
            child = entries[child_idx]
            cids = _state_ids(child["state"], nets, hist)
            if hist:
                mid = canon_to_id.get(key)
                if mid is None:
                    return _fail(f"entry {idx} answer missing from states")
                if cids != sorted(set(ids) | {mid}):
                    return _fail(f"entry {idx} child has wrong played set")
            else:
                if nets[cids[0]].canonical_key() != key:
                    return _fail(f"entry {idx} child state mismatches answer")
            bad = verify_entry(
                child_idx, None if rounds_left is None else rounds_left - 1
            )
            if bad:
                return bad
        if listed != set(recomputed):
            return _fail(
                f"entry {idx} misses an answer the builder has",
                challenge=list(ch[0]) + [ch[1], ch[2]],
            )
        verified[idx] = rounds_left if rounds_left is not None else float("inf")
        return None

    got = set()
    for op in cert["openings"]:
        N = network_from_json_dict(op["network"], S)
        key = N.canonical_key()
        if key not in want:
            return _fail("opening does not realize the named atom")
        if key in got:
            return _fail("opening listed twice")
        got.add(key)
        ridx = op["root_entry"]
        if not (0 <= ridx < len(entries)):
            return _fail("bad opening root link")
        root = entries[ridx]
        rids = _state_ids(root["state"], nets, hist)
        if hist:
            if len(rids) != 1 or nets[rids[0]].canonical_key() != key:
                return _fail("opening mismatches its root state")
        elif nets[rids[0]].canonical_key() != key:
            return _fail("opening mismatches its root state")
        bad = verify_entry(ridx, None if k is None else k - 1)
        if bad:
            return bad
    if got != set(want):
        return _fail("openings do not cover every realization of the atom")
    return _ok(entries=len(verified), openings=len(got))


# ------------------------------------------------------ non-membership


def non_membership_certificate(
    A,
    m: int,
    *,
    depth: int = 16,
    network_cap: int = 20_000,
):
    """Game-derived certificate about A and dimension m, or None.

    A challenger win in the node-reuse game on at most m nodes certifies
    that A embeds in no neat reduct from dimension m; a builder win in
    the unbounded plain game certifies an m-square representation.
    Rainbow-built structures go through the scripted challenger, all
    others through the exact fixpoint solvers.
    """
    S = getattr(A, "structure", None)
    if S is None:
        raise InvalidArgumentError("expected an atomic algebra with .structure")
    if isinstance(S, RainbowStructure):
        res = scripted_forall_rainbow(S, m, depth)
        if res.winner == "forall":
            return {
                "claim": "not-sub-neat-reduct",
                "n": S.dim,
                "m": m,
                "game": res.to_json_dict(),
            }
        return None
    res_f = solve_atomic_game(S, "F", m=m, k=None, network_cap=network_cap)
    if res_f.winner == "forall":
        return {
            "claim": "not-sub-neat-reduct",
            "n": S.dim,
            "m": m,
            "game": res_f.to_json_dict(),
        }
    res_g = solve_atomic_game(S, "G", m=m, k=None, network_cap=network_cap)
    if res_g.winner == "exists":
        return {
            "claim": "square-representation",
            "m": m,
            "game": res_g.to_json_dict(),
        }
    return None


def verify_non_membership_certificate(A, cert) -> dict:
    """Replay a non-membership or squareness certificate against A."""
    S = getattr(A, "structure", None)
    if S is None:
        raise InvalidArgumentError("expected an atomic algebra with .structure")
    if not isinstance(cert, dict):
        return _fail("certificate must be a dict")
    claim = cert.get("claim")
    try:
        res = game_result_from_json_dict(cert["game"])
    except (KeyError, TypeError, InvalidArgumentError) as exc:
        return _fail(f"malformed certificate: {exc!r}")
    if claim == "not-sub-neat-reduct":
        if cert.get("n") != S.dim:
            return _fail("claimed base dimension differs from the algebra's")
        if res.game.get("kind") != "F" or res.game.get("m") != cert.get("m"):
            return _fail("game parameters do not support the claim")
        if res.winner != "forall":
            return _fail("claim needs a challenger win")
    elif claim == "square-representation":
        if res.game.get("kind") != "G" or res.game.get("m") != cert.get("m"):
            return _fail("game parameters do not support the claim")
        if res.winner != "exists":
            return _fail("claim needs a builder win")
    else:
        return _fail(f"unknown claim {claim!r}")
    inner = verify_game_certificate(S, res)
    if not inner["ok"]:
        return inner
    return _ok(claim=claim)
