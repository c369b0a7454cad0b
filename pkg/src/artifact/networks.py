"""Networks: finite approximations to representations of an atom structure.

A network carries a finite node set and a total labelling of all
dimension-length node tuples by atoms, subject to two conditions: a
label sits below the (i,j) diagonal exactly when the tuple repeats at
(i,j), and labels of tuples differing at one coordinate are related by
that coordinate's successor relation.  Networks are the board of the
atomic games: a challenge asks for a witness tuple carrying a demanded
atom, and a response either points at an existing witness or grows the
network by one node.

Node names live in range(m) for a declared budget m, so that the same
name can be reused across positions of a game.  Canonical keys quotient
out node renaming; solvers memoize on them.
"""

from __future__ import annotations

from itertools import permutations, product

from .errors import InvalidArgumentError, ResourceLimitError
from .structures import AtomStructure


class Network:
    """Immutable total labelling of ^dim(nodes) by atom indices."""

    __slots__ = ("dim", "nodes", "labels", "_canon")

    def __init__(self, dim: int, nodes, labels: dict):
        self.dim = dim
        self.nodes = tuple(sorted(nodes))
        if len(set(self.nodes)) != len(self.nodes) or not self.nodes:
            raise InvalidArgumentError("nodes must be distinct and nonempty")
        self.labels = dict(labels)
        want = set(product(self.nodes, repeat=dim))
        if set(self.labels) != want:
            raise InvalidArgumentError(
                "labels must cover exactly the dim-tuples over the nodes"
            )
        self._canon = None

    def label(self, tup):
        return self.labels[tup]

    def canonical_key(self):
        """Lexicographically least label table over all node renamings."""
        if self._canon is None:
            q = len(self.nodes)
            slots = list(product(range(q), repeat=self.dim))
            best = None
            for perm in permutations(self.nodes):
                key = tuple(
                    self.labels[tuple(perm[s] for s in slot)] for slot in slots
                )
                if best is None or key < best:
                    best = key
            self._canon = (q, best)
        return self._canon

    def __eq__(self, other):
        return (
            isinstance(other, Network)
            and self.nodes == other.nodes
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.nodes, tuple(sorted(self.labels.items()))))

    def __repr__(self):
        return f"Network(nodes={self.nodes})"

    def to_json_dict(self, S: AtomStructure | None = None):
        def name(a):
            if S is not None and S.atom_names:
                return S.atom_names[a]
            return a

        return {
            "nodes": list(self.nodes),
            "labels": [
                {"tuple": list(t), "atom": name(a)}
                for t, a in sorted(self.labels.items())
            ],
        }

    def to_dot(self, S: AtomStructure | None = None) -> str:
        """Graph of the pair profiles: one edge per node pair, labelled by
        the atom on the (u, v, v, ...) tuple; loops omitted."""
        lines = ["graph network {"]
        for u in self.nodes:
            lines.append(f'  n{u} [label="{u}"];')
        for u in self.nodes:
            for v in self.nodes:
                if u < v:
                    t = (u,) + (v,) * (self.dim - 1)
                    a = self.labels[t]
                    text = S.atom_names[a] if S is not None and S.atom_names else a
                    lines.append(f'  n{u} -- n{v} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines)


def network_violation(S: AtomStructure, N: Network):
    """First failed consistency condition, or None if N is a network."""
    n = S.dim
    if N.dim != n:
        return {"condition": "dimension", "network_dim": N.dim, "structure_dim": n}
    for t, a in N.labels.items():
        if not (0 <= a < S.atom_count):
            return {"condition": "label-range", "tuple": t, "label": a}
    for t, a in sorted(N.labels.items()):
        for i in range(n):
            for j in range(i + 1, n):
                below = bool(S.diag[(i, j)] >> a & 1)
                if below != (t[i] == t[j]):
                    return {
                        "condition": "diagonal",
                        "tuple": t,
                        "label": a,
                        "pair": (i, j),
                    }
    for t, a in sorted(N.labels.items()):
        for i in range(n):
            for z in N.nodes:
                s = t[:i] + (z,) + t[i + 1:]
                b = N.labels[s]
                if not (S.t_cols[i][a] >> b & 1):
                    return {
                        "condition": "successor",
                        "tuple": t,
                        "other": s,
                        "index": i,
                    }
    return None


def is_network(S: AtomStructure, N: Network) -> bool:
    return network_violation(S, N) is None


def _kernel_ok(S, t, a):
    for i in range(S.dim):
        for j in range(i + 1, S.dim):
            if bool(S.diag[(i, j)] >> a & 1) != (t[i] == t[j]):
                return False
    return True


def _sym_columns(S):
    """Per index, the mask family sym[i][a] = atoms compatible with a in
    BOTH successor directions.  For partition-stored relations (the
    face-built structures) that is the stored column itself; otherwise
    the column is intersected with its transpose."""
    out = []
    for i in range(S.dim):
        col = S.t_cols[i]
        checked: set[int] = set()
        is_partition = True
        for a, mask in enumerate(col):
            if not (mask >> a & 1):
                is_partition = False
                break
            if id(mask) in checked:
                continue
            for b in _mask_bits(mask):
                other = col[b]
                if other is not mask and other != mask:
                    is_partition = False
                    break
            if not is_partition:
                break
            checked.add(id(mask))
        if is_partition:
            out.append(col)
            continue
        transpose = [0] * S.atom_count
        for a, mask in enumerate(col):
            for b in _mask_bits(mask):
                transpose[b] |= 1 << a
        out.append([col[a] & transpose[a] for a in range(S.atom_count)])
    return out


def _mask_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _complete(S, base_labels, new_tuples, forced, nodes):
    """Deterministic search for all labelings of new_tuples extending
    base_labels to a consistent table: candidate masks per tuple are cut
    down by kernel pattern, self-compatibility, fixed neighbours, and —
    as the search assigns — forward-checked against each choice, with the
    most constrained tuple always picked next (ties lexicographic)."""
    n = S.dim
    atoms = S.atom_count
    every = (1 << atoms) - 1
    sym = _sym_columns(S)
    selfmask = 0
    for a in range(atoms):
        if all(sym[i][a] >> a & 1 for i in range(n)):
            selfmask |= 1 << a

    kernel_cache: dict[tuple, int] = {}

    def kernel_mask(t):
        pat = tuple(t[i] == t[j] for i in range(n) for j in range(i + 1, n))
        if pat not in kernel_cache:
            mask = selfmask
            pos = 0
            for i in range(n):
                for j in range(i + 1, n):
                    d = S.diag[(i, j)]
                    mask &= d if pat[pos] else every & ~d
                    pos += 1
            kernel_cache[pat] = mask
        return kernel_cache[pat]

    masks: dict[tuple, int] = {}
    for t in new_tuples:
        m = kernel_mask(t)
        for i in range(n):
            for w in nodes:
                if w == t[i]:
                    continue
                b = base_labels.get(t[:i] + (w,) + t[i + 1:])
                if b is not None:
                    m &= sym[i][b]
        if t in forced:
            m &= 1 << forced[t]
        if m == 0:
            return
        masks[t] = m

    new_set = set(new_tuples)
    neigh: dict[tuple, list] = {t: [] for t in new_tuples}
    for t in new_tuples:
        for i in range(n):
            for w in nodes:
                if w == t[i]:
                    continue
                s = t[:i] + (w,) + t[i + 1:]
                if s in new_set:
                    neigh[t].append((i, s))

    labels = dict(base_labels)
    assigned: set[tuple] = set()
    pending = sorted(new_tuples)

    def rec():
        if len(assigned) == len(masks):
            yield dict(labels)
            return
        t = min(
            (u for u in pending if u not in assigned),
            key=lambda u: (bin(masks[u]).count("1"), u),
        )
        m = masks[t]
        while m:
            low = m & -m
            m ^= low
            a = low.bit_length() - 1
            trail = []
            dead = False
            for i, s in neigh[t]:
                if s in assigned:
                    continue
                old = masks[s]
                new = old & sym[i][a]
                if new != old:
                    masks[s] = new
                    trail.append((s, old))
                    if new == 0:
                        dead = True
                        break
            if not dead:
                assigned.add(t)
                labels[t] = a
                yield from rec()
                assigned.discard(t)
                del labels[t]
            for s, old in trail:
                masks[s] = old

    yield from rec()


def atom_networks(S: AtomStructure, a: int, *, max_nodes: int | None = None):
    """All networks realizing atom a on exactly its kernel-class count of
    nodes, with node names 0..q-1 and the defining tuple in kernel shape.

    The defining tuple maps coordinate i to the index of its kernel
    class (classes ordered by least coordinate), so the atom's diagonal
    pattern is realized literally.
    """
    n = S.dim
    classes: list[list[int]] = []
    coord_class = {}
    for i in range(n):
        for k, cls in enumerate(classes):
            j = cls[0]  # j < i since classes are built in coordinate order
            if S.diag[(j, i)] >> a & 1:
                coord_class[i] = k
                cls.append(i)
                break
        else:
            coord_class[i] = len(classes)
            classes.append([i])
    q = len(classes)
    if max_nodes is not None and q > max_nodes:
        return
    nodes = tuple(range(q))
    x = tuple(coord_class[i] for i in range(n))
    all_tuples = list(product(nodes, repeat=n))
    for labels in _complete(S, {}, all_tuples, {x: a}, nodes):
        N = Network(n, nodes, labels)
        if network_violation(S, N) is None:
            yield N


def challenges(S: AtomStructure, N: Network):
    """All valid cylindrifier challenges (x̄, i, a) on N: the current
    label of x̄ must be an i-successor of a (N(x̄) ≤ c_i a)."""
    n = S.dim
    seen = set()
    for t in sorted(N.labels):
        cur = N.labels[t]
        for i in range(n):
            col = S.t_cols[i]
            for a in range(S.atom_count):
                if col[cur] >> a & 1:
                    key = (t, i, a)
                    if key not in seen:
                        seen.add(key)
                        yield key


def challenge_is_valid(S, N, x, i, a):
    if x not in N.labels or not (0 <= i < S.dim) or not (0 <= a < S.atom_count):
        return False
    return bool(S.t_cols[i][N.labels[x]] >> a & 1)


def response_networks(S: AtomStructure, N: Network, x, i, a, m: int):
    """All legal responses to the challenge (x̄, i, a) with node budget m:
    the unchanged network when an existing witness carries a, and every
    one-fresh-node extension whose witness tuple carries a."""
    for z in N.nodes:
        y = x[:i] + (z,) + x[i + 1:]
        if N.labels[y] == a:
            yield N
            break
    fresh = next((u for u in range(m) if u not in N.nodes), None)
    if fresh is None:
        return
    z = fresh
    nodes = N.nodes + (z,)
    y = x[:i] + (z,) + x[i + 1:]
    new_tuples = [
        t for t in product(sorted(nodes), repeat=S.dim) if z in t
    ]
    if not _kernel_ok(S, y, a):
        return
    for labels in _complete(S, dict(N.labels), new_tuples, {y: a}, nodes):
        M = Network(S.dim, nodes, labels)
        if network_violation(S, M) is None:
            yield M


def delete_node(N: Network, d) -> Network:
    """The induced network on nodes minus d (labels through d dropped)."""
    if d not in N.nodes or len(N.nodes) == 1:
        raise InvalidArgumentError("cannot delete: node absent or last one")
    nodes = tuple(u for u in N.nodes if u != d)
    labels = {t: a for t, a in N.labels.items() if d not in t}
    return Network(N.dim, nodes, labels)


def all_networks(S: AtomStructure, m: int, *, network_cap: int = 20_000):
    """All networks on node sets {0..q-1}, q ≤ m, up to canonical
    renaming.  Grown by one-node extension from the one-node networks;
    every network arises this way since restrictions of networks are
    networks."""
    found: dict[tuple, Network] = {}
    frontier: list[Network] = []
    for a in range(S.atom_count):
        full_diag = all(
            S.diag[(i, j)] >> a & 1 for i in range(S.dim) for j in range(i + 1, S.dim)
        )
        if not full_diag:
            continue
        if not all(S.t_cols[i][a] >> a & 1 for i in range(S.dim)):
            continue
        t = (0,) * S.dim
        N = Network(S.dim, (0,), {t: a})
        if network_violation(S, N) is None:
            key = N.canonical_key()
            if key not in found:
                found[key] = N
                frontier.append(N)
    while frontier:
        N = frontier.pop()
        if len(N.nodes) >= m:
            continue
        z = len(N.nodes)
        nodes = N.nodes + (z,)
        new_tuples = [t for t in product(nodes, repeat=S.dim) if z in t]
        for labels in _complete(S, dict(N.labels), new_tuples, {}, nodes):
            M = Network(S.dim, nodes, labels)
            if network_violation(S, M) is not None:
                continue
            key = M.canonical_key()
            if key not in found:
                if len(found) >= network_cap:
                    raise ResourceLimitError(
                        f"network enumeration exceeded network_cap={network_cap}",
                        limit_name="network_cap",
                        limit_value=network_cap,
                    )
                found[key] = M
                frontier.append(M)
    return sorted(found.values(), key=lambda N: N.canonical_key())


def network_from_json_dict(d: dict, S: AtomStructure | None = None) -> Network:
    try:
        nodes = [int(u) for u in d["nodes"]]
        labels = {}
        for row in d["labels"]:
            a = row["atom"]
            if isinstance(a, str):
                if S is None or not S.atom_names:
                    raise InvalidArgumentError(
                        "named labels need a structure with atom names"
                    )
                a = S.atom_names.index(a)
            labels[tuple(row["tuple"])] = a
        dim = len(next(iter(labels)))
    except (KeyError, TypeError, ValueError, StopIteration) as exc:
        raise InvalidArgumentError(f"bad network JSON: {exc}") from exc
    return Network(dim, nodes, labels)
