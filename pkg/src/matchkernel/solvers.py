"""Reference matching algorithms and exhaustive oracles.

``hopcroft_karp`` and ``kosaraju_scc`` drive the crown/LP machinery,
``blossom_mcm`` solves unweighted kernels end-to-end, and the ``brute_force_*``
functions are exact oracles for small graphs used throughout the tests.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .graph import Graph, GraphError, Matching, connected_components


class OracleGuardError(GraphError):
    """Refusal to run an exponential oracle on a graph above its size guard."""


class BipartiteGraph:
    """Bipartite graph with left vertices ``0..n_left-1`` and right ``0..n_right-1``.

    ``adj[i]`` lists the right neighbors of left vertex ``i``.  Use
    :meth:`from_edges` to build one from arbitrary hashable labels.
    """

    def __init__(self, n_left: int, n_right: int, adj: Sequence[Iterable[int]]):
        self.n_left = n_left
        self.n_right = n_right
        self.adj = [sorted(set(a)) for a in adj]
        if len(self.adj) != n_left:
            raise ValueError("adjacency must have one entry per left vertex")
        for a in self.adj:
            if a and (a[0] < 0 or a[-1] >= n_right):
                raise ValueError("right index out of range")
        self.left_labels: list = list(range(n_left))
        self.right_labels: list = list(range(n_right))

    @classmethod
    def from_edges(cls, left: Iterable[Hashable], right: Iterable[Hashable], edges):
        left = list(left)
        right = list(right)
        li = {x: i for i, x in enumerate(left)}
        ri = {x: i for i, x in enumerate(right)}
        adj: list[list[int]] = [[] for _ in left]
        for a, b in edges:
            adj[li[a]].append(ri[b])
        b = cls(len(left), len(right), adj)
        b.left_labels = left
        b.right_labels = right
        return b

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj)


def hopcroft_karp_indexed(b: BipartiteGraph) -> list[int]:
    """Maximum matching as ``mate_left[i]`` (right index or -1)."""
    nl, nr, adj = b.n_left, b.n_right, b.adj
    mate_l = [-1] * nl
    mate_r = [-1] * nr
    while True:
        dist = [-1] * nl
        queue = [u for u in range(nl) if mate_l[u] == -1]
        for u in queue:
            dist[u] = 0
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = mate_r[v]
                if w == -1:
                    found = True
                elif dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            return mate_l
        pos = [0] * nl
        for s in range(nl):
            if mate_l[s] != -1:
                continue
            stack = [s]
            via: list[int] = []
            while stack:
                u = stack[-1]
                a = adj[u]
                descended = False
                while pos[u] < len(a):
                    v = a[pos[u]]
                    pos[u] += 1
                    w = mate_r[v]
                    if w == -1:
                        for uu, vv in zip(stack, via + [v]):
                            mate_l[uu] = vv
                            mate_r[vv] = uu
                        stack = []
                        descended = True
                        break
                    if dist[w] == dist[u] + 1:
                        stack.append(w)
                        via.append(v)
                        descended = True
                        break
                if not descended:
                    dist[u] = -2
                    stack.pop()
                    if via:
                        via.pop()


def hopcroft_karp(b: BipartiteGraph) -> dict:
    """Maximum-cardinality matching of ``b`` as ``{left_label: right_label}``.

    Neighbors are scanned in ascending index order, so the result is
    deterministic for a given input.
    """
    mate_l = hopcroft_karp_indexed(b)
    return {b.left_labels[i]: b.right_labels[j] for i, j in enumerate(mate_l) if j != -1}


class Digraph:
    """Directed graph on hashable vertices; parallel arcs are deduplicated."""

    def __init__(self, vertices: Iterable[Hashable] = (), arcs: Iterable = ()):
        self.succ: dict = {}
        for v in vertices:
            self.succ.setdefault(v, {})
        for a, b in arcs:
            self.add_arc(a, b)

    def add_arc(self, a, b) -> None:
        self.succ.setdefault(a, {})[b] = None
        self.succ.setdefault(b, {})

    def vertices(self) -> list:
        return list(self.succ)

    def arcs(self):
        for a, out in self.succ.items():
            for b in out:
                yield a, b


def kosaraju_indexed(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components of ``0..n-1``, sinks first."""
    pred: list[list[int]] = [[] for _ in range(n)]
    for a in range(n):
        for b in succ[a]:
            pred[b].append(a)
    # First pass on the reversed graph: finishing order there makes the
    # second pass (on the original arcs) emit components sinks first.
    seen = [False] * n
    order: list[int] = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [(s, 0)]
        while stack:
            v, i = stack[-1]
            nb = pred[v]
            if i < len(nb):
                stack[-1] = (v, i + 1)
                w = nb[i]
                if not seen[w]:
                    seen[w] = True
                    stack.append((w, 0))
            else:
                stack.pop()
                order.append(v)
    comp = [-1] * n
    comps: list[list[int]] = []
    for s in reversed(order):
        if comp[s] != -1:
            continue
        cid = len(comps)
        members = [s]
        comp[s] = cid
        stack = [s]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if comp[w] == -1:
                    comp[w] = cid
                    members.append(w)
                    stack.append(w)
        comps.append(members)
    return comps


def kosaraju_scc(d: Digraph) -> list[list]:
    """SCCs of ``d`` in reverse topological order.

    If an arc leads from component A to a different component B, then B
    appears before A in the returned list.
    """
    labels = d.vertices()
    index = {v: i for i, v in enumerate(labels)}
    succ = [[index[w] for w in d.succ[v]] for v in labels]
    return [[labels[i] for i in c] for c in kosaraju_indexed(len(labels), succ)]


def _edmonds(n: int, adj: list[list[int]]) -> list[int]:
    match = [-1] * n
    for v in range(n):
        if match[v] == -1:
            for u in adj[v]:
                if match[u] == -1:
                    match[u] = v
                    match[v] = u
                    break

    def find_path(root: int) -> tuple[int, list[int]]:
        used = [False] * n
        parent = [-1] * n
        base = list(range(n))
        used[root] = True
        queue = [root]
        head = 0

        def lca(a: int, b: int) -> int:
            on_path = [False] * n
            while True:
                a = base[a]
                on_path[a] = True
                if match[a] == -1:
                    break
                a = parent[match[a]]
            while True:
                b = base[b]
                if on_path[b]:
                    return b
                b = parent[match[b]]

        def mark_path(v: int, b: int, child: int, in_blossom: list[bool]) -> None:
            while base[v] != b:
                in_blossom[base[v]] = True
                in_blossom[base[match[v]]] = True
                parent[v] = child
                child = match[v]
                v = parent[match[v]]

        while head < len(queue):
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = lca(v, to)
                    in_blossom = [False] * n
                    mark_path(v, cur, to, in_blossom)
                    mark_path(to, cur, v, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if match[to] == -1:
                        return to, parent
                    nxt = match[to]
                    used[nxt] = True
                    queue.append(nxt)
        return -1, parent

    for root in range(n):
        if match[root] != -1:
            continue
        v, parent = find_path(root)
        while v != -1:
            pv = parent[v]
            ppv = match[pv]
            match[v] = pv
            match[pv] = v
            v = ppv
    return match


def blossom_mcm(g: Graph) -> Matching:
    """Maximum-cardinality matching of a general graph (Edmonds' blossoms).

    Each connected component is solved on its own, which keeps the
    O(n^3) worst case confined to the largest component.
    """
    edges = []
    for comp in connected_components(g):
        if len(comp) < 2:
            continue
        index = {v: i for i, v in enumerate(comp)}
        adj = [[index[u] for u in sorted(g.neighbors(v))] for v in comp]
        match = _edmonds(len(comp), adj)
        edges.extend((comp[i], comp[j]) for i, j in enumerate(match) if j > i)
    return Matching(edges)


def _bitmask_view(g: Graph, guard: int, what: str):
    if g.n > guard:
        raise OracleGuardError(f"{what} refuses graphs with more than {guard} vertices (n={g.n})")
    verts = g.vertices()
    index = {v: i for i, v in enumerate(verts)}
    nbmask = [0] * len(verts)
    for u, v in g.edges():
        nbmask[index[u]] |= 1 << index[v]
        nbmask[index[v]] |= 1 << index[u]
    return verts, index, nbmask


def brute_force_mcm(g: Graph, guard: int = 20) -> tuple[int, Matching]:
    """Exact maximum matching: branch on the lowest remaining vertex."""
    verts, _, nbmask = _bitmask_view(g, guard, "brute_force_mcm")
    memo: dict[int, tuple[int, int, int]] = {}

    def best(mask: int) -> int:
        # memo[mask] = (size, chosen partner bit or 0, next mask)
        if mask in memo:
            return memo[mask][0]
        cap = bin(mask).count("1") // 2
        if cap == 0:
            memo[mask] = (0, 0, 0)
            return 0
        low = mask & -mask
        vi = low.bit_length() - 1
        rest = mask ^ low
        top = (-1, 0, 0)
        cand = nbmask[vi] & rest
        while cand:
            ub = cand & -cand
            cand ^= ub
            val = 1 + best(rest ^ ub)
            if val > top[0]:
                top = (val, ub, rest ^ ub)
                if val == cap:
                    break
        if top[0] < cap:
            val = best(rest)
            if val > top[0]:
                top = (val, 0, rest)
        memo[mask] = top
        return top[0]

    full = (1 << len(verts)) - 1
    size = best(full)
    edges = []
    mask = full
    while mask:
        val, ub, nxt = memo[mask]
        if val == 0:
            break
        if ub:
            low = mask & -mask
            edges.append((verts[low.bit_length() - 1], verts[ub.bit_length() - 1]))
        mask = nxt
    return size, Matching(edges)


def brute_force_mwm(g: Graph, guard: int = 18) -> tuple[int, Matching]:
    """Exact maximum-weight matching by the same lowest-vertex recursion.

    Components are solved independently, so the guard applies per component.
    """
    total = 0
    edges: list[tuple[int, int]] = []
    for comp in connected_components(g):
        if len(comp) < 2:
            continue
        if len(comp) > guard:
            raise OracleGuardError(
                f"brute_force_mwm refuses components with more than {guard} vertices "
                f"(component of size {len(comp)})"
            )
        w, m = _mwm_component(g, comp)
        total += w
        edges.extend(m)
    return total, Matching(edges)


def _mwm_component(g: Graph, verts: list[int]):
    index = {v: i for i, v in enumerate(verts)}
    k = len(verts)
    nbr: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for v in verts:
        for u in g.neighbors(v):
            w = g.weight(v, u)
            if w > 0:
                nbr[index[v]].append((1 << index[u], w))
    memo: dict[int, tuple[int, int, int]] = {}

    def best(mask: int) -> int:
        if mask in memo:
            return memo[mask][0]
        if mask & (mask - 1) == 0:
            memo[mask] = (0, 0, 0)
            return 0
        low = mask & -mask
        vi = low.bit_length() - 1
        rest = mask ^ low
        top = (best(rest), 0, rest)
        for ub, w in nbr[vi]:
            if rest & ub:
                val = w + best(rest ^ ub)
                if val > top[0]:
                    top = (val, ub, rest ^ ub)
        memo[mask] = top
        return top[0]

    full = (1 << k) - 1
    total = best(full)
    edges = []
    mask = full
    while mask and memo[mask][0] > 0:
        _, ub, nxt = memo[mask]
        if ub:
            low = mask & -mask
            edges.append((verts[low.bit_length() - 1], verts[ub.bit_length() - 1]))
        mask = nxt
    return total, edges


def brute_force_vc(g: Graph, guard: int = 20) -> int:
    """Vertex cover number by branching on a maximum-degree vertex."""
    _, _, nbmask = _bitmask_view(g, guard, "brute_force_vc")
    k = len(nbmask)
    best = [k]

    def solve(mask: int, used: int) -> None:
        if used >= best[0]:
            return
        pick = -1
        pick_deg = 0
        m = mask
        while m:
            low = m & -m
            m ^= low
            i = low.bit_length() - 1
            d = bin(nbmask[i] & mask).count("1")
            if d > pick_deg:
                pick, pick_deg = i, d
        if pick_deg == 0:
            best[0] = used
            return
        solve(mask & ~(1 << pick), used + 1)
        nb = nbmask[pick] & mask
        solve(mask & ~nb & ~(1 << pick), used + bin(nb).count("1"))

    solve((1 << k) - 1, 0)
    return best[0]
