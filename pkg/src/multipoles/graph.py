"""Dual-copy signed correlation graph and maximal-clique enumeration.

Each variable i appears as two nodes: i in copy 1 (sign +1) and i + N in
copy 2 (sign -1). Within-copy edges require corr <= rho, cross-copy edges
require corr >= -rho, and a variable is never connected to its own mirror.
A clique then names a set of variables together with a sign assignment
under which every adjusted pairwise correlation is at most rho, and the
mirror image of a clique (both copies swapped) names the same assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures


class CliqueBudgetExceeded(RuntimeError):
    """Raised when enumeration finds more cliques than the configured budget.

    Carries the cliques found so far so callers can continue with partial
    results if they choose.
    """

    def __init__(self, budget: int, partial: list[tuple[int, ...]]):
        super().__init__(f"maximal-clique budget of {budget} exceeded")
        self.budget = budget
        self.partial = partial


@dataclass(frozen=True)
class PromisingGraph:
    """Immutable undirected graph on 2N nodes; node v % N is the variable."""

    n_variables: int
    rho: float
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_variables

    def variable_of(self, node: int) -> int:
        return node % self.n_variables

    def copy_of(self, node: int) -> int:
        return 1 if node < self.n_variables else 2

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def has_edge(self, a: int, b: int) -> bool:
        adj = self.adjacency[a]
        lo, hi = 0, len(adj)
        while lo < hi:
            mid = (lo + hi) // 2
            if adj[mid] < b:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(adj) and adj[lo] == b

    def dump(self) -> str:
        """Edge list, one line per undirected edge: 'copy:var copy:var w'."""
        n = self.n_variables
        lines = []
        for a in range(self.n_nodes):
            for b in self.adjacency[a]:
                if b > a:
                    lines.append(f"{self.copy_of(a)}:{a % n} {self.copy_of(b)}:{b % n} {self.rho:g}")
        return "\n".join(lines)


def build_graph(A, rho: float) -> PromisingGraph:
    """Construct the dual-copy graph for a correlation matrix at threshold rho."""
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    M = measures._entries(A)
    n = M.shape[0]
    offdiag = ~np.eye(n, dtype=bool)
    within = (M <= rho) & offdiag
    cross = (M >= -rho) & offdiag
    adj = np.zeros((2 * n, 2 * n), dtype=bool)
    adj[:n, :n] = within
    adj[n:, n:] = within
    adj[:n, n:] = cross
    adj[n:, :n] = cross.T
    adjacency = tuple(tuple(int(b) for b in np.nonzero(adj[a])[0]) for a in range(2 * n))
    return PromisingGraph(n_variables=n, rho=float(rho), adjacency=adjacency)


def _degeneracy_order(g: PromisingGraph) -> list[int]:
    """Peel minimum-degree nodes, ties broken by ascending node id."""
    n = g.n_nodes
    deg = [g.degree(v) for v in range(n)]
    removed = [False] * n
    buckets: list[set[int]] = [set() for _ in range(n + 1)]
    for v in range(n):
        buckets[deg[v]].add(v)
    order = []
    cursor = 0
    for _ in range(n):
        while cursor < len(buckets) and not buckets[cursor]:
            cursor += 1
        v = min(buckets[cursor])
        buckets[cursor].remove(v)
        removed[v] = True
        order.append(v)
        for u in g.adjacency[v]:
            if not removed[u]:
                buckets[deg[u]].remove(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
                if deg[u] < cursor:
                    cursor = deg[u]
    return order


def maximal_cliques(g: PromisingGraph, min_size: int = 1, budget: int = 10_000_000) -> list[tuple[int, ...]]:
    """All maximal cliques of at least min_size nodes, canonically sorted.

    Degeneracy-ordered Bron-Kerbosch with pivoting. Exceeding the clique
    budget raises CliqueBudgetExceeded carrying the partial list.
    """
    if min_size < 1:
        raise ValueError(f"min_size must be >= 1, got {min_size}")
    neighbors = [frozenset(a) for a in g.adjacency]
    found: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]):
        if not p and not x:
            if len(r) >= min_size:
                found.append(tuple(sorted(r)))
                if len(found) > budget:
                    raise CliqueBudgetExceeded(budget, found[:budget])
            return
        pivot = max(p | x, key=lambda v: (len(p & neighbors[v]), -v))
        for v in sorted(p - neighbors[pivot]):
            r.append(v)
            expand(r, p & neighbors[v], x & neighbors[v])
            r.pop()
            p.remove(v)
            x.add(v)

    order = _degeneracy_order(g)
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = {u for u in g.adjacency[v] if pos[u] > pos[v]}
        earlier = {u for u in g.adjacency[v] if pos[u] < pos[v]}
        expand([v], later, earlier)
    found.sort()
    return found


def clique_to_signed_set(g: PromisingGraph, clique) -> measures.SignedSet:
    """Map a clique to its canonical signed variable set.

    Copy-1 nodes carry sign +1 and copy-2 nodes -1; a clique and its mirror
    map to the same SignedSet, so canonical equality deduplicates them.
    """
    n = g.n_variables
    members = []
    signs = []
    seen = set()
    for node in clique:
        var = node % n
        if var in seen:
            raise ValueError(f"clique contains both copies of variable {var}")
        seen.add(var)
        members.append(var)
        signs.append(1 if node < n else -1)
    return measures.SignedSet.canonical(members, signs)
