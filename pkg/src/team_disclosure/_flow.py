"""Exact max-flow on small graphs (Dinic), used for stochastic-dominance checks.

Capacities are arbitrary-precision integers, so feasibility answers are exact
after scaling rational masses to a common denominator.
"""
from __future__ import annotations

from collections import deque

INF = None  # sentinel for unbounded capacity


class FlowNetwork:
    def __init__(self, n_nodes: int) -> None:
        self.n = n_nodes
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int | None] = []

    def add_edge(self, u: int, v: int, capacity: int | None) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(capacity)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def _bfs(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if level[v] < 0 and (self.cap[e] is INF or self.cap[e] > 0):
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, u: int, t: int, pushed: int | None, level: list[int], it: list[int]) -> int:
        if u == t:
            assert pushed is not None
            return pushed
        while it[u] < len(self.adj[u]):
            e = self.adj[u][it[u]]
            v = self.to[e]
            c = self.cap[e]
            if (c is INF or c > 0) and level[v] == level[u] + 1:
                room = pushed if c is INF else (c if pushed is None else min(pushed, c))
                got = self._dfs(v, t, room, level, it)
                if got:
                    if self.cap[e] is not INF:
                        self.cap[e] -= got
                    rev = e ^ 1
                    if self.cap[rev] is not INF:
                        self.cap[rev] += got
                    return got
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        """Total flow pushed from s to t. All s-adjacent capacities must be finite."""
        total = 0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                got = self._dfs(s, t, None, level, it)
                if not got:
                    break
                total += got


def coupling_feasible(supply: list[int], demand: list[int], arcs: list[tuple[int, int]]) -> bool:
    """Whether supply can be routed to demand along the allowed arcs.

    supply[i] units leave source node i; demand[j] units must reach sink node
    j; an arc (i, j) permits unlimited routing from i to j. Supplies and
    demands must have equal totals.
    """
    total = sum(supply)
    if total != sum(demand):
        return False
    ns, nd = len(supply), len(demand)
    net = FlowNetwork(ns + nd + 2)
    src, snk = ns + nd, ns + nd + 1
    for i, s in enumerate(supply):
        if s:
            net.add_edge(src, i, s)
    for j, d in enumerate(demand):
        if d:
            net.add_edge(ns + j, snk, d)
    for i, j in arcs:
        net.add_edge(i, ns + j, INF)
    return net.max_flow(src, snk) == total


def min_upper_set_sum(
    weights: list[int],
    above: list[list[int]],
    forced_in: int,
    forced_out: int,
) -> int:
    """Minimum of sum(weights[x] for x in U) over upper sets U.

    ``above[x]`` lists the immediate successors of x; U must contain every
    successor of each of its members. ``forced_in`` must belong to U and
    ``forced_out`` must not. Solved as a minimum closure via max-flow,
    with forcing edges too large to sit in any minimum cut.
    """
    n = len(weights)
    big = sum(abs(w) for w in weights) + 1
    # Choosing U to minimize sum(w) == project selection with profit -w.
    net = FlowNetwork(n + 2)
    src, snk = n, n + 1
    base = 0
    for x, w in enumerate(weights):
        p = -w
        cap_src = p if p > 0 else 0
        cap_snk = -p if p < 0 else 0
        if p > 0:
            base += p
        if x == forced_in:
            cap_src += big
        if x == forced_out:
            cap_snk += big
        if cap_src:
            net.add_edge(src, x, cap_src)
        if cap_snk:
            net.add_edge(x, snk, cap_snk)
    for x, succs in enumerate(above):
        for y in succs:
            net.add_edge(x, y, big)
    best_profit = base - net.max_flow(src, snk)
    return -best_profit
