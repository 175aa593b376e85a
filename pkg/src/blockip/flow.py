"""Exact integral min-cost flow and transportation rounding.

Successive shortest augmenting paths with integer node potentials: one
Bellman-Ford pass absorbs negative arc costs (profit maximization enters
negated), after which every Dijkstra runs on nonnegative reduced costs.
All arithmetic is plain Python int, so supplies and capacities in the
1e40 range cost nothing but digits.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import MalformedProblemError
from .model import Infeasible


class Network:
    """Directed graph with paired residual arcs (arc k reversed is k^1)."""

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.supply = [0] * num_nodes
        self.to = []
        self.cap = []
        self.cost = []
        self.adj = [[] for _ in range(num_nodes)]

    def set_supply(self, v: int, amount) -> None:
        self.supply[v] = amount

    def add_arc(self, u: int, v: int, capacity, cost) -> int:
        if capacity < 0:
            raise MalformedProblemError("negative arc capacity")
        k = len(self.to)
        self.to.extend((v, u))
        self.cap.extend((capacity, 0))
        self.cost.extend((cost, -cost))
        self.adj[u].append(k)
        self.adj[v].append(k + 1)
        return k


@dataclass(frozen=True)
class FlowResult:
    flows: tuple  # per add_arc call, in creation order
    cost: int


def min_cost_flow(net: Network):
    """Route all supplies at minimum cost.  FlowResult or Infeasible.

    Precondition: the arc set as built contains no negative-cost directed
    cycle (bipartite transportation networks are acyclic, so this holds for
    every caller in this package).  A violation is detected and reported as
    MalformedProblemError rather than silently mispriced.
    """
    if sum(net.supply) != 0:
        return Infeasible("SupplyImbalance")

    n = net.num_nodes + 2
    source, sink = n - 2, n - 1
    to = list(net.to)
    cap = list(net.cap)
    cost = list(net.cost)
    adj = [list(a) for a in net.adj] + [[], []]

    def raw_arc(u, v, c, w):
        k = len(to)
        to.extend((v, u))
        cap.extend((c, 0))
        cost.extend((w, -w))
        adj[u].append(k)
        adj[v].append(k + 1)

    need = 0
    for v, s in enumerate(net.supply):
        if s > 0:
            raw_arc(source, v, s, 0)
            need += s
        elif s < 0:
            raw_arc(v, sink, -s, 0)

    # Bellman-Ford on the initial arcs gives potentials that make every
    # residual reduced cost nonnegative, even with negative profit arcs.
    INF = None
    pot = [0] * n
    for round_ in range(n):
        changed = False
        for u in range(n):
            pu = pot[u]
            for k in adj[u]:
                if cap[k] > 0 and pu + cost[k] < pot[to[k]]:
                    pot[to[k]] = pu + cost[k]
                    changed = True
        if not changed:
            break
    else:
        raise MalformedProblemError("negative-cost cycle in flow network")

    pushed = 0
    while pushed < need:
        dist = [INF] * n
        dist[source] = 0
        parent = [-1] * n
        heap = [(0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if dist[u] != d:
                continue
            for k in adj[u]:
                if cap[k] <= 0:
                    continue
                v = to[k]
                nd = d + cost[k] + pot[u] - pot[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    parent[v] = k
                    heapq.heappush(heap, (nd, v))
        if dist[sink] is None:
            return Infeasible("NoAugmentingPath")
        dt = dist[sink]
        for v in range(n):
            pot[v] += dt if dist[v] is None else min(dist[v], dt)
        bottleneck = need - pushed
        v = sink
        while v != source:
            k = parent[v]
            if cap[k] < bottleneck:
                bottleneck = cap[k]
            v = to[k ^ 1]
        v = sink
        while v != source:
            k = parent[v]
            cap[k] -= bottleneck
            cap[k ^ 1] += bottleneck
            v = to[k ^ 1]
        pushed += bottleneck

    flows = []
    total = 0
    for k in range(0, len(net.to), 2):
        f = cap[k + 1]  # reverse capacity equals flow sent
        flows.append(f)
        total += f * net.cost[k]
    return FlowResult(tuple(flows), total)


@dataclass(frozen=True)
class TransportProblem:
    """Capacitated transportation data: n rows to spread over t columns."""

    row_totals: tuple
    col_totals: tuple
    cell_lower: tuple  # per (row, col)
    cell_upper: tuple
    cell_profit: tuple

    @staticmethod
    def make(row_totals, col_totals, cell_lower, cell_upper, cell_profit):
        n, t = len(row_totals), len(col_totals)
        mats = (cell_lower, cell_upper, cell_profit)
        for m in mats:
            if len(m) != n or any(len(row) != t for row in m):
                raise MalformedProblemError("cell matrix shape mismatch")
        for i in range(n):
            for h in range(t):
                if cell_lower[i][h] > cell_upper[i][h]:
                    raise MalformedProblemError(f"cell ({i},{h}) has empty box")
        return TransportProblem(
            tuple(row_totals),
            tuple(col_totals),
            tuple(tuple(r) for r in cell_lower),
            tuple(tuple(r) for r in cell_upper),
            tuple(tuple(r) for r in cell_profit),
        )


@dataclass(frozen=True)
class TransportResult:
    cells: tuple  # n x t integral matrix
    objective: int


def solve_transport(p: TransportProblem):
    """Profit-maximal integral cell matrix, or Infeasible.

    Lower bounds are shipped unconditionally and the residual problem runs
    through min_cost_flow with profits negated.  Total unimodularity of the
    constraint matrix makes the integral optimum equal the LP optimum over
    the same polytope.
    """
    n, t = len(p.row_totals), len(p.col_totals)
    if sum(p.row_totals) != sum(p.col_totals):
        return Infeasible("TotalsMismatch")

    row_rest = list(p.row_totals)
    col_rest = list(p.col_totals)
    for i in range(n):
        for h in range(t):
            low = p.cell_lower[i][h]
            row_rest[i] -= low
            col_rest[h] -= low
    if any(r < 0 for r in row_rest) or any(c < 0 for c in col_rest):
        return Infeasible("LowerBoundsExceedTotals")

    net = Network(n + t)
    for i in range(n):
        net.set_supply(i, row_rest[i])
    for h in range(t):
        net.set_supply(n + h, -col_rest[h])
    for i in range(n):
        for h in range(t):
            net.add_arc(i, n + h, p.cell_upper[i][h] - p.cell_lower[i][h],
                        -p.cell_profit[i][h])

    res = min_cost_flow(net)
    if isinstance(res, Infeasible):
        return res
    cells = []
    objective = 0
    k = 0
    for i in range(n):
        row = []
        for h in range(t):
            v = p.cell_lower[i][h] + res.flows[k]
            k += 1
            row.append(v)
            objective += p.cell_profit[i][h] * v
        cells.append(tuple(row))
    return TransportResult(tuple(cells), objective)
