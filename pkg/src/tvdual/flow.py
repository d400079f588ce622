"""Max-flow oracle for the equivalence coupling problem.

The largest mass a coupling can put on E equals the maximum flow in the
bipartite network

    source -> left block i   (capacity P(i))
    left i -> right j        (unbounded, only when (i, j) lies in E)
    right j -> sink          (capacity P'(j))

This module computes that flow with exact rationals by shortest augmenting
paths. It deliberately knows nothing about equivalence classes or class masses:
the only thing it asks of E is pair membership.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .coupling import Coupling, complete_subcoupling
from .errors import InternalDefect, PreconditionError
from .measure import Measure
from .relations import EquivalenceRelation, require_measurable

_ZERO = Fraction(0)


class FlowNetwork:
    """Residual network over integer nodes with rational capacities."""

    def __init__(self, n_nodes: int):
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.cap: dict[tuple[int, int], Fraction] = {}

    def add_edge(self, u: int, v: int, capacity: Fraction) -> None:
        if (u, v) not in self.cap:
            self.adj[u].append(v)
            self.cap[(u, v)] = _ZERO
        if (v, u) not in self.cap:
            self.adj[v].append(u)
            self.cap[(v, u)] = _ZERO
        self.cap[(u, v)] += capacity

    def push(self, u: int, v: int, amount: Fraction) -> None:
        self.cap[(u, v)] -= amount
        self.cap[(v, u)] += amount

    def _shortest_path(self, s: int, t: int) -> list[int] | None:
        parent = {s: s}
        todo = deque([s])
        while todo:
            u = todo.popleft()
            for v in self.adj[u]:
                if v not in parent and self.cap[(u, v)] > 0:
                    parent[v] = u
                    if v == t:
                        path = [t]
                        while path[-1] != s:
                            path.append(parent[path[-1]])
                        return path[::-1]
                    todo.append(v)
        return None

    def augment(self, s: int, t: int) -> Fraction:
        """Saturate shortest augmenting paths until none is left; return the added flow."""
        added = _ZERO
        while (path := self._shortest_path(s, t)) is not None:
            bottleneck = min(self.cap[(u, v)] for u, v in zip(path, path[1:]))
            for u, v in zip(path, path[1:]):
                self.push(u, v, bottleneck)
            added += bottleneck
        return added


def max_flow_on_relation(P: Measure, P_prime: Measure, E: EquivalenceRelation) -> tuple[Fraction, Coupling]:
    """Maximum mass a sub-coupling of (P, P') supported on E can carry."""
    n = P.space.n_blocks
    source, sink = 2 * n, 2 * n + 1
    net = FlowNetwork(2 * n + 2)
    unbounded = P.total + P_prime.total
    reps = [b[0] for b in P.space.blocks]
    pair_edges = []
    for i in range(n):
        if P.masses[i]:
            net.add_edge(source, i, P.masses[i])
        if P_prime.masses[i]:
            net.add_edge(n + i, sink, P_prime.masses[i])
    for i in range(n):
        if not P.masses[i]:
            continue
        for j in range(n):
            if P_prime.masses[j] and (reps[i], reps[j]) in E:
                net.add_edge(i, n + j, unbounded)
                pair_edges.append((i, j))

    # warm start: any feasible flow is a valid starting point for augmentation
    flow = _ZERO
    for i, j in pair_edges:
        amount = min(net.cap[(source, i)], net.cap[(n + j, sink)])
        if amount > 0:
            net.push(source, i, amount)
            net.push(i, n + j, amount)
            net.push(n + j, sink, amount)
            flow += amount
    flow += net.augment(source, sink)

    entries = {}
    for i, j in pair_edges:
        carried = net.cap[(n + j, i)]
        if carried > 0:
            entries[(i, j)] = carried
    return flow, Coupling(P.space, entries)


def flow_oracle(P: Measure, P_prime: Measure, E: EquivalenceRelation,
                complete: bool = True) -> tuple[Fraction, Coupling]:
    """Optimal value ``1 - maxflow`` and the flow as a coupling.

    With ``complete`` the flow is extended to a full coupling of P and P' by
    product completion of the unused marginals; otherwise the raw flow
    (a sub-coupling supported on E) is returned.
    """
    if P.space != P_prime.space or P.space != E.space:
        raise PreconditionError("same_space", "P, P' and E must share atoms and sigma-algebra")
    require_measurable(E)
    flow, sub = max_flow_on_relation(P, P_prime, E)
    if sub.total != flow:
        raise InternalDefect(f"flow value {flow} differs from carried mass {sub.total}")
    coupling = complete_subcoupling(sub, P, P_prime) if complete else sub
    return 1 - flow, coupling
