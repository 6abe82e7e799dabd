"""Static variable-ordering heuristics for the symbolic encoding.

All heuristics work on the hypergraph whose vertices are the model's
variables and whose hyperedges are, per linearized edge, the variables it
reads or writes.  Orders are permutations of variable indices in model
order (pointers and discretes automaton by automaton, inputs last).

Two quality metrics drive the search: the total hyperedge span (used by
FORCE) and the weighted event span WES (used by DCSH candidate selection
and the sliding-window pass),

    WES = (1/|G|) * sum_h (2 * (hi_h + 1) / n) * (span_h / n)

where ``hi_h``/``span_h`` are the highest position and position spread of
hyperedge ``h`` under the candidate order and ``n`` the variable count.
Every tie anywhere breaks toward lower model index, keeping results
reproducible across platforms.
"""

from __future__ import annotations

import itertools
from collections import deque

from .model import BinaryOp, Expr, LocRef, UnaryOp, VarRef
from .transform import LinearModel

__all__ = [
    "STRATEGIES", "compute_order", "dsm_matrix", "expr_vars", "force",
    "hyperedges", "sliding_window", "total_span", "wes",
]

STRATEGIES = (
    "model", "dcsh", "force", "sloan", "cm",
    "pipeline-v08", "pipeline-v40",
)


def expr_vars(expr: Expr, out: set[str]) -> set[str]:
    if isinstance(expr, VarRef):
        out.add(expr.name)
    elif isinstance(expr, UnaryOp):
        expr_vars(expr.operand, out)
    elif isinstance(expr, BinaryOp):
        expr_vars(expr.left, out)
        expr_vars(expr.right, out)
    elif isinstance(expr, LocRef):
        raise ValueError("location references must be linearized away first")
    return out


def hyperedges(model: LinearModel) -> list[frozenset[int]]:
    """One variable set per linearized edge: guard, targets, and updates."""
    index = {var.name: i for i, var in enumerate(model.variables)}
    result = []
    for edge in model.edges:
        names: set[str] = set()
        expr_vars(edge.guard, names)
        for name, rhs in edge.updates:
            names.add(name)
            expr_vars(rhs, names)
        if names:
            result.append(frozenset(index[name] for name in names))
    return result


def dsm_matrix(edges: list[frozenset[int]], n: int) -> list[list[int]]:
    """Symmetric co-occurrence counts: how many hyperedges share each pair."""
    weight = [[0] * n for _ in range(n)]
    for edge in edges:
        for i, j in itertools.combinations(sorted(edge), 2):
            weight[i][j] += 1
            weight[j][i] += 1
    return weight


def wes(order: list[int], edges: list[frozenset[int]]) -> float:
    if not edges:
        return 0.0
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    total = 0.0
    for edge in edges:
        places = [pos[v] for v in edge]
        hi, lo = max(places), min(places)
        total += (2 * (hi + 1) / n) * ((hi - lo) / n)
    return total / len(edges)


def total_span(order: list[int], edges: list[frozenset[int]]) -> int:
    pos = {v: i for i, v in enumerate(order)}
    return sum(
        max(pos[v] for v in edge) - min(pos[v] for v in edge) for edge in edges
    )


# ----------------------------------------------------------------------
# graph helpers


class _Graph:
    def __init__(self, edges: list[frozenset[int]], n: int):
        self.n = n
        self.weight = dsm_matrix(edges, n)
        self.adj = [
            [j for j in range(n) if self.weight[i][j] > 0] for i in range(n)
        ]
        self.degree = [len(nbrs) for nbrs in self.adj]

    def components(self) -> list[list[int]]:
        """Connected components, largest first, isolated vertices last."""
        seen = [False] * self.n
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self.adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        comps.sort(key=lambda comp: (-len(comp), comp[0]))
        return comps

    def _levels(self, root: int, members: list[int]) -> list[list[int]]:
        dist = {root: 0}
        levels = [[root]]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    if dist[w] == len(levels):
                        levels.append([])
                    levels[dist[w]].append(w)
                    queue.append(w)
        return levels

    def pseudo_peripheral(self, comp: list[int]) -> tuple[int, int]:
        """A far-apart (start, end) pair via repeated level structures."""
        root = min(comp, key=lambda v: (self.degree[v], v))
        levels = self._levels(root, comp)
        while True:
            far = min(levels[-1], key=lambda v: (self.degree[v], v))
            far_levels = self._levels(far, comp)
            if len(far_levels) > len(levels):
                root, levels = far, far_levels
            else:
                return root, far

    def distances(self, root: int) -> dict[int, int]:
        dist = {root: 0}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist


def _cuthill_mckee(graph: _Graph, comp: list[int]) -> list[int]:
    """Weight-aware Cuthill-McKee: heavier neighbors first."""
    start, _ = graph.pseudo_peripheral(comp)
    visited = {start}
    order = []
    queue = deque([start])
    while queue:
        v = queue.popleft()
        order.append(v)
        nbrs = [w for w in graph.adj[v] if w not in visited]
        nbrs.sort(key=lambda w: (-graph.weight[v][w], graph.degree[w], w))
        visited.update(nbrs)
        queue.extend(nbrs)
    return order


def _sloan(graph: _Graph, comp: list[int], w1: int = 1, w2: int = 2) -> list[int]:
    """Sloan profile reduction: balance distance-to-end against degree."""
    start, end = graph.pseudo_peripheral(comp)
    dist = graph.distances(end)
    INACTIVE, PREACTIVE, ACTIVE, POSTACTIVE = range(4)
    status = {v: INACTIVE for v in comp}
    prio = {v: w1 * dist[v] - w2 * (graph.degree[v] + 1) for v in comp}
    status[start] = PREACTIVE
    queue = [start]
    order = []
    while queue:
        v = max(queue, key=lambda u: (prio[u], -u))
        queue.remove(v)
        if status[v] == PREACTIVE:
            for w in graph.adj[v]:
                prio[w] += w2
                if status[w] == INACTIVE:
                    status[w] = PREACTIVE
                    queue.append(w)
        status[v] = POSTACTIVE
        order.append(v)
        for w in graph.adj[v]:
            if status[w] == PREACTIVE:
                status[w] = ACTIVE
                prio[w] += w2
                for u in graph.adj[w]:
                    if status[u] != POSTACTIVE:
                        prio[u] += w2
                        if status[u] == INACTIVE:
                            status[u] = PREACTIVE
                            queue.append(u)
    return order


def _dcsh(edges: list[frozenset[int]], n: int) -> list[int]:
    """Per component, the best of Cuthill-McKee, Sloan, and their reversals
    by WES; components concatenated largest first."""
    graph = _Graph(edges, n)
    order: list[int] = []
    for comp in graph.components():
        if len(comp) == 1:
            order.extend(comp)
            continue
        members = set(comp)
        local = [e for e in edges if e <= members]
        cm = _cuthill_mckee(graph, comp)
        sl = _sloan(graph, comp)
        candidates = [cm, sl, cm[::-1], sl[::-1]]
        order.extend(min(candidates, key=lambda cand: wes(cand, local)))
    return order


def force(
    order: list[int], edges: list[frozenset[int]], rounds: int = 20
) -> list[int]:
    """Iterated center-of-gravity placement; returns the best order seen
    by total hyperedge span (the initial order counts)."""
    best, best_span = list(order), total_span(order, edges)
    current = list(order)
    for _ in range(rounds):
        pos = {v: i for i, v in enumerate(current)}
        pulls: dict[int, list[float]] = {}
        for edge in edges:
            cog = sum(pos[v] for v in edge) / len(edge)
            for v in edge:
                pulls.setdefault(v, []).append(cog)
        current = sorted(
            current,
            key=lambda v: (
                sum(pulls[v]) / len(pulls[v]) if v in pulls else float(pos[v]),
                pos[v],
            ),
        )
        span = total_span(current, edges)
        if span < best_span:
            best, best_span = list(current), span
        if all(pos[v] == i for i, v in enumerate(current)):
            break  # fixed point, further rounds change nothing
    return best


def sliding_window(
    order: list[int], edges: list[frozenset[int]], width: int = 4
) -> list[int]:
    """One left-to-right pass permuting each ``width`` consecutive variables
    to the arrangement with the lowest WES; keeps only strict improvements."""
    order = list(order)
    if len(order) < 2 or not edges:
        return order
    width = min(width, len(order))
    current = wes(order, edges)
    for at in range(len(order) - width + 1):
        window = order[at:at + width]
        best, best_wes = None, current
        for perm in itertools.permutations(window):
            if list(perm) == window:
                continue
            candidate = order[:at] + list(perm) + order[at + width:]
            value = wes(candidate, edges)
            if value < best_wes:
                best, best_wes = candidate, value
        if best is not None:
            order, current = best, best_wes
    return order


def compute_order(model: LinearModel, strategy: str) -> list[int]:
    """Variable order per strategy name; see :data:`STRATEGIES`.

    ``custom:a,b,c`` orders the named variables explicitly (all of them,
    each exactly once).
    """
    n = len(model.variables)
    base = list(range(n))
    if strategy.startswith("custom:"):
        names = [s.strip() for s in strategy[len("custom:"):].split(",") if s.strip()]
        index = {var.name: i for i, var in enumerate(model.variables)}
        unknown = [name for name in names if name not in index]
        if unknown:
            raise ValueError(f"unknown variable(s) in custom order: {', '.join(unknown)}")
        if sorted(index[name] for name in names) != base:
            raise ValueError("custom order must list every variable exactly once")
        return [index[name] for name in names]
    edges = hyperedges(model)
    if strategy == "model":
        return base
    if strategy == "dcsh":
        return _dcsh(edges, n)
    if strategy == "force":
        return force(base, edges)
    if strategy == "sloan":
        graph = _Graph(edges, n)
        return [v for comp in graph.components()
                for v in (_sloan(graph, comp) if len(comp) > 1 else comp)]
    if strategy == "cm":
        graph = _Graph(edges, n)
        return [v for comp in graph.components()
                for v in (_cuthill_mckee(graph, comp) if len(comp) > 1 else comp)]
    if strategy == "pipeline-v08":
        return sliding_window(force(base, edges), edges)
    if strategy == "pipeline-v40":
        return sliding_window(force(_dcsh(edges, n), edges), edges)
    raise ValueError(f"unknown ordering strategy '{strategy}'")
