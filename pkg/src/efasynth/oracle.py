"""Explicit-state reference implementation.

Everything the symbolic pipeline computes is recomputed here by brute
force over the enumerated state space: states are tuples of variable
values, transitions come from direct expression evaluation, and the
supervisor is the classic fixed point over explicit sets.  Tests compare
the symbolic results against these; nothing here shares code with the
BDD path beyond the linearized model and the expression evaluator.

The universe is every in-domain valuation (the declared ranges, not the
wider encoded ranges); states breaking a plant state invariant are
dropped up front, mirroring how the symbolic side treats the plant
invariant as the universe of discourse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    BoolDomain, EnumDomain, IntDomain, Variable, domain_size, eval_expr,
)
from .transform import LinearModel

__all__ = ["ExplicitOracle", "UniverseTooLarge"]


class UniverseTooLarge(Exception):
    pass


@dataclass
class _Edge:
    event: str
    controllable: bool
    is_input: bool
    # plant-level successor lists per state index (guard, no range error,
    # in-domain target, plant event conditions)
    plant: list[list[int]]
    # additionally obeying requirement event conditions
    allowed: list[list[int]]


def _values(domain) -> list:
    if isinstance(domain, BoolDomain):
        return [0, 1]
    if isinstance(domain, IntDomain):
        return list(range(domain.lo, domain.hi + 1))
    return list(range(len(domain.literals)))


def _width(domain) -> int:
    return max(1, (domain_size(domain) - 1).bit_length())


class ExplicitOracle:
    """Explicit synthesis over an enumerated linearized model."""

    def __init__(self, model: LinearModel, cap: int = 10 ** 6):
        self.model = model
        names = [var.name for var in model.variables]
        domains = [var.domain for var in model.variables]
        total = 1
        for domain in domains:
            total *= domain_size(domain)
            if total > cap:
                raise UniverseTooLarge(
                    f"state space exceeds {cap} states"
                )
        self.names = names
        self._codes = model.codes

        def pred(expr, values):
            return bool(eval_expr(expr, values, {}, self._codes))

        plant_invs = [
            inv.predicate for inv in model.invariants
            if inv.kind == "state" and inv.side == "plant"
        ]
        req_invs = [
            inv.predicate for inv in model.invariants
            if inv.kind == "state" and inv.side != "plant"
        ]
        conditions: dict[tuple[str, str], list] = {}
        for inv in model.invariants:
            if inv.kind == "state":
                continue
            # supervisor-side conditions (re-read output models) restrict
            # like requirement-side ones
            side = "plant" if inv.side == "plant" else "requirement"
            entry = conditions.setdefault((side, inv.event), [])
            entry.append((inv.kind, inv.predicate))

        def condition_holds(side, event, values):
            for kind, predicate in conditions.get((side, event), []):
                holds = pred(predicate, values)
                if (kind == "needs" and not holds) or (
                    kind == "disables" and holds
                ):
                    return False
            return True

        # -- universe: in-domain valuations satisfying plant invariants
        self.states: list[tuple] = []
        self.index: dict[tuple, int] = {}
        for combo in itertools.product(*map(_values, domains)):
            values = dict(zip(names, combo))
            if all(pred(p, values) for p in plant_invs):
                self.index[combo] = len(self.states)
                self.states.append(combo)

        n = len(self.states)
        self.initial = {
            i for i, s in enumerate(self.states)
            if pred(model.initial, dict(zip(names, s)))
        }
        self.marked = {
            i for i, s in enumerate(self.states)
            if pred(model.marked, dict(zip(names, s)))
        }

        # -- forbidden states
        self.forbidden: set[int] = set()
        for i, s in enumerate(self.states):
            values = dict(zip(names, s))
            if any(not pred(p, values) for p in req_invs):
                self.forbidden.add(i)

        # -- transitions
        controllable = {ev.name: ev.controllable for ev in model.events}
        widths = {var.name: _width(var.domain) for var in model.variables}
        lows = {
            var.name: (var.domain.lo if isinstance(var.domain, IntDomain) else 0)
            for var in model.variables
        }
        in_state_domain = {
            var.name: set(_values(var.domain)) for var in model.variables
        }
        self.edges: list[_Edge] = []
        for edge in model.edges:
            ctrl = controllable[edge.event]
            plant = [[] for _ in range(n)]
            allowed = [[] for _ in range(n)]
            for i, s in enumerate(self.states):
                values = dict(zip(names, s))
                if not pred(edge.guard, values):
                    continue
                news = {
                    name: int(eval_expr(rhs, values, {}, self._codes))
                    for name, rhs in edge.updates
                }
                # encoded-range overflow: uncontrollable ones poison the state
                error = any(
                    not 0 <= value - lows[name] < (1 << widths[name])
                    for name, value in news.items()
                )
                if error:
                    if not ctrl:
                        self.forbidden.add(i)
                    continue
                if any(
                    value not in in_state_domain[name]
                    for name, value in news.items()
                ):
                    continue  # leaves the declared domain
                target = dict(values)
                target.update(news)
                if not all(pred(p, target) for p in plant_invs):
                    continue
                if not condition_holds("plant", edge.event, values):
                    continue
                j = self.index.get(tuple(target[name] for name in names))
                if j is None:
                    continue
                plant[i].append(j)
                if condition_holds("requirement", edge.event, values):
                    allowed[i].append(j)
                elif not ctrl:
                    # requirements cannot refuse what nobody can prevent
                    self.forbidden.add(i)
            self.edges.append(_Edge(edge.event, ctrl, False, plant, allowed))

        for var in model.variables:
            if var.kind != "input":
                continue
            at = names.index(var.name)
            plant = [[] for _ in range(n)]
            for i, s in enumerate(self.states):
                for value in _values(var.domain):
                    if value == s[at]:
                        continue
                    j = self.index.get(s[:at] + (value,) + s[at + 1:])
                    if j is not None:
                        plant[i].append(j)
            self.edges.append(
                _Edge(f"input_{var.name}", False, True, plant, plant)
            )

        self._synthesize()

    # -- set reachability helpers

    def _backward(
        self, start: set[int], edges: list[_Edge], within: set[int] | None
    ) -> set[int]:
        if within is not None:
            start = start & within
        pre: dict[int, list[int]] = {}
        for edge in edges:
            for src, dsts in enumerate(edge.allowed):
                for dst in dsts:
                    pre.setdefault(dst, []).append(src)
        reach = set(start)
        frontier = list(start)
        while frontier:
            nxt = []
            for state in frontier:
                for src in pre.get(state, ()):
                    if src in reach or (within is not None and src not in within):
                        continue
                    reach.add(src)
                    nxt.append(src)
            frontier = nxt
        return reach

    def _forward(
        self, start: set[int], succ_of, within: set[int] | None
    ) -> set[int]:
        if within is not None:
            start = start & within
        reach = set(start)
        frontier = list(start)
        while frontier:
            nxt = []
            for state in frontier:
                for dst in succ_of(state):
                    if dst in reach or (within is not None and dst not in within):
                        continue
                    reach.add(dst)
                    nxt.append(dst)
            frontier = nxt
        return reach

    # -- synthesis

    def _synthesize(self) -> None:
        universe = set(range(len(self.states)))
        unc = [e for e in self.edges if not e.controllable]
        safe = universe - self.forbidden
        while True:
            safe = self._backward(self.marked, self.edges, safe)
            doomed = self._backward(universe - safe, unc, None)
            new_safe = universe - doomed
            if new_safe == safe:
                break
            safe = new_safe
        self.safe = safe
        self.controlled_initial = self.initial & safe
        self.nonempty = bool(self.controlled_initial)

        def supervised(state):
            for edge in self.edges:
                for dst in edge.allowed[state]:
                    if not edge.controllable or dst in self.safe:
                        yield dst

        self.controlled_reachable = self._forward(
            self.controlled_initial, supervised, safe
        )

        def plant_level(state):
            for edge in self.edges:
                yield from edge.plant[state]

        self.plant_reachable = self._forward(self.initial, plant_level, None)

    # -- queries used by tests and the command-line oracle

    def enabled_events(self, state: int) -> set[str]:
        """Events the supervised system can take from a controlled state."""
        out = set()
        for edge in self.edges:
            for dst in edge.allowed[state]:
                if not edge.controllable or dst in self.safe:
                    out.add(edge.event)
                    break
        return out

    def event_guard_states(self, event: str, within: set[int] | None = None) -> set[int]:
        """States where the supervisor leaves a controllable event enabled:
        some edge of the event has a transition staying inside the safe
        set (or ``within``, for behaviors clipped by a forward pass).
        Edges of the same event are strengthened one by one and the
        results unioned, matching the symbolic per-edge strengthening."""
        targets = self.safe if within is None else within
        out = set()
        for edge in self.edges:
            if edge.event != event:
                continue
            for src, dsts in enumerate(edge.allowed):
                if any(dst in targets for dst in dsts):
                    out.add(src)
        return out

    def values_of(self, state: int) -> dict:
        return dict(zip(self.names, self.states[state]))

    def assignment_for(self, enc, state: int) -> dict[int, int]:
        """Even-level assignment for cross-checking BDD predicates."""
        out: dict[int, int] = {}
        for name, value in zip(self.names, self.states[state]):
            sym = enc.by_name[name]
            code = value - sym.lo
            for bit, lvl in enumerate(sym.levels):
                out[lvl] = code >> bit & 1
        return out
