"""Fixed-point supervisor synthesis over the symbolic model.

The controlled-behavior predicate starts from the complement of the
forbidden states and shrinks under two (optionally three) stages until
stable:

* nonblocking — backward reachability of the marked states within the
  current behavior,
* controllability — complement of the backward closure of the bad states
  under uncontrollable events,
* optionally forward — reachable part of the behavior from the initial
  states.

Both the stage loop and the per-call reachability loops come in a naive
flavor (complete sweeps until one changes nothing) and an early-stopping
flavor (a cursor with a run of failed applications; since every stage is
idempotent the stage loop may skip the stage that changed last).  Edge
application itself is either *naive* — a total relation per edge, framing
every unassigned variable, with explicit rename/conjoin/quantify steps —
or *compound*, the fused image/preimage over partial relations.  All four
combinations compute the same sets; they differ in the operation and
node counts reported by the manager, which is the point of keeping them.

Once the behavior is stable, guards of controllable edges are
strengthened with the preimage of the result so the emitted model blocks
exactly the transitions that would leave it.  State counting runs after
the headline metrics are frozen: the uncontrolled count walks the plant
guards (requirement conditions stripped), the controlled count walks the
strengthened guards inside the final behavior.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .bdd import BddManager, NodeRef
from .encode import SymEdge, SymbolicModel, build_symbolic
from .transform import LinearModel
from . import varorder

__all__ = [
    "SynthesisConfig", "SynthesisResult", "FixedPointEngine", "synthesize",
]


@dataclass
class SynthesisConfig:
    """Knobs for one synthesis run; presets match the two benchmark bundles."""

    order: str = "pipeline-v40"
    granularity: str = "event"  # 'edge' | 'event'
    edge_apply: str = "compound"  # 'naive' | 'compound'
    early_stop: bool = True
    forward: bool = False
    plant_inv: str = "implication"  # 'implication' | 'restrict'

    @staticmethod
    def preset(name: str) -> "SynthesisConfig":
        if name == "v08":
            return SynthesisConfig(
                order="pipeline-v08", granularity="edge", edge_apply="naive",
                early_stop=False, plant_inv="restrict",
            )
        if name == "v40":
            return SynthesisConfig()
        raise ValueError(f"unknown configuration preset '{name}'")


@dataclass
class SynthesisResult:
    model: LinearModel
    config: SynthesisConfig
    order: list[int]
    sym: SymbolicModel
    controlled: NodeRef  # the final behavior predicate
    initial: NodeRef  # initial states surviving synthesis
    nonempty: bool
    edges: list[SymEdge]  # per-edge copies with strengthened guards
    # per controllable event, the disjunction of its strengthened guards
    event_guards: dict[str, NodeRef] = field(default_factory=dict)
    marked: NodeRef | None = None  # marked states inside the behavior
    metrics: dict = field(default_factory=dict)

    @property
    def manager(self) -> BddManager:
        return self.sym.manager


class FixedPointEngine:
    """Reachability with selectable application and stopping strategy."""

    def __init__(self, sym: SymbolicModel, config: SynthesisConfig):
        self.sym = sym
        self.config = config
        self.mgr = sym.manager
        self.enc = sym.enc
        self.edge_applications = 0
        self.reach_calls = 0
        self._partial: dict[int, NodeRef] = {}
        self._total: dict[int, NodeRef] = {}
        self._levels: dict[int, tuple[int, ...]] = {}
        self._rooted: list[NodeRef] = []
        enc = self.enc
        self._up = {lvl: lvl + 1 for lvl in enc.state_levels}
        self._down = {lvl + 1: lvl for lvl in enc.state_levels}

    def close(self) -> None:
        for ref in self._rooted:
            self.mgr.release_root(ref)
        self._rooted.clear()
        self._partial.clear()
        self._total.clear()
        self._levels.clear()

    def _root(self, ref: NodeRef) -> NodeRef:
        self.mgr.register_root(ref)
        self._rooted.append(ref)
        return ref

    def relation(self, edge: SymEdge) -> NodeRef:
        """Partial transition relation: guard and update."""
        t = self._partial.get(id(edge))
        if t is None:
            t = self._root(edge.guard & edge.update)
            self._partial[id(edge)] = t
        return t

    def total_relation(self, edge: SymEdge) -> NodeRef:
        """The naive relation: every unassigned variable framed explicitly."""
        t = self._total.get(id(edge))
        if t is None:
            t = self.relation(edge)
            for sym in self.enc.symvars:
                if sym.var.name not in edge.assigned:
                    t = t & self.enc.frame(sym.var.name)
            t = self._root(t)
            self._total[id(edge)] = t
        return t

    # -- one application of one edge to the accumulated set

    def _apply_naive(self, gur, edge, acc, restriction, backward):
        mgr = self.mgr
        if backward:
            shifted = mgr.replace(acc, self._up)
            conj = gur & shifted & mgr.negate(edge.error)
            pre = mgr.exists(conj, self.enc.next_levels)
            return acc | (pre & restriction)
        conj = gur & acc & mgr.negate(edge.error)
        mid = mgr.exists(conj, self.enc.state_levels)
        img = mgr.replace(mid, self._down)
        return acc | (img & restriction)

    def assigned_levels(self, edge: SymEdge) -> tuple[int, ...]:
        """Odd levels the edge assigns.  Passed explicitly because a merged
        relation can lose an assigned bit from its support."""
        levels = self._levels.get(id(edge))
        if levels is None:
            levels = tuple(
                lvl + 1
                for name in sorted(edge.assigned)
                for lvl in self.enc.by_name[name].levels
            )
            self._levels[id(edge)] = levels
        return levels

    def _apply_compound(self, rel, edge, acc, restriction, backward):
        mgr = self.mgr
        assigned = self.assigned_levels(edge)
        if backward:
            step = mgr.relprev(acc, rel, constrain=restriction, assigned=assigned)
        else:
            step = mgr.relnext(acc, rel, constrain=restriction, assigned=assigned)
        return acc | step

    def reach(self, start, edges, restriction, backward: bool) -> NodeRef:
        """Least fixed point of ``start | step(...) & restriction``."""
        self.reach_calls += 1
        mgr = self.mgr
        acc = mgr.register_root(start & restriction)
        call_roots = []
        if self.config.edge_apply == "naive":
            rels = []
            for edge in edges:
                gur = self.total_relation(edge) & restriction
                mgr.register_root(gur)
                call_roots.append(gur)
                rels.append(gur)

            def apply(i, acc):
                return self._apply_naive(
                    rels[i], edges[i], acc, restriction, backward
                )
        else:
            rels = [self.relation(edge) for edge in edges]

            def apply(i, acc):
                return self._apply_compound(
                    rels[i], edges[i], acc, restriction, backward
                )

        try:
            n = len(edges)
            if n == 0:
                return acc
            if self.config.early_stop:
                fails = 0
                i = 0
                while fails < n:
                    nxt = apply(i % n, acc)
                    self.edge_applications += 1
                    i += 1
                    if nxt == acc:
                        fails += 1
                    else:
                        fails = 0
                        mgr.register_root(nxt)
                        mgr.release_root(acc)
                        acc = nxt
            else:
                changed = True
                while changed:
                    changed = False
                    for i in range(n):
                        nxt = apply(i, acc)
                        self.edge_applications += 1
                        if nxt != acc:
                            changed = True
                            mgr.register_root(nxt)
                            mgr.release_root(acc)
                            acc = nxt
            return acc
        finally:
            for ref in call_roots:
                mgr.release_root(ref)
            mgr.release_root(acc)


def _strengthen(engine: FixedPointEngine, behavior: NodeRef) -> list[SymEdge]:
    """Per-edge supervised guards: block steps that leave the behavior."""
    mgr = engine.mgr
    out = []
    for edge in engine.sym.base_edges:
        if edge.controllable and not edge.is_input:
            guard = edge.guard & mgr.relprev(behavior, engine.relation(edge))
            mgr.register_root(guard)
            out.append(dataclasses.replace(edge, guard=guard))
        else:
            out.append(edge)
    return out


def _synthesize_behavior(engine: FixedPointEngine):
    """The main loop; returns the behavior predicate, sweep count, and a
    per-stage operation breakdown."""
    sym = engine.sym
    mgr = engine.mgr
    config = engine.config
    unc = [e for e in sym.edges if not e.controllable]

    def nonblocking(c):
        return engine.reach(sym.marked, sym.edges, c, backward=True)

    def controllability(c):
        bad = engine.reach(mgr.negate(c), unc, mgr.true, backward=True)
        return mgr.negate(bad)

    def forward(c):
        return engine.reach(sym.initial, sym.edges, c, backward=False)

    stages = [nonblocking, controllability]
    names = ["nonblocking", "controllability"]
    if config.forward:
        stages.append(forward)
        names.append("forward")
    stage_ops = dict.fromkeys(names, 0)

    def run_stage(k, c):
        before = mgr.op_total
        nxt = stages[k](c)
        stage_ops[names[k]] += mgr.op_total - before
        return nxt

    behavior = mgr.register_root(mgr.negate(sym.forbidden))
    sweeps = 0

    def advance(old, new):
        mgr.register_root(new)
        mgr.release_root(old)
        return new

    def dead(c):
        return (sym.initial & c).is_false

    if config.early_stop:
        streak = 0
        i = 0
        nst = len(stages)
        while True:
            nxt = run_stage(i % nst, behavior)
            i += 1
            if nxt == behavior:
                streak += 1
                # every other stage came up empty and the one that changed
                # last is idempotent: running it again cannot change anything
                if streak >= nst - 1 and i >= nst:
                    break
            else:
                streak = 0
                behavior = advance(behavior, nxt)
                if dead(behavior):
                    break
        sweeps = -(-i // nst)
    else:
        while True:
            sweeps += 1
            changed = False
            bail = False
            for k in range(len(stages)):
                nxt = run_stage(k, behavior)
                if nxt != behavior:
                    changed = True
                    behavior = advance(behavior, nxt)
                    if dead(behavior):
                        bail = True
                        break
            if bail or not changed:
                break
    mgr.release_root(behavior)
    return behavior, sweeps, stage_ops


def _count_states(engine: FixedPointEngine, behavior, strengthened):
    """Uncontrolled and controlled reachable state counts."""
    sym = engine.sym
    mgr = engine.mgr
    levels = engine.enc.state_levels
    plant_edges = [
        dataclasses.replace(e, guard=e.guard_plant) for e in sym.base_edges
    ]
    us_set = engine.reach(sym.initial, plant_edges, mgr.true, backward=False)
    us = mgr.sat_count(us_set, levels)
    cs_set = engine.reach(
        sym.initial & behavior, strengthened, behavior, backward=False
    )
    cs = mgr.sat_count(cs_set, levels)
    return us, cs


def synthesize(
    model: LinearModel, config: SynthesisConfig | None = None
) -> SynthesisResult:
    """Order, encode, and synthesize; returns result plus metrics."""
    config = config or SynthesisConfig()
    order = varorder.compute_order(model, config.order)
    sym = build_symbolic(
        model, order,
        plant_inv=config.plant_inv, granularity=config.granularity,
    )
    mgr = sym.manager
    engine = FixedPointEngine(sym, config)

    encode_ops = mgr.op_total
    behavior, sweeps, stage_ops = _synthesize_behavior(engine)
    initial = sym.initial & behavior
    marked = sym.marked & behavior
    nonempty = not initial.is_false
    before_strengthen = mgr.op_total
    strengthened = _strengthen(engine, behavior)
    event_guards: dict[str, NodeRef] = {}
    for name, controllable in sym.events:
        if not controllable:
            continue
        guard = mgr.false
        for edge in strengthened:
            if edge.event == name:
                guard = guard | edge.guard
        event_guards[name] = guard
    roots = [behavior, initial, marked, *event_guards.values()]
    for ref in roots:
        mgr.register_root(ref)

    stage_ops = {
        "encode": encode_ops, **stage_ops,
        "strengthen": mgr.op_total - before_strengthen,
    }

    edges_hyper = varorder.hyperedges(model)
    metrics = {
        "variables": len(model.variables),
        "bdd_levels": 2 * len(sym.enc.state_levels),
        "order": [model.variables[i].name for i in order],
        "wes": round(varorder.wes(order, edges_hyper), 6),
        "operations": mgr.op_total,
        "stage_operations": stage_ops,
        "edge_applications": engine.edge_applications,
        "reach_calls": engine.reach_calls,
        "sweeps": sweeps,
        "peak_nodes": mgr.peak_nodes,
        "live_nodes": mgr.live_nodes,
        "allocated_nodes": mgr.allocated_nodes,
        "nonempty": nonempty,
    }

    us, cs = _count_states(engine, behavior, strengthened)
    metrics["uncontrolled_states"] = us
    metrics["controlled_states"] = cs if nonempty else 0
    engine.close()

    return SynthesisResult(
        model, config, order, sym, behavior, initial, nonempty,
        strengthened, event_guards, marked, metrics,
    )
