"""Controlled-system model emission.

The output of a successful synthesis is the input specification with the
supervisor made explicit:

* native plant automata are kept as they are;
* plantified requirement automata are relabeled ``supervisor`` — they no
  longer restrict anything themselves, but the supervisor's guards refer
  to their locations, so they stay in the model as observers;
* one new supervisor automaton with a single initial+marked location
  self-loops on every controllable event, guarded by that event's
  synthesized guard lowered back to an expression;
* an initialization predicate pins the initial states to the synthesized
  behavior.

With simplification enabled, guards and the initialization predicate are
reduced relative to what already holds anyway — the plant's own guard,
the state invariants, the requirement conditions, and the synthesized
behavior — and the requirement-derived invariants are kept (relabeled
``supervisor``) because the reduced guards are only faithful inside that
context.  With simplification disabled the raw strengthened guards are
self-contained, so the requirement-derived invariants are dropped.
"""

from __future__ import annotations

import dataclasses

from .bdd import NodeRef
from .model import (
    Automaton, BinaryOp, BoolDomain, BoolLit, Edge, EnumDomain, EnumLit,
    Expr, IntLit, Location, LocRef, Specification, UnaryOp, VarRef,
)
from .synthesis import SynthesisResult
from .transform import conj, disj

__all__ = ["emit", "lower_bdd_to_expr"]

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def _int(value: int) -> Expr:
    if value < 0:
        return UnaryOp("-", IntLit(-value))
    return IntLit(value)


def lower_bdd_to_expr(f: NodeRef, enc, model) -> Expr:
    """Lower a state predicate to an expression over the model's variables.

    Recurses one variable at a time in level order, grouping the values
    that share a residual predicate; a group's membership test collapses
    to interval or equality comparisons where the values are contiguous,
    and location-pointer values print as location references.  Agreement
    with the BDD on every in-domain state is the only contract — values
    outside the declared domains (the encoded range may be wider) are
    never enumerated, so the expression may disagree there.
    """
    mgr = enc.manager
    owner = {lvl: sym for sym in enc.symvars for lvl in sym.levels}
    location_names = {
        aut: {code: name for name, code in table.items()}
        for aut, table in model.location_codes.items()
    }

    def atom(sym, codes: list[int]) -> Expr:
        var = sym.var
        if len(codes) == sym.codes:
            return TRUE
        if var.kind == "pointer":
            names = location_names[var.owner]
            return disj([LocRef(var.owner, names[c]) for c in codes])
        ref = VarRef(var.name)
        if isinstance(var.domain, BoolDomain):
            return ref if codes == [1] else UnaryOp("not", ref)
        if isinstance(var.domain, EnumDomain):
            literals = var.domain.literals
            return disj([
                BinaryOp("=", ref, EnumLit(literals[c])) for c in codes
            ])
        runs = []
        start = prev = codes[0]
        for code in codes[1:]:
            if code == prev + 1:
                prev = code
                continue
            runs.append((start, prev))
            start = prev = code
        runs.append((start, prev))
        terms = []
        for a, b in runs:
            va, vb = a + sym.lo, b + sym.lo
            if va == vb:
                terms.append(BinaryOp("=", ref, _int(va)))
            elif va == var.domain.lo:
                terms.append(BinaryOp("<=", ref, _int(vb)))
            elif vb == var.domain.hi:
                terms.append(BinaryOp(">=", ref, _int(va)))
            else:
                terms.append(BinaryOp(
                    "and",
                    BinaryOp("<=", _int(va), ref),
                    BinaryOp("<=", ref, _int(vb)),
                ))
        return disj(terms)

    memo: dict[NodeRef, Expr] = {}

    def walk(f: NodeRef) -> Expr:
        if f.is_true:
            return TRUE
        if f.is_false:
            return FALSE
        done = memo.get(f)
        if done is not None:
            return done
        top = min(mgr.support(f))
        sym = owner[top]
        groups: dict[NodeRef, list[int]] = {}
        for code in range(sym.codes):
            cube = mgr.true
            for bit, lvl in enumerate(sym.levels):
                cube = cube & (mgr.var(lvl) if code >> bit & 1 else mgr.nvar(lvl))
            child = mgr.exists(f & cube, sym.levels)
            if child.is_false:
                continue
            groups.setdefault(child, []).append(code)
        out = disj([
            conj([atom(sym, codes), walk(child)])
            for child, codes in groups.items()
        ])
        memo[f] = out
        return out

    return walk(f)


def _supervisor_name(spec: Specification) -> str:
    taken = {aut.name for aut in spec.automata}
    taken.update(var.name for var in spec.variables())
    taken.update(ev.name for ev in spec.events)
    name = "sup"
    while name in taken:
        name += "_"
    return name


def emit(
    spec: Specification, result: SynthesisResult, simplify: bool = True
) -> Specification:
    """Build the controlled-system model from a plantified specification
    and its synthesis result.  Refuses an empty supervisor."""
    if not result.nonempty:
        raise ValueError("empty supervisor: no controlled behavior to emit")
    sym = result.sym
    enc = sym.enc
    mgr = sym.manager
    model = result.model

    guards: dict[str, NodeRef] = {}
    for name, controllable in sym.events:
        if not controllable:
            continue
        guard = result.event_guards[name]
        if simplify:
            plant = mgr.false
            for edge in sym.base_edges:
                if edge.event == name:
                    plant = plant | edge.guard_plant
            assumption = (
                plant & sym.pp
                & sym.req_guards.get(name, mgr.true) & result.controlled
            )
            guard = mgr.restrict(guard, assumption)
        guards[name] = guard

    automata = []
    for aut in spec.automata:
        if aut.plantified:
            automata.append(dataclasses.replace(aut, kind="supervisor"))
        else:
            automata.append(aut)

    alphabet = [ev.name for ev in spec.events if ev.controllable]
    edges = []
    for name in alphabet:
        expr = lower_bdd_to_expr(guards[name], enc, model)
        edges.append(Edge("s0", [name], None if expr == TRUE else expr))
    automata.append(Automaton(
        _supervisor_name(spec), "supervisor",
        locations=[Location("s0", initial=True, marked=True)],
        edges=edges, alphabet=alphabet,
    ))

    init = result.initial
    if simplify:
        init = mgr.restrict(init, sym.initial)
    init_expr = lower_bdd_to_expr(init, enc, model)
    init_preds = list(spec.init_preds)
    if init_expr != TRUE:
        init_preds.append(init_expr)

    invariants = []
    for inv in spec.invariants:
        if inv.side == "plant":
            invariants.append(inv)
        elif simplify:
            invariants.append(dataclasses.replace(inv, side="supervisor"))

    return Specification(
        events=list(spec.events),
        automata=automata,
        input_vars=list(spec.input_vars),
        init_preds=init_preds,
        marker_preds=list(spec.marker_preds),
        invariants=invariants,
    )
