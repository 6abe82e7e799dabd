"""Symbolic encoding of a linearized model.

Each variable becomes a block of interleaved BDD level pairs (current bit
at the even level, next-state partner right below it), least significant
bit first, blocks following the chosen variable order.  Integer expressions
compile to little-endian two's-complement bit vectors wide enough to be
exact, so arithmetic never wraps; an assignment's value leaving the encoded
bit range is the edge's error predicate, while leaving the declared domain
is handled by guard strengthening against the domain predicate.

``build_symbolic`` runs the whole pipeline on a linearized model:

1. allocate levels and the domain predicate ``pp``
2. compile every edge to (guard, error, partial update)
3. conjoin plant state invariants onto ``pp``; violated requirement state
   invariants start the forbidden predicate
4. add one free-running edge per input variable, successors bounded by ``pp``
5. collect the remaining forbidden states: guard-and-error states of
   uncontrollable edges; fold ``not error`` into every guard
6. strengthen guards so all successors satisfy ``pp`` (by implication
   check or by restrict-based simplification)
7. fold event-condition invariants into guards; requirement conditions on
   uncontrollable events contribute forbidden states instead of relying on
   the guard alone
8. compile initial (conjoined with ``pp``) and marked predicates
9. optionally merge the edges of each event into one relation
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bdd import BddManager, NodeRef
from .model import (
    BinaryOp, BoolDomain, BoolLit, EnumDomain, Expr, IntDomain, IntLit,
    EnumLit, LocRef, UnaryOp, VarRef, Variable, domain_size,
)
from .transform import LinearModel

__all__ = [
    "Encoding", "SymEdge", "SymbolicModel", "build_symbolic",
    "compile_edges",
]


# ----------------------------------------------------------------------
# two's-complement bit vectors (little endian lists of BDD functions)


def bv_const(mgr: BddManager, value: int) -> list[NodeRef]:
    width = value.bit_length() + 1  # sign bit, also for value 0
    mask = value & ((1 << width) - 1)
    return [mgr.true if mask >> i & 1 else mgr.false for i in range(width)]


def bv_extend(bits: list[NodeRef], width: int) -> list[NodeRef]:
    return bits + [bits[-1]] * (width - len(bits))


def bv_add(
    mgr: BddManager, a: list[NodeRef], b: list[NodeRef], *,
    negate_b: bool = False,
) -> list[NodeRef]:
    width = max(len(a), len(b)) + 1
    a, b = bv_extend(a, width), bv_extend(b, width)
    carry = mgr.true if negate_b else mgr.false
    out = []
    for x, rawy in zip(a, b):
        y = mgr.negate(rawy) if negate_b else rawy
        out.append(x ^ y ^ carry)
        carry = (x & y) | (carry & (x | y))
    return out


def bv_sub(mgr, a, b):
    return bv_add(mgr, a, b, negate_b=True)


def bv_eq(mgr, a, b) -> NodeRef:
    width = max(len(a), len(b))
    result = mgr.true
    for x, y in zip(bv_extend(a, width), bv_extend(b, width)):
        result = result & mgr.apply("biimp", x, y)
    return result


def bv_lt(mgr, a, b) -> NodeRef:
    return bv_sub(mgr, a, b)[-1]  # sign of the exact difference


def bv_ite(mgr, cond: NodeRef, a, b) -> list[NodeRef]:
    width = max(len(a), len(b))
    return [
        mgr.ite(cond, x, y)
        for x, y in zip(bv_extend(a, width), bv_extend(b, width))
    ]


def bv_mod(mgr, a: list[NodeRef], modulus: int) -> list[NodeRef]:
    """Remainder by a positive constant, nonnegative result.

    Folds the magnitude bits most significant first keeping a running
    remainder, then corrects for the sign bit's negative weight.
    """
    remainder = bv_const(mgr, 0)
    for bit in reversed(a[:-1]):
        doubled = bv_add(mgr, remainder, remainder)
        doubled[0] = doubled[0] | bit  # lowest bit of 2r is zero
        over = mgr.negate(bv_lt(mgr, doubled, bv_const(mgr, modulus)))
        remainder = bv_ite(
            mgr, over, bv_sub(mgr, doubled, bv_const(mgr, modulus)), doubled
        )
    sign_weight = (1 << (len(a) - 1)) % modulus
    negative = bv_sub(mgr, remainder, bv_const(mgr, sign_weight))
    wrapped = bv_ite(
        mgr, negative[-1], bv_add(mgr, negative, bv_const(mgr, modulus)),
        negative,
    )
    return bv_ite(mgr, a[-1], wrapped, remainder)


# ----------------------------------------------------------------------
# encoding


@dataclass
class SymVar:
    var: Variable
    width: int
    lo: int  # value of code 0 (integer domains only)
    levels: list[int]  # even levels, least significant bit first

    @property
    def codes(self) -> int:
        return domain_size(self.var.domain)


class Encoding:
    """Variables laid out on a manager plus expression compilation."""

    def __init__(self, model: LinearModel, order: list[int]):
        self.model = model
        self.manager = BddManager()
        self.order = list(order)
        self.symvars: list[SymVar] = []
        self.by_name: dict[str, SymVar] = {}
        for index in order:
            var = model.variables[index]
            size = domain_size(var.domain)
            width = max(1, (size - 1).bit_length())
            lo = var.domain.lo if isinstance(var.domain, IntDomain) else 0
            levels = [
                self.manager.add_pair(f"{var.name}.{bit}")[0]
                for bit in range(width)
            ]
            sym = SymVar(var, width, lo, levels)
            self.symvars.append(sym)
            self.by_name[var.name] = sym
        self.state_levels = [
            lvl for sym in self.symvars for lvl in sym.levels
        ]
        self.next_levels = [lvl + 1 for lvl in self.state_levels]

    # -- variable access

    def bits(self, name: str, primed: bool = False) -> list[NodeRef]:
        sym = self.by_name[name]
        shift = 1 if primed else 0
        return [self.manager.var(lvl + shift) for lvl in sym.levels]

    def value_bits(self, name: str, primed: bool = False) -> list[NodeRef]:
        """The variable as a signed vector in value space (code plus offset)."""
        sym = self.by_name[name]
        bits = self.bits(name, primed) + [self.manager.false]
        if sym.lo:
            bits = bv_add(self.manager, bits, bv_const(self.manager, sym.lo))
        return bits

    def in_domain(self, name: str, primed: bool = False) -> NodeRef:
        """Code within the declared domain (the encoded range may be wider)."""
        sym = self.by_name[name]
        if sym.codes == 1 << sym.width:
            return self.manager.true
        bits = self.bits(name, primed) + [self.manager.false]
        return bv_lt(self.manager, bits, bv_const(self.manager, sym.codes))

    def domain_predicate(self) -> NodeRef:
        result = self.manager.true
        for sym in self.symvars:
            result = result & self.in_domain(sym.var.name)
        return result

    def frame(self, name: str) -> NodeRef:
        """Next value equals current value."""
        mgr = self.manager
        result = mgr.true
        for lvl in self.by_name[name].levels:
            result = result & mgr.apply("biimp", mgr.var(lvl), mgr.var(lvl + 1))
        return result

    def target_domain(self, name: str) -> NodeRef:
        return self.in_domain(name, primed=True)

    # -- expression compilation

    def _is_bool(self, expr: Expr) -> bool:
        if isinstance(expr, BoolLit):
            return True
        if isinstance(expr, VarRef):
            return isinstance(self.by_name[expr.name].var.domain, BoolDomain)
        if isinstance(expr, UnaryOp):
            return expr.op == "not"
        if isinstance(expr, BinaryOp):
            return expr.op not in ("+", "-", "mod")
        return False

    def compile_int(self, expr: Expr) -> list[NodeRef]:
        mgr = self.manager
        if isinstance(expr, IntLit):
            return bv_const(mgr, expr.value)
        if isinstance(expr, EnumLit):
            return bv_const(mgr, self.model.codes[expr.name])
        if isinstance(expr, VarRef):
            return self.value_bits(expr.name)
        if isinstance(expr, UnaryOp):  # unary minus
            return bv_sub(mgr, bv_const(mgr, 0), self.compile_int(expr.operand))
        assert isinstance(expr, BinaryOp), expr
        if expr.op == "mod":
            assert isinstance(expr.right, IntLit)
            return bv_mod(mgr, self.compile_int(expr.left), expr.right.value)
        a, b = self.compile_int(expr.left), self.compile_int(expr.right)
        if expr.op == "+":
            return bv_add(mgr, a, b)
        assert expr.op == "-", expr.op
        return bv_sub(mgr, a, b)

    def compile_pred(self, expr: Expr) -> NodeRef:
        mgr = self.manager
        if isinstance(expr, BoolLit):
            return mgr.true if expr.value else mgr.false
        if isinstance(expr, VarRef):
            return self.bits(expr.name)[0]
        if isinstance(expr, LocRef):
            raise ValueError("location references must be linearized away")
        if isinstance(expr, UnaryOp):
            return mgr.negate(self.compile_pred(expr.operand))
        assert isinstance(expr, BinaryOp), expr
        op = expr.op
        if op == "and":
            return self.compile_pred(expr.left) & self.compile_pred(expr.right)
        if op == "or":
            return self.compile_pred(expr.left) | self.compile_pred(expr.right)
        if op in ("=", "!=") and self._is_bool(expr.left):
            same = mgr.apply(
                "biimp", self.compile_pred(expr.left), self.compile_pred(expr.right)
            )
            return same if op == "=" else mgr.negate(same)
        a, b = self.compile_int(expr.left), self.compile_int(expr.right)
        if op == "=":
            return bv_eq(mgr, a, b)
        if op == "!=":
            return mgr.negate(bv_eq(mgr, a, b))
        if op == "<":
            return bv_lt(mgr, a, b)
        if op == ">":
            return bv_lt(mgr, b, a)
        if op == "<=":
            return mgr.negate(bv_lt(mgr, b, a))
        assert op == ">=", op
        return mgr.negate(bv_lt(mgr, a, b))

    def assignment(self, name: str, rhs: Expr) -> tuple[NodeRef, NodeRef]:
        """Update relation and range-error predicate for ``name := rhs``."""
        mgr = self.manager
        sym = self.by_name[name]
        if isinstance(sym.var.domain, BoolDomain):
            update = mgr.apply(
                "biimp", self.bits(name, primed=True)[0], self.compile_pred(rhs)
            )
            return update, mgr.false
        code = self.compile_int(rhs)
        if sym.lo:
            code = bv_sub(mgr, code, bv_const(mgr, sym.lo))
        top = bv_const(mgr, (1 << sym.width) - 1)
        error = code[-1] | bv_lt(mgr, top, code)
        update = bv_eq(mgr, self.bits(name, primed=True) + [mgr.false], code)
        return update, error


# ----------------------------------------------------------------------
# symbolic edges and the staged build


@dataclass
class SymEdge:
    event: str
    controllable: bool
    guard: NodeRef
    error: NodeRef  # encoded-range overflow of the raw updates
    update: NodeRef  # partial relation over the assigned variables' pairs
    assigned: frozenset[str]
    guard_plant: NodeRef = None  # guard without requirement conditions
    is_input: bool = False


@dataclass
class SymbolicModel:
    enc: Encoding
    events: list[tuple[str, bool]]  # (name, controllable), inputs last
    edges: list[SymEdge]  # reachability granularity: merged when per-event
    initial: NodeRef
    marked: NodeRef
    forbidden: NodeRef
    pp: NodeRef  # domain and plant state invariants
    req_guards: dict[str, NodeRef] = field(default_factory=dict)
    # Always one relation per model edge.  Guard strengthening and state
    # counting need the deterministic per-edge relations: existentially
    # strengthening a merged event relation would enable an event whose
    # other branch still escapes the safe set.
    base_edges: list[SymEdge] = field(default_factory=list)

    @property
    def manager(self) -> BddManager:
        return self.enc.manager

    def edges_of(self, event: str) -> list[SymEdge]:
        return [e for e in self.edges if e.event == event]


def compile_edges(enc: Encoding) -> list[SymEdge]:
    """Stage-2 output: one symbolic (guard, error, update) per model edge."""
    mgr = enc.manager
    controllable = {ev.name: ev.controllable for ev in enc.model.events}
    edges = []
    for edge in enc.model.edges:
        guard = enc.compile_pred(edge.guard)
        update, error = mgr.true, mgr.false
        for name, rhs in edge.updates:
            one_update, one_error = enc.assignment(name, rhs)
            update = update & one_update
            error = error | one_error
        edges.append(
            SymEdge(
                edge.event, controllable[edge.event], guard, error, update,
                frozenset(name for name, _ in edge.updates),
            )
        )
    return edges


def _input_edges(enc: Encoding, taken: set[str], pp: NodeRef) -> list[SymEdge]:
    mgr = enc.manager
    edges = []
    for var in enc.model.variables:
        if var.kind != "input":
            continue
        name = f"input_{var.name}"
        while name in taken:
            name += "_"
        taken.add(name)
        sym = enc.by_name[var.name]
        change = mgr.negate(enc.frame(var.name))
        # The environment may move the variable to any other value that
        # keeps the plant invariant.  The update itself carries that bound:
        # the transition is nondeterministic, so there is no single image
        # that guard strengthening could act on.
        holds_after = mgr.replace(pp, {lvl: lvl + 1 for lvl in sym.levels})
        update = change & holds_after
        edges.append(
            SymEdge(name, False, mgr.true, mgr.false, update,
                    frozenset([var.name]), is_input=True)
        )
    return edges


def _enforce_targets(sym_edges, enc, pp, mode: str):
    """Stage 6: keep only transitions whose successors satisfy ``pp``."""
    mgr = enc.manager
    for edge in sym_edges:
        t = edge.guard & edge.update
        ok = mgr.relprev(pp, t)
        if mode == "implication":
            if not (edge.guard & mgr.negate(ok)).is_false:
                edge.guard = edge.guard & ok
        else:  # 'restrict': same states modulo pp, smaller predicates
            edge.guard = mgr.restrict(edge.guard & ok, pp)


def build_symbolic(
    model: LinearModel,
    order: list[int],
    plant_inv: str = "implication",
    granularity: str = "edge",
) -> SymbolicModel:
    """Run the staged symbolic build; see the module docstring."""
    assert plant_inv in ("implication", "restrict"), plant_inv
    assert granularity in ("edge", "event"), granularity
    enc = Encoding(model, order)
    mgr = enc.manager

    edges = compile_edges(enc)

    pp = enc.domain_predicate()
    forbidden = mgr.false
    for inv in model.invariants:
        if inv.kind != "state":
            continue
        pred = enc.compile_pred(inv.predicate)
        if inv.side == "plant":
            pp = pp & pred
        else:
            forbidden = forbidden | mgr.negate(pred)

    taken = {ev.name for ev in model.events}
    edges += _input_edges(enc, taken, pp)
    events = [(ev.name, ev.controllable) for ev in model.events]
    events += [(e.event, False) for e in edges if e.is_input]

    # Range errors: uncontrollable ones poison their source states, and no
    # erroring transition survives in any edge.
    for edge in edges:
        if not edge.controllable and not edge.error.is_false:
            forbidden = forbidden | (edge.guard & edge.error)
        if not edge.error.is_false:
            edge.guard = edge.guard & mgr.negate(edge.error)

    _enforce_targets(edges, enc, pp, plant_inv)

    # Event-condition invariants.  Plant-side conditions are part of the
    # plant's own behavior; requirement-side conditions restrict it, which
    # for an uncontrollable event nobody can do, so the states where the
    # plant would take such a transition anyway become forbidden.
    conditions: dict[tuple[str, str], NodeRef] = {}
    for inv in model.invariants:
        if inv.kind == "state":
            continue
        pred = enc.compile_pred(inv.predicate)
        if inv.kind == "disables":
            pred = mgr.negate(pred)
        key = (inv.side, inv.event)
        conditions[key] = conditions[key] & pred if key in conditions else pred
    controllable = dict(events)
    for (side, event), pred in conditions.items():
        if side == "plant":
            for edge in edges:
                if edge.event == event:
                    edge.guard = edge.guard & pred
    for edge in edges:
        edge.guard_plant = edge.guard
    req_guards: dict[str, NodeRef] = {}
    for (side, event), pred in conditions.items():
        if side == "plant":
            continue
        req_guards[event] = req_guards.get(event, mgr.true) & pred
        for edge in edges:
            if edge.event != event:
                continue
            if not controllable[event]:
                forbidden = forbidden | (edge.guard & mgr.negate(pred))
            edge.guard = edge.guard & pred

    initial = enc.compile_pred(model.initial) & pp
    marked = enc.compile_pred(model.marked)

    base_edges = edges
    if granularity == "event":
        edges = _merge_events(enc, events, edges)

    sym = SymbolicModel(
        enc, events, edges, initial, marked, forbidden, pp, req_guards,
        base_edges=base_edges,
    )
    rooted = edges if edges is base_edges else edges + base_edges
    for edge in rooted:
        mgr.register_root(edge.guard)
        mgr.register_root(edge.update)
        mgr.register_root(edge.guard_plant)
    for root in (initial, marked, forbidden, pp, *req_guards.values()):
        mgr.register_root(root)
    return sym


def _merge_events(enc, events, edges) -> list[SymEdge]:
    """Stage 9: one relation per event, framing each branch's unassigned
    variables so partial-relation semantics still hold."""
    mgr = enc.manager
    by_event: dict[str, list[SymEdge]] = {}
    for edge in edges:
        by_event.setdefault(edge.event, []).append(edge)
    merged = []
    for name, controllable in events:
        group = by_event.get(name, [])
        if not group:
            continue
        if len(group) == 1:
            merged.append(group[0])
            continue
        assigned = frozenset().union(*(e.assigned for e in group))
        guard = mgr.false
        update = mgr.false
        guard_plant = mgr.false
        for edge in group:
            branch = edge.guard & edge.update
            for var in sorted(assigned - edge.assigned):
                branch = branch & enc.frame(var)
            update = update | branch
            guard = guard | edge.guard
            guard_plant = guard_plant | edge.guard_plant
        merged.append(
            SymEdge(
                name, controllable, guard, mgr.false, update, assigned,
                guard_plant=guard_plant,
                is_input=group[0].is_input,
            )
        )
    return merged
