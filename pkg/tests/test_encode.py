"""Bit-vector compilation and the staged symbolic build."""

import itertools

import pytest
from hypothesis import given, strategies as st

from efasynth.bdd import BddManager
from efasynth.encode import (
    Encoding, build_symbolic, bv_add, bv_const, bv_eq, bv_lt, bv_mod,
    bv_sub, compile_edges, _merge_events,
)
from efasynth.model import eval_expr
from efasynth.parser import parse_file, parse_spec
from efasynth.transform import linearize, plantify


def decode(bits):
    """Value of a constant two's-complement vector of terminal nodes."""
    value = sum(1 << i for i, b in enumerate(bits[:-1]) if b.is_true)
    return value - (1 << (len(bits) - 1) if bits[-1].is_true else 0)


@given(st.integers(-300, 300), st.integers(-300, 300))
def test_const_vector_arithmetic(a, b):
    mgr = BddManager()
    va, vb = bv_const(mgr, a), bv_const(mgr, b)
    assert decode(va) == a and decode(vb) == b
    assert decode(bv_add(mgr, va, vb)) == a + b
    assert decode(bv_sub(mgr, va, vb)) == a - b
    assert bv_eq(mgr, va, vb).is_true == (a == b)
    assert bv_lt(mgr, va, vb).is_true == (a < b)


@given(st.integers(-300, 300), st.integers(1, 17))
def test_const_vector_modulo(a, m):
    mgr = BddManager()
    assert decode(bv_mod(mgr, bv_const(mgr, a), m)) == a % m


def lin(text):
    model, diags = linearize(plantify(parse_spec(text)))
    assert diags == []
    return model


EVAL_MODEL = """
controllable a;
plant m {{
  disc int[0..12] x;
  disc int[3..9] y;
  disc bool b;
  disc enum{{red, green, blue}} c;
  location l: initial; marked; edge a;
}}
initial {0};
"""


def all_states():
    return itertools.product(range(13), range(3, 10), (False, True), range(3))


def bits_for(enc, name, value):
    sym = enc.by_name[name]
    code = value - sym.lo
    return {lvl: code >> bit & 1 for bit, lvl in enumerate(sym.levels)}


@pytest.mark.parametrize(
    "text",
    [
        "x - y < 2",
        "(x + y) mod 5 = 2",
        "(x - 12) mod 5 = (y - 3) mod 4",
        "not (b and x = 7) or y >= 8",
        "c != red and (c = green or b)",
        "-x + y > -3",
        "x mod 8 <= y mod 4 + 2",
        "(x + 100) mod 7 = 3",
        "y - x - x < -10",
        "b = (x = y)",
        "c = blue or c = red",
    ],
)
def test_compiled_predicates_match_evaluation(text):
    model = lin(EVAL_MODEL.format(text))
    expr = model.initial
    enc = Encoding(model, list(range(len(model.variables))))
    pred = enc.compile_pred(expr)
    for x, y, b, c in all_states():
        assignment = {}
        for name, value in (("x", x), ("y", y), ("b", int(b)), ("c", c)):
            assignment.update(bits_for(enc, name, value))
        want = eval_expr(expr, {"x": x, "y": y, "b": b, "c": c}, {}, model.codes)
        assert enc.manager.evaluate(pred, assignment) == want, (text, x, y, b, c)


def test_variable_layout_of_producer_consumer(models_dir):
    model, _ = linearize(plantify(parse_file(models_dir / "producer_consumer.efa")))
    enc = Encoding(model, list(range(5)))
    widths = {s.var.name: s.width for s in enc.symvars}
    assert widths == {
        "producer_lp": 3, "v": 1, "x": 3, "consumer_lp": 2, "y": 4,
    }
    assert enc.manager.num_vars == 2 * (3 + 1 + 3 + 2 + 4)
    # interleaved: each bit's next-state partner is directly below it
    assert enc.by_name["x"].levels == [8, 10, 12]


def test_in_domain_counts(models_dir):
    model = lin(EVAL_MODEL.format("true"))
    enc = Encoding(model, list(range(len(model.variables))))
    x = enc.by_name["x"]
    assert enc.manager.sat_count(enc.in_domain("x"), x.levels) == 13
    y = enc.by_name["y"]
    assert enc.manager.sat_count(enc.in_domain("y"), y.levels) == 7
    assert enc.in_domain("b").is_true  # boolean fills its encoded range


def test_offset_domains():
    model = lin(EVAL_MODEL.format("y = 9"))
    enc = Encoding(model, list(range(len(model.variables))))
    pred = enc.compile_pred(model.initial)
    assert enc.manager.evaluate(pred, bits_for(enc, "y", 9))
    assert not enc.manager.evaluate(pred, bits_for(enc, "y", 8))
    below = lin(EVAL_MODEL.format("y = 2"))
    enc2 = Encoding(below, list(range(len(below.variables))))
    assert enc2.compile_pred(below.initial).is_false


def test_compiled_edge_semantics(models_dir):
    model, _ = linearize(plantify(parse_file(models_dir / "producer_consumer.efa")))
    enc = Encoding(model, list(range(5)))
    increase = compile_edges(enc)[1]
    assert increase.event == "increase" and not increase.controllable
    assert increase.assigned == frozenset({"x"})
    for l1, x in itertools.product(range(8), range(8)):
        assignment = bits_for(enc, "producer_lp", l1) | bits_for(enc, "x", x)
        assert enc.manager.evaluate(increase.guard, assignment) == (
            l1 == 1 and x < 5
        )
        # the error predicate is overflow of the encoded range, not the domain
        assert enc.manager.evaluate(increase.error, bits_for(enc, "x", x)) == (
            x + 1 > 7
        )
    for x, nxt in itertools.product(range(8), range(8)):
        assignment = bits_for(enc, "x", x)
        assignment |= {
            lvl + 1: nxt >> bit & 1
            for bit, lvl in enumerate(enc.by_name["x"].levels)
        }
        assert enc.manager.evaluate(increase.update, assignment) == (
            nxt == x + 1
        ), (x, nxt)


def test_target_enforcement_modes_agree_modulo_invariant(models_dir):
    spec = parse_file(models_dir / "producer_consumer.efa")
    model, _ = linearize(plantify(spec))
    order = list(range(5))
    by_impl = build_symbolic(model, order, plant_inv="implication")
    by_restr = build_symbolic(model, order, plant_inv="restrict")
    levels = by_impl.enc.state_levels
    assert levels == by_restr.enc.state_levels
    # same admitted states wherever the plant invariant holds
    for a, b in zip(by_impl.edges, by_restr.edges):
        for point in itertools.product((0, 1), repeat=len(levels)):
            assignment = dict(zip(levels, point))
            if not by_impl.manager.evaluate(by_impl.pp, assignment):
                continue
            assert by_impl.manager.evaluate(a.guard, assignment) == (
                by_restr.manager.evaluate(b.guard, assignment)
            ), a.event


def test_successors_stay_inside_domains(models_dir):
    spec = parse_file(models_dir / "producer_consumer.efa")
    model, _ = linearize(plantify(spec))
    sym = build_symbolic(model, list(range(5)))
    mgr = sym.manager
    for edge in sym.edges:
        t = edge.guard & edge.update
        # sources that can leave pp: relprev against the complement
        bad = mgr.relprev(mgr.negate(sym.pp), t)
        assert (bad & sym.pp).is_false or edge.is_input, edge.event


def test_input_variable_edge():
    model = lin(
        """
        controllable a;
        input int[0..2] sensor;
        plant m {
          disc bool seen;
          location l: initial; marked;
          edge a when sensor = 2 do seen := true;
        }
        """
    )
    sym = build_symbolic(model, list(range(len(model.variables))))
    (edge,) = [e for e in sym.edges if e.is_input]
    assert edge.event == "input_sensor" and not edge.controllable
    assert edge.guard.is_true and edge.assigned == frozenset({"sensor"})
    enc = sym.enc
    for cur, nxt in itertools.product(range(4), range(4)):
        assignment = bits_for(enc, "sensor", cur)
        assignment |= {
            lvl + 1: nxt >> bit & 1
            for bit, lvl in enumerate(enc.by_name["sensor"].levels)
        }
        want = cur != nxt and nxt <= 2
        assert enc.manager.evaluate(edge.update, assignment) == want, (cur, nxt)


def test_event_names_for_inputs_avoid_clashes():
    model = lin(
        """
        controllable input_sensor;
        input bool sensor;
        plant m {
          location l: initial; marked; edge input_sensor when sensor;
        }
        """
    )
    sym = build_symbolic(model, list(range(len(model.variables))))
    names = [name for name, _ in sym.events]
    assert names == ["input_sensor", "input_sensor_"]


MERGE_VARS = """
controllable e;
plant m {
  disc int[0..7] x;
  disc int[0..7] y;
  disc int[0..7] z;
  location l: initial; marked; edge e;
}
"""


def merge_example_edges(enc):
    """Two same-event edges with disjoint update targets, guards x<=4/x>=4."""
    from efasynth.encode import SymEdge
    from efasynth.model import BinaryOp, IntLit, VarRef

    mgr = enc.manager
    g1 = enc.compile_pred(BinaryOp("<=", VarRef("x"), IntLit(4)))
    g2 = enc.compile_pred(BinaryOp(">=", VarRef("x"), IntLit(4)))
    u1, _ = enc.assignment("y", BinaryOp("+", VarRef("y"), IntLit(1)))
    u2, _ = enc.assignment("z", BinaryOp("+", VarRef("z"), IntLit(1)))
    return [
        SymEdge("e", True, g1, mgr.false, u1, frozenset({"y"}), guard_plant=g1),
        SymEdge("e", True, g2, mgr.false, u2, frozenset({"z"}), guard_plant=g2),
    ]


def test_event_merge_matches_documented_construction():
    model = lin(MERGE_VARS)
    enc = Encoding(model, [0, 1, 2])
    e1, e2 = merge_example_edges(enc)
    (merged,) = _merge_events(enc, [("e", True)], [e1, e2])
    assert merged.guard.is_true  # x <= 4 or x >= 4 covers the encoded range
    assert merged.assigned == frozenset({"y", "z"})
    want = (e1.guard & e1.update & enc.frame("z")) | (
        e2.guard & e2.update & enc.frame("y")
    )
    assert merged.update == want


def test_merged_relation_preserves_images():
    model = lin(MERGE_VARS)
    enc = Encoding(model, [0, 1, 2])
    mgr = enc.manager
    e1, e2 = merge_example_edges(enc)
    g1, u1 = e1.guard, e1.update
    g2, u2 = e2.guard, e2.update
    (merged,) = _merge_events(enc, [("e", True)], [e1, e2])
    # a concrete state: x=4, y=1, z=5 (both branches enabled)
    point = mgr.true
    for name, value in (("x", 4), ("y", 1), ("z", 5)):
        for bit, lvl in enumerate(enc.by_name[name].levels):
            lit = mgr.var(lvl) if value >> bit & 1 else mgr.nvar(lvl)
            point = point & lit
    separate = mgr.relnext(point, g1 & u1) | mgr.relnext(point, g2 & u2)
    together = mgr.relnext(point, merged.guard & merged.update)
    assert separate == together
    # and the image is exactly {(4,2,5), (4,1,6)}
    assert mgr.sat_count(separate, enc.state_levels) == 2
