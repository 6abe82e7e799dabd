"""Plantification and linearization."""

from efasynth.model import (
    BinaryOp, BoolLit, IntLit, LocRef, UnaryOp, VarRef, validate,
)
from efasynth.parser import parse_file, parse_spec, unparse
from efasynth.transform import linearize, linearized_spec, plantify

REQ = """
controllable grant;
uncontrollable request, release;

plant client {
  location quiet:
    initial;
    marked;
    edge request goto waiting;
  location waiting:
    edge grant goto holding;
  location holding:
    edge release goto quiet;
}

requirement limiter {
  disc int[0..3] used = 0;
  location track:
    initial;
    marked;
    edge grant when used < 3 do used := used + 1;
    edge release when used > 0 do used := used - 1;
}
"""


def test_plantify_adds_selfloops_and_disables():
    spec = parse_spec(REQ)
    out = plantify(spec)
    assert [a.kind for a in out.automata] == ["plant", "plant"]
    limiter = out.automaton("limiter")
    assert limiter.plantified and not out.automaton("client").plantified
    # one complement self-loop per guarded alphabet event
    added = limiter.edges[2:]
    assert [(e.events, e.target) for e in added] == [(["grant"], None), (["release"], None)]
    assert added[0].guard == UnaryOp(
        "not", BinaryOp("<", VarRef("used"), IntLit(3))
    )
    assert added[0].updates == []
    invs = [inv for inv in out.invariants if inv.kind == "disables"]
    assert [(inv.side, inv.event) for inv in invs] == [
        ("requirement", "grant"),
        ("requirement", "release"),
    ]
    assert invs[0].predicate == BinaryOp(
        "and",
        LocRef("limiter", "track"),
        UnaryOp("not", BinaryOp("<", VarRef("used"), IntLit(3))),
    )
    # plantified automata restrict nothing, so validation still holds
    assert validate(out) == []


def test_plantify_skips_unguarded_edges():
    spec = parse_spec(
        """
        controllable a;
        plant p { location l: initial; marked; edge a; }
        requirement r { location m: initial; marked; edge a; }
        """
    )
    out = plantify(spec)
    assert len(out.automaton("r").edges) == 1
    assert out.invariants == []


def test_plantify_blocks_events_missing_from_a_location():
    spec = parse_spec(
        """
        controllable a;
        plant p { location l: initial; marked; edge a; }
        requirement r {
          location m: initial; marked; edge a goto n;
          location n:
        }
        """
    )
    out = plantify(spec)
    ns = [e for e in out.automaton("r").edges if e.source == "n"]
    assert [(e.events, e.guard) for e in ns] == [(["a"], BoolLit(True))]
    (inv,) = out.invariants
    assert inv.kind == "disables" and inv.event == "a"
    assert inv.predicate == LocRef("r", "n")


def lin_producer_consumer(models_dir):
    spec = parse_file(models_dir / "producer_consumer.efa")
    model, diags = linearize(plantify(spec))
    assert diags == []
    return model


def test_linearize_producer_consumer_edges(models_dir):
    model = lin_producer_consumer(models_dir)
    lp, cp = "producer_lp", "consumer_lp"
    assert model.pointers == {"producer": lp, "consumer": cp}
    assert [v.name for v in model.variables] == [lp, "v", "x", cp, "y"]
    assert [e.event for e in model.edges] == [
        "start", "increase", "proceed", "produce",
        "decide", "decide", "decide", "decide",
        "reset", "again",
    ]

    def eq(name, value):
        return BinaryOp("=", VarRef(name), IntLit(value))

    start, increase, proceed, produce, d1, d2, d3, d4, reset, again = model.edges
    assert start.guard == eq(lp, 0)
    assert start.updates == [(lp, IntLit(1)), ("v", BoolLit(True))]
    assert increase.guard == BinaryOp(
        "and", eq(lp, 1), BinaryOp("<", VarRef("x"), IntLit(5))
    )
    assert increase.updates == [("x", BinaryOp("+", VarRef("x"), IntLit(1)))]
    assert proceed.updates == [(lp, IntLit(2))]
    assert produce.updates[0] == (cp, IntLit(1))
    # decide synchronizes both automata: producer outermost
    assert d1.guard == BinaryOp("and", BinaryOp("and", eq(lp, 2), eq("x", 4)), eq(cp, 1))
    assert [u[0] for u in d1.updates] == [lp, cp]
    assert [(u[0][1].value, u[1][1].value) for u in
            [(e.updates[0], e.updates[1]) for e in (d1, d2, d3, d4)]] == [
        (3, 2), (3, 3), (4, 2), (4, 3),
    ]
    assert reset.updates == [(lp, IntLit(0)), ("v", BoolLit(False)), ("x", IntLit(0))]
    assert again.updates == [(cp, IntLit(0))]


def test_linearize_initial_and_marked(models_dir):
    model = lin_producer_consumer(models_dir)

    def eq(name, value):
        return BinaryOp("=", VarRef(name), IntLit(value))

    terms = [
        eq("producer_lp", 0), eq("consumer_lp", 0),
        UnaryOp("not", VarRef("v")), eq("x", 0), eq("y", 0),
    ]
    want = terms[0]
    for term in terms[1:]:
        want = BinaryOp("and", want, term)
    assert model.initial == want
    assert model.marked == BinaryOp(
        "and", eq("producer_lp", 4), eq("consumer_lp", 3)
    )


def test_single_location_automata_get_no_pointer():
    spec = parse_spec(
        """
        controllable a;
        plant p {
          disc bool b = false;
          location only: initial; marked; edge a when p.only do b := true;
        }
        """
    )
    model, diags = linearize(plantify(spec))
    assert diags == []
    assert model.pointers == {}
    assert [v.name for v in model.variables] == ["b"]
    (edge,) = model.edges
    assert edge.guard == BoolLit(True)  # p.only rewrites to true
    assert model.initial == UnaryOp("not", VarRef("b"))


def test_unused_event_is_diagnosed():
    spec = parse_spec(
        """
        controllable a, phantom;
        plant p { location l: initial; marked; edge a; }
        """
    )
    _, diags = linearize(plantify(spec))
    assert any("phantom" in d.message for d in diags)


def test_pointer_name_clash_is_avoided():
    spec = parse_spec(
        """
        controllable a;
        plant p {
          disc bool p_lp = false;
          location l: initial; marked; edge a goto m;
          location m:
        }
        """
    )
    model, _ = linearize(plantify(spec))
    assert model.pointers["p"] == "p_lp_"


def test_linearized_dump_round_trips(models_dir):
    model = lin_producer_consumer(models_dir)
    dump = linearized_spec(model)
    text = unparse(dump)
    assert parse_spec(text) == dump
    assert validate(dump) == []


def test_explicit_alphabet_forces_synchronization():
    spec = parse_spec(
        """
        controllable a, b;
        plant p { location l: initial; marked; edge a; edge b; }
        plant q {
          alphabet a, b;
          location m: initial; marked; edge a;
        }
        """
    )
    model, diags = linearize(plantify(spec))
    assert diags == []
    # q has no b-edge but b is in its alphabet, so b synchronizes away
    assert [e.event for e in model.edges] == ["a"]
