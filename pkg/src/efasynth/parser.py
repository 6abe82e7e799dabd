"""Parser and printer for the ``.efa`` modeling language.

The language is a small automata format: event declarations, plant and
requirement automata with discrete variables, guarded/updating edges,
input variables, state/event invariants, and component-level
initialization and marker predicates.  ``parse_spec`` builds a
:mod:`efasynth.model` tree; ``unparse`` renders one back to concrete
syntax such that parsing the result reproduces the same tree.

Operator precedence, loosest to tightest::

    or  <  and  <  comparisons  <  + -  <  mod  <  not, unary -

``#`` starts a comment running to end of line.
"""

from __future__ import annotations

from .model import (
    Automaton, BinaryOp, BoolDomain, BoolLit, Diagnostic, Edge, EnumDomain,
    EnumLit, Event, Expr, IntDomain, IntLit, Invariant, LocRef, Location,
    Span, Specification, UnaryOp, VarRef, Variable,
)

__all__ = ["ParseError", "parse_spec", "parse_file", "unparse"]

_KEYWORDS = {
    "controllable", "uncontrollable", "input", "bool", "int", "enum",
    "plant", "requirement", "supervisor", "disc", "alphabet", "location",
    "initial", "marked", "edge", "when", "do", "goto", "invariant",
    "needs", "disables", "and", "or", "not", "mod", "true", "false",
}

_SYMBOLS = (
    ":=", "..", "!=", "<=", ">=",  # two-character first
    "{", "}", "[", "]", "(", ")", ";", ",", ":", ".", "=", "<", ">",
    "+", "-",
)


class ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class _Token:
    __slots__ = ("kind", "text", "span")

    def __init__(self, kind: str, text: str, span: Span):
        self.kind = kind  # 'ident' | 'nat' | exact keyword/symbol | 'eof'
        self.text = text
        self.span = span


def _tokenize(text: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = Span(filename, line, col, 1)
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            span = Span(filename, line, col, j - i)
            kind = word if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, span))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("nat", text[i:j], Span(filename, line, col, j - i)))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token(sym, sym, Span(filename, line, col, len(sym))))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(Diagnostic(f"unexpected character {ch!r}", span))
    tokens.append(_Token("eof", "", Span(filename, line, col, 0)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def accept(self, kind: str):
        if self.at(kind):
            return self.advance()
        return None

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text or "end of file"
            raise ParseError(
                Diagnostic(f"expected '{kind}', found '{shown}'", tok.span)
            )
        return self.advance()

    def ident(self) -> _Token:
        return self.expect("ident")

    # -- toplevel

    def spec(self) -> Specification:
        spec = Specification()
        while not self.at("eof"):
            tok = self.peek()
            if tok.kind in ("controllable", "uncontrollable"):
                self.event_decl(spec)
            elif tok.kind == "input":
                self.input_var(spec)
            elif tok.kind in ("plant", "requirement", "supervisor"):
                if self.peek(1).kind == "invariant":
                    self.invariant(spec)
                else:
                    self.automaton(spec)
            elif tok.kind == "initial":
                self.advance()
                spec.init_preds.append(self.expr())
                self.expect(";")
            elif tok.kind == "marked":
                self.advance()
                spec.marker_preds.append(self.expr())
                self.expect(";")
            else:
                shown = tok.text or "end of file"
                raise ParseError(
                    Diagnostic(f"expected a declaration, found '{shown}'", tok.span)
                )
        return spec

    def event_decl(self, spec: Specification) -> None:
        controllable = self.advance().kind == "controllable"
        while True:
            name = self.ident()
            spec.events.append(Event(name.text, controllable, span=name.span))
            if not self.accept(","):
                break
        self.expect(";")

    def typename(self):
        tok = self.advance()
        if tok.kind == "bool":
            return BoolDomain()
        if tok.kind == "int":
            self.expect("[")
            lo = int(self.expect("nat").text)
            self.expect("..")
            hi = int(self.expect("nat").text)
            self.expect("]")
            return IntDomain(lo, hi)
        if tok.kind == "enum":
            self.expect("{")
            literals = [self.ident().text]
            while self.accept(","):
                literals.append(self.ident().text)
            self.expect("}")
            return EnumDomain(tuple(literals))
        raise ParseError(Diagnostic(f"expected a type, found '{tok.text}'", tok.span))

    def input_var(self, spec: Specification) -> None:
        self.advance()
        domain = self.typename()
        name = self.ident()
        self.expect(";")
        spec.input_vars.append(
            Variable(name.text, domain, kind="input", span=name.span)
        )

    def literal(self):
        tok = self.advance()
        if tok.kind == "true":
            return True
        if tok.kind == "false":
            return False
        if tok.kind == "nat":
            return int(tok.text)
        if tok.kind == "ident":
            return tok.text
        raise ParseError(Diagnostic(f"expected a literal, found '{tok.text}'", tok.span))

    def automaton(self, spec: Specification) -> None:
        kind = self.advance().kind
        name = self.ident()
        aut = Automaton(name.text, kind, span=name.span)
        self.expect("{")
        while not self.at("}"):
            tok = self.peek()
            if tok.kind == "disc":
                self.var_decl(aut)
            elif tok.kind == "alphabet":
                self.advance()
                names = [self.ident().text]
                while self.accept(","):
                    names.append(self.ident().text)
                self.expect(";")
                aut.alphabet = names if aut.alphabet is None else aut.alphabet + names
            elif tok.kind == "location":
                self.location(aut)
            else:
                shown = tok.text or "end of file"
                raise ParseError(
                    Diagnostic(
                        f"expected 'disc', 'alphabet', or 'location', found "
                        f"'{shown}'",
                        tok.span,
                    )
                )
        self.expect("}")
        spec.automata.append(aut)

    def var_decl(self, aut: Automaton) -> None:
        self.advance()
        domain = self.typename()
        name = self.ident()
        initial = None
        if self.accept("="):
            initial = [self.literal()]
            while self.accept(","):
                initial.append(self.literal())
            initial = tuple(initial)
        self.expect(";")
        aut.variables.append(
            Variable(name.text, domain, kind="disc", initial=initial,
                     owner=aut.name, span=name.span)
        )

    def location(self, aut: Automaton) -> None:
        self.advance()
        name = self.ident()
        self.expect(":")
        loc = Location(name.text, span=name.span)
        if self.at("initial"):
            self.advance()
            loc.initial = self.expr() if self.accept("when") else True
            self.expect(";")
        if self.at("marked"):
            self.advance()
            loc.marked = self.expr() if self.accept("when") else True
            self.expect(";")
        aut.locations.append(loc)
        while self.at("edge"):
            self.edge(aut, loc.name)

    def edge(self, aut: Automaton, source: str) -> None:
        start = self.advance()
        events = [self.ident().text]
        while self.accept(","):
            events.append(self.ident().text)
        guard = self.expr() if self.accept("when") else None
        updates = []
        if self.accept("do"):
            while True:
                var = self.ident()
                self.expect(":=")
                updates.append((var.text, self.expr()))
                if not self.accept(","):
                    break
        target = self.ident().text if self.accept("goto") else None
        self.expect(";")
        aut.edges.append(
            Edge(source, events, guard, updates, target, span=start.span)
        )

    def invariant(self, spec: Specification) -> None:
        side = self.advance().kind
        self.expect("invariant")
        start = self.peek()
        # 'event needs pred' begins with a bare identifier followed by the
        # keyword; everything else is an expression.
        if start.kind == "ident" and self.peek(1).kind == "needs":
            event = self.advance().text
            self.advance()
            pred = self.expr()
            inv = Invariant("needs", side, pred, event, span=start.span)
        else:
            pred = self.expr()
            if self.accept("disables"):
                event = self.ident().text
                inv = Invariant("disables", side, pred, event, span=start.span)
            else:
                inv = Invariant("state", side, pred, span=start.span)
        self.expect(";")
        spec.invariants.append(inv)

    # -- expressions, loosest binding first

    def expr(self) -> Expr:
        return self.disjunction()

    def disjunction(self) -> Expr:
        node = self.conjunction()
        while self.at("or"):
            tok = self.advance()
            node = BinaryOp("or", node, self.conjunction(), span=tok.span)
        return node

    def conjunction(self) -> Expr:
        node = self.comparison()
        while self.at("and"):
            tok = self.advance()
            node = BinaryOp("and", node, self.comparison(), span=tok.span)
        return node

    def comparison(self) -> Expr:
        node = self.additive()
        while self.at("=", "!=", "<", "<=", ">", ">="):
            tok = self.advance()
            node = BinaryOp(tok.kind, node, self.additive(), span=tok.span)
        return node

    def additive(self) -> Expr:
        node = self.modulo()
        while self.at("+", "-"):
            tok = self.advance()
            node = BinaryOp(tok.kind, node, self.modulo(), span=tok.span)
        return node

    def modulo(self) -> Expr:
        node = self.unary()
        while self.at("mod"):
            tok = self.advance()
            node = BinaryOp("mod", node, self.unary(), span=tok.span)
        return node

    def unary(self) -> Expr:
        if self.at("not"):
            tok = self.advance()
            return UnaryOp("not", self.unary(), span=tok.span)
        if self.at("-"):
            tok = self.advance()
            return UnaryOp("-", self.unary(), span=tok.span)
        return self.atom()

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "nat":
            return IntLit(int(tok.text), span=tok.span)
        if tok.kind == "true":
            return BoolLit(True, span=tok.span)
        if tok.kind == "false":
            return BoolLit(False, span=tok.span)
        if tok.kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            if self.accept("."):
                loc = self.ident()
                return LocRef(tok.text, loc.text, span=tok.span)
            return VarRef(tok.text, span=tok.span)
        raise ParseError(
            Diagnostic(f"expected an expression, found '{tok.text or 'end of file'}'", tok.span)
        )


# ----------------------------------------------------------------------
# name resolution: bare identifiers default to variables at parse time;
# turn the ones naming enumeration literals into literal nodes.


def _resolve(expr: Expr, var_names: set[str], lit_names: set[str]) -> Expr:
    if isinstance(expr, VarRef):
        if expr.name not in var_names and expr.name in lit_names:
            return EnumLit(expr.name, span=expr.span)
        return expr
    if isinstance(expr, UnaryOp):
        return UnaryOp(expr.op, _resolve(expr.operand, var_names, lit_names),
                       span=expr.span)
    if isinstance(expr, BinaryOp):
        return BinaryOp(
            expr.op,
            _resolve(expr.left, var_names, lit_names),
            _resolve(expr.right, var_names, lit_names),
            span=expr.span,
        )
    return expr


def _resolve_spec(spec: Specification) -> None:
    var_names = {v.name for v in spec.variables()}
    lit_names = {
        lit
        for v in spec.variables()
        if isinstance(v.domain, EnumDomain)
        for lit in v.domain.literals
    }

    def fix(expr):
        return None if expr is None else _resolve(expr, var_names, lit_names)

    for aut in spec.automata:
        for loc in aut.locations:
            if loc.initial not in (None, True):
                loc.initial = fix(loc.initial)
            if loc.marked not in (None, True):
                loc.marked = fix(loc.marked)
        for edge in aut.edges:
            edge.guard = fix(edge.guard)
            edge.updates = [(name, fix(rhs)) for name, rhs in edge.updates]
    for inv in spec.invariants:
        inv.predicate = fix(inv.predicate)
    spec.init_preds = [fix(p) for p in spec.init_preds]
    spec.marker_preds = [fix(p) for p in spec.marker_preds]


def parse_spec(text: str, filename: str = "<string>") -> Specification:
    """Parse model text; raises :class:`ParseError` on the first syntax error."""
    spec = _Parser(_tokenize(text, filename)).spec()
    _resolve_spec(spec)
    return spec


def parse_file(path) -> Specification:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_spec(handle.read(), str(path))


# ----------------------------------------------------------------------
# printing

_PREC = {
    "or": 1, "and": 2,
    "=": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4, "mod": 5,
}


def format_expr(expr: Expr, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, (VarRef, EnumLit)):
        return expr.name
    if isinstance(expr, LocRef):
        return f"{expr.automaton}.{expr.location}"
    if isinstance(expr, UnaryOp):
        inner = format_expr(expr.operand, 6)
        return f"not {inner}" if expr.op == "not" else f"-{inner}"
    prec = _PREC[expr.op]
    text = (
        f"{format_expr(expr.left, prec)} {expr.op} "
        f"{format_expr(expr.right, prec, right=True)}"
    )
    if prec < parent_prec or (prec == parent_prec and right):
        return f"({text})"
    return text


def _format_domain(domain) -> str:
    if isinstance(domain, BoolDomain):
        return "bool"
    if isinstance(domain, IntDomain):
        return f"int[{domain.lo}..{domain.hi}]"
    return "enum{" + ", ".join(domain.literals) + "}"


def _format_literal(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def unparse(spec: Specification) -> str:
    """Render a specification as model text.

    Declarations are grouped by kind (events, input variables, automata,
    predicates, invariants) preserving order within each kind; the result
    parses back to an equal tree.
    """
    out: list[str] = []
    idx = 0
    while idx < len(spec.events):
        run = [spec.events[idx]]
        while (
            idx + len(run) < len(spec.events)
            and spec.events[idx + len(run)].controllable == run[0].controllable
        ):
            run.append(spec.events[idx + len(run)])
        word = "controllable" if run[0].controllable else "uncontrollable"
        out.append(f"{word} {', '.join(ev.name for ev in run)};")
        idx += len(run)
    for var in spec.input_vars:
        out.append(f"input {_format_domain(var.domain)} {var.name};")
    for aut in spec.automata:
        if out:
            out.append("")
        out.append(f"{aut.kind} {aut.name} {{")
        if aut.alphabet is not None:
            out.append(f"  alphabet {', '.join(aut.alphabet)};")
        for var in aut.variables:
            decl = f"  disc {_format_domain(var.domain)} {var.name}"
            if var.initial:
                decl += " = " + ", ".join(_format_literal(v) for v in var.initial)
            out.append(decl + ";")
        for loc in aut.locations:
            out.append(f"  location {loc.name}:")
            if loc.initial is True:
                out.append("    initial;")
            elif loc.initial is not None:
                out.append(f"    initial when {format_expr(loc.initial)};")
            if loc.marked is True:
                out.append("    marked;")
            elif loc.marked is not None:
                out.append(f"    marked when {format_expr(loc.marked)};")
            for edge in aut.edges:
                if edge.source != loc.name:
                    continue
                line = f"    edge {', '.join(edge.events)}"
                if edge.guard is not None:
                    line += f" when {format_expr(edge.guard)}"
                if edge.updates:
                    line += " do " + ", ".join(
                        f"{name} := {format_expr(rhs)}" for name, rhs in edge.updates
                    )
                if edge.target is not None:
                    line += f" goto {edge.target}"
                out.append(line + ";")
        out.append("}")
    for pred in spec.init_preds:
        out.append(f"initial {format_expr(pred)};")
    for pred in spec.marker_preds:
        out.append(f"marked {format_expr(pred)};")
    for inv in spec.invariants:
        if inv.kind == "state":
            body = format_expr(inv.predicate)
        elif inv.kind == "needs":
            body = f"{inv.event} needs {format_expr(inv.predicate)}"
        else:
            body = f"{format_expr(inv.predicate)} disables {inv.event}"
        out.append(f"{inv.side} invariant {body};")
    return "\n".join(out) + "\n"
