"""UMLState frontend: concrete syntax, static checks, effect desugaring,
and input-enabledness completion.

Grammar (terminals quoted):

    spec   ::= "logic" "UMLState" "spec" IDENT "=" decl* "end"
    decl   ::= "var" identlist ";" | "event" IDENT [ "(" identlist ")" ] ";"
             | "states" identlist ";" | "init" IDENT ":" pred ";"
             | "trans" IDENT "-->" IDENT ":" IDENT [ "(" identlist ")" ]
               [ "[" pred "]" ] [ "/" "{" assign ( ";" assign )* "}" ] ";"
    assign ::= IDENT ":=" term
    identlist ::= IDENT ( "," IDENT )*
    term   ::= numeral | IDENT | term ("+"|"*") term | "(" term ")"
    pred   ::= "true" | "false" | term ("="|"=="|"<"|"<="|">"|">=") term
             | "!" pred | pred ("/\\"|"\\/"|"=>") pred | "(" pred ")"

Comments run from `%%` to end of line.  UTF-8, LF or CRLF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import datalogic as dl

# names reserved for the generated first-order frame; letting a machine use
# them would capture selectors/predicates of the translation
RESERVED = frozenset({
    "g", "conf", "ctrl", "init", "trans", "reachable", "reachable1",
    "reachable2", "allEvts", "nm", "evtName", "invar", "suc", "eps",
})

KEYWORDS = frozenset({
    "logic", "UMLState", "spec", "var", "event", "states", "init", "trans",
    "end", "true", "false",
})


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}: {self.severity}[{self.code}]: {self.message}"


@dataclass(frozen=True)
class TransitionSpec:
    source: str
    guard: dl.Pred
    event: str
    params: tuple[str, ...]
    effect: dl.Pred
    target: str
    # effects written as assignment blocks keep them for pretty-printing;
    # None marks an effect supplied directly as a transition predicate
    assignments: Optional[tuple[tuple[str, dl.Term], ...]] = ()
    origin: str = "explicit"  # "explicit" | "generated"


@dataclass(frozen=True)
class StateMachine:
    name: str
    attributes: tuple[str, ...]
    events: tuple[tuple[str, tuple[str, ...]], ...]
    states: tuple[str, ...]
    transitions: tuple[TransitionSpec, ...]
    initial_state: str
    initial_predicate: dl.Pred

    @property
    def event_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.events)

    def explicit_transitions(self) -> tuple[TransitionSpec, ...]:
        return tuple(t for t in self.transitions if t.origin == "explicit")


@dataclass(frozen=True)
class ParseResult:
    machine: Optional[StateMachine]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.machine is not None


class UmlStateError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# --- tokens ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
            (?P<ws>[ \t\r\n]+)
          | (?P<comment>%%[^\n]*)
          | (?P<num>[0-9]+)
          | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
          | (?P<sym>-->|:=|/\\|\\/|=>|<=|>=|==|[=<>!+*:;,()\[\]{}/])
          """, re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "ident" | "sym" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(Diagnostic("error", "lex", f"unexpected character {text[pos]!r}",
                                    line, col, line, col + 1))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens, diags


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, code: str = "syntax", tok: Token | None = None):
        tok = tok or self.cur
        self.diags.append(Diagnostic("error", code, message, tok.line, tok.col,
                                     tok.line, tok.col + max(1, len(tok.text))))
        raise UmlStateError(self.diags)

    def accept(self, text: str) -> Optional[Token]:
        if self.cur.kind in ("sym", "ident") and self.cur.text == text:
            tok = self.cur
            self.pos += 1
            return tok
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            self.error(f"expected {text!r} but found {self.cur.text or 'end of input'!r}")
        return tok

    def ident(self, what: str = "identifier") -> Token:
        if self.cur.kind != "ident" or self.cur.text in KEYWORDS:
            self.error(f"expected {what} but found {self.cur.text or 'end of input'!r}")
        tok = self.cur
        self.pos += 1
        return tok

    def identlist(self, what: str) -> list[Token]:
        out = [self.ident(what)]
        while self.accept(","):
            out.append(self.ident(what))
        return out

    # terms: * binds tighter than +, both left-associative
    def term(self) -> dl.Term:
        t = self.term_factor()
        while self.accept("+"):
            t = dl.Add(t, self.term_factor())
        return t

    def term_factor(self) -> dl.Term:
        t = self.term_atom()
        while self.accept("*"):
            t = dl.Mul(t, self.term_atom())
        return t

    def term_atom(self) -> dl.Term:
        if self.cur.kind == "num":
            tok = self.cur
            self.pos += 1
            return dl.Num(int(tok.text))
        if self.cur.kind == "ident" and self.cur.text not in KEYWORDS:
            return dl.Attr(self.ident().text)  # resolved to Var later if a parameter
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        self.error("expected a term")

    # predicates: => (right) < \/ < /\ < ! < atoms
    def pred(self) -> dl.Pred:
        left = self.pred_or()
        if self.accept("=>"):
            return dl.Implies(left, self.pred())
        return left

    def pred_or(self) -> dl.Pred:
        p = self.pred_and()
        while self.accept("\\/"):
            p = dl.Or(p, self.pred_and())
        return p

    def pred_and(self) -> dl.Pred:
        p = self.pred_unary()
        while self.accept("/\\"):
            p = dl.And(p, self.pred_unary())
        return p

    def pred_unary(self) -> dl.Pred:
        if self.accept("!"):
            return dl.Not(self.pred_unary())
        return self.pred_atom()

    def pred_atom(self) -> dl.Pred:
        if self.accept("true"):
            return dl.TRUE
        if self.accept("false"):
            return dl.FALSE
        if self.cur.text == "(":
            # parenthesis may open a predicate or a term; try the predicate
            # reading first and fall back on comparison of a parenthesised term
            saved = self.pos
            saved_diags = list(self.diags)
            self.accept("(")
            try:
                p = self.pred()
                self.expect(")")
                if self.cur.text in dl.CMP_OPS:
                    raise UmlStateError(self.diags)  # it was a term after all
                return p
            except UmlStateError:
                self.pos = saved
                self.diags = saved_diags
        left = self.term()
        for op in dl.CMP_OPS:
            if self.accept(op):
                return dl.Cmp(op, left, self.term())
        self.error("expected a comparison operator")

    def parse_spec(self) -> tuple[str, list]:
        self.expect("logic")
        self.expect("UMLState")
        self.expect("spec")
        name = self.ident("specification name").text
        self.expect("=")
        decls = []
        while not self.accept("end"):
            if self.cur.kind == "eof":
                self.error("expected 'end' before end of input")
            decls.append(self.decl())
        return name, decls

    def decl(self):
        if self.accept("var"):
            names = self.identlist("attribute name")
            self.expect(";")
            return ("var", names)
        if self.accept("event"):
            name = self.ident("event name")
            params: list[Token] = []
            if self.accept("("):
                params = self.identlist("parameter name")
                self.expect(")")
            self.expect(";")
            return ("event", name, params)
        if self.accept("states"):
            names = self.identlist("state name")
            self.expect(";")
            return ("states", names)
        if self.accept("init"):
            state = self.ident("state name")
            self.expect(":")
            pred = self.pred()
            self.expect(";")
            return ("init", state, pred)
        if self.accept("trans"):
            src = self.ident("state name")
            self.expect("-->")
            dst = self.ident("state name")
            self.expect(":")
            event = self.ident("event name")
            params: list[Token] = []
            if self.accept("("):
                params = self.identlist("parameter name")
                self.expect(")")
            guard = None
            if self.accept("["):
                guard = self.pred()
                self.expect("]")
            assigns: list[tuple[Token, dl.Term]] = []
            if self.accept("/"):
                self.expect("{")
                assigns.append(self.assign())
                while self.accept(";"):
                    assigns.append(self.assign())
                self.expect("}")
            self.expect(";")
            return ("trans", src, dst, event, params, guard, assigns)
        self.error("expected a declaration (var, event, states, init, or trans)")

    def assign(self) -> tuple[Token, dl.Term]:
        name = self.ident("attribute name")
        self.expect(":=")
        return name, self.term()


# --- name resolution and static checks ---------------------------------------

def _resolve_term(term: dl.Term, attributes: set[str], params: set[str],
                  diags: list[Diagnostic], tok: Token) -> dl.Term:
    """Rewrite identifier leaves into attribute or variable references."""
    if isinstance(term, dl.Attr):
        if term.name in params:
            return dl.Var(term.name)
        if term.name in attributes:
            return term
        diags.append(Diagnostic("error", "undeclared",
                                f"undeclared name {term.name!r}", tok.line, tok.col))
        return term
    if isinstance(term, dl.Add):
        return dl.Add(_resolve_term(term.left, attributes, params, diags, tok),
                      _resolve_term(term.right, attributes, params, diags, tok))
    if isinstance(term, dl.Mul):
        return dl.Mul(_resolve_term(term.left, attributes, params, diags, tok),
                      _resolve_term(term.right, attributes, params, diags, tok))
    if isinstance(term, dl.Suc):
        return dl.Suc(_resolve_term(term.arg, attributes, params, diags, tok))
    return term


def _resolve_pred(pred: dl.Pred, attributes: set[str], params: set[str],
                  diags: list[Diagnostic], tok: Token) -> dl.Pred:
    if isinstance(pred, dl.Cmp):
        return dl.Cmp(pred.op,
                      _resolve_term(pred.left, attributes, params, diags, tok),
                      _resolve_term(pred.right, attributes, params, diags, tok))
    if isinstance(pred, dl.Not):
        return dl.Not(_resolve_pred(pred.arg, attributes, params, diags, tok))
    if isinstance(pred, (dl.And, dl.Or, dl.Implies, dl.Iff)):
        cls = type(pred)
        return cls(_resolve_pred(pred.left, attributes, params, diags, tok),
                   _resolve_pred(pred.right, attributes, params, diags, tok))
    return pred


def desugar_effect(assignments, attributes) -> dl.Pred:
    """Assignment block to transition predicate: one primed equation per
    assignment plus a frame equation for every untouched attribute."""
    seen = set()
    conjuncts = []
    for attr, term in assignments:
        if attr in seen:
            raise ValueError(f"duplicate assignment to attribute {attr!r}")
        seen.add(attr)
        conjuncts.append(dl.Cmp("=", dl.Attr(attr, primed=True), term))
    for attr in attributes:
        if attr not in seen:
            conjuncts.append(dl.Cmp("=", dl.Attr(attr, primed=True), dl.Attr(attr)))
    return dl.conj(conjuncts)


def parse_umlstate(text: str) -> ParseResult:
    """Parse DSL source; on any error the machine is withheld."""
    tokens, diags = _tokenize(text)
    if any(d.severity == "error" for d in diags):
        return ParseResult(None, tuple(diags))
    parser = _Parser(tokens)
    try:
        name, decls = parser.parse_spec()
    except UmlStateError as exc:
        return ParseResult(None, tuple(exc.diagnostics))
    diags = parser.diags

    attributes: list[str] = []
    events: list[tuple[str, tuple[str, ...]]] = []
    states: list[str] = []
    init: Optional[tuple[str, dl.Pred]] = None
    raw_transitions = []

    def err(code, msg, tok=None):
        line = tok.line if tok else 1
        col = tok.col if tok else 1
        diags.append(Diagnostic("error", code, msg, line, col))

    declared: dict[str, str] = {}

    def declare(tok: Token, kind: str):
        if tok.text in RESERVED:
            err("reserved", f"{tok.text!r} is reserved for the generated theory", tok)
        prior = declared.get(tok.text)
        # parameters of different events may share a name; anything else clashes
        if prior is not None and not (prior == kind == "parameter"):
            err("duplicate", f"duplicate declaration of {tok.text!r}", tok)
        declared[tok.text] = kind

    for decl in decls:
        if decl[0] == "var":
            for tok in decl[1]:
                declare(tok, "attribute")
                attributes.append(tok.text)
        elif decl[0] == "event":
            _, name_tok, param_toks = decl
            declare(name_tok, "event")
            params = []
            for tok in param_toks:
                declare(tok, "parameter")
                if tok.text in params:
                    err("duplicate", f"duplicate parameter {tok.text!r}", tok)
                params.append(tok.text)
            events.append((name_tok.text, tuple(params)))
        elif decl[0] == "states":
            for tok in decl[1]:
                declare(tok, "state")
                states.append(tok.text)
        elif decl[0] == "init":
            _, state_tok, pred = decl
            if init is not None:
                err("duplicate", "duplicate init declaration", state_tok)
            init = (state_tok, pred)
        else:
            raw_transitions.append(decl)

    attr_set = set(attributes)
    event_map = dict(events)
    state_set = set(states)

    if init is None:
        err("missing-init", "missing init declaration")
        return ParseResult(None, tuple(diags))
    init_tok, init_pred = init
    if init_tok.text not in state_set:
        err("undeclared", f"undeclared state {init_tok.text!r}", init_tok)
    init_pred = _resolve_pred(init_pred, attr_set, set(), diags, init_tok)
    if dl.free_vars(init_pred):
        err("init-vars", "init predicate must not contain variables", init_tok)

    transitions: list[TransitionSpec] = []
    for _, src, dst, event_tok, param_toks, guard, assigns in raw_transitions:
        for tok in (src, dst):
            if tok.text not in state_set:
                err("undeclared", f"undeclared state {tok.text!r}", tok)
        if event_tok.text not in event_map:
            err("undeclared", f"undeclared event {event_tok.text!r}", event_tok)
            continue
        use_params = tuple(t.text for t in param_toks)
        decl_params = event_map[event_tok.text]
        if use_params != decl_params:
            err("arity", f"event {event_tok.text!r} declared with parameters "
                f"({', '.join(decl_params)}) but used with ({', '.join(use_params)})",
                event_tok)
            continue
        param_set = set(use_params)
        guard = dl.TRUE if guard is None else _resolve_pred(
            guard, attr_set, param_set, diags, event_tok)
        resolved_assigns = []
        assigned = set()
        for name_tok, term in assigns:
            if name_tok.text not in attr_set:
                err("undeclared", f"assignment to undeclared attribute {name_tok.text!r}",
                    name_tok)
                continue
            if name_tok.text in assigned:
                err("duplicate", f"duplicate assignment to attribute {name_tok.text!r}",
                    name_tok)
                continue
            assigned.add(name_tok.text)
            resolved_assigns.append(
                (name_tok.text, _resolve_term(term, attr_set, param_set, diags, name_tok)))
        effect = desugar_effect(resolved_assigns, attributes)
        transitions.append(TransitionSpec(
            source=src.text, guard=guard, event=event_tok.text, params=decl_params,
            effect=effect, target=dst.text, assignments=tuple(resolved_assigns)))

    if any(d.severity == "error" for d in diags):
        return ParseResult(None, tuple(diags))

    machine = StateMachine(
        name=name,
        attributes=tuple(attributes),
        events=tuple(events),
        states=tuple(states),
        transitions=tuple(transitions),
        initial_state=init_tok.text,
        initial_predicate=init_pred,
    )
    return ParseResult(machine, tuple(diags))


def parse_machine(text: str) -> StateMachine:
    """Parse, raising on any error diagnostic."""
    result = parse_umlstate(text)
    if result.machine is None:
        raise UmlStateError(result.diagnostics)
    return result.machine


def validate(machine: StateMachine) -> list[Diagnostic]:
    """Semantic checks beyond well-formedness; an empty list means accepted."""
    diags: list[Diagnostic] = []
    reached = {machine.initial_state}
    frontier = [machine.initial_state]
    succ: dict[str, list[str]] = {}
    for t in machine.transitions:
        succ.setdefault(t.source, []).append(t.target)
    while frontier:
        state = frontier.pop()
        for nxt in succ.get(state, ()):
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    for state in machine.states:
        if state not in reached:
            diags.append(Diagnostic("error", "unreachable",
                                    f"state {state!r} not syntactically reachable", 1, 1))
    if isinstance(machine.initial_predicate, dl.Falsity):
        diags.append(Diagnostic("warning", "unsat-init",
                                "unsatisfiable initial predicate", 1, 1))
    return diags


def complete_input_enabledness(machine: StateMachine) -> StateMachine:
    """Append idling self-loops so every event is consumable in every state.

    The added guard is the negated disjunction of the explicit guards for
    that state and event (false when there are none).  A loop whose guard
    could never fire because some explicit guard is the literal `true` is
    dropped.  Previously generated loops are regenerated, which makes the
    operation idempotent.
    """
    explicit = machine.explicit_transitions()
    added: list[TransitionSpec] = []
    frame = desugar_effect([], machine.attributes)
    for state in machine.states:
        for event, params in machine.events:
            guards = [t.guard for t in explicit
                      if t.source == state and t.event == event]
            if any(isinstance(g, dl.Truth) for g in guards):
                continue
            added.append(TransitionSpec(
                source=state, guard=dl.Not(dl.disj(guards)), event=event,
                params=params, effect=frame, target=state,
                assignments=(), origin="generated"))
    return StateMachine(
        name=machine.name, attributes=machine.attributes, events=machine.events,
        states=machine.states, transitions=explicit + tuple(added),
        initial_state=machine.initial_state,
        initial_predicate=machine.initial_predicate)


def pretty_print(machine: StateMachine) -> str:
    """Render back to concrete syntax; reparsing yields an equal machine
    (modulo transition origin, which the syntax does not carry)."""
    lines = ["logic UMLState", f"spec {machine.name} ="]
    if machine.attributes:
        lines.append(f"  var {', '.join(machine.attributes)};")
    for event, params in machine.events:
        suffix = f"({', '.join(params)})" if params else ""
        lines.append(f"  event {event}{suffix};")
    if machine.states:
        lines.append(f"  states {', '.join(machine.states)};")
    lines.append(f"  init {machine.initial_state} : "
                 f"{dl.render_pred(machine.initial_predicate)};")
    for t in machine.transitions:
        if t.assignments is None:
            raise ValueError("cannot print a transition whose effect "
                             "was not given as assignments")
        suffix = f"({', '.join(t.params)})" if t.params else ""
        parts = [f"  trans {t.source} --> {t.target} : {t.event}{suffix}"]
        if not isinstance(t.guard, dl.Truth):
            parts.append(f" [{dl.render_pred(t.guard)}]")
        if t.assignments:
            body = "; ".join(f"{a} := {dl.render_term(term)}" for a, term in t.assignments)
            parts.append(f" / {{ {body} }}")
        parts.append(";")
        lines.append("".join(parts))
    lines.append("end")
    return "\n".join(lines) + "\n"
