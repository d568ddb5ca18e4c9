"""Hybrid modal logic over event/data signatures.

Formulas speak about configurations of an event/data structure: a data
sentence reads the current data state, state variables name control states
(bound with `down`, tested bare or jumped to with `at`), boxes range over
reachable configurations, and the two event modalities assert transitions
guarded by data/transition predicates.

Derived connectives are represented by their definitions and never as
distinct nodes: `true` is `down s . s`, conjunction is de Morgan over
disjunction, and the per-event box is the negated diamond.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from . import datalogic as dl
from .frontend import StateMachine, TransitionSpec, UmlStateError, validate


class FormulaError(Exception):
    pass


class UnboundStateVariable(FormulaError):
    pass


# --- signatures and morphisms -------------------------------------------------

@dataclass(frozen=True)
class EdSignature:
    events: tuple[tuple[str, tuple[str, ...]], ...]
    attributes: tuple[str, ...]

    @property
    def event_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.events)

    def params_of(self, event: str) -> tuple[str, ...]:
        for name, params in self.events:
            if name == event:
                return params
        raise KeyError(event)

    def has_event(self, event: str) -> bool:
        return any(name == event for name, _ in self.events)


def signature_of(machine: StateMachine) -> EdSignature:
    return EdSignature(events=machine.events, attributes=machine.attributes)


@dataclass(frozen=True)
class EdMorphism:
    source: EdSignature
    target: EdSignature
    event_map: tuple[tuple[str, str], ...]
    attr_map: tuple[tuple[str, str], ...]

    def __post_init__(self):
        emap = dict(self.event_map)
        amap = dict(self.attr_map)
        for name, params in self.source.events:
            if name not in emap:
                raise FormulaError(f"event {name!r} has no image")
            if not self.target.has_event(emap[name]):
                raise FormulaError(f"image event {emap[name]!r} undeclared in target")
            if self.target.params_of(emap[name]) != params:
                raise FormulaError(
                    f"event {name!r} must keep its parameter list under the morphism")
        for attr in self.source.attributes:
            if attr not in amap:
                raise FormulaError(f"attribute {attr!r} has no image")
            if amap[attr] not in self.target.attributes:
                raise FormulaError(f"image attribute {amap[attr]!r} undeclared in target")

    @property
    def events(self) -> dict[str, str]:
        return dict(self.event_map)

    @property
    def attrs(self) -> dict[str, str]:
        return dict(self.attr_map)

    @classmethod
    def identity(cls, sig: EdSignature) -> "EdMorphism":
        return cls(source=sig, target=sig,
                   event_map=tuple((n, n) for n, _ in sig.events),
                   attr_map=tuple((a, a) for a in sig.attributes))


# --- formulas -----------------------------------------------------------------

@dataclass(frozen=True)
class EdFormula:
    pass


@dataclass(frozen=True)
class DataF(EdFormula):
    pred: dl.Pred  # closed state predicate


@dataclass(frozen=True)
class StateVar(EdFormula):
    name: str


@dataclass(frozen=True)
class Bind(EdFormula):
    var: str
    body: EdFormula


@dataclass(frozen=True)
class At(EdFormula):
    events: tuple[str, ...]
    var: str
    body: EdFormula


@dataclass(frozen=True)
class BoxF(EdFormula):
    events: tuple[str, ...]
    body: EdFormula


@dataclass(frozen=True)
class Dia(EdFormula):
    event: str
    params: tuple[str, ...]
    psi: dl.Pred
    body: EdFormula


@dataclass(frozen=True)
class Wp(EdFormula):
    event: str
    params: tuple[str, ...]
    phi: dl.Pred
    psi: dl.Pred
    body: EdFormula


@dataclass(frozen=True)
class NotF(EdFormula):
    body: EdFormula


@dataclass(frozen=True)
class OrF(EdFormula):
    left: EdFormula
    right: EdFormula


# derived forms

def true_f() -> EdFormula:
    return Bind("s", StateVar("s"))


def false_f() -> EdFormula:
    return NotF(true_f())


def and_f(left: EdFormula, right: EdFormula) -> EdFormula:
    return NotF(OrF(NotF(left), NotF(right)))


def conj_f(formulas) -> EdFormula:
    formulas = list(formulas)
    if not formulas:
        return true_f()
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = and_f(f, out)
    return out


def disj_f(formulas) -> EdFormula:
    formulas = list(formulas)
    if not formulas:
        return false_f()
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = OrF(f, out)
    return out


def box_evt(event: str, params: tuple[str, ...], psi: dl.Pred,
            body: EdFormula) -> EdFormula:
    """Per-event box: the negated diamond of the negation."""
    return NotF(Dia(event, params, psi, NotF(body)))


def at_full(sig: EdSignature, var: str, body: EdFormula) -> At:
    return At(sig.event_names, var, body)


# pattern recognisers for the derived forms

def match_true(f: EdFormula) -> bool:
    return isinstance(f, Bind) and isinstance(f.body, StateVar) and f.body.name == f.var


def match_false(f: EdFormula) -> bool:
    return isinstance(f, NotF) and match_true(f.body)


def match_and(f: EdFormula) -> Optional[tuple[EdFormula, EdFormula]]:
    if (isinstance(f, NotF) and isinstance(f.body, OrF)
            and isinstance(f.body.left, NotF) and isinstance(f.body.right, NotF)):
        return f.body.left.body, f.body.right.body
    return None


def match_box_evt(f: EdFormula) -> Optional[tuple[str, tuple, dl.Pred, EdFormula]]:
    if isinstance(f, NotF) and isinstance(f.body, Dia) and isinstance(f.body.body, NotF):
        d = f.body
        return d.event, d.params, d.psi, d.body.body
    return None


def flatten_and(f: EdFormula) -> list[EdFormula]:
    pair = match_and(f)
    if pair is None:
        return [f]
    return flatten_and(pair[0]) + flatten_and(pair[1])


def iter_nodes(f: EdFormula) -> Iterator[EdFormula]:
    yield f
    if isinstance(f, (Bind, At, BoxF, Dia, Wp, NotF)):
        yield from iter_nodes(f.body)
    elif isinstance(f, OrF):
        yield from iter_nodes(f.left)
        yield from iter_nodes(f.right)


def count_nodes(f: EdFormula, cls) -> int:
    return sum(1 for node in iter_nodes(f) if isinstance(node, cls))


# --- well-formedness ----------------------------------------------------------

def check_formula(sig: EdSignature, f: EdFormula,
                  bound: frozenset = frozenset()) -> None:
    """Raise FormulaError on anything ill-formed over `sig`."""
    if isinstance(f, DataF):
        if dl.has_primed(f.pred):
            raise FormulaError("data sentence contains a primed reference")
        if dl.free_vars(f.pred):
            raise FormulaError("data sentence contains free variables")
        if not dl.attributes_of(f.pred) <= set(sig.attributes):
            raise FormulaError("data sentence mentions undeclared attributes")
        return
    if isinstance(f, StateVar):
        if f.name not in bound:
            raise UnboundStateVariable(f"state variable {f.name!r} unbound")
        return
    if isinstance(f, Bind):
        check_formula(sig, f.body, bound | {f.var})
        return
    if isinstance(f, At):
        if not set(f.events) <= set(sig.event_names):
            raise FormulaError("at-modality over undeclared events")
        if f.var not in bound:
            raise UnboundStateVariable(f"state variable {f.var!r} unbound")
        check_formula(sig, f.body, bound)
        return
    if isinstance(f, BoxF):
        if not set(f.events) <= set(sig.event_names):
            raise FormulaError("box over undeclared events")
        check_formula(sig, f.body, bound)
        return
    if isinstance(f, (Dia, Wp)):
        if not sig.has_event(f.event):
            raise FormulaError(f"undeclared event {f.event!r}")
        if sig.params_of(f.event) != f.params:
            raise FormulaError(f"event {f.event!r} used with the wrong parameter list")
        preds = [f.psi] if isinstance(f, Dia) else [f.phi, f.psi]
        for pred in preds:
            if not dl.free_vars(pred) <= set(f.params):
                raise FormulaError("guard/effect variables outside the event parameters")
            if not dl.attributes_of(pred) <= set(sig.attributes):
                raise FormulaError("guard/effect mentions undeclared attributes")
        if isinstance(f, Wp) and dl.has_primed(f.phi):
            raise FormulaError("precondition contains a primed reference")
        check_formula(sig, f.body, bound)
        return
    if isinstance(f, NotF):
        check_formula(sig, f.body, bound)
        return
    if isinstance(f, OrF):
        check_formula(sig, f.left, bound)
        check_formula(sig, f.right, bound)
        return
    raise TypeError(f"not a formula: {f!r}")


# --- translation along signature morphisms -------------------------------------

def translate_formula(sigma: EdMorphism, f: EdFormula) -> EdFormula:
    """Homomorphic renaming of data parts, event names, and event sets."""
    emap, amap = sigma.events, sigma.attrs
    if isinstance(f, DataF):
        return DataF(dl.translate_pred(amap, f.pred))
    if isinstance(f, StateVar):
        return f
    if isinstance(f, Bind):
        return Bind(f.var, translate_formula(sigma, f.body))
    if isinstance(f, At):
        return At(tuple(emap[e] for e in f.events), f.var,
                  translate_formula(sigma, f.body))
    if isinstance(f, BoxF):
        return BoxF(tuple(emap[e] for e in f.events), translate_formula(sigma, f.body))
    if isinstance(f, Dia):
        return Dia(emap[f.event], f.params, dl.translate_pred(amap, f.psi),
                   translate_formula(sigma, f.body))
    if isinstance(f, Wp):
        return Wp(emap[f.event], f.params, dl.translate_pred(amap, f.phi),
                  dl.translate_pred(amap, f.psi), translate_formula(sigma, f.body))
    if isinstance(f, NotF):
        return NotF(translate_formula(sigma, f.body))
    if isinstance(f, OrF):
        return OrF(translate_formula(sigma, f.left), translate_formula(sigma, f.right))
    raise TypeError(f"not a formula: {f!r}")


# --- satisfaction --------------------------------------------------------------

def _valuations(params: tuple[str, ...], bound: int) -> Iterator[dict[str, int]]:
    for args in itertools.product(range(bound + 1), repeat=len(params)):
        yield dict(zip(params, args))


def _free_svars(f: EdFormula, cache: dict) -> frozenset:
    key = id(f)
    if key in cache:
        return cache[key]
    if isinstance(f, StateVar):
        out = frozenset({f.name})
    elif isinstance(f, DataF):
        out = frozenset()
    elif isinstance(f, Bind):
        out = _free_svars(f.body, cache) - {f.var}
    elif isinstance(f, At):
        out = _free_svars(f.body, cache) | {f.var}
    elif isinstance(f, (BoxF, Dia, Wp, NotF)):
        out = _free_svars(f.body, cache)
    elif isinstance(f, OrF):
        out = _free_svars(f.left, cache) | _free_svars(f.right, cache)
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[key] = out
    return out


class _SatContext:
    """Memoizes subformula satisfaction on (node, relevant assignment,
    configuration); the characterizing sentences nest their conjuncts, so
    without sharing the evaluation is exponential in the spine length."""

    def __init__(self, M, bound: int):
        self.M = M
        self.bound = bound
        self.memo: dict = {}
        self.svars: dict = {}

    def sat(self, v: Mapping[str, str], gamma, f: EdFormula) -> bool:
        relevant = _free_svars(f, self.svars)
        key = (id(f), tuple(sorted((s, v[s]) for s in relevant if s in v)), gamma)
        if key not in self.memo:
            self.memo[key] = self._sat(v, gamma, f)
        return self.memo[key]

    def _sat(self, v: Mapping[str, str], gamma, f: EdFormula) -> bool:
        M, bound = self.M, self.bound
        if isinstance(f, DataF):
            return dl.sat_pred(f.pred, M.data_state(gamma))
        if isinstance(f, StateVar):
            if f.name not in v:
                raise UnboundStateVariable(f.name)
            return v[f.name] == gamma[0]
        if isinstance(f, Bind):
            inner = dict(v)
            inner[f.var] = gamma[0]
            return self.sat(inner, gamma, f.body)
        if isinstance(f, At):
            if f.var not in v:
                raise UnboundStateVariable(f.var)
            want = v[f.var]
            return all(self.sat(v, g2, f.body)
                       for g2 in M.reachable_init(f.events) if g2[0] == want)
        if isinstance(f, BoxF):
            return all(self.sat(v, g2, f.body)
                       for g2 in M.reachable_from(f.events, gamma))
        if isinstance(f, Dia):
            pre = M.data_state(gamma)
            for args, dst in M.out(gamma, f.event):
                if any(a > bound for a in args):
                    continue
                beta = dict(zip(f.params, args))
                if dl.sat_pred(f.psi, pre, M.data_state(dst), beta):
                    if self.sat(v, dst, f.body):
                        return True
            return False
        if isinstance(f, Wp):
            pre = M.data_state(gamma)
            for beta in _valuations(f.params, bound):
                if not dl.sat_pred(f.phi, pre, None, beta):
                    continue
                args = tuple(beta[p] for p in f.params)
                if not any(
                        dl.sat_pred(f.psi, pre, M.data_state(dst), beta)
                        and self.sat(v, dst, f.body)
                        for a2, dst in M.out(gamma, f.event) if a2 == args):
                    return False
            return True
        if isinstance(f, NotF):
            return not self.sat(v, gamma, f.body)
        if isinstance(f, OrF):
            return self.sat(v, gamma, f.left) or self.sat(v, gamma, f.right)
        raise TypeError(f"not a formula: {f!r}")


def sat_formula(M, v: Mapping[str, str], gamma, f: EdFormula, bound: int) -> bool:
    """Bounded satisfaction at a configuration; quantified valuations range
    over {0..bound}."""
    return _SatContext(M, bound).sat(dict(v), gamma, f)


def sat_sentence(M, f: EdFormula, bound: int) -> bool:
    """A sentence holds when it holds at every initial configuration."""
    ctx = _SatContext(M, bound)
    return all(ctx.sat({}, g0, f) for g0 in M.initials)


# --- machine characterization ---------------------------------------------------

def _image(T, state: str) -> list[TransitionSpec]:
    return [t for t in T if t.source == state]


def _image_event(T, state: str, event: str) -> list[TransitionSpec]:
    return [t for t in T if t.source == state and t.event == event]


def fin(c: str, T, sig: EdSignature) -> EdFormula:
    """All transitions out of `c` beyond those in T are forbidden: for every
    event and every subset P of its outgoing specs, a step matching exactly
    the effects of P must land in one of P's targets."""
    clauses: list[EdFormula] = []
    for event, params in sig.events:
        image = _image_event(T, c, event)
        for mask in range(1 << len(image)):
            chosen = [t for i, t in enumerate(image) if mask >> i & 1]
            rest = [t for i, t in enumerate(image) if not mask >> i & 1]
            chi = dl.And(dl.conj(dl.And(t.guard, t.effect) for t in chosen),
                         dl.Not(dl.disj(dl.And(t.guard, t.effect) for t in rest)))
            targets = disj_f([StateVar(t.target) for t in chosen])
            clauses.append(box_evt(event, params, chi, targets))
    return at_full(sig, c, conj_f(clauses))


def _distinctness(B: tuple[str, ...], sig: EdSignature, ordered: bool) -> list[EdFormula]:
    pairs = []
    if ordered:
        for c1 in B:
            for c2 in B:
                if c1 != c2:
                    pairs.append((c1, c2))
    else:
        for i, c1 in enumerate(B):
            for c2 in B[i + 1:]:
                pairs.append((c1, c2))
    return [NotF(at_full(sig, c1, StateVar(c2))) for c1, c2 in pairs]


def sen(c: str, I: list[TransitionSpec], V: frozenset, B: tuple[str, ...],
        T, sig: EdSignature, ordered_distinctness: bool = False) -> EdFormula:
    """Recursive traversal asserting every transition of T and, once all
    states are visited, the fin blocks plus pairwise state distinctness.

    Choice points are deterministic: pending transitions go in source order,
    the next state to visit is the lexicographically least bound one.
    """
    if I:
        t, remaining = I[0], I[1:]
        if t.target in B:
            body = and_f(StateVar(t.target),
                         sen(c, remaining, V, B, T, sig, ordered_distinctness))
        else:
            body = Bind(t.target,
                        sen(c, remaining, V, B + (t.target,), T, sig,
                            ordered_distinctness))
        return at_full(sig, c, Wp(t.event, t.params, t.guard, t.effect, body))
    V = V - {c}
    if V:
        candidates = sorted(set(B) & V)
        if not candidates:
            raise FormulaError("states to visit are not reachable from bound states")
        nxt = candidates[0]
        return sen(nxt, _image(T, nxt), V, B, T, sig, ordered_distinctness)
    return conj_f([fin(b, T, sig) for b in B]
                  + _distinctness(B, sig, ordered_distinctness))


def characterize(machine: StateMachine, complete: bool = False,
                 ordered_distinctness: bool = False) -> EdFormula:
    """One closed sentence whose bounded models are exactly the machine's."""
    from .frontend import complete_input_enabledness
    diags = [d for d in validate(machine) if d.severity == "error"]
    if diags:
        raise UmlStateError(diags)
    m = complete_input_enabledness(machine) if complete else machine
    sig = signature_of(m)
    c0 = m.initial_state
    body = sen(c0, _image(m.transitions, c0), frozenset(m.states), (c0,),
               m.transitions, sig, ordered_distinctness)
    return Bind(c0, and_f(DataF(m.initial_predicate), body))


def characterize_parts(machine: StateMachine, complete: bool = False):
    """The characterizing sentence flattened into standalone conjuncts with
    free state variables: one wp part per transition in traversal order,
    one fin part per bound state, then ordered distinctness pairs.

    Used by the first-order translation, where state variables become
    constants and each part is a separate axiom.
    """
    from .frontend import complete_input_enabledness
    m = complete_input_enabledness(machine) if complete else machine
    sig = signature_of(m)
    order: list[TransitionSpec] = []
    B: list[str] = [m.initial_state]
    V = set(m.states)
    c = m.initial_state
    while True:
        for t in _image(m.transitions, c):
            order.append(t)
            if t.target not in B:
                B.append(t.target)
        V.discard(c)
        if not V:
            break
        candidates = sorted(set(B) & V)
        if not candidates:
            raise FormulaError("states to visit are not reachable from bound states")
        c = candidates[0]
    parts = [("wp", at_full(sig, t.source,
                            Wp(t.event, t.params, t.guard, t.effect,
                               StateVar(t.target))))
             for t in order]
    parts += [("fin", fin(b, m.transitions, sig)) for b in B]
    parts += [("distinct", f) for f in _distinctness(tuple(B), sig, ordered=True)]
    return tuple(B), parts


# --- canonical text rendering ----------------------------------------------------

# precedence: \/ 1, /\ 2, ! and modal prefixes 3, atoms 4

def _evset(events: tuple[str, ...]) -> str:
    return "[" + ",".join(events) + "]"


def _evuse(event: str, params: tuple[str, ...]) -> str:
    return event + (f"({', '.join(params)})" if params else "")


def render_formula(f: EdFormula, prec: int = 0) -> str:
    """ASCII rendering; the derived forms print as true/false, /\\, and the
    per-event box."""
    if match_true(f):
        return "true"
    if match_false(f):
        return "false"
    pair = match_and(f)
    if pair is not None:
        text = f"{render_formula(pair[0], 2)} /\\ {render_formula(pair[1], 3)}"
        return f"({text})" if prec > 2 else text
    box = match_box_evt(f)
    if box is not None:
        event, params, psi, body = box
        text = (f"[{_evuse(event, params)} // {dl.render_pred(psi)}] "
                f"{render_formula(body, 3)}")
        return f"({text})" if prec > 3 else text
    if isinstance(f, DataF):
        return f"({dl.render_pred(f.pred)})"
    if isinstance(f, StateVar):
        return f.name
    if isinstance(f, Bind):
        text = f"down {f.var} . {render_formula(f.body)}"
        return f"({text})" if prec > 0 else text
    if isinstance(f, At):
        text = f"@{_evset(f.events)} {f.var} . {render_formula(f.body)}"
        return f"({text})" if prec > 0 else text
    if isinstance(f, BoxF):
        text = f"{_evset(f.events)} {render_formula(f.body, 3)}"
        return f"({text})" if prec > 3 else text
    if isinstance(f, Dia):
        text = (f"<{_evuse(f.event, f.params)} // {dl.render_pred(f.psi)}> "
                f"{render_formula(f.body, 3)}")
        return f"({text})" if prec > 3 else text
    if isinstance(f, Wp):
        text = (f"[{_evuse(f.event, f.params)} // {dl.render_pred(f.phi)} => "
                f"{dl.render_pred(f.psi)}] {render_formula(f.body, 3)}")
        return f"({text})" if prec > 3 else text
    if isinstance(f, NotF):
        return f"!{render_formula(f.body, 4)}"
    if isinstance(f, OrF):
        text = f"{render_formula(f.left, 1)} \\/ {render_formula(f.right, 2)}"
        return f"({text})" if prec > 1 else text
    raise TypeError(f"not a formula: {f!r}")
