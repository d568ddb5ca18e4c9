"""Translation of the hybrid logic into first-order theories.

`nu_sig` builds the frame theory for a signature: naturals, event-name
sets, events, configurations as a record of control state and attribute
values, and the init/trans/reachable predicates with their closure axioms.
`nu_frm`/`nu_sen` are the standard translation over an explicit
configuration variable.  `translate_machine` adds a machine's axioms in the
flattened form used for proving, and `gen_obligations` the invariant
goals.  `induced_interpretation` turns a finite event/data structure into a
semantic environment for `eval_fol`, closing the loop with the bounded
oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import datalogic as dl
from . import edhml
from .eds import EdStructure, InstEvent, reachable
from .fol import (
    CONF, CTRL, EVT, EVTNAME, EVTSET, NAT,
    Axiom, Datatype, FolError, FolSignature, FolTheory, Goal, Interpretation,
    FApp, FBool, FEq, FExists, FForall, FIff, FImpl, FAnd, FNot, FNum, FOr,
    FPred, FSet, FTerm, FVar, OpDecl, PredDecl,
    and_chain, exists_many, forall_many, free_vars, or_chain, subst_var,
)
from .frontend import StateMachine


def evt_op(event: str) -> str:
    return f"evt_{event}"


def evtname_op(event: str) -> str:
    return f"evtName_{event}"


def _nat_var(name: str) -> FVar:
    return FVar(name, NAT)


def _conf_var(name: str) -> FVar:
    return FVar(name, CONF)


def _sel(attr: str, g: FTerm) -> FTerm:
    return FApp(attr, (g,))


def _ctrl(g: FTerm) -> FTerm:
    return FApp("ctrl", (g,))


# --- data predicates over configuration selectors --------------------------------

def term_to_fol(term: dl.Term, g: FTerm, g2: FTerm | None) -> FTerm:
    """Attributes become selector applications on the configuration
    variables: unprimed reads `g`, primed reads `g2`."""
    if isinstance(term, dl.Num):
        return FNum(term.value)
    if isinstance(term, dl.Suc):
        return FApp("suc", (term_to_fol(term.arg, g, g2),))
    if isinstance(term, dl.Var):
        return _nat_var(term.name)
    if isinstance(term, dl.Attr):
        if term.primed:
            if g2 is None:
                raise FolError(f"primed attribute {term.name}' outside an effect")
            return _sel(term.name, g2)
        return _sel(term.name, g)
    if isinstance(term, dl.Add):
        return FApp("+", (term_to_fol(term.left, g, g2), term_to_fol(term.right, g, g2)))
    if isinstance(term, dl.Mul):
        return FApp("*", (term_to_fol(term.left, g, g2), term_to_fol(term.right, g, g2)))
    raise TypeError(f"not a term: {term!r}")


def pred_to_fol(pred: dl.Pred, g: FTerm, g2: FTerm | None = None) -> "FFormula":
    if isinstance(pred, dl.Truth):
        return FBool(True)
    if isinstance(pred, dl.Falsity):
        return FBool(False)
    if isinstance(pred, dl.Cmp):
        left = term_to_fol(pred.left, g, g2)
        right = term_to_fol(pred.right, g, g2)
        op = "==" if pred.op in ("=", "==") else pred.op
        return FPred(op, (left, right))
    if isinstance(pred, dl.Not):
        return FNot(pred_to_fol(pred.arg, g, g2))
    if isinstance(pred, dl.And):
        return FAnd(pred_to_fol(pred.left, g, g2), pred_to_fol(pred.right, g, g2))
    if isinstance(pred, dl.Or):
        return FOr(pred_to_fol(pred.left, g, g2), pred_to_fol(pred.right, g, g2))
    if isinstance(pred, dl.Implies):
        return FImpl(pred_to_fol(pred.left, g, g2), pred_to_fol(pred.right, g, g2))
    if isinstance(pred, dl.Iff):
        return FIff(pred_to_fol(pred.left, g, g2), pred_to_fol(pred.right, g, g2))
    raise TypeError(f"not a predicate: {pred!r}")


# --- the frame theory --------------------------------------------------------------

def _nat_axioms(th: FolTheory) -> FolTheory:
    n, m, r, s, t = (_nat_var(x) for x in "nmrst")
    z = FNum(0)

    def fa(names, body):
        return forall_many([(x, NAT) for x in names], body)

    plus = lambda a, b: FApp("+", (a, b))
    times = lambda a, b: FApp("*", (a, b))
    axs = [
        ("add_zero", fa("n", FEq(plus(z, n), n))),
        ("add_suc", fa("nm", FEq(plus(FApp("suc", (n,)), m), FApp("suc", (plus(n, m),))))),
        ("mul_zero", fa("n", FEq(times(z, n), z))),
        ("mul_suc", fa("nm", FEq(times(FApp("suc", (n,)), m), plus(m, times(n, m))))),
        ("le_zero", fa("n", FPred("<=", (z, n)))),
        ("le_suc_zero", fa("n", FNot(FPred("<=", (FApp("suc", (n,)), z))))),
        ("le_suc_suc", fa("mn", FIff(FPred("<=", (FApp("suc", (m,)), FApp("suc", (n,)))),
                                     FPred("<=", (m, n))))),
        ("ge_def", fa("mn", FIff(FPred(">=", (m, n)), FPred("<=", (n, m))))),
        ("lt_def", fa("mn", FIff(FPred("<", (m, n)),
                                 FAnd(FPred("<=", (m, n)), FNot(FEq(m, n)))))),
        ("gt_def", fa("mn", FIff(FPred(">", (m, n)), FPred("<", (n, m))))),
        ("eq_def", fa("mn", FIff(FPred("==", (m, n)), FEq(m, n)))),
        ("decimal_def", fa("mn", FEq(FApp("@@", (m, n)),
                                     plus(times(m, FApp("suc", (FNum(9),))), n)))),
        ("nat_distinct", fa("n", FNot(FEq(z, FApp("suc", (n,)))))),
        ("nat_inject", fa("mn", FIff(FEq(FApp("suc", (m,)), FApp("suc", (n,))),
                                     FEq(m, n)))),
        ("add_unit", fa("n", FEq(plus(n, z), n))),
        ("add_comm", fa("nm", FEq(plus(n, m), plus(m, n)))),
        ("add_assoc", fa("rst", FEq(plus(plus(r, s), t), plus(r, plus(s, t))))),
        ("mul_unit", fa("n", FEq(times(FNum(1), n), n))),
        ("mul_comm", fa("nm", FEq(times(n, m), times(m, n)))),
        ("mul_assoc", fa("rst", FEq(times(times(r, s), t), times(r, times(s, t))))),
        ("distrib_right", fa("rst", FEq(times(plus(r, s), t),
                                        plus(times(r, t), times(s, t))))),
        ("distrib_left", fa("rst", FEq(times(t, plus(r, s)),
                                       plus(times(t, r), times(t, s))))),
    ]
    for label, f in axs:
        th = th.add_axiom(label, f, origin="frame")
    return th


def _set_axioms(th: FolTheory) -> FolTheory:
    x = FVar("x", EVTNAME)
    y = FVar("y", EVTNAME)
    M = FVar("M", EVTSET)
    N = FVar("N", EVTSET)
    empty = FSet(())
    th = th.add_axiom(
        "elemOf_empty_Set",
        FForall("x", EVTNAME, FNot(FPred("eps", (x, empty)))))
    th = th.add_axiom(
        "elemOf_NonEmpty_Set",
        forall_many([("x", EVTNAME), ("y", EVTNAME), ("M", EVTSET)],
                    FIff(FPred("eps", (x, FApp("setadd", (y, M)))),
                         FOr(FEq(x, y), FPred("eps", (x, M))))))
    th = th.add_axiom(
        "equality_Set",
        forall_many([("M", EVTSET), ("N", EVTSET)],
                    FIff(FEq(M, N),
                         FForall("x", EVTNAME,
                                 FIff(FPred("eps", (x, M)), FPred("eps", (x, N)))))))
    return th


def nu_sig(sig: edhml.EdSignature) -> FolTheory:
    """Frame theory for a signature: sorts, generated types, event naming,
    initiality and reachability axioms.  Machine-specific content (the init
    definition, control constants, machine axioms) is added separately."""
    if not sig.events:
        raise FolError("empty event signature: the Evt sort would be empty")

    ops = [
        OpDecl("suc", (NAT,), NAT),
        OpDecl("+", (NAT, NAT), NAT),
        OpDecl("*", (NAT, NAT), NAT),
        OpDecl("@@", (NAT, NAT), NAT),
        OpDecl("setadd", (EVTNAME, EVTSET), EVTSET),
        OpDecl("evtName", (EVT,), EVTNAME),
        OpDecl("allEvts", (), EVTSET),
        OpDecl("ctrl", (CONF,), CTRL),
        OpDecl("conf", (CTRL,) + (NAT,) * len(sig.attributes), CONF),
    ]
    for event, params in sig.events:
        ops.append(OpDecl(evt_op(event), (NAT,) * len(params), EVT))
        ops.append(OpDecl(evtname_op(event), (), EVTNAME))
    for attr in sig.attributes:
        ops.append(OpDecl(attr, (CONF,), NAT))
    preds = [
        PredDecl("<=", (NAT, NAT)),
        PredDecl("<", (NAT, NAT)),
        PredDecl(">", (NAT, NAT)),
        PredDecl(">=", (NAT, NAT)),
        PredDecl("==", (NAT, NAT)),
        PredDecl("eps", (EVTNAME, EVTSET)),
        PredDecl("init", (CONF,)),
        PredDecl("trans", (CONF, EVT, CONF)),
        PredDecl("reachable", (EVTSET, CONF, CONF)),
        PredDecl("reachable2", (EVTSET, CONF)),
        PredDecl("reachable1", (CONF,)),
    ]
    datatypes = (
        Datatype(NAT, (("0", ()), ("suc", (NAT,))), free=True),
        Datatype(EVTNAME, tuple((evtname_op(e), ()) for e, _ in sig.events), free=True),
        Datatype(EVTSET, (("{}", ()), ("setadd", (EVTNAME, EVTSET))), free=False),
        Datatype(EVT, tuple((evt_op(e), (NAT,) * len(p)) for e, p in sig.events),
                 free=True),
        Datatype(CONF, (("conf", (CTRL,) + (NAT,) * len(sig.attributes)),),
                 selectors=(("conf", ("ctrl",) + sig.attributes),), free=True),
    )
    signature = FolSignature(
        sorts=(NAT, CTRL, CONF, EVT, EVTNAME, EVTSET),
        ops=tuple(ops), preds=tuple(preds), datatypes=datatypes)
    th = FolTheory(signature=signature)
    th = _nat_axioms(th)
    th = _set_axioms(th)

    # event naming and generated-type axioms
    for event, params in sig.events:
        xs = [(f"x{i + 1}", NAT) for i in range(len(params))]
        term = FApp(evt_op(event), tuple(FVar(n, s) for n, s in xs))
        th = th.add_axiom("evtEqs",
                          forall_many(xs, FEq(FApp("evtName", (term,)),
                                              FApp(evtname_op(event), ()))),
                          origin="frame")

    e = FVar("e", EVT)
    disjuncts = []
    for event, params in sig.events:
        xs = [(f"x{i + 1}", NAT) for i in range(len(params))]
        term = FApp(evt_op(event), tuple(FVar(n, s) for n, s in xs))
        disjuncts.append(exists_many(xs, FEq(e, term)))
    th = th.add_axiom("evt_exhaust", FForall("e", EVT, or_chain(disjuncts)))
    names = [event for event, _ in sig.events]
    for (e1, p1), (e2, p2) in itertools.combinations(sig.events, 2):
        xs = [(f"x{i + 1}", NAT) for i in range(len(p1))]
        ys = [(f"y{i + 1}", NAT) for i in range(len(p2))]
        t1 = FApp(evt_op(e1), tuple(FVar(n, s) for n, s in xs))
        t2 = FApp(evt_op(e2), tuple(FVar(n, s) for n, s in ys))
        th = th.add_axiom("evt_distinct",
                          forall_many(xs + ys, FNot(FEq(t1, t2))))
    for event, params in sig.events:
        if not params:
            continue
        xs = [(f"x{i + 1}", NAT) for i in range(len(params))]
        ys = [(f"y{i + 1}", NAT) for i in range(len(params))]
        t1 = FApp(evt_op(event), tuple(FVar(n, s) for n, s in xs))
        t2 = FApp(evt_op(event), tuple(FVar(n, s) for n, s in ys))
        same = and_chain([FEq(FVar(a, NAT), FVar(b, NAT))
                          for (a, _), (b, _) in zip(xs, ys)])
        th = th.add_axiom("evt_inject",
                          forall_many(xs + ys, FIff(FEq(t1, t2), same)))
    en = FVar("en", EVTNAME)
    th = th.add_axiom("evtname_exhaust",
                      FForall("en", EVTNAME,
                              or_chain([FEq(en, FApp(evtname_op(ev), ()))
                                        for ev in names])))
    for e1, e2 in itertools.combinations(names, 2):
        th = th.add_axiom("evtname_distinct",
                          FNot(FEq(FApp(evtname_op(e1), ()),
                                   FApp(evtname_op(e2), ()))))

    g = _conf_var("g")
    cvars = [("c", CTRL)] + [(f"k{i + 1}", NAT) for i in range(len(sig.attributes))]
    ctuple = tuple(FVar(n, s) for n, s in cvars)
    dvars = [("d", CTRL)] + [(f"l{i + 1}", NAT) for i in range(len(sig.attributes))]
    dtuple = tuple(FVar(n, s) for n, s in dvars)
    th = th.add_axiom("conf_exhaust",
                      FForall("g", CONF,
                              exists_many(cvars, FEq(g, FApp("conf", ctuple)))))
    same = and_chain([FEq(a, b) for a, b in zip(ctuple, dtuple)])
    th = th.add_axiom("conf_inject",
                      forall_many(cvars + dvars,
                                  FIff(FEq(FApp("conf", ctuple), FApp("conf", dtuple)),
                                       same)))
    th = th.add_axiom("conf_sel_ctrl",
                      forall_many(cvars, FEq(_ctrl(FApp("conf", ctuple)), ctuple[0])))
    for i, attr in enumerate(sig.attributes):
        th = th.add_axiom(f"conf_sel_{attr}",
                          forall_many(cvars, FEq(_sel(attr, FApp("conf", ctuple)),
                                                 ctuple[i + 1])))

    th = th.add_axiom("allEvts_def",
                      FEq(FApp("allEvts", ()), FSet(tuple(names))))
    th = th.add_axiom("init_nonempty", FExists("g", CONF, FPred("init", (g,))))
    g2 = _conf_var("g'")
    th = th.add_axiom("init_unique_ctrl",
                      forall_many([("g", CONF), ("g'", CONF)],
                                  FImpl(FAnd(FPred("init", (g,)), FPred("init", (g2,))),
                                        FEq(_ctrl(g), _ctrl(g2)))))

    E = FVar("E", EVTSET)
    g3 = _conf_var("g''")
    th = th.add_axiom("reachable_refl",
                      forall_many([("E", EVTSET), ("g", CONF)],
                                  FPred("reachable", (E, g, g))))
    th = th.add_axiom(
        "reachable_step",
        forall_many([("E", EVTSET), ("g", CONF), ("g'", CONF), ("g''", CONF),
                     ("e", EVT)],
                    FImpl(FAnd(FAnd(FPred("reachable", (E, g, g2)),
                                    FPred("eps", (FApp("evtName", (e,)), E))),
                               FPred("trans", (g2, e, g3))),
                          FPred("reachable", (E, g, g3)))))
    g0 = _conf_var("g0")
    th = th.add_axiom(
        "reachable2_def",
        forall_many([("E", EVTSET), ("g", CONF)],
                    FIff(FPred("reachable2", (E, g)),
                         FExists("g0", CONF,
                                 FAnd(FPred("init", (g0,)),
                                      FPred("reachable", (E, g0, g)))))))
    th = th.add_axiom(
        "reachable1_def",
        FForall("g", CONF, FIff(FPred("reachable1", (g,)),
                                FPred("reachable2", (FApp("allEvts", ()), g)))))
    return th


# --- the standard translation -------------------------------------------------------

def _gname(depth: int) -> str:
    return "g" + "'" * depth


def nu_frm(sig: edhml.EdSignature, S: frozenset, g: FVar,
           formula: edhml.EdFormula, depth: int = 0) -> "FFormula":
    """Standard translation of a formula at configuration variable `g`;
    nested configuration variables are g', g'', ... by depth."""
    if isinstance(formula, edhml.DataF):
        return pred_to_fol(formula.pred, g)
    if isinstance(formula, edhml.StateVar):
        if formula.name not in S:
            raise FolError(f"unbound state variable {formula.name!r}")
        return FEq(FVar(formula.name, CTRL), _ctrl(g))
    if isinstance(formula, edhml.Bind):
        body = nu_frm(sig, S | {formula.var}, g, formula.body, depth)
        return FExists(formula.var, CTRL,
                       FAnd(FEq(FVar(formula.var, CTRL), _ctrl(g)), body))
    if isinstance(formula, edhml.At):
        g2 = _conf_var(_gname(depth + 1))
        body = nu_frm(sig, S, g2, formula.body, depth + 1)
        return FForall(g2.name, CONF,
                       FImpl(FAnd(FEq(_ctrl(g2), FVar(formula.var, CTRL)),
                                  FPred("reachable2", (FSet(formula.events), g2))),
                             body))
    if isinstance(formula, edhml.BoxF):
        g2 = _conf_var(_gname(depth + 1))
        body = nu_frm(sig, S, g2, formula.body, depth + 1)
        return FForall(g2.name, CONF,
                       FImpl(FPred("reachable", (FSet(formula.events), g, g2)), body))
    if isinstance(formula, edhml.Dia):
        g2 = _conf_var(_gname(depth + 1))
        ev = FApp(evt_op(formula.event), tuple(_nat_var(p) for p in formula.params))
        body = nu_frm(sig, S, g2, formula.body, depth + 1)
        inner = FAnd(FAnd(FPred("trans", (g, ev, g2)),
                          pred_to_fol(formula.psi, g, g2)),
                     body)
        return exists_many([(p, NAT) for p in formula.params],
                           FExists(g2.name, CONF, inner))
    if isinstance(formula, edhml.Wp):
        g2 = _conf_var(_gname(depth + 1))
        ev = FApp(evt_op(formula.event), tuple(_nat_var(p) for p in formula.params))
        body = nu_frm(sig, S, g2, formula.body, depth + 1)
        inner = FAnd(FAnd(FPred("trans", (g, ev, g2)),
                          pred_to_fol(formula.psi, g, g2)),
                     body)
        return forall_many([(p, NAT) for p in formula.params],
                           FImpl(pred_to_fol(formula.phi, g),
                                 FExists(g2.name, CONF, inner)))
    if isinstance(formula, edhml.NotF):
        return FNot(nu_frm(sig, S, g, formula.body, depth))
    if isinstance(formula, edhml.OrF):
        return FOr(nu_frm(sig, S, g, formula.left, depth),
                   nu_frm(sig, S, g, formula.right, depth))
    raise TypeError(f"not a formula: {formula!r}")


def nu_sen(sig: edhml.EdSignature, formula: edhml.EdFormula) -> "FFormula":
    """Sentence translation: evaluation starts in an initial configuration."""
    edhml.check_formula(sig, formula)
    g = _conf_var("g")
    return FForall("g", CONF,
                   FImpl(FPred("init", (g,)), nu_frm(sig, frozenset(), g, formula)))


# --- machine theories ----------------------------------------------------------------

def translate_machine(machine: StateMachine, complete: bool = False) -> FolTheory:
    """Frame theory plus the machine's content: control-state constants, the
    init definition, and the characterizing sentence flattened into the
    (machine), (machine_1), ... axiom family with state variables turned
    into constants."""
    sig = edhml.signature_of(machine)
    th = nu_sig(sig)
    th = FolTheory(
        signature=th.signature.with_ops(
            *(OpDecl(state, (), CTRL) for state in machine.states)),
        axioms=th.axioms, goals=th.goals)

    g = _conf_var("g")
    th = th.add_axiom(
        "init",
        FForall("g", CONF,
                FIff(FPred("init", (g,)),
                     FAnd(FEq(_ctrl(g), FApp(machine.initial_state, ())),
                          pred_to_fol(machine.initial_predicate, g)))),
        origin="machine")

    bound_states, parts = edhml.characterize_parts(machine, complete)
    for _, part in parts:
        formula = nu_frm(sig, frozenset(machine.states), g, part)
        for state in machine.states:
            formula = subst_var(formula, state, FApp(state, ()))
        th = th.add_axiom("machine", formula, origin="machine")
    for c1, c2 in itertools.combinations(bound_states, 2):
        th = th.add_axiom("ctrl_distinct",
                          FNot(FEq(FApp(c1, ()), FApp(c2, ()))), origin="machine")
    return th


@dataclass(frozen=True)
class ObligationConfig:
    """Invariant and safety templates over one free configuration variable g."""
    invariant: "FFormula"
    safe_body: "FFormula"
    per_event_case_lemmas: bool = True

    def __post_init__(self):
        for f in (self.invariant, self.safe_body):
            names = {name for name, _ in free_vars(f)}
            if names - {"g"}:
                raise FolError(f"obligation template mentions {sorted(names - {'g'})}; "
                               f"only the configuration variable g is allowed")


def default_invariant(machine: StateMachine, safe_body: "FFormula") -> "FFormula":
    """State-wise case split of the safety body, one disjunct per control
    state, as in the hand-written counter invariant."""
    g = _conf_var("g")
    return or_chain([FAnd(FEq(_ctrl(g), FApp(state, ())), safe_body)
                     for state in machine.states])


def gen_obligations(theory: FolTheory, machine: StateMachine,
                    config: ObligationConfig) -> FolTheory:
    """Add the invariant predicate, the first-order induction instance for
    reachability, and the goal family steering a prover to the safety
    property."""
    for name, _ in free_vars(config.invariant) | free_vars(config.safe_body):
        if name != "g":
            raise FolError("obligation templates must only mention g")
    th = FolTheory(signature=theory.signature.with_preds(PredDecl("invar", (CONF,))),
                   axioms=theory.axioms, goals=theory.goals)
    g = _conf_var("g")
    g2 = _conf_var("g'")
    e = FVar("e", EVT)
    es = FVar("es", EVTSET)
    all_evts = FApp("allEvts", ())

    th = th.add_axiom("invar_def",
                      FForall("g", CONF, FIff(FPred("invar", (g,)), config.invariant)),
                      origin="induction")

    invar = lambda t: FPred("invar", (t,))
    base = FForall("g", CONF, FImpl(FPred("init", (g,)), invar(g)))
    step = forall_many(
        [("g", CONF), ("g'", CONF), ("e", EVT)],
        FImpl(FAnd(FAnd(FImpl(FPred("reachable2", (es, g)), invar(g)),
                        FPred("reachable2", (es, g))),
                   FPred("trans", (g, e, g2))),
              invar(g2)))
    conclusion = FForall("g", CONF, FImpl(FPred("reachable2", (es, g)), invar(g)))
    th = th.add_axiom("InvarIsReachableInd",
                      FForall("es", EVTSET,
                              FImpl(FAnd(base, step), conclusion)),
                      origin="induction")

    th = th.add_goal("InvarInit",
                     FForall("g", CONF, FImpl(FPred("init", (g,)), invar(g))))
    if config.per_event_case_lemmas:
        for event, params in sorted(machine.events, key=lambda ep: (len(ep[1]), ep[0])):
            ev = FApp(evt_op(event), tuple(_nat_var(p) for p in params))
            lemma = forall_many(
                [("g", CONF), ("g'", CONF), ("e", EVT)] + [(p, NAT) for p in params],
                FImpl(FAnd(FAnd(FAnd(FImpl(FPred("reachable2", (all_evts, g)), invar(g)),
                                     FPred("reachable2", (all_evts, g))),
                                FPred("trans", (g, e, g2))),
                           FEq(e, ev)),
                      invar(g2)))
            th = th.add_goal("Invar" + event[:1].upper() + event[1:], lemma)
    th = th.add_goal(
        "InvarStep",
        forall_many([("g", CONF), ("g'", CONF), ("e", EVT)],
                    FImpl(FAnd(FAnd(FImpl(FPred("reachable2", (all_evts, g)), invar(g)),
                                    FPred("reachable2", (all_evts, g))),
                               FPred("trans", (g, e, g2))),
                          invar(g2))))
    th = th.add_goal("InvarImpliesSafe",
                     FForall("g", CONF, FImpl(invar(g), config.safe_body)))
    th = th.add_goal("Safe",
                     FForall("g", CONF,
                             FImpl(FPred("reachable2", (all_evts, g)), config.safe_body)))
    return th


# --- induced interpretations ----------------------------------------------------------

def induced_interpretation(M: EdStructure, bound: int) -> Interpretation:
    """Finite semantic environment read off an event/data structure: the
    Conf carrier is its configuration set, trans its step relation, and
    reachable agrees with the structure's reachability operation."""
    sig = M.signature
    names = tuple(e for e, _ in sig.events)
    instantiations = tuple(
        InstEvent(event, args)
        for event, params in sig.events
        for args in itertools.product(range(bound + 1), repeat=len(params)))
    name_sets = tuple(frozenset(c) for r in range(len(names) + 1)
                      for c in itertools.combinations(names, r))
    carriers = {
        NAT: tuple(range(bound + 1)),
        CTRL: tuple(sorted(M.controls)),
        CONF: M.configs,
        EVT: instantiations,
        EVTNAME: names,
        EVTSET: name_sets,
    }
    triples = frozenset(M.transitions)
    initials = frozenset(M.initials)

    funcs = {
        "suc": lambda n: n + 1,
        "+": lambda a, b: a + b,
        "*": lambda a, b: a * b,
        "@@": lambda a, b: a * 10 + b,
        "setadd": lambda x, s: frozenset({x}) | s,
        "{}": lambda: frozenset(),
        "allEvts": lambda: frozenset(names),
        "evtName": lambda ev: ev.name,
        "ctrl": lambda gamma: gamma[0],
    }
    for i, attr in enumerate(sig.attributes):
        funcs[attr] = (lambda i: lambda gamma: M.data_values(gamma)[i])(i)
    for event, params in sig.events:
        funcs[evt_op(event)] = (lambda e: lambda *args: InstEvent(e, tuple(args)))(event)
        funcs[evtname_op(event)] = (lambda e: lambda: e)(event)
    for control in M.controls:
        funcs.setdefault(control, (lambda c: lambda: c)(control))

    preds = {
        "<=": lambda a, b: a <= b,
        "<": lambda a, b: a < b,
        ">": lambda a, b: a > b,
        ">=": lambda a, b: a >= b,
        "==": lambda a, b: a == b,
        "eps": lambda x, s: x in s,
        "init": lambda gamma: gamma in initials,
        "trans": lambda a, ev, b: (a, ev, b) in triples,
        "reachable": lambda F, a, b: b in reachable(M, F, a),
        "reachable2": lambda F, b: b in reachable(M, F),
        "reachable1": lambda b: b in reachable(M, names),
    }
    return Interpretation(carriers=carriers, funcs=funcs, preds=preds)
