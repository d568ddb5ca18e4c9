"""Many-sorted first-order syntax, theory presentations, a finite evaluator,
and the three prover-oriented simplifications (double-negation removal,
conjunction splitting, Skolemization of bound control states)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping, Optional

NAT = "Nat"
CTRL = "Ctrl"
CONF = "Conf"
EVT = "Evt"
EVTNAME = "EvtName"
EVTSET = "EvtNameSet"


class FolError(Exception):
    pass


class EvalError(FolError):
    pass


# --- terms and formulas --------------------------------------------------------

@dataclass(frozen=True)
class FTerm:
    pass


@dataclass(frozen=True)
class FVar(FTerm):
    name: str
    sort: str


@dataclass(frozen=True)
class FNum(FTerm):
    value: int


@dataclass(frozen=True)
class FSet(FTerm):
    members: tuple[str, ...]  # event names, declaration order


@dataclass(frozen=True)
class FApp(FTerm):
    op: str
    args: tuple[FTerm, ...] = ()


@dataclass(frozen=True)
class FFormula:
    pass


@dataclass(frozen=True)
class FBool(FFormula):
    value: bool


@dataclass(frozen=True)
class FEq(FFormula):
    left: FTerm
    right: FTerm


@dataclass(frozen=True)
class FPred(FFormula):
    name: str
    args: tuple[FTerm, ...]


@dataclass(frozen=True)
class FNot(FFormula):
    body: FFormula


@dataclass(frozen=True)
class FAnd(FFormula):
    left: FFormula
    right: FFormula


@dataclass(frozen=True)
class FOr(FFormula):
    left: FFormula
    right: FFormula


@dataclass(frozen=True)
class FImpl(FFormula):
    left: FFormula
    right: FFormula


@dataclass(frozen=True)
class FIff(FFormula):
    left: FFormula
    right: FFormula


@dataclass(frozen=True)
class FForall(FFormula):
    var: str
    sort: str
    body: FFormula


@dataclass(frozen=True)
class FExists(FFormula):
    var: str
    sort: str
    body: FFormula


_BINARY = (FAnd, FOr, FImpl, FIff)
_QUANT = (FForall, FExists)


def forall_many(vars_sorts, body: FFormula) -> FFormula:
    for name, sort in reversed(list(vars_sorts)):
        body = FForall(name, sort, body)
    return body


def exists_many(vars_sorts, body: FFormula) -> FFormula:
    for name, sort in reversed(list(vars_sorts)):
        body = FExists(name, sort, body)
    return body


def and_chain(formulas) -> FFormula:
    formulas = list(formulas)
    if not formulas:
        return FBool(True)
    out = formulas[0]
    for f in formulas[1:]:
        out = FAnd(out, f)
    return out


def or_chain(formulas) -> FFormula:
    formulas = list(formulas)
    if not formulas:
        return FBool(False)
    out = formulas[0]
    for f in formulas[1:]:
        out = FOr(out, f)
    return out


def iter_subformulas(f: FFormula) -> Iterator[FFormula]:
    yield f
    if isinstance(f, FNot):
        yield from iter_subformulas(f.body)
    elif isinstance(f, _BINARY):
        yield from iter_subformulas(f.left)
        yield from iter_subformulas(f.right)
    elif isinstance(f, _QUANT):
        yield from iter_subformulas(f.body)


def free_term_vars(t: FTerm) -> frozenset:
    if isinstance(t, FVar):
        return frozenset({(t.name, t.sort)})
    if isinstance(t, FApp):
        out = frozenset()
        for a in t.args:
            out |= free_term_vars(a)
        return out
    return frozenset()


def free_vars(f: FFormula) -> frozenset:
    if isinstance(f, FBool):
        return frozenset()
    if isinstance(f, FEq):
        return free_term_vars(f.left) | free_term_vars(f.right)
    if isinstance(f, FPred):
        out = frozenset()
        for a in f.args:
            out |= free_term_vars(a)
        return out
    if isinstance(f, FNot):
        return free_vars(f.body)
    if isinstance(f, _BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, _QUANT):
        return frozenset(v for v in free_vars(f.body) if v[0] != f.var)
    raise TypeError(f"not a formula: {f!r}")


def subst_term_in_term(t: FTerm, name: str, repl: FTerm) -> FTerm:
    if isinstance(t, FVar):
        return repl if t.name == name else t
    if isinstance(t, FApp):
        return FApp(t.op, tuple(subst_term_in_term(a, name, repl) for a in t.args))
    return t


def subst_var(f: FFormula, name: str, repl: FTerm) -> FFormula:
    """Capture-aware substitution of a free variable by a closed term."""
    if isinstance(f, FBool):
        return f
    if isinstance(f, FEq):
        return FEq(subst_term_in_term(f.left, name, repl),
                   subst_term_in_term(f.right, name, repl))
    if isinstance(f, FPred):
        return FPred(f.name, tuple(subst_term_in_term(a, name, repl) for a in f.args))
    if isinstance(f, FNot):
        return FNot(subst_var(f.body, name, repl))
    if isinstance(f, _BINARY):
        return type(f)(subst_var(f.left, name, repl), subst_var(f.right, name, repl))
    if isinstance(f, _QUANT):
        if f.var == name:
            return f
        return type(f)(f.var, f.sort, subst_var(f.body, name, repl))
    raise TypeError(f"not a formula: {f!r}")


# --- signatures and theories -----------------------------------------------------

@dataclass(frozen=True)
class OpDecl:
    name: str
    args: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class PredDecl:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Datatype:
    """A generated sort: constructor alternatives with optional selector names."""
    sort: str
    constructors: tuple[tuple[str, tuple[str, ...]], ...]
    selectors: tuple[tuple[str, tuple[str, ...]], ...] = ()  # per ctor, per arg
    free: bool = True


@dataclass(frozen=True)
class FolSignature:
    sorts: tuple[str, ...]
    ops: tuple[OpDecl, ...]
    preds: tuple[PredDecl, ...]
    datatypes: tuple[Datatype, ...] = ()

    def op(self, name: str) -> OpDecl:
        for o in self.ops:
            if o.name == name:
                return o
        raise KeyError(name)

    def has_op(self, name: str) -> bool:
        return any(o.name == name for o in self.ops)

    def with_ops(self, *decls: OpDecl) -> "FolSignature":
        return replace(self, ops=self.ops + tuple(decls))

    def with_preds(self, *decls: PredDecl) -> "FolSignature":
        return replace(self, preds=self.preds + tuple(decls))


@dataclass(frozen=True)
class Axiom:
    label: str
    formula: FFormula
    origin: str = "frame"  # frame | machine | induction | lemma


@dataclass(frozen=True)
class Goal:
    label: str
    formula: FFormula


@dataclass(frozen=True)
class FolTheory:
    signature: FolSignature
    axioms: tuple[Axiom, ...] = ()
    goals: tuple[Goal, ...] = ()

    def labels(self) -> set:
        return {a.label for a in self.axioms} | {g.label for g in self.goals}

    def fresh_label(self, base: str) -> str:
        taken = self.labels()
        if base not in taken:
            return base
        i = 1
        while f"{base}_{i}" in taken:
            i += 1
        return f"{base}_{i}"

    def add_axiom(self, base_label: str, formula: FFormula,
                  origin: str = "frame") -> "FolTheory":
        label = self.fresh_label(base_label)
        return replace(self, axioms=self.axioms + (Axiom(label, formula, origin),))

    def add_goal(self, base_label: str, formula: FFormula) -> "FolTheory":
        label = self.fresh_label(base_label)
        return replace(self, goals=self.goals + (Goal(label, formula),))

    def axiom(self, label: str) -> Axiom:
        for a in self.axioms:
            if a.label == label:
                return a
        raise KeyError(label)


# --- finite evaluation -------------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    """Finite semantic environment: carriers per sort, plus function and
    predicate denotations keyed by symbol name."""
    carriers: Mapping[str, tuple]
    funcs: Mapping[str, Callable]
    preds: Mapping[str, Callable]


def eval_term_fol(interp: Interpretation, t: FTerm, env: Mapping[str, object]):
    if isinstance(t, FVar):
        if t.name not in env:
            raise EvalError(f"unbound variable {t.name!r}")
        return env[t.name]
    if isinstance(t, FNum):
        return t.value
    if isinstance(t, FSet):
        return frozenset(t.members)
    if isinstance(t, FApp):
        if t.op not in interp.funcs:
            raise EvalError(f"no interpretation for operation {t.op!r}")
        return interp.funcs[t.op](*(eval_term_fol(interp, a, env) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def _free_names(f: FFormula, cache: dict) -> frozenset:
    key = id(f)
    if key in cache:
        return cache[key]
    if isinstance(f, FBool):
        out = frozenset()
    elif isinstance(f, (FEq, FPred)):
        out = frozenset(name for name, _ in free_vars(f))
    elif isinstance(f, FNot):
        out = _free_names(f.body, cache)
    elif isinstance(f, _BINARY):
        out = _free_names(f.left, cache) | _free_names(f.right, cache)
    elif isinstance(f, _QUANT):
        out = _free_names(f.body, cache) - {f.var}
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[key] = out
    return out


class _EvalContext:
    """Memoizes subformula truth on (node, relevant environment slice); the
    translated characterizing sentences nest their conjuncts, so without
    sharing the evaluation is exponential in the spine length."""

    def __init__(self, interp: Interpretation, bound: int):
        self.interp = interp
        self.bound = bound
        self.memo: dict = {}
        self.names: dict = {}

    def eval(self, f: FFormula, env: Mapping[str, object]) -> bool:
        relevant = _free_names(f, self.names)
        key = (id(f), tuple(sorted((n, env[n]) for n in relevant if n in env)))
        if key not in self.memo:
            self.memo[key] = self._eval(f, env)
        return self.memo[key]

    def _eval(self, f: FFormula, env: Mapping[str, object]) -> bool:
        interp, bound = self.interp, self.bound
        if isinstance(f, FBool):
            return f.value
        if isinstance(f, FEq):
            return (eval_term_fol(interp, f.left, env)
                    == eval_term_fol(interp, f.right, env))
        if isinstance(f, FPred):
            if f.name not in interp.preds:
                raise EvalError(f"no interpretation for predicate {f.name!r}")
            return bool(interp.preds[f.name](
                *(eval_term_fol(interp, a, env) for a in f.args)))
        if isinstance(f, FNot):
            return not self.eval(f.body, env)
        if isinstance(f, FAnd):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, FOr):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, FImpl):
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        if isinstance(f, FIff):
            return self.eval(f.left, env) == self.eval(f.right, env)
        if isinstance(f, _QUANT):
            if f.sort == NAT:
                carrier = tuple(range(bound + 1))
            else:
                if f.sort not in interp.carriers:
                    raise EvalError(f"no carrier for sort {f.sort!r}")
                carrier = interp.carriers[f.sort]
            if not carrier:
                raise EvalError(f"empty carrier for sort {f.sort!r}")
            results = (self.eval(f.body, {**env, f.var: x}) for x in carrier)
            return all(results) if isinstance(f, FForall) else any(results)
        raise TypeError(f"not a formula: {f!r}")


def eval_fol(interp: Interpretation, f: FFormula, bound: int,
             env: Optional[dict] = None) -> bool:
    """Classical evaluation; Nat quantifiers range over {0..bound}, all other
    sorts over the interpretation's finite carriers."""
    return _EvalContext(interp, bound).eval(f, {} if env is None else dict(env))


# --- simplification -----------------------------------------------------------------

def remove_double_negations(f: FFormula) -> FFormula:
    if isinstance(f, FNot):
        body = remove_double_negations(f.body)
        if isinstance(body, FNot):
            return body.body
        return FNot(body)
    if isinstance(f, _BINARY):
        return type(f)(remove_double_negations(f.left), remove_double_negations(f.right))
    if isinstance(f, _QUANT):
        return type(f)(f.var, f.sort, remove_double_negations(f.body))
    return f


def _normalize(f: FFormula) -> FFormula:
    """Double-negation removal plus recognition of the derived conjunction
    pattern not(not a \\/ not b), which the hybrid-logic translation
    produces everywhere a conjunction was meant."""
    if isinstance(f, FNot):
        body = _normalize(f.body)
        if isinstance(body, FNot):
            return body.body
        if (isinstance(body, FOr) and isinstance(body.left, FNot)
                and isinstance(body.right, FNot)):
            return FAnd(body.left.body, body.right.body)
        return FNot(body)
    if isinstance(f, _BINARY):
        return type(f)(_normalize(f.left), _normalize(f.right))
    if isinstance(f, _QUANT):
        return type(f)(f.var, f.sort, _normalize(f.body))
    return f


def _eq_mentions(eq: FFormula, name: str) -> bool:
    return (isinstance(eq, FEq)
            and (eq.left == FVar(name, CTRL) or eq.right == FVar(name, CTRL)))


def _skolemize_spine(f: FFormula, fresh: Callable[[str], str],
                     introduced: list) -> FFormula:
    """Replace spine-positive `exists s : Ctrl . s = t /\\ body` binders by
    constants.  Spine positions: root, under foralls, conjunctions, other
    existentials, and implication consequents."""
    if isinstance(f, FExists) and f.sort == CTRL:
        first = f.body.left if isinstance(f.body, FAnd) else f.body
        if _eq_mentions(first, f.var):
            const = fresh(f.var)
            introduced.append(const)
            body = subst_var(f.body, f.var, FApp(const, ()))
            return _skolemize_spine(body, fresh, introduced)
    if isinstance(f, FForall) or isinstance(f, FExists):
        return type(f)(f.var, f.sort, _skolemize_spine(f.body, fresh, introduced))
    if isinstance(f, FAnd):
        return FAnd(_skolemize_spine(f.left, fresh, introduced),
                    _skolemize_spine(f.right, fresh, introduced))
    if isinstance(f, FImpl):
        return FImpl(f.left, _skolemize_spine(f.right, fresh, introduced))
    return f


def _split_axiom(axiom: Axiom) -> list[tuple[str, FFormula]]:
    """Split a top-level conjunction (under a universal prefix) into separate
    axioms; each part keeps only the prefix variables it uses."""
    prefix: list[tuple[str, str]] = []
    core = axiom.formula
    while isinstance(core, FForall):
        prefix.append((core.var, core.sort))
        core = core.body
    if not isinstance(core, FAnd):
        return [(axiom.label, axiom.formula)]
    conjuncts: list[FFormula] = []
    stack = [core]
    while stack:
        node = stack.pop()
        if isinstance(node, FAnd):
            stack.append(node.right)
            stack.append(node.left)
        else:
            conjuncts.append(node)
    out = []
    for part in conjuncts:
        used = {name for name, _ in free_vars(part)}
        kept = [(v, s) for v, s in prefix if v in used]
        out.append((axiom.label, forall_many(kept, part)))
    return out


def simplify_theory(theory: FolTheory) -> FolTheory:
    """Remove double negations, Skolemize bound control states into fresh
    constants (recording their pairwise distinctness), and split top-level
    conjunctive axioms; applied to a fixpoint and idempotent."""
    sig = theory.signature
    taken = {o.name for o in sig.ops}

    def fresh(base: str) -> str:
        if base not in taken:
            taken.add(base)
            return base
        i = 1
        while f"{base}_{i}" in taken:
            i += 1
        taken.add(f"{base}_{i}")
        return f"{base}_{i}"

    introduced: list[str] = []
    new_axioms: list[Axiom] = []
    for ax in theory.axioms:
        f = _normalize(ax.formula)
        f = _skolemize_spine(f, fresh, introduced)
        f = _normalize(f)
        new_axioms.append(Axiom(ax.label, f, ax.origin))

    out = FolTheory(signature=sig, axioms=(), goals=theory.goals)
    for ax in new_axioms:
        for label, formula in _split_axiom(ax):
            out = out.add_axiom(label, formula, ax.origin)
    if introduced:
        out = replace(out, signature=out.signature.with_ops(
            *(OpDecl(name, (), CTRL) for name in introduced)))
        for c1, c2 in itertools.combinations(introduced, 2):
            out = out.add_axiom("ctrl_distinct",
                                FNot(FEq(FApp(c1, ()), FApp(c2, ()))),
                                origin="machine")
    new_goals = tuple(Goal(g.label, _normalize(g.formula))
                      for g in theory.goals)
    out = replace(out, goals=new_goals)
    if out == theory:
        return theory
    return simplify_theory(out)
