"""Terms and predicates over the natural numbers.

A predicate reads one data state (a guard) or a pair of data states plus
a valuation of event parameters (an effect).  Post-state reads go through
primed attribute references; a guard must not contain any.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional


class EvalError(Exception):
    """A name could not be resolved during evaluation."""


class TranslationError(Exception):
    """An attribute fell outside a data morphism's domain."""


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Num(Term):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are non-negative")


@dataclass(frozen=True)
class Suc(Term):
    arg: Term


@dataclass(frozen=True)
class Attr(Term):
    name: str
    primed: bool = False


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


ZERO = Num(0)


# --- predicates ------------------------------------------------------------

CMP_OPS = ("=", "==", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Pred:
    pass


@dataclass(frozen=True)
class Truth(Pred):
    pass


@dataclass(frozen=True)
class Falsity(Pred):
    pass


@dataclass(frozen=True)
class Cmp(Pred):
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class Not(Pred):
    arg: Pred


@dataclass(frozen=True)
class And(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Or(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Implies(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Iff(Pred):
    left: Pred
    right: Pred


TRUE = Truth()
FALSE = Falsity()


def conj(preds) -> Pred:
    """Right-nested conjunction; the empty conjunction is the true literal."""
    preds = list(preds)
    if not preds:
        return TRUE
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = And(p, out)
    return out


def disj(preds) -> Pred:
    """Right-nested disjunction; the empty disjunction is the false literal."""
    preds = list(preds)
    if not preds:
        return FALSE
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = Or(p, out)
    return out


# --- evaluation ------------------------------------------------------------

_EMPTY: Mapping[str, int] = {}


def eval_term(term: Term, pre: Mapping[str, int],
              post: Optional[Mapping[str, int]] = None,
              beta: Mapping[str, int] = _EMPTY) -> int:
    """Evaluate a term; primed attributes read `post`, unprimed read `pre`."""
    if isinstance(term, Num):
        return term.value
    if isinstance(term, Suc):
        return eval_term(term.arg, pre, post, beta) + 1
    if isinstance(term, Attr):
        state = post if term.primed else pre
        if term.primed and post is None:
            raise EvalError(f"primed attribute {term.name}' without a post-state")
        if term.name not in state:
            raise EvalError(f"attribute {term.name!r} not in data state")
        return state[term.name]
    if isinstance(term, Var):
        if term.name not in beta:
            raise EvalError(f"variable {term.name!r} not in valuation")
        return beta[term.name]
    if isinstance(term, Add):
        return eval_term(term.left, pre, post, beta) + eval_term(term.right, pre, post, beta)
    if isinstance(term, Mul):
        return eval_term(term.left, pre, post, beta) * eval_term(term.right, pre, post, beta)
    raise TypeError(f"not a term: {term!r}")


def _cmp(op: str, a: int, b: int) -> bool:
    if op in ("=", "=="):
        return a == b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(op)


def sat_pred(pred: Pred, pre: Mapping[str, int],
             post: Optional[Mapping[str, int]] = None,
             beta: Mapping[str, int] = _EMPTY) -> bool:
    """Classical satisfaction; a transition predicate needs `post` present."""
    if isinstance(pred, Truth):
        return True
    if isinstance(pred, Falsity):
        return False
    if isinstance(pred, Cmp):
        return _cmp(pred.op,
                    eval_term(pred.left, pre, post, beta),
                    eval_term(pred.right, pre, post, beta))
    if isinstance(pred, Not):
        return not sat_pred(pred.arg, pre, post, beta)
    if isinstance(pred, And):
        return sat_pred(pred.left, pre, post, beta) and sat_pred(pred.right, pre, post, beta)
    if isinstance(pred, Or):
        return sat_pred(pred.left, pre, post, beta) or sat_pred(pred.right, pre, post, beta)
    if isinstance(pred, Implies):
        return (not sat_pred(pred.left, pre, post, beta)) or sat_pred(pred.right, pre, post, beta)
    if isinstance(pred, Iff):
        return sat_pred(pred.left, pre, post, beta) == sat_pred(pred.right, pre, post, beta)
    raise TypeError(f"not a predicate: {pred!r}")


# --- syntactic inspection ---------------------------------------------------

def free_vars(obj) -> frozenset:
    """Variable references occurring in a term or predicate (attributes excluded)."""
    if isinstance(obj, Var):
        return frozenset({obj.name})
    if isinstance(obj, (Num, Attr, Truth, Falsity)):
        return frozenset()
    if isinstance(obj, Suc):
        return free_vars(obj.arg)
    if isinstance(obj, (Add, Mul, Cmp)):
        return free_vars(obj.left) | free_vars(obj.right)
    if isinstance(obj, Not):
        return free_vars(obj.arg)
    if isinstance(obj, (And, Or, Implies, Iff)):
        return free_vars(obj.left) | free_vars(obj.right)
    raise TypeError(f"not a term or predicate: {obj!r}")


def attributes_of(obj) -> frozenset:
    """Attribute names referenced, primed or not."""
    if isinstance(obj, Attr):
        return frozenset({obj.name})
    if isinstance(obj, (Num, Var, Truth, Falsity)):
        return frozenset()
    if isinstance(obj, Suc):
        return attributes_of(obj.arg)
    if isinstance(obj, (Add, Mul, Cmp)):
        return attributes_of(obj.left) | attributes_of(obj.right)
    if isinstance(obj, Not):
        return attributes_of(obj.arg)
    if isinstance(obj, (And, Or, Implies, Iff)):
        return attributes_of(obj.left) | attributes_of(obj.right)
    raise TypeError(f"not a term or predicate: {obj!r}")


def has_primed(obj) -> bool:
    """Whether any primed attribute reference occurs (state vs. transition use)."""
    if isinstance(obj, Attr):
        return obj.primed
    if isinstance(obj, (Num, Var, Truth, Falsity)):
        return False
    if isinstance(obj, Suc):
        return has_primed(obj.arg)
    if isinstance(obj, (Add, Mul, Cmp)):
        return has_primed(obj.left) or has_primed(obj.right)
    if isinstance(obj, Not):
        return has_primed(obj.arg)
    if isinstance(obj, (And, Or, Implies, Iff)):
        return has_primed(obj.left) or has_primed(obj.right)
    raise TypeError(f"not a term or predicate: {obj!r}")


# --- translation along data signature morphisms -----------------------------

def translate_term(alpha: Mapping[str, str], term: Term) -> Term:
    if isinstance(term, (Num, Var)):
        return term
    if isinstance(term, Suc):
        return Suc(translate_term(alpha, term.arg))
    if isinstance(term, Attr):
        if term.name not in alpha:
            raise TranslationError(f"attribute {term.name!r} outside the morphism's domain")
        return Attr(alpha[term.name], term.primed)
    if isinstance(term, Add):
        return Add(translate_term(alpha, term.left), translate_term(alpha, term.right))
    if isinstance(term, Mul):
        return Mul(translate_term(alpha, term.left), translate_term(alpha, term.right))
    raise TypeError(f"not a term: {term!r}")


def translate_pred(alpha: Mapping[str, str], pred: Pred) -> Pred:
    """Rename unprimed refs by alpha and primed refs by alpha-then-prime."""
    if isinstance(pred, (Truth, Falsity)):
        return pred
    if isinstance(pred, Cmp):
        return Cmp(pred.op, translate_term(alpha, pred.left), translate_term(alpha, pred.right))
    if isinstance(pred, Not):
        return Not(translate_pred(alpha, pred.arg))
    if isinstance(pred, (And, Or, Implies, Iff)):
        cls = type(pred)
        return cls(translate_pred(alpha, pred.left), translate_pred(alpha, pred.right))
    raise TypeError(f"not a predicate: {pred!r}")


# --- canonical text rendering ------------------------------------------------

_TERM_PREC = {Add: 1, Mul: 2}


def render_term(term: Term, prec: int = 0) -> str:
    if isinstance(term, Num):
        return str(term.value)
    if isinstance(term, Suc):
        return f"suc({render_term(term.arg)})"
    if isinstance(term, Attr):
        return term.name + ("'" if term.primed else "")
    if isinstance(term, Var):
        return term.name
    if isinstance(term, (Add, Mul)):
        own = _TERM_PREC[type(term)]
        op = "+" if isinstance(term, Add) else "*"
        text = f"{render_term(term.left, own)} {op} {render_term(term.right, own + 1)}"
        return f"({text})" if own < prec else text
    raise TypeError(f"not a term: {term!r}")


# precedence: <=> 1, => 2 (right), \/ 3, /\ 4, ! 5, atoms 6
_PRED_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_PRED_SYM = {Iff: "<=>", Implies: "=>", Or: "\\/", And: "/\\"}


def render_pred(pred: Pred, prec: int = 0) -> str:
    if isinstance(pred, Truth):
        return "true"
    if isinstance(pred, Falsity):
        return "false"
    if isinstance(pred, Cmp):
        text = f"{render_term(pred.left)} {pred.op} {render_term(pred.right)}"
        return f"({text})" if prec > 5 else text
    if isinstance(pred, Not):
        return f"!{render_pred(pred.arg, 6)}"
    if isinstance(pred, (And, Or, Implies, Iff)):
        own = _PRED_PREC[type(pred)]
        # => is right-associative, the others left-flatten naturally
        lp, rp = (own + 1, own) if isinstance(pred, Implies) else (own, own + 1)
        text = (f"{render_pred(pred.left, lp)} {_PRED_SYM[type(pred)]} "
                f"{render_pred(pred.right, rp)}")
        return f"({text})" if own < prec else text
    raise TypeError(f"not a predicate: {pred!r}")
