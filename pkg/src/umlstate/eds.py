"""Finite event/data structures: reachable transition systems over
configurations (control state, data name) labelled by instantiated events.

Construction prunes to the part reachable from the initial configurations,
so every stored structure satisfies the reachability invariant.  The data
name indirection is kept so reducts relabel without collapsing transitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Optional

from . import datalogic as dl
from .edhml import EdSignature, EdMorphism, signature_of
from .frontend import StateMachine

Config = tuple  # (control state, data name)


class StructureError(ValueError):
    pass


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class InstEvent:
    name: str
    args: tuple[int, ...]

    def key(self):
        return (self.name, self.args)


@dataclass(frozen=True)
class Violation:
    kind: str  # missing-transition | unjustified-transition | initial-control
    #            | control-states | initial-data
    config: Optional[Config]
    event: Optional[str]
    args: Optional[tuple[int, ...]]
    message: str


@dataclass(frozen=True)
class ModelCheckReport:
    verdict: bool
    violations: tuple[Violation, ...]


def _sort_key(config: Config):
    return (config[0], repr(config[1]))


@dataclass(frozen=True)
class EdStructure:
    signature: EdSignature
    configs: tuple[Config, ...]
    transitions: tuple[tuple[Config, InstEvent, Config], ...]
    initials: tuple[Config, ...]
    labelling: tuple[tuple[Hashable, tuple[int, ...]], ...]

    @cached_property
    def config_set(self) -> frozenset:
        return frozenset(self.configs)

    @cached_property
    def controls(self) -> frozenset:
        return frozenset(c for c, _ in self.configs)

    @cached_property
    def initial_control(self) -> str:
        return self.initials[0][0]

    @cached_property
    def _labels(self) -> dict:
        return dict(self.labelling)

    @cached_property
    def _succ(self) -> dict:
        adj: dict = {}
        for src, ev, dst in self.transitions:
            adj.setdefault(src, []).append((ev, dst))
        return adj

    @cached_property
    def _out_by_event(self) -> dict:
        adj: dict = {}
        for src, ev, dst in self.transitions:
            adj.setdefault((src, ev.name), []).append((ev.args, dst))
        return adj

    def data_state(self, config: Config) -> dict[str, int]:
        values = self._labels[config[1]]
        return dict(zip(self.signature.attributes, values))

    def data_values(self, config: Config) -> tuple[int, ...]:
        return self._labels[config[1]]

    def out(self, config: Config, event: str):
        return self._out_by_event.get((config, event), ())

    def succ(self, config: Config):
        return self._succ.get(config, ())

    @cached_property
    def _closure_cache(self) -> dict:
        return {}

    def reachable_from(self, events: Iterable[str], start: Config) -> frozenset:
        if start not in self.config_set:
            raise StructureError(f"{start!r} is not a configuration")
        events = frozenset(events)
        key = (events, start)
        if key not in self._closure_cache:
            self._closure_cache[key] = self._closure([start], events)
        return self._closure_cache[key]

    def reachable_init(self, events: Iterable[str]) -> frozenset:
        events = frozenset(events)
        key = (events, None)
        if key not in self._closure_cache:
            self._closure_cache[key] = self._closure(self.initials, events)
        return self._closure_cache[key]

    def _closure(self, starts, events: frozenset) -> frozenset:
        seen = set(starts)
        frontier = list(starts)
        while frontier:
            config = frontier.pop()
            for ev, dst in self.succ(config):
                if ev.name in events and dst not in seen:
                    seen.add(dst)
                    frontier.append(dst)
        return frozenset(seen)


def make_structure(signature: EdSignature, configs, transitions, initials,
                   labelling) -> EdStructure:
    """Canonicalize and prune: keep exactly the configurations reachable from
    the initial ones.  Rejects empty or mixed-control initial sets."""
    configs = set(configs)
    initials = sorted(set(initials), key=_sort_key)
    if not initials:
        raise StructureError("no initial configuration")
    if len({c for c, _ in initials}) != 1:
        raise StructureError("initial configurations must share one control state")
    if not set(initials) <= configs:
        raise StructureError("initial configurations must be configurations")
    labels = dict(labelling)
    n_attrs = len(signature.attributes)
    arity = {name: len(params) for name, params in signature.events}
    triples = set()
    adj: dict = {}
    for src, ev, dst in transitions:
        if src not in configs or dst not in configs:
            raise StructureError(f"transition endpoint outside the configurations: "
                                 f"{src!r} -> {dst!r}")
        if ev.name not in arity:
            raise StructureError(f"undeclared event {ev.name!r}")
        if len(ev.args) != arity[ev.name]:
            raise StructureError(f"event {ev.name!r} expects {arity[ev.name]} arguments")
        triples.add((src, ev, dst))
        adj.setdefault(src, []).append((ev, dst))

    reached = set(initials)
    frontier = list(initials)
    while frontier:
        config = frontier.pop()
        for ev, dst in adj.get(config, ()):
            if dst not in reached:
                reached.add(dst)
                frontier.append(dst)

    kept_configs = sorted(reached, key=_sort_key)
    kept_triples = sorted(
        (t for t in triples if t[0] in reached),
        key=lambda t: (_sort_key(t[0]), t[1].key(), _sort_key(t[2])))
    kept_names = sorted({d for _, d in kept_configs}, key=repr)
    for name in kept_names:
        if name not in labels:
            raise StructureError(f"data name {name!r} has no labelling")
        if len(labels[name]) != n_attrs:
            raise StructureError(f"data state for {name!r} has the wrong arity")
        if any(v < 0 for v in labels[name]):
            raise StructureError("data values must be naturals")
    return EdStructure(
        signature=signature,
        configs=tuple(kept_configs),
        transitions=tuple(kept_triples),
        initials=tuple(initials),
        labelling=tuple((name, tuple(labels[name])) for name in kept_names),
    )


def reachable(M: EdStructure, events: Iterable[str],
              source: Optional[Config] = None) -> frozenset:
    """Configurations reachable via events named in `events`, from `source`
    or (by default) from the initial configurations.  The empty event set
    yields the starting configurations themselves."""
    if source is None:
        return M.reachable_init(events)
    return M.reachable_from(events, source)


def reduct(M: EdStructure, sigma: EdMorphism) -> EdStructure:
    """Inductive closure of the initial configurations under transitions
    whose events lie in the morphism's image, relabelled to the source
    signature; data states are reindexed attribute-wise."""
    src_sig = sigma.source
    emap = sigma.events
    amap = sigma.attrs
    target_attrs = sigma.target.attributes
    positions = [target_attrs.index(amap[a]) for a in src_sig.attributes]

    relabelled = []
    for src, ev, dst in M.transitions:
        for e, _ in src_sig.events:
            if emap[e] == ev.name:
                relabelled.append((src, InstEvent(e, ev.args), dst))

    reached = set(M.initials)
    frontier = list(M.initials)
    adj: dict = {}
    for src, ev, dst in relabelled:
        adj.setdefault(src, []).append((ev, dst))
    while frontier:
        config = frontier.pop()
        for ev, dst in adj.get(config, ()):
            if dst not in reached:
                reached.add(dst)
                frontier.append(dst)
    kept = [t for t in relabelled if t[0] in reached]

    labels = dict(M.labelling)
    new_labels = {d: tuple(labels[d][i] for i in positions)
                  for _, d in reached}
    return make_structure(src_sig, reached, kept, M.initials, new_labels)


def _valuations(params: tuple[str, ...], bound: int) -> Iterator[dict[str, int]]:
    for args in itertools.product(range(bound + 1), repeat=len(params)):
        yield dict(zip(params, args))


def is_model_of(M: EdStructure, machine: StateMachine, bound: int) -> ModelCheckReport:
    """Check the two model conditions with valuations bounded by `bound`:
    every guard-enabled transition specification has a witnessing step, and
    every step is justified by a specification or idles where no guard fires.
    Control states are matched by exact name."""
    if M.signature != signature_of(machine):
        raise SignatureMismatch("structure and machine signatures differ")
    violations: list[Violation] = []

    if M.initial_control != machine.initial_state:
        violations.append(Violation(
            "initial-control", M.initials[0], None, None,
            f"initial control state is {M.initial_control!r}, "
            f"machine starts in {machine.initial_state!r}"))
    missing = sorted(set(machine.states) - M.controls)
    for state in missing:
        violations.append(Violation(
            "control-states", None, None, None,
            f"machine control state {state!r} absent from the structure"))
    for g0 in M.initials:
        if not dl.sat_pred(machine.initial_predicate, M.data_state(g0)):
            violations.append(Violation(
                "initial-data", g0, None, None,
                "initial data state violates the initial predicate"))

    specs_by_source: dict = {}
    for t in machine.transitions:
        specs_by_source.setdefault(t.source, []).append(t)

    for gamma in M.configs:
        omega = M.data_state(gamma)
        for t in specs_by_source.get(gamma[0], ()):
            for beta in _valuations(t.params, bound):
                if not dl.sat_pred(t.guard, omega, None, beta):
                    continue
                args = tuple(beta[p] for p in t.params)
                witnesses = [dst for a2, dst in M.out(gamma, t.event)
                             if a2 == args and dst[0] == t.target
                             and dl.sat_pred(t.effect, omega, M.data_state(dst), beta)]
                if not witnesses:
                    violations.append(Violation(
                        "missing-transition", gamma, t.event, args,
                        f"guard of ({t.source}, {t.event}, {t.target}) fires "
                        f"at {gamma!r} with arguments {args} but no step matches"))

    for src, ev, dst in M.transitions:
        omega, omega2 = M.data_state(src), M.data_state(dst)
        matching = [t for t in specs_by_source.get(src[0], ())
                    if t.event == ev.name]
        beta = None
        justified = False
        for t in matching:
            beta = dict(zip(t.params, ev.args))
            if (t.target == dst[0]
                    and dl.sat_pred(t.guard, omega, None, beta)
                    and dl.sat_pred(t.effect, omega, omega2, beta)):
                justified = True
                break
        if justified:
            continue
        any_guard = any(
            dl.sat_pred(t.guard, omega, None, dict(zip(t.params, ev.args)))
            for t in matching)
        if not any_guard and src[0] == dst[0] and omega == omega2:
            continue  # idle self-loop where no guard fires
        violations.append(Violation(
            "unjustified-transition", src, ev.name, ev.args,
            f"step {src!r} --{ev.name}{ev.args}--> {dst!r} matches no "
            f"specification and is not an idle loop"))

    return ModelCheckReport(verdict=not violations, violations=tuple(violations))


def canonical_model(machine: StateMachine, bound: int) -> EdStructure:
    """Explicit structure over bounded data states with identity labelling:
    fire every guard-enabled specification under every bounded valuation and
    keep post-states whose values stay within the bound."""
    sig = signature_of(machine)
    attrs = machine.attributes
    values = range(bound + 1)
    all_states = list(itertools.product(values, repeat=len(attrs)))

    def omega_of(vals):
        return dict(zip(attrs, vals))

    initial_vals = [vals for vals in all_states
                    if dl.sat_pred(machine.initial_predicate, omega_of(vals))]
    if not initial_vals:
        raise StructureError(
            "no initial data state within the bound satisfies the initial predicate")
    initials = [(machine.initial_state, vals) for vals in initial_vals]

    specs_by_source: dict = {}
    for t in machine.transitions:
        specs_by_source.setdefault(t.source, []).append(t)

    configs = set(initials)
    triples = []
    frontier = list(initials)
    while frontier:
        src = frontier.pop()
        omega = omega_of(src[1])
        for t in specs_by_source.get(src[0], ()):
            for beta in _valuations(t.params, bound):
                if not dl.sat_pred(t.guard, omega, None, beta):
                    continue
                ev = InstEvent(t.event, tuple(beta[p] for p in t.params))
                for vals2 in all_states:
                    if dl.sat_pred(t.effect, omega, omega_of(vals2), beta):
                        dst = (t.target, vals2)
                        triples.append((src, ev, dst))
                        if dst not in configs:
                            configs.add(dst)
                            frontier.append(dst)
    labelling = {vals: vals for _, vals in configs}
    return make_structure(sig, configs, triples, initials, labelling)


def enumerate_structures(controls: int, data_values: int, signature: EdSignature,
                         cap: Optional[int] = None, *,
                         control_names: Optional[tuple[str, ...]] = None,
                         min_controls: int = 1) -> Iterator[EdStructure]:
    """Stream all well-formed structures with identity labelling, up to
    `controls` control states and data values in {0..data_values}, in a
    fixed order: control count, then initial data set (by size), then
    transition relation (by size over the sorted triple candidates).
    Structures are kept only when every listed transition touches reachable
    configurations, so each structure appears exactly once."""
    if controls <= 0:
        return
    if control_names is None:
        control_names = tuple(f"c{i + 1}" for i in range(controls))
    if len(control_names) < controls:
        raise ValueError("not enough control names")
    dstates = list(itertools.product(range(data_values + 1),
                                     repeat=len(signature.attributes)))
    inst_events = [InstEvent(name, args)
                   for name, params in signature.events
                   for args in itertools.product(range(data_values + 1),
                                                 repeat=len(params))]
    labelling = {vals: vals for vals in dstates}
    yielded = 0
    for n in range(max(1, min_controls), controls + 1):
        names = control_names[:n]
        c0 = names[0]
        configs = [(c, d) for c in names for d in dstates]
        triples = [(src, ev, dst)
                   for src in configs for ev in inst_events for dst in configs]
        if cap is None and len(triples) > 20:
            raise ValueError(
                f"{len(triples)} transition candidates: full enumeration "
                f"would exceed 2^20 structures; pass a cap")
        d0_choices = [combo
                      for size in range(1, len(dstates) + 1)
                      for combo in itertools.combinations(dstates, size)]
        for d0 in d0_choices:
            initials = [(c0, d) for d in d0]
            for size in range(len(triples) + 1):
                for combo in itertools.combinations(range(len(triples)), size):
                    chosen = [triples[i] for i in combo]
                    reached = set(initials)
                    frontier = list(initials)
                    adj: dict = {}
                    for src, ev, dst in chosen:
                        adj.setdefault(src, []).append((ev, dst))
                    while frontier:
                        config = frontier.pop()
                        for ev, dst in adj.get(config, ()):
                            if dst not in reached:
                                reached.add(dst)
                                frontier.append(dst)
                    if any(src not in reached or dst not in reached
                           for src, _, dst in chosen):
                        continue
                    if {c for c, _ in reached} != set(names):
                        continue
                    yield make_structure(signature, reached, chosen, initials,
                                         labelling)
                    yielded += 1
                    if cap is not None and yielded >= cap:
                        return


def debug_dump(M: EdStructure) -> str:
    """Deterministic text form for goldens and counterexample display."""
    lines = [f"signature: events={[f'{n}/{len(p)}' for n, p in M.signature.events]} "
             f"attributes={list(M.signature.attributes)}"]
    lines.append("configs:")
    for c in M.configs:
        lines.append(f"  {c[0]} {c[1]!r} -> {M.data_state(c)}")
    lines.append("initials:")
    for c in M.initials:
        lines.append(f"  {c[0]} {c[1]!r}")
    lines.append("transitions:")
    for src, ev, dst in M.transitions:
        args = ",".join(str(a) for a in ev.args)
        lines.append(f"  {src!r} --{ev.name}({args})--> {dst!r}")
    return "\n".join(lines) + "\n"
