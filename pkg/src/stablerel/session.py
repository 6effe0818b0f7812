"""Turning parsed forms into definitions and queries, and running them."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

from . import engine
from .config import SessionConfig
from .depgraph import build_graph, classify_graph, is_cyclic, sccs, strata, to_dot
from .errors import DefinitionError, StableRelError
from .grounder import ground
from .program import (
    Call,
    Conde,
    Fail,
    Fresh,
    Name,
    Noto,
    Program,
    Succeed,
    Unify,
    define_relation,
    fmt_key,
    iter_calls,
    relation,
)
from .sexpr import DOT, QUASIQUOTE, QUOTE, UNQUOTE, Symbol, parse, to_text
from .terms import NIL, Num, Pair, Sym, show

log = logging.getLogger(__name__)

DEFINE_HEADS = {"defineo", "define"}
RUN_HEADS = {"run", "run*", "run-partial", "run-partial*"}


# -- forms -> AST ---------------------------------------------------------------


def _datum(x):
    if isinstance(x, bool):
        raise DefinitionError(f"booleans are not terms: {to_text(x)}")
    if isinstance(x, int):
        return Num(x)
    if isinstance(x, Symbol):
        return Sym(str(x))
    return _list_of(x, _datum)


def _list_of(items, convert):
    tail = NIL
    if DOT in items:
        tail = convert(items[-1])
        items = items[:-2]
    out = tail
    for item in reversed(items):
        out = Pair(convert(item), out)
    return out


def _quasi(x, scope):
    if isinstance(x, list) and len(x) == 2 and x[0] == UNQUOTE:
        return to_template(x[1], scope)
    if isinstance(x, list):
        return _list_of(x, lambda y: _quasi(y, scope))
    return _datum(x)


def to_template(x, scope):
    """Convert a form in argument position to a term template."""
    if isinstance(x, bool):
        raise DefinitionError(f"booleans are not terms: {to_text(x)}")
    if isinstance(x, int):
        return Num(x)
    if isinstance(x, Symbol):
        if x not in scope:
            raise DefinitionError(f"unbound variable {x}")
        return Name(str(x))
    if isinstance(x, list) and len(x) == 2 and x[0] == QUOTE:
        return _datum(x[1])
    if isinstance(x, list) and len(x) == 2 and x[0] == QUASIQUOTE:
        return _quasi(x[1], scope)
    raise DefinitionError(f"not a term: {to_text(x)}")


def _symbols(form, what):
    if not isinstance(form, list) or not all(isinstance(v, Symbol) for v in form):
        raise DefinitionError(f"{what} must be a list of names, got {to_text(form)}")
    return tuple(str(v) for v in form)


def to_goal(x, scope):
    if isinstance(x, Symbol):
        if x in ("succeed", "#s"):
            return Succeed()
        if x in ("fail", "#u"):
            return Fail()
        raise DefinitionError(f"not a goal: {x}")
    if not isinstance(x, list) or not x or not isinstance(x[0], Symbol):
        raise DefinitionError(f"not a goal: {to_text(x)}")
    head, args = x[0], x[1:]
    if head == "==":
        if len(args) != 2:
            raise DefinitionError("== takes two arguments")
        return Unify(to_template(args[0], scope), to_template(args[1], scope))
    if head in ("succeed", "fail") and not args:
        return Succeed() if head == "succeed" else Fail()
    if head == "fresh":
        if not args:
            raise DefinitionError("fresh needs a variable list")
        names = _symbols(args[0], "fresh variables")
        inner = scope | set(names)
        return Fresh(names, tuple(to_goal(g, inner) for g in args[1:]))
    if head == "conde":
        branches = []
        for b in args:
            if not isinstance(b, list) or not b:
                raise DefinitionError(f"conde branch must be a non-empty list: {to_text(b)}")
            branches.append(tuple(to_goal(g, scope) for g in b))
        return Conde(tuple(branches))
    if head == "noto":
        if len(args) != 1:
            raise DefinitionError("noto takes exactly one goal")
        inner = to_goal(args[0], scope)
        if not isinstance(inner, Call):
            raise DefinitionError(f"noto must wrap a relation call: {to_text(args[0])}")
        return Noto(inner)
    if head in DEFINE_HEADS or head in RUN_HEADS or head in ("quote", "quasiquote"):
        raise DefinitionError(f"{head} is not allowed in goal position")
    return Call(str(head), tuple(to_template(a, scope) for a in args))


def to_relation(form):
    if len(form) < 2 or not isinstance(form[1], list) or not form[1]:
        raise DefinitionError(f"malformed definition: {to_text(form)}")
    sig = _symbols(form[1], "definition head")
    name, params = sig[0], sig[1:]
    scope = set(params)
    return relation(name, params, [to_goal(g, scope) for g in form[2:]])


@dataclass
class RunForm:
    partial: bool
    n: Optional[int]
    qvars: tuple
    goals: tuple


def to_run(form) -> RunForm:
    head = str(form[0])
    partial = head.startswith("run-partial")
    rest = form[1:]
    if head.endswith("*"):
        n = None
    else:
        if not rest:
            raise DefinitionError(f"{head} needs an answer count")
        count, rest = rest[0], rest[1:]
        if count is False or count == "*":
            n = None
        elif isinstance(count, int) and not isinstance(count, bool) and count >= 0:
            n = count
        else:
            raise DefinitionError(f"bad answer count {to_text(count)}")
    if not rest:
        raise DefinitionError(f"{head} needs query variables")
    qvars = _symbols(rest[0], "query variables")
    if not qvars:
        raise DefinitionError(f"{head} needs at least one query variable")
    goals = tuple(to_goal(g, set(qvars)) for g in rest[1:])
    return RunForm(partial, n, qvars, goals)


def format_answers(answers) -> str:
    return "(" + " ".join(show(a) for a in answers) + ")"


# -- session --------------------------------------------------------------------


@dataclass
class Session:
    """A program plus configuration; executes forms and returns output lines."""

    config: SessionConfig = field(default_factory=SessionConfig)
    allow_redefine: bool = False
    program: Program = None
    model_log: list = field(default_factory=list)

    def __post_init__(self):
        if self.program is None:
            self.program = Program(legacy_coarse=self.config.legacy_coarse)

    def define(self, rel):
        redefining = rel.key in self.program
        if redefining and self.allow_redefine:
            log.warning("redefining %s", fmt_key(rel.key))
        self.program = define_relation(self.program, rel, redefine=self.allow_redefine)

    def load(self, text: str) -> list[str]:
        return self.execute(parse(text))

    def execute(self, forms) -> list[str]:
        out = []
        for form in forms:
            line = self.execute_form(form)
            if line is not None:
                out.append(line)
        return out

    def execute_form(self, form) -> Optional[str]:
        if not isinstance(form, list) or not form or not isinstance(form[0], Symbol):
            raise DefinitionError(f"unknown top-level form: {to_text(form)}")
        head = str(form[0])
        if head in DEFINE_HEADS:
            self.define(to_relation(form))
            return None
        if head in RUN_HEADS:
            outcome = self.query(to_run(form))
            return format_answers(outcome.answers)
        raise DefinitionError(f"unknown top-level form: ({head} ...)")

    def query(self, rf: RunForm, partial: Optional[bool] = None) -> engine.QueryOutcome:
        if partial is None:
            partial = rf.partial
            if self.config.mode is not None:
                partial = self.config.mode == "run-partial"
        q = engine.prepare(self.program, rf.qvars, rf.goals, self.config)
        if self.config.show_models:
            self.model_log.extend(engine.model_lines(q))
        check = None
        if not partial and engine.needs_check(q):
            check = engine.GlobalCheck(q)
        return engine.collect(q, rf.n, check)


# -- reports --------------------------------------------------------------------


def report(program: Program, kind: str) -> str:
    if kind == "graph-dot":
        return to_dot(build_graph(program))
    if kind == "ground-dump":
        return ground(program, set(build_graph(program, program.registry).nodes)).dump()
    if kind != "classify":
        raise ValueError(f"unknown report {kind!r}")
    g = build_graph(program)
    registry = " ".join(fmt_key(k) for k in program.registry) or "(empty)"
    lines = [f"program: {classify_graph(g)}; registry: {registry}"]
    for key, rel in program.relations.items():
        lines.append(f"  {fmt_key(key)}: {'negated' if rel.negated else 'definite'}")
    layering = strata(g)
    for comp in reversed(sccs(g)):
        members = " ".join(fmt_key(k) for k in g.nodes if k in comp)
        if not is_cyclic(g, comp):
            verdict = "acyclic"
        elif any(s in comp and d in comp for s, d in g.negative_edges()):
            verdict = "cyclic, negation inside loop"
        else:
            verdict = "cyclic, no negation"
        lines.append(f"  scc {{{members}}}: {verdict}")
    if layering is not None:
        for key in g.nodes:
            lines.append(f"  stratum {fmt_key(key)}: {layering[key]}")
    return "\n".join(lines) + "\n"


# -- benchmark ------------------------------------------------------------------


@dataclass
class BenchReport:
    query: str
    counts: dict
    timings: dict  # mode -> list of seconds
    answer_sets_equal: bool
    stratified: bool

    @property
    def speedup(self):
        if not self.timings.get("run") or not self.timings.get("run-partial"):
            return None
        return min(self.timings["run"]) / max(min(self.timings["run-partial"]), 1e-9)

    @property
    def semantic_failure(self):
        return self.stratified and not self.answer_sets_equal

    def format(self) -> str:
        lines = [f"query: {self.query}"]
        for mode in ("run", "run-partial"):
            lines.append(f"{mode:<12} answers={self.counts[mode]}")
        if self.timings:
            for mode in ("run", "run-partial"):
                ts = self.timings[mode]
                lines.append(
                    f"{mode:<12} best={min(ts):.6f}s mean={sum(ts) / len(ts):.6f}s reps={len(ts)}"
                )
            lines.append(f"speedup run/run-partial: {self.speedup:.1f}x")
        if self.semantic_failure:
            lines.append("SEMANTIC FAILURE: run and run-partial disagree on a stratified program")
        return "\n".join(lines) + "\n"


def bench(session: Session, query_form, repetitions: int = 1) -> BenchReport:
    """Time a run form under both interfaces on the session's program."""
    rf = to_run(query_form)
    results, timings = {}, {}
    for mode, partial in (("run", False), ("run-partial", True)):
        results[mode] = session.query(rf, partial=partial).answers
        if repetitions > 0:
            ts = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                session.query(rf, partial=partial)
                ts.append(time.perf_counter() - t0)
            timings[mode] = ts
    roots = set(session.program.registry) | {c.key for c, _ in iter_calls(rf.goals)}
    cls = classify_graph(build_graph(session.program, roots))
    return BenchReport(
        to_text(query_form),
        {m: len(a) for m, a in results.items()},
        timings,
        set(results["run"]) == set(results["run-partial"]),
        str(cls) != "Normal",
    )

