"""Query resolution: interleaved stream search plus stable-model lookups.

Calls to relations whose dependency cone is free of negation are resolved the
miniKanren way, by interleaving streams over a persistent substitution. Calls
that reach negation, and every ``noto`` in a query, are answered from the
stable models of the grounded cone. A search state carries the set of models
still compatible with the literals used so far, so all model-resolved
subgoals of one answer hold in a single model.

``run`` additionally asks, per answer, whether the grounded program spanned
by the registry has a stable model agreeing with that answer. ``run_partial``
skips that check.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .config import SessionConfig
from .depgraph import Classification, build_graph, classify_graph, negation_reaching, strata
from .errors import (
    BudgetExhausted,
    FlounderingError,
    GroundingError,
    StableRelError,
    UndefinedRelationError,
)
from .grounder import GroundAtom, GroundProgram, clauses_of, ground
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
    body_constants,
    fmt_key,
    iter_calls,
)
from .stable import enumerate_stable_models, find_stable_model, show_model, split, stratified_eval
from .terms import EMPTY, Pair, fresh_var, is_ground, make_list, reify, unify, walk_all

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


# -- streams ------------------------------------------------------------------
# A stream is None (empty), a pair (value, stream), or a zero-argument callable
# returning a stream (a suspension).


def mplus(a, b):
    if a is None:
        return b
    if callable(a):
        return lambda: mplus(b, a())
    head, rest = a
    return (head, lambda: mplus(rest, b))


def bind(a, g):
    if a is None:
        return None
    if callable(a):
        return lambda: bind(a(), g)
    head, rest = a
    return mplus(g(head), lambda: bind(rest, g))


def from_list(items):
    out = None
    for item in reversed(items):
        out = (item, out)
    return out


class State(NamedTuple):
    s: object
    models: Optional[frozenset]  # ids of still-compatible stable models
    lits: tuple = ()  # (positive?, GroundAtom) literals assumed so far


@dataclass
class QueryOutcome:
    answers: list
    exhausted: bool


def instantiate(t, env):
    if isinstance(t, Name):
        return env[t.name]
    if isinstance(t, Pair):
        return Pair(instantiate(t.head, env), instantiate(t.tail, env))
    return t


class Resolver:
    """Goal evaluation against a program and, optionally, a set of stable models."""

    def __init__(self, program: Program, config: SessionConfig = None, pi=None, models=(), model_preds=()):
        self.program = program
        self.config = config or SessionConfig()
        self.pi = pi
        self.models = list(models)
        self.model_preds = frozenset(model_preds)
        self.steps = 0
        self._by_pred = {}
        self._atom_models = {}
        if pi is not None:
            for mid, m in enumerate(self.models):
                for i in m:
                    self._atom_models.setdefault(pi.atoms[i], set()).add(mid)
            ordered = sorted(
                self._atom_models.items(),
                key=lambda kv: (min(kv[1]), pi.index[kv[0]]),
            )
            for atom, mids in ordered:
                self._by_pred.setdefault(atom.key, []).append((atom, frozenset(mids)))

    def initial_state(self):
        models = frozenset(range(len(self.models))) if self.pi is not None else None
        return State(EMPTY, models)

    def conj(self, goals, env, st):
        if not goals:
            return (st, None)
        stream = self.goal(goals[0], env, st)
        for g in goals[1:]:
            stream = bind(stream, lambda st2, g=g: self.goal(g, env, st2))
        return stream

    def goal(self, g, env, st):
        if isinstance(g, Unify):
            s = unify(instantiate(g.left, env), instantiate(g.right, env), st.s, self.config.occurs_check)
            return None if s is None else (st._replace(s=s), None)
        if isinstance(g, Succeed):
            return (st, None)
        if isinstance(g, Fail):
            return None
        if isinstance(g, Fresh):
            inner = dict(env)
            for v in g.vars:
                inner[v] = fresh_var()
            return self.conj(g.body, inner, st)
        if isinstance(g, Conde):
            branches = g.branches

            def suspended():
                out = None
                for b in reversed(branches):
                    out = mplus(self.conj(b, env, st), out)
                return out

            return suspended
        if isinstance(g, Call):
            args = [instantiate(a, env) for a in g.args]
            if g.key in self.model_preds:
                return self._model_call(g.key, args, st)
            rel = self.program.lookup(g.key)
            if rel is None:
                raise UndefinedRelationError(*g.key)
            callee_env = dict(zip(rel.params, args))
            return lambda: self.conj(rel.body, callee_env, st)
        if isinstance(g, Noto):
            args = [instantiate(a, env) for a in g.inner.args]
            return self._model_noto(g.inner.key, args, st)
        raise TypeError(f"not a goal: {g!r}")

    def _model_call(self, key, args, st):
        out = []
        for atom, mids in self._by_pred.get(key, ()):
            common = st.models & mids
            if not common:
                continue
            s = st.s
            for a, v in zip(args, atom.args):
                s = unify(a, v, s)
                if s is None:
                    break
            if s is not None:
                out.append(State(s, common, st.lits + ((True, atom),)))
        return from_list(out)

    def _model_noto(self, key, args, st):
        if self.pi is None:
            raise StableRelError(f"noto over {fmt_key(key)} outside a grounded query")
        values = tuple(walk_all(a, st.s) for a in args)
        if not all(is_ground(v) for v in values):
            raise FlounderingError(f"noto over {fmt_key(key)} reached with unbound arguments")
        atom = GroundAtom(key[0], values)
        common = st.models - self._atom_models.get(atom, frozenset())
        if not common:
            return None
        return (State(st.s, frozenset(common), st.lits + ((False, atom),)), None)

    def states(self, stream):
        """Force ``stream`` lazily, counting suspensions against the step budget."""
        budget = self.config.steps
        while stream is not None:
            if callable(stream):
                self.steps += 1
                if budget is not None and self.steps > budget:
                    raise BudgetExhausted(budget)
                stream = stream()
            else:
                head, stream = stream
                yield head


def solve_definite(program: Program, goal, s=EMPTY, env=None, config=None):
    """Substitutions satisfying a negation-free ``goal``, produced lazily."""
    r = Resolver(program, config)
    st = State(s, None)
    for out in r.states(r.goal(goal, env or {}, st)):
        yield out.s


# -- query preparation ----------------------------------------------------------


@dataclass
class PreparedQuery:
    program: Program
    config: SessionConfig
    qvars: tuple
    goals: tuple
    env: dict
    constants: list
    model_roots: set = field(default_factory=set)
    pi: Optional[GroundProgram] = None
    models: list = field(default_factory=list)
    graph: object = None

    @property
    def normal(self):
        return bool(self.model_roots)

    def query_term(self):
        if len(self.qvars) == 1:
            return self.env[self.qvars[0]]
        return make_list(self.env[q] for q in self.qvars)


def prepare(program: Program, qvars, goals, config: SessionConfig = None) -> PreparedQuery:
    """Ground and solve the negation-bearing part of a query's cone."""
    config = config or SessionConfig()
    goals = tuple(goals)
    calls = list(iter_calls(goals))
    for call, _ in calls:
        if program.lookup(call.key) is None:
            raise UndefinedRelationError(*call.key)
    roots = {c.key for c, _ in calls}
    graph = build_graph(program, roots)
    reaching = negation_reaching(graph)
    model_roots = set()
    for call, negated in calls:
        if negated or call.key in reaching:
            if program.is_builtin(call.key):
                raise GroundingError(*call.key, reason="builtin relations cannot be negated")
            model_roots.add(call.key)
    q = PreparedQuery(
        program,
        config,
        tuple(qvars),
        goals,
        {v: fresh_var() for v in qvars},
        list(body_constants(goals)),
        model_roots,
        graph=graph,
    )
    if model_roots:
        nodes = set(build_graph(program, model_roots).nodes)
        q.pi = ground(program, nodes, q.constants)
        q.models = solve_models(q.pi, graph.subgraph(nodes), config)
    return q


def solve_models(pi, graph, config):
    if config.oracle:
        return enumerate_stable_models(pi, config.cap, oracle=True)
    layering = strata(graph)
    if layering is not None:
        return [stratified_eval(pi, layering)]
    return enumerate_stable_models(pi, config.cap)


def candidates(q: PreparedQuery):
    """Search states answering the query, before any global check."""
    if q.normal and not q.models:
        return
    r = Resolver(q.program, q.config, q.pi, q.models, q.model_roots if q.normal else ())
    yield from r.states(r.conj(q.goals, q.env, r.initial_state()))


# -- the global contradiction check ---------------------------------------------


class GlobalCheck:
    """Stable-model existence over the registry's cone, per answer.

    Built once per ``run`` call; each answer's assumed literals become
    constraints on a fresh model search.
    """

    def __init__(self, q: PreparedQuery):
        program, config = q.program, q.config
        roots = set(program.registry) | q.model_roots
        nodes = set(build_graph(program, roots).nodes)
        if program.legacy_coarse:
            nodes = self._drop_definite_lists(program, nodes, config)
        self.pi = ground(program, nodes, q.constants)
        self.cap = config.cap
        self.oracle = config.oracle
        self._memo = {}
        self._models = None
        self._split = None

    @staticmethod
    def _drop_definite_lists(program, nodes, config):
        # Checking a registered list relation means exhausting its answers,
        # which is what made coarse registration loop forever.
        reaching = negation_reaching(build_graph(program, nodes)) & nodes
        needed = set(build_graph(program, reaching).nodes) if reaching else set()
        keep = set(nodes)
        for key in sorted(nodes, key=list(program.relations).index):
            try:
                clauses_of(program, key)
            except GroundingError:
                if key in needed:
                    raise
                if config.steps is None:
                    raise StableRelError(
                        f"contradiction check cannot terminate on non-Datalog relation "
                        f"{fmt_key(key)} (legacy coarse registration)"
                    ) from None
                rel = program.relations[key]
                goal = Call(key[0], tuple(Name(p) for p in rel.params))
                env = {p: fresh_var() for p in rel.params}
                for _ in solve_definite(program, goal, env=env, config=config):
                    pass
                keep.discard(key)
        return keep

    def satisfiable(self) -> bool:
        return self._check(frozenset(), frozenset())

    def admits(self, st: State) -> bool:
        must, must_not = [], []
        for positive, atom in st.lits:
            i = self.pi.index.get(atom)
            if positive:
                if i is None:
                    return False
                must.append(i)
            elif i is not None:
                must_not.append(i)
        return self._check(frozenset(must), frozenset(must_not))

    def _check(self, must, must_not):
        key = (must, must_not)
        if key not in self._memo:
            self._memo[key] = self._satisfiable(must, must_not)
        return self._memo[key]

    def _satisfiable(self, must, must_not):
        if self.oracle:
            if self._models is None:
                self._models = enumerate_stable_models(self.pi, self.cap, oracle=True)
            return any(must <= m and not (must_not & m) for m in self._models)
        if self._split is None:
            self._split = split(self.pi)
        return find_stable_model(self.pi, must, must_not, self.cap, self._split) is not None


def needs_check(q: PreparedQuery) -> bool:
    program = q.program
    if not program.registry:
        return False
    if q.config.auto:
        roots = set(program.registry) | {c.key for c, _ in iter_calls(q.goals)}
        cls = classify_graph(build_graph(program, roots))
        if cls in (Classification.DEFINITE, Classification.STRATIFIED):
            return False
    return True


def collect(q: PreparedQuery, n, check: Optional[GlobalCheck]):
    if n is not None and n <= 0:
        return QueryOutcome([], False)
    if check is not None and not check.satisfiable():
        # the registered rules have no stable model at all
        return QueryOutcome([], True)
    term = q.query_term()
    answers, seen = [], set()
    for st in candidates(q):
        if check is not None and not check.admits(st):
            continue
        ans = reify(term, st.s)
        if q.normal:
            if ans in seen:
                continue
            seen.add(ans)
        answers.append(ans)
        if n is not None and len(answers) >= n:
            return QueryOutcome(answers, False)
    return QueryOutcome(answers, True)


def run(n, qvars, goals, program: Program, config: SessionConfig = None) -> QueryOutcome:
    """Answers that also agree with some stable model of the registered rules."""
    q = prepare(program, qvars, goals, config)
    check = GlobalCheck(q) if needs_check(q) else None
    return collect(q, n, check)


def run_partial(n, qvars, goals, program: Program, config: SessionConfig = None) -> QueryOutcome:
    """Answers from the query's own cone only; registered rules elsewhere are ignored."""
    q = prepare(program, qvars, goals, config)
    return collect(q, n, None)


def model_lines(q: PreparedQuery):
    if q.pi is None:
        return []
    return [show_model(q.pi, m) for m in q.models]
