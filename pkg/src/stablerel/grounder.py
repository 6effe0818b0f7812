"""Grounding of Datalog-like relations into a propositional program.

Each relation body is flattened into clauses (one per conde path), equalities
are solved per clause, and clause variables are instantiated against the atoms
derivable when negative literals are ignored. Variables not bound by a positive
literal range over the Herbrand constants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .errors import GroundingError, UndefinedRelationError
from .program import (
    BUILTINS,
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
    template_is_ground,
)
from .terms import Pair, show


@dataclass(frozen=True, slots=True)
class GroundAtom:
    name: str
    args: tuple = ()

    @property
    def key(self):
        return (self.name, len(self.args))

    def __hash__(self):
        return hash((self.name, self.args))

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(show(a) for a in self.args)})"

    __repr__ = __str__


@dataclass(frozen=True)
class GroundRule:
    head: GroundAtom
    pos_body: tuple = ()
    neg_body: tuple = ()
    source: tuple = None  # (relation key, clause index)

    def __str__(self):
        body = [str(a) for a in self.pos_body] + [f"not {a}" for a in self.neg_body]
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(body)}."


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple = ()
    atoms: tuple = ()

    @classmethod
    def from_rules(cls, rules, extra_atoms=()):
        seen = {}
        for r in rules:
            for a in (r.head, *r.pos_body, *r.neg_body):
                seen.setdefault(a, None)
        for a in extra_atoms:
            seen.setdefault(a, None)
        return cls(tuple(rules), tuple(seen))

    @cached_property
    def index(self):
        return {a: i for i, a in enumerate(self.atoms)}

    @cached_property
    def compiled(self):
        """Rules as ``(head, pos, neg)`` tuples of atom indices."""
        ix = self.index
        return tuple(
            (ix[r.head], tuple(ix[a] for a in r.pos_body), tuple(ix[a] for a in r.neg_body))
            for r in self.rules
        )

    def dump(self) -> str:
        return "".join(f"{r}\n" for r in self.rules)

    def __len__(self):
        return len(self.atoms)


# -- clause normalisation -----------------------------------------------------


@dataclass
class Clause:
    key: tuple
    index: int
    head: tuple
    pos: list = field(default_factory=list)
    neg: list = field(default_factory=list)


def _subst(t, env):
    if isinstance(t, Name):
        return env.get(t.name, t)
    if isinstance(t, Pair):
        return Pair(_subst(t.head, env), _subst(t.tail, env))
    return t


def _expand(body, env, counter, key):
    """DNF of a goal list: list of literal lists, literals as tagged tuples."""
    paths = [[]]
    for g in body:
        if isinstance(g, Succeed):
            continue
        if isinstance(g, Fail):
            return []
        if isinstance(g, Unify):
            alts = [[("eq", _subst(g.left, env), _subst(g.right, env))]]
        elif isinstance(g, Fresh):
            inner = dict(env)
            for v in g.vars:
                inner[v] = Name(f"{v}#{next(counter)}")
            alts = _expand(g.body, inner, counter, key)
        elif isinstance(g, Conde):
            alts = []
            for b in g.branches:
                alts.extend(_expand(b, env, counter, key))
        elif isinstance(g, Noto):
            args = tuple(_subst(a, env) for a in g.inner.args)
            if g.inner.key in BUILTINS:
                raise GroundingError(*key, reason=f"noto over builtin {g.inner.relation}")
            alts = [[("neg", g.inner.key, args)]]
        elif isinstance(g, Call):
            args = tuple(_subst(a, env) for a in g.args)
            alts = [[("pos", g.key, args)]]
        else:  # pragma: no cover
            raise TypeError(g)
        paths = [p + a for p in paths for a in alts]
        if not paths:
            return []
    return paths


def _inline_builtins(lits, program, counter, key):
    out = []
    for lit in lits:
        if lit[0] == "pos" and program.is_builtin(lit[1]):
            rel = BUILTINS[lit[1]]
            env = dict(zip(rel.params, lit[2]))
            (path,) = _expand(rel.body, env, counter, key)
            out.extend(path)
        else:
            out.append(lit)
    return out


def _check_arg(t, key):
    if isinstance(t, Name) or template_is_ground(t):
        return
    raise GroundingError(*key, reason=f"compound term {show(t)} built from variables")


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        a_const = not isinstance(ra, Name)
        b_const = not isinstance(rb, Name)
        if a_const and b_const:
            return False
        if a_const:
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True


def clauses_of(program: Program, key) -> list[Clause]:
    """Flatten a relation into clauses with equalities solved away.

    Clauses whose equalities cannot hold are dropped. Raises GroundingError if
    the relation builds compound terms from variables.
    """
    rel = program.relations[key]
    counter = itertools.count()
    head = tuple(Name(p) for p in rel.params)
    out = []
    for idx, path in enumerate(_expand(rel.body, {}, counter, key)):
        path = _inline_builtins(path, program, counter, key)
        uf = _UnionFind()
        ok = True
        pos, neg = [], []
        for lit in path:
            if lit[0] == "eq":
                _check_arg(lit[1], key)
                _check_arg(lit[2], key)
                if not uf.union(lit[1], lit[2]):
                    ok = False
                    break
            else:
                for a in lit[2]:
                    _check_arg(a, key)
                if program.lookup(lit[1]) is None:
                    raise UndefinedRelationError(*lit[1], caller=key)
                (pos if lit[0] == "pos" else neg).append((lit[1], lit[2]))
        if not ok:
            continue

        def res(t):
            return uf.find(t) if isinstance(t, Name) else t

        out.append(
            Clause(
                key,
                idx,
                tuple(res(t) for t in head),
                [(k, tuple(res(a) for a in args)) for k, args in pos],
                [(k, tuple(res(a) for a in args)) for k, args in neg],
            )
        )
    return out


# -- instantiation ------------------------------------------------------------


def herbrand_constants(program: Program, cone, extra=()) -> list:
    """Constants appearing in the cone's bodies plus ``extra``, first-seen order."""
    seen = {}
    for key in program.relations:
        if key in cone:
            for c in body_constants(program.relations[key].body):
                seen.setdefault(c, None)
    for c in extra:
        seen.setdefault(c, None)
    return list(seen)


def _clause_vars(cl: Clause):
    seen = {}
    for t in cl.head:
        if isinstance(t, Name):
            seen.setdefault(t, None)
    for _, args in cl.pos + cl.neg:
        for t in args:
            if isinstance(t, Name):
                seen.setdefault(t, None)
    return list(seen)


def _match(args, values, binding):
    new = None
    for t, v in zip(args, values):
        if isinstance(t, Name):
            cur = binding.get(t) if new is None else new.get(t)
            if cur is None:
                if new is None:
                    new = dict(binding)
                new[t] = v
            elif cur != v:
                return None
        elif t != v:
            return None
    return binding if new is None else new


class _Facts:
    """Ground argument tuples per predicate, indexed by (position, value)."""

    def __init__(self):
        self.rows = {}
        self.by_arg = {}
        self.seen = set()

    def add(self, key, args) -> bool:
        if (key, args) in self.seen:
            return False
        self.seen.add((key, args))
        self.rows.setdefault(key, []).append(args)
        for i, v in enumerate(args):
            self.by_arg.setdefault((key, i, v), []).append(args)
        return True

    def candidates(self, key, args, binding):
        for i, t in enumerate(args):
            v = binding.get(t) if isinstance(t, Name) else t
            if v is not None:
                return self.by_arg.get((key, i, v), ())
        return self.rows.get(key, ())


def _joins(pos, stores, binding=None):
    """All bindings satisfying ``pos[i]`` against ``stores[i]``."""
    binding = {} if binding is None else binding
    if not pos:
        yield binding
        return
    key, args = pos[0]
    for values in stores[0].candidates(key, args, binding):
        b = _match(args, values, binding)
        if b is not None:
            yield from _joins(pos[1:], stores[1:], b)


def _complete(cl, variables, base, constants):
    free = [v for v in variables if v not in base]
    if not free:
        yield base
        return
    for combo in itertools.product(constants, repeat=len(free)):
        b = dict(base)
        b.update(zip(free, combo))
        yield b


def _assignments(cl, constants, facts, full):
    variables = _clause_vars(cl)
    bases = [{}] if full else _joins(cl.pos, [facts] * len(cl.pos))
    for base in bases:
        yield from _complete(cl, variables, base, constants)


def _inst(args, b):
    return tuple(b[t] if isinstance(t, Name) else t for t in args)


def _derivable(clauses, constants) -> _Facts:
    """Least model of the clauses with negative literals ignored (semi-naive)."""
    facts = _Facts()
    delta = _Facts()
    for cl in clauses:
        if not cl.pos:
            for b in _complete(cl, _clause_vars(cl), {}, constants):
                args = _inst(cl.head, b)
                if facts.add(cl.key, args):
                    delta.add(cl.key, args)
    while delta.rows:
        fresh = _Facts()
        for cl in clauses:
            n = len(cl.pos)
            variables = _clause_vars(cl)
            for i in range(n):
                if cl.pos[i][0] not in delta.rows:
                    continue
                stores = [facts] * n
                stores[i] = delta
                for base in _joins(cl.pos, stores):
                    for b in _complete(cl, variables, base, constants):
                        args = _inst(cl.head, b)
                        if (cl.key, args) not in facts.seen:
                            fresh.add(cl.key, args)
        for key, rows in fresh.rows.items():
            for args in rows:
                facts.add(key, args)
        delta = fresh
    return facts


def ground(program: Program, cone, extra_constants=(), full=False) -> GroundProgram:
    """Propositional image of the relations in ``cone``.

    With ``full=False`` positive body literals are matched only against atoms
    derivable from the negation-free relaxation, which keeps the image small
    without changing its stable models. ``full=True`` instantiates every
    variable over the whole Herbrand universe.
    """
    keys = [k for k in program.relations if k in cone]
    clauses = []
    for k in keys:
        clauses.extend(clauses_of(program, k))
    constants = herbrand_constants(program, cone, extra_constants)
    facts = None if full else _derivable(clauses, constants)

    rules, seen = [], set()
    for cl in clauses:
        for b in _assignments(cl, constants, facts, full):
            rule = GroundRule(
                GroundAtom(cl.key[0], _inst(cl.head, b)),
                tuple(GroundAtom(k[0], _inst(a, b)) for k, a in cl.pos),
                tuple(GroundAtom(k[0], _inst(a, b)) for k, a in cl.neg),
                (cl.key, cl.index),
            )
            sig = (rule.head, rule.pos_body, rule.neg_body)
            if sig not in seen:
                seen.add(sig)
                rules.append(rule)
    return GroundProgram.from_rules(rules)


def groundable(program: Program, key) -> bool:
    try:
        clauses_of(program, key)
    except GroundingError:
        return False
    return True
