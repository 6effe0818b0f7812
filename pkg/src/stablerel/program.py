"""Goal AST, relation definitions and the negation-bearing rule registry."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union

from .errors import DefinitionError
from .terms import NIL, Pair, Term


@dataclass(frozen=True, slots=True)
class Name:
    """A logic variable referenced by name inside a relation body or query."""

    name: str

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


# A template is a Term whose leaves may also be Names.
Template = Union[Term, Name]


@dataclass(frozen=True)
class Unify:
    left: Template
    right: Template


@dataclass(frozen=True)
class Succeed:
    pass


@dataclass(frozen=True)
class Fail:
    pass


@dataclass(frozen=True)
class Fresh:
    vars: tuple[str, ...]
    body: tuple["Goal", ...]


@dataclass(frozen=True)
class Conde:
    branches: tuple[tuple["Goal", ...], ...]

    def __post_init__(self):
        if not self.branches or any(not b for b in self.branches):
            raise DefinitionError("conde needs at least one non-empty branch")


@dataclass(frozen=True)
class Call:
    relation: str
    args: tuple[Template, ...]

    @property
    def key(self):
        return (self.relation, len(self.args))


@dataclass(frozen=True)
class Noto:
    inner: Call

    def __post_init__(self):
        if not isinstance(self.inner, Call):
            raise DefinitionError("noto must wrap a single relation call")


Goal = Union[Unify, Succeed, Fail, Fresh, Conde, Call, Noto]
RelKey = tuple[str, int]


def has_negation(body) -> bool:
    """True iff a ``noto`` occurs in ``body`` under conjunction, conde or fresh.

    Calls are not followed into the callee's body.
    """
    for g in body:
        if isinstance(g, Noto):
            return True
        if isinstance(g, Conde) and any(has_negation(b) for b in g.branches):
            return True
        if isinstance(g, Fresh) and has_negation(g.body):
            return True
    return False


def iter_calls(body, negated=False) -> Iterator[tuple[Call, bool]]:
    """Yield every call in ``body`` with a flag telling whether it sits under noto."""
    for g in body:
        if isinstance(g, Call):
            yield g, negated
        elif isinstance(g, Noto):
            yield g.inner, True
        elif isinstance(g, Conde):
            for b in g.branches:
                yield from iter_calls(b, negated)
        elif isinstance(g, Fresh):
            yield from iter_calls(g.body, negated)


def template_constants(t) -> Iterator[Term]:
    """Constants occurring in a template. Ground Pairs count as one constant."""
    if isinstance(t, Name):
        return
    if isinstance(t, Pair):
        if template_is_ground(t):
            yield t
        else:
            yield from template_constants(t.head)
            yield from template_constants(t.tail)
        return
    if t is NIL:
        return
    yield t


def template_is_ground(t) -> bool:
    if isinstance(t, Name):
        return False
    if isinstance(t, Pair):
        return template_is_ground(t.head) and template_is_ground(t.tail)
    return True


def body_constants(body) -> Iterator[Term]:
    for g in body:
        if isinstance(g, Unify):
            yield from template_constants(g.left)
            yield from template_constants(g.right)
        elif isinstance(g, Call):
            for a in g.args:
                yield from template_constants(a)
        elif isinstance(g, Noto):
            for a in g.inner.args:
                yield from template_constants(a)
        elif isinstance(g, Conde):
            for b in g.branches:
                yield from body_constants(b)
        elif isinstance(g, Fresh):
            yield from body_constants(g.body)


@dataclass(frozen=True)
class RelationDef:
    name: str
    params: tuple[str, ...]
    body: tuple[Goal, ...]
    negated: bool = False

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise DefinitionError(f"duplicate parameter in {self.name}")

    @property
    def arity(self):
        return len(self.params)

    @property
    def key(self) -> RelKey:
        return (self.name, len(self.params))


def relation(name, params, body) -> RelationDef:
    """Build a RelationDef with ``negated`` computed from its body."""
    body = tuple(body)
    return RelationDef(name, tuple(params), body, has_negation(body))


def _builtins():
    l, h, t = Name("l"), Name("h"), Name("t")
    return {
        ("nullo", 1): relation("nullo", ["l"], [Unify(l, NIL)]),
        ("conso", 3): relation("conso", ["h", "t", "l"], [Unify(Pair(h, t), l)]),
    }


BUILTINS: dict[RelKey, RelationDef] = _builtins()


def builtin_relations() -> list[RelationDef]:
    return list(BUILTINS.values())


def fmt_key(key: RelKey) -> str:
    return f"{key[0]}/{key[1]}"


@dataclass(frozen=True)
class Program:
    """Defined relations plus the registry of rules needing contradiction checks.

    ``relations`` preserves definition order; ``registry`` is ordered the same
    way. In ``legacy_coarse`` mode every definition is registered.
    """

    relations: dict = field(default_factory=dict)
    registry: tuple = ()
    legacy_coarse: bool = False

    def lookup(self, key: RelKey) -> Optional[RelationDef]:
        rel = self.relations.get(key)
        if rel is None:
            rel = BUILTINS.get(key)
        return rel

    def is_builtin(self, key: RelKey) -> bool:
        return key not in self.relations and key in BUILTINS

    def __contains__(self, key):
        return key in self.relations


def define_relation(p: Program, rel: RelationDef, redefine: bool = False) -> Program:
    """Return a new Program with ``rel`` stored and the registry updated."""
    if rel.key in p.relations and not redefine:
        raise DefinitionError(f"relation {fmt_key(rel.key)} is already defined")
    if rel.negated != has_negation(rel.body):
        rel = replace(rel, negated=has_negation(rel.body))
    relations = dict(p.relations)
    relations[rel.key] = rel
    registered = p.legacy_coarse or rel.negated
    registry = [k for k in p.registry if k != rel.key]
    if registered:
        registry.append(rel.key)
    order = {k: i for i, k in enumerate(relations)}
    registry.sort(key=order.__getitem__)
    return Program(relations, tuple(registry), p.legacy_coarse)
