"""Logic terms, triangular substitutions, unification and reification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

_var_ids = itertools.count()


@dataclass(frozen=True, slots=True)
class Var:
    id: int

    def __repr__(self):
        return f"_v{self.id}"


@dataclass(frozen=True, slots=True)
class Sym:
    name: str

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Num:
    value: int

    def __repr__(self):
        return str(self.value)


class _EmptyList:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "()"

    def __reduce__(self):
        return (_EmptyList, ())


NIL = _EmptyList()


@dataclass(frozen=True, slots=True)
class Pair:
    head: "Term"
    tail: "Term"

    def __repr__(self):
        return show(self)


Term = Union[Var, Sym, Num, _EmptyList, Pair]


def fresh_var() -> Var:
    # next() on itertools.count is atomic under the GIL
    return Var(next(_var_ids))


def make_list(items, tail=NIL):
    out = tail
    for item in reversed(list(items)):
        out = Pair(item, out)
    return out


def iter_list(t):
    """Yield the elements of a proper list term; raise ValueError otherwise."""
    while isinstance(t, Pair):
        yield t.head
        t = t.tail
    if t is not NIL:
        raise ValueError("improper list")


def is_ground(t) -> bool:
    while isinstance(t, Pair):
        if not is_ground(t.head):
            return False
        t = t.tail
    return not isinstance(t, Var)


class Substitution:
    """Persistent triangular substitution.

    ``extend`` returns a new substitution and never mutates the receiver, so
    branches of a search may share a common prefix safely.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings=None):
        self._map = dict(bindings) if bindings else {}

    def __len__(self):
        return len(self._map)

    def __contains__(self, var):
        return var in self._map

    def get(self, var):
        return self._map.get(var)

    def items(self):
        return self._map.items()

    def extend(self, var: Var, value) -> "Substitution":
        new = Substitution.__new__(Substitution)
        new._map = self._map.copy()
        new._map[var] = value
        return new

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {v!r}" for k, v in self._map.items())
        return "{" + inner + "}"


EMPTY = Substitution()


def walk(t, s: Substitution):
    # A triangular substitution built by unify never chains a var back to
    # itself, but the step bound keeps walk total for hand-built inputs.
    steps = len(s) + 1
    while isinstance(t, Var) and steps:
        nxt = s.get(t)
        if nxt is None:
            return t
        t = nxt
        steps -= 1
    return t


def walk_all(t, s: Substitution):
    """Deep walk. Loops on cyclic terms, which only arise with occurs check off."""
    t = walk(t, s)
    if isinstance(t, Pair):
        return Pair(walk_all(t.head, s), walk_all(t.tail, s))
    return t


def occurs(v: Var, t, s: Substitution) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Pair):
        return occurs(v, t.head, s) or occurs(v, t.tail, s)
    return False


def unify(t1, t2, s: Substitution, occurs_check: bool = False) -> Optional[Substitution]:
    """Return the extension of ``s`` equating ``t1`` and ``t2``, or None."""
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = walk(a, s)
        b = walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs_check and occurs(a, b, s):
                return None
            s = s.extend(a, b)
        elif isinstance(b, Var):
            if occurs_check and occurs(b, a, s):
                return None
            s = s.extend(b, a)
        elif isinstance(a, Pair) and isinstance(b, Pair):
            stack.append((a.tail, b.tail))
            stack.append((a.head, b.head))
        else:
            return None
    return s


def reify_name(n: int) -> Sym:
    return Sym(f"_.{n}")


def reify(t, s: Substitution):
    """Walk ``t`` fully and rename its remaining variables ``_.0``, ``_.1``, ..."""
    t = walk_all(t, s)
    names = {}

    def rename(u):
        if isinstance(u, Var):
            if u not in names:
                names[u] = reify_name(len(names))
            return names[u]
        if isinstance(u, Pair):
            return Pair(rename(u.head), rename(u.tail))
        return u

    return rename(t)


def term_vars(t) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Pair):
        yield from term_vars(t.head)
        yield from term_vars(t.tail)


def show(t) -> str:
    """Render a term in Scheme notation: ``(a b)``, ``(a . b)``, ``()``."""
    if isinstance(t, Pair):
        parts = []
        while isinstance(t, Pair):
            parts.append(show(t.head))
            t = t.tail
        if t is not NIL:
            parts.append(".")
            parts.append(show(t))
        return "(" + " ".join(parts) + ")"
    return repr(t)
