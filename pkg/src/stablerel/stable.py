"""Stable models of ground programs.

Interpretations are frozensets of atom indices into ``GroundProgram.atoms``.

Two routes compute the same model sets:

* ``enumerate_stable_models(pi, oracle=True)`` walks all 2^N interpretations
  and keeps those equal to the least model of their reduct.
* the default route splits the atom dependency graph into strongly connected
  components and decides them bottom-up; only components with an internal
  negative edge are guessed, everything else is computed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .depgraph import NEGATIVE, POSITIVE, DepGraph, strata, tarjan
from .errors import TooLargeError
from .grounder import GroundProgram

DEFAULT_CAP = 24


def reduct(pi: GroundProgram, m) -> GroundProgram:
    """Delete rules with a negative literal false in ``m``; drop the rest's negations.

    The atom table of ``pi`` is kept so indices stay aligned.
    """
    m = frozenset(m)
    atoms = pi.atoms
    kept = []
    for rule, (_, _, neg) in zip(pi.rules, pi.compiled):
        if any(i in m for i in neg):
            continue
        kept.append(type(rule)(rule.head, rule.pos_body, (), rule.source))
    return GroundProgram(tuple(kept), atoms)


def _least(rules, start=()):
    """Least fixpoint of definite index rules, seeded with ``start``."""
    true = set(start)
    waiting = {}
    missing = []
    queue = list(true)
    for r, (head, pos) in enumerate(rules):
        need = [a for a in set(pos) if a not in true]
        missing.append(len(need))
        if not need:
            if head not in true:
                true.add(head)
                queue.append(head)
        for a in need:
            waiting.setdefault(a, []).append(r)
    while queue:
        a = queue.pop()
        for r in waiting.pop(a, ()):
            missing[r] -= 1
            if missing[r] == 0:
                head = rules[r][0]
                if head not in true:
                    true.add(head)
                    queue.append(head)
    return true


def minimal_model(definite: GroundProgram) -> frozenset:
    rules = []
    for head, pos, neg in definite.compiled:
        if neg:
            raise ValueError("minimal_model needs a negation-free program")
        rules.append((head, pos))
    return frozenset(_least(rules))


def _reduct_model(pi, m):
    rules = [(h, pos) for h, pos, neg in pi.compiled if not any(i in m for i in neg)]
    return frozenset(_least(rules))


def is_stable(pi: GroundProgram, m) -> bool:
    m = frozenset(m)
    return _reduct_model(pi, m) == m


def canonical_order(models):
    return sorted(set(models), key=lambda m: (len(m), sorted(m)))


def _oracle(pi, cap):
    n = len(pi.atoms)
    if n > cap:
        raise TooLargeError(n)
    out = []
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            m = frozenset(combo)
            if _reduct_model(pi, m) == m:
                out.append(m)
    return out


# -- splitting search ---------------------------------------------------------


@dataclass
class _Component:
    atoms: list
    rules: list  # (head, pos, neg) index tuples with head in atoms
    guess: bool


def split(pi: GroundProgram):
    """Atom SCCs of ``pi`` in dependency order, each marked if it must be guessed."""
    n = len(pi.atoms)
    succ = [[] for _ in range(n)]
    by_head = [[] for _ in range(n)]
    for rule in pi.compiled:
        head, pos, neg = rule
        by_head[head].append(rule)
        succ[head].extend(pos)
        succ[head].extend(neg)
    comps = []
    for members in tarjan(range(n), lambda a: succ[a]):
        inside = set(members)
        rules = [r for a in members for r in by_head[a]]
        guess = any(b in inside for r in rules for b in r[2])
        comps.append(_Component(sorted(members), rules, guess))
    return comps


def _applicable(rule, inside, model):
    _, pos, neg = rule
    for b in pos:
        if b not in inside and b not in model:
            return False
    for b in neg:
        if b not in inside and b in model:
            return False
    return True


def _decide(comp, model):
    """Atoms of a negation-free component implied by the lower ``model``."""
    inside = set(comp.atoms)
    rules = [
        (h, tuple(b for b in pos if b in inside))
        for h, pos, neg in comp.rules
        if _applicable((h, pos, neg), inside, model)
    ]
    return _least(rules)


def _local_models(comp, model, cap):
    """Stable choices for a component containing a negative cycle."""
    inside = set(comp.atoms)
    live = [r for r in comp.rules if _applicable(r, inside, model)]
    candidates = sorted({h for h, _, _ in live})
    if len(candidates) > cap:
        raise TooLargeError(len(candidates))
    for k in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, k):
            x = set(combo)
            rules = [
                (h, tuple(b for b in pos if b in inside))
                for h, pos, neg in live
                if not any(b in x for b in neg if b in inside)
            ]
            if _least(rules) == x:
                yield x


def _search(pi, cap, must=frozenset(), must_not=frozenset(), comps=None):
    if comps is None:
        comps = split(pi)

    def violates(new, comp):
        for a in comp.atoms:
            if a in must and a not in new:
                return True
            if a in must_not and a in new:
                return True
        return False

    stack = [(0, frozenset())]
    while stack:
        i, base = stack.pop()
        model = set(base)
        dead = False
        while i < len(comps) and not comps[i].guess:
            new = _decide(comps[i], model)
            if violates(new, comps[i]):
                dead = True
                break
            model |= new
            i += 1
        if dead:
            continue
        if i == len(comps):
            yield frozenset(model)
            continue
        comp = comps[i]
        children = [
            frozenset(model | x)
            for x in _local_models(comp, model, cap)
            if not violates(x, comp)
        ]
        for child in reversed(children):
            stack.append((i + 1, child))


def enumerate_stable_models(pi: GroundProgram, cap: int = DEFAULT_CAP, oracle: bool = False):
    """All stable models of ``pi`` in canonical order (size, then atom indices).

    ``cap`` bounds the number of atoms enumerated at once: all of them on the
    oracle route, one component's worth on the splitting route.
    """
    if oracle:
        return canonical_order(_oracle(pi, cap))
    return canonical_order(_search(pi, cap))


def find_stable_model(pi: GroundProgram, must=(), must_not=(), cap: int = DEFAULT_CAP, components=None):
    """First stable model containing ``must`` and avoiding ``must_not``, or None.

    ``components`` may carry a precomputed ``split(pi)``.
    """
    for m in _search(pi, cap, frozenset(must), frozenset(must_not), components):
        return m
    return None


def ground_strata(pi: GroundProgram):
    """Predicate strata read off ``pi`` itself, or None if it is not stratified."""
    nodes = list(dict.fromkeys(a.key for a in pi.atoms))
    edges = set()
    for r in pi.rules:
        for a in r.pos_body:
            edges.add((r.head.key, a.key, POSITIVE))
        for a in r.neg_body:
            edges.add((r.head.key, a.key, NEGATIVE))
    return strata(DepGraph(nodes, edges))


def stratified_eval(pi: GroundProgram, strata) -> frozenset:
    """The unique stable model of a stratified program, one stratum at a time.

    ``strata`` maps predicate keys to levels; predicates missing from it sit
    at level 0.
    """
    levels = {}
    for rule, compiled in zip(pi.rules, pi.compiled):
        lv = strata.get(rule.head.key, 0)
        for a in rule.neg_body:
            if strata.get(a.key, 0) >= lv:
                raise ValueError(f"negation of {a} is not in a lower stratum than {rule.head}")
        levels.setdefault(lv, []).append(compiled)
    model = set()
    for lv in sorted(levels):
        rules = [(h, pos) for h, pos, neg in levels[lv] if not any(b in model for b in neg)]
        model = _least(rules, model)
    return frozenset(model)


def show_model(pi: GroundProgram, m) -> str:
    return "{" + " ".join(sorted(str(pi.atoms[i]) for i in m)) + "}"
