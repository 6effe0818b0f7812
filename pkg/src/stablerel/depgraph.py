"""Predicate dependency graph, SCCs and program classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import UndefinedRelationError
from .program import Program, RelKey, fmt_key, iter_calls

POSITIVE = "+"
NEGATIVE = "-"


class Classification(enum.Enum):
    DEFINITE = "Definite"
    STRATIFIED = "Stratified"
    NORMAL = "Normal"

    def __str__(self):
        return self.value


@dataclass
class DepGraph:
    nodes: list = field(default_factory=list)
    edges: set = field(default_factory=set)

    def successors(self, node):
        return self._adj().get(node, ())

    def _adj(self):
        adj = {n: [] for n in self.nodes}
        for src, dst, _ in sorted(self.edges, key=self._edge_order):
            if dst not in adj[src]:
                adj[src].append(dst)
        return adj

    def _edge_order(self, e):
        pos = {n: i for i, n in enumerate(self.nodes)}
        return (pos[e[0]], pos[e[1]], e[2])

    def negative_edges(self):
        return {(s, d) for s, d, sign in self.edges if sign == NEGATIVE}

    def subgraph(self, keep) -> "DepGraph":
        keep = set(keep)
        return DepGraph(
            [n for n in self.nodes if n in keep],
            {e for e in self.edges if e[0] in keep and e[1] in keep},
        )


def _edges_of(p: Program, key: RelKey):
    rel = p.relations[key]
    for call, negated in iter_calls(rel.body):
        target = call.key
        if target in p.relations:
            yield (key, target, NEGATIVE if negated else POSITIVE)
        elif p.lookup(target) is None:
            raise UndefinedRelationError(target[0], target[1], caller=key)


def build_graph(p: Program, roots=None) -> DepGraph:
    """Dependency graph of ``p``; restricted to what ``roots`` reach if given.

    Builtins are not nodes. Raises UndefinedRelationError for a call to a
    relation that is neither defined nor builtin.
    """
    if roots is None:
        keys = list(p.relations)
    else:
        keys = [k for k in roots if k in p.relations]
    nodes, edges = [], set()
    seen = set()
    todo = list(keys)
    while todo:
        k = todo.pop(0)
        if k in seen:
            continue
        seen.add(k)
        nodes.append(k)
        for e in _edges_of(p, k):
            edges.add(e)
            if e[1] not in seen:
                todo.append(e[1])
    order = {k: i for i, k in enumerate(p.relations)}
    nodes.sort(key=order.__getitem__)
    return DepGraph(nodes, edges)


def tarjan(nodes, successors):
    """Strongly connected components, iteratively, in reverse topological order.

    Every component is emitted after all components reachable from it.
    """
    index, low, on_stack = {}, {}, set()
    stack, out = [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def sccs(g: DepGraph) -> list[set]:
    adj = g._adj()
    return [set(c) for c in tarjan(g.nodes, lambda n: adj[n])]


def is_cyclic(g: DepGraph, comp) -> bool:
    if len(comp) > 1:
        return True
    (n,) = comp
    return any(s == n and d == n for s, d, _ in g.edges)


def strata(g: DepGraph):
    """Predicate strata, or None if some negative edge lies inside an SCC.

    A positive edge keeps the stratum non-decreasing towards the caller; a
    negative edge forces the caller strictly above the callee.
    """
    comps = sccs(g)
    where = {}
    for i, c in enumerate(comps):
        for n in c:
            where[n] = i
    for s, d, sign in g.edges:
        if sign == NEGATIVE and where[s] == where[d]:
            return None
    level = {}
    for i, comp in enumerate(comps):
        lv = 0
        for s, d, sign in g.edges:
            if s in comp and where[d] != i:
                lv = max(lv, level[d] + (1 if sign == NEGATIVE else 0))
        for n in comp:
            level[n] = lv
    return level


def classify_graph(g: DepGraph) -> Classification:
    if not g.negative_edges():
        return Classification.DEFINITE
    if strata(g) is None:
        return Classification.NORMAL
    return Classification.STRATIFIED


def classify(p: Program, nodes=None) -> Classification:
    g = build_graph(p, nodes)
    if nodes is not None:
        g = g.subgraph(nodes)
    return classify_graph(g)


def cone(p: Program, roots) -> set:
    """All defined predicates reachable from ``roots`` through either edge sign."""
    roots = [r for r in roots if r in p.relations]
    if not roots:
        return set()
    return set(build_graph(p, roots).nodes)


def negation_reaching(g: DepGraph) -> set:
    """Nodes from which some negative edge is reachable (including their own)."""
    out = {s for s, d in g.negative_edges()}
    changed = True
    while changed:
        changed = False
        for s, d, _ in g.edges:
            if d in out and s not in out:
                out.add(s)
                changed = True
    return out


def to_dot(g: DepGraph) -> str:
    lines = ["digraph deps {"]
    for n in g.nodes:
        lines.append(f'  "{fmt_key(n)}";')
    for s, d, sign in sorted(g.edges, key=g._edge_order):
        attr = ' [style=dashed, label="not"]' if sign == NEGATIVE else ""
        lines.append(f'  "{fmt_key(s)}" -> "{fmt_key(d)}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"
