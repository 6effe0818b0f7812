"""S-expression reader and printer for program files and the REPL.

Lists read as Python lists, symbols as ``Symbol`` (a str subclass), integers
as int and ``#t``/``#f`` as bool. ``'x``, `` `x`` and ``,x`` expand to
``(quote x)``, ``(quasiquote x)`` and ``(unquote x)``. Square brackets are
interchangeable with parentheses but must match their own kind.
"""

from __future__ import annotations

import re

from .errors import ParseError


class Symbol(str):
    __slots__ = ()

    def __repr__(self):
        return str(self)


QUOTE = Symbol("quote")
QUASIQUOTE = Symbol("quasiquote")
UNQUOTE = Symbol("unquote")
DOT = Symbol(".")

_PREFIX = {"'": QUOTE, "`": QUASIQUOTE, ",": UNQUOTE}
_CLOSE = {"(": ")", "[": "]"}
_TOKEN = re.compile(r"""\s+|;[^\n]*|[()\[\]'`,]|[^\s()\[\]'`,;]+""")
_INT = re.compile(r"[+-]?\d+\Z")


def _tokens(text):
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        col = pos - line_start + 1
        if not tok[0].isspace() and tok[0] != ";":
            yield tok, line, col
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()


def _atom(tok, line, col):
    if _INT.match(tok):
        return int(tok)
    if tok == "#t":
        return True
    if tok == "#f":
        return False
    if tok.startswith("#") and tok not in ("#s", "#u"):
        raise ParseError(f"unknown literal {tok}", line, col)
    return Symbol(tok)


def parse(text: str) -> list:
    """Read every top-level form in ``text``."""
    forms = []
    # each frame: (closing char, items, pending prefixes, line, col)
    stack = [(None, forms, [], 1, 1)]
    prefixes = []

    def push(value):
        nonlocal prefixes
        while prefixes:
            value = [prefixes.pop(), value]
        stack[-1][1].append(value)

    for tok, line, col in _tokens(text):
        if tok in _CLOSE:
            stack.append((_CLOSE[tok], [], prefixes, line, col))
            prefixes = []
        elif tok in (")", "]"):
            closing, items, saved, oline, ocol = stack[-1]
            if closing is None:
                raise ParseError(f"unexpected '{tok}'", line, col)
            if tok != closing:
                raise ParseError(f"'{tok}' closes a list opened at {oline}:{ocol}", line, col)
            if prefixes:
                raise ParseError("quote prefix with nothing after it", line, col)
            if DOT in items and (len(items) < 3 or items.index(DOT) != len(items) - 2):
                raise ParseError("misplaced '.'", line, col)
            stack.pop()
            prefixes = saved
            push(items)
        elif tok in _PREFIX:
            prefixes.append(_PREFIX[tok])
        else:
            push(_atom(tok, line, col))
    if len(stack) > 1:
        _, _, _, line, col = stack[-1]
        raise ParseError("unbalanced parenthesis", line, col)
    if prefixes:
        raise ParseError("quote prefix at end of input")
    return forms


def to_text(form) -> str:
    """Print a form so that ``parse(to_text(f)) == [f]``."""
    if isinstance(form, bool):
        return "#t" if form else "#f"
    if isinstance(form, list):
        if len(form) == 2 and isinstance(form[0], Symbol):
            for ch, sym in _PREFIX.items():
                if form[0] == sym:
                    return ch + to_text(form[1])
        return "(" + " ".join(to_text(x) for x in form) + ")"
    return str(form)


def balanced(text: str) -> bool:
    """True when ``text`` holds no unclosed list (used by the REPL)."""
    depth = 0
    for tok, _, _ in _tokens(text):
        if tok in _CLOSE:
            depth += 1
        elif tok in (")", "]"):
            depth -= 1
    return depth <= 0
