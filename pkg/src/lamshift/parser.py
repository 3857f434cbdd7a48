"""Parser for the concrete term syntax and for definition files.

Grammar::

    term  = lam | shf | app
    lam   = ("\\" | "λ") IDENT {IDENT} "." term
    shf   = ("S" | "shift") IDENT "." term
    app   = atom {atom}
    atom  = IDENT | "(" term ")" | "<" term ">" | "@" IDENT "<" term ">"

``--`` starts a comment running to the end of the line.  Identifiers that
name a definition are macro-expanded unless shadowed by a binder.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from lamshift.syntax import App, CtxApp, Lam, Reset, Shift, Term, Var

KEYWORDS = {"S", "shift"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9'_]*)
  | (?P<hole>_)
  | (?P<sym>[\\λ.()<>@=;\[\]])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        exp = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


class UnknownName(ParseError):
    def __init__(self, name: str, line: int, col: int):
        self.name = name
        super().__init__(f"unknown name {name!r}", line, col)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'sym', 'hole', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class DefsTable(dict):
    """Ordered map from definition names to terms."""


class _Parser:
    def __init__(self, text: str, defs=None, closed: bool = False, allow_hole: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.defs = defs or {}
        self.closed = closed
        self.allow_hole = allow_hole

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, expected=()):
        t = self.tok
        raise ParseError(msg, t.line, t.col, expected)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            self.error(f"unexpected {self.tok.text or 'end of input'!r}", {text})
        return self.advance()

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"unexpected {t.text or 'end of input'!r}", {"IDENT"})
        self.i += 1
        return t.text

    def at_atom(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in KEYWORDS
        if t.kind == "hole":
            return self.allow_hole
        return t.kind == "sym" and t.text in ("(", "<", "@")

    def term(self, bound: frozenset) -> Term:
        t = self.tok
        if t.kind == "sym" and t.text in ("\\", "λ"):
            self.advance()
            names = [self.ident()]
            while self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
                names.append(self.ident())
            self.expect(".")
            body = self.term(bound | set(names))
            for x in reversed(names):
                body = Lam(x, body)
            return body
        if t.kind == "ident" and t.text in KEYWORDS:
            self.advance()
            k = self.ident()
            self.expect(".")
            return Shift(k, self.term(bound | {k}))
        return self.app(bound)

    def app(self, bound: frozenset) -> Term:
        if not self.at_atom():
            self.error(
                f"unexpected {self.tok.text or 'end of input'!r}",
                {"IDENT", "(", "<", "@", "\\", "S"},
            )
        t = self.atom(bound)
        while self.at_atom():
            t = App(t, self.atom(bound))
        return t

    def atom(self, bound: frozenset) -> Term:
        t = self.advance()
        if t.kind == "ident":
            if t.text not in bound and t.text in self.defs:
                return self.defs[t.text]
            if self.closed and t.text not in bound:
                raise UnknownName(t.text, t.line, t.col)
            return Var(t.text)
        if t.kind == "hole":
            return Var("_")
        if t.text == "(":
            inner = self.term(bound)
            self.expect(")")
            return inner
        if t.text == "<":
            inner = self.term(bound)
            self.expect(">")
            return Reset(inner)
        if t.text == "@":
            a = self.ident()
            self.expect("<")
            inner = self.term(bound)
            self.expect(">")
            return CtxApp(a, inner)
        self.i -= 1
        self.error(f"unexpected {t.text!r}", {"IDENT", "(", "<", "@"})

    def finish(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}", {"end of input"})


def parse_term(text: str, defs=None, *, closed: bool = False, allow_hole: bool = False) -> Term:
    """Parse one term.

    With ``closed=True`` any identifier that is neither bound nor a
    definition raises :class:`UnknownName`.  ``allow_hole`` admits ``_`` as a
    context hole (it parses as the variable ``_``).
    """
    p = _Parser(text, defs, closed, allow_hole)
    t = p.term(frozenset())
    p.finish()
    return t


def _parse_defs_stream(p: _Parser, table: DefsTable, *, stop_at_section=False):
    while p.tok.kind != "eof":
        if stop_at_section and p.tok.text == "[":
            return
        name = p.ident()
        p.expect("=")
        p.defs = table
        table[name] = p.term(frozenset())
        p.expect(";")


def parse_defs(text: str, base=None) -> DefsTable:
    """Parse ``name = term ;`` entries; later entries may use earlier ones."""
    table = DefsTable(base or {})
    p = _Parser(text, table)
    _parse_defs_stream(p, table)
    return table


def load_defs(path, base=None) -> DefsTable:
    with open(path, encoding="utf-8") as fh:
        return parse_defs(fh.read(), base)


def parse_sections(text: str, base=None, *, closed=False, hole_sections=()) -> tuple[DefsTable, dict]:
    """Parse a defs preamble followed by ``[section]`` blocks of entries.

    Returns the preamble table (merged over ``base``) and a mapping from section
    name to an ordered list of ``(name, term)``.
    """
    table = DefsTable(base or {})
    p = _Parser(text, table)
    _parse_defs_stream(p, table, stop_at_section=True)
    sections: dict = {}
    while p.tok.kind != "eof":
        p.expect("[")
        sec = p.ident()
        p.expect("]")
        entries = sections.setdefault(sec, [])
        p.allow_hole = sec in hole_sections
        p.closed = closed
        while p.tok.kind != "eof" and p.tok.text != "[":
            name = p.ident()
            p.expect("=")
            entries.append((name, p.term(frozenset())))
            p.expect(";")
    return table, sections
