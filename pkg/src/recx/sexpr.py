"""S-expression reader shared by the PCF, CBPV and recurrence-language syntaxes.

Input is UTF-8 text; `;` starts a comment running to end of line.  The reader
produces a tree of `Atom` and `SList` nodes, each carrying the 1-based
line/column where it started so later elaboration stages can report positions.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = 0
    col: int = 0


_DELIMS = set("() \t\r\n;")


def tokenize(text: str):
    """Yield (token, line, col) triples; tokens are '(', ')' or atom text."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            col += 1
            i += 1
        else:
            start, l0, c0 = i, line, col
            while i < n and text[i] not in _DELIMS:
                i += 1
                col += 1
            yield text[start:i], l0, c0


def read(text: str):
    """Parse one s-expression; trailing content is an error."""
    forms = read_all(text)
    if not forms:
        raise ParseError("empty input")
    if len(forms) > 1:
        raise ParseError("trailing content after first expression",
                         forms[1].line, forms[1].col)
    return forms[0]


def read_all(text: str):
    stack: list[list] = []
    marks: list[tuple[int, int]] = []
    out: list = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append([])
            marks.append((line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            items = stack.pop()
            l0, c0 = marks.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1] if stack else out).append(node)
        else:
            node = Atom(tok, line, col)
            (stack[-1] if stack else out).append(node)
    if stack:
        l0, c0 = marks[-1]
        raise ParseError("unclosed '('", l0, c0)
    return out


def expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise ParseError(f"expected {what}, got atom '{node.text}'", node.line, node.col)
    return node


def expect_atom(node, what: str) -> Atom:
    if not isinstance(node, Atom):
        raise ParseError(f"expected {what}, got a list", node.line, node.col)
    return node


def head_of(node) -> str:
    """Keyword of a list form, or the atom text itself."""
    if isinstance(node, Atom):
        return node.text
    if node.items and isinstance(node.items[0], Atom):
        return node.items[0].text
    return ""
