"""Formula AST, concrete grammar, and syntactic utilities.

Grammar (ASCII)::

    formula  := iff
    iff      := impl ('<->' impl)*
    impl     := disj ('->' impl)?          # right associative
    disj     := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := '~' unary | modality unary | atom
    modality := '[' N ']' | '[&' N+ ']' | '[+' N+ ']'
    atom     := prop | 'true' | 'false' | '(' formula ')'

Only ``~``, ``->`` and the three modalities survive parsing; the other
connectives are expanded on the way in.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

__all__ = [
    "Index",
    "make_index",
    "Formula",
    "Prop",
    "Neg",
    "Impl",
    "Box",
    "Cap",
    "Ucl",
    "ParseError",
    "parse",
    "render",
    "subformulas",
    "closure_negation",
    "conj",
    "disj",
    "iff",
    "big_conj",
    "TOP",
    "BOTTOM",
    "modal_depth",
    "indices_of",
    "props_of",
    "language_level",
    "size",
    "nonempty_subsets",
]

Index = tuple  # sorted, duplicate-free, nonempty tuple of ints


def make_index(members: Iterable[int]) -> Index:
    """Canonical index: sorted tuple of distinct naturals."""
    out = tuple(sorted(set(int(m) for m in members)))
    if not out:
        raise ValueError("an index must be a nonempty set of naturals")
    if out[0] < 0:
        raise ValueError(f"index members must be natural numbers: {out}")
    return out


def nonempty_subsets(index: Iterable[int]) -> list[Index]:
    """All nonempty subsets of ``index`` in (size, lexicographic) order."""
    base = make_index(index)
    return [
        combo
        for k in range(1, len(base) + 1)
        for combo in itertools.combinations(base, k)
    ]


class _Node:
    __slots__ = ()

    def __repr__(self) -> str:
        return f"<{render(self)}>"

    def __lt__(self, other: "_Node") -> bool:
        return render(self) < render(other)


def _frozen(cls):
    """Frozen dataclass with a hash computed once at construction."""
    cls = dataclass(frozen=True, slots=True, repr=False)(cls)

    def __hash__(self):
        return self._h

    cls.__hash__ = __hash__
    return cls


@_frozen
class Prop(_Node):
    name: str
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("p", self.name)))


@_frozen
class Neg(_Node):
    sub: "Formula"
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("~", self.sub._h)))


@_frozen
class Impl(_Node):
    left: "Formula"
    right: "Formula"
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("->", self.left._h, self.right._h)))


@_frozen
class Box(_Node):
    i: int
    sub: "Formula"
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.i < 0:
            raise ValueError("box index must be a natural number")
        object.__setattr__(self, "_h", hash(("[]", self.i, self.sub._h)))


@_frozen
class Cap(_Node):
    index: Index
    sub: "Formula"
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", make_index(self.index))
        object.__setattr__(self, "_h", hash(("&", self.index, self.sub._h)))


@_frozen
class Ucl(_Node):
    index: Index
    sub: "Formula"
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", make_index(self.index))
        object.__setattr__(self, "_h", hash(("+", self.index, self.sub._h)))


Formula = Union[Prop, Neg, Impl, Box, Cap, Ucl]
MODAL = (Box, Cap, Ucl)


# -- derived connectives ---------------------------------------------------

def conj(a: Formula, b: Formula) -> Formula:
    return Neg(Impl(a, Neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Impl(Neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(Impl(a, b), Impl(b, a))


def big_conj(parts: list[Formula]) -> Formula:
    """Right-nested conjunction ``a & (b & (c & ...))``."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = conj(part, out)
    return out


TOP: Formula = Impl(Prop("p"), Prop("p"))
BOTTOM: Formula = Neg(TOP)


# -- parsing ---------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<impl>->)
  | (?P<mod>\[\s*[&+]?[^\]]*\])
  | (?P<prop>[a-z][a-z0-9_]*)
  | (?P<op>[~&|()])
    """,
    re.VERBOSE,
)

_MOD_BODY = re.compile(r"\[\s*([&+]?)\s*([0-9 ,]*?)\s*\]$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.k]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def run(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self) -> Formula:
        f = self.impl()
        while self.peek()[0] == "iff":
            self.take()
            f = iff(f, self.impl())
        return f

    def impl(self) -> Formula:
        f = self.disj()
        if self.peek()[0] == "impl":
            self.take()
            return Impl(f, self.impl())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.take()
            f = disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if value == "~":
            self.take()
            return Neg(self.unary())
        if kind == "mod":
            self.take()
            return self.modality(value, pos)(self.unary())
        if kind == "prop":
            self.take()
            if value == "true":
                return TOP
            if value == "false":
                return BOTTOM
            return Prop(value)
        if value == "(":
            self.take()
            f = self.iff()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if kind == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {value!r}")

    def modality(self, value: str, pos: int):
        m = _MOD_BODY.match(value)
        if m is None:
            raise ParseError(f"malformed modality {value!r}", self.text, pos)
        kind, body = m.groups()
        members = [int(x) for x in re.split(r"[\s,]+", body) if x]
        if not members:
            raise ParseError(f"empty index in {value!r}", self.text, pos)
        if kind == "":
            if len(members) != 1:
                raise ParseError(
                    f"box takes exactly one index in {value!r}", self.text, pos
                )
            return lambda sub: Box(members[0], sub)
        index = make_index(members)
        if kind == "&":
            return lambda sub: Cap(index, sub)
        return lambda sub: Ucl(index, sub)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula over ``~``, ``->`` and the modalities."""
    return _Parser(text).run()


# -- rendering -------------------------------------------------------------

def _index_text(index: Index) -> str:
    return " ".join(str(i) for i in index)


@lru_cache(maxsize=None)
def render(f: Formula) -> str:
    """Canonical text; ``parse(render(f)) == f``."""
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Impl):
        left = render(f.left)
        if isinstance(f.left, Impl):
            left = f"({left})"
        return f"{left} -> {render(f.right)}"
    if isinstance(f, Neg):
        prefix = "~"
    elif isinstance(f, Box):
        prefix = f"[{f.i}]"
    elif isinstance(f, Cap):
        prefix = f"[&{_index_text(f.index)}]"
    else:
        prefix = f"[+{_index_text(f.index)}]"
    inner = render(f.sub)
    if isinstance(f.sub, Impl):
        inner = f"({inner})"
    return prefix + inner


# -- structural utilities --------------------------------------------------

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Prop):
        return ()
    if isinstance(f, Impl):
        return (f.left, f.right)
    return (f.sub,)


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def subformulas(f: Formula) -> frozenset:
    """Reflexive-transitive subformula set of ``f``."""
    return frozenset(iter_subformulas(f))


def closure_negation(f: Formula) -> Formula:
    """Strip one leading negation, or add one if there is none."""
    if isinstance(f, Neg):
        return f.sub
    return Neg(f)


@lru_cache(maxsize=None)
def modal_depth(f: Formula) -> int:
    if isinstance(f, Prop):
        return 0
    if isinstance(f, Impl):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Neg):
        return modal_depth(f.sub)
    return 1 + modal_depth(f.sub)


def size(f: Formula) -> int:
    """Number of connectives and modal operators."""
    return sum(1 for g in iter_subformulas(f) if not isinstance(g, Prop))


def indices_of(f: Formula) -> frozenset:
    """Every natural used as a box label or index member in ``f``."""
    out = set()
    for g in iter_subformulas(f):
        if isinstance(g, Box):
            out.add(g.i)
        elif isinstance(g, (Cap, Ucl)):
            out.update(g.index)
    return frozenset(out)


def props_of(f: Formula) -> frozenset:
    return frozenset(g.name for g in iter_subformulas(f) if isinstance(g, Prop))


def language_level(f: Formula) -> str:
    """``"L"``, ``"Lcap"`` or ``"Lcapucl"``: the smallest language containing f."""
    level = "L"
    for g in iter_subformulas(f):
        if isinstance(g, Ucl):
            return "Lcapucl"
        if isinstance(g, Cap):
            level = "Lcap"
    return level
