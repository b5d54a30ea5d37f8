"""Fixed corpora used by the acceptance suite and the CLI sweeps."""

from __future__ import annotations

from typing import Optional

from .closure import Signature
from .proof import SystemId
from .syntax import Box, Cap, Formula, Impl, Neg, Prop, Ucl, modal_depth, parse

__all__ = ["SIGNATURES", "signatures", "formula_corpus", "AGREEMENT_LOGICS"]

# (logic, alpha, iota); iota None means the indices of alpha
SIGNATURES: list[tuple[str, str, Optional[tuple]]] = [
    ("CK", "[&1 2]p", None),
    ("CK", "[+1]p", None),
    ("CK", "[1][+1]p", None),
    ("CK", "[&1]p", (1, 2)),
    ("CD", "[1]p -> ~[1]~p", None),
    ("CD", "[&1 2]p", None),
    ("CT", "[+1 2]p", None),
    ("CT", "[1][1]p", None),
    ("CB", "[1]~[1]p", None),
    ("CB", "[+1]p", None),
    ("CS4", "[1]p -> [1][1]p", None),
    ("CS4", "[&1]p", (1, 2)),
    ("CS5", "~[1]p -> [1]~[1]p", None),
    ("CS5", "[&1 2]p & ~[1]p", None),
    ("CS5", "[+1 2]p", None),
]

AGREEMENT_LOGICS = ("CK", "CT", "CB")


def signatures() -> list[Signature]:
    return [Signature.of(SystemId.parse(lg), parse(a), iota) for lg, a, iota in SIGNATURES]


_UNARY = (
    Neg,
    lambda f: Box(1, f),
    lambda f: Box(2, f),
    lambda f: Cap((1, 2), f),
    lambda f: Ucl((1, 2), f),
)


def formula_corpus(max_size: int = 4, max_depth: int = 2, prop: str = "p") -> list[Formula]:
    """Every formula over ``~``, ``->``, [1], [2], [&1 2], [+1 2] and one
    proposition with at most ``max_size`` operators and bounded modal depth."""
    by_size: list[list[Formula]] = [[Prop(prop)]]
    for k in range(1, max_size + 1):
        level = [op(f) for f in by_size[k - 1] for op in _UNARY]
        for a in range(k):
            level += [Impl(x, y) for x in by_size[a] for y in by_size[k - 1 - a]]
        by_size.append([f for f in level if modal_depth(f) <= max_depth])
    return [f for group in by_size for f in group]


