"""Signatures and their finite closures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .proof import Level, SystemId
from .syntax import (
    Box,
    Cap,
    Formula,
    Index,
    Neg,
    Ucl,
    children,
    indices_of,
    make_index,
    nonempty_subsets,
    render,
)

__all__ = [
    "SignatureError",
    "Signature",
    "ClosureSet",
    "closure",
    "in_closure",
    "closure_violations",
    "UCL_GUARDS",
]

# How closure condition 6 picks the J in  [+I]phi in cl  =>  [&J][+I]phi in cl.
#   "meets":    every J subset of iota with J & I nonempty (default)
#   "superset": only strict supersets I < J of iota, the literal quantifier
UCL_GUARDS = ("meets", "superset")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    logic: SystemId
    alpha: Formula
    iota: Index

    def __post_init__(self):
        if not isinstance(self.logic, SystemId):
            object.__setattr__(self, "logic", SystemId.parse(str(self.logic)))
        if self.logic.level is not Level.LCAPUCL:
            raise SignatureError(f"{self.logic.name} is not one of the six C-logics")
        try:
            iota = make_index(self.iota)
        except ValueError as e:
            raise SignatureError(str(e)) from None
        object.__setattr__(self, "iota", iota)
        missing = indices_of(self.alpha) - set(iota)
        if missing:
            raise SignatureError(f"indices {sorted(missing)} of alpha are not in iota {list(iota)}")

    @classmethod
    def of(cls, logic, alpha: Formula, iota: Optional[Iterable[int]] = None) -> "Signature":
        """Signature with ``iota`` defaulting to the indices of ``alpha`` (or {1})."""
        if iota is None:
            iota = indices_of(alpha) or (1,)
        return cls(logic, alpha, make_index(iota))

    @property
    def base(self) -> str:
        return self.logic.base

    def describe(self) -> str:
        return f"{self.logic.logic} | {render(self.alpha)} | iota={{{' '.join(map(str, self.iota))}}}"


@dataclass(frozen=True)
class ClosureSet:
    formulas: frozenset
    signature: Signature

    def __contains__(self, f: Formula) -> bool:
        return f in self.formulas

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list[Formula]:
        return sorted(self.formulas, key=render)

    def rendered(self) -> list[str]:
        return sorted(render(f) for f in self.formulas)


def _ucl_targets(index: Index, iota: Index, guard: str) -> list[Index]:
    if guard == "meets":
        return [j for j in nonempty_subsets(iota) if set(j) & set(index)]
    if guard == "superset":
        return [j for j in nonempty_subsets(iota) if set(index) < set(j)]
    raise ValueError(f"unknown guard {guard!r}; expected one of {UCL_GUARDS}")


def _consequences(f: Formula, iota: Index, guard: str) -> list[Formula]:
    out = list(children(f))
    if not isinstance(f, Neg):
        out.append(Neg(f))
    if isinstance(f, Box) and f.i in iota:
        out.append(Cap((f.i,), f.sub))
    if isinstance(f, Cap):
        if len(f.index) == 1 and f.index[0] in iota:
            out.append(Box(f.index[0], f.sub))
        out += [Cap(j, f.sub) for j in nonempty_subsets(iota) if set(f.index) < set(j)]
    if isinstance(f, Ucl):
        out += [Cap(j, f) for j in _ucl_targets(f.index, iota, guard)]
    return out


def closure(sig: Signature, guard: str = "meets", seed: Iterable[Formula] = ()) -> ClosureSet:
    """Least set containing alpha (and ``seed``) closed under the six conditions."""
    found = set()
    work = [sig.alpha, *seed]
    while work:
        f = work.pop()
        if f in found:
            continue
        found.add(f)
        work.extend(g for g in _consequences(f, sig.iota, guard) if g not in found)
    return ClosureSet(frozenset(found), sig)


def in_closure(cl: ClosureSet, f: Formula) -> bool:
    return f in cl.formulas


def closure_violations(formulas: Iterable[Formula], sig: Signature, guard: str = "meets") -> list[tuple[str, str]]:
    """(member, missing consequence) pairs; empty iff the set is closed."""
    pool = set(formulas)
    out = []
    if sig.alpha not in pool:
        out.append(("<alpha>", render(sig.alpha)))
    for f in sorted(pool, key=render):
        for g in _consequences(f, sig.iota, guard):
            if g not in pool:
                out.append((render(f), render(g)))
    return out
