"""Atoms, finitary canonical relations, standard models, and their audits.

Atoms stand in for the maximal consistent subsets of a closure. A candidate
is a subset of ``cl`` that is Boolean-coherent and respects the local modal
rules of the logic; candidates then go through a Hintikka-style elimination
that removes every set whose diamonds, eventualities or seriality demands
cannot be met by the remaining ones.

Standard models are truncated at a depth bound. Audits that depend on what
lies past the truncation use a three-valued reading: a modal formula is
decided at a state only if no deeper truncation could change its value.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .closure import ClosureSet, Signature, closure
from .semantics import FrameClass, KripkeModel, ModelPath, frame_violations
from .syntax import (
    Box,
    Cap,
    Formula,
    Impl,
    Index,
    Neg,
    Prop,
    Ucl,
    make_index,
    modal_depth,
    nonempty_subsets,
    render,
    size,
)

__all__ = [
    "Atom",
    "AtomSpace",
    "atom_space",
    "enumerate_atoms",
    "canonical_relation",
    "StandardModel",
    "build_standard_model",
    "standard_model_size",
    "audit_canonicity",
    "audit_standardness",
    "audit_truth",
    "audit_existence",
]

REFLEXIVE_BASES = ("T", "B", "S4", "S5")
SYMMETRIC_BASES = ("B", "S5")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Atom:
    members: frozenset

    def __contains__(self, f: Formula) -> bool:
        return f in self.members

    def rendered(self) -> list[str]:
        return sorted(render(f) for f in self.members)


class AtomSpace:
    """Atoms of one signature together with their canonical relations.

    ``relation="repaired"`` (default) makes the S4 and S5 clauses carry the
    intersection formulas of every sub-index K of I; ``"literal"`` uses only
    those of I itself, which is not monotone in I.
    """

    def __init__(self, sig: Signature, guard: str = "meets", relation: str = "repaired",
                 eliminate: bool = True):
        if relation not in ("repaired", "literal"):
            raise ValueError(relation)
        self.sig = sig
        self.base_logic = sig.logic.base
        self.guard = guard
        self.relation_mode = relation
        self.cl: ClosureSet = closure(sig, guard)
        self.formulas: list[Formula] = sorted(self.cl.formulas, key=lambda f: (size(f), render(f)))
        self.fpos = {f: k for k, f in enumerate(self.formulas)}
        self.subsets: list[Index] = nonempty_subsets(sig.iota)
        self.candidates: list[int] = self._candidates()
        self.eliminated: list[tuple[int, str]] = []
        masks = self._eliminate(self.candidates) if eliminate else list(self.candidates)
        masks.sort(key=lambda m: tuple(sorted(render(self.formulas[k]) for k in _bits(m))))
        self.masks: list[int] = masks
        self.atoms: list[Atom] = [Atom(frozenset(self.formulas[k] for k in _bits(m))) for m in masks]
        self.succ: dict[Index, list[int]] = self._relations(masks)

    # -- candidates --------------------------------------------------------

    def _bit(self, f: Formula) -> int:
        return 1 << self.fpos[f]

    def _candidates(self) -> list[int]:
        base = [f for f in self.formulas if not isinstance(f, (Neg, Impl))]
        pos = {f: k for k, f in enumerate(base)}
        reflexive = self.base_logic in REFLEXIVE_BASES
        cl = self.cl.formulas

        # (premise, conclusion): premise true forces conclusion true.
        # Conclusions may be Boolean; they are evaluated once their base is set.
        rules: list[tuple[Formula, Formula]] = []
        for f in base:
            if isinstance(f, Box) and Cap((f.i,), f.sub) in cl:
                g = Cap((f.i,), f.sub)
                rules += [(f, g), (g, f)]
            if isinstance(f, Cap):
                rules += [(f, Cap(j, f.sub)) for j in self.subsets
                          if set(f.index) < set(j) and Cap(j, f.sub) in cl]
            if isinstance(f, Ucl):
                rules += [(f, Cap(j, f)) for j in self.subsets
                          if set(j) & set(f.index) and Cap(j, f) in cl]
            if reflexive and isinstance(f, (Box, Cap, Ucl)):
                rules.append((f, f.sub))

        def leaves(g):
            if isinstance(g, Neg):
                return leaves(g.sub)
            if isinstance(g, Impl):
                return leaves(g.left) | leaves(g.right)
            return {g}

        # attach every rule to the latest base position it depends on
        checks: list[list[tuple[Formula, Formula]]] = [[] for _ in base]
        for prem, concl in rules:
            last = max(pos[x] for x in leaves(prem) | leaves(concl))
            checks[last].append((prem, concl))

        def ev(g, assign):
            if isinstance(g, Neg):
                return not ev(g.sub, assign)
            if isinstance(g, Impl):
                return (not ev(g.left, assign)) or ev(g.right, assign)
            return assign[g]

        out = []
        assign: dict = {}

        def dfs(k):
            if k == len(base):
                out.append(self._mask_of(assign, ev))
                return
            for value in (True, False):
                assign[base[k]] = value
                if all(not ev(p, assign) or ev(c, assign) for p, c in checks[k]):
                    dfs(k + 1)
            del assign[base[k]]

        dfs(0)
        return out

    def _mask_of(self, assign, ev) -> int:
        m = 0
        for f in self.formulas:
            if ev(f, assign):
                m |= self._bit(f)
        return m

    # -- relations ---------------------------------------------------------

    @cached_property
    def _need_tables(self):
        """Per index J: the formulas an atom hands to each ▷_J successor."""
        symmetric = self.base_logic in SYMMETRIC_BASES
        literal = self.relation_mode == "literal"
        caps = [f for f in self.formulas if isinstance(f, Cap)]
        ucls = [f for f in self.formulas if isinstance(f, Ucl)]
        tables = {}
        for j in self.subsets:
            entries = []  # (trigger bit, needed bits)
            for f in caps:
                need = 0
                if f.index == j:
                    need |= self._bit(f.sub)
                if self.base_logic in ("S4", "S5"):
                    inside = f.index == j if literal else set(f.index) <= set(j)
                    if inside:
                        need |= self._bit(f)
                if need:
                    entries.append((self._bit(f), need))
            for f in ucls:
                if set(f.index) & set(j):
                    entries.append((self._bit(f), self._bit(f) | self._bit(f.sub)))
            tables[j] = entries
        return tables, symmetric

    def need(self, mask: int, j: Index) -> int:
        tables, _ = self._need_tables
        out = 0
        for trigger, bits in tables[j]:
            if mask & trigger:
                out |= bits
        return out

    def related(self, a: int, b: int, j: Index) -> bool:
        """``a ▷_J b`` for atom masks ``a`` and ``b``."""
        _, symmetric = self._need_tables
        if self.need(a, j) & ~b:
            return False
        if symmetric and self.need(b, j) & ~a:
            return False
        return True

    def _relations(self, masks: Sequence[int]) -> dict[Index, list[int]]:
        _, symmetric = self._need_tables
        out = {}
        for j in self.subsets:
            needs = [self.need(m, j) for m in masks]
            rows = []
            for a, ma in enumerate(masks):
                row = 0
                for b, mb in enumerate(masks):
                    if needs[a] & ~mb:
                        continue
                    if symmetric and needs[b] & ~ma:
                        continue
                    row |= 1 << b
                rows.append(row)
            out[j] = rows
        return out

    # -- elimination -------------------------------------------------------

    def _eliminate(self, masks: list[int]) -> list[int]:
        from .semantics import transitive_closure_masks

        caps = [f for f in self.formulas if isinstance(f, Cap)]
        ucls = [f for f in self.formulas if isinstance(f, Ucl)]
        alive = list(masks)
        while True:
            succ = self._relations(alive)
            lacking = {}
            for f in {g.sub for g in caps + ucls}:
                bit = self._bit(f)
                lacking[f] = sum(1 << k for k, m in enumerate(alive) if not m & bit)
            reach = {}
            for f in ucls:
                if f.index not in reach:
                    union = [0] * len(alive)
                    for i in f.index:
                        union = [x | y for x, y in zip(union, succ[(i,)])]
                    reach[f.index] = transitive_closure_masks(union)
            keep = []
            for k, m in enumerate(alive):
                reason = None
                for f in caps:
                    if not m & self._bit(f) and not succ[f.index][k] & lacking[f.sub]:
                        reason = f"no witness for ~{render(f)}"
                        break
                if reason is None:
                    for f in ucls:
                        if not m & self._bit(f) and not reach[f.index][k] & lacking[f.sub]:
                            reason = f"eventuality ~{render(f)} unfulfilled"
                            break
                if reason is None and self.base_logic == "D":
                    for i in self.sig.iota:
                        if not succ[(i,)][k]:
                            reason = f"no successor for index {i}"
                            break
                if reason is None:
                    keep.append(m)
                else:
                    self.eliminated.append((m, reason))
            if len(keep) == len(alive):
                return keep
            alive = keep

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.atoms)

    def contains(self, atom: int, f: Formula) -> bool:
        bit = self.fpos.get(f)
        return bit is not None and bool(self.masks[atom] >> bit & 1)

    def atoms_with(self, f: Formula) -> list[int]:
        return [k for k in range(len(self.atoms)) if self.contains(k, f)]


def atom_space(sig: Signature, **kwargs) -> AtomSpace:
    return AtomSpace(sig, **kwargs)


def enumerate_atoms(sig: Signature, **kwargs) -> list[Atom]:
    """Atoms of ``sig`` in deterministic (rendered-lexicographic) order."""
    return AtomSpace(sig, **kwargs).atoms


def canonical_relation(space: AtomSpace, index: Iterable[int]) -> frozenset:
    """``▷_I`` as a set of atom-number pairs."""
    j = make_index(index)
    if not set(j) <= set(space.sig.iota):
        raise ValueError(f"index {j} is not inside iota {space.sig.iota}")
    return frozenset((a, b) for a, row in enumerate(space.succ[j]) for b in _bits(row))


# -- standard models ---------------------------------------------------------

class StandardModel:
    """Canonical paths of length <= depth with the standard relations.

    With ``pruned=True`` only a prefix-closed subset of paths is kept: the
    chosen roots plus one witness per unmet demand at every level. Relations
    are those of the full model restricted to the kept paths.
    """

    def __init__(self, space: AtomSpace, depth: int, pruned: bool = False,
                 roots: Optional[Sequence[int]] = None):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.space = space
        self.sig = space.sig
        self.depth = depth
        self.pruned = pruned
        self.base_logic = space.base_logic
        self.tail: list[int] = []
        self.parent: list[int] = []
        self.edge: list[Optional[Index]] = []
        self.level: list[int] = []
        self.children: list[list[int]] = []
        self._grow(list(range(len(space.atoms))) if roots is None else list(roots))
        self.paths = [self._path(k) for k in range(len(self.tail))]
        self.names = [self._name(k) for k in range(len(self.tail))]
        self.model = self._assemble()

    # -- path tree ---------------------------------------------------------

    def _add(self, tail: int, parent: int, edge: Optional[Index]) -> int:
        k = len(self.tail)
        self.tail.append(tail)
        self.parent.append(parent)
        self.edge.append(edge)
        self.level.append(0 if parent < 0 else self.level[parent] + 1)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(k)
        return k

    def _grow(self, roots: list[int]) -> None:
        if self.pruned:
            self._grow_pruned(roots)
            return
        frontier = [self._add(a, -1, None) for a in roots]
        for _ in range(self.depth):
            nxt = []
            for s in frontier:
                for j, b in self._extensions(s):
                    nxt.append(self._add(b, s, j))
            frontier = nxt

    def _child(self, s: int, j: Index, b: int) -> tuple[int, bool]:
        for c in self.children[s]:
            if self.edge[c] == j and self.tail[c] == b:
                return c, False
        return self._add(b, s, j), True

    def _grow_pruned(self, roots: list[int]) -> None:
        """Breadth-first: every kept node below the bound gets its own witnesses."""
        sp = self.space
        ucls = [f for f in sp.formulas if isinstance(f, Ucl)]
        queue = deque(self._add(a, -1, None) for a in roots)
        while queue:
            s = queue.popleft()
            if self.level[s] >= self.depth:
                continue
            for j, b in self._extensions(s):
                c, new = self._child(s, j, b)
                if new:
                    queue.append(c)
            for f in ucls:
                if sp.contains(self.tail[s], f):
                    continue
                node = s
                for j, b in _shortest_chain(sp, self.tail[s], f):
                    if self.level[node] >= self.depth:
                        break
                    node, new = self._child(node, j, b)
                    if new:
                        queue.append(node)

    def _extensions(self, s: int) -> list[tuple[Index, int]]:
        sp = self.space
        a = self.tail[s]
        if not self.pruned:
            return [(j, b) for j in sp.subsets for b in _bits(sp.succ[j][a])]
        out = []
        for f in sp.formulas:
            if isinstance(f, Cap) and not sp.contains(a, f):
                for b in _bits(sp.succ[f.index][a]):
                    if not sp.contains(b, f.sub):
                        out.append((f.index, b))
                        break
        if self.base_logic == "D":
            for i in self.sig.iota:
                if not any(i in j for j, _ in out):
                    row = sp.succ[(i,)][a]
                    if row:
                        out.append(((i,), next(_bits(row))))
        seen = set()
        return [x for x in out if not (x in seen or seen.add(x))]

    def _path(self, k: int) -> ModelPath:
        tails, edges = [], []
        while k >= 0:
            tails.append(self.tail[k])
            if self.edge[k] is not None:
                edges.append(self.edge[k])
            k = self.parent[k]
        return ModelPath(tuple(reversed(tails)), tuple(reversed(edges)))

    def _name(self, k: int) -> str:
        p = self.paths[k]
        parts = [str(p.states[0])]
        for idx, st in zip(p.indices, p.states[1:]):
            parts += [",".join(map(str, idx)), str(st)]
        return ":".join(parts)

    # -- relations -----------------------------------------------------------

    def _relation(self, i: int) -> list[int]:
        n = len(self.tail)
        logic = self.base_logic
        out = [0] * n
        if logic in ("K", "D", "T", "B"):
            for s in range(n):
                for c in self.children[s]:
                    if i in self.edge[c]:
                        out[s] |= 1 << c
                        if logic == "B":
                            out[c] |= 1 << s
                if logic in REFLEXIVE_BASES:
                    out[s] |= 1 << s
            return out
        if logic == "S4":
            for s in reversed(range(n)):  # children come after parents
                m = 1 << s
                for c in self.children[s]:
                    if i in self.edge[c]:
                        m |= out[c]
                out[s] = m
            return out
        # S5: group states by their i-root
        root = [0] * n
        for s in range(n):
            p = self.parent[s]
            root[s] = root[p] if p >= 0 and i in self.edge[s] else s
        classes: dict[int, int] = {}
        for s in range(n):
            classes[root[s]] = classes.get(root[s], 0) | 1 << s
        return [classes[root[s]] for s in range(n)]

    def _assemble(self) -> KripkeModel:
        succ = {i: self._relation(i) for i in self.sig.iota}
        props = sorted(f.name for f in self.space.formulas if isinstance(f, Prop))
        val = {p: [self.names[k] for k in range(len(self.tail))
                   if self.space.contains(self.tail[k], Prop(p))] for p in props}
        return KripkeModel.from_masks(self.names, succ, val)

    # -- helpers -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.tail)

    @property
    def frontier_mask(self) -> int:
        return sum(1 << k for k, lv in enumerate(self.level) if lv >= self.depth)

    def member_mask(self, f: Formula) -> int:
        sp = self.space
        return sum(1 << k for k, a in enumerate(self.tail) if sp.contains(a, f))

    def interior_states(self) -> int:
        return sum(1 for lv in self.level if lv < self.depth)

    def potential_tails(self, kind: str, index: Index) -> list[int]:
        """Per state, the atoms (as a mask) that a deeper truncation could add
        as ``kind``-successors. Empty everywhere for an untruncated model."""
        sp = self.space
        index = make_index(index)
        from .semantics import transitive_closure_masks

        if kind == "ucl":
            union = [0] * len(sp.atoms)
            for i in index:
                union = [x | y for x, y in zip(union, sp.succ[(i,)])]
            step = transitive_closure_masks(union)
        elif self.base_logic in ("S4", "S5"):
            step = transitive_closure_masks(sp.succ[index])
        else:
            step = sp.succ[index]
        grow = {k: step[self.tail[k]] for k in _bits(self.frontier_mask) if step[self.tail[k]]}
        out = [0] * len(self)
        if not grow:
            return out
        if kind == "cap" and self.base_logic not in ("S4", "S5"):
            for k, m in grow.items():
                out[k] = m
            return out
        succ = self.model.successors(kind, index)
        for s in range(len(self)):
            reach = succ[s] | 1 << s if kind == "ucl" else succ[s]
            for k, m in grow.items():
                if reach >> k & 1:
                    out[s] |= m
        return out

    def open_mask(self, kind: str, index: Index) -> int:
        """States whose ``kind``-successors grow in a deeper truncation."""
        return sum(1 << s for s, m in enumerate(self.potential_tails(kind, index)) if m)


def _shortest_chain(space: AtomSpace, start: int, f: Ucl) -> list[tuple[Index, int]]:
    """Shortest ▷_{i}-chain (i in I, length >= 1) from ``start`` to an atom lacking f.sub."""
    seen = set()
    level = [(start, [])]
    while level:
        nxt = []
        for a, chain in level:
            for i in f.index:
                for b in _bits(space.succ[(i,)][a]):
                    if b in seen:
                        continue
                    seen.add(b)
                    step = chain + [((i,), b)]
                    if not space.contains(b, f.sub):
                        return step
                    nxt.append((b, step))
        level = nxt
    return []


def standard_model_size(space: AtomSpace, depth: int) -> int:
    """Number of canonical paths of length <= depth, without building them."""
    ways = [1] * len(space.atoms)  # paths of the current length starting at each atom
    total = sum(ways)
    for _ in range(depth):
        ways = [sum(ways[b] for j in space.subsets for b in _bits(space.succ[j][a]))
                for a in range(len(space.atoms))]
        total += sum(ways)
    return total


def build_standard_model(sig: Signature, depth: Optional[int] = None, *, pruned: bool = False,
                         roots: Optional[Sequence[int]] = None, space: Optional[AtomSpace] = None,
                         **space_kwargs) -> StandardModel:
    """Standard model of ``sig`` truncated at ``depth`` (default: md(alpha) + 1)."""
    if space is None:
        space = AtomSpace(sig, **space_kwargs)
    if depth is None:
        depth = modal_depth(sig.alpha) + 1
    return StandardModel(space, depth, pruned=pruned, roots=roots)


# -- audits ----------------------------------------------------------------

_LOGIC_PROPERTIES = {
    "K": (),
    "D": ("serial",),
    "T": ("reflexive",),
    "B": ("reflexive", "symmetric"),
    "S4": ("reflexive", "transitive"),
    "S5": ("reflexive", "symmetric", "transitive"),
}

MAX_LISTED = 50


def _report(kind: str, sig: Signature, violations: list, **extra) -> dict:
    out = {"audit": kind, "signature": sig.describe()}
    out.update(extra)
    out["violation_count"] = len(violations)
    out["violations"] = violations[:MAX_LISTED]
    out["ok"] = not violations
    return out


def audit_canonicity(sig_or_space, **space_kwargs) -> dict:
    """Per-logic properties of ▷_I on the atoms, plus monotonicity in I."""
    space = sig_or_space if isinstance(sig_or_space, AtomSpace) else AtomSpace(sig_or_space, **space_kwargs)
    n = len(space.atoms)
    props = _LOGIC_PROPERTIES[space.base_logic]
    violations = []
    checked = []
    for j in space.subsets:
        rows = space.succ[j]
        for cond in props:
            if cond == "serial" and len(j) > 1:
                continue  # only singleton indices need successors
            checked.append(f"{cond} {list(j)}")
            for a in range(n):
                m = rows[a]
                if cond == "serial":
                    bad = not m
                elif cond == "reflexive":
                    bad = not m >> a & 1
                elif cond == "symmetric":
                    bad = any(not rows[b] >> a & 1 for b in _bits(m))
                else:
                    bad = any(rows[b] & ~m for b in _bits(m))
                if bad:
                    violations.append({"property": cond, "index": list(j), "atom": a})
        checked.append(f"content {list(j)}")
        for f in space.formulas:
            if isinstance(f, Cap) and f.index == j:
                lacking = sum(1 << b for b in range(n) if not space.contains(b, f.sub))
                for a in space.atoms_with(f):
                    if rows[a] & lacking:
                        violations.append({"property": "content", "index": list(j), "atom": a,
                                           "formula": render(f)})
    for i in space.subsets:
        for j in space.subsets:
            if set(i) < set(j):
                checked.append(f"monotone {list(j)} <= {list(i)}")
                for a in range(n):
                    extra = space.succ[j][a] & ~space.succ[i][a]
                    for b in _bits(extra):
                        violations.append({"property": "monotone", "index": list(i), "wider": list(j),
                                           "pair": [a, b]})
    return _report("canonicity", space.sig, violations, atoms=n, relation=space.relation_mode,
                   checked=checked)


def audit_standardness(M: StandardModel) -> dict:
    """Frame conditions of the logic on every relation; frontier seriality gaps are expected."""
    frame = FrameClass(M.base_logic)
    frontier = M.frontier_mask
    pos = {name: k for k, name in enumerate(M.names)}
    violations, expected = [], []
    for i, cond, state in frame_violations(M.model, frame, M.sig.iota):
        entry = {"index": i, "condition": cond, "state": state}
        if cond == "serial" and frontier >> pos[state] & 1:
            expected.append(entry)
        else:
            violations.append(entry)
    return _report("standardness", M.sig, violations, depth=M.depth, states=len(M),
                   frame=frame.value, expected_frontier=len(expected),
                   expected_examples=expected[:5])


def _three_valued(M: StandardModel) -> dict:
    """(true mask, false mask) for every closure formula; the rest is undetermined."""
    n = len(M)
    full = (1 << n) - 1
    values: dict = {}
    for f in M.space.formulas:
        if isinstance(f, Prop):
            t = M.model.prop_mask(f.name)
            values[f] = (t, full & ~t)
        elif isinstance(f, Neg):
            t, fl = values[f.sub]
            values[f] = (fl, t)
        elif isinstance(f, Impl):
            lt, lf = values[f.left]
            rt, rf = values[f.right]
            values[f] = (lf | rt, lt & rf)
        else:
            if isinstance(f, Box):
                kind, index = "single", (f.i,)
                open_ = M.open_mask("cap", index)
            elif isinstance(f, Cap):
                kind, index = "cap", f.index
                open_ = M.open_mask("cap", index)
            else:
                kind, index = "ucl", f.index
                open_ = M.open_mask("ucl", index)
            succ = M.model.successors(kind, index)
            st, sf = values[f.sub]
            t = fl = 0
            for s, m in enumerate(succ):
                if m & sf:
                    fl |= 1 << s
                elif not (open_ >> s & 1) and not m & ~st:
                    t |= 1 << s
            values[f] = (t, fl)
    return values


def audit_truth(sig: Signature, M: StandardModel) -> dict:
    """Compare tail membership with truth wherever the truncation decides it.

    A modal formula counts as decided at a state when no deeper truncation
    could add a relevant successor, or when a known successor already
    refutes it. Undecided pairs are counted, not judged.
    """
    values = _three_valued(M)
    decided = undetermined = interior_undetermined = 0
    violations = []
    for f in M.space.formulas:
        t, fl = values[f]
        member = M.member_mask(f)
        decided += bin(t | fl).count("1")
        und = ~(t | fl) & ((1 << len(M)) - 1)
        undetermined += bin(und).count("1")
        interior_undetermined += sum(1 for s in _bits(und) if M.level[s] < M.depth)
        for s in _bits((t & ~member) | (fl & member)):
            violations.append({"state": M.names[s], "formula": render(f),
                               "member": bool(member >> s & 1), "value": bool(t >> s & 1)})
    violations.sort(key=lambda v: (v["state"], v["formula"]))
    interior = M.interior_states()
    return _report("truth", sig, violations, depth=M.depth, states=len(M), interior_states=interior,
                   no_interior_states=interior == 0, decided=decided, undetermined=undetermined,
                   interior_undetermined=interior_undetermined)


def audit_existence(sig: Signature, M: StandardModel) -> dict:
    """Every missing [&I]phi / [+I]phi at a state has a refuting successor.

    A witness that only appears past the depth bound is counted as
    ``beyond_depth``; those are read off the atom graph, so a state is a
    violation exactly when no truncation depth would ever supply one.
    """
    sp = M.space
    n = len(M)
    found = beyond = 0
    violations = []
    for f in sp.formulas:
        if not isinstance(f, (Cap, Ucl)):
            continue
        kind = "cap" if isinstance(f, Cap) else "ucl"
        succ = M.model.successors(kind, f.index)
        potential = M.potential_tails(kind, f.index)
        lacking = ((1 << n) - 1) & ~M.member_mask(f.sub)
        lacking_atoms = sum(1 << a for a in range(len(sp.atoms)) if not sp.contains(a, f.sub))
        for s in _bits(((1 << n) - 1) & ~M.member_mask(f)):
            if succ[s] & lacking:
                found += 1
            elif potential[s] & lacking_atoms:
                beyond += 1
            else:
                violations.append({"state": M.names[s], "formula": render(f), "clause": kind})
    violations.sort(key=lambda v: (v["state"], v["formula"]))
    interior = M.interior_states()
    return _report("existence", sig, violations, depth=M.depth, states=n, interior_states=interior,
                   no_interior_states=interior == 0, witnessed=found, beyond_depth=beyond)
