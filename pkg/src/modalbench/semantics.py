"""Kripke models, relation algebra for the compound modalities, and truth."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .syntax import Box, Cap, Formula, Impl, Index, Neg, Prop, Ucl, make_index

__all__ = [
    "ModelError",
    "FrameClass",
    "KripkeModel",
    "compose_relation",
    "satisfies",
    "valid_on_model",
    "frame_check",
    "frame_violations",
    "transitive_closure_masks",
    "ModelPath",
    "model_to_json",
    "model_from_json",
]


class ModelError(ValueError):
    pass


class FrameClass(enum.Enum):
    K = "K"
    D = "D"
    T = "T"
    B = "B"
    S4 = "S4"
    S5 = "S5"

    @property
    def conditions(self) -> tuple[str, ...]:
        return _CONDITIONS[self]


_CONDITIONS = {
    FrameClass.K: (),
    FrameClass.D: ("serial",),
    FrameClass.T: ("reflexive",),
    FrameClass.B: ("reflexive", "symmetric"),
    FrameClass.S4: ("reflexive", "transitive"),
    FrameClass.S5: ("reflexive", "symmetric", "transitive"),
}


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class KripkeModel:
    """A finite model ``(S, R, V)``.

    Relations are kept as one successor bitmask per state; the pair-set view
    in :attr:`rel` is derived on demand.
    """

    __slots__ = ("states", "_pos", "_succ", "val", "_rel", "_cache", "_ext")

    def __init__(
        self,
        states: Sequence[Hashable],
        rel: Mapping[int, Iterable[tuple[Hashable, Hashable]]],
        val: Mapping[str, Iterable[Hashable]],
    ):
        succ = {}
        pos = self._init_states(states)
        for i, pairs in rel.items():
            masks = [0] * len(self.states)
            for a, b in pairs:
                if a not in pos or b not in pos:
                    raise ModelError(f"relation {i} mentions unknown state in {(a, b)}")
                masks[pos[a]] |= 1 << pos[b]
            succ[int(i)] = masks
        self._finish(succ, val)

    @classmethod
    def from_masks(
        cls,
        states: Sequence[Hashable],
        succ: Mapping[int, Sequence[int]],
        val: Mapping[str, Iterable[Hashable]],
    ) -> "KripkeModel":
        self = cls.__new__(cls)
        self._init_states(states)
        n = len(self.states)
        limit = (1 << n) - 1
        checked = {}
        for i, masks in succ.items():
            masks = list(masks)
            if len(masks) != n or any(m & ~limit for m in masks):
                raise ModelError(f"malformed successor masks for relation {i}")
            checked[int(i)] = masks
        self._finish(checked, val)
        return self

    def _init_states(self, states):
        self.states = tuple(states)
        if not self.states:
            raise ModelError("a model needs at least one state")
        self._pos = {s: k for k, s in enumerate(self.states)}
        if len(self._pos) != len(self.states):
            raise ModelError("duplicate state names")
        return self._pos

    def _finish(self, succ, val):
        self._succ = dict(sorted(succ.items()))
        checked = {}
        for p, members in val.items():
            members = frozenset(members)
            unknown = members - self._pos.keys()
            if unknown:
                raise ModelError(f"valuation of {p} mentions unknown states {sorted(map(str, unknown))}")
            checked[p] = members
        self.val = dict(sorted(checked.items()))
        self._rel = None
        self._cache = {}
        self._ext = {}

    # -- views ---------------------------------------------------------------

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self._succ)

    @property
    def rel(self) -> dict[int, frozenset]:
        if self._rel is None:
            self._rel = {i: self._pairs(m) for i, m in self._succ.items()}
        return self._rel

    def _pairs(self, masks: Sequence[int]) -> frozenset:
        st = self.states
        return frozenset((st[a], st[b]) for a, m in enumerate(masks) for b in _bits(m))

    def position(self, state: Hashable) -> int:
        try:
            return self._pos[state]
        except KeyError:
            raise ModelError(f"unknown state {state!r}") from None

    def state_mask(self, states: Iterable[Hashable]) -> int:
        out = 0
        for s in states:
            out |= 1 << self.position(s)
        return out

    def states_of(self, mask: int) -> list:
        return [self.states[k] for k in _bits(mask)]

    def successors(self, kind: str, index: Iterable[int]) -> list[int]:
        """Successor masks of ``single i`` / ``cap I`` / ``ucl I``."""
        index = make_index(index)
        key = (kind, index)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        for i in index:
            if i not in self._succ:
                raise ModelError(f"relation {i} is not defined in the model")
        if kind == "single":
            if len(index) != 1:
                raise ModelError("single mode takes one index")
            out = self._succ[index[0]]
        elif kind == "cap":
            out = list(self._succ[index[0]])
            for i in index[1:]:
                out = [a & b for a, b in zip(out, self._succ[i])]
        elif kind == "ucl":
            union = [0] * len(self.states)
            for i in index:
                union = [a | b for a, b in zip(union, self._succ[i])]
            out = transitive_closure_masks(union)
        else:
            raise ModelError(f"unknown relation mode {kind!r}")
        self._cache[key] = out
        return out

    def prop_mask(self, name: str) -> int:
        return self.state_mask(self.val.get(name, ()))

    def extension(self, f: Formula) -> int:
        """Bitmask of the states where ``f`` holds."""
        hit = self._ext.get(f)
        if hit is not None:
            return hit
        full = (1 << len(self.states)) - 1
        if isinstance(f, Prop):
            out = self.prop_mask(f.name)
        elif isinstance(f, Neg):
            out = full & ~self.extension(f.sub)
        elif isinstance(f, Impl):
            out = (full & ~self.extension(f.left)) | self.extension(f.right)
        else:
            if isinstance(f, Box):
                succ = self.successors("single", (f.i,))
            elif isinstance(f, Cap):
                succ = self.successors("cap", f.index)
            else:
                succ = self.successors("ucl", f.index)
            inner = self.extension(f.sub)
            out = 0
            for k, m in enumerate(succ):
                if not m & ~inner:
                    out |= 1 << k
        self._ext[f] = out
        return out

    def __repr__(self) -> str:
        return f"KripkeModel(states={len(self.states)}, indices={list(self.indices)})"


def transitive_closure_masks(succ: Sequence[int]) -> list[int]:
    """Strict transitive closure (paths of length >= 1) of a bitmask relation.

    Tarjan's SCC pass followed by accumulation over the condensation.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(list(_bits(succ[root]))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(list(_bits(succ[w])))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = len(comps)
                    members.append(w)
                    if w == v:
                        break
                comps.append(members)
    # Tarjan emits components in reverse topological order: successors first.
    reach = [0] * len(comps)
    for c, members in enumerate(comps):
        mask_members = 0
        for v in members:
            mask_members |= 1 << v
        out = 0
        for v in members:
            for w in _bits(succ[v]):
                out |= 1 << w
                if comp[w] != c:
                    out |= reach[comp[w]]
        if out & mask_members:
            out |= mask_members
        reach[c] = out
    return [reach[comp[v]] for v in range(n)]


def _mode(mode) -> tuple[str, Index]:
    kind, idx = mode
    if isinstance(idx, int):
        idx = (idx,)
    return kind, make_index(idx)


def compose_relation(model: KripkeModel, mode) -> frozenset:
    """Pair set of ``("single", i)``, ``("cap", I)`` or ``("ucl", I)``."""
    kind, index = _mode(mode)
    return model._pairs(model.successors(kind, index))


def satisfies(model: KripkeModel, state: Hashable, f: Formula) -> bool:
    pos = model.position(state)
    return bool(model.extension(f) >> pos & 1)


def valid_on_model(model: KripkeModel, f: Formula) -> bool:
    full = (1 << len(model.states)) - 1
    return model.extension(f) == full


def frame_violations(
    model: KripkeModel, frame: FrameClass, indices: Iterable[int]
) -> list[tuple[int, str, Hashable]]:
    """``(i, condition, state)`` triples; empty iff the frame check passes."""
    out = []
    for i in sorted(set(indices)):
        masks = model.successors("single", (i,))
        for cond in frame.conditions:
            for k, m in enumerate(masks):
                if not _holds(cond, masks, k, m):
                    out.append((i, cond, model.states[k]))
    return out


def _holds(cond: str, masks: Sequence[int], k: int, m: int) -> bool:
    if cond == "serial":
        return m != 0
    if cond == "reflexive":
        return bool(m >> k & 1)
    if cond == "symmetric":
        return all(masks[t] >> k & 1 for t in _bits(m))
    if cond == "transitive":
        return all(not masks[t] & ~m for t in _bits(m))
    if cond == "euclidean":
        return all(not m & ~masks[t] for t in _bits(m))
    raise ValueError(cond)


def frame_check(model: KripkeModel, frame: FrameClass, indices: Iterable[int]) -> bool:
    indices = list(indices)
    for i in indices:
        if i not in model.indices:
            raise ModelError(f"relation {i} is not defined in the model")
    return not frame_violations(model, frame, indices)


# -- paths -------------------------------------------------------------------

@dataclass(frozen=True)
class ModelPath:
    """Alternating sequence ``<s0, I0, s1, ..., I(n-1), sn>``.

    ``states`` may hold model states or atoms; ``indices`` holds canonical
    index tuples.
    """

    states: tuple
    indices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "indices", tuple(make_index(i) for i in self.indices))
        if not self.states:
            raise ValueError("a path is nonempty")
        if len(self.indices) != len(self.states) - 1:
            raise ValueError("a path alternates states and indices")

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def tail(self):
        return self.states[-1]

    def is_i_path(self, i: int) -> bool:
        return all(i in idx for idx in self.indices)

    def is_index_path(self, index: Iterable[int]) -> bool:
        need = set(make_index(index))
        return all(need <= set(idx) for idx in self.indices)

    def is_initial_segment_of(self, other: "ModelPath") -> bool:
        m = len(self)
        return (
            m <= len(other)
            and self.states == other.states[: m + 1]
            and self.indices == other.indices[:m]
        )

    def diff(self, prefix: "ModelPath") -> "ModelPath":
        """``self \\ prefix``; the prefix's tail is kept as first state."""
        if not prefix.is_initial_segment_of(self):
            raise ValueError("diff needs an initial segment")
        m = len(prefix)
        return ModelPath(self.states[m:], self.indices[m:])

    def extend(self, index: Iterable[int], state) -> "ModelPath":
        return ModelPath(self.states + (state,), self.indices + (make_index(index),))

    def valid_in(self, model: KripkeModel) -> bool:
        for x, idx in enumerate(self.indices):
            succ = model.successors("cap", idx)
            a = model.position(self.states[x])
            b = model.position(self.states[x + 1])
            if not succ[a] >> b & 1:
                return False
        return True


# -- JSON exchange -----------------------------------------------------------

def model_to_json(model: KripkeModel, **dump_kwargs) -> str:
    order = model._pos
    rel = {
        str(i): sorted(([a, b] for a, b in pairs), key=lambda ab: (order[ab[0]], order[ab[1]]))
        for i, pairs in model.rel.items()
    }
    val = {p: sorted(members, key=order.__getitem__) for p, members in model.val.items()}
    doc = {"states": list(model.states), "rel": rel, "val": val}
    return json.dumps(doc, **dump_kwargs)


def model_from_json(text_or_doc) -> KripkeModel:
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, str) else text_or_doc
    if not isinstance(doc, dict):
        raise ModelError("model document must be an object")
    extra = set(doc) - {"states", "rel", "val"}
    if extra:
        raise ModelError(f"unknown keys {sorted(extra)}")
    try:
        states = doc["states"]
        rel = doc["rel"]
        val = doc.get("val", {})
    except KeyError as e:
        raise ModelError(f"missing key {e}") from None
    if not all(isinstance(s, str) for s in states):
        raise ModelError("state names must be strings")
    parsed = {}
    for key, pairs in rel.items():
        if not key.isdigit():
            raise ModelError(f"relation keys are decimal strings, got {key!r}")
        parsed[int(key)] = [tuple(p) for p in pairs]
    return KripkeModel(states, parsed, val)
