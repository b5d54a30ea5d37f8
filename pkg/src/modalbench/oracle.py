"""Exhaustive small-model search, vectorized over batches of models.

Models with ``n`` states are encoded as uint8 bitmask rows: ``rel[b, i, k]``
is the successor set of state ``k`` under the ``i``-th relevant relation of
model ``b``, and a formula's extension is one uint8 mask per model. Every
model of a size is visited in mixed-radix order (relation choice per index,
then valuation), so the search is complete up to the size bound unless the
model count exceeds the budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .semantics import FrameClass, KripkeModel
from .syntax import Box, Cap, Formula, Impl, Neg, Prop, Ucl, indices_of, iter_subformulas, props_of

__all__ = ["SearchResult", "relation_options", "count_models", "search", "search_many", "DEFAULT_BUDGET"]

MAX_ORACLE_STATES = 8
DEFAULT_BUDGET = 1 << 22
CHUNK = 1 << 15


@dataclass
class SearchResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: Optional[KripkeModel] = None
    state: Optional[str] = None
    bound: int = 0  # largest size searched exhaustively
    models_checked: int = 0
    reason: str = ""


def _rows_ok(rows: np.ndarray, n: int, cond: str) -> np.ndarray:
    """Boolean filter over relation candidates ``rows`` (shape m x n)."""
    ok = np.ones(len(rows), dtype=bool)
    for k in range(n):
        rk = rows[:, k]
        if cond == "transitive":
            for j in range(n):
                has = (rk >> j) & 1
                ok &= (has == 0) | ((rows[:, j] & ~rk) == 0)
        elif cond == "symmetric":
            for j in range(n):
                has = (rk >> j) & 1
                ok &= (has == 0) | (((rows[:, j] >> k) & 1) == 1)
    return ok


def _product_rows(choices: Sequence[Sequence[int]]) -> np.ndarray:
    return np.array(list(itertools.product(*choices)), dtype=np.uint8).reshape(-1, len(choices))


def _partitions(n: int):
    def rec(k, blocks):
        if k == n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(k)
            yield from rec(k + 1, blocks)
            b.pop()
        blocks.append([k])
        yield from rec(k + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


@lru_cache(maxsize=None)
def relation_options(frame: FrameClass, n: int) -> np.ndarray:
    """Every relation on ``n`` states in ``frame``, one row of masks each."""
    if not 1 <= n <= MAX_ORACLE_STATES:
        raise ValueError(f"state count must be in 1..{MAX_ORACLE_STATES}")
    full = range(1 << n)
    if frame is FrameClass.K:
        return _product_rows([full] * n)
    if frame is FrameClass.D:
        return _product_rows([range(1, 1 << n)] * n)
    if frame is FrameClass.T:
        return _product_rows([[m for m in full if m >> k & 1] for k in range(n)])
    if frame is FrameClass.B:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        out = np.zeros((1 << len(pairs), n), dtype=np.uint8)
        for k in range(n):
            out[:, k] = 1 << k
        codes = np.arange(1 << len(pairs))
        for bit, (a, b) in enumerate(pairs):
            on = ((codes >> bit) & 1).astype(np.uint8)
            out[:, a] |= on << b
            out[:, b] |= on << a
        return out
    if frame is FrameClass.S4:
        rows = relation_options(FrameClass.T, n)
        return rows[_rows_ok(rows, n, "transitive")]
    out = []
    for blocks in _partitions(n):
        row = [0] * n
        for block in blocks:
            m = sum(1 << k for k in block)
            for k in block:
                row[k] = m
        out.append(row)
    return np.array(out, dtype=np.uint8)


def count_models(frame: FrameClass, n: int, n_indices: int, n_props: int) -> int:
    if frame in (FrameClass.S4, FrameClass.S5) or n <= 4:
        per = len(relation_options(frame, n))
    else:
        per = {
            FrameClass.K: 2 ** (n * n),
            FrameClass.D: (2 ** n - 1) ** n,
            FrameClass.T: 2 ** (n * n - n),
            FrameClass.B: 2 ** (n * (n - 1) // 2),
        }[frame]
    return per ** n_indices * 2 ** (n * n_props)


class _Batch:
    """Extensions of formulas over one chunk of models."""

    def __init__(self, n: int, rel: dict, val: dict):
        self.n = n
        self.rel = rel  # index -> (B, n) uint8
        self.val = val  # prop -> (B,) uint8
        self.memo: dict = {}
        self.full = np.uint8((1 << n) - 1)

    def succ(self, kind: str, index: tuple) -> np.ndarray:
        key = (kind, index)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if kind == "cap":
            out = self.rel[index[0]].copy()
            for i in index[1:]:
                out &= self.rel[i]
        else:
            out = self.rel[index[0]].copy()
            for i in index[1:]:
                out |= self.rel[i]
            for j in range(self.n):  # Warshall over bitmask rows
                row_j = out[:, j]
                for k in range(self.n):
                    has = ((out[:, k] >> j) & 1).astype(bool)
                    out[:, k] = np.where(has, out[:, k] | row_j, out[:, k])
        self.memo[key] = out
        return out

    def box(self, succ: np.ndarray, sub: np.ndarray) -> np.ndarray:
        out = np.zeros(len(sub), dtype=np.uint8)
        miss = ~sub & self.full
        for k in range(self.n):
            out |= ((succ[:, k] & miss) == 0).astype(np.uint8) << k
        return out

    def ext(self, f: Formula) -> np.ndarray:
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Prop):
            out = self.val[f.name]
        elif isinstance(f, Neg):
            out = ~self.ext(f.sub) & self.full
        elif isinstance(f, Impl):
            out = (~self.ext(f.left) | self.ext(f.right)) & self.full
        elif isinstance(f, Box):
            out = self.box(self.rel[f.i], self.ext(f.sub))
        elif isinstance(f, Cap):
            out = self.box(self.succ("cap", f.index), self.ext(f.sub))
        else:
            out = self.box(self.succ("ucl", f.index), self.ext(f.sub))
        self.memo[f] = out
        return out


def _decode(ids: np.ndarray, radices: list[int]) -> list[np.ndarray]:
    digits = []
    rest = ids
    for r in radices:
        digits.append(rest % r)
        rest = rest // r
    return digits


def _witness(n: int, indices, props, rel, val, b: int, state: int) -> tuple[KripkeModel, str]:
    names = [f"w{k}" for k in range(n)]
    succ = {i: [int(m) for m in rel[i][b]] for i in indices}
    valuation = {p: [names[k] for k in range(n) if int(val[p][b]) >> k & 1] for p in props}
    return KripkeModel.from_masks(names, succ, valuation), names[state]


def search_many(formulas: Sequence[Formula], frame: FrameClass, max_states: int,
                budget: int = DEFAULT_BUDGET, indices=None, props=None) -> list[SearchResult]:
    """Search one shared model space for every formula; one result each.

    The space is over the union of the formulas' indices and propositions
    (or the given ones). A formula stays ``unknown`` when some size up to
    ``max_states`` has more models than ``budget`` and no witness was found
    at smaller sizes.
    """
    formulas = list(formulas)
    if indices is None:
        indices = sorted(set().union(*(indices_of(f) for f in formulas))) if formulas else []
    if props is None:
        props = sorted(set().union(*(props_of(f) for f in formulas))) if formulas else []
    indices, props = list(indices), list(props)
    results = [SearchResult("unknown") for _ in formulas]
    pending = list(range(len(formulas)))
    for n in range(1, max_states + 1):
        if not pending:
            break
        total = count_models(frame, n, len(indices), len(props))
        if total > budget:
            for k in pending:
                results[k].reason = (f"{total} models with {n} states exceed the budget of {budget}; "
                                     f"exhaustive up to {n - 1} states")
            return results
        opts = relation_options(frame, n)
        radices = [len(opts)] * len(indices) + [1 << n] * len(props)
        for start in range(0, total, CHUNK):
            ids = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            digits = _decode(ids, radices)
            rel = {i: opts[digits[x]] for x, i in enumerate(indices)}
            val = {p: digits[len(indices) + x].astype(np.uint8) for x, p in enumerate(props)}
            batch = _Batch(n, rel, val)
            still = []
            for k in pending:
                ext = batch.ext(formulas[k])
                hits = np.flatnonzero(ext)
                if len(hits):
                    b = int(hits[0])
                    state = (int(ext[b]) & -int(ext[b])).bit_length() - 1
                    model, name = _witness(n, indices, props, rel, val, b, state)
                    res = results[k]
                    res.status, res.model, res.state = "sat", model, name
                    res.models_checked += b + 1
                else:
                    results[k].models_checked += len(ids)
                    still.append(k)
            pending = still
            if not pending:
                break
        for k in pending:
            results[k].bound = n
    for k in pending:
        results[k].status = "unsat"
        results[k].reason = f"no model with at most {max_states} states"
    return results


def search(f: Formula, frame: FrameClass, max_states: int, budget: int = DEFAULT_BUDGET) -> SearchResult:
    return search_many([f], frame, max_states, budget)[0]
