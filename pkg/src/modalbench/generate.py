"""Random formulas, schema substitutions and frame-class models."""

from __future__ import annotations

import random
from typing import Sequence

from .proof import AxiomSchema, instantiate, schema_metavariables
from .semantics import FrameClass, KripkeModel, transitive_closure_masks
from .syntax import Box, Cap, Formula, Impl, Neg, Prop, Ucl

__all__ = ["random_index", "random_formula", "random_substitution", "random_instance", "random_model"]


def random_index(rng: random.Random, indices: Sequence[int]) -> tuple:
    k = rng.randint(1, len(indices))
    return tuple(sorted(rng.sample(list(indices), k)))


def random_formula(rng: random.Random, depth: int, indices: Sequence[int] = (1, 2, 3),
                   props: Sequence[str] = ("p", "q")) -> Formula:
    """A formula of modal depth at most ``depth`` over all three modalities."""
    roll = rng.random()
    if roll < 0.3:
        return Prop(rng.choice(list(props)))
    if roll < 0.45:
        return Neg(random_formula(rng, depth, indices, props))
    if roll < 0.65:
        return Impl(random_formula(rng, depth, indices, props), random_formula(rng, depth, indices, props))
    if depth <= 0:
        return Prop(rng.choice(list(props)))
    sub = random_formula(rng, depth - 1, indices, props)
    kind = rng.random()
    if kind < 0.34:
        return Box(rng.choice(list(indices)), sub)
    if kind < 0.67:
        return Cap(random_index(rng, indices), sub)
    return Ucl(random_index(rng, indices), sub)


def random_substitution(rng: random.Random, schema: AxiomSchema, indices: Sequence[int] = (1, 2, 3),
                        depth: int = 1, props: Sequence[str] = ("p", "q")) -> dict:
    """Metavariable assignment meeting the schema's side condition."""
    fvars, ivars = schema_metavariables(schema)
    sub: dict = {v: random_formula(rng, depth, indices, props) for v in sorted(fvars)}
    for name, single in sorted(ivars):
        sub[name] = rng.choice(list(indices)) if single else random_index(rng, indices)
    if schema.side == "I<=J":
        big = sub["J"]
        sub["I"] = tuple(sorted(rng.sample(list(big), rng.randint(1, len(big)))))
    elif schema.side == "i in I":
        sub["i"] = rng.choice(list(sub["I"]))
    return sub


def random_instance(rng: random.Random, schema: AxiomSchema, **kwargs) -> Formula:
    return instantiate(schema, random_substitution(rng, schema, **kwargs))


def _relation(rng: random.Random, frame: FrameClass, n: int, density: float) -> list[int]:
    if frame is FrameClass.S5:
        block = [rng.randrange(n) for _ in range(n)]
        return [sum(1 << t for t in range(n) if block[t] == block[s]) for s in range(n)]
    rows = [sum(1 << t for t in range(n) if rng.random() < density) for _ in range(n)]
    if frame is FrameClass.D:
        rows = [m or 1 << rng.randrange(n) for m in rows]
    if frame in (FrameClass.T, FrameClass.B, FrameClass.S4):
        rows = [m | 1 << s for s, m in enumerate(rows)]
    if frame is FrameClass.B:
        for s in range(n):
            for t in range(n):
                if rows[s] >> t & 1:
                    rows[t] |= 1 << s
    if frame is FrameClass.S4:
        rows = [m | 1 << s for s, m in enumerate(transitive_closure_masks(rows))]
    return rows


def random_model(rng: random.Random, frame: FrameClass, n_states: int, indices: Sequence[int] = (1, 2, 3),
                 props: Sequence[str] = ("p", "q"), density: float = 0.35) -> KripkeModel:
    """Random model in ``frame``: relations are drawn, then completed to the class."""
    names = [f"w{k}" for k in range(n_states)]
    succ = {i: _relation(rng, frame, n_states, density) for i in indices}
    val = {p: [s for s in names if rng.random() < 0.5] for p in props}
    return KripkeModel.from_masks(names, succ, val)
