"""Satisfiability and validity: brute-force oracle and standard-model pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .closure import Signature
from .construction import AtomSpace, StandardModel, build_standard_model, standard_model_size
from .oracle import DEFAULT_BUDGET, search_many
from .proof import Level, SystemId
from .semantics import FrameClass, KripkeModel, frame_violations, model_to_json, satisfies
from .syntax import Formula, Neg, Prop, indices_of, modal_depth, render

__all__ = [
    "Verdict",
    "VerdictError",
    "ValidityResult",
    "brute_force_sat",
    "brute_force_sat_many",
    "closure_sat",
    "decide_valid",
    "as_c_logic",
]

SAT, UNSAT, UNKNOWN = "sat", "unsat", "unknown"
EXHAUSTED = "exhausted-models"
NO_ATOM = "no-atom-contains"

# the full standard model is only tried when it stays this small
FULL_MODEL_LIMIT = 3000
# greedy witness minimization is quadratic; skip it on larger models
MINIMIZE_LIMIT = 400


class VerdictError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    status: str
    formula: Formula
    frame: FrameClass
    engine: str
    model: Optional[KripkeModel] = None
    state: Optional[Hashable] = None
    evidence: Optional[str] = None
    bound: Optional[int] = None
    reason: str = ""

    def __post_init__(self):
        if self.status == SAT:
            if self.model is None or self.state is None:
                raise VerdictError("a sat verdict needs a model and a state")
            if not satisfies(self.model, self.state, self.formula):
                raise VerdictError(f"witness does not satisfy {render(self.formula)}")
            bad = frame_violations(self.model, self.frame, self.model.indices)
            if bad:
                raise VerdictError(f"witness is not a {self.frame.value} model: {bad[0]}")
        elif self.status == UNSAT:
            if self.evidence not in (EXHAUSTED, NO_ATOM):
                raise VerdictError(f"unknown unsat evidence {self.evidence!r}")
            if self.evidence == EXHAUSTED and self.bound is None:
                raise VerdictError("exhaustive unsat needs its search bound")
        elif self.status != UNKNOWN:
            raise VerdictError(f"unknown status {self.status!r}")

    @property
    def definite(self) -> bool:
        return self.status != UNKNOWN

    def to_dict(self) -> dict:
        out = {"status": self.status, "engine": self.engine, "formula": render(self.formula),
               "frame": self.frame.value}
        if self.status == SAT:
            import json

            out["state"] = self.state
            out["model"] = json.loads(model_to_json(self.model))
        if self.evidence:
            out["evidence"] = self.evidence
        if self.bound is not None:
            out["bound"] = self.bound
        if self.reason:
            out["reason"] = self.reason
        return out


def as_c_logic(logic) -> SystemId:
    """The L(∩,⊎) system over the same frame class as ``logic``."""
    if isinstance(logic, FrameClass):
        return SystemId.for_logic(logic.value, Level.LCAPUCL)
    system = logic if isinstance(logic, SystemId) else SystemId.parse(str(logic))
    return SystemId.for_logic(system.base, Level.LCAPUCL)


# -- oracle ------------------------------------------------------------------

def _oracle_verdict(f: Formula, frame: FrameClass, max_states: int, res) -> Verdict:
    if res.status == SAT:
        return Verdict(SAT, f, frame, "oracle", res.model, res.state)
    if res.status == UNSAT:
        return Verdict(UNSAT, f, frame, "oracle", evidence=EXHAUSTED, bound=max_states, reason=res.reason)
    return Verdict(UNKNOWN, f, frame, "oracle", bound=res.bound, reason=res.reason)


def brute_force_sat(f: Formula, c: FrameClass, max_states: int, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Search every model with up to ``max_states`` states in frame class ``c``."""
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    c = FrameClass(c)
    return brute_force_sat_many([f], c, max_states, budget)[0]


def brute_force_sat_many(formulas: Sequence[Formula], c: FrameClass, max_states: int,
                         budget: int = DEFAULT_BUDGET) -> list[Verdict]:
    """``brute_force_sat`` for many formulas; formulas with the same
    indices share one pass over the model space."""
    c = FrameClass(c)
    groups: dict = {}
    for k, f in enumerate(formulas):
        groups.setdefault(tuple(sorted(indices_of(f))), []).append(k)
    out: list = [None] * len(formulas)
    for idx, members in sorted(groups.items()):
        batch = [formulas[k] for k in members]
        results = search_many(batch, c, max_states, budget, indices=idx)
        for k, res in zip(members, results):
            out[k] = _oracle_verdict(formulas[k], c, max_states, res)
    return out


# -- standard-model pipeline ---------------------------------------------------

def _submodel(model: KripkeModel, keep: list[int]) -> KripkeModel:
    pos = {s: x for x, s in enumerate(keep)}
    succ = {}
    for i in model.indices:
        rows = model.successors("single", (i,))
        succ[i] = [sum(1 << pos[t] for t in _bits(rows[s]) if t in pos) for s in keep]
    names = [model.states[s] for s in keep]
    val = {p: [model.states[s] for s in _bits(model.prop_mask(p)) if s in pos] for p in model.val}
    return KripkeModel.from_masks(names, succ, val)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _complete_serial(model: KripkeModel, frame: FrameClass) -> KripkeModel:
    """Give dead ends a self-loop so a truncated D model stays serial."""
    if frame is not FrameClass.D:
        return model
    succ = {i: [m or 1 << s for s, m in enumerate(model.successors("single", (i,)))] for i in model.indices}
    return KripkeModel.from_masks(model.states, succ, {p: sorted(model.val[p]) for p in model.val})


def _minimize(model: KripkeModel, root: Hashable, f: Formula, frame: FrameClass) -> KripkeModel:
    """Drop states one at a time, deepest first, while the witness survives."""
    order = sorted(model.states, key=lambda s: (-len(str(s)), str(s)))
    for name in order:
        if name == root:
            continue
        trial = [k for k, s in enumerate(model.states) if s != name]
        sub = _complete_serial(_submodel(model, trial), frame)
        if satisfies(sub, root, f) and not frame_violations(sub, frame, sub.indices):
            model = sub
    return model


def closure_sat(f: Formula, logic, depth: Optional[int] = None, iota: Optional[Iterable[int]] = None,
                guard: str = "meets", minimize: bool = True) -> Verdict:
    """Satisfiability through atoms and standard models.

    UNSAT means no atom of cl(f) contains f. SAT is reported only after the
    candidate model passes the model checker and the frame check.
    """
    system = as_c_logic(logic)
    frame = system.frame
    sig = Signature.of(system, f, iota)
    space = AtomSpace(sig, guard=guard)
    roots = space.atoms_with(f)
    if not roots:
        return Verdict(UNSAT, f, frame, "closure", evidence=NO_ATOM,
                       reason=f"{len(space.candidates)} candidate sets, {len(space.atoms)} atoms, none contains the formula")
    base = modal_depth(f) + 1 if depth is None else depth
    depths = [base] if depth is not None else [base, base + 1, base + 2]
    for d in depths:
        for a in roots:
            M = StandardModel(space, d, pruned=True, roots=[a])
            model = _complete_serial(M.model, frame)
            root = M.names[0]
            if satisfies(model, root, f) and not frame_violations(model, frame, model.indices):
                if minimize and len(model.states) <= MINIMIZE_LIMIT:
                    model = _minimize(model, root, f, frame)
                return Verdict(SAT, f, frame, "closure", model, root,
                               reason=f"pruned standard model at depth {d}")
    if standard_model_size(space, base) <= FULL_MODEL_LIMIT:
        M = build_standard_model(sig, base, space=space)
        model = _complete_serial(M.model, frame)
        for k in range(len(M)):
            if M.level[k] == 0 and M.tail[k] in roots and satisfies(model, M.names[k], f):
                if not frame_violations(model, frame, model.indices):
                    if minimize and len(model.states) <= MINIMIZE_LIMIT:
                        model = _minimize(model, M.names[k], f, frame)
                    return Verdict(SAT, f, frame, "closure", model, M.names[k],
                                   reason=f"full standard model at depth {base}")
    model = _atom_graph_model(space)
    for a in roots:
        name = f"a{a}"
        if satisfies(model, name, f) and not frame_violations(model, frame, model.indices):
            if minimize and len(model.states) <= MINIMIZE_LIMIT:
                model = _minimize(model, name, f, frame)
            return Verdict(SAT, f, frame, "closure", model, name, reason="atom graph model")
    return Verdict(UNKNOWN, f, frame, "closure",
                   reason=f"{len(roots)} atoms contain the formula but no truncated model confirmed it")


def _atom_graph_model(space: AtomSpace) -> KripkeModel:
    """Atoms as states with the single-index canonical relations.

    Intersections of these relations need not match the ▷_I for wider I,
    so this is only a candidate that the model checker has to confirm.
    """
    names = [f"a{k}" for k in range(len(space.atoms))]
    succ = {i: space.succ[(i,)] for i in space.sig.iota}
    props = sorted({g.name for atom in space.atoms for g in atom.members if isinstance(g, Prop)})
    val = {p: [names[k] for k in space.atoms_with(Prop(p))] for p in props}
    return KripkeModel.from_masks(names, succ, val)


# -- validity ------------------------------------------------------------------

@dataclass(frozen=True)
class ValidityResult:
    status: str  # "valid" | "invalid" | "unknown"
    formula: Formula
    closure: Verdict
    oracle: Verdict
    witness: Optional[Verdict] = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "formula": render(self.formula),
               "closure": self.closure.to_dict(), "oracle": self.oracle.to_dict()}
        if self.witness is not None:
            out["witness_engine"] = self.witness.engine
        return out


def decide_valid(f: Formula, logic, depth: Optional[int] = None, oracle_bound: int = 3,
                 budget: int = DEFAULT_BUDGET) -> ValidityResult:
    """Valid needs both engines to refute ``~f``; invalid needs one checked countermodel."""
    system = as_c_logic(logic)
    neg = Neg(f)
    c = closure_sat(neg, system, depth)
    o = brute_force_sat(neg, system.frame, oracle_bound, budget)
    sats = [v for v in (o, c) if v.status == SAT]
    if sats:
        witness = min(sats, key=lambda v: len(v.model.states))
        return ValidityResult("invalid", f, c, o, witness)
    if c.status == UNSAT and o.status == UNSAT:
        return ValidityResult("valid", f, c, o)
    return ValidityResult("unknown", f, c, o)
