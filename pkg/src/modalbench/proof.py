"""Axiom schemata, the assembled Hilbert systems, and a proof-script checker."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .semantics import FrameClass
from .syntax import (
    Box,
    Cap,
    Formula,
    Impl,
    Index,
    Neg,
    ParseError,
    Prop,
    Ucl,
    big_conj,
    conj,
    iff,
    iter_subformulas,
    language_level,
    make_index,
    parse,
    render,
)

__all__ = [
    "Level",
    "SystemId",
    "AxiomSchema",
    "SCHEMAS",
    "HilbertSystem",
    "assemble_system",
    "match_axiom",
    "instantiate",
    "is_tautology",
    "ProofLine",
    "ProofScript",
    "ProofCheck",
    "ScriptFormatError",
    "parse_script",
    "check_proof",
]


class Level(enum.IntEnum):
    L = 0
    LCAP = 1
    LCAPUCL = 2

    @classmethod
    def of(cls, f: Formula) -> "Level":
        return {"L": cls.L, "Lcap": cls.LCAP, "Lcapucl": cls.LCAPUCL}[language_level(f)]


_BASES = ("K", "D", "T", "B", "S4", "S5")


class SystemId(enum.Enum):
    """A base logic paired with a language level.

    ``AX_K`` .. ``AX_S5`` are the box-only systems, ``AX_Kcap`` .. ``AX_S5cap``
    add intersection, ``AX_CK`` .. ``AX_CS5`` add transitive closure of union.
    """

    AX_K = ("K", Level.L)
    AX_D = ("D", Level.L)
    AX_T = ("T", Level.L)
    AX_B = ("B", Level.L)
    AX_S4 = ("S4", Level.L)
    AX_S5 = ("S5", Level.L)
    AX_Kcap = ("K", Level.LCAP)
    AX_Dcap = ("D", Level.LCAP)
    AX_Tcap = ("T", Level.LCAP)
    AX_Bcap = ("B", Level.LCAP)
    AX_S4cap = ("S4", Level.LCAP)
    AX_S5cap = ("S5", Level.LCAP)
    AX_CK = ("K", Level.LCAPUCL)
    AX_CD = ("D", Level.LCAPUCL)
    AX_CT = ("T", Level.LCAPUCL)
    AX_CB = ("B", Level.LCAPUCL)
    AX_CS4 = ("S4", Level.LCAPUCL)
    AX_CS5 = ("S5", Level.LCAPUCL)

    @property
    def base(self) -> str:
        return self.value[0]

    @property
    def level(self) -> Level:
        return self.value[1]

    @property
    def frame(self) -> FrameClass:
        return FrameClass(self.base)

    @property
    def logic(self) -> str:
        """Short logic name: ``K``, ``Kcap`` or ``CK`` style."""
        return self.name[3:]

    @classmethod
    def parse(cls, text: str) -> "SystemId":
        key = text.strip()
        if not key.upper().startswith("AX_"):
            key = "AX_" + key
        key = key.replace("∩", "cap")
        for member in cls:
            if member.name.lower() == key.lower():
                return member
        raise ValueError(f"unknown system {text!r}")

    @classmethod
    def for_logic(cls, base: str, level: Level) -> "SystemId":
        for member in cls:
            if member.value == (base, level):
                return member
        raise ValueError(f"no system for {base!r} at {level!r}")


# -- schema patterns -----------------------------------------------------------
#
# Patterns reuse Neg and Impl from the AST; the leaves and modal nodes are the
# metavariable-aware classes below.


@dataclass(frozen=True)
class MVar:
    name: str

    @property
    def _h(self):
        return hash(("mvar", self.name))


@dataclass(frozen=True)
class PBox:
    ivar: str
    sub: object

    @property
    def _h(self):
        return hash(("pbox", self.ivar))


@dataclass(frozen=True)
class PCap:
    ivar: str
    sub: object
    singleton: bool = False  # the index is {i} for the bound natural i

    @property
    def _h(self):
        return hash(("pcap", self.ivar))


@dataclass(frozen=True)
class PUcl:
    ivar: str
    sub: object

    @property
    def _h(self):
        return hash(("pucl", self.ivar))


PHI, PSI = MVar("phi"), MVar("psi")


def _imp(a, b):
    return Impl(a, b)


@dataclass(frozen=True)
class AxiomSchema:
    name: str
    pattern: object
    side: Optional[str] = None  # None | "I<=J" | "i in I"
    level: Level = Level.L
    frames: tuple = ()  # frame classes on which every instance is valid

    def __str__(self) -> str:
        return self.name


_ALL = tuple(FrameClass)
_SERIAL = (FrameClass.D, FrameClass.T, FrameClass.B, FrameClass.S4, FrameClass.S5)
_REFL = (FrameClass.T, FrameClass.B, FrameClass.S4, FrameClass.S5)
_SYMM = (FrameClass.B, FrameClass.S5)
_TRANS = (FrameClass.S4, FrameClass.S5)


def _family(suffix: str, mk, level: Level, ucl: bool = False) -> list[AxiomSchema]:
    box = lambda f: mk("i" if not suffix else "I", f)  # noqa: E731
    return [
        AxiomSchema("K" + suffix, _imp(box(_imp(PHI, PSI)), _imp(box(PHI), box(PSI))), None, level, _ALL),
        # an intersection of serial relations can be empty
        AxiomSchema("D" + suffix, _imp(box(PHI), Neg(box(Neg(PHI)))), None, level, _REFL if suffix == "cap" else _SERIAL),
        AxiomSchema("T" + suffix, _imp(box(PHI), PHI), None, level, _REFL),
        AxiomSchema("B" + suffix, _imp(Neg(PHI), box(Neg(box(PHI)))), None, level, _SYMM),
        # 4 holds for every transitive closure, whatever the frame.
        AxiomSchema("4" + suffix, _imp(box(PHI), box(box(PHI))), None, level, _ALL if ucl else _TRANS),
        # closures of symmetric relations are euclidean; plain B frames are not
        AxiomSchema("5" + suffix, _imp(Neg(box(PHI)), box(Neg(box(PHI)))), None, level, _SYMM if ucl else (FrameClass.S5,)),
    ]


def _build_schemas() -> dict[str, AxiomSchema]:
    out = {}
    for s in _family("", PBox, Level.L):
        out[s.name] = s
    for s in _family("cap", PCap, Level.LCAP):
        out[s.name] = s
    for s in _family("ucl", PUcl, Level.LCAPUCL, ucl=True):
        out[s.name] = s
    out["cap1"] = AxiomSchema(
        "cap1", iff(PBox("i", PHI), PCap("i", PHI, singleton=True)), None, Level.LCAP, _ALL
    )
    out["cap2"] = AxiomSchema(
        "cap2", _imp(PCap("I", PHI), PCap("J", PHI)), "I<=J", Level.LCAP, _ALL
    )
    out["ucl1"] = AxiomSchema(
        "ucl1",
        _imp(PUcl("I", PHI), PBox("i", conj(PHI, PUcl("I", PHI)))),
        "i in I",
        Level.LCAPUCL,
        _ALL,
    )
    return out


SCHEMAS: dict[str, AxiomSchema] = _build_schemas()

_ALIASES = {"∩": "cap", "⊎": "ucl", "_": ""}


def schema_named(name: str) -> AxiomSchema:
    key = name.strip()
    for a, b in _ALIASES.items():
        key = key.replace(a, b)
    for canon in SCHEMAS:
        if canon.lower() == key.lower():
            return SCHEMAS[canon]
    raise KeyError(name)


# -- systems -------------------------------------------------------------------

_BASE_AXIOMS = {
    "K": ("K",),
    "D": ("K", "D"),
    "T": ("K", "T"),
    "B": ("K", "T", "B"),
    "S4": ("K", "T", "4"),
    "S5": ("K", "T", "5"),
}

# Characterisation of intersection per frame class; D-cap is deliberately
# absent for D because it is invalid there.
_CAP_AXIOMS = {
    "K": ("Kcap", "cap1", "cap2"),
    "D": ("Kcap", "cap1", "cap2"),
    "T": ("Kcap", "Tcap", "cap1", "cap2"),
    "B": ("Kcap", "Tcap", "Bcap", "cap1", "cap2"),
    "S4": ("Kcap", "Tcap", "4cap", "cap1", "cap2"),
    "S5": ("Kcap", "Tcap", "5cap", "cap1", "cap2"),
}

_UCL_AXIOMS = ("Kucl", "ucl1")


@dataclass(frozen=True)
class HilbertSystem:
    id: SystemId
    axioms: tuple[str, ...]
    rules: tuple[str, ...]

    @property
    def schemas(self) -> list[AxiomSchema]:
        return [SCHEMAS[a] for a in self.axioms]

    def components(self) -> frozenset:
        return frozenset(("PC",) + self.axioms + self.rules)


def assemble_system(system: SystemId) -> HilbertSystem:
    axioms = list(_BASE_AXIOMS[system.base])
    rules = ["MP", "N"]
    if system.level >= Level.LCAP:
        axioms += _CAP_AXIOMS[system.base]
        rules.append("NCAP")
    if system.level >= Level.LCAPUCL:
        axioms += _UCL_AXIOMS
        rules.append("UCL")
    return HilbertSystem(system, tuple(axioms), tuple(rules))


# -- matching ------------------------------------------------------------------

def match_axiom(schema: AxiomSchema, f: Formula) -> Optional[dict]:
    """Substitution making ``schema`` equal to ``f``, or None."""
    sub: dict = {}
    if not _match(schema.pattern, f, sub):
        return None
    if schema.side == "I<=J" and not set(sub["I"]) <= set(sub["J"]):
        return None
    if schema.side == "i in I" and sub["i"] not in sub["I"]:
        return None
    return sub


def _bind(sub: dict, key: str, value) -> bool:
    if key in sub:
        return sub[key] == value
    sub[key] = value
    return True


def _match(pat, f, sub: dict) -> bool:
    if isinstance(pat, MVar):
        return _bind(sub, pat.name, f)
    if isinstance(pat, Neg):
        return isinstance(f, Neg) and _match(pat.sub, f.sub, sub)
    if isinstance(pat, Impl):
        return (
            isinstance(f, Impl)
            and _match(pat.left, f.left, sub)
            and _match(pat.right, f.right, sub)
        )
    if isinstance(pat, PBox):
        return isinstance(f, Box) and _bind(sub, pat.ivar, f.i) and _match(pat.sub, f.sub, sub)
    if isinstance(pat, PCap):
        if not isinstance(f, Cap):
            return False
        if pat.singleton:
            if len(f.index) != 1 or not _bind(sub, pat.ivar, f.index[0]):
                return False
        elif not _bind(sub, pat.ivar, f.index):
            return False
        return _match(pat.sub, f.sub, sub)
    if isinstance(pat, PUcl):
        return isinstance(f, Ucl) and _bind(sub, pat.ivar, f.index) and _match(pat.sub, f.sub, sub)
    raise TypeError(f"bad pattern node {pat!r}")


def instantiate(schema: AxiomSchema, sub: dict) -> Formula:
    """Inverse of :func:`match_axiom`; side conditions are not checked."""

    def go(pat):
        if isinstance(pat, MVar):
            return sub[pat.name]
        if isinstance(pat, Neg):
            return Neg(go(pat.sub))
        if isinstance(pat, Impl):
            return Impl(go(pat.left), go(pat.right))
        if isinstance(pat, PBox):
            return Box(sub[pat.ivar], go(pat.sub))
        if isinstance(pat, PCap):
            idx = (sub[pat.ivar],) if pat.singleton else sub[pat.ivar]
            return Cap(idx, go(pat.sub))
        if isinstance(pat, PUcl):
            return Ucl(sub[pat.ivar], go(pat.sub))
        raise TypeError(pat)

    return go(schema.pattern)


# -- propositional tautologies -----------------------------------------------

def _pc_atoms(f: Formula, out: dict) -> None:
    if isinstance(f, Neg):
        _pc_atoms(f.sub, out)
    elif isinstance(f, Impl):
        _pc_atoms(f.left, out)
        _pc_atoms(f.right, out)
    elif f not in out:
        out[f] = len(out)


def is_tautology(f: Formula) -> bool:
    """Truth-table check with propositions and outermost modal formulas as atoms.

    Rows are packed into one integer per atom, so each connective costs a
    single bitwise operation over the whole table.
    """
    atoms: dict = {}
    _pc_atoms(f, atoms)
    n = len(atoms)
    if n > 22:
        raise ValueError(f"too many propositional atoms ({n}) for a truth table")
    rows = 1 << n
    full = (1 << rows) - 1
    columns = {}
    for a, k in atoms.items():
        # bit r is set iff bit k of r is set: 2^k zeros, 2^k ones, repeated
        pattern = ((1 << (1 << k)) - 1) << (1 << k)
        width = 1 << (k + 1)
        while width < rows:
            pattern |= pattern << width
            width <<= 1
        columns[a] = pattern

    def ev(g):
        if isinstance(g, Neg):
            return full & ~ev(g.sub)
        if isinstance(g, Impl):
            return (full & ~ev(g.left)) | ev(g.right)
        return columns[g]

    return ev(f) == full


# -- proof scripts -------------------------------------------------------------

@dataclass(frozen=True)
class Justification:
    kind: str  # PC | AX | MP | N | NCAP | UCL
    args: tuple = ()

    def __str__(self) -> str:
        if self.kind == "PC":
            return "PC"
        if self.kind == "AX":
            return f"AX {self.args[0]}"
        if self.kind in ("NCAP", "UCL"):
            idx, j = self.args
            return f"{self.kind} {{{' '.join(map(str, idx))}}} {j}"
        return " ".join([self.kind, *map(str, self.args)])


@dataclass(frozen=True)
class ProofLine:
    number: int
    formula: Formula
    just: Justification

    def __str__(self) -> str:
        return f"{self.number}. {render(self.formula)} ; {self.just}"


@dataclass(frozen=True)
class ProofScript:
    lines: tuple[ProofLine, ...]
    goal: Optional[Formula] = None

    def text(self) -> str:
        head = [f"goal: {render(self.goal)}"] if self.goal is not None else []
        return "\n".join(head + [str(line) for line in self.lines]) + "\n"


class ScriptFormatError(ValueError):
    pass


_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.+?)\s*$")
_IDX = r"\{\s*([0-9 ,]+?)\s*\}"
_JUST = [
    ("PC", re.compile(r"^PC$")),
    ("AX", re.compile(r"^AX\s+(\S+)$")),
    ("MP", re.compile(r"^MP\s+(\d+)\s+(\d+)$")),
    ("N", re.compile(r"^N\s+(\d+)\s+(\d+)$")),
    ("NCAP", re.compile(r"^NCAP\s+" + _IDX + r"\s+(\d+)$")),
    ("UCL", re.compile(r"^UCL\s+" + _IDX + r"\s+(\d+)$")),
]


def _parse_just(text: str, lineno: int) -> Justification:
    for kind, rx in _JUST:
        m = rx.match(text)
        if m is None:
            continue
        g = m.groups()
        if kind == "PC":
            return Justification("PC")
        if kind == "AX":
            return Justification("AX", (g[0],))
        if kind in ("MP", "N"):
            return Justification(kind, (int(g[0]), int(g[1])))
        idx = make_index(int(x) for x in re.split(r"[\s,]+", g[0]) if x)
        return Justification(kind, (idx, int(g[1])))
    raise ScriptFormatError(f"line {lineno}: unknown justification {text!r}")


def parse_script(text: str) -> ProofScript:
    """Read ``n. <formula> ; <JUST>`` lines; ``#`` starts a comment.

    An optional ``goal: <formula>`` line names the formula the script must end
    with.
    """
    lines = []
    goal = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.lower().startswith("goal:"):
            try:
                goal = parse(body[5:])
            except ParseError as e:
                raise ScriptFormatError(f"line {lineno}: {e}") from None
            continue
        m = _LINE.match(body)
        if m is None:
            raise ScriptFormatError(f"line {lineno}: expected 'n. <formula> ; <JUST>'")
        try:
            formula = parse(m.group(2))
        except ParseError as e:
            raise ScriptFormatError(f"line {lineno}: {e}") from None
        lines.append(ProofLine(int(m.group(1)), formula, _parse_just(m.group(3), lineno)))
    return ProofScript(tuple(lines), goal)


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else f"error at line {self.line}: {self.reason}"


def ucl_rule_premise(phi: Formula, psi: Formula, index: Index) -> Formula:
    """``phi -> /\\_{i in I} [i](phi & psi)``, right-nested, ascending i."""
    return Impl(phi, big_conj([Box(i, conj(phi, psi)) for i in make_index(index)]))


def _line_error(line: ProofLine, system: HilbertSystem, proved: dict) -> Optional[str]:
    f, just = line.formula, line.just
    if Level.of(f) > system.id.level:
        return f"formula outside the language of {system.id.name}"
    refs = {"MP": just.args, "N": just.args[1:], "NCAP": just.args[1:], "UCL": just.args[1:]}
    for ref in refs.get(just.kind, ()):
        if ref not in proved:
            return f"reference to line {ref}, which is not an earlier line"
    if just.kind == "PC":
        return None if is_tautology(f) else "not a propositional tautology"
    if just.kind == "AX":
        name = just.args[0]
        try:
            schema = schema_named(name)
        except KeyError:
            return f"unknown axiom {name!r}"
        if schema.name not in system.axioms:
            return f"axiom {schema.name} is not part of {system.id.name}"
        if match_axiom(schema, f) is None:
            return f"not an instance of {schema.name}"
        return None
    if just.kind == "MP":
        j, k = just.args
        if proved[j] != Impl(proved[k], f):
            return f"MP needs line {j} to be (line {k}) -> (this line)"
        return None
    if just.kind == "N":
        i, j = just.args
        if f != Box(i, proved[j]):
            return f"N needs this line to be [{i}] applied to line {j}"
        return None
    if just.kind == "NCAP":
        if "NCAP" not in system.rules:
            return f"rule NCAP is not part of {system.id.name}"
        idx, j = just.args
        if f != Cap(idx, proved[j]):
            return f"NCAP needs this line to be the intersection box of line {j}"
        return None
    if just.kind == "UCL":
        if "UCL" not in system.rules:
            return f"rule UCL is not part of {system.id.name}"
        idx, j = just.args
        if not (isinstance(f, Impl) and isinstance(f.right, Ucl) and f.right.index == idx):
            return "UCL conclusion must have the shape phi -> [+I]psi"
        phi, psi = f.left, f.right.sub
        if proved[j] != ucl_rule_premise(phi, psi, idx):
            return f"line {j} is not the premise phi -> /\\ [i](phi & psi) over I"
        return None
    return f"unknown justification {just.kind}"


def check_proof(
    system: SystemId | HilbertSystem, script: ProofScript, goal: Optional[Formula] = None
) -> ProofCheck:
    """Check every line; report the first failure."""
    if isinstance(system, SystemId):
        system = assemble_system(system)
    goal = goal if goal is not None else script.goal
    proved: dict[int, Formula] = {}
    last = 0
    for line in script.lines:
        if line.number <= last:
            return ProofCheck(False, line.number, "line numbers must increase")
        last = line.number
        err = _line_error(line, system, proved)
        if err:
            return ProofCheck(False, line.number, err)
        proved[line.number] = line.formula
    if goal is not None:
        if not script.lines:
            return ProofCheck(False, None, "empty script cannot prove the goal")
        if script.lines[-1].formula != goal:
            return ProofCheck(False, script.lines[-1].number, "last line is not the goal")
    return ProofCheck(True)


def axiom_instances_in(f: Formula, system: HilbertSystem) -> list[str]:
    """Names of the system's schemata that ``f`` instantiates."""
    return [s.name for s in system.schemas if match_axiom(s, f) is not None]


def schema_metavariables(schema: AxiomSchema) -> tuple[set, set]:
    """(formula metavariables, index metavariables) used by a schema."""
    fvars, ivars = set(), set()
    stack = [schema.pattern]
    while stack:
        p = stack.pop()
        if isinstance(p, MVar):
            fvars.add(p.name)
        elif isinstance(p, Impl):
            stack += [p.left, p.right]
        elif isinstance(p, Neg):
            stack.append(p.sub)
        elif isinstance(p, (PBox, PCap, PUcl)):
            ivars.add((p.ivar, isinstance(p, PBox) or getattr(p, "singleton", False)))
            stack.append(p.sub)
    return fvars, ivars
