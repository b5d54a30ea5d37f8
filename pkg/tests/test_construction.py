import itertools

import pytest

from modalbench.closure import Signature
from modalbench.construction import (
    AtomSpace,
    audit_canonicity,
    audit_existence,
    audit_standardness,
    audit_truth,
    build_standard_model,
    canonical_relation,
    enumerate_atoms,
    standard_model_size,
)
from modalbench.proof import SystemId
from modalbench.semantics import FrameClass, frame_check
from modalbench.syntax import Box, Cap, Impl, Neg, Prop, parse, render


def sig(logic, alpha, iota=None):
    return Signature.of(SystemId.parse(logic), parse(alpha), iota)


def test_atomic_atoms():
    atoms = enumerate_atoms(sig("CK", "p"))
    assert [a.rendered() for a in atoms] == [["p"], ["~p"]]


def test_atom_invariants():
    space = AtomSpace(sig("CT", "[1](p -> [&1 2]q) -> [+2]p"))
    for atom in space.atoms:
        for f in space.cl.formulas:
            if not isinstance(f, Neg):
                assert (f in atom) != (Neg(f) in atom)
            if isinstance(f, Impl):
                assert (f in atom) == (f.left not in atom or f.right in atom)


def test_t_coherence():
    atoms = enumerate_atoms(sig("CT", "[1]p"))
    assert all(Prop("p") in a for a in atoms if Cap((1,), Prop("p")) in a)


@pytest.mark.parametrize("logic", ["CK", "CD", "CT", "CB", "CS4", "CS5"])
def test_cap1_coherence(logic):
    for a in enumerate_atoms(sig(logic, "[1]p")):
        assert (Box(1, Prop("p")) in a) == (Cap((1,), Prop("p")) in a)


def test_deterministic_order():
    a = [x.rendered() for x in enumerate_atoms(sig("CS5", "[&1 2]p & ~[1]p"))]
    assert a == sorted(a)
    assert a == [x.rendered() for x in enumerate_atoms(sig("CS5", "[&1 2]p & ~[1]p"))]


def test_elimination_removes_unsupported_sets():
    space = AtomSpace(sig("CS4", "[1]p -> [1][1]p"))
    assert len(space.candidates) > len(space.atoms)
    raw = AtomSpace(sig("CS4", "[1]p -> [1][1]p"), eliminate=False)
    assert len(raw.atoms) == len(space.candidates)


def test_reflexive_relation_for_t():
    space = AtomSpace(sig("CT", "[&1 2]p -> [+1]q"))
    for j in space.subsets:
        rel = canonical_relation(space, j)
        assert all((a, a) in rel for a in range(len(space)))


def test_monotone_in_index():
    space = AtomSpace(sig("CB", "[&1 2]p", (1, 2)))
    assert canonical_relation(space, (1, 2)) <= canonical_relation(space, (1,))


def test_serial_singletons_for_d():
    space = AtomSpace(sig("CD", "[&1 2]p"))
    for i in (1, 2):
        rel = canonical_relation(space, (i,))
        assert {a for a, _ in rel} == set(range(len(space)))


def test_relation_index_must_be_inside_iota():
    space = AtomSpace(sig("CK", "[1]p"))
    with pytest.raises(ValueError):
        canonical_relation(space, (2,))


def test_literal_s4_clause_is_not_monotone():
    s = sig("CS4", "[&1]p", (1, 2))
    literal = audit_canonicity(s, relation="literal")
    assert any(v["property"] == "monotone" for v in literal["violations"])
    assert audit_canonicity(s)["ok"]


def test_depth_zero_model():
    s = sig("CS4", "[1]p")
    M = build_standard_model(s, 0)
    assert len(M) == len(M.space.atoms)
    assert all((n, n) in M.model.rel[1] for n in M.model.states)


@pytest.mark.parametrize("logic, frame", [("CS5", FrameClass.S5), ("CS4", FrameClass.S4), ("CB", FrameClass.B), ("CT", FrameClass.T)])
def test_standard_relations_have_the_frame(logic, frame):
    M = build_standard_model(sig(logic, "[&1 2]p"), 2)
    assert frame_check(M.model, frame, [1, 2])


def test_k_depth_one_edges():
    s = sig("CK", "[&1 2]p")
    M = build_standard_model(s, 1)
    names = set(M.model.states)
    for j in M.space.subsets:
        for a, b in canonical_relation(M.space, j):
            child = f"{a}:{','.join(map(str, j))}:{b}"
            assert child in names
            for i in j:
                assert (str(a), child) in M.model.rel[i]


def test_valuation_matches_tails():
    M = build_standard_model(sig("CB", "[1]~[1]p"))
    for k, name in enumerate(M.model.states):
        assert (name in M.model.val["p"]) == M.space.contains(M.tail[k], Prop("p"))


def test_rel_equals_cap_singleton():
    M = build_standard_model(sig("CK", "[1][+1 2]p"))
    for i in (1, 2):
        assert M.model.successors("single", (i,)) == M.model.successors("cap", (i,))


def test_k_models_are_trees():
    M = build_standard_model(sig("CK", "[&1 2]p"), 2)
    for i in (1, 2):
        for a, b in M.model.rel[i]:
            assert b.startswith(a + ":") and b.count(":") == a.count(":") + 2


def test_s4_relation_follows_initial_segments():
    M = build_standard_model(sig("CS4", "[&1 2]p"), 2)
    for a, b in M.model.rel[1]:
        assert b == a or b.startswith(a + ":")


def test_size_estimate_is_exact():
    s = sig("CT", "[+1 2]p")
    space = AtomSpace(s)
    for d in range(3):
        assert standard_model_size(space, d) == len(build_standard_model(s, d, space=space))


def test_d_frontier_violations_are_expected():
    M = build_standard_model(sig("CD", "[1]p -> ~[1]~p"))
    r = audit_standardness(M)
    assert r["ok"] and r["expected_frontier"] > 0


def test_audits_on_small_signatures():
    for logic, alpha in [("CK", "[&1 2]p"), ("CT", "[+1 2]p"), ("CK", "[+1]p"), ("CK", "p")]:
        s = sig(logic, alpha)
        M = build_standard_model(s)
        assert audit_truth(s, M)["ok"]
        assert audit_existence(s, M)["ok"]


def test_existence_depth_zero_is_vacuous():
    s = sig("CK", "[&1]p")
    M = build_standard_model(s, 0)
    r = audit_existence(s, M)
    assert r["ok"] and r["no_interior_states"] and r["witnessed"] == 0


def test_audits_catch_missing_elimination():
    s = sig("CB", "[1]~[1]p")
    M = build_standard_model(s, space=AtomSpace(s, eliminate=False))
    assert not audit_existence(s, M)["ok"]
    assert not audit_truth(s, M)["ok"]


def test_pruned_model_is_sub_model():
    s = sig("CS5", "[&1 2]p & ~[1]p")
    space = AtomSpace(s)
    full = build_standard_model(s, space=space)
    part = build_standard_model(s, space=space, pruned=True)
    assert set(part.model.states) <= set(full.model.states)
    for i in (1, 2):
        kept = set(part.model.states)
        restricted = {(a, b) for a, b in full.model.rel[i] if a in kept and b in kept}
        assert part.model.rel[i] == restricted
