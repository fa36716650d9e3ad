import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import DELTA, MON, MOR, kitchen_store
from ddic.context import TOP, Atom
from ddic.errors import ContractViolation, DeclarationError
from ddic.model import (BeliefAtom, DefeatRecord, DerivationTrace, Modal, NormStore, Origin,
                        RuleApplication, StatusLabel, TestimonyAtom, complement, label_of)
from ddic.ontology import cooking_ontology

OBL, IMP, OPT = Modal.OBL, Modal.IMP, Modal.OPT


def belief(positive, modal, behavior="HC", context=DELTA, time=3):
    return BeliefAtom(positive, modal, behavior, context, time)


def test_complement_flips_polarity_only():
    x = TestimonyAtom(True, OBL, "HC", MON, 1)
    y = complement(x)
    assert not y.positive
    assert (y.modal, y.behavior, y.context, y.time) == (OBL, "HC", MON, 1)
    assert y.origin is Origin.DERIVED


def test_complement_of_negative_testimony():
    x = TestimonyAtom(False, IMP, "HC", MOR, 2, Origin.DERIVED)
    assert complement(x) == TestimonyAtom(True, IMP, "HC", MOR, 2)


@given(st.booleans(), st.sampled_from(list(Modal)), st.integers(0, 50))
def test_complement_is_involution(positive, modal, time):
    b = BeliefAtom(positive, modal, "C", TOP, time)
    assert complement(complement(b)) == b
    t = TestimonyAtom(positive, modal, "C", TOP, time, Origin.DERIVED)
    assert complement(complement(t)) == t


def test_stated_atoms_must_be_positive_and_timed():
    with pytest.raises(ContractViolation):
        TestimonyAtom(False, OBL, "HC", MON, 1)
    with pytest.raises(ContractViolation):
        TestimonyAtom(True, OBL, "HC", MON, -1)


def test_origin_does_not_affect_equality():
    assert TestimonyAtom(True, OPT, "HC", MOR, 2) == TestimonyAtom(True, OPT, "HC", MOR, 2,
                                                                   Origin.DERIVED)


def test_atom_rendering():
    assert str(TestimonyAtom(False, IMP, "HCV", MOR, 2, Origin.DERIVED)) == "~imp(HCV, Morning, 2)"
    assert str(belief(True, OBL)) == "Obl(HC, Monday & Morning, 3)"


def test_label_obligatory():
    assert label_of({belief(True, OBL), belief(False, IMP)}) is StatusLabel.OBLIGATORY


def test_label_unknown_on_empty():
    assert label_of(set()) is StatusLabel.UNKNOWN


def test_label_optional():
    beliefs = {belief(False, OBL), belief(False, IMP), belief(True, OPT)}
    assert label_of(beliefs) is StatusLabel.OPTIONAL


def test_label_single_negatives():
    assert label_of({belief(False, OBL)}) is StatusLabel.NON_OBLIGATORY
    assert label_of({belief(False, IMP)}) is StatusLabel.NON_IMPERMISSIBLE


def test_label_inconsistent_dominates():
    beliefs = {belief(True, OBL), belief(False, OBL), belief(False, IMP)}
    assert label_of(beliefs) is StatusLabel.INCONSISTENT


def test_label_rejects_mixed_triples():
    with pytest.raises(ContractViolation):
        label_of({belief(True, OBL, "HC"), belief(True, OBL, "C")})


def test_label_rejects_unclosed_opt():
    with pytest.raises(ContractViolation):
        label_of({belief(True, OPT)})


# no rule ever derives a negative Opt belief
_ALL = [belief(p, m) for p in (True, False) for m in Modal if p or m is not OPT]


def _closed(subset):
    s = set(subset)
    if belief(True, OPT) in s:
        s |= {belief(False, OBL), belief(False, IMP)}
    return frozenset(s)


@pytest.mark.parametrize("subset", [_closed(c) for r in range(len(_ALL) + 1)
                                    for c in itertools.combinations(_ALL, r)])
def test_label_invariants_over_every_subset(subset):
    label = label_of(subset)
    assert label_of(list(reversed(list(subset)))) is label
    signs = {(b.positive, b.modal) for b in subset}
    if label is StatusLabel.OPTIONAL:
        assert (False, OBL) in signs and (False, IMP) in signs
    if label is StatusLabel.OBLIGATORY:
        assert (True, OBL) in signs
    if label is StatusLabel.IMPERMISSIBLE:
        assert (True, IMP) in signs
    if label is StatusLabel.UNKNOWN:
        assert not subset
    assert (label is StatusLabel.INCONSISTENT) == any(complement(b) in subset for b in subset)


def test_defeat_record_window_must_be_ordered():
    stated = TestimonyAtom(True, OBL, "HC", MON, 1)
    defeater = TestimonyAtom(False, OBL, "HC", MOR, 2, Origin.DERIVED)
    DefeatRecord("R1", stated, defeater, ("HC", "HC"), (1, 2, 3))
    with pytest.raises(ContractViolation):
        DefeatRecord("R1", stated, defeater, ("HC", "HC"), (1, 4, 3))


def test_trace_blocked_iff_defeats():
    conclusion = belief(True, OBL, "C")
    app = RuleApplication("R1", (TestimonyAtom(True, OBL, "HC", MON, 1),))
    with pytest.raises(ContractViolation):
        DerivationTrace(conclusion, True, (app,))
    DerivationTrace(conclusion, False, (app,))


def test_store_orders_by_time_keeping_insertion_order():
    store = kitchen_store((OBL, "HC", MON, 2), (IMP, "C", MOR, 1), (OPT, "H", TOP, 2))
    assert [a.behavior for a in store.testimony] == ["C", "HC", "H"]
    assert store.max_time == 2


def test_store_rejects_unknown_references():
    with pytest.raises(DeclarationError):
        kitchen_store((OBL, "XX", MON, 1))
    with pytest.raises(DeclarationError):
        kitchen_store((OBL, "HC", Atom("Tuesday"), 1))


def test_store_context_atom_limit():
    with pytest.raises(DeclarationError):
        NormStore(cooking_ontology(), frozenset(f"p{i}" for i in range(17)))


def test_store_snapshots_are_independent():
    empty = kitchen_store()
    one = empty.state(OBL, "HC", MON, 1)
    assert empty.testimony == () and len(one.testimony) == 1
