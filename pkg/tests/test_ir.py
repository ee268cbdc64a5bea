import dataclasses

import pytest

from nlgen import ir
from nlgen.errors import ReferentialIntegrityError, SerializationError

import oracle
from conftest import random_document_plan


SAM = ir.Entity(id="sam", name="Sam", gender="masculine",
                number="singular")


def phrase(*premods, head, det=None, prep=None):
    kind = "prepositional-phrase" if prep else "noun-phrase"
    return ir.ComplementPhrase(kind=kind, head=head, determiner=det,
                               premodifiers=tuple(premods),
                               preposition=prep)


def leaf(msg):
    return ir.PlanNode(kind="leaf", message=msg)


def seq(*children, label="sequence"):
    return ir.PlanNode(kind="relation", label=label,
                       children=tuple(children))


def sam_pair_plan():
    bp = ir.Message(subject="sam", verb="have",
                    complements=(phrase("high", "blood", head="pressure"),))
    sugar = ir.Message(subject="sam", verb="have",
                       complements=(phrase("low", "blood", head="sugar"),))
    return ir.DocumentPlan(root=seq(leaf(bp), leaf(sugar)),
                           entities={"sam": SAM})


# Hand-derived canonical tuples for the two-finding plan.
BP_TUPLE = ("sam", "have",
            (("noun-phrase", "none", ("blood", "high"), "pressure",
              "none"),),
            "present", "none", "positive", None)
SUGAR_TUPLE = ("sam", "have",
               (("noun-phrase", "none", ("blood", "low"), "sugar",
                 "none"),),
               "present", "none", "positive", None)


class TestPropositionSet:
    def test_two_finding_plan(self):
        assert ir.proposition_set(sam_pair_plan()) == {BP_TUPLE,
                                                       SUGAR_TUPLE}

    def test_empty_plan(self):
        assert ir.proposition_set(ir.DocumentPlan(root=None)) == set()

    def test_deterministic(self):
        a = ir.proposition_set(sam_pair_plan())
        b = ir.proposition_set(sam_pair_plan())
        assert a == b

    def test_invariant_under_relabeling(self):
        plan = sam_pair_plan()
        relabeled = dataclasses.replace(
            plan, root=dataclasses.replace(plan.root, label="contrast"))
        assert ir.proposition_set(plan) == ir.proposition_set(relabeled)

    def test_premodifier_order_is_cosmetic(self):
        a = ir.Message(subject="sam", verb="have",
                       complements=(phrase("high", "blood",
                                           head="pressure"),))
        b = ir.Message(subject="sam", verb="have",
                       complements=(phrase("blood", "high",
                                           head="pressure"),))
        pa = ir.DocumentPlan(root=leaf(a), entities={"sam": SAM})
        pb = ir.DocumentPlan(root=leaf(b), entities={"sam": SAM})
        assert ir.proposition_set(pa) == ir.proposition_set(pb)

    def test_condition_nested_tuple(self):
        trigger = ir.Message(subject="sam", verb="go",
                             complements=(phrase(head="hospital", det="the",
                                                 prep="to"),))
        msg = ir.Message(subject="sam", verb="go", modal="should",
                         complements=(phrase(head="store", det="the",
                                             prep="to"),),
                         condition=trigger)
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        (row,) = ir.proposition_set(plan)
        assert row[4] == "should"
        assert row[6] == ("sam", "go",
                          (("prepositional-phrase", "the", (), "hospital",
                            "to"),),
                          "present", "none", "positive")

    def test_dangling_subject_raises(self):
        plan = dataclasses.replace(sam_pair_plan(), entities={})
        with pytest.raises(ReferentialIntegrityError):
            ir.proposition_set(plan)

    def test_dangling_complement_reference_raises(self):
        msg = ir.Message(subject="sam", verb="see",
                         complements=(ir.ComplementPhrase(
                             kind="entity-reference", head="@ghost"),))
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        with pytest.raises(ReferentialIntegrityError):
            ir.proposition_set(plan)


class TestValidate:
    def test_well_formed_leaf_plan(self):
        msg = ir.Message(subject="sam", verb="rest")
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        assert ir.validate(plan) == []

    def test_empty_plan_is_clean(self):
        assert ir.validate(ir.DocumentPlan(root=None)) == []

    def test_relation_without_children(self):
        plan = ir.DocumentPlan(
            root=seq(seq(), leaf(ir.Message(subject="sam", verb="rest"))),
            entities={"sam": SAM})
        problems = ir.validate(plan)
        assert any("root.children[0]" in p and "no children" in p
                   for p in problems)

    def test_missing_entity_is_referential_violation(self):
        plan = dataclasses.replace(sam_pair_plan(), entities={})
        problems = ir.validate(plan)
        assert any("referential integrity" in p for p in problems)

    def test_condition_nesting_depth(self):
        inner = ir.Message(subject="sam", verb="rest")
        mid = ir.Message(subject="sam", verb="rest", condition=inner)
        outer = ir.Message(subject="sam", verb="rest", condition=mid)
        plan = ir.DocumentPlan(root=leaf(outer), entities={"sam": SAM})
        assert any("nest" in p for p in ir.validate(plan))

    def test_prepositional_phrase_needs_preposition(self):
        bad = ir.ComplementPhrase(kind="prepositional-phrase",
                                  head="store")
        msg = ir.Message(subject="sam", verb="go", complements=(bad,))
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        assert any("preposition" in p for p in ir.validate(plan))

    def test_entity_reference_rejects_premodifiers(self):
        bad = ir.ComplementPhrase(kind="entity-reference", head="@sam",
                                  premodifiers=("tall",))
        msg = ir.Message(subject="sam", verb="see", complements=(bad,))
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        assert any("premodifiers" in p for p in ir.validate(plan))

    def test_uppercase_verb_rejected(self):
        msg = ir.Message(subject="sam", verb="Rest")
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM})
        assert any("lowercase" in p for p in ir.validate(plan))

    def test_source_key_must_resolve(self):
        msg = ir.Message(subject="sam", verb="rest", source_key="ghost")
        plan = ir.DocumentPlan(root=leaf(msg), entities={"sam": SAM},
                               record_keys=("patient",))
        assert any("source_key" in p for p in ir.validate(plan))

    def test_entity_needs_exactly_one_of_name_head(self):
        both = ir.Entity(id="x", name="X", head="thing")
        neither = ir.Entity(id="y")
        plan = ir.DocumentPlan(root=None, entities={"x": both,
                                                    "y": neither})
        problems = ir.validate(plan)
        assert len([p for p in problems if "name/head" in p]) == 2

    def test_random_plans_validate_clean(self, rng):
        for _ in range(30):
            plan = random_document_plan(rng)
            assert ir.validate(plan) == []


class TestSerialization:
    def test_document_plan_round_trip(self):
        plan = sam_pair_plan()
        text = ir.document_plan_to_json(plan)
        assert ir.document_plan_from_json(text) == plan

    def test_document_plan_dump_is_stable(self):
        plan = sam_pair_plan()
        once = ir.document_plan_to_json(plan)
        again = ir.document_plan_to_json(ir.document_plan_from_json(once))
        assert once == again

    def test_random_plans_round_trip(self, rng):
        for _ in range(30):
            plan = random_document_plan(rng)
            assert ir.document_plan_from_json(
                ir.document_plan_to_json(plan)) == plan

    def test_sentence_plans_round_trip(self, rng):
        from nlgen import plan_sentences

        for _ in range(10):
            plan = random_document_plan(rng)
            for profile in ("fluent", "plain"):
                plans = plan_sentences(plan, profile)
                text = ir.sentence_plans_to_json(plans)
                assert ir.sentence_plans_from_json(text) == plans

    def test_malformed_document_plan(self):
        with pytest.raises(SerializationError):
            ir.document_plan_from_json("{\"root\": {}}")
        with pytest.raises(SerializationError):
            ir.document_plan_from_json("not json")

    def test_malformed_sentence_plans(self):
        with pytest.raises(SerializationError):
            ir.sentence_plans_from_json("{\"sentences\": [{}]}")

    def test_empty_plan_serializes(self):
        text = ir.document_plan_to_json(ir.DocumentPlan(root=None))
        assert ir.document_plan_from_json(text).root is None


class TestOracleAgreement:
    def test_sentence_side_equals_document_side(self, rng):
        from nlgen import plan_sentences

        for _ in range(30):
            plan = random_document_plan(rng)
            for profile in ("fluent", "plain"):
                plans = plan_sentences(plan, profile)
                assert oracle.expand_sentence_plans(plans) == \
                    ir.proposition_set(plan)
