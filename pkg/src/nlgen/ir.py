"""Intermediate representations shared by the pipeline stages.

The document planner produces a DocumentPlan (a labeled tree whose leaves
carry Messages), the sentence planner turns it into SentencePlans (clause
structure with reference modes and discourse markers), and the realizer
renders those to text.  Both plan kinds serialize to a canonical JSON form
that round-trips losslessly; that serialization is the contract between
the stage-level CLI commands.

proposition_set() reduces either representation to a set of canonical
proposition tuples.  Sentence planning must preserve that set exactly,
which is how the test suite checks that cohesion passes never change what
a document says.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .errors import ReferentialIntegrityError, SerializationError

GENDERS = ("masculine", "feminine", "neuter")
NUMBERS = ("singular", "plural")
PERSONS = ("first", "second", "third")
TENSES = ("present", "past", "future")
MODALS = ("should", "must", "can")
POLARITIES = ("positive", "negative")
RELATION_LABELS = ("sequence", "elaboration", "contrast")
DETERMINERS = ("a", "the")
PHRASE_KINDS = ("noun-phrase", "prepositional-phrase", "entity-reference")
REFERENCE_MODES = ("full-name", "head-noun", "pronoun", "reflexive-pronoun")
CASES = ("subjective", "objective")

# Complement heads that name an entity instead of a common noun carry this
# prefix, e.g. "@mrs_black".
ENTITY_MARKER = "@"


def entity_ref(head: str) -> str | None:
    """Return the entity id named by a complement head, or None."""
    if head.startswith(ENTITY_MARKER):
        return head[len(ENTITY_MARKER):]
    return None


@dataclass(frozen=True)
class Entity:
    """A discourse referent: something the text can talk about."""

    id: str
    name: str | None = None
    head: str | None = None
    gender: str = "neuter"
    number: str = "singular"
    person: str = "third"
    honorific: str | None = None


@dataclass(frozen=True)
class ComplementPhrase:
    """One complement of a verb: noun phrase, PP, or entity reference."""

    kind: str
    head: str
    determiner: str | None = None
    premodifiers: tuple[str, ...] = ()
    preposition: str | None = None


@dataclass(frozen=True)
class Message:
    """One atomic proposition selected from the input data.

    A message with a ``condition`` realizes as "If <condition>, <main>".
    ``adverb`` is an optional pre-verb word carried through to the clause
    ("just" in "I just saw ...); it is styling, not propositional content.
    ``source_key`` names the top-level input record that licensed the
    message; empty when the message came from literals only.
    """

    subject: str
    verb: str
    complements: tuple[ComplementPhrase, ...] = ()
    tense: str = "present"
    modal: str | None = None
    polarity: str = "positive"
    adverb: str | None = None
    condition: "Message | None" = None
    source_key: str = ""


@dataclass(frozen=True)
class PlanNode:
    """DocumentPlan tree node: a leaf Message or a labeled relation."""

    kind: str  # "leaf" | "relation"
    message: Message | None = None
    label: str | None = None
    children: tuple["PlanNode", ...] = ()


@dataclass(frozen=True)
class DocumentPlan:
    """Rhetorical tree over Messages, plus the tables needed to check it.

    ``entities`` and ``record_keys`` travel with the tree so the plan is
    self-contained: validate() and the later stages never need the original
    input data.  ``root`` is None for an empty document.
    """

    root: PlanNode | None
    entities: dict[str, Entity] = field(default_factory=dict)
    record_keys: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReferenceSpec:
    """How one mention of an entity is to be realized."""

    entity: Entity
    mode: str = "full-name"
    case: str = "subjective"


@dataclass(frozen=True)
class ResolvedComplement:
    """A complement phrase whose entity head (if any) carries a reference."""

    phrase: ComplementPhrase
    ref: ReferenceSpec | None = None


@dataclass(frozen=True)
class DiscourseMarker:
    word: str
    position: str = "pre-verb"


@dataclass(frozen=True)
class ClauseSpec:
    """Deep syntactic shape of one clause.

    ``complements`` is a single coordination group: one unit per source
    message, units joined by "and" at realization time.  An unaggregated
    clause has exactly one unit holding the message's complement phrases.
    """

    subject_ref: ReferenceSpec
    verb: str
    tense: str = "present"
    modal: str | None = None
    polarity: str = "positive"
    complements: tuple[tuple[ResolvedComplement, ...], ...] = ()
    discourse_markers: tuple[DiscourseMarker, ...] = ()
    condition: "ClauseSpec | None" = None


@dataclass(frozen=True)
class SentencePlan:
    """One output sentence; ``new_paragraph`` opens a paragraph before it."""

    clauses: tuple[ClauseSpec, ...]
    terminal_punct: str = "period"
    new_paragraph: bool = False


PlanLike = Union[DocumentPlan, "list[SentencePlan]", "tuple[SentencePlan, ...]"]


# ---------------------------------------------------------------------------
# Proposition tuples


def _normalize_phrase(phrase: ComplementPhrase) -> tuple:
    head = phrase.head if entity_ref(phrase.head) else phrase.head.lower()
    return (
        phrase.kind,
        phrase.determiner or "none",
        tuple(sorted(p.lower() for p in phrase.premodifiers)),
        head,
        phrase.preposition or "none",
    )


def _message_tuple(msg: Message, entities: dict[str, Entity]) -> tuple:
    _check_entity(msg.subject, entities)
    for phrase in msg.complements:
        ref = entity_ref(phrase.head)
        if ref is not None:
            _check_entity(ref, entities)
    comps = tuple(_normalize_phrase(c) for c in msg.complements)
    cond = None
    if msg.condition is not None:
        cond = _message_tuple(msg.condition, entities)[:6]
    return (msg.subject, msg.verb.lower(), comps, msg.tense,
            msg.modal or "none", msg.polarity, cond)


def _check_entity(entity_id: str, entities: dict[str, Entity]) -> None:
    if entity_id not in entities:
        raise ReferentialIntegrityError(
            f"dangling entity reference: {entity_id!r}")


def _clause_tuples(clause: ClauseSpec) -> list[tuple]:
    cond = None
    if clause.condition is not None:
        # Conditions never aggregate, so the nested clause holds one unit.
        cond = _clause_tuples(clause.condition)[0][:6]
    units = clause.complements or ((),)
    out = []
    for unit in units:
        comps = tuple(_normalize_phrase(rc.phrase) for rc in unit)
        out.append((clause.subject_ref.entity.id, clause.verb.lower(), comps,
                    clause.tense, clause.modal or "none", clause.polarity,
                    cond))
    return out


def plan_leaves(plan: DocumentPlan) -> list[PlanNode]:
    """All leaf nodes of a document plan in document order."""
    leaves: list[PlanNode] = []

    def walk(node: PlanNode) -> None:
        if node.kind == "leaf":
            leaves.append(node)
        else:
            for child in node.children:
                walk(child)

    if plan.root is not None:
        walk(plan.root)
    return leaves


def proposition_set(plan: PlanLike) -> set[tuple]:
    """Canonical proposition tuples carried by a plan.

    Works on a DocumentPlan or on a sequence of SentencePlans; coordination
    groups on the sentence side expand back into one tuple per source
    message, and reference modes are ignored (a pronoun and a full name for
    the same entity yield the same tuple).
    """
    if isinstance(plan, DocumentPlan):
        return {
            _message_tuple(leaf.message, plan.entities)
            for leaf in plan_leaves(plan)
        }
    out: set[tuple] = set()
    for sp in plan:
        for clause in sp.clauses:
            out.update(_clause_tuples(clause))
    return out


# ---------------------------------------------------------------------------
# Validation


def _validate_entity(eid: str, ent: Entity, problems: list[str]) -> None:
    where = f"entities[{eid}]"
    if bool(ent.name) == bool(ent.head):
        problems.append(
            f"{where}: exactly one of name/head must be non-empty")
    if ent.gender not in GENDERS:
        problems.append(f"{where}: unknown gender {ent.gender!r}")
    if ent.number not in NUMBERS:
        problems.append(f"{where}: unknown number {ent.number!r}")
    if ent.person not in PERSONS:
        problems.append(f"{where}: unknown person {ent.person!r}")


def _validate_phrase(phrase: ComplementPhrase, plan: DocumentPlan,
                     where: str, problems: list[str]) -> None:
    if phrase.kind not in PHRASE_KINDS:
        problems.append(f"{where}: unknown complement kind {phrase.kind!r}")
        return
    if phrase.kind == "prepositional-phrase" and not phrase.preposition:
        problems.append(f"{where}: prepositional-phrase needs a preposition")
    if phrase.kind == "entity-reference":
        if phrase.premodifiers:
            problems.append(
                f"{where}: entity-reference carries premodifiers")
        if entity_ref(phrase.head) is None:
            problems.append(
                f"{where}: entity-reference head must be an @entity id")
    if phrase.determiner is not None and phrase.determiner not in DETERMINERS:
        problems.append(f"{where}: unknown determiner {phrase.determiner!r}")
    ref = entity_ref(phrase.head)
    if ref is not None and ref not in plan.entities:
        problems.append(
            f"{where}: referential integrity: unknown entity {ref!r}")


def _validate_message(msg: Message, plan: DocumentPlan, where: str,
                      problems: list[str], nested: bool = False) -> None:
    if not msg.verb or msg.verb != msg.verb.lower():
        problems.append(f"{where}: verb lemma must be non-empty lowercase")
    if msg.subject not in plan.entities:
        problems.append(
            f"{where}: referential integrity: unknown subject entity "
            f"{msg.subject!r}")
    if msg.tense not in TENSES:
        problems.append(f"{where}: unknown tense {msg.tense!r}")
    if msg.modal is not None and msg.modal not in MODALS:
        problems.append(f"{where}: unknown modal {msg.modal!r}")
    if msg.polarity not in POLARITIES:
        problems.append(f"{where}: unknown polarity {msg.polarity!r}")
    if msg.source_key and msg.source_key not in plan.record_keys:
        problems.append(
            f"{where}: source_key {msg.source_key!r} does not name an "
            f"input record")
    for i, phrase in enumerate(msg.complements):
        _validate_phrase(phrase, plan, f"{where}.complements[{i}]", problems)
    if msg.condition is not None:
        if nested:
            problems.append(
                f"{where}: conditions may not nest below one level")
        else:
            _validate_message(msg.condition, plan, f"{where}.condition",
                              problems, nested=True)


def validate(plan: DocumentPlan) -> list[str]:
    """Check every structural invariant; returns one description per
    violation (empty list means the plan is well-formed)."""
    problems: list[str] = []
    for eid, ent in plan.entities.items():
        if eid != ent.id:
            problems.append(
                f"entities[{eid}]: table key does not match entity id "
                f"{ent.id!r}")
        _validate_entity(eid, ent, problems)

    def walk(node: PlanNode, where: str) -> None:
        if node.kind == "leaf":
            if node.message is None:
                problems.append(f"{where}: leaf node carries no message")
            else:
                _validate_message(node.message, plan, f"{where}.message",
                                  problems)
            if node.children:
                problems.append(f"{where}: leaf node has children")
        elif node.kind == "relation":
            if node.label not in RELATION_LABELS:
                problems.append(
                    f"{where}: unknown relation label {node.label!r}")
            if not node.children:
                problems.append(f"{where}: relation node has no children")
            if node.message is not None:
                problems.append(f"{where}: relation node carries a message")
            for i, child in enumerate(node.children):
                walk(child, f"{where}.children[{i}]")
        else:
            problems.append(f"{where}: unknown node kind {node.kind!r}")

    if plan.root is not None:
        walk(plan.root, "root")
    return problems


# ---------------------------------------------------------------------------
# Canonical JSON serialization

_JSON_KW = dict(indent=2, sort_keys=True, ensure_ascii=False)


def _entity_to_obj(ent: Entity) -> dict:
    return {
        "id": ent.id,
        "name": ent.name,
        "head": ent.head,
        "gender": ent.gender,
        "number": ent.number,
        "person": ent.person,
        "honorific": ent.honorific,
    }


def entity_from_obj(eid: str, obj: dict) -> Entity:
    """Build an Entity from its JSON object form (also used by data files)."""
    if not isinstance(obj, dict):
        raise SerializationError(f"entity {eid!r}: expected an object")
    known = {"id", "name", "head", "gender", "number", "person", "honorific"}
    unknown = set(obj) - known
    if unknown:
        raise SerializationError(
            f"entity {eid!r}: unknown fields {sorted(unknown)}")
    return Entity(
        id=obj.get("id", eid),
        name=obj.get("name"),
        head=obj.get("head"),
        gender=obj.get("gender", "neuter"),
        number=obj.get("number", "singular"),
        person=obj.get("person", "third"),
        honorific=obj.get("honorific"),
    )


def _phrase_to_obj(phrase: ComplementPhrase) -> dict:
    return {
        "kind": phrase.kind,
        "head": phrase.head,
        "determiner": phrase.determiner,
        "premodifiers": list(phrase.premodifiers),
        "preposition": phrase.preposition,
    }


def _phrase_from_obj(obj: dict) -> ComplementPhrase:
    return ComplementPhrase(
        kind=obj["kind"],
        head=obj["head"],
        determiner=obj.get("determiner"),
        premodifiers=tuple(obj.get("premodifiers", ())),
        preposition=obj.get("preposition"),
    )


def _message_to_obj(msg: Message) -> dict:
    return {
        "subject": msg.subject,
        "verb": msg.verb,
        "complements": [_phrase_to_obj(c) for c in msg.complements],
        "tense": msg.tense,
        "modal": msg.modal,
        "polarity": msg.polarity,
        "adverb": msg.adverb,
        "condition": None if msg.condition is None
        else _message_to_obj(msg.condition),
        "source_key": msg.source_key,
    }


def _message_from_obj(obj: dict) -> Message:
    cond = obj.get("condition")
    return Message(
        subject=obj["subject"],
        verb=obj["verb"],
        complements=tuple(_phrase_from_obj(c) for c in obj["complements"]),
        tense=obj.get("tense", "present"),
        modal=obj.get("modal"),
        polarity=obj.get("polarity", "positive"),
        adverb=obj.get("adverb"),
        condition=None if cond is None else _message_from_obj(cond),
        source_key=obj.get("source_key", ""),
    )


def _node_to_obj(node: PlanNode) -> dict:
    if node.kind == "leaf":
        return {"kind": "leaf", "message": _message_to_obj(node.message)}
    return {
        "kind": "relation",
        "label": node.label,
        "children": [_node_to_obj(c) for c in node.children],
    }


def _node_from_obj(obj: dict) -> PlanNode:
    if obj["kind"] == "leaf":
        return PlanNode(kind="leaf", message=_message_from_obj(obj["message"]))
    return PlanNode(
        kind="relation",
        label=obj["label"],
        children=tuple(_node_from_obj(c) for c in obj["children"]),
    )


def document_plan_to_json(plan: DocumentPlan) -> str:
    payload = {
        "entities": {eid: _entity_to_obj(e)
                     for eid, e in plan.entities.items()},
        "record_keys": sorted(plan.record_keys),
        "root": None if plan.root is None else _node_to_obj(plan.root),
    }
    return json.dumps(payload, **_JSON_KW) + "\n"


def document_plan_from_json(text: str) -> DocumentPlan:
    try:
        payload = json.loads(text)
        entities = {eid: entity_from_obj(eid, obj)
                    for eid, obj in payload["entities"].items()}
        root = payload["root"]
        return DocumentPlan(
            root=None if root is None else _node_from_obj(root),
            entities=entities,
            record_keys=tuple(payload.get("record_keys", ())),
        )
    except SerializationError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SerializationError(f"malformed document plan: {exc}") from exc


def _ref_to_obj(ref: ReferenceSpec) -> dict:
    return {
        "entity": _entity_to_obj(ref.entity),
        "mode": ref.mode,
        "case": ref.case,
    }


def _ref_from_obj(obj: dict) -> ReferenceSpec:
    ent = obj["entity"]
    return ReferenceSpec(
        entity=entity_from_obj(ent.get("id", ""), ent),
        mode=obj["mode"],
        case=obj["case"],
    )


def _clause_to_obj(clause: ClauseSpec) -> dict:
    return {
        "subject": _ref_to_obj(clause.subject_ref),
        "verb": clause.verb,
        "tense": clause.tense,
        "modal": clause.modal,
        "polarity": clause.polarity,
        "complements": [
            [{"phrase": _phrase_to_obj(rc.phrase),
              "ref": None if rc.ref is None else _ref_to_obj(rc.ref)}
             for rc in unit]
            for unit in clause.complements
        ],
        "discourse_markers": [
            {"word": m.word, "position": m.position}
            for m in clause.discourse_markers
        ],
        "condition": None if clause.condition is None
        else _clause_to_obj(clause.condition),
    }


def _clause_from_obj(obj: dict) -> ClauseSpec:
    cond = obj.get("condition")
    return ClauseSpec(
        subject_ref=_ref_from_obj(obj["subject"]),
        verb=obj["verb"],
        tense=obj.get("tense", "present"),
        modal=obj.get("modal"),
        polarity=obj.get("polarity", "positive"),
        complements=tuple(
            tuple(
                ResolvedComplement(
                    phrase=_phrase_from_obj(rc["phrase"]),
                    ref=None if rc.get("ref") is None
                    else _ref_from_obj(rc["ref"]),
                )
                for rc in unit)
            for unit in obj["complements"]),
        discourse_markers=tuple(
            DiscourseMarker(word=m["word"], position=m["position"])
            for m in obj.get("discourse_markers", ())),
        condition=None if cond is None else _clause_from_obj(cond),
    )


def sentence_plans_to_json(plans: list[SentencePlan]) -> str:
    payload = {
        "sentences": [
            {
                "clauses": [_clause_to_obj(c) for c in sp.clauses],
                "terminal_punct": sp.terminal_punct,
                "new_paragraph": sp.new_paragraph,
            }
            for sp in plans
        ]
    }
    return json.dumps(payload, **_JSON_KW) + "\n"


def sentence_plans_from_json(text: str) -> list[SentencePlan]:
    try:
        payload = json.loads(text)
        plans = []
        for obj in payload["sentences"]:
            plans.append(SentencePlan(
                clauses=tuple(_clause_from_obj(c) for c in obj["clauses"]),
                terminal_punct=obj.get("terminal_punct", "period"),
                new_paragraph=obj.get("new_paragraph", False),
            ))
        return plans
    except SerializationError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SerializationError(f"malformed sentence plans: {exc}") from exc
