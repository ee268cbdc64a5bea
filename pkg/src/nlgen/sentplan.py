"""Sentence planning: document plans to sentence plans.

Three passes add fluency without changing what the text says:

  aggregate              merge adjacent same-shaped messages into one
                         clause with a coordinated complement group
  insert_discourse_markers
                         add "also" to a conditional whose main clause
                         repeats the condition's verb with a different
                         complement
  pronominalize          replace repeated full references with pronouns
                         (and same-clause object corefs with reflexives)

The "plain" profile skips all three: one sentence per message, every
reference full.  Under both profiles proposition_set() of the output
equals proposition_set() of the input plan; the test suite enforces this
on every corpus document and on randomized plans.

Pass order matters: aggregation changes the sentence boundaries that the
recency-based pronoun rule depends on, and the marker pass needs final
clause structure.  Pronominalization uses a deliberately conservative
rule — a one-sentence recency window with a gender/number competitor
block — so a pronoun's nearest feature-matching antecedent is always the
intended entity.

Paragraphs: each relation child of the plan root opens its own paragraph;
a run of bare leaf children forms one paragraph.  Aggregation never
crosses a paragraph break and never reorders messages.
"""

from __future__ import annotations

from dataclasses import replace

from . import ir
from .errors import InvalidPlanError, ReferentialIntegrityError

PROFILES = ("fluent", "plain")

AGGREGATION_CAP = 3  # max coordination units in one group


def _entity(entities: dict[str, ir.Entity], entity_id: str) -> ir.Entity:
    ent = entities.get(entity_id)
    if ent is None:
        raise ReferentialIntegrityError(
            f"dangling entity reference: {entity_id!r}")
    return ent


def _full_mode(ent: ir.Entity) -> str:
    return "full-name" if ent.name else "head-noun"


def _resolve_unit(complements, entities) -> tuple[ir.ResolvedComplement, ...]:
    unit = []
    for phrase in complements:
        ref_id = ir.entity_ref(phrase.head)
        if ref_id is None:
            unit.append(ir.ResolvedComplement(phrase=phrase))
        else:
            ent = _entity(entities, ref_id)
            unit.append(ir.ResolvedComplement(
                phrase=phrase,
                ref=ir.ReferenceSpec(entity=ent, mode=_full_mode(ent),
                                     case="objective")))
    return tuple(unit)


def _build_clause(msg: ir.Message, entities) -> ir.ClauseSpec:
    subject = _entity(entities, msg.subject)
    condition = None
    if msg.condition is not None:
        condition = _build_clause(msg.condition, entities)
    markers = ()
    if msg.adverb:
        markers = (ir.DiscourseMarker(word=msg.adverb, position="pre-verb"),)
    return ir.ClauseSpec(
        subject_ref=ir.ReferenceSpec(entity=subject,
                                     mode=_full_mode(subject),
                                     case="subjective"),
        verb=msg.verb,
        tense=msg.tense,
        modal=msg.modal,
        polarity=msg.polarity,
        complements=(_resolve_unit(msg.complements, entities),),
        discourse_markers=markers,
        condition=condition,
    )


def _merge_key(msg: ir.Message):
    return (msg.subject, msg.verb, msg.tense, msg.modal, msg.polarity,
            msg.adverb)


def aggregate(messages: list[ir.Message], entities: dict[str, ir.Entity],
              cap: int = AGGREGATION_CAP) -> list[ir.ClauseSpec]:
    """Merge adjacent messages sharing subject, verb, tense, modal, and
    polarity into one coordinated clause, greedily left to right, at most
    ``cap`` units per group.  Condition-bearing messages and messages
    without complements never merge; order is always preserved."""
    clauses: list[ir.ClauseSpec] = []
    group: list[ir.Message] = []

    def mergeable(msg: ir.Message) -> bool:
        return msg.condition is None and bool(msg.complements)

    def flush() -> None:
        nonlocal group
        if not group:
            return
        clause = _build_clause(group[0], entities)
        if len(group) > 1:
            units = tuple(_resolve_unit(m.complements, entities)
                          for m in group)
            clause = replace(clause, complements=units)
        clauses.append(clause)
        group = []

    for msg in messages:
        if group and mergeable(msg) and mergeable(group[0]) \
                and _merge_key(msg) == _merge_key(group[0]) \
                and len(group) < cap:
            group.append(msg)
            continue
        flush()
        group = [msg]
    flush()
    return clauses


def insert_discourse_markers(
        plans: list[ir.SentencePlan]) -> list[ir.SentencePlan]:
    """Attach "also" before the main verb of a conditional sentence whose
    condition clause has the same verb but different complements.
    Idempotent: an existing "also" is never duplicated."""

    def norm_units(clause: ir.ClauseSpec):
        return tuple(
            tuple(ir._normalize_phrase(rc.phrase) for rc in unit)
            for unit in clause.complements)

    def mark(clause: ir.ClauseSpec) -> ir.ClauseSpec:
        cond = clause.condition
        if cond is None:
            return clause
        if clause.verb != cond.verb:
            return clause
        if norm_units(clause) == norm_units(cond):
            return clause
        if any(m.word == "also" for m in clause.discourse_markers):
            return clause
        markers = clause.discourse_markers + (
            ir.DiscourseMarker(word="also", position="pre-verb"),)
        return replace(clause, discourse_markers=markers)

    return [replace(sp, clauses=tuple(mark(c) for c in sp.clauses))
            for sp in plans]


def _clause_mention_slots(clause: ir.ClauseSpec):
    """Mention sites of a clause in surface order.

    Yields (path, ref) pairs where path addresses the reference inside the
    clause so it can be rewritten: the condition clause renders first,
    then the subject, then complement references.
    """
    slots = []
    if clause.condition is not None:
        for path, ref in _clause_mention_slots(clause.condition):
            slots.append((("condition",) + path, ref))
    slots.append((("subject",), clause.subject_ref))
    for ui, unit in enumerate(clause.complements):
        for ci, rc in enumerate(unit):
            if rc.ref is not None:
                slots.append((("complement", ui, ci), rc.ref))
    return slots


def _rewrite_clause(clause: ir.ClauseSpec, modes: dict) -> ir.ClauseSpec:
    condition = clause.condition
    if condition is not None:
        cond_modes = {path[1:]: mode for path, mode in modes.items()
                      if path[0] == "condition"}
        condition = _rewrite_clause(condition, cond_modes)
    subject_ref = clause.subject_ref
    if ("subject",) in modes:
        subject_ref = replace(subject_ref, mode=modes[("subject",)])
    units = []
    for ui, unit in enumerate(clause.complements):
        new_unit = []
        for ci, rc in enumerate(unit):
            key = ("complement", ui, ci)
            if key in modes:
                new_unit.append(replace(
                    rc, ref=replace(rc.ref, mode=modes[key])))
            else:
                new_unit.append(rc)
        units.append(tuple(new_unit))
    return replace(clause, subject_ref=subject_ref,
                   condition=condition, complements=tuple(units))


def pronominalize(plans: list[ir.SentencePlan],
                  entities: dict[str, ir.Entity]) -> list[ir.SentencePlan]:
    """Rewrite reference modes using a one-sentence recency window.

    A third-person mention becomes a pronoun when its entity was already
    mentioned in the immediately preceding sentence or earlier in the
    current sentence, and no other third-person entity with the same
    gender and number appears in that window.  A non-subject mention
    coreferent with its clause subject becomes a reflexive regardless of
    the window.  First mentions are never pronominalized.
    """
    out: list[ir.SentencePlan] = []
    prev_sentence: list[ir.Entity] = []
    for sp in plans:
        current: list[ir.Entity] = []
        new_clauses = []
        for clause in sp.clauses:
            modes: dict = {}
            for path, ref in _clause_mention_slots(clause):
                ent = entities.get(ref.entity.id)
                if ent is None:
                    raise ReferentialIntegrityError(
                        f"dangling entity reference: {ref.entity.id!r}")
                # Whose subject does this mention sit under?
                if path[0] == "condition" and clause.condition is not None:
                    local_subject = clause.condition.subject_ref.entity.id
                else:
                    local_subject = clause.subject_ref.entity.id
                is_subject = path[-1] == "subject"
                if ent.person == "third":
                    if not is_subject and ent.id == local_subject:
                        modes[path] = "reflexive-pronoun"
                    else:
                        window = prev_sentence + current
                        mentioned = any(o.id == ent.id for o in window)
                        competitors = any(
                            o.id != ent.id and o.person == "third"
                            and o.gender == ent.gender
                            and o.number == ent.number
                            for o in window)
                        if mentioned and not competitors:
                            modes[path] = "pronoun"
                current.append(ent)
            new_clauses.append(_rewrite_clause(clause, modes))
        out.append(replace(sp, clauses=tuple(new_clauses)))
        prev_sentence = current
    return out


def _paragraph_leaf_groups(plan: ir.DocumentPlan) -> list[list[ir.Message]]:
    """Split the plan into paragraphs: one per relation child of the root,
    with runs of bare leaf children sharing a paragraph."""
    if plan.root is None:
        return []
    if plan.root.kind == "leaf":
        return [[plan.root.message]]
    groups: list[list[ir.Message]] = []
    run: list[ir.Message] = []
    for child in plan.root.children:
        if child.kind == "leaf":
            run.append(child.message)
            continue
        if run:
            groups.append(run)
            run = []
        messages = [leaf.message for leaf in
                    ir.plan_leaves(ir.DocumentPlan(root=child))]
        if messages:
            groups.append(messages)
    if run:
        groups.append(run)
    return groups


def plan_sentences(plan: ir.DocumentPlan,
                   profile: str = "fluent") -> list[ir.SentencePlan]:
    """Turn a document plan into sentence plans under the given profile."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; "
                         f"expected one of {PROFILES}")
    violations = ir.validate(plan)
    if violations:
        raise InvalidPlanError(violations)

    sentences: list[ir.SentencePlan] = []
    for pi, messages in enumerate(_paragraph_leaf_groups(plan)):
        if profile == "plain":
            clauses = [_build_clause(m, plan.entities) for m in messages]
        else:
            clauses = aggregate(messages, plan.entities)
        for ci, clause in enumerate(clauses):
            sentences.append(ir.SentencePlan(
                clauses=(clause,),
                terminal_punct="period",
                new_paragraph=(pi > 0 and ci == 0),
            ))
    if profile == "fluent":
        sentences = insert_discourse_markers(sentences)
        sentences = pronominalize(sentences, plan.entities)
    return sentences
