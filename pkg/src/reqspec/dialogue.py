"""Conversation engine: drives clarification questions, proposes the
three confirmation formats (template sentence, formula, slot table), and
processes batch files through the same pipeline.

One engine serves many sessions; each session's state is owned by a single
caller at a time. The knowledge base and validator are read as snapshots,
and clarified terms are funneled to the store's single writer.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import AmbiguousTime, NoNumericConstant, NotProposing, SessionDone
from .extract import (
    LexiconTagger, load_comparator_lexicon, load_vague_terms, normalize_time,
    parse_condition, refine, validated,
)
from .guard import KnowledgeStore, SessionCache
from .reqmodel import (
    KIND_ORDER, KeyKind, KeyedPhrase, Requirement, SlotSet, ambiguity_check,
    completeness_check, defaulted_kinds,
)
from .sastl import (
    assemble_specification, format_time_phrase, format_number, print_formula,
    render_template, UNBOUNDED,
)

_KIND_NOUNS = {
    KeyKind.LOCATION: "location",
    KeyKind.TIME: "time range",
    KeyKind.CONDITION: "numeric limit",
    KeyKind.ENTITY: "main object",
    KeyKind.QUANTIFIER: "scope",
}

_CONFIRM_WORDS = {"confirm", "yes", "ok", "okay", "accept", "looks good"}


def generate_query(kind: KeyKind, context_phrase: str = "") -> str:
    """Deterministic clarification question for a missing or ambiguous kind."""
    noun = _KIND_NOUNS[kind]
    if context_phrase:
        return f"What is the {noun} for '{context_phrase}'?"
    return f"What is the {noun} for this requirement?"


@dataclass
class AssistantReply:
    kind: str  # question | proposal | ack | error
    text: str
    proposal: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "text": self.text, "proposal": self.proposal}
        return out


@dataclass
class Session:
    """One policy-maker conversation. A session converts requirements one
    after another; the cache lives for the whole conversation."""

    id: str
    state: str = "idle"  # idle | clarifying | proposing | done
    current: Optional[Requirement] = None
    cache: SessionCache = field(default_factory=SessionCache)
    transcript: list = field(default_factory=list)
    clarification_count: int = 0
    history: list = field(default_factory=list)
    pending_kind: Optional[KeyKind] = None
    pending_phrase: str = ""
    _req_counter: itertools.count = field(default_factory=lambda: itertools.count(1))


class Engine:
    """Binds tagger, refinement configuration, and the knowledge store."""

    def __init__(self, store: KnowledgeStore, tagger=None,
                 comparator_lexicon=None, vague_terms=None,
                 strict_time: bool = False):
        self.store = store
        self.tagger = validated(tagger or LexiconTagger())
        self.lexicon = comparator_lexicon or load_comparator_lexicon()
        self.vague_terms = vague_terms if vague_terms is not None else load_vague_terms()
        self.strict_time = strict_time
        self._session_ids = itertools.count(1)
        self.confirmed: list[dict] = []

    # -- session lifecycle ---------------------------------------------------

    def start_session(self) -> Session:
        return Session(id=f"s{next(self._session_ids)}")

    def _reply(self, session: Session, reply: AssistantReply) -> AssistantReply:
        session.transcript.append(("assistant", reply.text))
        return reply

    # -- core pipeline ---------------------------------------------------------

    def _tag_and_refine(self, text: str) -> SlotSet:
        slots = self.tagger.tag(text, self.store.kb)
        return refine(slots, text, self.store.kb, self.lexicon)

    def _open_questions(self, slots: SlotSet) -> list[tuple[KeyKind, str]]:
        """(kind, context phrase) pairs still blocking a proposal, in the
        fixed asking order."""
        questions = []
        missing = completeness_check(slots, strict=self.strict_time)
        for kind in missing:
            questions.append((kind, ""))
        flagged = ambiguity_check(slots, self.vague_terms)
        flagged.extend(
            (kind, phrase, reason) for kind, phrase, reason in slots.issues)
        for kind, phrase, _reason in flagged:
            if kind not in [q[0] for q in questions]:
                questions.append((kind, phrase or ""))
        questions.sort(key=lambda q: KIND_ORDER.index(q[0]))
        return questions

    def _apply_cache(self, session: Session, text: str,
                     slots: SlotSet) -> SlotSet:
        """Fill open kinds from this session's clarification cache."""
        questions = self._open_questions(slots)
        changed = False
        for kind, context in questions:
            cached = session.cache.lookup_in_text(kind, text)
            if cached is None and context:
                cached = session.cache.lookup_in_text(kind, context)
            if cached is None:
                continue
            slots.replace_kind(kind, KeyedPhrase(kind, cached, None, 1.0))
            changed = True
        if changed:
            return refine(slots, text, self.store.kb, self.lexicon)
        return slots

    def handle_message(self, session: Session, text: str) -> AssistantReply:
        """One user turn: returns a question, a proposal, or an ack."""
        if session.state == "done":
            raise SessionDone(f"session {session.id} already confirmed")
        session.transcript.append(("user", text))

        if session.state == "idle":
            req = Requirement(id=f"{session.id}-r{next(session._req_counter)}",
                              source_text=text)
            req.slots = self._tag_and_refine(text)
            req.slots = self._apply_cache(session, text, req.slots)
            session.current = req
            return self._advance(session)

        if session.state == "clarifying":
            return self._absorb_answer(session, text)

        if session.state == "proposing":
            lowered = " ".join(text.lower().split())
            if lowered in _CONFIRM_WORDS:
                return self.confirm(session)
            if lowered.startswith("revise "):
                parts = text.split(None, 2)
                if len(parts) == 3:
                    try:
                        kind = KeyKind(parts[1].lower())
                    except ValueError:
                        kind = None
                    if kind is not None:
                        return self.revise(session, kind, parts[2])
            return self._reply(session, AssistantReply(
                "ack",
                "Reply 'confirm' to accept, or 'revise <key> <new phrase>' "
                "to change a field."))

        raise SessionDone(f"session {session.id} in unexpected state")

    def _advance(self, session: Session) -> AssistantReply:
        """Ask the next open question or propose the specification."""
        req = session.current
        questions = self._open_questions(req.slots)
        if questions:
            kind, context = questions[0]
            session.state = "clarifying"
            session.pending_kind = kind
            session.pending_phrase = context
            session.clarification_count += 1
            req.status = "awaiting_clarification"
            return self._reply(session, AssistantReply(
                "question", generate_query(kind, context)))
        return self._propose(session)

    def _absorb_answer(self, session: Session, text: str) -> AssistantReply:
        req = session.current
        kind = session.pending_kind
        answer = text.strip().rstrip(".") if kind is KeyKind.TIME else text.strip()

        # Sanity-check the answer through the kind's own normalizer before
        # committing it; a bad answer re-asks instead of crashing.
        try:
            if kind is KeyKind.TIME:
                normalize_time(answer)
            elif kind is KeyKind.CONDITION:
                probe = SlotSet([KeyedPhrase(kind, answer, None, 1.0)])
                parse_condition(answer, probe, self.lexicon)
        except (AmbiguousTime, NoNumericConstant):
            session.clarification_count += 1
            return self._reply(session, AssistantReply(
                "question",
                f"Sorry, I could not interpret that. "
                f"{generate_query(kind, session.pending_phrase)}"))

        req.slots.replace_kind(kind, KeyedPhrase(kind, answer, None, 1.0))
        session.cache.put(req.id, kind, answer,
                          context_term=session.pending_phrase)
        self.store.promote(answer, kind)
        req.slots = refine(req.slots, req.source_text, self.store.kb, self.lexicon)
        session.pending_kind = None
        session.pending_phrase = ""
        return self._advance(session)

    def _propose(self, session: Session) -> AssistantReply:
        req = session.current
        formula = assemble_specification(req.slots)
        template = render_template(req.slots)
        req.formula = formula
        req.status = "proposed"
        session.state = "proposing"
        bundle = {
            "template_sentence": template,
            "formula_text": print_formula(formula),
            "slot_table": self._slot_table(req.slots),
            "source_text": req.source_text,
            "tokens": req.tokens,
            "slots": req.slots.to_dict(),
        }
        text = ("Here is the proposed requirement. Reply 'confirm' to accept "
                "or 'revise <key> <new phrase>' to change a field.")
        return self._reply(session, AssistantReply("proposal", text, bundle))

    def _slot_table(self, slots: SlotSet) -> dict:
        cond = slots.condition
        interval = slots.time_interval or UNBOUNDED
        cond_text = ""
        if cond:
            cond_text = f"{cond.comparator.value} {format_number(cond.constant)}"
            if cond.unit:
                cond_text += f" {cond.unit}"
        return {
            "entity": slots.first_text(KeyKind.ENTITY) or "",
            "quantifier": slots.first_text(KeyKind.QUANTIFIER) or "",
            "location": " and ".join(p.text for p in slots.get(KeyKind.LOCATION)),
            "time": format_time_phrase(interval),
            "condition": cond_text,
            "defaulted": [k.value for k in defaulted_kinds(slots)],
        }

    # -- confirm / revise ---------------------------------------------------------

    def confirm(self, session: Session) -> AssistantReply:
        """Freeze the proposed requirement and get ready for the next one.

        The session stays open (one conversation covers many requirements,
        and the clarification cache must survive between them); it reaches
        the terminal state only through end_session."""
        if session.state != "proposing":
            raise NotProposing(f"session {session.id} has no proposal to confirm")
        req = session.current
        req.status = "confirmed"
        session.history.append(req)
        session.current = None
        session.state = "idle"
        record = {
            "source_text": req.source_text,
            "slots": req.slots.to_dict(),
            "formula_text": print_formula(req.formula),
        }
        self.confirmed.append(record)
        return self._reply(session, AssistantReply(
            "ack", "Confirmed. The requirement has been recorded."))

    def end_session(self, session: Session) -> None:
        session.state = "done"
        session.cache.close()

    def revise(self, session: Session, kind: KeyKind, phrase: str) -> AssistantReply:
        if session.state != "proposing":
            raise NotProposing(f"session {session.id} has no proposal to revise")
        req = session.current
        req.slots.replace_kind(kind, KeyedPhrase(kind, phrase.strip(), None, 1.0))
        req.slots = refine(req.slots, req.source_text, self.store.kb, self.lexicon)
        session.pending_kind = None
        session.pending_phrase = ""
        return self._advance(session)

    # -- batch --------------------------------------------------------------------

    def process_batch(self, lines) -> dict:
        """Run many requirements through the one-shot pipeline.

        Input may be plain text lines or JSONL objects with a "text"
        field. Lines that convert cleanly are confirmed; the rest land in
        a pending queue with their generated questions. Per-line failures
        are collected, never fatal.
        """
        confirmed = []
        pending = []
        errors = []
        rounds = []
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                if line.startswith("{"):
                    record = json.loads(line)
                    text = record["text"]
                else:
                    text = line
                slots = self._tag_and_refine(text)
                questions = self._open_questions(slots)
                rounds.append(len(questions))
                if questions:
                    pending.append({
                        "line": lineno,
                        "text": text,
                        "questions": [generate_query(k, c) for k, c in questions],
                    })
                else:
                    formula = assemble_specification(slots)
                    confirmed.append({
                        "line": lineno,
                        "text": text,
                        "formula_text": print_formula(formula),
                        "template_sentence": render_template(slots),
                        "slots": slots.to_dict(),
                    })
            except Exception as exc:  # per-line isolation
                errors.append({"line": lineno, "error": str(exc)})
        report = {
            "confirmed": len(confirmed),
            "pending": len(pending),
            "errors": errors,
            "rounds_per_requirement": rounds,
            "mean_rounds": (sum(rounds) / len(rounds)) if rounds else 0.0,
            "max_rounds": max(rounds, default=0),
            "confirmed_items": confirmed,
            "pending_items": pending,
        }
        return report
