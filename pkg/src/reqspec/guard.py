"""Online learning: short-term session cache, validation of new term-key
pairs under uncertainty, and long-term promotion into the knowledge base.

The validator is a per-kind character n-gram model (n = 2 and 3) trained
from the knowledge-base vocabulary. Uncertainty comes from an ensemble of
stochastic passes: each pass scores the term with a random fraction of its
n-gram features masked out and votes for a kind; the spread of the votes
is the uncertainty. A term-key pair is rejected either because the
predicted kind does not align with the claimed one (fault I) or because
the prediction is too uncertain even though it aligns (fault II).
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyTerm, EmptyVocabulary, SessionClosed
from .knowledge import KnowledgeBase
from .reqmodel import KeyKind, normalize_phrase

KIND_INDEX = list(KeyKind)

DEFAULT_PASSES = 30
DEFAULT_DROPOUT = 0.5
DEFAULT_THRESHOLD = 0.5
DEFAULT_RETRAIN_EVERY = 25

_SMOOTHING = 0.2


@dataclass(frozen=True)
class ValidationVerdict:
    term: str
    claimed: KeyKind
    predicted: Optional[KeyKind]
    uncertainty: float
    decision: str  # accept | reject_fault_I | reject_fault_II

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "claimed": self.claimed.value,
            "predicted": self.predicted.value if self.predicted else None,
            "uncertainty": round(self.uncertainty, 4),
            "decision": self.decision,
        }


def _grams(term: str) -> list[str]:
    text = normalize_phrase(term)
    out = []
    for n in (2, 3):
        out.extend(text[i:i + n] for i in range(len(text) - n + 1))
    if not out and text:
        out.append(text)
    return out


class Validator:
    """Frozen n-gram tables plus the ensemble parameters."""

    # A pass only casts a vote when at least this fraction of its surviving
    # grams carries class evidence; out-of-vocabulary grams say nothing
    # about the kind, so sparse evidence must read as uncertainty.
    MIN_EVIDENCE = 0.5

    def __init__(self, gram_index, log_probs, passes, dropout, seed):
        self.gram_index = gram_index          # gram -> row
        self.log_probs = log_probs            # (n_grams, n_kinds) float64
        self.passes = passes
        self.dropout = dropout
        self.seed = seed

    def _term_rng(self, term: str) -> np.random.Generator:
        digest = hashlib.sha256(f"{self.seed}|{normalize_phrase(term)}".encode())
        return np.random.default_rng(int.from_bytes(digest.digest()[:8], "big"))

    def vote(self, term: str) -> tuple[Optional[KeyKind], float]:
        """(majority kind, uncertainty) over the stochastic passes."""
        grams = _grams(term)
        rows = np.array([self.gram_index.get(g, -1) for g in grams])
        known = rows >= 0
        if not known.any():
            return None, 1.0
        features = self.log_probs[rows[known]]                # (k, kinds)
        rng = self._term_rng(term)
        masks = rng.random((self.passes, len(grams))) >= self.dropout
        kept_known = masks[:, known].sum(axis=1)
        kept_total = masks.sum(axis=1)
        scores = masks[:, known] @ features                   # (passes, kinds)
        live = (kept_known > 0) & (kept_known >= self.MIN_EVIDENCE * kept_total)
        votes = np.full(self.passes, -1)
        votes[live] = np.argmax(scores[live], axis=1)
        counts = np.bincount(votes[votes >= 0], minlength=len(KIND_INDEX))
        if counts.sum() == 0:
            return None, 1.0
        winner = int(np.argmax(counts))
        majority = int(counts[winner])
        return KIND_INDEX[winner], 1.0 - majority / self.passes


def train_validator(kb: KnowledgeBase, passes: int = DEFAULT_PASSES,
                    dropout: float = DEFAULT_DROPOUT, seed: int = 7) -> Validator:
    """Count character n-grams per kind and freeze smoothed log-likelihood
    tables. Deterministic for a given knowledge base and seed."""
    if passes < 1:
        raise ValueError("need at least one pass")
    if not (0.0 <= dropout < 1.0):
        raise ValueError("dropout must be in [0,1)")
    phrase_sets = {}
    for kind in KeyKind:
        terms = kb.terms(kind)
        if not terms:
            raise EmptyVocabulary(f"kind {kind.value!r} has no phrases to train on")
        phrase_sets[kind] = terms

    counts: dict[str, np.ndarray] = {}
    totals = np.zeros(len(KIND_INDEX))
    for column, kind in enumerate(KIND_INDEX):
        for term in phrase_sets[kind]:
            for gram in _grams(term):
                row = counts.get(gram)
                if row is None:
                    row = counts[gram] = np.zeros(len(KIND_INDEX))
                row[column] += 1
                totals[column] += 1

    grams = sorted(counts)
    gram_index = {g: i for i, g in enumerate(grams)}
    table = np.stack([counts[g] for g in grams])
    vocab_size = len(grams) + 1
    log_probs = np.log((table + _SMOOTHING) / (totals + _SMOOTHING * vocab_size))
    return Validator(gram_index, log_probs, passes, dropout, seed)


def validate(validator: Validator, term: str, claimed: KeyKind,
             threshold: float = DEFAULT_THRESHOLD,
             merge_entity_quantifier: bool = True) -> ValidationVerdict:
    """Apply the two rejection rules to a term-key pair.

    Misaligned prediction -> reject_fault_I; aligned but uncertainty at or
    above the threshold -> reject_fault_II; otherwise accept. With the
    merge rule on (default), entity and quantifier count as aligned with
    each other, since short phrases rarely distinguish them.
    """
    if not term or not term.strip():
        raise EmptyTerm("cannot validate an empty term")
    predicted, uncertainty = validator.vote(term)
    if predicted is None:
        decision = "reject_fault_II"
    else:
        merged = {KeyKind.ENTITY, KeyKind.QUANTIFIER}
        aligned = predicted == claimed or (
            merge_entity_quantifier and predicted in merged and claimed in merged)
        if not aligned:
            decision = "reject_fault_I"
        elif uncertainty >= threshold:
            decision = "reject_fault_II"
        else:
            decision = "accept"
    return ValidationVerdict(term, claimed, predicted, uncertainty, decision)


class SessionCache:
    """Session-scoped memory of clarification answers.

    Two indexes: by question (requirement id x kind) and by the answered
    term itself, so the same unknown term never triggers a second question
    within the session. Cleared when the session ends.
    """

    def __init__(self):
        self._by_question: dict[tuple[str, KeyKind], str] = {}
        self._by_term: dict[tuple[str, KeyKind], str] = {}
        self.closed = False

    def _check_open(self):
        if self.closed:
            raise SessionClosed("session cache has been discarded")

    def put(self, requirement_id: str, kind: KeyKind, phrase: str,
            context_term: str = ""):
        """Remember an answer both by question and by term. The optional
        context term is the phrase the question was about (an ambiguous
        "after midnight"), so a later occurrence of it resolves silently."""
        self._check_open()
        self._by_question[(requirement_id, kind)] = phrase
        self._by_term[(normalize_phrase(phrase), kind)] = phrase
        if context_term:
            self._by_term[(normalize_phrase(context_term), kind)] = phrase

    def get(self, requirement_id: str, kind: KeyKind) -> Optional[str]:
        self._check_open()
        return self._by_question.get((requirement_id, kind))

    def lookup_in_text(self, kind: KeyKind, text: str) -> Optional[str]:
        """A cached phrase of this kind that occurs inside the text."""
        self._check_open()
        haystack = f" {normalize_phrase(text)} "
        for (term, cached_kind), phrase in self._by_term.items():
            if cached_kind is kind and f" {term} " in haystack:
                return phrase
        return None

    def close(self):
        self._by_question.clear()
        self._by_term.clear()
        self.closed = True


@dataclass
class GuardConfig:
    passes: int = DEFAULT_PASSES
    dropout: float = DEFAULT_DROPOUT
    threshold: float = DEFAULT_THRESHOLD
    seed: int = 7
    merge_entity_quantifier: bool = True
    retrain_every: int = DEFAULT_RETRAIN_EVERY


class KnowledgeStore:
    """Single writer around the knowledge base and its validator.

    Readers take whatever snapshot is current; promotions swap in a new
    snapshot atomically and schedule a lazy batched retrain of the
    validator (every ``retrain_every`` promotions, or on demand).
    """

    def __init__(self, kb: KnowledgeBase, config: GuardConfig = None,
                 audit_path=None):
        self.config = config or GuardConfig()
        self._kb = kb
        self._lock = threading.Lock()
        self._audit_path = audit_path
        self._pending_retrain = 0
        self.audit_log: list[dict] = []
        self.validator = train_validator(kb, self.config.passes,
                                         self.config.dropout, self.config.seed)

    @property
    def kb(self) -> KnowledgeBase:
        return self._kb

    def _record(self, verdict: ValidationVerdict):
        entry = dict(verdict.to_dict(), timestamp=time.time())
        self.audit_log.append(entry)
        if self._audit_path:
            with open(self._audit_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")

    def validate_term(self, term: str, claimed: KeyKind) -> ValidationVerdict:
        verdict = validate(self.validator, term, claimed,
                           self.config.threshold,
                           self.config.merge_entity_quantifier)
        self._record(verdict)
        return verdict

    def promote(self, term: str, kind: KeyKind) -> ValidationVerdict:
        """Validate and, on acceptance, add the term to the vocabulary.

        Rejections leave the knowledge base untouched; accepted duplicates
        are no-ops. Retraining is batched so promotion stays cheap."""
        verdict = self.validate_term(term, kind)
        if not verdict.accepted:
            return verdict
        with self._lock:
            if self._kb.has_term(kind, term):
                return verdict
            fresh = self._kb.copy()
            fresh.add_term(kind, term, source="promoted")
            self._kb = fresh
            self._pending_retrain += 1
            if self._pending_retrain >= self.config.retrain_every:
                self._retrain_locked()
        return verdict

    def retrain_now(self):
        with self._lock:
            self._retrain_locked()

    def _retrain_locked(self):
        self.validator = train_validator(self._kb, self.config.passes,
                                         self.config.dropout, self.config.seed)
        self._pending_retrain = 0
