"""City knowledge base: per-kind vocabulary, sentence patterns, pattern
extraction from annotated requirements, JSONL persistence, and statistics.

Storage is case-preserving while lookups are case-insensitive; the first
spelling seen wins. The JSONL format is append-friendly so online
promotion can extend a knowledge file without rewriting it:

    {"type": "term", "kind": "location", "text": "city block", "source": "seed"}
    {"type": "pattern", "text": "In #location, ...", "source": "seed"}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional

from .errors import OverlapError, SchemaError
from .reqmodel import KeyKind, Requirement, normalize_phrase, token_offsets

SOURCES = ("seed", "promoted", "synthetic")
_PLACEHOLDER_RE = re.compile(r"#(entity|quantifier|location|time|condition)")


@dataclass
class Entry:
    text: str
    source: str = "seed"


@dataclass
class KbStats:
    per_kind: dict
    patterns: int

    @property
    def total_phrases(self) -> int:
        return sum(self.per_kind.values())

    def to_dict(self) -> dict:
        return {
            "phrases": {k.value: n for k, n in self.per_kind.items()},
            "total_phrases": self.total_phrases,
            "patterns": self.patterns,
        }


class KnowledgeBase:
    """Vocabulary sets (one per key kind) plus a pattern set."""

    def __init__(self):
        self._vocab: dict[KeyKind, dict[str, Entry]] = {k: {} for k in KeyKind}
        self._patterns: dict[str, Entry] = {}

    # -- vocabulary ----------------------------------------------------------

    def add_term(self, kind: KeyKind, text: str, source: str = "seed") -> bool:
        """Add a phrase; returns False when it was already known."""
        text = " ".join(text.split())
        if not text:
            return False
        if source not in SOURCES:
            raise SchemaError(f"unknown source tag {source!r}")
        key = normalize_phrase(text)
        if key in self._vocab[kind]:
            return False
        self._vocab[kind][key] = Entry(text, source)
        return True

    def has_term(self, kind: KeyKind, text: str) -> bool:
        return normalize_phrase(text) in self._vocab[kind]

    def term(self, kind: KeyKind, text: str) -> Optional[str]:
        entry = self._vocab[kind].get(normalize_phrase(text))
        return entry.text if entry else None

    def terms(self, kind: KeyKind) -> list[str]:
        return [e.text for e in self._vocab[kind].values()]

    def kinds_of(self, normalized: str) -> list[KeyKind]:
        return [k for k in KeyKind if normalized in self._vocab[k]]

    # -- patterns -------------------------------------------------------------

    def add_pattern(self, text: str, source: str = "seed") -> bool:
        text = " ".join(text.split())
        if not text:
            return False
        if source not in SOURCES:
            raise SchemaError(f"unknown source tag {source!r}")
        placeholders = _PLACEHOLDER_RE.findall(text)
        stray = re.findall(r"#\w+", _PLACEHOLDER_RE.sub("", text))
        if not placeholders or stray:
            raise SchemaError(f"pattern needs #key placeholders only: {text!r}")
        if text in self._patterns:
            return False
        self._patterns[text] = Entry(text, source)
        return True

    def patterns(self) -> list[str]:
        return list(self._patterns)

    @staticmethod
    def pattern_kinds(pattern: str) -> list[KeyKind]:
        return [KeyKind(name) for name in _PLACEHOLDER_RE.findall(pattern)]

    # -- misc ------------------------------------------------------------------

    def stats(self) -> KbStats:
        return KbStats({k: len(v) for k, v in self._vocab.items()},
                       len(self._patterns))

    def copy(self) -> "KnowledgeBase":
        dup = KnowledgeBase()
        for kind in KeyKind:
            dup._vocab[kind] = {k: Entry(e.text, e.source)
                                for k, e in self._vocab[kind].items()}
        dup._patterns = {k: Entry(e.text, e.source)
                         for k, e in self._patterns.items()}
        return dup

    def records(self) -> list[dict]:
        out = []
        for kind in KeyKind:
            for entry in self._vocab[kind].values():
                out.append({"type": "term", "kind": kind.value,
                            "text": entry.text, "source": entry.source})
        for entry in self._patterns.values():
            out.append({"type": "pattern", "text": entry.text,
                        "source": entry.source})
        return out

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return self.records() == other.records()


def extract_pattern(req: Requirement) -> str:
    """Replace each annotated span in the source text with its #kind
    placeholder, leaving everything else verbatim."""
    phrases = [p for p in req.slots.all_phrases() if p.span is not None]
    if not phrases:
        raise OverlapError("requirement has no annotated spans")
    offsets = token_offsets(req.source_text)
    pieces = []
    cursor = 0
    last_hi = 0
    for phrase in sorted(phrases, key=lambda p: p.span[0]):
        lo, hi = phrase.span
        if lo < last_hi:
            raise OverlapError(f"span {phrase.span} overlaps a previous span")
        phrase.check_against(req.tokens)
        start_byte = offsets[lo][1]
        end_byte = offsets[hi - 1][2]
        pieces.append(req.source_text[cursor:start_byte])
        pieces.append("#" + phrase.kind.value)
        cursor = end_byte
        last_hi = hi
    pieces.append(req.source_text[cursor:])
    return "".join(pieces)


@dataclass
class IngestReport:
    terms_added: int = 0
    patterns_added: int = 0
    skipped: list = field(default_factory=list)


def ingest_annotations(kb: KnowledgeBase, reqs: Iterable[Requirement],
                       source: str = "seed") -> IngestReport:
    """Fold annotated requirements into the knowledge base.

    Every annotated phrase joins its kind's vocabulary and every
    requirement contributes its extracted pattern. Idempotent; malformed
    requirements are skipped and reported, never fatal.
    """
    report = IngestReport()
    for req in reqs:
        try:
            pattern = extract_pattern(req)
        except OverlapError as exc:
            report.skipped.append((req.id, str(exc)))
            continue
        for phrase in req.slots.all_phrases():
            if kb.add_term(phrase.kind, phrase.text, source):
                report.terms_added += 1
        if kb.add_pattern(pattern, source):
            report.patterns_added += 1
    return report


def kb_stats(kb: KnowledgeBase) -> KbStats:
    return kb.stats()


def save_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in kb.records():
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_kb(path) -> KnowledgeBase:
    kb = KnowledgeBase()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"bad JSON: {exc}", line=lineno)
            kind = record.get("type")
            try:
                if kind == "term":
                    kb.add_term(KeyKind(record["kind"]), record["text"],
                                record.get("source", "seed"))
                elif kind == "pattern":
                    kb.add_pattern(record["text"], record.get("source", "seed"))
                else:
                    raise SchemaError(f"unknown record type {kind!r}")
            except (KeyError, ValueError, SchemaError) as exc:
                raise SchemaError(str(exc), line=lineno)
    return kb


def load_seed_kb() -> KnowledgeBase:
    """The small knowledge base shipped with the package."""
    path = resources.files("reqspec.data").joinpath("seed_kb.jsonl")
    with resources.as_file(path) as real:
        return load_kb(real)
