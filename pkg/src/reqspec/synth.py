"""Controllable requirement synthesis.

Generates labeled training requirements by filling knowledge-base patterns
from per-kind phrase streams. Each stream is a concatenation of
independent random permutations of that kind's vocabulary, so phrase usage
stays balanced; the synthesis index ``lam`` guarantees a minimum number of
appearances per phrase. The output volume is

    volume = lam * max(|vocabulary of each kind used by the patterns|)

Stream cursors advance only when a pattern actually consumes the kind, so
patterns lacking a placeholder never skip phrases: consumption is always a
contiguous prefix of the stream. When every pattern references every kind
(the classic single-pattern setup), each consumed phrase therefore appears
at least ``lam`` times across the output.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import EmptyVocabulary, NoPatterns
from .knowledge import KnowledgeBase
from .reqmodel import KeyKind, KeyedPhrase, SlotSet, token_offsets

_PLACEHOLDER = "#"


@dataclass(frozen=True)
class SynthesisConfig:
    lam: int = 5
    seed: int = 0
    pattern_policy: str = "round_robin"  # or "uniform_random"
    exclude_phrases: frozenset = frozenset()
    exclude_patterns: frozenset = frozenset()

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("synthesis index must be >= 1")
        if self.pattern_policy not in ("round_robin", "uniform_random"):
            raise ValueError(f"unknown pattern policy {self.pattern_policy!r}")


@dataclass
class SynthesizedRequirement:
    text: str
    slots: SlotSet
    pattern_used: str
    row_index: int

    def to_dict(self) -> dict:
        return {"text": self.text, "slots": self.slots.to_dict(),
                "pattern": self.pattern_used, "row": self.row_index}


def compute_volume(lam: int, vocab_sizes: list[int]) -> int:
    """Total rows to synthesize: lam times the largest vocabulary."""
    if lam < 1:
        raise ValueError("synthesis index must be >= 1")
    if not vocab_sizes or any(size < 1 for size in vocab_sizes):
        raise EmptyVocabulary("every kind needs at least one phrase")
    return lam * max(vocab_sizes)


def build_streams(kb: KnowledgeBase, volume: int, seed: int,
                  kinds=None, exclude=frozenset()) -> dict[KeyKind, list[str]]:
    """Per-kind phrase arrays of length >= volume, each a concatenation of
    seeded random permutations of the kind's vocabulary."""
    streams = {}
    for kind in kinds if kinds is not None else list(KeyKind):
        phrases = [t for t in kb.terms(kind)
                   if t.lower() not in exclude]
        if not phrases:
            raise EmptyVocabulary(f"no usable phrases for kind {kind.value!r}")
        rng = random.Random(f"{seed}:{kind.value}")
        stream = []
        while len(stream) < volume:
            block = list(phrases)
            rng.shuffle(block)
            stream.extend(block)
        streams[kind] = stream
    return streams


def _fill_pattern(pattern: str, choices: dict[KeyKind, str]):
    """Substitute placeholders; returns (text, gold slot set)."""
    pieces = []
    fills = []  # (kind, phrase, char_start, char_end)
    cursor = 0
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch == _PLACEHOLDER:
            for kind in KeyKind:
                name = _PLACEHOLDER + kind.value
                if pattern.startswith(name, i):
                    phrase = choices[kind]
                    start = sum(len(p) for p in pieces)
                    pieces.append(phrase)
                    fills.append((kind, phrase, start, start + len(phrase)))
                    i += len(name)
                    break
            else:
                pieces.append(ch)
                i += 1
        else:
            pieces.append(ch)
            i += 1
    text = "".join(pieces)

    # Map character ranges to token spans.
    offsets = token_offsets(text)
    slots = SlotSet()
    for kind, phrase, start, end in fills:
        token_ids = [idx for idx, (_, lo, hi) in enumerate(offsets)
                     if lo >= start and hi <= end]
        span = (token_ids[0], token_ids[-1] + 1) if token_ids else None
        slots.add(KeyedPhrase(kind, phrase, span))
    return text, slots


def synthesize(kb: KnowledgeBase, cfg: SynthesisConfig) -> list[SynthesizedRequirement]:
    """Generate the full labeled corpus for the given configuration."""
    exclude_phrases = frozenset(p.lower() for p in cfg.exclude_phrases)
    exclude_patterns = frozenset(cfg.exclude_patterns)
    patterns = [p for p in kb.patterns() if p not in exclude_patterns]
    if not patterns:
        raise NoPatterns("knowledge base has no usable patterns")

    kinds_used = sorted(
        {k for p in patterns for k in KnowledgeBase.pattern_kinds(p)},
        key=lambda k: k.value)
    sizes = []
    for kind in kinds_used:
        usable = [t for t in kb.terms(kind) if t.lower() not in exclude_phrases]
        sizes.append(len(usable))
    volume = compute_volume(cfg.lam, sizes)
    streams = build_streams(kb, volume, cfg.seed, kinds_used, exclude_phrases)

    rng = random.Random(f"{cfg.seed}:patterns")
    cursors = {kind: 0 for kind in kinds_used}
    out = []
    for row in range(volume):
        if cfg.pattern_policy == "round_robin":
            pattern = patterns[row % len(patterns)]
        else:
            pattern = rng.choice(patterns)
        choices = {}
        for kind in KnowledgeBase.pattern_kinds(pattern):
            stream = streams[kind]
            cursor = cursors[kind]
            choices[kind] = stream[cursor % len(stream)]
            cursors[kind] = cursor + 1
        text, slots = _fill_pattern(pattern, choices)
        out.append(SynthesizedRequirement(text, slots, pattern, row))
    return out


def write_jsonl(rows: list[SynthesizedRequirement], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row.to_dict(), ensure_ascii=False) + "\n")


def load_exclusions(path) -> tuple[frozenset, frozenset]:
    """Read a JSONL test corpus and collect its phrases and patterns so
    synthesis never emits them (train/test hygiene)."""
    phrases = set()
    patterns = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "pattern" in record:
                patterns.add(record["pattern"])
            for entries in record.get("slots", {}).values():
                for entry in entries:
                    phrases.add(entry["text"].lower())
    return frozenset(phrases), frozenset(patterns)
