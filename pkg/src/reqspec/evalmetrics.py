"""Corpus metrics: token-level accuracy, sentence-level accuracy,
micro-averaged precision/recall/F1 over keyed tokens, and character-level
edit distance with adjacent transposition.

Token-level scores count key tokens only: a token is correct when its
predicted kind equals its gold kind. Sentence-level accuracy demands the
whole slot set match exactly (all kinds, all spans), the strictest
criterion. Averaging is micro (pooled over all tokens).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MisalignedCorpora
from .reqmodel import KeyKind, SlotSet


@dataclass
class EvalReport:
    token_acc: float
    sent_acc: float
    precision: float
    recall: float
    f1: float
    n_requirements: int
    n_tokens: int
    per_kind_f1: dict

    def to_dict(self) -> dict:
        return {
            "token_acc": self.token_acc,
            "sent_acc": self.sent_acc,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "n_requirements": self.n_requirements,
            "n_tokens": self.n_tokens,
            "per_kind_f1": self.per_kind_f1,
        }


def token_labels(slots: SlotSet, n_tokens: int) -> list:
    """Per-token kind labels (None for unkeyed); span-less phrases label
    nothing."""
    labels = [None] * n_tokens
    for phrase in slots.all_phrases():
        if phrase.span is None:
            continue
        lo, hi = phrase.span
        if hi > n_tokens:
            raise MisalignedCorpora(
                f"span {phrase.span} beyond {n_tokens} tokens")
        for i in range(lo, hi):
            labels[i] = phrase.kind
    return labels


def _check_aligned(gold, pred):
    if len(gold) != len(pred):
        raise MisalignedCorpora(
            f"{len(gold)} gold items vs {len(pred)} predicted")
    for i, ((g_tokens, _), (p_tokens, _)) in enumerate(zip(gold, pred)):
        if g_tokens != p_tokens:
            raise MisalignedCorpora(f"token mismatch at item {i}")


def _pooled_counts(gold, pred):
    """(correct, gold_keyed, pred_keyed) pooled over the corpus, plus the
    same triple per kind."""
    correct = gold_keyed = pred_keyed = 0
    per_kind = {k: [0, 0, 0] for k in KeyKind}
    for (tokens, g_slots), (_, p_slots) in zip(gold, pred):
        g_labels = token_labels(g_slots, len(tokens))
        p_labels = token_labels(p_slots, len(tokens))
        for g, p in zip(g_labels, p_labels):
            if g is not None:
                gold_keyed += 1
                per_kind[g][1] += 1
            if p is not None:
                pred_keyed += 1
                per_kind[p][2] += 1
            if g is not None and g == p:
                correct += 1
                per_kind[g][0] += 1
    return correct, gold_keyed, pred_keyed, per_kind


def token_accuracy(gold, pred) -> float:
    """Correctly labeled key tokens over gold key tokens. Items are
    (tokens, SlotSet) pairs over identical token sequences."""
    _check_aligned(gold, pred)
    correct, gold_keyed, _, _ = _pooled_counts(gold, pred)
    return correct / gold_keyed if gold_keyed else 1.0


def slots_signature(slots: SlotSet):
    return sorted(
        (p.kind.value, p.span if p.span else (-1, -1), p.text)
        for p in slots.all_phrases())


def sentence_accuracy(gold, pred) -> float:
    """Fraction of requirements whose predicted slot set matches gold
    exactly: every kind, every span."""
    _check_aligned(gold, pred)
    if not gold:
        return 1.0
    exact = sum(
        1 for (_, g), (_, p) in zip(gold, pred)
        if slots_signature(g) == slots_signature(p))
    return exact / len(gold)


def _prf(correct, pred_keyed, gold_keyed):
    precision = correct / pred_keyed if pred_keyed else 0.0
    recall = correct / gold_keyed if gold_keyed else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1


def precision_recall_f1(gold, pred) -> tuple[float, float, float]:
    """Micro-averaged over keyed tokens; zero predictions give (0, 0, 0)
    by convention."""
    _check_aligned(gold, pred)
    correct, gold_keyed, pred_keyed, _ = _pooled_counts(gold, pred)
    return _prf(correct, pred_keyed, gold_keyed)


def evaluate(gold, pred) -> EvalReport:
    _check_aligned(gold, pred)
    correct, gold_keyed, pred_keyed, per_kind = _pooled_counts(gold, pred)
    precision, recall, f1 = _prf(correct, pred_keyed, gold_keyed)
    per_kind_f1 = {
        kind.value: _prf(c, p, g)[2]
        for kind, (c, g, p) in per_kind.items()
    }
    return EvalReport(
        token_acc=correct / gold_keyed if gold_keyed else 1.0,
        sent_acc=sentence_accuracy(gold, pred),
        precision=precision,
        recall=recall,
        f1=f1,
        n_requirements=len(gold),
        n_tokens=sum(len(tokens) for tokens, _ in gold),
        per_kind_f1=per_kind_f1,
    )


def dld(a: str, b: str) -> int:
    """Restricted Damerau-Levenshtein distance (insert, delete, substitute,
    adjacent transposition), character level."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if not la:
        return lb
    if not lb:
        return la
    prev2 = None
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        row = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            best = min(prev[j] + 1,        # delete
                       row[j - 1] + 1,     # insert
                       prev[j - 1] + cost)  # substitute
            if (i > 1 and j > 1 and a[i - 1] == b[j - 2]
                    and a[i - 2] == b[j - 1]):
                best = min(best, prev2[j - 2] + 1)  # transpose
            row[j] = best
        prev2, prev = prev, row
    return prev[lb]
