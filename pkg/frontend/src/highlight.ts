import type { KeyKind, SlotsPayload } from "./types.js";
import { KEY_KINDS } from "./types.js";

/** Slot colors shared with the CLI chat (entity cyan, quantifier magenta,
 * location green, time yellow, condition red). */
export const KIND_COLORS: Record<KeyKind, string> = {
  entity: "#0e7490",
  quantifier: "#a21caf",
  location: "#15803d",
  time: "#a16207",
  condition: "#b91c1c",
};

export interface TokenHighlight {
  token: string;
  kind: KeyKind | null;
}

/**
 * Per-token highlight map derived solely from the server's slot payload.
 * Span-less phrases (clarification answers) highlight nothing; the UI
 * never re-tokenizes or re-tags text on its own.
 */
export function buildHighlights(
  tokens: string[], slots: SlotsPayload,
): TokenHighlight[] {
  const kinds: (KeyKind | null)[] = tokens.map(() => null);
  for (const kind of KEY_KINDS) {
    for (const phrase of slots[kind] ?? []) {
      if (!phrase.span) continue;
      const [lo, hi] = phrase.span;
      for (let i = lo; i < hi && i < tokens.length; i += 1) {
        kinds[i] = kind;
      }
    }
  }
  return tokens.map((token, i) => ({ token, kind: kinds[i] }));
}
