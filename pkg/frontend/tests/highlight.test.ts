import { describe, expect, it } from "vitest";

import { buildHighlights } from "../src/highlight.js";
import type { SessionPayload } from "../src/types.js";
import proposalFixture from "./fixtures/proposal.json";

const proposal = (proposalFixture as SessionPayload).reply.proposal!;

describe("buildHighlights", () => {
  it("labels exactly the tokens covered by slot spans", () => {
    const highlights = buildHighlights(proposal.tokens, proposal.slots);
    expect(highlights.length).toBe(proposal.tokens.length);
    const entity = proposal.slots.entity![0];
    const [lo, hi] = entity.span!;
    for (let i = lo; i < hi; i += 1) {
      expect(highlights[i].kind).toBe("entity");
    }
  });

  it("highlights nothing for span-less phrases", () => {
    const highlights = buildHighlights(
      ["a", "b"], { location: [{ text: "Music Row", span: null, confidence: 1 }] });
    expect(highlights.every((h) => h.kind === null)).toBe(true);
  });

  it("is a pure function of the payload", () => {
    const first = buildHighlights(proposal.tokens, proposal.slots);
    const second = buildHighlights(proposal.tokens, proposal.slots);
    expect(second).toEqual(first);
  });

  it("keeps the server's token order (no client-side tokenizing)", () => {
    const highlights = buildHighlights(proposal.tokens, proposal.slots);
    expect(highlights.map((h) => h.token)).toEqual(proposal.tokens);
  });
});
