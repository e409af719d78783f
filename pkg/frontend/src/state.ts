import type { BatchReport, KbStats, ProposalBundle } from "./types.js";

export interface TranscriptEntry {
  speaker: "user" | "assistant";
  text: string;
}

/** Client view state. The transcript is append-only: replies are never
 * reordered or rewritten, matching the server-side transcript. */
export class ViewState {
  sessionId: string | null = null;
  readonly messages: TranscriptEntry[] = [];
  proposal: ProposalBundle | null = null;
  batchReport: BatchReport | null = null;
  stats: KbStats | null = null;

  append(entry: TranscriptEntry): void {
    this.messages.push(entry);
  }
}
