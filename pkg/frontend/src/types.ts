/** Wire types mirroring the JSON endpoints (see docs/api.md). */

export type KeyKind = "entity" | "quantifier" | "location" | "time" | "condition";

export const KEY_KINDS: KeyKind[] = [
  "entity", "quantifier", "location", "time", "condition",
];

export interface SlotPhrase {
  text: string;
  span: [number, number] | null;
  confidence: number;
  canon?: string;
}

export type SlotsPayload = Partial<Record<KeyKind, SlotPhrase[]>>;

export interface SlotTable {
  entity: string;
  quantifier: string;
  location: string;
  time: string;
  condition: string;
  defaulted: string[];
}

export interface ProposalBundle {
  template_sentence: string;
  formula_text: string;
  slot_table: SlotTable;
  source_text: string;
  tokens: string[];
  slots: SlotsPayload;
}

export interface Reply {
  kind: "question" | "proposal" | "ack" | "error";
  text: string;
  proposal: ProposalBundle | null;
}

export interface SessionPayload {
  session_id: string;
  state: "idle" | "clarifying" | "proposing" | "done";
  clarification_count: number;
  requirement_id: string | null;
  reply: Reply;
}

export interface KbStats {
  phrases: Record<KeyKind, number>;
  total_phrases: number;
  patterns: number;
}

export interface Verdict {
  term: string;
  claimed: KeyKind;
  predicted: KeyKind | null;
  uncertainty: number;
  decision: "accept" | "reject_fault_I" | "reject_fault_II";
}

export interface BatchPendingItem {
  line: number;
  text: string;
  questions: string[];
}

export interface BatchConfirmedItem {
  line: number;
  text: string;
  formula_text: string;
  template_sentence: string;
  slots: SlotsPayload;
}

export interface BatchReport {
  confirmed: number;
  pending: number;
  errors: { line: number; error: string }[];
  rounds_per_requirement: number[];
  mean_rounds: number;
  max_rounds: number;
  confirmed_items: BatchConfirmedItem[];
  pending_items: BatchPendingItem[];
}
