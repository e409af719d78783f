import { KIND_COLORS, buildHighlights } from "./highlight.js";
import type {
  BatchReport, KbStats, KeyKind, ProposalBundle, Reply, Verdict,
} from "./types.js";
import { KEY_KINDS } from "./types.js";

/** Pure DOM builders: same payload in, same DOM out, no fetches, no
 * linguistic processing. Everything shown originates from the server. */

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className = "", text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function renderMessage(speaker: "user" | "assistant", text: string): HTMLElement {
  const bubble = el("div", `bubble bubble-${speaker}`);
  bubble.appendChild(el("span", "speaker", speaker === "user" ? "you" : "assistant"));
  bubble.appendChild(el("p", "bubble-text", text));
  return bubble;
}

export function renderHighlightedSentence(bundle: ProposalBundle): HTMLElement {
  const wrap = el("div", "highlighted-sentence");
  for (const { token, kind } of buildHighlights(bundle.tokens, bundle.slots)) {
    const span = el("span", kind ? `token token-${kind}` : "token", token);
    if (kind) {
      span.style.backgroundColor = `${KIND_COLORS[kind]}22`;
      span.style.borderBottom = `2px solid ${KIND_COLORS[kind]}`;
      span.title = kind;
    }
    wrap.appendChild(span);
    wrap.appendChild(document.createTextNode(" "));
  }
  return wrap;
}

export interface ProposalHandlers {
  onConfirm?: () => void;
  onRevise?: (kind: KeyKind, current: string) => void;
}

export function renderProposal(
  bundle: ProposalBundle, handlers: ProposalHandlers = {},
): HTMLElement {
  const card = el("section", "proposal-card");
  card.appendChild(el("h3", "", "Proposed requirement"));
  card.appendChild(renderHighlightedSentence(bundle));

  const formats = el("div", "proposal-formats");

  const template = el("div", "format-box");
  template.appendChild(el("h4", "", "Template"));
  template.appendChild(el("p", "template-sentence", bundle.template_sentence));
  formats.appendChild(template);

  const formula = el("div", "format-box");
  formula.appendChild(el("h4", "", "Formal specification"));
  formula.appendChild(el("code", "formula-text", bundle.formula_text));
  formats.appendChild(formula);

  const table = el("div", "format-box");
  table.appendChild(el("h4", "", "Key fields"));
  table.appendChild(renderSlotTable(bundle, handlers.onRevise));
  formats.appendChild(table);

  card.appendChild(formats);

  const confirm = el("button", "confirm-button", "Confirm");
  confirm.addEventListener("click", () => handlers.onConfirm?.());
  card.appendChild(confirm);
  return card;
}

function renderSlotTable(
  bundle: ProposalBundle,
  onRevise?: (kind: KeyKind, current: string) => void,
): HTMLElement {
  const table = el("table", "slot-table");
  for (const kind of KEY_KINDS) {
    const row = el("tr", `slot-row slot-${kind}`);
    const header = el("th", "", kind);
    header.style.color = KIND_COLORS[kind];
    row.appendChild(header);
    const value = bundle.slot_table[kind];
    const defaulted = bundle.slot_table.defaulted.includes(kind);
    const cell = el("td", "slot-value",
                    value || (defaulted ? "(defaulted)" : ""));
    if (defaulted) cell.classList.add("slot-defaulted");
    row.appendChild(cell);
    const action = el("td", "slot-action");
    const chip = el("button", "revise-chip", "revise");
    chip.addEventListener("click", () => onRevise?.(kind, value));
    action.appendChild(chip);
    row.appendChild(action);
    table.appendChild(row);
  }
  return table;
}

export function renderDoneBadge(): HTMLElement {
  return el("span", "done-badge", "confirmed");
}

export function renderVerdict(verdict: Verdict): HTMLElement {
  const uncertainty = `u=${verdict.uncertainty.toFixed(2)}`;
  let label: string;
  if (verdict.decision === "accept") {
    label = `accepted (${uncertainty})`;
  } else if (verdict.decision === "reject_fault_I") {
    label = `rejected (fault I, ${uncertainty})`;
  } else {
    label = `rejected (fault II, ${uncertainty})`;
  }
  const chip = el("span",
                  `verdict-chip ${verdict.decision === "accept" ? "verdict-accept" : "verdict-reject"}`,
                  label);
  chip.dataset.decision = verdict.decision;
  chip.title = verdict.predicted
    ? `predicted: ${verdict.predicted}`
    : "no prediction";
  return chip;
}

export function renderStats(stats: KbStats): HTMLElement {
  const box = el("div", "stats-box");
  const table = el("table", "stats-table");
  for (const kind of KEY_KINDS) {
    const row = el("tr");
    row.appendChild(el("th", "", kind));
    row.appendChild(el("td", "", String(stats.phrases[kind])));
    table.appendChild(row);
  }
  const totals = el("tr", "stats-total");
  totals.appendChild(el("th", "", "total phrases"));
  totals.appendChild(el("td", "", String(stats.total_phrases)));
  table.appendChild(totals);
  const patterns = el("tr");
  patterns.appendChild(el("th", "", "patterns"));
  patterns.appendChild(el("td", "", String(stats.patterns)));
  table.appendChild(patterns);
  box.appendChild(table);
  return box;
}

export function renderBatchReport(
  report: BatchReport, onOpenPending?: (text: string) => void,
): HTMLElement {
  const box = el("div", "batch-report");
  const summary = el("p", "batch-summary",
    `${report.confirmed} converted, ${report.pending} pending, `
    + `${report.errors.length} errors; `
    + `mean ${report.mean_rounds.toFixed(2)} / max ${report.max_rounds} `
    + "clarification rounds");
  box.appendChild(summary);

  if (report.confirmed_items.length) {
    const list = el("ul", "batch-confirmed");
    for (const item of report.confirmed_items) {
      const entry = el("li");
      entry.appendChild(el("code", "formula-text", item.formula_text));
      list.appendChild(entry);
    }
    box.appendChild(list);
  }

  if (report.pending_items.length) {
    const list = el("ul", "batch-pending");
    for (const item of report.pending_items) {
      const entry = el("li");
      entry.appendChild(el("span", "pending-text", item.text));
      entry.appendChild(el("span", "pending-question",
                           item.questions[0] ?? ""));
      const open = el("button", "open-chat", "clarify in chat");
      open.addEventListener("click", () => onOpenPending?.(item.text));
      entry.appendChild(open);
      list.appendChild(entry);
    }
    box.appendChild(list);
  }

  if (report.errors.length) {
    const list = el("ul", "batch-errors");
    for (const item of report.errors) {
      list.appendChild(el("li", "", `line ${item.line}: ${item.error}`));
    }
    box.appendChild(list);
  }
  if (!report.confirmed && !report.pending && !report.errors.length) {
    box.appendChild(el("p", "zero-state", "The file contained no requirements."));
  }
  return box;
}

export function renderReply(reply: Reply, handlers: ProposalHandlers = {}): HTMLElement {
  if (reply.kind === "proposal" && reply.proposal) {
    return renderProposal(reply.proposal, handlers);
  }
  return renderMessage("assistant", reply.text);
}
