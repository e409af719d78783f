import { ApiClient } from "./api.js";
import {
  renderBatchReport, renderDoneBadge, renderMessage, renderReply,
  renderStats, renderVerdict,
} from "./render.js";
import { ViewState } from "./state.js";
import type { KeyKind, SessionPayload } from "./types.js";

const api = new ApiClient();
const state = new ViewState();

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showBanner(text: string): void {
  const banner = byId<HTMLDivElement>("banner");
  banner.textContent = text;
  banner.hidden = false;
}

function clearBanner(): void {
  byId<HTMLDivElement>("banner").hidden = true;
}

async function ensureSession(): Promise<string> {
  if (!state.sessionId) {
    state.sessionId = await api.createSession();
  }
  return state.sessionId;
}

function appendToLog(node: HTMLElement): void {
  const log = byId<HTMLDivElement>("chat-log");
  log.appendChild(node);
  log.scrollTop = log.scrollHeight;
}

function handlePayload(payload: SessionPayload): void {
  state.append({ speaker: "assistant", text: payload.reply.text });
  state.proposal = payload.reply.proposal;
  const card = renderReply(payload.reply, {
    onConfirm: () => { void confirmProposal(); },
    onRevise: (kind, current) => { void revise(kind, current); },
  });
  appendToLog(card);
}

async function sendChat(text: string): Promise<void> {
  state.append({ speaker: "user", text });
  appendToLog(renderMessage("user", text));
  try {
    const sid = await ensureSession();
    const payload = await api.sendMessage(sid, text);
    clearBanner();
    handlePayload(payload);
  } catch (err) {
    // Network trouble must not reset the session silently.
    showBanner(`Request failed (${String(err)}). Your session is intact - retry.`);
  }
}

async function confirmProposal(): Promise<void> {
  if (!state.sessionId) return;
  try {
    const payload = await api.confirm(state.sessionId);
    clearBanner();
    state.append({ speaker: "assistant", text: payload.reply.text });
    const bubble = renderMessage("assistant", payload.reply.text);
    bubble.appendChild(renderDoneBadge());
    appendToLog(bubble);
  } catch (err) {
    showBanner(`Confirm failed (${String(err)}).`);
  }
}

async function revise(kind: KeyKind, current: string): Promise<void> {
  if (!state.sessionId) return;
  const phrase = window.prompt(`New ${kind}:`, current);
  if (!phrase) return;
  try {
    const payload = await api.revise(state.sessionId, kind, phrase);
    clearBanner();
    handlePayload(payload);
  } catch (err) {
    showBanner(`Revise failed (${String(err)}).`);
  }
}

function wireChat(): void {
  const form = byId<HTMLFormElement>("chat-form");
  const input = byId<HTMLInputElement>("chat-input");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    void sendChat(text);
  });
}

function wireBatch(): void {
  const form = byId<HTMLFormElement>("batch-form");
  const file = byId<HTMLInputElement>("batch-file");
  const out = byId<HTMLDivElement>("batch-output");
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const chosen = file.files?.[0];
    if (!chosen) return;
    const lines = (await chosen.text()).split("\n");
    try {
      const report = await api.submitBatch(lines);
      state.batchReport = report;
      out.replaceChildren(renderBatchReport(report, (text) => {
        switchTab("chat");
        byId<HTMLInputElement>("chat-input").value = text;
      }));
    } catch (err) {
      showBanner(`Batch failed (${String(err)}).`);
    }
  });
}

function wireKb(): void {
  const refresh = byId<HTMLButtonElement>("stats-refresh");
  const statsOut = byId<HTMLDivElement>("stats-output");
  const load = async () => {
    try {
      state.stats = await api.stats();
      statsOut.replaceChildren(renderStats(state.stats));
    } catch (err) {
      showBanner(`Stats failed (${String(err)}).`);
    }
  };
  refresh.addEventListener("click", () => { void load(); });
  void load();

  const form = byId<HTMLFormElement>("promote-form");
  const term = byId<HTMLInputElement>("promote-term");
  const kind = byId<HTMLSelectElement>("promote-kind");
  const verdictOut = byId<HTMLSpanElement>("promote-verdict");
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!term.value.trim()) return;
    try {
      const verdict = await api.promoteTerm(term.value.trim(),
                                            kind.value as KeyKind);
      verdictOut.replaceChildren(renderVerdict(verdict));
      void load();
    } catch (err) {
      showBanner(`Promotion failed (${String(err)}).`);
    }
  });
}

function switchTab(name: string): void {
  for (const tab of document.querySelectorAll<HTMLElement>(".tab-panel")) {
    tab.hidden = tab.dataset.tab !== name;
  }
  for (const button of document.querySelectorAll<HTMLElement>(".tab-button")) {
    button.classList.toggle("active", button.dataset.tab === name);
  }
}

function wireTabs(): void {
  for (const button of document.querySelectorAll<HTMLElement>(".tab-button")) {
    button.addEventListener("click", () => switchTab(button.dataset.tab ?? "chat"));
  }
  switchTab("chat");
}

export function bootstrap(): void {
  wireTabs();
  wireChat();
  wireBatch();
  wireKb();
}

if (typeof document !== "undefined" && document.getElementById("chat-form")) {
  bootstrap();
}
