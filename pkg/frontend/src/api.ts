import type {
  BatchReport, KbStats, KeyKind, SessionPayload, Verdict,
} from "./types.js";

/** Thin typed client over the JSON endpoints. */
export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async post<T>(path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const detail = await response.text();
      throw new Error(`POST ${path} failed (${response.status}): ${detail}`);
    }
    return response.json() as Promise<T>;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed (${response.status})`);
    }
    return response.json() as Promise<T>;
  }

  async createSession(): Promise<string> {
    const payload = await this.post<{ id: string }>("/sessions");
    return payload.id;
  }

  sendMessage(sessionId: string, text: string): Promise<SessionPayload> {
    return this.post(`/sessions/${sessionId}/messages`, { text });
  }

  confirm(sessionId: string): Promise<SessionPayload> {
    return this.post(`/sessions/${sessionId}/confirm`);
  }

  revise(sessionId: string, kind: KeyKind, phrase: string): Promise<SessionPayload> {
    return this.post(`/sessions/${sessionId}/revise`, { kind, phrase });
  }

  submitBatch(lines: string[]): Promise<BatchReport> {
    return this.post("/requirements/batch", { lines });
  }

  stats(): Promise<KbStats> {
    return this.get("/knowledge/stats");
  }

  promoteTerm(term: string, kind: KeyKind): Promise<Verdict> {
    return this.post("/knowledge/terms", { term, kind });
  }
}
