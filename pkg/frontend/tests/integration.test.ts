// @vitest-environment node
//
// Drives the taxi flow against a live backend process: question, answer,
// proposal, confirm, plus the promote form's fault surfacing.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/knowledge/stats`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("backend never came up");
}

beforeAll(async () => {
  server = spawn(
    "python3", ["-m", "reqspec.cli", "serve", "--port", String(PORT)],
    { cwd: "..", stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill("SIGINT");
});

describe("taxi flow against a live server", () => {
  const api = new ApiClient(BASE);

  it("question, answer, proposal, confirm", async () => {
    const sid = await api.createSession();

    const first = await api.sendMessage(
      sid,
      "due to safety concerns, the number of taxis should be less than 10 "
      + "between 7 am to 8 am");
    expect(first.reply.kind).toBe("question");
    expect(first.reply.text).toBe(
      "What is the location for this requirement?");

    const second = await api.sendMessage(
      sid, "within 200 meters of all the schools");
    expect(second.reply.kind).toBe("proposal");
    expect(second.reply.proposal!.formula_text).toBe(
      "Everywhere_{school & [0,200]} Always_[7,8] number of taxi < 10");
    expect(second.clarification_count).toBe(1);

    const done = await api.confirm(sid);
    expect(done.reply.kind).toBe("ack");
  });

  it("revise updates the proposal", async () => {
    const sid = await api.createSession();
    const reply = await api.sendMessage(
      sid,
      "Up to four vending vehicles may dispense merchandise in any given "
      + "city block at any time.");
    expect(reply.reply.kind).toBe("proposal");
    const revised = await api.revise(sid, "condition", "10");
    expect(revised.reply.proposal!.formula_text).toContain("<= 10");
  });

  it("promote form surfaces accept and fault verdicts verbatim", async () => {
    const good = await api.promoteTerm("Centennial Park", "location");
    expect(good.decision).toBe("accept");

    const fault1 = await api.promoteTerm("from 8:00 to 16:00", "location");
    expect(fault1.decision).toBe("reject_fault_I");
    expect(fault1.predicted).toBe("time");

    const fault2 = await api.promoteTerm("kfjq#8!zx", "location");
    expect(fault2.decision).toBe("reject_fault_II");
    expect(fault2.uncertainty).toBeGreaterThanOrEqual(0.5);
  });

  it("batch endpoint reports pending questions", async () => {
    const report = await api.submitBatch([
      "Up to four vending vehicles may dispense merchandise in any given "
      + "city block at any time.",
      "the number of taxis should be less than 10 between 7 am to 8 am",
    ]);
    expect(report.confirmed).toBe(1);
    expect(report.pending).toBe(1);
    expect(report.pending_items[0].questions[0]).toBe(
      "What is the location for this requirement?");
  });
});
