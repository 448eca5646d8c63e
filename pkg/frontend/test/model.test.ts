import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ConsoleModel } from "../src/model.js";
import {
  TranscriptRecord,
  isTranscriptRecord,
  parseSmsDetail,
} from "../src/protocol.js";

const OWNER = "+923001234567";

function loadFixture(): TranscriptRecord[] {
  const path = join(
    dirname(fileURLToPath(import.meta.url)),
    "fixtures",
    "theft.ndjson",
  );
  return readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line))
    .filter(isTranscriptRecord);
}

describe("inbox reconstruction from a recorded bridge stream", () => {
  it("holds exactly the SMS_OUT records addressed to the owner, in order", () => {
    const records = loadFixture();
    const model = new ConsoleModel(OWNER);
    model.applyAll(records);

    const expected = records
      .filter((r) => r.channel === "SMS_OUT")
      .map((r) => parseSmsDetail(r.detail)!)
      .filter((sms) => sms.recipient === OWNER);

    // inbox renders newest first; reverse to compare in stream order
    const inbox = [...model.inbox].reverse();
    expect(inbox.map((e) => e.body)).toEqual(expected.map((s) => s.body));
    expect(inbox).toHaveLength(5); // 2 alerts, 1 ack, 2 updates
    expect(inbox[0].body).toBe(
      "ALERT DOOR | LOC 24.860700 67.001100",
    );
    expect(inbox[2].body).toBe("ACK LOCK");
  });

  it("excludes the owner's own outbound messages", () => {
    const model = new ConsoleModel(OWNER);
    model.applyAll(loadFixture());
    expect(model.inbox.every((e) => e.sender !== OWNER)).toBe(true);
  });

  it("is a pure fold: replaying rebuilds the identical view", () => {
    const records = loadFixture();
    const once = new ConsoleModel(OWNER);
    once.applyAll(records);
    const twice = new ConsoleModel(OWNER);
    twice.applyAll(records);
    twice.reset();
    twice.applyAll(records);
    expect(twice.inbox).toEqual(once.inbox);
    expect(twice.lamps).toEqual(once.lamps);
    expect(twice.car).toEqual(once.car);
    expect(twice.position).toEqual(once.position);
  });

  it("lamps reflect the latest RELAY record only", () => {
    const model = new ConsoleModel(OWNER);
    model.applyAll(loadFixture());
    expect(model.lamps).toEqual({
      gearLock: true,
      engineSeize: false,
      supplyCut: false,
    });
  });

  it("tracks phase through the episode", () => {
    const records = loadFixture();
    const model = new ConsoleModel(OWNER);
    const phases: string[] = [];
    for (const record of records) {
      model.apply(record);
      if (record.channel === "STATE") phases.push(model.car.phase);
    }
    expect(phases).toEqual([
      "DISARMED",
      "ARMED",
      "ALERTING",
      "POST_ACTION",
      "DISARMED",
    ]);
  });

  it("keeps a live location readout from the GPS serial records", () => {
    const model = new ConsoleModel(OWNER);
    model.applyAll(loadFixture());
    expect(model.position).not.toBeNull();
    expect(model.position!.lat).toBeCloseTo(24.8607, 5);
    expect(model.position!.lon).toBeCloseTo(67.0011, 5);
  });

  it("different owner number sees an empty inbox", () => {
    const model = new ConsoleModel("+929990001111");
    model.applyAll(loadFixture());
    expect(model.inbox).toEqual([]);
  });
});
