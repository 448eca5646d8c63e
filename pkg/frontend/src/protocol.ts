// Bridge wire protocol: newline-delimited JSON records in, one JSON
// command object per line out.  Detail strings are parsed here so the
// rest of the console never touches raw record text.

export interface TranscriptRecord {
  at: number;
  channel: "SMS_OUT" | "SMS_IN" | "RELAY" | "STATE" | "SERIAL";
  detail: string;
}

export interface SmsDetail {
  sender: string;
  recipient: string;
  body: string;
}

export interface RelayLamps {
  gearLock: boolean;
  engineSeize: boolean;
  supplyCut: boolean;
}

export interface CarState {
  phase: string;
  intrusions: string[];
}

export type IntrusionKind = "DOOR" | "BONNET" | "TRUNK";

const CHANNELS = new Set(["SMS_OUT", "SMS_IN", "RELAY", "STATE", "SERIAL"]);

export function isTranscriptRecord(value: unknown): value is TranscriptRecord {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    typeof v.at === "number" &&
    typeof v.channel === "string" &&
    CHANNELS.has(v.channel) &&
    typeof v.detail === "string"
  );
}

/** Buffered push parser for newline-delimited JSON chunks. */
export function createNdjsonParser(onObject: (obj: unknown) => void) {
  let buffer = "";
  return {
    push(chunk: string) {
      buffer += chunk;
      for (;;) {
        const idx = buffer.indexOf("\n");
        if (idx === -1) break;
        const line = buffer.slice(0, idx).trim();
        buffer = buffer.slice(idx + 1);
        if (!line) continue;
        try {
          onObject(JSON.parse(line));
        } catch {
          // tolerate malformed lines; the bridge never emits them
        }
      }
    },
  };
}

/** "`sender` -> `recipient` | `body`" */
export function parseSmsDetail(detail: string): SmsDetail | null {
  const arrow = detail.indexOf(" -> ");
  if (arrow === -1) return null;
  const rest = detail.slice(arrow + 4);
  const bar = rest.indexOf(" | ");
  if (bar === -1) return null;
  return {
    sender: detail.slice(0, arrow),
    recipient: rest.slice(0, bar),
    body: rest.slice(bar + 3),
  };
}

/** "gear_lock=1 engine_seize=0 supply_cut=0" */
export function parseRelayDetail(detail: string): RelayLamps | null {
  const fields = new Map(
    detail.split(" ").map((part) => {
      const [key, value] = part.split("=");
      return [key, value] as const;
    }),
  );
  const gear = fields.get("gear_lock");
  const seize = fields.get("engine_seize");
  const cut = fields.get("supply_cut");
  if (gear === undefined || seize === undefined || cut === undefined) {
    return null;
  }
  return {
    gearLock: gear === "1",
    engineSeize: seize === "1",
    supplyCut: cut === "1",
  };
}

/** "phase=ALERTING intrusions=DOOR,TRUNK" (NONE when empty) */
export function parseStateDetail(detail: string): CarState | null {
  const m = detail.match(/^phase=(\S+) intrusions=(\S+)$/);
  if (!m) return null;
  return {
    phase: m[1],
    intrusions: m[2] === "NONE" ? [] : m[2].split(","),
  };
}

/** Minimal RMC decode, just enough for the live location readout. */
export function parseRmcPosition(
  sentence: string,
): { lat: number; lon: number; valid: boolean } | null {
  if (!sentence.startsWith("$GPRMC,")) return null;
  const payload = sentence.slice(1).split("*")[0];
  const f = payload.split(",");
  if (f.length < 7) return null;
  const lat = ddmmToDegrees(f[3], f[4]);
  const lon = ddmmToDegrees(f[5], f[6]);
  if (lat === null || lon === null) return null;
  return { lat, lon, valid: f[2] === "A" };
}

function ddmmToDegrees(field: string, hemi: string): number | null {
  if (!/^\d+(\.\d*)?$/.test(field)) return null;
  const dot = field.indexOf(".");
  const intPart = dot === -1 ? field : field.slice(0, dot);
  const frac = dot === -1 ? "" : field.slice(dot);
  const minutes = Number(intPart.slice(-2) + frac);
  const degrees = Number(intPart.slice(0, -2) || "0");
  const value = degrees + minutes / 60;
  return hemi === "S" || hemi === "W" ? -value : value;
}

// -- commands ---------------------------------------------------------------

export interface BridgeCommand {
  cmd: string;
  [key: string]: unknown;
}

export const commands = {
  arm: (): BridgeCommand => ({ cmd: "arm" }),
  disarm: (): BridgeCommand => ({ cmd: "disarm" }),
  releaseRelays: (): BridgeCommand => ({ cmd: "release_relays" }),
  tilt: (kind: IntrusionKind, deg: number): BridgeCommand => ({
    cmd: "tilt",
    kind,
    deg,
  }),
  ownerSms: (from: string, body: string): BridgeCommand => ({
    cmd: "owner_sms",
    from,
    body,
  }),
  pause: (): BridgeCommand => ({ cmd: "pause" }),
  resume: (): BridgeCommand => ({ cmd: "resume" }),
  speed: (ratio: number): BridgeCommand => ({ cmd: "speed", ratio }),
};

export function encodeCommand(command: BridgeCommand): string {
  return JSON.stringify(command) + "\n";
}
