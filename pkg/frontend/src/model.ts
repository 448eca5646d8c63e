// Console view state as a pure fold over the inbound record stream.
// Replaying the same records always rebuilds the identical view, so a
// reconnect (which replays history) costs nothing.

import {
  CarState,
  RelayLamps,
  TranscriptRecord,
  parseRelayDetail,
  parseRmcPosition,
  parseSmsDetail,
  parseStateDetail,
} from "./protocol.js";

export interface InboxEntry {
  at: number;
  sender: string;
  body: string;
}

export interface Position {
  lat: number;
  lon: number;
  valid: boolean;
}

const LOG_LIMIT = 500;

export class ConsoleModel {
  inbox: InboxEntry[] = []; // newest first
  lamps: RelayLamps = { gearLock: false, engineSeize: false, supplyCut: false };
  car: CarState = { phase: "DISARMED", intrusions: [] };
  position: Position | null = null;
  log: TranscriptRecord[] = [];

  constructor(public ownerNumber: string) {}

  reset(): void {
    this.inbox = [];
    this.lamps = { gearLock: false, engineSeize: false, supplyCut: false };
    this.car = { phase: "DISARMED", intrusions: [] };
    this.position = null;
    this.log = [];
  }

  apply(record: TranscriptRecord): void {
    switch (record.channel) {
      case "SMS_OUT": {
        const sms = parseSmsDetail(record.detail);
        if (sms && sms.recipient === this.ownerNumber) {
          this.inbox.unshift({
            at: record.at,
            sender: sms.sender,
            body: sms.body,
          });
        }
        break;
      }
      case "RELAY": {
        const lamps = parseRelayDetail(record.detail);
        if (lamps) this.lamps = lamps; // latest RELAY record wins
        break;
      }
      case "STATE": {
        const car = parseStateDetail(record.detail);
        if (car) this.car = car;
        break;
      }
      case "SERIAL": {
        const position = parseRmcPosition(record.detail);
        if (position) this.position = position;
        break;
      }
    }
    if (record.channel !== "SERIAL") {
      this.log.push(record);
      if (this.log.length > LOG_LIMIT) this.log.shift();
    }
  }

  applyAll(records: TranscriptRecord[]): void {
    for (const record of records) this.apply(record);
  }
}
