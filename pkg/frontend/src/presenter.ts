// Gesture handlers behind the panels.  Every method maps one user
// action to at most one bridge command; nothing is synthesized on its
// own, and nothing is sent while disconnected.

import { BridgeCommand, IntrusionKind, commands } from "./protocol.js";

export class ConsolePresenter {
  constructor(
    private ownerNumber: () => string,
    private isConnected: () => boolean,
    private sendRaw: (command: BridgeCommand) => void,
    private onRejected: (reason: string) => void,
  ) {}

  private guarded(command: BridgeCommand): boolean {
    if (!this.isConnected()) {
      this.onRejected("not connected: command not sent");
      return false;
    }
    this.sendRaw(command);
    return true;
  }

  sendOwnerSms(body: string): boolean {
    const text = body.trim();
    if (!text) {
      this.onRejected("empty message");
      return false;
    }
    return this.guarded(commands.ownerSms(this.ownerNumber(), text));
  }

  setLid(kind: IntrusionKind, open: boolean): boolean {
    return this.guarded(commands.tilt(kind, open ? 45 : 0));
  }

  arm(): boolean {
    return this.guarded(commands.arm());
  }

  disarm(): boolean {
    return this.guarded(commands.disarm());
  }

  releaseRelays(): boolean {
    return this.guarded(commands.releaseRelays());
  }

  pause(): boolean {
    return this.guarded(commands.pause());
  }

  resume(): boolean {
    return this.guarded(commands.resume());
  }

  setSpeed(ratio: number): boolean {
    return this.guarded(commands.speed(ratio));
  }
}
