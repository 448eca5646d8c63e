// DOM wiring: a virtual owner phone on the left, the car panel on the
// right, both fed from one WebSocket to the simulation bridge.

import { ConsoleModel } from "./model.js";
import { ConsolePresenter } from "./presenter.js";
import {
  BridgeCommand,
  IntrusionKind,
  createNdjsonParser,
  encodeCommand,
  isTranscriptRecord,
} from "./protocol.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class BridgeConnection {
  private ws: WebSocket | null = null;

  constructor(
    private onRecord: (record: unknown) => void,
    private onStatus: (connected: boolean) => void,
  ) {}

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  connect(url: string): void {
    this.disconnect();
    const parser = createNdjsonParser(this.onRecord);
    const ws = new WebSocket(url);
    this.ws = ws;
    ws.onopen = () => this.onStatus(true);
    ws.onclose = () => {
      if (this.ws === ws) this.ws = null;
      this.onStatus(false);
    };
    ws.onerror = () => ws.close();
    ws.onmessage = (event) => parser.push(String(event.data));
  }

  disconnect(): void {
    if (this.ws) {
      const ws = this.ws;
      this.ws = null;
      ws.close();
    }
  }

  send(command: BridgeCommand): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(encodeCommand(command));
    }
  }
}

function main(): void {
  const ownerInput = el<HTMLInputElement>("owner-number");
  const urlInput = el<HTMLInputElement>("bridge-url");
  const banner = el<HTMLDivElement>("banner");
  const inboxList = el<HTMLUListElement>("inbox");
  const phaseBox = el<HTMLSpanElement>("phase");
  const intrusionsBox = el<HTMLSpanElement>("intrusions");
  const locationBox = el<HTMLSpanElement>("location");
  const logBox = el<HTMLPreElement>("event-log");

  let model = new ConsoleModel(ownerInput.value.trim());

  const render = () => {
    inboxList.innerHTML = "";
    for (const entry of model.inbox) {
      const item = document.createElement("li");
      const stamp = document.createElement("span");
      stamp.className = "stamp";
      stamp.textContent = `t=${entry.at}`;
      item.appendChild(stamp);
      item.appendChild(document.createTextNode(` ${entry.body}`));
      inboxList.appendChild(item);
    }
    phaseBox.textContent = model.car.phase;
    phaseBox.className = `phase ${model.car.phase.toLowerCase()}`;
    intrusionsBox.textContent = model.car.intrusions.join(", ") || "none";
    for (const [id, on] of [
      ["lamp-lock", model.lamps.gearLock],
      ["lamp-seize", model.lamps.engineSeize],
      ["lamp-cut", model.lamps.supplyCut],
    ] as const) {
      el(id).classList.toggle("on", on);
    }
    locationBox.textContent = model.position
      ? `${model.position.lat.toFixed(6)}, ${model.position.lon.toFixed(6)}` +
        (model.position.valid ? "" : " (no fix)")
      : "unknown";
    logBox.textContent = model.log
      .slice(-12)
      .map((r) => `t=${r.at} ${r.channel} ${r.detail}`)
      .join("\n");
  };

  const showBanner = (text: string, sticky = false) => {
    banner.textContent = text;
    banner.classList.add("visible");
    if (!sticky) {
      setTimeout(() => banner.classList.remove("visible"), 2500);
    }
  };

  const connection = new BridgeConnection(
    (obj) => {
      if (isTranscriptRecord(obj)) {
        model.apply(obj);
        render();
      } else if (typeof obj === "object" && obj && "error" in obj) {
        showBanner(`bridge error: ${(obj as { error: string }).error}`);
      }
    },
    (connected) => {
      banner.classList.toggle("visible", !connected);
      if (!connected) {
        banner.textContent = "disconnected from bridge";
      }
    },
  );

  const presenter = new ConsolePresenter(
    () => ownerInput.value.trim(),
    () => connection.connected,
    (command) => connection.send(command),
    (reason) => showBanner(reason),
  );

  el<HTMLButtonElement>("connect").onclick = () => {
    model = new ConsoleModel(ownerInput.value.trim());
    render();
    connection.connect(urlInput.value.trim());
  };

  for (const verb of ["LOCK", "SEIZE", "CUT", "DISARM", "STATUS"]) {
    el<HTMLButtonElement>(`cmd-${verb.toLowerCase()}`).onclick = () =>
      presenter.sendOwnerSms(verb);
  }
  const freeText = el<HTMLInputElement>("free-text");
  el<HTMLButtonElement>("cmd-send").onclick = () => {
    if (presenter.sendOwnerSms(freeText.value)) freeText.value = "";
  };

  for (const kind of ["DOOR", "BONNET", "TRUNK"] as IntrusionKind[]) {
    const box = el<HTMLInputElement>(`lid-${kind.toLowerCase()}`);
    box.onchange = () => presenter.setLid(kind, box.checked);
  }
  el<HTMLButtonElement>("car-arm").onclick = () => presenter.arm();
  el<HTMLButtonElement>("car-disarm").onclick = () => presenter.disarm();
  el<HTMLButtonElement>("car-release").onclick = () => presenter.releaseRelays();
  el<HTMLButtonElement>("sim-pause").onclick = () => presenter.pause();
  el<HTMLButtonElement>("sim-resume").onclick = () => presenter.resume();
  const speedSelect = el<HTMLSelectElement>("sim-speed");
  speedSelect.onchange = () => presenter.setSpeed(Number(speedSelect.value));

  render();
}

main();
