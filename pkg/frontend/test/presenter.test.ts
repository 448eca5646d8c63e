import { describe, expect, it, vi } from "vitest";

import { ConsolePresenter } from "../src/presenter.js";

function makePresenter(connected: boolean) {
  const send = vi.fn();
  const rejected = vi.fn();
  const presenter = new ConsolePresenter(
    () => "+923001234567",
    () => connected,
    send,
    rejected,
  );
  return { presenter, send, rejected };
}

describe("owner phone commands", () => {
  it("LOCK press produces exactly one owner_sms command on the wire", () => {
    const { presenter, send } = makePresenter(true);
    expect(presenter.sendOwnerSms("LOCK")).toBe(true);
    expect(send).toHaveBeenCalledTimes(1);
    expect(send).toHaveBeenCalledWith({
      cmd: "owner_sms",
      from: "+923001234567",
      body: "LOCK",
    });
  });

  it("free text goes through verbatim", () => {
    const { presenter, send } = makePresenter(true);
    presenter.sendOwnerSms("hello unit");
    expect(send).toHaveBeenCalledWith({
      cmd: "owner_sms",
      from: "+923001234567",
      body: "hello unit",
    });
  });

  it("clicks while disconnected are rejected with a banner, nothing sent", () => {
    const { presenter, send, rejected } = makePresenter(false);
    expect(presenter.sendOwnerSms("LOCK")).toBe(false);
    expect(send).not.toHaveBeenCalled();
    expect(rejected).toHaveBeenCalledTimes(1);
  });

  it("empty bodies never reach the wire", () => {
    const { presenter, send, rejected } = makePresenter(true);
    expect(presenter.sendOwnerSms("   ")).toBe(false);
    expect(send).not.toHaveBeenCalled();
    expect(rejected).toHaveBeenCalled();
  });
});

describe("car panel controls", () => {
  it("lid toggles map to 45/0 degree tilts", () => {
    const { presenter, send } = makePresenter(true);
    presenter.setLid("DOOR", true);
    presenter.setLid("DOOR", false);
    expect(send.mock.calls).toEqual([
      [{ cmd: "tilt", kind: "DOOR", deg: 45 }],
      [{ cmd: "tilt", kind: "DOOR", deg: 0 }],
    ]);
  });

  it("sim speed selection emits a speed command", () => {
    const { presenter, send } = makePresenter(true);
    presenter.setSpeed(4);
    expect(send).toHaveBeenCalledWith({ cmd: "speed", ratio: 4 });
  });

  it("arm, disarm, release and pause map one-to-one", () => {
    const { presenter, send } = makePresenter(true);
    presenter.arm();
    presenter.disarm();
    presenter.releaseRelays();
    presenter.pause();
    presenter.resume();
    expect(send.mock.calls.map((c) => c[0].cmd)).toEqual([
      "arm",
      "disarm",
      "release_relays",
      "pause",
      "resume",
    ]);
  });
});
