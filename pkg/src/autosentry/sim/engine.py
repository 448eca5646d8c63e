"""Deterministic discrete-event engine wiring every component together.

One Simulation owns the controller, the modem pair, the switches, the
GPS source and the SMS transport.  Events sit in a single min-heap keyed
(time, insertion sequence), so identical inputs replay to byte-identical
transcripts.  The same engine backs batch runs and the interactive
bridge; interactive mode merely paces ``advance_to`` against the wall
clock and injects commands at the current virtual time.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable

from ..controller import Controller, ControllerError, OutboundSms, Phase
from ..gsm import LoopbackPort, ModemDriver, SimModem, SmsMessage
from ..nmea import parse_gga, parse_rmc, parse_sentence
from ..vehicle import GpsSource, IntrusionKind, MercurySwitch, Waypoint
from .rng import SplitMix64
from .scenario import ScenarioEvent
from .transcript import Transcript, TranscriptRecord

log = logging.getLogger(__name__)

DEFAULT_WHITELIST = ["+923001234567"]
DEFAULT_ORIGIN = (24.8607, 67.0011)


@dataclass
class SimConfig:
    whitelist: list[str] = field(default_factory=lambda: list(DEFAULT_WHITELIST))
    unit_number: str = "+920000000000"
    latency: float = 2.0
    loss_prob: float = 0.0
    seed: int = 0
    horizon: float = 120.0
    origin: tuple[float, float] = DEFAULT_ORIGIN


class _Event:
    __slots__ = ("kind", "fn", "deadline")

    def __init__(self, kind: str, fn: Callable[[], None], deadline: float | None = None):
        self.kind = kind  # "gps" | "scenario" | "delivery" | "tick"
        self.fn = fn
        self.deadline = deadline


class Simulation:
    def __init__(self, config: SimConfig, waypoints: list[Waypoint] | None = None):
        if not config.whitelist:
            raise ValueError("config needs a nonempty whitelist")
        self.config = config
        self.now = 0.0
        self.records: list[TranscriptRecord] = []
        self.on_record: Callable[[TranscriptRecord], None] | None = None
        self._heap: list[tuple[float, int, _Event]] = []
        self._seq = 0
        self._rng = SplitMix64(config.seed)
        self.lost_sms = 0
        self.overflow_drops = 0

        self.controller = Controller(list(config.whitelist))
        self.modem = SimModem(config.unit_number)
        self._port = LoopbackPort(self.modem, self)
        self.driver = ModemDriver(self._port, clock=self, own_number=config.unit_number)
        self.switches = {k: MercurySwitch(k) for k in IntrusionKind}
        self.phones: dict[str, list[SmsMessage]] = {}

        if not waypoints:
            lat, lon = config.origin
            waypoints = [Waypoint(0.0, lat, lon, valid=True)]
        self.gps = GpsSource(waypoints)

        self.driver.init()  # AT dialogue happens before virtual time starts
        self._started = False
        self._schedule("gps", 0.0, lambda: self._gps_step(0.0))

    # -- event queue --------------------------------------------------------

    def _schedule(self, kind: str, at: float, fn: Callable[[], None],
                  deadline: float | None = None) -> None:
        heapq.heappush(self._heap, (at, self._seq, _Event(kind, fn, deadline)))
        self._seq += 1

    def _record(self, channel: str, detail: str) -> None:
        record = TranscriptRecord(self.now, channel, detail)
        self.records.append(record)
        if self.on_record is not None:
            self.on_record(record)

    def _record_state(self) -> None:
        c = self.controller
        kinds = ",".join(k.name for k in sorted(c.intrusions)) or "NONE"
        self._record("STATE", f"phase={c.phase.value} intrusions={kinds}")

    def _start(self) -> None:
        if not self._started:
            self._started = True
            self._record_state()

    def advance_to(self, t: float) -> None:
        """Process every event due at or before t, then move the clock
        to t."""
        self._start()
        while self._heap and self._heap[0][0] <= t:
            at, _, event = heapq.heappop(self._heap)
            self.now = at
            event.fn()
        if t > self.now:
            self.now = t

    def next_event_at(self) -> float | None:
        return self._heap[0][0] if self._heap else None

    def pending_after(self, horizon: float) -> int:
        """Meaningful events left beyond the horizon: scheduled stimuli,
        in-flight SMS and live timer ticks (the GPS chain and stale
        ticks do not count)."""
        count = 0
        for _, _, event in self._heap:
            if event.kind in ("scenario", "delivery"):
                count += 1
            elif event.kind == "tick" and event.deadline == self.controller.next_sms_deadline:
                count += 1
        return count

    # -- GPS chain ------------------------------------------------------------

    def _gps_step(self, t: float) -> None:
        for line in self.gps.emit(t):
            text = line.decode("ascii").rstrip("\r\n")
            self._record("SERIAL", text)
            sentence = parse_sentence(line)
            if sentence.talker_and_type.endswith("RMC"):
                self.controller.on_gps(parse_rmc(sentence))
            elif sentence.talker_and_type.endswith("GGA"):
                self.controller.on_gps(parse_gga(sentence))
        self._schedule("gps", t + 1.0, lambda: self._gps_step(t + 1.0))

    # -- stimuli (scenario lines and bridge commands) --------------------------

    def load_events(self, events: list[ScenarioEvent]) -> None:
        for ev in events:
            if ev.action == "gps_waypoint":
                continue  # folded into the track at construction
            self._schedule("scenario", ev.at, lambda e=ev: self.apply_event(e))

    def apply_event(self, ev: ScenarioEvent) -> None:
        if ev.action == "arm":
            self.do_arm()
        elif ev.action == "disarm":
            self.do_disarm()
        elif ev.action == "tilt":
            self.do_tilt(ev.kind, ev.tilt_deg)
        elif ev.action == "owner_sms":
            self.do_owner_sms(ev.number, ev.body)
        elif ev.action == "release_relays":
            self.do_release_relays()

    def do_arm(self) -> None:
        try:
            self.controller.arm()
        except ControllerError as exc:
            log.warning("arm ignored at t=%s: %s", self.now, exc)
            return
        self._record_state()

    def do_disarm(self) -> None:
        if self.controller.phase is Phase.DISARMED:
            return
        self.controller.disarm()
        self._record_state()

    def do_tilt(self, kind: IntrusionKind, deg: float) -> None:
        event = self.switches[kind].set_tilt(deg, self.now)
        if event is None:
            return
        prev = self.controller.phase
        outs = self.controller.on_sensor(kind, self.now)
        if self.controller.phase is not prev:
            self._record_state()
        for out in outs:
            self._unit_send(out)
        self._schedule_tick()

    def do_owner_sms(self, number: str, body: str) -> None:
        msg = SmsMessage(number, self.config.unit_number, body, self.now)
        self._record("SMS_OUT", _sms_detail(msg))
        self._transport_send(msg)

    def do_release_relays(self) -> None:
        self.controller.relays.release_all()
        self._record("RELAY", self.controller.relays.describe())

    # -- unit outbound path ----------------------------------------------------

    def _unit_send(self, out: OutboundSms) -> None:
        self.driver.send_sms(out.recipient, out.body)
        for msg in self.modem.outbox:
            self._record("SMS_OUT", _sms_detail(msg))
            self._transport_send(msg)
        self.modem.outbox.clear()

    def _schedule_tick(self) -> None:
        deadline = self.controller.next_sms_deadline
        if deadline is None:
            return
        self._schedule(
            "tick", deadline, lambda: self._tick_fire(deadline), deadline=deadline
        )

    def _tick_fire(self, deadline: float) -> None:
        if self.controller.next_sms_deadline != deadline:
            return  # episode ended or timer moved; stale timer shot
        outs = self.controller.tick(self.now)
        for out in outs:
            self._unit_send(out)
        self._schedule_tick()

    # -- transport ---------------------------------------------------------------

    def _transport_send(self, msg: SmsMessage) -> None:
        if self.config.loss_prob > 0 and self._rng.uniform() < self.config.loss_prob:
            self.lost_sms += 1
            log.info("SMS lost in transit: %s", _sms_detail(msg))
            return
        self._schedule(
            "delivery",
            self.now + self.config.latency,
            lambda: self._deliver(msg),
        )

    def _deliver(self, msg: SmsMessage) -> None:
        self._record("SMS_IN", _sms_detail(msg))
        if msg.recipient == self.config.unit_number:
            index, notice = self.modem.deliver(msg)
            if index is None:
                self.overflow_drops += 1
                log.warning(
                    "+CMS ERROR-style overflow: storage full, dropped %s",
                    _sms_detail(msg),
                )
                return
            self._port.inject(notice)
            for inbound in self.driver.poll_inbox():
                self._handle_owner_sms(inbound)
        else:
            self.phones.setdefault(msg.recipient, []).append(msg)

    def _handle_owner_sms(self, msg: SmsMessage) -> None:
        c = self.controller
        prev = c.phase
        directives, outs = c.on_owner_sms(msg, self.now)
        for _ in directives:
            self._record("RELAY", c.relays.describe())
        if directives and c.phase is not prev:
            self._record_state()
        for out in outs:
            self._unit_send(out)
        if not directives and c.phase is not prev:
            self._record_state()  # DISARM ack precedes the state flip


def _sms_detail(msg: SmsMessage) -> str:
    return f"{msg.sender} -> {msg.recipient} | {msg.body}"


def run_scenario(
    events: list[ScenarioEvent], config: SimConfig
) -> Transcript:
    """Batch-execute a parsed scenario to the configured horizon."""
    waypoints = [
        Waypoint(ev.at, ev.lat, ev.lon, ev.valid)
        for ev in events
        if ev.action == "gps_waypoint"
    ]
    sim = Simulation(config, waypoints or None)
    sim.load_events(events)
    sim.advance_to(config.horizon)
    pending = sim.pending_after(config.horizon)
    if pending:
        log.warning("horizon %s reached with %d event(s) still pending",
                    config.horizon, pending)
    return Transcript(config.seed, sim.records, pending)
