"""Decision core of the control unit.

Consumes debounced sensor events, GPS fixes and owner SMS; produces
outbound SMS and relay directives.  Pure transition methods on a single
state object: (event, now) in, effects out.  The harness is the only
caller, so there is no locking anywhere.

Phases:

    DISARMED -- inert; ignores sensors and *all* SMS, emits nothing.
    ARMED    -- watching; a sensor event starts an alert episode.
    ALERTING -- intrusion seen, no owner action yet; alert SMS repeat
                every 30 s.
    POST_ACTION -- owner actuated a relay; location update SMS repeat
                every 30 s until disarmed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .gsm.messages import SmsMessage, is_valid_number
from .nmea import GpsFix, render_fix_text
from .vehicle import IntrusionKind, RelayBank, RelayDirective

ALERT_REPEAT_INTERVAL = 30.0
MAX_WHITELIST = 5


class Phase(enum.Enum):
    DISARMED = "DISARMED"
    ARMED = "ARMED"
    ALERTING = "ALERTING"
    POST_ACTION = "POST_ACTION"


class ControllerError(Exception):
    pass


class EmptyWhitelist(ControllerError):
    pass


class AlreadyArmed(ControllerError):
    pass


class OwnerCommand(enum.Enum):
    LOCK = "LOCK"
    SEIZE = "SEIZE"
    CUT = "CUT"
    DISARM = "DISARM"
    STATUS = "STATUS"


_ACTUATIONS = {
    OwnerCommand.LOCK: RelayDirective.LOCK,
    OwnerCommand.SEIZE: RelayDirective.SEIZE,
    OwnerCommand.CUT: RelayDirective.CUT,
}


def parse_command(body: str) -> OwnerCommand | None:
    """First whitespace-delimited token, case-insensitive; None if it is
    not a known verb."""
    tokens = body.split()
    if not tokens:
        return None
    try:
        return OwnerCommand(tokens[0].upper())
    except ValueError:
        return None


@dataclass(frozen=True)
class OutboundSms:
    recipient: str
    body: str


@dataclass(frozen=True)
class AlertMessage:
    """One entry of the predefined message set; the id is the bitmask of
    active intrusion kinds (0 for the post-action location update)."""

    catalog_id: int
    text: str


class Controller:
    def __init__(self, whitelist: list[str], relays: RelayBank | None = None):
        if len(whitelist) > MAX_WHITELIST:
            raise ValueError(f"whitelist larger than {MAX_WHITELIST}")
        for number in whitelist:
            if not is_valid_number(number):
                raise ValueError(f"bad whitelist number {number!r}")
        self.whitelist = list(whitelist)
        self.relays = relays if relays is not None else RelayBank()
        self.phase = Phase.DISARMED
        self.intrusions: set[IntrusionKind] = set()
        self.last_fix: GpsFix | None = None
        self.next_sms_deadline: float | None = None

    # -- console-side controls ---------------------------------------------

    def arm(self) -> None:
        if self.phase is not Phase.DISARMED:
            raise AlreadyArmed(f"cannot arm from {self.phase.value}")
        if not self.whitelist:
            raise EmptyWhitelist("arming requires at least one owner number")
        self.phase = Phase.ARMED
        self.intrusions.clear()

    def disarm(self) -> None:
        self.phase = Phase.DISARMED
        self.intrusions.clear()
        self.next_sms_deadline = None

    # -- inputs --------------------------------------------------------------

    def on_gps(self, fix: GpsFix) -> None:
        """Valid fixes replace the last known position; invalid ones are
        dropped so alerts carry the freshest trustworthy location."""
        if fix.valid:
            self.last_fix = fix

    def on_sensor(self, kind: IntrusionKind, now: float) -> list[OutboundSms]:
        if self.phase is Phase.ARMED:
            self.phase = Phase.ALERTING
            self.intrusions = {kind}
            self.next_sms_deadline = now + ALERT_REPEAT_INTERVAL
            return self._broadcast(self.compose_alert().text)
        if self.phase in (Phase.ALERTING, Phase.POST_ACTION):
            # widen the episode; the next scheduled SMS reflects the union
            self.intrusions.add(kind)
        return []

    def on_owner_sms(
        self, msg: SmsMessage, now: float
    ) -> tuple[list[RelayDirective], list[OutboundSms]]:
        if msg.sender not in self.whitelist:
            return [], []  # unauthorized senders get total silence
        if self.phase is Phase.DISARMED:
            return [], []  # a disarmed unit never talks back
        command = parse_command(msg.body)
        if command is None:
            return [], [OutboundSms(msg.sender, "ERR UNKNOWN CMD")]
        if command in _ACTUATIONS:
            directive = _ACTUATIONS[command]
            self.relays.apply(directive)
            if self.phase is Phase.ALERTING:
                self.phase = Phase.POST_ACTION
            return [directive], [OutboundSms(msg.sender, f"ACK {command.value}")]
        if command is OwnerCommand.DISARM:
            self.disarm()
            return [], [OutboundSms(msg.sender, "ACK DISARM")]
        return [], [OutboundSms(msg.sender, self.status_text())]

    def tick(self, now: float) -> list[OutboundSms]:
        """Fire the repeat timer; cadence is deadline + 30, not now + 30,
        so late ticks do not drift."""
        if self.next_sms_deadline is None or now < self.next_sms_deadline:
            return []
        self.next_sms_deadline += ALERT_REPEAT_INTERVAL
        if self.phase is Phase.ALERTING:
            return self._broadcast(self.compose_alert().text)
        if self.phase is Phase.POST_ACTION:
            return self._broadcast(self.compose_update().text)
        return []

    # -- message composition --------------------------------------------------

    def _location_text(self) -> str:
        if self.last_fix is None:
            return "LOC UNAVAILABLE"
        return render_fix_text(self.last_fix)

    def compose_alert(self) -> AlertMessage:
        kinds = sorted(self.intrusions)
        names = ",".join(k.name for k in kinds)
        mask = sum(1 << (k - 1) for k in kinds)
        return AlertMessage(mask, f"ALERT {names} | {self._location_text()}")

    def compose_update(self) -> AlertMessage:
        return AlertMessage(0, f"UPDATE | {self._location_text()}")

    def status_text(self) -> str:
        kinds = ",".join(k.name for k in sorted(self.intrusions)) or "NONE"
        relays = ",".join(d.value for d in self.relays.active_directives()) or "NONE"
        return (
            f"STATUS {self.phase.value} | INTRUSIONS {kinds} | "
            f"RELAYS {relays} | {self._location_text()}"
        )

    def _broadcast(self, body: str) -> list[OutboundSms]:
        return [OutboundSms(number, body) for number in self.whitelist]
