"""Scenario files: one timestamped stimulus per line.

Format: ``<at> <action> [args...]`` with ``#`` comments and blank lines
skipped.  Events must be sorted by time.  Actions:

    arm
    disarm
    tilt <DOOR|BONNET|TRUNK> <degrees>
    owner_sms <number> <body...>
    gps_waypoint <lat> <lon> <1|0|true|false>
    release_relays
"""

from __future__ import annotations

from dataclasses import dataclass

from ..gsm.messages import MAX_BODY_LEN, is_valid_number
from ..vehicle import IntrusionKind


class ScenarioParseError(Exception):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class ScenarioEvent:
    at: float
    action: str
    kind: IntrusionKind | None = None
    tilt_deg: float | None = None
    number: str | None = None
    body: str | None = None
    lat: float | None = None
    lon: float | None = None
    valid: bool | None = None


_BOOL_WORDS = {"1": True, "true": True, "0": False, "false": False}


def parse_scenario(text: str) -> list[ScenarioEvent]:
    events: list[ScenarioEvent] = []
    last_at = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            at = float(tokens[0])
        except ValueError:
            raise ScenarioParseError(line_no, f"bad timestamp {tokens[0]!r}")
        if at < 0:
            raise ScenarioParseError(line_no, "negative timestamp")
        if last_at is not None and at < last_at:
            raise ScenarioParseError(line_no, "events not sorted by time")
        last_at = at
        if len(tokens) < 2:
            raise ScenarioParseError(line_no, "missing action")
        action = tokens[1]
        args = tokens[2:]
        if action in ("arm", "disarm", "release_relays"):
            if args:
                raise ScenarioParseError(line_no, f"{action} takes no arguments")
            events.append(ScenarioEvent(at, action))
        elif action == "tilt":
            if len(args) != 2:
                raise ScenarioParseError(line_no, "tilt needs <kind> <degrees>")
            try:
                kind = IntrusionKind[args[0].upper()]
            except KeyError:
                raise ScenarioParseError(line_no, f"unknown tilt kind {args[0]!r}")
            try:
                deg = float(args[1])
            except ValueError:
                raise ScenarioParseError(line_no, f"bad tilt degrees {args[1]!r}")
            if not 0.0 <= deg <= 180.0:
                raise ScenarioParseError(line_no, "tilt degrees outside [0, 180]")
            events.append(ScenarioEvent(at, action, kind=kind, tilt_deg=deg))
        elif action == "owner_sms":
            parts = line.split(maxsplit=3)
            if len(parts) < 4:
                raise ScenarioParseError(line_no, "owner_sms needs <number> <body>")
            number, body = parts[2], parts[3]
            if not is_valid_number(number):
                raise ScenarioParseError(line_no, f"bad phone number {number!r}")
            if len(body) > MAX_BODY_LEN:
                raise ScenarioParseError(line_no, f"body exceeds {MAX_BODY_LEN} chars")
            events.append(ScenarioEvent(at, action, number=number, body=body))
        elif action == "gps_waypoint":
            if len(args) != 3:
                raise ScenarioParseError(
                    line_no, "gps_waypoint needs <lat> <lon> <valid>"
                )
            try:
                lat, lon = float(args[0]), float(args[1])
            except ValueError:
                raise ScenarioParseError(line_no, "bad waypoint coordinates")
            if abs(lat) > 90.0 or abs(lon) > 180.0:
                raise ScenarioParseError(line_no, "waypoint out of bounds")
            valid = _BOOL_WORDS.get(args[2].lower())
            if valid is None:
                raise ScenarioParseError(line_no, f"bad valid flag {args[2]!r}")
            events.append(
                ScenarioEvent(at, action, lat=lat, lon=lon, valid=valid)
            )
        else:
            raise ScenarioParseError(line_no, f"unknown action {action!r}")
    return events
