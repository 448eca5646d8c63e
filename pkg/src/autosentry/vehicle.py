"""Vehicle-side models: mercury tilt switches, latching relays, and a
GPS source that emits NMEA sentence pairs along a waypoint track.

All electrical behaviour is idealized; switches and relays are pure
state machines stepped by the harness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import nmea
from .timebase import to_datetime


class IntrusionKind(enum.IntEnum):
    """Where a tilt switch sits; numeric order is the report order."""

    DOOR = 1
    BONNET = 2
    TRUNK = 3


class RelayDirective(enum.Enum):
    LOCK = "LOCK"
    SEIZE = "SEIZE"
    CUT = "CUT"


class TiltOutOfRange(Exception):
    pass


class EmptyTrack(Exception):
    pass


@dataclass(frozen=True)
class SensorEvent:
    """A debounced switch closure."""

    kind: IntrusionKind
    at: float


@dataclass
class MercurySwitch:
    """Gravity switch with closing threshold, opening hysteresis and a
    debounce window on reported closures.

    Closes at >= close_threshold degrees, opens again only below
    open_threshold, and never reports two closures within
    debounce_window seconds of each other.
    """

    location: IntrusionKind
    close_threshold: float = 30.0
    open_threshold: float = 25.0
    debounce_window: float = 0.2
    tilt_deg: float = 0.0
    closed: bool = False
    last_transition: float = -math.inf
    _last_report: float = field(default=-math.inf, repr=False)

    def set_tilt(self, tilt_deg: float, now: float) -> SensorEvent | None:
        if not 0.0 <= tilt_deg <= 180.0:
            raise TiltOutOfRange(f"tilt {tilt_deg} outside [0, 180]")
        self.tilt_deg = tilt_deg
        if not self.closed and tilt_deg >= self.close_threshold:
            self.closed = True
            self.last_transition = now
            if now - self._last_report >= self.debounce_window:
                self._last_report = now
                return SensorEvent(self.location, now)
        elif self.closed and tilt_deg < self.open_threshold:
            self.closed = False
            self.last_transition = now
        return None


@dataclass
class RelayBank:
    """Three latching relays; once set they stay set until the harness
    issues an explicit release."""

    gear_lock: bool = False
    engine_seize: bool = False
    supply_cut: bool = False

    _FLAGS = {
        RelayDirective.LOCK: "gear_lock",
        RelayDirective.SEIZE: "engine_seize",
        RelayDirective.CUT: "supply_cut",
    }

    def apply(self, directive: RelayDirective) -> None:
        setattr(self, self._FLAGS[directive], True)

    def release_all(self) -> None:
        self.gear_lock = self.engine_seize = self.supply_cut = False

    def active_directives(self) -> list[RelayDirective]:
        return [d for d, f in self._FLAGS.items() if getattr(self, f)]

    def describe(self) -> str:
        return (
            f"gear_lock={int(self.gear_lock)} "
            f"engine_seize={int(self.engine_seize)} "
            f"supply_cut={int(self.supply_cut)}"
        )


@dataclass(frozen=True)
class Waypoint:
    t: float
    lat: float
    lon: float
    valid: bool = True


def _ddmm(value: float, is_lat: bool) -> tuple[str, str]:
    if is_lat:
        hemi = "N" if value >= 0 else "S"
    else:
        hemi = "E" if value >= 0 else "W"
    magnitude = abs(value)
    degrees = int(magnitude)
    minutes = round((magnitude - degrees) * 60.0, 4)
    if minutes >= 60.0:  # rounding may carry into a whole degree
        degrees += 1
        minutes -= 60.0
    width = 2 if is_lat else 3
    return f"{degrees:0{width}d}{minutes:07.4f}", hemi


class GpsSource:
    """Emits one RMC + one GGA per whole second, linearly interpolating
    position between waypoints (clamped outside the track)."""

    def __init__(self, track: list[Waypoint]):
        if not track:
            raise EmptyTrack("GPS source needs at least one waypoint")
        self.track = sorted(track, key=lambda w: w.t)

    def position_at(self, now: float) -> tuple[float, float, bool]:
        track = self.track
        if now <= track[0].t:
            w = track[0]
            return w.lat, w.lon, w.valid
        if now >= track[-1].t:
            w = track[-1]
            return w.lat, w.lon, w.valid
        for a, b in zip(track, track[1:]):
            if a.t <= now <= b.t:
                u = (now - a.t) / (b.t - a.t)
                lat = a.lat + (b.lat - a.lat) * u
                lon = a.lon + (b.lon - a.lon) * u
                return lat, lon, a.valid
        raise AssertionError("unreachable: track is sorted")

    def emit(self, now: float) -> list[bytes]:
        lat, lon, valid = self.position_at(now)
        stamp = to_datetime(now)
        hhmmss = stamp.strftime("%H%M%S")
        ddmmyy = stamp.strftime("%d%m%y")
        lat_f, lat_h = _ddmm(lat, is_lat=True)
        lon_f, lon_h = _ddmm(lon, is_lat=False)
        rmc = nmea.RawSentence(
            "GPRMC",
            (
                hhmmss,
                "A" if valid else "V",
                lat_f,
                lat_h,
                lon_f,
                lon_h,
                "000.0",
                "000.0",
                ddmmyy,
                "",
                "",
            ),
        )
        gga = nmea.RawSentence(
            "GPGGA",
            (
                hhmmss,
                lat_f,
                lat_h,
                lon_f,
                lon_h,
                "1" if valid else "0",
                "08" if valid else "00",
                "1.0",
                "0.0",
                "M",
                "0.0",
                "M",
                "",
                "",
            ),
        )
        return [rmc.serialize(), gga.serialize()]
