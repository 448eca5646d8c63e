"""NMEA-0183 sentence codec for the emulated GPS serial channel.

Wire format: ``$`` + payload + ``*`` + two hex digits + CRLF, where the
payload is the talker/type identifier followed by comma-separated fields
and the checksum is the XOR fold of the payload bytes.  Only RMC and GGA
are decoded into fixes; every other sentence type still parses
structurally so callers can skip it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal


class NmeaError(Exception):
    """Base class for all sentence and coordinate errors."""


class MissingStart(NmeaError):
    """No ``$`` anywhere in the input."""


class BadChecksum(NmeaError):
    """Stated checksum does not match the XOR of the payload."""


class Malformed(NmeaError):
    """Structurally broken sentence (no ``*``, bad hex, stray CR/LF...)."""


class WrongType(NmeaError):
    """Sentence is not of the type the decoder expects."""


class FieldCount(NmeaError):
    """Sentence has too few fields for its type."""


class BadFormat(NmeaError):
    """A field that should be numeric (or a hemisphere letter) is not."""


class MinutesOutOfRange(NmeaError):
    """Coordinate minutes part is >= 60."""


class CoordinateOutOfRange(NmeaError):
    """Decoded coordinate exceeds +/-90 (lat) or +/-180 (lon)."""


def checksum(payload: bytes | str) -> int:
    """XOR fold of all payload bytes (the NMEA checksum)."""
    if isinstance(payload, str):
        payload = payload.encode("ascii")
    value = 0
    for b in payload:
        value ^= b
    return value


@dataclass(frozen=True)
class RawSentence:
    """A structurally parsed sentence, independent of its type.

    ``fields`` holds the comma-separated data fields after the
    talker/type identifier; the identifier itself is kept separate.
    The checksum is computed from the payload on construction unless
    explicitly supplied.
    """

    talker_and_type: str
    fields: tuple[str, ...] = ()
    checksum: int = -1

    def __post_init__(self) -> None:
        if self.checksum < 0:
            object.__setattr__(self, "checksum", checksum(self.payload))

    @property
    def payload(self) -> str:
        return ",".join((self.talker_and_type,) + tuple(self.fields))

    def serialize(self) -> bytes:
        """Render the exact wire bytes, CRLF included, uppercase hex."""
        payload = self.payload
        if re.search(r"[$*\r\n]", payload):
            raise Malformed("payload may not contain '$', '*', CR or LF")
        return f"${payload}*{checksum(payload):02X}\r\n".encode("ascii")


def serialize(sentence: RawSentence) -> bytes:
    return sentence.serialize()


def parse_sentence(line: bytes | str) -> RawSentence:
    """Parse one sentence from raw bytes.

    Total over arbitrary input: returns a RawSentence or raises a
    NmeaError subclass, never anything else.  Leading garbage before the
    ``$`` is skipped, trailing CR/LF is optional, and lowercase checksum
    hex is accepted (output is always uppercase).
    """
    if isinstance(line, str):
        try:
            line = line.encode("ascii")
        except UnicodeEncodeError as exc:
            raise Malformed(f"non-ASCII input: {exc}") from None
    start = line.find(b"$")
    if start < 0:
        raise MissingStart("no '$' in input")
    body = line[start + 1:]
    # Trailing line terminator is optional on input.
    if body.endswith(b"\r\n"):
        body = body[:-2]
    elif body.endswith((b"\n", b"\r")):
        body = body[:-1]
    star = body.rfind(b"*")
    if star < 0:
        raise Malformed("no '*' checksum delimiter")
    payload, stated = body[:star], body[star + 1:]
    if len(stated) != 2 or not re.fullmatch(rb"[0-9A-Fa-f]{2}", stated):
        raise Malformed(f"checksum field {stated!r} is not two hex digits")
    if re.search(rb"[$*\r\n]", payload):
        raise Malformed("payload contains '$', '*', CR or LF")
    try:
        text = payload.decode("ascii")
    except UnicodeDecodeError as exc:
        raise Malformed(f"non-ASCII payload: {exc}") from None
    computed = checksum(payload)
    if computed != int(stated, 16):
        raise BadChecksum(
            f"stated {int(stated, 16):02X} != computed {computed:02X}"
        )
    parts = text.split(",")
    return RawSentence(parts[0], tuple(parts[1:]), computed)


def coord_to_decimal(field: str, hemisphere: str) -> float:
    """Convert a ``dddmm.mmmm`` field plus hemisphere to signed degrees.

    The last two digits of the integer part are whole minutes; whatever
    precedes them is whole degrees.  S and W negate.
    """
    if hemisphere not in ("N", "S", "E", "W"):
        raise BadFormat(f"hemisphere {hemisphere!r} not one of N/S/E/W")
    if not re.fullmatch(r"\d+(\.\d*)?", field):
        raise BadFormat(f"coordinate field {field!r} is not dddmm.mmmm")
    intpart, _, frac = field.partition(".")
    minutes = float(f"{intpart[-2:]}.{frac or '0'}")
    if minutes >= 60.0:
        raise MinutesOutOfRange(f"{minutes} minutes in {field!r}")
    degrees = int(intpart[:-2] or "0")
    value = degrees + minutes / 60.0
    return -value if hemisphere in ("S", "W") else value


@dataclass(frozen=True)
class GpsFix:
    """Decoded position/time/validity from one RMC or GGA sentence.

    ``valid`` false means the coordinates (if any) are stale and must
    not be trusted by consumers.
    """

    latitude: float | None
    longitude: float | None
    utc_time: str
    valid: bool
    speed_knots: float | None = None
    satellites: int | None = None

    def __post_init__(self) -> None:
        if self.latitude is not None and abs(self.latitude) > 90.0:
            raise CoordinateOutOfRange(f"latitude {self.latitude}")
        if self.longitude is not None and abs(self.longitude) > 180.0:
            raise CoordinateOutOfRange(f"longitude {self.longitude}")


def _parse_coord_pair(
    lat_f: str, lat_h: str, lon_f: str, lon_h: str, required: bool
) -> tuple[float | None, float | None]:
    if not lat_f and not lon_f:
        if required:
            raise BadFormat("fix is marked valid but has no coordinates")
        return None, None
    lat = coord_to_decimal(lat_f, lat_h)
    lon = coord_to_decimal(lon_f, lon_h)
    if abs(lat) > 90.0:
        raise CoordinateOutOfRange(f"latitude {lat}")
    if abs(lon) > 180.0:
        raise CoordinateOutOfRange(f"longitude {lon}")
    return lat, lon


def parse_rmc(s: RawSentence) -> GpsFix:
    """Decode an RMC sentence (position, validity, speed over ground)."""
    if not s.talker_and_type.endswith("RMC"):
        raise WrongType(f"{s.talker_and_type} is not RMC")
    f = s.fields
    if len(f) < 7:
        raise FieldCount(f"RMC needs >= 7 fields, got {len(f)}")
    valid = f[1] == "A"
    lat, lon = _parse_coord_pair(f[2], f[3], f[4], f[5], required=valid)
    speed = None
    if f[6]:
        try:
            speed = float(f[6])
        except ValueError:
            raise BadFormat(f"speed field {f[6]!r}") from None
        if speed < 0:
            raise BadFormat(f"negative speed {f[6]!r}")
    return GpsFix(lat, lon, f[0], valid, speed_knots=speed)


def parse_gga(s: RawSentence) -> GpsFix:
    """Decode a GGA sentence (position, fix quality, satellite count)."""
    if not s.talker_and_type.endswith("GGA"):
        raise WrongType(f"{s.talker_and_type} is not GGA")
    f = s.fields
    if len(f) < 7:
        raise FieldCount(f"GGA needs >= 7 fields, got {len(f)}")
    if not f[5].isdigit():
        raise BadFormat(f"fix quality field {f[5]!r}")
    valid = int(f[5]) > 0
    lat, lon = _parse_coord_pair(f[1], f[2], f[3], f[4], required=valid)
    sats = None
    if f[6]:
        if not f[6].isdigit():
            raise BadFormat(f"satellite count field {f[6]!r}")
        sats = int(f[6])
    return GpsFix(lat, lon, f[0], valid, satellites=sats)


_SIX_PLACES = Decimal("0.000001")


def _fmt6(value: float) -> str:
    # Ties round away from zero so transcripts are bit-stable; -0.0 is
    # normalized to plain zero.
    q = Decimal(repr(value)).quantize(_SIX_PLACES, rounding=ROUND_HALF_UP)
    if q == 0:
        q = abs(q)
    return f"{q:.6f}"


def render_fix_text(fix: GpsFix) -> str:
    """Location token used in outbound SMS bodies."""
    if not fix.valid or fix.latitude is None or fix.longitude is None:
        return "LOC UNAVAILABLE"
    return f"LOC {_fmt6(fix.latitude)} {_fmt6(fix.longitude)}"
