"""Modem client half: the control unit's side of the AT dialogue.

The driver talks to anything that looks like a serial port (``write`` /
``read_available`` / ``wait_for_data``) and keeps all timing in virtual
seconds, so the same code runs against the in-process emulator and
against fault-injection stubs.
"""

from __future__ import annotations

import re

from .messages import SmsMessage, parse_timestamp
from .modem import SimModem

RESPONSE_TIMEOUT = 5.0

_CMTI_RE = re.compile(r'\+CMTI: "SM",(\d+)')
_CMGR_RE = re.compile(r'\+CMGR: "(REC (?:UN)?READ)","([^"]*)",,"([^"]*)"')
_CMGS_RE = re.compile(r"\+CMGS: (\d+)")


class DriverError(Exception):
    pass


class ModemError(DriverError):
    """The modem answered ERROR or +CMS ERROR."""


class ProtocolError(DriverError):
    """The modem's response bytes do not parse as expected."""


class Timeout(DriverError):
    """No final response within the virtual-time budget."""


class Clock:
    """Minimal standalone virtual clock (the harness supplies its own)."""

    def __init__(self, now: float = 0.0):
        self.now = now


class LoopbackPort:
    """Directly couples a driver to an in-process SimModem.

    The modem answers synchronously, so ``wait_for_data`` never has
    anything new to offer; unsolicited bytes from deliveries are pushed
    in by the harness via ``inject``.
    """

    def __init__(self, modem: SimModem, clock: Clock):
        self.modem = modem
        self.clock = clock
        self._buf = bytearray()

    def write(self, data: bytes) -> None:
        self._buf += self.modem.feed(data, now=self.clock.now)

    def inject(self, data: bytes) -> None:
        self._buf += data

    def read_available(self) -> bytes:
        data = bytes(self._buf)
        self._buf.clear()
        return data

    def wait_for_data(self, deadline: float) -> bool:
        return False


class ModemDriver:
    """Runs the init sequence, sends SMS, and drains the inbox."""

    def __init__(self, port, clock: Clock | None = None,
                 own_number: str = "+920000000000",
                 response_timeout: float = RESPONSE_TIMEOUT):
        self.port = port
        self.clock = clock if clock is not None else Clock()
        self.own_number = own_number
        self.response_timeout = response_timeout
        self.initialized = False
        self._rx = bytearray()
        self._notifications: list[int] = []

    # -- public API -------------------------------------------------------

    def init(self) -> None:
        """AT / ATE0 / AT+CMGF=1 / AT+CNMI init sequence."""
        self._command("AT")
        self._command("ATE0")
        self._command("AT+CMGF=1")
        self._command("AT+CNMI=2,1")
        self.initialized = True

    def send_sms(self, recipient: str, body: str) -> int:
        """Full CMGS dialogue; returns the modem's message reference."""
        deadline = self.clock.now + self.response_timeout
        cmd = f'AT+CMGS="{recipient}"'
        self.port.write(cmd.encode("ascii") + b"\r")
        self._await_prompt(cmd, deadline)
        self.port.write(body.encode("ascii") + b"\x1a")
        info = self._read_to_final(cmd, deadline)
        for line in info:
            m = _CMGS_RE.fullmatch(line)
            if m:
                return int(m.group(1))
        raise ProtocolError("no +CMGS reference before final OK")

    def poll_inbox(self) -> list[SmsMessage]:
        """Fetch and delete every SMS announced via +CMTI, in arrival
        order."""
        self._drain_pending()
        messages = []
        while self._notifications:
            index = self._notifications.pop(0)
            lines = self._command(f"AT+CMGR={index}")
            messages.append(self._decode_cmgr(lines))
            self._command(f"AT+CMGD={index}")
        return messages

    # -- response plumbing --------------------------------------------------

    def _command(self, cmd: str) -> list[str]:
        deadline = self.clock.now + self.response_timeout
        self.port.write(cmd.encode("ascii") + b"\r")
        return self._read_to_final(cmd, deadline)

    def _read_to_final(self, cmd: str, deadline: float) -> list[str]:
        info: list[str] = []
        while True:
            line = self._next_line(cmd, deadline)
            if line == "OK":
                return info
            if line == "ERROR" or line.startswith("+CMS ERROR"):
                raise ModemError(line)
            info.append(line)

    def _next_line(self, cmd: str, deadline: float) -> str:
        """Next response line, minus echoes, blanks and unsolicited
        notifications."""
        while True:
            line = self._take_line()
            if line is None:
                self._rx += self.port.read_available()
                if b"\r\n" in self._rx:
                    continue
                if not self.port.wait_for_data(deadline):
                    raise Timeout(f"no final response to {cmd!r}")
                continue
            if not line or line == cmd:
                continue
            m = _CMTI_RE.fullmatch(line)
            if m:
                self._notifications.append(int(m.group(1)))
                continue
            return line

    def _take_line(self) -> str | None:
        pos = self._rx.find(b"\r\n")
        if pos < 0:
            return None
        raw = bytes(self._rx[:pos])
        del self._rx[: pos + 2]
        return raw.decode("ascii", errors="replace").strip("\r")

    def _await_prompt(self, cmd: str, deadline: float) -> None:
        while True:
            if self._rx.endswith(b"> "):
                self._rx.clear()
                return
            line = self._take_line()
            if line is not None:
                if not line or line == cmd:
                    continue
                if line == "ERROR" or line.startswith("+CMS ERROR"):
                    raise ModemError(line)
                m = _CMTI_RE.fullmatch(line)
                if m:
                    self._notifications.append(int(m.group(1)))
                    continue
                raise ProtocolError(f"unexpected line {line!r} before prompt")
            self._rx += self.port.read_available()
            if self._rx.endswith(b"> ") or b"\r\n" in self._rx:
                continue
            if not self.port.wait_for_data(deadline):
                raise Timeout(f"no prompt after {cmd!r}")

    def _drain_pending(self) -> None:
        self._rx += self.port.read_available()
        while True:
            line = self._take_line()
            if line is None:
                return
            m = _CMTI_RE.fullmatch(line) if line else None
            if m:
                self._notifications.append(int(m.group(1)))

    def _decode_cmgr(self, lines: list[str]) -> SmsMessage:
        if len(lines) != 2:
            raise ProtocolError(f"CMGR returned {len(lines)} lines, want 2")
        header, body = lines
        m = _CMGR_RE.fullmatch(header)
        if m is None:
            raise ProtocolError(f"bad CMGR header {header!r}")
        try:
            sent_at = parse_timestamp(m.group(3))
        except ValueError as exc:
            raise ProtocolError(f"bad CMGR timestamp: {exc}") from None
        try:
            return SmsMessage(m.group(2), self.own_number, body, sent_at)
        except ValueError as exc:
            raise ProtocolError(str(exc)) from None
