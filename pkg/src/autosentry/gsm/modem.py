"""Emulated SIM300-class GSM modem, driven byte by byte over a virtual
serial line.

The emulator implements the command set the control unit needs: AT,
ATE0/ATE1, AT+CNMI, AT+CPMS, AT+CMGF, AT+CMGS (prompt + Ctrl-Z body
phase), AT+CMGR, AT+CMGD, in text mode only.  Every accepted command
line yields exactly one final response; responses are framed
``\\r\\n<text>\\r\\n`` byte-exactly.  Outbound messages committed with
Ctrl-Z land in ``outbox`` for the SMS transport to pick up.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .messages import SmsMessage, render_timestamp

STORAGE_CAPACITY = 20

_CR = 0x0D
_LF = 0x0A
_CTRL_Z = 0x1A
_ESC = 0x1B

_CMGS_RE = re.compile(r'AT\+CMGS="(\+?\d{1,15})"', re.IGNORECASE)
_CMGR_RE = re.compile(r"AT\+CMGR=(\d+)", re.IGNORECASE)
_CMGD_RE = re.compile(r"AT\+CMGD=(\d+)", re.IGNORECASE)
_CMGF_RE = re.compile(r"AT\+CMGF=(\S*)", re.IGNORECASE)


@dataclass
class SmsSlot:
    """One inbound-storage position; indices never renumber."""

    index: int
    status: str  # "REC UNREAD" or "REC READ"
    message: SmsMessage


def _resp(text: str) -> bytes:
    return f"\r\n{text}\r\n".encode("ascii")


OK = _resp("OK")
ERROR = _resp("ERROR")
PROMPT = b"\r\n> "


def cms_error(code: int) -> bytes:
    return _resp(f"+CMS ERROR: {code}")


class SimModem:
    """Byte-exact modem emulator; the harness owns it and serializes all
    access."""

    def __init__(self, own_number: str = "+920000000000"):
        self.own_number = own_number
        self.echo = True
        self.text_mode = False
        self.cnmi_notify = False
        self.slots: list[SmsSlot | None] = [None] * STORAGE_CAPACITY
        self.next_mr = 0
        self.outbox: list[SmsMessage] = []
        self._line = bytearray()
        self._body: bytearray | None = None
        self._body_recipient = ""

    # -- serial input ----------------------------------------------------

    def feed(self, data: bytes, now: float = 0.0) -> bytes:
        """Consume serial bytes, return everything the modem says back."""
        out = bytearray()
        for b in data:
            if self.echo:
                out.append(b)
            if self._body is not None:
                out += self._feed_body(b, now)
            elif b == _CR:
                line = self._line.decode("ascii", errors="replace")
                self._line.clear()
                if line:
                    out += self._dispatch(line)
            elif b != _LF:
                self._line.append(b)
        return bytes(out)

    def _feed_body(self, b: int, now: float) -> bytes:
        assert self._body is not None
        if b == _CTRL_Z:
            body, recipient = self._body, self._body_recipient
            self._body = None
            return self._commit_sms(bytes(body), recipient, now)
        if b == _ESC:
            self._body = None
            return OK
        self._body.append(b)
        return b""

    # -- command dispatch -------------------------------------------------

    def _dispatch(self, line: str) -> bytes:
        cmd = line.strip().upper()
        if cmd == "AT":
            return OK
        if cmd == "ATE0":
            self.echo = False
            return OK
        if cmd == "ATE1":
            self.echo = True
            return OK
        if cmd.startswith("AT+CMGF="):
            m = _CMGF_RE.fullmatch(line.strip())
            if m and m.group(1) == "1":
                self.text_mode = True
                return OK
            return ERROR  # PDU mode (0) and junk are rejected alike
        if cmd.startswith("AT+CNMI="):
            self.cnmi_notify = True  # any parameter set counts as "on"
            return OK
        if cmd.startswith("AT+CPMS"):
            used = sum(1 for s in self.slots if s is not None)
            triple = f"{used},{STORAGE_CAPACITY}," * 3
            return _resp(f"+CPMS: {triple[:-1]}") + OK
        m = _CMGS_RE.fullmatch(line.strip())
        if m:
            if not self.text_mode:
                return cms_error(500)
            self._body = bytearray()
            self._body_recipient = m.group(1)
            return PROMPT
        if cmd.startswith("AT+CMGS"):
            return cms_error(500) if not self.text_mode else ERROR
        m = _CMGR_RE.fullmatch(line.strip())
        if m:
            return self._read_slot(int(m.group(1)))
        m = _CMGD_RE.fullmatch(line.strip())
        if m:
            return self._delete_slot(int(m.group(1)))
        return ERROR

    def _commit_sms(self, body: bytes, recipient: str, now: float) -> bytes:
        try:
            text = body.decode("ascii")
        except UnicodeDecodeError:
            return cms_error(500)
        # Bodies must stay single-line so CMGR framing is unambiguous.
        if len(text) > 160 or any(c in text for c in "\r\n\x1a"):
            return cms_error(500)
        self.outbox.append(
            SmsMessage(self.own_number, recipient, text, sent_at=now)
        )
        mr = self.next_mr
        self.next_mr = (self.next_mr + 1) % 256
        return _resp(f"+CMGS: {mr}") + OK

    def _read_slot(self, index: int) -> bytes:
        if not 1 <= index <= STORAGE_CAPACITY:
            return cms_error(321)
        slot = self.slots[index - 1]
        if slot is None:
            return cms_error(321)
        header = (
            f'+CMGR: "{slot.status}","{slot.message.sender}",,'
            f'"{render_timestamp(slot.message.sent_at)}"'
        )
        out = _resp(header) + slot.message.body.encode("ascii") + b"\r\n" + OK
        slot.status = "REC READ"
        return out

    def _delete_slot(self, index: int) -> bytes:
        if not 1 <= index <= STORAGE_CAPACITY:
            return cms_error(321)
        self.slots[index - 1] = None  # deleting an empty slot is a no-op
        return OK

    # -- network side -----------------------------------------------------

    def deliver(self, msg: SmsMessage) -> tuple[int | None, bytes]:
        """Store an inbound SMS in the lowest empty slot.

        Returns (slot index, unsolicited bytes).  A full store drops the
        message and returns (None, b""); the caller is responsible for
        logging the overflow.
        """
        for i, slot in enumerate(self.slots):
            if slot is None:
                self.slots[i] = SmsSlot(i + 1, "REC UNREAD", msg)
                notice = b""
                if self.cnmi_notify:
                    notice = _resp(f'+CMTI: "SM",{i + 1}')
                return i + 1, notice
        return None, b""
