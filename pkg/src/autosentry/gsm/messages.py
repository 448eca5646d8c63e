"""SMS value types shared by the modem emulator and its driver."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from ..timebase import VIRTUAL_EPOCH, to_datetime

MAX_BODY_LEN = 160
CTRL_Z = b"\x1a"
ESC = b"\x1b"

_NUMBER_RE = re.compile(r"\+?\d{1,15}")


def is_valid_number(number: str) -> bool:
    return bool(_NUMBER_RE.fullmatch(number))


@dataclass(frozen=True)
class SmsMessage:
    """One text-mode SMS: the unit of owner <-> unit communication."""

    sender: str
    recipient: str
    body: str
    sent_at: float = 0.0

    def __post_init__(self) -> None:
        for number in (self.sender, self.recipient):
            if not is_valid_number(number):
                raise ValueError(f"bad phone number {number!r}")
        if len(self.body) > MAX_BODY_LEN:
            raise ValueError(f"body exceeds {MAX_BODY_LEN} characters")
        if "\x1a" in self.body or "\r" in self.body:
            raise ValueError("body may not contain Ctrl-Z or CR")


def render_timestamp(sent_at: float) -> str:
    """Virtual seconds -> the ``YY/MM/DD,hh:mm:ss+00`` form CMGR reports."""
    return to_datetime(sent_at).strftime("%y/%m/%d,%H:%M:%S+00")


def parse_timestamp(text: str) -> float:
    stamp = datetime.strptime(text, "%y/%m/%d,%H:%M:%S+00")
    return (stamp - VIRTUAL_EPOCH).total_seconds()
