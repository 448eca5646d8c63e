"""Transcript records: the byte-stable observable output of a run."""

from __future__ import annotations

from dataclasses import dataclass

CHANNELS = ("SMS_OUT", "SMS_IN", "RELAY", "STATE", "SERIAL")


def fmt_time(t: float) -> str:
    """Whole seconds render without a decimal point; everything else as
    the float's shortest repr."""
    if t == int(t):
        return str(int(t))
    return repr(t)


@dataclass(frozen=True)
class TranscriptRecord:
    at: float
    channel: str
    detail: str

    def render(self) -> str:
        return f"t={fmt_time(self.at)} {self.channel} {self.detail}"


@dataclass
class Transcript:
    seed: int
    records: list[TranscriptRecord]
    pending_at_horizon: int = 0

    def render(self) -> str:
        lines = [f"# seed={self.seed}"]
        lines.extend(r.render() for r in self.records)
        return "\n".join(lines) + "\n"

    def channel(self, *channels: str) -> list[TranscriptRecord]:
        return [r for r in self.records if r.channel in channels]
