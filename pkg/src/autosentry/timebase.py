"""Anchor between virtual seconds and calendar time.

Everything in the simulation counts decimal seconds from a fixed epoch
so rendered clock fields (SMS timestamps, NMEA time/date) are
deterministic.
"""

from datetime import datetime, timedelta

VIRTUAL_EPOCH = datetime(2024, 1, 1, 0, 0, 0)


def to_datetime(virtual_seconds: float) -> datetime:
    return VIRTUAL_EPOCH + timedelta(seconds=virtual_seconds)
