from .driver import (
    Clock,
    DriverError,
    LoopbackPort,
    ModemDriver,
    ModemError,
    ProtocolError,
    Timeout,
)
from .messages import SmsMessage, render_timestamp
from .modem import STORAGE_CAPACITY, SimModem, SmsSlot

__all__ = [
    "Clock",
    "DriverError",
    "LoopbackPort",
    "ModemDriver",
    "ModemError",
    "ProtocolError",
    "Timeout",
    "SmsMessage",
    "render_timestamp",
    "STORAGE_CAPACITY",
    "SimModem",
    "SmsSlot",
]
