from .engine import DEFAULT_ORIGIN, DEFAULT_WHITELIST, SimConfig, Simulation, run_scenario
from .rng import SplitMix64
from .scenario import ScenarioEvent, ScenarioParseError, parse_scenario
from .transcript import Transcript, TranscriptRecord, fmt_time

__all__ = [
    "DEFAULT_ORIGIN",
    "DEFAULT_WHITELIST",
    "SimConfig",
    "Simulation",
    "run_scenario",
    "SplitMix64",
    "ScenarioEvent",
    "ScenarioParseError",
    "parse_scenario",
    "Transcript",
    "TranscriptRecord",
    "fmt_time",
]
