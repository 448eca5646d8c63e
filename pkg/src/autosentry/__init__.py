"""Simulated GSM/GPS vehicle intrusion and theft control unit."""

from . import controller, nmea, vehicle
from .sim import SimConfig, Simulation, parse_scenario, run_scenario

__all__ = [
    "controller",
    "nmea",
    "vehicle",
    "SimConfig",
    "Simulation",
    "parse_scenario",
    "run_scenario",
]
