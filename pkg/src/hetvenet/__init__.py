"""Mobile-service based relay scheduling for heterogeneous vehicular networks."""

from hetvenet.channel import DSRC, LTE, LinkTech, RadioProfile
from hetvenet.mobility import Infrastructure, Scenario, VehicleState
from hetvenet.scheduler import EffectiveService, Schedule, Scheme
from hetvenet.service import AirSnapshot, ServiceTables

__all__ = [
    "AirSnapshot",
    "DSRC",
    "EffectiveService",
    "Infrastructure",
    "LTE",
    "LinkTech",
    "RadioProfile",
    "Scenario",
    "Schedule",
    "Scheme",
    "ServiceTables",
    "VehicleState",
]

__version__ = "0.1.0"
