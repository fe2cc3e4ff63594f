"""Component parameter records and the bundled catalog data.

Catalog values ship as a versioned JSON data file; loaders return frozen
records. All quantities use the units named in the field suffixes (grams,
dollars, m/s, watts, Wh, seconds).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources


@dataclass(frozen=True)
class TaskProfile:
    """Mission demand: how many deliveries, how far, how often."""

    num_missions: float = 2000.0
    distance_m: float = 600.0
    frequency_hz: float = 0.004  # missions per second

    def __post_init__(self) -> None:
        if min(self.num_missions, self.distance_m, self.frequency_hz) < 0:
            raise ValueError("task profile fields must be non-negative")

    @property
    def required_velocity(self) -> float:
        """Minimum cruise speed: one mission of distance d every 1/f seconds."""
        return self.distance_m * self.frequency_hz

    @property
    def required_endurance_s(self) -> float:
        v = self.required_velocity
        if v == 0.0:
            return 0.0
        return self.distance_m / v


@dataclass(frozen=True)
class ActuatorSpec:
    name: str
    mass_g: float
    cost_usd: float
    max_velocity_m_s: float
    p0_w: float
    p1_w_per_n2: float

    def __post_init__(self) -> None:
        vals = (self.mass_g, self.cost_usd, self.max_velocity_m_s,
                self.p0_w, self.p1_w_per_n2)
        if any(v < 0 for v in vals):
            raise ValueError(f"actuator {self.name!r} has negative parameters")

    def power_w(self, lift_n: float) -> float:
        return self.p0_w + self.p1_w_per_n2 * lift_n * lift_n


@dataclass(frozen=True)
class BatteryTech:
    name: str
    energy_density_wh_per_kg: float
    wh_per_usd: float  # energy bought per dollar, as cataloged
    cycles: float

    def __post_init__(self) -> None:
        vals = (self.energy_density_wh_per_kg, self.wh_per_usd, self.cycles)
        if any(v <= 0 for v in vals):
            raise ValueError(f"battery tech {self.name!r} needs positive parameters")

    @property
    def usd_per_wh(self) -> float:
        return 1.0 / self.wh_per_usd


DEFAULT_TASK = TaskProfile()


def _load_raw(version: int) -> dict:
    path = resources.files("codp.uav").joinpath(f"data/components_v{version}.json")
    return json.loads(path.read_text(encoding="utf-8"))


def load_actuators(version: int = 1) -> tuple[ActuatorSpec, ...]:
    raw = _load_raw(version)
    return tuple(ActuatorSpec(r["name"], r["mass_g"], r["cost_usd"],
                              r["max_velocity_m_s"], r["p0_w"],
                              r["p1_w_per_n2"]) for r in raw["actuators"])


def load_battery_techs(version: int = 1) -> tuple[BatteryTech, ...]:
    raw = _load_raw(version)
    return tuple(BatteryTech(r["name"], r["energy_density_wh_per_kg"],
                             r["wh_per_usd"], float(r["cycles"]))
                 for r in raw["battery_technologies"])


def battery_tech(name: str, version: int = 1) -> BatteryTech:
    for t in load_battery_techs(version):
        if t.name == name:
            return t
    raise KeyError(f"unknown battery technology {name!r}")


def actuator(name: str, version: int = 1) -> ActuatorSpec:
    for a in load_actuators(version):
        if a.name == name:
            return a
    raise KeyError(f"unknown actuator {name!r}")


def with_fields(record, **updates):
    """Functional update helper for parameter records."""
    return replace(record, **updates)
