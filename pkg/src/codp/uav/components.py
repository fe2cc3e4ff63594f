"""Component design problems for the delivery-drone study.

Carrier convention: a component's functionality and resource posets are
products over its ports in declared order, matching the diagram node
signatures in ``model.py``. All masses are grams, costs dollars, powers
watts, capacities Wh.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Sequence

from ..dp import DesignProblem, ImplementationSet, dp_from_mdpi, union
from ..posets import Antichain, NonNegReal, Product
from .specs import ActuatorSpec, BatteryTech, TaskProfile

GRAVITY = 9.81  # m/s^2

COUNT = NonNegReal("")
GRAMS = NonNegReal("g")
DOLLARS = NonNegReal("$")
WATTS = NonNegReal("W")
SECONDS = NonNegReal("s")
SPEED = NonNegReal("m/s")
NEWTONS = NonNegReal("N")
WATT_HOURS = NonNegReal("Wh")
PER_SECOND = NonNegReal("1/s")

DEFAULT_C0_W = 5.0
DEFAULT_C1_W_PER_M_S = 2.0


def lift_newtons(total_mass_g: float) -> float:
    """Hover lift for a rigid body of the given mass."""
    return total_mass_g * GRAVITY / 1000.0


def task_node_dp() -> DesignProblem:
    """Mission demand to per-flight requirements.

    (missions, distance, frequency) -> (num_missions, endurance, velocity)
    with velocity = distance * frequency and endurance = distance / velocity.
    A nonzero distance at zero frequency cannot be covered: infeasible.
    """
    fun = Product([COUNT, NonNegReal("m"), PER_SECOND])
    res = Product([COUNT, SECONDS, SPEED])

    def query_fn(f) -> Antichain:
        missions, distance, frequency = f
        velocity = distance * frequency
        if distance > 0 and velocity == 0.0:
            return Antichain(res, ())
        endurance = distance / velocity if velocity > 0 else 0.0
        return Antichain(res, ((missions, endurance, velocity),))

    return DesignProblem(fun, res, query_fn, name="task")


def task_management_dp(profile: TaskProfile) -> DesignProblem:
    """The task component pinned to one profile (one-point functionality)."""
    general = task_node_dp()
    fun = Product([])
    point = (profile.num_missions, profile.distance_m, profile.frequency_hz)

    def query_fn(_f) -> Antichain:
        return general.query(point)

    return DesignProblem(fun, general.res_poset, query_fn,
                         name=f"task[{profile.distance_m}m]")


def perception_dp(c0_w: float = DEFAULT_C0_W,
                  c1_w_per_m_s: float = DEFAULT_C1_W_PER_M_S) -> DesignProblem:
    """Fixed sensing stack; draw grows affinely with cruise speed."""
    if c0_w < 0 or c1_w_per_m_s < 0:
        raise ValueError("perception constants must be non-negative")
    fun = Product([SPEED])
    res = Product([WATTS])

    def query_fn(f) -> Antichain:
        (velocity,) = f
        return Antichain(res, ((c0_w + c1_w_per_m_s * velocity,),))

    return DesignProblem(fun, res, query_fn, name="perception")


def actuation_dp(a: ActuatorSpec) -> DesignProblem:
    """One motor: (velocity, lift N) -> (power, mass, cost).

    Demanding more velocity than the motor supports is infeasible, not an
    error; power follows p0 + p1 * F^2.
    """
    fun = Product([SPEED, NEWTONS])
    res = Product([WATTS, GRAMS, DOLLARS])

    def query_fn(f) -> Antichain:
        velocity, lift = f
        if velocity > a.max_velocity_m_s:
            return Antichain(res, ())
        return Antichain(res, ((a.power_w(lift), a.mass_g, a.cost_usd),))

    return DesignProblem(fun, res, query_fn, name=f"actuation[{a.name}]")


def _actuation_node_single(a: ActuatorSpec) -> DesignProblem:
    fun = Product([SPEED, GRAMS])
    res = Product([WATTS, GRAMS, DOLLARS])
    inner = actuation_dp(a)

    def query_fn(f) -> Antichain:
        velocity, total_mass = f
        return inner.query((velocity, lift_newtons(total_mass)))

    return DesignProblem(fun, res, query_fn, name=f"actuation-node[{a.name}]")


def actuation_node_dp(actuators: Sequence[ActuatorSpec]) -> DesignProblem:
    """Diagram-facing actuation: (velocity, total mass g) with free motor choice."""
    if not actuators:
        raise ValueError("need at least one actuator")
    return reduce(union, [_actuation_node_single(a) for a in actuators])


def battery_dp(t: BatteryTech, missions_required: float = 0.0) -> DesignProblem:
    """One technology: (capacity Wh, cycles) -> (mass g, total cost $).

    Cost covers the initial purchase plus replacements:
    purchases = max(1, ceil(max(cycles, missions_required) / t.cycles)).
    The constructor floor supports task-driven use where the mission count
    is fixed before capacity is known.
    """
    fun = Product([WATT_HOURS, COUNT])
    res = Product([GRAMS, DOLLARS])

    def query_fn(f) -> Antichain:
        capacity_wh, cycles = f
        demanded = max(cycles, missions_required)
        purchases = max(1, math.ceil(demanded / t.cycles))
        mass_g = capacity_wh / t.energy_density_wh_per_kg * 1000.0
        cost = capacity_wh * t.usd_per_wh * purchases
        return Antichain(res, ((mass_g, cost),))

    return DesignProblem(fun, res, query_fn, name=f"battery[{t.name}]")


def battery_node_dp(t: BatteryTech) -> DesignProblem:
    """Diagram-facing battery: sizes capacity from the power budget.

    (actuation power W, perception power W, endurance s, cycles)
    -> (mass g, total cost $), capacity = P_total * endurance / 3600.
    """
    fun = Product([WATTS, WATTS, SECONDS, COUNT])
    res = Product([GRAMS, DOLLARS])
    core = battery_dp(t)

    def query_fn(f) -> Antichain:
        act_power, perc_power, endurance, cycles = f
        capacity_wh = (act_power + perc_power) * endurance / 3600.0
        return core.query((capacity_wh, cycles))

    return DesignProblem(fun, res, query_fn, name=f"battery-node[{t.name}]")


def battery_choice_node_dp(techs: Iterable[BatteryTech]) -> DesignProblem:
    """Free choice among technologies (deterministic study front)."""
    parts = [battery_node_dp(t) for t in techs]
    if not parts:
        raise ValueError("need at least one battery technology")
    return reduce(union, parts)


def chassis_dp() -> DesignProblem:
    """Mass and cost bookkeeping.

    (payload, actuator mass, actuator cost, battery mass, battery cost)
    -> (total mass, self weight, lifetime cost); self weight excludes payload.
    """
    fun = Product([GRAMS, GRAMS, DOLLARS, GRAMS, DOLLARS])
    res = Product([GRAMS, GRAMS, DOLLARS])

    def query_fn(f) -> Antichain:
        payload, act_mass, act_cost, batt_mass, batt_cost = f
        self_weight = act_mass + batt_mass
        return Antichain(res, ((payload + self_weight, self_weight,
                                act_cost + batt_cost),))

    return DesignProblem(fun, res, query_fn, name="chassis")


def actuator_catalog_mdpi(actuators: Sequence[ActuatorSpec]) -> DesignProblem:
    """The motor catalog as an implementation set over plain velocity.

    Each motor provides its maximum velocity at (mass, cost); querying a
    demanded velocity returns the Pareto-minimal (mass, cost) pairs.
    """
    impls = ImplementationSet(
        SPEED, Product([GRAMS, DOLLARS]),
        tuple((a.name, a.max_velocity_m_s, (a.mass_g, a.cost_usd))
              for a in actuators))
    return dp_from_mdpi(impls, name="actuator-catalog")
