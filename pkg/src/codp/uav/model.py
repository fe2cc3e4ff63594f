"""Drone co-design model: diagram, composed problem, parameter kernels.

The composite is built by elaborating a five-node diagram (task, perception,
actuation, battery, chassis) whose single feedback edge carries total mass
back into actuation; the closed problem maps payload (g) to Pareto-minimal
(self weight g, lifetime cost $) pairs.

Seed streams: a composite draw at seed s uses child 0 for the task profile,
child 1 for battery parameters, and children 2+i for actuator i, so
component draws stay independent and reproducible.
"""

from __future__ import annotations

import dataclasses
from functools import lru_cache
from typing import Any, Mapping, Sequence

from ..diagram.ast import (DiagramAST, EdgeDecl, NodeDecl, ParamDecl,
                           PortDecl, QueryDecl)
from ..diagram.elaborate import Registry, elaborate, evaluate
from ..dp import DesignProblem, union
from ..errors import TraceDivergenceError
from ..posets import Antichain, Product
from ..seeds import derive, rng
from ..uncertainty.kernels import (DPSpace, FiniteSpace, MarkovKernel,
                                   RecordSpace, UNIT_SPACE)
from .components import (DEFAULT_C0_W, DEFAULT_C1_W_PER_M_S, DOLLARS, GRAMS,
                         actuation_node_dp, battery_choice_node_dp,
                         battery_node_dp, chassis_dp, perception_dp,
                         task_management_dp, task_node_dp)
from .specs import (DEFAULT_TASK, ActuatorSpec, BatteryTech, TaskProfile,
                    battery_tech, load_actuators, load_battery_techs)

Z90 = 1.6449  # two-sided 90% standard-normal quantile used for +/-5% calibration

DEFAULT_UNCERTAIN_ACTUATOR_FIELDS = ("p0_w", "p1_w_per_n2")
DEFAULT_UNCERTAIN_BATTERY_FIELDS = ("energy_density_wh_per_kg", "wh_per_usd")

_TASK_FUN_PORTS = (PortDecl("missions", "real()"),
                   PortDecl("distance", "real(m)"),
                   PortDecl("frequency", "real(1/s)"))


def uav_ast(task_external: bool = True,
            with_params: bool = True) -> DiagramAST:
    """The drone interconnection diagram.

    With ``task_external`` the mission demand ports stay open (the shipped
    fixture form); otherwise the task node is a closed source and payload is
    the only external functionality.
    """
    nodes = [
        NodeDecl("task", "uav_task",
                 _TASK_FUN_PORTS if task_external else (),
                 (PortDecl("num_missions", "real()"),
                  PortDecl("endurance", "real(s)"),
                  PortDecl("velocity", "real(m/s)"))),
        NodeDecl("perception", "uav_perception",
                 (PortDecl("velocity", "real(m/s)"),),
                 (PortDecl("power", "real(W)"),)),
        NodeDecl("actuation", "uav_actuation",
                 (PortDecl("velocity", "real(m/s)"),
                  PortDecl("total_mass", "real(g)")),
                 (PortDecl("power", "real(W)"),
                  PortDecl("mass", "real(g)"),
                  PortDecl("cost", "real($)"))),
        NodeDecl("battery", "uav_battery",
                 (PortDecl("act_power", "real(W)"),
                  PortDecl("perc_power", "real(W)"),
                  PortDecl("endurance", "real(s)"),
                  PortDecl("cycles", "real()")),
                 (PortDecl("mass", "real(g)"),
                  PortDecl("cost", "real($)"))),
        NodeDecl("chassis", "uav_chassis",
                 (PortDecl("payload", "real(g)"),
                  PortDecl("act_mass", "real(g)"),
                  PortDecl("act_cost", "real($)"),
                  PortDecl("batt_mass", "real(g)"),
                  PortDecl("batt_cost", "real($)")),
                 (PortDecl("total_mass", "real(g)"),
                  PortDecl("self_weight", "real(g)"),
                  PortDecl("lifetime_cost", "real($)"))),
    ]
    edges = [
        EdgeDecl("task", "velocity", "perception", "velocity"),
        EdgeDecl("task", "velocity", "actuation", "velocity"),
        EdgeDecl("task", "endurance", "battery", "endurance"),
        EdgeDecl("task", "num_missions", "battery", "cycles"),
        EdgeDecl("actuation", "power", "battery", "act_power"),
        EdgeDecl("actuation", "mass", "chassis", "act_mass"),
        EdgeDecl("actuation", "cost", "chassis", "act_cost"),
        EdgeDecl("battery", "mass", "chassis", "batt_mass"),
        EdgeDecl("battery", "cost", "chassis", "batt_cost"),
        EdgeDecl("perception", "power", "battery", "perc_power"),
    ]
    loops = [EdgeDecl("chassis", "total_mass", "actuation", "total_mass")]
    params = []
    if with_params:
        techs = tuple(t.name for t in load_battery_techs())
        params = [
            ParamDecl("battery_tech", f"finite({','.join(techs)})", "kernel",
                      "uav_battery_kernel", ("battery",)),
            ParamDecl("actuator_set", "finite(catalog)", "kernel",
                      "uav_actuation_kernel", ("actuation",)),
        ]
    queries = []
    if task_external:
        task_points = (
            ("task.distance", float(DEFAULT_TASK.distance_m)),
            ("task.frequency", float(DEFAULT_TASK.frequency_hz)),
            ("task.missions", float(DEFAULT_TASK.num_missions)),
        )
        queries = [
            QueryDecl("default", (("chassis.payload", 1300.0),) + task_points),
            QueryDecl("light", (("chassis.payload", 500.0),) + task_points),
        ]
    return DiagramAST(nodes, edges, loops, params, queries)


def draw_record(base: Any, uncertain_fields: Sequence[str], seed: int) -> Any:
    """Perturb the named fields of a parameter record.

    Each field is drawn independently from a Gaussian centered on its
    cataloged value with sigma = 0.05 * mean / Z90 (so the two-sided 90%
    interval spans +/-5% of the mean), clamped below at zero. No fields
    means the record passes through untouched, with no randomness consumed.
    """
    if not uncertain_fields:
        return base
    updates = {}
    gen = rng(seed)
    for field in uncertain_fields:
        mean = getattr(base, field)
        if mean <= 0:
            raise ValueError(
                f"field {field!r} must be positive to perturb, got {mean}")
        sigma = 0.05 * mean / Z90
        updates[field] = max(0.0, float(gen.normal(mean, sigma)))
    return dataclasses.replace(base, **updates)


def gaussian_param_kernel(base: Any,
                          uncertain_fields: Sequence[str]) -> MarkovKernel:
    """Kernel over a parameter record; see :func:`draw_record`."""
    for field in uncertain_fields:
        if getattr(base, field) <= 0:
            raise ValueError(f"field {field!r} must be positive to perturb")
    fields = tuple(uncertain_fields)

    def draw_fn(_x: Any, seed: int) -> Any:
        return draw_record(base, fields, seed)

    return MarkovKernel(UNIT_SPACE, RecordSpace(type(base)), draw_fn,
                        name=f"gauss[{type(base).__name__}]")


@lru_cache(maxsize=1)
def _closed_uav_elaboration():
    # The closed diagram's structure is fixed; only node bindings vary, so
    # Monte Carlo draws can share one elaboration.
    ast = uav_ast(task_external=False, with_params=False)
    return elaborate(ast, Registry())


def _divergence_is_infeasible(dp: DesignProblem) -> DesignProblem:
    # One alternative whose mass loop diverges is simply not a viable choice;
    # mapping that outcome to the empty front lets the union keep whatever
    # the other alternatives offer.
    empty = Antichain(dp.res_poset, ())

    def query_fn(f: Any) -> Antichain:
        try:
            return dp._query_trusted(f)
        except TraceDivergenceError:
            return empty

    return DesignProblem(dp.fun_poset, dp.res_poset, query_fn, name=dp.name)


def compose_uav(profile: TaskProfile, battery: BatteryTech,
                actuators: Sequence[ActuatorSpec], *,
                c0_w: float = DEFAULT_C0_W,
                c1_w_per_m_s: float = DEFAULT_C1_W_PER_M_S,
                trace_kwargs: Mapping[str, Any] | None = None) -> DesignProblem:
    """Close the full drone problem for one battery technology.

    Payload (g) in, Pareto-minimal (self weight g, lifetime cost $) out.
    An empty front means no actuator choice closes the mass loop: each
    alternative is either infeasible outright or its loop iteration diverges.

    Free choice commutes with closing the feedback loop, so the composite is
    built as the union over actuators of single-actuator closures. Each mass
    iteration then follows one trajectory instead of a mixed antichain, which
    keeps real-valued iterates free of tolerance-scale near-duplicates.
    """
    if not actuators:
        raise ValueError("need at least one actuator")
    elab = _closed_uav_elaboration()
    shared = {
        "uav_task": task_management_dp(profile),
        "uav_perception": perception_dp(c0_w, c1_w_per_m_s),
        "uav_battery": battery_node_dp(battery),
        "uav_chassis": chassis_dp(),
    }
    branches = []
    for act in actuators:
        registry = Registry(problems=dict(
            shared, uav_actuation=actuation_node_dp((act,))))
        branches.append(_divergence_is_infeasible(
            evaluate(elab, registry, trace_kwargs=trace_kwargs)))
    closed = branches[0]
    for branch in branches[1:]:
        closed = union(closed, branch)
    return closed


def uav_registry(*, profile_fixed: TaskProfile | None = None,
                 actuators: Sequence[ActuatorSpec] | None = None,
                 techs: Sequence[BatteryTech] | None = None,
                 c0_w: float = DEFAULT_C0_W,
                 c1_w_per_m_s: float = DEFAULT_C1_W_PER_M_S,
                 uncertain_actuator_fields: Sequence[str] = DEFAULT_UNCERTAIN_ACTUATOR_FIELDS,
                 uncertain_battery_fields: Sequence[str] = DEFAULT_UNCERTAIN_BATTERY_FIELDS,
                 ) -> Registry:
    """Bindings for the shipped diagram.

    Deterministic solves bind actuation to a free choice over the catalog
    and battery to a free choice over all technologies; the two parameter
    kernels sample per-draw component parameters instead (battery tech is
    the kernel's argument, the actuator is chosen after sampling).
    """
    acts = tuple(actuators if actuators is not None else load_actuators())
    tech_list = tuple(techs if techs is not None else load_battery_techs())
    by_name = {t.name: t for t in tech_list}

    task = (task_management_dp(profile_fixed) if profile_fixed is not None
            else task_node_dp())

    def battery_draw(tech_name: str, seed: int) -> DesignProblem:
        drawn = draw_record(by_name[tech_name], uncertain_battery_fields, seed)
        return battery_node_dp(drawn)

    def actuation_draw(_label: str, seed: int) -> DesignProblem:
        drawn = [draw_record(a, uncertain_actuator_fields, derive(seed, i))
                 for i, a in enumerate(acts)]
        return actuation_node_dp(drawn)

    sample_battery = battery_node_dp(tech_list[0])
    sample_actuation = actuation_node_dp(acts)
    kernels = {
        "uav_battery_kernel": MarkovKernel(
            FiniteSpace(tuple(sorted(by_name))),
            DPSpace(sample_battery.fun_poset, sample_battery.res_poset),
            battery_draw, name="battery-params"),
        "uav_actuation_kernel": MarkovKernel(
            FiniteSpace(("catalog",)),
            DPSpace(sample_actuation.fun_poset, sample_actuation.res_poset),
            actuation_draw, name="actuation-params"),
    }
    return Registry(
        problems={
            "uav_task": task,
            "uav_perception": perception_dp(c0_w, c1_w_per_m_s),
            "uav_actuation": sample_actuation,
            "uav_battery": battery_choice_node_dp(tech_list),
            "uav_chassis": chassis_dp(),
        },
        kernels=kernels,
    )


def uav_kernel(profile_dist: MarkovKernel | None = None, *,
               actuators: Sequence[ActuatorSpec] | None = None,
               c0_w: float = DEFAULT_C0_W,
               c1_w_per_m_s: float = DEFAULT_C1_W_PER_M_S,
               uncertain_actuator_fields: Sequence[str] = DEFAULT_UNCERTAIN_ACTUATOR_FIELDS,
               uncertain_battery_fields: Sequence[str] = DEFAULT_UNCERTAIN_BATTERY_FIELDS,
               trace_kwargs: Mapping[str, Any] | None = None) -> MarkovKernel:
    """Battery technology in, closed drone design problem out.

    Battery parameters are drawn for the given technology (the choice is
    made before sampling); all actuators are drawn and the free choice among
    them stays inside the composed problem, i.e. it is made per draw, after
    parameter values are known. ``profile_dist`` may randomize the task
    profile; None fixes the default profile.
    """
    acts = tuple(actuators if actuators is not None else load_actuators())
    techs = load_battery_techs()
    by_name = {t.name: t for t in techs}
    domain = FiniteSpace(tuple(sorted(by_name)))
    codomain = DPSpace(GRAMS, Product([GRAMS, DOLLARS]))

    def draw_fn(tech_name: str, seed: int) -> DesignProblem:
        if profile_dist is None:
            profile = DEFAULT_TASK
        else:
            profile = profile_dist.draw((), derive(seed, 0))
        drawn_tech = draw_record(by_name[tech_name], uncertain_battery_fields,
                                 derive(seed, 1))
        drawn_acts = [draw_record(a, uncertain_actuator_fields, derive(seed, 2 + i))
                      for i, a in enumerate(acts)]
        return compose_uav(profile, drawn_tech, drawn_acts, c0_w=c0_w,
                           c1_w_per_m_s=c1_w_per_m_s, trace_kwargs=trace_kwargs)

    return MarkovKernel(domain, codomain, draw_fn, name="uav")
