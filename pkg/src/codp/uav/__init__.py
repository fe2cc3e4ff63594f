"""Task-driven delivery-drone co-design study."""

from .components import (DEFAULT_C0_W, DEFAULT_C1_W_PER_M_S, GRAVITY,
                         actuation_dp, actuation_node_dp,
                         actuator_catalog_mdpi, battery_choice_node_dp,
                         battery_dp, battery_node_dp, chassis_dp,
                         lift_newtons, perception_dp, task_management_dp,
                         task_node_dp)
from .model import (DEFAULT_UNCERTAIN_ACTUATOR_FIELDS,
                    DEFAULT_UNCERTAIN_BATTERY_FIELDS, Z90, compose_uav,
                    draw_record, gaussian_param_kernel, uav_ast, uav_kernel,
                    uav_registry)
from .specs import (DEFAULT_TASK, ActuatorSpec, BatteryTech, TaskProfile,
                    actuator, battery_tech, load_actuators,
                    load_battery_techs, with_fields)
from .study import (CSV_HEADER, DEFAULT_N_SAMPLES, DEFAULT_PAYLOAD_GRID,
                    UAVQueryRecord, cost_distribution, deterministic_front,
                    front_to_csv, payload_sweep, records_to_csv,
                    solve_record, summarize, to_json)

__all__ = [
    "DEFAULT_C0_W", "DEFAULT_C1_W_PER_M_S", "GRAVITY",
    "actuation_dp", "actuation_node_dp", "actuator_catalog_mdpi",
    "battery_choice_node_dp", "battery_dp", "battery_node_dp", "chassis_dp",
    "lift_newtons", "perception_dp", "task_management_dp", "task_node_dp",
    "DEFAULT_UNCERTAIN_ACTUATOR_FIELDS", "DEFAULT_UNCERTAIN_BATTERY_FIELDS",
    "Z90", "compose_uav", "draw_record", "gaussian_param_kernel", "uav_ast",
    "uav_kernel", "uav_registry",
    "DEFAULT_TASK", "ActuatorSpec", "BatteryTech", "TaskProfile", "actuator",
    "battery_tech", "load_actuators", "load_battery_techs", "with_fields",
    "CSV_HEADER", "DEFAULT_N_SAMPLES", "DEFAULT_PAYLOAD_GRID",
    "UAVQueryRecord", "cost_distribution", "deterministic_front",
    "front_to_csv", "payload_sweep", "records_to_csv", "solve_record",
    "summarize", "to_json",
]
