"""Monte Carlo and deterministic studies over the drone model.

All sampling is driven by explicit root seeds; per-draw seeds are derived
from (tech index, payload index, draw index) so results are independent of
scheduling and thread count. CSV and JSON renderings sort rows by
(tech, payload, seed) and format floats via repr, making outputs
byte-identical across runs.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ..dp import DesignProblem
from ..errors import TraceDivergenceError
from ..seeds import derive
from ..uncertainty.kernels import MarkovKernel
from .model import compose_uav, uav_kernel
from .specs import (DEFAULT_TASK, ActuatorSpec, BatteryTech, TaskProfile,
                    load_actuators, load_battery_techs)

DEFAULT_PAYLOAD_GRID = tuple(float(p) for p in range(0, 2001, 50))
DEFAULT_N_SAMPLES = 1000


@dataclass(frozen=True)
class UAVQueryRecord:
    """One solved draw: outcome of a payload query against a sampled design."""

    battery_tech: str
    payload_g: float
    seed: int
    feasible: bool
    min_cost_usd: float | None = None
    self_weight_g: float | None = None

    def __post_init__(self) -> None:
        if self.feasible:
            if self.min_cost_usd is None or self.self_weight_g is None:
                raise ValueError("feasible records need cost and weight")
            if self.min_cost_usd < 0 or self.self_weight_g < 0:
                raise ValueError("cost and weight must be non-negative")


def solve_record(dp: DesignProblem, tech: str, payload_g: float,
                 seed: int) -> UAVQueryRecord:
    """Query one payload; divergence or an empty front means infeasible."""
    try:
        front = dp.query(payload_g)
    except TraceDivergenceError:
        return UAVQueryRecord(tech, payload_g, seed, False)
    if not front:
        return UAVQueryRecord(tech, payload_g, seed, False)
    min_cost = min(cost for _w, cost in front.elements)
    weight = min(w for w, cost in front.elements if cost == min_cost)
    return UAVQueryRecord(tech, payload_g, seed, True, min_cost, weight)


def _study_kernel(uncertain: bool,
                  profile_dist: MarkovKernel | None,
                  actuators: Sequence[ActuatorSpec] | None,
                  trace_kwargs: Mapping[str, Any] | None) -> MarkovKernel:
    if uncertain:
        return uav_kernel(profile_dist, actuators=actuators,
                          trace_kwargs=trace_kwargs)
    return uav_kernel(profile_dist, actuators=actuators,
                      uncertain_actuator_fields=(),
                      uncertain_battery_fields=(),
                      trace_kwargs=trace_kwargs)


def cost_distribution(tech: str, payload_g: float, n: int, root_seed: int, *,
                      uncertain: bool = True,
                      profile_dist: MarkovKernel | None = None,
                      actuators: Sequence[ActuatorSpec] | None = None,
                      trace_kwargs: Mapping[str, Any] | None = None,
                      threads: int = 1,
                      ) -> tuple[list[UAVQueryRecord], dict]:
    """n independent draws at one (tech, payload) cell, plus a summary."""
    if n < 1:
        raise ValueError("need n >= 1 samples")
    kernel = _study_kernel(uncertain, profile_dist, actuators, trace_kwargs)

    def job(i: int) -> UAVQueryRecord:
        seed = derive(root_seed, i)
        return solve_record(kernel.draw(tech, seed), tech, payload_g, seed)

    records = _run_jobs(job, range(n), threads)
    return records, summarize(records, root_seed=root_seed)


def summarize(records: Sequence[UAVQueryRecord], *,
              root_seed: int | None = None) -> dict:
    """Empirical summary of one cell: mean, 5/50/95 quantiles, infeasibility."""
    costs = sorted(r.min_cost_usd for r in records if r.feasible)
    out: dict[str, Any] = {
        "tech": records[0].battery_tech if records else None,
        "payload_g": records[0].payload_g if records else None,
        "n": len(records),
        "feasible_count": len(costs),
        "infeasible_fraction": ((len(records) - len(costs)) / len(records)
                                if records else None),
    }
    if root_seed is not None:
        out["root_seed"] = root_seed
    if costs:
        arr = np.asarray(costs)
        out["mean_cost_usd"] = float(arr.mean())
        out["q05_cost_usd"] = float(np.percentile(arr, 5))
        out["q50_cost_usd"] = float(np.percentile(arr, 50))
        out["q95_cost_usd"] = float(np.percentile(arr, 95))
    else:
        out["mean_cost_usd"] = None
        out["q05_cost_usd"] = None
        out["q50_cost_usd"] = None
        out["q95_cost_usd"] = None
    return out


def payload_sweep(techs: Sequence[str], payload_grid: Sequence[float], n: int,
                  root_seed: int, *, uncertain: bool = True,
                  profile_dist: MarkovKernel | None = None,
                  actuators: Sequence[ActuatorSpec] | None = None,
                  trace_kwargs: Mapping[str, Any] | None = None,
                  threads: int = 1,
                  ) -> tuple[list[UAVQueryRecord], list[dict]]:
    """Grid study: n draws per (tech, payload) cell.

    Per-draw seeds depend only on (root_seed, tech index, payload index,
    draw index); the records come back sorted by (tech, payload, seed).
    """
    if not payload_grid:
        raise ValueError("payload grid must be non-empty")
    if n < 1:
        raise ValueError("need n >= 1 samples")
    kernel = _study_kernel(uncertain, profile_dist, actuators, trace_kwargs)
    jobs = [(ti, pi, i)
            for ti in range(len(techs))
            for pi in range(len(payload_grid))
            for i in range(n)]

    def job(spec: tuple[int, int, int]) -> UAVQueryRecord:
        ti, pi, i = spec
        seed = derive(root_seed, ti, pi, i)
        return solve_record(kernel.draw(techs[ti], seed),
                            techs[ti], float(payload_grid[pi]), seed)

    records = _run_jobs(job, jobs, threads)
    records.sort(key=lambda r: (r.battery_tech, r.payload_g, r.seed))
    summaries = []
    for tech in sorted(set(techs)):
        for payload in payload_grid:
            cell = [r for r in records
                    if r.battery_tech == tech and r.payload_g == float(payload)]
            summaries.append(summarize(cell, root_seed=root_seed))
    return records, summaries


def _run_jobs(job, specs: Iterable, threads: int) -> list:
    specs = list(specs)
    if threads <= 1:
        return [job(s) for s in specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, specs))


def deterministic_front(payload_grid: Sequence[float] = DEFAULT_PAYLOAD_GRID, *,
                        profile: TaskProfile = DEFAULT_TASK,
                        techs: Sequence[BatteryTech] | None = None,
                        actuators: Sequence[ActuatorSpec] | None = None,
                        trace_kwargs: Mapping[str, Any] | None = None,
                        ) -> list[dict]:
    """Cost-optimal battery technology per payload, deterministic parameters.

    One composite per technology, queried across the grid; each row carries
    the winning tech (ties broken by name) or feasible=False.
    """
    tech_list = tuple(techs if techs is not None else load_battery_techs())
    act_list = tuple(actuators if actuators is not None else load_actuators())
    composites = {t.name: compose_uav(profile, t, act_list,
                                      trace_kwargs=trace_kwargs)
                  for t in tech_list}
    rows = []
    for payload in payload_grid:
        best: tuple[float, str, float] | None = None
        for name in sorted(composites):
            rec = solve_record(composites[name], name, float(payload), 0)
            if not rec.feasible:
                continue
            key = (rec.min_cost_usd, name, rec.self_weight_g)
            if best is None or key < best:
                best = key
        if best is None:
            rows.append({"payload_g": float(payload), "feasible": False,
                         "tech": None, "min_cost_usd": None,
                         "self_weight_g": None})
        else:
            cost, name, weight = best
            rows.append({"payload_g": float(payload), "feasible": True,
                         "tech": name, "min_cost_usd": cost,
                         "self_weight_g": weight})
    return rows


# ---------------------------------------------------------------------------
# Deterministic text renderings

CSV_HEADER = "tech,payload_g,seed,feasible,min_cost_usd,self_weight_g"


def _csv_float(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def records_to_csv(records: Sequence[UAVQueryRecord]) -> str:
    rows = sorted(records, key=lambda r: (r.battery_tech, r.payload_g, r.seed))
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.battery_tech, _csv_float(r.payload_g), str(r.seed),
            "true" if r.feasible else "false",
            _csv_float(r.min_cost_usd), _csv_float(r.self_weight_g)]))
    return "\n".join(lines) + "\n"


def front_to_csv(rows: Sequence[dict]) -> str:
    lines = ["payload_g,feasible,tech,min_cost_usd,self_weight_g"]
    for r in rows:
        lines.append(",".join([
            _csv_float(r["payload_g"]), "true" if r["feasible"] else "false",
            r["tech"] or "", _csv_float(r["min_cost_usd"]),
            _csv_float(r["self_weight_g"])]))
    return "\n".join(lines) + "\n"


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
