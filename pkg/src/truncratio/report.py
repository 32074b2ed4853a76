"""Run reports and delimited trace files.

Reports are JSON: a config echo, a seed ledger, wall-clock time, and the
command-specific result, so every number in a report can be traced to an
explicit seed and reproduced.  Traces (ascent iterations, EM iterations)
go to CSV with full-precision floats; parsing an emitted file recovers
the trace bit for bit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict

import numpy as np

from .ascent import AscentTrace
from .estimator import ComparisonResult

__all__ = [
    "build_report",
    "write_json_report",
    "comparison_result_to_dict",
    "write_ascent_trace_csv",
    "read_ascent_trace_csv",
    "write_em_trace_csv",
    "read_em_trace_csv",
]


def _fmt(value: float) -> str:
    return repr(float(value))


def comparison_result_to_dict(result: ComparisonResult) -> dict:
    payload = {
        "decision": result.decision.value,
        "est1": asdict(result.est1),
        "est2": asdict(result.est2),
        "log_lr_estimate": result.log_lr_estimate,
        "log_lr_std_error": result.log_lr_std_error,
        "confidence": result.confidence,
        "samples_spent": result.samples_spent,
    }
    return payload


def build_report(command: str, version: str, config_echo: dict, seeds: dict,
                 result: dict, wall_clock_seconds: float, files: dict | None = None) -> dict:
    report = {
        "command": command,
        "artifact_version": version,
        "wall_clock_seconds": wall_clock_seconds,
        "config": config_echo,
        "seeds": seeds,
        "result": result,
    }
    if files:
        report["files"] = files
    return report


def write_json_report(path, report: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, allow_nan=True)
        handle.write("\n")


def _theta_columns(prefix: str, dim: int) -> list[str]:
    return [f"{prefix}_{i}" for i in range(dim)]


def write_ascent_trace_csv(path, trace: AscentTrace, model=None) -> None:
    """One row per ascent iteration; header always written.

    A trailing ``log_marginal_analytic`` column (the analytic log
    marginal at the row's starting theta) is included only when the
    model advertises that capability.
    """
    dim = trace.final_theta.size
    with_marginal = model is not None and model.capabilities.has_analytic_marginal
    header = (["iter"] + _theta_columns("theta", dim) + _theta_columns("proposed", dim)
              + ["decision", "scale", "accepted"])
    if with_marginal:
        header.append("log_marginal_analytic")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for record in trace.iterations:
            row = ([str(record.index)]
                   + [_fmt(v) for v in record.theta]
                   + [_fmt(v) for v in record.proposed]
                   + [record.decision.value, _fmt(record.scale),
                      "true" if record.accepted else "false"])
            if with_marginal:
                row.append(_fmt(model.log_marginal_analytic(record.theta)))
            writer.writerow(row)


def _vector_fields(raw: dict, prefix: str) -> list[float]:
    keys = [k for k in raw if k.startswith(prefix + "_")]
    keys.sort(key=lambda k: int(k.rsplit("_", 1)[1]))
    return [float(raw[k]) for k in keys]


def read_ascent_trace_csv(path) -> list[dict]:
    """Parse an emitted ascent trace back into typed row dicts."""
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for raw in reader:
            theta = _vector_fields(raw, "theta")
            proposed = _vector_fields(raw, "proposed")
            row = {
                "iter": int(raw["iter"]),
                "theta": np.array(theta),
                "proposed": np.array(proposed),
                "decision": raw["decision"],
                "scale": float(raw["scale"]),
                "accepted": raw["accepted"] == "true",
            }
            if "log_marginal_analytic" in raw:
                row["log_marginal_analytic"] = float(raw["log_marginal_analytic"])
            rows.append(row)
    return rows


def write_em_trace_csv(path, thetas, log_marginals) -> None:
    """One row per EM iterate, including the starting point as iter 0."""
    dim = len(thetas[0])
    header = ["iter"] + _theta_columns("theta", dim) + ["log_marginal"]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for index, (theta, log_marginal) in enumerate(zip(thetas, log_marginals)):
            writer.writerow([str(index)] + [_fmt(v) for v in theta]
                            + [_fmt(log_marginal)])


def read_em_trace_csv(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for raw in reader:
            theta = _vector_fields(raw, "theta")
            rows.append({
                "iter": int(raw["iter"]),
                "theta": np.array(theta),
                "log_marginal": float(raw["log_marginal"]),
            })
    return rows
