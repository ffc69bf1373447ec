"""JSON instance/result files and CSV iteration tables.

Floats are written with ``repr``, the shortest string that reads back to
the same double, so files round-trip exactly and are byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, List, Sequence

from .minimizer import IterationLog, Solution
from .model import ExplicitGain, Instance, InterferenceReport, ModelError, Node, PathLoss, PowerAssignment, UnitDisk

LOG_COLUMNS = ("l", "comps_before", "comps_after", "h_size", "z_prime", "raw_max_weight")


class FormatError(ValueError):
    pass


def _check_keys(obj: Any, allowed: Sequence[str], required: Sequence[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise FormatError(f"{where}: unknown keys {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise FormatError(f"{where}: missing keys {missing}")


def _num(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{where}: expected a number, got {x!r}")
    return float(x)


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    sig = instance.signal
    if isinstance(sig, PathLoss):
        model = {"kind": "pathloss", "alpha": sig.alpha}
    elif isinstance(sig, ExplicitGain):
        model = {"kind": "gain", "gain": [list(row) for row in sig.gain]}
    else:
        model = {"kind": "unitdisk"}
    nodes = []
    for nd in instance.nodes:
        entry: Dict[str, Any] = {"id": nd.id}
        if nd.position is not None:
            entry["pos"] = list(nd.position)
        entry["xi_max"] = nd.xi_max
        nodes.append(entry)
    return {"beta": instance.beta_acc, "model": model, "nodes": nodes}


def instance_from_dict(doc: Any) -> Instance:
    _check_keys(doc, ("beta", "model", "nodes"), ("beta", "model", "nodes"), "instance")
    model = doc["model"]
    _check_keys(model, ("kind", "alpha", "gain"), ("kind",), "model")
    kind = model["kind"]
    if kind == "pathloss":
        if "gain" in model:
            raise FormatError("model: 'gain' not allowed for pathloss")
        signal = PathLoss(alpha=_num(model.get("alpha", 2.0), "model.alpha"))
    elif kind == "gain":
        if "alpha" in model or "gain" not in model:
            raise FormatError("model: kind 'gain' takes exactly a 'gain' matrix")
        rows = model["gain"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise FormatError("model.gain: expected a matrix")
        signal = ExplicitGain(gain=tuple(tuple(_num(v, "model.gain") for v in r) for r in rows))
    elif kind == "unitdisk":
        if "gain" in model or ("alpha" in model and _num(model["alpha"], "model.alpha") != 2.0):
            raise FormatError("model: unitdisk takes no gain and alpha fixed at 2")
        signal = UnitDisk()
    else:
        raise FormatError(f"model.kind: unknown kind {kind!r}")
    if not isinstance(doc["nodes"], list):
        raise FormatError("nodes: expected a list")
    nodes = []
    for k, nd in enumerate(doc["nodes"]):
        _check_keys(nd, ("id", "pos", "xi_max"), ("id", "xi_max"), f"nodes[{k}]")
        if not isinstance(nd["id"], int) or isinstance(nd["id"], bool):
            raise FormatError(f"nodes[{k}].id: expected an integer")
        pos = nd.get("pos")
        if pos is not None:
            if not isinstance(pos, list):
                raise FormatError(f"nodes[{k}].pos: expected a list")
            pos = tuple(_num(c, f"nodes[{k}].pos") for c in pos)
        nodes.append(Node(id=nd["id"], xi_max=_num(nd["xi_max"], f"nodes[{k}].xi_max"), position=pos))
    try:
        return Instance(nodes=tuple(nodes), signal=signal, beta_acc=_num(doc["beta"], "beta"))
    except ModelError as exc:
        raise FormatError(str(exc)) from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def read_instance(path: str) -> Instance:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return instance_from_dict(doc)


def write_instance(instance: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance_to_dict(instance)))


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _none_to_nan(x):
    return float("nan") if x is None else float(x)


def log_to_dict(lg: IterationLog) -> Dict[str, Any]:
    return {
        "l": lg.l,
        "components_before": lg.components_before,
        "components_after": lg.components_after,
        "h_size": lg.h_size,
        "z_prime": lg.z_prime,
        "sets_chosen": lg.sets_chosen,
        "normalized_max_weight": lg.normalized_max_weight,
        "raw_max_weight": lg.raw_max_weight,
        "w_max": lg.w_max,
        "bound": _finite_or_none(lg.bound),
        "initial_estimator": _finite_or_none(lg.initial_estimator),
        "estimator_trace": list(lg.estimator_trace),
        "chosen_edges": [list(e) for e in lg.chosen_edges],
    }


def log_from_dict(d: Dict[str, Any]) -> IterationLog:
    return IterationLog(
        l=d["l"],
        components_before=d["components_before"],
        components_after=d["components_after"],
        h_size=d["h_size"],
        z_prime=float(d["z_prime"]),
        sets_chosen=d["sets_chosen"],
        normalized_max_weight=float(d["normalized_max_weight"]),
        raw_max_weight=float(d["raw_max_weight"]),
        w_max=float(d["w_max"]),
        bound=float("inf") if d["bound"] is None else float(d["bound"]),
        initial_estimator=_none_to_nan(d["initial_estimator"]),
        estimator_trace=tuple(float(v) for v in d["estimator_trace"]),
        chosen_edges=tuple(tuple(e) for e in d["chosen_edges"]),
    )


def solution_to_dict(sol: Solution) -> Dict[str, Any]:
    doc = {
        "edges": [list(e) for e in sol.edges],
        "powers": list(sol.powers.xi),
        "interference": list(sol.report.per_node),
        "max_interference": sol.report.max,
        "iterations": [log_to_dict(lg) for lg in sol.logs],
    }
    if sol.opt_hint is not None:
        doc["opt_hint"] = sol.opt_hint
    return doc


def solution_from_dict(doc: Dict[str, Any]) -> Solution:
    _check_keys(
        doc,
        ("edges", "powers", "interference", "max_interference", "iterations", "opt_hint"),
        ("edges", "powers", "interference", "max_interference", "iterations"),
        "result",
    )
    return Solution(
        edges=tuple(tuple(e) for e in doc["edges"]),
        powers=PowerAssignment(tuple(doc["powers"])),
        report=InterferenceReport(per_node=tuple(float(v) for v in doc["interference"]), max=float(doc["max_interference"])),
        logs=tuple(log_from_dict(d) for d in doc["iterations"]),
        opt_hint=doc.get("opt_hint"),
    )


def write_result(sol: Solution, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(solution_to_dict(sol)))


def read_result(path: str) -> Solution:
    with open(path) as fh:
        return solution_from_dict(json.load(fh))


def fmt(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def log_rows(logs: Sequence[IterationLog]) -> List[List[str]]:
    return [
        [fmt(v) for v in (lg.l, lg.components_before, lg.components_after, lg.h_size, lg.z_prime, lg.raw_max_weight)]
        for lg in logs
    ]


def logs_csv(logs: Sequence[IterationLog]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_COLUMNS)
    w.writerows(log_rows(logs))
    return buf.getvalue()
