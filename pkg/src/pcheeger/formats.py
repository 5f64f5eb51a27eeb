"""JSON and CSV formats for graphs, domains, partitions, results and model specs.

Rationals are written as integers or ``"p/q"`` strings; floats are rounded
to 9 significant digits and infinities are written as ``"INF"``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .cheeger import CheegerResult
from .errors import InputError, InvalidSpec
from .exact import format_fraction, to_fraction
from .graph import DirichletDomain, WeightedGraph, build_domain
from .linear import ANTITREE, DEFAULT_HORIZON, TREE, Branching, ModelSpec
from .spectral import EigenPair
from .symmetry import VertexPartition

SIG_DIGITS = 9
BOUNDARY_ID = "__outside__"


def _rat(value) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


def tidy(obj: Any) -> Any:
    """Round floats for output; map infinities to ``"INF"`` and Fractions to exact text."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "INF" if x > 0 else "-INF"
        if math.isnan(x):
            return "NaN"
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): tidy(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [tidy(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [tidy(v) for v in obj.tolist()]
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(tidy(obj), indent=2, sort_keys=False)


# ---------------------------------------------------------------- graphs and domains


def graph_to_json(graph: WeightedGraph) -> dict:
    return {
        "vertices": [{"id": v, "nu": format_fraction(graph.nu[v])} for v in graph.vertices],
        "edges": [{"u": x, "v": y, "mu": format_fraction(w)} for x, y, w in graph.edges()],
    }


def graph_from_json(data: dict) -> WeightedGraph:
    try:
        nu = {str(v["id"]): _rat(v["nu"]) for v in data["vertices"]}
        if len(nu) != len(data["vertices"]):
            raise InputError("duplicate vertex ids")
        edges = [(str(e["u"]), str(e["v"]), _rat(e["mu"])) for e in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph JSON: missing {exc}") from None
    return WeightedGraph.from_edges(nu, edges)


def domain_from_json(data: dict) -> DirichletDomain:
    """Graph JSON plus ``"omega"``; without ``"omega"`` the whole vertex set is used."""
    graph = graph_from_json(data)
    omega = data.get("omega", list(graph.vertices))
    if not isinstance(omega, list):
        raise InputError('"omega" must be a list of vertex ids')
    return build_domain(graph, [str(v) for v in omega])


def domain_to_json(domain: DirichletDomain) -> dict:
    """Encode with one outside vertex carrying all boundary weights."""
    out_id = BOUNDARY_ID
    while out_id in domain.index:
        out_id += "_"
    vertices = [{"id": v, "nu": format_fraction(n)} for v, n in zip(domain.interior, domain.nu)]
    edges = [{"u": domain.interior[i], "v": domain.interior[j], "mu": format_fraction(w)} for i, j, w in domain.edges]
    bedges = [{"u": v, "v": out_id, "mu": format_fraction(b)} for v, b in zip(domain.interior, domain.boundary) if b]
    if bedges:
        vertices.append({"id": out_id, "nu": 1})
    return {"vertices": vertices, "edges": edges + bedges, "omega": list(domain.interior)}


# ---------------------------------------------------------------- partitions and results


def partition_from_json(data: dict) -> VertexPartition:
    try:
        cells = data["cells"]
    except (KeyError, TypeError):
        raise InputError('partition JSON needs "cells"') from None
    return VertexPartition.of(cells)


def partition_to_json(partition: VertexPartition) -> dict:
    return partition.as_dict()


def cheeger_from_json(data: dict) -> CheegerResult:
    return CheegerResult(
        h=_rat(data["h"]),
        cuts=tuple(tuple(str(v) for v in c) for c in data["cuts"]),
        subsets_examined=int(data["subsetsExamined"]),
    )


def cheeger_to_json(result: CheegerResult) -> dict:
    return result.as_dict()


def eigenpair_to_json(pair: EigenPair, domain: DirichletDomain) -> dict:
    return pair.as_dict(domain)


def eigenpair_from_json(data: dict, domain: DirichletDomain) -> EigenPair:
    u = np.array([float(data["u"][v]) for v in domain.interior])
    return EigenPair(
        p=float(data["p"]),
        lam=float(data["lambda"]),
        u=u,
        residual=float(data["residual"]),
        restarts_agreeing=0,
        certified=bool(data["certified"]),
    )


# ---------------------------------------------------------------- model specs


def model_from_json(data: dict) -> tuple[ModelSpec, int]:
    family = data.get("family")
    scheme = data.get("scheme", "physical")
    horizon = int(data.get("horizon", DEFAULT_HORIZON))
    if family == TREE:
        if "branching" not in data:
            raise InvalidSpec('tree spec needs "branching"')
        return ModelSpec(TREE, scheme, branching=Branching.parse(data["branching"])), horizon
    if family == ANTITREE:
        return ModelSpec(ANTITREE, scheme, order=data.get("order")), horizon
    raise InvalidSpec(f"unknown family {family!r}")


def model_to_json(spec: ModelSpec, horizon: int) -> dict:
    return spec.as_dict(horizon)


# ---------------------------------------------------------------- tables

TABLE_COLUMNS = ("h", "h_inf", "h_M", "h_inf_M", "h_N", "h_inf_N")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isinf(v):
        return "INF"
    return f"{float(v):.{SIG_DIGITS}g}"


def table_csv(rows) -> str:
    """CSV of model rows: label, the six constants, then their status flags."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", *TABLE_COLUMNS, *(f"{c}_status" for c in TABLE_COLUMNS)])
    for row in rows:
        writer.writerow(
            [row.label, *(_cell(row.values.get(c)) for c in TABLE_COLUMNS), *(row.statuses.get(c, "") for c in TABLE_COLUMNS)]
        )
    return buf.getvalue()


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from None
