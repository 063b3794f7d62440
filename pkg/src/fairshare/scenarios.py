"""Scenario files: schema validation, parsing, and game construction.

A scenario is a JSON object selecting one of the bundled value models plus
its parameters and the solution method(s) to run:

    {"model": "single", "params": {"n": 3, "k": 2, "rho": 1.0},
     "method": "all", "sample": {"permutations": 20000, "seed": 0}}

`validate_scenario_data` reports every violation it can find rather than
stopping at the first, so a file can be fixed in one pass.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fairshare.core import Allocation, CoalitionGame
from fairshare.geo import (
    DiskCensus,
    geo_founder_game,
    geo_founder_shapley,
    geo_game,
    geo_shapley,
    region_census,
)
from fairshare.models import (
    ProfitCssParams,
    ShareReport,
    SingleCssParams,
    WeightedCssParams,
    closed_profit,
    closed_single,
    closed_weighted,
    profit_game,
    single_game,
    weighted_game,
)
from fairshare.oligopoly import (
    OligopolyGraph,
    coarse_game,
    fine_game,
    shapley_coarse,
    shapley_fine_closed,
)

MODELS = ("single", "weighted", "profit", "oligopoly_coarse", "oligopoly_fine",
          "geo", "geo_founder")
METHODS = ("closed", "exact", "sample", "all")
GEO_VARIANTS = ("lin", "met")

DEFAULT_PERMUTATIONS = 20_000


class ScenarioError(ValueError):
    """A scenario failed validation; `errors` lists every violation found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class SampleConfig:
    permutations: int = DEFAULT_PERMUTATIONS
    seed: int = 0


@dataclass(frozen=True)
class GeoParams:
    census: DiskCensus
    variant: str
    rho: float = 1.0


@dataclass(frozen=True)
class Scenario:
    model: str
    params: Any
    method: str = "closed"
    sample: SampleConfig | None = None
    label: str = ""


# --- field-level validators ----------------------------------------------------

def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x: Any) -> bool:
    return _is_int(x) or isinstance(x, float)


def _check_int(params: dict, key: str, errors: list[str], *, prefix: str,
               minimum: int | None = None, required: bool = True,
               default: int | None = None) -> int | None:
    if key not in params:
        if required:
            errors.append(f"{prefix}.{key}: missing required field")
        return default
    value = params[key]
    if not _is_int(value):
        errors.append(f"{prefix}.{key}: expected an integer, got {value!r}")
        return default
    if minimum is not None and value < minimum:
        errors.append(f"{prefix}.{key}: must be >= {minimum}, got {value}")
        return default
    return value


def _check_num(params: dict, key: str, errors: list[str], *, prefix: str,
               default: float | None = None, positive: bool = False,
               nonnegative: bool = False) -> float | None:
    if key not in params:
        return default
    value = params[key]
    if not _is_num(value):
        errors.append(f"{prefix}.{key}: expected a number, got {value!r}")
        return default
    if positive and value <= 0:
        errors.append(f"{prefix}.{key}: must be positive, got {value}")
        return default
    if nonnegative and value < 0:
        errors.append(f"{prefix}.{key}: must be nonnegative, got {value}")
        return default
    return float(value)


def _check_keys(obj: dict, allowed: tuple[str, ...], errors: list[str],
                prefix: str) -> None:
    for key in obj:
        if key not in allowed:
            errors.append(f"{prefix}.{key}: unknown field")


def _validate_single(params: dict, errors: list[str], prefix: str) -> None:
    _check_keys(params, ("n", "k", "rho"), errors, prefix)
    _check_int(params, "n", errors, prefix=prefix, minimum=1)
    _check_int(params, "k", errors, prefix=prefix, minimum=1)
    _check_num(params, "rho", errors, prefix=prefix, positive=True)


def _validate_weighted(params: dict, errors: list[str], prefix: str,
                       method: str) -> None:
    _check_keys(params, ("weights", "alpha", "rho", "k"), errors, prefix)
    weights = params.get("weights")
    if weights is None:
        errors.append(f"{prefix}.weights: missing required field")
    elif not isinstance(weights, list) or not weights:
        errors.append(f"{prefix}.weights: expected a nonempty list of numbers")
    else:
        bad = [w for w in weights if not _is_num(w) or w < 0]
        if bad:
            errors.append(f"{prefix}.weights: entries must be nonnegative numbers")
        elif not any(w > 0 for w in weights):
            errors.append(f"{prefix}.weights: at least one weight must be positive")
    _check_num(params, "alpha", errors, prefix=prefix, positive=True)
    _check_num(params, "rho", errors, prefix=prefix, positive=True)
    k = _check_int(params, "k", errors, prefix=prefix, minimum=1,
                   required=False, default=2)
    if k is not None and k != 2 and method in ("closed", "all"):
        errors.append(
            f"{prefix}.k: the weighted closed form requires k=2 (got {k}); "
            "use method 'exact' or 'sample'")


def _validate_profit(params: dict, errors: list[str], prefix: str) -> None:
    _check_keys(params, ("n", "k", "rho", "founder_cost", "member_cost"),
                errors, prefix)
    _check_int(params, "n", errors, prefix=prefix, minimum=1)
    _check_int(params, "k", errors, prefix=prefix, minimum=1)
    _check_num(params, "rho", errors, prefix=prefix, positive=True)
    _check_num(params, "founder_cost", errors, prefix=prefix, nonnegative=True)
    _check_num(params, "member_cost", errors, prefix=prefix, nonnegative=True)


def _validate_graph(params: dict, errors: list[str], prefix: str) -> None:
    _check_keys(params, ("vertices", "edges", "rho"), errors, prefix)
    vertices = params.get("vertices")
    ids: set[str] = set()
    if vertices is None:
        errors.append(f"{prefix}.vertices: missing required field")
    elif not isinstance(vertices, list) or not vertices:
        errors.append(f"{prefix}.vertices: expected a nonempty list")
    else:
        for pos, vertex in enumerate(vertices):
            where = f"{prefix}.vertices[{pos}]"
            if not isinstance(vertex, dict):
                errors.append(f"{where}: expected an object with id and size")
                continue
            _check_keys(vertex, ("id", "size"), errors, where)
            vid = vertex.get("id")
            if not isinstance(vid, str) or not vid:
                errors.append(f"{where}.id: expected a nonempty string")
            elif vid in ids:
                errors.append(f"{where}.id: duplicate vertex id {vid!r}")
            else:
                ids.add(vid)
            _check_int(vertex, "size", errors, prefix=where, minimum=0)
    edges = params.get("edges", [])
    if not isinstance(edges, list):
        errors.append(f"{prefix}.edges: expected a list of [id, id] pairs")
        edges = []
    seen_edges: set[frozenset[str]] = set()
    for pos, edge in enumerate(edges):
        where = f"{prefix}.edges[{pos}]"
        if (not isinstance(edge, list) or len(edge) != 2
                or not all(isinstance(v, str) for v in edge)):
            errors.append(f"{where}: expected a pair of vertex ids")
            continue
        a, b = edge
        for endpoint in (a, b):
            if ids and endpoint not in ids:
                errors.append(
                    f"{where}: edge [{a!r}, {b!r}] references unknown vertex "
                    f"{endpoint!r}")
        if a == b:
            errors.append(f"{where}: self-loop on {a!r}")
        elif frozenset((a, b)) in seen_edges:
            errors.append(f"{where}: duplicate agreement [{a!r}, {b!r}]")
        else:
            seen_edges.add(frozenset((a, b)))
    _check_num(params, "rho", errors, prefix=prefix, positive=True)


def _validate_census(census: Any, errors: list[str], prefix: str) -> None:
    if not isinstance(census, dict):
        errors.append(f"{prefix}: expected an object")
        return
    _check_keys(census, ("m", "d", "placements"), errors, prefix)
    m = _check_int(census, "m", errors, prefix=prefix, minimum=1)
    has_d = "d" in census
    has_placements = "placements" in census
    if has_d == has_placements:
        errors.append(f"{prefix}: provide exactly one of 'd' or 'placements'")
        return
    if has_d:
        table = census["d"]
        if not isinstance(table, dict):
            errors.append(f"{prefix}.d: expected an object keyed by agent subsets")
            return
        for key, count in table.items():
            where = f"{prefix}.d[{key!r}]"
            ids = _parse_subset_key(key)
            if ids is None:
                errors.append(
                    f"{where}: keys must be comma-joined agent ids like '1,3'")
            elif m is not None and any(not 1 <= i <= m for i in ids):
                errors.append(f"{where}: agent ids must lie in 1..{m}")
            if not _is_int(count) or count < 0:
                errors.append(f"{where}: expected a nonnegative integer count")
    else:
        placements = census["placements"]
        if not isinstance(placements, list):
            errors.append(f"{prefix}.placements: expected a list of disk-id lists")
            return
        for pos, placement in enumerate(placements):
            where = f"{prefix}.placements[{pos}]"
            if not isinstance(placement, list) or \
                    not all(_is_int(i) for i in placement):
                errors.append(f"{where}: expected a list of integer disk ids")
            elif m is not None and any(not 1 <= i <= m for i in placement):
                errors.append(f"{where}: disk ids must lie in 1..{m}")


def _parse_subset_key(key: Any) -> tuple[int, ...] | None:
    if not isinstance(key, str):
        return None
    try:
        ids = tuple(int(part) for part in key.split(","))
    except ValueError:
        return None
    if not ids or len(set(ids)) != len(ids):
        return None
    return ids


def _validate_geo(params: dict, errors: list[str], prefix: str) -> None:
    _check_keys(params, ("census", "variant", "rho"), errors, prefix)
    if "census" not in params:
        errors.append(f"{prefix}.census: missing required field")
    else:
        _validate_census(params["census"], errors, f"{prefix}.census")
    variant = params.get("variant")
    if variant is None:
        errors.append(f"{prefix}.variant: missing required field")
    elif variant not in GEO_VARIANTS:
        errors.append(
            f"{prefix}.variant: expected one of {list(GEO_VARIANTS)}, got {variant!r}")
    _check_num(params, "rho", errors, prefix=prefix, positive=True)


def validate_scenario_data(data: Any) -> list[str]:
    """Collect every schema or invariant violation in a scenario object."""
    if not isinstance(data, dict):
        return ["scenario: expected a JSON object"]
    errors: list[str] = []
    _check_keys(data, ("model", "params", "method", "sample", "label"),
                errors, "scenario")
    model = data.get("model")
    if model is None:
        errors.append("model: missing required field")
    elif model not in MODELS:
        errors.append(f"model: expected one of {list(MODELS)}, got {model!r}")
    method = data.get("method", "closed")
    if method not in METHODS:
        errors.append(f"method: expected one of {list(METHODS)}, got {method!r}")
        method = "closed"
    label = data.get("label", "")
    if not isinstance(label, str):
        errors.append("label: expected a string")
    sample = data.get("sample")
    if sample is not None:
        if not isinstance(sample, dict):
            errors.append("sample: expected an object")
        else:
            _check_keys(sample, ("permutations", "seed"), errors, "sample")
            _check_int(sample, "permutations", errors, prefix="sample",
                       minimum=1, required=False)
            _check_int(sample, "seed", errors, prefix="sample", required=False)
    params = data.get("params")
    if params is None:
        errors.append("params: missing required field")
    elif not isinstance(params, dict):
        errors.append("params: expected an object")
    elif model in MODELS:
        validator = {
            "single": _validate_single,
            "profit": _validate_profit,
            "oligopoly_coarse": _validate_graph,
            "oligopoly_fine": _validate_graph,
            "geo": _validate_geo,
            "geo_founder": _validate_geo,
        }
        if model == "weighted":
            _validate_weighted(params, errors, "params", method)
        else:
            validator[model](params, errors, "params")
    return errors


# --- parsing --------------------------------------------------------------------

def _parse_census(census: dict) -> DiskCensus:
    m = census["m"]
    if "placements" in census:
        return region_census(census["placements"], m)
    counts = {frozenset(_parse_subset_key(key)): count
              for key, count in census["d"].items()}
    return DiskCensus(m, counts)


def parse_scenario(data: Any) -> Scenario:
    """Validate and build a typed Scenario; raises ScenarioError on any problem."""
    errors = validate_scenario_data(data)
    if errors:
        raise ScenarioError(errors)
    model = data["model"]
    raw = data["params"]
    params: Any
    if model == "single":
        params = SingleCssParams(raw["n"], raw["k"], raw.get("rho", 1.0))
    elif model == "weighted":
        params = WeightedCssParams(tuple(raw["weights"]), raw.get("alpha", 1.0),
                                   raw.get("rho", 1.0), raw.get("k", 2))
    elif model == "profit":
        params = ProfitCssParams(raw["n"], raw["k"], raw.get("rho", 1.0),
                                 raw.get("founder_cost", 0.0),
                                 raw.get("member_cost", 0.0))
    elif model in ("oligopoly_coarse", "oligopoly_fine"):
        params = OligopolyGraph.from_spec(
            [(v["id"], v["size"]) for v in raw["vertices"]],
            [tuple(edge) for edge in raw.get("edges", [])],
            raw.get("rho", 1.0))
    else:
        params = GeoParams(_parse_census(raw["census"]), raw["variant"],
                           raw.get("rho", 1.0))
    sample = None
    if data.get("sample") is not None:
        sample = SampleConfig(
            data["sample"].get("permutations", DEFAULT_PERMUTATIONS),
            data["sample"].get("seed", 0))
    return Scenario(model, params, data.get("method", "closed"), sample,
                    data.get("label", ""))


def load_scenario(path: str | Path) -> Scenario:
    """Read and parse a scenario file; unreadable files raise OSError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: not valid JSON ({exc})"]) from exc
    return parse_scenario(data)


def scenario_to_data(scenario: Scenario) -> dict:
    """Canonical JSON-ready form of a scenario (inverse of parse_scenario)."""
    params = scenario.params
    if isinstance(params, SingleCssParams):
        raw: dict[str, Any] = {"n": params.n, "k": params.k, "rho": params.rho}
    elif isinstance(params, WeightedCssParams):
        raw = {"weights": list(params.weights), "alpha": params.alpha,
               "rho": params.rho, "k": params.k}
    elif isinstance(params, ProfitCssParams):
        raw = {"n": params.n, "k": params.k, "rho": params.rho,
               "founder_cost": params.founder_cost,
               "member_cost": params.member_cost}
    elif isinstance(params, OligopolyGraph):
        raw = {"vertices": [{"id": vid, "size": size}
                            for vid, size in zip(params.vertex_ids, params.crowd_sizes)],
               "edges": [[params.vertex_ids[a], params.vertex_ids[b]]
                         for a, b in params.edges],
               "rho": params.rho}
    else:
        census = params.census
        raw = {"census": {"m": census.num_agents,
                          "d": {",".join(map(str, sorted(subset))): count
                                for subset, count in sorted(
                                    census.counts.items(),
                                    key=lambda kv: sorted(kv[0]))}},
               "variant": params.variant, "rho": params.rho}
    data: dict[str, Any] = {"model": scenario.model, "params": raw,
                            "method": scenario.method}
    if scenario.sample is not None:
        data["sample"] = {"permutations": scenario.sample.permutations,
                          "seed": scenario.sample.seed}
    if scenario.label:
        data["label"] = scenario.label
    return data


# --- game and allocation builders --------------------------------------------------

def build_game(scenario: Scenario) -> CoalitionGame:
    """The scenario's game for the exact engine or the sampler."""
    params = scenario.params
    if scenario.model == "single":
        return single_game(params)
    if scenario.model == "weighted":
        return weighted_game(params)
    if scenario.model == "profit":
        return profit_game(params)
    if scenario.model == "oligopoly_coarse":
        return coarse_game(params)
    if scenario.model == "oligopoly_fine":
        return fine_game(params)[0]
    if scenario.model == "geo":
        return geo_game(params.census, params.rho, params.variant)
    return geo_founder_game(params.census, params.rho, params.variant)


def closed_report(scenario: Scenario) -> ShareReport | None:
    """Share diagnostics for the models that define them."""
    params = scenario.params
    if scenario.model == "single":
        return closed_single(params)
    if scenario.model == "weighted":
        return closed_weighted(params)
    if scenario.model == "profit":
        return closed_profit(params)
    return None


def closed_allocation(scenario: Scenario) -> Allocation:
    """The scenario's closed-form allocation."""
    params = scenario.params
    report = closed_report(scenario)
    if report is not None:
        return report.as_allocation()
    if scenario.model == "oligopoly_coarse":
        return shapley_coarse(params)
    if scenario.model == "oligopoly_fine":
        return shapley_fine_closed(params)
    if scenario.model == "geo":
        return geo_shapley(params.census, params.rho, params.variant)
    return geo_founder_shapley(params.census, params.rho, params.variant)
