"""Scenario files: a small JSON schema describing one system to simulate.

Top-level keys:

* ``matrix`` (required): object with exactly one of
  ``entries`` (N x N numbers), ``generator`` (N x N numbers, zero column
  sums), or ``two_species`` ({"alpha": x, "beta": y}).
* ``initial`` (required): raw nonnegative abundances; normalized on load.
* ``species_names`` (optional): defaults to species_1..species_N.
* ``dt`` (optional, default 1.0): step size metadata.
* ``config`` (optional): ``max_steps``, ``convergence_tol``, ``record_every``.
* ``seed`` (optional): recorded for provenance and output determinism.

Floats survive a save/load round trip exactly: they are serialized with
Python's shortest round-tripping repr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import (
    EvolutionMatrix,
    GeneratorMatrix,
    PopulationVector,
    make_population,
    matrix_from_generator,
    two_species_matrix,
)
from .dynamics import SimulationConfig
from .errors import ScenarioParseError

_TOP_KEYS = {"species_names", "dt", "matrix", "initial", "config", "seed"}
_MATRIX_KEYS = {"entries", "generator", "two_species"}
_CONFIG_KEYS = {"max_steps", "convergence_tol", "record_every"}


@dataclass(frozen=True)
class Scenario:
    species_names: tuple[str, ...]
    dt: float
    matrix_spec: dict
    matrix: EvolutionMatrix
    initial_raw: tuple[float, ...]
    initial: PopulationVector
    config: SimulationConfig
    seed: int | None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ScenarioParseError(message)


def _as_float_matrix(value, field: str) -> list[list[float]]:
    _require(isinstance(value, list) and value, f"field '{field}' must be a nonempty array of rows")
    rows = []
    for i, row in enumerate(value):
        _require(
            isinstance(row, list) and all(isinstance(x, (int, float)) for x in row),
            f"field '{field}' row {i} must be an array of numbers",
        )
        rows.append([float(x) for x in row])
    _require(
        all(len(row) == len(rows) for row in rows),
        f"field '{field}' must be square ({len(rows)} rows)",
    )
    return rows


def _build_matrix(spec: dict, dt: float) -> EvolutionMatrix:
    present = _MATRIX_KEYS & spec.keys()
    _require(
        len(present) == 1,
        f"field 'matrix' must contain exactly one of {sorted(_MATRIX_KEYS)}, got {sorted(spec)}",
    )
    (kind,) = present
    if kind == "entries":
        return EvolutionMatrix(_as_float_matrix(spec["entries"], "matrix.entries"), dt=dt)
    if kind == "generator":
        return matrix_from_generator(
            GeneratorMatrix(_as_float_matrix(spec["generator"], "matrix.generator"), dt=dt)
        )
    block = spec["two_species"]
    _require(
        isinstance(block, dict) and set(block) == {"alpha", "beta"},
        "field 'matrix.two_species' must be an object with keys alpha and beta",
    )
    _require(
        all(isinstance(block[k], (int, float)) for k in ("alpha", "beta")),
        "field 'matrix.two_species' values must be numbers",
    )
    return two_species_matrix(float(block["alpha"]), float(block["beta"]), dt=dt)


def _build_config(raw: dict | None) -> SimulationConfig:
    if raw is None:
        return SimulationConfig()
    _require(isinstance(raw, dict), "field 'config' must be an object")
    unknown = set(raw) - _CONFIG_KEYS
    _require(not unknown, f"unknown config fields: {sorted(unknown)}")
    defaults = SimulationConfig()
    return SimulationConfig(
        max_steps=int(raw.get("max_steps", defaults.max_steps)),
        convergence_tol=float(raw.get("convergence_tol", defaults.convergence_tol)),
        record_every=int(raw.get("record_every", defaults.record_every)),
    )


def scenario_from_dict(data: dict) -> Scenario:
    _require(isinstance(data, dict), "scenario must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    _require(not unknown, f"unknown scenario fields: {sorted(unknown)}")
    _require("matrix" in data, "missing required field 'matrix'")
    _require("initial" in data, "missing required field 'initial'")
    _require(isinstance(data["matrix"], dict), "field 'matrix' must be an object")

    dt = data.get("dt", 1.0)
    _require(isinstance(dt, (int, float)) and dt > 0, "field 'dt' must be a positive number")
    matrix = _build_matrix(data["matrix"], float(dt))

    initial = data["initial"]
    _require(
        isinstance(initial, list) and all(isinstance(x, (int, float)) for x in initial),
        "field 'initial' must be an array of numbers",
    )
    _require(
        len(initial) == matrix.n,
        f"field 'initial' has {len(initial)} entries but the matrix is {matrix.n}x{matrix.n}",
    )

    names = data.get("species_names")
    if names is None:
        names = [f"species_{i + 1}" for i in range(matrix.n)]
    _require(
        isinstance(names, list) and all(isinstance(s, str) for s in names),
        "field 'species_names' must be an array of strings",
    )
    _require(
        len(names) == matrix.n,
        f"field 'species_names' has {len(names)} entries but the matrix is {matrix.n}x{matrix.n}",
    )

    seed = data.get("seed")
    _require(
        seed is None or isinstance(seed, int),
        "field 'seed' must be an integer",
    )

    return Scenario(
        species_names=tuple(names),
        dt=float(dt),
        matrix_spec=data["matrix"],
        matrix=matrix,
        initial_raw=tuple(float(x) for x in initial),
        initial=make_population(initial),
        config=_build_config(data.get("config")),
        seed=seed,
    )


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return scenario_from_dict(data)
    except ScenarioParseError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc


def scenario_to_dict(scenario: Scenario) -> dict:
    data = {
        "species_names": list(scenario.species_names),
        "dt": scenario.dt,
        "matrix": scenario.matrix_spec,
        "initial": list(scenario.initial_raw),
        "config": {
            "max_steps": scenario.config.max_steps,
            "convergence_tol": scenario.config.convergence_tol,
            "record_every": scenario.config.record_every,
        },
    }
    if scenario.seed is not None:
        data["seed"] = scenario.seed
    return data


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2, sort_keys=True)
        fh.write("\n")
