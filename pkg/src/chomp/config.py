"""Scenario files: JSON documents validated into Scenario objects.

The schema is strict: unknown keys anywhere in the document are rejected,
so typos fail loudly instead of silently running a default. Semantic rules
(valid structures, pattern widths, estimator names) are enforced by the
domain types; this module adds key and type checking with diagnostics that
name the offending key.
"""

import json
from dataclasses import dataclass

from .exceptions import ConfigError, SdrError
from .simgen import (MODEL_DIMS, CoefficientSpec, CovarianceSpec,
                     EstimatorSpec, Scenario)
from .tuning import TuningPolicy

_TOP_KEYS = ("model", "covariance", "n", "p", "s-pattern", "H", "d",
             "estimators", "reps", "seed", "output", "fix_across_reps")
_TOP_REQUIRED = ("model", "covariance", "n", "p", "estimators", "reps", "seed")
_COV_KEYS = ("structure", "K", "scale")
_PATTERN_KEYS = ("pattern", "s")
_ESTIMATOR_KEYS = ("name", "gamma", "method", "banded", "K", "tuning")
_TUNING_KEYS = ("kind", "tau_rule", "folds", "grid", "mu", "scale")


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario plus where its outputs should go."""

    scenario: Scenario
    output: str | None = None


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object, got {type(doc).__name__}")
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}", key=key)


def _get(doc, key, where, kind, required=False, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"missing required key {key!r} in {where}", key=key)
        return default
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(
            f"key {key!r} in {where} must be {kind.__name__}, got {type(value).__name__}",
            key=key)
    return value


def _covariance(doc, p):
    _check_keys(doc, _COV_KEYS, "covariance")
    structure = _get(doc, "structure", "covariance", str, required=True)
    K = _get(doc, "K", "covariance", int)
    scale = _get(doc, "scale", "covariance", str, default="unit")
    return CovarianceSpec(structure=structure, p=p, K=K, scale=scale)


def _coefficients(value):
    if value is None:
        return CoefficientSpec()
    if isinstance(value, str):
        return CoefficientSpec(pattern=value)
    _check_keys(value, _PATTERN_KEYS, "s-pattern")
    return CoefficientSpec(pattern=_get(value, "pattern", "s-pattern", str,
                                        required=True),
                           s=_get(value, "s", "s-pattern", int, default=5))


def _tuning(doc, where):
    if doc is None:
        return None
    _check_keys(doc, _TUNING_KEYS, where)
    kind = _get(doc, "kind", where, str, required=True)
    grid = doc.get("grid")
    if grid is not None:
        if not isinstance(grid, list):
            raise ConfigError(f"key 'grid' in {where} must be a list", key="grid")
        grid = tuple(float(v) for v in grid)
    kw = dict(kind=kind)
    if "tau_rule" in doc:
        kw["tau_rule"] = doc["tau_rule"]
    if "folds" in doc:
        kw["folds"] = _get(doc, "folds", where, int)
    if "mu" in doc:
        kw["mu"] = _get(doc, "mu", where, float)
    if "scale" in doc:
        kw["scale"] = _get(doc, "scale", where, float)
    if grid is not None:
        kw["grid"] = grid
    return TuningPolicy(**kw)


def _estimator(doc, index):
    where = f"estimators[{index}]"
    _check_keys(doc, _ESTIMATOR_KEYS, where)
    return EstimatorSpec(
        name=_get(doc, "name", where, str, required=True),
        gamma=_get(doc, "gamma", where, float),
        method=_get(doc, "method", where, str, default="sir"),
        banded=_get(doc, "banded", where, bool, default=False),
        K=_get(doc, "K", where, int),
        tuning=_tuning(doc.get("tuning"), f"{where}.tuning"),
    )


def scenario_from_dict(doc):
    """Validate one parsed JSON document into a ScenarioConfig."""
    _check_keys(doc, _TOP_KEYS, "scenario")
    for key in _TOP_REQUIRED:
        if key not in doc:
            raise ConfigError(f"missing required key {key!r} in scenario", key=key)
    model = _get(doc, "model", "scenario", str, required=True)
    p = _get(doc, "p", "scenario", int, required=True)
    estimators = doc["estimators"]
    if not isinstance(estimators, list) or not estimators:
        raise ConfigError("key 'estimators' must be a non-empty list", key="estimators")
    try:
        scenario = Scenario(
            model=model,
            n=_get(doc, "n", "scenario", int, required=True),
            p=p,
            covariance=_covariance(doc["covariance"], p),
            estimators=tuple(_estimator(e, i) for i, e in enumerate(estimators)),
            coefficients=_coefficients(doc.get("s-pattern")),
            H=_get(doc, "H", "scenario", int, default=20),
            reps=_get(doc, "reps", "scenario", int, required=True),
            base_seed=_get(doc, "seed", "scenario", int, required=True),
            fix_across_reps=_get(doc, "fix_across_reps", "scenario", bool,
                                 default=False),
        )
    except ConfigError:
        raise
    except (SdrError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    d = _get(doc, "d", "scenario", int)
    if d is not None and d != MODEL_DIMS[model]:
        raise ConfigError(
            f"key 'd' is {d} but model {model} has {MODEL_DIMS[model]} dimensions",
            key="d")
    return ScenarioConfig(scenario=scenario,
                          output=_get(doc, "output", "scenario", str))


def load_scenario(path):
    """Read and validate a scenario file; all failures become ConfigError."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return scenario_from_dict(doc)
