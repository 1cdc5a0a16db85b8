"""JSON run configurations and built-in presets.

A configuration is a single JSON document::

    {
      "scenario": "scenario1",            # preset name or inline object
      "n_grid": [128, 1024, 8192],
      "trials": 100000,
      "seed": 7,
      "pfa_nominal": 0.01,
      "snr_db_list": [],                  # empty: H0 run
      "output_path": "scenario1.csv",
      "emit_theory_curve": true
    }

Inline scenarios look like::

    {
      "name": "my-clutter",
      "nu": 0.2,
      "clutter": {
        "model": "ar",
        "poles": [0.5, {"mag": 0.3, "freq": -0.1}],
        "innovation": {"kind": "complex_t", "sigma_w2": 1.0, "shape_lambda": 2.0},
        "normalize_unit_power": true
      },
      "detector": {"truncation_lag": "auto", "degenerate_policy": "count_as_reject"}
    }

Complex numbers are written as a real number, a ``[re, im]`` pair, or a polar
``{"mag": m, "freq": f}`` meaning ``m * exp(j 2 pi f)``.  AR clutter is given
either by its coefficients (``rho``) or by the roots of its characteristic
polynomial (``poles``).  Compound-Gaussian clutter uses ``"model": "cg"`` with
``speckle_rho`` or ``speckle_poles`` and ``texture_shape``.
"""

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .detector import DetectorConfig
from .disturbance import (
    COMPLEX_T,
    ArSpec,
    CgSpec,
    InnovationSpec,
    coefficients_from_poles,
)
from .geometry import ArrayConfig
from .montecarlo import Scenario


class ConfigError(ValueError):
    """Invalid configuration, with a pointer to the offending field or line."""


def polar(mag, freq):
    return {"mag": mag, "freq": freq}


# Roots of the AR characteristic polynomial for the two reference clutter
# scenarios: power concentrated near nu = 0 (AR(3)), and spread over the band
# with several peaks (AR(6)).
SCENARIO1_POLES = [polar(0.5, 0.0), polar(0.3, -0.1), polar(0.4, 0.01)]
SCENARIO2_POLES = [
    polar(0.5, -0.4),
    polar(0.6, -0.2),
    polar(0.7, 0.0),
    polar(0.4, 0.1),
    polar(0.5, 0.3),
    polar(0.6, 0.35),
]

T_INNOVATIONS = {"kind": COMPLEX_T, "sigma_w2": 1.0, "shape_lambda": 2.0}

SCENARIOS = {
    "scenario1": {
        "name": "scenario1",
        "nu": 0.0,
        "clutter": {
            "model": "ar",
            "poles": SCENARIO1_POLES,
            "innovation": T_INNOVATIONS,
            "normalize_unit_power": True,
        },
    },
    "scenario2": {
        "name": "scenario2",
        "nu": 0.0,
        "clutter": {
            "model": "ar",
            "poles": SCENARIO2_POLES,
            "innovation": T_INNOVATIONS,
            "normalize_unit_power": True,
        },
    },
    "cg1": {
        "name": "cg1",
        "nu": 0.0,
        "clutter": {
            "model": "cg",
            "speckle_poles": SCENARIO1_POLES,
            "texture_shape": 3.0,
            "normalize_unit_power": True,
        },
    },
}

_DESK = {"n_grid": [128, 1024, 8192], "trials": 100_000, "seed": 20190417, "pfa_nominal": 1e-2}
_FULL = {"n_grid": [100, 1000, 10_000, 100_000], "trials": 1_000_000, "seed": 20190417,
          "pfa_nominal": 1e-4}
_SNRS = [-20.0, -10.0, -5.0]

PRESETS = {
    "scenario1": {**_DESK, "scenario": "scenario1"},
    "scenario2": {**_DESK, "scenario": "scenario2"},
    "cg1": {**_DESK, "scenario": "cg1"},
    "scenario1-pd": {**_DESK, "trials": 10_000, "scenario": "scenario1", "snr_db_list": _SNRS},
    "scenario1-full": {**_FULL, "scenario": "scenario1"},
    "scenario2-full": {**_FULL, "scenario": "scenario2"},
    "scenario1-pd-full": {**_FULL, "scenario": "scenario1", "snr_db_list": _SNRS},
}

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        {
            "type": "object",
            "properties": {"mag": {"type": "number", "minimum": 0}, "freq": {"type": "number"}},
            "required": ["mag", "freq"],
            "additionalProperties": False,
        },
    ]
}
_COMPLEX_LIST = {"type": "array", "items": _COMPLEX}
_MATRIX = {"type": "array", "items": _COMPLEX_LIST}

_INNOVATION = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["complex_gaussian", "complex_t"]},
        "sigma_w2": {"type": "number", "exclusiveMinimum": 0},
        "shape_lambda": {"type": "number", "exclusiveMinimum": 1},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_CLUTTER = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "model": {"const": "ar"},
                "rho": _COMPLEX_LIST,
                "poles": _COMPLEX_LIST,
                "innovation": _INNOVATION,
                "normalize_unit_power": {"type": "boolean"},
            },
            "required": ["model"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "model": {"const": "cg"},
                "speckle_rho": _COMPLEX_LIST,
                "speckle_poles": _COMPLEX_LIST,
                "texture_shape": {"type": "number", "exclusiveMinimum": 1},
                "normalize_unit_power": {"type": "boolean"},
            },
            "required": ["model"],
            "additionalProperties": False,
        },
    ]
}

_SCENARIO = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "nu": {"type": "number", "minimum": -0.5, "exclusiveMaximum": 0.5},
        "clutter": _CLUTTER,
        "array": {
            "type": "object",
            "properties": {
                "m_t": {"type": "integer", "minimum": 1},
                "m_r": {"type": "integer", "minimum": 1},
                "w": _MATRIX,
                "s": _MATRIX,
            },
            "required": ["m_t", "m_r"],
            "additionalProperties": False,
        },
        "detector": {
            "type": "object",
            "properties": {
                "truncation_lag": {
                    "oneOf": [{"const": "auto"}, {"type": "integer", "minimum": 0}]
                },
                "degenerate_policy": {"enum": ["error", "count_as_reject"]},
            },
            "additionalProperties": False,
        },
    },
    "required": ["name", "clutter"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "scenario": {"oneOf": [{"enum": sorted(SCENARIOS)}, _SCENARIO]},
        "n_grid": {
            "type": "array",
            "items": {"type": "integer", "minimum": 2},
            "minItems": 1,
        },
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "pfa_nominal": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "snr_db_list": {"type": "array", "items": {"type": "number"}},
        "output_path": {"type": "string", "minLength": 1},
        "emit_theory_curve": {"type": "boolean"},
        "workers": {"type": "integer", "minimum": 1},
    },
    "required": ["scenario", "n_grid", "trials", "seed", "pfa_nominal"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    n_grid: tuple
    trials: int
    seed: int
    pfa_nominal: float
    snr_db_list: tuple = ()
    output_path: str = "results.csv"
    emit_theory_curve: bool = True
    workers: int = 1
    document: dict = field(default_factory=dict, repr=False, compare=False)


def parse_complex(value):
    if isinstance(value, dict):
        return value["mag"] * np.exp(2j * np.pi * value["freq"])
    if isinstance(value, list):
        return complex(value[0], value[1])
    return complex(value)


def _complex_list(values):
    return np.array([parse_complex(v) for v in values], dtype=complex)


def _build_clutter(doc):
    normalize = doc.get("normalize_unit_power", False)
    if doc["model"] == "ar":
        if "rho" in doc and "poles" in doc:
            raise ConfigError("clutter: give either 'rho' or 'poles', not both")
        if "poles" in doc:
            rho = coefficients_from_poles(_complex_list(doc["poles"]))
        else:
            rho = _complex_list(doc.get("rho", []))
        inn = InnovationSpec(**doc.get("innovation", {"kind": "complex_gaussian"}))
        return ArSpec(rho, inn, normalize)
    if "speckle_rho" in doc and "speckle_poles" in doc:
        raise ConfigError("clutter: give either 'speckle_rho' or 'speckle_poles', not both")
    if "speckle_poles" in doc:
        rho = coefficients_from_poles(_complex_list(doc["speckle_poles"]))
    else:
        rho = _complex_list(doc.get("speckle_rho", []))
    return CgSpec(rho, doc.get("texture_shape", 3.0), normalize)


def build_scenario(doc, pfa_nominal):
    """Scenario object from a preset name or inline scenario document."""
    if isinstance(doc, str):
        if doc not in SCENARIOS:
            raise ConfigError(f"unknown scenario preset {doc!r}; known: {sorted(SCENARIOS)}")
        doc = SCENARIOS[doc]
    array = None
    if "array" in doc:
        a = doc["array"]
        array = ArrayConfig(
            a["m_t"],
            a["m_r"],
            None if "w" not in a else np.array([_complex_list(r) for r in a["w"]]),
            None if "s" not in a else np.array([_complex_list(r) for r in a["s"]]),
        )
    det = doc.get("detector", {})
    detector = DetectorConfig(
        det.get("truncation_lag", "auto"),
        pfa_nominal,
        det.get("degenerate_policy", "count_as_reject"),
    )
    return Scenario(doc["name"], _build_clutter(doc["clutter"]), doc.get("nu", 0.0), array,
                    None, detector)


def _schema_error(err):
    where = "/".join(str(p) for p in err.absolute_path) or "<root>"
    return ConfigError(f"field '{where}': {err.message}")


def config_from_document(doc):
    """Validate a configuration document and build the RunConfig."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise _schema_error(errors[0])
    grid = doc["n_grid"]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("field 'n_grid': must be strictly ascending")
    try:
        scenario = build_scenario(doc["scenario"], doc["pfa_nominal"])
        if scenario.array is not None and any(n != scenario.array.n for n in grid):
            raise ConfigError("field 'n_grid': an explicit array fixes N = m_t * m_r")
        if doc.get("snr_db_list"):
            # validates the unit-power requirement up front
            scenario.with_(snr_db=doc["snr_db_list"][0])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"field 'scenario': {exc}") from exc
    return RunConfig(
        scenario=scenario,
        n_grid=tuple(grid),
        trials=doc["trials"],
        seed=doc["seed"],
        pfa_nominal=doc["pfa_nominal"],
        snr_db_list=tuple(doc.get("snr_db_list", ())),
        output_path=doc.get("output_path", f"{scenario.name}.csv"),
        emit_theory_curve=doc.get("emit_theory_curve", True),
        workers=doc.get("workers", 1),
        document=copy.deepcopy(doc),
    )


def preset_document(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])


def load_config(source, overrides=None):
    """Load a RunConfig from a preset name or a JSON file path.

    ``overrides`` (e.g. ``{"trials": 100}``) are applied to the document
    before validation.
    """
    source = str(source)
    if source in PRESETS:
        doc = preset_document(source)
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"no preset or config file named {source!r}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_document(doc)
