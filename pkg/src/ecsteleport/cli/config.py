"""Experiment configuration: parsing, canonical form, and validation.

A config is a YAML mapping::

    experiment: teleport-physical
    cutoff: 8
    seed: 7
    parameters: {z: 2.0, A: 0.7071, ...}
    output: {path: results/run.json, format: json}
    constants: {hbar: 1.0}          # optional override section
    budget: {max_amplitudes: 16777216}

Validation never computes anything expensive; it returns every violation
as a :class:`Diagnostic` so a config can be fixed in one pass.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable

import yaml

from ..constants import SI
from ..decoherence import default_rosa_faber, default_tegmark
from ..ecs import DEFAULT_MAX_AMPLITUDES, DEGENERACY_TOL, ecs_norm_squared_closed_form
from ..hamiltonian import MAX_EIGEN_DIM, MAX_EVOLVE_DIM
from ..teleport import FiringPattern, default_grouping

EXPERIMENTS = (
    "teleport-literal",
    "teleport-physical",
    "qubit-oracle",
    "attenuate",
    "decoherence",
    "hamiltonian",
    "sweep",
)
DEFAULT_CUTOFF = {
    "teleport-literal": 16,
    "teleport-physical": 8,
    "sweep": 8,
    "hamiltonian": 4,
}
OUTPUT_FORMATS = ("json", "yaml")
UINT64_MAX = 2**64 - 1
SQRT_HALF = 1 / math.sqrt(2)


class ConfigError(Exception):
    """Config file unreadable or not a mapping."""


@dataclass(frozen=True)
class Diagnostic:
    field: str
    code: str
    message: str

    def to_dict(self) -> dict:
        return asdict(self)


# -- scalar coercions ---------------------------------------------------------


def to_real(value) -> float:
    if isinstance(value, bool):
        raise TypeError("expected a real number, got a boolean")
    x = float(value)
    if not math.isfinite(x):
        raise ValueError(f"{value!r} is not finite")
    return x


def to_complex(value) -> complex:
    if isinstance(value, bool):
        raise TypeError("expected a number, got a boolean")
    if isinstance(value, (list, tuple)) and len(value) == 2:
        c = complex(float(value[0]), float(value[1]))
    elif isinstance(value, str):
        c = complex(value.replace(" ", ""))
    else:
        c = complex(value)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError(f"{value!r} is not finite")
    return c


def to_sign(value) -> int:
    if isinstance(value, str):
        table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
        if value.strip() in table:
            return table[value.strip()]
    elif not isinstance(value, bool) and value in (1, -1):
        return int(value)
    raise ValueError(f"sign must be + or - (or +1/-1), got {value!r}")


def to_int(value) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "yes", "1", "false", "no", "0"):
        return value.lower() in ("true", "yes", "1")
    raise ValueError(f"expected a boolean, got {value!r}")


def complex_repr(c: complex) -> float | str:
    """Canonical form of a complex number: a float when real, else a string."""
    c = complex(c)
    if c.imag == 0:
        return c.real
    return repr(c).strip("()")


# -- experiment parameter schemas ----------------------------------------------

_ECS_FIELDS = {"z": (to_complex, 1.0), "A": (to_complex, SQRT_HALF), "B": (to_complex, SQRT_HALF), "sign": (to_sign, 1)}
_CHANNEL_FIELDS = {
    "delta3": (to_complex, SQRT_HALF),
    "delta4": (to_complex, SQRT_HALF),
    "delta5": (to_complex, SQRT_HALF),
    "delta6": (to_complex, SQRT_HALF),
    "sign35": (to_sign, 1),
    "sign46": (to_sign, 1),
}


def _pattern_or_all(value) -> str:
    if value == "all":
        return "all"
    return FiringPattern(value).value


def _channel_or_all(value) -> str:
    value = str(value)
    if value == "all" or value in ("00", "01", "10", "11"):
        return value
    raise ValueError(f"channel must be one of 00, 01, 10, 11 or 'all', got {value!r}")


def _real_list(value) -> list[float]:
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [to_real(v) for v in value]


def _int_list(value) -> list[int]:
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [to_int(v) for v in value]


def _grouping(value):
    if value is None:
        return None
    from ..teleport import parse_grouping

    return {k: v.value for k, v in sorted(parse_grouping(value).items())}


def _stages(value):
    if value is None:
        return None
    out = []
    for i, s in enumerate(value):
        t = to_real(s["transmittance"])
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"stage {i} transmittance {t} outside [0, 1]")
        out.append({"label": str(s.get("label", f"stage{i + 1}")), "transmittance": t})
    return out


def _choice(*options):
    def check(value):
        if value not in options:
            raise ValueError(f"must be one of {list(options)}, got {value!r}")
        return value

    return check


def _coupling(value):
    """Scalar coupling as a complex, or nested lists for per-index overrides."""
    if isinstance(value, list):
        return [_coupling(v) for v in value]
    return complex_repr(to_complex(value))


def _positive_block(kind: str, names: tuple[str, ...]):
    def check(value):
        value = value or {}
        unknown = set(value) - set(names)
        if unknown:
            raise ValueError(f"unknown {kind} parameters {sorted(unknown)}")
        out = {k: to_real(v) for k, v in value.items()}
        bad = [k for k, v in out.items() if not v > 0]
        if bad:
            raise ValueError(f"{kind} parameters must be positive: {bad}")
        return out

    return check


TEGMARK_FIELDS = tuple(default_tegmark().__dict__)
ROSA_FABER_FIELDS = tuple(default_rosa_faber().__dict__)


def _evolve_block(value):
    if value is None:
        return None
    out = {
        "t": to_real(value.get("t", 1.0)),
        "method": _choice("exact", "small-step")(value.get("method", "exact")),
        "initial": _int_list(value.get("initial", [])),
        "steps": to_int(value.get("steps", 10)),
    }
    if out["steps"] < 1:
        raise ValueError("evolve.steps must be >= 1")
    return out


Coercer = Callable[[Any], Any]

SCHEMAS: dict[str, dict[str, tuple[Coercer, Any]]] = {
    "teleport-literal": {"pattern": (_pattern_or_all, "all"), **_ECS_FIELDS},
    "teleport-physical": {**_ECS_FIELDS, **_CHANNEL_FIELDS, "grouping": (_grouping, None)},
    "sweep": {
        "protocol": (_choice("physical", "literal"), "physical"),
        "z_values": (_real_list, [0.5, 1.0, 1.5, 2.0, 3.0]),
        **{k: v for k, v in _ECS_FIELDS.items() if k != "z"},
        **_CHANNEL_FIELDS,
        "grouping": (_grouping, None),
    },
    "qubit-oracle": {
        "alpha": (to_complex, SQRT_HALF),
        "gamma": (to_complex, SQRT_HALF),
        "channel": (_channel_or_all, "all"),
    },
    "attenuate": {"photons": (to_real, 1.0), "stages": (_stages, None), "sample": (to_bool, False)},
    "decoherence": {
        "formula": (_choice("tegmark", "rosa-faber", "both"), "both"),
        "defaults": (to_bool, True),
        "tegmark": (_positive_block("Tegmark", TEGMARK_FIELDS), {}),
        "rosa_faber": (_positive_block("Rosa-Faber", ROSA_FABER_FIELDS), {}),
        "temperatures": (_real_list, [250.0, 273.0, 300.0, 310.0, 330.0]),
        "hagan": (to_bool, True),
    },
    "hamiltonian": {
        "model": (_choice("wu-austin", "pokorny-wu"), "wu-austin"),
        "omegas": (_real_list, [1.0]),
        "Omegas": (_real_list, []),
        "OmegaPrimes": (_real_list, []),
        "gamma": (_coupling, 0.0),
        "alpha": (_coupling, 0.0),
        "beta": (_coupling, 0.0),
        "phi": (_coupling, 0.0),
        "zeta": (_coupling, 0.0),
        "sigma": (_coupling, 0.0),
        "rho": (_coupling, 0.0),
        "xi": (_coupling, 0.0),
        "m": (to_int, 1),
        "n": (to_int, 1),
        "cutoffs": (_int_list, [2, 3, 4, 5]),
        "evolve": (_evolve_block, None),
    },
}


def _canonical_value(value):
    if isinstance(value, complex):
        return complex_repr(value)
    if isinstance(value, dict):
        return {str(k): _canonical_value(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_canonical_value(v) for v in value]
    return value


def _validate_parameters(experiment: str, raw: dict, diags: list[Diagnostic]) -> dict:
    schema = SCHEMAS[experiment]
    out = {}
    for key in sorted(set(raw) - set(schema)):
        diags.append(Diagnostic(f"parameters.{key}", "unknown", f"{experiment} has no parameter {key!r}"))
    for key, (coerce, default) in schema.items():
        value = raw.get(key, default)
        if value is None:
            out[key] = None
            continue
        try:
            out[key] = _canonical_value(coerce(copy.deepcopy(value)))
        except (TypeError, ValueError, KeyError) as exc:
            diags.append(Diagnostic(f"parameters.{key}", "type", f"{key}: {exc}"))
    return out


def _check_ecs_degeneracy(prefix: str, first, second, sign, z, diags, names=("A", "B")):
    try:
        n2 = ecs_norm_squared_closed_form(to_complex(first), to_complex(second), sign, to_complex(z))
    except (TypeError, ValueError):
        return
    if n2 < DEGENERACY_TOL:
        diags.append(
            Diagnostic(
                f"{prefix}z",
                "degenerate",
                f"{names[0]}|z>|z> {'+' if sign > 0 else '-'} {names[1]}|-z>|-z> cancels "
                f"(squared norm {n2:.3e}) at z={z}",
            )
        )


def _semantic_checks(cfg: dict, diags: list[Diagnostic]) -> None:
    exp = cfg["experiment"]
    p = cfg["parameters"]
    cutoff = cfg.get("cutoff")
    budget = cfg["budget"]["max_amplitudes"]

    def has(*keys):
        return all(k in p and p[k] is not None for k in keys)

    if exp in ("teleport-literal", "teleport-physical") and has("A", "B", "sign", "z"):
        if to_complex(p["A"]) == 0 and to_complex(p["B"]) == 0:
            diags.append(Diagnostic("parameters.A", "range", "A and B cannot both be zero"))
        else:
            _check_ecs_degeneracy("parameters.", p["A"], p["B"], p["sign"], p["z"], diags)
    if exp == "teleport-physical" and has("z") and to_complex(p["z"]) == 0:
        diags.append(
            Diagnostic("parameters.z", "degenerate", "physical mode needs |z| > 0: the odd cat state vanishes at z = 0")
        )
    if exp == "sweep" and has("z_values"):
        if not p["z_values"]:
            diags.append(Diagnostic("parameters.z_values", "range", "z_values is empty"))
        if p.get("protocol") == "physical" and any(z == 0 for z in p["z_values"]):
            diags.append(Diagnostic("parameters.z_values", "degenerate", "physical sweep needs every |z| > 0"))
    if exp in ("teleport-physical", "sweep"):
        for a, b, s in (("delta3", "delta4", "sign35"), ("delta5", "delta6", "sign46")):
            if has(a, b, s) and to_complex(p[a]) == 0 and to_complex(p[b]) == 0:
                diags.append(Diagnostic(f"parameters.{a}", "range", f"{a} and {b} cannot both be zero"))
        if isinstance(cutoff, int) and cutoff >= 1:
            dim = cutoff**6
            if dim > budget:
                diags.append(
                    Diagnostic(
                        "cutoff",
                        "budget",
                        f"six-mode composite at cutoff {cutoff} needs {cutoff}^6 = {dim} amplitudes, "
                        f"budget is {budget}",
                    )
                )
    if exp == "attenuate" and has("photons"):
        if p["photons"] < 0:
            diags.append(Diagnostic("parameters.photons", "range", "photon count must be non-negative"))
        if p.get("sample") and float(p["photons"]) != int(p["photons"]):
            diags.append(Diagnostic("parameters.photons", "range", "binomial sampling needs an integer photon count"))
    if exp == "decoherence" and has("temperatures"):
        if not p["temperatures"]:
            diags.append(Diagnostic("parameters.temperatures", "range", "temperature list is empty"))
        if any(t <= 0 for t in p["temperatures"]):
            diags.append(Diagnostic("parameters.temperatures", "range", "temperatures must be positive"))
    if exp == "decoherence" and p.get("defaults") is False:
        blocks = {"tegmark": TEGMARK_FIELDS, "rosa_faber": ROSA_FABER_FIELDS}
        wanted = ["tegmark", "rosa_faber"] if p.get("formula") == "both" else [p.get("formula", "").replace("-", "_")]
        for name in wanted:
            missing = [k for k in blocks.get(name, ()) if k not in (p.get(name) or {})]
            if missing:
                diags.append(
                    Diagnostic(f"parameters.{name}", "missing", f"defaults disabled but {name} lacks {missing}")
                )
    if exp == "hamiltonian":
        _hamiltonian_checks(p, cutoff, diags)


def _hamiltonian_checks(p: dict, cutoff, diags: list[Diagnostic]) -> None:
    for key in ("omegas", "Omegas", "OmegaPrimes"):
        if p.get(key) is not None and any(w < 0 for w in p[key]):
            diags.append(Diagnostic(f"parameters.{key}", "range", "frequencies must be non-negative"))
    if not all(p.get(k) is not None for k in ("omegas", "Omegas", "OmegaPrimes")):
        return
    modes = len(p["omegas"]) + len(p["Omegas"]) + len(p["OmegaPrimes"])
    if modes == 0:
        diags.append(Diagnostic("parameters.omegas", "range", "need at least one mode"))
        return
    if p.get("model") == "pokorny-wu":
        for key in ("m", "n"):
            if p.get(key) is not None and p[key] < 1:
                diags.append(Diagnostic(f"parameters.{key}", "range", f"{key} must be >= 1"))
    for c in p.get("cutoffs") or []:
        if c < 2:
            diags.append(Diagnostic("parameters.cutoffs", "range", f"cutoff {c} below 2"))
        elif c**modes > MAX_EIGEN_DIM:
            diags.append(
                Diagnostic(
                    "parameters.cutoffs",
                    "budget",
                    f"eigensolve at cutoff {c} over {modes} modes needs dimension {c**modes} > {MAX_EIGEN_DIM}",
                )
            )
        elif p.get("model") == "pokorny-wu" and max(p.get("m") or 1, p.get("n") or 1) >= c:
            diags.append(Diagnostic("parameters.cutoffs", "range", f"powers m, n must be below cutoff {c}"))
    ev = p.get("evolve")
    if ev and isinstance(cutoff, int):
        if cutoff**modes > MAX_EVOLVE_DIM:
            diags.append(
                Diagnostic(
                    "cutoff",
                    "budget",
                    f"evolution at cutoff {cutoff} over {modes} modes needs dimension {cutoff**modes} > {MAX_EVOLVE_DIM}",
                )
            )
        initial = ev.get("initial") or [0] * modes
        if len(initial) != modes or any(n < 0 or n >= cutoff for n in initial):
            diags.append(
                Diagnostic(
                    "parameters.evolve.initial",
                    "range",
                    f"initial occupations must list {modes} levels in 0..{cutoff - 1}, got {initial}",
                )
            )


def validate_config(raw: Any) -> tuple[dict | None, list[Diagnostic]]:
    """Canonicalize and check a raw config mapping.

    Returns the canonical config (``None`` when the structure is too broken
    to canonicalize) and the full list of diagnostics.
    """
    diags: list[Diagnostic] = []
    if not isinstance(raw, dict):
        return None, [Diagnostic("", "type", "config must be a mapping")]
    known = {"experiment", "cutoff", "seed", "parameters", "output", "constants", "budget"}
    for key in sorted(set(raw) - known):
        diags.append(Diagnostic(key, "unknown", f"unknown top-level key {key!r}"))

    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        diags.append(Diagnostic("experiment", "type", f"experiment must be one of {list(EXPERIMENTS)}, got {exp!r}"))
        return None, diags

    cfg: dict = {"experiment": exp}
    cutoff = raw.get("cutoff", DEFAULT_CUTOFF.get(exp))
    if cutoff is not None:
        try:
            cutoff = to_int(cutoff)
            if cutoff < 2:
                diags.append(Diagnostic("cutoff", "range", f"cutoff must be >= 2, got {cutoff}"))
        except (TypeError, ValueError) as exc:
            diags.append(Diagnostic("cutoff", "type", str(exc)))
            cutoff = None
    cfg["cutoff"] = cutoff

    try:
        seed = to_int(raw.get("seed", 0))
        if not 0 <= seed <= UINT64_MAX:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    except (TypeError, ValueError) as exc:
        diags.append(Diagnostic("seed", "range", str(exc)))
        seed = 0
    cfg["seed"] = seed

    params = raw.get("parameters") or {}
    if not isinstance(params, dict):
        diags.append(Diagnostic("parameters", "type", "parameters must be a mapping"))
        params = {}
    cfg["parameters"] = _validate_parameters(exp, params, diags)

    output = raw.get("output") or {}
    fmt = output.get("format", "json") if isinstance(output, dict) else "json"
    if fmt not in OUTPUT_FORMATS:
        diags.append(Diagnostic("output.format", "range", f"format must be one of {list(OUTPUT_FORMATS)}"))
    cfg["output"] = {"path": output.get("path") if isinstance(output, dict) else None, "format": fmt}

    constants = raw.get("constants") or {}
    cfg["constants"] = {}
    for key, value in sorted(constants.items()):
        if key not in ("hbar", "k_B", "g", "e"):
            diags.append(Diagnostic(f"constants.{key}", "unknown", f"unknown constant {key!r}"))
            continue
        try:
            v = to_real(value)
            if v <= 0:
                raise ValueError("must be positive")
            cfg["constants"][key] = v
        except (TypeError, ValueError) as exc:
            diags.append(Diagnostic(f"constants.{key}", "range", f"{key}: {exc}"))

    budget = raw.get("budget") or {}
    try:
        max_amp = to_int(budget.get("max_amplitudes", DEFAULT_MAX_AMPLITUDES))
    except (TypeError, ValueError) as exc:
        diags.append(Diagnostic("budget.max_amplitudes", "type", str(exc)))
        max_amp = DEFAULT_MAX_AMPLITUDES
    cfg["budget"] = {"max_amplitudes": max_amp}

    try:
        _semantic_checks(cfg, diags)
    except (TypeError, ValueError, KeyError):
        # structural diagnostics already explain why deeper checks cannot run
        if not diags:
            raise
    return cfg, diags


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True, default_flow_style=False)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(cfg: dict) -> str:
    """Digest of the canonical config; the output destination is excluded."""
    hashed = {k: v for k, v in cfg.items() if k != "output"}
    return hashlib.sha256(canonical_json(hashed).encode()).hexdigest()


def effective_constants(cfg: dict):
    return SI.replace(**cfg.get("constants", {})) if cfg.get("constants") else SI


def default_grouping_table() -> dict[str, str]:
    return {k: v.value for k, v in sorted(default_grouping().items())}
