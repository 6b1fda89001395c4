"""``ecsteleport`` command line: run, validate, emit-plot.

Exit codes: 0 success, 2 validation failure, 3 budget refusal, 4 numeric
failure.  Errors go to stderr as a single JSON object.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

from ..errors import BudgetError, DegenerateStateError, NumericError
from .config import EXPERIMENTS, ConfigError, load_config, validate_config
from .records import SeriesError, emit_plot_data, read_record, write_record
from .runner import run as run_experiment

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_NUMERIC = 4

OUTPUT_DIR_ENV = "ECSTELEPORT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"

# flag name -> parameter key
PARAM_FLAGS = {
    "pattern": "pattern",
    "z": "z",
    "A": "A",
    "B": "B",
    "sign": "sign",
    "photons": "photons",
    "formula": "formula",
    "protocol": "protocol",
    "channel": "channel",
    "model": "model",
}


def _fail(code: int, error: str, diagnostics=None, message: str | None = None):
    payload = {"status": "error", "exit_code": code, "error": error}
    if message:
        payload["message"] = message
    if diagnostics is not None:
        payload["diagnostics"] = [d.to_dict() for d in diagnostics]
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(code)


def _parse_set(items) -> dict:
    """``key=value`` pairs; values are YAML scalars, dotted keys nest."""
    out: dict = {}
    for item in items:
        if "=" not in item:
            raise click.BadParameter(f"expected key=value, got {item!r}", param_hint="--set")
        key, value = item.split("=", 1)
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = yaml.safe_load(value)
    return out


def _merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@click.group()
def cli():
    """Entangled-coherent-state teleportation experiments."""


@cli.command("run")
@click.argument("experiment", required=False, type=click.Choice(EXPERIMENTS))
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="YAML experiment config.")
@click.option("--cutoff", type=int, help="Fock cutoff per mode.")
@click.option("--seed", type=int, help="Unsigned 64-bit seed.")
@click.option("--pattern", help="Firing pattern (I_II, I_IV, II_III, III_IV or all).")
@click.option("--z", help="Coherent amplitude, e.g. 1.0 or 0.5+0.5j.")
@click.option("--A", "A", help="Weight of the |z>|z> branch.")
@click.option("--B", "B", help="Weight of the |-z>|-z> branch.")
@click.option("--sign", help="Relative sign of the two branches (+ or -).")
@click.option("--photons", type=float, help="Photon count entering the eye.")
@click.option("--formula", type=click.Choice(["tegmark", "rosa-faber", "both"]))
@click.option("--defaults", is_flag=True, default=None, help="Use the shipped decoherence parameter file.")
@click.option("--protocol", type=click.Choice(["physical", "literal"]), help="Sweep protocol.")
@click.option("--channel", help="Bell channel for the qubit oracle (00, 01, 10, 11, all).")
@click.option("--model", type=click.Choice(["wu-austin", "pokorny-wu"]))
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE", help="Override any parameter (dotted keys nest).")
@click.option("--output", type=click.Path(dir_okay=False), help="Result file path.")
@click.option("--format", "fmt", type=click.Choice(["json", "yaml"]), help="Result file format.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for sweep points.")
def run_cmd(experiment, config_path, cutoff, seed, sets, output, fmt, jobs, defaults, **flags):
    """Run one experiment; flags override values from --config."""
    raw: dict = {}
    if config_path:
        try:
            raw = load_config(config_path)
        except ConfigError as exc:
            _fail(EXIT_VALIDATION, "config", message=str(exc))
    if experiment:
        if raw.get("experiment") not in (None, experiment):
            _fail(EXIT_VALIDATION, "config", message=f"config is for {raw['experiment']!r}, not {experiment!r}")
        raw["experiment"] = experiment
    if cutoff is not None:
        raw["cutoff"] = cutoff
    if seed is not None:
        raw["seed"] = seed
    params = dict(raw.get("parameters") or {})
    for flag, key in PARAM_FLAGS.items():
        if flags.get(flag) is not None:
            params[key] = flags[flag]
    if defaults is not None:
        params["defaults"] = defaults
    params = _merge(params, _parse_set(sets))
    raw["parameters"] = params
    if output or fmt:
        raw["output"] = {**(raw.get("output") or {}), **({"path": output} if output else {}), **({"format": fmt} if fmt else {})}

    cfg, diags = validate_config(raw)
    if diags:
        code = EXIT_BUDGET if all(d.code == "budget" for d in diags) else EXIT_VALIDATION
        _fail(code, "budget" if code == EXIT_BUDGET else "validation", diags)

    try:
        record = run_experiment(cfg, jobs=max(1, jobs))
    except BudgetError as exc:
        _fail(EXIT_BUDGET, "budget", message=str(exc))
    except DegenerateStateError as exc:
        _fail(EXIT_VALIDATION, "degenerate", message=str(exc))
    except (NumericError, FloatingPointError, ArithmeticError) as exc:
        _fail(EXIT_NUMERIC, "numeric", message=str(exc))

    path = cfg["output"]["path"]
    if not path:
        folder = Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))
        path = folder / f"{cfg['experiment']}-{record['config_hash'][:12]}.{cfg['output']['format']}"
    written = write_record(record, path, cfg["output"]["format"])
    click.echo(json.dumps({"status": "ok", "path": str(written), "config_hash": record["config_hash"]}))


@cli.command("validate")
@click.argument("config_path", type=click.Path(dir_okay=False))
def validate_cmd(config_path):
    """Check a config file without running it; lists every violation."""
    try:
        raw = load_config(config_path)
    except ConfigError as exc:
        _fail(EXIT_VALIDATION, "config", message=str(exc))
    _, diags = validate_config(raw)
    click.echo(json.dumps({"path": str(config_path), "diagnostics": [d.to_dict() for d in diags]}, indent=2))
    sys.exit(EXIT_VALIDATION if diags else EXIT_OK)


@cli.command("emit-plot")
@click.argument("record_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--series", required=True, help="Series name, e.g. fidelity-vs-z, tau-vs-T.")
@click.option("--output", type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@click.option("--delimiter", default=",", show_default=True)
def emit_plot_cmd(record_path, series, output, delimiter):
    """Export one series of a result record as delimited columns."""
    try:
        text = emit_plot_data(read_record(record_path), series, delimiter)
    except SeriesError as exc:
        _fail(EXIT_VALIDATION, "series", message=str(exc.args[0]))
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    cli()
