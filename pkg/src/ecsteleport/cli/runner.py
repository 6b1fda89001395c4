"""Dispatch a validated config to its experiment and build the result record."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np
import scipy.linalg

from .. import decoherence as deco
from ..ecs import ChannelParams, EcsParams
from ..fock import coherent_tail, fock_state
from ..hamiltonian import (
    PokornyWuParams,
    WuAustinParams,
    build_pokorny_wu,
    build_wu_austin,
    evolve,
    ground_state_diagnostic,
)
from ..photons import DEFAULT_STAGES, attenuate
from ..qubit import qubit_teleport
from ..teleport import FiringPattern, parse_grouping, run_literal, run_physical
from .config import effective_constants, to_complex
from .records import make_record, make_series

DIMENSIONLESS = "dimensionless"


def _ecs(p: dict, z) -> EcsParams:
    return EcsParams(to_complex(p["A"]), to_complex(p["B"]), p["sign"], to_complex(z))


def _channels(p: dict, z) -> ChannelParams:
    return ChannelParams(
        to_complex(p["delta3"]),
        to_complex(p["delta4"]),
        to_complex(p["delta5"]),
        to_complex(p["delta6"]),
        p["sign35"],
        p["sign46"],
        to_complex(z),
    )


def _grouping(p: dict):
    return parse_grouping(p["grouping"]) if p.get("grouping") else None


def _teleport_literal(cfg):
    p = cfg["parameters"]
    ecs = _ecs(p, p["z"])
    patterns = list(FiringPattern) if p["pattern"] == "all" else [FiringPattern(p["pattern"])]
    reports = [run_literal(pat, ecs, cfg["cutoff"]).to_dict() for pat in patterns]
    rows = [[r["pattern"], r["fidelity_before_correction"], r["fidelity_after_correction"]] for r in reports]
    series = {
        "fidelity-vs-pattern": make_series(
            ["pattern", "fidelity_before", "fidelity_after"], ["label", DIMENSIONLESS, DIMENSIONLESS], rows
        )
    }
    return {"reports": reports}, series, {"truncation_tail": coherent_tail(ecs.z, cfg["cutoff"])}


def _teleport_physical(cfg):
    p = cfg["parameters"]
    run = run_physical(
        _ecs(p, p["z"]),
        _channels(p, p["z"]),
        cfg["cutoff"],
        cfg["seed"],
        grouping=_grouping(p),
        max_amplitudes=cfg["budget"]["max_amplitudes"],
    )
    out = run.to_dict()
    rows = [
        [r.pattern.value, r.outcome_probability, r.fidelity_before_correction, r.fidelity_after_correction]
        for r in run.reports
    ]
    series = {
        "pattern-report": make_series(
            ["pattern", "probability", "fidelity_before", "fidelity_after"],
            ["label", DIMENSIONLESS, DIMENSIONLESS, DIMENSIONLESS],
            rows,
        )
    }
    diag = {
        "truncation_tail": coherent_tail(to_complex(p["z"]), cfg["cutoff"]),
        "probability_sum": float(sum(r.outcome_probability for r in run.reports)),
    }
    return out, series, diag


def sweep_point(args) -> dict:
    """One z value of a sweep; module-level so worker processes can import it."""
    cfg, z = args
    p = cfg["parameters"]
    cutoff = cfg["cutoff"]
    ecs = _ecs(p, z)
    if p["protocol"] == "literal":
        reports = [run_literal(pat, ecs, cutoff) for pat in FiringPattern]
        fids = [r.fidelity_after_correction for r in reports]
        return {"z": z, "mean": float(np.mean(fids)), "min": min(fids), "tail": coherent_tail(z, cutoff)}
    run = run_physical(
        ecs, _channels(p, z), cutoff, cfg["seed"], _grouping(p), cfg["budget"]["max_amplitudes"]
    )
    return {
        "z": z,
        "mean": run.mean_fidelity_after(),
        "min": run.min_fidelity_after(),
        "tail": coherent_tail(z, cutoff),
        "probabilities": {r.pattern.value: r.outcome_probability for r in run.reports},
        "trajectory": run.trajectory,
    }


def _sweep(cfg, jobs: int = 1):
    tasks = [(cfg, z) for z in cfg["parameters"]["z_values"]]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(sweep_point, tasks))
    else:
        points = [sweep_point(t) for t in tasks]
    rows = [[pt["z"], pt["mean"], pt["min"], pt["tail"]] for pt in points]
    series = {
        "fidelity-vs-z": make_series(
            ["z", "fidelity_after_mean", "fidelity_after_min", "truncation_tail"],
            [DIMENSIONLESS] * 4,
            rows,
        )
    }
    return {"points": points}, series, {"max_truncation_tail": max(pt["tail"] for pt in points)}


def _qubit_oracle(cfg):
    p = cfg["parameters"]
    channels = ("00", "01", "10", "11") if p["channel"] == "all" else (p["channel"],)
    results = []
    for ch in channels:
        for o in qubit_teleport(to_complex(p["alpha"]), to_complex(p["gamma"]), (int(ch[0]), int(ch[1]))):
            results.append(
                {
                    "channel": ch,
                    "raw_bits": "".join(map(str, o.raw_bits)),
                    "message": "".join(map(str, o.message)),
                    "probability": o.probability,
                    "fidelity": o.fidelity,
                }
            )
    return {"outcomes": results, "min_fidelity": min(r["fidelity"] for r in results)}, {}, {}


def _attenuate(cfg):
    p = cfg["parameters"]
    stages = p["stages"] if p["stages"] is not None else [asdict(s) for s in DEFAULT_STAGES]
    res = attenuate(p["photons"], stages, sample=p["sample"], seed=cfg["seed"])
    rows = [[0, "input", res.n_input]] + [[i + 1, t["stage"], t["photons_after"]] for i, t in enumerate(res.trace)]
    series = {"photons-vs-stage": make_series(["stage_index", "stage", "photons"], ["index", "label", "photons"], rows)}
    outputs = {
        "n_input": res.n_input,
        "surviving": res.surviving,
        "fraction": res.fraction,
        "trace": res.trace,
        "sampled": res.sampled,
    }
    return outputs, series, {}


def _decoherence(cfg):
    p = cfg["parameters"]
    constants = effective_constants(cfg)
    formulas = ["tegmark", "rosa-faber"] if p["formula"] == "both" else [p["formula"]]
    outputs = {"ion_band_s": list(deco.ION_DECOHERENCE_BAND), "constants": constants.as_dict()}
    columns, units, table = ["T"], ["K"], {}
    for name in formulas:
        key = name.replace("-", "_")
        given = p.get(key) or {}
        if name == "tegmark":
            base = deco.default_tegmark() if p["defaults"] else None
            params = deco.TegmarkParams(**{**(asdict(base) if base else {}), **given})
            tau = deco.tau_tegmark(params, constants)
        else:
            base = deco.default_rosa_faber() if p["defaults"] else None
            params = deco.RosaFaberParams(**{**(asdict(base) if base else {}), **given})
            tau = deco.tau_rosa_faber(params, constants)
        entry = {"params": asdict(params), "tau_s": tau, "band": deco.band_annotation(tau)}
        if name == "tegmark" and p["hagan"]:
            entry["tau_hagan_s"] = deco.hagan_adjusted(tau)
        outputs[key] = entry
        rows = deco.sweep(name, params, p["temperatures"], constants)
        columns.append(f"tau_{key}")
        units.append("s")
        table[key] = [tau for _, tau in rows]
        if name == "tegmark" and p["hagan"]:
            columns.append("tau_hagan")
            units.append("s")
            table["hagan"] = [deco.hagan_adjusted(tau) for _, tau in rows]
    rows = []
    for i, T in enumerate(p["temperatures"]):
        rows.append([T] + [table[k][i] for k in table])
    return outputs, {"tau-vs-T": make_series(columns, units, rows)}, {}


def _array_coupling(value):
    if isinstance(value, list):
        return np.array([_array_coupling(v) for v in value], dtype=np.complex128)
    return to_complex(value)


def _hamiltonian(cfg):
    p = cfg["parameters"]
    constants = effective_constants(cfg) if cfg.get("constants") else None
    hbar = constants.hbar if constants else 1.0
    wa = WuAustinParams(
        omegas=tuple(p["omegas"]),
        Omegas=tuple(p["Omegas"]),
        OmegaPrimes=tuple(p["OmegaPrimes"]),
        gamma=_array_coupling(p["gamma"]),
        alpha=_array_coupling(p["alpha"]),
        beta=_array_coupling(p["beta"]),
    )
    if p["model"] == "pokorny-wu":
        pw = PokornyWuParams(
            wa,
            *(to_complex(p[k]) for k in ("phi", "zeta", "sigma", "rho", "xi")),
            m=p["m"],
            n=p["n"],
        )

        def build(c):
            return build_pokorny_wu(pw, c, hbar=hbar)

        ground = [(c, float(scipy.linalg.eigvalsh(build(c).dense())[0])) for c in p["cutoffs"]]
    else:

        def build(c):
            return build_wu_austin(wa, c, hbar=hbar)

        ground = ground_state_diagnostic(wa, p["cutoffs"], hbar=hbar)

    outputs = {"units": "hbar" if constants else "natural (hbar = 1)", "labels": wa.labels(), "ground_state": ground}
    series = {
        "min-eigenvalue-vs-cutoff": make_series(
            ["cutoff", "min_eigenvalue"], ["levels", "energy (hbar*omega units)"], [list(r) for r in ground]
        )
    }
    diagnostics = {}
    ev = p.get("evolve")
    if ev:
        H = build(cfg["cutoff"])
        diagnostics["hermiticity_error"] = H.hermiticity_error()
        initial = ev["initial"] or [0] * wa.mode_count
        state = fock_state(initial, cfg["cutoff"])
        e0 = H.expectation(state)
        rows = [[0.0, e0, 1.0]]
        dt = ev["t"] / ev["steps"]
        current = state
        for k in range(1, ev["steps"] + 1):
            current = evolve(H, current, dt, method=ev["method"], hbar=hbar)
            rows.append([k * dt, H.expectation(current), current.norm()])
        outputs["evolution"] = {"initial": initial, "method": ev["method"], "energy_drift": max(abs(r[1] - e0) for r in rows)}
        series["energy-vs-t"] = make_series(["t", "energy", "norm"], ["time (hbar / energy unit)", "energy (hbar*omega units)", DIMENSIONLESS], rows)
    return outputs, series, diagnostics


DISPATCH = {
    "teleport-literal": _teleport_literal,
    "teleport-physical": _teleport_physical,
    "qubit-oracle": _qubit_oracle,
    "attenuate": _attenuate,
    "decoherence": _decoherence,
    "hamiltonian": _hamiltonian,
}


def run(cfg: dict, jobs: int = 1) -> dict:
    """Execute a canonical, already validated config and return its record."""
    exp = cfg["experiment"]
    if exp == "sweep":
        outputs, series, diagnostics = _sweep(cfg, jobs)
    else:
        outputs, series, diagnostics = DISPATCH[exp](cfg)
    return make_record(cfg, outputs, series, diagnostics, effective_constants(cfg).version)
