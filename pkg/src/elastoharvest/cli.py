"""
Command-line runner.

    elastoharvest <subcommand> --config run.yaml [--out DIR] [--seed N]

Each subcommand reads its block from the config, writes CSV/YAML files to
the output directory and a ``run_summary.yaml``. Failures write
``error_report.json`` and return exit status 2 (config), 3 (infeasible
design) or 4 (numerical failure).
"""

import argparse
from dataclasses import replace
import json
from pathlib import Path
import sys

from . import __version__
from . import export
from .circuit import (
    CircuitParams,
    estimate_capacitance,
    piecewise_profile,
    profile_from_stretch,
    scavenged_from_trace,
    simulate_trace,
)
from .config import COMMAND_BLOCKS, parse_config
from .cycle import CycleSpec, produced_energy, run_quasistatic_cycle
from .dynamics import DynamicsConfig, integrate, mean_power, select_time_step
from .errors import ElastoHarvestError
from .failure import DesignPoint, envelope_grid
from .fitting import fit_prony, fit_yeoh, read_curve_csv
from .material import dump_material
from .optimizer import maximize_energy, sweep_prestrain

__all__ = ["build_parser", "dispatch", "main"]


def _template(block):
    return CycleSpec(DesignPoint(1.0), block["mode"], None, block["phase_durations_s"],
                     block["include_viscoelasticity"], None)


def run_cycle(cfg, out, header):
    b = cfg.block("cycle")
    spec = CycleSpec(
        DesignPoint(b["lam_p"], b["lam_act"], b["e_field_v_per_m"]),
        b["mode"],
        b["poling_voltage_v"],
        b["phase_durations_s"],
        b["include_viscoelasticity"],
        b["actuation_voltage_v"],
    )
    result = run_quasistatic_cycle(cfg.material, cfg.geometry, spec, cfg.k_bd)
    report = export.cycle_report(result)
    report["mode"] = spec.mode.value
    report["include_viscoelasticity"] = spec.include_viscoelasticity
    if b["measured"] is not None:
        m = b["measured"]
        report["measured"] = {
            "c_max_f": m["c_max_f"],
            "c_min_f": m["c_min_f"],
            "voltage_v": m["voltage_v"],
            "produced_j": produced_energy(m["c_max_f"], m["c_min_f"], m["voltage_v"], m["voltage_v"]),
        }
    if b["frequencies_hz"]:
        report["mean_power_w"] = [{"frequency_hz": f, "power_w": mean_power(result.net, f)}
                                  for f in b["frequencies_hz"]]
    export.write_report(out / "cycle_report.yaml", report, header)
    export.write_cycle_phases(out / "cycle_phases.csv", result, header)
    return {"net_j": result.net, "produced_j": result.produced, "warnings": list(result.warnings)}


def run_envelope(cfg, out, header):
    b = cfg.block("envelope")
    env = envelope_grid(cfg.material, cfg.geometry, b["lam_p_range"], b["lam_act_range"],
                        b["resolution"], cfg.k_bd, b["workers"])
    export.write_envelope(out, env, header)
    return {"counts": env.counts(), "relaxation": "instantaneous coefficients (t = 0)"}


def run_dynamics(cfg, out, header):
    b = cfg.block("dynamics")
    dcfg = DynamicsConfig(
        e_field=b["e_field_v_per_m"],
        gravity=b["gravity_m_s2"],
        t_end=b["t_end_s"],
        dt=b["dt_s"],
        initial=(b["initial_lambda"], b["initial_lambda_dot"]),
        prestretch=b["prestretch"],
        frozen_coefficients=b["frozen_coefficients"],
    )
    if b["select_step"]:
        dcfg, traj = select_time_step(cfg.material, cfg.geometry, dcfg)
    else:
        traj = integrate(cfg.material, cfg.geometry, dcfg)
    export.write_trajectory(out / "trajectory.csv", traj, header)
    return {"dt_s": traj.dt, "steps": int(traj.t.size - 1), "aborted": traj.aborted,
            "abort_reason": traj.abort_reason, "final_lambda": float(traj.lam[-1])}


def run_circuit(cfg, out, header):
    b = cfg.block("circuit")
    circ = CircuitParams(b["r_e_ohm"], b["r_mes_ohm"], b["source"], b["converter_gain"], b["r_load_ohm"])
    if b["capacitance_profile"] is not None:
        times, caps = zip(*b["capacitance_profile"])
        profile = piecewise_profile(times, caps, b["r_p_ohm"])
    else:
        times, lams = zip(*b["stretch_profile"])
        profile = profile_from_stretch(cfg.material, cfg.geometry, times, lams)
        if b["r_p_ohm"] is not None:
            profile = piecewise_profile(times, [profile.c(t) for t in times], b["r_p_ohm"])
    trace = simulate_trace(circ, profile, b["t_end_s"], b["dt_s"], b["v0_v"],
                           b["noise_std_a"], seed=cfg.seed)
    export.write_trace(out / "trace.csv", trace, header)
    estimates = []
    for est in b["estimates"]:
        c = estimate_capacitance(trace, est["window_s"], est["v_known_v"], profile.r,
                                 b["r_load_ohm"], est["q_initial_c"])
        estimates.append({"window_s": list(est["window_s"]), "capacitance_f": c})
    report = {"refinement_required": trace.refinement_required,
              "halving_change": trace.halving_change, "estimates": estimates}
    if b["energy_voltage_v"] is not None and len(estimates) >= 2:
        caps = [e["capacitance_f"] for e in estimates]
        report["scavenged_j"] = scavenged_from_trace(max(caps), min(caps), b["energy_voltage_v"])
    export.write_report(out / "circuit_report.yaml", report, header)
    return report


def run_sweep(cfg, out, header):
    b = cfg.block("sweep")
    res = sweep_prestrain(cfg.material, cfg.geometry, b["lam_p_range"], b["resolution"],
                          cfg.k_bd, _template(b), b["workers"])
    export.write_sweep(out / "sweep.csv", res.rows, header)
    best = res.best_row
    return {"best_lam_p": best.design.lam_p, "best_net_j": best.net}


def run_optimize(cfg, out, header):
    b = cfg.block("optimize")
    bounds = (b["lam_p_range"], b["lam_act_range"], b["e_field_range_v_per_m"])
    design, result = maximize_energy(cfg.material, cfg.geometry, bounds, b["resolution"],
                                     cfg.k_bd, _template(b), b["workers"])
    row = (design.lam_p, design.lam_act, design.e_field, result.net, result.produced,
           result.conduction_loss, "feasible")
    export.write_csv(out / "optimum.csv",
                     ["lam_p", "lam_act", "e_field_v_per_m", "net_j", "produced_j", "loss_j",
                      "limiting_criterion"], [row], header)
    return {"lam_p": design.lam_p, "lam_act": design.lam_act, "e_field_v_per_m": design.e_field,
            "net_j": result.net}


def run_fit(cfg, out, header):
    b = cfg.block("fit")
    mat = cfg.material
    summary = {}
    if b["tensile_csv"] is not None:
        yf = fit_yeoh(read_curve_csv(b["tensile_csv"]), b["tensile_mode"])
        mat = mat.with_yeoh(yf.coefficients)
        summary["yeoh"] = {"relative_residual": yf.relative_residual, "n_points": yf.n_points,
                           "mode": yf.mode}
    if b["relaxation_csv"] is not None:
        pf = fit_prony(read_curve_csv(b["relaxation_csv"]), b["n_terms"])
        mat = replace(mat, prony=pf.terms)
        summary["prony"] = {"relative_residual": pf.relative_residual, "n_points": pf.n_points}
    dump_material(mat, out / "fitted_material.yaml", header="\n".join(header))
    return summary


COMMANDS = {
    "cycle": run_cycle,
    "envelope": run_envelope,
    "dynamics": run_dynamics,
    "circuit": run_circuit,
    "sweep": run_sweep,
    "optimize": run_optimize,
    "fit": run_fit,
}


def _error_report(exc, subcommand):
    report = {
        "status": "error",
        "subcommand": subcommand,
        "error": type(exc).__name__,
        "module": type(exc).__module__ if not isinstance(exc, ElastoHarvestError) else None,
        "exit_code": getattr(exc, "exit_code", 1),
        "messages": list(getattr(exc, "errors", [str(exc)])),
    }
    tb = exc.__traceback__
    while tb is not None and tb.tb_next is not None:
        tb = tb.tb_next
    if tb is not None:
        report["module"] = Path(tb.tb_frame.f_code.co_filename).stem
    if getattr(exc, "criterion", None):
        report["criterion"] = exc.criterion
    if getattr(exc, "counts", None):
        report["counts"] = exc.counts
    return report


def dispatch(config, subcommand, out_dir=None):
    """Run ``subcommand`` with a parsed config; returns the exit status."""
    if subcommand not in COMMANDS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    out = Path(out_dir or config.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    header = export.header_lines(config.hash, config.seed)
    try:
        summary = COMMANDS[subcommand](config, out, header)
    except ElastoHarvestError as exc:
        report = _error_report(exc, subcommand)
        (out / "error_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        return report["exit_code"]
    export.write_report(out / "run_summary.yaml",
                        {"status": "ok", "subcommand": subcommand, "version": __version__,
                         "config": config.path.name, "material": config.material_source,
                         "seed": config.seed, "result": summary}, header)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="elastoharvest",
                                     description="Dielectric-elastomer scavenger simulations.")
    parser.add_argument("--version", action="version", version=f"elastoharvest {__version__}")
    parser.add_argument("subcommand", choices=COMMAND_BLOCKS)
    parser.add_argument("--config", required=True, help="run configuration (YAML)")
    parser.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, seed=args.seed)
    except ElastoHarvestError as exc:
        report = _error_report(exc, args.subcommand)
        report["module"] = "config"
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "error_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return report["exit_code"]
    return dispatch(cfg, args.subcommand, args.out)


if __name__ == "__main__":
    sys.exit(main())
