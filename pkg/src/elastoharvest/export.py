"""CSV and report writers. Every file opens with a provenance comment header."""

from pathlib import Path
import csv
import io

import numpy as np
import yaml

from . import __version__

__all__ = [
    "header_lines",
    "write_csv",
    "write_report",
    "envelope_rows",
    "write_envelope",
    "write_trajectory",
    "write_trace",
    "write_sweep",
    "write_cycle_phases",
    "cycle_report",
]


def header_lines(config_hash="none", seed=None, extra=()):
    lines = [f"elastoharvest {__version__} config_sha256={config_hash} seed={seed}"]
    lines.extend(extra)
    return lines


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, header=()):
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def write_report(path, data, header=()):
    text = "".join(f"# {line}\n" for line in header)
    text += yaml.safe_dump(_plain(data), sort_keys=False)
    Path(path).write_text(text)
    return path


def envelope_rows(env):
    for i, lp in enumerate(env.lam_p):
        for j, la in enumerate(env.lam_act):
            yield lp, la, env.verdicts[i, j], env.limiting_field[i, j]


def write_envelope(directory, env, header=()):
    directory = Path(directory)
    paths = [write_csv(directory / "envelope.csv",
                       ["lam_p", "lam_act", "verdict", "limiting_field_v_per_m"],
                       envelope_rows(env), header)]
    for name, curve in (("mechanical", env.mechanical_boundary),
                        ("breakdown", env.breakdown_boundary),
                        ("pullin", env.pullin_boundary)):
        paths.append(write_csv(directory / f"envelope_{name}_boundary.csv", ["lam_p", "lam_act"],
                               curve.tolist(), header))
    return paths


def write_trajectory(path, traj, header=()):
    extra = [f"scheme={traj.scheme} dt_s={traj.dt!r} aborted={str(traj.aborted).lower()}"
             + (f" reason={traj.abort_reason}" if traj.aborted else "")]
    return write_csv(path, ["t_s", "lambda", "lambda_dot"],
                     zip(traj.t, traj.lam, traj.lam_dot), list(header) + extra)


def write_trace(path, trace, header=()):
    extra = [f"dt_s={trace.dt!r} refinement_required={str(trace.refinement_required).lower()}"]
    return write_csv(path, ["t_s", "v_active_v", "i_shunt_a"],
                     zip(trace.t, trace.v_active, trace.i_shunt), list(header) + extra)


def write_sweep(path, rows, header=()):
    return write_csv(
        path,
        ["lam_p", "lam_act", "e_field_v_per_m", "net_j", "produced_j", "loss_j", "limiting_criterion"],
        ((r.design.lam_p, r.design.lam_act, r.design.e_field, r.net, r.produced, r.loss, r.limiting)
         for r in rows),
        header,
    )


def write_cycle_phases(path, result, header=()):
    return write_csv(
        path,
        ["phase", "lambda", "thickness_m", "capacitance_f", "voltage_v", "e_field_v_per_m"],
        ((p.phase, p.lam, p.thickness, p.capacitance, p.voltage, p.e_field) for p in result.phases),
        header,
    )


def cycle_report(result):
    return {
        "c_max_f": result.c_max,
        "c_min_f": result.c_min,
        "v_max_v": result.v_max,
        "v_min_v": result.v_min,
        "produced_j": result.produced,
        "conduction_loss_j": result.conduction_loss,
        "net_j": result.net,
        "energy_density_j_per_kg": result.energy_density,
        "lam_p": result.design.lam_p,
        "lam_act": result.design.lam_act,
        "lam_min": result.lam_min,
        "poling_field_v_per_m": result.design.e_field,
        "phases": [
            {"phase": p.phase, "lambda": p.lam, "thickness_m": p.thickness,
             "capacitance_f": p.capacitance, "voltage_v": p.voltage, "e_field_v_per_m": p.e_field}
            for p in result.phases
        ],
        "warnings": list(result.warnings),
    }
