"""
Run configuration: one YAML file per run, validated up front.

Every block is checked in full before anything runs, and all problems are
reported together. Unknown keys are rejected so typos do not silently fall
back to defaults. Relative file paths are resolved against the directory
holding the config file.
"""

from dataclasses import dataclass, field
from pathlib import Path
import hashlib
import json
import math

import yaml

from .errors import ConfigError
from .failure import DEFAULT_K_BD, BreakdownTable
from .material import DEFAULT_MATERIAL_FILE, load_material, material_from_dict, material_to_dict
from .membrane import geometry_from_dict

__all__ = ["RunConfig", "parse_config", "config_hash", "COMMAND_BLOCKS"]

COMMAND_BLOCKS = ("cycle", "envelope", "dynamics", "circuit", "sweep", "optimize", "fit")
TOP_KEYS = ("material", "geometry", "breakdown", "output_dir", "seed") + COMMAND_BLOCKS

_MODE_KEYS = {
    "constant_voltage": ("bool", False, None),
    "constant_charge": ("bool", False, None),
    "phase_durations_s": ("durations", False, (1.0,) * 5),
    "include_viscoelasticity": ("bool", False, False),
}

# key: (kind, required, default)
SCHEMAS = {
    "cycle": {
        "lam_p": ("stretch", True, None),
        "lam_act": ("stretch", False, 1.0),
        "e_field_v_per_m": ("nonneg", False, 0.0),
        "poling_voltage_v": ("nonneg", False, None),
        "actuation_voltage_v": ("nonneg", False, None),
        "measured": ("measured", False, None),
        "frequencies_hz": ("nonneg_list", False, ()),
        **_MODE_KEYS,
    },
    "envelope": {
        "lam_p_range": ("stretch_range", False, (1.0, 6.0)),
        "lam_act_range": ("stretch_range", False, (1.0, 6.0)),
        "resolution": ("resolution2", False, (51, 51)),
        "workers": ("pos_int", False, 1),
    },
    "dynamics": {
        "e_field_v_per_m": ("field_schedule", False, 0.0),
        "gravity_m_s2": ("float", False, 0.0),
        "t_end_s": ("pos", True, None),
        "dt_s": ("pos", True, None),
        "initial_lambda": ("pos", False, 1.0),
        "initial_lambda_dot": ("float", False, 0.0),
        "prestretch": ("stretch", False, 1.0),
        "frozen_coefficients": ("bool", False, False),
        "select_step": ("bool", False, False),
    },
    "circuit": {
        "r_e_ohm": ("pos", True, None),
        "r_mes_ohm": ("pos", True, None),
        "converter_gain": ("pos", False, 2000.0),
        "r_load_ohm": ("pos", False, None),
        "source": ("source_rows", True, None),
        "capacitance_profile": ("pair_rows", False, None),
        "stretch_profile": ("pair_rows", False, None),
        "r_p_ohm": ("pos", False, None),
        "t_end_s": ("pos", True, None),
        "dt_s": ("pos", True, None),
        "v0_v": ("nonneg", False, 0.0),
        "noise_std_a": ("nonneg", False, 0.0),
        "estimates": ("estimates", False, ()),
        "energy_voltage_v": ("pos", False, None),
    },
    "sweep": {
        "lam_p_range": ("stretch_range", True, None),
        "resolution": ("pos_int", False, 26),
        "workers": ("pos_int", False, 1),
        **_MODE_KEYS,
    },
    "optimize": {
        "lam_p_range": ("stretch_range", True, None),
        "lam_act_range": ("stretch_range", True, None),
        "e_field_range_v_per_m": ("nonneg_range", True, None),
        "resolution": ("resolution3", False, (9, 9, 9)),
        "workers": ("pos_int", False, 1),
        **_MODE_KEYS,
    },
    "fit": {
        "tensile_csv": ("path", False, None),
        "tensile_mode": ("choice:equibiaxial,uniaxial", False, "equibiaxial"),
        "relaxation_csv": ("path", False, None),
        "n_terms": ("pos_int", False, 1),
    },
}


@dataclass
class RunConfig:
    """A validated run configuration.

    ``blocks`` maps each command block present in the file to its
    validated values, with defaults filled in.
    """

    path: Path
    material: object
    material_source: str
    geometry: object
    k_bd: object = DEFAULT_K_BD
    output_dir: Path = None
    seed: int = 0
    blocks: dict = field(default_factory=dict)
    hash: str = ""

    def block(self, name):
        if name not in self.blocks:
            raise ConfigError(f"config has no '{name}' block")
        return self.blocks[name]


def _strip_workers(obj):
    if isinstance(obj, dict):
        return {k: _strip_workers(v) for k, v in obj.items() if k != "workers"}
    if isinstance(obj, list):
        return [_strip_workers(v) for v in obj]
    return obj


def config_hash(raw, material):
    """SHA-256 over the canonical config with the resolved material inlined.

    Thread counts do not change results, so ``workers`` keys are left out.
    """
    payload = dict(_strip_workers(raw))
    payload["material"] = material_to_dict(material)
    text = json.dumps(payload, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _num(value):
    if isinstance(value, bool):
        raise TypeError("boolean where a number was expected")
    out = float(value)
    if not math.isfinite(out):
        raise ValueError("must be finite")
    return out


def _convert(kind, value, where, base_dir, errors):
    """Return the converted value, appending to ``errors`` on failure."""
    def fail(msg):
        errors.append(f"{where}: {msg}, got {value!r}")

    try:
        if kind == "bool":
            if not isinstance(value, bool):
                return fail("expected true or false")
            return value
        if kind in ("float", "pos", "nonneg", "stretch"):
            x = _num(value)
            if kind == "pos" and x <= 0:
                return fail("must be positive")
            if kind == "nonneg" and x < 0:
                return fail("must be non-negative")
            if kind == "stretch" and x < 1:
                return fail("stretch must be >= 1")
            return x
        if kind == "pos_int":
            if isinstance(value, bool) or int(value) != value or value < 1:
                return fail("expected a positive integer")
            return int(value)
        if kind in ("stretch_range", "nonneg_range"):
            lo, hi = (_num(v) for v in value)
            floor = 1.0 if kind == "stretch_range" else 0.0
            if lo < floor:
                return fail(f"lower bound must be >= {floor:g}")
            if hi < lo:
                return fail("range is inverted")
            return (lo, hi)
        if kind in ("resolution2", "resolution3"):
            n = int(kind[-1])
            vals = [value] * n if not isinstance(value, (list, tuple)) else list(value)
            if len(vals) != n or any(isinstance(v, bool) or int(v) != v or v < 1 for v in vals):
                return fail(f"expected a positive integer or a list of {n}")
            return tuple(int(v) for v in vals)
        if kind == "durations":
            vals = tuple(_num(v) for v in value)
            if len(vals) != 5 or any(v < 0 for v in vals):
                return fail("expected five non-negative durations")
            return vals
        if kind == "nonneg_list":
            vals = tuple(_num(v) for v in value)
            if any(v < 0 for v in vals):
                return fail("entries must be non-negative")
            return vals
        if kind == "field_schedule":
            if isinstance(value, (list, tuple)):
                rows = tuple((_num(a), _num(b)) for a, b in value)
                if any(b < 0 for _, b in rows) or any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
                    return fail("expected increasing [t_s, field] rows with non-negative fields")
                return rows
            x = _num(value)
            if x < 0:
                return fail("must be non-negative")
            return x
        if kind == "pair_rows":
            rows = tuple((_num(a), _num(b)) for a, b in value)
            if len(rows) < 2 or any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
                return fail("expected at least two [t_s, value] rows with increasing times")
            if any(b <= 0 for _, b in rows):
                return fail("profile values must be positive")
            return rows
        if kind == "source_rows":
            rows = []
            for row in value:
                t, v, conn = row
                if not isinstance(conn, bool):
                    return fail("third column (connected) must be true or false")
                rows.append((_num(t), _num(v), conn))
            if not rows:
                return fail("source schedule is empty")
            return tuple(rows)
        if kind == "measured":
            if not isinstance(value, dict) or set(value) != {"c_max_f", "c_min_f", "voltage_v"}:
                return fail("expected keys c_max_f, c_min_f, voltage_v")
            out = {k: _num(v) for k, v in value.items()}
            if any(v <= 0 for v in out.values()):
                return fail("measured values must be positive")
            if out["c_max_f"] < out["c_min_f"]:
                return fail("c_max_f must be >= c_min_f")
            return out
        if kind == "estimates":
            out = []
            for i, item in enumerate(value):
                keys = {"window_s", "v_known_v", "q_initial_c"}
                if not isinstance(item, dict) or not {"window_s", "v_known_v"} <= set(item) <= keys:
                    errors.append(f"{where}[{i}]: expected keys window_s, v_known_v (q_initial_c optional)")
                    continue
                a, b = (_num(v) for v in item["window_s"])
                if b <= a:
                    errors.append(f"{where}[{i}].window_s: window is empty or inverted")
                    continue
                v_known = _num(item["v_known_v"])
                if v_known <= 0:
                    errors.append(f"{where}[{i}].v_known_v: must be positive")
                    continue
                out.append({"window_s": (a, b), "v_known_v": v_known,
                            "q_initial_c": _num(item.get("q_initial_c", 0.0))})
            return tuple(out)
        if kind == "path":
            p = Path(str(value))
            if not p.is_absolute():
                p = base_dir / p
            if not p.is_file():
                return fail("file not found")
            return p
        if kind.startswith("choice:"):
            options = kind.split(":", 1)[1].split(",")
            if value not in options:
                return fail(f"expected one of {options}")
            return value
    except (TypeError, ValueError) as exc:
        return fail(f"malformed value ({exc})")
    raise AssertionError(f"unknown schema kind {kind}")


def _check_mode(values, name, errors):
    cv, cc = values.pop("constant_voltage"), values.pop("constant_charge")
    if cv and cc:
        errors.append(f"{name}: constant_voltage and constant_charge are mutually exclusive")
    elif cv is False and cc is False:
        errors.append(f"{name}: constant_voltage and constant_charge cannot both be false")
    values["mode"] = "constant_charge" if (cc or cv is False) else "constant_voltage"


def _block(name, data, base_dir, errors):
    schema = SCHEMAS[name]
    if not isinstance(data, dict):
        errors.append(f"{name}: expected a mapping")
        return None
    for key in data:
        if key not in schema:
            errors.append(f"{name}: unknown key '{key}'")
    values = {}
    for key, (kind, required, default) in schema.items():
        if key not in data or data[key] is None:
            if required:
                errors.append(f"{name}: missing key '{key}'")
            values[key] = default
            continue
        values[key] = _convert(kind, data[key], f"{name}.{key}", base_dir, errors)
    if "constant_voltage" in schema:
        _check_mode(values, name, errors)
    if name == "circuit":
        has_c = values["capacitance_profile"] is not None
        has_s = values["stretch_profile"] is not None
        if has_c == has_s:
            errors.append("circuit: give exactly one of capacitance_profile or stretch_profile")
        if has_c and values["r_p_ohm"] is None:
            errors.append("circuit: r_p_ohm is required with capacitance_profile")
    if name == "fit" and data.get("tensile_csv") is None and data.get("relaxation_csv") is None:
        errors.append("fit: give tensile_csv, relaxation_csv or both")
    return values


def _material(value, base_dir, errors):
    try:
        if value is None or value == "default":
            return load_material(DEFAULT_MATERIAL_FILE), "default"
        if isinstance(value, dict):
            return material_from_dict(value, "material"), "inline"
        p = Path(str(value))
        if not p.is_absolute():
            p = base_dir / p
        if not p.is_file():
            errors.append(f"material: file not found: {value}")
            return None, str(value)
        return load_material(p), str(value)
    except ConfigError as exc:
        errors.extend(exc.errors)
        return None, str(value)


def _breakdown(value, errors):
    if value is None:
        return DEFAULT_K_BD
    if not isinstance(value, dict) or len(value) != 1 or not set(value) <= {"k_bd_v", "table"}:
        errors.append("breakdown: expected exactly one of k_bd_v or table")
        return None
    if "k_bd_v" in value:
        try:
            k = _num(value["k_bd_v"])
        except (TypeError, ValueError):
            k = -1.0
        if k <= 0:
            errors.append(f"breakdown.k_bd_v: must be positive, got {value['k_bd_v']!r}")
            return None
        return k
    try:
        rows = [(_num(a), _num(b)) for a, b in value["table"]]
        return BreakdownTable(tuple(r[0] for r in rows), tuple(r[1] for r in rows))
    except (TypeError, ValueError) as exc:
        errors.append(f"breakdown.table: expected [thickness_m, field_v_per_m] rows ({exc})")
    except ConfigError as exc:
        errors.extend(f"breakdown.table: {e}" for e in exc.errors)
    return None


def parse_config(path, seed=None):
    """Read and validate a run configuration.

    Raises ``ConfigError`` listing every problem found. ``seed`` overrides
    the file's seed.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path.name}: not valid YAML ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path.name}: top level must be a mapping")
    base_dir = path.parent
    errors = [f"unknown top-level key '{k}'" for k in raw if k not in TOP_KEYS]

    material, source = _material(raw.get("material"), base_dir, errors)
    geometry = None
    if "geometry" not in raw:
        errors.append("missing block 'geometry'")
    else:
        try:
            geometry = geometry_from_dict(raw["geometry"])
        except ConfigError as exc:
            errors.extend(exc.errors)
    k_bd = _breakdown(raw.get("breakdown"), errors)

    file_seed = raw.get("seed", 0)
    if isinstance(file_seed, bool) or not isinstance(file_seed, int) or file_seed < 0:
        errors.append(f"seed: expected a non-negative integer, got {file_seed!r}")
        file_seed = 0
    blocks = {}
    for name in COMMAND_BLOCKS:
        if name in raw:
            blocks[name] = _block(name, raw[name], base_dir, errors)

    if errors:
        raise ConfigError(errors)
    out = raw.get("output_dir")
    out = None if out is None else (base_dir / str(out) if not Path(str(out)).is_absolute() else Path(out))
    return RunConfig(
        path=path,
        material=material,
        material_source=source,
        geometry=geometry,
        k_bd=k_bd,
        output_dir=out,
        seed=int(file_seed if seed is None else seed),
        blocks=blocks,
        hash=config_hash(raw, material),
    )
