"""Declarative scenario runner: geometry + state + orderings to artifacts.

A scenario config names a fibre geometry, a photon state, an operator
ordering and the numerical budgets.  Running it produces a per-step CSV
(t, lambda, gamma, phi_closed, phi_total, phi_dyn, phi_geo, norm,
lvn_residual), a JSON summary with the phase breakdown, guard metrics
and a machine-readable pass/fail block, and optional gyrotropic
dispersion verdicts.  Identical configs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import quadrature
from .fock import build_space, build_photon_state, spin_fixed, s3_split, StateVector
from .geometry import (
    cone_trajectory,
    load_path_csv,
    make_helix,
    motion_identity_residual,
    solid_angle,
    spherical_angles,
    tangent_trajectory,
    CLOSURE_TOL,
)
from .media import GyrotropicMedium, classify, refractive_indices
from .phases import anholonomy_integral, evolve_state, extract_phases, phase_series, wrap_angle

ORDERINGS = ("normal", "nonnormal_r", "nonnormal_l", "nonnormal_total")
SWEEP_PARAMETERS = ("lambda", "turns", "n_R", "n_L", "epsilon2")

NORM_DRIFT_TOL = 1e-9
LVN_TOL = 1e-6
MOTION_TOL = 1e-6
DEFAULT_TOLERANCE = 1e-4
MIN_STEPS = 32


class ConfigError(ValueError):
    """Invalid scenario configuration; carries the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class HelixGeometry:
    radius: float
    pitch_per_turn: float
    turns: float


@dataclass(frozen=True)
class ConeGeometry:
    polar_angle: float
    turns: float


@dataclass(frozen=True)
class SampledGeometry:
    path_csv: str


@dataclass(frozen=True)
class MediumSpec:
    epsilon1: float
    epsilon2: float
    epsilon3: float
    mu: float
    omega: float


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    geometry: HelixGeometry | ConeGeometry | SampledGeometry
    n_r: int | None
    n_l: int | None
    amplitudes: tuple[complex, ...] | None
    ordering: str
    n_max: int
    steps: int | None
    t_end: float
    tolerance: float
    medium: MediumSpec | None


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(where, f"unknown key(s) {', '.join(unknown)}")


def _get_number(mapping: dict, key: str, where: str) -> float:
    if key not in mapping:
        raise ConfigError(f"{where}.{key}", "missing required key")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _get_int(mapping: dict, key: str, where: str) -> int:
    if key not in mapping:
        raise ConfigError(f"{where}.{key}", "missing required key")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key}", f"expected an integer, got {value!r}")
    return value


def _parse_geometry(data, base_dir: Path) -> HelixGeometry | ConeGeometry | SampledGeometry:
    if not isinstance(data, dict):
        raise ConfigError("geometry", "expected a mapping")
    kind = data.get("kind")
    if kind == "helix":
        _check_keys(data, {"kind", "radius", "pitch_per_turn", "turns"}, "geometry")
        radius = _get_number(data, "radius", "geometry")
        pitch = _get_number(data, "pitch_per_turn", "geometry")
        turns = _get_number(data, "turns", "geometry")
        if radius <= 0:
            raise ConfigError("geometry.radius", "must be positive")
        if turns <= 0:
            raise ConfigError("geometry.turns", "must be positive")
        return HelixGeometry(radius, pitch, turns)
    if kind == "cone":
        _check_keys(data, {"kind", "polar_angle", "turns"}, "geometry")
        polar = _get_number(data, "polar_angle", "geometry")
        turns = _get_number(data, "turns", "geometry")
        if not 0.0 <= polar <= math.pi:
            raise ConfigError("geometry.polar_angle", "must lie in [0, pi]")
        if turns <= 0:
            raise ConfigError("geometry.turns", "must be positive")
        return ConeGeometry(polar, turns)
    if kind == "sampled":
        _check_keys(data, {"kind", "path_csv"}, "geometry")
        if "path_csv" not in data or not isinstance(data["path_csv"], str):
            raise ConfigError("geometry.path_csv", "missing CSV file name")
        return SampledGeometry(str(base_dir / data["path_csv"]))
    raise ConfigError("geometry.kind", f"must be helix, cone or sampled, got {kind!r}")


def _parse_state(data) -> tuple[int | None, int | None, tuple[complex, ...] | None]:
    if not isinstance(data, dict):
        raise ConfigError("state", "expected a mapping")
    if "amplitudes" in data:
        _check_keys(data, {"amplitudes"}, "state")
        raw = data["amplitudes"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("state.amplitudes", "expected a non-empty list of [re, im] pairs")
        amps = []
        for i, pair in enumerate(raw):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
            ):
                raise ConfigError("state.amplitudes", f"entry {i} is not an [re, im] pair")
            amps.append(complex(pair[0], pair[1]))
        return None, None, tuple(amps)
    _check_keys(data, {"n_r", "n_l"}, "state")
    n_r = _get_int(data, "n_r", "state")
    n_l = _get_int(data, "n_l", "state")
    if n_r < 0 or n_l < 0:
        raise ConfigError("state", "photon numbers must be non-negative")
    return n_r, n_l, None


def _parse_medium(data) -> MediumSpec:
    if not isinstance(data, dict):
        raise ConfigError("medium", "expected a mapping")
    _check_keys(data, {"epsilon1", "epsilon2", "epsilon3", "mu", "omega"}, "medium")
    eps1 = _get_number(data, "epsilon1", "medium")
    eps2 = _get_number(data, "epsilon2", "medium")
    eps3 = _get_number(data, "epsilon3", "medium")
    mu = _get_number(data, "mu", "medium")
    omega = _get_number(data, "omega", "medium") if "omega" in data else 1.0
    if omega <= 0:
        raise ConfigError("medium.omega", "must be positive")
    return MediumSpec(eps1, eps2, eps3, mu, omega)


def parse_config(data: dict, name: str, base_dir: Path | None = None) -> ScenarioConfig:
    """Validate a raw config mapping; unknown keys are rejected."""
    base_dir = base_dir or Path(".")
    if not isinstance(data, dict):
        raise ConfigError("config", "expected a mapping")
    allowed = {"geometry", "state", "ordering", "n_max", "steps", "t_end", "tolerance", "medium"}
    _check_keys(data, allowed, "config")
    for key in ("geometry", "state"):
        if key not in data:
            raise ConfigError(key, "missing required section")

    geometry = _parse_geometry(data["geometry"], base_dir)
    n_r, n_l, amplitudes = _parse_state(data["state"])

    ordering = data.get("ordering", "normal")
    if ordering not in ORDERINGS:
        raise ConfigError("ordering", f"must be one of {', '.join(ORDERINGS)}, got {ordering!r}")
    if amplitudes is not None and ordering in ("nonnormal_r", "nonnormal_l"):
        raise ConfigError(
            "ordering",
            "per-handedness orderings need an occupation-number state, not raw amplitudes",
        )

    n_max = _get_int(data, "n_max", "config") if "n_max" in data else 2
    if n_max < 1:
        raise ConfigError("n_max", f"must be >= 1, got {n_max}")

    steps = None
    if isinstance(geometry, SampledGeometry):
        if "steps" in data:
            raise ConfigError("steps", "derived from the sampled path file; do not set it")
    else:
        steps = _get_int(data, "steps", "config") if "steps" in data else 4096
        if steps < MIN_STEPS:
            raise ConfigError("steps", f"must be >= {MIN_STEPS}, got {steps}")

    t_end = _get_number(data, "t_end", "config") if "t_end" in data else 1.0
    if not 0.0 < t_end <= 1.0:
        raise ConfigError("t_end", "must lie in (0, 1]")
    if isinstance(geometry, SampledGeometry) and t_end != 1.0:
        raise ConfigError("t_end", "not supported with sampled geometry")

    tolerance = _get_number(data, "tolerance", "config") if "tolerance" in data else DEFAULT_TOLERANCE
    if tolerance <= 0:
        raise ConfigError("tolerance", "must be positive")

    medium = _parse_medium(data["medium"]) if "medium" in data else None

    if n_r is not None and n_r + n_l > n_max:
        raise ConfigError(
            "state",
            f"cutoff overflow: n_r + n_l = {n_r + n_l} photons need n_max >= {n_r + n_l}",
        )

    return ScenarioConfig(
        name=name,
        geometry=geometry,
        n_r=n_r,
        n_l=n_l,
        amplitudes=amplitudes,
        ordering=ordering,
        n_max=n_max,
        steps=steps,
        t_end=t_end,
        tolerance=tolerance,
        medium=medium,
    )


def _config_echo(config: ScenarioConfig) -> dict:
    g = config.geometry
    if isinstance(g, HelixGeometry):
        geometry = {"kind": "helix", "radius": g.radius, "pitch_per_turn": g.pitch_per_turn, "turns": g.turns}
    elif isinstance(g, ConeGeometry):
        geometry = {"kind": "cone", "polar_angle": g.polar_angle, "turns": g.turns}
    else:
        geometry = {"kind": "sampled", "path_csv": Path(g.path_csv).name}
    if config.amplitudes is not None:
        state = {"amplitudes": [[z.real, z.imag] for z in config.amplitudes]}
    else:
        state = {"n_r": config.n_r, "n_l": config.n_l}
    echo = {
        "geometry": geometry,
        "state": state,
        "ordering": config.ordering,
        "n_max": config.n_max,
        "t_end": config.t_end,
        "tolerance": config.tolerance,
    }
    if config.steps is not None:
        echo["steps"] = config.steps
    if config.medium is not None:
        m = config.medium
        echo["medium"] = {
            "epsilon1": m.epsilon1,
            "epsilon2": m.epsilon2,
            "epsilon3": m.epsilon3,
            "mu": m.mu,
            "omega": m.omega,
        }
    return echo


def _build_trajectory(config: ScenarioConfig):
    g = config.geometry
    if isinstance(g, HelixGeometry):
        samples = 2 * config.steps + 1
        path = make_helix(g.radius, g.pitch_per_turn, g.turns * config.t_end, samples)
        return tangent_trajectory(path)
    if isinstance(g, ConeGeometry):
        samples = 2 * config.steps + 1
        return cone_trajectory(g.polar_angle, g.turns * config.t_end, samples)
    path = load_path_csv(g.path_csv)
    traj = tangent_trajectory(path)
    if len(traj.times) % 2 == 0:
        raise ConfigError("geometry.path_csv", "sampled path needs an odd number of rows for RK4 panes")
    return traj


def _s3_expectations(config: ScenarioConfig) -> tuple[float, float]:
    """(attributed, total) spin-3 expectations for the configured state."""
    space = build_space(2, max(config.n_r, config.n_l, 1))
    state = build_photon_state(space, config.n_r, config.n_l)
    r_nn, l_nn, r_n, l_n = s3_split(space)
    variants = {
        "normal": r_n + l_n,
        "nonnormal_r": r_nn,
        "nonnormal_l": l_nn,
        "nonnormal_total": r_nn + l_nn,
    }
    attributed = float(state.expectation(variants[config.ordering]).real)
    total = float(state.expectation(variants["normal"]).real)
    return attributed, total


def _initial_state(config: ScenarioConfig, space, k0: np.ndarray) -> StateVector:
    if config.amplitudes is not None:
        amps = np.array(config.amplitudes, dtype=complex)
        if len(amps) != space.dimension:
            raise ConfigError(
                "state.amplitudes",
                f"expected {space.dimension} amplitudes for n_max = {config.n_max}, got {len(amps)}",
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-6:
            raise ConfigError("state.amplitudes", f"state norm {norm!r} is not 1 within 1e-6")
        return StateVector(space, amps / norm)
    return build_photon_state(space, config.n_r, config.n_l, k_hat=k0)


def evaluate_scenario(config: ScenarioConfig) -> dict:
    """Run one scenario in memory and return its summary mapping."""
    traj = _build_trajectory(config)
    angles = spherical_angles(traj)
    anholonomy = anholonomy_integral(angles)

    k = traj.tangents / np.linalg.norm(traj.tangents, axis=1)[:, None]
    closure_gap = float(np.linalg.norm(k[-1] - k[0]))
    closed = closure_gap < CLOSURE_TOL
    solid = solid_angle(angles) if closed else None
    motion = motion_identity_residual(traj)

    space = build_space(3, config.n_max)
    spin = spin_fixed(space)
    psi0 = _initial_state(config, space, k[0])

    if config.amplitudes is None:
        s3_attr, s3_total = _s3_expectations(config)
    else:
        s1, s2, s3 = spin
        i0 = k[0, 0] * s1.entries + k[0, 1] * s2.entries + k[0, 2] * s3.entries
        s3_total = float(np.real(np.vdot(psi0.amplitudes, i0 @ psi0.amplitudes)))
        s3_attr = s3_total

    result = evolve_state(psi0, traj, spin)
    series = phase_series(result, traj, spin)
    breakdown = extract_phases(result, traj, spin, s3_expectation=s3_attr)

    phi_closed_total = s3_total * anholonomy
    difference = abs(wrap_angle(breakdown.geometric_phase - phi_closed_total))
    norm_drift = float(np.abs(result.norms - 1.0).max())
    lvn_max = float(result.lvn_residuals.max())

    checks = [
        {
            "name": "numerical_vs_closed_form",
            "value": difference,
            "threshold": config.tolerance,
            "pass": bool(difference <= config.tolerance),
        },
        {
            "name": "norm_drift",
            "value": norm_drift,
            "threshold": NORM_DRIFT_TOL,
            "pass": bool(norm_drift <= NORM_DRIFT_TOL),
        },
        {
            "name": "lvn_residual",
            "value": lvn_max,
            "threshold": LVN_TOL,
            "pass": bool(lvn_max <= LVN_TOL),
        },
        {
            "name": "motion_identity",
            "value": motion,
            "threshold": MOTION_TOL,
            "pass": bool(motion <= MOTION_TOL),
        },
    ]
    if config.n_r == 0 and config.n_l == 0:
        vacuum_sum = 0.5 * anholonomy + (-0.5 * anholonomy)
        checks.append(
            {"name": "vacuum_cancellation", "value": abs(vacuum_sum), "threshold": 0.0, "pass": vacuum_sum == 0.0}
        )

    summary = {
        "name": config.name,
        "config": _config_echo(config),
        "trajectory": {
            "samples": len(traj.times),
            "closure_gap": closure_gap,
            "closed": closed,
            "solid_angle": solid,
            "motion_identity_residual": motion,
        },
        "spin_expectations": {
            "ordering": config.ordering,
            "s3_attributed": s3_attr,
            "s3_total": s3_total,
        },
        "closed_form": {
            "anholonomy_integral": anholonomy,
            "phi_attributed": s3_attr * anholonomy,
            "phi_total": phi_closed_total,
            "vacuum": {
                "right": 0.5 * anholonomy,
                "left": -0.5 * anholonomy,
                "sum": 0.5 * anholonomy + (-0.5 * anholonomy),
            },
        },
        "numerical": {
            "steps": result.steps,
            "total_phase": breakdown.total_phase,
            "dynamical_phase": breakdown.dynamical_phase,
            "geometric_phase": breakdown.geometric_phase,
            "geometric_phase_mod_2pi": breakdown.geometric_phase_mod_2pi,
            "difference_vs_closed_total": difference,
            "norm_drift": norm_drift,
            "lvn_max_residual": lvn_max,
            "max_h_dt_bound": result.max_h_dt,
        },
        "checks": checks,
        "status": "pass" if all(c["pass"] for c in checks) else "fail",
    }

    if config.medium is not None:
        m = config.medium
        medium = GyrotropicMedium(m.epsilon1, m.epsilon2, m.epsilon3, m.mu)
        n_plus_sq, n_minus_sq = refractive_indices(medium)
        plus, minus = classify(medium, m.omega)
        summary["medium"] = {
            "n_plus_sq": n_plus_sq,
            "n_minus_sq": n_minus_sq,
            "verdicts": [
                {
                    "handedness": v.handedness,
                    "n_squared": v.n_squared,
                    "status": v.status,
                    "propagation_constant": v.propagation_constant,
                }
                for v in (plus, minus)
            ],
        }

    summary["_series"] = {
        "angles": angles,
        "phase": series,
        "lvn": result.lvn_residuals,
        "s3_attributed": s3_attr,
    }
    return summary


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_run_csv(summary: dict, csv_path: Path) -> None:
    angles = summary["_series"]["angles"]
    series = summary["_series"]["phase"]
    lvn = summary["_series"]["lvn"]
    s3_attr = summary["_series"]["s3_attributed"]
    integrand = angles.gamma_dot * (1.0 - np.cos(angles.lam))
    cum = quadrature.cumulative_dense(integrand, angles.times)
    boundary = np.arange(0, len(angles.times), 2)
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,lambda,gamma,phi_closed,phi_total,phi_dyn,phi_geo,norm,lvn_residual\n")
        for j, i in enumerate(boundary):
            row = [
                angles.times[i],
                angles.lam[i],
                angles.gamma[i],
                s3_attr * cum[i],
                series["total"][j],
                series["dynamical"][j],
                series["geometric"][j],
                series["norms"][j],
                lvn[j],
            ]
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class RunOutcome:
    exit_code: int
    summary: dict
    files: tuple[str, ...]


def run_scenario(config: ScenarioConfig, out_dir) -> RunOutcome:
    """Evaluate a scenario and write its CSV and JSON artifacts."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = evaluate_scenario(config)
    csv_path = out_dir / f"{config.name}.csv"
    json_path = out_dir / f"{config.name}.json"
    _write_run_csv(summary, csv_path)
    public = {k: v for k, v in summary.items() if not k.startswith("_")}
    _write_json(public, json_path)
    code = 0 if public["status"] == "pass" else 1
    return RunOutcome(code, public, (str(csv_path), str(json_path)))


_PITCH_60 = 2.0 * math.pi / math.tan(math.pi / 3.0)

BUILTIN_SCENARIOS: dict[str, tuple[tuple[str, dict], ...]] = {
    # Constant polar angle pi/4, one turn, one right-handed photon.
    "chiao-helix-45": (
        (
            "chiao-helix-45",
            {
                "geometry": {"kind": "helix", "radius": 1.0, "pitch_per_turn": 2.0 * math.pi, "turns": 1.0},
                "state": {"n_r": 1, "n_l": 0},
                "ordering": "normal",
                "n_max": 2,
                "steps": 8192,
                "tolerance": 1e-4,
            },
        ),
    ),
    # Vacuum state, per-handedness attributions, polar angle pi/3.
    "vacuum-pair": (
        (
            "vacuum-pair-right",
            {
                "geometry": {"kind": "helix", "radius": 1.0, "pitch_per_turn": _PITCH_60, "turns": 1.0},
                "state": {"n_r": 0, "n_l": 0},
                "ordering": "nonnormal_r",
                "n_max": 2,
                "steps": 2048,
                "tolerance": 1e-4,
            },
        ),
        (
            "vacuum-pair-left",
            {
                "geometry": {"kind": "helix", "radius": 1.0, "pitch_per_turn": _PITCH_60, "turns": 1.0},
                "state": {"n_r": 0, "n_l": 0},
                "ordering": "nonnormal_l",
                "n_max": 2,
                "steps": 2048,
                "tolerance": 1e-4,
            },
        ),
    ),
    # Three photons, net handedness +1, polar angle pi/3.
    "multiphoton-21": (
        (
            "multiphoton-21",
            {
                "geometry": {"kind": "helix", "radius": 1.0, "pitch_per_turn": _PITCH_60, "turns": 1.0},
                "state": {"n_r": 2, "n_l": 1},
                "ordering": "normal",
                "n_max": 3,
                "steps": 4096,
                "tolerance": 1e-4,
            },
        ),
    ),
    # One photon plus the gyroelectric medium that blocks one handedness.
    "gyro-appendix": (
        (
            "gyro-appendix",
            {
                "geometry": {"kind": "cone", "polar_angle": math.pi / 4.0, "turns": 1.0},
                "state": {"n_r": 1, "n_l": 0},
                "ordering": "normal",
                "n_max": 2,
                "steps": 2048,
                "tolerance": 1e-4,
                "medium": {"epsilon1": -1.0, "epsilon2": 2.0, "epsilon3": 1.0, "mu": 1.0, "omega": 1.0},
            },
        ),
    ),
}


def apply_overrides(raw: dict, steps=None, n_max=None, tolerance=None) -> dict:
    out = {k: v for k, v in raw.items()}
    if steps is not None:
        out["steps"] = steps
    if n_max is not None:
        out["n_max"] = n_max
    if tolerance is not None:
        out["tolerance"] = tolerance
    return out


def run_builtin(name: str, out_dir, steps=None, n_max=None, tolerance=None) -> int:
    """Run a named built-in scenario (possibly a group) and write artifacts."""
    if name not in BUILTIN_SCENARIOS:
        known = ", ".join(sorted(BUILTIN_SCENARIOS))
        raise ConfigError("scenario", f"unknown scenario {name!r}; known: {known}")
    out_dir = Path(out_dir)
    members = BUILTIN_SCENARIOS[name]
    outcomes = []
    for label, raw in members:
        config = parse_config(apply_overrides(raw, steps, n_max, tolerance), label)
        outcomes.append(run_scenario(config, out_dir))
    code = max(o.exit_code for o in outcomes)
    if len(members) > 1:
        group: dict = {
            "name": name,
            "members": [o.summary["name"] for o in outcomes],
            "statuses": [o.summary["status"] for o in outcomes],
        }
        attributed = [o.summary["closed_form"]["phi_attributed"] for o in outcomes]
        if len(attributed) == 2:
            pair_sum = attributed[0] + attributed[1]
            group["pair"] = {
                "phi_attributed": attributed,
                "sum": pair_sum,
                "cancels": pair_sum == 0.0,
            }
            if pair_sum != 0.0:
                code = max(code, 1)
        group["status"] = "pass" if code == 0 else "fail"
        _write_json(group, out_dir / f"{name}.json")
    return code


def _sweep_base_turns(config: ScenarioConfig) -> float:
    g = config.geometry
    if isinstance(g, (HelixGeometry, ConeGeometry)):
        return g.turns
    raise ConfigError("sweep", "lambda/turns sweeps need helix or cone geometry")


def _sweep_base_polar(config: ScenarioConfig) -> float:
    g = config.geometry
    if isinstance(g, ConeGeometry):
        return g.polar_angle
    if isinstance(g, HelixGeometry):
        return math.atan2(2.0 * math.pi * g.radius, g.pitch_per_turn)
    raise ConfigError("sweep", "lambda/turns sweeps need helix or cone geometry")


def _variant(config: ScenarioConfig, geometry) -> ScenarioConfig:
    return ScenarioConfig(
        name=config.name,
        geometry=geometry,
        n_r=config.n_r,
        n_l=config.n_l,
        amplitudes=config.amplitudes,
        ordering=config.ordering,
        n_max=config.n_max,
        steps=config.steps,
        t_end=config.t_end,
        tolerance=config.tolerance,
        medium=config.medium,
    )


def _sweep_s3(config: ScenarioConfig, n_r: int, n_l: int) -> float:
    space = build_space(2, max(n_r, n_l, 1))
    state = build_photon_state(space, n_r, n_l)
    r_nn, l_nn, r_n, l_n = s3_split(space)
    variants = {
        "normal": r_n + l_n,
        "nonnormal_r": r_nn,
        "nonnormal_l": l_nn,
        "nonnormal_total": r_nn + l_nn,
    }
    return float(state.expectation(variants[config.ordering]).real)


def sweep(config: ScenarioConfig, parameter: str, values, out_dir) -> tuple[int, str]:
    """Write one closed-form (or dispersion) table row per parameter value.

    Phase sweeps report the quadrature route only; the dual numerical
    vs closed-form verification is run_scenario's job.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError("sweep", f"unknown parameter {parameter!r}; known: {', '.join(SWEEP_PARAMETERS)}")
    values = list(values)
    if not values:
        raise ConfigError("sweep", "no values supplied")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{config.name}_sweep_{parameter}.csv"

    if parameter == "epsilon2":
        if config.medium is None:
            raise ConfigError("sweep", "epsilon2 sweep needs a medium block in the config")
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(
                "parameter,value,n_plus_sq,n_minus_sq,plus_status,minus_status,plus_constant,minus_constant\n"
            )
            for v in values:
                v = float(v)
                m = config.medium
                medium = GyrotropicMedium(m.epsilon1, v, m.epsilon3, m.mu)
                n_plus_sq, n_minus_sq = refractive_indices(medium)
                plus, minus = classify(medium, m.omega)
                fh.write(
                    f"{parameter},{_fmt(v)},{_fmt(n_plus_sq)},{_fmt(n_minus_sq)},"
                    f"{plus.status},{minus.status},{_fmt(plus.propagation_constant)},{_fmt(minus.propagation_constant)}\n"
                )
        return 0, str(csv_path)

    if config.amplitudes is not None:
        raise ConfigError("sweep", "phase sweeps need an occupation-number state")
    rows = []
    for v in values:
        n_r, n_l = config.n_r, config.n_l
        if parameter == "lambda":
            v = float(v)
            if not 0.0 <= v <= math.pi:
                raise ConfigError("sweep", f"lambda value {v!r} outside [0, pi]")
            geometry = ConeGeometry(polar_angle=v, turns=_sweep_base_turns(config))
        elif parameter == "turns":
            v = float(v)
            if v <= 0:
                raise ConfigError("sweep", f"turns value {v!r} must be positive")
            geometry = ConeGeometry(polar_angle=_sweep_base_polar(config), turns=v)
        else:  # n_R or n_L
            if isinstance(v, float) and not v.is_integer():
                raise ConfigError("sweep", f"{parameter} value {v!r} must be a non-negative integer")
            v = int(v)
            if v < 0:
                raise ConfigError("sweep", f"{parameter} value {v!r} must be a non-negative integer")
            if parameter == "n_R":
                n_r = v
            else:
                n_l = v
            geometry = config.geometry
        traj = _build_trajectory(_variant(config, geometry))
        anholonomy = anholonomy_integral(spherical_angles(traj))
        s3 = _sweep_s3(config, n_r, n_l)
        rows.append((v, s3, anholonomy, s3 * anholonomy))
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("parameter,value,s3_expectation,anholonomy_integral,phi_closed\n")
        for v, s3, anholonomy, phi in rows:
            value_text = str(v) if isinstance(v, int) else _fmt(v)
            fh.write(f"{parameter},{value_text},{_fmt(s3)},{_fmt(anholonomy)},{_fmt(phi)}\n")
    return 0, str(csv_path)
