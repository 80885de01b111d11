"""Fibre paths in 3-D and the spherical kinematics of their tangents.

The photon wave vector follows the local fibre tangent, so everything
downstream only needs the unit tangent k(t), its time derivative, and
the unwrapped spherical angles of k(t).  Helix and cone constructors
produce those analytically; sampled point lists fall back to
second-order finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .fock import _rotation_to_direction

POLE_SIN_TOL = 1e-9
CLOSURE_TOL = 1e-6
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FiberPath:
    """A fibre centreline, either parametric helix or sampled points."""

    kind: str
    radius: float | None = None
    pitch_per_turn: float | None = None
    turns: float | None = None
    samples: int | None = None
    times: np.ndarray | None = None
    points: np.ndarray | None = None


def make_helix(radius: float, pitch_per_turn: float, turns: float, samples: int) -> FiberPath:
    """Helix about the z axis; tangent polar angle is atan2(2*pi*r, pitch)."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if turns <= 0:
        raise ValueError(f"turns must be positive, got {turns}")
    if samples < 64:
        raise ValueError(f"need at least 64 samples, got {samples}")
    return FiberPath(
        kind="helix",
        radius=float(radius),
        pitch_per_turn=float(pitch_per_turn),
        turns=float(turns),
        samples=int(samples),
    )


def sampled_path(times: np.ndarray, points: np.ndarray) -> FiberPath:
    """Path from ordered 3-D samples with strictly increasing parameter."""
    times = np.asarray(times, dtype=float)
    points = np.asarray(points, dtype=float)
    if times.ndim != 1 or points.shape != (len(times), 3):
        raise ValueError("times must be (n,) and points (n, 3)")
    if len(times) < 8:
        raise ValueError(f"need at least 8 samples, got {len(times)}")
    if np.any(np.diff(times) <= 0):
        raise ValueError("parameter values must be strictly increasing")
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    if np.any(seg == 0.0):
        raise ValueError("consecutive path points must be distinct")
    return FiberPath(kind="sampled", times=times.copy(), points=points.copy())


def helix_points(path: FiberPath) -> tuple[np.ndarray, np.ndarray]:
    """Positions of a helix path on its uniform parameter grid."""
    if path.kind != "helix":
        raise ValueError("helix_points requires a helix path")
    t = np.linspace(0.0, 1.0, path.samples)
    theta = TWO_PI * path.turns * t
    c = path.pitch_per_turn / TWO_PI
    pts = np.column_stack(
        [path.radius * np.cos(theta), path.radius * np.sin(theta), c * theta]
    )
    return t, pts


def load_path_csv(filename) -> FiberPath:
    """Read a sampled path from CSV with header t,x,y,z."""
    with open(filename, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t,x,y,z":
            raise ValueError(f"expected CSV header 't,x,y,z', got {header!r}")
        rows = []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"line {line_no}: expected 4 columns, got {len(parts)}")
            rows.append([float(p) for p in parts])
    data = np.array(rows, dtype=float)
    if data.size == 0:
        raise ValueError("path CSV contains no data rows")
    return sampled_path(data[:, 0], data[:, 1:4])


@dataclass(frozen=True)
class TangentTrajectory:
    """Time-sampled tangent field k(t) and its derivative."""

    times: np.ndarray
    tangents: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        tangents = np.asarray(self.tangents, dtype=float)
        derivatives = np.asarray(self.derivatives, dtype=float)
        n = len(times)
        if tangents.shape != (n, 3) or derivatives.shape != (n, 3):
            raise ValueError("tangents and derivatives must be (n, 3)")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "tangents", tangents)
        object.__setattr__(self, "derivatives", derivatives)

    def max_unit_deviation(self) -> float:
        return float(np.abs(np.linalg.norm(self.tangents, axis=1) - 1.0).max())

    def scaled(self, factor: float) -> "TangentTrajectory":
        """Same trajectory with all tangent magnitudes multiplied."""
        return TangentTrajectory(self.times, self.tangents * factor, self.derivatives * factor)


def _derivative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Second-order finite differences on a possibly nonuniform grid."""
    n = len(times)
    if n < 3:
        raise ValueError("need at least three samples to differentiate")
    out = np.empty_like(values)
    h = np.diff(times)
    h1 = h[:-1][:, None]
    h2 = h[1:][:, None]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * values[:-2]
        + (h2 - h1) / (h1 * h2) * values[1:-1]
        + h1 / (h2 * (h1 + h2)) * values[2:]
    )
    a, b = h[0], h[1]
    out[0] = (
        -(2 * a + b) / (a * (a + b)) * values[0]
        + (a + b) / (a * b) * values[1]
        - a / (b * (a + b)) * values[2]
    )
    a, b = h[-2], h[-1]
    out[-1] = (
        b / (a * (a + b)) * values[-3]
        - (a + b) / (a * b) * values[-2]
        + (a + 2 * b) / (b * (a + b)) * values[-1]
    )
    return out


def tangent_trajectory(path: FiberPath, frame_align: bool = False) -> TangentTrajectory:
    """Unit tangent field of a path.

    Helix paths get exact tangents and derivatives from the parametric
    form; sampled paths are differentiated numerically.  With
    frame_align a fixed rotation is applied so k(0) = (0, 0, 1).
    """
    if path.kind == "helix":
        t = np.linspace(0.0, 1.0, path.samples)
        theta = TWO_PI * path.turns * t
        c = path.pitch_per_turn / TWO_PI
        den = math.hypot(path.radius, c)
        tangents = np.column_stack(
            [
                -path.radius * np.sin(theta) / den,
                path.radius * np.cos(theta) / den,
                np.full_like(theta, c / den),
            ]
        )
        rate = TWO_PI * path.turns
        derivatives = np.column_stack(
            [
                -path.radius * np.cos(theta) * rate / den,
                -path.radius * np.sin(theta) * rate / den,
                np.zeros_like(theta),
            ]
        )
    elif path.kind == "sampled":
        t = path.times
        velocity = _derivative(path.points, t)
        speed = np.linalg.norm(velocity, axis=1)
        if np.any(speed < 1e-15):
            raise ValueError("degenerate path: vanishing velocity sample")
        tangents = velocity / speed[:, None]
        derivatives = _derivative(tangents, t)
    else:
        raise ValueError(f"unknown path kind {path.kind!r}")

    if frame_align:
        rot = _rotation_to_direction(tangents[0] / np.linalg.norm(tangents[0])).T
        tangents = tangents @ rot.T
        derivatives = derivatives @ rot.T
    return TangentTrajectory(times=t, tangents=tangents, derivatives=derivatives)


def trajectory_from_tangents(times: np.ndarray, tangents: np.ndarray) -> TangentTrajectory:
    """Trajectory from direct tangent samples, derivatives by differencing."""
    times = np.asarray(times, dtype=float)
    tangents = np.asarray(tangents, dtype=float)
    if tangents.ndim != 2 or tangents.shape[1] != 3 or len(tangents) != len(times):
        raise ValueError("tangents must be (n, 3) matching times")
    norms = np.linalg.norm(tangents, axis=1)
    if np.any(norms < 1e-15):
        raise ValueError("tangent with zero magnitude")
    unit = tangents / norms[:, None]
    return TangentTrajectory(times=times, tangents=unit, derivatives=_derivative(unit, times))


def cone_trajectory(
    polar_angle: float,
    turns: float,
    samples: int,
    azimuth_offset: float = 0.0,
) -> TangentTrajectory:
    """Analytic tangent field precessing about z at constant polar angle."""
    if not 0.0 <= polar_angle <= math.pi:
        raise ValueError(f"polar angle must lie in [0, pi], got {polar_angle}")
    if turns <= 0:
        raise ValueError(f"turns must be positive, got {turns}")
    if samples < 3:
        raise ValueError("need at least 3 samples")
    t = np.linspace(0.0, 1.0, samples)
    gamma = azimuth_offset + TWO_PI * turns * t
    sl, cl = math.sin(polar_angle), math.cos(polar_angle)
    tangents = np.column_stack([sl * np.cos(gamma), sl * np.sin(gamma), np.full_like(gamma, cl)])
    rate = TWO_PI * turns
    derivatives = np.column_stack(
        [-sl * np.sin(gamma) * rate, sl * np.cos(gamma) * rate, np.zeros_like(gamma)]
    )
    return TangentTrajectory(times=t, tangents=tangents, derivatives=derivatives)


@dataclass(frozen=True)
class AngleTrajectory:
    """Unwrapped spherical angles of a tangent trajectory.

    lam is the polar angle in [0, pi]; gamma is the azimuth, kept
    continuous rather than reduced mod 2*pi; gamma_dot is the azimuth
    rate derived from the trajectory's own tangent-derivative data.
    """

    times: np.ndarray
    lam: np.ndarray
    gamma: np.ndarray
    gamma_dot: np.ndarray

    def reconstruct_tangents(self) -> np.ndarray:
        sl = np.sin(self.lam)
        return np.column_stack([sl * np.cos(self.gamma), sl * np.sin(self.gamma), np.cos(self.lam)])


def _wrap_increment(delta: float) -> float:
    d = (delta + math.pi) % TWO_PI - math.pi
    if d == -math.pi:
        d = math.pi
    return d


def spherical_angles(traj: TangentTrajectory) -> AngleTrajectory:
    """Polar/azimuth angles of the tangents, azimuth unwrapped.

    Where the tangent passes within POLE_SIN_TOL of a pole the azimuth is
    frozen at its previous value and its rate forced to zero; the phase
    integrand vanishes there, so the convention cannot bias any phase.

    The azimuth rate comes from the identity
    gamma_dot = (k1 kdot2 - k2 kdot1) / (k1^2 + k2^2), which is scale
    invariant and carries exactly the accuracy of the stored derivative
    data instead of adding another differencing layer.
    """
    raw_k = np.asarray(traj.tangents, dtype=float)
    norms = np.linalg.norm(raw_k, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("tangent with zero magnitude")
    k = raw_k / norms[:, None]
    lam = np.arccos(np.clip(k[:, 2], -1.0, 1.0))
    sin_lam = np.hypot(k[:, 0], k[:, 1])
    pole = sin_lam < POLE_SIN_TOL

    n = len(lam)
    gamma = np.empty(n)
    prev = 0.0
    for i in range(n):
        if pole[i]:
            gamma[i] = prev
        else:
            raw = math.atan2(k[i, 1], k[i, 0])
            gamma[i] = prev + _wrap_increment(raw - prev) if i > 0 else raw
        prev = gamma[i]

    kd = np.asarray(traj.derivatives, dtype=float)
    transverse_sq = raw_k[:, 0] ** 2 + raw_k[:, 1] ** 2
    gamma_dot = np.zeros(n)
    live = ~pole
    gamma_dot[live] = (
        raw_k[live, 0] * kd[live, 1] - raw_k[live, 1] * kd[live, 0]
    ) / transverse_sq[live]
    return AngleTrajectory(times=traj.times.copy(), lam=lam, gamma=gamma, gamma_dot=gamma_dot)


def motion_identity_residual(traj: TangentTrajectory) -> float:
    """Max-norm residual of kdot + k x (k x kdot) / |k|^2 over the samples.

    Vanishes (up to differencing error) for any smooth constant-magnitude
    tangent field; order one when the magnitude drifts.
    """
    k = traj.tangents
    kd = traj.derivatives
    ksq = np.einsum("ij,ij->i", k, k)
    if np.any(ksq == 0.0):
        raise ValueError("tangent with zero magnitude")
    res = kd + np.cross(k, np.cross(k, kd)) / ksq[:, None]
    return float(np.linalg.norm(res, axis=1).max())


def solid_angle(angles: AngleTrajectory) -> float:
    """Solid angle swept by a closed tangent trace on the unit sphere.

    Computed as the integral of gamma_dot * (1 - cos(lam)); for a
    constant polar angle over one azimuth cycle this is 2*pi*(1-cos(lam)).
    """
    k = angles.reconstruct_tangents()
    gap = float(np.linalg.norm(k[-1] - k[0]))
    if gap >= CLOSURE_TOL:
        raise ValueError(f"tangent trace not closed: endpoint gap {gap:.3e}")
    integrand = angles.gamma_dot * (1.0 - np.cos(angles.lam))
    return quadrature.integrate(integrand, angles.times)


def save_angles_csv(angles: AngleTrajectory, filename) -> None:
    """Write the angle trajectory as CSV with header t,lambda,gamma,gamma_dot."""
    with open(filename, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,lambda,gamma,gamma_dot\n")
        for t, l, g, gd in zip(angles.times, angles.lam, angles.gamma, angles.gamma_dot):
            fh.write(f"{t:.17g},{l:.17g},{g:.17g},{gd:.17g}\n")
