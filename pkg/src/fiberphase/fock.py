"""Truncated multimode bosonic Fock spaces and photon spin operators.

The state space is the tensor product of 2 or 3 harmonic modes, each cut
off at occupation ``n_max``.  Two-mode spaces carry the circular modes
(right- and left-handed) directly; three-mode spaces carry the Cartesian
modes b1, b2, b3 of the laboratory frame, from which the circular and
spin operators are assembled.  All matrices are dense complex arrays in
units with hbar = 1.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-12
UNIT_VECTOR_TOL = 1e-12


@dataclass(frozen=True)
class FockSpace:
    """Truncated occupation-number basis for 2 or 3 bosonic modes.

    The basis enumeration is lexicographic in the occupation tuple
    (n1, ..., nm), which makes every matrix and vector layout in this
    package reproducible byte for byte.
    """

    num_modes: int
    n_max: int
    basis: tuple[tuple[int, ...], ...]
    _index: dict[tuple[int, ...], int] = field(repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index_of(self, occupation: tuple[int, ...]) -> int:
        try:
            return self._index[tuple(occupation)]
        except KeyError:
            raise ValueError(f"occupation {occupation!r} not in basis") from None

    def bounded_indices(self) -> np.ndarray:
        """Indices of states with every mode occupation <= n_max - 1.

        Truncation breaks [b, b+] = 1 on the top rung, so canonical
        commutator identities are only exact on this subspace.
        """
        keep = [i for i, occ in enumerate(self.basis) if all(n <= self.n_max - 1 for n in occ)]
        return np.array(keep, dtype=int)

    def complete_sector_indices(self) -> np.ndarray:
        """Indices of states with total occupation <= n_max.

        Total-number sectors up to n_max survive the per-mode cutoff
        intact; rotation identities built from exponentials of the spin
        algebra are exact only there.
        """
        keep = [i for i, occ in enumerate(self.basis) if sum(occ) <= self.n_max]
        return np.array(keep, dtype=int)


def build_space(num_modes: int, n_max: int) -> FockSpace:
    """Build the truncated Fock space with lexicographic basis order."""
    if num_modes not in (2, 3):
        raise ValueError(f"num_modes must be 2 or 3, got {num_modes}")
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    basis = tuple(itertools.product(range(n_max + 1), repeat=num_modes))
    index = {occ: i for i, occ in enumerate(basis)}
    return FockSpace(num_modes=int(num_modes), n_max=int(n_max), basis=basis, _index=index)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix representing an operator on a FockSpace."""

    space: FockSpace
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        d = self.space.dimension
        if entries.shape != (d, d):
            raise ValueError(f"entries shape {entries.shape} does not match dimension {d}")
        object.__setattr__(self, "entries", _readonly(entries))

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.abs(self.entries - self.entries.conj().T).max() <= tol)

    def apply(self, state: "StateVector") -> "StateVector":
        self._check_space(state.space)
        return StateVector(self.space, self.entries @ state.amplitudes)

    def restricted(self, indices: np.ndarray) -> np.ndarray:
        """Submatrix over the given basis indices (rows and columns)."""
        return self.entries[np.ix_(indices, indices)]

    def _check_space(self, other: FockSpace) -> None:
        if other is not self.space and other != self.space:
            raise ValueError("operands live on different Fock spaces")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_space(other.space)
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_space(other.space)
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_space(other.space)
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def to_json(self) -> str:
        """Serialize to the documented JSON layout.

        Layout: basis tuples plus row-major entries, each complex number
        as an [re, im] pair.
        """
        payload = {
            "num_modes": self.space.num_modes,
            "n_max": self.space.n_max,
            "basis": [list(occ) for occ in self.space.basis],
            "entries": [[[z.real, z.imag] for z in row] for row in self.entries],
        }
        return json.dumps(payload, indent=2) + "\n"


def operator_from_json(text: str) -> OperatorMatrix:
    payload = json.loads(text)
    space = build_space(payload["num_modes"], payload["n_max"])
    expected = [list(occ) for occ in space.basis]
    if payload["basis"] != expected:
        raise ValueError("basis enumeration in JSON does not match lexicographic order")
    entries = np.array([[complex(re, im) for re, im in row] for row in payload["entries"]])
    return OperatorMatrix(space, entries)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over a FockSpace basis."""

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.space.dimension,):
            raise ValueError(f"amplitude length {amp.shape} does not match dimension {self.space.dimension}")
        if not np.all(np.isfinite(amp.view(float))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _readonly(amp))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, op: OperatorMatrix) -> complex:
        return complex(np.vdot(self.amplitudes, op.entries @ self.amplitudes))

    def to_json(self) -> str:
        payload = {
            "num_modes": self.space.num_modes,
            "n_max": self.space.n_max,
            "basis": [list(occ) for occ in self.space.basis],
            "amplitudes": [[z.real, z.imag] for z in self.amplitudes],
        }
        return json.dumps(payload, indent=2) + "\n"


def state_from_json(text: str) -> StateVector:
    payload = json.loads(text)
    space = build_space(payload["num_modes"], payload["n_max"])
    amp = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    return StateVector(space, amp)


def vacuum_state(space: FockSpace) -> StateVector:
    amp = np.zeros(space.dimension, dtype=complex)
    amp[space.index_of((0,) * space.num_modes)] = 1.0
    return StateVector(space, amp)


def basis_state(space: FockSpace, occupation: tuple[int, ...]) -> StateVector:
    amp = np.zeros(space.dimension, dtype=complex)
    amp[space.index_of(occupation)] = 1.0
    return StateVector(space, amp)


def annihilation(space: FockSpace, mode: int) -> OperatorMatrix:
    """Annihilation operator for one mode, <n-1|b|n> = sqrt(n)."""
    if not 0 <= mode < space.num_modes:
        raise ValueError(f"mode {mode} out of range for {space.num_modes} modes")
    d = space.dimension
    m = np.zeros((d, d), dtype=complex)
    for i, occ in enumerate(space.basis):
        if occ[mode] > 0:
            target = list(occ)
            target[mode] -= 1
            m[space.index_of(tuple(target)), i] = math.sqrt(occ[mode])
    return OperatorMatrix(space, m)


def creation(space: FockSpace, mode: int) -> OperatorMatrix:
    return annihilation(space, mode).dagger()


def identity(space: FockSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dimension, dtype=complex))


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def circular_operators(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Right- and left-handed circular mode operators (a_R, a_R+, a_L, a_L+).

    In a 2-mode space the two modes are the circular modes themselves.
    In a 3-mode space the circular operators mix the transverse Cartesian
    modes: a_R+ = (b1+ + i b2+)/sqrt(2), a_L+ = (b1+ - i b2+)/sqrt(2).
    """
    if space.num_modes == 2:
        a_r = annihilation(space, 0)
        a_l = annihilation(space, 1)
    else:
        b1 = annihilation(space, 0)
        b2 = annihilation(space, 1)
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        a_r = inv_sqrt2 * (b1 - 1j * b2)
        a_l = inv_sqrt2 * (b1 + 1j * b2)
    return a_r, a_r.dagger(), a_l, a_l.dagger()


def spin_fixed(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Photon spin components in the laboratory frame (3-mode spaces only).

    S1 = -i(b2+ b3 - b3+ b2), S2 = -i(b3+ b1 - b1+ b3),
    S3 = -i(b1+ b2 - b2+ b1).  The triple obeys S x S = iS on the
    occupation-bounded subspace.
    """
    if space.num_modes != 3:
        raise ValueError("spin components require a 3-mode space")
    b = [annihilation(space, m) for m in range(3)]
    bd = [op.dagger() for op in b]
    s1 = -1j * (bd[1] @ b[2] - bd[2] @ b[1])
    s2 = -1j * (bd[2] @ b[0] - bd[0] @ b[2])
    s3 = -1j * (bd[0] @ b[1] - bd[1] @ b[0])
    return s1, s2, s3


def _check_unit(k_hat: np.ndarray) -> np.ndarray:
    k = np.asarray(k_hat, dtype=float)
    if k.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if abs(np.linalg.norm(k) - 1.0) > UNIT_VECTOR_TOL:
        raise ValueError(f"direction must be a unit vector, |k| = {np.linalg.norm(k)!r}")
    return k


def helicity_operator(space: FockSpace, k_hat: np.ndarray) -> OperatorMatrix:
    """Projection of the spin onto the unit propagation direction k_hat."""
    k = _check_unit(k_hat)
    s1, s2, s3 = spin_fixed(space)
    return k[0] * s1 + k[1] * s2 + k[2] * s3


def s3_split(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Per-handedness pieces of S3 in both operator orderings.

    Returns (r_nonnormal, l_nonnormal, r_normal, l_normal) with

        r_normal    =  a_R+ a_R          l_normal    = -a_L+ a_L
        r_nonnormal =  a_R+ a_R + 1/2    l_nonnormal = -(a_L+ a_L + 1/2)

    The half-quantum shifts come from applying the exchange identity
    a a+ = a+ a + 1 before truncation, so the two orderings sum to the
    same matrix exactly: the zero-point shifts of the two handednesses
    cancel in the total.
    """
    a_r, a_r_dag, a_l, a_l_dag = circular_operators(space)
    half = 0.5 * identity(space)
    r_normal = a_r_dag @ a_r
    l_normal = -1.0 * (a_l_dag @ a_l)
    r_nonnormal = r_normal + half
    l_nonnormal = l_normal - half
    return r_nonnormal, l_nonnormal, r_normal, l_normal


def _rotation_to_direction(k_hat: np.ndarray) -> np.ndarray:
    """Rotation matrix taking the z axis to k_hat.

    Minimal rotation about z x k_hat; at the poles the gauge is fixed to
    the identity (k = +z) or a half turn about x (k = -z).
    """
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.clip(k_hat[2], -1.0, 1.0))
    axis = np.cross(z, k_hat)
    s = np.linalg.norm(axis)
    if s < 1e-12:
        if c > 0.0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    axis = axis / s
    angle = math.atan2(s, c)
    return _axis_angle_matrix(axis, angle)


def _axis_angle_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def polarization_triad(k_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two real unit polarization vectors transverse to k_hat.

    Gauge: (e1, e2) = (x, y) at k = z, transported elsewhere by the
    minimal rotation taking z to k_hat.  By construction e1 x e2 = k_hat,
    so the antisymmetric combinations e_i f_j - e_j f_i reproduce the
    spherical components of k_hat.
    """
    k = _check_unit(k_hat)
    rot = _rotation_to_direction(k)
    return rot[:, 0].copy(), rot[:, 1].copy()


def build_photon_state(space: FockSpace, n_r: int, n_l: int, k_hat: np.ndarray | None = None) -> StateVector:
    """Normalized state with n_r right- and n_l left-handed photons.

    In 3-mode spaces the circular quanta occupy the transverse modes of
    the direction k_hat (default +z); the combined Cartesian occupations
    must fit under the cutoff, i.e. n_r + n_l <= n_max.  In 2-mode
    spaces the occupations fill the two circular modes directly.
    """
    if n_r < 0 or n_l < 0:
        raise ValueError("photon numbers must be non-negative")
    if space.num_modes == 2:
        if k_hat is not None:
            raise ValueError("a propagation direction only applies to 3-mode spaces")
        if n_r > space.n_max or n_l > space.n_max:
            raise ValueError(
                f"cutoff overflow: occupations ({n_r}, {n_l}) exceed n_max = {space.n_max}"
            )
        return basis_state(space, (n_r, n_l))

    if n_r + n_l > space.n_max:
        raise ValueError(
            f"cutoff overflow: n_r + n_l = {n_r + n_l} photons need n_max >= {n_r + n_l}, "
            f"space has n_max = {space.n_max}"
        )
    if k_hat is None:
        a_r_dag = circular_operators(space)[1]
        a_l_dag = circular_operators(space)[3]
    else:
        k = _check_unit(k_hat)
        e1, e2 = polarization_triad(k)
        bd = [creation(space, m) for m in range(3)]
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        a_r_dag = inv_sqrt2 * sum(((e1[m] + 1j * e2[m]) * bd[m] for m in range(3)), start=0.0 * bd[0])
        a_l_dag = inv_sqrt2 * sum(((e1[m] - 1j * e2[m]) * bd[m] for m in range(3)), start=0.0 * bd[0])
    psi = vacuum_state(space)
    for _ in range(n_r):
        psi = a_r_dag.apply(psi)
    for _ in range(n_l):
        psi = a_l_dag.apply(psi)
    amp = psi.amplitudes / math.sqrt(math.factorial(n_r) * math.factorial(n_l))
    return StateVector(space, amp)
