"""Spin-1/2 operator algebra and shared register representations.

Conventions fixed once here:
  * |0> is the +1/2 eigenstate of I_z (spin up); kets are ordered
    |I>|S> with the I (methylene-like) spin first.
  * Operators act on the 2^N dimensional register space via tensor-product
    embedding with identities on the untouched spins.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np

MAX_SPINS = 8

_SINGLE = {
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex),
    "+": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    "-": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
}


@lru_cache(maxsize=None)
def _spin_operator_cached(n_spins, index, axis):
    op = np.eye(1, dtype=complex)
    for k in range(n_spins):
        op = np.kron(op, _SINGLE[axis] if k == index else np.eye(2))
    op.setflags(write=False)
    return op


def spin_operator(n_spins, index, axis):
    """Single-spin operator embedded at position `index` in an N-spin register.

    axis is one of 'x', 'y', 'z', '+', '-'. Returns a read-only array;
    copy before mutating.
    """
    if not 0 <= index < n_spins:
        raise IndexError(f"spin index {index} out of range for {n_spins} spins")
    if n_spins > MAX_SPINS:
        raise ValueError(f"register limited to {MAX_SPINS} spins")
    if axis not in _SINGLE:
        raise ValueError(f"unknown axis {axis!r}")
    return _spin_operator_cached(n_spins, index, axis)


def identity(n_spins):
    return np.eye(2**n_spins, dtype=complex)


def basis_state(label):
    """Pure density matrix for a computational basis ket, e.g. '01' -> |0>|1><...|.

    '0' is spin up (+1/2 along z).
    """
    if not label or any(c not in "01" for c in label):
        raise ValueError(f"basis label must be a nonempty 0/1 string, got {label!r}")
    dim = 2 ** len(label)
    idx = int(label, 2)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


def expectation(rho, op):
    return np.trace(rho @ op)


def check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-10, eig_tol=1e-10):
    """Validate Hermiticity, unit trace and positivity of a density matrix."""
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -eig_tol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def check_unitary(u, tol=1e-10):
    u = np.asarray(u)
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > tol:
        raise ValueError(f"matrix is not unitary (deviation {dev:.3e})")
    return u


def _fold_theta(theta_d):
    # The orientation enters only through sin(2*theta) and sin^2(theta);
    # fold into [0, pi/2] where both coupling amplitudes are non-negative.
    theta = math.fmod(theta_d, math.pi)
    if theta < 0:
        theta += math.pi
    if theta > math.pi / 2:
        theta = math.pi - theta
    return theta


@dataclass(frozen=True)
class SpinSystem:
    """Register geometry and frequencies for a homonuclear spin pair under MAS.

    gamma    gyromagnetic ratio, rad s^-1 T^-1
    r        internuclear distance, m
    theta_d  angle between internuclear vector and spinning axis, rad
             (folded into [0, pi/2])
    phi      initial rotor phase, rad
    omega_r  spinning angular frequency, rad/s
    offsets  per-spin resonance offsets from the RF carrier, rad/s
    """

    gamma: float
    r: float
    theta_d: float
    phi: float
    omega_r: float
    offsets: tuple = field(default=())

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("internuclear distance must be positive")
        if self.omega_r <= 0:
            raise ValueError("spinning frequency must be positive")
        if len(self.offsets) < 2:
            raise ValueError("at least two spins (offsets) are required")
        if len(self.offsets) > MAX_SPINS:
            raise ValueError(f"register limited to {MAX_SPINS} spins")
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        object.__setattr__(self, "theta_d", _fold_theta(self.theta_d))

    @property
    def n_spins(self):
        return len(self.offsets)

    @property
    def rotor_period(self):
        return 2.0 * math.pi / self.omega_r
