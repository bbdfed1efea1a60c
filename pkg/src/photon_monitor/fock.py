"""Basis bookkeeping, state types and the dense linear algebra shared by all models.

Units: hbar = 1 everywhere; times are dimensionless (Jt for the coupled
cavities, omega*t for the Jaynes-Cummings model).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

TWO_CAVITY = "two_cavity"
CAVITY_QUBIT = "cavity_qubit"
BASIS_FAMILIES = (TWO_CAVITY, CAVITY_QUBIT)

NORM_TOL = 1e-12


class TwoCavity(NamedTuple):
    """Label |n, N-n> of the fixed-N two-cavity sector (n = left-cavity count)."""

    n: int
    n_total: int

    @property
    def right(self) -> int:
        return self.n_total - self.n

    def __str__(self) -> str:
        return f"|{self.n},{self.right}>"


class CavityQubit(NamedTuple):
    """Label |sigma, n> of the cavity + qubit product basis."""

    sigma: str  # "up" or "down"
    n: int

    def __str__(self) -> str:
        arrow = "↑" if self.sigma == "up" else "↓"
        return f"|{arrow},{self.n}>"


def two_cavity_labels(n_total: int) -> list[TwoCavity]:
    """Labels in storage order: index k holds |N-k, k> (index 0 is |N,0>)."""
    if n_total < 1:
        raise ValueError(f"photon number must be >= 1, got {n_total}")
    return [TwoCavity(n_total - k, n_total) for k in range(n_total + 1)]


def _check_family(basis: str) -> None:
    if basis not in BASIS_FAMILIES:
        raise ValueError(f"unknown basis family {basis!r}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a labelled basis.

    ``normalized`` is a claim checked at construction; unnormalized states
    (the monitored branch) expose their squared norm as ``survival_norm``.
    """

    amps: np.ndarray
    basis: str = TWO_CAVITY
    normalized: bool = False

    def __post_init__(self):
        _check_family(self.basis)
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-D array")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        if self.normalized and abs(self.survival_norm - 1.0) > NORM_TOL:
            raise ValueError(f"state flagged normalized has norm^2 {self.survival_norm!r}")

    @property
    def dim(self) -> int:
        return self.amps.size

    @cached_property
    def survival_norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> StateVector:
        norm2 = self.survival_norm
        if norm2 <= 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVector(self.amps / np.sqrt(norm2), self.basis, normalized=True)

    def projector(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.basis)

    @classmethod
    def basis_state(cls, dim: int, index: int, basis: str = TWO_CAVITY) -> StateVector:
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} outside [0, {dim})")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, basis, normalized=True)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian matrix over a labelled basis; unit trace is not enforced here."""

    entries: np.ndarray
    basis: str = TWO_CAVITY

    def __post_init__(self):
        _check_family(self.basis)
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def normalize(self) -> DensityMatrix:
        tr = self.trace
        if tr <= 0.0:
            raise ZeroDivisionError("density matrix has non-positive trace")
        return DensityMatrix(self.entries / tr, self.basis)

    @classmethod
    def mixture(cls, states, weights, basis: str = TWO_CAVITY) -> DensityMatrix:
        """Convex combination sum_i w_i |psi_i><psi_i|."""
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > NORM_TOL:
            raise ValueError("mixture weights must be non-negative and sum to 1")
        amps = np.array([s.amps if isinstance(s, StateVector) else s for s in states], dtype=complex)
        rho = (amps.T * weights) @ amps.conj()
        return cls(rho, basis)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real symmetric generator with its spectral decomposition cached at construction."""

    entries: np.ndarray
    basis: str = TWO_CAVITY
    energies: np.ndarray = field(init=False, repr=False)
    vectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _check_family(self.basis)
        h = np.array(self.entries, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
        if not np.allclose(h, h.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(h).max())):
            raise ValueError("Hamiltonian must be symmetric")
        h = 0.5 * (h + h.T)
        diag = np.diag(h)
        off = np.diag(h, 1)
        if h.shape[0] > 2 and not np.any(np.triu(h, 2)):
            energies, vectors = eigh_tridiagonal(diag, off)
        else:
            energies, vectors = np.linalg.eigh(h)
        for arr in (h, energies, vectors):
            arr.setflags(write=False)
        object.__setattr__(self, "entries", h)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def propagator(self, t: float) -> np.ndarray:
        """Dense matrix exp(-iHt) built from the cached eigenpairs."""
        V = self.vectors
        return (V * np.exp(-1j * self.energies * t)) @ V.T

    def reconstruction_error(self) -> float:
        V = self.vectors
        rebuilt = (V * self.energies) @ V.T
        scale = max(np.linalg.norm(self.entries), 1.0)
        return float(np.linalg.norm(rebuilt - self.entries) / scale)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, antilinear in the first argument."""
    if a.dim != b.dim or a.basis != b.basis:
        raise ValueError(
            f"cannot take inner product of {a.basis}[{a.dim}] and {b.basis}[{b.dim}]"
        )
    return complex(np.vdot(a.amps, b.amps))


def evolve(H: Hamiltonian, psi: StateVector, t: float) -> StateVector:
    """Apply exp(-iHt) through the eigenbasis: V diag(exp(-iE t)) V^T psi."""
    if H.dim != psi.dim:
        raise ValueError(f"Hamiltonian dim {H.dim} does not match state dim {psi.dim}")
    V = H.vectors
    amps = V @ (np.exp(-1j * H.energies * t) * (V.T @ psi.amps))
    return StateVector(amps, psi.basis, normalized=False)


def evolve_many(H: Hamiltonian, psi: StateVector, times) -> np.ndarray:
    """Amplitudes of exp(-iHt) psi for every t, shape (len(times), dim)."""
    if H.dim != psi.dim:
        raise ValueError(f"Hamiltonian dim {H.dim} does not match state dim {psi.dim}")
    times = np.asarray(times, dtype=float)
    V = H.vectors
    weights = V.T @ psi.amps
    phases = np.exp(-1j * np.outer(times, H.energies))
    return (phases * weights) @ V.T


def expm_taylor_oracle(H: Hamiltonian, t: float, max_dim: int = 64) -> np.ndarray:
    """exp(-iHt) by scaling and squaring of a truncated Taylor series.

    Independent of the eigendecomposition; intended for cross-checks on
    small matrices only.
    """
    if H.dim > max_dim:
        raise ValueError(f"Taylor oracle limited to dim <= {max_dim}, got {H.dim}")
    A = -1j * t * np.asarray(H.entries, dtype=complex)
    norm = np.linalg.norm(A, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.25)))) if norm > 0.25 else 0
    A = A / 2.0**squarings
    result = np.eye(H.dim, dtype=complex)
    term = np.eye(H.dim, dtype=complex)
    for k in range(1, 40):
        term = term @ A / k
        result = result + term
        if np.abs(term).max() < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def purity(rho: DensityMatrix) -> float:
    """Tr[rho^2] for a normalized, Hermitian rho."""
    r = rho.entries
    return float(np.sum(np.abs(r) ** 2))
