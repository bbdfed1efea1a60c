"""Repeated projective measurements with a fixed time step tau.

Between measurements the state evolves unitarily for tau; each measurement
keeps only the branch in which the reference state was *not* found, i.e.
applies 1 - |ref><ref| without renormalizing. The monitored evolution
operator is therefore T = exp(-iH tau) (1 - |ref><ref|), and the state after
m steps is T^(m-1) exp(-iH tau) |psi_0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cavities import CavityParams, build_two_cavity_hamiltonian, initial_state, time_grid
from .fock import TWO_CAVITY, DensityMatrix, Hamiltonian, StateVector, evolve_many

EXTINCTION_TRACE = 1e-300
NORMALIZATION_TOL = 1e-8


class ExtinctionError(ArithmeticError):
    """The monitored branch carries (numerically) zero probability."""

    def __init__(self, step: int, log_norm: float):
        self.step = step
        self.log_norm = log_norm
        super().__init__(
            f"monitored state extinct at step {step} (log norm {log_norm:.3g})"
        )


@dataclass(frozen=True, eq=False)
class MonitorProtocol:
    hamiltonian: Hamiltonian
    tau: float
    steps: int
    reference: StateVector

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        if self.reference.dim != self.hamiltonian.dim:
            raise ValueError("reference state and Hamiltonian dimensions differ")
        if abs(self.reference.survival_norm - 1.0) > 1e-12:
            raise ValueError("reference state must be normalized")

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @cached_property
    def propagator(self) -> np.ndarray:
        return self.hamiltonian.propagator(self.tau)

    @cached_property
    def monitored_operator(self) -> np.ndarray:
        """T = U (1 - |ref><ref|) as a dense matrix."""
        r = self.reference.amps
        return self.propagator - np.outer(self.propagator @ r, r.conj())


def _project_out(amps: np.ndarray, ref: np.ndarray) -> np.ndarray:
    return amps - np.vdot(ref, amps) * ref


def monitored_step(state: StateVector, proto: MonitorProtocol) -> StateVector:
    """exp(-iH tau) (psi - <ref|psi> ref); the result is not renormalized."""
    if state.dim != proto.dim or state.basis != proto.reference.basis:
        raise ValueError("state does not live in the protocol's Hilbert space")
    amps = proto.propagator @ _project_out(state.amps, proto.reference.amps)
    return StateVector(amps, state.basis)


@dataclass
class MonitorTrajectory:
    """Per-step record of a monitored pure-state evolution (row i is step m = i+1).

    ``target_prob_unnorm`` holds |<target|psi_m>|^2 of the unnormalized state,
    the distribution F_m; ``target_prob_norm`` divides by the survival norm.
    """

    states: np.ndarray
    survival: np.ndarray
    post_projection_overlap: np.ndarray
    return_prob_unnorm: np.ndarray
    return_prob_norm: np.ndarray
    target_prob_unnorm: np.ndarray
    target_prob_norm: np.ndarray
    renyi2: np.ndarray
    extinct_at: int | None = None

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, len(self.survival) + 1)

    def normalized_states(self) -> np.ndarray:
        return self.states / np.sqrt(self.survival)[:, None]


def run_trajectory(
    proto: MonitorProtocol,
    initial: StateVector | None = None,
    targets=(),
    entropy=None,
) -> MonitorTrajectory:
    """Iterate the monitored evolution for ``proto.steps`` steps.

    Step 1 is the bare unitary exp(-iH tau); later steps apply T. ``entropy``
    maps a normalized amplitude vector to a Renyi-2 value; by default the
    two-cavity reduced entropy is used for that basis and NaN otherwise.
    If the survival norm drops below 1e-300 the record stops at that step
    and ``extinct_at`` is set.
    """
    initial = proto.reference if initial is None else initial
    if initial.dim != proto.dim:
        raise ValueError("initial state does not match protocol dimension")
    if entropy is None:
        entropy = two_cavity_entropy if proto.reference.basis == TWO_CAVITY else None
    ref = proto.reference.amps
    U = proto.propagator
    tgt = np.array([t.amps for t in targets], dtype=complex).reshape(len(targets), proto.dim)

    states, overlaps = [], []
    psi = U @ initial.amps
    states.append(psi)
    overlaps.append(0.0)
    extinct_at = None
    for m in range(2, proto.steps + 1):
        projected = _project_out(psi, ref)
        overlaps.append(abs(np.vdot(ref, projected)))
        psi = U @ projected
        if np.vdot(psi, psi).real < EXTINCTION_TRACE:
            extinct_at = m
            break
        states.append(psi)
    states = np.array(states)
    survival = np.einsum("ij,ij->i", states.conj(), states).real
    ret = np.abs(states @ ref.conj()) ** 2
    tprob = np.abs(states @ tgt.conj().T) ** 2
    normed = states / np.sqrt(survival)[:, None]
    s2 = np.array([entropy(v) for v in normed]) if entropy else np.full(len(states), np.nan)
    return MonitorTrajectory(
        states=states,
        survival=survival,
        post_projection_overlap=np.array(overlaps[: len(states)]),
        return_prob_unnorm=ret,
        return_prob_norm=ret / survival,
        target_prob_unnorm=tprob,
        target_prob_norm=tprob / survival[:, None],
        renyi2=s2,
        extinct_at=extinct_at,
    )


def iter_monitored_density(proto: MonitorProtocol, rho0: DensityMatrix, steps: int | None = None):
    """Yield ``(m, rho_m, log_trace)`` for m = 1..steps.

    rho_m is normalized; ``log_trace`` is the natural log of the trace of
    the unnormalized T^(m-1) U rho0 U^+ T^+(m-1). The running matrix is
    renormalized every step so long runs do not underflow.
    """
    if rho0.dim != proto.dim:
        raise ValueError("density matrix does not match protocol dimension")
    steps = proto.steps if steps is None else steps
    U = proto.propagator
    T = proto.monitored_operator
    rho = U @ rho0.entries @ U.conj().T
    log_trace = 0.0
    for m in range(1, steps + 1):
        if m > 1:
            rho = T @ rho @ T.conj().T
        tr = np.trace(rho).real
        if not tr > 0 or math.log(tr) + log_trace < math.log(EXTINCTION_TRACE):
            raise ExtinctionError(m, log_trace + (math.log(tr) if tr > 0 else -math.inf))
        log_trace += math.log(tr)
        rho = rho / tr
        rho = 0.5 * (rho + rho.conj().T)
        yield m, DensityMatrix(rho, rho0.basis), log_trace


def monitored_density(proto: MonitorProtocol, rho0: DensityMatrix) -> DensityMatrix:
    """Normalized density operator after ``proto.steps`` monitored steps.

    Raises ExtinctionError if the trace falls below 1e-300.
    """
    rho = None
    for _, rho, _ in iter_monitored_density(proto, rho0):
        pass
    return rho


def reduce_two_cavity(rho: DensityMatrix) -> np.ndarray:
    """Reduced density of the left cavity, indexed by its photon count n = 0..N.

    On the fixed-N sector the partial trace over the right cavity is exactly
    the Fock-basis diagonal.
    """
    if rho.basis != TWO_CAVITY:
        raise ValueError(f"expected a two-cavity density matrix, got {rho.basis!r}")
    # storage index k is |N-k, k>, so left count n sits at k = N - n
    return np.diagonal(rho.entries).real[::-1].copy()


def renyi2_entropy(x, alpha: float = 2.0) -> float:
    """Renyi entropy in bits of a probability vector or a density matrix.

    S_alpha = log2(Tr rho^alpha) / (1 - alpha); alpha = 1 is not supported.
    """
    if alpha == 1:
        raise ValueError("the von Neumann limit alpha = 1 is not supported")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if isinstance(x, DensityMatrix):
        x = x.entries
    arr = np.asarray(x)
    if arr.ndim == 1:
        probs = arr.real.astype(float)
        total = probs.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        if alpha == 2:
            moment = float(np.dot(probs, probs))
        else:
            moment = float(np.sum(np.clip(probs, 0.0, None) ** alpha))
    elif arr.ndim == 2:
        total = np.trace(arr).real
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"density matrix has trace {total!r}, expected 1")
        if alpha == 2:
            moment = float(np.sum(np.abs(arr) ** 2))
        else:
            eig = np.clip(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T)), 0.0, None)
            moment = float(np.sum(eig**alpha))
    else:
        raise ValueError("expected a 1-D probability vector or a square matrix")
    return float(math.log2(moment) / (1.0 - alpha))


def two_cavity_entropy(amps: np.ndarray) -> float:
    """S_2 of the left-cavity reduced state of a normalized two-cavity vector."""
    probs = np.abs(amps) ** 2
    return renyi2_entropy(probs / probs.sum())


def entropy_scan_unitary(p: CavityParams, times=None, t_max=None, dt=None) -> np.ndarray:
    """Rows (t, S_2) for the unitary evolution of |N,0>."""
    if times is None:
        times = time_grid(t_max, dt)
    times = np.asarray(times, dtype=float)
    states = evolve_many(build_two_cavity_hamiltonian(p), initial_state(p), times)
    s2 = np.array([two_cavity_entropy(v) for v in states])
    return np.column_stack([times, s2])


def entropy_scan_monitored(proto: MonitorProtocol, m_max: int | None = None, initial=None) -> np.ndarray:
    """Rows (m, S_2) of the normalized monitored state, m = 1..m_max.

    Raises ExtinctionError when the monitored branch dies out.
    """
    m_max = proto.steps if m_max is None else m_max
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    if m_max != proto.steps:
        proto = MonitorProtocol(proto.hamiltonian, proto.tau, m_max, proto.reference)
    traj = run_trajectory(proto, initial)
    if traj.extinct_at is not None:
        raise ExtinctionError(traj.extinct_at, -math.inf)
    return np.column_stack([traj.steps, traj.renyi2])


def cavity_protocol(p: CavityParams, tau: float, steps: int, reference: StateVector | None = None) -> MonitorProtocol:
    """Protocol for the coupled cavities, projecting out |N,0> by default."""
    ref = initial_state(p) if reference is None else reference
    return MonitorProtocol(build_two_cavity_hamiltonian(p), tau, steps, ref)
