"""Single cavity mode coupled to one qubit (Jaynes-Cummings, rotating-wave form).

Block n (n = 1..N) couples |up, n> with |down, n+1> through the 2x2 matrix

    H_n = 1/2 [[n w,            Omega sqrt(n+1)],
               [Omega sqrt(n+1), (n+1) w       ]]

which is the default ("printed") convention. The "rwa" convention instead
uses the full rotating-wave Hamiltonian w a^+a + (w_a/2) sigma_z +
Omega (a^+ sigma_- + a sigma_+), whose blocks are
[[n w + w_a/2, Omega sqrt(n+1)], [Omega sqrt(n+1), (n+1) w - w_a/2]].

Layout of the (2N+1)-dimensional space: index 0 is |down, 1>, which has
no partner inside the truncated basis and sits alone (energy w/2 when printed);
indices (2n-1, 2n) hold the pair (|up, n>, |down, n+1>). The top block
reaches |down, N+1>, so photon numbers run over 1..N+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import CAVITY_QUBIT, CavityQubit, DensityMatrix, Hamiltonian, StateVector
from .monitor import ExtinctionError, MonitorProtocol, iter_monitored_density, renyi2_entropy

UP, DOWN = "up", "down"
PRINTED = "printed"
RWA = "rwa"
SHARED = "shared"
PER_MEMBER = "per_member"


@dataclass(frozen=True)
class JCParams:
    n_max: int = 15
    omega: float = 1.0
    coupling: float = 0.1
    # only the rwa convention uses omega_a (defaults to omega there)
    omega_a: float | None = None
    convention: str = PRINTED

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max!r}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if not np.isfinite(self.coupling) or self.coupling < 0:
            raise ValueError(f"coupling must be finite and >= 0, got {self.coupling!r}")
        if self.convention not in (PRINTED, RWA):
            raise ValueError(f"unknown Hamiltonian convention {self.convention!r}")

    @property
    def qubit_frequency(self) -> float:
        return self.omega if self.omega_a is None else self.omega_a

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def n_photon_levels(self) -> int:
        return self.n_max + 1


def basis_labels(p: JCParams) -> list[CavityQubit]:
    labels = [CavityQubit(DOWN, 1)]
    for n in range(1, p.n_max + 1):
        labels += [CavityQubit(UP, n), CavityQubit(DOWN, n + 1)]
    return labels


def label_index(p: JCParams, sigma: str, n: int) -> int:
    if sigma == DOWN and 1 <= n <= p.n_max + 1:
        return 0 if n == 1 else 2 * (n - 1)
    if sigma == UP and 1 <= n <= p.n_max:
        return 2 * n - 1
    raise ValueError(f"|{sigma},{n}> is not in the basis for n_max={p.n_max}")


def jc_basis_of_block(n: int, n_max: int | None = None) -> tuple[CavityQubit, CavityQubit]:
    """The pair of labels coupled by block n: (|up, n>, |down, n+1>)."""
    if n < 1 or (n_max is not None and n > n_max):
        raise ValueError(f"block index {n} out of range")
    return CavityQubit(UP, n), CavityQubit(DOWN, n + 1)


def block_matrix(p: JCParams, n: int) -> np.ndarray:
    g = p.coupling * math.sqrt(n + 1)
    if p.convention == PRINTED:
        return 0.5 * np.array([[n * p.omega, g], [g, (n + 1) * p.omega]])
    half = 0.5 * p.qubit_frequency
    return np.array([[n * p.omega + half, g], [g, (n + 1) * p.omega - half]])


def block_eigenvalues(p: JCParams, n: int) -> tuple[float, float]:
    """Closed-form roots of the 2x2 block, ascending."""
    (a, b), (_, d) = block_matrix(p, n)
    mean = 0.5 * (a + d)
    split = math.sqrt(0.25 * (a - d) ** 2 + b * b)
    return mean - split, mean + split


def lone_state_energy(p: JCParams) -> float:
    """Energy of |down, 1>, whose partner |up, 0> lies outside the basis."""
    if p.convention == PRINTED:
        return 0.5 * p.omega
    return p.omega - 0.5 * p.qubit_frequency


def build_jc_hamiltonian(p: JCParams) -> Hamiltonian:
    H = np.zeros((p.dim, p.dim))
    H[0, 0] = lone_state_energy(p)
    for n in range(1, p.n_max + 1):
        i = 2 * n - 1
        H[i : i + 2, i : i + 2] = block_matrix(p, n)
    return Hamiltonian(H, CAVITY_QUBIT)


def block_of_index(p: JCParams) -> np.ndarray:
    """Block number of each basis index (0 for the lone |down, 1>)."""
    return np.array([0] + [n for n in range(1, p.n_max + 1) for _ in (0, 1)])


def photon_number(p: JCParams) -> np.ndarray:
    return np.array([lab.n for lab in basis_labels(p)])


@dataclass(frozen=True, eq=False)
class JCEnsemble:
    """Initial condition over the down states |down, n>, n = 1..N.

    Either a mixture with ``weights`` or a pure superposition with
    ``amplitudes``; index 0 of either array corresponds to n = 1.
    """

    weights: np.ndarray | None = None
    amplitudes: np.ndarray | None = None

    def __post_init__(self):
        if (self.weights is None) == (self.amplitudes is None):
            raise ValueError("give exactly one of weights or amplitudes")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("ensemble weights must be non-negative and sum to 1")
            object.__setattr__(self, "weights", w)
        else:
            c = np.asarray(self.amplitudes, dtype=complex)
            if abs(np.vdot(c, c).real - 1.0) > 1e-12:
                raise ValueError("amplitudes must be normalized")
            object.__setattr__(self, "amplitudes", c)

    @classmethod
    def uniform_mixture(cls, n_states: int = 15) -> JCEnsemble:
        return cls(weights=np.full(n_states, 1.0 / n_states))

    @classmethod
    def down_state(cls, n0: int) -> JCEnsemble:
        c = np.zeros(n0, dtype=complex)
        c[-1] = 1.0
        return cls(amplitudes=c)

    @property
    def is_pure(self) -> bool:
        return self.amplitudes is not None

    @property
    def support(self) -> np.ndarray:
        """Photon numbers n of the occupied down states."""
        vals = np.abs(self.amplitudes) ** 2 if self.is_pure else self.weights
        return np.flatnonzero(vals > 0) + 1

    def _embed(self, p: JCParams, coeffs) -> np.ndarray:
        if len(coeffs) > p.n_max:
            raise ValueError(f"ensemble reaches n={len(coeffs)} > n_max={p.n_max}")
        amps = np.zeros(p.dim, dtype=complex)
        for n, c in enumerate(coeffs, start=1):
            amps[label_index(p, DOWN, n)] = c
        return amps

    def members(self, p: JCParams) -> tuple[list[StateVector], np.ndarray]:
        """Pure members and their weights (a single member if pure)."""
        if self.is_pure:
            return [StateVector(self._embed(p, self.amplitudes), CAVITY_QUBIT, normalized=True)], np.ones(1)
        states, weights = [], []
        for n in self.support:
            c = np.zeros(n)
            c[-1] = 1.0
            states.append(StateVector(self._embed(p, c), CAVITY_QUBIT, normalized=True))
            weights.append(self.weights[n - 1])
        return states, np.array(weights)

    def density(self, p: JCParams) -> DensityMatrix:
        states, weights = self.members(p)
        return DensityMatrix.mixture(states, weights, CAVITY_QUBIT)

    def reference_state(self, p: JCParams) -> StateVector:
        """Default projected-out state.

        The state itself when pure; otherwise the equal-amplitude
        superposition of the occupied down states.
        """
        if self.is_pure:
            return self.members(p)[0][0]
        sup = self.support
        c = np.zeros(sup.max())
        c[sup - 1] = 1.0 / math.sqrt(len(sup))
        return StateVector(self._embed(p, c), CAVITY_QUBIT, normalized=True)


def _photon_selectors(p: JCParams):
    """0/1 matrices mapping the full basis onto photon index n-1 for each qubit level."""
    labels = basis_labels(p)
    sel = {UP: np.zeros((p.n_photon_levels, p.dim)), DOWN: np.zeros((p.n_photon_levels, p.dim))}
    for i, lab in enumerate(labels):
        sel[lab.sigma][lab.n - 1, i] = 1.0
    return sel[UP], sel[DOWN]


def reduce_over_qubit(rho: DensityMatrix, p: JCParams) -> np.ndarray:
    """Photon density matrix sum_sigma <sigma, n|rho|sigma, n'>, photon index n-1."""
    if rho.dim != p.dim:
        raise ValueError(f"expected a {p.dim}-dimensional density matrix, got {rho.dim}")
    up, down = _photon_selectors(p)
    r = rho.entries
    return up @ r @ up.T + down @ r @ down.T


def jc_monitored_density(
    p: JCParams,
    ens: JCEnsemble,
    tau: float,
    steps: int,
    reference: StateVector | None = None,
    projector: str = SHARED,
) -> DensityMatrix:
    """Normalized monitored density after ``steps`` steps."""
    rho = None
    for _, rho in iter_jc_monitored(p, ens, tau, steps, reference, projector):
        pass
    return rho


def iter_jc_monitored(p, ens, tau, steps, reference=None, projector=SHARED, H=None):
    """Yield ``(m, rho_m)`` for m = 1..steps.

    With the shared projector every member sees the same T built from one
    reference state, which is monitoring the mixture itself. With
    ``projector="per_member"`` each member is projected against itself and
    the members are recombined with their surviving weights; this variant
    is not part of the original protocol.
    """
    H = build_jc_hamiltonian(p) if H is None else H
    if projector == SHARED:
        ref = ens.reference_state(p) if reference is None else reference
        proto = MonitorProtocol(H, tau, steps, ref)
        for m, rho, _ in iter_monitored_density(proto, ens.density(p)):
            yield m, rho
        return
    if projector != PER_MEMBER:
        raise ValueError(f"unknown projector mode {projector!r}")
    states, weights = ens.members(p)
    live = {
        i: iter_monitored_density(MonitorProtocol(H, tau, steps, s), s.projector())
        for i, s in enumerate(states)
    }
    for m in range(1, steps + 1):
        parts = {}
        for i, it in list(live.items()):
            try:
                _, rho_i, log_tr = next(it)
            except ExtinctionError:
                # a member that dies out no longer contributes weight
                del live[i]
                continue
            parts[i] = (rho_i.entries, math.log(weights[i]) + log_tr)
        if not parts:
            raise ExtinctionError(m, -math.inf)
        shift = max(lw for _, lw in parts.values())
        scale = {i: math.exp(lw - shift) for i, (_, lw) in parts.items()}
        rho = sum(scale[i] * r for i, (r, _) in parts.items()) / sum(scale.values())
        yield m, DensityMatrix(rho, CAVITY_QUBIT)


def photon_entropy(rho: DensityMatrix, p: JCParams) -> float:
    return renyi2_entropy(reduce_over_qubit(rho, p))


def jc_entropy_scan(
    p: JCParams,
    ens: JCEnsemble,
    mode: str = "unitary",
    times=None,
    tau: float | None = None,
    steps: int | None = None,
    reference: StateVector | None = None,
    projector: str = SHARED,
) -> np.ndarray:
    """Photon-sector Renyi-2 entropy after tracing out the qubit.

    ``mode="unitary"`` returns rows (t, S_2, trace) on ``times``;
    ``mode="monitored"`` returns rows (m, S_2, trace) for m = 1..steps.
    """
    H = build_jc_hamiltonian(p)
    rows = []
    if mode == "unitary":
        if times is None:
            raise ValueError("unitary mode needs a time grid")
        rho0 = ens.density(p).entries
        V, E = H.vectors, H.energies
        rho_eig = V.T @ rho0 @ V
        for t in np.asarray(times, dtype=float):
            ph = np.exp(-1j * E * t)
            rho_t = V @ (ph[:, None] * rho_eig * ph.conj()[None, :]) @ V.T
            red = reduce_over_qubit(DensityMatrix(rho_t, CAVITY_QUBIT), p)
            rows.append((t, renyi2_entropy(red), np.trace(red).real))
    elif mode == "monitored":
        if tau is None or steps is None:
            raise ValueError("monitored mode needs tau and steps")
        for m, rho in iter_jc_monitored(p, ens, tau, steps, reference, projector, H):
            red = reduce_over_qubit(rho, p)
            rows.append((m, renyi2_entropy(red), np.trace(red).real))
    else:
        raise ValueError(f"mode must be 'unitary' or 'monitored', got {mode!r}")
    return np.array(rows)


__all__ = [
    "ExtinctionError",
    "JCEnsemble",
    "JCParams",
    "basis_labels",
    "block_eigenvalues",
    "block_matrix",
    "build_jc_hamiltonian",
    "iter_jc_monitored",
    "jc_basis_of_block",
    "jc_entropy_scan",
    "jc_monitored_density",
    "label_index",
    "photon_entropy",
    "reduce_over_qubit",
]
