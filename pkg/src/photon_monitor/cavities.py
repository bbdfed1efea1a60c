"""Two optical cavities coupled by a fiber: N photons hopping in the fixed-N sector.

Storage order of the (N+1)-dimensional sector: index k holds |N-k, k>,
i.e. k photons have moved to the right cavity. Index 0 is the initial
Fock state |N,0>, index N is the transferred state |0,N>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import TWO_CAVITY, Hamiltonian, StateVector, evolve_many

# hopping conventions
AMPLITUDE = "amplitude"  # level spacing J, c0 = cos^N(Jt/2), cN = (-i)^N sin^N(Jt/2)
LITERAL = "literal"  # -J (a1^+ a2 + h.c.) transcribed as written, level spacing 2J

DEGENERATE_PRODUCT = 1e-14


@dataclass(frozen=True)
class CavityParams:
    n_photons: int
    coupling: float = 1.0
    omega0: float = 0.0
    hopping: str = AMPLITUDE

    def __post_init__(self):
        if int(self.n_photons) != self.n_photons or self.n_photons < 1:
            raise ValueError(f"n_photons must be a positive integer, got {self.n_photons!r}")
        if not self.coupling > 0:
            raise ValueError(f"coupling J must be positive, got {self.coupling!r}")
        if not np.isfinite(self.omega0):
            raise ValueError("omega0 must be finite")
        if self.hopping not in (AMPLITUDE, LITERAL):
            raise ValueError(f"unknown hopping convention {self.hopping!r}")

    @property
    def dim(self) -> int:
        return self.n_photons + 1


@dataclass(frozen=True)
class NoonReport:
    """N00N-state measures at a single time point.

    ``fidelity_phipi`` is the overlap with the odd combination
    (|N,0> - |0,N>)/sqrt(2), so that ``delta = fidelity_phi0 - fidelity_phipi``
    equals <A> = 2 Re(c0* cN) for every N.
    """

    t: float
    abs_c0: float
    abs_cN: float
    p_e: float
    fidelity_phi0: float
    fidelity_phipi: float
    delta: float
    phase: float
    degenerate: bool = False
    fidelity_phi: float = float("nan")

    @property
    def a_expectation(self) -> float:
        """<A> with A = |N,0><0,N| + |0,N><N,0|."""
        return self.delta

    @property
    def a2_expectation(self) -> float:
        """<A^2>, the weight on span{|N,0>, |0,N>}."""
        return self.abs_c0**2 + self.abs_cN**2

    @property
    def husimi_q(self) -> float:
        return self.fidelity_phi0 / math.pi


def build_two_cavity_hamiltonian(p: CavityParams) -> Hamiltonian:
    """Tridiagonal matrix of the hopping Hamiltonian in the |N-k, k> basis.

    With the default amplitude convention the off-diagonal elements are
    +(J/2) sqrt((k+1)(N-k)), which gives E_k = -J(N/2 - k) at omega0 = 0 and
    reproduces cN = (-i)^N sin^N(Jt/2) including its phase. The literal
    convention uses -J sqrt((k+1)(N-k)).
    """
    N = p.n_photons
    k = np.arange(N)
    bond = np.sqrt((k + 1.0) * (N - k))
    if p.hopping == AMPLITUDE:
        off = 0.5 * p.coupling * bond
    else:
        off = -p.coupling * bond
    H = np.diag(np.full(N + 1, p.omega0 * N, dtype=float))
    H += np.diag(off, 1) + np.diag(off, -1)
    return Hamiltonian(H, TWO_CAVITY)


def fock_state(p: CavityParams, right: int) -> StateVector:
    """|N-right, right>."""
    return StateVector.basis_state(p.dim, right, TWO_CAVITY)


def initial_state(p: CavityParams) -> StateVector:
    """|N,0>: all photons in the left cavity."""
    return fock_state(p, 0)


def noon_state(p: CavityParams, phi: float = 0.0) -> StateVector:
    """(|N,0> + exp(i phi N) |0,N>) / sqrt(2)."""
    amps = np.zeros(p.dim, dtype=complex)
    amps[0] = 1.0
    amps[-1] += np.exp(1j * phi * p.n_photons)
    return StateVector(amps / np.sqrt(2.0), TWO_CAVITY, normalized=True)


def overlap_initial_eigenstate(N: int, k: int) -> float:
    """<N,0|E_k> = 2^(-N/2) binom(N, k)^(1/2)."""
    if not 0 <= k <= N:
        raise ValueError(f"eigenstate index {k} outside [0, {N}]")
    log_binom = math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)
    return math.exp(0.5 * (log_binom - N * math.log(2.0)))


def analytic_amplitudes(p: CavityParams, t: float) -> tuple[complex, complex]:
    """Closed-form (c0, cN) for the evolution of |N,0>.

    Includes the global phase exp(-i omega0 N t) so that the result is
    directly comparable with numerical evolution.
    """
    N = p.n_photons
    glob = np.exp(-1j * p.omega0 * N * t)
    if p.hopping == AMPLITUDE:
        angle, rot = 0.5 * p.coupling * t, (-1j) ** N
    else:
        angle, rot = p.coupling * t, (1j) ** N
    c0 = glob * math.cos(angle) ** N
    cN = glob * rot * math.sin(angle) ** N
    return complex(c0), complex(cN)


def gaussian_decay(p: CavityParams, t: float) -> float:
    """Short-time envelope exp(-J^2 N t^2 / 8) of |c0|."""
    return math.exp(-(p.coupling**2) * p.n_photons * t**2 / 8.0)


def fidelity(c0: complex, cN: complex, phi: float, n_photons: int) -> float:
    """|<N00N_phi|Psi>|^2 = |c0 + exp(i phi N) cN|^2 / 2."""
    return 0.5 * abs(c0 + np.exp(1j * phi * n_photons) * cN) ** 2


def noon_measures(
    c0: complex, cN: complex, phi: float = 0.0, n_photons: int = 1, t: float = float("nan")
) -> NoonReport:
    if abs(c0) > 1 + 1e-12 or abs(cN) > 1 + 1e-12:
        raise ValueError("amplitudes must have modulus <= 1")
    a0, aN = abs(c0), abs(cN)
    degenerate = a0 * aN < DEGENERATE_PRODUCT
    phase = 0.0 if degenerate else float(np.angle(np.conj(c0) * cN))
    return NoonReport(
        t=t,
        abs_c0=a0,
        abs_cN=aN,
        p_e=2.0 * a0 * aN,
        fidelity_phi0=0.5 * abs(c0 + cN) ** 2,
        fidelity_phipi=0.5 * abs(c0 - cN) ** 2,
        delta=2.0 * float(np.real(np.conj(c0) * cN)),
        phase=phase,
        degenerate=degenerate,
        fidelity_phi=fidelity(c0, cN, phi, n_photons),
    )


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """0, dt, 2dt, ... while t < t_max + dt/2."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not t_max >= dt:
        raise ValueError(f"t_max must be >= dt, got t_max={t_max!r}, dt={dt!r}")
    count = int(math.floor(t_max / dt + 0.5)) + 1
    return np.arange(count) * dt


def unitary_states(p: CavityParams, times, H: Hamiltonian | None = None) -> np.ndarray:
    """Amplitudes of exp(-iHt)|N,0> on each time, shape (len(times), N+1)."""
    H = build_two_cavity_hamiltonian(p) if H is None else H
    return evolve_many(H, initial_state(p), times)


def unitary_scan(
    p: CavityParams, t_max: float | None = None, dt: float | None = None, phi: float = 0.0, times=None
) -> list[NoonReport]:
    """N00N measures of the unitarily evolved |N,0> on a uniform time grid."""
    if times is None:
        times = time_grid(t_max, dt)
    states = unitary_states(p, times)
    return [
        noon_measures(complex(amps[0]), complex(amps[-1]), phi, p.n_photons, float(t))
        for t, amps in zip(np.asarray(times, dtype=float), states)
    ]


def peak_entanglement(p: CavityParams) -> float:
    """P_e = max_t p_e from the numerical state at the known extremum.

    p_e(t) is proportional to |sin^N(Jt)|, so the maximum sits at Jt = pi/2
    (amplitude convention) or Jt = pi/4 (literal convention).
    """
    t_star = (math.pi / 2 if p.hopping == AMPLITUDE else math.pi / 4) / p.coupling
    amps = unitary_states(p, [t_star])[0]
    return 2.0 * abs(amps[0]) * abs(amps[-1])


def amplitude_visit_histogram(scan, bins: int = 50):
    """Normalized 2-D occupancy of (|c0|, |cN|) over [0, 1]^2.

    Returns ``(hist, edges_c0, edges_cN)`` with ``hist.sum() == 1``.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    scan = list(scan)
    if not scan:
        raise ValueError("cannot histogram an empty scan")
    x = np.clip([r.abs_c0 for r in scan], 0.0, 1.0)
    y = np.clip([r.abs_cN for r in scan], 0.0, 1.0)
    hist, ex, ey = np.histogram2d(x, y, bins=bins, range=[[0.0, 1.0], [0.0, 1.0]])
    return hist / len(scan), ex, ey
