"""Monitored photon entanglement in coupled cavities and the Jaynes-Cummings model."""

__version__ = "0.1.0"

from .cavities import (
    CavityParams,
    NoonReport,
    amplitude_visit_histogram,
    analytic_amplitudes,
    build_two_cavity_hamiltonian,
    noon_measures,
    overlap_initial_eigenstate,
    unitary_scan,
)
from .fock import DensityMatrix, Hamiltonian, StateVector, evolve, expm_taylor_oracle, inner, purity
from .jc import JCEnsemble, JCParams, build_jc_hamiltonian, jc_entropy_scan, reduce_over_qubit
from .monitor import (
    ExtinctionError,
    MonitorProtocol,
    entropy_scan_monitored,
    entropy_scan_unitary,
    monitored_density,
    monitored_step,
    reduce_two_cavity,
    renyi2_entropy,
    run_trajectory,
)
