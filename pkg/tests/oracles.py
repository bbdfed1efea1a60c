"""Reference constructions that share no code path with the package.

Everything here is built from ladder operators in the full product space
and exponentiated with scipy's Pade expm, never from an eigendecomposition.
"""

import math
from fractions import Fraction

import numpy as np
from scipy.linalg import expm


def annihilation(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1)


def two_cavity_product_hamiltonian(N, J, omega0=0.0, scale=0.5):
    """scale*J (a1^+ a2 + a2^+ a1) + omega0 (n1 + n2) on the (N+1)^2 product space."""
    a = annihilation(N + 1)
    eye = np.eye(N + 1)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    hop = a1.T @ a2 + a2.T @ a1
    num = a1.T @ a1 + a2.T @ a2
    return scale * J * hop + omega0 * num


def product_index(n_left, n_right, N):
    return n_left * (N + 1) + n_right


def sector_projection(N):
    """Columns pick |N-k, k> out of the product space, k = 0..N."""
    P = np.zeros(((N + 1) ** 2, N + 1))
    for k in range(N + 1):
        P[product_index(N - k, k, N), k] = 1.0
    return P


def sector_hamiltonian(N, J, omega0=0.0, scale=0.5):
    P = sector_projection(N)
    return P.T @ two_cavity_product_hamiltonian(N, J, omega0, scale) @ P


def evolved_fock(N, J, t, omega0=0.0, scale=0.5):
    """exp(-iHt)|N,0> in the fixed-N sector via Pade expm."""
    H = sector_hamiltonian(N, J, omega0, scale)
    psi0 = np.zeros(N + 1, dtype=complex)
    psi0[0] = 1.0
    return expm(-1j * t * H) @ psi0


def binomial_purity(N):
    """Exact sum_k (C(N,k)/2^N)^2 as a float."""
    total = sum(Fraction(math.comb(N, k), 2**N) ** 2 for k in range(N + 1))
    return float(total)


def closed_form_block_roots(n, omega, coupling):
    """Roots of (1/2)[[n w, g], [g, (n+1) w]] with g = coupling sqrt(n+1), by the quadratic formula."""
    a, d, b = n * omega / 2, (n + 1) * omega / 2, coupling * math.sqrt(n + 1) / 2
    tr, det = a + d, a * d - b * b
    disc = math.sqrt(tr * tr - 4 * det)
    return (tr - disc) / 2, (tr + disc) / 2
