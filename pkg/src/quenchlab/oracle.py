"""Dense exact-diagonalization reference for small chains.

Builds the full 2^N spin Hamiltonian of the periodic chain, restricted to
the even fermion-parity sector to match the antiperiodic momentum grid of
the mode decomposition, and provides ground states, exact ramp evolution,
partial traces and concurrences.  Everything here is test/validation
machinery: it scales exponentially and is limited to N <= 12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entanglement import concurrence
from .model import ENERGY_SCALE, ConfigurationError, QuenchProtocol, build_grid, mode_coefficients

_MAX_SITES = 12


@dataclass(frozen=True)
class DenseChainState:
    """Even-parity many-body state of an N-site chain (full 2^N amplitudes)."""

    n_sites: int
    amps: np.ndarray
    h0: float
    t: float = 0.0

    def __post_init__(self):
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} deviates from 1")


def _check_n(n_sites: int, limit: int = _MAX_SITES):
    if n_sites < 4 or n_sites % 2 or n_sites > limit:
        raise ConfigurationError(
            f"oracle supports even 4 <= N <= {limit}, got {n_sites}"
        )


def _bits(n_sites: int) -> np.ndarray:
    """(2^N, N) array of site bits; bit = 1 means spin down."""
    idx = np.arange(2**n_sites, dtype=np.int64)
    return (idx[:, None] >> np.arange(n_sites)[None, :]) & 1


def _sz_diag(n_sites: int) -> np.ndarray:
    """Diagonal of sum_n sigma^z_n (spin up <-> bit 0)."""
    return (n_sites - 2 * _bits(n_sites).sum(axis=1)).astype(float)


def _xx_diag(n_sites: int) -> np.ndarray:
    """Diagonal of sum_n sigma^x_n sigma^x_{n+1} in the x-product basis."""
    b = _bits(n_sites)
    x = 1 - 2 * b
    return (x * np.roll(x, -1, axis=1)).sum(axis=1).astype(float)


def even_parity_mask(n_sites: int) -> np.ndarray:
    """Boolean mask of even fermion-parity basis states (even # of up spins)."""
    return _bits(n_sites).sum(axis=1) % 2 == 0


def dense_hamiltonian(n_sites: int, h0: float) -> np.ndarray:
    """Full 2^N periodic-chain Hamiltonian (real symmetric)."""
    _check_n(n_sites)
    dim = 2**n_sites
    ham = np.zeros((dim, dim))
    ham[np.arange(dim), np.arange(dim)] = 0.5 * ENERGY_SCALE * h0 * _sz_diag(n_sites)
    idx = np.arange(dim)
    for n in range(n_sites):
        m = (n + 1) % n_sites
        flipped = idx ^ (1 << n) ^ (1 << m)
        ham[flipped, idx] += -0.5 * ENERGY_SCALE
    return ham


def ed_ground_state(n_sites: int, h0: float) -> DenseChainState:
    """Lowest-energy eigenvector within the even-parity sector."""
    _check_n(n_sites)
    mask = even_parity_mask(n_sites)
    sector = np.flatnonzero(mask)
    ham = dense_hamiltonian(n_sites, h0)[np.ix_(sector, sector)]
    w, v = np.linalg.eigh(ham)
    amps = np.zeros(2**n_sites)
    amps[sector] = v[:, 0]
    return DenseChainState(n_sites=n_sites, amps=amps.astype(complex), h0=h0)


def ed_ground_energy(n_sites: int, h0: float) -> float:
    """Even-sector ground energy (matches -ENERGY_SCALE * sum_k eps_k)."""
    mask = even_parity_mask(n_sites)
    sector = np.flatnonzero(mask)
    ham = dense_hamiltonian(n_sites, h0)[np.ix_(sector, sector)]
    return float(np.linalg.eigvalsh(ham)[0])


def free_fermion_energy(n_sites: int, h0: float) -> float:
    """Independent ground-energy formula from the mode dispersion."""
    grid = build_grid(n_sites)
    return -ENERGY_SCALE * sum(mode_coefficients(h0, k).eps_k for k in grid.momenta)


class _SplitStepper:
    """Exact split exponentials for the Ising and field parts of the chain."""

    def __init__(self, n_sites: int):
        from scipy.linalg import hadamard

        self.n_sites = n_sites
        dim = 2**n_sites
        # Sylvester Hadamard = tensor product of single-site Hadamards; it
        # maps the z product basis to the x product basis.
        self.had = (hadamard(dim) / np.sqrt(dim)).astype(complex)
        self.xx = _xx_diag(n_sites)
        self.sz = _sz_diag(n_sites)

    def strang(self, psi: np.ndarray, h_mid: float, dt: float) -> np.ndarray:
        """Time-centred second-order step at frozen midpoint field.

        The chain Hamiltonian is S*[-(1/2) sum xx + (h/2) sum z] with
        S = ENERGY_SCALE, so the Ising exponential carries phase
        +S*dt/2 per xx eigenvalue and each field half step -S*h*dt/4.
        """
        half_field = np.exp(-0.25j * ENERGY_SCALE * h_mid * dt * self.sz)
        ising = np.exp(0.5j * ENERGY_SCALE * dt * self.xx)
        psi = half_field * psi
        psi = self.had @ (ising * (self.had @ psi))
        return half_field * psi


_YOSH_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSH_W0 = 1.0 - 2.0 * _YOSH_W1


def ed_evolve(
    state: DenseChainState,
    protocol: QuenchProtocol,
    dt: float,
    t_end: float | None = None,
) -> DenseChainState:
    """Exact unitary ramp evolution by fourth-order split-step propagation.

    Each step composes three time-centred Strang stages (triple-jump
    composition), every stage using the exact exponentials of the Ising and
    field parts at its own midpoint field.  Norm is preserved to rounding.
    """
    _check_n(state.n_sites, limit=10)
    if not dt > 0.0:
        raise ConfigurationError("dt must be positive")
    if t_end is None:
        t_end = protocol.t_f
    stepper = _SplitStepper(state.n_sites)
    psi = state.amps.astype(complex).copy()
    t = state.t if state.t else protocol.t_i
    h_i, t_i, t_f = protocol.h_i, protocol.t_i, protocol.t_f
    slope = protocol.direction / protocol.tau
    while t < t_end - 1e-12:
        step = min(dt, t_end - t)
        tt = t
        for w in (_YOSH_W1, _YOSH_W0, _YOSH_W1):
            sub = w * step
            h_mid = h_i + slope * (min(tt + 0.5 * sub, t_f) - t_i)
            psi = stepper.strang(psi, h_mid, sub)
            tt += sub
        t += step
    psi /= np.linalg.norm(psi)
    return DenseChainState(
        n_sites=state.n_sites, amps=psi, h0=float(protocol.field_at(t_end)), t=float(t_end)
    )


def ed_reduced_rho(state: DenseChainState, l: int, m: int) -> np.ndarray:
    """Partial trace onto sites (l, m), basis {uu, ud, du, dd}."""
    n = state.n_sites
    if not (0 <= l < n and 0 <= m < n and l != m):
        raise ValueError(f"invalid site pair ({l}, {m}) for N={n}")
    psi = state.amps.reshape((2,) * n)
    # reshape uses site 0 as the most significant axis <-> bit convention above
    psi = np.moveaxis(psi, (n - 1 - l, n - 1 - m), (0, 1)).reshape(4, -1)
    return psi @ psi.conj().T


def ed_reduced_rho_translation_avg(state: DenseChainState, r: int) -> np.ndarray:
    """Reduced matrix of a pair at separation r, averaged over the reference site."""
    n = state.n_sites
    acc = np.zeros((4, 4), dtype=complex)
    for l in range(n):
        acc += ed_reduced_rho(state, l, (l + r) % n)
    return acc / n


_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def ed_spin_correlator(state: DenseChainState, alpha: str, beta: str, r: int) -> float:
    """<s^alpha_l s^beta_{l+r}>, translation averaged; s = sigma/2."""
    rho = ed_reduced_rho_translation_avg(state, r)
    op = np.kron(_PAULI[alpha], _PAULI[beta]) / 4.0
    val = np.trace(rho @ op)
    return float(val.real)


def ed_onsite_sz(state: DenseChainState) -> float:
    """<s^z_l>, translation averaged."""
    b = _bits(state.n_sites)
    weights = np.abs(state.amps) ** 2
    return float(((state.n_sites - 2 * b.sum(axis=1)) * weights).sum() / (2 * state.n_sites))


def ed_concurrence(state: DenseChainState, r: int) -> float:
    """Concurrence between spins at separation r from the exact reduced matrix."""
    return concurrence(ed_reduced_rho_translation_avg(state, r)).c
