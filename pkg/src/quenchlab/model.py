"""Transverse-field Ising chain: momentum grid, ramp protocol, mode Hamiltonians.

The chain is treated in the even fermion-parity sector, where the Fourier
modes pair up as (k, -k) and each pair reduces to a two-level problem in the
Fock basis {|0>, |k,-k occupied>}.  Everything downstream (dynamics,
correlators, entanglement) is built on the quantities defined here: the
antiperiodic momentum grid, the linear ramp h0(t), the per-mode coefficients
(h_k, Delta_k), the Bogoliubov angle theta_k and the quasiparticle energy
eps_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Global energy convention: the spin Hamiltonian implemented throughout is
#
#   H = -ENERGY_SCALE * sum_n (2 J s^x_n s^x_{n+1} - h0(t) s^z_n),   J = 1
#
# with spin-1/2 operators s = sigma/2.  ENERGY_SCALE = 1 is the plain J = 1
# convention; it is the one that reproduces the reference value tau0 ~ 1.96
# for the next-nearest-neighbour entanglement threshold of a full ramp.
# Rescaling it is exactly equivalent to rescaling (tau, xi^2) jointly, so a
# single constant shared by the mode dynamics and the dense-chain oracle
# keeps every cross-validation convention-independent.
ENERGY_SCALE = 1.0

#: Dimensionless tolerance used by the constructors below.
_ATOL = 1e-12


class ConfigurationError(ValueError):
    """Raised for invalid model parameters (bad N, tau, field ranges...)."""


class PositivityAbort(ValueError):
    """Raised when a state violates positivity beyond numerical tolerance.

    This signals an upstream integration problem rather than harmless
    rounding, so runs abort instead of clamping.
    """


@dataclass(frozen=True)
class ModeGrid:
    """Positive-momentum grid of the even-parity (antiperiodic) sector.

    Attributes
    ----------
    n_sites : int
        Number of lattice sites N (even, >= 4).
    momenta : np.ndarray
        The N/2 wave numbers k_j = (2j - 1) pi / N, j = 1..N/2, strictly
        increasing and strictly inside (0, pi).  Negative momenta are not
        stored; the (k, -k) pairing is carried by the two-level mode space.
    """

    n_sites: int
    momenta: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.momenta, dtype=float)
        if self.n_sites < 4 or self.n_sites % 2:
            raise ConfigurationError(f"N must be even and >= 4, got {self.n_sites}")
        if k.shape != (self.n_sites // 2,):
            raise ConfigurationError("grid must hold exactly N/2 momenta")
        if not (np.all(k > 0.0) and np.all(k < np.pi) and np.all(np.diff(k) > 0)):
            raise ConfigurationError("momenta must be strictly increasing in (0, pi)")


def build_grid(n_sites: int) -> ModeGrid:
    """Build the antiperiodic momentum grid for an N-site chain.

    Parameters
    ----------
    n_sites : int
        Even number of sites, at least 4.

    Returns
    -------
    ModeGrid
        Grid with momenta (2j - 1) pi / N for j = 1..N/2.
    """
    if not isinstance(n_sites, (int, np.integer)):
        raise ConfigurationError(f"N must be an integer, got {n_sites!r}")
    if n_sites < 4 or n_sites % 2:
        raise ConfigurationError(f"N must be even and >= 4, got {n_sites}")
    j = np.arange(1, n_sites // 2 + 1)
    return ModeGrid(int(n_sites), (2 * j - 1) * np.pi / n_sites)


@dataclass(frozen=True)
class QuenchProtocol:
    """Linear ramp of the transverse field, h0(t) = h_i + (t - t_i) / tau.

    ``tau`` is the quench time scale: the field changes by one unit of J per
    tau.  The ramp runs from h_i at t_i to h_f at t_f = t_i + tau*(h_f - h_i).
    """

    h_i: float
    h_f: float
    tau: float
    t_i: float = 0.0

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.h_f == self.h_i:
            raise ConfigurationError("h_f must differ from h_i")

    @property
    def direction(self) -> float:
        """+1 for an upward ramp, -1 for a downward ramp."""
        return 1.0 if self.h_f > self.h_i else -1.0

    @property
    def t_f(self) -> float:
        """Time at which the ramp reaches h_f."""
        return self.t_i + self.tau * abs(self.h_f - self.h_i)

    def field_at(self, t):
        """Instantaneous field h0(t); clipped to h_f beyond the end of the ramp."""
        h = self.h_i + self.direction * (np.asarray(t, dtype=float) - self.t_i) / self.tau
        if self.direction > 0:
            return np.minimum(h, self.h_f)
        return np.maximum(h, self.h_f)

    def time_at(self, h0: float) -> float:
        """Time at which the ramp passes through field value h0."""
        lo, hi = sorted((self.h_i, self.h_f))
        if not (lo <= h0 <= hi):
            raise ConfigurationError(f"h0={h0} is outside the ramp [{lo}, {hi}]")
        return self.t_i + self.tau * (h0 - self.h_i) * self.direction


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian field noise added to the ramp.

    ``kind`` is either "white" (delta-correlated, intensity xi^2) or
    "ornstein-uhlenbeck" (exponentially correlated with correlation time
    tau_n and stationary variance xi^2 / (2 tau_n)).  xi = 0 reduces every
    consumer to its noiseless counterpart; tau_n is ignored for white noise.
    """

    kind: str = "white"
    xi: float = 0.0
    tau_n: float = 0.0

    def __post_init__(self):
        if self.kind not in ("white", "ornstein-uhlenbeck"):
            raise ConfigurationError(f"unknown noise kind {self.kind!r}")
        if self.xi < 0.0:
            raise ConfigurationError("noise intensity xi must be >= 0")
        if self.kind == "ornstein-uhlenbeck" and self.xi > 0.0 and not self.tau_n > 0.0:
            raise ConfigurationError("ornstein-uhlenbeck noise needs tau_n > 0")

    @property
    def is_noiseless(self) -> bool:
        return self.xi == 0.0


@dataclass(frozen=True)
class ModeCoefficients:
    """Coefficients of one momentum mode at a given field value.

    h_k = h0 - cos k and delta_k = sin k parametrize the two-level mode
    Hamiltonian; eps_k = sqrt(h_k^2 + delta_k^2) is the (unit-scale)
    quasiparticle energy and theta_k the Bogoliubov angle, taken
    quadrant-correct so it is continuous when h_k changes sign mid-ramp.
    """

    h_k: float
    delta_k: float
    theta_k: float
    eps_k: float


def mode_coefficients(h0: float, k: float) -> ModeCoefficients:
    """Mode coefficients (h_k, delta_k, theta_k, eps_k) at field h0.

    theta_k = atan2(delta_k, h_k) / 2, which reproduces arctan(delta/h)/2 for
    h_k > 0 and continues smoothly through h_k <= 0 (theta -> pi/2 as
    h0 -> -inf, theta -> 0+ as h0 -> +inf).
    """
    if not 0.0 < k < np.pi:
        raise ConfigurationError(f"momentum must lie in (0, pi), got {k}")
    h_k = h0 - math.cos(k)
    delta_k = math.sin(k)
    eps_k = math.hypot(h_k, delta_k)
    theta_k = 0.5 * math.atan2(delta_k, h_k)
    return ModeCoefficients(h_k=h_k, delta_k=delta_k, theta_k=theta_k, eps_k=eps_k)


def bogoliubov_angles(h0: float, momenta: np.ndarray) -> np.ndarray:
    """Vectorized Bogoliubov angles theta_k(h0) for an array of momenta."""
    k = np.asarray(momenta, dtype=float)
    return 0.5 * np.arctan2(np.sin(k), h0 - np.cos(k))


def lower_state(theta_k: float) -> np.ndarray:
    """Lower instantaneous eigenvector in the pair Fock basis {|0>, |2>}.

    Components (cos theta, -i sin theta); the upper partner is
    (-i sin theta, cos theta).
    """
    return np.array([math.cos(theta_k), -1j * math.sin(theta_k)])


def upper_state(theta_k: float) -> np.ndarray:
    """Upper instantaneous eigenvector, orthogonal partner of ``lower_state``."""
    return np.array([-1j * math.sin(theta_k), math.cos(theta_k)])


def mode_hamiltonian(h0: float, k: float) -> np.ndarray:
    """Two-level mode Hamiltonian in the pair Fock basis {|0>, |2>}.

    The matrix is ENERGY_SCALE * (-h_k sigma_z + delta_k sigma_y); its
    eigenvectors are ``lower_state``/``upper_state`` with eigenvalues
    -/+ ENERGY_SCALE * eps_k.  (In the Nambu-spinor representation the same
    operator reads h_k sigma_z + delta_k sigma_y; the relative sign flip is
    the usual particle-hole bookkeeping of the Fock-space reduction.)
    """
    c = mode_coefficients(h0, k)
    s = ENERGY_SCALE
    return np.array(
        [[-s * c.h_k, -1j * s * c.delta_k],
         [1j * s * c.delta_k, s * c.h_k]]
    )


def ground_state_density(h0: float, k: float) -> np.ndarray:
    """Projector onto the lower mode eigenstate at field h0 (pure, trace 1)."""
    v = lower_state(mode_coefficients(h0, k).theta_k)
    return np.outer(v, v.conj())


def adiabaticity_index(tau: float, eps_k: float) -> float:
    """Dimensionless adiabaticity diagnostic 1 / (tau * eps_k).

    Small values mean the mode tracks its instantaneous eigenstate; values
    of order one or larger flag the breakdown of adiabaticity near a gap
    minimum.  eps_k = 0 (an exact crossing) returns +inf.
    """
    if not tau > 0.0:
        raise ConfigurationError(f"tau must be positive, got {tau}")
    if eps_k < 0.0:
        raise ConfigurationError(f"eps_k must be >= 0, got {eps_k}")
    if eps_k == 0.0:
        return math.inf
    return 1.0 / (tau * eps_k)
