"""Two-spin reduced density matrix and Wootters concurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import SpinCorrelatorSet
from .model import PositivityAbort

_TRACE_TOL = 1e-6
_POS_ABORT = 1e-7

_SY_SY = np.kron(
    np.array([[0.0, -1.0j], [1.0j, 0.0]]), np.array([[0.0, -1.0j], [1.0j, 0.0]])
).real  # sigma_y x sigma_y is real: diag(-1, 1, 1, -1) on the antidiagonal


@dataclass(frozen=True)
class ReducedTwoSpinState:
    """4x4 two-spin density matrix with the X-shaped sparsity pattern.

    Nonzero entries sit at (1,1), (2,2), (2,3), (3,2), (3,3), (4,4), (1,4),
    (4,1) in the basis {up-up, up-down, down-up, down-down}; the symmetric
    structure of the chain enforces equal mid-block populations.
    """

    kappa: np.ndarray

    def validate(self) -> "ReducedTwoSpinState":
        k = self.kappa
        if k.shape != (4, 4):
            raise ValueError("reduced state must be 4x4")
        if np.abs(k - k.conj().T).max() > 1e-9:
            raise ValueError("reduced state not Hermitian")
        trace = float(np.trace(k).real)
        if abs(trace - 1.0) > _TRACE_TOL:
            raise ValueError(f"reduced-state trace deviates from 1 by {trace - 1.0:.3e}")
        w = np.linalg.eigvalsh(k)
        if w.min() < -_POS_ABORT:
            # a genuine negativity here means the upstream integration broke
            raise PositivityAbort(
                f"reduced state has eigenvalue {w.min():.3e} < -{_POS_ABORT}"
            )
        return self


@dataclass(frozen=True)
class ConcurrenceValue:
    """Concurrence c = max(0, l1 - l2 - l3 - l4) with the sorted roots kept."""

    c: float
    lambdas: np.ndarray

    def __post_init__(self):
        if not -1e-9 <= self.c <= 1.0 + 1e-9:
            raise ValueError(f"concurrence {self.c} outside [0, 1]")


def reduced_rho(spin: SpinCorrelatorSet) -> ReducedTwoSpinState:
    """Two-spin reduced density matrix from the spin correlators.

    The transverse blocks pick up imaginary parts through the xy/yx
    correlators, which vanish in equilibrium but not during a ramp.
    """
    xx, yy, zz = spin.xx, spin.yy, spin.zz
    xy, yx, sz = spin.xy, spin.yx, spin.sz
    k11 = sz + zz + 0.25
    k22 = 0.25 - zz
    k44 = -sz + zz + 0.25
    k23 = xx + yy + 1j * (xy - yx)
    k14 = xx - yy - 1j * (xy + yx)
    kappa = np.array(
        [
            [k11, 0.0, 0.0, k14],
            [0.0, k22, k23, 0.0],
            [0.0, np.conj(k23), k22, 0.0],
            [np.conj(k14), 0.0, 0.0, k44],
        ],
        dtype=complex,
    )
    return ReducedTwoSpinState(kappa=kappa).validate()


def concurrence(rho: ReducedTwoSpinState | np.ndarray) -> ConcurrenceValue:
    """Wootters concurrence of a two-qubit density matrix.

    Computes the spin-flipped partner rho~ = (sy x sy) rho* (sy x sy) and the
    eigenvalues of rho rho~ directly with a general 4x4 eigensolver; small
    imaginary residue is discarded and negative real parts are clamped before
    the square root.
    """
    kappa = rho.kappa if isinstance(rho, ReducedTwoSpinState) else np.asarray(rho)
    flipped = _SY_SY @ kappa.conj() @ _SY_SY
    ev = np.linalg.eigvals(kappa @ flipped)
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    lam[::-1].sort()
    c = max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
    return ConcurrenceValue(c=c, lambdas=lam)


def concurrence_from_spin(spin: SpinCorrelatorSet) -> float:
    """Convenience: concurrence directly from a correlator set."""
    return concurrence(reduced_rho(spin)).c
