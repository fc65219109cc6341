"""Noisy linear quenches across the transverse-field Ising critical points.

Exact noise-averaged mode dynamics, Pfaffian-based spin correlators,
two-spin concurrence, defect densities, and the scaling-law extraction
built on top of them.
"""

__version__ = "0.1.0"

from .model import (
    ENERGY_SCALE,
    ConfigurationError,
    ModeCoefficients,
    ModeGrid,
    NoiseSpec,
    QuenchProtocol,
    adiabaticity_index,
    build_grid,
    ground_state_density,
    mode_coefficients,
    mode_hamiltonian,
)
from .dynamics import (
    DiagonalModeState,
    IntegratorParams,
    ModeState,
    equilibrium_states,
    evolve_all_modes,
    evolve_all_modes_checkpoints,
    evolve_mode,
    to_diagonal_basis,
    trace_distance,
    trajectory_oracle,
)
from .correlators import (
    CorrelatorSet,
    FermionPairSet,
    SpinCorrelatorSet,
    ab_correlators,
    fermion_pairs,
    onsite_sz,
    pfaffian,
    spin_correlators_general,
    spin_correlators_r1,
    spin_correlators_r2,
)
from .entanglement import (
    ConcurrenceValue,
    ReducedTwoSpinState,
    concurrence,
    concurrence_from_spin,
    reduced_rho,
)
from .observables import (
    ObservableRecord,
    defect_density,
    kzm_defect_reference,
    landau_zener_reference,
    mean_purity,
)
from .scaling import (
    FitResult,
    NoEntangledWindow,
    SweepSeries,
    estimate_tau0,
    estimate_tau_c,
    estimate_tau_opt,
    fit_log_scaling,
    fit_power_law,
    geometric_grid,
    max_concurrence_over_tau,
)
