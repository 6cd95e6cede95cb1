"""Quantum Otto engine on a hard-core 1D gas in a box with a tunable lattice."""

from .spectral import (
    ConvergenceReport,
    EigensolverError,
    Spectrum,
    SystemConfig,
    band_gap,
    basis_mult_for_depth,
    convergence_report,
    diagonalize,
    hamiltonian,
    potential_matrix,
    spectrum,
)
from .thermo import (
    Ensemble,
    adiabatic_energy,
    chemical_potential,
    ensemble_energy,
    entropy,
    occupations,
    thermal_ensemble,
)
from .cycle import (
    CycleRecord,
    MaxPowerResult,
    RatioRecord,
    adiabatic_cycle,
    efficiency_at_max_power,
    performance_ratios,
    sqhe_config,
    sweep_depths,
    sweep_filling,
)
from .oracles import (
    DeepLatticeParams,
    alt_partition_correction,
    closed_form_ratios,
    double_filling_ratio,
    mb_energies,
    ratio_approximation,
    site_energy,
    sqhe_energies,
)
from .dynamics import (
    DtControl,
    PropagationError,
    PropagationResult,
    Ramp,
    custom_ramp,
    evolve_states,
    excess_energy_profile,
    finite_time_cycle,
    irreversible_work,
    lambda_ramp,
    reference_ramp,
)
from .sta import (
    DegenerateStateError,
    RampRejectedError,
    StaMoments,
    interpolant,
    smoothstep_eps,
    sta_moments,
    sta_ramp_averaged,
    sta_ramp_single,
    sta_ramp_targeted,
)

__version__ = "0.1.0"
