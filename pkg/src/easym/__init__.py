"""easym: exact statevector simulation of symmetry-breaking dynamics.

Entanglement-asymmetry and charge-fluctuation time series for spin chains
under U(1)-non-symmetric Hamiltonian quenches and doped brick-wall random
circuits, with the accompanying analysis toolbox (peaks, late-time
averages, relaxation-curve crossings, power-law and finite-size fits).
"""

from .analysis import (
    CrossingReport,
    TimeSeries,
    classify_early_growth,
    detect_crossing,
    find_peak,
    late_time_average,
    linear_fit_extrapolate,
    power_law_fit,
)
from .analytic import early_time_cv, tilted_product_ea
from .circuit import (
    CircuitConfig,
    EnsembleSeries,
    build_layer,
    ensemble_average,
    run_realization,
    sample_haar_unitary,
    sample_u1_gate,
)
from .evolution import (
    KrylovConfig,
    SpectralPropagator,
    build_spectral,
    evolve_krylov,
    evolve_spectral,
    trajectory,
)
from .exceptions import ConfigError, ConvergenceError
from .observables import (
    U1,
    Z2,
    DensityMatrix,
    ProbeRequest,
    SymmetryProbe,
    charge_distribution,
    charge_moments,
    entanglement_asymmetry,
    evaluate_probes,
    reduced_density_matrix,
    sector_project,
    von_neumann_entropy,
)
from .pauli import (
    HamiltonianParams,
    PauliString,
    PauliSum,
    build_charge_operator,
    build_hamiltonian,
    commutator_frobenius,
    expectation_value,
    ground_state,
    materialize_dense,
)
from .pauli import apply as apply_pauli_sum
from .states import (
    ANTIFERROMAGNETIC,
    DOMAIN_WALL,
    FERROMAGNETIC,
    ProductStateSpec,
    Region,
    StateVector,
    apply_two_qubit_gate,
    basis_state,
    build_initial_state,
    overlap,
)

__version__ = "0.1.0"
