"""Renyi entropies, Renyi thermodynamics and uncertainty relations for finite-dimensional quantum states."""
from .entropy import (
    LiebProbe,
    is_pure,
    lieb_trace,
    renyi_entropy,
    renyi_relative,
    sandwiched_renyi,
)
from .errors import *  # noqa: F401,F403
from .linalg import (
    EigenDecomposition,
    HermitianMatrix,
    SpectralFunction,
    as_hermitian,
    bracket,
    determinant,
    eig_hermitian,
    gram,
    is_positive_definite,
    matrix_fn,
    min_eigenvalue,
    trace_product,
)
from .states import (
    DensityMatrix,
    PositiveMatrix,
    SampleSpec,
    density_from_matrix,
    gibbs_state,
    maximally_mixed,
    pure_state,
    sample,
)
from .thermo import (
    ThermoReport,
    alpha_derivative,
    alpha_expectation,
    equilibrium_energy,
    free_energy,
    internal_energy,
    log_partition,
    logZ_curvature,
    thermo_report,
)
from .uncertainty import (
    ObservableSet,
    UncertaintyReport,
    alpha_std,
    alpha_variance,
    build_report,
    det_gaps,
    lemma_split_check,
    schrodinger_gap,
)

__version__ = "0.1.0"
