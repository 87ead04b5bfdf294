"""Exact desk-scale model of SPDC and cascaded (ZALM) photonic entanglement sources."""

from .errors import ConvergenceError, NumericalDomainError, UndefinedFidelityError
from .kfunction import COVARIANCE_PRESCALE, KFunctionData, k_data
from .memory import (
    BASIS,
    BELL_TARGETS,
    DEFAULT_CLICK_PATTERN,
    SIGMA_PATTERNS,
    SpinSpinDM,
    bell_fidelity_spin,
    branch_forms,
    spin_spin_dm,
    spin_spin_dm_dark,
)
from .metrics import (
    MetricResult,
    fidelity,
    fock_element,
    pgen,
    pgen_with_dark,
    photonic_trace,
)
from .moments import (
    AMatrix,
    LinearForm,
    MomentRequest,
    alpha_form,
    assemble_a,
    beta_conj_form,
    gaussian_prefactor,
    hafnian,
    wick_moment,
)
from .oracle import (
    TruncatedState,
    oracle_apply_loss,
    oracle_build_cascaded,
    oracle_covariance,
    oracle_fidelity,
    oracle_fock_element,
    oracle_pgen,
    oracle_pgen_dark,
    oracle_pgen_filtered,
    oracle_spin_spin,
)
from .phase_space import (
    CovarianceMatrix,
    QuadOrdering,
    SymplecticOp,
    apply_symplectic,
    beamsplitter_symplectic,
    direct_sum,
    mode_permutation,
    reorder,
    symplectic_form,
    tmsv_cov,
)
from .sources import SourceParams, build_cascaded_cov, build_spdc_cov

__version__ = "0.1.0"

__all__ = [
    "AMatrix",
    "BASIS",
    "BELL_TARGETS",
    "COVARIANCE_PRESCALE",
    "ConvergenceError",
    "CovarianceMatrix",
    "DEFAULT_CLICK_PATTERN",
    "KFunctionData",
    "LinearForm",
    "MetricResult",
    "MomentRequest",
    "NumericalDomainError",
    "QuadOrdering",
    "SIGMA_PATTERNS",
    "SourceParams",
    "SpinSpinDM",
    "SymplecticOp",
    "TruncatedState",
    "UndefinedFidelityError",
    "alpha_form",
    "apply_symplectic",
    "assemble_a",
    "beamsplitter_symplectic",
    "bell_fidelity_spin",
    "beta_conj_form",
    "branch_forms",
    "build_cascaded_cov",
    "build_spdc_cov",
    "direct_sum",
    "fidelity",
    "fock_element",
    "gaussian_prefactor",
    "hafnian",
    "k_data",
    "mode_permutation",
    "oracle_apply_loss",
    "oracle_build_cascaded",
    "oracle_covariance",
    "oracle_fidelity",
    "oracle_fock_element",
    "oracle_pgen",
    "oracle_pgen_dark",
    "oracle_pgen_filtered",
    "oracle_spin_spin",
    "pgen",
    "pgen_with_dark",
    "photonic_trace",
    "reorder",
    "spin_spin_dm",
    "spin_spin_dm_dark",
    "symplectic_form",
    "tmsv_cov",
    "wick_moment",
]
