"""Geometric measure of entanglement of spin-1/2 systems.

Pure states: ``E = (1 - |<sigma>|) / 2`` from the mean spin of the chosen
qubit. Rank-2 mixed states on a two-level subspace:
``E = (1 - sqrt(1 - ax^2 - ay^2)) / 2`` from the effective Bloch vector or,
equivalently, from two spin correlators. Brute-force oracles for both, and
the Ising chain, fluctuating-field and cat-state case studies, live in
:mod:`gmespin.gme` and :mod:`gmespin.models`.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContractError,
    ConvergenceError,
    GmeError,
    InvalidStateError,
    QuadratureError,
    SizeError,
    SubspaceError,
)
from .spin_core import (  # noqa: E402
    DensityMatrix,
    Operator,
    PureState,
    SchmidtSpectrum,
    expectation,
    mean_spin,
    pauli_op,
    reduced_density,
    schmidt_spectrum,
    tensor_product,
)
from .gme import (  # noqa: E402
    ALIGNED,
    ANTI_ALIGNED,
    BlochVector,
    GmeResult,
    RoofDecomposition,
    SubspaceKind,
    convex_roof_oracle,
    effective_bloch,
    gme_pure_mean_spin,
    gme_pure_oracle,
    gme_pure_schmidt,
    gme_rank2,
    gme_rank2_correlators,
    max_lz_oracle,
)
from .models import (  # noqa: E402
    CatParams,
    ChainParams,
    DeltaPair,
    Empirical,
    FluctParams,
    Gaussian,
    average,
    cat_gme,
    chain_gme_closed,
    chain_gme_numeric,
    fluct_bloch,
    fluct_gme,
    fluct_gme_numeric,
)
