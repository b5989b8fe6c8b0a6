"""echochan: retrocorrectable quantum channels at desk scale.

A small numpy/scipy toolkit that constructs retrocorrectable channels,
estimates their one-shot capacities by seeded Monte Carlo, simulates the
echo-effect assisted protocols exactly with resource accounting, and checks
capacity reports against the assisted-capacity ladder.
"""

from .channels import (
    ChannelSample,
    ChoiMatrix,
    KrausChannel,
    RetroChannelSpec,
    SimplifiedChannelSpec,
    apply_retro,
    apply_simplified,
    audit_hidden_outcome,
    choi_matrix,
    classical_bit,
    dephased_retro_discretized,
    dephasing,
    depolarizing,
    erasure,
    identity_qudit,
    is_ppt,
    sample_flag,
)
from .errors import (
    DomainError,
    EchoChanError,
    NumericalError,
    ProtocolFailure,
    ShapeError,
    SizeError,
    UnsupportedRepresentationError,
    ValidityError,
)
from .estimators import (
    CapacityEntry,
    CapacityReport,
    Ensemble,
    Estimate,
    coherent_info_retro_mc,
    ea_mutual_info,
    holevo_chi,
    holevo_retro_mc,
    maximize_ea,
    simplified_chi,
    simplified_chi_mc,
    simplified_chi_scan,
    trend_scan,
    uniform_basis_ensemble,
)
from .ladder import Relation, TolerancePolicy, build_ladder, check_ladder
from .linalg import binary_entropy, eig_hermitian, mixture_two_pure_eigs
from .protocols import (
    ResourceLedger,
    Wires,
    optimize_flagged_rate,
    run_dephased_c2,
    run_ebit_via_back,
    run_erasure_conversion,
    run_qubit_via_ebit,
    run_qubit_via_two_uses_back,
    run_qubit_via_two_way,
    run_superdense_via_three_uses,
)
from .reports import (
    build_report_classical_bit,
    build_report_dephased_r22,
    build_report_identity_qubit,
    build_report_r22,
    build_report_simplified,
)
from .sampling import RandomStream, haar_basis, haar_unitary
from .states import (
    DensityOperator,
    OrthonormalBasis,
    StateVector,
    UnitaryOperator,
    basis_state,
    born_measure,
    computational_basis,
    entropy_bits,
    max_entangled,
    partial_trace,
    tensor,
)

__version__ = "0.1.0"
