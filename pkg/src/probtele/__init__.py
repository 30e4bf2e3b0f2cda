"""Probabilistic teleportation over partially entangled channels.

Compute the faithful-teleportation probability of a bipartite channel,
synthesize matching measurement bases, and check both against a brute-force
tripartite simulation.
"""

from .channel import (
    QuantumChannel,
    SchmidtForm,
    entanglement_entropy,
    faithful_probability,
    is_maximally_entangled,
    reduced_density,
    schmidt_decompose,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    NotFaithfulError,
    NotOrthonormalError,
    NotUnitaryError,
    ProbteleError,
    SingularError,
    UnsupportedDimensionError,
    ValidationError,
    ZeroProbabilityError,
)
from .eta_search import (
    CaseLabel,
    ChannelShape2,
    EtaCertificate,
    SearchConfig,
    UnitaryParams,
    certify_eta,
    classify_pair,
    p_max,
    pair_function,
    search_orthogonal,
    search_third,
)
from .frames import (
    LocalUnitaryFrame,
    transform_basis,
    transform_channel,
    transform_measurement,
    transform_state,
    verify_invariance,
)
from .measurement import (
    MeasurementBasis,
    MeasurementOperator,
    check_matching,
    check_orthogonal,
    classify_basis,
    complete_basis,
    extract_recovery,
    synthesize_basis,
    synthesize_faithful,
)
from .simulator import (
    DensityMatrix,
    PureState,
    TeleportationReport,
    assemble_tripartite,
    bob_state_mixed,
    bob_state_pure,
    fidelity,
    run_protocol,
)

__version__ = "0.1.0"
