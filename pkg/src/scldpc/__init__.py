"""Protograph-based spatially coupled LDPC code toolkit.

Construction of terminated, tail-biting, self-connected, and two-chain
coupled ensembles; exact design rates; BEC density evolution with
threshold bisection; connection-placement search; quasi-cyclic lifting
with GF(2) rank certification; and seeded Monte Carlo decoding over the
BEC and the binary-input AWGN channel.
"""

from .channel_sim import (
    BPResult,
    ChannelSpec,
    Encoder,
    PeelResult,
    SimPoint,
    bec_bp_unresolved,
    bp_decode_awgn,
    peel_decode,
    simulate,
)
from .density_evolution import (
    DEResult,
    DEState,
    StructuralError,
    ThresholdResult,
    bp_threshold,
    de_iterate,
    de_run,
    iavg,
    sweep_point,
    sweep_rate_threshold,
)
from .lifting import (
    LiftedCode,
    LiftingError,
    RankDeficiencyError,
    export_alist,
    from_parity_matrix,
    import_alist,
    lift,
    shift_manifest,
)
from .optimizer import ConnectionCandidate, enumerate_candidates, optimize
from .protograph import (
    ConstructionError,
    DegreeProfile,
    EnsembleSpec,
    Protograph,
    balanced_spreading,
    build_block_protograph,
    construct,
    degree_profile,
    design_rate,
    edge_list,
    edge_spread,
    from_json,
    to_json,
    uniform_spreading,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BPResult",
    "ChannelSpec",
    "ConnectionCandidate",
    "ConstructionError",
    "DEResult",
    "DEState",
    "DegreeProfile",
    "Encoder",
    "EnsembleSpec",
    "LiftedCode",
    "LiftingError",
    "PeelResult",
    "Protograph",
    "RankDeficiencyError",
    "SimPoint",
    "StructuralError",
    "ThresholdResult",
    "balanced_spreading",
    "bec_bp_unresolved",
    "bp_decode_awgn",
    "bp_threshold",
    "build_block_protograph",
    "construct",
    "de_iterate",
    "de_run",
    "degree_profile",
    "design_rate",
    "edge_list",
    "edge_spread",
    "enumerate_candidates",
    "export_alist",
    "from_json",
    "from_parity_matrix",
    "iavg",
    "import_alist",
    "lift",
    "optimize",
    "peel_decode",
    "shift_manifest",
    "simulate",
    "sweep_point",
    "sweep_rate_threshold",
    "to_json",
    "uniform_spreading",
]
