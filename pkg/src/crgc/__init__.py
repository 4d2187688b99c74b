"""Cooperative regenerating codes for distributed storage.

Exact-repair MDS erasure coding where batches of failed nodes are
regenerated together with a data-exchange phase, cutting the per-node
repair bandwidth to k + r - 1 symbols per stripe; plus the staged
min-cut machinery that proves this optimal, and a deterministic cluster
simulator comparing repair strategies.
"""

from .galois import (
    FieldElement,
    FieldSpec,
    SymbolRangeError,
    is_prime,
    prime_power,
    smallest_prime_power_geq,
)
from .matrix import Matrix, ShapeError, SingularMatrixError, invert, mat_mul, vandermonde
from .mscr import (
    ChecksumError,
    CodeParams,
    MessageMatrix,
    NodeShare,
    ParameterError,
    ShareFormatError,
    StripedFile,
    decode_payload,
    encode,
    encode_payload,
    make_params,
    read_share,
    reconstruct,
    share_from_bytes,
    share_to_bytes,
    stripe,
    unstripe,
    write_share,
)
from .coop_repair import (
    BandwidthLedger,
    RepairPlan,
    TransferRecord,
    assemble_share,
    cooperative_repair,
    individual_repair,
    phase1_recover_row,
    phase1_serve,
    phase2_exchange,
    plan_repair,
)
from .cutbound import (
    BoundParams,
    InfeasibleAlphaError,
    TradeoffPoint,
    curve_csv,
    cut_value,
    enumerate_cut_types,
    gamma_star,
    msr_closed_form,
    non_coop_msr,
    tradeoff_curve,
)
from .flowsim import (
    FlowGraph,
    RepairHistory,
    Stage,
    adversarial_history,
    build_graph,
    evaluate_cut,
    max_flow,
)
from .cluster_sim import (
    ClusterState,
    Scenario,
    ScenarioError,
    StrategyReport,
    inject_failures,
    new_cluster,
    parse_scenario,
    random_payload,
    run_scenario,
    run_strategy,
    verify_cluster,
)

__version__ = "0.1.0"
