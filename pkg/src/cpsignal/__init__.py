"""cpsignal: hierarchical signaling games as completely positive cone programs.

Solves the sender's problem  min tr(Vbar Xi)  over completely positive Xi
with Xi 1 = p_o  (or a fixed-mean variant) by converging inner/outer
polyhedral bounds over a refining simplicial partition, plus a doubly
nonnegative relaxation that is exact for up to four states. Strategies are
recovered from rank-one factorizations and can be verified by Monte Carlo.
A quantization front end extends the solver to sampled continuous sources
with a certified error budget.
"""

from ._kernels import BACKEND as kernel_backend
from .dnn import DnnSolution, solve_dnn, sym_eig
from .lp import LpNumericalError, LpProblem, LpSolution, LpStatus, solve_lp
from .model import (
    CostVariant,
    FixedMean,
    FullPrior,
    JointPmf,
    ProblemFormatError,
    SignalingProblem,
    build_problem,
    full_signaling_value,
    load_problem,
    null_signaling_value,
    parse_problem,
    posterior_correlation,
    sender_total_cost,
)
from .partition import SimplicialPartition, bisect, diameter, initial_partition
from .quantize import (
    CertifiedInterval,
    ErrorBudget,
    GridQuantizer,
    OutOfBoxError,
    SampleSet,
    certify,
    quantize,
    read_samples,
    write_samples,
)
from .solver import (
    BoundsTrace,
    CpSolution,
    InnerCertificate,
    OuterCertificate,
    build_inner_lp,
    build_outer_lp,
    refine_step,
    solve,
    weak_duality_check,
)
from .strategy import (
    PosteriorSystem,
    SignalingStrategy,
    SimulationResult,
    constant_strategy,
    decompose_strategy,
    extract_strategy,
    identity_strategy,
    induced_cp_matrix,
    merge_duplicate_signals,
    posteriors,
    realized_costs,
    simulate,
    strategy_report,
)

__version__ = "0.1.0"
