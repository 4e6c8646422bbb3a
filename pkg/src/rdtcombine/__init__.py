"""Random decision tree ensembles with uncertainty-aware prediction combining.

The package builds ensembles of randomly split decision trees, routes test
instances to per-tree leaf statistics, and combines those statistics with a
family of strategies: probability averaging, add-one smoothing, support/
preference degrees, beta-binomial confidence bounds, voting, count pooling,
two belief-function combination rules, and multiplicative evidence
accumulation.  A cross-validation harness, rank aggregation, a leaf-growth
simulator, and a CLI wrap the core.

Hot kernels run under numba with a pure-numpy fallback; see
:mod:`rdtcombine.backend`.
"""

__version__ = "0.1.0"

from rdtcombine.belief import (
    EPS_FLOOR,
    VACUOUS,
    MassFunction,
    WeightFunction,
    cautious_pair,
    dempster_pair,
    mass_from_leaf,
    mass_of,
    mass_to_score,
    weights_of,
)
from rdtcombine.combine import METHODS, CombineContext, combine, combine_batch, eva, pool
from rdtcombine.data import (
    Dataset,
    DatasetError,
    FeatureSpec,
    Instance,
    SplitPlan,
    load_bundled,
    load_csv,
    make_5x2,
)
from rdtcombine.evaluate import (
    EvaluationReport,
    FoldResult,
    RankTable,
    accuracy,
    auc,
    rank_table,
    run_experiment,
)
from rdtcombine.forest import (
    EnsembleModel,
    LeafStats,
    Tree,
    build_ensemble,
    build_tree,
    load_model,
    route,
    route_all,
    save_model,
)
from rdtcombine.scoring import (
    SCORERS,
    aggregate_avg,
    aggregate_vote,
    score_cb,
    score_laplace,
    score_plausibility,
    score_prob,
)
from rdtcombine.sim import SimConfig, TrajectorySummary, simulate_combiner, simulate_scorer
from rdtcombine.uncertainty import (
    BetaBinomialSpec,
    UncertaintyProfile,
    bb_pmf,
    plausibility,
    profile,
    separation,
)

__all__ = [
    "__version__",
    "EPS_FLOOR",
    "VACUOUS",
    "MassFunction",
    "WeightFunction",
    "cautious_pair",
    "dempster_pair",
    "mass_from_leaf",
    "mass_of",
    "mass_to_score",
    "weights_of",
    "METHODS",
    "CombineContext",
    "combine",
    "combine_batch",
    "eva",
    "pool",
    "Dataset",
    "DatasetError",
    "FeatureSpec",
    "Instance",
    "SplitPlan",
    "load_bundled",
    "load_csv",
    "make_5x2",
    "EvaluationReport",
    "FoldResult",
    "RankTable",
    "accuracy",
    "auc",
    "rank_table",
    "run_experiment",
    "EnsembleModel",
    "LeafStats",
    "Tree",
    "build_ensemble",
    "build_tree",
    "load_model",
    "route",
    "route_all",
    "save_model",
    "SCORERS",
    "aggregate_avg",
    "aggregate_vote",
    "score_cb",
    "score_laplace",
    "score_plausibility",
    "score_prob",
    "SimConfig",
    "TrajectorySummary",
    "simulate_combiner",
    "simulate_scorer",
    "BetaBinomialSpec",
    "UncertaintyProfile",
    "bb_pmf",
    "plausibility",
    "profile",
    "separation",
]
