"""Information-theoretic prognostic and predictive biomarker rankings."""

from pprank.datagen import (
    LogitModelSpec,
    Threshold,
    TrialDataset,
    discretize_equal_width,
    foster_replicates,
    foster_spec,
    simulate,
    to_dataset,
)
from pprank.ppgraph import PPGraph, build_ppgraph, export_csv, normalize_ranks, render_svg
from pprank.prob_core import (
    ContingencyTable,
    JointDistribution,
    ShrinkageReport,
    build_contingency,
    conditional_mutual_information,
    entropy,
    ml_estimate,
    mutual_information,
    shrinkage_estimate,
)
from pprank.ranking import RankedList, rank_features, rank_predictive, rank_prognostic, score_feature

__version__ = "0.1.0"
