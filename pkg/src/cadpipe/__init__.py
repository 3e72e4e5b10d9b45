"""Profile-based binary feature extraction with frequent itemsets, and
GA-wrapped SVM feature selection, for tabular clinical data."""

from .binarize import BinaryMatrix, binarize_dataset
from .config import StudyConfig, load_config, shipped_config_path
from .dataset import DataError, FeatureSchema, RawDataset, SchemaError, load_dataset, write_dataset
from .evaluation import (
    ConfusionMatrix,
    MetricReport,
    RocCurve,
    confusion,
    info_gain,
    rank_features,
    roc_auc,
    stratified_kfold,
)
from .gafs import GaConfig, GaResult, fitness, run_ga
from .miner import AugmentedMatrix, Itemset, MinerConfig, inject_features, mine_frequent_itemsets, sweep_min_sup
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .profiling import NormalRangeTable, ProfileSchema, assign_profile, discretize_dataset
from .svm import SvmConfig, SvmModel, decision_function, predict, train

__version__ = "0.1.0"
