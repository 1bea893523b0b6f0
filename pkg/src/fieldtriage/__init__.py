"""Field triage suite: data pipeline, acuity classifiers, robot simulator,
and the responder-facing command server."""

from .analysis import bin_distribution, pearson_correlation
from .ensemble import EnsembleModel, ensemble_fit, ensemble_predict
from .errors import (ConflictError, DataError, InsufficientDataError,
                     NotFoundError, OutOfRangeError, TriageError,
                     ZeroVarianceError)
from .metrics import (ClassMetrics, MetricsReport, RocCurve, evaluate, roc_auc)
from .mlp import (MlpModel, TrainConfig, TriageLabel, classify_vitals,
                  mlp_forward, mlp_init, mlp_loss_and_grad, mlp_train)
from .preprocess import (NormalizationParams, PreprocessReport,
                         apply_normalization, fit_normalization, preprocess,
                         rebalance, train_test_split)
from .records import (ACUITY_LEVELS, FIVE_FEATURES, MAIN_FEATURES,
                      VITAL_FIELDS, TriageRecord, VitalSigns, load_records,
                      save_records)
from .reporting import VictimReport
from .rules import RuleTable, default_rule_table, label_by_rule
from .scenario import Scenario, load_scenario
from .serialize import load_model, save_model
from .server import VictimRegistry, recover
from .simulation import (CollectorSink, HttpSink, MissionLog, detect,
                         run_mission, sense_vitals, simulate_step)
from .stats import ComparisonReport, compare_models, wilcoxon_one_tailed
from .synthesize import DEFAULT_CLASS_MIX, synthesize
from .tree import DecisionTree, gini_impurity, tree_fit, tree_predict

__all__ = [name for name in dir() if not name.startswith("_")]
