"""Structure-aware mixture-of-experts password modeling toolkit."""

__version__ = "0.1.0"

from .alphabet import MAX_PASSWORD_LEN, Alphabet
from .clustering import ClusterModel, KSelectionReport, kmeans, select_k, silhouette
from .corpus import (PairRecord, PasswordRecord, extract_pairs, load_passwords,
                     split_train_test)
from .distill import DistillConfig, distill, distill_loss, student_fidelity, temper
from .editops import EditOp, apply_edits, levenshtein, min_edit_script
from .expert import NGramConfig, NGramExpert, finetune, pretrain
from .features import Standardizer, extract_features, fit_standardizer, standardize
from .gate import GateConfig, SparseWeights, gate_weights, weights_from_distances
from .offline import (GenerationConfig, GuessEstimate, OfflineMope, crack_curve,
                      estimate_guess_number, generate, mixture_next_char,
                      sequence_prob, train_offline)
from .online import (OnlineMope, beam_search, finetune_online, online_crack_rate,
                     pretrain_online, train_online)
from .psm import StrengthMeter, StrengthVerdict, strength_level, unsafe_error_matrix

__all__ = [
    "MAX_PASSWORD_LEN", "Alphabet",
    "ClusterModel", "KSelectionReport", "kmeans", "select_k", "silhouette",
    "PairRecord", "PasswordRecord", "extract_pairs", "load_passwords", "split_train_test",
    "DistillConfig", "distill", "distill_loss", "student_fidelity", "temper",
    "EditOp", "apply_edits", "levenshtein", "min_edit_script",
    "NGramConfig", "NGramExpert", "finetune", "pretrain",
    "Standardizer", "extract_features", "fit_standardizer", "standardize",
    "GateConfig", "SparseWeights", "gate_weights", "weights_from_distances",
    "GenerationConfig", "GuessEstimate", "OfflineMope", "crack_curve",
    "estimate_guess_number", "generate", "mixture_next_char", "sequence_prob",
    "train_offline",
    "OnlineMope", "beam_search", "finetune_online", "online_crack_rate",
    "pretrain_online", "train_online",
    "StrengthMeter", "StrengthVerdict", "strength_level", "unsafe_error_matrix",
    "__version__",
]
