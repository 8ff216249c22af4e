"""semshift: corpus-distance and generalizability auditing for clinical-style text.

Pipeline: extract diagnosis sentences from notes, embed them (pluggable
backend), measure dataset distance with the median cosine distance, train
softmax sentiment heads over combinatorial specialty cohorts, and relate test
performance to train/test semantic distance.
"""

from .backend import backend_name
from .classifier import CLASS_ORDER, SoftmaxHead, TrainConfig, TrainReport, train_head
from .cohorts import Cohort, Relation, build_cohorts, relation
from .config import EmbeddingSourceConfig, ExperimentConfig, load_config
from .distance import DistanceSummary, intra_mcd, mcd, pairwise_cosine
from .embeddings import (
    EmbeddingMatrix,
    TestEmbedder,
    cosine_distance,
    fetch_embeddings,
    load_embeddings,
    mean_pool,
    save_embeddings,
    test_embed,
)
from .experiment import (
    ExperimentResult,
    compute_summary_stats,
    reproduce_reference_stats,
    run_experiment,
)
from .ingest import (
    Lexicon,
    NoteDocument,
    SentenceRecord,
    extract_sentences,
    match_lexicon,
    sentencize,
    tokenize,
)
from .metrics import (
    PerformanceRecord,
    PrCurve,
    RocCurve,
    auc,
    macro_average_auc,
    ppv_at_recall,
    pr_curve,
    roc_curve,
)
from .projection import PcaModel, TsneConfig, pca_fit, pca_transform, tsne
from .stats import (
    AnovaResult,
    OlsResult,
    TTestResult,
    f_cdf,
    ols,
    one_way_anova,
    rm_anova,
    t_cdf,
    t_test_one_sample,
    t_test_two_sample,
)

__version__ = "0.1.0"
