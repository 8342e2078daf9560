"""Topic discovery for unlabeled text corpora.

Clusters tf-idf / kernel-PCA document vectors with cosine-distance DBSCAN,
then scores and visualizes the words that distinguish each cluster from the
rest of the corpus. The ``relwords`` CLI stages the pipeline into persisted,
reproducible artifacts.
"""

__version__ = "0.1.0"

from .clustering import NOISE, ClusterAssignment, cosine_distance, dbscan, pairwise_distances
from .corpus import (
    Corpus,
    Document,
    fetch_archive,
    load_dir,
    load_jsonl,
    parse_timestamp,
    save_jsonl,
    split_by_period,
)
from .embedding import Embedding, KpcaModel, fit_kpca, transform
from .features import FeatureMatrix, Vocabulary, build_vocabulary, idf, vectorize
from .pipeline import PipelineConfig, PipelineResult, prepare_streams, run_clustering, tokenize_corpus
from .relevance import (
    OccurrenceIndex,
    RelevanceTable,
    build_occurrence_index,
    compute_relevance,
    contrast_relevance,
    fpr,
    rank_terms,
    score_diff,
    score_final,
    score_quot,
    tpr,
)
from .report import (
    TrendTable,
    WordCloudSpec,
    highlight_html,
    layout_wordcloud,
    render_contrast_cloud,
    render_svg,
    term_trends,
)
from .text import (
    BigramCandidate,
    TokenStream,
    apply_bigrams,
    normalize_tokenize,
    score_bigrams,
    select_bigrams,
)

__all__ = [
    "__version__",
    "NOISE",
    "BigramCandidate",
    "ClusterAssignment",
    "Corpus",
    "Document",
    "Embedding",
    "FeatureMatrix",
    "KpcaModel",
    "OccurrenceIndex",
    "PipelineConfig",
    "PipelineResult",
    "RelevanceTable",
    "TokenStream",
    "TrendTable",
    "Vocabulary",
    "WordCloudSpec",
    "apply_bigrams",
    "build_occurrence_index",
    "build_vocabulary",
    "compute_relevance",
    "contrast_relevance",
    "cosine_distance",
    "dbscan",
    "fetch_archive",
    "fit_kpca",
    "fpr",
    "highlight_html",
    "idf",
    "layout_wordcloud",
    "load_dir",
    "load_jsonl",
    "normalize_tokenize",
    "pairwise_distances",
    "parse_timestamp",
    "prepare_streams",
    "rank_terms",
    "render_contrast_cloud",
    "render_svg",
    "run_clustering",
    "save_jsonl",
    "score_bigrams",
    "score_diff",
    "score_final",
    "score_quot",
    "select_bigrams",
    "split_by_period",
    "term_trends",
    "tokenize_corpus",
    "tpr",
    "transform",
    "vectorize",
]
