"""CTR-weighted consensus ranking and scoring of search-engine result pages."""

from ._core import (  # noqa: F401
    CanonicalizationPolicy,
    Corpus,
    FetchError,
    IngestError,
    MalformedUrl,
    ScoreTable,
    build_corpus,
    canonical_url,
    compute_scores,
    confidence_interval,
    consensus_ranking,
    consensus_score,
    engine_mean_score,
    engine_score,
    extreme_queries,
    group_subpages,
    load_corpus,
    normal_quantile,
    overlap_curve,
    page_scores,
    paired_t_test,
    regularized_incomplete_beta,
    relative_scores,
    run_pipeline,
    student_t_two_sided_p,
    synthetic_records,
    default_ctr,
)

__version__ = "0.1.0"
