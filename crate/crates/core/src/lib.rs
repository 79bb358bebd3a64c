//! Similarity-based smoothing for sparse bigram cooccurrence models.
//!
//! Estimates probabilities of unseen word pairs from the cooccurrence
//! behavior of distributionally similar words, plugged into a Katz-style
//! back-off skeleton. Ships the two evaluation protocols that motivate the
//! estimator: test-set perplexity and pseudo-word disambiguation with
//! cross-validated parameter search.

pub mod basemodel;
pub mod corpus;
pub mod evaluation;
pub mod similarity;
pub mod smoothing;
pub mod synth;

pub use basemodel::{
    good_turing_discount, katz_backoff, load_model, mle_conditional, mle_unigram, raw_good_turing,
    save_model, BigramModel, ConditionalModel, CountOfCounts, KatzModel, MleModel, ModelError,
    ModelKind, Redistribution, Side, UnigramModel, DEFAULT_GT_THRESHOLD,
};
pub use corpus::{
    count, derive_seed, extract_unseen, ingest_pairs, make_folds, split_train_test, write_pairs,
    CorpusError, Lexicon, PairCountTable, PairList, VocabularyIndex, WordId,
};
pub use evaluation::{
    build_grid, build_pseudowords, cross_validate, default_beta_grid, disambiguate, error_rate,
    grid_search, paired_t_test, perplexity, rand_matrix, rand_weights, run_experiment,
    tune_measure, unseen_subset_perplexity, vote_disambiguate, Decision, EvalError,
    EvaluationReport, ExperimentConfig, FoldResult, Method, Outcome, ParamPoint,
    PerplexityOutcome, PerplexityReport, PseudowordMap, TTestResult,
};
pub use similarity::{
    build_similarity_matrix, confusion_probability, jensen_shannon, kl_divergence, l1_distance,
    neighbors, weight, write_matrix, Measure, Neighbor, NeighborList, SimilarityError,
    SimilarityMatrix, SimilarityValues, SparseDistribution, LOG10_2,
};
pub use smoothing::{
    make_base, p_redistribute, p_sim, Preset, SmoothedModel, SmoothingConfig, SmoothingError,
};
pub use synth::{two_cluster_corpus, SynthConfig};
