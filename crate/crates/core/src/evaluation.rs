//! Evaluation protocols: test-set perplexity and pseudo-word
//! disambiguation with cross-validated grid search, a random-weight
//! control, a neighbor-voting variant, and paired t-tests.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::basemodel::{BigramModel, ConditionalModel, ModelError, ModelKind};
use crate::corpus::{
    count, derive_seed, extract_unseen, make_folds, split_train_test, CorpusError, PairCountTable,
    PairList, VocabularyIndex, WordId,
};
use crate::similarity::{
    Measure, Neighbor, NeighborList, SimilarityError, SimilarityMatrix, SimilarityValues,
};
use crate::smoothing::{make_base, SmoothedModel, SmoothingConfig, SmoothingError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty test set")]
    EmptyTestSet,
    #[error("no decisions to score")]
    EmptyDecisions,
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("need at least two folds, got {0}")]
    TooFewFolds(usize),
    #[error("paired t-test needs equal-length lists of at least 2, got {a} and {b}")]
    BadTTestInput { a: usize, b: usize },
    #[error("pseudo-words need at least two words, got {0}")]
    NeedTwoWords(usize),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn stage<E: std::error::Error + Send + Sync + 'static>(
    name: &'static str,
) -> impl FnOnce(E) -> EvalError {
    move |e| EvalError::Stage {
        stage: name,
        source: Box::new(e),
    }
}

// ---------------------------------------------------------------------------
// Perplexity
// ---------------------------------------------------------------------------

/// Test-set perplexity, or the first zero-probability pair when infinite.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PerplexityOutcome {
    Finite { value: f64 },
    Infinite { w1: WordId, w2: WordId },
}

impl PerplexityOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            PerplexityOutcome::Finite { value } => Some(*value),
            PerplexityOutcome::Infinite { .. } => None,
        }
    }
}

/// Geometric-mean inverse probability of the test pairs, computed in log
/// space. A zero-probability pair makes the perplexity infinite; the
/// offender is reported.
pub fn perplexity<M: BigramModel>(
    model: &M,
    test: &PairList,
) -> Result<PerplexityOutcome, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut log_sum = 0.0;
    for (w1, w2) in test.iter() {
        let p = model.prob(w1, w2)?;
        if p <= 0.0 {
            return Ok(PerplexityOutcome::Infinite { w1, w2 });
        }
        log_sum += p.ln();
    }
    Ok(PerplexityOutcome::Finite {
        value: (-log_sum / test.len() as f64).exp(),
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PerplexityReport {
    pub overall: PerplexityOutcome,
    /// Perplexity restricted to pairs unseen in training; `None` when the
    /// test set contains no unseen pairs.
    pub unseen: Option<PerplexityOutcome>,
    pub unseen_count: usize,
    pub total: usize,
    pub unseen_fraction: f64,
}

/// Overall and unseen-only perplexity against a training table.
pub fn unseen_subset_perplexity<M: BigramModel>(
    model: &M,
    test: &PairList,
    train: &PairCountTable,
) -> Result<PerplexityReport, EvalError> {
    let overall = perplexity(model, test)?;
    let unseen = extract_unseen(test, train);
    let unseen_count = unseen.len();
    let unseen_ppl = if unseen.is_empty() {
        None
    } else {
        Some(perplexity(model, &unseen)?)
    };
    Ok(PerplexityReport {
        overall,
        unseen: unseen_ppl,
        unseen_count,
        total: test.len(),
        unseen_fraction: unseen_count as f64 / test.len() as f64,
    })
}

// ---------------------------------------------------------------------------
// Pseudo-words
// ---------------------------------------------------------------------------

/// Partition of V2 into two-word pseudo-words by frequency ranking.
#[derive(Debug, Clone)]
pub struct PseudowordMap {
    partner: Vec<Option<WordId>>,
    pairs: Vec<(WordId, WordId)>,
    leftover: Option<WordId>,
}

/// Ranks words by descending frequency (ties by ascending id) and pairs
/// adjacent ranks. An odd leftover word is excluded and reported.
pub fn build_pseudowords(freqs: &[u64]) -> Result<PseudowordMap, EvalError> {
    if freqs.len() < 2 {
        return Err(EvalError::NeedTwoWords(freqs.len()));
    }
    let mut order: Vec<WordId> = (0..freqs.len() as WordId).collect();
    order.sort_by_key(|&w| (std::cmp::Reverse(freqs[w as usize]), w));
    let mut partner = vec![None; freqs.len()];
    let mut pairs = Vec::with_capacity(freqs.len() / 2);
    for chunk in order.chunks_exact(2) {
        let (a, b) = (chunk[0], chunk[1]);
        partner[a as usize] = Some(b);
        partner[b as usize] = Some(a);
        pairs.push((a, b));
    }
    let leftover = if order.len() % 2 == 1 {
        Some(*order.last().unwrap())
    } else {
        None
    };
    Ok(PseudowordMap {
        partner,
        pairs,
        leftover,
    })
}

impl PseudowordMap {
    /// The other member of w2's pseudo-word, if w2 belongs to one.
    pub fn partner(&self, w2: WordId) -> Option<WordId> {
        self.partner.get(w2 as usize).copied().flatten()
    }

    pub fn pairs(&self) -> &[(WordId, WordId)] {
        &self.pairs
    }

    pub fn leftover(&self) -> Option<WordId> {
        self.leftover
    }
}

// ---------------------------------------------------------------------------
// Decisions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    Incorrect,
    Tie,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub w1: WordId,
    pub true_w2: WordId,
    pub distractor: WordId,
    pub score_true: f64,
    pub score_distractor: f64,
    pub outcome: Outcome,
}

fn outcome_of(score_true: f64, score_distractor: f64) -> Outcome {
    // exact equality defines a tie; any epsilon would turn the all-zero
    // MLE case into coin flips
    if score_true > score_distractor {
        Outcome::Correct
    } else if score_true < score_distractor {
        Outcome::Incorrect
    } else {
        Outcome::Tie
    }
}

/// Scores both alternatives of a pseudo-word and picks the larger.
pub fn disambiguate<M: BigramModel>(
    model: &M,
    w1: WordId,
    true_w2: WordId,
    distractor: WordId,
) -> Result<Decision, ModelError> {
    let score_true = model.prob(w1, true_w2)?;
    let score_distractor = model.prob(w1, distractor)?;
    Ok(Decision {
        w1,
        true_w2,
        distractor,
        score_true,
        score_distractor,
        outcome: outcome_of(score_true, score_distractor),
    })
}

/// (# incorrect + #ties / 2) / N.
pub fn error_rate(decisions: &[Decision]) -> Result<f64, EvalError> {
    if decisions.is_empty() {
        return Err(EvalError::EmptyDecisions);
    }
    let mut incorrect = 0usize;
    let mut ties = 0usize;
    for d in decisions {
        match d.outcome {
            Outcome::Incorrect => incorrect += 1,
            Outcome::Tie => ties += 1,
            Outcome::Correct => {}
        }
    }
    Ok((incorrect as f64 + ties as f64 / 2.0) / decisions.len() as f64)
}

/// Unweighted vote of the k most similar neighbors: each neighbor backs
/// the alternative its own evidence row rates higher and abstains on a
/// tie; the majority wins, equal votes tie.
pub fn vote_disambiguate(
    neighbors: &NeighborList,
    evidence: &ConditionalModel,
    w1: WordId,
    true_w2: WordId,
    distractor: WordId,
) -> Result<Decision, ModelError> {
    let mut for_true = 0usize;
    let mut for_distractor = 0usize;
    for n in &neighbors.entries {
        let pt = evidence.prob(n.word, true_w2)?;
        let pd = evidence.prob(n.word, distractor)?;
        if pt > pd {
            for_true += 1;
        } else if pd > pt {
            for_distractor += 1;
        }
    }
    let (score_true, score_distractor) = (for_true as f64, for_distractor as f64);
    Ok(Decision {
        w1,
        true_w2,
        distractor,
        score_true,
        score_distractor,
        outcome: outcome_of(score_true, score_distractor),
    })
}

// ---------------------------------------------------------------------------
// Random-weight control
// ---------------------------------------------------------------------------

fn mix3(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform(0,1) weights over every other conditioning word that has a
/// distribution; deterministic per (seed, w1, w1').
pub fn rand_weights(table: &PairCountTable, w1: WordId, seed: u64) -> NeighborList {
    let mut entries = Vec::new();
    for other in 0..table.v1_len() as WordId {
        if other == w1 || table.marginal1(other) == 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix3(seed, w1 as u64, other as u64));
        let bits = rand::RngCore::next_u64(&mut rng);
        let u = ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        entries.push(Neighbor {
            word: other,
            value: u,
            weight: u,
        });
    }
    entries.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap().then(a.word.cmp(&b.word)));
    NeighborList {
        owner: w1,
        measure: Measure::Random,
        beta: 0.0,
        k: None,
        t: f64::INFINITY,
        entries,
    }
}

/// Random-weight similarity matrix over all of V1.
pub fn rand_matrix(table: &PairCountTable, seed: u64) -> SimilarityMatrix {
    let rows = (0..table.v1_len() as WordId)
        .map(|w1| rand_weights(table, w1, seed))
        .collect();
    SimilarityMatrix {
        measure: Measure::Random,
        base_kind: ModelKind::Mle,
        beta: 0.0,
        k: None,
        t: f64::INFINITY,
        rows,
    }
}

// ---------------------------------------------------------------------------
// Grid search and cross-validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ParamPoint {
    pub beta: f64,
    pub gamma: f64,
    pub k: Option<usize>,
    pub t: f64,
}

impl ParamPoint {
    pub fn beta(beta: f64) -> Self {
        Self {
            beta,
            gamma: 0.0,
            k: None,
            t: f64::INFINITY,
        }
    }
}

/// Cartesian grid in documented order: beta, then gamma, then k, then t
/// (beta outermost). Tie-breaking in the search prefers earlier points.
pub fn build_grid(
    betas: &[f64],
    gammas: &[f64],
    ks: &[Option<usize>],
    ts: &[f64],
) -> Vec<ParamPoint> {
    let mut grid = Vec::new();
    for &beta in betas {
        for &gamma in gammas {
            for &k in ks {
                for &t in ts {
                    grid.push(ParamPoint { beta, gamma, k, t });
                }
            }
        }
    }
    grid
}

/// Returns the grid index with minimal evaluated error; ties keep the
/// earliest point.
pub fn grid_search<F>(grid_len: usize, mut eval: F) -> Result<(usize, f64), EvalError>
where
    F: FnMut(usize) -> Result<f64, EvalError>,
{
    if grid_len == 0 {
        return Err(EvalError::EmptyGrid);
    }
    let mut best = (0usize, eval(0)?);
    for i in 1..grid_len {
        let e = eval(i)?;
        if e < best.1 {
            best = (i, e);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub error: f64,
    pub params: ParamPoint,
    pub tuning_error: f64,
}

/// Leave-one-fold-out evaluation: tune on the union of the other folds,
/// then score the held-out fold with the selected point.
///
/// `eval(grid_idx, folds)` must return the error of that grid point over
/// the given fold indices.
pub fn cross_validate<F>(
    n_folds: usize,
    grid: &[ParamPoint],
    mut eval: F,
) -> Result<Vec<FoldResult>, EvalError>
where
    F: FnMut(usize, &[usize]) -> Result<f64, EvalError>,
{
    if n_folds < 2 {
        return Err(EvalError::TooFewFolds(n_folds));
    }
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let mut results = Vec::with_capacity(n_folds);
    for fold in 0..n_folds {
        let others: Vec<usize> = (0..n_folds).filter(|&j| j != fold).collect();
        let (best, tuning_error) = grid_search(grid.len(), |i| eval(i, &others))?;
        let error = eval(best, &[fold])?;
        results.push(FoldResult {
            fold,
            error,
            params: grid[best].clone(),
            tuning_error,
        });
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// Paired t-test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub dof: usize,
    /// Zero variance of the differences: p is 1 (identical lists) or 0
    /// (constant nonzero shift) by convention rather than computation.
    pub degenerate: bool,
}

/// Standard paired t statistic with n-1 degrees of freedom and a
/// two-sided p-value.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, EvalError> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(EvalError::BadTTestInput {
            a: a.len(),
            b: b.len(),
        });
    }
    let n = a.len();
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let dof = n - 1;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult {
                t: 0.0,
                p: 1.0,
                dof,
                degenerate: true,
            }
        } else {
            TTestResult {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                dof,
                degenerate: true,
            }
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("valid dof");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TTestResult {
        t,
        p,
        dof,
        degenerate: false,
    })
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

/// A scoring method compared by the disambiguation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mle,
    Katz,
    Rand,
    Sim(Measure),
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Mle => write!(f, "mle"),
            Method::Katz => write!(f, "katz"),
            Method::Rand => write!(f, "rand"),
            Method::Sim(m) => write!(f, "{m}"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mle" => Ok(Method::Mle),
            "katz" => Ok(Method::Katz),
            "rand" => Ok(Method::Rand),
            "conf" => Ok(Method::Sim(Measure::Confusion)),
            "l1" => Ok(Method::Sim(Measure::L1)),
            "js" => Ok(Method::Sim(Measure::Js)),
            "kl" => Ok(Method::Sim(Measure::Kl)),
            other => Err(format!(
                "unknown method {other:?} (expected mle|katz|rand|conf|l1|js|kl)"
            )),
        }
    }
}

/// Default beta grids bracketing each measure's useful range. J lives on a
/// compressed scale and needs much larger beta than L or D.
pub fn default_beta_grid(measure: Measure) -> Vec<f64> {
    match measure {
        Measure::Js => (1..=30).map(|b| b as f64).collect(),
        Measure::L1 | Measure::Kl => (1..=16).map(|b| b as f64 * 0.5).collect(),
        Measure::Confusion | Measure::Random => vec![0.0],
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub n_folds: usize,
    pub seed: u64,
    pub test_fraction: f64,
    pub drop_singletons: bool,
    pub gt_threshold: u64,
    /// Per-measure beta grid overrides (defaults from [`default_beta_grid`]).
    pub beta_grids: BTreeMap<String, Vec<f64>>,
    /// Neighbor counts for the voting variant; empty disables it.
    pub voting_ks: Vec<usize>,
    /// Emit per-beta sweep data for the tuned measures.
    pub sweeps: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: vec![
                Method::Mle,
                Method::Katz,
                Method::Rand,
                Method::Sim(Measure::Confusion),
                Method::Sim(Measure::L1),
                Method::Sim(Measure::Js),
            ],
            n_folds: 5,
            seed: 0,
            test_fraction: 0.2,
            drop_singletons: false,
            gt_threshold: crate::basemodel::DEFAULT_GT_THRESHOLD,
            beta_grids: BTreeMap::new(),
            voting_ks: Vec::new(),
            sweeps: true,
        }
    }
}

impl ExperimentConfig {
    fn grid_for(&self, measure: Measure) -> Vec<f64> {
        self.beta_grids
            .get(&measure.to_string())
            .cloned()
            .unwrap_or_else(|| default_beta_grid(measure))
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MethodReport {
    pub method: String,
    pub fold_errors: Vec<f64>,
    pub mean_error: f64,
    /// Per-fold tuned beta for grid-searched measures.
    pub tuned_beta: Option<Vec<f64>>,
    pub tuning_errors: Option<Vec<f64>>,
}

impl MethodReport {
    fn plain(method: String, fold_errors: Vec<f64>) -> Self {
        let mean_error = fold_errors.iter().sum::<f64>() / fold_errors.len() as f64;
        Self {
            method,
            fold_errors,
            mean_error,
            tuned_beta: None,
            tuning_errors: None,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepPoint {
    pub method: String,
    pub beta: f64,
    pub fold: usize,
    pub error: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VotingPoint {
    pub method: String,
    pub k: usize,
    pub fold: usize,
    pub error: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TTestEntry {
    pub method_a: String,
    pub method_b: String,
    #[serde(flatten)]
    pub result: TTestResult,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub n_folds: usize,
    pub test_fraction: f64,
    pub drop_singletons: bool,
    pub gt_threshold: u64,
    pub n_train_instances: usize,
    pub n_test_instances: usize,
    pub n_unseen: usize,
    /// Unseen instances dropped because their conditioning word has no
    /// row in the model table (possible after singleton deletion).
    pub n_excluded_no_row: usize,
    /// Unseen instances dropped because their conditioned word is the
    /// odd leftover of the pseudo-word pairing.
    pub n_excluded_leftover: usize,
    pub train_singletons: usize,
    pub n_pseudowords: usize,
    pub leftover_word: Option<String>,
    pub methods: Vec<MethodReport>,
    pub t_tests: Vec<TTestEntry>,
    pub sweeps: Vec<SweepPoint>,
    pub voting: Vec<VotingPoint>,
}

impl EvaluationReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    pub fn write_json<W: Write>(&self, out: W) -> io::Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(io::Error::other)
    }

    /// One `param,fold,error` CSV per swept method (beta sweeps) and per
    /// voted method (k sweeps). Returns the files written.
    pub fn write_sweep_csvs(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let mut by_method: BTreeMap<&str, Vec<(f64, usize, f64)>> = BTreeMap::new();
        for p in &self.sweeps {
            by_method
                .entry(&p.method)
                .or_default()
                .push((p.beta, p.fold, p.error));
        }
        for (method, rows) in by_method {
            let path = dir.join(format!("sweep_beta_{method}.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "param,fold,error")?;
            for (beta, fold, error) in rows {
                writeln!(f, "{beta},{fold},{error}")?;
            }
            written.push(path);
        }
        let mut by_method: BTreeMap<&str, Vec<(usize, usize, f64)>> = BTreeMap::new();
        for p in &self.voting {
            by_method
                .entry(&p.method)
                .or_default()
                .push((p.k, p.fold, p.error));
        }
        for (method, rows) in by_method {
            let path = dir.join(format!("voting_{method}.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "param,fold,error")?;
            for (k, fold, error) in rows {
                writeln!(f, "{k},{fold},{error}")?;
            }
            written.push(path);
        }
        Ok(written)
    }
}

struct Instance {
    w1: WordId,
    true_w2: WordId,
    distractor: WordId,
}

/// Everything the disambiguation pipeline derives from raw pairs before
/// any method runs: split, tables, unseen instances per fold, pairing.
struct PipelineData {
    full_table: Arc<PairCountTable>,
    model_table: Arc<PairCountTable>,
    evidence: Arc<ConditionalModel>,
    fold_instances: Vec<Vec<Instance>>,
    pseudowords: PseudowordMap,
    n_train: usize,
    n_test: usize,
    n_unseen: usize,
    n_excluded_no_row: usize,
    n_excluded_leftover: usize,
}

fn prepare_pipeline(
    pairs: &PairList,
    n_folds: usize,
    seed: u64,
    test_fraction: f64,
    drop_singletons: bool,
    gt_threshold: u64,
) -> Result<PipelineData, EvalError> {
    let split_seed = derive_seed(seed, "split");
    let folds_seed = derive_seed(seed, "folds");
    let (train, test) =
        split_train_test(pairs, test_fraction, split_seed).map_err(stage("split"))?;
    let full_table = Arc::new(count(&train));
    let model_table = if drop_singletons {
        Arc::new(full_table.remove_singletons())
    } else {
        full_table.clone()
    };

    // Unseen-ness and pseudo-word frequencies always refer to the full
    // training set, so the with/without-singleton runs share one test set
    // and one pairing.
    let unseen = extract_unseen(&test, &full_table);
    let n_unseen = unseen.len();
    let scorable: Vec<(WordId, WordId)> = unseen
        .iter()
        .filter(|&(w1, _)| model_table.marginal1(w1) > 0)
        .collect();
    let n_excluded_no_row = n_unseen - scorable.len();
    if n_excluded_no_row > 0 {
        log::warn!(
            "excluding {n_excluded_no_row} unseen instances whose conditioning word has no row \
             in the model table"
        );
    }
    let scorable = PairList::from_instances(scorable, pairs.v1_len(), pairs.v2_len());
    let folds = make_folds(&scorable, n_folds, folds_seed).map_err(stage("folds"))?;

    let freqs: Vec<u64> = (0..full_table.v2_len() as WordId)
        .map(|w| full_table.marginal2(w))
        .collect();
    let pseudowords = build_pseudowords(&freqs).map_err(stage("pseudowords"))?;

    let mut n_excluded_leftover = 0usize;
    let fold_instances: Vec<Vec<Instance>> = folds
        .iter()
        .map(|fold| {
            fold.iter()
                .filter_map(|(w1, true_w2)| match pseudowords.partner(true_w2) {
                    Some(distractor) => Some(Instance {
                        w1,
                        true_w2,
                        distractor,
                    }),
                    None => {
                        n_excluded_leftover += 1;
                        None
                    }
                })
                .collect()
        })
        .collect();

    let evidence = Arc::new(make_base(&model_table, ModelKind::Mle, gt_threshold)?);
    Ok(PipelineData {
        full_table,
        model_table,
        evidence,
        fold_instances,
        pseudowords,
        n_train: train.len(),
        n_test: test.len(),
        n_unseen,
        n_excluded_no_row,
        n_excluded_leftover,
    })
}

fn sim_base_for(
    measure: Measure,
    model_table: &Arc<PairCountTable>,
    evidence: &Arc<ConditionalModel>,
    gt_threshold: u64,
) -> Result<ConditionalModel, EvalError> {
    if measure == Measure::Kl {
        Ok(make_base(model_table, ModelKind::Katz, gt_threshold).map_err(stage("kl-base"))?)
    } else {
        Ok((*evidence.as_ref()).clone())
    }
}

/// Cross-validated grid search for one similarity measure over the full
/// (beta, gamma, k, t) grid. Shares the experiment pipeline: an 80/20
/// split, unseen extraction, folds, and frequency-paired pseudo-words.
#[allow(clippy::too_many_arguments)]
pub fn tune_measure(
    pairs: &PairList,
    measure: Measure,
    grid: &[ParamPoint],
    n_folds: usize,
    seed: u64,
    test_fraction: f64,
    drop_singletons: bool,
    gt_threshold: u64,
) -> Result<Vec<FoldResult>, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let data = prepare_pipeline(
        pairs,
        n_folds,
        seed,
        test_fraction,
        drop_singletons,
        gt_threshold,
    )?;
    let base = sim_base_for(measure, &data.model_table, &data.evidence, gt_threshold)?;
    let values = SimilarityValues::compute(&base, measure).map_err(stage("similarity"))?;
    let mut memo: Vec<Vec<Vec<Decision>>> = Vec::with_capacity(grid.len());
    for point in grid {
        let matrix = values.to_matrix(point.beta, point.k, point.t);
        let config = SmoothingConfig {
            measure,
            beta: point.beta,
            gamma: point.gamma,
            k: point.k,
            t: point.t,
            sim_base: base.kind(),
            evidence_base: ModelKind::Mle,
            gt_threshold,
        };
        let model =
            SmoothedModel::from_parts(data.model_table.clone(), &matrix, &data.evidence, config)
                .map_err(stage("smoothed-model"))?;
        let decisions = data
            .fold_instances
            .iter()
            .map(|fold| {
                fold.iter()
                    .map(|i| disambiguate(&model, i.w1, i.true_w2, i.distractor))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        memo.push(decisions);
    }
    cross_validate(n_folds, grid, |gi, fold_set| {
        let pooled: Vec<Decision> = fold_set
            .iter()
            .flat_map(|&f| memo[gi][f].iter().cloned())
            .collect();
        error_rate(&pooled)
    })
}

fn fold_errors<M: BigramModel>(
    model: &M,
    folds: &[Vec<Instance>],
) -> Result<Vec<f64>, EvalError> {
    folds
        .iter()
        .map(|fold| {
            let decisions = fold
                .iter()
                .map(|i| disambiguate(model, i.w1, i.true_w2, i.distractor))
                .collect::<Result<Vec<_>, _>>()?;
            error_rate(&decisions)
        })
        .collect()
}

fn wsd_config(measure: Measure, beta: f64, gt_threshold: u64) -> SmoothingConfig {
    SmoothingConfig {
        measure,
        beta,
        gamma: 0.0,
        k: None,
        t: f64::INFINITY,
        sim_base: if measure == Measure::Kl {
            ModelKind::Katz
        } else {
            ModelKind::Mle
        },
        evidence_base: ModelKind::Mle,
        gt_threshold,
    }
}

/// Runs the whole pseudo-word disambiguation pipeline: split, unseen
/// extraction, fold construction, pseudo-word pairing, per-method scoring
/// with cross-validated beta search, optional sweeps and voting, and
/// pairwise significance tests.
pub fn run_experiment(
    vocab: &VocabularyIndex,
    pairs: &PairList,
    config: &ExperimentConfig,
) -> Result<EvaluationReport, EvalError> {
    if config.methods.is_empty() {
        return Err(EvalError::Stage {
            stage: "config",
            source: "no methods configured".into(),
        });
    }
    let rand_seed = derive_seed(config.seed, "rand-weights");
    let data = prepare_pipeline(
        pairs,
        config.n_folds,
        config.seed,
        config.test_fraction,
        config.drop_singletons,
        config.gt_threshold,
    )?;
    let PipelineData {
        full_table,
        model_table,
        evidence,
        fold_instances,
        pseudowords,
        n_train,
        n_test,
        n_unseen,
        n_excluded_no_row,
        n_excluded_leftover,
    } = data;

    let mut sim_values: BTreeMap<String, SimilarityValues> = BTreeMap::new();
    for method in &config.methods {
        if let Method::Sim(measure) = method {
            let base = sim_base_for(*measure, &model_table, &evidence, config.gt_threshold)?;
            sim_values.insert(
                measure.to_string(),
                SimilarityValues::compute(&base, *measure).map_err(stage("similarity"))?,
            );
        }
    }

    let mut methods_out = Vec::new();
    let mut sweeps = Vec::new();
    for method in &config.methods {
        let name = method.to_string();
        let report = match method {
            Method::Mle => {
                let model = make_base(&model_table, ModelKind::Mle, config.gt_threshold)?;
                MethodReport::plain(name, fold_errors(&model, &fold_instances)?)
            }
            Method::Katz => {
                let model = make_base(&model_table, ModelKind::Katz, config.gt_threshold)
                    .map_err(stage("katz"))?;
                MethodReport::plain(name, fold_errors(&model, &fold_instances)?)
            }
            Method::Rand => {
                let matrix = rand_matrix(&model_table, rand_seed);
                let model = SmoothedModel::from_parts(
                    model_table.clone(),
                    &matrix,
                    &evidence,
                    wsd_config(Measure::Random, 0.0, config.gt_threshold),
                )
                .map_err(stage("rand"))?;
                MethodReport::plain(name, fold_errors(&model, &fold_instances)?)
            }
            Method::Sim(Measure::Confusion) => {
                let values = &sim_values[&name];
                let matrix = values.to_matrix(0.0, None, f64::INFINITY);
                let model = SmoothedModel::from_parts(
                    model_table.clone(),
                    &matrix,
                    &evidence,
                    wsd_config(Measure::Confusion, 0.0, config.gt_threshold),
                )
                .map_err(stage("confusion"))?;
                MethodReport::plain(name, fold_errors(&model, &fold_instances)?)
            }
            Method::Sim(measure) => {
                let values = &sim_values[&name];
                let betas = config.grid_for(*measure);
                // one model per grid point; decisions memoized across folds
                let mut memo: Vec<Vec<Vec<Decision>>> = Vec::with_capacity(betas.len());
                for &beta in &betas {
                    let matrix = values.to_matrix(beta, None, f64::INFINITY);
                    let model = SmoothedModel::from_parts(
                        model_table.clone(),
                        &matrix,
                        &evidence,
                        wsd_config(*measure, beta, config.gt_threshold),
                    )
                    .map_err(stage("smoothed-model"))?;
                    let decisions = fold_instances
                        .iter()
                        .map(|fold| {
                            fold.iter()
                                .map(|i| disambiguate(&model, i.w1, i.true_w2, i.distractor))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    memo.push(decisions);
                }
                if config.sweeps {
                    for (bi, &beta) in betas.iter().enumerate() {
                        for fold in 0..config.n_folds {
                            sweeps.push(SweepPoint {
                                method: name.clone(),
                                beta,
                                fold,
                                error: error_rate(&memo[bi][fold])?,
                            });
                        }
                    }
                }
                let grid: Vec<ParamPoint> =
                    betas.iter().map(|&b| ParamPoint::beta(b)).collect();
                let results = cross_validate(config.n_folds, &grid, |gi, fold_set| {
                    let pooled: Vec<Decision> = fold_set
                        .iter()
                        .flat_map(|&f| memo[gi][f].iter().cloned())
                        .collect();
                    error_rate(&pooled)
                })?;
                let fold_errs: Vec<f64> = results.iter().map(|r| r.error).collect();
                let mean_error = fold_errs.iter().sum::<f64>() / fold_errs.len() as f64;
                MethodReport {
                    method: name,
                    mean_error,
                    fold_errors: fold_errs,
                    tuned_beta: Some(results.iter().map(|r| r.params.beta).collect()),
                    tuning_errors: Some(results.iter().map(|r| r.tuning_error).collect()),
                }
            }
        };
        methods_out.push(report);
    }

    let mut voting = Vec::new();
    for method in &config.methods {
        let Method::Sim(measure) = method else {
            continue;
        };
        if config.voting_ks.is_empty() {
            break;
        }
        let values = &sim_values[&measure.to_string()];
        for &k in &config.voting_ks {
            for (fold, instances) in fold_instances.iter().enumerate() {
                let decisions = instances
                    .iter()
                    .map(|i| {
                        let list = values.neighbor_list(i.w1, 1.0, Some(k), f64::INFINITY);
                        vote_disambiguate(&list, &evidence, i.w1, i.true_w2, i.distractor)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                voting.push(VotingPoint {
                    method: measure.to_string(),
                    k,
                    fold,
                    error: error_rate(&decisions)?,
                });
            }
        }
    }

    let mut t_tests = Vec::new();
    for i in 0..methods_out.len() {
        for j in (i + 1)..methods_out.len() {
            let result = paired_t_test(&methods_out[i].fold_errors, &methods_out[j].fold_errors)?;
            t_tests.push(TTestEntry {
                method_a: methods_out[i].method.clone(),
                method_b: methods_out[j].method.clone(),
                result,
            });
        }
    }

    Ok(EvaluationReport {
        seed: config.seed,
        n_folds: config.n_folds,
        test_fraction: config.test_fraction,
        drop_singletons: config.drop_singletons,
        gt_threshold: config.gt_threshold,
        n_train_instances: n_train,
        n_test_instances: n_test,
        n_unseen,
        n_excluded_no_row,
        n_excluded_leftover,
        train_singletons: full_table.singleton_count(),
        n_pseudowords: pseudowords.pairs().len(),
        leftover_word: pseudowords
            .leftover()
            .and_then(|w| vocab.v2.word(w))
            .map(str::to_owned),
        methods: methods_out,
        t_tests,
        sweeps,
        voting,
    })
}
