//! Similarity-based smoothing: the back-off skeleton with a
//! similarity-weighted redistribution estimate for unseen pairs.
//!
//! Seen pairs keep their Good-Turing discounted probability; the leftover
//! mass goes to unseen pairs in proportion to
//! gamma * P(w2) + (1 - gamma) * P_SIM(w2|w1), normalized per row.

use std::sync::Arc;

use thiserror::Error;

use crate::basemodel::{
    discount_table, katz_backoff, mle_conditional, mle_unigram, unigram_row_summary, BigramModel,
    ConditionalModel, ModelError, ModelKind, Redistribution, Side, UnigramModel,
    DEFAULT_GT_THRESHOLD,
};
use crate::corpus::{PairCountTable, WordId};
use crate::similarity::{Measure, NeighborList, SimilarityError, SimilarityMatrix, SimilarityValues};

#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("invalid smoothing configuration: {0}")]
    Config(String),
    #[error("no similarity evidence for w1={w1}: empty neighbor list or zero normalizer")]
    NoEvidence { w1: WordId },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// The two compositions used in practice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Language modeling: KL over Katz rows, Katz evidence, gamma-interpolated.
    Lm,
    /// Disambiguation: gamma = 0, MLE base and evidence, S(w1) = V1.
    Wsd,
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lm" => Ok(Preset::Lm),
            "wsd" => Ok(Preset::Wsd),
            other => Err(format!("unknown preset {other:?} (expected lm|wsd)")),
        }
    }
}

/// Full parameterization of a smoothed model.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingConfig {
    pub measure: Measure,
    pub beta: f64,
    pub gamma: f64,
    /// Neighbor count cap; `None` means S(w1) = V1.
    pub k: Option<usize>,
    /// Dissimilarity threshold; `f64::INFINITY` disables it.
    pub t: f64,
    /// Base model whose rows the similarity values are computed from.
    pub sim_base: ModelKind,
    /// Base model supplying the evidence P(w2|w1') inside the estimate.
    pub evidence_base: ModelKind,
    pub gt_threshold: u64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Preset::Lm.config()
    }
}

impl Preset {
    pub fn config(self) -> SmoothingConfig {
        match self {
            Preset::Lm => SmoothingConfig {
                measure: Measure::Kl,
                beta: 4.0,
                gamma: 0.15,
                k: Some(60),
                t: 2.5,
                sim_base: ModelKind::Katz,
                evidence_base: ModelKind::Katz,
                gt_threshold: DEFAULT_GT_THRESHOLD,
            },
            Preset::Wsd => SmoothingConfig {
                measure: Measure::Js,
                beta: 4.0,
                gamma: 0.0,
                k: None,
                t: f64::INFINITY,
                sim_base: ModelKind::Mle,
                evidence_base: ModelKind::Mle,
                gt_threshold: DEFAULT_GT_THRESHOLD,
            },
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<(), SmoothingError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(SmoothingError::Config(format!(
                "gamma must be in [0,1], got {}",
                self.gamma
            )));
        }
        if matches!(self.measure, Measure::Kl | Measure::Js | Measure::L1) && self.beta <= 0.0 {
            return Err(SmoothingError::Config(format!(
                "beta must be positive for measure {}, got {}",
                self.measure, self.beta
            )));
        }
        if self.t <= 0.0 {
            return Err(SmoothingError::Config(format!(
                "threshold t must be positive, got {}",
                self.t
            )));
        }
        if self.k == Some(0) {
            return Err(SmoothingError::Config("k must be >= 1 (or inf)".into()));
        }
        if self.measure == Measure::Kl && self.sim_base != ModelKind::Katz {
            return Err(SmoothingError::Config(
                "KL similarity requires a smoothed (katz) base: MLE rows have undefined ratios"
                    .into(),
            ));
        }
        if self.measure == Measure::Confusion && self.sim_base != ModelKind::Mle {
            return Err(SmoothingError::Config(
                "confusion probability requires an MLE base (Bayes consistency)".into(),
            ));
        }
        if self.gt_threshold < 2 {
            return Err(SmoothingError::Config(
                "Good-Turing threshold must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// Similarity-weighted average of the neighbors' evidence:
/// P_SIM(w2|w1) = sum over S(w1) of [W(w1,w1') / norm(w1)] * P(w2|w1').
///
/// Errors when there is no evidence to average (empty list or zero
/// normalizer); callers fall back to the unigram path.
pub fn p_sim(
    w2: WordId,
    neighbors: &NeighborList,
    evidence: &ConditionalModel,
) -> Result<f64, SmoothingError> {
    let norm = neighbors.norm();
    if neighbors.is_empty() || norm <= 0.0 {
        return Err(SmoothingError::NoEvidence {
            w1: neighbors.owner,
        });
    }
    let mut acc = 0.0;
    for n in &neighbors.entries {
        if n.weight <= 0.0 {
            continue;
        }
        acc += n.weight / norm * evidence.prob(n.word, w2)?;
    }
    Ok(acc)
}

/// gamma * P(w2) + (1 - gamma) * P_SIM(w2|w1).
pub fn p_redistribute(w2: WordId, gamma: f64, unigram: &UnigramModel, psim: f64) -> f64 {
    gamma * unigram.prob(w2) + (1.0 - gamma) * psim
}

#[derive(Debug, Clone, Copy)]
enum RowNorm {
    Undefined,
    Backoff { alpha: f64 },
    Complete { scale: f64 },
}

/// How a row's redistribution estimate is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowMode {
    /// gamma-interpolated similarity estimate.
    Similarity,
    /// Pure unigram: gamma = 1, or the logged fallback for rows without
    /// usable similarity evidence.
    Unigram,
}

/// The composed model: discounted seen pairs, similarity-redistributed
/// unseen pairs. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SmoothedModel {
    table: Arc<PairCountTable>,
    pd_rows: Vec<Vec<(WordId, f64)>>,
    norms: Vec<RowNorm>,
    modes: Vec<RowMode>,
    psim_rows: Vec<Vec<(WordId, f64)>>,
    unigram: Arc<UnigramModel>,
    config: SmoothingConfig,
}

impl SmoothedModel {
    /// Builds the model from scratch: base models, similarity matrix, then
    /// per-row redistribution and alphas.
    pub fn build(table: Arc<PairCountTable>, config: SmoothingConfig) -> Result<Self, SmoothingError> {
        config.validate()?;
        if config.measure == Measure::Random {
            return Err(SmoothingError::Config(
                "random weights have no matrix to compute; use from_parts".into(),
            ));
        }
        let sim_base = make_base(&table, config.sim_base, config.gt_threshold)?;
        let matrix = SimilarityValues::compute(&sim_base, config.measure)?.to_matrix(
            config.beta,
            config.k,
            config.t,
        );
        let evidence = if config.evidence_base == config.sim_base {
            Arc::new(sim_base)
        } else {
            Arc::new(make_base(&table, config.evidence_base, config.gt_threshold)?)
        };
        Self::from_parts(table, &matrix, &evidence, config)
    }

    /// Builds the model from a precomputed matrix and evidence model.
    /// The experiment driver uses this to share similarity values across
    /// grid points.
    pub fn from_parts(
        table: Arc<PairCountTable>,
        matrix: &SimilarityMatrix,
        evidence: &Arc<ConditionalModel>,
        config: SmoothingConfig,
    ) -> Result<Self, SmoothingError> {
        config.validate()?;
        if matrix.v1_len() != table.v1_len() {
            return Err(SmoothingError::Config(format!(
                "matrix covers {} conditioning words, table has {}",
                matrix.v1_len(),
                table.v1_len()
            )));
        }
        let unigram = Arc::new(mle_unigram(&table, Side::V2)?);
        let disc = discount_table(&table, config.gt_threshold)?;
        let v1_len = table.v1_len();
        let v2_len = table.v2_len();
        let gamma = config.gamma;
        let unigram_only = (1.0 - gamma) == 0.0;

        // evidence rows fetched once; neighbor loops reuse them heavily
        let mut evidence_rows: Vec<Option<SparseDistribution>> = Vec::with_capacity(v1_len);
        if !unigram_only {
            for w1 in 0..v1_len as WordId {
                if table.marginal1(w1) == 0 {
                    evidence_rows.push(None);
                } else {
                    evidence_rows.push(Some(evidence.row(w1)?));
                }
            }
        }

        let mut norms = Vec::with_capacity(v1_len);
        let mut modes = Vec::with_capacity(v1_len);
        let mut psim_rows = Vec::with_capacity(v1_len);
        let mut dense = vec![0.0f64; v2_len];

        for w1 in 0..v1_len as WordId {
            if table.marginal1(w1) == 0 {
                norms.push(RowNorm::Undefined);
                modes.push(RowMode::Unigram);
                psim_rows.push(Vec::new());
                continue;
            }
            let leftover = disc.leftover[w1 as usize];
            let seen_row = table.row(w1);
            let has_unseen_w2 = seen_row.len() < v2_len;

            let mut mode = RowMode::Unigram;
            let mut psim: Vec<(WordId, f64)> = Vec::new();
            if !unigram_only {
                let list = matrix.row(w1).expect("matrix length checked");
                let norm = list.norm();
                if list.is_empty() || norm <= 0.0 {
                    log::warn!(
                        "w1={w1}: no similarity evidence (empty neighbor set or zero weights); \
                         falling back to unigram redistribution"
                    );
                } else {
                    for n in &list.entries {
                        if n.weight <= 0.0 {
                            continue;
                        }
                        if let Some(row) = &evidence_rows[n.word as usize] {
                            let share = n.weight / norm;
                            for (w2, p) in row.iter() {
                                dense[w2 as usize] += share * p;
                            }
                        }
                    }
                    psim = dense
                        .iter()
                        .enumerate()
                        .filter(|&(_, &p)| p > 0.0)
                        .map(|(w2, &p)| (w2 as WordId, p))
                        .collect();
                    for &(w2, _) in &psim {
                        dense[w2 as usize] = 0.0;
                    }
                    mode = RowMode::Similarity;
                }
            }

            // redistribution mass over unseen w2 for this row's mode
            let (unseen_mass, unseen_exists) = match mode {
                RowMode::Unigram => {
                    let (_, m, e) = unigram_row_summary(&table, w1, &unigram);
                    (m, e)
                }
                RowMode::Similarity => {
                    row_redistribution_summary(seen_row, &psim, &unigram, gamma, v2_len)
                }
            };

            let norm_state = if unseen_exists {
                RowNorm::Backoff {
                    alpha: leftover / unseen_mass,
                }
            } else if !has_unseen_w2 {
                let seen: f64 = disc.pd_rows[w1 as usize].iter().map(|&(_, p)| p).sum();
                RowNorm::Complete { scale: 1.0 / seen }
            } else if mode == RowMode::Similarity {
                // unseen pairs exist but every neighbor assigns them zero:
                // fall back to the unigram path for this row
                log::warn!(
                    "w1={w1}: similarity redistribution is zero on all unseen words; \
                     falling back to unigram redistribution"
                );
                mode = RowMode::Unigram;
                psim.clear();
                let (_, m, e) = unigram_row_summary(&table, w1, &unigram);
                if e {
                    RowNorm::Backoff { alpha: leftover / m }
                } else if leftover > 0.0 {
                    return Err(SmoothingError::Model(ModelError::NoRedistributionMass {
                        w1,
                    }));
                } else {
                    RowNorm::Backoff { alpha: 0.0 }
                }
            } else if leftover > 0.0 {
                return Err(SmoothingError::Model(ModelError::NoRedistributionMass {
                    w1,
                }));
            } else {
                RowNorm::Backoff { alpha: 0.0 }
            };

            norms.push(norm_state);
            modes.push(mode);
            psim_rows.push(psim);
        }

        Ok(Self {
            table,
            pd_rows: disc.pd_rows,
            norms,
            modes,
            psim_rows,
            unigram,
            config,
        })
    }

    pub fn config(&self) -> &SmoothingConfig {
        &self.config
    }

    pub fn table(&self) -> &Arc<PairCountTable> {
        &self.table
    }

    /// The redistribution estimate P_r(w2|w1) before alpha normalization.
    pub fn redistribution(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        self.check_ids(w1, w2)?;
        if matches!(self.norms[w1 as usize], RowNorm::Undefined) {
            return Err(ModelError::UndefinedRow { w1 });
        }
        Ok(match self.modes[w1 as usize] {
            RowMode::Unigram => self.unigram.prob(w2),
            RowMode::Similarity => {
                let row = &self.psim_rows[w1 as usize];
                let psim = row
                    .binary_search_by_key(&w2, |&(id, _)| id)
                    .map(|i| row[i].1)
                    .unwrap_or(0.0);
                p_redistribute(w2, self.config.gamma, &self.unigram, psim)
            }
        })
    }

    fn check_ids(&self, w1: WordId, w2: WordId) -> Result<(), ModelError> {
        if w1 as usize >= self.table.v1_len() {
            return Err(ModelError::UnknownWord { id: w1, side: "V1" });
        }
        if w2 as usize >= self.table.v2_len() {
            return Err(ModelError::UnknownWord { id: w2, side: "V2" });
        }
        Ok(())
    }

    /// P-hat(w2|w1): discounted estimate for seen pairs, alpha-normalized
    /// redistribution for unseen ones.
    pub fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        self.check_ids(w1, w2)?;
        let row = &self.pd_rows[w1 as usize];
        let seen = row
            .binary_search_by_key(&w2, |&(id, _)| id)
            .map(|i| row[i].1)
            .ok();
        match self.norms[w1 as usize] {
            RowNorm::Undefined => Err(ModelError::UndefinedRow { w1 }),
            RowNorm::Complete { scale } => Ok(seen.map(|p| p * scale).unwrap_or(0.0)),
            RowNorm::Backoff { alpha } => match seen {
                Some(p) => Ok(p),
                None => Ok(alpha * self.redistribution(w1, w2)?),
            },
        }
    }
}

impl BigramModel for SmoothedModel {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        SmoothedModel::prob(self, w1, w2)
    }
}

use crate::similarity::SparseDistribution;

fn row_redistribution_summary(
    seen_row: &[(WordId, u64)],
    psim: &[(WordId, f64)],
    unigram: &UnigramModel,
    gamma: f64,
    v2_len: usize,
) -> (f64, bool) {
    let mut unseen_mass = 0.0;
    let mut unseen_exists = false;
    let mut seen_it = seen_row.iter().peekable();
    let mut psim_it = psim.iter().peekable();
    for w2 in 0..v2_len as WordId {
        let is_seen = match seen_it.peek() {
            Some(&&(id, _)) if id == w2 => {
                seen_it.next();
                true
            }
            _ => false,
        };
        let ps = match psim_it.peek() {
            Some(&&(id, p)) if id == w2 => {
                psim_it.next();
                p
            }
            _ => 0.0,
        };
        if is_seen {
            continue;
        }
        let pr = gamma * unigram.prob(w2) + (1.0 - gamma) * ps;
        unseen_mass += pr;
        if pr > 0.0 {
            unseen_exists = true;
        }
    }
    (unseen_mass, unseen_exists)
}

/// Builds a plain base model of the requested kind over a table.
pub fn make_base(
    table: &Arc<PairCountTable>,
    kind: ModelKind,
    gt_threshold: u64,
) -> Result<ConditionalModel, SmoothingError> {
    Ok(match kind {
        ModelKind::Mle => ConditionalModel::Mle(mle_conditional(table.clone())),
        ModelKind::Katz => {
            let unigram = Arc::new(mle_unigram(table, Side::V2)?);
            ConditionalModel::Katz(katz_backoff(
                table.clone(),
                Redistribution::Unigram(unigram),
                gt_threshold,
            )?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basemodel::mle_conditional;
    use crate::corpus::{count, ingest_pairs, PairList};
    use crate::similarity::neighbors;
    use approx::assert_abs_diff_eq;
    use std::io::Cursor;

    const MICRO: &str = "a\tx\na\tx\na\ty\nb\tx\nb\ty\nb\tz\nb\tz\nc\tz\n";

    fn micro() -> (crate::corpus::VocabularyIndex, Arc<PairCountTable>) {
        let (vocab, pairs) = ingest_pairs(Cursor::new(MICRO)).unwrap();
        (vocab, Arc::new(count(&pairs)))
    }

    #[test]
    fn psim_single_neighbor_is_evidence_row() {
        let (vocab, table) = micro();
        let mle = ConditionalModel::Mle(mle_conditional(table));
        let a = vocab.v1.id("a").unwrap();
        let list = neighbors(&mle, a, Measure::L1, 1.0, Some(1), f64::INFINITY).unwrap();
        assert_eq!(list.len(), 1);
        let b = list.entries[0].word;
        for w2 in 0..3 {
            let got = p_sim(w2, &list, &mle).unwrap();
            assert_abs_diff_eq!(got, mle.prob(b, w2).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn psim_micro_l1_beta1() {
        // S(a) = {b, c} under L with beta = 1: weights 1 and 0, so the
        // estimate is exactly b's row.
        let (vocab, table) = micro();
        let mle = ConditionalModel::Mle(mle_conditional(table));
        let a = vocab.v1.id("a").unwrap();
        let z = vocab.v2.id("z").unwrap();
        let list = neighbors(&mle, a, Measure::L1, 1.0, None, f64::INFINITY).unwrap();
        assert_eq!(list.len(), 2);
        assert_abs_diff_eq!(p_sim(z, &list, &mle).unwrap(), 0.5, epsilon = 1e-12);
        // convex combination of row-stochastic rows sums to one
        let total: f64 = (0..3).map(|w2| p_sim(w2, &list, &mle).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn psim_errors_without_evidence() {
        let (vocab, table) = micro();
        let mle = ConditionalModel::Mle(mle_conditional(table));
        let a = vocab.v1.id("a").unwrap();
        let empty = NeighborList {
            owner: a,
            measure: Measure::L1,
            beta: 1.0,
            k: None,
            t: f64::INFINITY,
            entries: Vec::new(),
        };
        assert!(matches!(
            p_sim(0, &empty, &mle),
            Err(SmoothingError::NoEvidence { .. })
        ));
    }

    #[test]
    fn redistribute_endpoints_and_value() {
        let (vocab, table) = micro();
        let unigram = mle_unigram(&table, Side::V2).unwrap();
        let z = vocab.v2.id("z").unwrap();
        assert_abs_diff_eq!(
            p_redistribute(z, 1.0, &unigram, 0.77),
            unigram.prob(z),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(p_redistribute(z, 0.0, &unigram, 0.77), 0.77);
        // gamma = 0.15 with the single-effective-neighbor estimate above
        assert_abs_diff_eq!(
            p_redistribute(z, 0.15, &unigram, 0.5),
            0.48125,
            epsilon = 1e-12
        );
    }

    fn wsd_config(measure: Measure, beta: f64) -> SmoothingConfig {
        SmoothingConfig {
            measure,
            beta,
            ..Preset::Wsd.config()
        }
    }

    #[test]
    fn smoothed_rows_sum_to_one() {
        let (_, table) = micro();
        for measure in [Measure::Js, Measure::L1, Measure::Confusion] {
            let model = SmoothedModel::build(table.clone(), wsd_config(measure, 2.0)).unwrap();
            for w1 in 0..3 {
                let sum: f64 = (0..3).map(|w2| model.prob(w1, w2).unwrap()).sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn seen_pairs_ignore_similarity_parameters() {
        let (vocab, table) = micro();
        let m1 = SmoothedModel::build(table.clone(), wsd_config(Measure::L1, 1.0)).unwrap();
        let m2 = SmoothedModel::build(table.clone(), wsd_config(Measure::L1, 7.5)).unwrap();
        let mut cfg3 = wsd_config(Measure::Js, 3.0);
        cfg3.gamma = 0.4;
        cfg3.k = Some(1);
        let m3 = SmoothedModel::build(table.clone(), cfg3).unwrap();
        for (w1, w2, _) in table.entries() {
            let p = m1.prob(w1, w2).unwrap();
            assert_eq!(p, m2.prob(w1, w2).unwrap());
            assert_eq!(p, m3.prob(w1, w2).unwrap());
        }
        // sanity: unseen pairs do move with beta (J weights vary, L's micro
        // values of exactly 1 and 2 happen to make them beta-invariant)
        let j1 = SmoothedModel::build(table.clone(), wsd_config(Measure::Js, 2.0)).unwrap();
        let j2 = SmoothedModel::build(table.clone(), wsd_config(Measure::Js, 9.0)).unwrap();
        let (a, z) = (vocab.v1.id("a").unwrap(), vocab.v2.id("z").unwrap());
        assert_ne!(j1.prob(a, z).unwrap(), j2.prob(a, z).unwrap());
    }

    #[test]
    fn gamma_one_equals_katz() {
        let (_, table) = micro();
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let katz = katz_backoff(table.clone(), Redistribution::Unigram(unigram), 5).unwrap();
        let mut cfg = wsd_config(Measure::L1, 2.0);
        cfg.gamma = 1.0;
        let model = SmoothedModel::build(table.clone(), cfg).unwrap();
        for w1 in 0..3 {
            for w2 in 0..3 {
                let a = model.prob(w1, w2).unwrap();
                let b = katz.prob(w1, w2).unwrap();
                assert!((a - b).abs() <= 1e-12, "({w1},{w2}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_evidence_row_falls_back_to_unigram() {
        // a and b share the exact row {x}; c owns {y}. Under L with any
        // beta, a's only positive-weight neighbor is b, which assigns zero
        // to a's unseen word y, so the row falls back to the unigram.
        let (_, pairs) = ingest_pairs(Cursor::new("a\tx\nb\tx\nc\ty\n")).unwrap();
        let table = Arc::new(count(&pairs));
        let model = SmoothedModel::build(table.clone(), wsd_config(Measure::L1, 2.0)).unwrap();
        let sum: f64 = (0..2).map(|w2| model.prob(0, w2).unwrap()).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
        assert!(model.prob(0, 1).unwrap() > 0.0);
    }

    #[test]
    fn zero_mass_everywhere_is_an_error() {
        // y never occurs at all: unigram fallback has nothing to give.
        let pairs = PairList::from_instances(vec![(0, 0), (1, 0)], 2, 2);
        let table = Arc::new(count(&pairs));
        let err = SmoothedModel::build(table, wsd_config(Measure::L1, 2.0)).unwrap_err();
        assert!(matches!(
            err,
            SmoothingError::Model(ModelError::NoRedistributionMass { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = Preset::Wsd.config();
        cfg.gamma = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = Preset::Wsd.config();
        cfg.beta = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = Preset::Lm.config();
        cfg.sim_base = ModelKind::Mle; // KL over raw MLE rows is rejected
        assert!(cfg.validate().is_err());
        assert!(Preset::Lm.config().validate().is_ok());
        let defaults = SmoothingConfig::default();
        assert_eq!(defaults.k, Some(60));
        assert_eq!(defaults.t, 2.5);
        assert_eq!(defaults.beta, 4.0);
        assert_eq!(defaults.gamma, 0.15);
    }
}
