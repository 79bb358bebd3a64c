//! Base language models: maximum likelihood and Katz back-off with
//! Good-Turing discounting.
//!
//! Both expose conditional probabilities P(w2|w1) over a shared count
//! table. The Katz model reserves mass from seen pairs and spreads it over
//! unseen pairs through a redistribution model, normalized per row by
//! alpha(w1).

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::corpus::{
    count, ingest_pairs, write_pairs, CorpusError, PairCountTable, VocabularyIndex, WordId,
};
use crate::similarity::SparseDistribution;

/// Absolute discount used when count-of-count statistics are degenerate.
pub const FALLBACK_DISCOUNT: f64 = 0.75;

/// Counts at or above this are left undiscounted by default.
pub const DEFAULT_GT_THRESHOLD: u64 = 5;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("word id {id} out of range for {side}")]
    UnknownWord { id: WordId, side: &'static str },
    #[error("conditioning word {w1} has zero marginal count (no distribution)")]
    UndefinedRow { w1: WordId },
    #[error("conditioned word {w2} has zero marginal count (no reverse distribution)")]
    UndefinedColumn { w2: WordId },
    #[error("empty table: total pair count is zero")]
    EmptyTable,
    #[error("no count-of-counts entry for r={r}; only observed counts may be queried")]
    MissingCountOfCount { r: u64 },
    #[error("row {w1} has leftover mass but the redistribution assigns zero to all unseen words")]
    NoRedistributionMass { w1: WordId },
    #[error("bad model header: {0}")]
    BadHeader(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Uniform pair-probability query over every model kind in the crate.
pub trait BigramModel {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError>;
}

/// Which side of the pair a unigram model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    V1,
    V2,
}

/// MLE unigram distribution: P(w) = c(w) / N over one side.
#[derive(Debug, Clone)]
pub struct UnigramModel {
    side: Side,
    probs: Vec<f64>,
}

/// Builds the unigram model for the chosen side. Errors when N = 0.
pub fn mle_unigram(table: &PairCountTable, side: Side) -> Result<UnigramModel, ModelError> {
    if table.total() == 0 {
        return Err(ModelError::EmptyTable);
    }
    let n = table.total() as f64;
    let len = match side {
        Side::V1 => table.v1_len(),
        Side::V2 => table.v2_len(),
    };
    let probs = (0..len as WordId)
        .map(|w| {
            let c = match side {
                Side::V1 => table.marginal1(w),
                Side::V2 => table.marginal2(w),
            };
            c as f64 / n
        })
        .collect();
    Ok(UnigramModel { side, probs })
}

impl UnigramModel {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// P(w); zero for words whose marginal is zero.
    pub fn prob(&self, w: WordId) -> f64 {
        self.probs.get(w as usize).copied().unwrap_or(0.0)
    }

    pub fn iter_positive(&self) -> impl Iterator<Item = (WordId, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p > 0.0)
            .map(|(w, &p)| (w as WordId, p))
    }
}

/// Count-of-counts map r -> n_r over distinct pairs of a table.
#[derive(Debug, Clone)]
pub struct CountOfCounts {
    counts: BTreeMap<u64, u64>,
}

impl CountOfCounts {
    pub fn from_table(table: &PairCountTable) -> Self {
        let mut counts = BTreeMap::new();
        for (_, _, c) in table.entries() {
            *counts.entry(c).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn n(&self, r: u64) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    /// Sum of r * n_r; equals the table total it was built from.
    pub fn covered_total(&self) -> u64 {
        self.counts.iter().map(|(&r, &n)| r * n).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&r, &n)| (r, n))
    }
}

/// Raw Good-Turing estimate (r+1) * n_{r+1} / n_r, before any correction.
/// None when n_r = 0.
pub fn raw_good_turing(coc: &CountOfCounts, r: u64) -> Option<f64> {
    let nr = coc.n(r);
    if nr == 0 {
        return None;
    }
    Some((r + 1) as f64 * coc.n(r + 1) as f64 / nr as f64)
}

/// Katz-corrected Good-Turing discounted count r*.
///
/// Counts at or above `threshold` keep their value. Below it, the raw
/// Good-Turing estimate is renormalized so that the reserved mass matches
/// n_1 overall. Degenerate statistics (n_{r+1} = 0, mu >= 1, or a corrected
/// value outside (0, r)) fall back to the absolute discount r - 0.75,
/// which keeps every discounted count strictly inside (0, r).
pub fn good_turing_discount(
    coc: &CountOfCounts,
    r: u64,
    threshold: u64,
) -> Result<f64, ModelError> {
    if r == 0 || coc.n(r) == 0 {
        return Err(ModelError::MissingCountOfCount { r });
    }
    if r >= threshold {
        return Ok(r as f64);
    }
    let fallback = r as f64 - FALLBACK_DISCOUNT;
    let n1 = coc.n(1);
    let n_thr = coc.n(threshold);
    if n1 == 0 {
        return Ok(fallback);
    }
    let mu = threshold as f64 * n_thr as f64 / n1 as f64;
    if coc.n(r + 1) == 0 || mu >= 1.0 {
        return Ok(fallback);
    }
    let raw = raw_good_turing(coc, r).expect("n_r checked above");
    let d = (raw / r as f64 - mu) / (1.0 - mu);
    let star = d * r as f64;
    if star <= 0.0 || star >= r as f64 {
        return Ok(fallback);
    }
    Ok(star)
}

/// Discounted seen-pair probabilities plus per-row leftover mass.
/// Shared skeleton for the Katz model and the similarity-smoothed model.
#[derive(Debug, Clone)]
pub(crate) struct DiscountedTable {
    pub pd_rows: Vec<Vec<(WordId, f64)>>,
    pub leftover: Vec<f64>,
}

pub(crate) fn discount_table(
    table: &PairCountTable,
    threshold: u64,
) -> Result<DiscountedTable, ModelError> {
    let coc = CountOfCounts::from_table(table);
    let mut star: BTreeMap<u64, f64> = BTreeMap::new();
    for (r, _) in coc.iter() {
        star.insert(r, good_turing_discount(&coc, r, threshold)?);
    }
    let mut pd_rows = Vec::with_capacity(table.v1_len());
    let mut leftover = Vec::with_capacity(table.v1_len());
    for w1 in 0..table.v1_len() as WordId {
        let c1 = table.marginal1(w1);
        if c1 == 0 {
            pd_rows.push(Vec::new());
            leftover.push(0.0);
            continue;
        }
        let row: Vec<(WordId, f64)> = table
            .row(w1)
            .iter()
            .map(|&(w2, c)| (w2, star[&c] / c1 as f64))
            .collect();
        let seen: f64 = row.iter().map(|&(_, p)| p).sum();
        pd_rows.push(row);
        leftover.push((1.0 - seen).max(0.0));
    }
    Ok(DiscountedTable { pd_rows, leftover })
}

/// Seen/unseen redistribution mass of a unigram model for one row, in a
/// single deterministic pass. Used by both the Katz model and the smoothed
/// model so that the gamma = 1 reduction is bit-exact.
pub(crate) fn unigram_row_summary(
    table: &PairCountTable,
    w1: WordId,
    unigram: &UnigramModel,
) -> (f64, f64, bool) {
    let row = table.row(w1);
    let mut seen_mass = 0.0;
    let mut unseen_mass = 0.0;
    let mut unseen_exists = false;
    let mut it = row.iter().peekable();
    for w2 in 0..unigram.len() as WordId {
        let p = unigram.prob(w2);
        let is_seen = match it.peek() {
            Some(&&(id, _)) if id == w2 => {
                it.next();
                true
            }
            _ => false,
        };
        if is_seen {
            seen_mass += p;
        } else {
            unseen_mass += p;
            if p > 0.0 {
                unseen_exists = true;
            }
        }
    }
    (seen_mass, unseen_mass, unseen_exists)
}

/// Maximum-likelihood conditional model: P(w2|w1) = c(w1,w2) / c(w1).
#[derive(Debug, Clone)]
pub struct MleModel {
    table: Arc<PairCountTable>,
}

/// Builds the MLE conditional model over a table.
pub fn mle_conditional(table: Arc<PairCountTable>) -> MleModel {
    MleModel { table }
}

impl MleModel {
    pub fn table(&self) -> &Arc<PairCountTable> {
        &self.table
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

    /// P(w2|w1); zero for unseen pairs. A row with zero marginal has no
    /// distribution and is reported as such rather than silently uniform.
    pub fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        self.check_ids(w1, w2)?;
        let c1 = self.table.marginal1(w1);
        if c1 == 0 {
            return Err(ModelError::UndefinedRow { w1 });
        }
        Ok(self.table.pair_count(w1, w2) as f64 / c1 as f64)
    }

    /// Reverse conditional P(w1|w2) = c(w1,w2) / c(w2).
    pub fn reverse_prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        self.check_ids(w1, w2)?;
        let c2 = self.table.marginal2(w2);
        if c2 == 0 {
            return Err(ModelError::UndefinedColumn { w2 });
        }
        Ok(self.table.pair_count(w1, w2) as f64 / c2 as f64)
    }

    pub fn row(&self, w1: WordId) -> Result<SparseDistribution, ModelError> {
        if w1 as usize >= self.table.v1_len() {
            return Err(ModelError::UnknownWord { id: w1, side: "V1" });
        }
        let c1 = self.table.marginal1(w1);
        if c1 == 0 {
            return Err(ModelError::UndefinedRow { w1 });
        }
        let entries = self
            .table
            .row(w1)
            .iter()
            .map(|&(w2, c)| (w2, c as f64 / c1 as f64))
            .collect();
        Ok(SparseDistribution::from_sorted_entries(entries))
    }
}

/// Where the Katz model sends reserved mass.
#[derive(Debug, Clone)]
pub enum Redistribution {
    Unigram(Arc<UnigramModel>),
    Conditional(Arc<ConditionalModel>),
}

impl Redistribution {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        match self {
            Redistribution::Unigram(u) => Ok(u.prob(w2)),
            Redistribution::Conditional(m) => m.prob(w1, w2),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum RowNorm {
    /// c(w1) = 0: no distribution.
    Undefined,
    /// Normal back-off row: unseen pairs get alpha * P_r.
    Backoff { alpha: f64 },
    /// Every w2 with positive redistribution mass is already seen; the
    /// discounted row is rescaled to sum to one and alpha is zero.
    Complete { scale: f64 },
}

/// Katz back-off model (discounted seen pairs, redistributed unseen mass).
#[derive(Debug, Clone)]
pub struct KatzModel {
    table: Arc<PairCountTable>,
    pd_rows: Vec<Vec<(WordId, f64)>>,
    norms: Vec<RowNorm>,
    redistribution: Redistribution,
    threshold: u64,
}

/// Builds a Katz back-off model.
///
/// For every row with leftover mass, alpha(w1) = leftover / sum of the
/// redistribution over unseen w2. A row whose seen pairs already cover all
/// redistribution support is renormalized in place (alpha is zero by
/// construction). Errors when a row has leftover mass but the
/// redistribution assigns zero to every unseen word.
pub fn katz_backoff(
    table: Arc<PairCountTable>,
    redistribution: Redistribution,
    threshold: u64,
) -> Result<KatzModel, ModelError> {
    if table.total() == 0 {
        return Err(ModelError::EmptyTable);
    }
    let disc = discount_table(&table, threshold)?;
    let mut norms = Vec::with_capacity(table.v1_len());
    for w1 in 0..table.v1_len() as WordId {
        if table.marginal1(w1) == 0 {
            norms.push(RowNorm::Undefined);
            continue;
        }
        let (_, unseen_mass, unseen_exists) = match &redistribution {
            Redistribution::Unigram(u) => unigram_row_summary(&table, w1, u),
            Redistribution::Conditional(m) => conditional_row_summary(&table, w1, m)?,
        };
        let leftover = disc.leftover[w1 as usize];
        let has_unseen_w2 = table.row(w1).len() < table.v2_len();
        if !has_unseen_w2 {
            let seen: f64 = disc.pd_rows[w1 as usize].iter().map(|&(_, p)| p).sum();
            norms.push(RowNorm::Complete { scale: 1.0 / seen });
        } else if !unseen_exists {
            if leftover > 0.0 {
                return Err(ModelError::NoRedistributionMass { w1 });
            }
            norms.push(RowNorm::Backoff { alpha: 0.0 });
        } else {
            norms.push(RowNorm::Backoff {
                alpha: leftover / unseen_mass,
            });
        }
    }
    Ok(KatzModel {
        table,
        pd_rows: disc.pd_rows,
        norms,
        redistribution,
        threshold,
    })
}

fn conditional_row_summary(
    table: &PairCountTable,
    w1: WordId,
    model: &ConditionalModel,
) -> Result<(f64, f64, bool), ModelError> {
    let mut seen_mass = 0.0;
    let mut unseen_mass = 0.0;
    let mut unseen_exists = false;
    for w2 in 0..table.v2_len() as WordId {
        let p = model.prob(w1, w2)?;
        if table.pair_count(w1, w2) > 0 {
            seen_mass += p;
        } else {
            unseen_mass += p;
            if p > 0.0 {
                unseen_exists = true;
            }
        }
    }
    Ok((seen_mass, unseen_mass, unseen_exists))
}

impl KatzModel {
    pub fn table(&self) -> &Arc<PairCountTable> {
        &self.table
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        if w1 as usize >= self.table.v1_len() {
            return Err(ModelError::UnknownWord { id: w1, side: "V1" });
        }
        if w2 as usize >= self.table.v2_len() {
            return Err(ModelError::UnknownWord { id: w2, side: "V2" });
        }
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
                None => Ok(alpha * self.redistribution.prob(w1, w2)?),
            },
        }
    }

    /// Full positive-probability row as a sparse distribution.
    pub fn row(&self, w1: WordId) -> Result<SparseDistribution, ModelError> {
        if w1 as usize >= self.table.v1_len() {
            return Err(ModelError::UnknownWord { id: w1, side: "V1" });
        }
        if matches!(self.norms[w1 as usize], RowNorm::Undefined) {
            return Err(ModelError::UndefinedRow { w1 });
        }
        let mut entries = Vec::new();
        for w2 in 0..self.table.v2_len() as WordId {
            let p = self.prob(w1, w2)?;
            if p > 0.0 {
                entries.push((w2, p));
            }
        }
        Ok(SparseDistribution::from_sorted_entries(entries))
    }
}

/// A base conditional model, tagged by kind.
#[derive(Debug, Clone)]
pub enum ConditionalModel {
    Mle(MleModel),
    Katz(KatzModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mle,
    Katz,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Mle => write!(f, "mle"),
            ModelKind::Katz => write!(f, "katz"),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mle" => Ok(ModelKind::Mle),
            "katz" => Ok(ModelKind::Katz),
            other => Err(format!("unknown model kind {other:?} (expected mle|katz)")),
        }
    }
}

impl ConditionalModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            ConditionalModel::Mle(_) => ModelKind::Mle,
            ConditionalModel::Katz(_) => ModelKind::Katz,
        }
    }

    pub fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        match self {
            ConditionalModel::Mle(m) => m.prob(w1, w2),
            ConditionalModel::Katz(m) => m.prob(w1, w2),
        }
    }

    pub fn row(&self, w1: WordId) -> Result<SparseDistribution, ModelError> {
        match self {
            ConditionalModel::Mle(m) => m.row(w1),
            ConditionalModel::Katz(m) => m.row(w1),
        }
    }

    pub fn table(&self) -> &Arc<PairCountTable> {
        match self {
            ConditionalModel::Mle(m) => m.table(),
            ConditionalModel::Katz(m) => m.table(),
        }
    }
}

impl BigramModel for ConditionalModel {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        ConditionalModel::prob(self, w1, w2)
    }
}

impl BigramModel for MleModel {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        MleModel::prob(self, w1, w2)
    }
}

impl BigramModel for KatzModel {
    fn prob(&self, w1: WordId, w2: WordId) -> Result<f64, ModelError> {
        KatzModel::prob(self, w1, w2)
    }
}

const MODEL_MAGIC: &str = "simsmooth-model";

/// Writes a model as a text header plus its backing count table in the
/// pair file format. Alpha values are recomputed on load.
pub fn save_model<W: Write>(
    model: &ConditionalModel,
    vocab: &VocabularyIndex,
    mut out: W,
) -> Result<(), ModelError> {
    let table = model.table();
    let header = match model {
        ConditionalModel::Mle(_) => format!(
            "{MODEL_MAGIC} kind=mle v1={} v2={}",
            table.v1_len(),
            table.v2_len()
        ),
        ConditionalModel::Katz(katz) => format!(
            "{MODEL_MAGIC} kind=katz threshold={} v1={} v2={}",
            katz.threshold(),
            table.v1_len(),
            table.v2_len()
        ),
    };
    write_pairs(&mut out, vocab, table, &[header])?;
    Ok(())
}

/// Loads a model persisted by [`save_model`]. Katz models are rebuilt with
/// an MLE unigram redistribution over V2 and freshly computed alphas.
pub fn load_model<R: BufRead>(
    reader: R,
) -> Result<(ConditionalModel, VocabularyIndex), ModelError> {
    let mut lines = Vec::new();
    let mut header: Option<String> = None;
    for line in reader.lines() {
        let line = line?;
        if header.is_none() {
            let rest = line
                .strip_prefix('#')
                .map(str::trim)
                .and_then(|s| s.strip_prefix(MODEL_MAGIC));
            match rest {
                Some(fields) => {
                    header = Some(fields.trim().to_owned());
                    continue;
                }
                None => {
                    return Err(ModelError::BadHeader(format!(
                        "expected `# {MODEL_MAGIC} ...` first, got {line:?}"
                    )))
                }
            }
        }
        lines.push(line);
    }
    let header = header.ok_or_else(|| ModelError::BadHeader("empty input".into()))?;
    let mut kind = None;
    let mut threshold = DEFAULT_GT_THRESHOLD;
    let mut sizes = (None, None);
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| ModelError::BadHeader(format!("bad field {field:?}")))?;
        match key {
            "kind" => kind = Some(value.parse::<ModelKind>().map_err(ModelError::BadHeader)?),
            "threshold" => {
                threshold = value
                    .parse()
                    .map_err(|_| ModelError::BadHeader(format!("bad threshold {value:?}")))?
            }
            "v1" => sizes.0 = value.parse::<usize>().ok(),
            "v2" => sizes.1 = value.parse::<usize>().ok(),
            _ => {}
        }
    }
    let kind = kind.ok_or_else(|| ModelError::BadHeader("missing kind".into()))?;
    let text = lines.join("\n");
    let (vocab, pairs) = ingest_pairs(io::Cursor::new(text))?;
    if let (Some(v1), Some(v2)) = sizes {
        if v1 != vocab.v1.len() || v2 != vocab.v2.len() {
            log::warn!(
                "model header sizes ({v1},{v2}) differ from reloaded vocabulary ({},{})",
                vocab.v1.len(),
                vocab.v2.len()
            );
        }
    }
    let table = Arc::new(count(&pairs));
    let model = match kind {
        ModelKind::Mle => ConditionalModel::Mle(mle_conditional(table)),
        ModelKind::Katz => {
            let unigram = Arc::new(mle_unigram(&table, Side::V2)?);
            ConditionalModel::Katz(katz_backoff(
                table,
                Redistribution::Unigram(unigram),
                threshold,
            )?)
        }
    };
    Ok((model, vocab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{count, ingest_pairs, PairList};
    use approx::assert_abs_diff_eq;
    use std::io::Cursor;

    const MICRO: &str = "a\tx\na\tx\na\ty\nb\tx\nb\ty\nb\tz\nb\tz\nc\tz\n";

    fn micro_table() -> (VocabularyIndex, Arc<PairCountTable>) {
        let (vocab, pairs) = ingest_pairs(Cursor::new(MICRO)).unwrap();
        (vocab, Arc::new(count(&pairs)))
    }

    #[test]
    fn mle_conditional_values() {
        let (vocab, table) = micro_table();
        let m = mle_conditional(table);
        let (a, c) = (vocab.v1.id("a").unwrap(), vocab.v1.id("c").unwrap());
        let (x, z) = (vocab.v2.id("x").unwrap(), vocab.v2.id("z").unwrap());
        assert_abs_diff_eq!(m.prob(a, x).unwrap(), 2.0 / 3.0);
        assert_eq!(m.prob(a, z).unwrap(), 0.0);
        assert_eq!(m.prob(c, z).unwrap(), 1.0);
    }

    #[test]
    fn mle_undefined_row() {
        let pairs = PairList::from_instances(vec![(0, 0)], 2, 1);
        let m = mle_conditional(Arc::new(count(&pairs)));
        assert!(matches!(
            m.prob(1, 0),
            Err(ModelError::UndefinedRow { w1: 1 })
        ));
        assert!(matches!(
            m.prob(5, 0),
            Err(ModelError::UnknownWord { .. })
        ));
    }

    #[test]
    fn unigram_values() {
        let (vocab, table) = micro_table();
        let u2 = mle_unigram(&table, Side::V2).unwrap();
        assert_abs_diff_eq!(u2.prob(vocab.v2.id("z").unwrap()), 3.0 / 8.0);
        let u1 = mle_unigram(&table, Side::V1).unwrap();
        let total: f64 = (0..3).map(|w| u1.prob(w)).sum();
        assert_abs_diff_eq!(u1.prob(vocab.v1.id("a").unwrap()), 3.0 / 8.0);
        assert_abs_diff_eq!(u1.prob(vocab.v1.id("b").unwrap()), 4.0 / 8.0);
        assert_abs_diff_eq!(u1.prob(vocab.v1.id("c").unwrap()), 1.0 / 8.0);
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unigram_single_pair_and_empty() {
        let pairs = PairList::from_instances(vec![(0, 0)], 1, 1);
        let u = mle_unigram(&count(&pairs), Side::V2).unwrap();
        assert_eq!(u.prob(0), 1.0);
        let empty = count(&PairList::new(1, 1));
        assert!(matches!(
            mle_unigram(&empty, Side::V2),
            Err(ModelError::EmptyTable)
        ));
    }

    #[test]
    fn raw_good_turing_formula() {
        // n_1=10, n_2=5: raw r*(1) = 2*5/10 = 1.0
        let mut pairs = PairList::new(15, 15);
        for i in 0..10 {
            pairs.push(i, i);
        }
        for i in 10..15 {
            pairs.push(i, i);
            pairs.push(i, i);
        }
        let coc = CountOfCounts::from_table(&count(&pairs));
        assert_eq!(coc.n(1), 10);
        assert_eq!(coc.n(2), 5);
        assert_abs_diff_eq!(raw_good_turing(&coc, 1).unwrap(), 1.0);
        assert_eq!(raw_good_turing(&coc, 3), None);
        assert_eq!(coc.covered_total(), count(&pairs).total());
    }

    #[test]
    fn discount_threshold_identity_and_errors() {
        let (_, table) = micro_table();
        let coc = CountOfCounts::from_table(&table);
        assert_eq!(good_turing_discount(&coc, 5, 5).unwrap_err().to_string(),
            ModelError::MissingCountOfCount { r: 5 }.to_string());
        // observed count at threshold keeps its value
        assert_eq!(good_turing_discount(&coc, 2, 2).unwrap(), 2.0);
        assert!(good_turing_discount(&coc, 0, 5).is_err());
    }

    #[test]
    fn micro_discounts_fall_back() {
        // micro corpus: n_1 = 4, n_2 = 2, n_3.. = 0
        let (_, table) = micro_table();
        let coc = CountOfCounts::from_table(&table);
        // raw r*(1) = 2*2/4 = 1.0 = r -> no effective discount -> fallback
        assert_abs_diff_eq!(good_turing_discount(&coc, 1, 5).unwrap(), 0.25);
        // n_3 = 0 -> fallback
        assert_abs_diff_eq!(good_turing_discount(&coc, 2, 5).unwrap(), 1.25);
        // fallback keeps seen mass strictly below one on every row
        let disc = discount_table(&table, 5).unwrap();
        for w1 in 0..3 {
            let seen: f64 = disc.pd_rows[w1].iter().map(|&(_, p)| p).sum();
            assert!(seen < 1.0, "row {w1} seen mass {seen}");
            assert!(disc.leftover[w1] > 0.0);
        }
    }

    #[test]
    fn katz_rows_sum_to_one() {
        let (_, table) = micro_table();
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let katz = katz_backoff(table.clone(), Redistribution::Unigram(unigram), 5).unwrap();
        for w1 in 0..3 {
            let sum: f64 = (0..3).map(|w2| katz.prob(w1, w2).unwrap()).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn katz_unseen_positive_micro() {
        let (vocab, table) = micro_table();
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let katz = katz_backoff(table, Redistribution::Unigram(unigram), 5).unwrap();
        let (a, z) = (vocab.v1.id("a").unwrap(), vocab.v2.id("z").unwrap());
        // row sums to one and the unseen pair carries real mass
        let p = katz.prob(a, z).unwrap();
        assert!(p > 0.0);
        let row = katz.row(a).unwrap();
        assert_abs_diff_eq!(row.sum(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn katz_complete_row_renormalizes() {
        // row 0 covers the whole of V2: alpha is 0, P_d rescaled to sum 1
        let pairs = PairList::from_instances(vec![(0, 0), (0, 1), (1, 0)], 2, 2);
        let table = Arc::new(count(&pairs));
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let katz = katz_backoff(table, Redistribution::Unigram(unigram), 5).unwrap();
        let sum: f64 = (0..2).map(|w2| katz.prob(0, w2).unwrap()).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        let sum1: f64 = (0..2).map(|w2| katz.prob(1, w2).unwrap()).sum();
        assert_abs_diff_eq!(sum1, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn katz_rejects_zero_redistribution() {
        // V2 word 1 never occurs, so unigram mass over unseen w2 is zero for
        // row 0 while discounting leaves mass over.
        let pairs = PairList::from_instances(vec![(0, 0), (1, 0)], 2, 2);
        let table = Arc::new(count(&pairs));
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let err = katz_backoff(table, Redistribution::Unigram(unigram), 5).unwrap_err();
        assert!(matches!(err, ModelError::NoRedistributionMass { .. }));
    }

    #[test]
    fn katz_over_conditional_redistribution() {
        let (_, table) = micro_table();
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let inner = Arc::new(ConditionalModel::Katz(
            katz_backoff(table.clone(), Redistribution::Unigram(unigram), 5).unwrap(),
        ));
        let katz =
            katz_backoff(table, Redistribution::Conditional(inner), 5).unwrap();
        for w1 in 0..3 {
            let sum: f64 = (0..3).map(|w2| katz.prob(w1, w2).unwrap()).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn bayes_consistency_of_mle() {
        let (_, table) = micro_table();
        let m = mle_conditional(table.clone());
        let u1 = mle_unigram(&table, Side::V1).unwrap();
        let u2 = mle_unigram(&table, Side::V2).unwrap();
        for w1 in 0..3 {
            let mut sum = 0.0;
            for w2 in 0..3 {
                if table.marginal2(w2) > 0 {
                    sum += m.reverse_prob(w1, w2).unwrap() * u2.prob(w2);
                }
            }
            assert_abs_diff_eq!(sum, u1.prob(w1), epsilon = 1e-12);
        }
    }

    #[test]
    fn model_roundtrip_by_word() {
        let (vocab, table) = micro_table();
        let unigram = Arc::new(mle_unigram(&table, Side::V2).unwrap());
        let katz = ConditionalModel::Katz(
            katz_backoff(table, Redistribution::Unigram(unigram), 5).unwrap(),
        );
        let mut buf = Vec::new();
        save_model(&katz, &vocab, &mut buf).unwrap();
        let (loaded, lv) = load_model(Cursor::new(buf)).unwrap();
        assert_eq!(loaded.kind(), ModelKind::Katz);
        for w1 in ["a", "b", "c"] {
            for w2 in ["x", "y", "z"] {
                let p0 = katz
                    .prob(vocab.v1.id(w1).unwrap(), vocab.v2.id(w2).unwrap())
                    .unwrap();
                let p1 = loaded
                    .prob(lv.v1.id(w1).unwrap(), lv.v2.id(w2).unwrap())
                    .unwrap();
                assert_abs_diff_eq!(p0, p1, epsilon = 1e-12);
            }
        }
    }
}
