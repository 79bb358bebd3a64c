//! Distributional (dis)similarity between conditioning words.
//!
//! Four measures over the conditional distributions P(.|w1): KL divergence,
//! Jensen-Shannon divergence, L1 norm, and confusion probability. All
//! logarithms are base 10; beta values are only meaningful on that scale.
//!
//! The divergence sums run over stored entries only (the common-support
//! computational forms), so no smoothing of the inputs is required for J,
//! L, or the confusion probability.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::basemodel::{ConditionalModel, ModelError, ModelKind};
use crate::corpus::{VocabularyIndex, WordId};

pub const LOG10_2: f64 = std::f64::consts::LOG10_2;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("confusion probability requires an MLE base model (Bayes consistency)")]
    NonMleBase,
    #[error("{0:?} values cannot be computed from a base model")]
    InvalidMeasure(Measure),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A conditional distribution P(.|w1) stored as sorted positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution {
    entries: Vec<(WordId, f64)>,
}

impl SparseDistribution {
    /// Entries must be sorted by id, strictly positive, and sum to ~1.
    pub fn from_sorted_entries(entries: Vec<(WordId, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, p)| p > 0.0));
        Self { entries }
    }

    pub fn get(&self, w2: WordId) -> f64 {
        self.entries
            .binary_search_by_key(&w2, |&(id, _)| id)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p).sum()
    }

    pub fn entries(&self) -> &[(WordId, f64)] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// KL divergence D(w1 || w1'); asymmetric, undefined off support.
    Kl,
    /// Jensen-Shannon divergence; symmetric, in [0, log10 2].
    Js,
    /// L1 norm; symmetric, in [0, 2].
    L1,
    /// Confusion probability P_C(w1'|w1); a similarity, not a distance.
    #[serde(rename = "conf")]
    Confusion,
    /// Uniform random weights (control condition, no values to compute).
    #[serde(rename = "rand")]
    Random,
}

impl Measure {
    /// True when larger values mean *more* similar (confusion, random).
    pub fn is_similarity(self) -> bool {
        matches!(self, Measure::Confusion | Measure::Random)
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Measure::Kl => "kl",
            Measure::Js => "js",
            Measure::L1 => "l1",
            Measure::Confusion => "conf",
            Measure::Random => "rand",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kl" => Ok(Measure::Kl),
            "js" => Ok(Measure::Js),
            "l1" => Ok(Measure::L1),
            "conf" => Ok(Measure::Confusion),
            "rand" => Ok(Measure::Random),
            other => Err(format!(
                "unknown measure {other:?} (expected kl|js|l1|conf|rand)"
            )),
        }
    }
}

/// KL divergence D(p || q) = sum over supp(p) of p log10(p/q).
/// None when supp(p) is not contained in supp(q).
pub fn kl_divergence(p: &SparseDistribution, q: &SparseDistribution) -> Option<f64> {
    let mut total = 0.0;
    let mut qi = q.entries().iter().peekable();
    for &(w2, pv) in p.entries() {
        let qv = loop {
            match qi.peek() {
                Some(&&(id, _)) if id < w2 => {
                    qi.next();
                }
                Some(&&(id, qv)) if id == w2 => {
                    qi.next();
                    break Some(qv);
                }
                _ => break None,
            }
        }?;
        total += pv * (pv / qv).log10();
    }
    Some(total)
}

fn h(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log10()
    }
}

/// Jensen-Shannon divergence via the entropy form over the common support:
/// J = log 2 + 1/2 * sum over C of { h(p + p') - h(p) - h(p') }.
///
/// Equal inputs short-circuit to exactly 0; the entropy form only reaches
/// the identity up to rounding.
pub fn jensen_shannon(p: &SparseDistribution, q: &SparseDistribution) -> f64 {
    if p.entries() == q.entries() {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut qi = q.entries().iter().peekable();
    for &(w2, pv) in p.entries() {
        while let Some(&&(id, _)) = qi.peek() {
            if id < w2 {
                qi.next();
            } else {
                break;
            }
        }
        if let Some(&&(id, qv)) = qi.peek() {
            if id == w2 {
                acc += h(pv + qv) - h(pv) - h(qv);
                qi.next();
            }
        }
    }
    (LOG10_2 + 0.5 * acc).clamp(0.0, LOG10_2)
}

/// L1 norm via the common-support form
/// L = 2 - sum_C p - sum_C p' + sum_C |p - p'|.
pub fn l1_distance(p: &SparseDistribution, q: &SparseDistribution) -> f64 {
    if p.entries() == q.entries() {
        return 0.0;
    }
    let mut common_p = 0.0;
    let mut common_q = 0.0;
    let mut abs_diff = 0.0;
    let mut qi = q.entries().iter().peekable();
    for &(w2, pv) in p.entries() {
        while let Some(&&(id, _)) = qi.peek() {
            if id < w2 {
                qi.next();
            } else {
                break;
            }
        }
        if let Some(&&(id, qv)) = qi.peek() {
            if id == w2 {
                common_p += pv;
                common_q += qv;
                abs_diff += (pv - qv).abs();
                qi.next();
            }
        }
    }
    (2.0 - common_p - common_q + abs_diff).clamp(0.0, 2.0)
}

/// Confusion probability, Bayes-rewritten to run over the common support:
/// P_C(w1'|w1) = sum_C [P(w2|w1)/P(w2)] * P(w2|w1') * P(w1').
///
/// Requires an MLE base: smoothed estimates break the marginal consistency
/// the rewriting relies on. A w1' that never occurs substitutes for nothing
/// and gets probability zero.
pub fn confusion_probability(
    base: &ConditionalModel,
    w1: WordId,
    w1p: WordId,
) -> Result<f64, SimilarityError> {
    if base.kind() != ModelKind::Mle {
        return Err(SimilarityError::NonMleBase);
    }
    let table = base.table();
    if w1 as usize >= table.v1_len() {
        return Err(SimilarityError::Model(ModelError::UnknownWord {
            id: w1,
            side: "V1",
        }));
    }
    if w1p as usize >= table.v1_len() {
        return Err(SimilarityError::Model(ModelError::UnknownWord {
            id: w1p,
            side: "V1",
        }));
    }
    let c1 = table.marginal1(w1);
    if c1 == 0 {
        return Err(SimilarityError::Model(ModelError::UndefinedRow { w1 }));
    }
    let c1p = table.marginal1(w1p);
    if c1p == 0 {
        return Ok(0.0);
    }
    let n = table.total() as f64;
    let p_w1p = c1p as f64 / n;
    let row_p = table.row(w1);
    let row_q = table.row(w1p);
    let mut total = 0.0;
    let mut qi = row_q.iter().peekable();
    for &(w2, cp) in row_p {
        while let Some(&&(id, _)) = qi.peek() {
            if id < w2 {
                qi.next();
            } else {
                break;
            }
        }
        if let Some(&&(id, cq)) = qi.peek() {
            if id == w2 {
                let p_given_w1 = cp as f64 / c1 as f64;
                let p_w2 = table.marginal2(w2) as f64 / n;
                let p_given_w1p = cq as f64 / c1p as f64;
                total += p_given_w1 / p_w2 * p_given_w1p * p_w1p;
                qi.next();
            }
        }
    }
    Ok(total)
}

/// Weight transform for a computed (dis)similarity value.
///
/// W_D = W_J = 10^(-beta * value); W_L = (2 - value)^beta; confusion and
/// random values are their own weights (no tunable parameter).
pub fn weight(measure: Measure, value: f64, beta: f64) -> f64 {
    match measure {
        Measure::Kl | Measure::Js => 10f64.powf(-beta * value),
        Measure::L1 => (2.0 - value).max(0.0).powf(beta),
        Measure::Confusion | Measure::Random => value,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: WordId,
    pub value: f64,
    pub weight: f64,
}

/// Ordered neighbor set S(w1) with weights W(w1, w1').
///
/// Entries are sorted closest-first (ascending dissimilarity, or descending
/// similarity for confusion/random), ties broken by ascending id. The owner
/// itself is excluded.
#[derive(Debug, Clone)]
pub struct NeighborList {
    pub owner: WordId,
    pub measure: Measure,
    pub beta: f64,
    pub k: Option<usize>,
    pub t: f64,
    pub entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of weights, the normalizer of the similarity estimate.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|n| n.weight).sum()
    }
}

/// All pairwise (dis)similarity values, one sorted row per conditioning
/// word. Values do not depend on beta/k/t, so a matrix for any parameter
/// setting can be instantiated from this without recomputation.
#[derive(Debug, Clone)]
pub struct SimilarityValues {
    measure: Measure,
    base_kind: ModelKind,
    rows: Vec<Vec<(WordId, f64)>>,
}

fn compare_for(measure: Measure) -> impl Fn(&(WordId, f64), &(WordId, f64)) -> std::cmp::Ordering {
    move |a, b| {
        let ord = if measure.is_similarity() {
            b.1.partial_cmp(&a.1)
        } else {
            a.1.partial_cmp(&b.1)
        };
        ord.unwrap().then(a.0.cmp(&b.0))
    }
}

fn value_row(
    base: &ConditionalModel,
    rows: &[Option<SparseDistribution>],
    w1: WordId,
    measure: Measure,
) -> Result<Vec<(WordId, f64)>, SimilarityError> {
    let own = match &rows[w1 as usize] {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    let mut out = Vec::with_capacity(rows.len().saturating_sub(1));
    let mut excluded = 0usize;
    for (other, row) in rows.iter().enumerate() {
        let other = other as WordId;
        if other == w1 {
            continue;
        }
        let q = match row {
            Some(q) => q,
            None => continue,
        };
        let value = match measure {
            Measure::Kl => match kl_divergence(own, q) {
                Some(v) => v,
                None => {
                    // undefined support: treated as infinitely distant
                    excluded += 1;
                    continue;
                }
            },
            Measure::Js => jensen_shannon(own, q),
            Measure::L1 => l1_distance(own, q),
            Measure::Confusion => confusion_probability(base, w1, other)?,
            Measure::Random => return Err(SimilarityError::InvalidMeasure(measure)),
        };
        out.push((other, value));
    }
    if excluded > 0 {
        log::debug!("w1={w1}: {excluded} neighbors excluded (KL undefined, weight 0)");
    }
    out.sort_by(compare_for(measure));
    Ok(out)
}

impl SimilarityValues {
    /// Computes every pairwise value over the base model's rows. Rows are
    /// independent and processed in parallel; assembly order is fixed, so
    /// the result does not depend on thread count.
    pub fn compute(base: &ConditionalModel, measure: Measure) -> Result<Self, SimilarityError> {
        let v1_len = base.table().v1_len();
        let mut cached: Vec<Option<SparseDistribution>> = Vec::with_capacity(v1_len);
        for w1 in 0..v1_len as WordId {
            if base.table().marginal1(w1) == 0 {
                cached.push(None);
            } else {
                cached.push(Some(base.row(w1)?));
            }
        }
        let rows = (0..v1_len as WordId)
            .into_par_iter()
            .map(|w1| value_row(base, &cached, w1, measure))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            measure,
            base_kind: base.kind(),
            rows,
        })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn base_kind(&self) -> ModelKind {
        self.base_kind
    }

    pub fn v1_len(&self) -> usize {
        self.rows.len()
    }

    /// Sorted (word, value) row for `w1` (empty when w1 has no distribution).
    pub fn row(&self, w1: WordId) -> &[(WordId, f64)] {
        self.rows
            .get(w1 as usize)
            .map(|r| r.as_slice())
            .unwrap_or(&[])
    }

    /// Instantiates the neighbor list for one word at given parameters:
    /// up to k closest entries with dissimilarity below t. The threshold
    /// does not apply to similarity-type measures (confusion, random).
    pub fn neighbor_list(&self, w1: WordId, beta: f64, k: Option<usize>, t: f64) -> NeighborList {
        let row = self.row(w1);
        let filtered = row
            .iter()
            .filter(|&&(_, v)| self.measure.is_similarity() || v < t)
            .take(k.unwrap_or(usize::MAX));
        let entries: Vec<Neighbor> = filtered
            .map(|&(word, value)| Neighbor {
                word,
                value,
                weight: weight(self.measure, value, beta),
            })
            .collect();
        if entries.is_empty() {
            log::warn!(
                "no qualifying neighbors for w1={w1} (measure {}, k={k:?}, t={t})",
                self.measure
            );
        }
        NeighborList {
            owner: w1,
            measure: self.measure,
            beta,
            k,
            t,
            entries,
        }
    }

    /// Instantiates the whole matrix at given parameters.
    pub fn to_matrix(&self, beta: f64, k: Option<usize>, t: f64) -> SimilarityMatrix {
        let rows = (0..self.rows.len() as WordId)
            .map(|w1| self.neighbor_list(w1, beta, k, t))
            .collect();
        SimilarityMatrix {
            measure: self.measure,
            base_kind: self.base_kind,
            beta,
            k,
            t,
            rows,
        }
    }
}

/// One neighbor list per conditioning word, with the parameters that
/// produced it.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    pub measure: Measure,
    pub base_kind: ModelKind,
    pub beta: f64,
    pub k: Option<usize>,
    pub t: f64,
    pub rows: Vec<NeighborList>,
}

impl SimilarityMatrix {
    pub fn row(&self, w1: WordId) -> Option<&NeighborList> {
        self.rows.get(w1 as usize)
    }

    pub fn v1_len(&self) -> usize {
        self.rows.len()
    }
}

/// The neighbor set of one word under a base model.
pub fn neighbors(
    base: &ConditionalModel,
    w1: WordId,
    measure: Measure,
    beta: f64,
    k: Option<usize>,
    t: f64,
) -> Result<NeighborList, SimilarityError> {
    let table = base.table();
    if w1 as usize >= table.v1_len() {
        return Err(SimilarityError::Model(ModelError::UnknownWord {
            id: w1,
            side: "V1",
        }));
    }
    // single-row variant of SimilarityValues::compute
    let v1_len = table.v1_len();
    let mut cached: Vec<Option<SparseDistribution>> = Vec::with_capacity(v1_len);
    for id in 0..v1_len as WordId {
        if table.marginal1(id) == 0 {
            cached.push(None);
        } else {
            cached.push(Some(base.row(id)?));
        }
    }
    let row = value_row(base, &cached, w1, measure)?;
    let values = SimilarityValues {
        measure,
        base_kind: base.kind(),
        rows: {
            let mut rows = vec![Vec::new(); v1_len];
            rows[w1 as usize] = row;
            rows
        },
    };
    Ok(values.neighbor_list(w1, beta, k, t))
}

/// Builds the full |V1| x |V1| similarity matrix at fixed parameters.
pub fn build_similarity_matrix(
    base: &ConditionalModel,
    measure: Measure,
    beta: f64,
    k: Option<usize>,
    t: f64,
) -> Result<SimilarityMatrix, SimilarityError> {
    Ok(SimilarityValues::compute(base, measure)?.to_matrix(beta, k, t))
}

/// Writes a matrix as TSV: `w1<TAB>w1'<TAB>value<TAB>weight`, rows grouped
/// by w1, with a header comment recording the parameters.
pub fn write_matrix<W: Write>(
    matrix: &SimilarityMatrix,
    vocab: &VocabularyIndex,
    mut out: W,
) -> io::Result<()> {
    let k = matrix
        .k
        .map(|k| k.to_string())
        .unwrap_or_else(|| "inf".into());
    writeln!(
        out,
        "# measure={} beta={} k={} t={} base={}",
        matrix.measure, matrix.beta, k, matrix.t, matrix.base_kind
    )?;
    for list in &matrix.rows {
        let w1 = vocab.v1.word(list.owner).unwrap_or("?");
        for n in &list.entries {
            let w1p = vocab.v1.word(n.word).unwrap_or("?");
            writeln!(out, "{}\t{}\t{}\t{}", w1, w1p, n.value, n.weight)?;
        }
    }
    Ok(())
}
