//! Pair ingestion and count tables.
//!
//! Data enters as a stream of `(w1, w2)` cooccurrence pairs, one per line.
//! Conditioning words (`w1`) and conditioned words (`w2`) get separate
//! integer-indexed vocabularies; everything downstream works on ids.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type WordId = u32;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed pair line: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: count must be >= 1, got {value}")]
    BadCount { line: usize, value: i64 },
    #[error("test fraction must be strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("need at least {need} folds, got {have}")]
    TooFewFolds { have: usize, need: usize },
    #[error("cannot split {have} instances into {folds} folds")]
    TooFewInstances { have: usize, folds: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Bidirectional word <-> id map for one side of the pair.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    word_to_id: HashMap<String, WordId>,
    id_to_word: Vec<String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `word`, interning it if unseen.
    pub fn intern(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.word_to_id.get(word) {
            return id;
        }
        let id = self.id_to_word.len() as WordId;
        self.word_to_id.insert(word.to_owned(), id);
        self.id_to_word.push(word.to_owned());
        id
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.word_to_id.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> Option<&str> {
        self.id_to_word.get(id as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.id_to_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_word.is_empty()
    }

    /// Words in id order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.id_to_word.iter().map(|s| s.as_str())
    }
}

/// Separate vocabularies for conditioning (`v1`) and conditioned (`v2`) words.
/// The two sides need not be disjoint; the same string may carry different
/// ids on each side.
#[derive(Debug, Clone, Default)]
pub struct VocabularyIndex {
    pub v1: Lexicon,
    pub v2: Lexicon,
}

/// Ordered multiset of pair token instances. Duplicates are preserved:
/// instances, not pair types, are the unit of splitting and folding.
#[derive(Debug, Clone)]
pub struct PairList {
    instances: Vec<(WordId, WordId)>,
    v1_len: usize,
    v2_len: usize,
}

impl PairList {
    pub fn new(v1_len: usize, v2_len: usize) -> Self {
        Self {
            instances: Vec::new(),
            v1_len,
            v2_len,
        }
    }

    pub fn from_instances(instances: Vec<(WordId, WordId)>, v1_len: usize, v2_len: usize) -> Self {
        debug_assert!(instances
            .iter()
            .all(|&(a, b)| (a as usize) < v1_len && (b as usize) < v2_len));
        Self {
            instances,
            v1_len,
            v2_len,
        }
    }

    pub fn push(&mut self, w1: WordId, w2: WordId) {
        debug_assert!((w1 as usize) < self.v1_len && (w2 as usize) < self.v2_len);
        self.instances.push((w1, w2));
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WordId, WordId)> + '_ {
        self.instances.iter().copied()
    }

    pub fn as_slice(&self) -> &[(WordId, WordId)] {
        &self.instances
    }

    pub fn v1_len(&self) -> usize {
        self.v1_len
    }

    pub fn v2_len(&self) -> usize {
        self.v2_len
    }
}

/// Sparse table of pair counts `c(w1, w2)` with cached marginals and total.
///
/// Rows are indexed by `w1` and kept sorted by `w2`; zero counts are never
/// stored. The vocabulary is part of the shape: rows exist for every `w1`
/// even when the marginal is zero (singleton removal only changes counts).
#[derive(Debug, Clone)]
pub struct PairCountTable {
    rows: Vec<Vec<(WordId, u64)>>,
    marginals1: Vec<u64>,
    marginals2: Vec<u64>,
    total: u64,
}

/// Tallies a pair list into a count table.
pub fn count(pairs: &PairList) -> PairCountTable {
    let mut rows: Vec<HashMap<WordId, u64>> = vec![HashMap::new(); pairs.v1_len()];
    for (w1, w2) in pairs.iter() {
        *rows[w1 as usize].entry(w2).or_insert(0) += 1;
    }
    PairCountTable::from_count_rows(rows, pairs.v2_len())
}

impl PairCountTable {
    fn from_count_rows(raw: Vec<HashMap<WordId, u64>>, v2_len: usize) -> Self {
        let mut rows = Vec::with_capacity(raw.len());
        let mut marginals1 = vec![0u64; raw.len()];
        let mut marginals2 = vec![0u64; v2_len];
        let mut total = 0u64;
        for (w1, counts) in raw.into_iter().enumerate() {
            let mut row: Vec<(WordId, u64)> = counts.into_iter().collect();
            row.sort_unstable_by_key(|&(w2, _)| w2);
            for &(w2, c) in &row {
                marginals1[w1] += c;
                marginals2[w2 as usize] += c;
                total += c;
            }
            rows.push(row);
        }
        Self {
            rows,
            marginals1,
            marginals2,
            total,
        }
    }

    pub fn v1_len(&self) -> usize {
        self.rows.len()
    }

    pub fn v2_len(&self) -> usize {
        self.marginals2.len()
    }

    /// `c(w1, w2)`, zero when the pair is unseen.
    pub fn pair_count(&self, w1: WordId, w2: WordId) -> u64 {
        match self.rows.get(w1 as usize) {
            Some(row) => row
                .binary_search_by_key(&w2, |&(id, _)| id)
                .map(|i| row[i].1)
                .unwrap_or(0),
            None => 0,
        }
    }

    /// `c(w1)`.
    pub fn marginal1(&self, w1: WordId) -> u64 {
        self.marginals1.get(w1 as usize).copied().unwrap_or(0)
    }

    /// `c(w2)`.
    pub fn marginal2(&self, w2: WordId) -> u64 {
        self.marginals2.get(w2 as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Seen `(w2, count)` entries for `w1`, sorted by `w2`.
    pub fn row(&self, w1: WordId) -> &[(WordId, u64)] {
        self.rows
            .get(w1 as usize)
            .map(|r| r.as_slice())
            .unwrap_or(&[])
    }

    /// Number of distinct stored pairs.
    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Number of distinct pairs with count exactly 1.
    pub fn singleton_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .filter(|&&(_, c)| c == 1)
            .count()
    }

    /// All stored entries in `(w1, w2)` order.
    pub fn entries(&self) -> impl Iterator<Item = (WordId, WordId, u64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(w1, row)| row.iter().map(move |&(w2, c)| (w1 as WordId, w2, c)))
    }

    /// Expands the table back into a pair list (counts become repeats).
    pub fn to_pair_list(&self) -> PairList {
        let mut out = PairList::new(self.v1_len(), self.v2_len());
        for (w1, w2, c) in self.entries() {
            for _ in 0..c {
                out.push(w1, w2);
            }
        }
        out
    }

    /// Drops every pair that occurs exactly once and recomputes marginals.
    /// Words whose marginal falls to zero stay in the vocabulary.
    pub fn remove_singletons(&self) -> PairCountTable {
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut marginals1 = vec![0u64; self.v1_len()];
        let mut marginals2 = vec![0u64; self.v2_len()];
        let mut total = 0u64;
        for (w1, row) in self.rows.iter().enumerate() {
            let kept: Vec<(WordId, u64)> =
                row.iter().copied().filter(|&(_, c)| c > 1).collect();
            for &(w2, c) in &kept {
                marginals1[w1] += c;
                marginals2[w2 as usize] += c;
                total += c;
            }
            rows.push(kept);
        }
        PairCountTable {
            rows,
            marginals1,
            marginals2,
            total,
        }
    }
}

/// Reads `w1<TAB>w2[<TAB>count]` lines. Lines starting with `#` are ignored.
/// A count of n expands into n repeated instances.
pub fn ingest_pairs<R: BufRead>(reader: R) -> Result<(VocabularyIndex, PairList), CorpusError> {
    let mut vocab = VocabularyIndex::default();
    let mut instances: Vec<(WordId, WordId)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let w1 = fields.next().filter(|s| !s.is_empty());
        let w2 = fields.next().filter(|s| !s.is_empty());
        let (w1, w2) = match (w1, w2) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(CorpusError::Parse {
                    line: lineno,
                    msg: format!("expected `w1<TAB>w2[<TAB>count]`, got {line:?}"),
                })
            }
        };
        let count = match fields.next() {
            None => 1,
            Some(raw) => {
                let value: i64 = raw.parse().map_err(|_| CorpusError::Parse {
                    line: lineno,
                    msg: format!("bad count field {raw:?}"),
                })?;
                if value <= 0 {
                    return Err(CorpusError::BadCount {
                        line: lineno,
                        value,
                    });
                }
                value as u64
            }
        };
        if fields.next().is_some() {
            return Err(CorpusError::Parse {
                line: lineno,
                msg: "too many fields".into(),
            });
        }
        let id1 = vocab.v1.intern(w1);
        let id2 = vocab.v2.intern(w2);
        for _ in 0..count {
            instances.push((id1, id2));
        }
    }
    let (n1, n2) = (vocab.v1.len(), vocab.v2.len());
    Ok((vocab, PairList::from_instances(instances, n1, n2)))
}

/// Writes a count table in the pair file format, aggregated and sorted by
/// `(w1_id, w2_id)`. `header` lines are emitted as `#` comments.
pub fn write_pairs<W: Write>(
    mut out: W,
    vocab: &VocabularyIndex,
    table: &PairCountTable,
    header: &[String],
) -> io::Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for (w1, w2, c) in table.entries() {
        let a = vocab.v1.word(w1).unwrap_or("?");
        let b = vocab.v2.word(w2).unwrap_or("?");
        if c == 1 {
            writeln!(out, "{a}\t{b}")?;
        } else {
            writeln!(out, "{a}\t{b}\t{c}")?;
        }
    }
    Ok(())
}

/// Derives a per-stage seed from the experiment master seed.
/// SplitMix64 finalizer over the master seed and a stage tag hash.
pub fn derive_seed(seed: u64, stage: &str) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &b in stage.as_bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    idx
}

/// Splits a pair list into train/test by token instance: seeded ChaCha8
/// shuffle, then a contiguous slice of round(n * test_fraction) instances
/// becomes the test part.
pub fn split_train_test(
    pairs: &PairList,
    test_fraction: f64,
    seed: u64,
) -> Result<(PairList, PairList), CorpusError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CorpusError::BadFraction(test_fraction));
    }
    let n = pairs.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    let idx = shuffled_indices(n, seed);
    let slice = pairs.as_slice();
    let test: Vec<_> = idx[..n_test].iter().map(|&i| slice[i]).collect();
    let train: Vec<_> = idx[n_test..].iter().map(|&i| slice[i]).collect();
    Ok((
        PairList::from_instances(train, pairs.v1_len(), pairs.v2_len()),
        PairList::from_instances(test, pairs.v1_len(), pairs.v2_len()),
    ))
}

/// Keeps exactly the test instances whose pair has zero training count.
/// Duplicates are preserved.
pub fn extract_unseen(test: &PairList, train: &PairCountTable) -> PairList {
    let kept: Vec<_> = test
        .iter()
        .filter(|&(w1, w2)| train.pair_count(w1, w2) == 0)
        .collect();
    PairList::from_instances(kept, test.v1_len(), test.v2_len())
}

/// Partitions instances into `n_folds` folds whose sizes differ by at most
/// one, via a seeded shuffle and contiguous slicing.
pub fn make_folds(
    pairs: &PairList,
    n_folds: usize,
    seed: u64,
) -> Result<Vec<PairList>, CorpusError> {
    if n_folds < 2 {
        return Err(CorpusError::TooFewFolds {
            have: n_folds,
            need: 2,
        });
    }
    if pairs.len() < n_folds {
        return Err(CorpusError::TooFewInstances {
            have: pairs.len(),
            folds: n_folds,
        });
    }
    let idx = shuffled_indices(pairs.len(), seed);
    let slice = pairs.as_slice();
    let base = pairs.len() / n_folds;
    let rem = pairs.len() % n_folds;
    let mut folds = Vec::with_capacity(n_folds);
    let mut pos = 0;
    for i in 0..n_folds {
        let size = base + usize::from(i < rem);
        let part: Vec<_> = idx[pos..pos + size].iter().map(|&j| slice[j]).collect();
        folds.push(PairList::from_instances(
            part,
            pairs.v1_len(),
            pairs.v2_len(),
        ));
        pos += size;
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    pub(crate) const MICRO: &str =
        "a\tx\na\tx\na\ty\nb\tx\nb\ty\nb\tz\nb\tz\nc\tz\n";

    fn micro() -> (VocabularyIndex, PairList) {
        ingest_pairs(Cursor::new(MICRO)).unwrap()
    }

    #[test]
    fn ingest_basic() {
        let (vocab, pairs) =
            ingest_pairs(Cursor::new("see\tguy\nsee\tguy\nplay\trole\n")).unwrap();
        assert_eq!(pairs.len(), 3);
        assert_eq!(vocab.v1.len(), 2);
        assert_eq!(vocab.v2.len(), 2);
        assert_eq!(vocab.v1.id("see"), Some(0));
        assert_eq!(vocab.v2.word(1), Some("role"));
    }

    #[test]
    fn ingest_empty() {
        let (vocab, pairs) = ingest_pairs(Cursor::new("")).unwrap();
        assert!(pairs.is_empty());
        assert!(vocab.v1.is_empty() && vocab.v2.is_empty());
    }

    #[test]
    fn ingest_count_expansion() {
        let (_, a) = ingest_pairs(Cursor::new("see\tguy\t3\n")).unwrap();
        let (_, b) = ingest_pairs(Cursor::new("see\tguy\nsee\tguy\nsee\tguy\n")).unwrap();
        assert_eq!(count(&a).pair_count(0, 0), count(&b).pair_count(0, 0));
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn ingest_errors_name_line() {
        let err = ingest_pairs(Cursor::new("a\tx\nbroken line\n")).unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
        let err = ingest_pairs(Cursor::new("a\tx\t0\n")).unwrap_err();
        match err {
            CorpusError::BadCount { line, value } => {
                assert_eq!((line, value), (1, 0));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn ingest_skips_comments() {
        let (_, pairs) = ingest_pairs(Cursor::new("# header\na\tx\n")).unwrap();
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn count_tally() {
        let (vocab, pairs) = ingest_pairs(Cursor::new("a\tx\na\tx\na\ty\n")).unwrap();
        let table = count(&pairs);
        let (a, x, y) = (
            vocab.v1.id("a").unwrap(),
            vocab.v2.id("x").unwrap(),
            vocab.v2.id("y").unwrap(),
        );
        assert_eq!(table.pair_count(a, x), 2);
        assert_eq!(table.pair_count(a, y), 1);
        assert_eq!(table.marginal1(a), 3);
        assert_eq!(table.total(), 3);
    }

    #[test]
    fn count_empty() {
        let table = count(&PairList::new(0, 0));
        assert_eq!(table.total(), 0);
    }

    #[test]
    fn micro_corpus_tally() {
        let (vocab, pairs) = micro();
        let table = count(&pairs);
        assert_eq!(table.marginal1(vocab.v1.id("b").unwrap()), 4);
        assert_eq!(table.marginal2(vocab.v2.id("z").unwrap()), 3);
        assert_eq!(table.total(), 8);
        assert_eq!(table.singleton_count(), 4);
    }

    #[test]
    fn remove_singletons_micro() {
        let (vocab, pairs) = micro();
        let table = count(&pairs).remove_singletons();
        assert_eq!(table.total(), 4);
        assert_eq!(table.entry_count(), 2);
        let (a, x) = (vocab.v1.id("a").unwrap(), vocab.v2.id("x").unwrap());
        assert_eq!(table.pair_count(a, x), 2);
        // c's marginal drops to zero but the word keeps its slot
        let c = vocab.v1.id("c").unwrap();
        assert_eq!(table.marginal1(c), 0);
        assert_eq!(table.v1_len(), 3);
    }

    #[test]
    fn remove_singletons_idempotent_and_identity() {
        let (_, pairs) = micro();
        let once = count(&pairs).remove_singletons();
        let twice = once.remove_singletons();
        assert_eq!(once.total(), twice.total());
        assert_eq!(once.entry_count(), twice.entry_count());
    }

    #[test]
    fn split_deterministic_partition() {
        let (_, pairs) = micro();
        let mut ten = pairs.clone();
        ten.push(0, 0);
        ten.push(1, 1);
        let (tr1, te1) = split_train_test(&ten, 0.2, 7).unwrap();
        let (tr2, te2) = split_train_test(&ten, 0.2, 7).unwrap();
        assert_eq!(te1.len(), 2);
        assert_eq!(tr1.len(), 8);
        assert_eq!(tr1.as_slice(), tr2.as_slice());
        assert_eq!(te1.as_slice(), te2.as_slice());
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let (_, pairs) = micro();
        assert!(split_train_test(&pairs, 0.0, 1).is_err());
        assert!(split_train_test(&pairs, 1.0, 1).is_err());
    }

    #[test]
    fn extract_unseen_keeps_zero_count_pairs() {
        let (vocab, pairs) = micro();
        let train = count(&pairs);
        let (a, x) = (vocab.v1.id("a").unwrap(), vocab.v2.id("x").unwrap());
        let z = vocab.v2.id("z").unwrap();
        let test = PairList::from_instances(
            vec![(a, x), (a, z), (a, z)],
            pairs.v1_len(),
            pairs.v2_len(),
        );
        let unseen = extract_unseen(&test, &train);
        assert_eq!(unseen.as_slice(), &[(a, z), (a, z)]);
        let all_seen = PairList::from_instances(vec![(a, x)], 3, 3);
        assert!(extract_unseen(&all_seen, &train).is_empty());
    }

    #[test]
    fn folds_partition_sizes() {
        let mut pairs = PairList::new(1, 1);
        for _ in 0..17 {
            pairs.push(0, 0);
        }
        let folds = make_folds(&pairs, 5, 3).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 3, 4, 4]);
        assert!(make_folds(&PairList::new(1, 1), 2, 0).is_err());
        assert!(make_folds(&pairs, 1, 0).is_err());
    }

    #[test]
    fn fold_sizes_match_paper_arithmetic() {
        // 17,152 = 5 * 3430 + 2
        let mut pairs = PairList::new(1, 1);
        for _ in 0..17_152 {
            pairs.push(0, 0);
        }
        let folds = make_folds(&pairs, 5, 1).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3430, 3430, 3430, 3431, 3431]);
    }

    #[test]
    fn roundtrip_table_pairlist() {
        let (_, pairs) = micro();
        let table = count(&pairs);
        let back = count(&table.to_pair_list());
        assert_eq!(back.total(), table.total());
        for (w1, w2, c) in table.entries() {
            assert_eq!(back.pair_count(w1, w2), c);
        }
    }

    #[test]
    fn write_pairs_sorted_aggregated() {
        let (vocab, pairs) = micro();
        let table = count(&pairs);
        let mut buf = Vec::new();
        write_pairs(&mut buf, &vocab, &table, &["hello".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# hello\n"));
        assert!(text.contains("a\tx\t2\n"));
        assert!(text.contains("c\tz\n"));
        // reingest gives the same counts
        let (v2, p2) = ingest_pairs(Cursor::new(text)).unwrap();
        let t2 = count(&p2);
        assert_eq!(t2.total(), table.total());
        assert_eq!(v2.v1.len(), 3);
    }

    fn sorted_multiset(p: &PairList) -> Vec<(WordId, WordId)> {
        let mut v = p.as_slice().to_vec();
        v.sort_unstable();
        v
    }

    proptest! {
        #[test]
        fn marginals_sum_to_total(raw in proptest::collection::vec((0u32..12, 0u32..12), 0..200)) {
            let pairs = PairList::from_instances(raw, 12, 12);
            let table = count(&pairs);
            let m1: u64 = (0..12).map(|w| table.marginal1(w)).sum();
            let m2: u64 = (0..12).map(|w| table.marginal2(w)).sum();
            prop_assert_eq!(m1, table.total());
            prop_assert_eq!(m2, table.total());
            prop_assert_eq!(table.total(), pairs.len() as u64);
        }

        #[test]
        fn split_is_permutation(raw in proptest::collection::vec((0u32..8, 0u32..8), 2..120),
                                seed in any::<u64>()) {
            let pairs = PairList::from_instances(raw, 8, 8);
            let (train, test) = split_train_test(&pairs, 0.25, seed).unwrap();
            let mut merged = train.as_slice().to_vec();
            merged.extend_from_slice(test.as_slice());
            merged.sort_unstable();
            prop_assert_eq!(merged, sorted_multiset(&pairs));
            let want = (pairs.len() as f64 * 0.25).round() as usize;
            prop_assert_eq!(test.len(), want);
        }

        #[test]
        fn folds_are_permutation(raw in proptest::collection::vec((0u32..8, 0u32..8), 5..120),
                                 seed in any::<u64>()) {
            let pairs = PairList::from_instances(raw, 8, 8);
            let folds = make_folds(&pairs, 5, seed).unwrap();
            let mut merged: Vec<_> = folds.iter().flat_map(|f| f.iter()).collect();
            merged.sort_unstable();
            prop_assert_eq!(merged, sorted_multiset(&pairs));
            let max = folds.iter().map(|f| f.len()).max().unwrap();
            let min = folds.iter().map(|f| f.len()).min().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn singleton_removal_idempotent(raw in proptest::collection::vec((0u32..6, 0u32..6), 0..80)) {
            let table = count(&PairList::from_instances(raw, 6, 6));
            let once = table.remove_singletons();
            let twice = once.remove_singletons();
            prop_assert_eq!(once.total(), twice.total());
            prop_assert_eq!(once.entry_count(), twice.entry_count());
        }
    }
}
