//! Seeded synthetic cooccurrence corpora for tests and benchmarks.
//!
//! Nouns generate verbs through one of two latent classes, with a finer
//! subclass layer inside each class. Verbs come in equal-frequency pairs
//! that straddle the two classes, so frequency alone cannot separate the
//! alternatives of a pseudo-word built from adjacent frequency ranks.
//! A few high-frequency "generalist" nouns cooccur with every verb; they
//! carry no class information but lots of raw frequency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{PairList, VocabularyIndex};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_nouns: usize,
    pub n_verbs: usize,
    /// Leading noun ids that cooccur with every verb (class-neutral).
    pub n_generalists: usize,
    /// Number of subclasses cycling through the verb blocks.
    pub n_subclasses: usize,
    /// Probability that a token crosses to the other class.
    pub class_noise: f64,
    /// Probability that an in-class token spreads class-wide instead of
    /// staying inside its subclass.
    pub class_mix: f64,
    /// Zipf exponent for noun choice inside a cell.
    pub zipf_exponent: f64,
    /// Token quota of the rarest verb block.
    pub quota_base: u64,
    /// Divisor of the quadratic quota growth toward frequent blocks.
    pub quota_scale: f64,
    /// Minimum generalist count per (generalist, verb) pair.
    pub generalist_min: u64,
    /// Divisor mapping block quota onto extra generalist counts.
    pub generalist_scale: f64,
    /// Anchor tokens tying each noun to its subclass head verb.
    pub anchors: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_nouns: 200,
            n_verbs: 100,
            n_generalists: 8,
            n_subclasses: 5,
            class_noise: 0.015,
            class_mix: 0.08,
            zipf_exponent: 0.45,
            quota_base: 6,
            quota_scale: 25.0,
            generalist_min: 5,
            generalist_scale: 25.0,
            anchors: 6,
        }
    }
}

fn zipf_pick(rng: &mut ChaCha8Rng, weights: &[f64], total: f64) -> usize {
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if x <= acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Generates the two-cluster corpus. Deterministic per (config, seed).
///
/// Vocabulary layout: nouns `n000..` on V1 (ids 0..n_generalists are the
/// generalists; afterwards class = id % 2, subclass = (id / 2) % n_subclasses),
/// verbs `v000..` on V2 (block j = verbs {2j, 2j+1}, one per class, subclass
/// j % n_subclasses, sharing the block token quota).
pub fn two_cluster_corpus(config: &SynthConfig, seed: u64) -> (VocabularyIndex, PairList) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vocab = VocabularyIndex::default();
    for n in 0..config.n_nouns {
        vocab.v1.intern(&format!("n{n:03}"));
    }
    for v in 0..config.n_verbs {
        vocab.v2.intern(&format!("v{v:03}"));
    }

    let blocks = config.n_verbs / 2;
    let quota: Vec<u64> = (0..blocks)
        .map(|j| {
            config.quota_base + ((blocks - j) as f64).powi(2).div_euclid(config.quota_scale) as u64
        })
        .collect();

    // noun pools per class and per (class, subclass) cell, with Zipf weights
    let class_nouns: Vec<Vec<u32>> = (0..2)
        .map(|c| {
            (config.n_generalists..config.n_nouns)
                .filter(|n| n % 2 == c)
                .map(|n| n as u32)
                .collect()
        })
        .collect();
    let cell_nouns: Vec<Vec<Vec<u32>>> = (0..2)
        .map(|c| {
            (0..config.n_subclasses)
                .map(|s| {
                    class_nouns[c]
                        .iter()
                        .copied()
                        .filter(|&n| (n as usize / 2) % config.n_subclasses == s)
                        .collect()
                })
                .collect()
        })
        .collect();
    let zipf = |pool: &[u32]| -> (Vec<f64>, f64) {
        let ws: Vec<f64> = (0..pool.len())
            .map(|i| 1.0 / ((i + 2) as f64).powf(config.zipf_exponent))
            .collect();
        let total = ws.iter().sum();
        (ws, total)
    };
    let class_zipf: Vec<(Vec<f64>, f64)> = class_nouns.iter().map(|p| zipf(p)).collect();
    let cell_zipf: Vec<Vec<(Vec<f64>, f64)>> = cell_nouns
        .iter()
        .map(|cells| cells.iter().map(|p| zipf(p)).collect())
        .collect();

    let mut pairs = PairList::new(config.n_nouns, config.n_verbs);
    for j in 0..blocks {
        let sub = j % config.n_subclasses;
        for v in [2 * j, 2 * j + 1] {
            let class = v % 2;
            for _ in 0..quota[j] {
                let r: f64 = rng.gen();
                let noun = if r < config.class_noise {
                    let pool = &class_nouns[1 - class];
                    let (ws, total) = &class_zipf[1 - class];
                    pool[zipf_pick(&mut rng, ws, *total)]
                } else if r < config.class_noise + config.class_mix {
                    let pool = &class_nouns[class];
                    let (ws, total) = &class_zipf[class];
                    pool[zipf_pick(&mut rng, ws, *total)]
                } else {
                    let pool = &cell_nouns[class][sub];
                    let (ws, total) = &cell_zipf[class][sub];
                    pool[zipf_pick(&mut rng, ws, *total)]
                };
                pairs.push(noun, v as u32);
            }
        }
    }
    // generalists cover the whole verb vocabulary with frequency-shaped counts
    for g in 0..config.n_generalists as u32 {
        for v in 0..config.n_verbs {
            let extra = (quota[v / 2] as f64 / config.generalist_scale).round() as u64;
            for _ in 0..config.generalist_min + extra {
                pairs.push(g, v as u32);
            }
        }
    }
    // anchors keep every noun's row alive even under singleton deletion
    for n in config.n_generalists..config.n_nouns {
        let class = n % 2;
        let sub = (n / 2) % config.n_subclasses;
        let head_verb = (2 * sub + class) as u32;
        for _ in 0..config.anchors {
            pairs.push(n as u32, head_verb);
        }
    }

    // deterministic shuffle so splits do not see generation order
    let mut instances = pairs.as_slice().to_vec();
    use rand::seq::SliceRandom;
    instances.shuffle(&mut rng);
    (
        vocab,
        PairList::from_instances(instances, config.n_nouns, config.n_verbs),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::count;

    #[test]
    fn deterministic_and_covering() {
        let cfg = SynthConfig::default();
        let (vocab, a) = two_cluster_corpus(&cfg, 7);
        let (_, b) = two_cluster_corpus(&cfg, 7);
        assert_eq!(a.as_slice(), b.as_slice());
        let (_, c) = two_cluster_corpus(&cfg, 8);
        assert_ne!(a.as_slice(), c.as_slice());

        assert_eq!(vocab.v1.len(), 200);
        assert_eq!(vocab.v2.len(), 100);
        let table = count(&a);
        for w1 in 0..200 {
            assert!(table.marginal1(w1) > 0, "noun {w1} unused");
        }
        for w2 in 0..100 {
            assert!(table.marginal2(w2) > 0, "verb {w2} unused");
        }
        // generalists really cover everything
        for g in 0..cfg.n_generalists as u32 {
            for v in 0..100 {
                assert!(table.pair_count(g, v) >= cfg.generalist_min);
            }
        }
    }
}
