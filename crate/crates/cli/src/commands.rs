use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use simsmooth::{
    build_grid, count, ingest_pairs, katz_backoff, mle_conditional, mle_unigram, neighbors,
    run_experiment, tune_measure, unseen_subset_perplexity, write_pairs, ConditionalModel,
    EvaluationReport, ExperimentConfig, Measure, Method, PairList, PerplexityOutcome,
    PerplexityReport, Redistribution, Side, SmoothedModel, SmoothingConfig, VocabularyIndex,
};

pub fn load_pairs(path: &Path) -> Result<(VocabularyIndex, PairList)> {
    let file =
        File::open(path).with_context(|| format!("cannot open pair file {}", path.display()))?;
    ingest_pairs(BufReader::new(file))
        .with_context(|| format!("while reading {}", path.display()))
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

pub fn cmd_ingest(input: &Path, out: Option<&Path>, drop_singletons: bool) -> Result<()> {
    let (vocab, pairs) = load_pairs(input)?;
    let mut table = count(&pairs);
    if drop_singletons {
        table = table.remove_singletons();
    }
    let summary = format!(
        "N={} |V1|={} |V2|={} singletons={}",
        table.total(),
        vocab.v1.len(),
        vocab.v2.len(),
        table.singleton_count()
    );
    match out {
        Some(path) => {
            let mut file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            write_pairs(&mut file, &vocab, &table, &[summary.clone()])?;
            println!("{summary}");
            log::info!("wrote {}", path.display());
        }
        None => {
            write_pairs(std::io::stdout().lock(), &vocab, &table, &[summary.clone()])?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// neighbors
// ---------------------------------------------------------------------------

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            row.push(sub.min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}

fn nearest_words(vocab: &VocabularyIndex, word: &str, n: usize) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = vocab
        .v1
        .words()
        .map(|w| (levenshtein(word, w), w))
        .collect();
    scored.sort_by_key(|&(d, w)| (d, w.to_owned()));
    scored.into_iter().take(n).map(|(_, w)| w.to_owned()).collect()
}

pub fn cmd_neighbors(
    table_path: &Path,
    word: &str,
    config: &SmoothingConfig,
) -> Result<()> {
    let (vocab, pairs) = load_pairs(table_path)?;
    let table = Arc::new(count(&pairs));
    let Some(w1) = vocab.v1.id(word) else {
        bail!(
            "word {word:?} not in the conditioning vocabulary; nearest matches: {}",
            nearest_words(&vocab, word, 5).join(", ")
        );
    };
    let base = simsmooth::make_base(&table, config.sim_base, config.gt_threshold)?;
    let list = neighbors(&base, w1, config.measure, config.beta, config.k, config.t)?;
    let k_str = config
        .k
        .map(|k| k.to_string())
        .unwrap_or_else(|| "inf".into());
    println!(
        "# measure={} beta={} k={} t={} base={}",
        config.measure, config.beta, k_str, config.t, config.sim_base
    );
    // the word itself is excluded from estimation but shown for table
    // fidelity: at distance 0 for the distance measures, at its own ranked
    // position for the confusion probability
    let mut printed_self = false;
    let self_value = match config.measure {
        Measure::Confusion => simsmooth::confusion_probability(&base, w1, w1)?,
        _ => 0.0,
    };
    let self_weight = simsmooth::weight(config.measure, self_value, config.beta);
    if !config.measure.is_similarity() {
        println!("{word}\t{self_value}\t{self_weight}");
        printed_self = true;
    }
    for n in &list.entries {
        if !printed_self && config.measure.is_similarity() && self_value >= n.value {
            println!("{word}\t{self_value}\t{self_weight}");
            printed_self = true;
        }
        let name = vocab.v1.word(n.word).unwrap_or("?");
        println!("{name}\t{}\t{}", n.value, n.weight);
    }
    if !printed_self {
        println!("{word}\t{self_value}\t{self_weight}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// perplexity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub enum EvalModel {
    Mle,
    Katz,
    Sim,
}

impl std::str::FromStr for EvalModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mle" => Ok(EvalModel::Mle),
            "katz" => Ok(EvalModel::Katz),
            "sim" => Ok(EvalModel::Sim),
            other => Err(format!("unknown model {other:?} (expected mle|katz|sim)")),
        }
    }
}

/// Parses test pairs against the training vocabulary. The first pair with
/// an out-of-vocabulary word is returned separately: a closed-vocabulary
/// model assigns it probability zero.
fn load_test_pairs(
    path: &Path,
    vocab: &VocabularyIndex,
) -> Result<(PairList, usize, Option<(String, String)>)> {
    let file =
        File::open(path).with_context(|| format!("cannot open test file {}", path.display()))?;
    let mut pairs = PairList::new(vocab.v1.len(), vocab.v2.len());
    let mut total = 0usize;
    let mut oov: Option<(String, String)> = None;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(w1), Some(w2)) = (fields.next(), fields.next()) else {
            bail!("{}:{}: expected w1<TAB>w2[<TAB>count]", path.display(), idx + 1);
        };
        let count: u64 = match fields.next() {
            None => 1,
            Some(c) => c
                .parse()
                .with_context(|| format!("{}:{}: bad count", path.display(), idx + 1))?,
        };
        total += count as usize;
        match (vocab.v1.id(w1), vocab.v2.id(w2)) {
            (Some(a), Some(b)) => {
                for _ in 0..count {
                    pairs.push(a, b);
                }
            }
            _ => {
                if oov.is_none() {
                    oov = Some((w1.to_owned(), w2.to_owned()));
                }
            }
        }
    }
    Ok((pairs, total, oov))
}

fn print_outcome(label: &str, outcome: &PerplexityOutcome, vocab: &VocabularyIndex) {
    match outcome {
        PerplexityOutcome::Finite { value } => println!("{label}={value}"),
        PerplexityOutcome::Infinite { w1, w2 } => {
            println!("{label}=inf");
            println!(
                "zero_probability_pair={}\t{}",
                vocab.v1.word(*w1).unwrap_or("?"),
                vocab.v2.word(*w2).unwrap_or("?")
            );
        }
    }
}

fn print_perplexity_report(report: &PerplexityReport, vocab: &VocabularyIndex) {
    println!("total={}", report.total);
    println!("unseen_count={}", report.unseen_count);
    println!("unseen_fraction={}", report.unseen_fraction);
    print_outcome("overall_perplexity", &report.overall, vocab);
    match &report.unseen {
        Some(outcome) => print_outcome("unseen_perplexity", outcome, vocab),
        None => println!("unseen_perplexity=undefined (no unseen pairs in test)"),
    }
}

pub fn cmd_perplexity(
    train: &Path,
    test: &Path,
    model: EvalModel,
    config: &SmoothingConfig,
    drop_singletons: bool,
) -> Result<()> {
    let (vocab, train_pairs) = load_pairs(train)?;
    let mut table = count(&train_pairs);
    if drop_singletons {
        table = table.remove_singletons();
    }
    let table = Arc::new(table);
    let (test_pairs, total, oov) = load_test_pairs(test, &vocab)?;
    if let Some((w1, w2)) = oov {
        println!("total={total}");
        println!("overall_perplexity=inf");
        println!("zero_probability_pair={w1}\t{w2}");
        return Ok(());
    }
    if test_pairs.is_empty() {
        bail!("test file {} holds no pairs", test.display());
    }
    let report = match model {
        EvalModel::Mle => {
            let m = ConditionalModel::Mle(mle_conditional(table.clone()));
            unseen_subset_perplexity(&m, &test_pairs, &table)?
        }
        EvalModel::Katz => {
            let unigram = Arc::new(mle_unigram(&table, Side::V2)?);
            let m = katz_backoff(
                table.clone(),
                Redistribution::Unigram(unigram),
                config.gt_threshold,
            )?;
            unseen_subset_perplexity(&m, &test_pairs, &table)?
        }
        EvalModel::Sim => {
            let m = SmoothedModel::build(table.clone(), config.clone())?;
            unseen_subset_perplexity(&m, &test_pairs, &table)?
        }
    };
    print_perplexity_report(&report, &vocab);
    Ok(())
}

// ---------------------------------------------------------------------------
// disambig
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn cmd_disambig(
    pairs_path: &Path,
    methods: &[Method],
    folds: usize,
    seed: u64,
    test_fraction: f64,
    drop_singletons: bool,
    gt_threshold: u64,
    beta_grid: Option<Vec<f64>>,
    voting_ks: Option<Vec<usize>>,
    out_dir: &Path,
) -> Result<()> {
    let (vocab, pairs) = load_pairs(pairs_path)?;
    let mut config = ExperimentConfig {
        methods: methods.to_vec(),
        n_folds: folds,
        seed,
        test_fraction,
        drop_singletons,
        gt_threshold,
        sweeps: true,
        ..ExperimentConfig::default()
    };
    if let Some(grid) = beta_grid {
        for method in methods {
            if let Method::Sim(m) = method {
                config.beta_grids.insert(m.to_string(), grid.clone());
            }
        }
    }
    if let Some(ks) = voting_ks {
        config.voting_ks = ks;
    }
    let report = run_experiment(&vocab, &pairs, &config)?;
    write_report(&report, out_dir)?;
    print_report_summary(&report);
    Ok(())
}

fn write_report(report: &EvaluationReport, out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let json_path = out_dir.join("report.json");
    let file = File::create(&json_path)?;
    report.write_json(file)?;
    let csvs = report.write_sweep_csvs(out_dir)?;
    log::info!(
        "wrote {} and {} sweep files to {}",
        json_path.display(),
        csvs.len(),
        out_dir.display()
    );
    Ok(json_path)
}

fn print_report_summary(report: &EvaluationReport) {
    println!(
        "train={} test={} unseen={} excluded_no_row={} excluded_leftover={} pseudowords={}",
        report.n_train_instances,
        report.n_test_instances,
        report.n_unseen,
        report.n_excluded_no_row,
        report.n_excluded_leftover,
        report.n_pseudowords
    );
    for m in &report.methods {
        let folds = m
            .fold_errors
            .iter()
            .map(|e| format!("{e:.4}"))
            .collect::<Vec<_>>()
            .join(",");
        match &m.tuned_beta {
            Some(betas) => {
                let betas = betas
                    .iter()
                    .map(|b| format!("{b}"))
                    .collect::<Vec<_>>()
                    .join(",");
                println!(
                    "method={} mean_error={:.4} folds=[{folds}] tuned_beta=[{betas}]",
                    m.method, m.mean_error
                );
            }
            None => println!(
                "method={} mean_error={:.4} folds=[{folds}]",
                m.method, m.mean_error
            ),
        }
    }
    for t in &report.t_tests {
        println!(
            "t_test {} vs {}: t={:.4} p={:.4}{}",
            t.method_a,
            t.method_b,
            t.result.t,
            t.result.p,
            if t.result.degenerate { " (degenerate)" } else { "" }
        );
    }
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn cmd_tune(
    pairs_path: &Path,
    measure: Measure,
    beta_grid: Option<Vec<f64>>,
    gamma_grid: Option<Vec<f64>>,
    k_grid: Option<Vec<Option<usize>>>,
    t_grid: Option<Vec<f64>>,
    folds: usize,
    seed: u64,
    test_fraction: f64,
    drop_singletons: bool,
    gt_threshold: u64,
) -> Result<()> {
    if matches!(measure, Measure::Confusion | Measure::Random) {
        bail!("measure {measure} has no tunable weight parameter");
    }
    let (_, pairs) = load_pairs(pairs_path)?;
    let betas = beta_grid.unwrap_or_else(|| simsmooth::default_beta_grid(measure));
    let gammas = gamma_grid.unwrap_or_else(|| vec![0.0]);
    let ks = k_grid.unwrap_or_else(|| vec![None]);
    let ts = t_grid.unwrap_or_else(|| vec![f64::INFINITY]);
    let grid = build_grid(&betas, &gammas, &ks, &ts);
    println!("measure={measure} grid_points={}", grid.len());
    let results = tune_measure(
        &pairs,
        measure,
        &grid,
        folds,
        seed,
        test_fraction,
        drop_singletons,
        gt_threshold,
    )?;
    for r in &results {
        let k_str = r
            .params
            .k
            .map(|k| k.to_string())
            .unwrap_or_else(|| "inf".into());
        println!(
            "fold={} beta={} gamma={} k={k_str} t={} tuning_error={:.4} test_error={:.4}",
            r.fold, r.params.beta, r.params.gamma, r.params.t, r.tuning_error, r.error
        );
    }
    let mean: f64 = results.iter().map(|r| r.error).sum::<f64>() / results.len() as f64;
    println!("mean_test_error={mean:.4}");
    Ok(())
}

impl std::fmt::Display for EvalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalModel::Mle => write!(f, "mle"),
            EvalModel::Katz => write!(f, "katz"),
            EvalModel::Sim => write!(f, "sim"),
        }
    }
}
