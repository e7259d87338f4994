//! Acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so every criterion reports even when it
//! passes. Exits nonzero if any criterion fails; a criterion whose input data
//! is unavailable reports SKIPPED.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use infotypes::balance::smote_resample_with;
use infotypes::balance::SmoteConfig;
use infotypes::corpus::{cohen_kappa, filter_for_training, import_labeled_csv, InfoType};
use infotypes::eval::{
    leave_one_group_out, outer_folds, run_all, run_experiment, score_predictions, stratified_kfold,
    ExperimentConfig, FittedFeatures, PreparedData, Scenario,
};
use infotypes::features::{thread_conversational, FeatureMatrix, TextualVectorizer};
use infotypes::models::BinaryObjective;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and limits.
const GRADIENT_REL_TOL: f64 = 1e-5;
const GRADIENT_EPS: f64 = 1e-5;
const GRADIENT_TIME: Duration = Duration::from_secs(10);
const METRICS_TOL: f64 = 1e-12;
const TFIDF_TOL: f64 = 1e-3;
const TFIDF_EXPECTED: (f64, f64) = (0.580, 0.815);
const KAPPA_EXAMPLE: f64 = 0.4667;
const KAPPA_TOL: f64 = 1e-4;
const KAPPA_RANDOM_MAX: f64 = 0.05;
const PLANTED_MIN_F1: f64 = 0.9;
const PLANTED_TIME: Duration = Duration::from_secs(300);
const REPRO_TOL: f64 = 0.08;
const REPRO_RCC_S1: f64 = 0.61;
const REPRO_LTC_S2: f64 = 0.42;
const REPRO_SWEEP_TIME: Duration = Duration::from_secs(3600);
const RANGE_TOL: f64 = 1e-9;

enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

// ---------------------------------------------------------------------------

/// Location of the annotated sentence CSV, if provided.
fn annotated_dataset() -> Option<PathBuf> {
    std::env::var_os("INFOTYPES_ANNOTATED_CSV")
        .map(PathBuf::from)
        .or_else(|| {
            let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/annotations.csv");
            p.exists().then_some(p)
        })
        .filter(|p| p.exists())
}

fn conditional_reproduction() -> Outcome {
    let Some(path) = annotated_dataset() else {
        return Outcome::Skipped(
            "annotated dataset not available (set INFOTYPES_ANNOTATED_CSV to its CSV)".into(),
        );
    };
    let threads = import_labeled_csv(&path).expect("dataset imports");
    let dataset =
        filter_for_training(&threads, &InfoType::default_excluded()).expect("dataset filters");
    let start = Instant::now();
    let mut f1 = BTreeMap::new();
    let mut failures = Vec::new();
    for scenario in [Scenario::StratifiedKFold, Scenario::LeaveOneIssueOut] {
        for (config, r) in run_all(&dataset, scenario, 42, None).expect("sweep runs") {
            match r {
                Ok(r) => {
                    f1.insert((scenario.number(), config.id()), r.headline_f1);
                }
                Err(e) => failures.push(format!("{config}/S{}: {e}", scenario.number())),
            }
        }
    }
    let elapsed = start.elapsed();
    let rcc = f1.get(&(1, "RCC".to_string())).copied();
    let ltc = f1.get(&(2, "LTC".to_string())).copied();
    let near = |v: Option<f64>, target: f64| v.is_some_and(|v| (v - target).abs() <= REPRO_TOL);
    verdict(
        near(rcc, REPRO_RCC_S1) && near(ltc, REPRO_LTC_S2) && elapsed < REPRO_SWEEP_TIME,
        format!(
            "S1/RCC F1 {rcc:?} (target {REPRO_RCC_S1} ± {REPRO_TOL}), S2/LTC F1 {ltc:?} (target {REPRO_LTC_S2} ± {REPRO_TOL}), sweep {:.0} s, failed configs {failures:?}",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------

/// Reference loss written directly from the objective's definition.
fn reference_loss(x: &[Vec<f64>], z: &[f64], s: &[f64], c: f64, w: &[f64], b: f64) -> f64 {
    let reg: f64 = w.iter().map(|v| v * v).sum::<f64>() / (2.0 * c);
    let data: f64 = x
        .iter()
        .zip(z)
        .zip(s)
        .map(|((xi, zi), si)| {
            let m: f64 = xi.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            si * (1.0 + (-zi * m).exp()).ln()
        })
        .sum();
    reg + data
}

fn gradient_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cs = [0.01, 0.1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    for p in 0..50 {
        let n = rng.gen_range(2..=20);
        let d = rng.gen_range(1..=10);
        let c = cs[p % cs.len()];
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if rng.gen_bool(0.3) {
                            0.0
                        } else {
                            rng.gen_range(-2.0..2.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let z: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let b = rng.gen_range(-1.0..1.0);

        let xm = FeatureMatrix::from_dense(&x);
        let obj = BinaryObjective {
            x: &xm,
            z: z.clone(),
            s: &s,
            c,
        };
        let (gw, gb) = obj.gradient(&w, b);
        let mut analytic = gw;
        analytic.push(gb);

        let mut numeric = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let eval = |delta: f64| {
                let mut w2 = w.clone();
                let mut b2 = b;
                if j < d {
                    w2[j] += delta;
                } else {
                    b2 += delta;
                }
                reference_loss(&x, &z, &s, c, &w2, b2)
            };
            numeric.push((eval(GRADIENT_EPS) - eval(-GRADIENT_EPS)) / (2.0 * GRADIENT_EPS));
        }
        // relative error of the whole gradient vector
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, f)| (a - f) * (a - f))
            .sum::<f64>()
            .sqrt();
        let na: f64 = analytic.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nf: f64 = numeric.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel = if na.max(nf) == 0.0 {
            0.0
        } else {
            diff / na.max(nf)
        };
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    verdict(
        worst < GRADIENT_REL_TOL && elapsed < GRADIENT_TIME,
        format!(
            "50 problems, max relative error {worst:.2e} (< {GRADIENT_REL_TOL:e}), {:.2} s (< {} s)",
            elapsed.as_secs_f64(),
            GRADIENT_TIME.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------

fn metrics_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let k = 13;
    let mut worst: f64 = 0.0;
    let mut identity_worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=300);
        let gold: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let pred: Vec<usize> = gold
            .iter()
            .map(|&g| {
                if rng.gen_bool(0.5) {
                    g
                } else {
                    rng.gen_range(0..k)
                }
            })
            .collect();
        let mut cm = vec![vec![0usize; k]; k];
        for (&g, &p) in gold.iter().zip(&pred) {
            cm[g][p] += 1;
        }
        let report = score_predictions(&gold, &pred).expect("scores");
        let by_label: BTreeMap<usize, _> = report.per_label.iter().map(|l| (l.label, l)).collect();
        let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
        for c in 0..k {
            let tp = cm[c][c] as f64;
            let col: usize = (0..k).map(|r| cm[r][c]).sum();
            let row: usize = cm[c].iter().sum();
            if col == 0 && row == 0 {
                assert!(
                    !by_label.contains_key(&c),
                    "label {c} reported without occurrences"
                );
                continue;
            }
            let p = if col == 0 { 0.0 } else { tp / col as f64 };
            let r = if row == 0 { 0.0 } else { tp / row as f64 };
            let f = if p + r == 0.0 {
                0.0
            } else {
                2.0 * p * r / (p + r)
            };
            let l = by_label[&c];
            assert_eq!(l.support, row);
            worst = worst
                .max((l.precision - p).abs())
                .max((l.recall - r).abs())
                .max((l.f1 - f).abs());
            wp += row as f64 * p;
            wr += row as f64 * r;
            wf += row as f64 * f;
        }
        let nf = n as f64;
        worst = worst
            .max((report.weighted.precision - wp / nf).abs())
            .max((report.weighted.recall - wr / nf).abs())
            .max((report.weighted.f1 - wf / nf).abs());
        let recomputed: f64 = report
            .per_label
            .iter()
            .map(|l| l.support as f64 * l.f1)
            .sum::<f64>()
            / report
                .per_label
                .iter()
                .map(|l| l.support as f64)
                .sum::<f64>();
        identity_worst = identity_worst.max((recomputed - report.weighted.f1).abs());
        assert_eq!(report.support, n);
    }
    verdict(
        worst <= METRICS_TOL && identity_worst <= 1e-9,
        format!("1000 pairs over 13 labels, max deviation {worst:.1e} (<= {METRICS_TOL:e}), weighted identity {identity_worst:.1e}"),
    )
}

// ---------------------------------------------------------------------------

fn tfidf_hand_check() -> Outcome {
    let docs = vec![
        vec!["cat".to_string(), "sat".to_string()],
        vec!["cat".to_string(), "ran".to_string()],
    ];
    let v = TextualVectorizer::fit(&docs, (1, 1)).expect("fits");
    let row = v.transform(&["cat".to_string(), "sat".to_string()]);
    let cat = row.get(v.vocabulary["cat"]);
    let sat = row.get(v.vocabulary["sat"]);
    // hand computation: idf(cat) = 1, idf(sat) = ln(3/2) + 1, then L2 norm
    let idf_sat = (3.0f64 / 2.0).ln() + 1.0;
    let norm = (1.0 + idf_sat * idf_sat).sqrt();
    let (hc, hs) = (1.0 / norm, idf_sat / norm);
    verdict(
        (cat - TFIDF_EXPECTED.0).abs() <= TFIDF_TOL
            && (sat - TFIDF_EXPECTED.1).abs() <= TFIDF_TOL
            && (cat - hc).abs() < 1e-12
            && (sat - hs).abs() < 1e-12,
        format!(
            "cat {cat:.4}, sat {sat:.4} (expected {:?} within {TFIDF_TOL})",
            TFIDF_EXPECTED
        ),
    )
}

// ---------------------------------------------------------------------------

fn smote_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let counts = [(0usize, 4000usize), (1, 1500), (2, 400), (3, 60), (4, 2)];
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for &(label, n) in &counts {
        for _ in 0..n {
            let r: Vec<f64> = (0..6)
                .map(|j| {
                    if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0) + label as f64 * (j as f64 - 2.0)
                    }
                })
                .collect();
            rows.push(r);
            y.push(label);
        }
    }
    let x = FeatureMatrix::from_dense(&rows);
    let cfg = SmoteConfig {
        k: 5,
        seed: 99,
        ..SmoteConfig::default()
    };
    let out = smote_resample_with(&x, &y, &cfg).expect("resamples");
    let again = smote_resample_with(&x, &y, &cfg).expect("resamples");
    let deterministic = out.x == again.x && out.y == again.y;

    let mut post: BTreeMap<usize, usize> = BTreeMap::new();
    out.y.iter().for_each(|&l| *post.entry(l).or_default() += 1);
    let equal = post.values().all(|&c| c == 4000) && post.len() == counts.len();

    let synthetic = out.x.len() - out.n_original;
    let mut between = 0;
    let mut violations = 0;
    let mut bad_neighbors = 0;
    for (s, &(base, nb, _)) in out.parents.iter().enumerate() {
        let row = out.x.rows[out.n_original + s].to_dense(x.width);
        let a = &rows[base];
        let b = &rows[nb];
        let ok = (0..x.width).all(|j| {
            let (lo, hi) = if a[j] <= b[j] {
                (a[j], b[j])
            } else {
                (b[j], a[j])
            };
            row[j] >= lo - 1e-12 && row[j] <= hi + 1e-12
        });
        if ok {
            between += 1;
        } else {
            violations += 1;
        }
        // the neighbor must be one of the base's k nearest same-label rows
        let label = y[base];
        if y[nb] != label {
            bad_neighbors += 1;
            continue;
        }
        let dist =
            |o: usize| -> f64 { rows[o].iter().zip(a).map(|(p, q)| (p - q) * (p - q)).sum() };
        let d_nb = dist(nb);
        let closer = (0..rows.len())
            .filter(|&o| o != base && y[o] == label && dist(o) < d_nb)
            .count();
        if closer >= cfg.k {
            bad_neighbors += 1;
        }
    }
    verdict(
        deterministic && equal && synthetic >= 10_000 && violations == 0 && bad_neighbors == 0,
        format!(
            "post-balance counts {post:?}, {between}/{synthetic} synthetic points between parents, {bad_neighbors} non-neighbor parents, deterministic {deterministic}"
        ),
    )
}

// ---------------------------------------------------------------------------

fn splitter_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems = Vec::new();
    for case in 0..100 {
        let n_labels = rng.gen_range(1..=13);
        let n = rng.gen_range(5..=600);
        // skewed label distribution
        let labels: Vec<usize> = (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                ((u * u) * n_labels as f64) as usize
            })
            .collect();
        let seed = rng.gen();
        let folds = stratified_kfold(&labels, 5, seed).expect("folds");
        if folds != stratified_kfold(&labels, 5, seed).expect("folds") {
            problems.push(format!("case {case}: not deterministic"));
        }
        let mut seen = vec![0; n];
        folds.iter().flatten().for_each(|&i| seen[i] += 1);
        if seen.iter().any(|&c| c != 1) {
            problems.push(format!("case {case}: not a partition"));
        }
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        for l in distinct {
            let per: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == l).count())
                .collect();
            let (mn, mx) = (per.iter().min().unwrap(), per.iter().max().unwrap());
            if mx - mn > 1 {
                problems.push(format!("case {case}: label {l} counts {per:?}"));
            }
        }

        let n_threads = rng.gen_range(2..=15).min(n);
        let groups: Vec<usize> = (0..n)
            .map(|i| {
                if i < n_threads {
                    i
                } else {
                    rng.gen_range(0..n_threads)
                }
            })
            .collect();
        let loio = leave_one_group_out(&groups).expect("loio");
        if loio != leave_one_group_out(&groups).expect("loio") {
            problems.push(format!("case {case}: LOIO not deterministic"));
        }
        if loio.len() != n_threads {
            problems.push(format!(
                "case {case}: {} LOIO folds for {n_threads} threads",
                loio.len()
            ));
        }
        for f in &loio {
            let train: BTreeSet<usize> = f.train.iter().map(|&i| groups[i]).collect();
            let test: BTreeSet<usize> = f.test.iter().map(|&i| groups[i]).collect();
            if !train.is_disjoint(&test) || test.len() != 1 || f.train.len() + f.test.len() != n {
                problems.push(format!("case {case}: LOIO fold mixes threads"));
            }
        }
    }
    verdict(
        problems.is_empty(),
        format!("100 random label vectors; problems: {problems:?}"),
    )
}

// ---------------------------------------------------------------------------

fn leakage() -> Outcome {
    let threads = common::planted_corpus(6, 60, 21);
    let dataset = filter_for_training(&threads, &InfoType::default_excluded()).expect("filters");
    let data = PreparedData::from_dataset(&dataset);
    let mut checked = 0;
    let mut leaks = Vec::new();
    for scenario in [Scenario::StratifiedKFold, Scenario::LeaveOneIssueOut] {
        for (fi, fold) in outer_folds(&data, scenario, 42)
            .expect("folds")
            .iter()
            .enumerate()
        {
            for ngram in [(1, 1), (1, 2)] {
                let fitted = FittedFeatures::fit(
                    &data,
                    &fold.train,
                    infotypes::features::FeatureSet::Both,
                    ngram,
                )
                .expect("fits");
                let mut allowed = BTreeSet::new();
                for &i in &fold.train {
                    let t = &data.tokens[i];
                    for n in ngram.0..=ngram.1 {
                        for w in t.windows(n) {
                            allowed.insert(w.join(" "));
                        }
                    }
                }
                let vocab = &fitted.vectorizer.as_ref().expect("textual").vocabulary;
                let extra: Vec<&String> = vocab.keys().filter(|g| !allowed.contains(*g)).collect();
                if !extra.is_empty() {
                    leaks.push(format!(
                        "S{} fold {fi} {ngram:?}: {:?}",
                        scenario.number(),
                        &extra[..extra.len().min(3)]
                    ));
                }
                checked += 1;
            }
        }
    }
    verdict(
        leaks.is_empty(),
        format!("{checked} fold vocabularies checked; leaks: {leaks:?}"),
    )
}

// ---------------------------------------------------------------------------

fn planted_signal() -> Outcome {
    let threads = common::planted_corpus(10, 150, 1);
    let dataset = filter_for_training(&threads, &InfoType::default_excluded()).expect("filters");
    let labels: BTreeSet<_> = dataset.labels().into_iter().collect();
    let start = Instant::now();
    let config: ExperimentConfig = "LTC".parse().expect("config");
    let report =
        run_experiment(&dataset, Scenario::StratifiedKFold, &config, 42, None).expect("runs");
    let elapsed = start.elapsed();
    verdict(
        dataset.len() == 1500
            && labels.len() == 13
            && report.headline_f1 >= PLANTED_MIN_F1
            && elapsed < PLANTED_TIME,
        format!(
            "{} sentences, {} labels, weighted F1 {:.4} (>= {PLANTED_MIN_F1}), {:.1} s (< {} s)",
            dataset.len(),
            labels.len(),
            report.headline_f1,
            elapsed.as_secs_f64(),
            PLANTED_TIME.as_secs()
        ),
    )
}

// ---------------------------------------------------------------------------

fn conversational_ranges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut problems = Vec::new();
    let mut sentences = 0;
    for n in 0..200 {
        let thread = common::random_thread(&mut rng, n + 1);
        let feats = thread_conversational(&thread);
        let first = thread.comments[0].created_at;
        let last = thread.comments.last().expect("comments").created_at;
        let temporal = thread.comments.len() > 1 && last > first;
        for (ci, comment_feats) in feats.iter().enumerate() {
            for f in comment_feats {
                sentences += 1;
                let open_unit = |v: f64| v > 0.0 && v <= 1.0;
                let closed_unit = |v: f64| (0.0..=1.0).contains(&v);
                if ![f.tlen, f.clen, f.tloc, f.cloc].into_iter().all(open_unit) {
                    problems.push(format!(
                        "thread {n} comment {ci}: size/location out of (0,1]"
                    ));
                }
                if ![f.tpos1, f.tpos2, f.ppau, f.npau]
                    .into_iter()
                    .all(closed_unit)
                {
                    problems.push(format!("thread {n} comment {ci}: temporal out of [0,1]"));
                }
                if temporal && (f.tpos1 + f.tpos2 - 1.0).abs() > RANGE_TOL {
                    problems.push(format!(
                        "thread {n} comment {ci}: TPOS1+TPOS2 = {}",
                        f.tpos1 + f.tpos2
                    ));
                }
                if !temporal && [f.tpos1, f.tpos2, f.ppau, f.npau] != [0.0; 4] {
                    problems.push(format!(
                        "thread {n}: degenerate thread has nonzero temporal features"
                    ));
                }
                if f.len == 0 {
                    problems.push(format!("thread {n}: LEN is 0"));
                }
            }
        }
    }
    problems.truncate(5);
    verdict(
        problems.is_empty(),
        format!("200 random threads, {sentences} sentences; TPOS1+TPOS2 = 1 where the thread has positive duration; problems: {problems:?}"),
    )
}

// ---------------------------------------------------------------------------

fn determinism() -> Outcome {
    let threads = common::planted_corpus(4, 60, 8);
    let dataset = filter_for_training(&threads, &InfoType::default_excluded()).expect("filters");
    let max = std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .max(2);
    let mut details = Vec::new();
    let mut all_equal = true;
    for id in ["RBS", "LBS"] {
        let config: ExperimentConfig = id.parse().expect("config");
        let serial = run_experiment(&dataset, Scenario::StratifiedKFold, &config, 42, Some(1))
            .expect("serial run")
            .to_json();
        let parallel = run_experiment(&dataset, Scenario::StratifiedKFold, &config, 42, Some(max))
            .expect("parallel run")
            .to_json();
        let equal = serial == parallel;
        all_equal &= equal;
        details.push(format!(
            "{id}: 1 vs {max} threads identical={equal} ({} bytes)",
            serial.len()
        ));
    }
    verdict(all_equal, details.join("; "))
}

// ---------------------------------------------------------------------------

fn kappa_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let seq: Vec<usize> = (0..500).map(|_| rng.gen_range(0..16)).collect();
    let self_k = cohen_kappa(&seq, &seq).expect("kappa");

    // 20 agree on A, 5 A/B, 5 B/A, 10 agree on B
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, y, n) in [('A', 'A', 20), ('A', 'B', 5), ('B', 'A', 5), ('B', 'B', 10)] {
        for _ in 0..n {
            a.push(x);
            b.push(y);
        }
    }
    let example = cohen_kappa(&a, &b).expect("kappa");
    let (po, pe) = (
        30.0 / 40.0,
        (25.0 / 40.0f64).powi(2) + (15.0 / 40.0f64).powi(2),
    );
    let hand = (po - pe) / (1.0 - pe);

    let marg = [0.4, 0.3, 0.2, 0.1];
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in marg.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        marg.len() - 1
    };
    let ra: Vec<usize> = (0..10_000).map(|_| draw(&mut rng)).collect();
    let rb: Vec<usize> = (0..10_000).map(|_| draw(&mut rng)).collect();
    let random = cohen_kappa(&ra, &rb).expect("kappa");
    verdict(
        self_k == 1.0
            && (example - KAPPA_EXAMPLE).abs() <= KAPPA_TOL
            && (example - hand).abs() < 1e-12
            && random.abs() < KAPPA_RANDOM_MAX,
        format!("self {self_k}, example {example:.4} (expected {KAPPA_EXAMPLE} ± {KAPPA_TOL}), independent n=10000 {random:.4}"),
    )
}

// ---------------------------------------------------------------------------

/// Checks that every opened tag is closed in order; void elements excepted.
fn balanced_tags(html: &str) -> bool {
    let void = ["meta", "br", "img", "hr", "link", "input"];
    let mut stack: Vec<String> = Vec::new();
    let mut rest = html;
    while let Some(start) = rest.find('<') {
        let Some(end) = rest[start..].find('>') else {
            return false;
        };
        let tag = &rest[start + 1..start + end];
        rest = &rest[start + end + 1..];
        if tag.starts_with('!') {
            continue;
        }
        let self_closing = tag.ends_with('/');
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect();
        if tag.starts_with('/') {
            if stack.pop().as_deref() != Some(name.as_str()) {
                return false;
            }
        } else if !self_closing && !void.contains(&name.as_str()) {
            stack.push(name);
        }
    }
    stack.is_empty()
}

fn report_html() -> Outcome {
    use infotypes::corpus::{AuthorAssociation, IssueComment, IssueThread, Sentence};
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let at = |s: i64| chrono::DateTime::from_timestamp(1_500_000_000 + s, 0).expect("time");
    let comments: Vec<IssueComment> = (0..134)
        .map(|i| {
            let mut c = IssueComment::new(
                format!("user{}", i % 9),
                AuthorAssociation::Other,
                at(i * 60),
                "x",
            );
            c.sentences = (0..rng.gen_range(1..6))
                .map(|_| Sentence::from_raw("Some <b>text</b> & more.", vec![]))
                .collect();
            c
        })
        .collect();
    let thread = IssueThread::new("big/thread", 1, "A long one", at(0), comments).expect("thread");
    let labels: Vec<Option<InfoType>> = (0..thread.sentence_count())
        .map(|_| InfoType::from_ordinal(rng.gen_range(0..16)))
        .collect();
    let html = infotypes_cli::render_html(&thread, &labels).expect("renders");
    let bars = html.matches("class=\"bar\"").count();
    let legend = html.matches("class=\"legend-item\"").count();
    let external = html.contains("http://") || html.contains("https://");
    let balanced = balanced_tags(&html);

    let dir = std::env::temp_dir().join(format!("infotypes-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let empty_out = dir.join("empty.html");
    let refused =
        infotypes_cli::render_report(&thread, &[], &empty_out).is_err() && !empty_out.exists();
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        bars == 134 && legend == 16 && balanced && !external && refused,
        format!("{bars} bars (134), {legend} legend entries (16), balanced tags {balanced}, external resources {external}, empty input refused {refused}"),
    )
}

// ---------------------------------------------------------------------------

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("conditional reproduction", conditional_reproduction),
        ("gradient oracle", gradient_oracle),
        ("metrics oracle", metrics_oracle),
        ("tf-idf hand check", tfidf_hand_check),
        ("smote properties", smote_properties),
        ("splitter properties", splitter_properties),
        ("vocabulary leakage", leakage),
        ("planted-signal end to end", planted_signal),
        ("conversational feature ranges", conversational_ranges),
        ("determinism serial vs parallel", determinism),
        ("kappa checks", kappa_checks),
        ("thread report html", report_html),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(d) => println!("PASS     {name}: {d} [{secs:.1}s]"),
            Outcome::Skipped(d) => println!("SKIPPED  {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL     {name}: {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
