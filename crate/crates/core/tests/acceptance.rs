//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line; A7 never fails the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal as NormalDist};
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use persona_audit::analysis::{bgt1, corpus_effects, FeatureSource};
use persona_audit::config::RunConfig;
use persona_audit::features::NgramConfig;
use persona_audit::persona::{sample_population, HumanFactor, PersonaMode, PersonaSet, PopulationSpec, DEFAULT_PREAMBLE};
use persona_audit::pipeline;
use persona_audit::probe::{run_generation, BeliefQuestion, Corpus, Prober, ResponseCache, RetryPolicy, SyntheticModel};
use persona_audit::report::ReplicationReport;
use persona_audit::stats::{bh_fdr, cohens_d, correlate_effect_vectors, fit_logistic, fleiss_kappa, pearson, MetaOptions};
use persona_audit::task::Domain;

const TOL: f64 = 1e-9;
const TOL_SLOPE: f64 = 1e-6;
const TOL_WALD: f64 = 1e-4;
const SEEDS: u64 = 20;
const NEEDED: usize = 19;

struct Outcome {
    pass: bool,
    detail: String,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

// ---------------------------------------------------------------- A1

fn oracle_pearson(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    let r = sxy / (sxx * syy).sqrt();
    let df = n - 2.0;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()));
    (r, p)
}

fn oracle_d(v: &[f64], g: &[u32]) -> f64 {
    let mut sum = [0.0; 2];
    let mut cnt = [0.0; 2];
    for (x, &k) in v.iter().zip(g) {
        sum[k as usize] += x;
        cnt[k as usize] += 1.0;
    }
    let m = [sum[0] / cnt[0], sum[1] / cnt[1]];
    let ss: f64 = v.iter().zip(g).map(|(x, &k)| (x - m[k as usize]).powi(2)).sum();
    (m[1] - m[0]) / (ss / (cnt[0] + cnt[1] - 2.0)).sqrt()
}

/// Largest k with at least k p-values at or below k*alpha/m, by trying every k.
fn brute_bh(p: &[f64], alpha: f64) -> Vec<bool> {
    let m = p.len();
    let mut best = 0;
    for k in 1..=m {
        let bound = k as f64 * alpha / m as f64;
        if p.iter().filter(|&&x| x <= bound).count() >= k {
            best = k;
        }
    }
    let bound = best as f64 * alpha / m as f64;
    p.iter().map(|&x| best > 0 && x <= bound).collect()
}

/// Adjusted p by the definition min over j >= rank of p(j) m / j.
fn brute_bh_adjusted(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut sorted = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    p.iter()
        .map(|&x| {
            let rank = sorted.iter().filter(|&&y| y < x).count() + 1;
            (rank..=m).map(|j| sorted[j - 1] * m as f64 / j as f64).fold(f64::INFINITY, f64::min).min(1.0)
        })
        .collect()
}

/// Fleiss kappa from ordered-pair agreement counts.
fn oracle_fleiss(ratings: &[Vec<u32>]) -> Option<f64> {
    let n = ratings[0].len();
    let items = ratings.len();
    let mut observed = 0.0;
    for row in ratings {
        let mut agree = 0usize;
        for a in 0..n {
            for b in 0..n {
                if a != b && row[a] == row[b] {
                    agree += 1;
                }
            }
        }
        observed += agree as f64 / (n * (n - 1)) as f64;
    }
    observed /= items as f64;
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for v in ratings.iter().flatten() {
        *counts.entry(*v).or_default() += 1;
    }
    let total = (items * n) as f64;
    let expected: f64 = counts.values().map(|&c| (c as f64 / total).powi(2)).sum();
    if counts.len() < 2 {
        return None;
    }
    Some((observed - expected) / (1.0 - expected))
}

fn sig(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f decreasing, f(lo) > 0 > f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Logistic MLE by nested bisection on the score equations: the intercept
/// solves its own score for each slope, and the profile score for the
/// slope is monotone.
fn oracle_logistic(x: &[f64], y: &[u32]) -> (f64, f64, f64) {
    let intercept_for = |b1: f64| bisect(-60.0, 60.0, |b0| x.iter().zip(y).map(|(&xi, &yi)| yi as f64 - sig(b0 + b1 * xi)).sum());
    let b1 = bisect(-30.0, 30.0, |b1| {
        let b0 = intercept_for(b1);
        x.iter().zip(y).map(|(&xi, &yi)| xi * (yi as f64 - sig(b0 + b1 * xi))).sum()
    });
    let b0 = intercept_for(b1);
    let (mut i00, mut i01, mut i11) = (0.0, 0.0, 0.0);
    for &xi in x {
        let p = sig(b0 + b1 * xi);
        let w = p * (1.0 - p);
        i00 += w;
        i01 += w * xi;
        i11 += w * xi * xi;
    }
    let se = (i00 / (i00 * i11 - i01 * i01)).sqrt();
    let p = 2.0 * (1.0 - Normal::new(0.0, 1.0).unwrap().cdf((b1 / se).abs()));
    (b0, b1, p)
}

#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    worst: [f64; 6],
}

impl Tally {
    fn note(&mut self, msg: String) {
        if self.failures.len() < 5 {
            self.failures.push(msg);
        }
    }

    fn check(&mut self, what: &str, i: usize, got: f64, want: f64, tol: f64, slot: usize) {
        let err = (got - want).abs() / want.abs().max(1.0);
        self.worst[slot] = self.worst[slot].max(err);
        if !close(got, want, tol) {
            self.note(format!("{what}#{i}: {got} vs {want}"));
        }
    }
}

fn a1() -> Outcome {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let std = NormalDist::new(0.0, 1.0).unwrap();
    let mut t = Tally::default();

    for i in 0..N {
        let n = rng.random_range(3..60);
        let x: Vec<f64> = (0..n).map(|_| std.sample(&mut rng) * 3.0 + 1.0).collect();
        let slope = rng.random_range(-1.0..1.0);
        let y: Vec<f64> = x.iter().map(|v| slope * v + std.sample(&mut rng)).collect();
        let c = pearson(&x, &y).unwrap();
        let (r, p) = oracle_pearson(&x, &y);
        t.check("pearson.r", i, c.r, r, TOL, 0);
        t.check("pearson.p", i, c.p, p, TOL, 0);
    }

    for i in 0..N {
        let n = rng.random_range(4..60);
        let mut g: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
        g[0] = 0;
        g[1] = 1;
        let shift = rng.random_range(-2.0..2.0);
        let v: Vec<f64> = g.iter().map(|&k| std.sample(&mut rng) + shift * k as f64).collect();
        t.check("cohens_d", i, cohens_d(&v, &g).unwrap(), oracle_d(&v, &g), TOL, 1);
    }

    for i in 0..N {
        let m = rng.random_range(1..40);
        let p: Vec<f64> = (0..m)
            .map(|_| if rng.random_bool(0.3) { rng.random_range(0.0..0.01) } else { (rng.random_range(0.0..1.0f64) * 20.0).round() / 20.0 })
            .collect();
        let alpha = [0.01, 0.05, 0.1, 0.25][i % 4];
        let bh = bh_fdr(&p, alpha).unwrap();
        if bh.reject != brute_bh(&p, alpha) {
            t.note(format!("bh mask #{i}"));
        }
        for (got, want) in bh.adjusted.iter().zip(brute_bh_adjusted(&p)) {
            t.check("bh.adjusted", i, *got, want, TOL, 2);
        }
    }

    for i in 0..N {
        let items = rng.random_range(1..12);
        let raters = rng.random_range(2..9);
        let cats = rng.random_range(1..5);
        let ratings: Vec<Vec<u32>> = (0..items).map(|_| (0..raters).map(|_| rng.random_range(0..cats)).collect()).collect();
        match (fleiss_kappa(&ratings).unwrap(), oracle_fleiss(&ratings)) {
            (Some(k), Some(o)) => t.check("fleiss", i, k, o, TOL, 3),
            (None, None) => {}
            (k, o) => t.note(format!("fleiss#{i}: {k:?} vs {o:?}")),
        }
    }

    let mut fitted = 0;
    while fitted < N {
        let n = rng.random_range(20..80);
        let b = rng.random_range(-1.5..1.5);
        let a = rng.random_range(-1.0..1.0);
        let x: Vec<f64> = (0..n).map(|_| std.sample(&mut rng)).collect();
        let y: Vec<u32> = x.iter().map(|&v| rng.random_bool(sig(a + b * v)) as u32).collect();
        let max0 = x.iter().zip(&y).filter(|(_, &k)| k == 0).map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
        let min0 = x.iter().zip(&y).filter(|(_, &k)| k == 0).map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
        let max1 = x.iter().zip(&y).filter(|(_, &k)| k == 1).map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
        let min1 = x.iter().zip(&y).filter(|(_, &k)| k == 1).map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
        // Overlapping classes, so the MLE exists.
        if !(max0 > min1 && max1 > min0) {
            continue;
        }
        let fit = fit_logistic(&x, &y).unwrap();
        let (_, slope, p) = oracle_logistic(&x, &y);
        t.check("logistic.slope", fitted, fit.slope, slope, TOL_SLOPE, 4);
        t.check("logistic.wald_p", fitted, fit.p, p, TOL_WALD, 5);
        fitted += 1;
    }

    let w = t.worst;
    Outcome {
        pass: t.failures.is_empty(),
        detail: format!(
            "{N} instances each; worst rel err pearson {:.1e}, d {:.1e}, bh {:.1e}, fleiss {:.1e}, slope {:.1e}, wald p {:.1e}{}",
            w[0],
            w[1],
            w[2],
            w[3],
            w[4],
            w[5],
            if t.failures.is_empty() { String::new() } else { format!("; {}", t.failures.join("; ")) }
        ),
    }
}

// ---------------------------------------------------------------- A2

fn a2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut mismatches = 0;
    let mut rejections = 0;
    for trial in 0..500 {
        let m = rng.random_range(1..=1000);
        let signal = rng.random_range(0.0..0.5);
        let p: Vec<f64> = (0..m)
            .map(|_| {
                let v: f64 = if rng.random_bool(signal) { rng.random_range(0.0..1.0f64).powi(6) } else { rng.random_range(0.0..1.0) };
                // Every fourth trial uses coarse p-values to force ties.
                if trial % 4 == 0 {
                    (v * 200.0).round() / 200.0
                } else {
                    v
                }
            })
            .collect();
        let alpha = [0.01, 0.05, 0.1, 0.2][trial % 4];
        let got = bh_fdr(&p, alpha).unwrap().reject;
        let want = brute_bh(&p, alpha);
        rejections += want.iter().filter(|&&r| r).count();
        if got != want {
            mismatches += 1;
        }
    }
    Outcome { pass: mismatches == 0, detail: format!("500 trials, {mismatches} mismatched masks, {rejections} total rejections") }
}

// ---------------------------------------------------------------- A3

fn prober(model: SyntheticModel, seed: u64) -> Prober {
    Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 8, seed).unwrap()
}

fn corpus(model: SyntheticModel, personas: &PersonaSet, domain: Domain, shown: HumanFactor, seed: u64) -> Corpus {
    let p = prober(model, seed);
    run_generation(&p, personas, &BeliefQuestion::bundled_for(domain), PersonaMode::Explicit, &[shown], DEFAULT_PREAMBLE).unwrap()
}

fn population(seed: u64) -> PersonaSet {
    sample_population(&PopulationSpec { seed, ..Default::default() }, seed).unwrap()
}

fn a3() -> Outcome {
    const TOKEN: &str = "caregivers";
    let source = FeatureSource::default();
    let mut recovered = 0;
    let mut null_clean = 0;
    let mut notes = Vec::new();
    for seed in 0..SEEDS {
        let personas = population(seed);
        let signal = SyntheticModel::default().with_seed(seed).with_bias(TOKEN, HumanFactor::Gender, 0.2, 0.6);
        let c = corpus(signal, &personas, Domain::Parenting, HumanFactor::Gender, seed);
        let r = bgt1(&c, &personas, HumanFactor::Gender, &source, 0.05).unwrap();
        match r.full.get(TOKEN) {
            Some(e) if e.significant && e.effect > 0.0 => recovered += 1,
            other => notes.push(format!("seed {seed}: {TOKEN} {:?}", other.map(|e| (e.effect, e.adjusted_p)))),
        }

        let null = SyntheticModel::default().with_seed(seed).with_bias(TOKEN, HumanFactor::Gender, 0.4, 0.4);
        let c = corpus(null, &personas, Domain::Parenting, HumanFactor::Gender, seed);
        let r = bgt1(&c, &personas, HumanFactor::Gender, &source, 0.05).unwrap();
        if r.significant.is_empty() {
            null_clean += 1;
        } else {
            notes.push(format!("seed {seed}: null gave {} significant ({})", r.significant.len(), r.significant[0].feature));
        }
    }
    Outcome {
        pass: recovered >= NEEDED && null_clean >= NEEDED,
        detail: format!(
            "signal recovered {recovered}/{SEEDS}, null clean {null_clean}/{SEEDS} (need {NEEDED}){}",
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) }
        ),
    }
}

// ---------------------------------------------------------------- A4

const LEXICON_SIZE: usize = 40;

fn lexicon(prefix: &str) -> Vec<String> {
    (0..LEXICON_SIZE).map(|i| format!("{prefix}{}{}", (b'a' + (i / 26) as u8) as char, (b'a' + (i % 26) as u8) as char)).collect()
}

/// Half the terms rise with the factor, half fall, so that the expected
/// number of inserted tokens (and with it document length) is the same in
/// both groups.
fn drive(mut model: SyntheticModel, terms: &[String], factor: HumanFactor) -> SyntheticModel {
    for (i, t) in terms.iter().enumerate() {
        let (neg, pos) = if i % 2 == 0 { (0.1, 0.6) } else { (0.6, 0.1) };
        model = model.with_bias(t, factor, neg, pos);
    }
    model
}

fn meta_r(model: &SyntheticModel, personas: &PersonaSet, seed: u64, source: &FeatureSource) -> f64 {
    let a = corpus(model.clone(), personas, Domain::Policing, HumanFactor::Gender, seed);
    let b = corpus(model.clone(), personas, Domain::Policing, HumanFactor::Race, seed);
    let ta = corpus_effects(&a, personas, HumanFactor::Gender, source, 0.05).unwrap();
    let tb = corpus_effects(&b, personas, HumanFactor::Race, source, 0.05).unwrap();
    correlate_effect_vectors(&ta, &tb, &MetaOptions::default()).unwrap().r
}

fn a4() -> Outcome {
    let unigrams = FeatureSource::Ngrams(NgramConfig { orders: vec![1], ..NgramConfig::default() });
    let shared_terms = lexicon("shared");
    let (la, lb) = (lexicon("alpha"), lexicon("beta"));
    let mut shared_ok = 0;
    let mut indep_ok = 0;
    let mut shared_rs = Vec::new();
    let mut indep_rs = Vec::new();
    let mut trigram_r = f64::NAN;
    for seed in 0..SEEDS {
        let personas = population(seed);
        let base = SyntheticModel::default().with_seed(seed);
        let shared = drive(drive(base.clone(), &shared_terms, HumanFactor::Gender), &shared_terms, HumanFactor::Race);
        let r = meta_r(&shared, &personas, seed, &unigrams);
        shared_ok += usize::from(r > 0.8);
        shared_rs.push(r);
        if seed == 0 {
            trigram_r = meta_r(&shared, &personas, seed, &FeatureSource::default());
        }

        let independent = drive(drive(base, &la, HumanFactor::Gender), &lb, HumanFactor::Race);
        let r = meta_r(&independent, &personas, seed, &unigrams);
        indep_ok += usize::from(r.abs() < 0.15);
        indep_rs.push(r);
    }
    let range = |v: &[f64]| (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (smin, smax) = range(&shared_rs);
    let (imin, imax) = range(&indep_rs);
    Outcome {
        pass: shared_ok >= NEEDED && indep_ok >= NEEDED,
        detail: format!(
            "shared r>0.8 in {shared_ok}/{SEEDS} (r {smin:.2}..{smax:.2}); independent |r|<0.15 in {indep_ok}/{SEEDS} (r {imin:.2}..{imax:.2}); unigram features [info: 1-3 grams seed 0 shared r={trigram_r:.2}]"
        ),
    }
}

// ---------------------------------------------------------------- A5

fn a5() -> Outcome {
    let spec = PopulationSpec::default();
    let set = sample_population(&spec, spec.seed).unwrap();
    let expected = [
        (HumanFactor::Gender, 346, 295),
        (HumanFactor::Race, 83, 558),
        (HumanFactor::PoliticalIdeology, 186, 455),
        (HumanFactor::SubstanceUse, 240, 401),
    ];
    let mut pass = set.len() == 641;
    let mut parts = Vec::new();
    for (f, pos, neg) in expected {
        let (p, n) = (set.count(f, 1), set.count(f, 0));
        pass &= p == pos && n == neg;
        parts.push(format!("{} {p}/{n}", f.as_str()));
    }
    let ages: Vec<f64> = set.iter().map(|p| p.value(HumanFactor::Age).unwrap() as f64).collect();
    let mean = ages.iter().sum::<f64>() / ages.len() as f64;
    pass &= (mean - 39.3).abs() <= 1.2;
    Outcome { pass, detail: format!("n={}, {}, age mean {mean:.2}", set.len(), parts.join(", ")) }
}

// ---------------------------------------------------------------- A6

fn snapshot(dirs: &[&Path]) -> BTreeMap<PathBuf, String> {
    let mut out = BTreeMap::new();
    let mut stack: Vec<PathBuf> = dirs.iter().map(|d| d.to_path_buf()).collect();
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.clone(), hex::encode(Sha256::digest(fs::read(&path).unwrap())));
            }
        }
    }
    out
}

fn demo_config(root: &Path) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/synthetic.json");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.paths.cache_dir = root.join("cache");
    cfg.paths.results_dir = root.join("results");
    cfg.paths.report_dir = root.join("report");
    cfg.population.size = 200;
    cfg.tasks.domains = vec![Domain::Parenting, Domain::Immigration];
    cfg
}

fn a6(root: &Path) -> Outcome {
    let cfg = demo_config(root);
    let round = || {
        let _ = fs::remove_dir_all(&cfg.paths.results_dir);
        let _ = fs::remove_dir_all(&cfg.paths.report_dir);
        let summary = pipeline::run(&cfg).unwrap();
        pipeline::analyze(&cfg).unwrap();
        pipeline::report(&cfg).unwrap();
        (summary, snapshot(&[&cfg.paths.results_dir, &cfg.paths.report_dir]))
    };
    let (first_run, first) = round();
    let (second_run, second) = round();
    let svgs = first.keys().filter(|p| p.extension().is_some_and(|e| e == "svg")).count();
    let differing: Vec<_> = first.iter().filter(|(k, v)| second.get(*k) != Some(v)).map(|(k, _)| k.display().to_string()).collect();
    let pass = first.len() == second.len() && differing.is_empty() && svgs > 0 && second_run.backend_calls == 0;
    Outcome {
        pass,
        detail: format!(
            "{} files ({svgs} svg) byte-identical: {}; second run {} backend calls (first {}){}",
            first.len(),
            differing.is_empty(),
            second_run.backend_calls,
            first_run.backend_calls,
            if differing.is_empty() { String::new() } else { format!("; differ: {}", differing.join(", ")) }
        ),
    }
}

// ---------------------------------------------------------------- A7

fn a7(root: &Path) -> Outcome {
    let live = std::env::var_os("PERSONA_AUDIT_LIVE_CONFIG").map(PathBuf::from);
    let (report, source) = match live {
        Some(path) => {
            let cfg = match RunConfig::load(&path) {
                Ok(c) => c,
                Err(e) => return Outcome { pass: false, detail: format!("live config: {e}") },
            };
            match pipeline::replicate(&cfg) {
                Ok(r) => (r, "live backend"),
                Err(e) => return Outcome { pass: false, detail: format!("live replication failed: {e}") },
            }
        }
        None => {
            // Offline: compare the synthetic results of A6 (credentials absent).
            let cfg = demo_config(root);
            let results = match pipeline::load_results(&cfg) {
                Ok(r) => r,
                Err(e) => return Outcome { pass: false, detail: format!("no synthetic results: {e}") },
            };
            (ReplicationReport::build(&results).unwrap(), "synthetic backend, no live credentials")
        }
    };
    let pick = |grid: &str, row: &str, column: &str| {
        report.rows.iter().find(|r| r.grid == grid && r.row == row && r.column == column).map_or("absent".to_string(), |r| {
            format!("published {} live {} diff {}", r.published, r.live, r.difference.map_or("-".into(), |d| format!("{d:+.2}")))
        })
    };
    Outcome {
        pass: report.compared() > 0,
        detail: format!(
            "{source}: {} published cells, {} compared; ideology x offensive: {}; ideology importance average: {}",
            report.rows.len(),
            report.compared(),
            pick("annotation", "Political Ideology", "Explicit Offensive"),
            pick("importance", "Average", "Political Ideology"),
        ),
    }
}

// ----------------------------------------------------------------

fn timed(name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail.push_str(&format!("; exceeded {limit:?}"));
        }
    }
    println!("{name} {} {} [{:.2}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail, elapsed.as_secs_f64());
    o
}

fn main() {
    // `cargo test` passes harness flags such as --list; honour the listing
    // request so tooling sees no libtest tests here.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    let gating = [
        timed("A1", min(1), a1),
        timed("A2", Some(Duration::from_secs(10)), a2),
        timed("A3", min(5), a3),
        timed("A4", min(5), a4),
        timed("A5", Some(Duration::from_secs(1)), a5),
        timed("A6", None, || a6(tmp.path())),
    ];
    let a7 = timed("A7", None, || a7(tmp.path()));
    if !a7.pass {
        println!("A7 is non-gating");
    }
    let failed = gating.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} of {} gating criteria passed", gating.len() - failed, gating.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
