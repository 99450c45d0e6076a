//! The statistics behind every table: correlation, Cohen's d, logistic
//! Wald tests, Benjamini-Hochberg and Fleiss' kappa.
use persona_audit::stats::{bh_fdr, cohens_d, fit_logistic, fleiss_kappa, pearson};

fn main() {
    let age = [23.0, 35.0, 41.0, 52.0, 60.0, 29.0, 47.0, 66.0];
    let freq = [0.00, 0.01, 0.02, 0.03, 0.05, 0.00, 0.02, 0.04];
    let c = pearson(&freq, &age).unwrap();
    println!("pearson r = {:.3}, p = {:.4}, n = {}", c.r, c.p, c.n);

    let female = [1, 0, 1, 1, 0, 0, 1, 0];
    let rate = [0.9, 0.2, 0.35, 0.8, 0.3, 0.4, 0.6, 0.5];
    println!("cohen's d = {:.3}", cohens_d(&rate, &female).unwrap());

    let fit = fit_logistic(&rate, &female).unwrap();
    println!(
        "logistic: slope {:.3} (se {:.3}), wald p {:.4}, {} iterations, converged {}",
        fit.slope,
        fit.slope_se,
        fit.p,
        fit.iterations,
        fit.converged()
    );

    let p = [0.001, 0.008, 0.039, 0.041, 0.042, 0.06, 0.074, 0.205, 0.212, 0.216];
    let bh = bh_fdr(&p, 0.05).unwrap();
    println!("BH at .05: {} of {} rejected", bh.rejections(), p.len());
    for ((raw, adj), rej) in p.iter().zip(&bh.adjusted).zip(&bh.reject) {
        println!("  p {raw:.3} -> {adj:.3} {}", if *rej { "*" } else { "" });
    }

    // Five posts, four raters, yes = 1 / no = 0.
    let ratings = vec![vec![1, 1, 1, 0], vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![0, 1, 0, 0], vec![1, 1, 0, 1]];
    println!("fleiss kappa = {:.3}", fleiss_kappa(&ratings).unwrap().unwrap());
}
