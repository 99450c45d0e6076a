//! Effect sizes, significance tests, multiple-comparison control and
//! agreement statistics.

mod correlation;
mod effect;
mod fdr;
mod kappa;
mod logistic;
mod meta;

pub use correlation::{cohens_d, pearson, Correlation};
pub use effect::{
    effect_with_significance, EffectOutcome, EffectResult, EffectTable, FeatureEffect, SkipReason,
    TableMeta,
};
pub use fdr::{bh_fdr, BhResult};
pub use kappa::{average_pairwise_kappa, fleiss_kappa, PairwiseKappa};
pub use logistic::{fit_logistic, logistic_wald_p, LogisticFit, WaldTest};
pub use meta::{correlate_effect_vectors, Alignment, MetaCorrelation, MetaOptions};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {required} observations, got {n}")]
    TooFewObservations { n: usize, required: usize },
    #[error("correlation undefined: input is constant")]
    ConstantInput,
    #[error("both groups must be non-empty")]
    SingleGroup,
    #[error("pooled variance is zero")]
    ZeroPooledVariance,
    #[error("label {0} is not binary")]
    NonBinaryLabel(f64),
    #[error("p-value {0} outside [0, 1]")]
    InvalidPValue(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("only {aligned} aligned features, need {required}")]
    InsufficientOverlap { aligned: usize, required: usize },
    #[error("ratings matrix rows have unequal lengths")]
    RaggedRatings,
    #[error("need at least 2 raters and 1 item")]
    TooFewRaters,
    #[error("no defined kappa among {pairs} rater pairs")]
    NoDefinedPairs { pairs: usize },
}

pub type Result<T, E = StatsError> = std::result::Result<T, E>;

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub(crate) fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
