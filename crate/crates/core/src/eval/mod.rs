//! Lexicon evaluation, baselines and parameter sweeps.

mod baselines;
mod kendall;
mod significance;
mod sweep;

pub use baselines::{pca, pca_subspace, random_subspace, Pca};
pub use kendall::{kendall_tau, pair_counts, PairCounts, TauVariant};
pub use significance::{fisher_z_compare, ZTest, DEFAULT_SIGNIFICANCE_LEVEL};
pub use sweep::{curve_tsv, gold_from_table, run_pipeline, run_projection, run_ultradense, sweep_resource_size, sweep_subspace_size, Experiment, Method, PipelineOutput};

use std::fmt;

use crate::error::{Error, Result};
use crate::lexicon::Property;
use crate::projection::{format_g6, OutputLexicon};

/// Correlation between a lexicon and gold values on a set of test words.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub property: Property,
    /// Number of test words.
    pub n: usize,
    pub tau: f64,
    /// Fraction of test words the lexicon scores.
    pub coverage: f64,
    pub variant: TauVariant,
    pub method: String,
}

impl EvalReport {
    /// `property<TAB>n<TAB>tau<TAB>coverage<TAB>method`.
    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.property,
            self.n,
            format_g6(self.tau),
            format_g6(self.coverage),
            self.method
        )
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv_row())
    }
}

/// Kendall's τ between gold values and lexicon scores, unknown words
/// scored as neutral (0.0).
pub fn evaluate(lex: &OutputLexicon, gold: &[(String, f64)], variant: TauVariant) -> Result<EvalReport> {
    if gold.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 test words, got {}",
            gold.len()
        )));
    }
    let predicted: Vec<f64> = gold.iter().map(|(w, _)| lex.score_word(w)).collect();
    let truth: Vec<f64> = gold.iter().map(|(_, g)| *g).collect();
    let found = gold.iter().filter(|(w, _)| lex.get(w).is_some()).count();
    let tau = kendall_tau(&predicted, &truth, variant)?;
    Ok(EvalReport {
        property: lex.property.clone(),
        n: gold.len(),
        tau,
        coverage: found as f64 / gold.len() as f64,
        variant,
        method: "lexicon".into(),
    })
}
