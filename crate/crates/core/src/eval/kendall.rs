//! Kendall rank correlation in O(n log n).
//!
//! Pairs are classified from a sort by `(x, y)` followed by a merge sort on
//! `y` that counts exchanges: every exchange is one discordant pair, and the
//! tie runs before and after the merge sort give the tied pair counts.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauVariant {
    TauA,
    #[default]
    TauB,
}

impl fmt::Display for TauVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TauVariant::TauA => "tau_a",
            TauVariant::TauB => "tau_b",
        })
    }
}

impl FromStr for TauVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau_a" | "a" => Ok(TauVariant::TauA),
            "tau_b" | "b" => Ok(TauVariant::TauB),
            other => Err(Error::Config(format!("unknown tau variant `{other}`"))),
        }
    }
}

/// Classification of all `n(n−1)/2` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Tied in `x` only.
    pub ties_x: u64,
    /// Tied in `y` only.
    pub ties_y: u64,
    /// Tied in both.
    pub ties_xy: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.concordant + self.discordant + self.ties_x + self.ties_y + self.ties_xy
    }

    pub fn tau(&self, variant: TauVariant) -> Result<f64> {
        let s = self.concordant as f64 - self.discordant as f64;
        let untied = self.concordant + self.discordant;
        let (cx, cy) = (untied + self.ties_y, untied + self.ties_x);
        if cx == 0 || cy == 0 {
            return Err(Error::UndefinedCorrelation(
                "one of the rankings is constant".into(),
            ));
        }
        Ok(match variant {
            TauVariant::TauA => s / self.total() as f64,
            TauVariant::TauB => s / ((cx as f64) * (cy as f64)).sqrt(),
        })
    }
}

fn tie_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

fn check_inputs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 2 observations, got {}",
            x.len()
        )));
    }
    if let Some(&value) = x.iter().chain(y).find(|v| v.is_nan()) {
        return Err(Error::InvalidValue {
            word: "<observation>".into(),
            value,
        });
    }
    Ok(())
}

/// Pair classification via sorting.
pub fn pair_counts(x: &[f64], y: &[f64]) -> Result<PairCounts> {
    check_inputs(x, y)?;
    // -0.0 and 0.0 must tie
    let x: Vec<f64> = x.iter().map(|v| v + 0.0).collect();
    let y: Vec<f64> = y.iter().map(|v| v + 0.0).collect();
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| x[i].total_cmp(&x[j]).then(y[i].total_cmp(&y[j])));

    let eq = |a: f64, b: f64| a.total_cmp(&b) == Ordering::Equal;
    let mut tied_x = 0u64;
    let mut tied_both = 0u64;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if eq(x[a], x[b]) {
            run_x += 1;
            if eq(y[a], y[b]) {
                run_xy += 1;
            } else {
                tied_both += tie_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += tie_pairs(run_x);
            tied_both += tie_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += tie_pairs(run_x);
    tied_both += tie_pairs(run_xy);

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if eq(w[0], w[1]) {
            run_y += 1;
        } else {
            tied_y += tie_pairs(run_y);
            run_y = 1;
        }
    }
    tied_y += tie_pairs(run_y);

    let total = tie_pairs(n as u64);
    let concordant = total - tied_x - tied_y + tied_both - discordant;
    Ok(PairCounts {
        concordant,
        discordant,
        ties_x: tied_x - tied_both,
        ties_y: tied_y - tied_both,
        ties_xy: tied_both,
    })
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (lo, hi) = v.split_at_mut(mid);
        let (blo, bhi) = buf.split_at_mut(mid);
        merge_count(lo, blo) + merge_count(hi, bhi)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j].total_cmp(&v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's τ between `x` and `y`.
pub fn kendall_tau(x: &[f64], y: &[f64], variant: TauVariant) -> Result<f64> {
    pair_counts(x, y)?.tau(variant)
}
