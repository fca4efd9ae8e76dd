//! Small statistics helpers used by the experiments. All moments are
//! population moments; degenerate inputs (constant series) yield zero
//! correlations rather than NaN so aggregation never poisons a report.

use std::collections::HashMap;
use std::hash::Hash;

use arena_core::{Error, Result};

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Pearson correlation; 0 when either series has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Contract(format!(
            "pearson needs two equal-length series of at least 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, mb) = (mean(a), mean(b));
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Kendall tau-a between two orderings of the same id set:
/// (concordant - discordant) / (n(n-1)/2) over all id pairs.
pub fn kendall_tau<T: Eq + Hash + Ord>(a: &[T], b: &[T]) -> Result<f64> {
    let n = a.len();
    if n < 2 || b.len() != n {
        return Err(Error::Contract(format!(
            "kendall tau needs two orderings of equal length at least 2, got {} and {}",
            n,
            b.len()
        )));
    }
    let position_in_b: HashMap<&T, usize> = b.iter().enumerate().map(|(i, id)| (id, i)).collect();
    if position_in_b.len() != n {
        return Err(Error::Contract(
            "kendall tau orderings must not repeat ids".to_string(),
        ));
    }
    let mut b_positions = Vec::with_capacity(n);
    for id in a {
        match position_in_b.get(id) {
            Some(&pos) => b_positions.push(pos),
            None => {
                return Err(Error::Contract(
                    "kendall tau orderings must cover the same id set".to_string(),
                ))
            }
        }
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            if b_positions[i] < b_positions[j] {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    Ok((concordant - discordant) as f64 / (n * (n - 1) / 2) as f64)
}
