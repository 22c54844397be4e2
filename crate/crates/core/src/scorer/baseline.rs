//! Cosine-similarity baselines turned into distances.

use crate::article::SparseVector;

/// `1 - max(cos, 0)`: opposed vectors count as unrelated, not as farther.
pub fn similarity_to_distance(cosine: f64) -> f64 {
    1.0 - cosine.max(0.0)
}

/// Cosine of two sparse vectors; 0 when either is all zeros.
pub fn cosine_sparse(a: &SparseVector, b: &SparseVector) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(t, x)| large.get(t).map(|y| x * y))
        .sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn cosine_dense(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "vectors must share a dimension");
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn baseline_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    similarity_to_distance(cosine_sparse(a, b)).clamp(0.0, 1.0)
}

pub fn baseline_distance_dense(a: &[f64], b: &[f64]) -> f64 {
    similarity_to_distance(cosine_dense(a, b)).clamp(0.0, 1.0)
}
