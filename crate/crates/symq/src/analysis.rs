//! Fidelity metrics, deviation vectors, and principal-component views of
//! histogram error.
//!
//! The deviation of an observed histogram from the ideal one is the basic
//! object here: symmetrization claims that averaging over variants drives
//! the *systematic* part of that deviation toward zero, leaving a residue
//! that looks like uniform depolarizing noise. This module provides the
//! tools to watch that happen: Hellinger fidelity for scalar quality,
//! dense deviation vectors for structure, a two-component PCA projection
//! for scatter plots, and a closed-form check of how close an error
//! histogram is to the fully uniformized shape.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sim::Histogram;

/// Largest deviation-vector dimension accepted by [`pca_project`]. Dense
/// eigen-decomposition is ample at this scale and keeps the results exact.
pub const MAX_PCA_DIM: usize = 256;

/// The statistical overlap `(sum_i sqrt(p_i q_i))^2` between two outcome
/// distributions: 1 when they coincide, 0 when their supports are
/// disjoint.
pub fn hellinger_fidelity(p: &Histogram, q: &Histogram) -> Result<f64> {
    if p.n_bits() != q.n_bits() {
        return Err(Error::Analysis(format!(
            "histograms over {} and {} bits cannot be compared",
            p.n_bits(),
            q.n_bits()
        )));
    }
    let overlap: f64 = p
        .iter()
        .map(|(outcome, fp)| (fp * q.probability(outcome)).sqrt())
        .sum();
    Ok((overlap * overlap).clamp(0.0, 1.0))
}

/// The dense entrywise difference between an observed histogram and the
/// ideal one. Both inputs are normalized, so the entries sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationVector {
    entries: Vec<f64>,
}

impl DeviationVector {
    /// Validates raw entries: finite, and summing to 0 within 1e-9.
    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Analysis("deviation vector must not be empty".into()));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Analysis("deviation entries must be finite".into()));
        }
        let total: f64 = entries.iter().sum();
        if total.abs() > 1e-9 {
            return Err(Error::Analysis(format!(
                "deviation entries sum to {total}, expected 0 within 1e-9"
            )));
        }
        Ok(DeviationVector { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

/// The deviation `observed - ideal` as a dense vector over all `2^n`
/// outcomes.
pub fn deviation(observed: &Histogram, ideal: &Histogram) -> Result<DeviationVector> {
    if observed.n_bits() != ideal.n_bits() {
        return Err(Error::Analysis(format!(
            "histograms over {} and {} bits cannot be compared",
            observed.n_bits(),
            ideal.n_bits()
        )));
    }
    let obs = observed.to_dense();
    let ide = ideal.to_dense();
    DeviationVector::from_entries(obs.iter().zip(&ide).map(|(o, i)| o - i).collect())
}

/// The entrywise mean of several deviation vectors — the error that
/// survives aggregation.
pub fn mean_deviation(vectors: &[DeviationVector]) -> Result<DeviationVector> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Analysis("mean of zero deviation vectors".into()))?;
    let mut mean = vec![0.0; first.len()];
    for v in vectors {
        if v.len() != first.len() {
            return Err(Error::Analysis(format!(
                "deviation vectors of length {} and {} cannot be averaged",
                first.len(),
                v.len()
            )));
        }
        for (m, e) in mean.iter_mut().zip(v.entries()) {
            *m += e;
        }
    }
    let n = vectors.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    DeviationVector::from_entries(mean)
}

/// Projection of a set of deviation vectors onto their top two principal
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection {
    /// Per-input (component 1, component 2) coordinates, in input order.
    pub projections: Vec<(f64, f64)>,
    /// Fraction of total variance captured by each component;
    /// non-increasing, each in [0, 1].
    pub explained: (f64, f64),
    /// The two principal directions, sign-fixed so each one's first
    /// coordinate of magnitude above 1e-12 is positive.
    pub components: (Vec<f64>, Vec<f64>),
    /// The mean vector subtracted before projecting.
    pub mean: Vec<f64>,
}

/// Mean-centers the vectors, eigen-decomposes their sample covariance,
/// and projects every vector onto the two leading eigenvectors.
///
/// The eigenvector signs are pinned (first coordinate of magnitude above
/// 1e-12 made positive) so results are deterministic. Requires at least
/// two vectors of equal dimension, at most [`MAX_PCA_DIM`].
pub fn pca_project(vectors: &[DeviationVector]) -> Result<PcaProjection> {
    if vectors.len() < 2 {
        return Err(Error::Analysis(format!(
            "principal components need at least 2 vectors, got {}",
            vectors.len()
        )));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Analysis("deviation vectors differ in length".into()));
    }
    if dim > MAX_PCA_DIM {
        return Err(Error::InstanceTooLarge(format!(
            "dimension {dim} exceeds the dense eigen-decomposition cap {MAX_PCA_DIM}"
        )));
    }

    let n = vectors.len();
    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, e) in mean.iter_mut().zip(v.entries()) {
            *m += e;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.entries().iter().zip(&mean).map(|(e, m)| e - m).collect())
        .collect();

    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for row in &centered {
        for (i, &xi) in row.iter().enumerate() {
            for (j, &xj) in row.iter().enumerate() {
                cov[(i, j)] += xi * xj;
            }
        }
    }
    cov /= (n - 1) as f64;

    let eigen = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("covariance eigenvalues are finite")
    });

    let component = |rank: usize| -> Vec<f64> {
        let col = eigen.eigenvectors.column(order[rank]);
        let mut v: Vec<f64> = col.iter().copied().collect();
        if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        v
    };
    let (c1, c2) = (component(0), component(1));

    let total: f64 = eigen.eigenvalues.iter().map(|l| l.max(0.0)).sum();
    let fraction = |rank: usize| {
        if total > 0.0 {
            (eigen.eigenvalues[order[rank]].max(0.0) / total).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    let explained = (fraction(0), fraction(1));

    let dot = |row: &[f64], c: &[f64]| row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    let projections = centered.iter().map(|row| (dot(row, &c1), dot(row, &c2))).collect();

    Ok(PcaProjection { projections, explained, components: (c1, c2), mean })
}

/// Result of comparing an error histogram against the fully uniformized
/// shape: target outcome at `1 - epsilon`, every other outcome at
/// `epsilon / (2^n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformizedErrorReport {
    /// Total off-target mass of the input.
    pub epsilon: f64,
    /// The input averaged over all relabelings of non-target outcomes.
    pub symmetrized: Histogram,
    /// Largest entrywise gap between the input and the uniformized shape.
    pub max_shape_deviation: f64,
}

/// Averages `h_err` over every relabeling of the non-target outcomes —
/// in closed form, the off-target mass is simply equidistributed — and
/// reports the resulting error weight and how far the input was from
/// that shape to begin with.
pub fn uniformized_error_check(h_err: &Histogram, target: u64) -> UniformizedErrorReport {
    let n = h_err.n_bits();
    let dim = 1u128 << n;
    assert!((target as u128) < dim, "target outcome {target} out of range for {n} bits");

    let on_target = h_err.probability(target);
    let epsilon = (1.0 - on_target).max(0.0);
    if dim == 1 {
        return UniformizedErrorReport {
            epsilon: 0.0,
            symmetrized: h_err.clone(),
            max_shape_deviation: 0.0,
        };
    }

    let off_value = epsilon / (dim - 1) as f64;
    let symmetrized = Histogram::from_entries(
        n,
        (0..dim as u64).map(|o| (o, if o == target { on_target } else { off_value })),
    )
    .expect("uniformized shape is normalized by construction");

    // Max gap over the sparse support, plus the gap of any absent
    // off-target outcome (which sits at probability zero).
    let mut max_dev: f64 = 0.0;
    let mut off_support = 0u128;
    for (outcome, p) in h_err.iter() {
        if outcome != target {
            max_dev = max_dev.max((p - off_value).abs());
            off_support += 1;
        }
    }
    if off_support < dim - 1 {
        max_dev = max_dev.max(off_value);
    }

    UniformizedErrorReport { epsilon, symmetrized, max_shape_deviation: max_dev }
}
