//! Number and orientation of compliant axes, chosen by an information
//! criterion over uncentered PCA of the per-demonstration mean directions.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::{Channel, MotionStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceResult {
    pub n_axes: usize,
    pub axes: Vec<Vector3<f64>>,
    /// Criterion value for d = 0..3; `None` where d was not a candidate.
    pub bic: [Option<f64>; 4],
    /// Residual of every demonstration mean for the chosen d.
    pub residuals: Vec<Vector3<f64>>,
    /// Means after the desired-direction component was removed.
    pub means: Vec<Vector3<f64>>,
    pub eigenvalues: Vector3<f64>,
    pub eigenvectors: [Vector3<f64>; 3],
}

/// Eigen-decomposition of the second-moment matrix, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub eigenvalues: Vector3<f64>,
    pub eigenvectors: [Vector3<f64>; 3],
}

impl Pca {
    /// `V_d V_dᵀ` for the first `d` eigenvectors.
    pub fn projector(&self, d: usize) -> Matrix3<f64> {
        self.eigenvectors[..d.min(3)]
            .iter()
            .fold(Matrix3::zeros(), |acc, v| acc + v * v.transpose())
    }
}

/// Mean motion direction of each demonstration; a demonstration without any
/// usable motion contributes the zero vector.
pub fn demo_means(demos: &[Vec<MotionStep>], channel: Channel) -> Vec<Vector3<f64>> {
    demos
        .iter()
        .map(|steps| {
            let dirs: Vec<_> = steps.iter().filter_map(|s| s.motion_dir(channel)).collect();
            if dirs.is_empty() {
                Vector3::zeros()
            } else {
                dirs.iter().sum::<Vector3<f64>>() / dirs.len() as f64
            }
        })
        .collect()
}

pub fn remove_desired_component(means: &[Vector3<f64>], dir: &Vector3<f64>) -> Vec<Vector3<f64>> {
    means.iter().map(|m| m - dir * m.dot(dir)).collect()
}

fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

fn second_moment(vectors: &[Vector3<f64>]) -> Matrix3<f64> {
    let n = vectors.len().max(1) as f64;
    vectors.iter().fold(Matrix3::zeros(), |acc, v| acc + v * v.transpose()) / n
}

fn decompose(m: Matrix3<f64>) -> Pca {
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    Pca {
        eigenvalues: Vector3::from_fn(|i, _| eig.eigenvalues[order[i]]),
        eigenvectors: order.map(|i| canonical_sign(eig.eigenvectors.column(i).into_owned())),
    }
}

/// Uncentered PCA: eigenvectors of `Σ ψ̄ ψ̄ᵀ / J`, eigenvalues descending.
pub fn pca_ranks(vectors: &[Vector3<f64>]) -> Pca {
    decompose(second_moment(vectors))
}

/// Same as [`pca_ranks`] for vectors already orthogonal to `dir`, with `dir`
/// forced to the last position even when several eigenvalues vanish.
fn pca_excluding(vectors: &[Vector3<f64>], dir: &Vector3<f64>) -> Pca {
    let m = second_moment(vectors);
    let shift = 1.0 + m.trace();
    let mut pca = decompose(m - dir * dir.transpose() * shift);
    pca.eigenvalues[2] += shift;
    // the excluded slot is exactly the direction; drop any rounding drift
    pca.eigenvectors[2] = canonical_sign(*dir);
    for i in 0..2 {
        let v = pca.eigenvectors[i] - dir * pca.eigenvectors[i].dot(dir);
        pca.eigenvectors[i] = v.normalize();
    }
    pca
}

/// `(I − V_d V_dᵀ) ψ̄` for every mean.
pub fn residuals(vectors: &[Vector3<f64>], pca: &Pca, d: usize) -> Vec<Vector3<f64>> {
    let p = Matrix3::identity() - pca.projector(d);
    vectors.iter().map(|v| p * v).collect()
}

/// Log-likelihood of residuals under an isotropic 3-D Gaussian with std `sigma`.
pub fn log_likelihood(residuals: &[Vector3<f64>], sigma: f64) -> f64 {
    let var = sigma * sigma;
    let norm = -1.5 * (2.0 * PI * var).ln();
    residuals
        .iter()
        .map(|e| norm - e.norm_squared() / (2.0 * var))
        .sum()
}

pub fn bic(n: usize, d: usize, log_l: f64) -> f64 {
    (n as f64).ln() * d as f64 - 2.0 * log_l
}

pub fn select_num_axes(
    means: &[Vector3<f64>],
    dir: Option<&Vector3<f64>>,
    sigma_demo: f64,
) -> Result<ComplianceResult> {
    if means.is_empty() {
        return Err(Error::NoInput);
    }
    let means = match dir {
        Some(d) => remove_desired_component(means, d),
        None => means.to_vec(),
    };
    let pca = match dir {
        Some(d) => pca_excluding(&means, d),
        None => pca_ranks(&means),
    };
    let max_d = if dir.is_some() { 2 } else { 3 };
    let j = means.len();

    let mut scores = [None; 4];
    let n_axes = if j == 1 {
        (0..=max_d)
            .find(|&d| {
                residuals(&means, &pca, d)
                    .iter()
                    .all(|e| e.norm() < 2.0 * sigma_demo)
            })
            .unwrap_or(max_d)
    } else {
        let mut best = (0, f64::INFINITY);
        for d in 0..=max_d {
            let score = bic(j, d, log_likelihood(&residuals(&means, &pca, d), sigma_demo));
            scores[d] = Some(score);
            if score < best.1 {
                best = (d, score);
            }
        }
        best.0
    };

    Ok(ComplianceResult {
        n_axes,
        axes: pca.eigenvectors[..n_axes].to_vec(),
        bic: scores,
        residuals: residuals(&means, &pca, n_axes),
        means,
        eigenvalues: pca.eigenvalues,
        eigenvectors: pca.eigenvectors,
    })
}

/// `k (I − Σ u uᵀ)` for orthonormal compliant axes `u`.
pub fn stiffness_matrix(axes: &[Vector3<f64>], k: f64) -> Result<Matrix3<f64>> {
    if axes.len() > 3 {
        return Err(Error::NonOrthonormalAxes);
    }
    for (i, a) in axes.iter().enumerate() {
        if (a.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::NonOrthonormalAxes);
        }
        if axes[..i].iter().any(|b| a.dot(b).abs() > 1e-9) {
            return Err(Error::NonOrthonormalAxes);
        }
    }
    let p = axes.iter().fold(Matrix3::zeros(), |acc, u| acc + u * u.transpose());
    Ok((Matrix3::identity() - p) * k)
}
