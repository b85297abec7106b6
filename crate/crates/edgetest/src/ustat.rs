//! Unbiased U-statistic estimation of the covariance matrix and the
//! derived precision matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sample::SampleMatrix;

/// Σ̂ is declared numerically singular when its smallest eigenvalue does
/// not exceed this fraction of the largest one.
pub const SINGULARITY_FLOOR: f64 = 1e-10;

/// The estimated covariance matrix together with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    p: usize,
    matrix: DMatrix<f64>,
    /// Eigenvalues sorted in descending order.
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue.
    eigenvectors: DMatrix<f64>,
}

/// The estimated precision matrix Θ̂ = Σ̂⁻¹.
#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    p: usize,
    matrix: DMatrix<f64>,
}

impl CovarianceEstimate {
    /// Wraps an explicit symmetric matrix, attaching its eigendecomposition.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::InvalidConfig(format!(
                "covariance matrix must be square with p >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let p = matrix.nrows();
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..p {
            for j in (i + 1)..p {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidConfig(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        // Work on the exactly-symmetric average so the eigensolver sees a
        // symmetric input.
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone());
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::zeros(p, p);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Self {
            p,
            matrix: sym,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Smallest eigenvalue α̂_p.
    pub fn alpha_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

impl PrecisionEstimate {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }
}

/// Unbiased covariance estimate: `Σ̂[i][j] = Σ_q (x[q][i] − x̄[i])(x[q][j] − x̄[j]) / (n − 1)`,
/// the centered-sum form of the order-2 pairwise-difference kernel.
/// Runs in `O(n·p²)`.
pub fn covariance_ustat(x: &SampleMatrix) -> Result<CovarianceEstimate> {
    let n = x.n();
    let p = x.p();
    if n < 2 {
        return Err(Error::InsufficientData { n, required: 2 });
    }
    let mut means = vec![0.0f64; p];
    for row in x.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }

    let mut upper = vec![0.0f64; p * (p + 1) / 2];
    let mut centered = vec![0.0f64; p];
    for row in x.rows() {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&means) {
            *c = v - m;
        }
        let mut slot = 0;
        for i in 0..p {
            let ci = centered[i];
            for &cj in &centered[i..] {
                upper[slot] += ci * cj;
                slot += 1;
            }
        }
    }

    let denom = (n - 1) as f64;
    let mut matrix = DMatrix::zeros(p, p);
    let mut slot = 0;
    for i in 0..p {
        for j in i..p {
            let v = upper[slot] / denom;
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
            slot += 1;
        }
    }
    CovarianceEstimate::from_matrix(matrix)
}

/// Inverts Σ̂ through its eigendecomposition: Θ̂ = V·diag(1/α̂)·Vᵀ.
pub fn precision_from_covariance(cov: &CovarianceEstimate) -> Result<PrecisionEstimate> {
    let alpha_max = cov.eigenvalues[0];
    let alpha_min = cov.alpha_min();
    if alpha_min <= SINGULARITY_FLOOR * alpha_max.max(0.0) {
        return Err(Error::SingularCovariance { alpha_min });
    }
    let p = cov.p;
    let v = &cov.eigenvectors;
    let inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        p,
        cov.eigenvalues.iter().map(|a| 1.0 / a),
    ));
    let theta = v * inv * v.transpose();
    // Exact symmetry for downstream consumers.
    let theta = (&theta + theta.transpose()) * 0.5;
    Ok(PrecisionEstimate { p, matrix: theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, p: usize, seed: u64) -> SampleMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n * p).map(|_| rng.gen_range(-3.0..3.0)).collect();
        SampleMatrix::new(n, p, values).unwrap()
    }

    /// O(n²) oracle: the raw pairwise-difference kernel average,
    /// (1/(n(n−1))) Σ_{q≠r} ½ (x[q][i]−x[r][i])(x[q][j]−x[r][j]).
    fn pairwise_kernel_cov(x: &SampleMatrix, i: usize, j: usize) -> f64 {
        let n = x.n();
        let mut total = 0.0;
        for q in 0..n {
            for r in 0..n {
                if q == r {
                    continue;
                }
                total += 0.5 * (x.row(q)[i] - x.row(r)[i]) * (x.row(q)[j] - x.row(r)[j]);
            }
        }
        total / (n * (n - 1)) as f64
    }

    #[test]
    fn two_row_hand_computation() {
        let x = SampleMatrix::new(2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let cov = covariance_ustat(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(cov.matrix()[(i, j)], 0.5, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn constant_columns_give_zero_matrix() {
        let x =
            SampleMatrix::new(4, 2, vec![3.0, -1.0, 3.0, -1.0, 3.0, -1.0, 3.0, -1.0]).unwrap();
        let cov = covariance_ustat(&x).unwrap();
        assert!(cov.matrix().iter().all(|v| v.abs() < 1e-15));
        assert!(matches!(
            precision_from_covariance(&cov),
            Err(Error::SingularCovariance { .. })
        ));
    }

    #[test]
    fn centered_sum_matches_pairwise_kernel_form() {
        let x = random_matrix(200, 4, 17);
        let cov = covariance_ustat(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let oracle = pairwise_kernel_cov(&x, i, j);
                assert!(
                    (cov.matrix()[(i, j)] - oracle).abs() < 1e-10,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn row_permutation_invariance() {
        let x = random_matrix(60, 3, 5);
        let mut rows: Vec<Vec<f64>> = (0..60).map(|q| x.row(q).to_vec()).collect();
        rows.reverse();
        rows.swap(0, 31);
        let shuffled = SampleMatrix::from_rows(&rows).unwrap();
        let a = covariance_ustat(&x).unwrap();
        let b = covariance_ustat(&shuffled).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigendecomposition_reconstructs_matrix() {
        let x = random_matrix(120, 5, 23);
        let cov = covariance_ustat(&x).unwrap();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(
            cov.eigenvalues(),
        ));
        let rebuilt = cov.eigenvectors() * lambda * cov.eigenvectors().transpose();
        let err = (&rebuilt - cov.matrix()).norm() / cov.matrix().norm();
        assert!(err < 1e-8, "reconstruction error {err}");
        // descending order
        for w in cov.eigenvalues().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn identity_and_diagonal_inversion() {
        let id = CovarianceEstimate::from_matrix(DMatrix::identity(3, 3)).unwrap();
        let theta = precision_from_covariance(&id).unwrap();
        assert_relative_eq!(theta.matrix().clone(), DMatrix::identity(3, 3), epsilon = 1e-12);

        let d = CovarianceEstimate::from_matrix(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(&[2.0, 4.0]),
        ))
        .unwrap();
        let theta = precision_from_covariance(&d).unwrap();
        assert_relative_eq!(theta.entry(0, 0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(theta.entry(1, 1), 0.25, epsilon = 1e-12);
        assert!(theta.entry(0, 1).abs() < 1e-14);
    }

    #[test]
    fn precision_times_covariance_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let spd = &g * g.transpose() + DMatrix::identity(5, 5) * 0.5;
        let cov = CovarianceEstimate::from_matrix(spd.clone()).unwrap();
        let theta = precision_from_covariance(&cov).unwrap();
        let prod = theta.matrix() * &spd;
        let err = (&prod - DMatrix::identity(5, 5)).norm() / 5.0f64.sqrt();
        assert!(err < 1e-8, "Θ̂·Σ̂ deviates from identity by {err}");
    }

    #[test]
    fn unbiasedness_over_simulated_datasets() {
        use crate::simulate::sample_gaussian;
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let reps = 1000;
        let n = 200;
        let mut sums = DMatrix::zeros(2, 2);
        let mut sq = DMatrix::zeros(2, 2);
        for _ in 0..reps {
            let x = sample_gaussian(&sigma, n, &mut rng).unwrap();
            let est = covariance_ustat(&x).unwrap();
            sums += est.matrix();
            sq += est.matrix().component_mul(est.matrix());
        }
        for i in 0..2 {
            for j in 0..2 {
                let mean = sums[(i, j)] / reps as f64;
                let var = sq[(i, j)] / reps as f64 - mean * mean;
                let se = (var / reps as f64).sqrt();
                assert!(
                    (mean - sigma[(i, j)]).abs() <= 3.0 * se,
                    "entry ({i},{j}): mean {mean} vs {} (se {se})",
                    sigma[(i, j)]
                );
            }
        }
    }
}
