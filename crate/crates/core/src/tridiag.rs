//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shifts).
//!
//! The Givens rotations produced by the QL sweeps are streamed into a
//! [`RotationSink`]. Accumulating them into an identity matrix yields the
//! eigenvectors; accumulating them into a single vector `w = Zᵀψ` yields the
//! projections of `ψ` onto the eigenbasis in O(N²) without ever forming Z.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Receives the orthogonal transformations applied during diagonalization.
pub trait RotationSink {
    /// Right-multiply the accumulated basis by a rotation acting on columns
    /// `i` and `i + 1`.
    fn rotate(&mut self, i: usize, c: f64, s: f64);

    /// Reorder the accumulated columns so that new column `p` is old column
    /// `order[p]`.
    fn permute(&mut self, order: &[usize]);
}

impl RotationSink for () {
    fn rotate(&mut self, _: usize, _: f64, _: f64) {}
    fn permute(&mut self, _: &[usize]) {}
}

/// Column-major orthogonal matrix; column `l` is the eigenvector of level `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvectors {
    n: usize,
    data: Vec<f64>,
}

impl Eigenvectors {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            data[k * n + k] = 1.0;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, level: usize) -> &[f64] {
        &self.data[level * self.n..(level + 1) * self.n]
    }
}

impl RotationSink for Eigenvectors {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let n = self.n;
        let (lo, hi) = self.data.split_at_mut((i + 1) * n);
        let zi = &mut lo[i * n..];
        let zi1 = &mut hi[..n];
        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
            let f = *b;
            *b = s * *a + c * f;
            *a = c * *a - s * f;
        }
    }

    fn permute(&mut self, order: &[usize]) {
        let n = self.n;
        let mut data = Vec::with_capacity(self.data.len());
        for &src in order {
            data.extend_from_slice(&self.data[src * n..(src + 1) * n]);
        }
        self.data = data;
    }
}

/// Running projection `w = Zᵀψ` of a complex vector onto the accumulated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(pub Vec<Complex64>);

impl RotationSink for Projection {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let a = self.0[i];
        let b = self.0[i + 1];
        self.0[i + 1] = a * s + b * c;
        self.0[i] = a * c - b * s;
    }

    fn permute(&mut self, order: &[usize]) {
        self.0 = order.iter().map(|&src| self.0[src]).collect();
    }
}

fn check_shape(diag: &[f64], offdiag: &[f64]) -> Result<()> {
    let expected = diag.len().saturating_sub(1);
    if offdiag.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: offdiag.len(),
        });
    }
    if diag.iter().chain(offdiag).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "tridiagonal matrix has non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Diagonalize the symmetric tridiagonal matrix (`diag`, `offdiag`), feeding
/// every rotation to `sink`. Returns the eigenvalues in ascending order; the
/// sink is permuted to match.
pub fn diagonalize<S: RotationSink>(diag: &[f64], offdiag: &[f64], sink: &mut S) -> Result<Vec<f64>> {
    check_shape(diag, offdiag)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    if n <= 1 {
        return Ok(d);
    }
    let mut e = offdiag.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                sink.rotate(i, c, s);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    sink.permute(&order);
    Ok(order.iter().map(|&i| d[i]).collect())
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    diagonalize(diag, offdiag, &mut ())
}

/// Eigenvalues (ascending) and orthonormal eigenvectors.
pub fn eigen_decomposition(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Eigenvectors)> {
    let mut z = Eigenvectors::identity(diag.len());
    let values = diagonalize(diag, offdiag, &mut z)?;
    Ok((values, z))
}

/// Eigenvalues (ascending) and the components `⟨v_l|ψ⟩` of `psi` in the eigenbasis.
pub fn eigen_projection(diag: &[f64], offdiag: &[f64], psi: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if psi.len() != diag.len() {
        return Err(Error::DimensionMismatch {
            expected: diag.len(),
            found: psi.len(),
        });
    }
    let mut w = Projection(psi.to_vec());
    let values = diagonalize(diag, offdiag, &mut w)?;
    Ok((values, w.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tridiagonal(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let e = (0..n.saturating_sub(1)).map(|_| rng.gen_range(-2.0..2.0)).collect();
        (d, e)
    }

    fn dense(d: &[f64], e: &[f64]) -> nalgebra::DMatrix<f64> {
        let n = d.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = d[k];
        }
        for k in 0..e.len() {
            m[(k, k + 1)] = e[k];
            m[(k + 1, k)] = e[k];
        }
        m
    }

    #[test]
    fn matches_dense_symmetric_solver() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (121, 5)] {
            let (d, e) = random_tridiagonal(n, seed);
            let ours = eigenvalues(&d, &e).unwrap();
            let mut theirs: Vec<f64> = dense(&d, &e).symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eigenvectors_reconstruct_matrix_action() {
        let (d, e) = random_tridiagonal(30, 11);
        let (vals, z) = eigen_decomposition(&d, &e).unwrap();
        let m = dense(&d, &e);
        for l in 0..30 {
            let v = nalgebra::DVector::from_column_slice(z.column(l));
            let residual = &m * &v - &v * vals[l];
            assert!(residual.norm() < 1e-11, "level {l}: {}", residual.norm());
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_agrees_with_explicit_eigenvectors() {
        let (d, e) = random_tridiagonal(25, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let psi: Vec<Complex64> = (0..25)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (_, z) = eigen_decomposition(&d, &e).unwrap();
        let (_, w) = eigen_projection(&d, &e, &psi).unwrap();
        for l in 0..25 {
            let direct: Complex64 = z.column(l).iter().zip(&psi).map(|(v, p)| p * v).sum();
            assert!((direct - w[l]).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let vals = eigenvalues(&[3.0, -1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(matches!(eigenvalues(&[1.0, 2.0], &[]), Err(Error::DimensionMismatch { .. })));
        assert!(eigenvalues(&[1.0, f64::NAN], &[0.5]).is_err());
        assert!(eigen_projection(&[1.0], &[], &[]).is_err());
    }
}
