//! Fixed-N Fock basis and the Hamiltonian `H = U S_z² − J S_x`.
//!
//! Basis index `k ∈ [0, N]` labels `|n₁ = N − k, n₂ = k⟩`, so that
//! `S_z = (n₂ − n₁)/2` has eigenvalue `m_k = k − N/2` and the basis is ordered
//! by ascending `m`. Odd `N` gives half-integer `m`.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Normalization tolerance accepted by expectation-value routines.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// The (N+1)-dimensional sector of fixed total atom number N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorBasis {
    n_total: u64,
}

impl SectorBasis {
    pub fn new(n_total: u64) -> Self {
        Self { n_total }
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn dim(&self) -> usize {
        self.n_total as usize + 1
    }

    /// Total spin S = N/2.
    pub fn spin(&self) -> f64 {
        self.n_total as f64 / 2.0
    }

    /// S_z eigenvalue of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.spin()
    }

    /// `(n₁, n₂)` occupation numbers of basis index `k`.
    pub fn occupations(&self, k: usize) -> (u64, u64) {
        (self.n_total - k as u64, k as u64)
    }

    /// `⟨k+1|S₊|k⟩ = sqrt(S(S+1) − m(m+1))`, written as `sqrt(n₁(n₂+1))` so
    /// that it is exact for half-integer spins as well.
    pub fn ladder(&self, k: usize) -> f64 {
        let (n1, n2) = self.occupations(k);
        ((n1 as f64) * (n2 as f64 + 1.0)).sqrt()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Real symmetric tridiagonal matrix of `U S_z² − J S_x` in one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    basis: SectorBasis,
    u: f64,
    j: f64,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(basis: SectorBasis, u: f64, j: f64) -> Result<Self> {
        ensure_finite("U", u)?;
        ensure_finite("J", j)?;
        let diag = (0..basis.dim())
            .map(|k| {
                let m = basis.m(k);
                u * m * m
            })
            .collect();
        let offdiag = (0..basis.dim() - 1)
            .map(|k| -0.5 * j * basis.ladder(k))
            .collect();
        Ok(Self {
            basis,
            u,
            j,
            diag,
            offdiag,
        })
    }

    pub fn basis(&self) -> SectorBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Largest |entry| scale, `max(|diag|max, N·|J|/2)`, used for step-size guards.
    pub fn stiffness(&self) -> f64 {
        let dmax = self.diag.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        dmax.max(self.basis.n_total as f64 * self.j.abs() / 2.0)
    }

    /// `H·psi`.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.basis.check_len(psi.len())?;
        let mut out = vec![Complex64::default(); psi.len()];
        self.apply_into(psi, &mut out);
        Ok(out)
    }

    /// `out = H·psi`; lengths must already match.
    pub(crate) fn apply_into(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.diag.len();
        for k in 0..n {
            let mut acc = psi[k] * self.diag[k];
            if k > 0 {
                acc += psi[k - 1] * self.offdiag[k - 1];
            }
            if k + 1 < n {
                acc += psi[k + 1] * self.offdiag[k];
            }
            out[k] = acc;
        }
    }

    /// `⟨psi|H|psi⟩` without normalization checks.
    pub(crate) fn expectation(&self, psi: &[Complex64]) -> f64 {
        let n = self.diag.len();
        let mut acc = 0.0;
        for k in 0..n {
            acc += self.diag[k] * psi[k].norm_sqr();
            if k + 1 < n {
                acc += 2.0 * self.offdiag[k] * (psi[k].conj() * psi[k + 1]).re;
            }
        }
        acc
    }
}

/// Convenience constructor matching `build_hamiltonian(N, U, J)`.
pub fn build_hamiltonian(basis: SectorBasis, u: f64, j: f64) -> Result<TridiagonalHamiltonian> {
    TridiagonalHamiltonian::new(basis, u, j)
}

/// Collective-spin expectation values `(⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinExpectation {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinExpectation {
    pub fn length_sqr(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }
}

pub fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > NORM_TOLERANCE || !nrm.is_finite() {
        return Err(Error::NotNormalized { norm: nrm });
    }
    Ok(())
}

/// `(⟨S_z⟩, ⟨S₊⟩)` with `S₊ = a₂†a₁`. No validation.
pub(crate) fn raw_moments(basis: SectorBasis, psi: &[Complex64]) -> (f64, Complex64) {
    let mut sz = 0.0;
    let mut splus = Complex64::default();
    for k in 0..psi.len() {
        sz += basis.m(k) * psi[k].norm_sqr();
        if k + 1 < psi.len() {
            splus += psi[k + 1].conj() * psi[k] * basis.ladder(k);
        }
    }
    (sz, splus)
}

pub fn spin_expectations(basis: SectorBasis, psi: &[Complex64]) -> Result<SpinExpectation> {
    basis.check_len(psi.len())?;
    check_normalized(psi)?;
    let (sz, splus) = raw_moments(basis, psi);
    Ok(SpinExpectation {
        sx: splus.re,
        sy: splus.im,
        sz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis_state(n: u64, k: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); n as usize + 1];
        v[k] = c(1.0);
        v
    }

    #[test]
    fn pure_interaction_n2() {
        let h = build_hamiltonian(SectorBasis::new(2), 1.0, 0.0).unwrap();
        assert_eq!(h.diag(), &[1.0, 0.0, 1.0]);
        assert!(h.offdiag().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pure_tunneling_n2() {
        let h = build_hamiltonian(SectorBasis::new(2), 0.0, 1.0).unwrap();
        assert_eq!(h.diag(), &[0.0, 0.0, 0.0]);
        for &x in h.offdiag() {
            assert_relative_eq!(x, -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn n4_mixed() {
        let h = build_hamiltonian(SectorBasis::new(4), 1.0, 2.0).unwrap();
        assert_eq!(h.diag(), &[4.0, 1.0, 0.0, 1.0, 4.0]);
        let expected = [-2.0, -6f64.sqrt(), -6f64.sqrt(), -2.0];
        for (a, b) in h.offdiag().iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn ladder_matches_spin_formula_for_odd_n() {
        let basis = SectorBasis::new(7);
        let s = basis.spin();
        for k in 0..7 {
            let m = basis.m(k);
            assert_relative_eq!(basis.ladder(k), (s * (s + 1.0) - m * (m + 1.0)).sqrt(), epsilon = 1e-13);
        }
        assert_eq!(basis.m(0), -3.5);
    }

    #[test]
    fn nan_coefficients_rejected() {
        assert!(build_hamiltonian(SectorBasis::new(3), f64::NAN, 1.0).is_err());
        assert!(build_hamiltonian(SectorBasis::new(3), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn apply_examples() {
        let zero = build_hamiltonian(SectorBasis::new(3), 0.0, 0.0).unwrap();
        let psi = vec![c(0.3), Complex64::new(0.1, 0.7), c(-0.2), c(0.5)];
        assert!(zero.apply(&psi).unwrap().iter().all(|z| z.norm() == 0.0));

        let h = build_hamiltonian(SectorBasis::new(2), 1.0, 0.0).unwrap();
        let out = h.apply(&basis_state(2, 1)).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));

        let h = build_hamiltonian(SectorBasis::new(2), 1.0, 1.0).unwrap();
        let out = h.apply(&basis_state(2, 0)).unwrap();
        assert_relative_eq!(out[0].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(out[1].re, -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(out[2], Complex64::default());
    }

    #[test]
    fn apply_dimension_mismatch() {
        let h = build_hamiltonian(SectorBasis::new(2), 1.0, 1.0).unwrap();
        assert_eq!(
            h.apply(&[c(1.0)]),
            Err(Error::DimensionMismatch { expected: 3, found: 1 })
        );
    }

    #[test]
    fn expectation_examples() {
        let basis = SectorBasis::new(6);
        let e = spin_expectations(basis, &basis_state(6, 3)).unwrap();
        assert_eq!((e.sx, e.sy, e.sz), (0.0, 0.0, 0.0));

        let e = spin_expectations(basis, &basis_state(6, 6)).unwrap();
        assert_eq!((e.sx, e.sy, e.sz), (0.0, 0.0, 3.0));

        let psi = [c(0.5), c(1.0 / 2f64.sqrt()), c(0.5)];
        let e = spin_expectations(SectorBasis::new(2), &psi).unwrap();
        assert_relative_eq!(e.sx, 1.0, epsilon = 1e-15);
        assert_relative_eq!(e.sy, 0.0, epsilon = 1e-15);
        assert_relative_eq!(e.sz, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_rejects_unnormalized() {
        let psi = [c(1.0), c(1.0), c(0.0)];
        assert!(matches!(
            spin_expectations(SectorBasis::new(2), &psi),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            spin_expectations(SectorBasis::new(2), &[c(1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn offdiag_negative_and_peaked_at_center() {
        let h = build_hamiltonian(SectorBasis::new(40), 1.0, 0.7).unwrap();
        assert!(h.offdiag().iter().all(|&x| x < 0.0));
        let argmax = h
            .offdiag()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        assert!((argmax as f64 - 19.5).abs() <= 0.5);
    }

    fn state_strategy(max_n: u64) -> impl Strategy<Value = (u64, Vec<Complex64>)> {
        (1..=max_n).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n as usize + 1),
            )
                .prop_map(|(n, parts)| {
                    let v: Vec<Complex64> = parts.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                    (n, v)
                })
        })
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(
            (n, phi) in state_strategy(30),
            seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 31),
            u in -3.0f64..3.0,
            j in -3.0f64..3.0,
        ) {
            let h = build_hamiltonian(SectorBasis::new(n), u, j).unwrap();
            let psi: Vec<Complex64> = seed[..phi.len()].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let hpsi = h.apply(&psi).unwrap();
            let hphi = h.apply(&phi).unwrap();
            let lhs: Complex64 = phi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
            let rhs: Complex64 = hphi.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
            let scale = norm(&phi) * norm(&hpsi) + norm(&hphi) * norm(&psi) + 1e-300;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn casimir_bound((n, psi) in state_strategy(60)) {
            let nrm = norm(&psi);
            prop_assume!(nrm > 1e-3);
            let psi: Vec<Complex64> = psi.iter().map(|z| z / nrm).collect();
            let basis = SectorBasis::new(n);
            let e = spin_expectations(basis, &psi).unwrap();
            let s = basis.spin();
            prop_assert!(e.length_sqr() <= s * (s + 1.0) + 1e-9);
        }
    }
}
