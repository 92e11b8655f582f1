//! Initial states as weighted collections of fixed-N sectors.
//!
//! The Hamiltonian and every reported observable conserve total atom
//! number, so a coherent input state can be represented by its Poisson
//! number distribution without inter-sector coherences.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::spin::{check_normalized, SectorBasis};

/// Default dropped Poisson mass for coherent inputs.
pub const DEFAULT_TAIL_MASS: f64 = 1e-8;
/// Upper bound on the number of sectors a mixture may hold.
pub const DEFAULT_SECTOR_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    basis: SectorBasis,
    amplitudes: Vec<Complex64>,
    weight: f64,
}

impl SectorState {
    pub fn new(basis: SectorBasis, amplitudes: Vec<Complex64>, weight: f64) -> Result<Self> {
        basis.check_len(amplitudes.len())?;
        check_normalized(&amplitudes)?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidParameter(format!("sector weight {weight} not in (0, 1]")));
        }
        Ok(Self {
            basis,
            amplitudes,
            weight,
        })
    }

    /// Fock state `|n₁, n₂⟩` with unit weight.
    pub fn fock(n1: u64, n2: u64) -> Self {
        let basis = SectorBasis::new(n1 + n2);
        let mut amplitudes = vec![Complex64::default(); basis.dim()];
        amplitudes[n2 as usize] = Complex64::new(1.0, 0.0);
        Self {
            basis,
            amplitudes,
            weight: 1.0,
        }
    }

    pub fn basis(&self) -> SectorBasis {
        self.basis
    }

    pub fn n_total(&self) -> u64 {
        self.basis.n_total()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        Self {
            basis: self.basis,
            amplitudes,
            weight: self.weight,
        }
    }

    pub(crate) fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    sectors: Vec<SectorState>,
    n_mean: f64,
}

impl MixtureState {
    /// Build from sectors with distinct totals; weights must sum to one.
    pub fn new(sectors: Vec<SectorState>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidParameter("mixture has no sectors".into()));
        }
        let total: f64 = sectors.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("sector weights sum to {total}")));
        }
        let mut totals: Vec<u64> = sectors.iter().map(|s| s.n_total()).collect();
        totals.sort_unstable();
        if totals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("sector atom numbers must be distinct".into()));
        }
        let n_mean = sectors.iter().map(|s| s.weight * s.n_total() as f64).sum();
        Ok(Self { sectors, n_mean })
    }

    pub fn single(state: SectorState) -> Self {
        let n_mean = state.n_total() as f64;
        Self {
            sectors: vec![state.with_weight(1.0)],
            n_mean,
        }
    }

    pub fn sectors(&self) -> &[SectorState] {
        &self.sectors
    }

    pub fn n_mean(&self) -> f64 {
        self.n_mean
    }

    pub fn total_weight(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight).sum()
    }
}

/// Two independent Fock states `|n₁⟩ ⊗ |n₂⟩`.
pub fn fock_fock(n1: u64, n2: u64) -> Result<MixtureState> {
    if n1 + n2 < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two atoms in total, got {n1} + {n2}"
        )));
    }
    Ok(MixtureState::single(SectorState::fock(n1, n2)))
}

/// Fock state `|n₁⟩` in trap 1 and coherent state `|α⟩` in trap 2, with the
/// Poisson distribution truncated to a contiguous window holding all but
/// `tail_mass` of the probability.
pub fn fock_coherent(n1: u64, alpha_sq: f64, tail_mass: f64) -> Result<MixtureState> {
    fock_coherent_capped(n1, alpha_sq, tail_mass, DEFAULT_SECTOR_CAP)
}

pub fn fock_coherent_capped(n1: u64, alpha_sq: f64, tail_mass: f64, cap: usize) -> Result<MixtureState> {
    ensure_finite("alpha_sq", alpha_sq)?;
    if alpha_sq <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha_sq must be positive, got {alpha_sq}")));
    }
    if !(tail_mass > 0.0 && tail_mass <= 1e-4) {
        return Err(Error::InvalidParameter(format!(
            "tail_mass must lie in (0, 1e-4], got {tail_mass}"
        )));
    }
    let window = poisson_window(alpha_sq, tail_mass, cap)?;
    let kept: f64 = window.probabilities.iter().sum();
    let mut sectors = Vec::with_capacity(window.probabilities.len());
    for (offset, p) in window.probabilities.iter().enumerate() {
        let n = window.lo + offset as u64;
        sectors.push(SectorState::fock(n1, n).with_weight(p / kept));
    }
    let n_mean = n1 as f64 + alpha_sq;
    Ok(MixtureState { sectors, n_mean })
}

/// Contiguous window `[lo, lo + len)` of Poisson(λ) probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub lo: u64,
    pub probabilities: Vec<f64>,
}

impl PoissonWindow {
    pub fn hi(&self) -> u64 {
        self.lo + self.probabilities.len() as u64 - 1
    }
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Grow a window outward from the mode, always absorbing the heavier
/// neighbour, until the captured mass reaches `1 − tail_mass`.
pub fn poisson_window(lambda: f64, tail_mass: f64, cap: usize) -> Result<PoissonWindow> {
    let mode = lambda.floor() as u64;
    let p_mode = (-lambda + mode as f64 * lambda.ln() - ln_factorial(mode)).exp();
    let mut lo = mode;
    let mut hi = mode;
    let mut p_lo = p_mode;
    let mut p_hi = p_mode;
    let mut left = Vec::new();
    let mut right = vec![p_mode];
    let mut captured = p_mode;
    while 1.0 - captured > tail_mass {
        let next_lo = if lo > 0 { p_lo * lo as f64 / lambda } else { 0.0 };
        let next_hi = p_hi * lambda / (hi + 1) as f64;
        if next_lo >= next_hi && lo > 0 {
            lo -= 1;
            p_lo = next_lo;
            left.push(p_lo);
            captured += p_lo;
        } else {
            hi += 1;
            p_hi = next_hi;
            right.push(p_hi);
            captured += p_hi;
        }
        let count = left.len() + right.len();
        if count > cap {
            return Err(Error::SectorCap { count, cap });
        }
    }
    left.reverse();
    left.extend(right);
    Ok(PoissonWindow {
        lo,
        probabilities: left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fock_fock_examples() {
        let m = fock_fock(51, 49).unwrap();
        assert_eq!(m.sectors().len(), 1);
        let s = &m.sectors()[0];
        assert_eq!(s.n_total(), 100);
        assert_eq!(s.weight(), 1.0);
        assert_eq!(s.amplitudes()[49], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);

        let m = fock_fock(1, 1).unwrap();
        assert_eq!(m.sectors()[0].basis().m(1), 0.0);
        assert_eq!(m.sectors()[0].amplitudes()[1].re, 1.0);

        let m = fock_fock(0, 4).unwrap();
        assert_eq!(m.sectors()[0].amplitudes()[4].re, 1.0);
        assert_eq!(m.n_mean(), 4.0);

        assert!(fock_fock(1, 0).is_err());
    }

    /// Tail masses from a direct summation of the Poisson pmf, independent of
    /// the window-growing recurrence.
    fn poisson_tails(lambda: f64, lo: u64, hi: u64) -> (f64, f64) {
        let pmf = |n: u64| (-lambda + n as f64 * lambda.ln() - ln_factorial(n)).exp();
        let below: f64 = (0..lo).map(pmf).sum();
        let above: f64 = (hi + 1..hi + 400).map(pmf).sum();
        (below, above)
    }

    #[test]
    fn coherent_window_for_alpha_sq_64() {
        let m = fock_coherent(50, 64.0, 1e-8).unwrap();
        let lo = m.sectors().first().unwrap().n_total() - 50;
        let hi = m.sectors().last().unwrap().n_total() - 50;
        assert!((18..=26).contains(&lo), "lo = {lo}");
        assert!((110..=120).contains(&hi), "hi = {hi}");
        let (below, above) = poisson_tails(64.0, lo, hi);
        assert!(below + above <= 1e-8, "{below} + {above}");
        assert_relative_eq!(m.total_weight(), 1.0, epsilon = 1e-12);
        assert_eq!(m.n_mean(), 114.0);

        // Adjacent weights follow the Poisson recurrence λ/n.
        let w = |n: u64| {
            m.sectors()
                .iter()
                .find(|s| s.n_total() == 50 + n)
                .unwrap()
                .weight()
        };
        assert_relative_eq!(w(64) / w(63), 1.0, max_relative = 1e-12);
        assert_relative_eq!(w(40) / w(39), 64.0 / 40.0, max_relative = 1e-12);
    }

    #[test]
    fn small_alpha_collapses_to_vacuum_sector() {
        let m = fock_coherent(10, 1e-12, 1e-8).unwrap();
        assert_eq!(m.sectors().len(), 1);
        assert_eq!(m.sectors()[0].n_total(), 10);
        assert_relative_eq!(m.sectors()[0].weight(), 1.0);
    }

    #[test]
    fn coherent_validation() {
        assert!(fock_coherent(10, 0.0, 1e-8).is_err());
        assert!(fock_coherent(10, 4.0, 0.0).is_err());
        assert!(fock_coherent(10, 4.0, 1e-3).is_err());
        assert!(matches!(
            fock_coherent_capped(0, 1e6, 1e-8, 100),
            Err(Error::SectorCap { .. })
        ));
    }

    #[test]
    fn mixture_validation() {
        let a = SectorState::fock(2, 2).with_weight(0.5);
        let b = SectorState::fock(1, 3).with_weight(0.5);
        assert!(MixtureState::new(vec![a.clone(), b]).is_err());
        let c = SectorState::fock(3, 3).with_weight(0.5);
        let m = MixtureState::new(vec![a.clone(), c]).unwrap();
        assert_eq!(m.n_mean(), 5.0);
        assert!(MixtureState::new(vec![a]).is_err());
    }

    #[test]
    fn sector_state_checks_norm() {
        let basis = SectorBasis::new(1);
        let bad = vec![Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            SectorState::new(basis, bad, 1.0),
            Err(Error::NotNormalized { .. })
        ));
        let good = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        assert!(SectorState::new(basis, good, 1.0).is_ok());
    }
}
