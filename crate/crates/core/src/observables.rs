//! One-body density matrix, largest condensate fraction, mode angles and
//! instantaneous-eigenbasis level populations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{check_normalized, raw_moments, SectorBasis, TridiagonalHamiltonian};
use crate::states::{MixtureState, SectorState};
use crate::tridiag;

/// Largest N accepted by [`level_populations`].
pub const LEVEL_GUARD: usize = 2000;
/// Relative gap below which adjacent levels count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;
/// Cumulative population that defines `spread90`.
pub const SPREAD_QUANTILE: f64 = 0.9;

/// `ρ = [[⟨a₁†a₁⟩, ⟨a₁†a₂⟩], [⟨a₂†a₁⟩, ⟨a₂†a₂⟩]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneBodyDensityMatrix {
    pub n11: f64,
    pub n22: f64,
    /// `⟨a₁†a₂⟩ = ⟨S_x⟩ − i⟨S_y⟩`.
    pub c12: Complex64,
}

impl OneBodyDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.n11 + self.n22
    }

    /// Eigenvalues `(λ_min, λ_max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.n11 + self.n22);
        let radius = (0.5 * (self.n11 - self.n22)).hypot(self.c12.norm());
        (mean - radius, mean + radius)
    }

    fn scaled(&self, w: f64) -> Self {
        Self {
            n11: w * self.n11,
            n22: w * self.n22,
            c12: self.c12 * w,
        }
    }

    fn add(&mut self, other: &Self) {
        self.n11 += other.n11;
        self.n22 += other.n22;
        self.c12 += other.c12;
    }
}

/// Unvalidated density matrix of an amplitude vector.
pub(crate) fn sector_density(basis: SectorBasis, psi: &[Complex64]) -> OneBodyDensityMatrix {
    let (sz, splus) = raw_moments(basis, psi);
    let half = basis.spin();
    OneBodyDensityMatrix {
        n11: half - sz,
        n22: half + sz,
        c12: splus.conj(),
    }
}

pub fn density_matrix(state: &SectorState) -> Result<OneBodyDensityMatrix> {
    check_normalized(state.amplitudes())?;
    Ok(sector_density(state.basis(), state.amplitudes()))
}

/// Weight-convex combination of the sector matrices.
pub fn mixture_density_matrix(mixture: &MixtureState) -> Result<OneBodyDensityMatrix> {
    let mut acc = OneBodyDensityMatrix::default();
    for s in mixture.sectors() {
        acc.add(&density_matrix(s)?.scaled(s.weight()));
    }
    Ok(acc)
}

/// Combine per-sector matrices in the given (fixed) order.
pub fn combine(parts: impl IntoIterator<Item = (f64, OneBodyDensityMatrix)>) -> OneBodyDensityMatrix {
    let mut acc = OneBodyDensityMatrix::default();
    for (w, rho) in parts {
        acc.add(&rho.scaled(w));
    }
    acc
}

/// Largest condensate fraction `η` and its mode
/// `a_c = cos θ a₁ + sin θ e^{iφ} a₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateReading {
    pub eta: f64,
    pub theta: f64,
    pub phi: f64,
}

pub fn condensate_reading(rho: &OneBodyDensityMatrix, total: f64) -> Result<CondensateReading> {
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParameter(format!("total atom number must be positive, got {total}")));
    }
    let (_, lambda) = rho.eigenvalues();
    let eta = lambda / total;
    let coherence = rho.c12.norm();

    if coherence < 1e-12 * total {
        // Diagonal ρ: the dominant mode is a₁ or a₂, with no phase. Ties go to a₁.
        let theta = if rho.n22 > rho.n11 + 1e-12 * total { PI / 2.0 } else { 0.0 };
        return Ok(CondensateReading { eta, theta, phi: 0.0 });
    }

    // Eigenvector with real nonnegative first component:
    // (λ − n₂₂, c₁₂*) or equivalently (|c₁₂|, (λ − n₁₁) e^{−i arg c₁₂}).
    let (first, second) = if rho.n11 >= rho.n22 {
        (lambda - rho.n22, coherence)
    } else {
        (coherence, lambda - rho.n11)
    };
    let norm = first.hypot(second);
    let theta = if first / norm < 1e-14 { PI / 2.0 } else { second.atan2(first) };
    let mut phi = -rho.c12.arg();
    if phi <= -PI {
        phi += 2.0 * PI;
    }
    Ok(CondensateReading { eta, theta, phi })
}

/// Populations of the instantaneous eigenlevels of `H(u, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPopulations {
    /// Ascending in energy.
    pub energies: Vec<f64>,
    pub populations: Vec<f64>,
    /// Smallest level index whose cumulative population reaches 90%,
    /// with degenerate groups counted as a whole.
    pub spread90: usize,
}

impl LevelPopulations {
    /// Populations with each degenerate group's total assigned to the group's
    /// highest index.
    pub fn grouped(&self) -> Vec<f64> {
        group_degenerate(&self.energies, &self.populations)
    }
}

fn group_degenerate(energies: &[f64], populations: &[f64]) -> Vec<f64> {
    let n = energies.len();
    let width = energies.last().copied().unwrap_or(0.0) - energies.first().copied().unwrap_or(0.0);
    let tol = DEGENERACY_TOLERANCE * width.max(f64::MIN_POSITIVE);
    let mut out = vec![0.0; n];
    let mut pending = 0.0;
    for l in 0..n {
        pending += populations[l];
        let closes_group = l + 1 == n || energies[l + 1] - energies[l] >= tol;
        if closes_group {
            out[l] = pending;
            pending = 0.0;
        }
    }
    out
}

/// First index at which the cumulative population reaches the 90% quantile.
pub fn spread_index(grouped: &[f64]) -> usize {
    let mut cumulative = 0.0;
    for (l, p) in grouped.iter().enumerate() {
        cumulative += p;
        if cumulative >= SPREAD_QUANTILE - 1e-12 {
            return l;
        }
    }
    grouped.len().saturating_sub(1)
}

pub(crate) fn populations_of(h: &TridiagonalHamiltonian, psi: &[Complex64]) -> Result<LevelPopulations> {
    let (energies, proj) = tridiag::eigen_projection(h.diag(), h.offdiag(), psi)?;
    let populations: Vec<f64> = proj.iter().map(|z| z.norm_sqr()).collect();
    let spread90 = spread_index(&group_degenerate(&energies, &populations));
    Ok(LevelPopulations {
        energies,
        populations,
        spread90,
    })
}

pub fn level_populations(state: &SectorState, u: f64, j: f64) -> Result<LevelPopulations> {
    let n = state.n_total() as usize;
    if n > LEVEL_GUARD {
        return Err(Error::SizeGuard { n, limit: LEVEL_GUARD });
    }
    check_normalized(state.amplitudes())?;
    let h = TridiagonalHamiltonian::new(state.basis(), u, j)?;
    populations_of(&h, state.amplitudes())
}

/// `⟨ψ|H(u, j)|ψ⟩`.
pub fn energy(state: &SectorState, u: f64, j: f64) -> Result<f64> {
    check_normalized(state.amplitudes())?;
    let h = TridiagonalHamiltonian::new(state.basis(), u, j)?;
    Ok(h.expectation(state.amplitudes()))
}
