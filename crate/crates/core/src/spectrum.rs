//! Eigenvalue spectrum of `U S_z² − J S_x` and Fock/Josephson/Rabi regimes.

use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::spin::{SectorBasis, TridiagonalHamiltonian};
use crate::tridiag;

/// Largest N accepted by [`eigenvalues`].
pub const SPECTRUM_GUARD: usize = 5000;
/// Default number of points in [`default_ratio_grid`].
pub const DEFAULT_GRID_POINTS: usize = 200;

pub fn eigenvalues(n: u64, u: f64, j: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    if n as usize > SPECTRUM_GUARD {
        return Err(Error::SizeGuard { n: n as usize, limit: SPECTRUM_GUARD });
    }
    ensure_finite("U", u)?;
    ensure_finite("J", j)?;
    if u == 0.0 && j == 0.0 {
        return Err(Error::InvalidParameter("U and J cannot both vanish".into()));
    }
    let h = TridiagonalHamiltonian::new(SectorBasis::new(n), u, j)?;
    tridiag::eigenvalues(h.diag(), h.offdiag())
}

/// Ground-shifted levels over a grid of `J/U` at `U = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub n_total: u64,
    pub ratios: Vec<f64>,
    /// `levels[r][l]` is `E_l − E_0` at `ratios[r]`.
    pub levels: Vec<Vec<f64>>,
}

pub fn spectrum_sweep(n: u64, ratio_grid: &[f64]) -> Result<SpectrumTable> {
    if ratio_grid.is_empty() {
        return Err(Error::InvalidParameter("ratio grid is empty".into()));
    }
    if let Some(bad) = ratio_grid.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::InvalidParameter(format!("ratio {bad} must be finite and nonnegative")));
    }
    let levels = ratio_grid
        .par_iter()
        .map(|&ratio| {
            let vals = eigenvalues(n, 1.0, ratio)?;
            let e0 = vals[0];
            Ok(vals.into_iter().map(|e| e - e0).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SpectrumTable {
        n_total: n,
        ratios: ratio_grid.to_vec(),
        levels,
    })
}

/// `points` log-spaced ratios from 10⁻² to 10²·N.
pub fn default_ratio_grid(n: u64, points: usize) -> Vec<f64> {
    let lo = 1e-2_f64.ln();
    let hi = (1e2 * n as f64).ln();
    match points {
        0 => Vec::new(),
        1 => vec![lo.exp()],
        _ => (0..points)
            .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Fock,
    Josephson,
    Rabi,
}

/// Boundaries between regimes: Fock below `J/U = fock_below`, Rabi above
/// `J/U = rabi_factor·N²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBounds {
    pub fock_below: f64,
    pub rabi_factor: f64,
}

impl Default for RegimeBounds {
    fn default() -> Self {
        Self {
            fock_below: 1.0,
            rabi_factor: 1.0,
        }
    }
}

pub fn regime_classify(n: u64, u: f64, j: f64) -> Regime {
    regime_classify_with(n, u, j, RegimeBounds::default())
}

pub fn regime_classify_with(n: u64, u: f64, j: f64, bounds: RegimeBounds) -> Regime {
    let nsq = (n as f64).powi(2);
    if j < bounds.fock_below * u {
        Regime::Fock
    } else if j > bounds.rabi_factor * nsq * u {
        Regime::Rabi
    } else {
        Regime::Josephson
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fock_limit_levels() {
        let vals = eigenvalues(20, 1.0, 0.0).unwrap();
        assert_eq!(vals.len(), 21);
        let mut expected: Vec<f64> = (-10..=10).map(|m: i32| (m * m) as f64).collect();
        expected.sort_by(f64::total_cmp);
        assert_eq!(vals, expected);
    }

    #[test]
    fn rabi_limit_levels() {
        let vals = eigenvalues(20, 0.0, 1.0).unwrap();
        for (l, v) in vals.iter().enumerate() {
            assert_relative_eq!(*v, l as f64 - 10.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn n2_closed_form() {
        let vals = eigenvalues(2, 1.0, 1.0).unwrap();
        let s5 = 5f64.sqrt();
        assert_relative_eq!(vals[0], (1.0 - s5) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-14);
        assert_relative_eq!(vals[2], (1.0 + s5) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvalue_errors() {
        assert!(eigenvalues(1, 1.0, 1.0).is_err());
        assert!(eigenvalues(4, 0.0, 0.0).is_err());
        assert!(matches!(eigenvalues(6000, 1.0, 1.0), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn sweep_at_zero_tunneling() {
        let table = spectrum_sweep(20, &[0.0]).unwrap();
        let levels = &table.levels[0];
        assert_eq!(levels.len(), 21);
        assert_eq!(levels[0], 0.0);
        assert_eq!(levels[1], 1.0);
        assert_eq!(levels[3], 4.0);
        assert!(spectrum_sweep(20, &[]).is_err());
        assert!(spectrum_sweep(20, &[-1.0]).is_err());
    }

    #[test]
    fn default_grid_spans_regimes() {
        let grid = default_ratio_grid(20, DEFAULT_GRID_POINTS);
        assert_eq!(grid.len(), 200);
        assert_relative_eq!(grid[0], 1e-2, max_relative = 1e-12);
        assert_relative_eq!(grid[199], 2000.0, max_relative = 1e-12);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_classify(100, 1.0, 0.1), Regime::Fock);
        assert_eq!(regime_classify(100, 1.0, 25.0), Regime::Josephson);
        assert_eq!(regime_classify(100, 1.0, 1e5), Regime::Rabi);
        assert_eq!(regime_classify(100, 0.0, 1.0), Regime::Rabi);
        let loose = RegimeBounds { fock_below: 1.0, rabi_factor: 0.01 };
        assert_eq!(regime_classify_with(100, 1.0, 200.0, loose), Regime::Rabi);
    }
}
