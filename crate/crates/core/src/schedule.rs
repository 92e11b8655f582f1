//! Time-dependent coefficients `U(t)`, `J(t)` for two Gaussian wavepackets
//! approaching each other at uniform speed.
//!
//! Time is measured in units of `1/U₀`. Shapes come from overlap integrals of
//! normalized cigar-shaped Gaussians; magnitudes are fixed by calibration so
//! that `U(0) = 1` and `N·U₀ = ratio·J₀`.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};

/// Aspect ratio σ_z/σ_ρ of the default cigar-shaped traps.
pub const DEFAULT_ASPECT: f64 = 10.0;
/// Default initial separation in units of the width along the merge axis.
pub const DEFAULT_SEPARATION_WIDTHS: f64 = 6.0;
/// Default calibration ratio N·U₀/J₀.
pub const DEFAULT_RATIO: f64 = 4.0;
/// Initial tunneling above this fraction of `J₀` triggers a warning.
pub const INITIAL_TUNNELING_WARN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Merge along x, across the narrow radial width σ_ρ.
    Radial,
    /// Merge along the long axis z with width σ_z.
    Axial,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Radial => "radial",
            Direction::Axial => "axial",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "radial" => Ok(Direction::Radial),
            "axial" => Ok(Direction::Axial),
            other => Err(Error::InvalidParameter(format!("unknown direction {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapGeometry {
    pub sigma_r: f64,
    pub sigma_z: f64,
    /// Initial center-to-center distance, in the same units as the widths.
    pub separation0: f64,
    pub direction: Direction,
    /// Merge duration in units of `1/U₀`.
    pub t_merge: f64,
}

impl TrapGeometry {
    /// Cigar traps with σ_ρ = 1, σ_z = `aspect`, starting `sep_widths` merge-axis
    /// widths apart.
    pub fn cigar(direction: Direction, aspect: f64, sep_widths: f64, t_merge: f64) -> Self {
        let mut g = Self {
            sigma_r: 1.0,
            sigma_z: aspect,
            separation0: 0.0,
            direction,
            t_merge,
        };
        g.separation0 = sep_widths * g.merge_width();
        g
    }

    /// Width σ_m along the merge direction.
    pub fn merge_width(&self) -> f64 {
        match self.direction {
            Direction::Radial => self.sigma_r,
            Direction::Axial => self.sigma_z,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_r", self.sigma_r),
            ("sigma_z", self.sigma_z),
            ("separation0", self.separation0),
            ("t_merge", self.t_merge),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::DegenerateGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_merge).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                t_merge: self.t_merge,
            });
        }
        Ok(())
    }

    /// Center-to-center distance `x₀(1 − t/t_m)`.
    pub fn separation(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.separation0 * (1.0 - t / self.t_merge))
    }

    /// `∫|φ|⁴ d³r` for one normalized wavepacket.
    pub fn self_overlap(&self) -> f64 {
        1.0 / (2.0 * 2f64.sqrt() * PI.powf(1.5) * self.sigma_r * self.sigma_r * self.sigma_z)
    }

    /// `½∫(|φ₁|⁴ + |φ₂|⁴ − 2|φ₁|²|φ₂|²) d³r` at center distance `d`, coupling g = 1.
    pub fn raw_u_shape(&self, d: f64) -> f64 {
        let w = self.merge_width();
        -self.self_overlap() * (-d * d / (2.0 * w * w)).exp_m1()
    }

    /// Overlap `⟨φ₁|φ₂⟩ = exp(−d²/4σ_m²)` at center distance `d`.
    pub fn raw_j_shape(&self, d: f64) -> f64 {
        let w = self.merge_width();
        (-d * d / (4.0 * w * w)).exp()
    }

    /// `J(0)/J₀` for this geometry.
    pub fn initial_tunneling_fraction(&self) -> f64 {
        self.raw_j_shape(self.separation0) / self.raw_j_shape(0.0)
    }
}

/// Calibrated `U(t)`, `J(t)` for one geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeSchedule {
    geometry: TrapGeometry,
    u0: f64,
    j0: f64,
    n_cal: u64,
    ratio: f64,
    u_norm: f64,
    j_norm: f64,
}

impl MergeSchedule {
    /// Scale the raw shapes so that `U(0) = 1` and `J(t_m) = n/ratio`.
    pub fn calibrate(geometry: TrapGeometry, n: u64, ratio: f64) -> Result<Self> {
        geometry.validate()?;
        ensure_finite("ratio", ratio)?;
        if ratio <= 0.0 {
            return Err(Error::InvalidParameter(format!("ratio must be positive, got {ratio}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "calibration atom number must be at least 2, got {n}"
            )));
        }
        let u_norm = geometry.raw_u_shape(geometry.separation0);
        if !(u_norm > 0.0 && u_norm.is_finite()) {
            return Err(Error::DegenerateGeometry(format!(
                "interaction shape at the initial separation is {u_norm}"
            )));
        }
        let j_norm = geometry.raw_j_shape(0.0);
        let initial = geometry.initial_tunneling_fraction();
        if initial > INITIAL_TUNNELING_WARN {
            log::warn!(
                "initial tunneling is {initial:.3e} of its final value; traps start too close to be independent"
            );
        }
        Ok(Self {
            geometry,
            u0: 1.0,
            j0: n as f64 / ratio,
            n_cal: n,
            ratio,
            u_norm,
            j_norm,
        })
    }

    /// Re-run the calibration on this schedule's geometry.
    pub fn recalibrate(&self, n: u64, ratio: f64) -> Result<Self> {
        Self::calibrate(self.geometry, n, ratio)
    }

    pub fn geometry(&self) -> &TrapGeometry {
        &self.geometry
    }

    pub fn t_merge(&self) -> f64 {
        self.geometry.t_merge
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }

    pub fn n_cal(&self) -> u64 {
        self.n_cal
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn u_at(&self, t: f64) -> Result<f64> {
        let d = self.geometry.separation(t)?;
        Ok(self.u0 * self.geometry.raw_u_shape(d) / self.u_norm)
    }

    pub fn j_at(&self, t: f64) -> Result<f64> {
        let d = self.geometry.separation(t)?;
        Ok(self.j0 * self.geometry.raw_j_shape(d) / self.j_norm)
    }

    /// `(U(t), J(t))`.
    pub fn sample(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.u_at(t)?, self.j_at(t)?))
    }

    /// Upper bounds of `U` and `J` over the merge window.
    pub fn maxima(&self) -> (f64, f64) {
        (self.u0, self.j0)
    }
}
