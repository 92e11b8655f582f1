//! Time evolution of sector states under `H(t) = U(t) S_z² − J(t) S_x`.
//!
//! Each step applies the Cayley (Crank–Nicolson) map
//! `(I + i·dt/2·H)⁻¹ (I − i·dt/2·H)` with `H` sampled at the step midpoint.
//! The map is unitary for any `dt` and costs one tridiagonal solve.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observables::{self, CondensateReading, OneBodyDensityMatrix};
use crate::schedule::MergeSchedule;
use crate::spin::{self, SectorBasis, TridiagonalHamiltonian};
use crate::states::{MixtureState, SectorState};
use crate::tridiag;

/// Largest `dt · max(|diag|, N·J/2)` tolerated before steps are added.
pub const STABILITY_BOUND: f64 = 0.1;
/// Largest N accepted by [`dense_reference_evolve`].
pub const DENSE_GUARD: usize = 200;

/// Time-dependent coefficients `(U(t), J(t))` on `[0, duration]`.
pub trait Coefficients: Sync {
    fn duration(&self) -> f64;
    fn coefficients(&self, t: f64) -> Result<(f64, f64)>;
    /// Upper bounds of `|U|` and `|J|` over the window.
    fn bounds(&self) -> (f64, f64);
}

impl Coefficients for MergeSchedule {
    fn duration(&self) -> f64 {
        self.t_merge()
    }

    fn coefficients(&self, t: f64) -> Result<(f64, f64)> {
        self.sample(t)
    }

    fn bounds(&self) -> (f64, f64) {
        self.maxima()
    }
}

/// Constant `(U, J)` held for a fixed duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenSchedule {
    pub u: f64,
    pub j: f64,
    pub duration: f64,
}

impl Coefficients for FrozenSchedule {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn coefficients(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                t_merge: self.duration,
            });
        }
        Ok((self.u, self.j))
    }

    fn bounds(&self) -> (f64, f64) {
        (self.u.abs(), self.j.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// Minimum number of steps per unit of dimensionless time.
    pub steps_per_unit_time: usize,
    /// Number of recorded samples, including both endpoints.
    pub sample_count: usize,
    pub norm_tolerance: f64,
    /// Record instantaneous-eigenlevel populations at each sample.
    pub track_levels: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            steps_per_unit_time: 2000,
            sample_count: 201,
            norm_tolerance: 1e-9,
            track_levels: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_unit_time == 0 {
            return Err(Error::InvalidParameter("steps_per_unit_time must be positive".into()));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidParameter("sample_count must be at least 2".into()));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(Error::InvalidParameter("norm_tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Step count for a sector of `n_total` atoms: the requested resolution,
    /// raised to satisfy the stability bound, rounded up to a multiple of the
    /// sampling interval count.
    pub fn steps_for(&self, n_total: u64, coefficients: &dyn Coefficients) -> usize {
        let duration = coefficients.duration();
        let (u_max, j_max) = coefficients.bounds();
        let half = n_total as f64 / 2.0;
        let stiffness = (u_max * half * half).max(n_total as f64 * j_max / 2.0);
        let requested = (self.steps_per_unit_time as f64 * duration).ceil() as usize;
        let guarded = (duration * stiffness / STABILITY_BOUND).ceil() as usize;
        let intervals = self.sample_count - 1;
        let steps = requested.max(guarded).max(1);
        steps.div_ceil(intervals) * intervals
    }

    pub fn sample_times(&self, duration: f64) -> Vec<f64> {
        let intervals = self.sample_count - 1;
        (0..=intervals)
            .map(|i| duration * (i as f64 / intervals as f64))
            .collect()
    }
}

/// Reusable Crank–Nicolson stepper for one sector.
struct Stepper {
    m_sq: Vec<f64>,
    ladder: Vec<f64>,
    rhs: Vec<Complex64>,
    c_prime: Vec<Complex64>,
}

impl Stepper {
    fn new(basis: SectorBasis) -> Self {
        let n = basis.dim();
        Self {
            m_sq: (0..n).map(|k| basis.m(k).powi(2)).collect(),
            ladder: (0..n.saturating_sub(1)).map(|k| basis.ladder(k)).collect(),
            rhs: vec![Complex64::default(); n],
            c_prime: vec![Complex64::default(); n],
        }
    }

    /// Advance `psi` by `dt` under constant `(u, j)`.
    fn step(&mut self, psi: &mut [Complex64], u: f64, j: f64, dt: f64) {
        let n = psi.len();
        let alpha = 0.5 * dt;
        let i_alpha = Complex64::new(0.0, alpha);
        let off = |k: usize| -0.5 * j * self.ladder[k];

        // rhs = (I − iαH) ψ
        for k in 0..n {
            let mut h_psi = psi[k] * (u * self.m_sq[k]);
            if k > 0 {
                h_psi += psi[k - 1] * off(k - 1);
            }
            if k + 1 < n {
                h_psi += psi[k + 1] * off(k);
            }
            self.rhs[k] = psi[k] - i_alpha * h_psi;
        }

        // (I + iαH) x = rhs. The Hermitian part of the matrix is the identity,
        // so elimination without pivoting is stable.
        let mut prev_c = Complex64::default();
        let mut prev_r = Complex64::default();
        for k in 0..n {
            let sub = if k > 0 { i_alpha * off(k - 1) } else { Complex64::default() };
            let sup = if k + 1 < n { i_alpha * off(k) } else { Complex64::default() };
            let pivot = Complex64::new(1.0, alpha * u * self.m_sq[k]) - sub * prev_c;
            let inv = pivot.inv();
            prev_c = sup * inv;
            prev_r = (self.rhs[k] - sub * prev_r) * inv;
            self.c_prime[k] = prev_c;
            psi[k] = prev_r;
        }
        for k in (0..n.saturating_sub(1)).rev() {
            let next = psi[k + 1];
            psi[k] -= self.c_prime[k] * next;
        }
    }
}

fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

/// Core loop: evolves `psi` across the window, calling `on_sample` at every
/// sample time (including t = 0 and the end) with the current amplitudes.
fn propagate<F>(
    state: &SectorState,
    coefficients: &dyn Coefficients,
    config: &EvolutionConfig,
    mut on_sample: F,
) -> Result<(Vec<Complex64>, usize)>
where
    F: FnMut(usize, f64, &[Complex64], f64) -> Result<()>,
{
    config.validate()?;
    spin::check_normalized(state.amplitudes())?;
    let n_total = state.n_total();
    let duration = coefficients.duration();
    let steps = config.steps_for(n_total, coefficients);
    let per_sample = steps / (config.sample_count - 1);
    let dt = duration / steps as f64;
    let times = config.sample_times(duration);

    let mut stepper = Stepper::new(state.basis());
    let mut psi = state.amplitudes().to_vec();
    let initial_norm = norm_sqr(&psi).sqrt();
    on_sample(0, 0.0, &psi, 0.0)?;

    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let (u, j) = coefficients.coefficients(t_mid)?;
        stepper.step(&mut psi, u, j, dt);

        let norm = norm_sqr(&psi).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite { n_total, step });
        }
        let drift = (norm - initial_norm).abs();
        if drift > config.norm_tolerance {
            return Err(Error::NormDrift { n_total, step, drift });
        }
        if (step + 1) % per_sample == 0 {
            let index = (step + 1) / per_sample;
            on_sample(index, times[index], &psi, drift)?;
        }
    }
    Ok((psi, steps))
}

/// Result of [`evolve_sector`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorEvolution {
    pub final_state: SectorState,
    pub times: Vec<f64>,
    /// Amplitudes at each sample time.
    pub samples: Vec<Vec<Complex64>>,
    pub steps: usize,
}

pub fn evolve_sector(
    state: &SectorState,
    coefficients: &dyn Coefficients,
    config: &EvolutionConfig,
) -> Result<SectorEvolution> {
    let mut samples = Vec::with_capacity(config.sample_count);
    let (psi, steps) = propagate(state, coefficients, config, |_, _, amps, _| {
        samples.push(amps.to_vec());
        Ok(())
    })?;
    Ok(SectorEvolution {
        final_state: state.with_amplitudes(psi),
        times: config.sample_times(coefficients.duration()),
        samples,
        steps,
    })
}

/// Snapshot of the merged system at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub t: f64,
    pub u: f64,
    pub j: f64,
    pub rho: OneBodyDensityMatrix,
    pub reading: CondensateReading,
    /// Weighted `⟨H(t)⟩`.
    pub energy: f64,
    /// Largest `|‖ψ‖ − 1|` among sectors.
    pub norm_drift: f64,
    pub spread90: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub records: Vec<SampleRecord>,
    /// Atom number used to normalize η.
    pub n_mean: f64,
    /// `(N, steps)` per sector, in sector order.
    pub steps: Vec<(u64, usize)>,
}

impl Trajectory {
    pub fn last(&self) -> &SampleRecord {
        self.records.last().expect("trajectory has at least two samples")
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.records.iter().fold(0.0, |a, r| a.max(r.norm_drift))
    }
}

struct SectorTrace {
    rho: Vec<OneBodyDensityMatrix>,
    energy: Vec<f64>,
    drift: Vec<f64>,
    levels: Vec<Vec<f64>>,
    steps: usize,
}

fn trace_sector(
    state: &SectorState,
    coefficients: &dyn Coefficients,
    config: &EvolutionConfig,
) -> Result<SectorTrace> {
    let basis = state.basis();
    let mut trace = SectorTrace {
        rho: Vec::with_capacity(config.sample_count),
        energy: Vec::with_capacity(config.sample_count),
        drift: Vec::with_capacity(config.sample_count),
        levels: Vec::new(),
        steps: 0,
    };
    let (_, steps) = propagate(state, coefficients, config, |_, t, psi, drift| {
        let (u, j) = coefficients.coefficients(t)?;
        let h = TridiagonalHamiltonian::new(basis, u, j)?;
        trace.rho.push(observables::sector_density(basis, psi));
        trace.energy.push(h.expectation(psi));
        trace.drift.push(drift);
        if config.track_levels {
            trace.levels.push(observables::populations_of(&h, psi)?.grouped());
        }
        Ok(())
    })?;
    trace.steps = steps;
    Ok(trace)
}

/// Evolve every sector independently and record the weighted observables.
/// Sectors may run in parallel; the reduction order is the sector order.
pub fn evolve_mixture(
    mixture: &MixtureState,
    coefficients: &dyn Coefficients,
    config: &EvolutionConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let traces: Vec<Result<SectorTrace>> = mixture
        .sectors()
        .par_iter()
        .map(|s| trace_sector(s, coefficients, config))
        .collect();
    let traces: Vec<SectorTrace> = traces.into_iter().collect::<Result<_>>()?;

    let times = config.sample_times(coefficients.duration());
    let n_mean = mixture.n_mean();
    let mut records = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let (u, j) = coefficients.coefficients(t)?;
        let rho = observables::combine(
            mixture
                .sectors()
                .iter()
                .zip(&traces)
                .map(|(s, tr)| (s.weight(), tr.rho[i])),
        );
        let energy = mixture
            .sectors()
            .iter()
            .zip(&traces)
            .map(|(s, tr)| s.weight() * tr.energy[i])
            .sum();
        let norm_drift = traces.iter().fold(0.0_f64, |a, tr| a.max(tr.drift[i]));
        let spread90 = if config.track_levels {
            let width = traces.iter().map(|tr| tr.levels[i].len()).max().unwrap_or(0);
            let mut combined = vec![0.0; width];
            for (s, tr) in mixture.sectors().iter().zip(&traces) {
                for (c, p) in combined.iter_mut().zip(&tr.levels[i]) {
                    *c += s.weight() * p;
                }
            }
            Some(observables::spread_index(&combined))
        } else {
            None
        };
        records.push(SampleRecord {
            t,
            u,
            j,
            rho,
            reading: observables::condensate_reading(&rho, n_mean)?,
            energy,
            norm_drift,
            spread90,
        });
    }
    let steps = mixture
        .sectors()
        .iter()
        .zip(&traces)
        .map(|(s, tr)| (s.n_total(), tr.steps))
        .collect();
    Ok(Trajectory {
        times,
        records,
        n_mean,
        steps,
    })
}

/// Exact `e^{−iHt}ψ` for constant `(u, j)` via full eigendecomposition.
pub fn dense_reference_evolve(state: &SectorState, u: f64, j: f64, t: f64) -> Result<SectorState> {
    let n = state.n_total() as usize;
    if n > DENSE_GUARD {
        return Err(Error::SizeGuard { n, limit: DENSE_GUARD });
    }
    let h = TridiagonalHamiltonian::new(state.basis(), u, j)?;
    let (values, z) = tridiag::eigen_decomposition(h.diag(), h.offdiag())?;
    let psi = state.amplitudes();
    let mut out = vec![Complex64::default(); psi.len()];
    for (l, &e) in values.iter().enumerate() {
        let v = z.column(l);
        let overlap: Complex64 = v.iter().zip(psi).map(|(a, b)| b * a).sum();
        let coeff = overlap * Complex64::from_polar(1.0, -e * t);
        for (o, a) in out.iter_mut().zip(v) {
            *o += coeff * a;
        }
    }
    Ok(state.with_amplitudes(out))
}
