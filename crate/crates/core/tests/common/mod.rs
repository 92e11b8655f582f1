#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomode_core::{Direction, TrapGeometry};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on [a, b] with panels of width ≤ `panel`.
pub fn composite_rule(a: f64, b: f64, panel: f64, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Normalized cigar Gaussian centered at `center` along the merge axis.
fn wavepacket(g: &TrapGeometry, center: f64, r: [f64; 3]) -> f64 {
    let [x, y, z] = r;
    let (dx, dz) = match g.direction {
        Direction::Radial => (x - center, z),
        Direction::Axial => (x, z - center),
    };
    let norm = 1.0 / (PI.powf(0.75) * g.sigma_r * g.sigma_z.sqrt());
    norm * (-(dx * dx + y * y) / (2.0 * g.sigma_r * g.sigma_r)).exp() * (-(dz * dz) / (2.0 * g.sigma_z * g.sigma_z)).exp()
}

fn grid(g: &TrapGeometry, d: f64) -> [Vec<(f64, f64)>; 3] {
    let reach = 7.0;
    let span = |sigma: f64, extra: f64| composite_rule(-extra - reach * sigma, extra + reach * sigma, sigma, 12);
    let (ex, ez) = match g.direction {
        Direction::Radial => (0.5 * d, 0.0),
        Direction::Axial => (0.0, 0.5 * d),
    };
    [span(g.sigma_r, ex), span(g.sigma_r, 0.0), span(g.sigma_z, ez)]
}

/// `½∫(|φ₁|⁴ + |φ₂|⁴ − 2|φ₁|²|φ₂|²) d³r` by 3D tensor-product quadrature.
pub fn quadrature_u(g: &TrapGeometry, d: f64) -> f64 {
    let [gx, gy, gz] = grid(g, d);
    let mut acc = 0.0;
    for &(x, wx) in &gx {
        for &(y, wy) in &gy {
            let mut line = 0.0;
            for &(z, wz) in &gz {
                let a = wavepacket(g, 0.5 * d, [x, y, z]);
                let b = wavepacket(g, -0.5 * d, [x, y, z]);
                let diff = a * a - b * b;
                line += wz * diff * diff;
            }
            acc += wx * wy * line;
        }
    }
    0.5 * acc
}

/// `∫φ₁φ₂ d³r` by 3D tensor-product quadrature.
pub fn quadrature_overlap(g: &TrapGeometry, d: f64) -> f64 {
    let [gx, gy, gz] = grid(g, d);
    let mut acc = 0.0;
    for &(x, wx) in &gx {
        for &(y, wy) in &gy {
            let mut line = 0.0;
            for &(z, wz) in &gz {
                line += wz * wavepacket(g, 0.5 * d, [x, y, z]) * wavepacket(g, -0.5 * d, [x, y, z]);
            }
            acc += wx * wy * line;
        }
    }
    acc
}

pub fn random_state(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// One line per checked criterion, visible with `--nocapture`.
pub fn report(criterion: &str, pass: bool, detail: impl std::fmt::Display) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
}
