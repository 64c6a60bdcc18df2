//! Large-`n` limits of the infinite-temperature block ensemble: the
//! limiting shape measure, the sub-extensive energy coefficients, the
//! entropy growth law, and the spin-1 limiting distribution.
//!
//! After rescaling a shape by `zeta_i = (lambda_i - n/d)/sqrt(n)`, the
//! squared-multiplicity weights converge to a Gaussian-ensemble density
//! `phi_d` on the ordered zero-sum simplex.  Ground-state energies then
//! scale as `-E_d sqrt(n)` with a spectrum-independent coefficient
//! `E_d = <-sum_k k zeta_k>`, and degeneracy entropies grow as
//! `(d(d-1)/4) ln n`.  Everything here is cross-checked against exact
//! finite-`n` sums from the combinatorics modules.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, hermitian_eigenvalues, CMat};
use crate::partitions::{
    enumerate_partitions, ln_irrep_dimension, plancherel_prob, spin_infinite_temperature_probs,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Integration cutoff for the rescaled components; the Gaussian factor
/// makes the discarded tails smaller than `e^{-36 d}`.
const COMPONENT_CUTOFF: f64 = 6.0;

/// A rescaled shape: `d` ordered components summing to zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledShape {
    zeta: Vec<f64>,
}

impl ScaledShape {
    /// Validates ordering `zeta_1 >= ... >= zeta_d` and the zero-sum
    /// constraint (within `1e-9`), then re-centers exactly.
    pub fn new(zeta: Vec<f64>) -> Result<Self> {
        if zeta.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a scaled shape needs at least 2 components, got {}",
                zeta.len()
            )));
        }
        if zeta.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput(
                "scaled shape components must be finite".into(),
            ));
        }
        if zeta.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "scaled shape components must be non-increasing, got {zeta:?}"
            )));
        }
        let mean = zeta.iter().sum::<f64>() / zeta.len() as f64;
        let scale = zeta.iter().map(|z| z.abs()).fold(1.0_f64, f64::max);
        if mean.abs() > 1e-9 * scale {
            return Err(Error::InvalidInput(format!(
                "scaled shape must sum to zero, got sum {}",
                mean * zeta.len() as f64
            )));
        }
        let zeta = zeta.into_iter().map(|z| z - mean).collect();
        Ok(Self { zeta })
    }

    /// The ordered components.
    pub fn components(&self) -> &[f64] {
        &self.zeta
    }

    /// Number of components `d`.
    pub fn dim(&self) -> usize {
        self.zeta.len()
    }
}

/// Normalization constant of the limiting density,
/// `C_d = d^{d^2/2} / ((2 pi)^{(d-1)/2} prod_{j<d} j!)`.
///
/// Equivalently `d^{(d(d-1)+1)/2} (d/2pi)^{(d-1)/2} / prod j!`; the split
/// form keeps the powers in one place.  Normalization is over the ordered
/// zero-sum domain with `zeta_d` eliminated, i.e. Lebesgue measure in the
/// remaining `d-1` coordinates.
pub fn normalization_constant(d: usize) -> f64 {
    let df = d as f64;
    let mut log_c = 0.5 * df * df * df.ln() - 0.5 * (df - 1.0) * (2.0 * PI).ln();
    for j in 1..d {
        log_c -= crate::numerics::ln_factorial(j as u64);
    }
    log_c.exp()
}

/// The limiting shape density
/// `phi_d(zeta) = C_d prod_{i<j} (zeta_i - zeta_j)^2 e^{-(d/2) sum zeta^2}`.
pub fn plancherel_density(shape: &ScaledShape) -> f64 {
    let zeta = shape.components();
    let d = zeta.len();
    let mut vandermonde_sq = 1.0;
    for i in 0..d {
        for j in i + 1..d {
            let diff = zeta[i] - zeta[j];
            vandermonde_sq *= diff * diff;
        }
    }
    let gauss = (-0.5 * d as f64 * zeta.iter().map(|z| z * z).sum::<f64>()).exp();
    normalization_constant(d) * vandermonde_sq * gauss
}

/// Draws one rescaled shape from the limiting density.
///
/// The density is exactly the ordered-eigenvalue law of a traceless
/// Gaussian Hermitian matrix: sampling a standard Hermitian Gaussian
/// (unit-variance diagonal, unit total variance off-diagonal), removing
/// the trace, and dividing the eigenvalues by `sqrt(d)` reproduces
/// `phi_d` with no adjustable constant.
pub fn sample_scaled_shape<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ScaledShape> {
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "sampler needs d >= 2, got {d}"
        )));
    }
    let mut h = CMat::zeros(d, d);
    for k in 0..d {
        h[(k, k)] = Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0);
        for l in k + 1..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let entry = Complex64::new(re, im) / 2.0_f64.sqrt();
            h[(k, l)] = entry;
            h[(l, k)] = entry.conj();
        }
    }
    let trace: f64 = (0..d).map(|k| h[(k, k)].re).sum();
    for k in 0..d {
        h[(k, k)] -= Complex64::new(trace / d as f64, 0.0);
    }
    let mut eig = hermitian_eigenvalues(&h);
    eig.reverse();
    let scale = (d as f64).sqrt();
    let mean = eig.iter().sum::<f64>() / d as f64;
    let zeta: Vec<f64> = eig.iter().map(|e| (e - mean) / scale).collect();
    Ok(ScaledShape { zeta })
}

/// `-sum_k k zeta_k`: the rescaled ground-state energy magnitude of a
/// shape on the unit-gap ladder spectrum (using `sum zeta = 0`).
fn energy_observable(shape: &ScaledShape) -> f64 {
    -shape
        .components()
        .iter()
        .enumerate()
        .map(|(i, &z)| (i + 1) as f64 * z)
        .sum::<f64>()
}

/// The sub-extensive energy coefficient `E_d` by adaptive quadrature over
/// the ordered zero-sum domain; available for `d = 2, 3`.
///
/// The ground-state energy of a shape on the unit-gap ladder is
/// `sqrt(n) sum_k k zeta_k`, so `E_{infinity,0} -> -E_d sqrt(n)` with
/// `E_d = integral of phi_d times (-sum k zeta_k)`.  Closed forms:
/// `E_2 = sqrt(2/pi)`, `E_3 = (9/4) sqrt(3/pi)`.
pub fn energy_coefficient(d: usize) -> Result<f64> {
    match d {
        2 => {
            let value = adaptive_simpson(
                |x| {
                    let shape = ScaledShape { zeta: vec![x, -x] };
                    plancherel_density(&shape) * energy_observable(&shape)
                },
                0.0,
                COMPONENT_CUTOFF,
                1e-10,
            );
            Ok(value)
        }
        3 => Ok(ordered_simplex_integral_d3(|shape| {
            energy_observable(shape)
        })),
        _ => Err(Error::InvalidInput(format!(
            "quadrature covers d = 2 or 3 (got {d}); use the Monte Carlo estimator beyond"
        ))),
    }
}

/// Adaptive 2-dim quadrature of `phi_3 * f` over
/// `zeta_1 >= zeta_2 >= -zeta_1/2`, `zeta_1 >= 0`.
fn ordered_simplex_integral_d3(f: impl Fn(&ScaledShape) -> f64 + Copy) -> f64 {
    adaptive_simpson(
        |z1| {
            adaptive_simpson(
                |z2| {
                    let shape = ScaledShape {
                        zeta: vec![z1, z2, -z1 - z2],
                    };
                    plancherel_density(&shape) * f(&shape)
                },
                -z1 / 2.0,
                z1,
                1e-11,
            )
        },
        0.0,
        COMPONENT_CUTOFF,
        1e-9,
    )
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `E_d` for `2 <= d <= 7` from `samples` draws
/// of the limiting shape density.
///
/// Batches run in parallel; each batch derives its generator from the
/// master seed via a distinct stream, and the reduction order is fixed,
/// so results are reproducible for a given `(seed, samples)` regardless
/// of thread scheduling.
pub fn energy_coefficient_mc(d: usize, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if !(2..=7).contains(&d) {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo coefficient covers 2 <= d <= 7, got {d}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    const BATCHES: usize = 64;
    let per_batch = samples.div_ceil(BATCHES);
    let batch_stats: Vec<(f64, f64, usize)> = (0..BATCHES)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64 + 1);
            let count = per_batch.min(samples - (batch * per_batch).min(samples));
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let shape = sample_scaled_shape(d, &mut rng).expect("d validated");
                let v = energy_observable(&shape);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq, count)
        })
        .collect();
    // Sequential reduction in batch order keeps the rounding deterministic.
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (s, s2, c) in batch_stats {
        sum += s;
        sum_sq += s2;
        count += c;
    }
    let mean = sum / count as f64;
    let variance = (sum_sq / count as f64 - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        value: mean,
        standard_error: (variance / count as f64).sqrt(),
        samples: count,
    })
}

/// Leading term of the degeneracy entropy at infinite temperature,
/// `(d(d-1)/4) ln n`.
pub fn entropy_asymptote(d: usize, n: u32) -> f64 {
    let df = d as f64;
    df * (df - 1.0) / 4.0 * f64::from(n).ln()
}

/// Exact degeneracy entropy of the infinite-temperature block ensemble,
/// `sum_lambda p^lambda_0 ln(d_lambda)`.
pub fn exact_entropy_beta0(n: u32, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("need d >= 2, got {d}")));
    }
    let mut entropy = 0.0;
    for shape in enumerate_partitions(n, d) {
        let p = plancherel_prob(&shape);
        if p > 0.0 {
            entropy += p * ln_irrep_dimension(&shape);
        }
    }
    Ok(entropy)
}

/// Exact degeneracy entropy for spin ensembles,
/// `sum_J p^J_0 ln(2J+1)`.
pub fn exact_spin_entropy_beta0(n: u32, two_s: u32) -> Result<f64> {
    let probs = spin_infinite_temperature_probs(n, two_s)?;
    Ok(probs
        .iter()
        .map(|(&two_j, &p)| p * (f64::from(two_j) + 1.0).ln())
        .sum())
}

/// Asymptotic spin-1 block distribution at infinite temperature,
/// `p(n, J) = (3 sqrt(3) / (2 sqrt(pi))) J^2 n^{-3/2} e^{-3J^2/(4n)}`,
/// normalized so that the integral over `J in [0, infinity)` is 1.
pub fn spin1_limit_distribution(n: u32, j: f64) -> f64 {
    let nf = f64::from(n);
    let prefactor = 3.0 * 3.0_f64.sqrt() / (2.0 * PI.sqrt());
    prefactor * j * j * nf.powf(-1.5) * (-3.0 * j * j / (4.0 * nf)).exp()
}

/// The spin-1 limiting coefficients: mean block label (hence energy
/// magnitude per `sqrt(n)`) `4/sqrt(3 pi)` and entropy slope `1/2` (of
/// `ln n`).
pub fn spin1_limits() -> (f64, f64) {
    (4.0 / (3.0 * PI).sqrt(), 0.5)
}
