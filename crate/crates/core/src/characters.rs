//! Per-block partition functions.
//!
//! A permutation-invariant ensemble of `n` qudits decomposes into blocks
//! labelled by partitions `lambda`; the block partition function is the
//! Schur polynomial `s_lambda` evaluated in the Boltzmann weights
//! `x_k = exp(-beta eps_k)`.
//!
//! Three evaluation strategies are provided:
//!
//! * [`block_partition_function`] works in the linear domain: the
//!   bialternant determinant ratio when the weights are distinct, the
//!   Jacobi-Trudi determinant in complete homogeneous polynomials near a
//!   degeneracy.  It reports an error when the result overflows.
//! * [`ln_block_partition_function`] works entirely in the log domain by
//!   summing over interlacing patterns (all terms positive, so no
//!   cancellation and no overflow for any `beta * n`); this is the
//!   production path for everything downstream.  [`block_energy`] carries
//!   the analytic `beta`-derivative through the same recursion.
//! * closed forms: the su(3) double sum ([`su3_closed_form`]) and the
//!   spin sinh ratio ([`spin_ln_block_partition_function`]).

use crate::error::{Error, Result};
use crate::numerics::{ln_binomial, ln_sinh, log_sum_exp};
use crate::partitions::{ln_irrep_dimension, Partition};
use crate::su_cartan::SpectrumSpec;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Cap on the number of simultaneously live partitions in the
/// interlacing-pattern recursion.
const MAX_DP_CELLS: usize = 1 << 22;

/// Threshold on `|x_i - x_j|` below which the linear-domain evaluation
/// switches from the bialternant ratio to the Jacobi-Trudi determinant.
const DEGENERACY_THRESHOLD: f64 = 1e-6;

fn validate_block_args(lambda: &Partition, spec: &SpectrumSpec, beta: f64) -> Result<()> {
    if lambda.num_parts() != spec.num_levels() {
        return Err(Error::InvalidInput(format!(
            "partition {lambda} has {} parts but the spectrum has {} levels",
            lambda.num_parts(),
            spec.num_levels()
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

/// Calls `f(mu, t)` for every partition `mu` of length `k - 1` interlacing
/// `nu` (of length `k >= 2`), where `t = |nu| - |mu|`.
fn for_each_interlacing(nu: &[u32], mut f: impl FnMut(&[u32], u32)) {
    let k = nu.len();
    debug_assert!(k >= 2);
    let total: u32 = nu.iter().sum();
    let mut mu: Vec<u32> = nu[1..].to_vec();
    loop {
        f(&mu, total - mu.iter().sum::<u32>());
        let mut i = 0;
        loop {
            if i == k - 1 {
                return;
            }
            if mu[i] < nu[i] {
                mu[i] += 1;
                break;
            }
            mu[i] = nu[i + 1];
            i += 1;
        }
    }
}

/// Log of the Schur polynomial `s_parts(exp(ln_y))` together with its
/// derivative with respect to a parameter on which the weights depend
/// through `d ln(y_j) = dln_y[j]`.
///
/// The recursion peels off one variable at a time using the branching rule
/// `s_nu(y_1..y_k) = sum_{mu interlaces nu} y_k^{|nu|-|mu|} s_mu(y_1..y_{k-1})`;
/// every contribution is positive, so each cell is a log-sum-exp and the
/// derivative a softmax-weighted average.
fn ln_schur_with_derivative(parts: &[u32], ln_y: &[f64], dln_y: &[f64]) -> Result<(f64, f64)> {
    let d = ln_y.len();
    debug_assert_eq!(parts.len(), d);
    debug_assert_eq!(dln_y.len(), d);
    if d == 1 {
        let m = parts[0] as f64;
        return Ok((m * ln_y[0], m * dln_y[0]));
    }
    let finalize = |terms: Vec<(f64, f64)>| -> (f64, f64) {
        let logs: Vec<f64> = terms.iter().map(|t| t.0).collect();
        let a = log_sum_exp(&logs);
        let g = terms.iter().map(|&(ai, gi)| (ai - a).exp() * gi).sum();
        (a, g)
    };
    // BTreeMap keeps the accumulation order deterministic, so repeated
    // evaluations are bit-identical (the CLI relies on reproducible output).
    let mut current: BTreeMap<Vec<u32>, (f64, f64)> = BTreeMap::new();
    current.insert(parts.to_vec(), (0.0, 0.0));
    for var in (1..d).rev() {
        let mut terms: BTreeMap<Vec<u32>, Vec<(f64, f64)>> = BTreeMap::new();
        for (nu, (a, g)) in &current {
            let mut overflow = false;
            for_each_interlacing(nu, |mu, t| {
                let entry = terms.entry(mu.to_vec()).or_default();
                entry.push((a + t as f64 * ln_y[var], g + t as f64 * dln_y[var]));
                if terms.len() > MAX_DP_CELLS {
                    overflow = true;
                }
            });
            if overflow {
                return Err(Error::DimensionCap(
                    "interlacing-pattern recursion exceeded the cell cap; reduce n or d".into(),
                ));
            }
        }
        current = terms
            .into_iter()
            .map(|(mu, list)| (mu, finalize(list)))
            .collect();
    }
    let closing: Vec<(f64, f64)> = current
        .into_iter()
        .map(|(mu, (a, g))| {
            let m = mu[0] as f64;
            (a + m * ln_y[0], g + m * dln_y[0])
        })
        .collect();
    Ok(finalize(closing))
}

/// Bialternant evaluation `det(y_k^{shifted_l}) / prod_{k<l} (y_k - y_l)`
/// for pairwise-distinct weights.
pub(crate) fn schur_bialternant(parts: &[u32], y: &[f64]) -> f64 {
    let d = y.len();
    let shifted: Vec<i32> = parts
        .iter()
        .enumerate()
        .map(|(l, &p)| p as i32 + (d - 1 - l) as i32)
        .collect();
    let num = DMatrix::<f64>::from_fn(d, d, |k, l| y[k].powi(shifted[l])).determinant();
    let mut den = 1.0;
    for k in 0..d {
        for l in k + 1..d {
            den *= y[k] - y[l];
        }
    }
    num / den
}

/// Jacobi-Trudi evaluation `det(h_{parts_i - i + j})`, valid for any
/// weights including exact degeneracies.
pub(crate) fn schur_jacobi_trudi(parts: &[u32], y: &[f64]) -> f64 {
    let d = y.len();
    let max_index = parts[0] as usize + d;
    let mut h = vec![0.0; max_index + 1];
    h[0] = 1.0;
    for &yj in y {
        for m in 1..=max_index {
            h[m] += yj * h[m - 1];
        }
    }
    DMatrix::<f64>::from_fn(d, d, |i, j| {
        let idx = parts[i] as i64 - i as i64 + j as i64;
        if (0..=max_index as i64).contains(&idx) {
            h[idx as usize]
        } else {
            0.0
        }
    })
    .determinant()
}

/// The block partition function `Z^lambda_beta = s_lambda(e^{-beta eps_1},
/// ..., e^{-beta eps_d})` in the linear domain.
///
/// Uses the bialternant ratio when all Boltzmann weights are pairwise
/// distinct and the Jacobi-Trudi determinant when any pair is closer than
/// `1e-6` (removable singularity of the ratio).  Overflow at large
/// `beta * n` is reported as an error; use [`ln_block_partition_function`]
/// in that regime.
pub fn block_partition_function(lambda: &Partition, spec: &SpectrumSpec, beta: f64) -> Result<f64> {
    validate_block_args(lambda, spec, beta)?;
    let eps = spec.levels();
    let e0 = eps[0];
    let x: Vec<f64> = eps.iter().map(|&e| (-beta * e).exp()).collect();
    // Scaled weights y = x / x_max stay in (0, 1]; the scale is restored at
    // the end through homogeneity of degree n.
    let y: Vec<f64> = eps.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let mut min_gap = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            min_gap = min_gap.min((x[i] - x[j]).abs());
        }
    }
    let s = if min_gap < DEGENERACY_THRESHOLD {
        schur_jacobi_trudi(lambda.parts(), &y)
    } else {
        schur_bialternant(lambda.parts(), &y)
    };
    let z = s * (-beta * e0 * lambda.n() as f64).exp();
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonFinite {
            context: "block partition function (use the log-domain evaluation for large beta*n)",
        });
    }
    Ok(z)
}

/// `ln Z^lambda_beta`, evaluated entirely in the log domain.
///
/// Robust for any `beta * n` (the interlacing-pattern recursion sums
/// positive terms only); this is the path used by the thermodynamic
/// routines.
pub fn ln_block_partition_function(
    lambda: &Partition,
    spec: &SpectrumSpec,
    beta: f64,
) -> Result<f64> {
    validate_block_args(lambda, spec, beta)?;
    if beta == 0.0 {
        return Ok(ln_irrep_dimension(lambda));
    }
    let eps = spec.levels();
    let e0 = eps[0];
    let ln_y: Vec<f64> = eps.iter().map(|&e| -beta * (e - e0)).collect();
    let dln_y = vec![0.0; eps.len()];
    let (ln_s, _) = ln_schur_with_derivative(lambda.parts(), &ln_y, &dln_y)?;
    Ok(ln_s - lambda.n() as f64 * beta * e0)
}

/// Mean block energy `E^lambda_beta = -d(ln Z^lambda_beta)/d beta`,
/// computed analytically by differentiating the interlacing-pattern
/// recursion (a softmax-weighted content average, not a finite
/// difference).
pub fn block_energy(lambda: &Partition, spec: &SpectrumSpec, beta: f64) -> Result<f64> {
    validate_block_args(lambda, spec, beta)?;
    let eps = spec.levels();
    let e0 = eps[0];
    let ln_y: Vec<f64> = eps.iter().map(|&e| -beta * (e - e0)).collect();
    let dln_y: Vec<f64> = eps.iter().map(|&e| -(e - e0)).collect();
    let (_, dlns) = ln_schur_with_derivative(lambda.parts(), &ln_y, &dln_y)?;
    // ln Z = ln s(y(beta)) - n beta e0, so E = -dlns + n e0.
    Ok(lambda.n() as f64 * e0 - dlns)
}

/// Ground-state energy of the block: the largest part fills the lowest
/// level, `E_lambda = sum_k lambda_k eps_k` with `eps` ascending.
pub fn block_ground_energy(lambda: &Partition, spec: &SpectrumSpec) -> Result<f64> {
    if lambda.num_parts() != spec.num_levels() {
        return Err(Error::InvalidInput(format!(
            "partition {lambda} has {} parts but the spectrum has {} levels",
            lambda.num_parts(),
            spec.num_levels()
        )));
    }
    Ok(lambda
        .parts()
        .iter()
        .zip(spec.levels())
        .map(|(&p, &e)| p as f64 * e)
        .sum())
}

/// `ln` of the su(3) closed-form double sum for `Z^lambda_beta`,
/// parameterised by the two diagonal-generator coefficients `(a1, a2)`.
///
/// With `x_j = lambda_j - lambda_{j+1}`:
///
/// ```text
/// Z = e^{beta a2 (2 x1 + x2)/3} sum_{k=0}^{x1} sum_{l=0}^{x2}
///       e^{-beta a2 (k+l)} sinh[beta a1 (k-l+x2+1)/2] / sinh[beta a1 / 2]
/// ```
///
/// The exponent of the prefactor is `(2 x1 + x2)/3`; see
/// [`calibrate_su3`] for the map from a spectrum to `(a1, a2)`.
pub fn ln_su3_closed_form(lambda: &Partition, a1: f64, a2: f64, beta: f64) -> Result<f64> {
    if lambda.num_parts() != 3 {
        return Err(Error::InvalidInput(format!(
            "the closed form needs a 3-part partition, got {lambda}"
        )));
    }
    if !(beta.is_finite() && beta >= 0.0) || !a1.is_finite() || !a2.is_finite() {
        return Err(Error::InvalidInput(
            "closed form needs finite parameters and beta >= 0".into(),
        ));
    }
    let diffs = lambda.part_differences();
    let (x1, x2) = (diffs[0], diffs[1]);
    // Half-argument of the sinh ratio; the ratio is even in u, so its
    // magnitude is used and the u -> 0 limit is the integer k - l + x2 + 1.
    let u = (beta * a1 / 2.0).abs();
    let mut terms = Vec::with_capacity(((x1 + 1) * (x2 + 1)) as usize);
    for k in 0..=x1 {
        for l in 0..=x2 {
            let m = (k as i64 - l as i64 + x2 as i64 + 1) as f64;
            let ratio = if u < 1e-8 {
                m.ln()
            } else {
                ln_sinh(u * m) - ln_sinh(u)
            };
            terms.push(-beta * a2 * (k + l) as f64 + ratio);
        }
    }
    Ok(beta * a2 * (2 * x1 + x2) as f64 / 3.0 + log_sum_exp(&terms))
}

/// Linear-domain variant of [`ln_su3_closed_form`]; errors on overflow.
pub fn su3_closed_form(lambda: &Partition, a1: f64, a2: f64, beta: f64) -> Result<f64> {
    let z = ln_su3_closed_form(lambda, a1, a2, beta)?.exp();
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonFinite {
            context: "su(3) closed form (use the log-domain evaluation for large beta*n)",
        });
    }
    Ok(z)
}

/// Coefficients `(a1, a2)` making the su(3) closed form agree with
/// [`block_partition_function`] for the given spectrum: with ascending
/// traceless levels `(eps_1, eps_2, eps_3)`,
/// `a1 = eps_3 - eps_2` and `a2 = -(3/2) eps_1`.
///
/// The map is fixed by matching the single-particle trace for
/// `lambda = (1,0,0)` across a beta grid (the unit tests re-verify this
/// and the agreement for every shape).
pub fn calibrate_su3(spec: &SpectrumSpec) -> Result<(f64, f64)> {
    if spec.num_levels() != 3 {
        return Err(Error::InvalidInput(format!(
            "su(3) calibration needs a 3-level spectrum, got {} levels",
            spec.num_levels()
        )));
    }
    let eps = spec.levels();
    Ok((eps[2] - eps[1], -1.5 * eps[0]))
}

/// Small-`beta` expansion of the symmetric-block partition function:
/// `d_sym (1 + beta^2 n (n + d) <<eps^2>> / (2 (d + 1)))` with
/// `d_sym = C(n + d - 1, n)` and `<<eps^2>>` the spectral variance.
///
/// Agrees with `block_partition_function((n, 0, ..., 0))` to third order
/// in `beta`; intended for `|beta| * max|eps| <~ 0.2`.
pub fn sym_partition_expansion(n: u32, d: u32, spec: &SpectrumSpec, beta: f64) -> Result<f64> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidInput(
            "expansion needs n >= 1 and d >= 2".into(),
        ));
    }
    if spec.num_levels() != d as usize {
        return Err(Error::InvalidInput(format!(
            "spectrum has {} levels, expected {d}",
            spec.num_levels()
        )));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let d_sym = ln_binomial((n + d - 1) as u64, n as u64).exp();
    let nf = n as f64;
    let df = d as f64;
    Ok(d_sym * (1.0 + beta * beta * nf * (nf + df) * spec.variance() / (2.0 * (df + 1.0))))
}

/// `ln Z^J_beta` for a collective spin block with unit level spacing:
/// `ln [ sinh(beta (2J+1)/2) / sinh(beta/2) ]`, with the `beta -> 0`
/// limit `ln(2J+1)`.  `two_j` is `2J`.
pub fn spin_ln_block_partition_function(two_j: u32, beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let b = beta.abs();
    if b < 1e-12 {
        return Ok(((two_j + 1) as f64).ln());
    }
    Ok(ln_sinh(b * (two_j + 1) as f64 / 2.0) - ln_sinh(b / 2.0))
}

/// Mean energy of a spin block with unit level spacing,
/// `-(2J+1)/2 coth(beta (2J+1)/2) + (1/2) coth(beta/2)`.
///
/// Below `|beta| = 1e-3` the two coth poles cancel catastrophically, so
/// the series `-beta J(J+1)/3 + beta^3 ((2J+1)^4 - 1)/720` is used there
/// (both paths agree to ~1e-10 at the crossover).
pub fn spin_block_energy(two_j: u32, beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let w = (two_j + 1) as f64;
    if beta.abs() < 1e-3 {
        let w2 = w * w;
        return Ok(-beta * (w2 - 1.0) / 12.0 + beta.powi(3) * (w2 * w2 - 1.0) / 720.0);
    }
    let coth = |x: f64| 1.0 / x.tanh();
    Ok(-w / 2.0 * coth(beta * w / 2.0) + 0.5 * coth(beta / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::richardson_derivative;
    use crate::partitions::{enumerate_partitions, irrep_multiplicity};
    use approx::assert_relative_eq;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn ladder(d: usize) -> SpectrumSpec {
        SpectrumSpec::ladder(d).unwrap()
    }

    fn skewed3() -> SpectrumSpec {
        SpectrumSpec::new(vec![-1.3, 0.2, 1.1]).unwrap()
    }

    #[test]
    fn single_particle_block_is_the_boltzmann_trace() {
        let spec = ladder(3);
        let lam = Partition::new(vec![1, 0, 0]).unwrap();
        for beta in [0.3f64, 1.0, 2.5] {
            let expect = beta.exp() + 1.0 + (-beta).exp();
            assert_relative_eq!(
                block_partition_function(&lam, &spec, beta).unwrap(),
                expect,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ln_block_partition_function(&lam, &spec, beta).unwrap(),
                expect.ln(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn two_row_blocks_match_the_spin_sinh_ratio() {
        let spec = SpectrumSpec::new(vec![-0.5, 0.5]).unwrap();
        for n in [2u32, 5, 8] {
            for two_j in (n % 2..=n).step_by(2) {
                let lam = Partition::new(vec![(n + two_j) / 2, (n - two_j) / 2]).unwrap();
                for beta in [0.1, 1.0, 5.0, 40.0] {
                    assert_relative_eq!(
                        ln_block_partition_function(&lam, &spec, beta).unwrap(),
                        spin_ln_block_partition_function(two_j, beta).unwrap(),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn adjoint_block_matches_tableau_enumeration() {
        // s_(2,1,0)(x1,x2,x3) expanded over the 8 semi-standard tableaux.
        let spec = ladder(3);
        let beta = 1.0;
        let x: Vec<f64> = spec.levels().iter().map(|&e| (-beta * e).exp()).collect();
        let monomials: [[u32; 3]; 7] = [
            [2, 1, 0],
            [2, 0, 1],
            [1, 2, 0],
            [1, 1, 1], // appears twice
            [1, 0, 2],
            [0, 2, 1],
            [0, 1, 2],
        ];
        let mut expect = 0.0;
        for mono in monomials {
            let term: f64 = mono
                .iter()
                .zip(&x)
                .map(|(&p, &xi)| xi.powi(p as i32))
                .product();
            expect += if mono == [1, 1, 1] { 2.0 * term } else { term };
        }
        let lam = Partition::new(vec![2, 1, 0]).unwrap();
        assert_relative_eq!(
            block_partition_function(&lam, &spec, beta).unwrap(),
            expect,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ln_block_partition_function(&lam, &spec, beta)
                .unwrap()
                .exp(),
            expect,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_beta_gives_the_block_dimension() {
        for d in 2..=4u32 {
            let spec = ladder(d as usize);
            for n in 1..=8u32 {
                for lam in enumerate_partitions(n, d) {
                    let dim = crate::partitions::irrep_dimension(&lam).to_f64().unwrap();
                    assert_relative_eq!(
                        block_partition_function(&lam, &spec, 0.0).unwrap(),
                        dim,
                        max_relative = 1e-10
                    );
                    assert_relative_eq!(
                        ln_block_partition_function(&lam, &spec, 0.0).unwrap(),
                        dim.ln(),
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn blocks_sum_to_the_full_partition_function() {
        for (d, spec) in [(2u32, ladder(2)), (3, ladder(3)), (3, skewed3())] {
            for beta in [0.1, 1.0, 5.0] {
                let z1: f64 = spec.levels().iter().map(|&e| (-beta * e).exp()).sum();
                for n in 1..=8u32 {
                    let total: f64 = enumerate_partitions(n, d)
                        .iter()
                        .map(|lam| {
                            irrep_multiplicity(lam).to_f64().unwrap()
                                * ln_block_partition_function(lam, &spec, beta).unwrap().exp()
                        })
                        .sum();
                    assert_relative_eq!(total, z1.powi(n as i32), max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn bialternant_and_jacobi_trudi_agree_on_distinct_weights() {
        let cases: [(&[u32], &[f64]); 4] = [
            (&[3, 1, 0], &[1.0, 0.7, 0.4]),
            (&[2, 2, 1], &[1.0, 0.9, 0.2]),
            (&[4, 2, 1, 0], &[1.0, 0.8, 0.5, 0.3]),
            (&[5, 0], &[1.0, 0.35]),
        ];
        for (parts, y) in cases {
            let a = schur_bialternant(parts, y);
            let b = schur_jacobi_trudi(parts, y);
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn degenerate_spectrum_takes_the_jacobi_trudi_branch() {
        // Two exactly degenerate pairs, moderately separated groups.
        let spec = SpectrumSpec::two_level(4).unwrap();
        for lam in enumerate_partitions(5, 4) {
            for beta in [0.4, 2.0] {
                let plain = block_partition_function(&lam, &spec, beta).unwrap();
                let logd = ln_block_partition_function(&lam, &spec, beta).unwrap();
                assert_relative_eq!(plain.ln(), logd, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn low_temperature_limit_reaches_the_ground_energy() {
        let spec = ladder(3);
        for parts in [vec![2, 1, 0], vec![3, 3, 1], vec![5, 0, 0]] {
            let lam = Partition::new(parts).unwrap();
            let e0 = block_ground_energy(&lam, &spec).unwrap();
            let beta = 50.0;
            let ln_z = ln_block_partition_function(&lam, &spec, beta).unwrap();
            assert!((-ln_z / beta - e0).abs() < 0.01);
            assert_relative_eq!(
                block_energy(&lam, &spec, beta).unwrap(),
                e0,
                epsilon = 1e-10
            );
        }
        // Pinned values: (n,0,...) -> n eps_1 and the adjoint shape -> -2.
        let all_low = Partition::new(vec![7, 0, 0]).unwrap();
        assert_relative_eq!(block_ground_energy(&all_low, &spec).unwrap(), -7.0);
        let adjoint = Partition::new(vec![2, 1, 0]).unwrap();
        assert_relative_eq!(block_ground_energy(&adjoint, &spec).unwrap(), -2.0);
    }

    #[test]
    fn analytic_energy_matches_central_differences() {
        let specs = [ladder(3), skewed3(), SpectrumSpec::two_level(3).unwrap()];
        for spec in &specs {
            for parts in [vec![1, 0, 0], vec![2, 1, 0], vec![4, 2, 1], vec![3, 3, 0]] {
                let lam = Partition::new(parts).unwrap();
                for beta in [0.3, 1.0, 4.0] {
                    let analytic = block_energy(&lam, spec, beta).unwrap();
                    let fd = richardson_derivative(
                        |b| ln_block_partition_function(&lam, spec, b).unwrap(),
                        beta,
                        1e-3,
                    );
                    assert_relative_eq!(analytic, -fd, max_relative = 1e-6, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn log_partition_function_is_convex_in_beta() {
        let spec = skewed3();
        for parts in [vec![3, 1, 0], vec![2, 2, 2], vec![5, 2, 1]] {
            let lam = Partition::new(parts).unwrap();
            let f = |b: f64| ln_block_partition_function(&lam, &spec, b).unwrap();
            let mut b = 0.0;
            while b < 3.0 {
                assert!(f(b) + f(b + 0.5) - 2.0 * f(b + 0.25) >= -1e-12);
                b += 0.25;
            }
        }
    }

    #[test]
    fn su3_closed_form_matches_the_character_evaluation() {
        for spec in [ladder(3), skewed3()] {
            let (a1, a2) = calibrate_su3(&spec).unwrap();
            // Single-particle calibration across a beta grid.
            let single = Partition::new(vec![1, 0, 0]).unwrap();
            for i in 0..=20 {
                let beta = 0.2 * i as f64;
                let expect: f64 = spec.levels().iter().map(|&e| (-beta * e).exp()).sum();
                assert_relative_eq!(
                    ln_su3_closed_form(&single, a1, a2, beta).unwrap(),
                    expect.ln(),
                    max_relative = 1e-10,
                    epsilon = 1e-10
                );
            }
            // Every shape with n <= 6.
            for n in 1..=6u32 {
                for lam in enumerate_partitions(n, 3) {
                    for beta in [0.5, 1.0, 2.0] {
                        assert_relative_eq!(
                            ln_su3_closed_form(&lam, a1, a2, beta).unwrap(),
                            ln_block_partition_function(&lam, &spec, beta).unwrap(),
                            max_relative = 1e-10,
                            epsilon = 1e-10
                        );
                    }
                }
            }
        }
        // Zero-beta limit is the block dimension.
        let lam = Partition::new(vec![3, 1, 0]).unwrap();
        assert_relative_eq!(
            su3_closed_form(&lam, 1.0, 1.5, 0.0).unwrap(),
            15.0,
            max_relative = 1e-12
        );
        // Pinned adjoint value at beta = 1 on the calibrated ladder.
        let spec = ladder(3);
        let (a1, a2) = calibrate_su3(&spec).unwrap();
        let adjoint = Partition::new(vec![2, 1, 0]).unwrap();
        assert_relative_eq!(
            su3_closed_form(&adjoint, a1, a2, 1.0).unwrap(),
            block_partition_function(&adjoint, &spec, 1.0).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn symmetric_expansion_tracks_the_exact_value_at_small_beta() {
        let spec = ladder(3);
        assert_relative_eq!(
            sym_partition_expansion(10, 3, &spec, 0.0).unwrap(),
            66.0,
            max_relative = 1e-12
        );
        let sym = Partition::new(vec![10, 0, 0]).unwrap();
        // The deviation is O(beta^4) for a symmetric spectrum (the cubic
        // term vanishes): ~2.8e-4 at beta = 0.05, under 1e-4 by beta = 0.03.
        let exact = block_partition_function(&sym, &spec, 0.05).unwrap();
        let approxi = sym_partition_expansion(10, 3, &spec, 0.05).unwrap();
        assert!((approxi - exact).abs() / exact < 5e-4);
        let exact = block_partition_function(&sym, &spec, 0.03).unwrap();
        let approxi = sym_partition_expansion(10, 3, &spec, 0.03).unwrap();
        assert!((approxi - exact).abs() / exact < 1e-4);
    }

    #[test]
    fn spin_expansion_analogue_holds_for_the_maximal_block() {
        // n spin-1 particles, fully symmetric block J = n: the sinh ratio
        // expands as (1 + 2ns)(1 + beta^2 ns(1+ns)/6).
        let (n, s) = (4.0, 1.0);
        let two_j = 8u32;
        let beta = 0.03;
        let expect = (1.0 + 2.0 * n * s) * (1.0 + beta * beta * n * s * (1.0 + n * s) / 6.0);
        let exact = spin_ln_block_partition_function(two_j, beta).unwrap().exp();
        assert!((expect - exact).abs() / exact < 1e-4);
    }

    #[test]
    fn spin_energy_is_smooth_across_the_series_crossover() {
        let coth = |x: f64| 1.0 / x.tanh();
        for two_j in [1u32, 4, 9] {
            // Just below the crossover the series path must agree with a
            // direct coth evaluation of the same expression.
            let beta = 0.9999e-3;
            let w = (two_j + 1) as f64;
            let direct = -w / 2.0 * coth(beta * w / 2.0) + 0.5 * coth(beta / 2.0);
            assert_relative_eq!(
                spin_block_energy(two_j, beta).unwrap(),
                direct,
                max_relative = 1e-6
            );
            let analytic = spin_block_energy(two_j, 0.7).unwrap();
            let fd = richardson_derivative(
                |b| spin_ln_block_partition_function(two_j, b).unwrap(),
                0.7,
                1e-3,
            );
            assert_relative_eq!(analytic, -fd, max_relative = 1e-8);
        }
        // J = 0 block is inert.
        assert_eq!(spin_ln_block_partition_function(0, 2.0).unwrap(), 0.0);
        assert_eq!(spin_block_energy(0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_domain_overflow_is_reported_with_a_log_domain_hint() {
        let spec = ladder(3);
        let lam = Partition::new(vec![12, 0, 0]).unwrap();
        assert!(matches!(
            block_partition_function(&lam, &spec, 700.0),
            Err(Error::NonFinite { .. })
        ));
        let ln_z = ln_block_partition_function(&lam, &spec, 700.0).unwrap();
        assert_relative_eq!(ln_z, 8400.0, max_relative = 1e-6);
    }

    #[test]
    fn mismatched_dimensions_and_bad_beta_are_rejected() {
        let spec = ladder(3);
        let lam2 = Partition::new(vec![2, 0]).unwrap();
        assert!(block_partition_function(&lam2, &spec, 1.0).is_err());
        let lam3 = Partition::new(vec![2, 1, 0]).unwrap();
        assert!(block_partition_function(&lam3, &spec, -0.5).is_err());
        assert!(ln_block_partition_function(&lam3, &spec, f64::NAN).is_err());
        assert!(calibrate_su3(&ladder(2)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn trace_identity_holds_for_random_spectra(
            raw in proptest::collection::vec(-2.0f64..2.0, 3),
            beta in 0.05f64..2.0,
            n in 1u32..=6,
        ) {
            let spec = SpectrumSpec::new(raw).unwrap();
            let z1: f64 = spec.levels().iter().map(|&e| (-beta * e).exp()).sum();
            let total: f64 = enumerate_partitions(n, 3)
                .iter()
                .map(|lam| {
                    irrep_multiplicity(lam).to_f64().unwrap()
                        * ln_block_partition_function(lam, &spec, beta).unwrap().exp()
                })
                .sum();
            prop_assert!((total - z1.powi(n as i32)).abs() <= 1e-9 * z1.powi(n as i32));
        }
    }
}
