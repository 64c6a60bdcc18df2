//! Steady-state thermodynamics of a permutation-invariant ensemble
//! collectively coupled to a thermal bath.
//!
//! The steady state thermalizes each irreducible block to the bath inverse
//! temperature `beta` while the block weights stay frozen at their
//! preparation values `p^lambda_{beta0}`.  The resulting mean energy,
//! reduced entropy and reduced free energy (together with their per-block
//! decomposition) are assembled here from the block partition functions;
//! "reduced" means the degeneracy-space contributions are omitted.
//!
//! Both su(d) ensembles (blocks labelled by partitions) and spin-s
//! ensembles (blocks labelled by total spin `J`) run through the same code
//! path; only the block data — multiplicity, partition function, energy —
//! is substituted.

use crate::characters::{
    block_energy, block_ground_energy, ln_block_partition_function, spin_block_energy,
    spin_ln_block_partition_function,
};
use crate::error::{Error, Result};
use crate::numerics::{ln_biguint, log_sum_exp};
use crate::partitions::{enumerate_partitions, spin_multiplicities, Partition};
use crate::su_cartan::SpectrumSpec;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Label of one irreducible block: a partition shape for su(d) ensembles,
/// a total spin `J` (stored as `2J`) for spin ensembles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockLabel {
    Shape(Partition),
    Spin { two_j: u32 },
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLabel::Shape(p) => write!(f, "{p}"),
            BlockLabel::Spin { two_j } => {
                if two_j % 2 == 0 {
                    write!(f, "J={}", two_j / 2)
                } else {
                    write!(f, "J={two_j}/2")
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Qudits(SpectrumSpec),
    Spins { two_s: u32 },
}

/// A permutation-invariant ensemble of `n` identical constituents with a
/// collective coupling: either `n` qudits with a fixed single-particle
/// spectrum, or `n` spins of size `s` with the unit-gap `S_z` Hamiltonian.
#[derive(Clone, Debug)]
pub struct Ensemble {
    n: u32,
    kind: Kind,
}

impl Ensemble {
    /// `n` qudits sharing the single-particle spectrum `spec`.
    pub fn qudits(n: u32, spec: SpectrumSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("an ensemble needs n >= 1".into()));
        }
        Ok(Self {
            n,
            kind: Kind::Qudits(spec),
        })
    }

    /// `n` spins of size `s = two_s/2` with Hamiltonian `S_z` (levels
    /// `m = -s ... s`, unit spacing).
    pub fn spins(n: u32, two_s: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("an ensemble needs n >= 1".into()));
        }
        if two_s == 0 {
            return Err(Error::InvalidInput("spins need s >= 1/2".into()));
        }
        Ok(Self {
            n,
            kind: Kind::Spins { two_s },
        })
    }

    /// Number of constituents.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Single-particle Hilbert-space dimension (`d` or `2s + 1`).
    pub fn local_dimension(&self) -> usize {
        match &self.kind {
            Kind::Qudits(spec) => spec.num_levels(),
            Kind::Spins { two_s } => (*two_s + 1) as usize,
        }
    }

    /// The qudit spectrum, if this is a qudit ensemble.
    pub fn spectrum(&self) -> Option<&SpectrumSpec> {
        match &self.kind {
            Kind::Qudits(spec) => Some(spec),
            Kind::Spins { .. } => None,
        }
    }

    /// `2s`, if this is a spin ensemble.
    pub fn spin(&self) -> Option<u32> {
        match &self.kind {
            Kind::Qudits(_) => None,
            Kind::Spins { two_s } => Some(*two_s),
        }
    }

    /// Whether blocks are labelled by total spin.
    pub fn is_spin(&self) -> bool {
        matches!(self.kind, Kind::Spins { .. })
    }

    /// Single-particle energy levels, ascending (spins: `-s ... s`).
    pub fn single_particle_levels(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Qudits(spec) => spec.levels().to_vec(),
            Kind::Spins { two_s } => {
                let s = *two_s as f64 / 2.0;
                (0..=*two_s).map(|k| k as f64 - s).collect()
            }
        }
    }

    /// Block labels with the log of their multiplicities, in label order.
    pub fn blocks(&self) -> Result<Vec<(BlockLabel, f64)>> {
        match &self.kind {
            Kind::Qudits(spec) => Ok(enumerate_partitions(self.n, spec.num_levels() as u32)
                .into_iter()
                .map(|p| {
                    let ln_m = crate::partitions::ln_irrep_multiplicity(&p);
                    (BlockLabel::Shape(p), ln_m)
                })
                .collect()),
            Kind::Spins { two_s } => Ok(spin_multiplicities(self.n, *two_s)?
                .iter()
                .map(|(&two_j, m)| (BlockLabel::Spin { two_j }, ln_biguint(m)))
                .collect()),
        }
    }

    /// `ln Z^lambda_beta` for one block of this ensemble.
    pub fn ln_block_z(&self, label: &BlockLabel, beta: f64) -> Result<f64> {
        match (&self.kind, label) {
            (Kind::Qudits(spec), BlockLabel::Shape(p)) => {
                ln_block_partition_function(p, spec, beta)
            }
            (Kind::Spins { .. }, BlockLabel::Spin { two_j }) => {
                spin_ln_block_partition_function(*two_j, beta)
            }
            _ => Err(Error::InvalidInput(
                "block label kind does not match the ensemble".into(),
            )),
        }
    }

    /// Mean block energy `-d(ln Z^lambda)/d beta` for one block.
    pub fn block_energy(&self, label: &BlockLabel, beta: f64) -> Result<f64> {
        match (&self.kind, label) {
            (Kind::Qudits(spec), BlockLabel::Shape(p)) => block_energy(p, spec, beta),
            (Kind::Spins { .. }, BlockLabel::Spin { two_j }) => spin_block_energy(*two_j, beta),
            _ => Err(Error::InvalidInput(
                "block label kind does not match the ensemble".into(),
            )),
        }
    }

    /// Block ground-state energy.
    pub fn block_ground_energy(&self, label: &BlockLabel) -> Result<f64> {
        match (&self.kind, label) {
            (Kind::Qudits(spec), BlockLabel::Shape(p)) => block_ground_energy(p, spec),
            (Kind::Spins { .. }, BlockLabel::Spin { two_j }) => Ok(-(*two_j as f64) / 2.0),
            _ => Err(Error::InvalidInput(
                "block label kind does not match the ensemble".into(),
            )),
        }
    }
}

/// One row of the per-block decomposition: preparation probability and the
/// block's thermal energy, entropy and free energy at the bath
/// temperature.
#[derive(Clone, Debug, Serialize)]
pub struct BlockQuantities {
    pub label: BlockLabel,
    pub probability: f64,
    pub energy: f64,
    pub entropy: f64,
    pub free_energy: f64,
}

/// Steady-state quantities at bath inverse temperature `beta` for an
/// ensemble prepared at `beta0`, with the per-block decomposition.
///
/// Invariant: `free_energy = energy - entropy / beta`, and each total is
/// the probability-weighted sum of its per-block column.
#[derive(Clone, Debug, Serialize)]
pub struct ThermoPoint {
    pub beta: f64,
    pub beta0: f64,
    pub energy: f64,
    pub reduced_entropy: f64,
    pub reduced_free_energy: f64,
    pub per_block: Vec<BlockQuantities>,
}

/// Changes of the steady-state quantities relative to the equilibrium
/// point `beta = beta0`, sharing the bath `beta` in the `entropy / beta`
/// term of the free energy (see the module notes on the reference
/// convention).
#[derive(Clone, Debug, Serialize)]
pub struct DeltaQuantities {
    pub beta: f64,
    pub beta0: f64,
    pub delta_energy: f64,
    pub delta_entropy: f64,
    pub delta_free_energy: f64,
}

fn validate_beta0(beta0: f64) -> Result<()> {
    if !beta0.is_finite() || beta0 < 0.0 {
        return Err(Error::InvalidInput(format!(
            "preparation inverse temperature must be finite and >= 0, got {beta0}"
        )));
    }
    Ok(())
}

fn validate_beta_positive(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "bath inverse temperature must be finite and > 0, got {beta} \
             (the beta -> 0 behaviour is available through the high-temperature coefficient)"
        )));
    }
    Ok(())
}

/// Block occupation probabilities of the preparation Gibbs state,
/// `p^lambda_{beta0} = m_lambda Z^lambda_{beta0} / z_{beta0}^n`, computed
/// through a log-domain softmax so they normalize exactly.
pub fn block_probabilities(ensemble: &Ensemble, beta0: f64) -> Result<BTreeMap<BlockLabel, f64>> {
    validate_beta0(beta0)?;
    let blocks = ensemble.blocks()?;
    let mut weights = Vec::with_capacity(blocks.len());
    for (label, ln_m) in &blocks {
        weights.push(ln_m + ensemble.ln_block_z(label, beta0)?);
    }
    let norm = log_sum_exp(&weights);
    Ok(blocks
        .into_iter()
        .zip(weights)
        .map(|((label, _), w)| (label, (w - norm).exp()))
        .collect())
}

/// Steady-state mean energy, reduced entropy and reduced free energy for
/// bath inverse temperature `beta > 0` and preparation `beta0 >= 0`.
///
/// Per block: `E^lambda = -d(ln Z^lambda)/d beta`,
/// `S^lambda = beta E^lambda + ln Z^lambda`,
/// `F^lambda = -(1/beta) ln Z^lambda`; totals are the
/// `p^lambda_{beta0}`-weighted sums in ascending label order.
pub fn steady_state_quantities(ensemble: &Ensemble, beta: f64, beta0: f64) -> Result<ThermoPoint> {
    validate_beta_positive(beta)?;
    let probs = block_probabilities(ensemble, beta0)?;
    let mut per_block = Vec::with_capacity(probs.len());
    let (mut energy, mut entropy, mut free_energy) = (0.0, 0.0, 0.0);
    for (label, p) in probs {
        let ln_z = ensemble.ln_block_z(&label, beta)?;
        let e = ensemble.block_energy(&label, beta)?;
        let s = beta * e + ln_z;
        let f = -ln_z / beta;
        energy += p * e;
        entropy += p * s;
        free_energy += p * f;
        per_block.push(BlockQuantities {
            label,
            probability: p,
            energy: e,
            entropy: s,
            free_energy: f,
        });
    }
    Ok(ThermoPoint {
        beta,
        beta0,
        energy,
        reduced_entropy: entropy,
        reduced_free_energy: free_energy,
        per_block,
    })
}

/// Changes relative to the fully equilibrated reference at `beta0`:
/// `dE = E_{beta,beta0} - E_{beta0,beta0}`, likewise for the reduced
/// entropy, and `dF = dE - dS / beta`.
///
/// The reference free energy shares the bath `beta` in its entropy term
/// (both free-energy terms use the same `1/beta`); with that convention
/// all three changes vanish identically at `beta = beta0`.
pub fn delta_quantities(ensemble: &Ensemble, beta: f64, beta0: f64) -> Result<DeltaQuantities> {
    validate_beta_positive(beta)?;
    if !beta0.is_finite() || beta0 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "the equilibrated reference needs beta0 > 0, got {beta0}"
        )));
    }
    let state = steady_state_quantities(ensemble, beta, beta0)?;
    let reference = steady_state_quantities(ensemble, beta0, beta0)?;
    let delta_energy = state.energy - reference.energy;
    let delta_entropy = state.reduced_entropy - reference.reduced_entropy;
    Ok(DeltaQuantities {
        beta,
        beta0,
        delta_energy,
        delta_entropy,
        delta_free_energy: delta_energy - delta_entropy / beta,
    })
}

/// Mean energy of the full product Gibbs state at `beta`:
/// `n * <eps>_beta` from the single-particle spectrum.
pub fn gibbs_energy(ensemble: &Ensemble, beta: f64) -> Result<f64> {
    validate_beta0(beta)?;
    let levels = ensemble.single_particle_levels();
    let weights: Vec<f64> = levels.iter().map(|&e| -beta * e).collect();
    let ln_z = log_sum_exp(&weights);
    let mean: f64 = levels
        .iter()
        .zip(&weights)
        .map(|(&e, &w)| e * (w - ln_z).exp())
        .sum();
    Ok(ensemble.n() as f64 * mean)
}

/// Von Neumann entropy of the full product Gibbs state at `beta`:
/// `n * (ln z_beta + beta <eps>_beta)`.
pub fn gibbs_entropy(ensemble: &Ensemble, beta: f64) -> Result<f64> {
    validate_beta0(beta)?;
    let levels = ensemble.single_particle_levels();
    let weights: Vec<f64> = levels.iter().map(|&e| -beta * e).collect();
    let ln_z = log_sum_exp(&weights);
    let mean: f64 = levels
        .iter()
        .zip(&weights)
        .map(|(&e, &w)| e * (w - ln_z).exp())
        .sum();
    Ok(ensemble.n() as f64 * (ln_z + beta * mean))
}

/// Leading high-temperature coefficient `q` (qudits) or `Q` (spins)
/// entering `E_{beta,infty} ~ -2 beta q` and
/// `S_{beta,infty} ~ ln d_sym - beta^2 q` for ensembles prepared near
/// infinite temperature in the dominant symmetric block:
/// `q = n (n + d) <<eps^2>> / (2 (d + 1))`, `Q = n s (1 + n s) / 6`.
pub fn high_temperature_coefficient(ensemble: &Ensemble) -> f64 {
    let n = ensemble.n() as f64;
    match &ensemble.kind {
        Kind::Qudits(spec) => {
            let d = spec.num_levels() as f64;
            n * (n + d) * spec.variance() / (2.0 * (d + 1.0))
        }
        Kind::Spins { two_s } => {
            let s = *two_s as f64 / 2.0;
            n * s * (1.0 + n * s) / 6.0
        }
    }
}

/// Ratio of the symmetric-block spectral variance to the single-particle
/// one, `n (n + d) / (d + 1)`.
pub fn symmetric_variance_ratio(n: u32, d: u32) -> f64 {
    (n as f64) * ((n + d) as f64) / ((d + 1) as f64)
}

/// Largest single-particle spectral variance achievable with spectral
/// width `d - 1`: `(d-1)^2/4` for even `d`, reduced by `(1 - 1/d^2)` for
/// odd `d` (one level cannot be split between the two extremes).
pub fn optimal_single_particle_variance(d: u32) -> f64 {
    let w = ((d - 1) as f64) / 2.0;
    let base = w * w;
    if d % 2 == 0 {
        base
    } else {
        let df = d as f64;
        base * (1.0 - 1.0 / (df * df))
    }
}
