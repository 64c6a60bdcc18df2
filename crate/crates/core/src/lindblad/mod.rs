//! Direct construction and solution of the collective master equation at
//! small system size.
//!
//! Everything downstream of the block formalism rests on one structural
//! fact: collective dissipation with detailed-balanced, full-rank rates
//! drives every irreducible block to the bath Gibbs state while the block
//! occupations stay frozen.  This module verifies that numerically: it
//! assembles the Lindblad generator from collective jump operators in the
//! full `d^n`-dimensional product space, integrates the dynamics to the
//! steady state, counts the stationary space via an explicit
//! superoperator, and checks the block-Gibbs structure through isotypic
//! projectors.
//!
//! Dimension caps: matrix-free evolution up to `D = d^n <= 128`; the dense
//! `D^2 x D^2` superoperator (needed only for the null-space count) up to
//! `D <= 32`; permutation-built projectors up to `n <= 6`.

use crate::error::{Error, Result};
use crate::numerics::{log_sum_exp, von_neumann_entropy, CMat};
use crate::partitions::{irrep_multiplicity, CycleType};
use crate::su_cartan::{collective_operator, spin_operators, CartanBasis};
use crate::thermo::{BlockLabel, Ensemble};
use itertools::Itertools;
use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Cap on `d^n` for matrix-free generator application and time
/// integration.
pub const MAX_EVOLUTION_DIMENSION: usize = 128;

/// Cap on `d^n` for materializing the dense superoperator matrix (its
/// memory and SVD cost scale as `d^{4n}`).
pub const MAX_SUPEROPERATOR_DIMENSION: usize = 32;

/// Cap on `n` for permutation-built isotypic projectors (`n!` terms).
pub const MAX_PROJECTOR_CONSTITUENTS: u32 = 6;

/// Detailed-balanced rate model `Gamma_omega = gamma e^{-beta omega / 2}`,
/// diagonal across jump channels.
///
/// Zero-frequency channels (present only for degenerate spectra) are
/// excluded by default; the block-Gibbs form of the stationary space only
/// requires every non-zero frequency to carry a positive rate.
#[derive(Clone, Debug)]
pub struct RateModel {
    pub gamma: f64,
    pub beta: f64,
    pub include_zero_frequency: bool,
}

impl RateModel {
    /// Standard model at base rate `gamma > 0` and bath inverse
    /// temperature `beta >= 0`.
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "base rate must be positive, got {gamma}"
            )));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "bath inverse temperature must be finite and >= 0, got {beta}"
            )));
        }
        Ok(Self {
            gamma,
            beta,
            include_zero_frequency: false,
        })
    }

    /// Same model with zero-frequency channels kept in the dissipator.
    pub fn with_zero_frequency(mut self) -> Self {
        self.include_zero_frequency = true;
        self
    }

    /// `Gamma_omega = gamma e^{-beta omega / 2}`; satisfies detailed
    /// balance `Gamma_{-omega} = e^{beta omega} Gamma_omega` exactly.
    pub fn rate(&self, omega: f64) -> f64 {
        self.gamma * (-self.beta * omega / 2.0).exp()
    }
}

/// One dissipative channel: a frequency component `E` of a collective
/// jump operator, its Bohr frequency, its rate, and the cached
/// `K = E^dagger E`.
#[derive(Clone, Debug)]
pub struct Channel {
    pub omega: f64,
    pub rate: f64,
    pub op: CMat,
    k: CMat,
}

/// The collective Lindblad generator in matrix-free form: a diagonal
/// Hamiltonian plus a list of dissipative channels.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    h_diag: Vec<f64>,
    channels: Vec<Channel>,
}

/// Dense matrix form of a generator acting on row-stacked density
/// matrices.
#[derive(Clone, Debug)]
pub struct Superoperator {
    pub matrix: CMat,
}

/// Splits a matrix into frequency components with respect to a diagonal
/// Hamiltonian: entries are grouped by `h[row] - h[col]` (tolerance
/// `tol`), and each group is returned with its frequency.
///
/// The components sum to the original matrix and satisfy
/// `[H, E(omega)] = omega E(omega)`.
pub fn frequency_components(op: &CMat, h_diag: &[f64], tol: f64) -> Vec<(f64, CMat)> {
    let dim = h_diag.len();
    debug_assert_eq!(op.nrows(), dim);
    let mut entries: Vec<(f64, usize, usize)> = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            if op[(r, c)] != Complex64::new(0.0, 0.0) {
                entries.push((h_diag[r] - h_diag[c], r, c));
            }
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, CMat)> = Vec::new();
    for (omega, r, c) in entries {
        let start_new = match out.last() {
            Some((w, _)) => (omega - w).abs() > tol,
            None => true,
        };
        if start_new {
            out.push((omega, CMat::zeros(dim, dim)));
        }
        let last = out.last_mut().unwrap();
        last.1[(r, c)] = op[(r, c)];
    }
    out
}

fn hamiltonian_diagonal(ensemble: &Ensemble) -> Vec<f64> {
    // Spins use the standard descending S_z basis, qudits the ascending
    // spectrum basis; both give h[state] = sum over slots of the
    // single-particle level of that slot's digit.
    let single: Vec<f64> = if ensemble.is_spin() {
        let two_s = ensemble.spin().unwrap();
        let s = two_s as f64 / 2.0;
        (0..=two_s).map(|k| s - k as f64).collect()
    } else {
        ensemble.single_particle_levels()
    };
    let d = single.len();
    let n = ensemble.n() as usize;
    let dim = d.pow(n as u32);
    let mut h = vec![0.0; dim];
    for (state, h_entry) in h.iter_mut().enumerate() {
        let mut x = state;
        for _ in 0..n {
            *h_entry += single[x % d];
            x /= d;
        }
    }
    h
}

fn check_evolution_dim(ensemble: &Ensemble) -> Result<usize> {
    let d = ensemble.local_dimension() as u64;
    let dim = d
        .checked_pow(ensemble.n())
        .filter(|&v| v <= MAX_EVOLUTION_DIMENSION as u64)
        .ok_or_else(|| {
            Error::DimensionCap(format!(
                "product dimension {}^{} exceeds {MAX_EVOLUTION_DIMENSION}",
                d,
                ensemble.n()
            ))
        })?;
    Ok(dim as usize)
}

/// Assembles the collective generator
/// `L(rho) = -i[H, rho] + sum Gamma_omega (E rho E^dag - {E^dag E, rho}/2)`
/// with one jump operator per single-particle transition, summed over
/// constituents, and rates from the model.  The Lamb-shift term commutes
/// with `H` and is irrelevant to the steady states, so it is omitted.
pub fn build_generator(ensemble: &Ensemble, rates: &RateModel) -> Result<Generator> {
    let dim = check_evolution_dim(ensemble)?;
    let h_diag = hamiltonian_diagonal(ensemble);
    let n = ensemble.n();

    // Single-particle jump operators: matrix units |i><j| for qudits,
    // the two spin ladder operators for spins.
    let singles: Vec<CMat> = if ensemble.is_spin() {
        let ops = spin_operators(ensemble.spin().unwrap())?;
        vec![ops.sp.clone(), ops.sm.clone()]
    } else {
        let basis = CartanBasis::new(ensemble.local_dimension())?;
        basis
            .roots()
            .into_iter()
            .map(|r| basis.root_operator(r))
            .collect()
    };

    let mut channels = Vec::new();
    for single in singles {
        let coll = collective_operator(&single, n)?;
        for (omega, op) in frequency_components(&coll, &h_diag, 1e-9) {
            if omega.abs() < 1e-9 && !rates.include_zero_frequency {
                continue;
            }
            let k = op.adjoint() * &op;
            channels.push(Channel {
                omega,
                rate: rates.rate(omega),
                op,
                k,
            });
        }
    }
    Ok(Generator {
        dim,
        h_diag,
        channels,
    })
}

impl Generator {
    /// Product-space dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal of the collective Hamiltonian in the product basis.
    pub fn hamiltonian_diagonal(&self) -> &[f64] {
        &self.h_diag
    }

    /// The dissipative channels.
    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// The collective Hamiltonian as a dense diagonal matrix.
    pub fn hamiltonian(&self) -> CMat {
        CMat::from_fn(self.dim, self.dim, |r, c| {
            if r == c {
                Complex64::new(self.h_diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Applies the generator to a density matrix.
    pub fn apply(&self, rho: &CMat) -> CMat {
        // -i [H, rho] for diagonal H is an entrywise phase-gradient.
        let mut out = CMat::from_fn(self.dim, self.dim, |r, c| {
            Complex64::new(0.0, -(self.h_diag[r] - self.h_diag[c])) * rho[(r, c)]
        });
        for ch in &self.channels {
            let jump = &ch.op * rho * ch.op.adjoint();
            let anti = &ch.k * rho + rho * &ch.k;
            out += (jump - anti * Complex64::new(0.5, 0.0)) * Complex64::new(ch.rate, 0.0);
        }
        out
    }

    /// Materializes the dense superoperator for row-stacked density
    /// matrices:
    /// `L = -i(H x 1 - 1 x H^T) + sum Gamma (E x conj(E) - (K x 1 + 1 x K^T)/2)`.
    pub fn superoperator(&self) -> Result<Superoperator> {
        if self.dim > MAX_SUPEROPERATOR_DIMENSION {
            return Err(Error::DimensionCap(format!(
                "dense superoperator needs D <= {MAX_SUPEROPERATOR_DIMENSION}, got {}",
                self.dim
            )));
        }
        let id = CMat::identity(self.dim, self.dim);
        let h = self.hamiltonian();
        let i = Complex64::new(0.0, 1.0);
        let mut m = (h.kronecker(&id) - id.kronecker(&h.transpose())) * (-i);
        for ch in &self.channels {
            let jump = ch.op.kronecker(&ch.op.map(|z| z.conj()));
            let anti = ch.k.kronecker(&id) + id.kronecker(&ch.k.transpose());
            m += (jump - anti * Complex64::new(0.5, 0.0)) * Complex64::new(ch.rate, 0.0);
        }
        Ok(Superoperator { matrix: m })
    }
}

impl Superoperator {
    /// Residual of the trace-preservation identity: the row-stacked
    /// identity must be a left null vector.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d2 = self.matrix.nrows();
        let d = (d2 as f64).sqrt().round() as usize;
        let left = DVector::<Complex64>::from_fn(d2, |k, _| {
            if k / d == k % d {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        (self.matrix.adjoint() * left).norm()
    }
}

/// Number of singular values of the superoperator below
/// `1e-8 * sigma_max`: the dimension of its null space, i.e. of the space
/// of stationary operators.
pub fn nullspace_dimension(sup: &Superoperator) -> usize {
    let sv = sup.matrix.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    sv.iter().filter(|&&s| s < 1e-8 * max).count()
}

/// Expected (complex) dimension of the stationary operator space,
/// `M = sum_lambda m_lambda^2`.
///
/// Every operator of the form `X ⊗ gamma_beta` on a block — with `X` an
/// arbitrary complex matrix on the multiplicity factor — is annihilated
/// by the generator: the Hamiltonian acts trivially on the multiplicity
/// factor and the block dissipator fixes its Gibbs state.  That gives
/// `m^2` independent null vectors per block, which the singular-value
/// count of [`nullspace_dimension`] reproduces exactly.  (Counting only
/// the symmetrized pairs `m(m+1)/2` undercounts: the antisymmetric
/// multiplicity directions are stationary too.)
pub fn steady_space_dimension(ensemble: &Ensemble) -> Result<u64> {
    let mut total = 0u64;
    for (label, _) in ensemble.blocks()? {
        let m = match &label {
            BlockLabel::Shape(p) => irrep_multiplicity(p)
                .to_u64()
                .ok_or_else(|| Error::InvalidInput("multiplicity exceeds u64".into()))?,
            BlockLabel::Spin { two_j } => {
                let n = ensemble.n();
                let two_s = ensemble.spin().unwrap();
                crate::partitions::spin_multiplicities(n, two_s)?[&two_j]
                    .to_u64()
                    .ok_or_else(|| Error::InvalidInput("multiplicity exceeds u64".into()))?
            }
        };
        total += m * m;
    }
    Ok(total)
}

/// The product Gibbs state of a diagonal Hamiltonian,
/// `diag(e^{-beta h}) / Z`.
pub fn thermal_state(h_diag: &[f64], beta: f64) -> CMat {
    let dim = h_diag.len();
    let weights: Vec<f64> = h_diag.iter().map(|&h| -beta * h).collect();
    let ln_z = log_sum_exp(&weights);
    CMat::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new((weights[r] - ln_z).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// A random full-rank density matrix `G G^dag / tr(G G^dag)` with `G`
/// complex Gaussian.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|k| rho[(k, k)].re).sum();
    rho / Complex64::new(trace, 0.0)
}

/// Options for the steady-state integration.
#[derive(Clone, Debug)]
pub struct SteadyStateOptions {
    /// Stop when `||L(rho)||_2 < residual_tol * ||rho||_2`.
    pub residual_tol: f64,
    /// Abort with a non-convergence error beyond this many accepted steps.
    pub max_steps: usize,
    /// Relative local error tolerance of the embedded 4/5 pair.
    pub rtol: f64,
    /// Absolute local error tolerance.
    pub atol: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_steps: 200_000,
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

/// Factor by which the local-error tolerances are tightened once the
/// residual comes within [`ENDGAME_WINDOW`] of the target.
///
/// The residual cannot drop below roughly `rtol / h`: every accepted step
/// re-excites the slow modes by its local truncation error.  Cruising at
/// the user tolerance and tightening only for the final decade keeps the
/// transient cheap while letting the endgame reach the target.  Because
/// Runge-Kutta steps preserve the linear conserved quantities of a linear
/// generator exactly (any polynomial in the generator does), the block
/// occupations stay at their initial values to rounding accuracy
/// throughout — which an after-the-fact algebraic correction of the state
/// would not guarantee.
const ENDGAME_TIGHTENING: f64 = 1e-4;

/// Relative-residual multiple of the target at which the endgame
/// tolerances engage.
const ENDGAME_WINDOW: f64 = 1e3;

/// Thinned time series of states stored during the integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMat>,
}

/// Result of a steady-state integration.
#[derive(Clone, Debug)]
pub struct SteadyStateRun {
    /// Hermitized, trace-renormalized stationary state.
    pub state: CMat,
    /// Thinned trajectory including the initial and final states.
    pub trajectory: Trajectory,
    /// Accepted integration steps.
    pub steps: usize,
    /// Final relative residual `||L(rho)|| / ||rho||`.
    pub residual: f64,
}

fn validate_density_matrix(rho: &CMat, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::InvalidInput(format!(
            "density matrix must be {dim} x {dim}, got {} x {}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if (rho - rho.adjoint()).norm() > 1e-8 {
        return Err(Error::InvalidInput("initial state is not Hermitian".into()));
    }
    let trace: f64 = (0..dim).map(|k| rho[(k, k)].re).sum();
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "initial state has trace {trace}, expected 1"
        )));
    }
    let min_eig = crate::numerics::hermitian_eigenvalues(rho)
        .first()
        .copied()
        .unwrap_or(0.0);
    if min_eig < -1e-8 {
        return Err(Error::InvalidInput(format!(
            "initial state has negative eigenvalue {min_eig}"
        )));
    }
    Ok(())
}

/// Integrates `d rho / dt = L(rho)` from `rho0` with an adaptive
/// embedded 4/5 Runge-Kutta pair until the relative residual drops below
/// `options.residual_tol`, returning the stationary state and a thinned
/// trajectory.
///
/// The final state is re-Hermitized, trace-renormalized and checked for
/// an eigenvalue floor of `-1e-9`.
pub fn steady_state(
    generator: &Generator,
    rho0: &CMat,
    options: &SteadyStateOptions,
) -> Result<SteadyStateRun> {
    validate_density_matrix(rho0, generator.dim())?;

    // Dormand-Prince 5(4) coefficients.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let scale = |m: &CMat, s: f64| m * Complex64::new(s, 0.0);
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut k1 = generator.apply(&rho);
    let mut h = 0.1 / (1.0 + k1.norm());
    let mut steps = 0usize;

    let mut times = vec![0.0];
    let mut states = vec![rho.clone()];
    let mut stride = 1usize;
    let mut since_stored = 0usize;

    loop {
        let residual = k1.norm() / rho.norm();
        if residual < options.residual_tol {
            break;
        }
        if steps >= options.max_steps {
            return Err(Error::NonConvergence {
                context: "steady-state integration",
                residual,
                steps,
            });
        }
        let endgame = residual < options.residual_tol * ENDGAME_WINDOW;
        let (rtol, atol) = if endgame {
            (
                (options.rtol * ENDGAME_TIGHTENING).max(1e-13),
                (options.atol * ENDGAME_TIGHTENING).max(1e-16),
            )
        } else {
            (options.rtol, options.atol)
        };

        let k2 = generator.apply(&(&rho + scale(&k1, h * A[0][0])));
        let k3 = generator.apply(&(&rho + scale(&k1, h * A[1][0]) + scale(&k2, h * A[1][1])));
        let k4 = generator.apply(
            &(&rho + scale(&k1, h * A[2][0]) + scale(&k2, h * A[2][1]) + scale(&k3, h * A[2][2])),
        );
        let k5 = generator.apply(
            &(&rho
                + scale(&k1, h * A[3][0])
                + scale(&k2, h * A[3][1])
                + scale(&k3, h * A[3][2])
                + scale(&k4, h * A[3][3])),
        );
        let k6 = generator.apply(
            &(&rho
                + scale(&k1, h * A[4][0])
                + scale(&k2, h * A[4][1])
                + scale(&k3, h * A[4][2])
                + scale(&k4, h * A[4][3])
                + scale(&k5, h * A[4][4])),
        );
        let next = &rho
            + scale(&k1, h * A[5][0])
            + scale(&k3, h * A[5][2])
            + scale(&k4, h * A[5][3])
            + scale(&k5, h * A[5][4])
            + scale(&k6, h * A[5][5]);
        // FSAL: the seventh stage is the derivative at the candidate point.
        let k7 = generator.apply(&next);

        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut err_mat = CMat::zeros(generator.dim(), generator.dim());
        for (i, k) in ks.iter().enumerate() {
            let db = B5[i] - B4[i];
            if db != 0.0 {
                err_mat += scale(k, h * db);
            }
        }
        let err = err_mat.norm();
        let tol = atol + rtol * rho.norm();

        if err <= tol {
            t += h;
            rho = next;
            k1 = k7;
            steps += 1;
            since_stored += 1;
            if since_stored >= stride {
                times.push(t);
                states.push(rho.clone());
                since_stored = 0;
                // Halve the stored density once the buffer fills.
                if states.len() > 400 {
                    let mut kept_t = Vec::with_capacity(states.len() / 2 + 1);
                    let mut kept_s = Vec::with_capacity(states.len() / 2 + 1);
                    for i in (0..states.len()).step_by(2) {
                        kept_t.push(times[i]);
                        kept_s.push(states[i].clone());
                    }
                    times = kept_t;
                    states = kept_s;
                    stride *= 2;
                }
            }
        }
        let grow = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            4.0
        };
        h *= grow.clamp(0.2, 4.0);
    }

    // Hermitize, renormalize, and record the final state.
    let state = scale(&(&rho + rho.adjoint()), 0.5);
    let trace: f64 = (0..generator.dim()).map(|k| state[(k, k)].re).sum();
    let state = state / Complex64::new(trace, 0.0);
    let min_eig = crate::numerics::hermitian_eigenvalues(&state)
        .first()
        .copied()
        .unwrap_or(0.0);
    if min_eig < -1e-9 {
        return Err(Error::NonFinite {
            context: "integration left the positive cone",
        });
    }
    if *times.last().unwrap() < t {
        times.push(t);
        states.push(state.clone());
    } else {
        *states.last_mut().unwrap() = state.clone();
    }
    let residual = generator.apply(&state).norm() / state.norm();
    Ok(SteadyStateRun {
        state,
        trajectory: Trajectory { times, states },
        steps,
        residual,
    })
}

/// Hermitian projectors onto the isotypic blocks of the product space.
///
/// Qudit ensembles build them as symmetry-adapted averages over all `n!`
/// slot permutations weighted by symmetric-group characters; spin
/// ensembles use Lagrange polynomials in the total-spin Casimir `S.S`
/// (whose eigenvalues `J(J+1)` separate the blocks unambiguously).
pub fn isotypic_projectors(ensemble: &Ensemble) -> Result<Vec<(BlockLabel, CMat)>> {
    let dim = check_evolution_dim(ensemble)?;
    let n = ensemble.n();
    if ensemble.is_spin() {
        let ops = spin_operators(ensemble.spin().unwrap())?;
        let sx = collective_operator(&ops.sx, n)?;
        let sy = collective_operator(&ops.sy, n)?;
        let sz = collective_operator(&ops.sz, n)?;
        let casimir = &sx * &sx + &sy * &sy + &sz * &sz;
        let spins: Vec<u32> = ensemble
            .blocks()?
            .iter()
            .map(|(label, _)| match label {
                BlockLabel::Spin { two_j } => *two_j,
                BlockLabel::Shape(_) => unreachable!("spin ensemble has spin labels"),
            })
            .collect();
        let eig = |two_j: u32| {
            let j = two_j as f64 / 2.0;
            j * (j + 1.0)
        };
        let id = CMat::identity(dim, dim);
        let mut out = Vec::with_capacity(spins.len());
        for &two_j in &spins {
            let mut p = id.clone();
            for &other in &spins {
                if other != two_j {
                    p = p * (&casimir - &id * Complex64::new(eig(other), 0.0))
                        / Complex64::new(eig(two_j) - eig(other), 0.0);
                }
            }
            out.push((BlockLabel::Spin { two_j }, p));
        }
        return Ok(out);
    }

    if n > MAX_PROJECTOR_CONSTITUENTS {
        return Err(Error::DimensionCap(format!(
            "permutation-built projectors need n <= {MAX_PROJECTOR_CONSTITUENTS}, got {n}"
        )));
    }
    let d = ensemble.local_dimension();
    let nu = n as usize;
    // Permutation operators: U(pi) maps slot k's digit to slot pi(k).
    let mut perm_ops: Vec<(CycleType, CMat)> = Vec::new();
    for perm in (0..nu).permutations(nu) {
        let class = CycleType::of_permutation(&perm)?;
        let mut u = CMat::zeros(dim, dim);
        let mut strides = vec![1usize; nu];
        for k in (0..nu.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * d;
        }
        for col in 0..dim {
            let mut digits = vec![0usize; nu];
            let mut x = col;
            for k in (0..nu).rev() {
                digits[k] = x % d;
                x /= d;
            }
            let mut row = 0usize;
            for k in 0..nu {
                row += digits[k] * strides[perm[k]];
            }
            u[(row, col)] = Complex64::new(1.0, 0.0);
        }
        perm_ops.push((class, u));
    }
    let n_fact: f64 = (1..=nu as u64).product::<u64>() as f64;
    let mut out = Vec::new();
    for (label, _) in ensemble.blocks()? {
        let shape = match &label {
            BlockLabel::Shape(p) => p.clone(),
            BlockLabel::Spin { .. } => unreachable!("qudit ensemble has shape labels"),
        };
        let mult = irrep_multiplicity(&shape)
            .to_f64()
            .expect("small multiplicity");
        let mut p = CMat::zeros(dim, dim);
        for (class, u) in &perm_ops {
            let chi = crate::partitions::sn_character(&shape, class)? as f64;
            if chi != 0.0 {
                p += u * Complex64::new(chi, 0.0);
            }
        }
        p *= Complex64::new(mult / n_fact, 0.0);
        out.push((label, p));
    }
    Ok(out)
}

/// Per-block verification report: how far the restriction of a state to
/// one isotypic block is from the block-Gibbs profile.
#[derive(Clone, Debug, Serialize)]
pub struct BlockGibbsReport {
    pub label: BlockLabel,
    /// `tr(P^lambda rho)`.
    pub occupation: f64,
    /// Frobenius norm of `[rho^lambda, H]`.
    pub commutator_residual: f64,
    /// Largest deviation of the energy-resolved populations from the
    /// degeneracy-weighted Gibbs profile.
    pub population_residual: f64,
    /// Rows `(energy, population, block degeneracy, expected population)`.
    pub populations: Vec<(f64, f64, f64, f64)>,
}

/// Compares each sufficiently occupied block of `rho` against the Gibbs
/// profile at `beta`: populations are aggregated per energy eigenvalue,
/// and the expected profile is `deg(E) e^{-beta E}` normalized within the
/// block, which is independent of the (arbitrary) degeneracy-space state.
pub fn verify_block_gibbs(
    rho: &CMat,
    beta: f64,
    projectors: &[(BlockLabel, CMat)],
    h_diag: &[f64],
) -> Result<Vec<BlockGibbsReport>> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let dim = h_diag.len();
    // Distinct energies, ascending, merged within 1e-9.
    let mut energies: Vec<f64> = h_diag.to_vec();
    energies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    energies.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let level_of = |e: f64| -> usize {
        energies
            .iter()
            .position(|&x| (x - e).abs() < 1e-9)
            .expect("every diagonal entry maps to a merged level")
    };

    let mut reports = Vec::new();
    for (label, p) in projectors {
        let projected = p * rho;
        let occupation: f64 = (0..dim).map(|k| projected[(k, k)].re).sum();
        if occupation <= 1e-8 {
            continue;
        }
        let restricted = (p * rho * p) / Complex64::new(occupation, 0.0);
        let mut comm = 0.0_f64;
        for r in 0..dim {
            for c in 0..dim {
                let v = (h_diag[r] - h_diag[c]) * restricted[(r, c)].norm();
                comm += v * v;
            }
        }
        let commutator_residual = comm.sqrt();

        let mut pop = vec![0.0_f64; energies.len()];
        let mut deg = vec![0.0_f64; energies.len()];
        for k in 0..dim {
            let lvl = level_of(h_diag[k]);
            pop[lvl] += restricted[(k, k)].re;
            deg[lvl] += p[(k, k)].re;
        }
        // Expected: deg(E) e^{-beta E}, normalized over the block's levels.
        let log_terms: Vec<f64> = energies
            .iter()
            .zip(&deg)
            .map(|(&e, &g)| {
                if g > 1e-12 {
                    g.ln() - beta * e
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let norm = log_sum_exp(&log_terms);
        let mut population_residual = 0.0_f64;
        let mut rows = Vec::new();
        for (i, &e) in energies.iter().enumerate() {
            let expected = if log_terms[i].is_finite() {
                (log_terms[i] - norm).exp()
            } else {
                0.0
            };
            population_residual = population_residual.max((pop[i] - expected).abs());
            if deg[i] > 1e-12 {
                rows.push((e, pop[i], deg[i], expected));
            }
        }
        reports.push(BlockGibbsReport {
            label: label.clone(),
            occupation,
            commutator_residual,
            population_residual,
            populations: rows,
        });
    }
    Ok(reports)
}

/// Report of the commutant-structure check.
#[derive(Clone, Debug, Serialize)]
pub struct CommutantReport {
    /// Whether `X` commutes with every collective generating-set operator
    /// (the hypothesis of the commutant characterization).
    pub commutes_with_generators: bool,
    /// Largest `||[X, E]||` over the generating set.
    pub generator_residual: f64,
    /// Largest `||P^a X P^b||` over distinct blocks.
    pub off_block_residual: f64,
    /// Largest `||[P X P, E]||` over blocks and generators.
    pub within_block_residual: f64,
    /// True when the precondition holds and both residuals are `< 1e-8`.
    pub passes: bool,
}

/// Checks the commutant characterization: an operator commuting with the
/// collective generating-set operators must be block-diagonal across the
/// isotypic decomposition and act trivially on each irreducible factor
/// (so its block restrictions again commute with everything collective).
pub fn commutant_check(x: &CMat, ensemble: &Ensemble) -> Result<CommutantReport> {
    let dim = check_evolution_dim(ensemble)?;
    if x.nrows() != dim || x.ncols() != dim {
        return Err(Error::InvalidInput(format!(
            "operator must be {dim} x {dim}, got {} x {}",
            x.nrows(),
            x.ncols()
        )));
    }
    let n = ensemble.n();
    let generators: Vec<CMat> = if ensemble.is_spin() {
        let ops = spin_operators(ensemble.spin().unwrap())?;
        vec![
            collective_operator(&ops.sp, n)?,
            collective_operator(&ops.sm, n)?,
        ]
    } else {
        let basis = CartanBasis::new(ensemble.local_dimension())?;
        let mut gens = Vec::new();
        for (i, j) in basis.generating_roots() {
            gens.push(collective_operator(&basis.root_operator((i, j)), n)?);
            gens.push(collective_operator(&basis.root_operator((j, i)), n)?);
        }
        gens
    };

    let generator_residual = generators
        .iter()
        .map(|e| crate::numerics::commutator(x, e).norm())
        .fold(0.0_f64, f64::max);
    let commutes = generator_residual < 1e-10;
    if !commutes {
        return Ok(CommutantReport {
            commutes_with_generators: false,
            generator_residual,
            off_block_residual: f64::NAN,
            within_block_residual: f64::NAN,
            passes: false,
        });
    }

    let projectors = isotypic_projectors(ensemble)?;
    let mut off = 0.0_f64;
    for (a, (_, pa)) in projectors.iter().enumerate() {
        for (b, (_, pb)) in projectors.iter().enumerate() {
            if a != b {
                off = off.max((pa * x * pb).norm());
            }
        }
    }
    let mut within = 0.0_f64;
    for (_, p) in &projectors {
        let xp = p * x * p;
        for e in &generators {
            within = within.max(crate::numerics::commutator(&xp, e).norm());
        }
    }
    Ok(CommutantReport {
        commutes_with_generators: true,
        generator_residual,
        off_block_residual: off,
        within_block_residual: within,
        passes: off < 1e-8 && within < 1e-8,
    })
}

/// Report of the free-energy monotonicity check along a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct SpohnReport {
    /// `tr(rho H) - S(rho)/beta` at each stored time.
    pub values: Vec<f64>,
    /// Largest per-step increase (should be below the numerical slack).
    pub max_increase: f64,
    /// Whether the sequence is non-increasing within `1e-9` slack.
    pub monotone: bool,
}

/// Evaluates the non-equilibrium free energy `tr(rho H) - S(rho)/beta`
/// along the stored trajectory and checks that it never increases by more
/// than `1e-9` per step (detailed balance makes it a Lyapunov function).
pub fn spohn_monotonicity(
    trajectory: &Trajectory,
    beta: f64,
    h_diag: &[f64],
) -> Result<SpohnReport> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let mut values = Vec::with_capacity(trajectory.states.len());
    for rho in &trajectory.states {
        let energy: f64 = (0..h_diag.len()).map(|k| h_diag[k] * rho[(k, k)].re).sum();
        values.push(energy - von_neumann_entropy(rho) / beta);
    }
    let mut max_increase = 0.0_f64;
    for w in values.windows(2) {
        max_increase = max_increase.max(w[1] - w[0]);
    }
    Ok(SpohnReport {
        values: values.clone(),
        max_increase,
        monotone: max_increase <= 1e-9,
    })
}
