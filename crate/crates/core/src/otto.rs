//! Quantum Otto cycle built on the steady-state thermodynamics: work
//! output of a collectively coupled working medium versus `n`
//! independently thermalizing constituents, the asymptotic advantage
//! ratio, and single-particle spectrum optimization.
//!
//! The cycle alternates two isochoric equilibration strokes (hot bath at
//! `beta_h` with Hamiltonian `H`, cold bath at `beta_c` with the
//! compressed Hamiltonian `kappa H`) with adiabatic compression /
//! expansion.  For the collective medium the block weights stay frozen at
//! their preparation values `p^lambda_{beta0}` through every stroke, so
//! both equilibrations use the same partially thermalized steady state.

use crate::error::{Error, Result};
use crate::su_cartan::SpectrumSpec;
use crate::thermo::{
    gibbs_energy, optimal_single_particle_variance, steady_state_quantities, Ensemble,
};

/// Default grid resolution (points per free level) for
/// [`spectrum_grid_search`].
pub const DEFAULT_GRID_POINTS: usize = 201;

/// Parameters of one Otto cycle.
///
/// `kappa` must lie in the positive-work window
/// `beta_h / beta_c <= kappa <= 1`.
#[derive(Clone, Debug)]
pub struct OttoParams {
    pub ensemble: Ensemble,
    pub beta_h: f64,
    pub beta_c: f64,
    pub kappa: f64,
    pub beta0: f64,
}

impl OttoParams {
    /// Validates bath ordering and the compression window.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_h.is_finite() && self.beta_c.is_finite() && self.beta_h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bath inverse temperatures must be finite and positive, got beta_h={}, beta_c={}",
                self.beta_h, self.beta_c
            )));
        }
        if self.beta_h >= self.beta_c {
            return Err(Error::InvalidInput(format!(
                "the hot bath must be hotter: beta_h={} >= beta_c={}",
                self.beta_h, self.beta_c
            )));
        }
        let lower = self.beta_h / self.beta_c;
        if !self.kappa.is_finite() || self.kappa < lower - 1e-12 || self.kappa > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "compression factor {} outside the positive-work window [{lower}, 1]",
                self.kappa
            )));
        }
        if !self.beta0.is_finite() || self.beta0 < 0.0 {
            return Err(Error::InvalidInput(format!(
                "preparation inverse temperature must be finite and >= 0, got {}",
                self.beta0
            )));
        }
        Ok(())
    }
}

/// Net work per cycle of the collective medium,
/// `W = (1 - kappa) (E_{beta_h, beta0} - E_{kappa beta_c, beta0})`: both
/// strokes equilibrate every block to the bath while the block weights
/// stay frozen at `beta0`.
pub fn collective_work(params: &OttoParams) -> Result<f64> {
    params.validate()?;
    if params.kappa == 1.0 {
        return Ok(0.0);
    }
    let hot = steady_state_quantities(&params.ensemble, params.beta_h, params.beta0)?;
    let cold =
        steady_state_quantities(&params.ensemble, params.kappa * params.beta_c, params.beta0)?;
    Ok((1.0 - params.kappa) * (hot.energy - cold.energy))
}

/// Net work per cycle of `n` distinguishable constituents that fully
/// thermalize during the isochoric strokes,
/// `W = (1 - kappa) (E(gamma_{beta_h}) - E(gamma_{kappa beta_c}))`.
pub fn distinguishable_work(params: &OttoParams) -> Result<f64> {
    params.validate()?;
    if params.kappa == 1.0 {
        return Ok(0.0);
    }
    let hot = gibbs_energy(&params.ensemble, params.beta_h)?;
    let cold = gibbs_energy(&params.ensemble, params.kappa * params.beta_c)?;
    Ok((1.0 - params.kappa) * (hot - cold))
}

/// Asymptotic work-advantage ratio `W^col / W^dis` in the limit of cold
/// preparation (`beta0 -> infinity`) and high-temperature strokes:
/// `(n + d)/(d + 1)` for su(d) ensembles and `(n (d - 1) + 2)/(d + 1)`
/// with `d = 2s + 1` for spin ensembles.
pub fn work_ratio_limit(ensemble: &Ensemble) -> f64 {
    let n = ensemble.n() as f64;
    let d = ensemble.local_dimension() as f64;
    if ensemble.is_spin() {
        (n * (d - 1.0) + 2.0) / (d + 1.0)
    } else {
        (n + d) / (d + 1.0)
    }
}

/// One-parameter family of three-level spectra sweeping the middle level
/// across a fixed width-2 window:
/// `(2/3) * (2 - delta/2, delta - 1, -1 - delta/2)` for `delta` in
/// `[0, 2]`.  `delta = 0` has a doubly degenerate ground level,
/// `delta = 2` the doubly degenerate excited level that maximizes work.
pub fn parameterised_hamiltonian(delta: f64) -> Result<SpectrumSpec> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::InvalidInput(format!(
            "the gap parameter must lie in [0, 2], got {delta}"
        )));
    }
    SpectrumSpec::new(vec![
        2.0 / 3.0 * (2.0 - delta / 2.0),
        2.0 / 3.0 * (delta - 1.0),
        2.0 / 3.0 * (-1.0 - delta / 2.0),
    ])
}

/// Closed-form work outputs `(W^col, W^dis)` for the optimal (maximal
/// variance) spectrum in the asymptotic regime `beta0 -> infinity`,
/// `beta_h, kappa beta_c -> 0`:
///
/// ```text
/// W^col = (1 - kappa)(kappa beta_c - beta_h) n (n + d)/(d + 1) * v_d
/// W^dis = (d + 1)/(n + d) * W^col
/// ```
///
/// with `v_d` the optimal single-particle variance (`(d-1)^2/4`, reduced
/// by `1 - 1/d^2` for odd `d`).  The caller is responsible for supplying
/// strokes cold enough for the linear-response expressions to apply.
pub fn optimal_work_outputs(
    n: u32,
    d: u32,
    beta_h: f64,
    beta_c: f64,
    kappa: f64,
) -> Result<(f64, f64)> {
    if n == 0 || d < 2 {
        return Err(Error::InvalidInput("need n >= 1 and d >= 2".into()));
    }
    if !(beta_h.is_finite() && beta_c.is_finite() && kappa.is_finite()) {
        return Err(Error::InvalidInput("parameters must be finite".into()));
    }
    let nf = n as f64;
    let df = d as f64;
    let v = optimal_single_particle_variance(d);
    let dis = (1.0 - kappa) * (kappa * beta_c - beta_h) * nf * v;
    let col = (nf + df) / (df + 1.0) * dis;
    Ok((col, dis))
}

/// Deterministic grid search for the collective-work-maximizing spectrum
/// with levels confined to the width window `[0, d - 1]`.
///
/// The lowest and highest levels are pinned to the window edges (the
/// optimum saturates the width constraint); each of the `d - 2` interior
/// levels sweeps `points_per_level` equally spaced values.  Returns the
/// best spectrum and its work output; ties keep the first grid point, so
/// the result is reproducible.
pub fn spectrum_grid_search(
    n: u32,
    d: u32,
    beta_h: f64,
    beta_c: f64,
    kappa: f64,
    beta0: f64,
    points_per_level: usize,
) -> Result<(SpectrumSpec, f64)> {
    if d < 2 {
        return Err(Error::InvalidInput("grid search needs d >= 2".into()));
    }
    if points_per_level < 2 {
        return Err(Error::InvalidInput(
            "grid search needs at least 2 points per level".into(),
        ));
    }
    let width = (d - 1) as f64;
    let interior = (d - 2) as usize;
    let mut indices = vec![0usize; interior];
    let mut best: Option<(SpectrumSpec, f64)> = None;
    loop {
        let mut levels = Vec::with_capacity(d as usize);
        levels.push(0.0);
        for &i in &indices {
            levels.push(width * i as f64 / (points_per_level - 1) as f64);
        }
        levels.push(width);
        let spec = SpectrumSpec::new(levels)?;
        let params = OttoParams {
            ensemble: Ensemble::qudits(n, spec.clone())?,
            beta_h,
            beta_c,
            kappa,
            beta0,
        };
        let work = collective_work(&params)?;
        if best.as_ref().map_or(true, |(_, w)| work > *w) {
            best = Some((spec, work));
        }
        // Odometer over the interior levels.
        let mut pos = 0;
        loop {
            if pos == interior {
                let (spec, work) = best.expect("at least one grid point evaluated");
                return Ok((spec, work));
            }
            indices[pos] += 1;
            if indices[pos] < points_per_level {
                break;
            }
            indices[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ladder_params(n: u32, d: usize) -> OttoParams {
        OttoParams {
            ensemble: Ensemble::qudits(n, SpectrumSpec::ladder(d).unwrap()).unwrap(),
            beta_h: 0.1,
            beta_c: 1.0,
            kappa: 0.5,
            beta0: 5.0,
        }
    }

    #[test]
    fn no_compression_means_no_work() {
        let mut p = ladder_params(3, 3);
        p.kappa = 1.0;
        assert_eq!(collective_work(&p).unwrap(), 0.0);
        assert_eq!(distinguishable_work(&p).unwrap(), 0.0);
    }

    #[test]
    fn matched_effective_temperatures_mean_no_work() {
        let mut p = ladder_params(3, 3);
        p.kappa = p.beta_h / p.beta_c;
        assert!(collective_work(&p).unwrap().abs() < 1e-12);
        assert!(distinguishable_work(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_qubit_collective_work_matches_the_explicit_block_oracle() {
        // Levels (-1/2, 1/2): triplet energies (-1, 0, 1), singlet 0.
        let (beta0, beta_h, beta_c, kappa) = (5.0_f64, 0.1, 1.0, 0.5);
        let triplet = [-1.0, 0.0, 1.0];
        let z1 = (beta0 / 2.0).exp() + (-beta0 / 2.0).exp();
        let p_t = triplet.iter().map(|e| (-beta0 * e).exp()).sum::<f64>() / z1.powi(2);
        let energy = |beta: f64| {
            let z: f64 = triplet.iter().map(|e| (-beta * e).exp()).sum();
            p_t * triplet.iter().map(|e| e * (-beta * e).exp()).sum::<f64>() / z
        };
        let expect = (1.0 - kappa) * (energy(beta_h) - energy(kappa * beta_c));

        let params = OttoParams {
            ensemble: Ensemble::qudits(2, SpectrumSpec::new(vec![-0.5, 0.5]).unwrap()).unwrap(),
            beta_h,
            beta_c,
            kappa,
            beta0,
        };
        assert_relative_eq!(
            collective_work(&params).unwrap(),
            expect,
            max_relative = 1e-12
        );
    }

    #[test]
    fn distinguishable_work_factorizes_over_constituents() {
        let params = ladder_params(10, 3);
        let mut single = params.clone();
        single.ensemble = Ensemble::qudits(1, SpectrumSpec::ladder(3).unwrap()).unwrap();
        single.beta_h = 0.05;
        let mut ten = params;
        ten.beta_h = 0.05;
        assert_relative_eq!(
            distinguishable_work(&ten).unwrap(),
            10.0 * distinguishable_work(&single).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn work_advantage_reaches_the_printed_limits() {
        // su(3), n = 10: limit 13/4 = 3.25.
        let su3 = Ensemble::qudits(10, SpectrumSpec::ladder(3).unwrap()).unwrap();
        assert_relative_eq!(work_ratio_limit(&su3), 3.25, max_relative = 1e-15);
        let params = OttoParams {
            ensemble: su3,
            beta_h: 1e-3,
            beta_c: 2.0,
            kappa: 1e-3,
            beta0: 25.0,
        };
        let ratio = collective_work(&params).unwrap() / distinguishable_work(&params).unwrap();
        assert!((ratio / 3.25 - 1.0).abs() < 0.01, "ratio {ratio}");

        // Spin-1, n = 10: limit 22/4 = 5.5.
        let spin = Ensemble::spins(10, 2).unwrap();
        assert_relative_eq!(work_ratio_limit(&spin), 5.5, max_relative = 1e-15);
        let params = OttoParams {
            ensemble: spin,
            ..params
        };
        let ratio = collective_work(&params).unwrap() / distinguishable_work(&params).unwrap();
        assert!((ratio / 5.5 - 1.0).abs() < 0.01, "ratio {ratio}");

        // A single constituent has no collective advantage.
        let one = Ensemble::qudits(1, SpectrumSpec::ladder(4).unwrap()).unwrap();
        assert_relative_eq!(work_ratio_limit(&one), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn gap_family_hits_the_pinned_endpoints() {
        let flat = parameterised_hamiltonian(0.0).unwrap();
        for (a, b) in flat
            .levels()
            .iter()
            .zip([-2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0])
        {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let top = parameterised_hamiltonian(2.0).unwrap();
        for (a, b) in top.levels().iter().zip([-4.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        let mut delta = 0.0;
        while delta <= 2.0 {
            let spec = parameterised_hamiltonian(delta).unwrap();
            let sum: f64 = spec.levels().iter().sum();
            assert!(sum.abs() < 1e-13);
            assert_relative_eq!(
                spec.levels()[2] - spec.levels()[0],
                2.0,
                max_relative = 1e-13
            );
            delta += 0.25;
        }
        assert!(parameterised_hamiltonian(2.5).is_err());
    }

    #[test]
    fn optimal_work_ratio_is_exact_and_kappa_one_vanishes() {
        for (n, d) in [(4u32, 4u32), (10, 3), (6, 5)] {
            let (col, dis) = optimal_work_outputs(n, d, 1e-3, 2.0, 1e-3).unwrap();
            assert_relative_eq!(
                col / dis,
                ((n + d) as f64) / ((d + 1) as f64),
                max_relative = 1e-13
            );
        }
        let (col, dis) = optimal_work_outputs(4, 4, 1e-3, 2.0, 1.0).unwrap();
        assert_eq!((col, dis), (0.0, 0.0));
    }

    #[test]
    fn grid_search_recovers_the_two_level_optimum() {
        // d = 4, n = 4, high-temperature strokes, very cold preparation.
        // At finite beta0 an exactly degenerate ground pair cannot funnel
        // the preparation into the symmetric block (its weight saturates at
        // 5/16 for n = 4), so the true optimum keeps the lowest level
        // unique by one grid step and pushes everything else to the window
        // edges; its work is within 1% of the two-level closed form.
        let (spec, work) = spectrum_grid_search(4, 4, 1e-3, 2.0, 1e-3, 2000.0, 201).unwrap();
        assert!(spec.variance() >= 0.99 * optimal_single_particle_variance(4));
        let (col, _) = optimal_work_outputs(4, 4, 1e-3, 2.0, 1e-3).unwrap();
        assert!(
            (work / col - 1.0).abs() < 0.01,
            "work {work} vs closed form {col}"
        );
    }

    #[test]
    fn collective_beats_distinguishable_across_the_gap_family() {
        for beta_c in [1.0, 2.0] {
            let mut delta = 0.0;
            while delta <= 2.0 {
                let spec = parameterised_hamiltonian(delta).unwrap();
                let params = OttoParams {
                    ensemble: Ensemble::qudits(7, spec).unwrap(),
                    beta_h: 0.1,
                    beta_c,
                    kappa: 0.5,
                    beta0: 3.0,
                };
                let col = collective_work(&params).unwrap();
                let dis = distinguishable_work(&params).unwrap();
                assert!(dis > 0.0, "engine condition violated at delta={delta}");
                assert!(col > dis, "delta={delta}, beta_c={beta_c}: {col} <= {dis}");
                delta += 0.25;
            }
        }
    }

    #[test]
    fn advantage_converges_monotonically_toward_the_limit() {
        let limit = 3.25;
        let mut previous = 0.0;
        for k in 0..4 {
            let scale = 4f64.powi(k);
            let params = OttoParams {
                ensemble: Ensemble::qudits(10, SpectrumSpec::ladder(3).unwrap()).unwrap(),
                beta_h: 0.2 / scale,
                beta_c: 2.0,
                kappa: 0.4 / scale,
                beta0: 2.0 * 2f64.powi(k),
            };
            let ratio = collective_work(&params).unwrap() / distinguishable_work(&params).unwrap();
            assert!(ratio > previous, "k={k}: {ratio} <= {previous}");
            assert!(ratio <= limit * 1.001);
            previous = ratio;
        }
        assert!(
            (previous / limit - 1.0).abs() < 0.02,
            "final ratio {previous}"
        );
    }

    #[test]
    fn invalid_cycles_are_rejected() {
        let mut p = ladder_params(3, 3);
        p.beta_h = 2.0; // hotter bath colder than cold bath
        assert!(collective_work(&p).is_err());
        let mut p = ladder_params(3, 3);
        p.kappa = 0.05; // below beta_h / beta_c = 0.1
        assert!(collective_work(&p).is_err());
        let mut p = ladder_params(3, 3);
        p.kappa = 1.2;
        assert!(distinguishable_work(&p).is_err());
        assert!(spectrum_grid_search(2, 1, 0.1, 1.0, 0.5, 1.0, 11).is_err());
        assert!(spectrum_grid_search(2, 3, 0.1, 1.0, 0.5, 1.0, 1).is_err());
    }
}
