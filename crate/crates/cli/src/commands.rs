//! The eight batch commands: each resolves its configuration, runs the
//! computation (sweeps in parallel), writes one output file, and returns
//! a one-line summary for stdout.

use crate::config::{resolve_ensemble, validate_grid, RunConfig, Settings, TemperatureConfig};
use crate::output::{write_json, write_sheet, Cell, Sheet};
use anyhow::{anyhow, bail, Result};
use permutherm_core::asymptotics::{
    energy_coefficient, energy_coefficient_mc, entropy_asymptote, exact_entropy_beta0,
    exact_spin_entropy_beta0,
};
use permutherm_core::lindblad::{
    build_generator, isotypic_projectors, nullspace_dimension, random_density_matrix,
    spohn_monotonicity, steady_space_dimension, steady_state, thermal_state, verify_block_gibbs,
    RateModel, SteadyStateOptions, MAX_SUPEROPERATOR_DIMENSION,
};
use permutherm_core::otto::{
    collective_work, distinguishable_work, parameterised_hamiltonian, work_ratio_limit, OttoParams,
};
use permutherm_core::partitions::{irrep_dimension, irrep_multiplicity, spin_multiplicities};
use permutherm_core::thermo::{
    block_probabilities, delta_quantities, steady_state_quantities, BlockLabel, Ensemble,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Dispatches a resolved command name.
pub fn run(command: &str, settings: &Settings) -> Result<String> {
    match command {
        "irreps" => irreps(settings),
        "thermo" => thermo(settings),
        "otto" => otto(settings),
        "otto-scan" => otto_scan(settings),
        "lindblad-verify" => lindblad_verify(settings),
        "asymptotics-energy" => asymptotics_energy(settings),
        "asymptotics-entropy" => asymptotics_entropy(settings),
        "irrep-terms" => irrep_terms(settings),
        other => bail!("unknown command {other:?}"),
    }
}

/// Spin labels render as the bare `J` value, shapes as their part tuple.
fn block_cell(label: &BlockLabel) -> Cell {
    match label {
        BlockLabel::Spin { two_j } if two_j % 2 == 0 => Cell::Text((two_j / 2).to_string()),
        BlockLabel::Spin { two_j } => Cell::Text(format!("{two_j}/2")),
        BlockLabel::Shape(p) => Cell::Text(p.to_string()),
    }
}

fn single_beta(settings: &Settings, what: &str) -> Result<f64> {
    let grid = settings
        .beta
        .as_ref()
        .ok_or_else(|| anyhow!("missing bath inverse temperature beta"))?;
    if grid.len() != 1 {
        bail!(
            "{what} uses a single bath temperature; got a {}-point beta grid",
            grid.len()
        );
    }
    validate_grid("beta", grid)?;
    Ok(grid[0])
}

/// Block table: label, dimension, multiplicity, preparation weight.
fn irreps(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("irreps", settings)?;
    let (ensemble, echo) = resolve_ensemble(settings)?;
    let beta0 = settings.beta0.unwrap_or(0.0);
    config.ensemble = Some(echo);
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        ..TemperatureConfig::default()
    });

    let weights = block_probabilities(&ensemble, beta0)?;
    let spin_mults = match ensemble.spin() {
        Some(two_s) => Some(spin_multiplicities(ensemble.n(), two_s)?),
        None => None,
    };
    let mut sheet = Sheet::new(&["block", "dimension", "multiplicity", "weight"]);
    for (label, weight) in &weights {
        let (dimension, multiplicity) = match label {
            BlockLabel::Shape(p) => (
                irrep_dimension(p).to_string(),
                irrep_multiplicity(p).to_string(),
            ),
            BlockLabel::Spin { two_j } => {
                let mults = spin_mults.as_ref().expect("spin ensemble");
                ((two_j + 1).to_string(), mults[two_j].to_string())
            }
        };
        sheet.push(vec![
            block_cell(label),
            Cell::Text(dimension),
            Cell::Text(multiplicity),
            Cell::Float(*weight),
        ]);
    }
    let rows = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {rows} blocks to {}",
        config.output.display()
    ))
}

/// Steady-state sweep over the bath temperature grid.
fn thermo(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("thermo", settings)?;
    let (ensemble, echo) = resolve_ensemble(settings)?;
    let beta0 = settings
        .beta0
        .ok_or_else(|| anyhow!("missing preparation beta0"))?;
    if beta0 <= 0.0 {
        bail!("thermo needs beta0 > 0 (the change columns compare against equilibrium at beta0)");
    }
    let grid = settings
        .beta
        .clone()
        .ok_or_else(|| anyhow!("missing beta grid"))?;
    validate_grid("beta", &grid)?;
    let per_block = settings.per_block.unwrap_or(false);
    config.ensemble = Some(echo);
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        beta: Some(grid.clone()),
        ..TemperatureConfig::default()
    });
    config.per_block = Some(per_block);

    let mut columns: Vec<String> = ["beta", "energy", "d_entropy", "d_free_energy"]
        .map(String::from)
        .to_vec();
    // Ascending label order, matching the per-block tables of each point.
    let mut labels: Vec<BlockLabel> = ensemble
        .blocks()?
        .into_iter()
        .map(|(label, _)| label)
        .collect();
    labels.sort();
    if per_block {
        for label in &labels {
            for prefix in ["p", "e", "s", "f"] {
                columns.push(format!("{prefix}[{label}]"));
            }
        }
    }
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&beta| -> Result<Vec<Cell>> {
            let point = steady_state_quantities(&ensemble, beta, beta0)?;
            let deltas = delta_quantities(&ensemble, beta, beta0)?;
            let mut row: Vec<Cell> = vec![
                beta.into(),
                point.energy.into(),
                deltas.delta_entropy.into(),
                deltas.delta_free_energy.into(),
            ];
            if per_block {
                for block in &point.per_block {
                    row.push(block.probability.into());
                    row.push(block.energy.into());
                    row.push(block.entropy.into());
                    row.push(block.free_energy.into());
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut sheet = Sheet::new(&column_refs);
    for row in rows {
        sheet.push(row);
    }
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} temperature points to {}",
        config.output.display()
    ))
}

fn otto_cycle_settings(settings: &Settings) -> Result<(Vec<f64>, f64, f64, f64)> {
    let beta_h = settings
        .beta_h
        .clone()
        .ok_or_else(|| anyhow!("missing beta_h grid"))?;
    validate_grid("beta_h", &beta_h)?;
    let beta_c = settings.beta_c.ok_or_else(|| anyhow!("missing beta_c"))?;
    let kappa = settings.kappa.ok_or_else(|| anyhow!("missing kappa"))?;
    let beta0 = settings
        .beta0
        .ok_or_else(|| anyhow!("missing preparation beta0"))?;
    Ok((beta_h, beta_c, kappa, beta0))
}

/// Work output over the hot-bath grid.
fn otto(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("otto", settings)?;
    let (ensemble, echo) = resolve_ensemble(settings)?;
    let (beta_h_grid, beta_c, kappa, beta0) = otto_cycle_settings(settings)?;
    config.ensemble = Some(echo);
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        beta_h: Some(beta_h_grid.clone()),
        beta_c: Some(beta_c),
        kappa: Some(kappa),
        ..TemperatureConfig::default()
    });

    let rows: Vec<Vec<Cell>> = beta_h_grid
        .par_iter()
        .map(|&beta_h| -> Result<Vec<Cell>> {
            let params = OttoParams {
                ensemble: ensemble.clone(),
                beta_h,
                beta_c,
                kappa,
                beta0,
            };
            let col = collective_work(&params)?;
            let dis = distinguishable_work(&params)?;
            Ok(vec![
                beta_h.into(),
                col.into(),
                dis.into(),
                (col / dis).into(),
            ])
        })
        .collect::<Result<_>>()?;

    let mut sheet = Sheet::new(&["beta_h", "w_col", "w_dis", "ratio"]);
    for row in rows {
        sheet.push(row);
    }
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} cycles to {} (asymptotic advantage {:.4})",
        config.output.display(),
        work_ratio_limit(&ensemble)
    ))
}

/// Work advantage across the three-level middle-level sweep.
fn otto_scan(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("otto-scan", settings)?;
    let n = settings
        .n
        .ok_or_else(|| anyhow!("missing ensemble size n"))?;
    if settings.kind.as_deref().is_some_and(|k| k != "sud")
        || settings.d.is_some_and(|d| d != 3)
        || settings.spectrum.is_some()
        || settings.levels.is_some()
    {
        bail!("otto-scan sweeps the built-in three-level middle-level family; only n and the cycle temperatures apply");
    }
    let beta_h = {
        let grid = settings
            .beta_h
            .clone()
            .ok_or_else(|| anyhow!("missing beta_h"))?;
        if grid.len() != 1 {
            bail!(
                "otto-scan uses a single beta_h; got a {}-point grid",
                grid.len()
            );
        }
        grid[0]
    };
    let beta_c = settings.beta_c.ok_or_else(|| anyhow!("missing beta_c"))?;
    let kappa = settings.kappa.ok_or_else(|| anyhow!("missing kappa"))?;
    let beta0 = settings
        .beta0
        .ok_or_else(|| anyhow!("missing preparation beta0"))?;
    let points = settings.delta_points.unwrap_or(41);
    if points < 2 {
        bail!("delta_points must be at least 2");
    }
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        beta_h: Some(vec![beta_h]),
        beta_c: Some(beta_c),
        kappa: Some(kappa),
        ..TemperatureConfig::default()
    });
    config.delta_points = Some(points);

    let deltas: Vec<f64> = (0..points)
        .map(|k| 2.0 * k as f64 / (points - 1) as f64)
        .collect();
    let rows: Vec<Vec<Cell>> = deltas
        .par_iter()
        .map(|&delta| -> Result<Vec<Cell>> {
            let spec = parameterised_hamiltonian(delta)?;
            let levels = spec.levels().to_vec();
            let params = OttoParams {
                ensemble: Ensemble::qudits(n, spec)?,
                beta_h,
                beta_c,
                kappa,
                beta0,
            };
            let col = collective_work(&params)?;
            let dis = distinguishable_work(&params)?;
            Ok(vec![
                delta.into(),
                levels[0].into(),
                levels[1].into(),
                levels[2].into(),
                col.into(),
                dis.into(),
                (col / dis).into(),
            ])
        })
        .collect::<Result<_>>()?;

    let mut sheet = Sheet::new(&[
        "delta",
        "level_low",
        "level_mid",
        "level_high",
        "w_col",
        "w_dis",
        "ratio",
    ]);
    for row in rows {
        sheet.push(row);
    }
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} gap values to {}",
        config.output.display()
    ))
}

/// Direct dissipative verification at small size: null-space dimension,
/// block-Gibbs residuals, free-energy monotonicity, random restarts.
fn lindblad_verify(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("lindblad-verify", settings)?;
    let (ensemble, echo) = resolve_ensemble(settings)?;
    let beta = single_beta(settings, "lindblad-verify")?;
    let beta0 = settings
        .beta0
        .ok_or_else(|| anyhow!("missing preparation beta0"))?;
    let gamma = settings.gamma.unwrap_or(1.0);
    let include_zero = settings.include_zero_frequency.unwrap_or(false);
    let random_states = settings.random_states.unwrap_or(3);
    config.ensemble = Some(echo);
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        beta: Some(vec![beta]),
        ..TemperatureConfig::default()
    });
    config.gamma = Some(gamma);
    config.include_zero_frequency = Some(include_zero);
    config.random_states = Some(random_states);
    config.max_steps = settings.max_steps;

    let mut rates = RateModel::new(gamma, beta)?;
    if include_zero {
        rates = rates.with_zero_frequency();
    }
    let generator = build_generator(&ensemble, &rates)?;
    let mut options = SteadyStateOptions::default();
    if let Some(max_steps) = settings.max_steps {
        options.max_steps = max_steps;
    }

    let stationary_dimension = steady_space_dimension(&ensemble)?;
    let (nullspace, trace_residual) = if generator.dim() <= MAX_SUPEROPERATOR_DIMENSION {
        let sup = generator.superoperator()?;
        (
            Some(nullspace_dimension(&sup) as u64),
            Some(sup.trace_preservation_residual()),
        )
    } else {
        (None, None)
    };

    let projectors = isotypic_projectors(&ensemble)?;
    let h_diag = generator.hamiltonian_diagonal().to_vec();

    struct RunReport {
        value: serde_json::Value,
        blocks: Vec<permutherm_core::lindblad::BlockGibbsReport>,
        max_comm: f64,
        max_pop: f64,
        steps: usize,
        residual: f64,
    }
    let verify = |rho0: &_| -> Result<RunReport> {
        let run = steady_state(&generator, rho0, &options)?;
        let blocks = verify_block_gibbs(&run.state, beta, &projectors, &h_diag)?;
        let max_comm = blocks
            .iter()
            .map(|r| r.commutator_residual)
            .fold(0.0_f64, f64::max);
        let max_pop = blocks
            .iter()
            .map(|r| r.population_residual)
            .fold(0.0_f64, f64::max);
        let spohn = spohn_monotonicity(&run.trajectory, beta, &h_diag)?;
        let value = serde_json::json!({
            "steps": run.steps,
            "residual": run.residual,
            "max_commutator_residual": max_comm,
            "max_population_residual": max_pop,
            "free_energy_monotone": spohn.monotone,
            "max_free_energy_increase": spohn.max_increase,
            "blocks": blocks,
        });
        Ok(RunReport {
            value,
            blocks,
            max_comm,
            max_pop,
            steps: run.steps,
            residual: run.residual,
        })
    };

    let rho_thermal = thermal_state(&h_diag, beta0);
    let thermal = verify(&rho_thermal)?;
    let (mut worst_comm, mut worst_pop) = (thermal.max_comm, thermal.max_pop);

    let mut random_reports = Vec::new();
    for k in 0..random_states {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(k as u64));
        let rho0 = random_density_matrix(generator.dim(), &mut rng);
        let report = verify(&rho0)?;
        worst_comm = worst_comm.max(report.max_comm);
        worst_pop = worst_pop.max(report.max_pop);
        random_reports.push(serde_json::json!({
            "seed": config.seed.wrapping_add(k as u64),
            "report": report.value,
        }));
    }

    let passes = worst_comm < 1e-6 && worst_pop < 1e-6;
    let report = serde_json::json!({
        "dimension": generator.dim(),
        "nullspace_dim": nullspace,
        "stationary_dimension": stationary_dimension,
        "trace_preservation_residual": trace_residual,
        "thermal_run": thermal.value,
        "random_runs": random_reports,
        "passes": passes,
    });

    match config.format {
        crate::config::OutputFormat::Json => write_json(&config, &report)?,
        crate::config::OutputFormat::Csv => {
            // The flat format keeps the per-block table of the thermal run.
            let mut sheet = Sheet::new(&[
                "block",
                "occupation",
                "commutator_residual",
                "population_residual",
            ]);
            for r in &thermal.blocks {
                sheet.push(vec![
                    block_cell(&r.label),
                    r.occupation.into(),
                    r.commutator_residual.into(),
                    r.population_residual.into(),
                ]);
            }
            write_sheet(&config, &sheet)?;
        }
    }
    Ok(format!(
        "wrote verification report to {} (stationary dimension {stationary_dimension}{}, {} steps, residual {:.2e}, worst block residual {:.2e})",
        config.output.display(),
        nullspace
            .map(|measured| format!(", measured null space {measured}"))
            .unwrap_or_default(),
        thermal.steps,
        thermal.residual,
        worst_comm.max(worst_pop),
    ))
}

/// Limiting energy coefficients versus local dimension.
fn asymptotics_energy(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("asymptotics-energy", settings)?;
    let d_max = settings.d_max.unwrap_or(7);
    if !(2..=7).contains(&d_max) {
        bail!("d_max must lie in 2..=7, got {d_max}");
    }
    let samples = settings.samples.unwrap_or(1_000_000);
    config.d_max = Some(d_max);
    config.samples = Some(samples);

    let mut sheet = Sheet::new(&["d", "coefficient", "standard_error", "samples", "method"]);
    for d in 2..=d_max as usize {
        if d <= 3 {
            let value = energy_coefficient(d)?;
            sheet.push(vec![
                Cell::Int(d as u64),
                value.into(),
                0.0.into(),
                Cell::Int(0),
                Cell::Text("quadrature".into()),
            ]);
        } else {
            let est = energy_coefficient_mc(d, samples, config.seed.wrapping_add(d as u64))?;
            sheet.push(vec![
                Cell::Int(d as u64),
                est.value.into(),
                est.standard_error.into(),
                Cell::Int(est.samples as u64),
                Cell::Text("monte-carlo".into()),
            ]);
        }
    }
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} coefficients to {}",
        config.output.display()
    ))
}

/// Exact degeneracy entropy against its leading-order growth law.
fn asymptotics_entropy(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("asymptotics-entropy", settings)?;
    let n_grid = settings
        .n_grid
        .clone()
        .ok_or_else(|| anyhow!("missing n_grid"))?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        bail!("n_grid must be non-empty and strictly increasing: {n_grid:?}");
    }
    config.n_grid = Some(n_grid.clone());

    let kind = settings.kind.as_deref().unwrap_or("sud");
    let exact: Box<dyn Fn(u32) -> Result<f64> + Sync> = match kind {
        "sud" => {
            let d = settings
                .d
                .ok_or_else(|| anyhow!("missing local dimension d"))?;
            if !(2..=3).contains(&d) {
                bail!("exact shape sums are tabulated for d in {{2, 3}}, got {d}");
            }
            config.ensemble = Some(crate::config::EnsembleConfig {
                n: *n_grid.last().expect("non-empty grid"),
                kind: "sud".into(),
                d: Some(d),
                two_s: None,
                spectrum: None,
                levels: None,
                applied_shift: None,
                delta: None,
            });
            Box::new(move |n| Ok(exact_entropy_beta0(n, d)?))
        }
        "spin" => {
            let s = settings
                .s
                .as_deref()
                .ok_or_else(|| anyhow!("kind=spin needs s"))?;
            let two_s = crate::config::parse_two_s(s)?;
            config.ensemble = Some(crate::config::EnsembleConfig {
                n: *n_grid.last().expect("non-empty grid"),
                kind: "spin".into(),
                d: None,
                two_s: Some(two_s),
                spectrum: None,
                levels: None,
                applied_shift: None,
                delta: None,
            });
            Box::new(move |n| Ok(exact_spin_entropy_beta0(n, two_s)?))
        }
        other => bail!("unknown ensemble kind {other:?}"),
    };
    // Spin block labels live on a one-dimensional ladder, so their
    // degeneracy entropy grows like (1/2) ln n for any fixed spin size.
    let asymptote: Box<dyn Fn(u32) -> f64 + Sync> = match kind {
        "sud" => {
            let d = settings.d.expect("validated above") as usize;
            Box::new(move |n| entropy_asymptote(d, n))
        }
        _ => Box::new(|n| 0.5 * f64::from(n).ln()),
    };

    let rows: Vec<Vec<Cell>> = n_grid
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>> {
            let exact_value = exact(n)?;
            let leading = asymptote(n);
            Ok(vec![
                Cell::Int(u64::from(n)),
                exact_value.into(),
                leading.into(),
                (exact_value / leading).into(),
            ])
        })
        .collect::<Result<_>>()?;

    let mut sheet = Sheet::new(&["n", "exact_entropy", "asymptote", "ratio"]);
    for row in rows {
        sheet.push(row);
    }
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} ensemble sizes to {}",
        config.output.display()
    ))
}

/// Per-block contributions to the steady-state changes at one
/// temperature pair; the final row holds the totals.
fn irrep_terms(settings: &Settings) -> Result<String> {
    let mut config = RunConfig::new("irrep-terms", settings)?;
    let (ensemble, echo) = resolve_ensemble(settings)?;
    let beta = single_beta(settings, "irrep-terms")?;
    let beta0 = settings
        .beta0
        .ok_or_else(|| anyhow!("missing preparation beta0"))?;
    if beta0 <= 0.0 {
        bail!("irrep-terms needs beta0 > 0 (contributions compare against equilibrium at beta0)");
    }
    config.ensemble = Some(echo);
    config.temperatures = Some(TemperatureConfig {
        beta0: Some(beta0),
        beta: Some(vec![beta]),
        ..TemperatureConfig::default()
    });

    let state = steady_state_quantities(&ensemble, beta, beta0)?;
    let reference = steady_state_quantities(&ensemble, beta0, beta0)?;
    let mut sheet = Sheet::new(&[
        "block",
        "probability",
        "energy",
        "entropy",
        "free_energy",
        "d_energy",
        "d_entropy",
        "d_free_energy",
    ]);
    let (mut de_total, mut ds_total, mut df_total) = (0.0, 0.0, 0.0);
    for (at_beta, at_ref) in state.per_block.iter().zip(&reference.per_block) {
        if at_beta.label != at_ref.label {
            bail!("internal error: block tables are not aligned");
        }
        let p = at_beta.probability;
        let de = p * (at_beta.energy - at_ref.energy);
        let ds = p * (at_beta.entropy - at_ref.entropy);
        // Both free-energy terms share the bath beta, so the changes
        // vanish identically at beta = beta0.
        let df = de - ds / beta;
        de_total += de;
        ds_total += ds;
        df_total += df;
        sheet.push(vec![
            block_cell(&at_beta.label),
            p.into(),
            at_beta.energy.into(),
            at_beta.entropy.into(),
            at_beta.free_energy.into(),
            de.into(),
            ds.into(),
            df.into(),
        ]);
    }
    sheet.push(vec![
        Cell::Text("total".into()),
        1.0.into(),
        state.energy.into(),
        state.reduced_entropy.into(),
        state.reduced_free_energy.into(),
        de_total.into(),
        ds_total.into(),
        df_total.into(),
    ]);
    let count = write_sheet(&config, &sheet)?;
    Ok(format!(
        "wrote {count} block rows to {}",
        config.output.display()
    ))
}
