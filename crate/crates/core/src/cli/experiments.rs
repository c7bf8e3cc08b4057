//! The experiment recipes: each turns a config into data tables.

use std::path::PathBuf;

use serde_json::{json, Value};

use super::config::{CollapseAt, Experiment, ExperimentConfig};
use crate::dynamics::{time_average, QuenchProtocol, QuenchSetup, ThermalQuenchSetup};
use crate::ensemble::{run_ensemble, EnsembleConfig, EnsembleStats, FnTask, RunningStats};
use crate::error::{Error, Result};
use crate::freefermion::{diagonalize, energy_gap_with, GapDefinition};
use crate::linalg;
use crate::model::{assemble_quadratic_form, clean_form, DisorderRealization, ModelSpec};
use crate::oracle::{validate_against_oracle, ValidationOptions, ValidationReport};
use crate::records::{Cell, Table, CORRELATION_COLUMNS, DYNAMICS_COLUMNS, ENTROPY_COLUMNS, STATICS_COLUMNS};
use crate::scaling::{
    central_charge, central_charge_cuts, data_collapse, gap_crossing, CollapseOptions, EntropyProfile,
    SizeSweep, SizedProfile,
};
use crate::statics::{
    correlation_profile, entanglement_profile, global_fidelity, mean_single_site_fidelity,
    mean_two_site_fidelity, static_observables, StaticsReference,
};

/// Execution settings that are not part of the experiment's identity.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub workers: usize,
    pub progress: bool,
    pub output: PathBuf,
}

/// Tables produced by one experiment plus a JSON summary of fitted values.
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub warnings: Vec<String>,
    pub oracle: Option<Vec<ValidationReport>>,
}

impl ExperimentOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

pub fn execute(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<ExperimentOutput> {
    let runner = Runner { cfg, ctx };
    match cfg.experiment {
        Experiment::StaticsSweep => runner.statics(true),
        Experiment::FidelitySweep => runner.statics(false),
        Experiment::GapCrossing => runner.gap_crossing(),
        Experiment::Collapse => runner.collapse(),
        Experiment::CentralCharge => runner.central_charge(),
        Experiment::QuenchZeroT => runner.quench_zero_t(),
        Experiment::QuenchThermal => runner.quench_thermal(),
        Experiment::OracleValidate => runner.oracle(),
    }
}

fn mean_cell(s: &RunningStats) -> Cell {
    if s.count == 0 {
        Cell::Empty
    } else {
        Cell::Float(s.mean)
    }
}

fn sem_cell(s: &RunningStats) -> Cell {
    if s.count == 0 {
        Cell::Empty
    } else {
        Cell::Float(s.sem())
    }
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    ctx: &'a RunContext,
}

impl Runner<'_> {
    fn spec(&self, length: usize, lambda: f64, r: f64) -> ModelSpec {
        self.cfg.model.spec(length, lambda, r)
    }

    fn ensemble(&self, label: String) -> EnsembleConfig {
        let n = self.cfg.realizations;
        let o = &self.cfg.options;
        let mut e = EnsembleConfig::new(n)
            .workers(self.ctx.workers)
            .chunk_size(o.chunk_size.unwrap_or_else(|| n.div_ceil(256).max(1)));
        e.max_failure_fraction = o.max_failure_fraction;
        if self.ctx.progress {
            e = e.progress(label);
        }
        if o.checkpoint {
            e = e.checkpoint(self.ctx.output.join("checkpoint.jsonl"));
        }
        e
    }

    fn statics(&self, with_xi: bool) -> Result<ExperimentOutput> {
        let mut table = Table::new("statics", &STATICS_COLUMNS);
        let gap_def = self.cfg.model.gap;
        for &length in &self.cfg.grids.lengths {
            for &r in &self.cfg.grids.disorders {
                for lambda in self.cfg.lambdas() {
                    let spec = self.spec(length, lambda, r);
                    let reference = StaticsReference::new(diagonalize(&clean_form(&spec))?)?;
                    let task = FnTask::new(["F", "f1", "f2", "xi", "gap"], |real: &DisorderRealization| {
                        let d = diagonalize(&assemble_quadratic_form(real, &spec))?;
                        let gap = energy_gap_with(&d, gap_def);
                        if with_xi {
                            let s = static_observables(&reference, &d)?;
                            Ok(vec![s.fidelity, s.f1, s.f2, s.xi, gap])
                        } else {
                            Ok(vec![
                                global_fidelity(&reference.ideal, &d)?,
                                mean_single_site_fidelity(&reference, &d)?,
                                mean_two_site_fidelity(&reference, &d)?,
                                f64::NAN,
                                gap,
                            ])
                        }
                    });
                    let label = format!("statics L={length} r={r} lambda={lambda}");
                    let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                    let mut row: Vec<Cell> = vec![length.into(), lambda.into(), r.into(), stats.completed.into()];
                    for s in &stats.stats {
                        row.push(mean_cell(s));
                        row.push(sem_cell(s));
                    }
                    table.push(row);
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![table],
            summary: json!({}),
            ..Default::default()
        })
    }

    /// Mean gap per `(L, lambda)` at disorder `r`; rows in statics layout.
    fn gap_means(&self, r: f64, lambdas: &[f64], table: &mut Table) -> Result<Vec<Vec<f64>>> {
        let gap_def = self.cfg.model.gap;
        let mut means = Vec::new();
        for &length in &self.cfg.grids.lengths {
            let mut row_means = Vec::new();
            for &lambda in lambdas {
                let spec = self.spec(length, lambda, r);
                let task = FnTask::new(["gap"], |real: &DisorderRealization| {
                    let z = assemble_quadratic_form(real, &spec).z();
                    let mut sv = linalg::singular_values(&z).ok_or(Error::SvdNonConvergence(real.id))?;
                    sv.sort_by(f64::total_cmp);
                    Ok(vec![match gap_def {
                        GapDefinition::MinQuasiparticle => sv[0],
                        GapDefinition::ParityResolved => sv[0] + sv[1],
                    }])
                });
                let label = format!("gap L={length} r={r} lambda={lambda}");
                let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                let s = &stats.stats[0];
                let mut row: Vec<Cell> = vec![length.into(), lambda.into(), r.into(), stats.completed.into()];
                row.extend(std::iter::repeat_n(Cell::Empty, 8));
                row.push(mean_cell(s));
                row.push(sem_cell(s));
                table.push(row);
                row_means.push(s.mean_or_nan());
            }
            means.push(row_means);
        }
        Ok(means)
    }

    fn gap_crossing(&self) -> Result<ExperimentOutput> {
        let lambdas = self.cfg.lambdas();
        let zeta = self.cfg.options.zeta;
        let mut gaps = Table::new("statics", &STATICS_COLUMNS);
        let mut crossings = Table::new("crossings", &["r", "zeta", "L1", "L2", "lambda", "selected"]);
        let mut estimates = Table::new("lambda_c", &["r", "zeta", "lambda_c", "pairs"]);
        let mut warnings = Vec::new();
        let mut summary = Vec::new();
        for &r in &self.cfg.grids.disorders {
            let means = self.gap_means(r, &lambdas, &mut gaps)?;
            let sweep = SizeSweep::new(self.cfg.grids.lengths.clone(), lambdas.clone(), means)?;
            match gap_crossing(&sweep, zeta) {
                Ok(res) => {
                    for p in &res.pairs {
                        for &root in &p.roots {
                            crossings.push(vec![
                                r.into(),
                                zeta.into(),
                                p.sizes.0.into(),
                                p.sizes.1.into(),
                                root.into(),
                                Cell::Int((p.selected == Some(root)) as i64),
                            ]);
                        }
                    }
                    let used = res.pairs.iter().filter(|p| p.selected.is_some()).count();
                    estimates.push(vec![r.into(), zeta.into(), res.lambda_c.into(), used.into()]);
                    warnings.extend(res.warnings.iter().map(|w| format!("r = {r}: {w}")));
                    summary.push(json!({"r": r, "lambda_c": res.lambda_c, "pairs": res.pairs}));
                }
                Err(e) => {
                    warnings.push(format!("r = {r}: {e}"));
                    estimates.push(vec![r.into(), zeta.into(), Cell::Empty, 0usize.into()]);
                    summary.push(json!({"r": r, "lambda_c": null}));
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![gaps, crossings, estimates],
            summary: json!({"zeta": zeta, "zeta_note": "dynamical exponent held at the given value for every disorder strength", "estimates": summary}),
            warnings,
            oracle: None,
        })
    }

    fn collapse_lambdas(&self, r: f64, warnings: &mut Vec<String>) -> Result<Vec<f64>> {
        let lengths = &self.cfg.grids.lengths;
        let fixed = self.cfg.options.collapse_lambda;
        if self.cfg.options.collapse_at == CollapseAt::Fixed {
            return Ok(vec![fixed; lengths.len()]);
        }
        let lambdas = self.cfg.lambdas();
        let mut scratch = Table::new("scratch", &STATICS_COLUMNS);
        let means = self.gap_means(r, &lambdas, &mut scratch)?;
        let sweep = SizeSweep::new(lengths.clone(), lambdas, means)?;
        let res = gap_crossing(&sweep, self.cfg.options.zeta);
        let roots: Vec<Option<f64>> = match &res {
            Ok(res) => res.pairs.iter().map(|p| p.selected).collect(),
            Err(_) => vec![None; lengths.len() - 1],
        };
        Ok((0..lengths.len())
            .map(|k| {
                let pick = roots[k.min(roots.len() - 1)];
                pick.unwrap_or_else(|| {
                    warnings.push(format!(
                        "r = {r}, L = {}: no pseudo-critical point, using lambda = {fixed}",
                        lengths[k]
                    ));
                    fixed
                })
            })
            .collect())
    }

    fn collapse(&self) -> Result<ExperimentOutput> {
        let o = &self.cfg.options;
        let opts = CollapseOptions {
            nu_min: o.nu_range[0],
            nu_max: o.nu_range[1],
            x_min: o.x_window[0],
            x_max: o.x_window[1],
            ..CollapseOptions::default()
        };
        let mut corr = Table::new("correlations", &CORRELATION_COLUMNS);
        let mut fits = Table::new("collapse", &["r", "nu", "cost", "baseline_cost"]);
        let mut curves = Table::new("collapsed", &["r", "L", "x", "y"]);
        let mut warnings = Vec::new();
        let mut summary = Vec::new();
        for &r in &self.cfg.grids.disorders {
            let lambdas = self.collapse_lambdas(r, &mut warnings)?;
            let mut profiles = Vec::new();
            for (&length, &lambda) in self.cfg.grids.lengths.iter().zip(&lambdas) {
                let spec = self.spec(length, lambda, r);
                let reference = length / 2;
                let separations: Vec<usize> = (1..length - reference).collect();
                let names: Vec<String> = separations.iter().map(|d| format!("C{d}")).collect();
                let task = FnTask::new(names, |real: &DisorderRealization| {
                    let d = diagonalize(&assemble_quadratic_form(real, &spec))?;
                    Ok(correlation_profile(&d, reference).values)
                });
                let label = format!("correlations L={length} r={r} lambda={lambda}");
                let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                for (d, s) in separations.iter().zip(&stats.stats) {
                    corr.push(vec![
                        length.into(),
                        lambda.into(),
                        r.into(),
                        (*d).into(),
                        mean_cell(s),
                        sem_cell(s),
                    ]);
                }
                profiles.push(SizedProfile {
                    length,
                    separations,
                    values: stats.stats.iter().map(RunningStats::mean_or_nan).collect(),
                });
            }
            match data_collapse(&profiles, &opts) {
                Ok(res) => {
                    fits.push(vec![r.into(), res.nu.into(), res.cost.into(), res.baseline_cost.into()]);
                    for c in &res.curves {
                        for (x, y) in c.x.iter().zip(&c.y) {
                            curves.push(vec![r.into(), c.length.into(), (*x).into(), (*y).into()]);
                        }
                    }
                    warnings.extend(res.warnings.iter().map(|w| format!("r = {r}: {w}")));
                    summary.push(json!({"r": r, "lambdas": lambdas, "nu": res.nu, "cost": res.cost, "baseline_cost": res.baseline_cost}));
                }
                Err(e) => {
                    warnings.push(format!("r = {r}: {e}"));
                    fits.push(vec![r.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![corr, fits, curves],
            summary: json!({"collapse_at": o.collapse_at, "fits": summary}),
            warnings,
            oracle: None,
        })
    }

    fn central_charge(&self) -> Result<ExperimentOutput> {
        let mut entropy = Table::new("entropy", &ENTROPY_COLUMNS);
        let mut fits = Table::new("central_charge", &["L", "lambda", "r", "c", "A", "residual", "points"]);
        let mut warnings = Vec::new();
        let mut summary = Vec::new();
        for &length in &self.cfg.grids.lengths {
            let cuts = match self.cfg.options.cuts {
                0 => (1..length).collect(),
                n => central_charge_cuts(length, n),
            };
            for &r in &self.cfg.grids.disorders {
                for lambda in self.cfg.lambdas() {
                    let spec = self.spec(length, lambda, r);
                    let names: Vec<String> = cuts.iter().map(|l| format!("S{l}")).collect();
                    let task = FnTask::new(names, |real: &DisorderRealization| {
                        entanglement_profile(&diagonalize(&assemble_quadratic_form(real, &spec))?, &cuts)
                    });
                    let label = format!("entropy L={length} r={r} lambda={lambda}");
                    let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                    for (&l, s) in cuts.iter().zip(&stats.stats) {
                        entropy.push(vec![length.into(), lambda.into(), r.into(), l.into(), mean_cell(s), sem_cell(s)]);
                    }
                    let profile = EntropyProfile {
                        length,
                        cuts: cuts.clone(),
                        entropies: stats.stats.iter().map(RunningStats::mean_or_nan).collect(),
                    };
                    let mut row: Vec<Cell> = vec![length.into(), lambda.into(), r.into()];
                    match central_charge(&profile) {
                        Ok(fit) => {
                            row.extend([fit.c.into(), fit.a.into(), fit.residual.into(), fit.points.into()]);
                            summary.push(json!({"L": length, "lambda": lambda, "r": r, "c": fit.c, "A": fit.a}));
                        }
                        Err(e) => {
                            warnings.push(format!("L = {length}, r = {r}, lambda = {lambda}: {e}"));
                            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, 0usize.into()]);
                        }
                    }
                    fits.push(row);
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![entropy, fits],
            summary: json!({"fits": summary}),
            warnings,
            oracle: None,
        })
    }

    fn dynamics_rows(
        &self,
        head: [Cell; 6],
        times: &[f64],
        stats: &EnsembleStats,
        dynamics: &mut Table,
        asymptotic: &mut Table,
    ) {
        for (k, &t) in times.iter().enumerate() {
            let s = &stats.stats[k];
            let mut row = head.to_vec();
            row.extend([t.into(), mean_cell(s), sem_cell(s)]);
            dynamics.push(row);
        }
        let (a, b) = self.cfg.asymptotic_window();
        let s = &stats.stats[times.len()];
        let mut row = head.to_vec();
        row.extend([a.into(), b.into(), mean_cell(s), sem_cell(s)]);
        asymptotic.push(row);
    }

    fn asymptotic_table() -> Table {
        Table::new(
            "asymptotic",
            &["L", "lambda0", "dlambda", "kind", "r", "T", "t_from", "t_to", "F_mean", "F_sem"],
        )
    }

    fn time_names(times: &[f64]) -> Vec<String> {
        times
            .iter()
            .map(|t| format!("F(t={t})"))
            .chain(std::iter::once("F_asymptotic".to_string()))
            .collect()
    }

    fn quench_zero_t(&self) -> Result<ExperimentOutput> {
        let times = self.cfg.times();
        let (a, b) = self.cfg.asymptotic_window();
        let dl = self.cfg.options.delta_lambda;
        let mut dynamics = Table::new("dynamics", &DYNAMICS_COLUMNS);
        let mut asymptotic = Self::asymptotic_table();
        for &length in &self.cfg.grids.lengths {
            for &r in &self.cfg.grids.disorders {
                for lambda0 in self.cfg.lambdas() {
                    for &name in &self.cfg.options.quench_kinds {
                        let kind = self.cfg.options.quench_kind(name, length);
                        let spec = self.spec(length, lambda0, r);
                        let protocol = QuenchProtocol {
                            kind,
                            lambda_initial: lambda0,
                            delta_lambda: dl,
                            times: times.clone(),
                        };
                        let setup = QuenchSetup::new(&spec, &protocol)?;
                        let task = FnTask::new(Self::time_names(&times), |real: &DisorderRealization| {
                            let mut f = setup.run(real)?;
                            f.push(time_average(&times, &f, a, b).unwrap_or(f64::NAN));
                            Ok(f)
                        });
                        let label = format!("{} quench L={length} r={r} lambda0={lambda0}", kind.label());
                        let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                        let head = [
                            length.into(),
                            lambda0.into(),
                            dl.into(),
                            kind.label().into(),
                            r.into(),
                            Cell::Empty,
                        ];
                        self.dynamics_rows(head, &times, &stats, &mut dynamics, &mut asymptotic);
                    }
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![dynamics, asymptotic],
            summary: json!({"asymptotic_window": [a, b]}),
            ..Default::default()
        })
    }

    fn quench_thermal(&self) -> Result<ExperimentOutput> {
        let times = self.cfg.times();
        let (a, b) = self.cfg.asymptotic_window();
        let dl = self.cfg.options.delta_lambda;
        let mut dynamics = Table::new("dynamics", &DYNAMICS_COLUMNS);
        let mut asymptotic = Self::asymptotic_table();
        for &length in &self.cfg.grids.lengths {
            for &r in &self.cfg.grids.disorders {
                for lambda0 in self.cfg.lambdas() {
                    for &temp in &self.cfg.grids.temperatures {
                        let spec = self.spec(length, lambda0, r);
                        let setup = ThermalQuenchSetup::new(&spec, lambda0, lambda0 + dl, temp, &times)?;
                        let task = FnTask::new(Self::time_names(&times), |real: &DisorderRealization| {
                            let mut f = setup.run(real)?;
                            f.push(time_average(&times, &f, a, b).unwrap_or(f64::NAN));
                            Ok(f)
                        });
                        let label = format!("thermal quench L={length} r={r} lambda0={lambda0} T={temp}");
                        let stats = run_ensemble(&spec, &task, &self.ensemble(label))?;
                        let head = [
                            length.into(),
                            lambda0.into(),
                            dl.into(),
                            "global".into(),
                            r.into(),
                            temp.into(),
                        ];
                        self.dynamics_rows(head, &times, &stats, &mut dynamics, &mut asymptotic);
                    }
                }
            }
        }
        Ok(ExperimentOutput {
            tables: vec![dynamics, asymptotic],
            summary: json!({"asymptotic_window": [a, b], "observable": "site-averaged single-site fidelity"}),
            ..Default::default()
        })
    }

    fn oracle(&self) -> Result<ExperimentOutput> {
        let mut table = Table::new("oracle", &["L", "check", "max_deviation", "tolerance", "passed"]);
        let mut reports = Vec::new();
        for &length in &self.cfg.grids.lengths {
            let mut opts = ValidationOptions::new(length, self.cfg.realizations as usize);
            opts.seed = self.cfg.model.seed;
            if !self.cfg.grids.disorders.is_empty() {
                opts.disorders = self.cfg.grids.disorders.clone();
            }
            let lambdas = self.cfg.lambdas();
            if !lambdas.is_empty() {
                opts.lambdas = lambdas;
            }
            let times = self.cfg.times();
            if !times.is_empty() {
                opts.times = times;
            }
            if !self.cfg.grids.temperatures.is_empty() {
                opts.temperatures = self.cfg.grids.temperatures.clone();
            }
            let report = validate_against_oracle(&opts)?;
            for c in &report.checks {
                table.push(vec![
                    length.into(),
                    c.name.as_str().into(),
                    c.max_deviation.into(),
                    c.tolerance.into(),
                    Cell::Int(c.passed() as i64),
                ]);
            }
            reports.push(report);
        }
        Ok(ExperimentOutput {
            tables: vec![table],
            summary: json!({"reports": reports}),
            warnings: Vec::new(),
            oracle: Some(reports),
        })
    }
}
