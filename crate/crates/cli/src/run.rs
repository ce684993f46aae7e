//! Command dispatch.

use std::path::PathBuf;

use dirac_lattice::field::{l2_distance, SpinorField};
use dirac_lattice::functionals::{
    bony_decay_audit, charge_audit, functional_trace, gronwall_audit, pair_trace, pointwise_audit,
    triangle_charge_audit, Domain,
};
use dirac_lattice::harness::{c0_for, convergence_study, mollify_with, plan_cones, uniqueness_probe};
use dirac_lattice::model::check_algebraic_bounds;
use dirac_lattice::solver::{evolve, thirring_soliton, FieldProvider, OracleStatus, SolverConfig, ACCEPT_ORDER};
use dirac_lattice::{sample_initial, Grid, Params};

use crate::config::{AuditKind, Command, Format, RunConfig};
use crate::output::{
    plan_json, records_csv, records_json, snapshots_csv, summary, table_csv, trace_csv, Artifacts, Record,
};
use crate::CliError;

/// Result of one run: exit status, written files and terminal lines.
#[derive(Debug)]
pub struct Outcome {
    pub exit: i32,
    pub artifacts: Vec<PathBuf>,
    pub lines: Vec<String>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    out: Artifacts,
    lines: Vec<String>,
}

pub fn run_command(cfg: &RunConfig) -> Outcome {
    let mut run = Run {
        cfg,
        out: Artifacts::default(),
        lines: Vec::new(),
    };
    let result = match cfg.command {
        Command::Simulate => run.simulate(),
        Command::Audit => run.audit(),
        Command::Converge => run.converge(),
        Command::Unique => run.unique(),
        Command::SolitonCheck => run.soliton_check(),
    };
    let exit = match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            run.lines.push(format!("error: {e}"));
            e.exit_code()
        }
    };
    Outcome {
        exit,
        artifacts: run.out.written,
        lines: run.lines,
    }
}

impl Run<'_> {
    fn write(&mut self, suffix: &str, body: &str) -> Result<(), CliError> {
        let path = self.out.write(&self.cfg.prefix, suffix, body)?;
        self.lines.push(format!("wrote {}", path.display()));
        Ok(())
    }

    /// Evolves `f0`; on blow-up the partial run is written before failing.
    fn evolve(&mut self, f0: &SpinorField<f64>, every: usize, tag: &str) -> Result<Vec<SpinorField<f64>>, CliError> {
        let cfg = SolverConfig::recording_every(every);
        match evolve(f0, &self.cfg.params, &cfg, self.cfg.horizon) {
            Ok(tr) => {
                if tr.rounded_down {
                    self.lines.push(format!(
                        "note: T = {} is not a multiple of dt; stopped at t = {}",
                        self.cfg.horizon,
                        tr.final_time()
                    ));
                }
                Ok(tr.snapshots)
            }
            Err(e) => {
                let snaps = e.partial.snapshots;
                let tr = functional_trace(&snaps, &Domain::FullLine)?;
                self.write(&format!("{tag}_partial_trace.csv"), &trace_csv(&tr, &snaps))?;
                Err(e.error.into())
            }
        }
    }

    fn initial(&self, d: &dirac_lattice::Datum) -> Result<SpinorField<f64>, CliError> {
        Ok(sample_initial(d, &self.cfg.grid)?)
    }

    fn simulate(&mut self) -> Result<bool, CliError> {
        let f0 = self.initial(&self.cfg.datum)?;
        let snaps = self.evolve(&f0, self.cfg.record_every, "")?;
        let tr = functional_trace(&snaps, &Domain::FullLine)?;
        self.write("_trace.csv", &trace_csv(&tr, &snaps))?;
        self.write("_snapshots.csv", &snapshots_csv(&snaps))?;
        Ok(true)
    }

    fn emit_records(&mut self, records: &[Record]) -> Result<bool, CliError> {
        for r in records {
            self.lines.push(summary(r));
        }
        match self.cfg.format {
            Format::Csv => self.write("_audit.csv", &records_csv(records))?,
            Format::StructuredReport => self.write("_audit.json", &records_json(records))?,
        }
        Ok(records.iter().all(|r| r.passed))
    }

    fn audit(&mut self) -> Result<bool, CliError> {
        let cfg = self.cfg;
        let a = &cfg.audit;
        let (p, k, tol, tri) = (&cfg.params, &cfg.constants, &a.tolerance, a.triangle);
        let mut reports = Vec::new();
        if a.selection.contains(&AuditKind::Algebraic) {
            reports.extend(check_algebraic_bounds(a.samples, p, k, a.seed)?);
        }
        let needs_run = a.selection.iter().any(|s| *s != AuditKind::Algebraic);
        if needs_run {
            // the cone audits need every step
            let f0 = self.initial(&cfg.datum)?;
            let snaps = self.evolve(&f0, 1, "")?;
            let partner = match &a.partner {
                Some(d) if a.selection.contains(&AuditKind::Gronwall) => {
                    let g0 = self.initial(d)?;
                    Some(self.evolve(&g0, 1, "_partner")?)
                }
                _ => None,
            };
            for kind in &a.selection {
                match kind {
                    AuditKind::Algebraic => {}
                    AuditKind::Charge => reports.push(charge_audit(&snaps, tol)?),
                    AuditKind::Triangle => reports.push(triangle_charge_audit(&snaps, &tri, a.tau, tol)?),
                    AuditKind::Pointwise => {
                        let c0 = a.c0.unwrap_or_else(|| c0_for(&f0, &[]));
                        reports.extend(pointwise_audit(&snaps, &tri, c0, p, tol)?);
                    }
                    AuditKind::Bony => reports.extend(bony_decay_audit(&snaps, &tri, k, p, tol)?),
                    AuditKind::Gronwall => {
                        let b = partner
                            .as_deref()
                            .expect("partner run exists when gronwall is selected");
                        reports.extend(gronwall_audit(&snaps, b, &tri, k, p, tol)?);
                    }
                }
            }
            let dom = Domain::Triangle(tri);
            let body = match &partner {
                Some(b) => trace_csv(&pair_trace(&snaps, b, &dom)?.0, &snaps),
                None => trace_csv(&functional_trace(&snaps, &dom)?, &snaps),
            };
            self.write("_trace.csv", &body)?;
        }
        let records: Vec<Record> = reports.iter().map(Record::from).collect();
        self.emit_records(&records)
    }

    fn converge(&mut self) -> Result<bool, CliError> {
        let cfg = self.cfg;
        let s = &cfg.study;
        let table = convergence_study(&cfg.datum, &s.epsilons, s.kernel, &cfg.params, cfg.horizon, &cfg.grid)?;
        self.write("_convergence.csv", &table_csv(&table))?;
        if s.plan {
            let fields = s
                .epsilons
                .iter()
                .map(|e| mollify_with(&cfg.datum, *e, &cfg.grid, s.kernel))
                .collect::<Result<Vec<_>, _>>()?;
            let limit = fields.last().expect("epsilons are nonempty");
            let c0 = c0_for(limit, &fields);
            let plan = plan_cones(limit, &fields, cfg.horizon, &cfg.constants, c0, &cfg.params)?;
            self.write("_plan.json", &plan_json(&plan))?;
        }
        Ok(true)
    }

    fn unique(&mut self) -> Result<bool, CliError> {
        let cfg = self.cfg;
        let s = &cfg.study;
        let [ka, kb] = s.kernels;
        let table = uniqueness_probe(&cfg.datum, ka, kb, &s.epsilons, &cfg.params, cfg.horizon, &cfg.grid)?;
        self.write("_uniqueness.csv", &table_csv(&table))?;
        Ok(true)
    }

    fn soliton_check(&mut self) -> Result<bool, CliError> {
        let cfg = self.cfg;
        let m = cfg.params.m;
        let oracle = thirring_soliton(m, cfg.soliton_frequency, &cfg.grid)?;
        let mut validation = Record {
            inequality: "soliton_residual_order".into(),
            passed: oracle.accepted(),
            max_violation: 0.0,
            tolerance_budget: 0.0,
            worst_margin: 0.0,
            witness: None,
            constants: None,
            info: Vec::new(),
        };
        let mut best = f64::NEG_INFINITY;
        for (variant, r) in &oracle.residuals {
            let order = (r[0] / r[1]).log2().min((r[1] / r[2]).log2());
            best = best.max(order);
            validation.info.push((format!("order_{}", variant.name()), order));
        }
        validation.worst_margin = ACCEPT_ORDER - best;
        validation.max_violation = validation.worst_margin.max(0.0);
        let mut records = vec![validation];
        if let (OracleStatus::Accepted { .. }, Some(exact)) = (&oracle.status, oracle.exact) {
            let levels: Vec<Grid> = vec![cfg.grid, cfg.grid.refined(2), cfg.grid.refined(4)];
            let params = Params::thirring(m);
            let mut errors = Vec::with_capacity(3);
            for g in &levels {
                let f0 = exact_field(&exact, g, 0.0)?;
                let tr = evolve(&f0, &params, &SolverConfig::recording_every(usize::MAX), cfg.horizon)
                    .map_err(|e| CliError::from(e.error))?;
                let last = tr.last();
                errors.push(l2_distance(last, &exact_field(&exact, g, last.t)?, None)?);
            }
            let order = (errors[0] / errors[1]).log2().min((errors[1] / errors[2]).log2());
            let margin = ACCEPT_ORDER - order;
            records.push(Record {
                inequality: "soliton_tracking_order".into(),
                passed: order >= ACCEPT_ORDER,
                max_violation: margin.max(0.0),
                tolerance_budget: 0.0,
                worst_margin: margin,
                witness: None,
                constants: None,
                info: vec![
                    ("order".into(), order),
                    ("error_coarse".into(), errors[0]),
                    ("error_mid".into(), errors[1]),
                    ("error_fine".into(), errors[2]),
                    ("charge".into(), exact.charge()),
                ],
            });
        } else {
            self.lines
                .push("soliton oracle unavailable: no sign variant passed residual validation".into());
        }
        self.emit_records(&records)
    }
}

fn exact_field<P: FieldProvider<f64>>(s: &P, g: &Grid, t: f64) -> Result<SpinorField<f64>, CliError> {
    let (u, v) = (0..g.n_points).map(|i| s.eval(g.x(i), t)).unzip();
    Ok(SpinorField::new(*g, t, u, v)?)
}
