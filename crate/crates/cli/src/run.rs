//! Single runs, delay sweeps, overlap diagnostics and audits.

use fcs_core::counting::{
    dft_coefficient_oracle, full_distribution, inequality_report, marginal_by_row_subsets, marginal_from_distribution,
    mean_numbers, mean_numbers_direct, DFT_MAX_CHANNELS, DFT_MAX_PARTICLES, INEQUALITY_SLACK, UNCORRELATED_TOL,
};
use fcs_core::linalg::{determinant, permanent};
use fcs_core::{CountingDistribution, ExperimentConfig, FcsError, OverlapSet, StatisticsKind};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::observable::Observable;
use crate::table::{Column, Table};

/// Tolerance on ‖Î − 1‖ below which inputs count as uncorrelated for the
/// mean-invariance check.
pub const MEAN_INVARIANCE_DISTANCE: f64 = 1e-8;

const UNITS_NOTE: &str = "energies in eps0 = pi^2 hbar^2 / (2 mu L^2), times and delays in 1/eps0";
const KINDS_NOTE: &str = "kinds: boson (permanent), fermion (determinant), dp (distinguishable particles)";
const NAN_NOTE: &str = "NaN marks a kind whose input modes are linearly dependent at that delay";

fn distributions(ov: &OverlapSet, kinds: &[StatisticsKind]) -> fcs_core::Result<Vec<Option<CountingDistribution>>> {
    kinds
        .iter()
        .map(|&k| match full_distribution(ov, k) {
            Ok(d) => Ok(Some(d)),
            Err(FcsError::DegenerateInput { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Evaluates `f` on every sweep point with `threads` workers (0 = all
/// cores) and returns the results in sweep order. The first error in
/// sweep order wins, so the outcome does not depend on scheduling.
fn parallel_points<T, F>(delays: &[(f64, f64)], threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> fcs_core::Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<fcs_core::Result<T>> = pool.install(|| delays.par_iter().map(|&(tau, d)| f(tau, d)).collect());
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// (τ in 1/ε₀, internal delay) pairs of the configured sweep.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("the configuration has no [sweep] section".into()))?;
    Ok(sweep.values.iter().copied().zip(sweep.delays.iter().copied()).collect())
}

/// Requested kinds with the distinguishable baseline always present.
pub fn with_baseline(kinds: &[StatisticsKind]) -> Vec<StatisticsKind> {
    let mut out = kinds.to_vec();
    out.push(StatisticsKind::Distinguishable);
    out.sort();
    out.dedup();
    out
}

pub fn parse_observables(cfg: &ExperimentConfig) -> Result<Vec<Observable>> {
    let texts = cfg.sweep.as_ref().map(|s| s.observables.as_slice()).unwrap_or(&[]);
    texts
        .iter()
        .map(|t| Observable::parse(t, cfg.channels.len(), cfg.particles()))
        .collect()
}

/// One row of a delay sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub per: f64,
    pub det: f64,
    pub distance: f64,
    pub completeness: f64,
    pub nodes: usize,
    /// Observable-major, kind-minor.
    pub values: Vec<f64>,
    /// Some(pass) when the inequalities are asserted at this point.
    pub inequalities: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub particles: usize,
    pub kinds: Vec<StatisticsKind>,
    pub observables: Vec<Observable>,
    pub points: Vec<SweepPoint>,
}

fn evaluate_point(
    cfg: &ExperimentConfig,
    tau: f64,
    delay: f64,
    kinds: &[StatisticsKind],
    observables: &[Observable],
) -> fcs_core::Result<SweepPoint> {
    let ov = cfg.overlap_set_at(delay)?;
    let dists = distributions(&ov, kinds)?;
    let mut values = Vec::with_capacity(observables.len() * kinds.len());
    for obs in observables {
        for dist in &dists {
            values.push(match dist {
                Some(d) => {
                    let v = obs.evaluate(&ov, d)?;
                    if obs.is_probability() { v.max(0.0) } else { v }
                }
                None => f64::NAN,
            });
        }
    }
    let report = inequality_report(&ov, UNCORRELATED_TOL)?;
    Ok(SweepPoint {
        tau,
        per: permanent(&ov.input)?.re,
        det: determinant(&ov.input)?.re,
        distance: ov.input.distance_from_identity(),
        completeness: ov.report.completeness_residual,
        nodes: ov.report.nodes,
        values,
        inequalities: report.asserted.then(|| report.all_satisfied(INEQUALITY_SLACK)),
    })
}

pub fn run_sweep(cfg: &ExperimentConfig, kinds: &[StatisticsKind], threads: usize) -> Result<SweepResult> {
    let points = sweep_points(cfg)?;
    let observables = parse_observables(cfg)?;
    let kinds = with_baseline(kinds);
    let rows = parallel_points(&points, threads, |tau, d| evaluate_point(cfg, tau, d, &kinds, &observables))?;
    Ok(SweepResult {
        particles: cfg.particles(),
        kinds,
        observables,
        points: rows,
    })
}

fn diagnostic_columns() -> Vec<Column> {
    vec![
        Column::new("tau", "delay between injections [1/eps0]"),
        Column::new("per_I", "permanent of the input overlap matrix [1]"),
        Column::new("det_I", "determinant of the input overlap matrix [1]"),
        Column::new("dist_I", "max |I_ij - delta_ij| [1]"),
        Column::new(
            "uncorrelated",
            format!("1 when dist_I <= {UNCORRELATED_TOL}, else 0 [flag]"),
        ),
    ]
}

impl SweepResult {
    pub fn column_name(obs: &Observable, kind: StatisticsKind) -> String {
        format!("{}_{}", obs.column(), kind.label())
    }

    pub fn table(&self) -> Table {
        let mut columns = diagnostic_columns();
        for obs in &self.observables {
            for &kind in &self.kinds {
                columns.push(Column::new(
                    Self::column_name(obs, kind),
                    format!("{}, {kind}", obs.describe(self.particles)),
                ));
            }
        }
        columns.push(Column::new(
            "inequalities",
            "bunching inequalities: 1 all hold, 0 violated, -1 not asserted (inputs correlated) [flag]",
        ));
        columns.push(Column::new("completeness", "max |sum_m Q(m) - I| [1]"));
        columns.push(Column::new("nodes", "quadrature nodes after convergence [count]"));
        let mut table = Table::new("fcs sweep", columns);
        table.notes = vec![UNITS_NOTE.into(), KINDS_NOTE.into(), NAN_NOTE.into()];
        for p in &self.points {
            let mut row = vec![p.tau, p.per, p.det, p.distance, flag(p.distance <= UNCORRELATED_TOL)];
            row.extend(&p.values);
            row.push(match p.inequalities {
                Some(true) => 1.0,
                Some(false) => 0.0,
                None => -1.0,
            });
            row.push(p.completeness);
            row.push(p.nodes as f64);
            table.push(row);
        }
        table
    }
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

/// per(Î), det(Î), ‖Î − 1‖ and the uncorrelated flag along the sweep.
pub fn run_overlap_diagnostics(cfg: &ExperimentConfig, threads: usize) -> Result<Table> {
    let points = sweep_points(cfg)?;
    let rows = parallel_points(&points, threads, |tau, d| {
        let ov = cfg.overlap_set_at(d)?;
        let distance = ov.input.distance_from_identity();
        Ok(vec![
            tau,
            permanent(&ov.input)?.re,
            determinant(&ov.input)?.re,
            distance,
            flag(distance <= UNCORRELATED_TOL),
            ov.report.completeness_residual,
            ov.report.nodes as f64,
            ov.report.doublings as f64,
        ])
    })?;
    let mut columns = diagnostic_columns();
    columns.push(Column::new("completeness", "max |sum_m Q(m) - I| [1]"));
    columns.push(Column::new("nodes", "quadrature nodes after convergence [count]"));
    columns.push(Column::new("doublings", "node doublings needed [count]"));
    let mut table = Table::new("fcs overlap diagnostics", columns);
    table.notes = vec![UNITS_NOTE.into()];
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

/// Full distribution of every requested kind at zero sweep delay.
pub fn run_single(cfg: &ExperimentConfig, kinds: &[StatisticsKind]) -> Result<(Table, OverlapSet)> {
    let ov = cfg.overlap_set()?;
    let dists = distributions(&ov, kinds)?;
    let n = ov.channels();
    let mut columns: Vec<Column> = (1..=n)
        .map(|m| Column::new(format!("n{m}"), format!("particles leaving through channel {m} [particles]")))
        .collect();
    for &k in kinds {
        columns.push(Column::new(format!("W_{}", k.label()), format!("outcome probability, {k} [probability]")));
    }
    let mut table = Table::new("fcs single", columns);
    table.notes = vec![UNITS_NOTE.into(), KINDS_NOTE.into(), NAN_NOTE.into()];
    for occ in fcs_core::counting::occupations(ov.particles(), n) {
        let mut row: Vec<f64> = occ.iter().map(|&c| c as f64).collect();
        row.extend(dists.iter().map(|d| d.as_ref().map_or(f64::NAN, |d| d.clipped(&occ))));
        table.push(row);
    }
    Ok((table, ov))
}

/// One line of the audit table.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest residual over the points where the check applies.
    pub worst: Option<f64>,
    pub applicable: usize,
}

impl AuditCheck {
    pub fn passed(&self) -> bool {
        self.worst.is_none_or(|w| w <= self.tolerance)
    }
}

const CHECKS: [(&str, f64); 11] = [
    ("completeness |sum Q - I|", 1e-8),
    ("PSD of I, Q(m), R(set): -min eigenvalue", 1e-10),
    ("Hadamard bounds on I", 1e-12),
    ("normalization |sum W - 1|", 1e-6),
    ("negative probability: -min W", 1e-10),
    ("enumeration vs DFT coefficients", 1e-9),
    ("marginal: summation vs row subsets", 1e-10),
    ("mean: summation vs row replacement", 1e-10),
    ("sum of means - J", 1e-8),
    ("mean invariance when uncorrelated", 1e-8),
    ("bunching inequalities", INEQUALITY_SLACK),
];
const INEQUALITY_CHECK: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub points: usize,
    pub checks: Vec<AuditCheck>,
    /// First inequality violation found, for the error message.
    pub first_violation: Option<String>,
}

fn worst(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

fn audit_point(ov: &OverlapSet, tau: f64) -> fcs_core::Result<(Vec<Option<f64>>, Option<String>)> {
    let mut out = vec![None; CHECKS.len()];
    let j = ov.particles();
    out[0] = Some(ov.report.completeness_residual);
    let r = &ov.report;
    let min_eig = r
        .min_eigenvalue_outgoing
        .iter()
        .copied()
        .fold(r.min_eigenvalue_input.min(r.min_eigenvalue_remainder), f64::min);
    out[1] = Some((-min_eig).max(0.0));
    let diag = ov.input.diagonal_product().re;
    let per = permanent(&ov.input)?.re;
    let det = determinant(&ov.input)?.re;
    out[2] = Some((diag - per).max(det - diag).max(0.0));

    let dists = distributions(ov, &StatisticsKind::ALL)?;
    let present: Vec<&CountingDistribution> = dists.iter().flatten().collect();
    out[3] = worst(present.iter().map(|d| d.normalization_residual));
    out[4] = worst(present.iter().map(|d| (-d.min_probability()).max(0.0)));
    if j <= DFT_MAX_PARTICLES && ov.channels() <= DFT_MAX_CHANNELS {
        let mut diffs = Vec::new();
        for d in &present {
            diffs.push(d.max_difference(&dft_coefficient_oracle(ov, d.kind)?));
        }
        out[5] = worst(diffs);
    }
    let mut marg = Vec::new();
    let mut means = Vec::new();
    let mut sums = Vec::new();
    for d in &present {
        for m in 0..ov.channels() {
            let a = marginal_from_distribution(d, m);
            let b = marginal_by_row_subsets(ov, d.kind, m)?;
            marg.extend(a.iter().zip(&b).map(|(x, y)| (x - y).abs()));
        }
        let a = mean_numbers(d);
        let b = mean_numbers_direct(ov, d.kind)?;
        means.extend(a.iter().zip(&b).map(|(x, y)| (x - y).abs()));
        sums.push((b.iter().sum::<f64>() - j as f64).abs());
    }
    out[6] = worst(marg);
    out[7] = worst(means);
    out[8] = worst(sums);
    if ov.input.distance_from_identity() <= MEAN_INVARIANCE_DISTANCE {
        let dp = mean_numbers_direct(ov, StatisticsKind::Distinguishable)?;
        let mut diffs = Vec::new();
        for d in present.iter().filter(|d| d.kind != StatisticsKind::Distinguishable) {
            let means = mean_numbers_direct(ov, d.kind)?;
            diffs.extend(means.iter().zip(&dp).map(|(x, y)| (x - y).abs()));
        }
        out[9] = worst(diffs);
    }
    let report = inequality_report(ov, UNCORRELATED_TOL)?;
    let mut violation = None;
    if report.asserted {
        let mut largest = 0.0f64;
        for e in &report.entries {
            let v = [e.bunching_margin(), e.antibunching_margin()]
                .into_iter()
                .flatten()
                .fold(0.0f64, |acc, m| acc.max(-m));
            if v > INEQUALITY_SLACK && violation.is_none() {
                violation = Some(format!("{} at tau = {tau}", e.event.label(j)));
            }
            largest = largest.max(v);
        }
        out[INEQUALITY_CHECK] = Some(largest);
    }
    Ok((out, violation))
}

/// Runs every invariant at each sweep point (or at zero delay without a sweep).
pub fn run_audit(cfg: &ExperimentConfig, threads: usize) -> Result<AuditReport> {
    let points = if cfg.sweep.is_some() {
        sweep_points(cfg)?
    } else {
        vec![(0.0, 0.0)]
    };
    let per_point = parallel_points(&points, threads, |tau, d| audit_point(&cfg.overlap_set_at(d)?, tau))?;
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, tolerance))| {
            let values: Vec<f64> = per_point.iter().filter_map(|(v, _)| v[i]).collect();
            AuditCheck {
                name,
                tolerance,
                applicable: values.len(),
                worst: worst(values),
            }
        })
        .collect();
    Ok(AuditReport {
        points: points.len(),
        checks,
        first_violation: per_point.into_iter().find_map(|(_, v)| v),
    })
}

impl AuditReport {
    pub fn render(&self) -> String {
        let mut out = format!("audit over {} evaluation point(s)\n", self.points);
        out.push_str(&format!(
            "{:<42} {:>12} {:>10} {:>7}  result\n",
            "check", "worst", "tolerance", "points"
        ));
        for c in &self.checks {
            let (worst, result) = match c.worst {
                Some(w) => (format!("{w:.3e}"), if c.passed() { "PASS" } else { "FAIL" }),
                None => ("-".to_string(), "n/a"),
            };
            out.push_str(&format!(
                "{:<42} {:>12} {:>10.0e} {:>7}  {result}\n",
                c.name, worst, c.tolerance, c.applicable
            ));
        }
        out
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AuditCheck::passed)
    }

    /// Inequality violations take precedence over other failures.
    pub fn outcome(&self) -> Result<()> {
        if !self.checks[INEQUALITY_CHECK].passed() {
            return Err(CliError::Core(FcsError::InequalityViolation(
                self.first_violation.clone().unwrap_or_default(),
            )));
        }
        if let Some(c) = self.checks.iter().find(|c| !c.passed()) {
            return Err(CliError::AuditFailed(c.name.to_string()));
        }
        Ok(())
    }
}
