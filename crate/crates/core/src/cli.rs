//! `qbessel solve`: read a JSON equation description, run the whole
//! pipeline and write CSV tables plus a plain-text report.
//!
//! Exit codes: 0 success, 2 invalid input or fatal validation failure,
//! 3 no valid characteristic root, 4 numerical failure (denominator pole,
//! divergence or a series that did not converge).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::characteristic::{
    characteristic_value, default_search_hi, find_roots, screen_collisions, CharacteristicRoot,
    RootStatus,
};
use crate::equation::{
    self, from_constant_coefficients, from_power_factors, validate, DerivativeKind,
    QuasiBesselEquation, Severity, Term,
};
use crate::rational::Rational;
use crate::series::{
    build_series, caputo_integer_exponents, compute_step, free_term, residual, SeriesError,
    SeriesSolution, StepPlan, TruncationRule, DEFAULT_EPS_TAIL, DEFAULT_MAX_TERMS,
};
use crate::specialfn::{kilbas_saigo, KilbasSaigoParams};

/// Relative disagreement with the closed form above which `--oracle` warns.
const ORACLE_TOLERANCE: f64 = 1e-8;
const ORACLE_TERMS: usize = 400;
const DEFAULT_POINTS: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "qbessel",
    version,
    about = "Series solutions of fractional quasi-Bessel equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the equation described by a JSON file.
    Solve(SolveArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// JSON equation description.
    pub spec: PathBuf,
    /// Directory for the CSV tables and report.txt; created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Only build the series for this entry of roots.csv.
    #[arg(long)]
    pub root: Option<usize>,
    /// Cross-check single-term equations against the Kilbas-Saigo closed form.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long)]
    pub eps_tail: Option<f64>,
}

/// A number written either as a JSON string or a JSON number. Strings keep
/// decimals exact.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Numeric {
    Text(String),
    Number(serde_json::Number),
}

impl Numeric {
    fn text(&self) -> String {
        match self {
            Numeric::Text(s) => s.trim().to_string(),
            Numeric::Number(n) => n.to_string(),
        }
    }

    fn exact(&self, field: &str) -> Result<Rational, String> {
        self.text().parse().map_err(|e| format!("{field}: {e}"))
    }

    fn real(&self, field: &str) -> Result<f64, String> {
        let t = self.text();
        let v = match t.parse::<Rational>() {
            Ok(q) => q.to_f64(),
            Err(_) => t
                .parse::<f64>()
                .map_err(|_| format!("{field}: not a number: {t:?}"))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{field}: must be finite, got {t:?}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    QuasiBessel,
    ConstantCoefficients,
    PowerFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSpec {
    Caputo,
    RiemannLiouville,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub d: Numeric,
    pub alpha: Numeric,
    pub p: Option<Numeric>,
    pub beta_i: Option<Numeric>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub x_min: Numeric,
    pub x_max: Numeric,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    pub c0: Option<Numeric>,
    pub n_terms_max: Option<usize>,
    pub eps_tail: Option<Numeric>,
    /// Also start series at integer exponents annihilated by a fractional
    /// Caputo derivative.
    #[serde(default)]
    pub caputo_integer_exponents: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub kind: KindSpec,
    pub form: Form,
    pub terms: Vec<TermSpec>,
    pub beta: Option<Numeric>,
    pub delta: Option<Numeric>,
    pub nu: Option<Numeric>,
    pub r: Option<Numeric>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub options: OptionsSpec,
}

impl EquationSpec {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed equation file: {e}"))
    }

    pub fn equation(&self) -> Result<QuasiBesselEquation, String> {
        let kind = match self.kind {
            KindSpec::Caputo => DerivativeKind::Caputo,
            KindSpec::RiemannLiouville => DerivativeKind::RiemannLiouville,
        };
        let r = match &self.r {
            Some(r) => r.exact("r")?.to_f64(),
            None => 1.0,
        };
        let nu = match &self.nu {
            Some(n) => n.real("nu")?,
            None => 0.0,
        };
        let err = |e: equation::EquationError| e.to_string();
        let eq = match self.form {
            Form::QuasiBessel => {
                let beta = self
                    .beta
                    .as_ref()
                    .ok_or("quasi_bessel form needs beta")?
                    .exact("beta")?;
                let terms = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let p = match &t.p {
                            Some(p) => p.exact(&format!("terms[{i}].p"))?,
                            None => Rational::ZERO,
                        };
                        Term::new(
                            t.d.real(&format!("terms[{i}].d"))?,
                            t.alpha.real(&format!("terms[{i}].alpha"))?,
                            p,
                        )
                        .map_err(err)
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                QuasiBesselEquation::new(terms, beta, nu * nu, r, kind).map_err(err)?
            }
            Form::ConstantCoefficients => {
                let coeffs = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        Ok((
                            t.d.real(&format!("terms[{i}].d"))?,
                            t.alpha.exact(&format!("terms[{i}].alpha"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                from_constant_coefficients(&coeffs, r, kind)
                    .and_then(|e| e.with_nu_squared(nu * nu))
                    .map_err(err)?
            }
            Form::PowerFactors => {
                let delta = match &self.delta {
                    Some(d) => d.exact("delta")?,
                    None => Rational::ZERO,
                };
                let triples = self
                    .terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let beta_i = match &t.beta_i {
                            Some(b) => b.exact(&format!("terms[{i}].beta_i"))?,
                            None => Rational::ZERO,
                        };
                        Ok((
                            t.d.real(&format!("terms[{i}].d"))?,
                            beta_i,
                            t.alpha.exact(&format!("terms[{i}].alpha"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                from_power_factors(&triples, delta, r, kind)
                    .and_then(|e| e.with_nu_squared(nu * nu))
                    .map_err(err)?
            }
        };
        Ok(eq)
    }

    /// Evaluation grid, `n_points` evenly spaced over `[x_min, x_max]`.
    pub fn grid(&self) -> Result<Vec<f64>, String> {
        let lo = self.domain.x_min.real("domain.x_min")?;
        let hi = self.domain.x_max.real("domain.x_max")?;
        let n = self.domain.n_points.unwrap_or(DEFAULT_POINTS);
        if !(lo > 0.0) || hi < lo {
            return Err(format!(
                "domain must satisfy 0 < x_min <= x_max, got [{lo}, {hi}]"
            ));
        }
        if n == 0 {
            return Err("domain.n_points must be positive".into());
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 2,
    NoValidRoots = 3,
    Numerical = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningCode {
    NonpositivePureCoefficient,
    NuBelowThreshold,
    NoSignChange,
    BelowCaputoFloor,
    RootCollision,
    DenominatorPole,
    Diverged,
    NotConverged,
    UnstableEvaluation,
    OracleMismatch,
}

impl WarningCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WarningCode::NonpositivePureCoefficient => "NONPOSITIVE_PURE_COEFFICIENT",
            WarningCode::NuBelowThreshold => "NU_BELOW_THRESHOLD",
            WarningCode::NoSignChange => "NO_SIGN_CHANGE",
            WarningCode::BelowCaputoFloor => "BELOW_CAPUTO_FLOOR",
            WarningCode::RootCollision => "ROOT_COLLISION",
            WarningCode::DenominatorPole => "DENOMINATOR_POLE",
            WarningCode::Diverged => "DIVERGED",
            WarningCode::NotConverged => "NOT_CONVERGED",
            WarningCode::UnstableEvaluation => "UNSTABLE_EVALUATION",
            WarningCode::OracleMismatch => "ORACLE_MISMATCH",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SolveFlags {
    pub root: Option<usize>,
    pub oracle: bool,
    pub max_terms: Option<usize>,
    pub eps_tail: Option<f64>,
}

/// Where a starting exponent came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSource {
    Characteristic,
    CaputoInteger,
}

impl RootSource {
    fn as_str(&self) -> &'static str {
        match self {
            RootSource::Characteristic => "characteristic",
            RootSource::CaputoInteger => "caputo_integer",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootEntry {
    pub root: CharacteristicRoot,
    pub source: RootSource,
    pub g_value: f64,
}

#[derive(Debug, Clone)]
pub struct RootSeries {
    pub index: usize,
    pub solution: SeriesSolution,
    pub values: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Everything the pipeline produced, before it is written out.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: ExitStatus,
    pub report: String,
    /// `(file name, contents)`, in a fixed order.
    pub files: Vec<(String, String)>,
    pub warnings: Vec<Warning>,
    pub roots: Vec<RootEntry>,
    pub series: Vec<RootSeries>,
    pub plan: Option<StepPlan>,
    pub error: Option<String>,
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn failure(status: ExitStatus, message: String) -> SolveOutcome {
    let report = format!("error\n  {message}\n");
    SolveOutcome {
        status,
        report: report.clone(),
        files: vec![("report.txt".into(), report)],
        warnings: Vec::new(),
        roots: Vec::new(),
        series: Vec::new(),
        plan: None,
        error: Some(message),
    }
}

struct Report {
    text: String,
}

impl Report {
    fn section(&mut self, title: &str) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        self.text.push_str(title);
        self.text.push('\n');
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str("  ");
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn describe_equation(report: &mut Report, eq: &QuasiBesselEquation) {
    report.section("equation");
    report.line(format!("kind: {}", eq.kind()));
    for (i, t) in eq.terms().iter().enumerate() {
        report.line(format!(
            "term {i}: d = {}, alpha = {}, p = {}",
            t.d, t.alpha, t.p
        ));
    }
    report.line(format!("beta: {}", eq.beta()));
    report.line(format!("nu^2: {}", eq.nu_squared()));
    report.line(format!("r: {}", eq.r()));
}

fn describe_plan(report: &mut Report, plan: &StepPlan) {
    report.section("step plan");
    report.line(format!("s = {} ({})", plan.s, float(plan.step_value())));
    match plan.n_beta {
        Some(n) => report.line(format!("n_beta = {n}")),
        None => report.line("n_beta = none (beta = 0)"),
    }
    let n_p: Vec<String> = plan.n_p.values().map(u64::to_string).collect();
    report.line(format!("n_p = {{{}}}", n_p.join(", ")));
    report.line(format!("N_LCD = {}", plan.lcd));
    report.line(format!("N_gcf = {}", plan.gcf));
}

/// Runs the pipeline on an already parsed description.
pub fn solve(spec: &EquationSpec, flags: &SolveFlags) -> SolveOutcome {
    let eq = match spec.equation() {
        Ok(eq) => eq,
        Err(e) => return failure(ExitStatus::Validation, e),
    };
    let xs = match spec.grid() {
        Ok(xs) => xs,
        Err(e) => return failure(ExitStatus::Validation, e),
    };
    let c0 = match &spec.options.c0 {
        Some(c) => match c.real("options.c0") {
            Ok(v) => v,
            Err(e) => return failure(ExitStatus::Validation, e),
        },
        None => 1.0,
    };
    let eps_tail = match (flags.eps_tail, &spec.options.eps_tail) {
        (Some(e), _) => e,
        (None, Some(e)) => match e.real("options.eps_tail") {
            Ok(v) => v,
            Err(e) => return failure(ExitStatus::Validation, e),
        },
        (None, None) => DEFAULT_EPS_TAIL,
    };
    if !(eps_tail > 0.0) {
        return failure(
            ExitStatus::Validation,
            format!("eps_tail must be positive, got {eps_tail}"),
        );
    }
    let rule = TruncationRule {
        x_max: *xs.last().unwrap_or(&1.0),
        eps_tail,
        max_terms: flags
            .max_terms
            .or(spec.options.n_terms_max)
            .unwrap_or(DEFAULT_MAX_TERMS),
    };

    let mut warnings = Vec::new();
    let mut report = Report {
        text: String::new(),
    };
    describe_equation(&mut report, &eq);

    let validation = validate(&eq);
    report.section("validation");
    if validation.issues.is_empty() {
        report.line("ok");
    }
    for issue in &validation.issues {
        let sev = match issue.severity {
            Severity::Fatal => "fatal",
            Severity::Warning => "warning",
        };
        report.line(format!("{sev} {}: {}", issue.code.as_str(), issue.message));
        if issue.severity == Severity::Warning {
            warnings.push(Warning {
                code: WarningCode::NonpositivePureCoefficient,
                message: issue.message.clone(),
            });
        }
    }
    if !validation.is_valid() {
        let message = validation
            .issues
            .iter()
            .filter(|i| i.severity == Severity::Fatal)
            .map(|i| i.message.clone())
            .collect::<Vec<_>>()
            .join("; ");
        let text = report.text;
        return SolveOutcome {
            status: ExitStatus::Validation,
            report: text.clone(),
            files: vec![("report.txt".into(), text)],
            warnings,
            roots: Vec::new(),
            series: Vec::new(),
            plan: None,
            error: Some(message),
        };
    }

    let plan = match compute_step(&eq) {
        Ok(p) => p,
        Err(e) => return failure(ExitStatus::Validation, e.to_string()),
    };
    describe_plan(&mut report, &plan);

    report.section("threshold");
    match equation::nu_min_threshold(&eq) {
        Ok(t) => {
            let ok = eq.nu_squared() >= t;
            report.line(format!("nu^2_min = {}", float(t)));
            report.line(format!("nu^2 = {}", float(eq.nu_squared())));
            report.line(format!("satisfied: {}", if ok { "yes" } else { "no" }));
            if !ok {
                warnings.push(Warning {
                    code: WarningCode::NuBelowThreshold,
                    message: format!(
                        "nu^2 = {} is below the threshold {}; a series solution is not guaranteed",
                        eq.nu_squared(),
                        t
                    ),
                });
            }
        }
        Err(e) => report.line(format!("not applicable: {e}")),
    }
    let x_max = rule.x_max;
    report.section("uniqueness");
    match equation::uniqueness_bound(&eq, x_max) {
        Ok(b) => {
            report.line(format!("bound at b = {} : {}", float(x_max), float(b)));
            report.line(format!(
                "nu^2 > bound: {}",
                if eq.nu_squared() > b { "yes" } else { "no" }
            ));
        }
        Err(e) => report.line(format!("not applicable: {e}")),
    }

    // roots
    let scan = match find_roots(&eq, default_search_hi(&eq)) {
        Ok(s) => s,
        Err(e) => return failure(ExitStatus::Numerical, e.to_string()),
    };
    if let Some(d) = &scan.diagnostic {
        warnings.push(Warning {
            code: WarningCode::NoSignChange,
            message: d.clone(),
        });
    }
    let screened = screen_collisions(&scan.roots, &plan);
    let mut roots: Vec<RootEntry> = screened
        .into_iter()
        .map(|root| RootEntry {
            g_value: characteristic_value(&eq, root.gamma).unwrap_or(f64::NAN),
            root,
            source: RootSource::Characteristic,
        })
        .collect();
    if spec.options.caputo_integer_exponents {
        match caputo_integer_exponents(&eq) {
            Ok(js) => roots.extend(js.into_iter().map(|j| RootEntry {
                g_value: characteristic_value(&eq, j).unwrap_or(f64::NAN),
                root: CharacteristicRoot {
                    gamma: j,
                    status: RootStatus::Valid,
                    collision_step: None,
                },
                source: RootSource::CaputoInteger,
            })),
            Err(e) => return failure(ExitStatus::Numerical, e.to_string()),
        }
    }
    for entry in &roots {
        match entry.root.status {
            RootStatus::BelowCaputoFloor => warnings.push(Warning {
                code: WarningCode::BelowCaputoFloor,
                message: format!(
                    "root {} does not exceed the Caputo floor {}",
                    entry.root.gamma,
                    eq.caputo_floor()
                ),
            }),
            RootStatus::CollisionInvalid => warnings.push(Warning {
                code: WarningCode::RootCollision,
                message: format!(
                    "root {} reaches a larger root after {} steps",
                    entry.root.gamma,
                    entry.root.collision_step.unwrap_or(0)
                ),
            }),
            _ => {}
        }
    }

    // series per valid root
    let mut series = Vec::new();
    let mut any_converged = false;
    for (index, entry) in roots.iter_mut().enumerate() {
        if !entry.root.is_valid() || flags.root.is_some_and(|r| r != index) {
            continue;
        }
        let gamma = entry.root.gamma;
        let sol = match build_series(&eq, gamma, &plan, c0, &rule) {
            Ok(s) => s,
            Err(SeriesError::DenominatorPole { n, denominator }) => {
                entry.root.status = RootStatus::DenominatorPole;
                warnings.push(Warning {
                    code: WarningCode::DenominatorPole,
                    message: format!(
                        "root {gamma}: recurrence denominator {denominator:e} vanishes at n = {n}"
                    ),
                });
                continue;
            }
            Err(e) => return failure(ExitStatus::Numerical, e.to_string()),
        };
        if sol.truncation.diverged {
            warnings.push(Warning {
                code: WarningCode::Diverged,
                message: format!(
                    "root {gamma}: coefficients grow without bound after {} terms",
                    sol.truncation.terms_used
                ),
            });
        } else if !sol.truncation.converged {
            warnings.push(Warning {
                code: WarningCode::NotConverged,
                message: format!(
                    "root {gamma}: tail {:e} still above {:e} after {} terms",
                    sol.truncation.tail_estimate, rule.eps_tail, sol.truncation.terms_used
                ),
            });
        }
        let evaluation = match sol.evaluate_with_diagnostics(&xs) {
            Ok(e) => e,
            Err(e) => return failure(ExitStatus::Numerical, e.to_string()),
        };
        if let Some(&x) = evaluation.unstable_points.first() {
            warnings.push(Warning {
                code: WarningCode::UnstableEvaluation,
                message: format!(
                    "root {gamma}: cancellation destroys all digits at {} points, first at x = {x}",
                    evaluation.unstable_points.len()
                ),
            });
        }
        let res = match residual(&eq, &sol, &xs) {
            Ok(r) => r,
            Err(e) => return failure(ExitStatus::Numerical, e.to_string()),
        };
        if flags.oracle {
            if let Some(w) = oracle_check(&eq, &sol, &xs, &evaluation.values) {
                warnings.push(w);
            }
        }
        any_converged |= sol.truncation.converged;
        series.push(RootSeries {
            index,
            solution: sol,
            values: evaluation.values,
            residual: res,
        });
    }

    report.section("roots");
    if roots.is_empty() {
        report.line("none");
    }
    for (i, e) in roots.iter().enumerate() {
        let step = e
            .root
            .collision_step
            .map_or(String::new(), |n| format!(", collision_step = {n}"));
        report.line(format!(
            "[{i}] gamma = {}, status = {}{step}, G = {}, source = {}",
            float(e.root.gamma),
            e.root.status,
            float(e.g_value),
            e.source.as_str()
        ));
    }
    report.section("series");
    if series.is_empty() {
        report.line("none");
    }
    for s in &series {
        let t = &s.solution.truncation;
        let max_res = s.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        report.line(format!(
            "[{}] gamma = {}, c0 = {}, terms_used = {}, tail_estimate = {}, converged = {}, diverged = {}, max|residual| = {}",
            s.index,
            float(s.solution.gamma),
            float(s.solution.c0),
            t.terms_used,
            float(t.tail_estimate),
            t.converged,
            t.diverged,
            float(max_res)
        ));
    }
    report.section("warnings");
    if warnings.is_empty() {
        report.line("none");
    }
    for w in &warnings {
        report.line(format!("{}: {}", w.code.as_str(), w.message));
    }

    let any_valid = roots.iter().any(|e| {
        matches!(
            e.root.status,
            RootStatus::Valid | RootStatus::DenominatorPole
        )
    });
    let status = if any_converged {
        ExitStatus::Success
    } else if !any_valid {
        ExitStatus::NoValidRoots
    } else {
        ExitStatus::Numerical
    };
    report.section("status");
    report.line(format!("exit {}", status as i32));

    let mut files = vec![("roots.csv".to_string(), roots_csv(&roots))];
    for s in &series {
        files.push((
            format!("coefficients_{}.csv", s.index),
            coefficients_csv(&s.solution),
        ));
        files.push((
            format!("solution_{}.csv", s.index),
            pairs_csv("x,u", &xs, &s.values),
        ));
        files.push((
            format!("residual_{}.csv", s.index),
            pairs_csv("x,residual", &xs, &s.residual),
        ));
    }
    files.push(("report.txt".into(), report.text.clone()));
    let error = match status {
        ExitStatus::Success => None,
        ExitStatus::NoValidRoots => Some("no valid characteristic root".to_string()),
        _ => Some("no series converged; see report.txt".to_string()),
    };
    SolveOutcome {
        status,
        report: report.text,
        files,
        warnings,
        roots,
        series,
        plan: Some(plan),
        error,
    }
}

/// Single pure term with `ν = 0`: `d x^α D^α u + x^β u = 0` is solved by
/// `c₀ x^γ E_(α, β/α, (γ+β−α)/α)(−x^β/d)`.
fn oracle_check(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
    xs: &[f64],
    values: &[f64],
) -> Option<Warning> {
    if eq.terms().len() != 1 || free_term(eq) != 0.0 || eq.beta().is_zero() {
        return None;
    }
    let t = eq.leading();
    let beta = eq.beta_value();
    let params = KilbasSaigoParams {
        alpha: t.alpha,
        m: beta / t.alpha,
        l: (sol.gamma + beta - t.alpha) / t.alpha,
    };
    let mut worst = 0.0f64;
    let mut at = xs.first().copied().unwrap_or(0.0);
    for (&x, &u) in xs.iter().zip(values) {
        let expected = match kilbas_saigo(params, -x.powf(beta) / t.d, ORACLE_TERMS) {
            Ok(e) => sol.c0 * x.powf(sol.gamma) * e,
            Err(e) => {
                return Some(Warning {
                    code: WarningCode::OracleMismatch,
                    message: format!("closed form unavailable: {e}"),
                })
            }
        };
        let rel = (u - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        if rel > worst {
            worst = rel;
            at = x;
        }
    }
    (worst > ORACLE_TOLERANCE).then(|| Warning {
        code: WarningCode::OracleMismatch,
        message: format!(
            "root {}: series differs from the Kilbas-Saigo closed form by {worst:e} (relative) at x = {at}",
            sol.gamma
        ),
    })
}

fn roots_csv(roots: &[RootEntry]) -> String {
    let mut out = String::from("gamma,status,collision_step,G,source\n");
    for e in roots {
        let step = e
            .root
            .collision_step
            .map_or(String::new(), |n| n.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            float(e.root.gamma),
            e.root.status,
            step,
            float(e.g_value),
            e.source.as_str()
        );
    }
    out
}

fn coefficients_csv(sol: &SeriesSolution) -> String {
    let mut out = String::from("n,c_n,exponent\n");
    for (n, &c) in sol.coefficients.iter().enumerate() {
        let _ = writeln!(out, "{n},{},{}", float(c), float(sol.exponent(n)));
    }
    out
}

fn pairs_csv(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{},{}", float(*x), float(*y));
    }
    out
}

pub fn write_outcome(outcome: &SolveOutcome, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in &outcome.files {
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
    }
}

fn run_solve(args: &SolveArgs) -> i32 {
    let text = match fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.spec.display());
            return ExitStatus::Validation as i32;
        }
    };
    let outcome = match EquationSpec::from_json(&text) {
        Ok(spec) => solve(
            &spec,
            &SolveFlags {
                root: args.root,
                oracle: args.oracle,
                max_terms: args.max_terms,
                eps_tail: args.eps_tail,
            },
        ),
        Err(e) => failure(ExitStatus::Validation, e),
    };
    if let Err(e) = write_outcome(&outcome, &args.out) {
        eprintln!("error: cannot write to {}: {e}", args.out.display());
        return ExitStatus::Numerical as i32;
    }
    for w in &outcome.warnings {
        eprintln!("warning {}: {}", w.code.as_str(), w.message);
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    outcome.status as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    const BESSEL_CAPUTO: &str = r#"{
        "kind": "caputo",
        "form": "quasi_bessel",
        "terms": [
            {"d": "1.5", "alpha": "1.5", "p": "0"},
            {"d": "-1.2", "alpha": "1.1", "p": "0.8"},
            {"d": "3", "alpha": "0.5", "p": "0.5"}
        ],
        "beta": "2",
        "nu": "2",
        "domain": {"x_min": "0.1", "x_max": "2", "n_points": 20}
    }"#;

    #[test]
    fn parses_and_builds_bessel_caputo() {
        let spec = EquationSpec::from_json(BESSEL_CAPUTO).unwrap();
        let eq = spec.equation().unwrap();
        assert_eq!(eq.nu_squared(), 4.0);
        assert_eq!(spec.grid().unwrap().len(), 20);
        let out = solve(&spec, &SolveFlags::default());
        assert_eq!(out.status, ExitStatus::Success);
        let plan = out.plan.unwrap();
        assert_eq!(plan.s, "0.1".parse().unwrap());
        assert!(out.report.contains("n_p = {8, 5}"));
        assert!(out.report.contains("satisfied: yes"));
    }

    #[test]
    fn rejects_unknown_fields_and_bad_numbers() {
        let bad = BESSEL_CAPUTO.replace("\"beta\"", "\"betta\"");
        assert!(EquationSpec::from_json(&bad).is_err());
        let bad = BESSEL_CAPUTO.replace("\"0.8\"", "\"0.8x\"");
        let spec = EquationSpec::from_json(&bad).unwrap();
        assert!(spec.equation().is_err());
        let bad = BESSEL_CAPUTO.replace("\"x_min\": \"0.1\"", "\"x_min\": \"0\"");
        let spec = EquationSpec::from_json(&bad).unwrap();
        assert_eq!(
            solve(&spec, &SolveFlags::default()).status,
            ExitStatus::Validation
        );
    }

    #[test]
    fn numbers_are_accepted_too() {
        let json = BESSEL_CAPUTO.replace("\"nu\": \"2\"", "\"nu\": 2");
        let spec = EquationSpec::from_json(&json).unwrap();
        assert_eq!(spec.equation().unwrap().nu_squared(), 4.0);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 2.199_515_088_313_709_4, -1e-300, 123456.789] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
    }
}
