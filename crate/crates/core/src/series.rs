//! Fractional power series `u(x) = Σ c_n x^(γ + s·n)`.
//!
//! [`compute_step`] finds the largest step `s` that puts every power of `x`
//! produced by the equation on the lattice `γ + s·ℕ`. The coefficient
//! recurrence then balances each lattice power in turn:
//!
//! ```text
//! D_n·c_n = −[ U(n−n_β)·c_(n−n_β) + Σ_shifted U(n−n_p)·c_(n−n_p)·d·Q((n−n_p)s, α) ]
//! D_n     = Σ_pure d·Q(ns, α) − ν²
//! ```
//!
//! with `U` the unit step. When `β = 0` the `x^β u` part is an ordinary
//! multiple of `u` and is folded into `D_n` instead.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::equation::{order_ceiling, DerivativeKind, QuasiBesselEquation};
use crate::gamma::{self, GammaError};
use crate::rational::{self, Rational, RationalError};

/// Below `DENOMINATOR_TOLERANCE·(1 + ν²)` a recurrence denominator is a pole.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_EPS_TAIL: f64 = 1e-14;
pub const DEFAULT_MAX_TERMS: usize = 2000;
/// Terms above this magnitude mark the series as divergent.
const DIVERGENCE_LIMIT: f64 = 1e280;
/// A term this many times larger than the sum it contributes to makes the
/// evaluation unreliable.
const INSTABILITY_RATIO: f64 = 1e15;
const LATTICE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("recurrence denominator vanishes at n = {n} (D_n = {denominator:e}); the root collides with another root")]
    DenominatorPole { n: usize, denominator: f64 },
    #[error("D^{alpha} x^{exponent} is undefined for this derivative kind")]
    DerivativeUndefined { alpha: f64, exponent: f64 },
    #[error("evaluation point must be positive, got {0}")]
    NonPositivePoint(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Step `s` (in units of `r`) and the integer lattice offsets of `x^β` and
/// of every shifted term.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPlan {
    pub s: Rational,
    /// `β/s`; `None` when `β = 0`.
    pub n_beta: Option<u64>,
    /// `p_i/s` keyed by term index, shifted terms only.
    pub n_p: BTreeMap<usize, u64>,
    pub lcd: u64,
    pub gcf: u64,
    pub r: f64,
}

impl StepPlan {
    /// The step with `r` applied.
    pub fn step_value(&self) -> f64 {
        self.r * self.s.to_f64()
    }

    /// Largest lattice offset produced by the equation.
    pub fn max_shift(&self) -> u64 {
        self.n_p
            .values()
            .copied()
            .chain(self.n_beta)
            .max()
            .unwrap_or(0)
    }

    /// Number of consecutive small terms required before truncating.
    pub fn window(&self) -> usize {
        self.n_beta.unwrap_or_else(|| self.max_shift()).max(1) as usize
    }

    /// Exponent `γ + s·n`, computed from the exact step.
    pub fn exponent(&self, gamma: f64, n: usize) -> f64 {
        gamma + self.r * (self.s.numer() as f64 * n as f64 / self.s.denom() as f64)
    }
}

pub fn compute_step(eq: &QuasiBesselEquation) -> Result<StepPlan, SeriesError> {
    let mut values: Vec<Rational> = Vec::new();
    if !eq.beta().is_zero() {
        values.push(eq.beta());
    }
    values.extend(eq.shifted_terms().map(|(_, t)| t.p));
    if values.is_empty() {
        // no power of x moves the lattice: the series is the single term c₀x^γ
        return Ok(StepPlan {
            s: Rational::ONE,
            n_beta: None,
            n_p: BTreeMap::new(),
            lcd: 1,
            gcf: 1,
            r: eq.r(),
        });
    }
    let lcd = rational::lcd(&values)?;
    let lcd_r = Rational::integer(i128::from(lcd));
    let to_units = |v: &Rational| -> Result<u64, SeriesError> {
        let n = v.checked_mul(&lcd_r)?;
        u64::try_from(n.numer()).map_err(|_| SeriesError::Rational(RationalError::Overflow))
    };
    let units: Vec<u64> = values.iter().map(to_units).collect::<Result<_, _>>()?;
    let gcf = rational::gcf(&units)?;
    let s = Rational::new(i128::from(gcf), i128::from(lcd))?;
    let n_beta = if eq.beta().is_zero() {
        None
    } else {
        Some(to_units(&eq.beta())? / gcf)
    };
    let mut n_p = BTreeMap::new();
    for (i, t) in eq.shifted_terms() {
        n_p.insert(i, to_units(&t.p)? / gcf);
    }
    Ok(StepPlan {
        s,
        n_beta,
        n_p,
        lcd,
        gcf,
        r: eq.r(),
    })
}

/// `D^α x^q = coefficient · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDerivative {
    pub coefficient: f64,
    pub exponent: f64,
}

fn is_nonnegative_integer(q: f64) -> bool {
    q > -LATTICE_TOLERANCE && (q - q.round()).abs() < LATTICE_TOLERANCE
}

/// Power rule `D^α x^q = Γ(q+1)/Γ(q+1−α) · x^(q−α)`.
///
/// Riemann–Liouville needs `q > −1`. Caputo with fractional `α` needs
/// `q > ⌈α⌉ − 1`, except that nonnegative integer powers below `⌈α⌉` are
/// annihilated. Integer orders are classical derivatives for both kinds.
pub fn frac_derivative_power(
    kind: DerivativeKind,
    alpha: f64,
    exponent: f64,
) -> Result<PowerDerivative, SeriesError> {
    let undefined = SeriesError::DerivativeUndefined { alpha, exponent };
    if !alpha.is_finite() || alpha < 0.0 || !exponent.is_finite() {
        return Err(undefined);
    }
    let new_exponent = exponent - alpha;
    let fractional = !crate::equation::is_integer_order(alpha);
    if kind == DerivativeKind::Caputo && fractional {
        let n = f64::from(order_ceiling(alpha));
        if is_nonnegative_integer(exponent) && exponent.round() < n {
            return Ok(PowerDerivative {
                coefficient: 0.0,
                exponent: new_exponent,
            });
        }
        if exponent <= n - 1.0 {
            return Err(undefined);
        }
    } else if exponent <= -1.0 {
        return Err(undefined);
    }
    let coefficient = gamma::gamma_ratio_shift(exponent + 1.0, alpha)?;
    Ok(PowerDerivative {
        coefficient,
        exponent: new_exponent,
    })
}

// Same rule as `frac_derivative_power`, without the domain checks: inside the
// recurrence exponents below the Caputo floor fall back to the plain ratio.
fn power_coefficient(kind: DerivativeKind, alpha: f64, exponent: f64) -> Result<f64, SeriesError> {
    if kind == DerivativeKind::Caputo
        && !crate::equation::is_integer_order(alpha)
        && is_nonnegative_integer(exponent)
        && exponent.round() < f64::from(order_ceiling(alpha))
    {
        return Ok(0.0);
    }
    Ok(gamma::gamma_ratio_shift(exponent + 1.0, alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRule {
    /// Right end of the domain the series must resolve.
    pub x_max: f64,
    pub eps_tail: f64,
    pub max_terms: usize,
}

impl Default for TruncationRule {
    fn default() -> Self {
        TruncationRule {
            x_max: 1.0,
            eps_tail: DEFAULT_EPS_TAIL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Highest coefficient index `N` kept.
    pub terms_used: usize,
    /// `max |c_n|·x_max^(γ+sn)` over the last window of kept terms.
    pub tail_estimate: f64,
    pub converged: bool,
    /// Coefficients grew without bound and the build stopped early.
    pub diverged: bool,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub gamma: f64,
    /// Step with `r` applied.
    pub s: f64,
    pub coefficients: Vec<f64>,
    pub c0: f64,
    pub truncation: Truncation,
    plan: StepPlan,
}

struct Recurrence<'a> {
    eq: &'a QuasiBesselEquation,
    plan: &'a StepPlan,
    gamma: f64,
    free: f64,
    tolerance: f64,
    // normalized, c₀ = 1
    c: Vec<f64>,
}

impl<'a> Recurrence<'a> {
    fn new(eq: &'a QuasiBesselEquation, plan: &'a StepPlan, gamma: f64) -> Self {
        Recurrence {
            eq,
            plan,
            gamma,
            free: free_term(eq),
            tolerance: DENOMINATOR_TOLERANCE * (1.0 + eq.nu_squared()),
            c: vec![1.0],
        }
    }

    fn denominator(&self, n: usize) -> Result<f64, SeriesError> {
        let e = self.plan.exponent(self.gamma, n);
        let mut sum = self.free;
        for t in self.eq.pure_terms() {
            sum += t.d * power_coefficient(self.eq.kind(), t.alpha, e)?;
        }
        Ok(sum)
    }

    fn push_next(&mut self) -> Result<f64, SeriesError> {
        let n = self.c.len();
        let mut num = 0.0;
        if let Some(nb) = self.plan.n_beta {
            if n >= nb as usize {
                num += self.c[n - nb as usize];
            }
        }
        for (&i, &k) in &self.plan.n_p {
            let k = k as usize;
            if n >= k {
                let prev = self.c[n - k];
                if prev != 0.0 {
                    let t = &self.eq.terms()[i];
                    let e = self.plan.exponent(self.gamma, n - k);
                    num += prev * t.d * power_coefficient(self.eq.kind(), t.alpha, e)?;
                }
            }
        }
        let den = self.denominator(n)?;
        if den.abs() < self.tolerance {
            return Err(SeriesError::DenominatorPole {
                n,
                denominator: den,
            });
        }
        let cn = -num / den;
        self.c.push(cn);
        Ok(cn)
    }
}

/// Coefficient of `u` that does not involve a derivative: `−ν²`, plus one
/// when `β = 0`.
pub fn free_term(eq: &QuasiBesselEquation) -> f64 {
    if eq.beta().is_zero() {
        1.0 - eq.nu_squared()
    } else {
        -eq.nu_squared()
    }
}

fn term_magnitude(c: f64, x: f64, exponent: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let direct = c.abs() * x.powf(exponent);
    if direct.is_finite() && direct > 0.0 {
        direct
    } else {
        (c.abs().ln() + exponent * x.ln()).exp()
    }
}

fn tail_over(c: &[f64], plan: &StepPlan, gamma: f64, x_max: f64, window: usize) -> f64 {
    let end = c.len();
    let start = end.saturating_sub(window);
    (start..end)
        .map(|n| term_magnitude(c[n], x_max, plan.exponent(gamma, n)))
        .fold(0.0, f64::max)
}

fn check_c0(c0: f64) -> Result<(), SeriesError> {
    if c0.is_finite() {
        Ok(())
    } else {
        Err(SeriesError::InvalidArgument(format!(
            "c0 must be finite, got {c0}"
        )))
    }
}

fn finish(
    mut c: Vec<f64>,
    gamma: f64,
    plan: &StepPlan,
    c0: f64,
    truncation: Truncation,
) -> SeriesSolution {
    for v in &mut c {
        *v *= c0;
    }
    SeriesSolution {
        gamma,
        s: plan.step_value(),
        coefficients: c,
        c0,
        truncation,
        plan: plan.clone(),
    }
}

/// Coefficients `c₀..c_N` for a fixed `N = n_terms`. The tail estimate is
/// reported for `x_max = 1`.
pub fn build_coefficients(
    eq: &QuasiBesselEquation,
    gamma: f64,
    plan: &StepPlan,
    n_terms: usize,
    c0: f64,
) -> Result<SeriesSolution, SeriesError> {
    check_c0(c0)?;
    let mut rec = Recurrence::new(eq, plan, gamma);
    let mut diverged = false;
    for _ in 0..n_terms {
        let cn = rec.push_next()?;
        if !cn.is_finite() || cn.abs() > DIVERGENCE_LIMIT {
            rec.c.pop();
            diverged = true;
            break;
        }
    }
    let window = plan.window();
    let tail = tail_over(&rec.c, plan, gamma, 1.0, window);
    let truncation = Truncation {
        terms_used: rec.c.len() - 1,
        tail_estimate: tail,
        converged: !diverged && tail < DEFAULT_EPS_TAIL,
        diverged,
        x_max: 1.0,
    };
    Ok(finish(rec.c, gamma, plan, c0, truncation))
}

/// Builds coefficients until the last window of terms is below
/// `rule.eps_tail` on `(0, rule.x_max]`, or the term cap is hit.
pub fn build_series(
    eq: &QuasiBesselEquation,
    gamma: f64,
    plan: &StepPlan,
    c0: f64,
    rule: &TruncationRule,
) -> Result<SeriesSolution, SeriesError> {
    check_c0(c0)?;
    if !(rule.x_max.is_finite() && rule.x_max > 0.0) {
        return Err(SeriesError::NonPositivePoint(rule.x_max));
    }
    let window = plan.window();
    let mut rec = Recurrence::new(eq, plan, gamma);
    let mut small_run = usize::from(term_magnitude(1.0, rule.x_max, gamma) < rule.eps_tail);
    let mut converged = false;
    let mut diverged = false;
    while rec.c.len() <= rule.max_terms {
        let n = rec.c.len();
        let cn = rec.push_next()?;
        let mag = term_magnitude(cn, rule.x_max, plan.exponent(gamma, n));
        if !mag.is_finite() || mag > DIVERGENCE_LIMIT {
            diverged = true;
            break;
        }
        if mag < rule.eps_tail {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if n >= window && small_run >= window {
            converged = true;
            break;
        }
    }
    let truncation = Truncation {
        terms_used: rec.c.len() - 1,
        tail_estimate: tail_over(&rec.c, plan, gamma, rule.x_max, window),
        converged,
        diverged,
        x_max: rule.x_max,
    };
    Ok(finish(rec.c, gamma, plan, c0, truncation))
}

/// `c₀` such that the leading term satisfies `D^μ(c₀x^γ)` normalization
/// `c₀·Γ(1+γ)/Γ(1+γ−μ) = value`, the usual way an initial condition like
/// `D^(γ)u(0) = value` pins the free constant.
pub fn c0_for_initial_value(gamma: f64, mu: f64, value: f64) -> Result<f64, SeriesError> {
    let q = gamma::gamma_ratio(gamma, 0.0, mu)?;
    if q == 0.0 {
        return Err(SeriesError::InvalidArgument(format!(
            "derivative of order {mu} annihilates x^{gamma}"
        )));
    }
    Ok(value / q)
}

/// Leading exponents `γ = j ∈ {0, …, ⌈α₁⌉−1}` at which the Caputo operator
/// annihilates `x^j` and the lowest-power balance holds, so `c₀` is free
/// even though `j` is not a root of the characteristic function. For a
/// single fractional Caputo term with `ν = 0` this yields the
/// Mittag-Leffler type solutions.
pub fn caputo_integer_exponents(eq: &QuasiBesselEquation) -> Result<Vec<f64>, SeriesError> {
    if eq.kind() != DerivativeKind::Caputo || !eq.leading().is_fractional() {
        return Ok(Vec::new());
    }
    let ceiling = order_ceiling(eq.leading().alpha);
    let tolerance = DENOMINATOR_TOLERANCE * (1.0 + eq.nu_squared());
    let mut out = Vec::new();
    for j in 0..ceiling {
        let e = f64::from(j);
        let mut balance = free_term(eq);
        for t in eq.pure_terms() {
            balance += t.d * power_coefficient(DerivativeKind::Caputo, t.alpha, e)?;
        }
        if balance.abs() < tolerance {
            out.push(e);
        }
    }
    Ok(out)
}

/// Neumaier-compensated sum, accumulated in descending magnitude.
fn sum_descending(terms: &mut [f64]) -> f64 {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &t in terms.iter() {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

fn signed_term(c: f64, x: f64, exponent: f64) -> f64 {
    let m = term_magnitude(c, x, exponent);
    if c < 0.0 {
        -m
    } else {
        m
    }
}

/// Values of a truncated series, with the points where one term dwarfs the
/// sum by more than 1e15 (the sum has lost all significant digits there).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub values: Vec<f64>,
    pub unstable_points: Vec<f64>,
}

impl SeriesSolution {
    pub fn plan(&self) -> &StepPlan {
        &self.plan
    }

    pub fn exponent(&self, n: usize) -> f64 {
        self.plan.exponent(self.gamma, n)
    }

    /// Tail estimate recomputed for another domain end.
    pub fn tail_estimate_at(&self, x_max: f64) -> f64 {
        tail_over(
            &self.coefficients,
            &self.plan,
            self.gamma,
            x_max,
            self.plan.window(),
        )
    }

    pub fn evaluate(&self, xs: &[f64]) -> Result<Vec<f64>, SeriesError> {
        Ok(self.evaluate_with_diagnostics(xs)?.values)
    }

    pub fn evaluate_with_diagnostics(&self, xs: &[f64]) -> Result<Evaluation, SeriesError> {
        let mut values = Vec::with_capacity(xs.len());
        let mut unstable_points = Vec::new();
        let mut terms = Vec::with_capacity(self.coefficients.len());
        for &x in xs {
            if !(x > 0.0 && x.is_finite()) {
                return Err(SeriesError::NonPositivePoint(x));
            }
            terms.clear();
            terms.extend(
                self.coefficients
                    .iter()
                    .enumerate()
                    .map(|(n, &c)| signed_term(c, x, self.exponent(n))),
            );
            let largest = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            let v = sum_descending(&mut terms);
            if largest > INSTABILITY_RATIO * v.abs() {
                unstable_points.push(x);
            }
            values.push(v);
        }
        Ok(Evaluation {
            values,
            unstable_points,
        })
    }
}

/// Lattice offsets `p_i/s` and `β/s` for a solution step, if they are all
/// integers.
fn lattice_offsets(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
) -> Option<(Vec<Option<usize>>, Option<usize>)> {
    let s = sol.s;
    let snap = |v: f64| -> Option<usize> {
        let k = v / s;
        ((k - k.round()).abs() < LATTICE_TOLERANCE * k.abs().max(1.0) && k > -0.5)
            .then(|| k.round() as usize)
    };
    let mut offsets = Vec::with_capacity(eq.terms().len());
    for (i, t) in eq.terms().iter().enumerate() {
        offsets.push(if t.is_pure() {
            None
        } else {
            Some(snap(eq.shift_value(i))?)
        });
    }
    let beta = if eq.beta().is_zero() {
        None
    } else {
        Some(snap(eq.beta_value())?)
    };
    Some((offsets, beta))
}

/// Per-lattice-power residual coefficients `R_k` and the sum of the
/// magnitudes of their contributions `A_k`, for `k = 0..=N+max_shift`.
fn residual_coefficients(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
    offsets: &[Option<usize>],
    beta_offset: Option<usize>,
) -> Result<(Vec<f64>, Vec<f64>), SeriesError> {
    let n_max = sol.coefficients.len();
    let reach = offsets
        .iter()
        .flatten()
        .copied()
        .chain(beta_offset)
        .max()
        .unwrap_or(0);
    let len = n_max + reach;
    let mut parts: Vec<Vec<f64>> = vec![Vec::new(); len];
    for (n, &c) in sol.coefficients.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = sol.exponent(n);
        for (t, off) in eq.terms().iter().zip(offsets) {
            let d = frac_derivative_power(eq.kind(), t.alpha, e)?;
            parts[n + off.unwrap_or(0)].push(t.d * d.coefficient * c);
        }
        parts[n].push(-eq.nu_squared() * c);
        parts[n + beta_offset.unwrap_or(0)].push(c);
    }
    let mut r = Vec::with_capacity(len);
    let mut a = Vec::with_capacity(len);
    for mut p in parts {
        a.push(p.iter().map(|v| v.abs()).sum());
        r.push(sum_descending(&mut p));
    }
    Ok((r, a))
}

/// `Σ d_i x^(α_i+p_i) D^(α_i) u_N + (x^β − ν²) u_N` at each point, computed
/// term by term from the truncated series with the exact power rule.
pub fn residual(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
    xs: &[f64],
) -> Result<Vec<f64>, SeriesError> {
    if let Some(x) = xs.iter().copied().find(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(SeriesError::NonPositivePoint(x));
    }
    match lattice_offsets(eq, sol) {
        Some((offsets, beta_offset)) => {
            let (r, _) = residual_coefficients(eq, sol, &offsets, beta_offset)?;
            Ok(xs
                .iter()
                .map(|&x| {
                    let mut terms: Vec<f64> = r
                        .iter()
                        .enumerate()
                        .map(|(k, &rk)| signed_term(rk, x, sol.exponent(k)))
                        .collect();
                    sum_descending(&mut terms)
                })
                .collect())
        }
        None => residual_pointwise(eq, sol, xs),
    }
}

fn residual_pointwise(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
    xs: &[f64],
) -> Result<Vec<f64>, SeriesError> {
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut terms = Vec::new();
        for (n, &c) in sol.coefficients.iter().enumerate() {
            let e = sol.exponent(n);
            for (i, t) in eq.terms().iter().enumerate() {
                let d = frac_derivative_power(eq.kind(), t.alpha, e)?;
                let power = t.alpha + eq.shift_value(i) + d.exponent;
                terms.push(t.d * d.coefficient * signed_term(c, x, power));
            }
            terms.push(signed_term(c, x, e + eq.beta_value()));
            terms.push(-eq.nu_squared() * signed_term(c, x, e));
        }
        out.push(sum_descending(&mut terms));
    }
    Ok(out)
}

/// Pointwise bound on `|residual|`: the powers the truncation leaves
/// unbalanced, plus a rounding allowance proportional to the magnitude of
/// everything that cancels.
pub fn residual_bound(
    eq: &QuasiBesselEquation,
    sol: &SeriesSolution,
    xs: &[f64],
) -> Result<Vec<f64>, SeriesError> {
    let (offsets, beta_offset) = lattice_offsets(eq, sol).ok_or_else(|| {
        SeriesError::InvalidArgument("solution step does not match the equation".into())
    })?;
    let (r, a) = residual_coefficients(eq, sol, &offsets, beta_offset)?;
    let kept = sol.coefficients.len();
    let rounding = 8.0 * f64::EPSILON * (eq.terms().len() + 2) as f64;
    Ok(xs
        .iter()
        .map(|&x| {
            (0..r.len())
                .map(|k| {
                    let e = sol.exponent(k);
                    let dropped = if k >= kept {
                        term_magnitude(r[k], x, e)
                    } else {
                        0.0
                    };
                    dropped + rounding * term_magnitude(a[k], x, e)
                })
                .sum()
        })
        .collect())
}
