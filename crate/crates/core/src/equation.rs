//! The problem model: terms `d·x^(α+p)·D^α u`, the `(x^β − ν²)u` part,
//! well-posedness checks and the reductions of constant-coefficient and
//! power-factor equations to quasi-Bessel form.
//!
//! Shifting indices `p` and the power `β` are exact rationals measured in
//! units of a common positive factor `r` (default 1): the actual shift of a
//! term is `r·p`. Derivative orders are plain reals.

use std::fmt;

use thiserror::Error;

use crate::gamma::{self, GammaError};
use crate::rational::{Rational, RationalError};

/// Orders within this distance of an integer are treated as integers.
const INTEGER_ORDER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("equation has no terms")]
    NoTerms,
    #[error("derivative order must be finite and nonnegative, got {0}")]
    InvalidOrder(f64),
    #[error("coefficient must be finite, got {0}")]
    InvalidCoefficient(f64),
    #[error("shifting index must be nonnegative, got {0}")]
    NegativeShift(Rational),
    #[error("power of x must be nonnegative, got {0}")]
    NegativeBeta(Rational),
    #[error("nu^2 must be finite and nonnegative, got {0}")]
    InvalidNuSquared(f64),
    #[error("scale factor r must be finite and positive, got {0}")]
    InvalidScale(f64),
    #[error("{0}")]
    Inapplicable(String),
    #[error("transformation precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeKind {
    Caputo,
    RiemannLiouville,
}

impl fmt::Display for DerivativeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivativeKind::Caputo => "caputo",
            DerivativeKind::RiemannLiouville => "riemann_liouville",
        })
    }
}

pub fn is_integer_order(alpha: f64) -> bool {
    (alpha - alpha.round()).abs() < INTEGER_ORDER_TOLERANCE
}

/// `n` with `n−1 < α < n` for fractional `α`, and `α` itself for integers.
pub fn order_ceiling(alpha: f64) -> u32 {
    if is_integer_order(alpha) {
        alpha.round() as u32
    } else {
        alpha.ceil() as u32
    }
}

/// One term `d·x^(α + r·p)·D^α u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub d: f64,
    pub alpha: f64,
    /// Shift in units of `r`.
    pub p: Rational,
}

impl Term {
    pub fn new(d: f64, alpha: f64, p: Rational) -> Result<Self, EquationError> {
        if !d.is_finite() {
            return Err(EquationError::InvalidCoefficient(d));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(EquationError::InvalidOrder(alpha));
        }
        if p.is_negative() {
            return Err(EquationError::NegativeShift(p));
        }
        Ok(Term { d, alpha, p })
    }

    /// A term whose power of `x` equals its derivative order.
    pub fn is_pure(&self) -> bool {
        self.p.is_zero()
    }

    pub fn is_fractional(&self) -> bool {
        !is_integer_order(self.alpha)
    }
}

/// `Σ d_i x^(α_i+p_i) D^(α_i) u + (x^β − ν²) u = 0`.
///
/// Terms are kept in descending order of `α` (ties: smaller shift first), so
/// the leading term is the one that must carry `p = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiBesselEquation {
    terms: Vec<Term>,
    beta: Rational,
    nu_squared: f64,
    r: f64,
    kind: DerivativeKind,
}

impl QuasiBesselEquation {
    pub fn new(
        mut terms: Vec<Term>,
        beta: Rational,
        nu_squared: f64,
        r: f64,
        kind: DerivativeKind,
    ) -> Result<Self, EquationError> {
        if terms.is_empty() {
            return Err(EquationError::NoTerms);
        }
        if beta.is_negative() {
            return Err(EquationError::NegativeBeta(beta));
        }
        if !nu_squared.is_finite() || nu_squared < 0.0 {
            return Err(EquationError::InvalidNuSquared(nu_squared));
        }
        if !r.is_finite() || r <= 0.0 {
            return Err(EquationError::InvalidScale(r));
        }
        for t in &terms {
            Term::new(t.d, t.alpha, t.p)?;
        }
        terms.sort_by(|a, b| b.alpha.total_cmp(&a.alpha).then(a.p.cmp(&b.p)));
        Ok(QuasiBesselEquation {
            terms,
            beta,
            nu_squared,
            r,
            kind,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn leading(&self) -> &Term {
        &self.terms[0]
    }

    /// `β / r`.
    pub fn beta(&self) -> Rational {
        self.beta
    }

    pub fn beta_value(&self) -> f64 {
        self.r * self.beta.to_f64()
    }

    /// Actual shift `r·p_i` of term `i`.
    pub fn shift_value(&self, i: usize) -> f64 {
        self.r * self.terms[i].p.to_f64()
    }

    pub fn nu_squared(&self) -> f64 {
        self.nu_squared
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kind(&self) -> DerivativeKind {
        self.kind
    }

    pub fn with_nu_squared(&self, nu_squared: f64) -> Result<Self, EquationError> {
        QuasiBesselEquation::new(self.terms.clone(), self.beta, nu_squared, self.r, self.kind)
    }

    pub fn with_kind(&self, kind: DerivativeKind) -> Self {
        QuasiBesselEquation {
            kind,
            ..self.clone()
        }
    }

    pub fn pure_terms(&self) -> impl Iterator<Item = &Term> + '_ {
        self.terms.iter().filter(|t| t.is_pure())
    }

    /// Terms with a strictly positive shift, with their indices.
    pub fn shifted_terms(&self) -> impl Iterator<Item = (usize, &Term)> + '_ {
        self.terms.iter().enumerate().filter(|(_, t)| !t.is_pure())
    }

    /// `m₁`: number of pure-Bessel terms.
    pub fn m1(&self) -> usize {
        self.pure_terms().count()
    }

    /// `m₀`: pure-Bessel terms with a fractional order.
    pub fn m0(&self) -> usize {
        self.pure_terms().filter(|t| t.is_fractional()).count()
    }

    /// Ceiling of the highest fractional order over all terms.
    pub fn n_max(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter(|t| t.is_fractional())
            .map(|t| order_ceiling(t.alpha))
            .max()
    }

    /// Ceiling of the lowest fractional order over all terms.
    pub fn n_min(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter(|t| t.is_fractional())
            .map(|t| order_ceiling(t.alpha))
            .min()
    }

    /// Highest ceiling among the fractional pure-Bessel terms.
    pub fn n_m0(&self) -> Option<u32> {
        self.pure_terms()
            .filter(|t| t.is_fractional())
            .map(|t| order_ceiling(t.alpha))
            .max()
    }

    /// Highest order among the pure-Bessel terms.
    pub fn alpha_star_max(&self) -> Option<f64> {
        self.pure_terms().map(|t| t.alpha).reduce(f64::max)
    }

    /// Smallest leading exponent for which the Caputo derivatives of every
    /// term exist: `γ` must exceed `n_max − 1`. Integer-order equations have
    /// no floor beyond `γ > −1`.
    pub fn caputo_floor(&self) -> f64 {
        self.n_max().map_or(-1.0, |n| f64::from(n) - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Fatal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IssueCode {
    /// The highest-order term carries a nonzero shift; the series diverges.
    LeadingTermShifted,
    /// A pure-Bessel coefficient is not positive; real characteristic roots
    /// are no longer guaranteed.
    NonPositivePureCoefficient,
}

impl IssueCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            IssueCode::LeadingTermShifted => "LEADING_TERM_SHIFTED",
            IssueCode::NonPositivePureCoefficient => "NONPOSITIVE_PURE_COEFFICIENT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub code: IssueCode,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.issues.iter().any(|i| i.severity == Severity::Fatal)
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

/// Checks the conditions under which a series solution can exist.
///
/// Rationality of `p_i/r` and `β/r` holds by construction, since both are
/// stored as [`Rational`]s.
pub fn validate(eq: &QuasiBesselEquation) -> ValidationReport {
    let mut issues = Vec::new();
    let lead = eq.leading();
    if !lead.is_pure() {
        issues.push(Issue {
            code: IssueCode::LeadingTermShifted,
            severity: Severity::Fatal,
            message: format!(
                "highest-order term (alpha = {}) has shift p = {}; with p1 > 0 the series \
                 diverges and no solution of this form exists",
                lead.alpha, lead.p
            ),
        });
    }
    for t in eq.pure_terms().filter(|t| t.d <= 0.0) {
        issues.push(Issue {
            code: IssueCode::NonPositivePureCoefficient,
            severity: Severity::Warning,
            message: format!(
                "pure-Bessel term with alpha = {} has coefficient d = {}; real characteristic \
                 roots are not guaranteed",
                t.alpha, t.d
            ),
        });
    }
    ValidationReport { issues }
}

/// `Γ(n_{m₀}) · Σ_{pure i} d_i / Γ(n_max − α_i)`, the smallest `ν²` for which a
/// Caputo series solution is guaranteed.
pub fn nu_min_threshold(eq: &QuasiBesselEquation) -> Result<f64, EquationError> {
    if eq.kind() != DerivativeKind::Caputo {
        return Err(EquationError::Inapplicable(
            "threshold applies to Caputo equations only".into(),
        ));
    }
    if eq.pure_terms().any(|t| t.d <= 0.0) {
        return Err(EquationError::Inapplicable(
            "threshold requires positive pure-Bessel coefficients".into(),
        ));
    }
    let n_m0 = eq.n_m0().ok_or_else(|| {
        EquationError::Inapplicable("no fractional pure-Bessel term (m0 = 0)".into())
    })?;
    // n_max exists whenever n_m0 does
    let n_max = f64::from(eq.n_max().unwrap_or(n_m0));
    let mut sum = 0.0;
    for t in eq.pure_terms() {
        let arg = n_max - t.alpha;
        if gamma::is_pole(arg) {
            return Err(EquationError::Gamma(GammaError::Pole(arg)));
        }
        sum += t.d / gamma::gamma(arg)?;
    }
    Ok(gamma::gamma(f64::from(n_m0))? * sum)
}

/// Right-hand side `b₁^β + Σ q_i |d_i| b₁^(n_i+p_i)` of the uniqueness
/// condition for the Caputo initial value problem on `[0, b]`.
pub fn uniqueness_bound(eq: &QuasiBesselEquation, b: f64) -> Result<f64, EquationError> {
    if eq.kind() != DerivativeKind::Caputo {
        return Err(EquationError::Inapplicable(
            "uniqueness bound applies to Caputo equations only".into(),
        ));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(EquationError::Precondition(format!(
            "domain end b must be positive, got {b}"
        )));
    }
    let b1 = b.max(1.0);
    let mut total = b1.powf(eq.beta_value());
    for (i, t) in eq.terms().iter().enumerate() {
        let n = f64::from(order_ceiling(t.alpha));
        let q = if t.is_fractional() {
            1.0 / (gamma::gamma(n - t.alpha)? * (n - t.alpha + 1.0))
        } else {
            1.0
        };
        total += q * t.d.abs() * b1.powf(n + eq.shift_value(i));
    }
    Ok(total)
}

/// `Σ d_i D^(α_i) u + u = 0`, multiplied through by `x^(α₁)`.
///
/// Orders are given in units of `r`. The result has `p_i = α₁ − α_i`,
/// `β = α₁` and `ν = 0`.
pub fn from_constant_coefficients(
    coeffs: &[(f64, Rational)],
    r: f64,
    kind: DerivativeKind,
) -> Result<QuasiBesselEquation, EquationError> {
    let triples: Vec<(f64, Rational, Rational)> = coeffs
        .iter()
        .map(|&(d, a)| (d, Rational::ZERO, a))
        .collect();
    from_power_factors(&triples, Rational::ZERO, r, kind)
}

/// `Σ d_i x^(β_i) D^(α_i) u + x^δ u = 0`, multiplied through by `x^(α₁−β₁)`.
///
/// Each entry is `(d_i, β_i, α_i)` with `β_i`, `α_i` and `δ` in units of `r`.
/// Requires `α₁ ≥ β₁` and `α₁ − β₁ ≥ α_i − β_i`, where `α₁` is the unique
/// highest order.
pub fn from_power_factors(
    terms: &[(f64, Rational, Rational)],
    delta: Rational,
    r: f64,
    kind: DerivativeKind,
) -> Result<QuasiBesselEquation, EquationError> {
    if terms.is_empty() {
        return Err(EquationError::NoTerms);
    }
    let lead = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .2.cmp(&b.1 .2))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (_, beta1, alpha1) = terms[lead];
    if terms
        .iter()
        .enumerate()
        .any(|(i, t)| i != lead && t.2 == alpha1)
    {
        return Err(EquationError::Precondition(format!(
            "highest order {alpha1} must be unique"
        )));
    }
    if alpha1 < beta1 {
        return Err(EquationError::Precondition(format!(
            "need alpha1 >= beta1, got alpha1 = {alpha1}, beta1 = {beta1}"
        )));
    }
    if delta.is_negative() || terms.iter().any(|t| t.1.is_negative() || t.2.is_negative()) {
        return Err(EquationError::Precondition(
            "powers and orders must be nonnegative".into(),
        ));
    }
    let lift = alpha1.checked_sub(&beta1)?;
    let mut out = Vec::with_capacity(terms.len());
    for &(d, beta_i, alpha_i) in terms {
        let p = lift.checked_add(&beta_i)?.checked_sub(&alpha_i)?;
        if p.is_negative() {
            return Err(EquationError::Precondition(format!(
                "need alpha1 - beta1 >= alpha_i - beta_i, violated by alpha_i = {alpha_i}, \
                 beta_i = {beta_i}"
            )));
        }
        out.push(Term::new(d, r * alpha_i.to_f64(), p)?);
    }
    let beta = lift.checked_add(&delta)?;
    QuasiBesselEquation::new(out, beta, 0.0, r, kind)
}
