//! The characteristic function `G(γ) = Σ_pure d·Γ(1+γ)/Γ(1+γ−α) − ν²`, its
//! real roots, and the screening that decides which roots start a series.

use std::fmt;

use thiserror::Error;

use crate::equation::{DerivativeKind, QuasiBesselEquation};
use crate::gamma::{self, GammaError};
use crate::series::{free_term, StepPlan};

/// Two roots closer than this, modulo the step, collide.
pub const COLLISION_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_GRID_POINTS: usize = 10_000;
const MAX_DOUBLINGS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharacteristicError {
    #[error("Gamma(1 + gamma) has a pole at gamma = {0}")]
    Pole(f64),
    #[error("search interval must extend above -1, got upper end {0}")]
    EmptyInterval(f64),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStatus {
    Valid,
    BelowCaputoFloor,
    CollisionInvalid,
    DenominatorPole,
}

impl RootStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootStatus::Valid => "valid",
            RootStatus::BelowCaputoFloor => "below_caputo_floor",
            RootStatus::CollisionInvalid => "collision_invalid",
            RootStatus::DenominatorPole => "denominator_pole",
        }
    }
}

impl fmt::Display for RootStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoot {
    pub gamma: f64,
    pub status: RootStatus,
    /// Step at which `γ + s·n` lands on a larger root.
    pub collision_step: Option<u64>,
}

impl CharacteristicRoot {
    pub fn is_valid(&self) -> bool {
        self.status == RootStatus::Valid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootScan {
    /// Ascending.
    pub roots: Vec<CharacteristicRoot>,
    /// Upper end actually scanned, after any extension.
    pub search_hi: f64,
    pub diagnostic: Option<String>,
}

pub fn characteristic_value(
    eq: &QuasiBesselEquation,
    gamma: f64,
) -> Result<f64, CharacteristicError> {
    if !gamma.is_finite() {
        return Err(GammaError::NotFinite(gamma).into());
    }
    if gamma::is_pole(1.0 + gamma) {
        return Err(CharacteristicError::Pole(gamma));
    }
    let mut sum = free_term(eq);
    for t in eq.pure_terms() {
        sum += t.d * gamma::gamma_ratio(gamma, 0.0, t.alpha)?;
    }
    Ok(sum)
}

/// `max(n_max, 4) + ν^(2/α₁) + 10`.
pub fn default_search_hi(eq: &QuasiBesselEquation) -> f64 {
    let n = f64::from(eq.n_max().unwrap_or(0)).max(4.0);
    let alpha = eq.leading().alpha;
    let growth = if alpha > 0.0 {
        eq.nu_squared().powf(1.0 / alpha)
    } else {
        0.0
    };
    n + growth + 10.0
}

fn lower_end() -> f64 {
    // one tolerance past the pole so the end point itself is not treated as one
    -1.0 + 2.0 * gamma::POLE_TOLERANCE
}

fn bisect(
    eq: &QuasiBesselEquation,
    mut lo: f64,
    mut hi: f64,
    mut g_lo: f64,
) -> Result<f64, CharacteristicError> {
    // refine to adjacent floats; the loop ends well within 100 halvings
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = characteristic_value(eq, mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let g_hi = characteristic_value(eq, hi)?;
    Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi })
}

fn scan_interval(
    eq: &QuasiBesselEquation,
    lo: f64,
    hi: f64,
    points: usize,
    out: &mut Vec<f64>,
) -> Result<(f64, f64), CharacteristicError> {
    let h = (hi - lo) / points as f64;
    let mut x_prev = lo;
    let mut g_prev = characteristic_value(eq, lo)?;
    if g_prev == 0.0 {
        out.push(lo);
    }
    let mut g_before_last = g_prev;
    for k in 1..=points {
        let x = if k == points { hi } else { lo + h * k as f64 };
        let g = characteristic_value(eq, x)?;
        if g == 0.0 {
            out.push(x);
        } else if g_prev != 0.0 && (g > 0.0) != (g_prev > 0.0) {
            out.push(bisect(eq, x_prev, x, g_prev)?);
        }
        g_before_last = g_prev;
        x_prev = x;
        g_prev = g;
    }
    Ok((g_before_last, g_prev))
}

fn floor_status(eq: &QuasiBesselEquation, gamma: f64) -> RootStatus {
    if eq.kind() == DerivativeKind::Caputo && gamma <= eq.caputo_floor() {
        RootStatus::BelowCaputoFloor
    } else {
        RootStatus::Valid
    }
}

/// Closed-form roots when `G(γ) = d·Γ(1+γ)/Γ(1+γ−α)`: the poles of
/// `Γ(1+γ−α)` above `−1`, i.e. `γ = α − k`.
fn analytic_family(eq: &QuasiBesselEquation) -> Option<Vec<f64>> {
    if eq.m1() != 1 || free_term(eq) != 0.0 {
        return None;
    }
    let alpha = eq.pure_terms().next()?.alpha;
    let k_max = (alpha + 1.0).floor() as i64;
    let mut roots: Vec<f64> = (1..=k_max)
        .map(|k| alpha - k as f64)
        .filter(|&g| g > -1.0 && !gamma::is_pole(1.0 + g))
        .collect();
    roots.reverse();
    Some(roots)
}

pub fn find_roots(
    eq: &QuasiBesselEquation,
    search_hi: f64,
) -> Result<RootScan, CharacteristicError> {
    find_roots_with_grid(eq, search_hi, DEFAULT_GRID_POINTS)
}

/// Sign-change scan of `G` on `(−1, search_hi]` with `points` intervals,
/// extending the upper end by doubling while `G` is not yet positive and
/// increasing there.
pub fn find_roots_with_grid(
    eq: &QuasiBesselEquation,
    search_hi: f64,
    points: usize,
) -> Result<RootScan, CharacteristicError> {
    let lo = lower_end();
    if !(search_hi > lo) || points == 0 {
        return Err(CharacteristicError::EmptyInterval(search_hi));
    }
    let wrap = |gammas: Vec<f64>| -> Vec<CharacteristicRoot> {
        gammas
            .into_iter()
            .map(|g| CharacteristicRoot {
                gamma: g,
                status: floor_status(eq, g),
                collision_step: None,
            })
            .collect()
    };
    if let Some(family) = analytic_family(eq) {
        let family: Vec<f64> = family.into_iter().filter(|&g| g <= search_hi).collect();
        let diagnostic = family
            .is_empty()
            .then(|| "no characteristic root above -1".to_string());
        return Ok(RootScan {
            roots: wrap(family),
            search_hi,
            diagnostic,
        });
    }

    let mut found = Vec::new();
    let (mut g_prev, mut g_top) = scan_interval(eq, lo, search_hi, points, &mut found)?;
    let mut hi = search_hi;
    for _ in 0..MAX_DOUBLINGS {
        if g_top > 0.0 && g_top >= g_prev {
            break;
        }
        let next = if hi > 0.0 { 2.0 * hi } else { hi + 1.0 };
        (g_prev, g_top) = scan_interval(eq, hi, next, points, &mut found)?;
        // the shared end point was already examined
        if found.len() >= 2 && found[found.len() - 1] == found[found.len() - 2] {
            found.pop();
        }
        hi = next;
    }
    found.sort_by(f64::total_cmp);
    found.dedup();
    let diagnostic = if found.is_empty() {
        Some(format!(
            "characteristic function has no sign change on (-1, {hi}]"
        ))
    } else {
        None
    };
    Ok(RootScan {
        roots: wrap(found),
        search_hi: hi,
        diagnostic,
    })
}

/// Marks a root invalid when `γ + s·n` lands on a larger root for some
/// `n ≥ 1`; the recursion denominator vanishes at that `n`. The largest
/// root is left as is. Only `Valid` roots change.
pub fn screen_collisions(roots: &[CharacteristicRoot], plan: &StepPlan) -> Vec<CharacteristicRoot> {
    let s = plan.step_value();
    let largest = roots
        .iter()
        .map(|r| r.gamma)
        .fold(f64::NEG_INFINITY, f64::max);
    roots
        .iter()
        .map(|root| {
            if root.status != RootStatus::Valid || root.gamma == largest || !(s > 0.0) {
                return *root;
            }
            let step = roots
                .iter()
                .filter(|other| other.gamma > root.gamma)
                .filter_map(|other| {
                    let n = ((other.gamma - root.gamma) / s).round();
                    (n >= 1.0 && (other.gamma - (root.gamma + s * n)).abs() < COLLISION_TOLERANCE)
                        .then_some(n as u64)
                })
                .min();
            match step {
                Some(n) => CharacteristicRoot {
                    gamma: root.gamma,
                    status: RootStatus::CollisionInvalid,
                    collision_step: Some(n),
                },
                None => *root,
            }
        })
        .collect()
}
