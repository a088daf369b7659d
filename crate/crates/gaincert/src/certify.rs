//! Closed-form gain certification for the dead-beat controller, the
//! minimal-gamma solver, the proof-level interval test, and figure-data
//! generation.
//!
//! A pair (a, gamma) is certified when the shared Riccati solution exists
//! with P > 1 and
//!
//! ```text
//! curvature:        P > 2 gamma - 1                       (strict)
//! strong negativity:(P + 2g^2 - 1)(P - 1 - 2 sqrt(g^2-P))^2
//!                     >= (P-1)((P+1)^2 - 4g^2)            (non-strict)
//! ```
//!
//! Strong negativity is exactly disjointness of the two intervals of
//! measurement values that could carry the past costs above the induction
//! threshold -P/(P-1) x_hat^2; [`interval_pair`] exposes those endpoints so
//! the two routes can be checked against each other.

use serde::Serialize;
use thiserror::Error;

use crate::model::Model;
use crate::observer::past_cost_update;
use crate::riccati::solve_riccati;

/// Negative radicand gamma^2 - P within this tolerance of zero is clamped
/// (a = 0 gives exactly P = gamma^2).
pub const RADICAND_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum CertifyError {
    #[error("gamma^2 - P = {0} is negative beyond tolerance")]
    NegativeRadicand(f64),
    #[error("curvature condition fails: (P+1)^2 <= 4 gamma^2")]
    CurvatureFailed,
    #[error("P = {0} <= 1")]
    GainInfeasible(f64),
    #[error("no certified gamma found at or below {0}")]
    NotFound(f64),
}

/// Outcome of evaluating the certification conditions for one (a, gamma).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificationReport {
    pub a: f64,
    pub gamma: f64,
    /// Riccati solution, when one exists.
    pub p: Option<f64>,
    /// P exists and P > 1.
    pub p_feasible: bool,
    pub curvature_ok: bool,
    pub negativity_ok: bool,
    pub certified: bool,
}

/// Curvature condition: P > 2 gamma - 1, strict.
pub fn curvature_condition(p: f64, gamma: f64) -> bool {
    p > 2.0 * gamma - 1.0
}

/// Strong negativity condition, non-strict, with the squared factor applied
/// to the full parenthesis (P - 1 - 2 sqrt(gamma^2 - P)).
pub fn strong_negativity(p: f64, gamma: f64) -> Result<bool, CertifyError> {
    let g2 = gamma * gamma;
    let rad = g2 - p;
    if rad < -RADICAND_CLAMP {
        return Err(CertifyError::NegativeRadicand(rad));
    }
    let root = rad.max(0.0).sqrt();
    let factor = p - 1.0 - 2.0 * root;
    let lhs = (p + 2.0 * g2 - 1.0) * factor * factor;
    let rhs = (p - 1.0) * ((p + 1.0) * (p + 1.0) - 4.0 * g2);
    Ok(lhs >= rhs)
}

/// Evaluate every certification condition for the b = +-1, c = 1 family.
pub fn certify(a: f64, gamma: f64) -> CertificationReport {
    let solved = solve_riccati(&Model { a, b: 1.0, c: 1.0 }, gamma).ok();
    let p = solved.map(|s| s.p);
    let p_feasible = p.is_some_and(|p| p > 1.0);
    let (curvature_ok, negativity_ok) = match p {
        Some(p) => (
            curvature_condition(p, gamma),
            strong_negativity(p, gamma).unwrap_or(false),
        ),
        None => (false, false),
    };
    CertificationReport {
        a,
        gamma,
        p,
        p_feasible,
        curvature_ok,
        negativity_ok,
        certified: p_feasible && curvature_ok && negativity_ok,
    }
}

/// Analytic lower bound (|a| + sqrt(a^2+1)) sqrt(a^2+1) on the certified
/// gain.
pub fn gamma_lower_bound(a: f64) -> f64 {
    let s = (a * a + 1.0).sqrt();
    (a.abs() + s) * s
}

/// Analytic upper bound 2.1 a^2 + 2 on the certified gain.
pub fn gamma_upper_bound(a: f64) -> f64 {
    2.1 * a * a + 2.0
}

/// Least certified gamma (within `tol`): coarse upward scan from the
/// analytic lower bound with step (upper - lower)/256, then bisection on the
/// first uncertified-to-certified crossing. The scan guards against
/// non-monotone pockets; certification is only assumed monotone inside the
/// final bracket. `NotFound` if nothing certifies below twice the upper
/// bound.
pub fn gamma_star(a: f64, tol: f64) -> Result<f64, CertifyError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let lower = gamma_lower_bound(a);
    let upper = gamma_upper_bound(a);
    let limit = 2.0 * upper;
    let step = (upper - lower) / 256.0;
    if certify(a, lower).certified {
        return Ok(lower);
    }
    let mut prev = lower;
    for k in 1.. {
        let g = lower + k as f64 * step;
        if g > limit {
            return Err(CertifyError::NotFound(limit));
        }
        if certify(a, g).certified {
            let (mut lo, mut hi) = (prev, g);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if certify(a, mid).certified {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            debug_assert!(
                hi >= lower - tol - 1e-4 && hi <= upper + tol + 1e-4,
                "gamma_star({a}) = {hi} escapes the analytic sandwich [{lower}, {upper}]"
            );
            return Ok(hi);
        }
        prev = g;
    }
    unreachable!()
}

/// Endpoints (per unit x_hat, in the shifted coordinate
/// z = y - P/(2 gamma^2) x_hat) of the two intervals whose disjointness is
/// equivalent to strong negativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalPair {
    pub i1_lo: f64,
    pub i1_hi: f64,
    pub im1_lo: f64,
    pub im1_hi: f64,
}

/// Requires P > 1, gamma^2 >= P, and the curvature condition (the
/// denominators change sign without it).
pub fn interval_pair(p: f64, gamma: f64) -> Result<IntervalPair, CertifyError> {
    if p <= 1.0 {
        return Err(CertifyError::GainInfeasible(p));
    }
    let g2 = gamma * gamma;
    let rad = g2 - p;
    if rad < -RADICAND_CLAMP {
        return Err(CertifyError::NegativeRadicand(rad));
    }
    if !curvature_condition(p, gamma) {
        return Err(CertifyError::CurvatureFailed);
    }
    let root = rad.max(0.0).sqrt();
    let base = p / (2.0 * g2);
    let r = 2.0 * root / (p - 1.0);
    // Curvature gives (P-1)^2 > 4 (gamma^2 - P), hence r < 1.
    let i1_lo = base / (1.0 + r);
    let i1_hi = base / (1.0 - r);
    let denom = (p + 1.0) * (p + 1.0) - 4.0 * g2;
    let scale = base * (p + 2.0 * g2 - 1.0) / denom;
    let im1_lo = scale * (p - 1.0 - 2.0 * root);
    let im1_hi = scale * (p - 1.0 + 2.0 * root);
    Ok(IntervalPair {
        i1_lo,
        i1_hi,
        im1_lo,
        im1_hi,
    })
}

/// One grid point of a minimal-gamma sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub a: f64,
    /// None when no certified gamma was found for this pole.
    pub gamma_star: Option<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub p: Option<f64>,
    pub p_feasible: bool,
    pub curvature_ok: bool,
    pub negativity_ok: bool,
}

/// Run [`gamma_star`] on an even grid over [a_min, a_max], recording the
/// analytic bounds and the condition flags at the found gain. NotFound rows
/// are recorded, not fatal.
pub fn sweep(a_min: f64, a_max: f64, steps: usize, tol: f64) -> Vec<SweepRow> {
    assert!(steps >= 2, "a sweep needs at least two grid points");
    (0..steps)
        .map(|i| {
            let a = a_min + (a_max - a_min) * i as f64 / (steps - 1) as f64;
            let lower_bound = gamma_lower_bound(a);
            let upper_bound = gamma_upper_bound(a);
            match gamma_star(a, tol) {
                Ok(g) => {
                    let rep = certify(a, g);
                    SweepRow {
                        a,
                        gamma_star: Some(g),
                        lower_bound,
                        upper_bound,
                        p: rep.p,
                        p_feasible: rep.p_feasible,
                        curvature_ok: rep.curvature_ok,
                        negativity_ok: rep.negativity_ok,
                    }
                }
                Err(_) => SweepRow {
                    a,
                    gamma_star: None,
                    lower_bound,
                    upper_bound,
                    p: None,
                    p_feasible: false,
                    curvature_ok: false,
                    negativity_ok: false,
                },
            }
        })
        .collect()
}

/// One row of the quadratic-functions figure data.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadfunRow {
    pub y: f64,
    pub l1_next: f64,
    pub lm1_next: f64,
    pub threshold: f64,
}

/// Curves l_1(t+1), l_{-1}(t+1) and the induction threshold
/// -P/(P-1) x_hat(t+1)^2 over a measurement grid, from the state
/// (x_hat, l1, lm1). Requires a solvable pair with P > 1.
pub fn figure_quadfuns(
    a: f64,
    gamma: f64,
    x_hat: f64,
    l1: f64,
    lm1: f64,
    y_grid: &[f64],
) -> Result<Vec<QuadfunRow>, CertifyError> {
    let solved = solve_riccati(&Model { a, b: 1.0, c: 1.0 }, gamma)
        .map_err(|_| CertifyError::GainInfeasible(f64::NAN))?;
    let p = solved.p;
    if p <= 1.0 {
        return Err(CertifyError::GainInfeasible(p));
    }
    let g2 = gamma * gamma;
    let larger_is_1 = l1 >= lm1;
    Ok(y_grid
        .iter()
        .map(|&y| {
            let with_zero = |l| past_cost_update(p, solved.x, g2, 1.0, 0.0, l, y);
            let with_xhat = |l| past_cost_update(p, solved.x, g2, 1.0, x_hat, l, y);
            let (l1_next, lm1_next) = if larger_is_1 {
                (with_zero(l1), with_xhat(lm1))
            } else {
                (with_xhat(l1), with_zero(lm1))
            };
            let x_next = solved.a_hat * x_hat + solved.g_hat * y + solved.g_hat * y;
            QuadfunRow {
                y,
                l1_next,
                lm1_next,
                threshold: -(p / (p - 1.0)) * x_next * x_next,
            }
        })
        .collect())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values keep all 17 digits
mod tests {
    use super::*;

    const P14: f64 = 9.711_914_478_058_505_6;
    const P134: f64 = 6.965_488_965_329_232_6;
    const GAMMA_STAR_1: f64 = 3.635_486_575_903_545_7;
    // Interval endpoints frozen from the endpoint formulas at 50 digits.
    const I1_HI_14: f64 = 0.715_243_412_820_072_83;
    const IM1_LO_14: f64 = 0.900_112_495_858_926_32;
    const I1_HI_134: f64 = 1.070_733_847_594_933_6;
    const IM1_LO_134: f64 = 0.854_697_517_468_953_14;
    const THRESH_Y0: f64 = -0.172_182_163_358_822_58;
    const LM1_NEXT_Y0: f64 = -7.009_865_509_311_483_6;

    #[test]
    fn curvature_examples() {
        assert!(curvature_condition(P14, 4.0));
        assert!(!curvature_condition(7.0, 4.0), "boundary is excluded");
        assert!(curvature_condition(2.25, 1.5));
    }

    #[test]
    fn strong_negativity_examples() {
        assert!(strong_negativity(P14, 4.0).unwrap());
        assert!(!strong_negativity(P134, 3.4).unwrap());
        assert!(strong_negativity(2.25, 1.5).unwrap());
    }

    #[test]
    fn strong_negativity_guards_the_radicand() {
        assert!(matches!(
            strong_negativity(4.0, 1.5),
            Err(CertifyError::NegativeRadicand(_))
        ));
        // Within clamp tolerance: treated as zero.
        assert!(strong_negativity(2.25 + 5e-13, 1.5).is_ok());
    }

    #[test]
    fn certify_figure_anchors() {
        let rep = certify(1.0, 4.0);
        assert!(rep.certified && rep.p_feasible && rep.curvature_ok && rep.negativity_ok);
        assert!((rep.p.unwrap() - P14).abs() < 1e-12);

        let rep = certify(1.0, 3.4);
        assert!(!rep.certified);
        assert!(rep.p_feasible && rep.curvature_ok && !rep.negativity_ok);
        assert!((rep.p.unwrap() - P134).abs() < 1e-12);

        let rep = certify(1.0, 1.0);
        assert!(!rep.p_feasible && !rep.certified);
        assert!(rep.p.is_none());
    }

    #[test]
    fn gamma_star_at_zero_pole() {
        let tol = 1e-6;
        let g = gamma_star(0.0, tol).unwrap();
        assert!(g >= 1.0 && g <= 1.0 + 2.0 * tol, "g = {g}");
    }

    #[test]
    fn gamma_star_at_unit_pole() {
        let g = gamma_star(1.0, 1e-6).unwrap();
        assert!(g > 3.4 && g <= 4.0);
        assert!(g >= gamma_lower_bound(1.0));
        assert!((g - GAMMA_STAR_1).abs() < 2e-6, "g = {g}");
    }

    #[test]
    fn gamma_star_is_a_local_crossing() {
        let tol = 1e-6;
        for a in [0.5, 1.0, 2.0] {
            let g = gamma_star(a, tol).unwrap();
            assert!(certify(a, g + 10.0 * tol).certified);
            assert!(!certify(a, g - 10.0 * tol).certified);
        }
    }

    #[test]
    fn gamma_star_is_even() {
        for a in [0.5, 1.0, 3.0] {
            let plus = gamma_star(a, 1e-8).unwrap();
            let minus = gamma_star(-a, 1e-8).unwrap();
            assert!((plus - minus).abs() <= 1e-8);
        }
    }

    #[test]
    fn interval_collapse_at_zero_pole() {
        let pair = interval_pair(2.25, 1.5).unwrap();
        assert!((pair.i1_lo - 0.5).abs() < 1e-14);
        assert!((pair.i1_hi - 0.5).abs() < 1e-14);
        assert!((pair.im1_lo - 2.3).abs() < 1e-14);
        assert!((pair.im1_hi - 2.3).abs() < 1e-14);
    }

    #[test]
    fn interval_disjointness_tracks_the_figure() {
        let pair = interval_pair(P14, 4.0).unwrap();
        assert!((pair.i1_hi - I1_HI_14).abs() < 1e-12);
        assert!((pair.im1_lo - IM1_LO_14).abs() < 1e-12);
        assert!(pair.i1_hi < pair.im1_lo, "certified pair separates");
        assert!(pair.i1_lo <= pair.i1_hi && pair.im1_lo <= pair.im1_hi);

        let pair = interval_pair(P134, 3.4).unwrap();
        assert!((pair.i1_hi - I1_HI_134).abs() < 1e-12);
        assert!((pair.im1_lo - IM1_LO_134).abs() < 1e-12);
        assert!(pair.i1_hi > pair.im1_lo, "uncertified pair overlaps");
    }

    #[test]
    fn interval_pair_rejects_broken_preconditions() {
        assert_eq!(
            interval_pair(0.9, 1.2),
            Err(CertifyError::GainInfeasible(0.9))
        );
        // a = 2, gamma = 4: P ~ 3.6 fails P > 2g - 1 = 7.
        let p = certify(2.0, 4.0).p.unwrap();
        assert_eq!(interval_pair(p, 4.0), Err(CertifyError::CurvatureFailed));
    }

    #[test]
    fn negativity_agrees_with_interval_disjointness() {
        let mut true_side = 0usize;
        let mut false_side = 0usize;
        for i in 0..20 {
            for j in 0..20 {
                let a = -6.0 + 12.0 * i as f64 / 19.0;
                let gamma = 1.05 + (10.0 - 1.05) * j as f64 / 19.0;
                let rep = certify(a, gamma);
                let Some(p) = rep.p else { continue };
                if !(p > 1.0 && rep.curvature_ok) {
                    continue;
                }
                let pair = interval_pair(p, gamma).unwrap();
                let disjoint = pair.i1_hi <= pair.im1_lo + 1e-9;
                assert_eq!(
                    rep.negativity_ok, disjoint,
                    "disagreement at a = {a}, gamma = {gamma}"
                );
                if disjoint {
                    true_side += 1;
                } else {
                    false_side += 1;
                }
            }
        }
        assert!(true_side > 0 && false_side > 0, "grid must exercise both outcomes");
    }

    #[test]
    fn sweep_single_point_and_symmetry() {
        let rows = sweep(0.0, 0.0, 2, 1e-6);
        let g = rows[0].gamma_star.unwrap();
        assert!((g - 1.0).abs() < 1e-3);
        assert!((rows[0].lower_bound - 1.0).abs() < 1e-12);
        assert!((rows[0].upper_bound - 2.0).abs() < 1e-12);

        let rows = sweep(-1.0, 1.0, 2, 1e-6);
        let (g_minus, g_plus) = (rows[0].gamma_star.unwrap(), rows[1].gamma_star.unwrap());
        assert!((g_minus - g_plus).abs() <= 1e-6);
    }

    #[test]
    fn sweep_respects_the_bound_sandwich() {
        for row in sweep(-6.0, 6.0, 25, 1e-6) {
            let g = row.gamma_star.expect("every pole certifies");
            assert!(
                row.lower_bound - 1e-4 <= g && g <= row.upper_bound + 1e-4,
                "a = {}: {} not in [{}, {}]",
                row.a,
                g,
                row.lower_bound,
                row.upper_bound
            );
        }
    }

    #[test]
    fn quadfun_rows_reproduce_the_anchors() {
        let rows = figure_quadfuns(1.0, 4.0, 0.0, 0.0, 0.0, &[0.0]).unwrap();
        assert_eq!(
            (rows[0].l1_next, rows[0].lm1_next, rows[0].threshold),
            (0.0, 0.0, 0.0)
        );

        let lm1 = -P14 / (P14 - 1.0);
        let rows = figure_quadfuns(1.0, 4.0, 1.0, 0.0, lm1, &[0.0]).unwrap();
        assert_eq!(rows[0].l1_next, 0.0);
        assert!((rows[0].lm1_next - LM1_NEXT_Y0).abs() < 1e-12, "{}", rows[0].lm1_next);
        assert!((rows[0].threshold - THRESH_Y0).abs() < 1e-12);
    }

    #[test]
    fn quadfun_requires_feasible_p() {
        assert!(figure_quadfuns(1.0, 1.0, 1.0, 0.0, 0.0, &[0.0]).is_err());
        // a = 6, gamma = 6 gives 0 < P < 1.
        assert!(figure_quadfuns(6.0, 6.0, 1.0, 0.0, 0.0, &[0.0]).is_err());
    }
}
