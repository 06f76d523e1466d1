//! Log-concavity analysis of one-dimensional densities.
//!
//! Two independent routes: a discrete midpoint test on uniformly sampled
//! values, and an exact treatment of polynomial densities through the
//! discriminant `g = f·f″ − (f′)²`, whose sign equals the sign of
//! `(log f)″` wherever `f > 0`.

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{CompiledPoly, Poly};

/// Number of scan cells used by [`isolate_roots`].
pub const SCAN_POINTS: usize = 10_000;

/// Width to which analytic violation endpoints are bisected.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogConcavityError {
    #[error("polynomial depends on more than one variable ({0:?})")]
    NotUnivariate(Vec<usize>),
    #[error("density is not strictly positive at s = {s} (value {value}); log undefined")]
    NonPositive { s: f64, value: f64 },
    #[error("sample grid is not uniform at index {0}")]
    NonUniformGrid(usize),
    #[error("invalid interval ({0}, {1})")]
    InvalidInterval(f64, f64),
    #[error("tolerance must be finite and nonnegative, got {0}")]
    InvalidTolerance(f64),
}

/// Outcome of a log-concavity test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationReport {
    pub log_concave: bool,
    /// Maximal subintervals on which the log-concavity inequality fails.
    #[serde(rename = "intervals")]
    pub violation_intervals: Vec<(f64, f64)>,
    /// Points `(s, g(s))` with `g(s) > 0`, one per violation interval.
    #[serde(rename = "witnesses")]
    pub witness_points: Vec<(f64, f64)>,
    /// Number of zero-volume bins dropped from the low and high ends before
    /// testing; only set by slice-profile checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trimmed: Option<(usize, usize)>,
}

impl ViolationReport {
    fn from_parts(violation_intervals: Vec<(f64, f64)>, witness_points: Vec<(f64, f64)>) -> Self {
        ViolationReport {
            log_concave: violation_intervals.is_empty(),
            violation_intervals,
            witness_points,
            trimmed: None,
        }
    }
}

/// A polynomial viewed as a function of its single occurring variable.
#[derive(Clone, Debug)]
pub struct Univariate {
    poly: Poly,
    var: usize,
    compiled: CompiledPoly,
}

impl Univariate {
    /// Fails if more than one variable occurs. Constants are accepted and
    /// viewed as functions of variable 0.
    pub fn new(poly: &Poly) -> Result<Self, LogConcavityError> {
        let support = poly.support_vars();
        if support.len() > 1 {
            return Err(LogConcavityError::NotUnivariate(support));
        }
        let var = support.first().copied().unwrap_or(0);
        Ok(Univariate {
            compiled: poly.compile(),
            poly: poly.clone(),
            var,
        })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut point = vec![0.0; self.poly.nvars().max(1)];
        point[self.var] = s;
        if self.poly.nvars() == 0 {
            return self.compiled.eval(&[]);
        }
        self.compiled.eval(&point)
    }

    pub fn derivative(&self) -> Univariate {
        let d = if self.poly.nvars() == 0 {
            self.poly.clone()
        } else {
            self.poly.partial(self.var)
        };
        Univariate {
            compiled: d.compile(),
            poly: d,
            var: self.var,
        }
    }

    /// `f·f″ − (f′)²`, computed exactly.
    pub fn discriminant(&self) -> Univariate {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let g = &(&self.poly * &d2.poly) - &(&d1.poly * &d1.poly);
        Univariate {
            compiled: g.compile(),
            poly: g,
            var: self.var,
        }
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<(), LogConcavityError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(LogConcavityError::InvalidInterval(lo, hi))
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real roots of a univariate polynomial in the closed interval `[lo, hi]`.
///
/// Scans [`SCAN_POINTS`] cells for sign changes, then bisects each to width
/// `tol`. Pairs of roots closer than the scan pitch (including double roots)
/// can be missed.
pub fn isolate_roots(
    p: &Poly,
    interval: (f64, f64),
    tol: f64,
) -> Result<Vec<f64>, LogConcavityError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LogConcavityError::InvalidTolerance(tol));
    }
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    let f = Univariate::new(p)?;
    if p.is_zero() {
        return Ok(Vec::new());
    }
    let eval = |s: f64| f.eval(s);
    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut roots = Vec::new();
    let mut prev = (lo, eval(lo));
    if prev.1 == 0.0 {
        roots.push(lo);
    }
    for k in 1..=SCAN_POINTS {
        let s = if k == SCAN_POINTS {
            hi
        } else {
            lo + step * k as f64
        };
        let v = eval(s);
        if v == 0.0 {
            roots.push(s);
        } else if prev.1 != 0.0 && (v < 0.0) != (prev.1 < 0.0) {
            roots.push(bisect(&eval, prev.0, s, prev.1, tol));
        }
        prev = (s, v);
    }
    Ok(roots)
}

/// Exact log-concavity analysis of a positive polynomial density on the
/// open interval `(lo, hi)`.
pub fn analytic_logconcavity(
    f: &Poly,
    interval: (f64, f64),
) -> Result<ViolationReport, LogConcavityError> {
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    let uf = Univariate::new(f)?;
    ensure_positive(&uf, lo, hi)?;
    let g = uf.discriminant();
    if g.poly().is_zero() {
        return Ok(ViolationReport::from_parts(Vec::new(), Vec::new()));
    }
    let mut cuts = vec![lo];
    cuts.extend(
        isolate_roots(g.poly(), interval, ENDPOINT_TOL)?
            .into_iter()
            .filter(|&r| r > lo && r < hi),
    );
    cuts.push(hi);

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut witnesses: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let gm = g.eval(mid);
        if gm <= 0.0 {
            continue;
        }
        match intervals.last_mut() {
            // a root of even multiplicity: g stays positive across it
            Some(last) if last.1 == a => {
                last.1 = b;
                if gm > witnesses.last().map_or(0.0, |w| w.1) {
                    *witnesses.last_mut().unwrap() = (mid, gm);
                }
            }
            _ => {
                intervals.push((a, b));
                witnesses.push((mid, gm));
            }
        }
    }
    Ok(ViolationReport::from_parts(intervals, witnesses))
}

fn ensure_positive(f: &Univariate, lo: f64, hi: f64) -> Result<(), LogConcavityError> {
    let interior: Vec<f64> = isolate_roots(f.poly(), (lo, hi), ENDPOINT_TOL)?
        .into_iter()
        .filter(|&r| r > lo && r < hi)
        .collect();
    if let Some(&s) = interior.first() {
        return Err(LogConcavityError::NonPositive {
            s,
            value: f.eval(s),
        });
    }
    let mid = 0.5 * (lo + hi);
    let v = f.eval(mid);
    if v > 0.0 {
        Ok(())
    } else {
        Err(LogConcavityError::NonPositive { s: mid, value: v })
    }
}

/// Midpoint test on samples `(s_i, f(s_i))` over a uniform grid.
///
/// Index `i` is flagged when `f(s_i)² < f(s_{i-1})·f(s_{i+1})·(1 − tol)`;
/// `tol` is relative slack, so the verdict is invariant under scaling `f`.
/// Runs of adjacent flagged indices become `(s_first, s_last)` intervals, each
/// witnessed by the discrete discriminant `(f_{i-1}f_{i+1} − f_i²)/h²`.
pub fn discrete_logconcavity(
    samples: &[(f64, f64)],
    tol: f64,
) -> Result<ViolationReport, LogConcavityError> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(LogConcavityError::InvalidTolerance(tol));
    }
    if let Some(&(s, value)) = samples.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(LogConcavityError::NonPositive { s, value });
    }
    if samples.len() < 3 {
        return Ok(ViolationReport::from_parts(Vec::new(), Vec::new()));
    }
    let h = samples[1].0 - samples[0].0;
    if !(h > 0.0) {
        return Err(LogConcavityError::NonUniformGrid(1));
    }
    for (i, w) in samples.windows(2).enumerate() {
        if ((w[1].0 - w[0].0) - h).abs() > 1e-6 * h {
            return Err(LogConcavityError::NonUniformGrid(i + 1));
        }
    }

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut witnesses: Vec<(f64, f64)> = Vec::new();
    let mut open = false;
    for i in 1..samples.len() - 1 {
        let (s, fi) = samples[i];
        let outer = samples[i - 1].1 * samples[i + 1].1;
        if fi * fi < outer * (1.0 - tol) {
            let g = (outer - fi * fi) / (h * h);
            if open {
                intervals.last_mut().unwrap().1 = s;
                let w = witnesses.last_mut().unwrap();
                if g > w.1 {
                    *w = (s, g);
                }
            } else {
                intervals.push((s, s));
                witnesses.push((s, g));
                open = true;
            }
        } else {
            open = false;
        }
    }
    Ok(ViolationReport::from_parts(intervals, witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{int, Poly};

    fn t() -> Poly {
        Poly::var(1, 0)
    }

    fn rho() -> Poly {
        &(&(&t() * &t()) - &t().scale(&int(5))) + &Poly::from_int(1, 7)
    }

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + h * i as f64).collect()
    }

    // Independent oracle: quadratic formula for g = -2t^2 + 10t - 11.
    fn analytic_endpoints() -> (f64, f64) {
        let (a, b, c) = (-2.0f64, 10.0f64, -11.0f64);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let r1 = (-b + disc) / (2.0 * a);
        let r2 = (-b - disc) / (2.0 * a);
        (r1.min(r2), r1.max(r2))
    }

    #[test]
    fn oracle_matches_closed_form() {
        let (lo, hi) = analytic_endpoints();
        assert!((lo - (2.5 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((hi - (2.5 + 3f64.sqrt() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn discriminant_of_rho() {
        let g = Univariate::new(&rho()).unwrap().discriminant();
        let expected =
            &(&(&t() * &t()).scale(&int(-2)) + &t().scale(&int(10))) - &Poly::from_int(1, 11);
        assert_eq!(*g.poly(), expected);
    }

    #[test]
    fn roots_of_g() {
        let g = Univariate::new(&rho()).unwrap().discriminant();
        let r = isolate_roots(g.poly(), (0.0, 5.0), 1e-9).unwrap();
        let (a, b) = analytic_endpoints();
        assert_eq!(r.len(), 2);
        assert!((r[0] - a).abs() <= 1e-9);
        assert!((r[1] - b).abs() <= 1e-9);
    }

    #[test]
    fn rho_has_no_real_roots() {
        assert!(isolate_roots(&rho(), (0.0, 5.0), 1e-9).unwrap().is_empty());
    }

    #[test]
    fn linear_root() {
        let p = &t() - &Poly::constant(1, crate::exterior::ratio(5, 2));
        let r = isolate_roots(&p, (0.0, 5.0), 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.5).abs() <= 1e-9);
    }

    #[test]
    fn isolate_rejects_bad_tolerance() {
        assert!(matches!(
            isolate_roots(&rho(), (0.0, 1.0), 0.0),
            Err(LogConcavityError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn analytic_rho_violation() {
        let rep = analytic_logconcavity(&rho(), (0.5, 4.5)).unwrap();
        let (a, b) = analytic_endpoints();
        assert!(!rep.log_concave);
        assert_eq!(rep.violation_intervals.len(), 1);
        let (lo, hi) = rep.violation_intervals[0];
        assert!((lo - a).abs() <= 1e-9 && (hi - b).abs() <= 1e-9);
        assert!(rep.witness_points.iter().all(|w| w.1 > 0.0));
    }

    #[test]
    fn analytic_one_plus_t_squared() {
        // g = 2(1+t^2) - 4t^2 = 2 - 2t^2, positive on (0, 1)
        let f = &Poly::one(1) + &(&t() * &t());
        let rep = analytic_logconcavity(&f, (0.0, 4.0)).unwrap();
        assert_eq!(rep.violation_intervals.len(), 1);
        let (lo, hi) = rep.violation_intervals[0];
        assert_eq!(lo, 0.0);
        assert!((hi - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn analytic_constant_is_log_concave() {
        let rep = analytic_logconcavity(&Poly::one(1), (0.0, 1.0)).unwrap();
        assert!(rep.log_concave);
        assert!(rep.witness_points.is_empty());
    }

    #[test]
    fn analytic_rejects_sign_change() {
        let f = &t() - &Poly::from_int(1, 1);
        assert!(matches!(
            analytic_logconcavity(&f, (0.0, 2.0)),
            Err(LogConcavityError::NonPositive { .. })
        ));
    }

    #[test]
    fn analytic_rejects_multivariate() {
        let f = &Poly::var(2, 0) + &Poly::var(2, 1);
        assert!(matches!(
            analytic_logconcavity(&f, (0.0, 1.0)),
            Err(LogConcavityError::NotUnivariate(_))
        ));
    }

    #[test]
    fn discrete_log_affine_passes() {
        let samples: Vec<_> = grid(-1.0, 2.0, 0.01)
            .into_iter()
            .map(|s| (s, (3.0 * s + 1.0).exp()))
            .collect();
        assert!(discrete_logconcavity(&samples, 1e-12).unwrap().log_concave);
    }

    #[test]
    fn discrete_constant_passes() {
        let samples: Vec<_> = grid(0.0, 1.0, 0.1).into_iter().map(|s| (s, 1.0)).collect();
        assert!(discrete_logconcavity(&samples, 0.0).unwrap().log_concave);
    }

    #[test]
    fn discrete_rho_matches_analytic() {
        let h = 0.01;
        let samples: Vec<_> = grid(0.5, 4.5, h)
            .into_iter()
            .map(|s| (s, s * s - 5.0 * s + 7.0))
            .collect();
        let rep = discrete_logconcavity(&samples, 1e-9).unwrap();
        let (a, b) = analytic_endpoints();
        assert_eq!(rep.violation_intervals.len(), 1);
        let (lo, hi) = rep.violation_intervals[0];
        assert!((lo - a).abs() <= h, "{lo} vs {a}");
        assert!((hi - b).abs() <= h, "{hi} vs {b}");
        assert!(rep.witness_points.iter().all(|w| w.1 > 0.0));
    }

    #[test]
    fn discrete_rejects_zero_sample() {
        let samples = vec![(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)];
        assert!(matches!(
            discrete_logconcavity(&samples, 0.0),
            Err(LogConcavityError::NonPositive { s, .. }) if s == 1.0
        ));
    }

    #[test]
    fn discrete_rejects_uneven_grid() {
        let samples = vec![(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)];
        assert!(matches!(
            discrete_logconcavity(&samples, 0.0),
            Err(LogConcavityError::NonUniformGrid(2))
        ));
    }

    #[test]
    fn json_report_shape() {
        let rep = ViolationReport::from_parts(vec![(1.0, 2.0)], vec![(1.5, 0.25)]);
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"log_concave": false, "intervals": [[1.0, 2.0]], "witnesses": [[1.5, 0.25]]})
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scaling_preserves_verdict(c in 1e-3f64..1e3) {
                let h = 0.01;
                let base: Vec<_> = grid(0.5, 4.5, h).into_iter().map(|s| (s, s * s - 5.0 * s + 7.0)).collect();
                let scaled: Vec<_> = base.iter().map(|&(s, v)| (s, c * v)).collect();
                let a = discrete_logconcavity(&base, 1e-9).unwrap();
                let b = discrete_logconcavity(&scaled, 1e-9).unwrap();
                prop_assert_eq!(a.log_concave, b.log_concave);
                prop_assert_eq!(a.violation_intervals, b.violation_intervals);
            }

            #[test]
            fn analytic_scaling_invariance(n in 1i64..50, d in 1i64..50) {
                let c = crate::exterior::ratio(n, d);
                let a = analytic_logconcavity(&rho(), (0.5, 4.5)).unwrap();
                let b = analytic_logconcavity(&rho().scale(&c), (0.5, 4.5)).unwrap();
                prop_assert_eq!(a.log_concave, b.log_concave);
                for (x, y) in a.violation_intervals.iter().zip(&b.violation_intervals) {
                    prop_assert!((x.0 - y.0).abs() <= 1e-9 && (x.1 - y.1).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn refinement_moves_endpoints_toward_analytic() {
        let (a, b) = analytic_endpoints();
        let run = |h: f64| {
            let samples: Vec<_> = grid(0.5, 4.5, h)
                .into_iter()
                .map(|s| (s, s * s - 5.0 * s + 7.0))
                .collect();
            discrete_logconcavity(&samples, 1e-9)
                .unwrap()
                .violation_intervals[0]
        };
        let coarse = run(0.02);
        let fine = run(0.01);
        assert!((fine.0 - coarse.0).abs() <= 2.0 * 0.02);
        assert!((fine.1 - coarse.1).abs() <= 2.0 * 0.02);
        assert!((fine.0 - a).abs() <= (coarse.0 - a).abs() + 0.01);
        assert!((fine.1 - b).abs() <= (coarse.1 - b).abs() + 0.01);
    }
}
