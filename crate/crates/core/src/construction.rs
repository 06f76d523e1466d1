//! The explicit circle action: chart, connection, symplectic form, and the
//! symbolic checks that certify it.
//!
//! Coordinates are `(x1, x2, x3, x4, t, theta)`: the `x` are periodic torus
//! coordinates, `t` is the moment map (the fiberwise norm squared) and
//! `theta` the fiber angle, both angles with period 1. The form is
//!
//! ```text
//! omega = s12 + s34 + (c1 - t) s14 + (c2 - t) s23 + dt ^ Theta,
//! Theta = dtheta + a,   da = -s14 - s23,
//! ```
//!
//! with `sij = dxi ^ dxj`. Its top power is
//! `6 (1 + (c1 - t)(c2 - t)) dx1^dx2^dx3^dx4^dt^dtheta`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{
    int, Chart, CoordVectorField, ExteriorError, Form, Poly, Rational, Variable,
};
use crate::logconcavity::{self, isolate_roots};

pub const X1: usize = 0;
pub const X2: usize = 1;
pub const X3: usize = 2;
pub const X4: usize = 3;
pub const T: usize = 4;
pub const THETA: usize = 5;
pub const DIM: usize = 6;

/// Positive orientation of the chart.
pub const TOP: [usize; DIM] = [X1, X2, X3, X4, T, THETA];

/// Ordered pairs of torus axes reported as Chern integrals.
pub const FACES: [(usize, usize); 6] = [(X1, X2), (X1, X3), (X1, X4), (X2, X3), (X2, X4), (X3, X4)];

/// Rational grid points used to certify positivity of the top coefficient.
const POSITIVITY_GRID: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid cut window: {0}")]
    InvalidWindow(String),
    #[error("gauge potential rejected: d(a) - (-s14 - s23) = {residual}")]
    GaugeRejected { residual: String },
    #[error("gauge potential must be a 1-form in the torus directions: {0}")]
    GaugeShape(String),
    #[error("1 + (c1 - t)(c2 - t) is not positive on [{a}, {b}]")]
    DegenerateParams { a: f64, b: f64 },
    #[error("construction not verified: {0}")]
    NotVerified(String),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Moment-map interval `[A, B]` kept by the cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutWindow {
    pub a: f64,
    pub b: f64,
}

impl CutWindow {
    pub fn new(a: f64, b: f64) -> Result<Self, ConstructionError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(ConstructionError::InvalidWindow(format!(
                "non-finite bound ({a}, {b})"
            )));
        }
        if !(a > 0.0) {
            return Err(ConstructionError::InvalidWindow(format!(
                "A = {a} must be positive"
            )));
        }
        if !(a < b) {
            return Err(ConstructionError::InvalidWindow(format!(
                "A = {a} must be below B = {b}"
            )));
        }
        Ok(CutWindow { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Whether `s` lies strictly inside the window.
    pub fn straddles(&self, s: f64) -> bool {
        self.a < s && s < self.b
    }

    pub fn contains(&self, other: &CutWindow) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn exact(&self) -> (Rational, Rational) {
        (f64_to_rational(self.a), f64_to_rational(self.b))
    }
}

impl Default for CutWindow {
    fn default() -> Self {
        CutWindow { a: 0.5, b: 4.5 }
    }
}

impl fmt::Display for CutWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

pub(crate) fn f64_to_rational(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// The chart `(x1, x2, x3, x4, t, theta)` with `t` sampled on the window.
pub fn canonical_chart(window: &CutWindow) -> Arc<Chart> {
    Arc::new(
        Chart::new(vec![
            Variable::periodic("x1"),
            Variable::periodic("x2"),
            Variable::periodic("x3"),
            Variable::periodic("x4"),
            Variable::interval("t", window.a, window.b),
            Variable::periodic("theta"),
        ])
        .expect("canonical chart is valid"),
    )
}

fn sigma(chart: &Arc<Chart>, i: usize, j: usize) -> Form {
    Form::basis(chart, &[i, j], Rational::one())
}

/// Required curvature `-s14 - s23` of the connection.
pub fn curvature_target(chart: &Arc<Chart>) -> Form {
    -(&sigma(chart, X1, X4) + &sigma(chart, X2, X3))
}

/// Local potential `a` of the connection, `Theta = dtheta + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential {
    form: Form,
}

impl GaugePotential {
    /// Accepts any 1-form whose differentials are torus directions.
    pub fn new(form: Form) -> Result<Self, ConstructionError> {
        if form.chart().dim() != DIM {
            return Err(ConstructionError::GaugeShape(
                "chart is not the canonical chart".into(),
            ));
        }
        if form.degree() != 1 {
            return Err(ConstructionError::GaugeShape(format!(
                "degree {}",
                form.degree()
            )));
        }
        if let Some((idx, _)) = form.terms().find(|(idx, _)| idx[0] > X4) {
            return Err(ConstructionError::GaugeShape(format!(
                "component along d{}",
                form.chart().variable(idx[0]).name
            )));
        }
        Ok(GaugePotential { form })
    }

    /// `a = x4 dx1 + x3 dx2`, so `da = dx4^dx1 + dx3^dx2 = -s14 - s23`.
    pub fn canonical(chart: &Arc<Chart>) -> Self {
        let x4 = Poly::var(DIM, X4);
        let x3 = Poly::var(DIM, X3);
        let form = &Form::monomial(chart, &[X1], x4) + &Form::monomial(chart, &[X2], x3);
        GaugePotential { form }
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    /// Shifts the potential by another torus 1-form.
    pub fn shifted(&self, delta: &Form) -> Result<Self, ConstructionError> {
        GaugePotential::new(self.form.checked_add(delta)?)
    }
}

/// Returns `Theta = dtheta + a` after checking `da = -s14 - s23`.
pub fn build_connection(gauge: &GaugePotential) -> Result<Form, ConstructionError> {
    let chart = gauge.form.chart();
    let residual = &gauge.form.d() - &curvature_target(chart);
    if !residual.is_zero() {
        return Err(ConstructionError::GaugeRejected {
            residual: residual.to_string(),
        });
    }
    Ok(&Form::coordinate(chart, THETA) + &gauge.form)
}

/// The constants `(c1, c2)` of the symplectic form; `(2, 3)` reproduces the
/// counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaParams {
    c1: Rational,
    c2: Rational,
}

impl OmegaParams {
    /// Checks `1 + (c1 - t)(c2 - t) > 0` on the closed window, exactly.
    pub fn new(c1: Rational, c2: Rational, window: &CutWindow) -> Result<Self, ConstructionError> {
        let params = OmegaParams { c1, c2 };
        if params.min_on(window) > Rational::zero() {
            Ok(params)
        } else {
            Err(ConstructionError::DegenerateParams {
                a: window.a,
                b: window.b,
            })
        }
    }

    /// `(2, 3)`; the quadratic has minimum `3/4` at `t = 5/2`, so it is
    /// positive on every window.
    pub fn standard() -> Self {
        OmegaParams {
            c1: int(2),
            c2: int(3),
        }
    }

    /// Skips the positivity check, for building deliberately degenerate forms.
    pub fn unchecked(c1: Rational, c2: Rational) -> Self {
        OmegaParams { c1, c2 }
    }

    pub fn from_f64(c1: f64, c2: f64, window: &CutWindow) -> Result<Self, ConstructionError> {
        Self::new(f64_to_rational(c1), f64_to_rational(c2), window)
    }

    pub fn c1(&self) -> &Rational {
        &self.c1
    }

    pub fn c2(&self) -> &Rational {
        &self.c2
    }

    /// `1 + (c1 - t)(c2 - t)` as a chart polynomial.
    pub fn positivity_poly(&self) -> Poly {
        let t = Poly::var(DIM, T);
        let a = &Poly::constant(DIM, self.c1.clone()) - &t;
        let b = &Poly::constant(DIM, self.c2.clone()) - &t;
        &Poly::one(DIM) + &(&a * &b)
    }

    fn min_on(&self, window: &CutWindow) -> Rational {
        let (lo, hi) = window.exact();
        let vertex = (&self.c1 + &self.c2) / int(2);
        let at = if vertex < lo {
            lo
        } else if vertex > hi {
            hi
        } else {
            vertex
        };
        let v = &self.c1 - &at;
        let w = &self.c2 - &at;
        Rational::one() + v * w
    }
}

impl Serialize for OmegaParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("OmegaParams", 2)?;
        st.serialize_field("c1", &self.c1.to_string())?;
        st.serialize_field("c2", &self.c2.to_string())?;
        st.end()
    }
}

/// `s12 + s34 + (c1 - t) s14 + (c2 - t) s23 + dt ^ Theta`.
pub fn build_omega(theta: &Form, params: &OmegaParams) -> Form {
    let chart = theta.chart();
    let t = Poly::var(DIM, T);
    let k1 = &Poly::constant(DIM, params.c1.clone()) - &t;
    let k2 = &Poly::constant(DIM, params.c2.clone()) - &t;
    let dt = Form::coordinate(chart, T);
    let base = &sigma(chart, X1, X2) + &sigma(chart, X3, X4);
    let twisted = &sigma(chart, X1, X4).mul_poly(&k1) + &sigma(chart, X2, X3).mul_poly(&k2);
    let fiber = dt.wedge(theta).expect("same chart");
    &(&base + &twisted) + &fiber
}

/// Builds `omega` for the canonical gauge on the given window.
pub fn standard_omega(window: &CutWindow, params: &OmegaParams) -> Form {
    let chart = canonical_chart(window);
    let theta = build_connection(&GaugePotential::canonical(&chart))
        .expect("canonical gauge has the right curvature");
    build_omega(&theta, params)
}

/// Outcome of the symbolic verification battery.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub closed: bool,
    pub moment_identity: bool,
    /// Coefficient of the positive top tuple in `omega ^ omega ^ omega`.
    pub top_power_poly: Poly,
    pub nondegenerate_on_window: bool,
    /// Integral of the curvature over each torus face, keyed like `x1x4`.
    pub chern_numbers: BTreeMap<String, Rational>,
    pub window: CutWindow,
    /// `d(omega)`, zero when closed.
    pub d_omega: Form,
    /// `iota(d/dtheta) omega`.
    pub contraction: Form,
    /// Human-readable reasons for every failed check.
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.closed
            && self.moment_identity
            && self.nondegenerate_on_window
            && self.failures.is_empty()
    }

    pub fn top_power_display(&self) -> String {
        display_t(&self.top_power_poly)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let chern: BTreeMap<&String, String> = self
            .chern_numbers
            .iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        serde_json::json!({
            "closed": self.closed,
            "moment_identity": self.moment_identity,
            "nondegenerate_on_window": self.nondegenerate_on_window,
            "window": [self.window.a, self.window.b],
            "top_power": self.top_power_display(),
            "top_power_poly": self.top_power_poly.to_doc(),
            "d_omega": self.d_omega.to_doc(),
            "contraction": self.contraction.to_doc(),
            "chern_numbers": chern,
            "failures": self.failures,
        })
    }

    pub fn to_table(&self) -> String {
        let flag = |b: bool| if b { "ok" } else { "FAIL" };
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {}\n",
            "closed (d omega = 0)",
            flag(self.closed)
        ));
        out.push_str(&format!(
            "{:<28} {}\n",
            "moment map (i_theta = -dt)",
            flag(self.moment_identity)
        ));
        out.push_str(&format!(
            "{:<28} {}\n",
            format!("nondegenerate on {}", self.window),
            flag(self.nondegenerate_on_window)
        ));
        out.push_str(&format!(
            "{:<28} {}\n",
            "top power coefficient",
            self.top_power_display()
        ));
        for (face, v) in &self.chern_numbers {
            out.push_str(&format!("{:<28} {}\n", format!("chern integral {face}"), v));
        }
        for f in &self.failures {
            out.push_str(&format!("failure: {f}\n"));
        }
        out
    }
}

fn display_t(p: &Poly) -> String {
    let names = ["x1", "x2", "x3", "x4", "t", "theta"];
    match p.content() {
        Some(c) if !c.is_one() && p.num_terms() > 1 => {
            format!("{}*({})", c, p.scale(&c.recip()).display_with(&names))
        }
        _ => p.display_with(&names),
    }
}

pub fn face_label(chart: &Chart, (i, j): (usize, usize)) -> String {
    format!("{}{}", chart.variable(i).name, chart.variable(j).name)
}

/// Runs the full battery on a form over the canonical chart. Failures are
/// recorded in the report, never raised.
pub fn verify_construction(omega: &Form, window: &CutWindow) -> VerificationReport {
    let chart = omega.chart().clone();
    let mut failures = Vec::new();

    let d_omega = omega.d();
    let closed = d_omega.is_zero();
    if !closed {
        failures.push(format!("closedness: d omega = {d_omega}"));
    }

    let contraction = omega
        .interior(CoordVectorField::new(THETA))
        .unwrap_or_else(|_| Form::zero(&chart, 1));
    let moment_identity = contraction == -Form::coordinate(&chart, T);
    if !moment_identity {
        failures.push(format!(
            "moment map: iota(d/dtheta) omega = {contraction}, expected -dt"
        ));
    }

    let cube = omega.wedge(omega).and_then(|w| w.wedge(omega));
    let top_power_poly = cube
        .map(|c| c.coefficient(&TOP))
        .unwrap_or_else(|_| Poly::zero(DIM));
    let nondegenerate_on_window = match positive_on_window(&top_power_poly, window) {
        Ok(()) => true,
        Err(why) => {
            failures.push(format!("nondegeneracy: {why}"));
            false
        }
    };

    // Theta = iota(d/dt) omega; its dtheta part is closed, so d Theta is the curvature.
    let mut chern_numbers = BTreeMap::new();
    match omega.interior(CoordVectorField::new(T)) {
        Ok(theta) => {
            let curvature = theta.d();
            for face in FACES {
                match curvature.integrate_over_face(face) {
                    Ok(v) => {
                        chern_numbers.insert(face_label(&chart, face), v);
                    }
                    Err(e) => {
                        failures.push(format!("chern integral {}: {e}", face_label(&chart, face)))
                    }
                }
            }
        }
        Err(e) => failures.push(format!("connection: {e}")),
    }

    VerificationReport {
        closed,
        moment_identity,
        top_power_poly,
        nondegenerate_on_window,
        chern_numbers,
        window: *window,
        d_omega,
        contraction,
        failures,
    }
}

/// Certifies `p > 0` on the closed window: `p` must depend on `t` only, be
/// positive at a rational grid (exactly), and have no root in the window.
pub fn positive_on_window(p: &Poly, window: &CutWindow) -> Result<(), String> {
    if p.is_zero() {
        return Err("top power vanishes identically".into());
    }
    if p.support_vars().iter().any(|&v| v != T) {
        return Err(format!(
            "top power depends on more than t: {}",
            display_t(p)
        ));
    }
    let (lo, hi) = window.exact();
    let step = (&hi - &lo) / int(POSITIVITY_GRID as i64);
    let mut point = vec![Rational::zero(); DIM];
    for k in 0..=POSITIVITY_GRID {
        point[T] = &lo + &step * int(k as i64);
        let v = p.eval_exact(&point).expect("chart-sized point");
        if !v.is_positive() {
            return Err(format!("top power is {} at t = {}", v, point[T]));
        }
    }
    let roots = isolate_roots(p, (window.a, window.b), logconcavity::ENDPOINT_TOL)
        .map_err(|e| e.to_string())?;
    if let Some(r) = roots.first() {
        return Err(format!("top power has a root near t = {r}"));
    }
    Ok(())
}

/// The Duistermaat-Heckman density as a primitive polynomial in `t`: the
/// top power divided by its (positive) content.
pub fn analytic_dh_density(
    report: &VerificationReport,
    window: &CutWindow,
) -> Result<Poly, ConstructionError> {
    if !report.closed {
        return Err(ConstructionError::NotVerified("omega is not closed".into()));
    }
    if !report.nondegenerate_on_window {
        return Err(ConstructionError::NotVerified(format!(
            "omega is degenerate on {}",
            report.window
        )));
    }
    positive_on_window(&report.top_power_poly, window)
        .map_err(|why| ConstructionError::NotVerified(format!("window {window}: {why}")))?;
    let c = report
        .top_power_poly
        .content()
        .ok_or_else(|| ConstructionError::NotVerified("zero top power".into()))?;
    Ok(report.top_power_poly.scale(&c.recip()))
}

/// `∫_A^B p(t) dt` computed exactly.
pub fn exact_mass(p: &Poly, window: &CutWindow) -> Rational {
    let (lo, hi) = window.exact();
    p.integrate_var(T, &lo, &hi)
        .as_constant()
        .expect("density depends on t only")
}
