//! Differential forms of a single degree with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Poly, TermDoc};
use super::{Chart, ExteriorError, Rational};

/// Strictly ascending tuple of variable indices, e.g. `[0, 3]` for dx₁∧dx₄.
pub type IndexTuple = Vec<usize>;

/// A homogeneous differential form `Σ p_I dx_I` on a chart.
///
/// Index tuples are stored strictly ascending and zero coefficients are
/// dropped, so two forms are equal exactly when their term maps are. Forms
/// with no terms are equal whatever their nominal degree.
#[derive(Clone, Debug)]
pub struct Form {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<IndexTuple, Poly>,
}

/// Sorts `indices` in place and returns the permutation sign, or `None` if an
/// index repeats (the wedge of a repeated differential vanishes).
fn normalize(indices: &mut [usize]) -> Option<bool> {
    let mut positive = true;
    // insertion sort; tuples are at most the chart dimension long
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            positive = !positive;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(positive)
    }
}

impl Form {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Form {
            chart: Arc::clone(chart),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Degree-0 form with the given coefficient.
    pub fn scalar(chart: &Arc<Chart>, p: Poly) -> Self {
        Self::monomial(chart, &[], p)
    }

    /// The coordinate differential `d(x_index)`.
    pub fn coordinate(chart: &Arc<Chart>, index: usize) -> Self {
        Self::monomial(chart, &[index], Poly::one(chart.dim()))
    }

    /// `p · dx_{i₁} ∧ … ∧ dx_{i_k}` for indices in any order.
    pub fn monomial(chart: &Arc<Chart>, indices: &[usize], p: Poly) -> Self {
        assert!(
            indices.iter().all(|&i| i < chart.dim()),
            "index out of chart range"
        );
        assert_eq!(p.nvars(), chart.dim(), "coefficient variable count");
        let mut form = Self::zero(chart, indices.len());
        let mut idx = indices.to_vec();
        if let Some(positive) = normalize(&mut idx) {
            form.add_term(idx, if positive { p } else { -p });
        }
        form
    }

    /// Constant-coefficient monomial.
    pub fn basis(chart: &Arc<Chart>, indices: &[usize], c: Rational) -> Self {
        Self::monomial(chart, indices, Poly::constant(chart.dim(), c))
    }

    fn add_term(&mut self, idx: IndexTuple, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &p;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexTuple, &Poly)> {
        self.terms.iter()
    }

    /// Coefficient of `dx_I` for `indices` in any order, sign included.
    pub fn coefficient(&self, indices: &[usize]) -> Poly {
        let mut idx = indices.to_vec();
        match normalize(&mut idx) {
            Some(positive) => {
                let p = self
                    .terms
                    .get(&idx)
                    .cloned()
                    .unwrap_or_else(|| Poly::zero(self.chart.dim()));
                if positive {
                    p
                } else {
                    -p
                }
            }
            None => Poly::zero(self.chart.dim()),
        }
    }

    fn same_chart(&self, other: &Form) -> Result<(), ExteriorError> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(ExteriorError::ChartMismatch)
        }
    }

    /// Sum of two forms of equal degree on the same chart. A form with no
    /// terms is the zero of every degree.
    pub fn checked_add(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.same_chart(other)?;
        if self.terms.is_empty() {
            return Ok(other.clone());
        }
        if other.terms.is_empty() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (idx, p) in &other.terms {
            out.add_term(idx.clone(), p.clone());
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a polynomial function.
    pub fn mul_poly(&self, f: &Poly) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p * f);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p.scale(c));
        }
        out
    }

    /// Exterior product. Index tuples are merged with their permutation sign;
    /// overlapping tuples vanish.
    pub fn wedge(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.same_chart(other)?;
        let mut out = Form::zero(&self.chart, self.degree + other.degree);
        if out.degree > self.chart.dim() {
            return Ok(out);
        }
        for (ia, pa) in &self.terms {
            for (ib, pb) in &other.terms {
                let mut idx: IndexTuple = ia.iter().chain(ib).copied().collect();
                if let Some(positive) = normalize(&mut idx) {
                    let p = pa * pb;
                    out.add_term(idx, if positive { p } else { -p });
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative `d(p dx_I) = Σ_k ∂_k p dx_k ∧ dx_I`.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(&self.chart, self.degree + 1);
        if out.degree > self.chart.dim() {
            return out;
        }
        for (idx, p) in &self.terms {
            for k in 0..self.chart.dim() {
                let pos = match idx.binary_search(&k) {
                    Ok(_) => continue,
                    Err(pos) => pos,
                };
                let dp = p.partial(k);
                if dp.is_zero() {
                    continue;
                }
                let mut merged = idx.clone();
                merged.insert(pos, k);
                // moving dx_k past `pos` smaller differentials
                out.add_term(merged, if pos % 2 == 0 { dp } else { -dp });
            }
        }
        out
    }

    /// Contraction with the coordinate vector field `∂/∂x_axis`.
    ///
    /// Removing the index in position `j` of an ascending tuple contributes
    /// the sign `(-1)^j`. A 0-form contracts to the zero 0-form.
    pub fn interior(&self, field: CoordVectorField) -> Result<Form, ExteriorError> {
        if field.axis >= self.chart.dim() {
            return Err(ExteriorError::AxisOutOfRange {
                axis: field.axis,
                dim: self.chart.dim(),
            });
        }
        if self.degree == 0 {
            return Ok(Form::zero(&self.chart, 0));
        }
        let mut out = Form::zero(&self.chart, self.degree - 1);
        for (idx, p) in &self.terms {
            if let Ok(j) = idx.binary_search(&field.axis) {
                let mut rest = idx.clone();
                rest.remove(j);
                out.add_term(rest, if j % 2 == 0 { p.clone() } else { -p });
            }
        }
        Ok(out)
    }

    /// Integral of a constant-coefficient 2-form over the coordinate face
    /// spanned by `axes`, oriented in the order given.
    ///
    /// Both axes must be periodic; the face is one period in each.
    pub fn integrate_over_face(&self, axes: (usize, usize)) -> Result<Rational, ExteriorError> {
        let (i, j) = axes;
        let dim = self.chart.dim();
        for a in [i, j] {
            if a >= dim {
                return Err(ExteriorError::AxisOutOfRange { axis: a, dim });
            }
            if !self.chart.variable(a).periodic {
                return Err(ExteriorError::NotPeriodic(
                    self.chart.variable(a).name.clone(),
                ));
            }
        }
        if self.degree != 2 {
            return Err(ExteriorError::UnsupportedIntegrand(format!(
                "expected a 2-form, got degree {}",
                self.degree
            )));
        }
        let coeff = self.coefficient(&[i, j]);
        let c = coeff.as_constant().ok_or_else(|| {
            let names = self.chart.names();
            ExteriorError::UnsupportedIntegrand(format!(
                "coefficient {} on d{}^d{} is not constant",
                coeff.display_with(&names),
                names[i],
                names[j]
            ))
        })?;
        let area = period_as_rational(self.chart.variable(i).width())
            * period_as_rational(self.chart.variable(j).width());
        Ok(c * area)
    }

    pub fn to_doc(&self) -> FormDoc {
        FormDoc {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(idx, p)| FormTermDoc {
                    indices: idx.clone(),
                    poly: p.to_doc(),
                })
                .collect(),
        }
    }

    pub fn from_doc(chart: &Arc<Chart>, doc: &FormDoc) -> Result<Form, ExteriorError> {
        let mut out = Form::zero(chart, doc.degree);
        for t in &doc.terms {
            if t.indices.len() != doc.degree {
                return Err(ExteriorError::Malformed("index tuple length"));
            }
            if t.indices.iter().any(|&i| i >= chart.dim()) {
                return Err(ExteriorError::Malformed("index out of range"));
            }
            let p = Poly::from_doc(chart.dim(), &t.poly)?;
            let term = Form::monomial(chart, &t.indices, p);
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }
}

fn period_as_rational(w: f64) -> Rational {
    if w == 1.0 {
        Rational::one()
    } else {
        Rational::from_float(w).unwrap_or_else(Rational::zero)
    }
}

/// Coordinate vector field `∂/∂x_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordVectorField {
    pub axis: usize,
}

impl CoordVectorField {
    pub fn new(axis: usize) -> Self {
        CoordVectorField { axis }
    }
}

/// Serialized form: `{"degree": k, "terms": [{"indices": [...], "poly": [...]}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormDoc {
    pub degree: usize,
    pub terms: Vec<FormTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormTermDoc {
    pub indices: Vec<usize>,
    pub poly: Vec<TermDoc>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl Add for &Form {
    type Output = Form;
    /// Panics on chart or degree mismatch; use [`Form::checked_add`] to
    /// handle that as an error.
    fn add(self, rhs: &Form) -> Form {
        self.checked_add(rhs).expect("form addition")
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(&-Rational::one())
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self + &(-rhs)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.chart.names();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, p)| {
                let basis = idx
                    .iter()
                    .map(|&i| format!("d{}", names[i]))
                    .collect::<Vec<_>>()
                    .join("^");
                let coeff = p.display_with(&names);
                match (basis.is_empty(), p.num_terms()) {
                    (true, _) => coeff,
                    (false, 1) => format!("{coeff} {basis}"),
                    (false, _) => format!("({coeff}) {basis}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
