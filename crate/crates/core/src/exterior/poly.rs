//! Exact multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ExteriorError, Rational};

/// Exponent vector, one entry per chart variable.
pub type Exponents = Vec<u32>;

/// Polynomial over `nvars` variables with exact rational coefficients.
///
/// Zero coefficients are never stored, so the zero polynomial is the empty
/// term map and structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(c.into()))
    }

    /// The coordinate function of variable `index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range {nvars}");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Self::monomial(nvars, exps, Rational::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// `Some(c)` when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Indices of the variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Exact partial derivative with respect to variable `index`.
    pub fn partial(&self, index: usize) -> Self {
        assert!(index < self.nvars, "variable index out of range");
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[index];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[index] = k - 1;
            out.add_term(e2, c * Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    /// Content: the positive rational `c` such that `self / c` has coprime
    /// integer coefficients and a positive leading coefficient, with sign
    /// carried along so that `self / content` has positive leading term.
    pub fn content(&self) -> Option<Rational> {
        let (_, lead) = self.terms.iter().next_back()?;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_integer::Integer::gcd(&num_gcd, c.numer());
            den_lcm = num_integer::Integer::lcm(&den_lcm, c.denom());
        }
        let g = Rational::new(num_gcd, den_lcm);
        Some(if lead.is_negative() { -g } else { g })
    }

    /// Evaluates at a floating-point point.
    ///
    /// Coefficients are rounded once to `f64`; powers are accumulated per
    /// variable so each monomial costs one multiplication per variable.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExteriorError> {
        if point.len() != self.nvars {
            return Err(ExteriorError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    fn eval_unchecked(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let coeff = rational_to_f64(c);
                e.iter()
                    .zip(point)
                    .fold(coeff, |acc, (&k, &x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational, ExteriorError> {
        if point.len() != self.nvars {
            return Err(ExteriorError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (&k, x) in e.iter().zip(point) {
                if k > 0 {
                    m *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Definite integral in variable `index` over `[lo, hi]`; the result no
    /// longer depends on that variable.
    pub fn integrate_var(&self, index: usize, lo: &Rational, hi: &Rational) -> Self {
        assert!(index < self.nvars, "variable index out of range");
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[index] as usize + 1;
            let span = num_traits::pow(hi.clone(), k) - num_traits::pow(lo.clone(), k);
            let mut e2 = e.clone();
            e2[index] = 0;
            out.add_term(e2, c * span / Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    /// Lowers the polynomial to a form suitable for tight evaluation loops.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), rational_to_f64(c)))
                .collect(),
        }
    }

    fn combine(&self, other: &Poly, sign: bool) -> Poly {
        assert_eq!(self.nvars, other.nvars, "polynomial variable count");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), if sign { c.clone() } else { -c });
        }
        out
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Floating-point snapshot of a [`Poly`] for hot loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Exponents, f64)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Caller guarantees `point.len() == nvars`.
    #[inline]
    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (&k, &x) in e.iter().zip(point) {
                if k > 0 {
                    m *= x.powi(k as i32);
                }
            }
            acc += m;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.combine(rhs, true)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.combine(rhs, false)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial variable count");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// Pretty printer with default variable names `v0, v1, ...`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

impl Poly {
    /// Renders with the given variable names, highest-degree terms first.
    pub fn display_with(&self, names: &[impl AsRef<str>]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    let n = names
                        .get(j)
                        .map(|s| s.as_ref().to_string())
                        .unwrap_or_else(|| format!("v{j}"));
                    if k == 1 {
                        n
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// JSON term of a polynomial: `{"exps": [...], "num": n, "den": d}`.
///
/// Numerator and denominator are emitted as JSON integers when they fit in
/// an `i64` and as decimal strings otherwise.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDoc {
    pub exps: Vec<u32>,
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(n.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Poly {
    pub fn to_doc(&self) -> Vec<TermDoc> {
        self.terms
            .iter()
            .map(|(e, c)| TermDoc {
                exps: e.clone(),
                num: int_to_json(c.numer()),
                den: int_to_json(c.denom()),
            })
            .collect()
    }

    pub fn from_doc(nvars: usize, doc: &[TermDoc]) -> Result<Self, ExteriorError> {
        let mut terms = Vec::with_capacity(doc.len());
        for t in doc {
            if t.exps.len() != nvars {
                return Err(ExteriorError::DimensionMismatch {
                    expected: nvars,
                    got: t.exps.len(),
                });
            }
            let num = int_from_json(&t.num).ok_or(ExteriorError::Malformed("numerator"))?;
            let den = int_from_json(&t.den).ok_or(ExteriorError::Malformed("denominator"))?;
            if den.is_zero() {
                return Err(ExteriorError::Malformed("zero denominator"));
            }
            terms.push((t.exps.clone(), Rational::new(num, den)));
        }
        Ok(Self::from_terms(nvars, terms))
    }
}
