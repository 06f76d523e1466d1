use serde::Serialize;

use super::ExteriorError;

/// One coordinate of a chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub periodic: bool,
    /// Half-open sampling interval `[lo, hi)`; for periodic variables this is
    /// one period.
    pub lo: f64,
    pub hi: f64,
}

impl Variable {
    pub fn periodic(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            periodic: true,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn interval(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Variable {
            name: name.into(),
            periodic: false,
            lo,
            hi,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Ordered list of coordinates on which forms live.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chart {
    variables: Vec<Variable>,
}

impl Chart {
    pub fn new(variables: Vec<Variable>) -> Result<Self, ExteriorError> {
        for (i, v) in variables.iter().enumerate() {
            if !(v.lo.is_finite() && v.hi.is_finite() && v.lo < v.hi) {
                return Err(ExteriorError::InvalidChart(format!(
                    "variable {} has empty interval [{}, {})",
                    v.name, v.lo, v.hi
                )));
            }
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(ExteriorError::InvalidChart(format!(
                    "duplicate variable name {}",
                    v.name
                )));
            }
        }
        Ok(Chart { variables })
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.variables[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    /// Product of interval widths: the volume of the sampling box.
    pub fn box_volume(&self) -> f64 {
        self.variables.iter().map(Variable::width).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names() {
        let err = Chart::new(vec![Variable::periodic("x"), Variable::periodic("x")]);
        assert!(matches!(err, Err(ExteriorError::InvalidChart(_))));
    }

    #[test]
    fn rejects_empty_interval() {
        let err = Chart::new(vec![Variable::interval("t", 2.0, 2.0)]);
        assert!(matches!(err, Err(ExteriorError::InvalidChart(_))));
    }

    #[test]
    fn lookup_and_volume() {
        let c = Chart::new(vec![
            Variable::periodic("x"),
            Variable::interval("t", 0.5, 4.5),
        ])
        .unwrap();
        assert_eq!(c.index_of("t"), Some(1));
        assert_eq!(c.index_of("y"), None);
        assert_eq!(c.box_volume(), 4.0);
    }
}
