use serde::Serialize;

/// Tabulated curve: a grid, one primary column, optional error bars and
/// any number of auxiliary columns, plus the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveData {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Option<Vec<f64>>,
    pub extra: Vec<(String, Vec<f64>)>,
    pub params: Vec<(String, String)>,
}

impl CurveData {
    pub fn new(x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            x_label: x_label.into(),
            y_label: y_label.into(),
            x,
            y,
            y_err: None,
            extra: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn with_errors(mut self, e: Vec<f64>) -> Self {
        self.y_err = Some(e);
        self
    }

    pub fn with_column(mut self, name: &str, v: Vec<f64>) -> Self {
        self.extra.push((name.into(), v));
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Column names in output order.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.x_label.clone(), self.y_label.clone()];
        if self.y_err.is_some() {
            h.push(format!("{}_err", self.y_label));
        }
        h.extend(self.extra.iter().map(|(n, _)| n.clone()));
        h
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut r = vec![self.x[i], self.y[i]];
        if let Some(e) = &self.y_err {
            r.push(e[i]);
        }
        r.extend(self.extra.iter().map(|(_, v)| v[i]));
        r
    }

    /// Strictly increasing grid, consistent column lengths, finite entries
    /// (infinite values are allowed in the primary column, where they mark
    /// diverging uncertainties).
    pub fn validate(&self) -> Result<(), String> {
        let n = self.x.len();
        if self.y.len() != n
            || self.y_err.as_ref().is_some_and(|e| e.len() != n)
            || self.extra.iter().any(|(_, v)| v.len() != n)
        {
            return Err("column lengths differ".into());
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("grid is not strictly increasing".into());
        }
        if self.x.iter().any(|v| !v.is_finite()) || self.y.iter().any(|v| v.is_nan()) {
            return Err("non-finite grid or NaN value".into());
        }
        Ok(())
    }
}
