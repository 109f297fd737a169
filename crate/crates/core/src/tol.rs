/// Relative tolerance with an absolute floor.
///
/// A residual `r` measured against a quantity of magnitude `scale` is accepted
/// when `|r| <= rel * scale + abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
}

impl Tol {
    pub const DEFAULT_REL: f64 = 1e-9;
    pub const DEFAULT_ABS: f64 = 1e-12;

    pub const fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Same relative tolerance, default absolute floor.
    pub const fn relative(rel: f64) -> Self {
        Self {
            rel,
            abs: Self::DEFAULT_ABS,
        }
    }

    pub fn bound(&self, scale: f64) -> f64 {
        self.rel * scale.abs() + self.abs
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual.abs() <= self.bound(scale)
    }
}

impl Default for Tol {
    fn default() -> Self {
        Self::new(Self::DEFAULT_REL, Self::DEFAULT_ABS)
    }
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
