use std::fmt;
use std::sync::Arc;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Upper envelope `ω(r)` of `|f(x) - f(y)|` over `‖x - y‖₂ <= r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    /// `ω(r) = λ · min(r, √d)^α`.
    Holder { lambda: f64, alpha: f64 },
    /// Sampled values; see [`EmpiricalModulus`].
    Empirical(EmpiricalModulus),
}

/// A table of `(r, ω̂(r))` with increasing radii. Being a maximum over
/// finitely many pairs, it under-estimates the true modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalModulus {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl EmpiricalModulus {
    /// Value at the smallest tabulated radius `>= r`. Beyond the table the
    /// last value is scaled by `⌈r / r_max⌉`.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 || self.radii.is_empty() {
            return 0.0;
        }
        match self.radii.iter().position(|&t| t >= r) {
            Some(i) => self.values[i],
            None => {
                let last = self.radii.len() - 1;
                self.values[last] * (r / self.radii[last]).ceil()
            }
        }
    }
}

impl Modulus {
    pub fn lipschitz(lambda: f64) -> Self {
        Modulus::Holder { lambda, alpha: 1.0 }
    }

    pub fn eval(&self, r: f64, d: u32) -> f64 {
        match self {
            Modulus::Holder { lambda, alpha } => {
                if r <= 0.0 {
                    0.0
                } else {
                    lambda * r.min(f64::from(d).sqrt()).powf(*alpha)
                }
            }
            Modulus::Empirical(t) => t.eval(r),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Modulus::Holder { .. })
    }
}

/// A function on `[0, 1]^d` with a declared modulus of continuity.
#[derive(Clone)]
pub struct TargetFunction {
    pub name: String,
    pub d: u32,
    pub modulus: Modulus,
    eval: Evaluator,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("d", &self.d)
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new(
        name: impl Into<String>,
        d: u32,
        modulus: Modulus,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            d,
            modulus,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.eval)
    }

    pub fn omega(&self, r: f64) -> f64 {
        self.modulus.eval(r, self.d)
    }
}
