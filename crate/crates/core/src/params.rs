//! Model parameters shared by every solver in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter tuple of the radial problem
///
/// `Δu = λ(ε + (1 − ε)H(u − μ))` in a ball of radius `radius`, `u = u_inf` on the boundary,
/// with mortality rate `eta` entering only the radius dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Consumption rate λ > 0.
    pub lambda: f64,
    /// Quiescent consumption fraction ε > 0, ε ≠ 1.
    pub eps: f64,
    /// Threshold concentration μ > 0.
    pub mu: f64,
    /// Boundary concentration, strictly above `mu`.
    pub u_inf: f64,
    /// Domain radius R > 0.
    pub radius: f64,
    /// Mortality rate η ≥ 0.
    pub eta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            eps: 0.5,
            mu: 0.5,
            u_inf: 1.0,
            radius: 1.0,
            eta: 0.0,
        }
    }
}

impl ModelParams {
    pub fn new(lambda: f64, eps: f64, mu: f64, u_inf: f64, radius: f64, eta: f64) -> Result<Self> {
        let p = Self {
            lambda,
            eps,
            mu,
            u_inf,
            radius,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda", self.lambda),
            ("eps", self.eps),
            ("mu", self.mu),
            ("u_inf", self.u_inf),
            ("radius", self.radius),
            ("eta", self.eta),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in &fields[..5] {
            if *v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.eta < 0.0 {
            return Err(Error::invalid(format!("eta must be non-negative, got {}", self.eta)));
        }
        if self.eps == 1.0 {
            return Err(Error::invalid(
                "eps = 1 removes the threshold switch; no free boundary exists",
            ));
        }
        if self.u_inf <= self.mu {
            return Err(Error::invalid(format!(
                "u_inf ({}) must exceed mu ({})",
                self.u_inf, self.mu
            )));
        }
        Ok(())
    }

    /// `u_inf − mu`, the concentration drop available to the consumption term.
    pub fn drop(&self) -> f64 {
        self.u_inf - self.mu
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}
