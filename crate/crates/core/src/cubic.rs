//! Real roots of cubic polynomials by Cardano's method.
//!
//! `a x³ + b x² + c x + d` is reduced to the depressed form `z³ + p z + q` with
//! `x = z − b/(3a)`. The discriminant `Δ = q² + (4/27) p³` selects the branch:
//! `Δ > 0` one real root (sum of real cube roots), `Δ = 0` a simple and a double
//! root, `Δ < 0` three real roots (trigonometric form).
//!
//! With this normalization the sign convention is the opposite of the usual
//! `−(4p³ + 27q²)`: positive means a single real root.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for classifying `Δ` as zero.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Slack allowed on the `arccos` argument before it is treated as an error.
const ACOS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Cubic {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let cubic = Self { a, b, c, d };
        cubic.validate()?;
        Ok(cubic)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c, self.d].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(format!("non-finite cubic coefficient in {self:?}")));
        }
        if self.a == 0.0 {
            return Err(Error::invalid("leading coefficient is zero; not a cubic"));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.a * x + self.b) * x + self.c) * x + self.d
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a * x + 2.0 * self.b) * x + self.c
    }

    /// Largest coefficient magnitude, the scale used for residual checks.
    pub fn coefficient_scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Residual of `x` relative to `max|coef| · max(1, |x|)³`.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let m = x.abs().max(1.0);
        self.eval(x).abs() / (self.coefficient_scale() * m * m * m)
    }

    /// Offset `−b/(3a)` mapping depressed roots back to roots of `self`.
    pub fn shift(&self) -> f64 {
        -self.b / (3.0 * self.a)
    }
}

/// `z³ + p z + q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepressedCubic {
    pub p: f64,
    pub q: f64,
}

impl DepressedCubic {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::invalid(format!("non-finite depressed coefficients p={p}, q={q}")));
        }
        Ok(Self { p, q })
    }

    pub fn eval(&self, z: f64) -> f64 {
        (z * z + self.p) * z + self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscriminantBranch {
    /// One real root.
    PositiveDelta,
    /// A repeated root: at most two distinct values.
    ZeroDelta,
    /// Three distinct real roots.
    NegativeDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

/// Real roots in strictly ascending order, each with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub branch: DiscriminantBranch,
    pub delta: f64,
}

impl RootSet {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn distinct_count(&self) -> usize {
        self.roots.len()
    }

    fn shifted(mut self, by: f64) -> Self {
        for r in &mut self.roots {
            r.value += by;
        }
        self
    }
}

/// Removes the quadratic term via `x = z − b/(3a)`.
pub fn depress(c: &Cubic) -> Result<DepressedCubic> {
    c.validate()?;
    let (a, b, cc, d) = (c.a, c.b, c.c, c.d);
    let p = -b * b / (3.0 * a * a) + cc / a;
    let q = (b / (27.0 * a)) * (2.0 * b * b / (a * a) - 9.0 * cc / a) + d / a;
    DepressedCubic::new(p, q)
}

pub fn discriminant(d: &DepressedCubic) -> f64 {
    d.q * d.q + 4.0 / 27.0 * d.p * d.p * d.p
}

/// The `Δ ≥ 0` root `∛((−q+√Δ)/2) + ∛((−q−√Δ)/2)`.
///
/// The larger-magnitude cube root is formed first and the second recovered from
/// `u·v = −p/3`, which is the same sum without the cancellation of the textbook form.
/// Negative `Δ` (rounding noise near a double root) is clamped to zero.
pub fn cardano_single_root(d: &DepressedCubic) -> f64 {
    let delta = discriminant(d).max(0.0);
    let sqrt_delta = delta.sqrt();
    let big = if d.q > 0.0 {
        (-d.q - sqrt_delta) / 2.0
    } else {
        (-d.q + sqrt_delta) / 2.0
    };
    let u = big.cbrt();
    if u == 0.0 {
        return 0.0;
    }
    let v = -d.p / (3.0 * u);
    u + v
}

/// Trigonometric root `2√(−p/3)·cos(arccos((−q/2)√(27/(−p³)))/3 + 2kπ/3)` for `p < 0`.
pub fn trigonometric_root(d: &DepressedCubic, k: u8) -> Result<f64> {
    if d.p >= 0.0 {
        return Err(Error::internal(format!(
            "trigonometric form needs p < 0, got p = {}",
            d.p
        )));
    }
    let arg = clamp_unit((-d.q / 2.0) * (27.0 / (-d.p * d.p * d.p)).sqrt())?;
    let amp = 2.0 * (-d.p / 3.0).sqrt();
    Ok(amp * (arg.acos() / 3.0 + 2.0 * f64::from(k) * PI / 3.0).cos())
}

/// Clamps an `arccos` argument that strays past ±1 by rounding only.
pub(crate) fn clamp_unit(x: f64) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() <= 1.0 + ACOS_SLACK {
        Ok(x.signum())
    } else {
        Err(Error::internal(format!(
            "arccos argument {x} outside [-1, 1] beyond rounding slack"
        )))
    }
}

/// Solves `z³ + p z + q = 0`. `|Δ| ≤ tol·(q² + |p|³)` counts as a repeated root.
pub fn solve_depressed(d: &DepressedCubic, tol: f64) -> Result<RootSet> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let DepressedCubic { p, q } = *d;
    let delta = discriminant(d);
    let scale = q * q + p.abs().powi(3);

    if scale == 0.0 {
        return Ok(RootSet {
            roots: vec![Root {
                value: 0.0,
                multiplicity: 3,
            }],
            branch: DiscriminantBranch::ZeroDelta,
            delta,
        });
    }

    if delta.abs() <= tol * scale {
        let simple = 3.0 * q / p;
        let double = -3.0 * q / (2.0 * p);
        let roots = if (simple - double).abs() <= f64::EPSILON * scale.cbrt().sqrt() * 16.0 {
            vec![Root {
                value: 0.0,
                multiplicity: 3,
            }]
        } else {
            let mut rs = vec![
                Root {
                    value: simple,
                    multiplicity: 1,
                },
                Root {
                    value: double,
                    multiplicity: 2,
                },
            ];
            rs.sort_by(|a, b| a.value.total_cmp(&b.value));
            rs
        };
        return Ok(RootSet {
            roots,
            branch: DiscriminantBranch::ZeroDelta,
            delta,
        });
    }

    if delta > 0.0 {
        return Ok(RootSet {
            roots: vec![Root {
                value: cardano_single_root(d),
                multiplicity: 1,
            }],
            branch: DiscriminantBranch::PositiveDelta,
            delta,
        });
    }

    let mut values = [0.0; 3];
    for (k, slot) in values.iter_mut().enumerate() {
        *slot = trigonometric_root(d, k as u8)?;
    }
    values.sort_by(f64::total_cmp);
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::internal(format!(
            "Δ = {delta} < 0 but roots {values:?} are not distinct"
        )));
    }
    Ok(RootSet {
        roots: values
            .iter()
            .map(|&value| Root {
                value,
                multiplicity: 1,
            })
            .collect(),
        branch: DiscriminantBranch::NegativeDelta,
        delta,
    })
}

/// Real roots of `a x³ + b x² + c x + d`, ascending, via the depressed cubic.
pub fn solve_cubic(c: &Cubic, tol: f64) -> Result<RootSet> {
    let depressed = depress(c)?;
    Ok(solve_depressed(&depressed, tol)?.shifted(c.shift()))
}
