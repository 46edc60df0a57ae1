//! Utility functions over extracted work, absolute risk aversion, and the
//! moments (X, Y, Z) that fix the qubit expected utility.
//!
//! All families are normalized to `u(0) = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Below this |r| the exponential family collapses to `u(w) = w`.
pub const LINEAR_RATE_CUTOFF: f64 = 1e-9;

/// Anything that maps work to utility.
pub trait Utility {
    fn value(&self, w: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Utility for F {
    fn value(&self, w: f64) -> f64 {
        self(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityFamily {
    Linear,
    /// `u(w) = (1 - e^{-r w}) / r`, constant absolute risk aversion `r`.
    Exponential { r: f64 },
    /// Cubic built to reproduce given (X, Y, Z) at unit gap and q = 1/2.
    Cubic { x: f64, y: f64, z: f64 },
    Polynomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction {
    family: UtilityFamily,
    /// Coefficients of w, w^2, w^3, ... for the polynomial families.
    coeffs: Vec<f64>,
}

impl UtilityFunction {
    pub fn linear() -> Self {
        Self {
            family: UtilityFamily::Linear,
            coeffs: vec![1.0],
        }
    }

    pub fn exponential(r: f64) -> Self {
        if r.abs() < LINEAR_RATE_CUTOFF {
            return Self::linear();
        }
        Self {
            family: UtilityFamily::Exponential { r },
            coeffs: Vec::new(),
        }
    }

    /// `u(w) = c1 w + c2 w^2 + ...`; the constant term is fixed to zero.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self {
            family: UtilityFamily::Polynomial,
            coeffs,
        }
    }

    /// u(w) = (8Z - Y)/6 w + (2X - Y)/2 w^2 + 2(Y - 2Z)/3 w^3.
    ///
    /// For a unit gap and q = 1/2 its moments are exactly (X, Y, Z).
    pub fn cubic_from_xyz(x: f64, y: f64, z: f64) -> Self {
        Self {
            family: UtilityFamily::Cubic { x, y, z },
            coeffs: vec![(8.0 * z - y) / 6.0, (2.0 * x - y) / 2.0, 2.0 * (y - 2.0 * z) / 3.0],
        }
    }

    pub fn family(&self) -> UtilityFamily {
        self.family
    }

    /// Polynomial coefficients (w^1 first); empty for the exponential family.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Constant absolute risk aversion, if the family has one.
    pub fn constant_risk_aversion(&self) -> Option<f64> {
        match self.family {
            UtilityFamily::Linear => Some(0.0),
            UtilityFamily::Exponential { r } => Some(r),
            _ => None,
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        match self.family {
            UtilityFamily::Exponential { r } => -(-r * w).exp_m1() / r,
            _ => self.poly_derivative(w, 0),
        }
    }

    pub fn derivative(&self, w: f64) -> f64 {
        match self.family {
            UtilityFamily::Exponential { r } => (-r * w).exp(),
            _ => self.poly_derivative(w, 1),
        }
    }

    pub fn second_derivative(&self, w: f64) -> f64 {
        match self.family {
            UtilityFamily::Exponential { r } => -r * (-r * w).exp(),
            _ => self.poly_derivative(w, 2),
        }
    }

    // n-th derivative of sum_k c_k w^(k+1).
    fn poly_derivative(&self, w: f64, n: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k + 1 >= n)
            .map(|(k, &c)| {
                let power = k + 1;
                let falling: f64 = (0..n).map(|i| (power - i) as f64).product();
                c * falling * w.powi((power - n) as i32)
            })
            .sum()
    }
}

impl Utility for UtilityFunction {
    fn value(&self, w: f64) -> f64 {
        self.eval(w)
    }
}

impl fmt::Display for UtilityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            UtilityFamily::Linear => write!(f, "linear"),
            UtilityFamily::Exponential { r } => write!(f, "exp:r={r}"),
            UtilityFamily::Cubic { x, y, z } => write!(f, "cubic:X={x},Y={y},Z={z}"),
            UtilityFamily::Polynomial => {
                let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

fn parse_number(token: &str) -> Result<f64> {
    token.trim().parse::<f64>().map_err(|e| Error::Parse {
        token: token.to_string(),
        reason: e.to_string(),
    })
}

/// Parses `key=value` pairs separated by commas.
pub(crate) fn parse_key_values(body: &str) -> Result<Vec<(String, f64)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair.split_once('=').ok_or_else(|| Error::Parse {
                token: pair.to_string(),
                reason: "expected key=value".into(),
            })?;
            Ok((k.trim().to_string(), parse_number(v)?))
        })
        .collect()
}

pub(crate) fn take_key(pairs: &[(String, f64)], key: &str, spec: &str) -> Result<f64> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse {
            token: spec.to_string(),
            reason: format!("missing '{key}'"),
        })
}

pub(crate) fn reject_unknown(pairs: &[(String, f64)], allowed: &[&str]) -> Result<()> {
    match pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(Error::Parse {
            token: k.clone(),
            reason: format!("unknown key, expected one of {allowed:?}"),
        }),
        None => Ok(()),
    }
}

impl FromStr for UtilityFunction {
    type Err = Error;

    /// `linear`, `exp:r=<f>`, `cubic:X=<f>,Y=<f>,Z=<f>`, `poly:c1,c2,c3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "linear" {
            return Ok(Self::linear());
        }
        let (head, body) = s.split_once(':').ok_or_else(|| Error::Parse {
            token: s.to_string(),
            reason: "expected linear, exp:, cubic: or poly:".into(),
        })?;
        match head {
            "exp" => {
                let pairs = parse_key_values(body)?;
                reject_unknown(&pairs, &["r"])?;
                Ok(Self::exponential(take_key(&pairs, "r", s)?))
            }
            "cubic" => {
                let pairs = parse_key_values(body)?;
                reject_unknown(&pairs, &["X", "Y", "Z"])?;
                Ok(Self::cubic_from_xyz(
                    take_key(&pairs, "X", s)?,
                    take_key(&pairs, "Y", s)?,
                    take_key(&pairs, "Z", s)?,
                ))
            }
            "poly" => {
                let coeffs = body
                    .split(',')
                    .map(parse_number)
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.is_empty() {
                    return Err(Error::Parse {
                        token: s.to_string(),
                        reason: "no coefficients".into(),
                    });
                }
                Ok(Self::polynomial(coeffs))
            }
            _ => Err(Error::Parse {
                token: head.to_string(),
                reason: "unknown utility family".into(),
            }),
        }
    }
}

/// Arrow-Pratt coefficient `r_A(w) = -u''(w) / u'(w)`.
pub fn risk_aversion(u: &UtilityFunction, w: f64) -> Result<f64> {
    let d1 = u.derivative(w);
    if d1.abs() < crate::quantum::TOL {
        return Err(Error::ZeroMarginalUtility { w });
    }
    Ok(-u.second_derivative(w) / d1)
}

/// u_o(w) = (u(w) - u(-w)) / 2.
pub fn odd_part<U: Utility + ?Sized>(u: &U, w: f64) -> f64 {
    0.5 * (u.value(w) - u.value(-w))
}

/// Moments controlling the qubit expected utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzMoments {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub q: f64,
    pub gap: f64,
}

/// X = u(gap), Y = 2 u_o(gap), Z = u_o(q gap) + u_o((1 - q) gap).
pub fn xyz_moments<U: Utility + ?Sized>(u: &U, e1: f64, e2: f64, q: f64) -> XyzMoments {
    let gap = e2 - e1;
    XyzMoments {
        x: u.value(gap),
        y: 2.0 * odd_part(u, gap),
        z: odd_part(u, q * gap) + odd_part(u, (1.0 - q) * gap),
        q,
        gap,
    }
}

/// Qubit criterion for an incoherent utility: Z vanishes.
pub fn is_incoherent_utility<U: Utility + ?Sized>(u: &U, e1: f64, e2: f64, q: f64) -> bool {
    xyz_moments(u, e1, e2, q).z.abs() < crate::quantum::TOL
}
