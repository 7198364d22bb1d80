//! Activation functions and their Taylor coefficients around zero.
//!
//! Derivatives at zero are computed from closed-form recurrences, not numeric
//! differentiation: the n-th derivatives of tanh and sigmoid are polynomials
//! in the function value itself, and softplus derivatives are sigmoid
//! derivatives shifted down one order. Finite differences appear only as a
//! test oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest Taylor truncation order accepted by the transform. Beyond this,
/// factorial scaling starts to dominate the recurrence precision.
pub const MAX_TAYLOR_ORDER: usize = 30;

/// A supported activation function. All of these are smooth at 0, which the
/// expansion requires; ReLU is deliberately absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationKind {
    Tanh,
    Sigmoid,
    Softplus,
    Linear,
}

impl ActivationKind {
    /// Evaluate the activation at `x`.
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Sigmoid => sigmoid(x),
            // ln(1 + e^x), written to avoid overflow for large |x|
            ActivationKind::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
            ActivationKind::Linear => x,
        }
    }

    /// First derivative at pre-activation `z`, given the already computed
    /// activation value `a = apply(z)`.
    pub fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            ActivationKind::Tanh => 1.0 - a * a,
            ActivationKind::Sigmoid => a * (1.0 - a),
            ActivationKind::Softplus => sigmoid(z),
            ActivationKind::Linear => 1.0,
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, ActivationKind::Linear)
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Softplus => "softplus",
            ActivationKind::Linear => "linear",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(ActivationKind::Tanh),
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "softplus" => Ok(ActivationKind::Softplus),
            "linear" => Ok(ActivationKind::Linear),
            other => Err(Error::UnsupportedActivation {
                name: other.to_string(),
            }),
        }
    }
}

/// Maclaurin coefficients of an activation: `coeffs[n] = g⁽ⁿ⁾(0) / n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCoefficients {
    pub activation: ActivationKind,
    pub order: usize,
    pub coeffs: Vec<f64>,
}

impl TaylorCoefficients {
    /// Evaluate the truncated series at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Exact n-th derivative of the activation at zero.
pub fn derivative_at_zero(act: ActivationKind, n: usize) -> f64 {
    match act {
        ActivationKind::Linear => {
            if n == 1 {
                1.0
            } else {
                0.0
            }
        }
        ActivationKind::Tanh => tanh_derivatives_at_zero(n)[n],
        ActivationKind::Sigmoid => sigmoid_derivatives_at_zero(n)[n],
        ActivationKind::Softplus => {
            if n == 0 {
                std::f64::consts::LN_2
            } else {
                sigmoid_derivatives_at_zero(n - 1)[n - 1]
            }
        }
    }
}

/// Coefficients `g⁽ⁿ⁾(0)/n!` for n = 0..=q.
pub fn taylor_coefficients(act: ActivationKind, q: usize) -> TaylorCoefficients {
    let derivs: Vec<f64> = match act {
        ActivationKind::Linear => (0..=q).map(|n| if n == 1 { 1.0 } else { 0.0 }).collect(),
        ActivationKind::Tanh => tanh_derivatives_at_zero(q),
        ActivationKind::Sigmoid => sigmoid_derivatives_at_zero(q),
        ActivationKind::Softplus => {
            let mut d = vec![std::f64::consts::LN_2];
            if q >= 1 {
                d.extend(sigmoid_derivatives_at_zero(q - 1));
            }
            d
        }
    };
    let mut factorial = 1.0;
    let coeffs = derivs
        .into_iter()
        .enumerate()
        .map(|(n, d)| {
            if n > 0 {
                factorial *= n as f64;
            }
            d / factorial
        })
        .collect();
    TaylorCoefficients {
        activation: act,
        order: q,
        coeffs,
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// tanh⁽ⁿ⁾ expressed as a polynomial in y = tanh(x): starting from p₀(y) = y,
/// p_{k+1}(y) = p_k'(y)·(1 − y²). Returns p_n evaluated at y = tanh(0) = 0
/// for every n = 0..=q. The parity of each p_k keeps even-order derivatives
/// exactly zero.
fn tanh_derivatives_at_zero(q: usize) -> Vec<f64> {
    derivatives_via_recurrence(q, &[0.0, 1.0], &[1.0, 0.0, -1.0], 0.0)
}

/// sigmoid⁽ⁿ⁾ as a polynomial in s = σ(x): p₀(s) = s,
/// p_{k+1}(s) = p_k'(s)·(s − s²), evaluated at s = σ(0) = 1/2.
fn sigmoid_derivatives_at_zero(q: usize) -> Vec<f64> {
    derivatives_via_recurrence(q, &[0.0, 1.0], &[0.0, 1.0, -1.0], 0.5)
}

/// Shared recurrence: p₀ = `start`, p_{k+1} = p_k' · `inner`; each p_k is
/// evaluated at `point`. `inner` is the derivative of the substitution
/// variable with respect to x.
fn derivatives_via_recurrence(q: usize, start: &[f64], inner: &[f64], point: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(q + 1);
    let mut poly = start.to_vec();
    out.push(poly_eval(&poly, point));
    for _ in 0..q {
        poly = poly_mul(&poly_derivative(&poly), inner);
        out.push(poly_eval(&poly, point));
    }
    out
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}
