//! Fractional derivatives at zero of functions on `(0, ∞)`:
//!
//! ```text
//! h^(q)(0) = Γ(−q)⁻¹ [ ∫₀¹ t^{−1−q} (h(t) − Σ_{k≤m} h_k t^k/k!) dt
//!                     + ∫₁^∞ t^{−1−q} h(t) dt
//!                     + Σ_{k≤m} h_k / (k! (k − q)) ]
//! ```
//!
//! with `h_k = h^{(k)}(0)`, valid for `−1 < q < m + 1`, `q ∉ {0, …, m}`.

use statrs::function::gamma::gamma;

use super::quadrature::integrate_adaptive;
use crate::error::{Error, Result};

const TAIL_CUTOFF: f64 = 1e-14;
const TAIL_LIMIT: f64 = 1e12;
const INTEGER_TOL: f64 = 1e-12;
const DELTA: f64 = 1e-3;

/// `h` together with its Taylor data at 0.
pub struct FractionalDerivInput<F> {
    pub h: F,
    /// `h^{(k)}(0)` for `k = 0..=m`.
    pub taylor: Vec<f64>,
    /// `h` vanishes beyond this point (`∞` when unknown).
    pub support_end: f64,
}

impl<F: Fn(f64) -> f64> FractionalDerivInput<F> {
    pub fn new(h: F, taylor: Vec<f64>) -> Self {
        Self {
            h,
            taylor,
            support_end: f64::INFINITY,
        }
    }

    pub fn with_support_end(mut self, end: f64) -> Self {
        self.support_end = end;
        self
    }

    /// Smoothness order `m`.
    pub fn order(&self) -> usize {
        self.taylor.len().saturating_sub(1)
    }

    fn taylor_poly(&self, t: f64) -> f64 {
        let mut term = 1.0;
        let mut s = 0.0;
        for (k, hk) in self.taylor.iter().enumerate() {
            if k > 0 {
                term *= t / k as f64;
            }
            s += hk * term;
        }
        s
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `h^(q)(0)`. At `q ∈ {0, …, m}` the formula is singular and the classical
/// value `(−1)^k h^{(k)}(0)` has to be used instead.
pub fn fractional_derivative<F: Fn(f64) -> f64>(input: &FractionalDerivInput<F>, q: f64) -> Result<f64> {
    if input.taylor.is_empty() || input.taylor.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("Taylor data must be finite and non-empty".into()));
    }
    let m = input.order();
    let upper = (m + 1) as f64;
    if !(q > -1.0 && q < upper) {
        return Err(Error::OrderOutOfRange { q, upper });
    }
    let k = q.round();
    if k >= 0.0 && (q - k).abs() < INTEGER_TOL {
        return Err(Error::ExcludedInteger { q });
    }
    let h = &input.h;

    // Near 0 the subtracted integrand is lost to cancellation. There the
    // remainder r = h − T_m is fitted as a t^{m+1} + b t^{m+2} from r(δ) and
    // r(2δ) and integrated in closed form.
    let near_end = input.support_end.min(1.0);
    let delta = (near_end / 4.0).min(DELTA);
    let pw = (m + 1) as f64;
    let r = |t: f64| h(t) - input.taylor_poly(t);
    let ra = r(delta) / delta.powf(pw);
    let rb = r(2.0 * delta) / (2.0 * delta).powf(pw);
    let (a, bd) = (2.0 * ra - rb, rb - ra);
    let head = delta.powf(pw - q) * (a / (pw - q) + bd / (pw + 1.0 - q));
    let mut near = head
        + integrate_adaptive(|t| t.powf(-1.0 - q) * r(t), delta, near_end, 1e-15, 1e-13);
    if near_end < 1.0 {
        // h = 0 on [support_end, 1]
        near -= integrate_adaptive(|t| t.powf(-1.0 - q) * input.taylor_poly(t), near_end, 1.0, 1e-15, 1e-13);
    }

    let tail = tail_integral(h, q, input.support_end)?;

    let sum: f64 = input
        .taylor
        .iter()
        .enumerate()
        .map(|(k, hk)| hk / (factorial(k) * (k as f64 - q)))
        .sum();
    Ok((near + tail + sum) / gamma(-q))
}

fn tail_integral(h: &impl Fn(f64) -> f64, q: f64, support_end: f64) -> Result<f64> {
    if support_end <= 1.0 {
        return Ok(0.0);
    }
    let g = |t: f64| t.powf(-1.0 - q) * h(t);
    if support_end.is_finite() {
        return Ok(integrate_adaptive(g, 1.0, support_end, 1e-14, 1e-12));
    }
    let mut total = 0.0;
    let mut a = 1.0;
    loop {
        let b = 2.0 * a;
        let piece = integrate_adaptive(g, a, b, 1e-16, 1e-12);
        total += piece;
        if g(b).abs() < TAIL_CUTOFF && piece.abs() < TAIL_CUTOFF {
            return Ok(total);
        }
        if b > TAIL_LIMIT {
            return Err(Error::DivergentTail);
        }
        a = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_input() -> FractionalDerivInput<fn(f64) -> f64> {
        FractionalDerivInput::new(|t: f64| (-t).exp(), vec![1.0, -1.0, 1.0])
    }

    #[test]
    fn exponential_has_unit_derivatives() {
        let inp = exp_input();
        for q in [-0.5, 0.5, 1.5, 2.5] {
            let v = fractional_derivative(&inp, q).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "q = {q}: {v}");
        }
    }

    #[test]
    fn integer_orders_are_rejected() {
        let inp = exp_input();
        assert!(matches!(fractional_derivative(&inp, 1.0), Err(Error::ExcludedInteger { .. })));
        assert!(matches!(fractional_derivative(&inp, 0.0), Err(Error::ExcludedInteger { .. })));
        assert!(matches!(fractional_derivative(&inp, 3.0), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(fractional_derivative(&inp, -1.0), Err(Error::OrderOutOfRange { .. })));
    }

    #[test]
    fn approaches_classical_value() {
        // h(t) = e^{−2t}: (−1)^k h^(k)(0) = 2^k
        let inp = FractionalDerivInput::new(|t: f64| (-2.0 * t).exp(), vec![1.0, -2.0, 4.0]);
        for k in [1.0f64, 2.0] {
            let exact = 2f64.powf(k);
            let e2 = (fractional_derivative(&inp, k + 1e-2).unwrap() - exact).abs();
            let e3 = (fractional_derivative(&inp, k - 1e-3).unwrap() - exact).abs();
            assert!(e3 < e2 && e3 < 1e-2 * exact, "k = {k}: {e2} {e3}");
        }
    }

    #[test]
    fn compact_support() {
        // h = 1 on [0, 1]: ∫₀¹ t^{−1−q}(1 − 1) + 1/(−q), so h^(q) = −1/(q Γ(−q)) = 1/Γ(1−q)
        let inp = FractionalDerivInput::new(|t: f64| if t <= 1.0 { 1.0 } else { 0.0 }, vec![1.0])
            .with_support_end(1.0);
        let q = 0.5;
        let v = fractional_derivative(&inp, q).unwrap();
        assert!((v - 1.0 / gamma(1.0 - q)).abs() < 1e-12);
    }

    #[test]
    fn non_decaying_tail_is_detected() {
        let inp = FractionalDerivInput::new(|_t: f64| 1.0, vec![1.0]);
        assert!(matches!(fractional_derivative(&inp, -0.5), Err(Error::DivergentTail)));
    }
}
