/// Which derivative a finite-difference stencil approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Central difference with the round-off/truncation balanced step
/// `h = max(|x|, 1) eps^{1/3}` (first order) or `eps^{1/4}` (second order).
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, order: DerivOrder) -> f64 {
    let scale = x.abs().max(1.0);
    match order {
        DerivOrder::First => {
            let h = step(x, scale * f64::EPSILON.cbrt());
            (f(x + h) - f(x - h)) / (2.0 * h)
        }
        DerivOrder::Second => {
            let h = step(x, scale * f64::EPSILON.sqrt().sqrt());
            (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
        }
    }
}

/// Second-order one-sided (backward) first derivative; evaluates only at
/// points `<= x`.
pub fn backward_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = step(x, x.abs().max(1.0) * f64::EPSILON.cbrt());
    (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
}

// Snap h so that x + h is exactly representable and (x + h) - x == h.
fn step(x: f64, h: f64) -> f64 {
    (x + h) - x
}
