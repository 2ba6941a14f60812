//! Bessel function of the first kind, order zero.

use std::f64::consts::{FRAC_PI_4, PI};

/// Above this argument the Hankel asymptotic expansion is accurate to rounding.
const ASYMPTOTIC_THRESHOLD: f64 = 25.0;

/// `J₀(x)` to about 1e-15 absolute for all finite `x`.
///
/// For moderate arguments the integral `J₀(x) = (1/2π) ∫₀^{2π} cos(x sin θ) dθ`
/// is evaluated with the periodic trapezoid rule, whose aliasing error is a sum
/// of `J_M(x)` with `M` the node count; `M > e|x|/2 + 40` makes those terms
/// negligible. Large arguments use the asymptotic expansion.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < ASYMPTOTIC_THRESHOLD {
        periodic_trapezoid(x)
    } else {
        asymptotic(x)
    }
}

fn periodic_trapezoid(x: f64) -> f64 {
    // cos(x sin θ) is even about θ = π/2 and θ = π, so a quarter period
    // with half-weighted endpoints carries the whole sum
    let m = 4 * ((1.4 * x) as usize / 4 + 12);
    let quarter = m / 4;
    let step = 2.0 * PI / m as f64;
    let mut sum = 0.5 * (1.0 + (x).cos());
    for k in 1..quarter {
        sum += (x * (step * k as f64).sin()).cos();
    }
    sum / quarter as f64
}

fn asymptotic(x: f64) -> f64 {
    // P and Q series in 1/(8x), truncated once terms stop shrinking
    let y = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1u32..60 {
        let a = (2 * k - 1) as f64;
        term *= a * a * y / k as f64;
        if term >= last {
            break;
        }
        last = term;
        // a_k enters Q for odd k and P for even k, with sign (-1)^ceil(k/2)
        let sign = if k.div_ceil(2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term < 1e-18 {
            break;
        }
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}
