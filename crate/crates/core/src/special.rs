//! Scalar special functions used by the closed form.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this magnitude Si is summed from its Maclaurin series; above it the
/// continued fraction for E₁(ix) converges quickly.
const SI_SERIES_LIMIT: f64 = 4.0;

/// Sine integral Si(x) = ∫₀ˣ sin(t)/t dt.
pub fn sine_integral(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::invalid("sine integral of NaN"));
    }
    if x.is_infinite() {
        return Ok(std::f64::consts::FRAC_PI_2.copysign(x));
    }
    let t = x.abs();
    let value = if t <= SI_SERIES_LIMIT {
        si_series(t)
    } else {
        si_continued_fraction(t)
    };
    Ok(value.copysign(x))
}

fn si_series(t: f64) -> f64 {
    // Σ (-1)^k t^(2k+1) / ((2k+1)(2k+1)!)
    let t2 = t * t;
    let mut term = t; // t^(2k+1)/(2k+1)!
    let mut sum = t;
    let mut k = 0u32;
    loop {
        k += 1;
        let n = f64::from(2 * k);
        term *= -t2 / (n * (n + 1.0));
        let contrib = term / (n + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() || k > 60 {
            break;
        }
    }
    sum
}

fn si_continued_fraction(t: f64) -> f64 {
    // Modified Lentz evaluation of E₁(it); Si(t) = π/2 + Im(e^(-it) h).
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..200 {
        let a = -f64::from((i - 1) * (i - 1));
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    let h = Complex64::new(t.cos(), -t.sin()) * h;
    std::f64::consts::FRAC_PI_2 + h.im
}

/// Harmonic number H(m) = Σ_{k=1}^{m} 1/k, with H(0) = 0.
pub fn harmonic_number(m: usize) -> f64 {
    // Summing smallest terms first keeps the rounding error minimal.
    (1..=m).rev().map(|k| 1.0 / k as f64).sum()
}

/// Inverse hyperbolic sine, switching to ln(2|x|) for very large arguments.
pub fn asinh(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 1e8 {
        // The dropped term is 1/(4x²), below 1e-16 relative here.
        (std::f64::consts::LN_2 + ax.ln()).copysign(x)
    } else {
        x.asinh()
    }
}
