//! Modulation-format correction factors applied on top of the GN closed form.
//!
//! The factors are empirical power laws in the roll-off, the format constant
//! Φ, the symbol rate and the dispersion accumulated before the current span.
//! Their 24 coefficients were fitted with the symbol rate in GBaud and the
//! accumulated dispersion in ps²; [`FIT_RATE_UNIT`] and [`FIT_DISPERSION_UNIT`]
//! carry that convention.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::cff::effective_beta2_xci;
use crate::error::{Error, Result};
use crate::link_model::{Channel, LinkScenario, ModulationFormat};

/// Symbol rates enter the power laws in GBaud.
pub const FIT_RATE_UNIT: f64 = 1e9;
/// Accumulated dispersion enters the power laws in ps².
pub const FIT_DISPERSION_UNIT: f64 = 1e-24;

/// Best-fit coefficient vector a₁ … a₂₄.
pub const FITTED_COEFFICIENTS: [f64; 24] = [
    -1.6139, 2.6360, 0.9653, -1.36211, 0.84213, -1.02231, 5.38270, 3.77720e-3, -1.08013, 1.91066,
    0.88153, -2.66093, 1.4050, -1.11174, 7.3518e-3, 2.60510e8, 2.24475e3, -3.02058, -19.4215,
    0.847, -28.04338, 1.52887, -1.42818, 1.91285,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionCoefficients {
    a: [f64; 24],
}

impl Default for CorrectionCoefficients {
    fn default() -> Self {
        CorrectionCoefficients {
            a: FITTED_COEFFICIENTS,
        }
    }
}

impl CorrectionCoefficients {
    pub fn new(a: [f64; 24]) -> Result<Self> {
        if let Some(i) = a.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "coefficient a{} is not finite",
                i + 1
            )));
        }
        Ok(CorrectionCoefficients { a })
    }

    pub fn from_slice(a: &[f64]) -> Result<Self> {
        let arr: [f64; 24] = a.try_into().map_err(|_| {
            Error::invalid(format!("expected exactly 24 coefficients, got {}", a.len()))
        })?;
        Self::new(arr)
    }

    /// Parses a flat JSON array of 24 finite numbers.
    pub fn from_json(text: &str) -> Result<Self> {
        let values: Vec<f64> = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: "$".into(),
            message: e.to_string(),
        })?;
        Self::from_slice(&values)
    }

    /// Coefficient aᵢ, 1-based as in the fitted list.
    pub fn a(&self, i: usize) -> f64 {
        self.a[i - 1]
    }

    pub fn as_array(&self) -> &[f64; 24] {
        &self.a
    }
}

/// Unit-energy constellation of a QAM-type format; `None` for PM-Gaussian.
///
/// 32QAM and 128QAM are the usual cross constellations.
pub fn constellation(format: ModulationFormat) -> Option<Vec<Complex64>> {
    let (side, corner) = match format {
        ModulationFormat::Qpsk => (2, 0),
        ModulationFormat::Qam16 => (4, 0),
        ModulationFormat::Qam32 => (6, 1),
        ModulationFormat::Qam64 => (8, 0),
        ModulationFormat::Qam128 => (12, 2),
        ModulationFormat::Qam256 => (16, 0),
        ModulationFormat::Gaussian => return None,
    };
    let mut points = Vec::with_capacity(side * side);
    for i in 0..side {
        for q in 0..side {
            let ci = i.min(side - 1 - i);
            let cq = q.min(side - 1 - q);
            if ci < corner && cq < corner {
                continue;
            }
            let level = |k: usize| (2 * k) as f64 - (side as f64 - 1.0);
            points.push(Complex64::new(level(i), level(q)));
        }
    }
    let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    let scale = energy.sqrt().recip();
    Some(points.into_iter().map(|p| p * scale).collect())
}

/// Φ = 2 − E[|a|⁴]/E[|a|²]² over equiprobable points.
pub fn phi_from_points(points: &[Complex64]) -> f64 {
    let n = points.len() as f64;
    let m2 = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / n;
    let m4 = points.iter().map(|p| p.norm_sqr().powi(2)).sum::<f64>() / n;
    2.0 - m4 / (m2 * m2)
}

/// Format-dependence constant Φ; 0 for the Gaussian format, 1 for QPSK.
pub fn phi_constant(format: ModulationFormat) -> f64 {
    static TABLE: OnceLock<[f64; 7]> = OnceLock::new();
    let table = TABLE.get_or_init(|| ModulationFormat::ALL.map(phi_uncached));
    let i = ModulationFormat::ALL
        .iter()
        .position(|&f| f == format)
        .unwrap();
    table[i]
}

fn phi_uncached(format: ModulationFormat) -> f64 {
    match format {
        // E|a|⁴ = 2(E|a|²)² for a circular complex Gaussian
        ModulationFormat::Gaussian => 0.0,
        // constant modulus
        ModulationFormat::Qpsk => 1.0,
        f => phi_from_points(&constellation(f).expect("QAM format has a constellation")),
    }
}

/// Σ over spans strictly before `span_index` (0-based) of β̄₂·L, with β̄₂
/// evaluated for a channel at `f_channel` against the scenario's CUT. Pass the
/// CUT frequency itself for the CUT's own accumulated dispersion. Units s².
pub fn accumulated_beta2(scenario: &LinkScenario, span_index: usize, f_channel: f64) -> f64 {
    let f_cut = scenario.cut().center_frequency;
    scenario.spans[..span_index]
        .iter()
        .map(|s| effective_beta2_xci(s, f_cut, f_channel) * s.length)
        .sum()
}

/// base^exp with 0^p = 0 for p > 0; any other non-finite outcome is a domain error.
fn power(base: f64, exp: f64, term: &'static str) -> Result<f64> {
    if base == 0.0 {
        if exp > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::CorrectionDomain {
            term,
            detail: format!("zero raised to non-positive power {exp}"),
        });
    }
    let v = base.powf(exp);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::CorrectionDomain {
            term,
            detail: format!("{base}^{exp} is not finite"),
        })
    }
}

fn check_factor(v: f64, term: &'static str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::CorrectionDomain {
            term,
            detail: format!("correction factor {v} is not a positive finite number"),
        })
    }
}

/// Self-channel correction factor ρ_CUT. `beta2_acc` in s².
pub fn rho_cut(coeffs: &CorrectionCoefficients, cut: &Channel, beta2_acc: f64) -> Result<f64> {
    let a = |i| coeffs.a(i);
    let phi = phi_constant(cut.format);
    let rate = cut.symbol_rate / FIT_RATE_UNIT;
    let acc = beta2_acc.abs() / FIT_DISPERSION_UNIT;

    let rolloff = 1.0 + a(9) * power(cut.rolloff, a(10), "rho_cut roll-off")?;
    let dispersion = 1.0
        + a(14) * power(rate, a(15), "rho_cut symbol rate")?
        + a(16) * power(acc + a(17), a(18), "rho_cut accumulated dispersion")?;
    let format = a(11)
        + a(12) * power(phi, a(13), "rho_cut format")?
        + a(21) * power(phi, a(22), "rho_cut format/dispersion")? * dispersion;
    check_factor(rolloff * format, "rho_cut")
}

/// Cross-channel correction factor ρ_nch for interferer `nch`. `beta2_acc` in s².
pub fn rho_nch(
    coeffs: &CorrectionCoefficients,
    cut: &Channel,
    nch: &Channel,
    beta2_acc: f64,
) -> Result<f64> {
    let a = |i| coeffs.a(i);
    let phi = phi_constant(nch.format);
    let acc = beta2_acc.abs() / FIT_DISPERSION_UNIT;

    let own_rolloff = 1.0 + a(23) * power(nch.rolloff, a(24), "rho_nch roll-off")?;
    let cut_rolloff = 1.0 + a(1) * power(cut.rolloff, a(2), "rho_nch CUT roll-off")?;
    let format = a(3)
        + a(4) * power(phi, a(5), "rho_nch format")?
        + a(19)
            * power(phi, a(20), "rho_nch format/dispersion")?
            * (1.0 + a(6) * power(acc + a(7), a(8), "rho_nch accumulated dispersion")?);
    check_factor(own_rolloff * cut_rolloff * format, "rho_nch")
}
