//! Numerical GN-model reference for the closed form.
//!
//! Integrates G_NLI(f) = (16/27) ∬ γ² G(f₁)G(f₂)G(f₁+f₂−f)·|LK(f₁,f₂,f)|² df₁df₂
//! with the lumped-amplification link kernel, island by island over the
//! rectangular channel spectra. Inside an island the dispersion is held at the
//! value for the island's channel pair, so each island is the exact numerical
//! counterpart of one closed-form term.
//!
//! This module deliberately shares nothing with the closed form beyond the
//! link-model types.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::link_model::{Channel, LinkScenario};
use crate::quad::{integrate, QuadError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrationMode {
    /// Per-span NLI powers add at the receiver.
    Incoherent,
    /// Per-span NLI fields add with the phase of the dispersion accumulated
    /// before each span. Needs the same channel grid in every span.
    Coherent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    /// Relative tolerance of each island integral, in (0, 0.1].
    pub tolerance: f64,
    /// Maximum bisection depth of any quadrature segment, ≥ 4.
    pub max_depth: u32,
    pub mode: IntegrationMode,
    /// Also integrate multi-channel islands, which the closed form omits.
    pub include_mci: bool,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            tolerance: 1e-3,
            max_depth: 40,
            mode: IntegrationMode::Incoherent,
            include_mci: false,
        }
    }
}

impl QuadratureSettings {
    pub fn with_mode(mut self, mode: IntegrationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance <= 0.1) {
            return Err(Error::invalid(format!(
                "quadrature tolerance {} outside (0, 0.1]",
                self.tolerance
            )));
        }
        if self.max_depth < 4 {
            return Err(Error::invalid(format!(
                "quadrature depth {} below 4",
                self.max_depth
            )));
        }
        Ok(())
    }
}

/// Oracle NLI PSD at the receiver, split like the closed form. W/Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSplit {
    pub sci: f64,
    /// (comb channel index, contribution) per active interferer.
    pub xci: Vec<(usize, f64)>,
    /// Zero unless multi-channel islands were requested.
    pub mci: f64,
    pub total: f64,
}

pub fn oracle_nli_psd(scenario: &LinkScenario, settings: &QuadratureSettings) -> Result<f64> {
    Ok(oracle_sci_xci_split(scenario, settings)?.total)
}

pub fn oracle_sci_xci_split(
    scenario: &LinkScenario,
    settings: &QuadratureSettings,
) -> Result<OracleSplit> {
    oracle_for_cut(scenario, scenario.cut_index(), settings)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum IslandKind {
    Sci,
    Xci(usize),
    Mci,
}

/// Integration region relative to the CUT frequency: x = f₁ − f, y = f₂ − f,
/// with x ∈ `x`, y ∈ `y` and x + y ∈ `sum`.
#[derive(Clone, Copy, Debug)]
struct Island {
    kind: IslandKind,
    channels: [usize; 3],
    x: (f64, f64),
    y: (f64, f64),
    sum: (f64, f64),
    multiplicity: f64,
}

/// One span's contribution to an island's kernel.
#[derive(Clone, Copy, Debug)]
struct SpanTerm {
    /// (16/27)γ²·G₁G₂G₃·(power transfer to the receiver)
    weight: f64,
    two_alpha: f64,
    length: f64,
    /// e^(−2αL)
    loss: f64,
    /// 4π²β₂ for the island's channel pair, s²/m
    phase_rate: f64,
    /// 4π² Σ_{k<n} β₂⁽ᵏ⁾L⁽ᵏ⁾, s²
    phase_offset: f64,
}

impl SpanTerm {
    /// |ρ|² at x·y = p.
    fn power_kernel(&self, p: f64) -> f64 {
        let b = self.phase_rate * p;
        let num = 1.0 - 2.0 * self.loss * (b * self.length).cos() + self.loss * self.loss;
        num / (self.two_alpha * self.two_alpha + b * b)
    }

    /// ρ·e^(jΦ) at x·y = p.
    fn field_kernel(&self, p: f64) -> Complex64 {
        let b = self.phase_rate * p;
        let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(self.loss, b * self.length);
        let den = Complex64::new(self.two_alpha, -b);
        num / den * Complex64::from_polar(1.0, self.phase_offset * p)
    }
}

fn band(ch: &Channel, f_cut: f64) -> (f64, f64) {
    let lo = ch.center_frequency - 0.5 * ch.symbol_rate - f_cut;
    (lo, lo + ch.symbol_rate)
}

fn islands_for(channels: &[Channel], cut: usize, include_mci: bool) -> Vec<Island> {
    let f = channels[cut].center_frequency;
    let cut_band = band(&channels[cut], f);
    let mut out = vec![Island {
        kind: IslandKind::Sci,
        channels: [cut, cut, cut],
        x: cut_band,
        y: cut_band,
        sum: cut_band,
        multiplicity: 1.0,
    }];
    for (m, ch) in channels.iter().enumerate() {
        if m == cut || !ch.active {
            continue;
        }
        let b = band(ch, f);
        // (f₁, f₂, f₃) ∈ (m, CUT, m) and its mirror (CUT, m, m)
        out.push(Island {
            kind: IslandKind::Xci(m),
            channels: [m, cut, m],
            x: b,
            y: cut_band,
            sum: b,
            multiplicity: 2.0,
        });
    }
    if include_mci {
        let active: Vec<usize> = (0..channels.len())
            .filter(|&i| channels[i].active)
            .collect();
        for &i in &active {
            for &j in &active {
                for &k in &active {
                    let is_sci = i == cut && j == cut && k == cut;
                    let is_xci =
                        (j == cut && i == k && i != cut) || (i == cut && j == k && j != cut);
                    if is_sci || is_xci {
                        continue;
                    }
                    let (bi, bj, bk) = (
                        band(&channels[i], f),
                        band(&channels[j], f),
                        band(&channels[k], f),
                    );
                    if bi.0 + bj.0 >= bk.1 || bi.1 + bj.1 <= bk.0 {
                        continue;
                    }
                    out.push(Island {
                        kind: IslandKind::Mci,
                        channels: [i, j, k],
                        x: bi,
                        y: bj,
                        sum: bk,
                        multiplicity: 1.0,
                    });
                }
            }
        }
    }
    out
}

/// Per-span kernel terms for an island in the given spans (all sharing the
/// island's channel grid).
fn span_terms(
    scenario: &LinkScenario,
    spans: &[usize],
    island: &Island,
    cut: usize,
) -> Vec<SpanTerm> {
    // power transfer from the end of span n to the receiver
    let n_spans = scenario.span_count();
    let mut to_rx = vec![1.0; n_spans];
    for n in (0..n_spans.saturating_sub(1)).rev() {
        let next = &scenario.spans[n + 1];
        to_rx[n] = to_rx[n + 1] * net_gain(scenario, n + 1, cut, next.length);
    }

    let mut offset = 0.0;
    let mut terms = Vec::with_capacity(spans.len());
    for &n in spans {
        let span = &scenario.spans[n];
        let comb = &scenario.combs[n];
        let [i, j, k] = island.channels;
        let (ci, cj) = (&comb.channels[i], &comb.channels[j]);
        let beta = span.beta2
            + PI * span.beta3
                * (ci.center_frequency + cj.center_frequency - 2.0 * span.ref_frequency);
        let active = [i, j, k].iter().all(|&c| comb.channels[c].active);
        if active && span.gamma > 0.0 {
            let g = |c: usize| comb.channels[c].launch_power / comb.channels[c].symbol_rate;
            let weight = 16.0 / 27.0
                * span.gamma
                * span.gamma
                * g(i)
                * g(j)
                * g(k)
                * net_gain(scenario, n, cut, span.length)
                * to_rx[n];
            terms.push(SpanTerm {
                weight,
                two_alpha: 2.0 * span.alpha,
                length: span.length,
                loss: (-2.0 * span.alpha * span.length).exp(),
                phase_rate: 4.0 * PI * PI * beta,
                phase_offset: offset,
            });
        }
        offset += 4.0 * PI * PI * beta * span.length;
    }
    terms
}

/// Γ·e^(−2αL) of span `n` at the CUT.
fn net_gain(scenario: &LinkScenario, n: usize, cut: usize, length: f64) -> f64 {
    use crate::link_model::Termination;
    let span = &scenario.spans[n];
    match &span.termination {
        Termination::Transparent => 1.0,
        Termination::PerChannel(g) => g[cut] * (-2.0 * span.alpha * length).exp(),
    }
}

fn integrate_island(
    island: &Island,
    terms: &[SpanTerm],
    coherent: bool,
    settings: &QuadratureSettings,
) -> Result<f64> {
    if terms.is_empty() {
        return Ok(0.0);
    }
    let kernel = |p: f64| -> f64 {
        if coherent && terms.len() > 1 {
            let field: Complex64 = terms
                .iter()
                .map(|t| t.weight.sqrt() * t.field_kernel(p))
                .sum();
            field.norm_sqr()
        } else {
            terms.iter().map(|t| t.weight * t.power_kernel(p)).sum()
        }
    };

    let inner_tol = 0.1 * settings.tolerance;
    let mut inner_failure: Option<QuadError> = None;
    let outer = |y: f64| -> f64 {
        let lo = island.x.0.max(island.sum.0 - y);
        let hi = island.x.1.min(island.sum.1 - y);
        if hi <= lo {
            return 0.0;
        }
        match integrate(
            |x| kernel(x * y),
            lo,
            hi,
            &[0.0],
            inner_tol,
            0.0,
            settings.max_depth,
        ) {
            Ok(r) => r.value,
            Err(e) => {
                inner_failure.get_or_insert(e);
                e.value
            }
        }
    };
    let kinks = [0.0, island.sum.0 - island.x.0, island.sum.1 - island.x.1];
    let result = integrate(
        outer,
        island.y.0,
        island.y.1,
        &kinks,
        settings.tolerance,
        0.0,
        settings.max_depth,
    );
    if let Some(e) = inner_failure {
        return Err(Error::Convergence {
            previous: e.coarse,
            last: e.value,
        });
    }
    match result {
        Ok(r) => Ok(island.multiplicity * r.value),
        Err(e) => Err(Error::Convergence {
            previous: island.multiplicity * e.coarse,
            last: island.multiplicity * e.value,
        }),
    }
}

/// Oracle NLI PSD at the receiver with channel `cut` as the CUT in every span.
pub fn oracle_for_cut(
    scenario: &LinkScenario,
    cut: usize,
    settings: &QuadratureSettings,
) -> Result<OracleSplit> {
    settings.validate()?;
    let n_spans = scenario.span_count();
    let fixed_grid = scenario.has_fixed_grid();
    let coherent = settings.mode == IntegrationMode::Coherent;
    if coherent && !fixed_grid {
        return Err(Error::invalid(
            "coherent oracle needs the same channel grid in every span",
        ));
    }

    // Each job is an island plus the spans integrated together with it.
    let mut jobs: Vec<(Island, Vec<SpanTerm>)> = Vec::new();
    if fixed_grid {
        let all: Vec<usize> = (0..n_spans).collect();
        for island in islands_for(&scenario.combs[0].channels, cut, settings.include_mci) {
            let terms = span_terms(scenario, &all, &island, cut);
            jobs.push((island, terms));
        }
    } else {
        for n in 0..n_spans {
            for island in islands_for(&scenario.combs[n].channels, cut, settings.include_mci) {
                let terms = span_terms(scenario, &[n], &island, cut);
                jobs.push((island, terms));
            }
        }
    }

    let values: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|(island, terms)| integrate_island(island, terms, coherent, settings))
        .collect();

    let mut sci = 0.0;
    let mut xci: Vec<(usize, f64)> = Vec::new();
    let mut mci = 0.0;
    for ((island, _), value) in jobs.iter().zip(values) {
        let v = value?;
        match island.kind {
            IslandKind::Sci => sci += v,
            IslandKind::Xci(m) => match xci.iter_mut().find(|(c, _)| *c == m) {
                Some(entry) => entry.1 += v,
                None => xci.push((m, v)),
            },
            IslandKind::Mci => mci += v,
        }
    }
    xci.sort_by_key(|&(c, _)| c);
    let total = xci.iter().fold(sci, |acc, &(_, v)| acc + v) + mci;
    Ok(OracleSplit {
        sci,
        xci,
        mci,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_model::{
        FiberSpan, FiberType, ModulationFormat, WdmComb, DEFAULT_REF_FREQUENCY,
    };

    const FC: f64 = DEFAULT_REF_FREQUENCY;

    fn ch(offset: f64, rate: f64, power: f64) -> Channel {
        Channel {
            center_frequency: FC + offset,
            symbol_rate: rate,
            rolloff: 0.0,
            format: ModulationFormat::Qam16,
            launch_power: power,
            active: true,
        }
    }

    /// SMF with vanishing dispersion: the kernel is flat at (1−e^(−2αL))²/(4α²).
    fn flat_span() -> FiberSpan {
        let mut s = FiberType::smf().span(100e3).unwrap();
        s.beta2 = 1e-45;
        s.beta3 = 0.0;
        s
    }

    fn flat_kernel(s: &FiberSpan) -> f64 {
        let eta = (-2.0 * s.alpha * s.length).exp();
        (1.0 - eta) * (1.0 - eta) / (4.0 * s.alpha * s.alpha)
    }

    fn tight() -> QuadratureSettings {
        QuadratureSettings {
            tolerance: 1e-8,
            ..Default::default()
        }
    }

    #[test]
    fn flat_kernel_sci_is_hexagon_area() {
        let span = flat_span();
        let (r, p) = (32e9, 1e-3);
        let s = LinkScenario::uniform(span.clone(), WdmComb::new(vec![ch(0.0, r, p)], 0), 5.0, 1);
        let got = oracle_nli_psd(&s, &tight()).unwrap();
        let g = p / r;
        let expected =
            16.0 / 27.0 * span.gamma.powi(2) * g.powi(3) * flat_kernel(&span) * 0.75 * r * r;
        assert!((got / expected - 1.0).abs() < 1e-7, "{got} vs {expected}");
    }

    #[test]
    fn flat_kernel_xci_area() {
        let span = flat_span();
        let (rc, rm, pc, pm) = (32e9, 64e9, 1e-3, 2e-3);
        let comb = WdmComb::new(vec![ch(0.0, rc, pc), ch(100e9, rm, pm)], 0);
        let s = LinkScenario::uniform(span.clone(), comb, 5.0, 1);
        let split = oracle_sci_xci_split(&s, &tight()).unwrap();
        let (gc, gm) = (pc / rc, pm / rm);
        // x-length at fixed y is R_m − |y|; integrated over the CUT band
        let area = rm * rc - rc * rc / 4.0;
        let expected =
            2.0 * 16.0 / 27.0 * span.gamma.powi(2) * gc * gm * gm * flat_kernel(&span) * area;
        assert_eq!(split.xci.len(), 1);
        assert_eq!(split.xci[0].0, 1);
        assert!((split.xci[0].1 / expected - 1.0).abs() < 1e-7);
        assert!((split.total - split.sci - split.xci[0].1).abs() <= 1e-15 * split.total);
    }

    #[test]
    fn coherent_single_span_equals_incoherent() {
        let span = FiberType::smf().span(100e3).unwrap();
        let comb = WdmComb::new(vec![ch(0.0, 32e9, 1e-3), ch(50e9, 32e9, 1e-3)], 0);
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        let inc = oracle_nli_psd(&s, &QuadratureSettings::default()).unwrap();
        let coh = oracle_nli_psd(
            &s,
            &QuadratureSettings::default().with_mode(IntegrationMode::Coherent),
        )
        .unwrap();
        assert_eq!(inc, coh);
    }

    #[test]
    fn in_phase_spans_add_fields() {
        let s = LinkScenario::uniform(
            flat_span(),
            WdmComb::new(vec![ch(0.0, 32e9, 1e-3)], 0),
            5.0,
            4,
        );
        let one = oracle_nli_psd(&s.prefix(1), &tight()).unwrap();
        let inc = oracle_nli_psd(&s, &tight()).unwrap();
        let coh = oracle_nli_psd(&s, &tight().with_mode(IntegrationMode::Coherent)).unwrap();
        assert!((inc / (4.0 * one) - 1.0).abs() < 1e-7);
        assert!((coh / (16.0 * one) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn dispersive_coherent_gain_is_between_n_and_n_squared() {
        let span = FiberType::smf().span(100e3).unwrap();
        let s = LinkScenario::uniform(span, WdmComb::new(vec![ch(0.0, 32e9, 1e-3)], 0), 5.0, 3);
        let inc = oracle_nli_psd(&s, &QuadratureSettings::default()).unwrap();
        let coh = oracle_nli_psd(
            &s,
            &QuadratureSettings::default().with_mode(IntegrationMode::Coherent),
        )
        .unwrap();
        assert!(coh > inc && coh < 3.0 * inc);
    }

    #[test]
    fn mci_only_on_request() {
        let span = FiberType::smf().span(100e3).unwrap();
        let comb = WdmComb::new(
            (0..3)
                .map(|i| ch(i as f64 * 40e9 - 40e9, 32e9, 1e-3))
                .collect(),
            1,
        );
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        let plain = oracle_sci_xci_split(&s, &QuadratureSettings::default()).unwrap();
        assert_eq!(plain.mci, 0.0);
        let settings = QuadratureSettings {
            include_mci: true,
            ..Default::default()
        };
        let full = oracle_sci_xci_split(&s, &settings).unwrap();
        assert!(full.mci > 0.0);
        assert!(full.mci < 0.1 * full.total);
        assert!((full.sci / plain.sci - 1.0).abs() < 1e-12);
    }

    #[test]
    fn settings_are_validated() {
        let s = LinkScenario::uniform(
            flat_span(),
            WdmComb::new(vec![ch(0.0, 32e9, 1e-3)], 0),
            5.0,
            1,
        );
        for bad in [
            QuadratureSettings {
                tolerance: 0.0,
                ..Default::default()
            },
            QuadratureSettings {
                tolerance: 0.2,
                ..Default::default()
            },
            QuadratureSettings {
                max_depth: 3,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                oracle_nli_psd(&s, &bad),
                Err(Error::InvalidInput(_))
            ));
        }
    }

    #[test]
    fn coherent_needs_fixed_grid() {
        let span = FiberType::smf().span(100e3).unwrap();
        let a = WdmComb::new(vec![ch(0.0, 32e9, 1e-3), ch(50e9, 32e9, 1e-3)], 0);
        let mut b = a.clone();
        b.channels[1].active = false;
        let s = LinkScenario::new(vec![span.clone(), span], vec![a, b], vec![5.0, 5.0]);
        let coherent = QuadratureSettings::default().with_mode(IntegrationMode::Coherent);
        assert!(oracle_nli_psd(&s, &coherent).is_err());
        // incoherent handles a changing grid span by span
        let split = oracle_sci_xci_split(&s, &QuadratureSettings::default()).unwrap();
        let first = oracle_sci_xci_split(&s.prefix(1), &QuadratureSettings::default()).unwrap();
        assert_eq!(split.xci, first.xci);
    }

    #[test]
    fn depth_limit_raises_convergence_error() {
        let span = FiberType::smf().span(100e3).unwrap();
        let s = LinkScenario::uniform(span, WdmComb::new(vec![ch(0.0, 64e9, 1e-3)], 0), 5.0, 20);
        let settings = QuadratureSettings {
            tolerance: 1e-9,
            max_depth: 4,
            mode: IntegrationMode::Coherent,
            include_mci: false,
        };
        match oracle_nli_psd(&s, &settings) {
            Err(Error::Convergence { previous, last }) => {
                assert!(previous.is_finite() && last.is_finite())
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn zero_gamma_gives_zero() {
        let mut span = FiberType::smf().span(80e3).unwrap();
        span.gamma = 0.0;
        let comb = WdmComb::new(vec![ch(0.0, 32e9, 1e-3), ch(50e9, 32e9, 1e-3)], 0);
        let s = LinkScenario::uniform(span, comb, 5.0, 2);
        assert_eq!(
            oracle_nli_psd(&s, &QuadratureSettings::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn doubling_psd_scales_by_eight() {
        let span = FiberType::smf().span(100e3).unwrap();
        let comb = |p: f64| WdmComb::new(vec![ch(0.0, 32e9, p), ch(50e9, 32e9, 2.0 * p)], 0);
        let a = oracle_nli_psd(
            &LinkScenario::uniform(span.clone(), comb(1e-3), 5.0, 2),
            &tight(),
        )
        .unwrap();
        let b = oracle_nli_psd(&LinkScenario::uniform(span, comb(2e-3), 5.0, 2), &tight()).unwrap();
        assert!((b / (8.0 * a) - 1.0).abs() < 1e-9, "{}", b / a);
    }

    #[test]
    fn symmetric_interferers_contribute_equally_without_slope() {
        let mut span = FiberType::smf().span(100e3).unwrap();
        span.beta3 = 0.0;
        let comb = WdmComb::new(
            vec![
                ch(-75e9, 64e9, 1e-3),
                ch(0.0, 32e9, 1e-3),
                ch(75e9, 64e9, 1e-3),
            ],
            1,
        );
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        let split = oracle_sci_xci_split(&s, &tight()).unwrap();
        assert_eq!(split.xci.len(), 2);
        assert!((split.xci[0].1 / split.xci[1].1 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn cut_only_comb_has_no_xci() {
        let s = LinkScenario::uniform(
            flat_span(),
            WdmComb::new(vec![ch(0.0, 32e9, 1e-3)], 0),
            5.0,
            1,
        );
        let split = oracle_sci_xci_split(&s, &QuadratureSettings::default()).unwrap();
        assert!(split.xci.is_empty());
        assert_eq!(split.total, split.sci);
    }
}
