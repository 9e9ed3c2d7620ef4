//! Closed-form GN/EGN estimate of the NLI power spectral density at the CUT.
//!
//! Per span the NLI PSD is a self-channel term plus one cross-channel term per
//! active interferer, each an asinh expression of the effective dispersion at
//! the relevant channel pair. Spans are summed incoherently after propagation
//! to the receiver; span-to-span coherence of the self-channel term is added as
//! a sine-integral correction that grows with the number of spans.

use std::f64::consts::PI;

use crate::egn::{self, CorrectionCoefficients};
use crate::error::{Error, Result};
use crate::link_model::{dispersion_parameter, Channel, FiberSpan, LinkScenario};
use crate::special::{asinh, harmonic_number, sine_integral};

/// |β̄₂| below this (s²/m) makes the closed form diverge.
pub const ZERO_DISPERSION_THRESHOLD: f64 = 1e-32;

/// Below this |D| (ps/(nm·km)) the closed-form approximations lose accuracy.
pub const LOW_DISPERSION_LIMIT: f64 = 1.0;

/// Normalization of the sine integral in the coherence term: its large-argument
/// limit, so that the normalized Si saturates at 1.
pub const SI_SATURATION: f64 = std::f64::consts::FRAC_PI_2;

const NLI_PREFACTOR: f64 = 16.0 / 27.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CorrectionMode {
    /// ρ ≡ 1.
    Gn,
    Egn(CorrectionCoefficients),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CffOptions {
    pub coherence_enabled: bool,
    pub correction_mode: CorrectionMode,
}

impl Default for CffOptions {
    fn default() -> Self {
        CffOptions {
            coherence_enabled: true,
            correction_mode: CorrectionMode::Egn(CorrectionCoefficients::default()),
        }
    }
}

impl CffOptions {
    /// Uncorrected, incoherent GN closed form.
    pub fn gn_incoherent() -> Self {
        CffOptions {
            coherence_enabled: false,
            correction_mode: CorrectionMode::Gn,
        }
    }

    pub fn with_coherence(mut self, on: bool) -> Self {
        self.coherence_enabled = on;
        self
    }

    pub fn with_mode(mut self, mode: CorrectionMode) -> Self {
        self.correction_mode = mode;
        self
    }
}

/// NLI PSD generated in one span at the CUT frequency, referred to the end of
/// that span (after its termination Γ). W/Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanNliBreakdown {
    pub sci: f64,
    /// (comb channel index, contribution) per active interferer.
    pub xci_per_channel: Vec<(usize, f64)>,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowDispersion {
    pub span: usize,
    pub channel: usize,
    /// ps/(nm·km)
    pub dispersion: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkNli {
    /// NLI PSD at the receiver, W/Hz.
    pub psd: f64,
    pub spans: Vec<SpanNliBreakdown>,
    pub low_dispersion: Vec<LowDispersion>,
}

/// β̄₂ seen by the CUT's own spectrum, s²/m.
pub fn effective_beta2_cut(span: &FiberSpan, f_cut: f64) -> f64 {
    span.beta2 + PI * span.beta3 * (2.0 * f_cut - 2.0 * span.ref_frequency)
}

/// β̄₂ for the interaction of the CUT with a channel at `f_nch`, s²/m.
pub fn effective_beta2_xci(span: &FiberSpan, f_cut: f64, f_nch: f64) -> f64 {
    span.beta2 + PI * span.beta3 * (f_nch + f_cut - 2.0 * span.ref_frequency)
}

/// HN(N−1) + (1−N)/N; zero for a single span, positive beyond.
pub fn coherence_bracket(n_span_total: usize) -> f64 {
    if n_span_total == 0 {
        return 0.0;
    }
    let n = n_span_total as f64;
    harmonic_number(n_span_total - 1) + (1.0 - n) / n
}

fn sci_core(
    span: &FiberSpan,
    cut: &Channel,
    n_span_total: usize,
    coherent: bool,
) -> std::result::Result<f64, f64> {
    let b2 = effective_beta2_cut(span, cut.center_frequency);
    if b2.abs() < ZERO_DISPERSION_THRESHOLD {
        return Err(b2);
    }
    let two_alpha = 2.0 * span.alpha;
    let rate = cut.symbol_rate;
    let mut numerator = asinh(0.5 * PI * PI * (b2 / two_alpha).abs() * rate * rate);
    if coherent && n_span_total > 1 {
        let bandwidth = rate;
        let si = sine_integral(PI * PI * b2.abs() * span.length * bandwidth * bandwidth)
            .expect("finite sine-integral argument");
        numerator +=
            2.0 * si / (SI_SATURATION * two_alpha * span.length) * coherence_bracket(n_span_total);
    }
    Ok(numerator / (2.0 * PI * b2.abs() * two_alpha))
}

fn xci_core(span: &FiberSpan, cut: &Channel, nch: &Channel) -> std::result::Result<f64, f64> {
    let b2 = effective_beta2_xci(span, cut.center_frequency, nch.center_frequency);
    if b2.abs() < ZERO_DISPERSION_THRESHOLD {
        return Err(b2);
    }
    let two_alpha = 2.0 * span.alpha;
    let k = PI * PI * (b2 / two_alpha).abs() * cut.symbol_rate;
    let offset = nch.center_frequency - cut.center_frequency;
    let half = 0.5 * nch.symbol_rate;
    let diff = asinh(k * (offset + half)) - asinh(k * (offset - half));
    Ok(diff / (4.0 * PI * b2.abs() * two_alpha))
}

/// Self-channel integral factor I_CUT, in m²·Hz² so that (16/27)γ²Ḡ³·I is a
/// PSD. Zero-dispersion errors carry span/channel 0 at this level.
pub fn sci_term(
    span: &FiberSpan,
    cut: &Channel,
    n_span_total: usize,
    opts: &CffOptions,
) -> Result<f64> {
    sci_core(span, cut, n_span_total, opts.coherence_enabled).map_err(|beta2| {
        Error::ZeroDispersion {
            span: 0,
            channel: 0,
            beta2,
        }
    })
}

/// Cross-channel integral factor I_nch, same normalization as [`sci_term`].
pub fn xci_term(span: &FiberSpan, cut: &Channel, nch: &Channel) -> Result<f64> {
    xci_core(span, cut, nch).map_err(|beta2| Error::ZeroDispersion {
        span: 0,
        channel: 0,
        beta2,
    })
}

/// NLI PSD generated in span `span_index` (0-based). `rho_per_channel` holds one
/// factor per active interferer in comb order.
pub fn span_nli_psd(
    span_index: usize,
    scenario: &LinkScenario,
    rho_cut: f64,
    rho_per_channel: &[f64],
    opts: &CffOptions,
) -> Result<SpanNliBreakdown> {
    let comb = &scenario.combs[span_index];
    let interferers = comb.interferers().count();
    if rho_per_channel.len() != interferers {
        return Err(Error::invalid(format!(
            "{} correction factors for {} interferers",
            rho_per_channel.len(),
            interferers
        )));
    }
    span_breakdown(
        scenario,
        span_index,
        comb.cut_index,
        opts.coherence_enabled,
        rho_cut,
        |k, _| Ok(rho_per_channel[k]),
    )
}

fn span_breakdown<F>(
    scenario: &LinkScenario,
    n: usize,
    cut_index: usize,
    coherent: bool,
    rho_cut: f64,
    mut rho_for: F,
) -> Result<SpanNliBreakdown>
where
    F: FnMut(usize, &Channel) -> Result<f64>,
{
    let span = &scenario.spans[n];
    let comb = &scenario.combs[n];
    let cut = &comb.channels[cut_index];
    let g_cut = cut.psd();
    let prefactor = NLI_PREFACTOR * span.gamma * span.gamma * span.net_gain(cut_index) * g_cut;

    let i_cut = sci_core(span, cut, scenario.span_count(), coherent).map_err(|beta2| {
        Error::ZeroDispersion {
            span: n,
            channel: cut_index,
            beta2,
        }
    })?;
    let sci = prefactor * rho_cut * g_cut * g_cut * i_cut;

    let mut xci = Vec::with_capacity(comb.channels.len());
    let mut k = 0;
    for (i, ch) in comb.channels.iter().enumerate() {
        if i == cut_index || !ch.active {
            continue;
        }
        let i_nch = xci_core(span, cut, ch).map_err(|beta2| Error::ZeroDispersion {
            span: n,
            channel: i,
            beta2,
        })?;
        let rho = rho_for(k, ch)?;
        let g = ch.psd();
        xci.push((i, prefactor * 2.0 * rho * g * g * i_nch));
        k += 1;
    }
    let total = xci.iter().fold(sci, |acc, &(_, v)| acc + v);
    Ok(SpanNliBreakdown {
        sci,
        xci_per_channel: xci,
        total,
    })
}

/// NLI PSD at the receiver for the scenario's CUT.
pub fn link_nli_psd(scenario: &LinkScenario, opts: &CffOptions) -> Result<LinkNli> {
    link_nli_for_cut(scenario, scenario.cut_index(), opts)
}

/// Same as [`link_nli_psd`] with channel `cut_index` treated as the CUT in
/// every span.
pub fn link_nli_for_cut(
    scenario: &LinkScenario,
    cut_index: usize,
    opts: &CffOptions,
) -> Result<LinkNli> {
    let n_spans = scenario.span_count();
    let f_cut = scenario.combs[0].channels[cut_index].center_frequency;

    // Accumulated dispersion before span n for a channel at f:
    // acc_cut[n] + (f − f_cut)·slope[n], with acc_cut the CUT's own sum.
    let mut acc_cut = 0.0;
    let mut slope = 0.0;

    let mut spans = Vec::with_capacity(n_spans);
    let mut low_dispersion = Vec::new();
    for n in 0..n_spans {
        let span = &scenario.spans[n];
        let comb = &scenario.combs[n];
        let cut = &comb.channels[cut_index];

        let d_cut = dispersion_parameter(effective_beta2_cut(span, f_cut), f_cut);
        if d_cut.abs() < LOW_DISPERSION_LIMIT {
            low_dispersion.push(LowDispersion {
                span: n,
                channel: cut_index,
                dispersion: d_cut,
            });
        }
        for (i, ch) in comb.channels.iter().enumerate() {
            if i == cut_index || !ch.active {
                continue;
            }
            let f_mid = 0.5 * (ch.center_frequency + f_cut);
            let d =
                dispersion_parameter(effective_beta2_xci(span, f_cut, ch.center_frequency), f_mid);
            if d.abs() < LOW_DISPERSION_LIMIT {
                low_dispersion.push(LowDispersion {
                    span: n,
                    channel: i,
                    dispersion: d,
                });
            }
        }

        let breakdown = match &opts.correction_mode {
            CorrectionMode::Gn => span_breakdown(
                scenario,
                n,
                cut_index,
                opts.coherence_enabled,
                1.0,
                |_, _| Ok(1.0),
            )?,
            CorrectionMode::Egn(coeffs) => {
                let rho_c = egn::rho_cut(coeffs, cut, acc_cut)?;
                span_breakdown(
                    scenario,
                    n,
                    cut_index,
                    opts.coherence_enabled,
                    rho_c,
                    |_, ch| {
                        let acc = acc_cut + (ch.center_frequency - f_cut) * slope;
                        egn::rho_nch(coeffs, cut, ch, acc)
                    },
                )?
            }
        };
        spans.push(breakdown);

        acc_cut += effective_beta2_cut(span, f_cut) * span.length;
        slope += PI * span.beta3 * span.length;
    }

    // Propagate each span's NLI through the net gain of every later span.
    let mut psd = 0.0;
    let mut trailing = 1.0;
    for n in (0..n_spans).rev() {
        psd += spans[n].total * trailing;
        trailing *= scenario.spans[n].net_gain(cut_index);
    }
    Ok(LinkNli {
        psd,
        spans,
        low_dispersion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_model::{
        dbm_to_watt, FiberType, ModulationFormat, Termination, WdmComb, DEFAULT_REF_FREQUENCY,
    };

    const FC: f64 = DEFAULT_REF_FREQUENCY;

    fn ch(offset: f64, rate: f64, p_dbm: f64, format: ModulationFormat) -> Channel {
        Channel {
            center_frequency: FC + offset,
            symbol_rate: rate,
            rolloff: 0.1,
            format,
            launch_power: dbm_to_watt(p_dbm),
            active: true,
        }
    }

    fn comb5() -> WdmComb {
        let formats = [
            ModulationFormat::Qpsk,
            ModulationFormat::Qam16,
            ModulationFormat::Qam64,
            ModulationFormat::Gaussian,
            ModulationFormat::Qam32,
        ];
        let chans = (0..5)
            .map(|i| {
                ch(
                    (i as f64 - 2.0) * 75e9,
                    [32e9, 64e9][i % 2],
                    i as f64 - 1.0,
                    formats[i],
                )
            })
            .collect();
        WdmComb::new(chans, 2)
    }

    fn smf() -> FiberSpan {
        FiberType::smf().span(100e3).unwrap()
    }

    #[test]
    fn effective_dispersion_with_slope() {
        let b2 = effective_beta2_cut(&smf(), FC + 2.5e12);
        // −21.3 ps²/km + π·0.1452 ps³/km·5 THz
        assert!((b2 / -1.9019e-26 - 1.0).abs() < 1e-4);
        assert_eq!(
            effective_beta2_xci(&smf(), FC + 1e12, FC + 1e12),
            effective_beta2_cut(&smf(), FC + 1e12)
        );
    }

    #[test]
    fn bracket_values() {
        assert_eq!(coherence_bracket(1), 0.0);
        assert_eq!(coherence_bracket(2), 0.5);
        assert!((coherence_bracket(3) - (1.5 - 2.0 / 3.0)).abs() < 1e-15);
        for n in 2..60 {
            assert!(coherence_bracket(n) > coherence_bracket(n - 1));
        }
    }

    #[test]
    fn coherence_is_inert_for_one_span() {
        let s = LinkScenario::uniform(smf(), comb5(), 5.0, 1);
        let on = link_nli_psd(&s, &CffOptions::default()).unwrap();
        let off = link_nli_psd(&s, &CffOptions::default().with_coherence(false)).unwrap();
        assert_eq!(on, off);
    }

    #[test]
    fn coherence_raises_multi_span_nli() {
        let s = LinkScenario::uniform(smf(), comb5(), 5.0, 4);
        let on = link_nli_psd(&s, &CffOptions::gn_incoherent().with_coherence(true))
            .unwrap()
            .psd;
        let off = link_nli_psd(&s, &CffOptions::gn_incoherent()).unwrap().psd;
        assert!(on > off);
    }

    #[test]
    fn xci_symmetric_without_slope() {
        let mut span = smf();
        span.beta3 = 0.0;
        let cut = ch(0.0, 32e9, 0.0, ModulationFormat::Qam16);
        for df in [50e9, 112.5e9, 1e12] {
            let up = xci_term(&span, &cut, &ch(df, 64e9, 0.0, ModulationFormat::Qpsk)).unwrap();
            let down = xci_term(&span, &cut, &ch(-df, 64e9, 0.0, ModulationFormat::Qpsk)).unwrap();
            assert!((up / down - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn xci_vanishes_with_interferer_bandwidth() {
        let span = smf();
        let cut = ch(0.0, 32e9, 0.0, ModulationFormat::Qam16);
        let per_hz = |r: f64| {
            xci_term(&span, &cut, &ch(100e9, r, 0.0, ModulationFormat::Qam16)).unwrap() / r
        };
        // I_nch ∝ R_nch for a narrow interferer
        assert!((per_hz(1e3) / per_hz(1e2) - 1.0).abs() < 1e-6);
        assert!(per_hz(1e2) > 0.0);
    }

    #[test]
    fn cubic_scaling_both_modes() {
        let base = LinkScenario::uniform(smf(), comb5(), 5.0, 3);
        for opts in [CffOptions::gn_incoherent(), CffOptions::default()] {
            let p0 = link_nli_psd(&base, &opts).unwrap().psd;
            for x in [0.5, 2.0, 4.0] {
                let mut s = base.clone();
                for comb in &mut s.combs {
                    for c in &mut comb.channels {
                        c.launch_power *= x;
                    }
                }
                let p = link_nli_psd(&s, &opts).unwrap().psd;
                assert!((p / (p0 * x * x * x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transparent_spans_add() {
        let one = link_nli_psd(
            &LinkScenario::uniform(smf(), comb5(), 5.0, 1),
            &CffOptions::gn_incoherent(),
        )
        .unwrap();
        let seven = link_nli_psd(
            &LinkScenario::uniform(smf(), comb5(), 5.0, 7),
            &CffOptions::gn_incoherent(),
        )
        .unwrap();
        assert!((seven.psd / (7.0 * one.psd) - 1.0).abs() < 1e-13);
        assert_eq!(seven.spans.len(), 7);
    }

    #[test]
    fn span_total_is_sci_plus_xci() {
        let s = LinkScenario::uniform(smf(), comb5(), 5.0, 1);
        let link = link_nli_psd(&s, &CffOptions::default()).unwrap();
        let b = &link.spans[0];
        assert_eq!(
            b.xci_per_channel.iter().map(|x| x.0).collect::<Vec<_>>(),
            vec![0, 1, 3, 4]
        );
        let sum: f64 = b.sci + b.xci_per_channel.iter().map(|x| x.1).sum::<f64>();
        assert!((sum / b.total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn explicit_unit_factors_match_gn() {
        let s = LinkScenario::uniform(smf(), comb5(), 5.0, 1);
        let b = span_nli_psd(0, &s, 1.0, &[1.0; 4], &CffOptions::gn_incoherent()).unwrap();
        assert_eq!(
            b,
            link_nli_psd(&s, &CffOptions::gn_incoherent())
                .unwrap()
                .spans[0]
        );
        assert!(span_nli_psd(0, &s, 1.0, &[1.0; 3], &CffOptions::gn_incoherent()).is_err());
    }

    #[test]
    fn inactive_channels_are_ignored() {
        let mut comb = comb5();
        let full = link_nli_psd(
            &LinkScenario::uniform(smf(), comb.clone(), 5.0, 1),
            &CffOptions::default(),
        )
        .unwrap();
        comb.channels[4].active = false;
        let part = link_nli_psd(
            &LinkScenario::uniform(smf(), comb, 5.0, 1),
            &CffOptions::default(),
        )
        .unwrap();
        assert_eq!(part.spans[0].xci_per_channel.len(), 3);
        assert!(part.psd < full.psd);
    }

    #[test]
    fn later_span_gain_scales_earlier_nli() {
        let comb = comb5();
        let mut second = smf();
        second.termination = Termination::PerChannel(vec![2.0 * second.fiber_loss().recip(); 5]);
        let s = LinkScenario::new(
            vec![smf(), second],
            vec![comb.clone(), comb],
            vec![5.0, 5.0],
        );
        let link = link_nli_psd(&s, &CffOptions::gn_incoherent()).unwrap();
        // span 1 gain is 2×transparent: its own NLI doubles and span 0's NLI is doubled on the way
        let expected = 2.0 * link.spans[0].total + link.spans[1].total;
        assert!((link.psd / expected - 1.0).abs() < 1e-13);
        assert!((link.spans[1].total / link.spans[0].total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_dispersion_is_reported_with_location() {
        let mut span = smf();
        span.beta2 = 0.0;
        span.beta3 = 0.0;
        let s = LinkScenario::new(vec![smf(), span], vec![comb5(), comb5()], vec![5.0, 5.0]);
        match link_nli_psd(&s, &CffOptions::gn_incoherent()) {
            Err(Error::ZeroDispersion { span, channel, .. }) => assert_eq!((span, channel), (1, 2)),
            other => panic!("expected zero-dispersion error, got {other:?}"),
        }
    }

    #[test]
    fn low_dispersion_flagged_for_nzdsf2_high_edge() {
        let span = FiberType::nzdsf2().span(100e3).unwrap();
        let comb = WdmComb::new(
            vec![
                ch(2.45e12, 32e9, 0.0, ModulationFormat::Qpsk),
                ch(2.5e12, 32e9, 0.0, ModulationFormat::Qpsk),
            ],
            1,
        );
        let link = link_nli_psd(
            &LinkScenario::uniform(span, comb, 5.0, 2),
            &CffOptions::default(),
        )
        .unwrap();
        assert!(link
            .low_dispersion
            .iter()
            .any(|w| w.channel == 1 && w.span == 1));
        assert!(link
            .low_dispersion
            .iter()
            .all(|w| w.dispersion.abs() < LOW_DISPERSION_LIMIT));

        let link = link_nli_psd(
            &LinkScenario::uniform(smf(), comb5(), 5.0, 2),
            &CffOptions::default(),
        )
        .unwrap();
        assert!(link.low_dispersion.is_empty());
    }
}
