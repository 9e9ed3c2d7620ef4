//! ASE accumulation, LOGO launch power, nonlinear OSNR and max-reach search.
//!
//! Noise powers are referred to the receiver and measured in a bandwidth equal
//! to the channel symbol rate, for both ASE and NLI.

use crate::cff::{link_nli_for_cut, CffOptions, LowDispersion};
use crate::error::{Error, Result};
use crate::link_model::{
    db_to_linear, linear_to_db, FiberSpan, LinkScenario, ModulationFormat, Termination, WdmComb,
    PLANCK,
};

/// Per-channel result of [`osnr_nl`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRecord {
    pub index: usize,
    /// Hz
    pub center_frequency: f64,
    /// NLI PSD at the receiver, W/Hz
    pub nli_psd: f64,
    /// W, in the symbol-rate bandwidth
    pub p_nli: f64,
    /// W, in the symbol-rate bandwidth
    pub p_ase: f64,
    /// Channel power at the receiver, W
    pub p_ch: f64,
    pub osnr_nl_db: f64,
    /// Spans where this channel (as CUT) or one of its interferers sees |D| < 1 ps/(nm·km).
    pub low_dispersion: Vec<LowDispersion>,
}

impl ChannelRecord {
    pub fn osnr_nl_linear(&self) -> f64 {
        self.p_ch / (self.p_ase + self.p_nli)
    }

    pub fn is_low_dispersion(&self) -> bool {
        !self.low_dispersion.is_empty()
    }

    /// Human-readable warnings, empty when the estimate is within its validity region.
    pub fn warnings(&self) -> Vec<String> {
        self.low_dispersion
            .iter()
            .map(|w| {
                format!(
                    "low dispersion {:.3} ps/(nm km) in span {} (channel {})",
                    w.dispersion, w.span, w.channel
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NliReport {
    pub channels: Vec<ChannelRecord>,
}

impl NliReport {
    pub fn channel(&self, index: usize) -> Option<&ChannelRecord> {
        self.channels.iter().find(|c| c.index == index)
    }
}

/// Amplifier gain of `span` at `channel`: its termination gain, or the span
/// loss when transparent.
fn amplifier_gain(span: &FiberSpan, channel: usize) -> f64 {
    match &span.termination {
        Termination::Transparent => span.fiber_loss().recip(),
        Termination::PerChannel(_) => span.termination_gain(channel),
    }
}

/// ASE generated by one amplifier with the given gain, in bandwidth `rate`.
fn amplifier_ase(gain: f64, nf_db: f64, frequency: f64, rate: f64) -> f64 {
    (gain - 1.0) * PLANCK * frequency * db_to_linear(nf_db) * rate
}

/// ASE power at the receiver in channel `channel`'s symbol-rate bandwidth, W.
pub fn ase_power(scenario: &LinkScenario, channel: usize) -> Result<f64> {
    let n_spans = scenario.span_count();
    let mut total = 0.0;
    let mut trailing = 1.0;
    for n in (0..n_spans).rev() {
        let span = &scenario.spans[n];
        let ch = &scenario.combs[n].channels[channel];
        let gain = amplifier_gain(span, channel);
        if gain < 1.0 {
            return Err(Error::GainBelowUnity {
                span: n,
                channel,
                gain,
            });
        }
        total += amplifier_ase(
            gain,
            scenario.noise_figures[n],
            ch.center_frequency,
            ch.symbol_rate,
        ) * trailing;
        trailing *= span.net_gain(channel);
    }
    Ok(total)
}

/// NLI power per cubed launch power of `channel` for one span with the comb's
/// current power profile, GN closed form without coherence.
pub fn span_nli_efficiency(span: &FiberSpan, comb: &WdmComb, channel: usize) -> Result<f64> {
    let p = comb.channels[channel].launch_power;
    if !(p > 0.0) {
        return Err(Error::invalid(format!(
            "channel {channel} needs a positive power to set the comb profile"
        )));
    }
    let mut comb = comb.clone();
    comb.cut_index = channel;
    let single = LinkScenario::new(vec![span.clone()], vec![comb], vec![0.0]);
    let link = link_nli_for_cut(&single, channel, &CffOptions::gn_incoherent())?;
    let ch = &single.combs[0].channels[channel];
    Ok(link.psd * ch.symbol_rate / (p * p * p))
}

/// LOGO launch power of `channel` for one span: the maximizer of
/// P/(P_ASE + ηP³), i.e. (P_ASE/(2η))^(1/3). Other channels keep their power
/// ratio to this one.
pub fn logo_optimal_power(
    span: &FiberSpan,
    comb: &WdmComb,
    channel: usize,
    nf_db: f64,
) -> Result<f64> {
    let eta = span_nli_efficiency(span, comb, channel)?;
    if !(eta > 0.0) {
        return Err(Error::invalid(
            "LOGO needs a nonlinear span (NLI efficiency > 0)",
        ));
    }
    let ch = &comb.channels[channel];
    let gain = amplifier_gain(span, channel);
    if gain < 1.0 {
        return Err(Error::GainBelowUnity {
            span: 0,
            channel,
            gain,
        });
    }
    let ase = amplifier_ase(gain, nf_db, ch.center_frequency, ch.symbol_rate);
    Ok((ase / (2.0 * eta)).cbrt())
}

/// Whether channel `index` is active with identical parameters in every span.
fn traverses_link(scenario: &LinkScenario, index: usize) -> bool {
    let first = &scenario.combs[0].channels[index];
    first.active
        && scenario.combs.iter().all(|c| {
            c.channels
                .get(index)
                .is_some_and(|ch| ch.same_identity(first))
        })
}

/// OSNR_NL of channel `index` treated as the CUT.
pub fn osnr_nl_for_channel(
    scenario: &LinkScenario,
    index: usize,
    opts: &CffOptions,
) -> Result<ChannelRecord> {
    let n_last = scenario.span_count() - 1;
    let link = link_nli_for_cut(scenario, index, opts)?;
    let last = &scenario.combs[n_last].channels[index];
    let p_nli = link.psd * last.symbol_rate;
    let p_ase = ase_power(scenario, index)?;
    let p_ch = last.launch_power * scenario.spans[n_last].net_gain(index);
    Ok(ChannelRecord {
        index,
        center_frequency: last.center_frequency,
        nli_psd: link.psd,
        p_nli,
        p_ase,
        p_ch,
        osnr_nl_db: linear_to_db(p_ch / (p_ase + p_nli)),
        low_dispersion: link.low_dispersion,
    })
}

/// OSNR_NL of every channel that is active throughout the link, each taken in
/// turn as the CUT.
pub fn osnr_nl(scenario: &LinkScenario, opts: &CffOptions) -> Result<NliReport> {
    let mut channels = Vec::new();
    for index in 0..scenario.combs[0].channels.len() {
        if traverses_link(scenario, index) {
            channels.push(osnr_nl_for_channel(scenario, index, opts)?);
        }
    }
    Ok(NliReport { channels })
}

/// OSNR difference a − b in dB.
pub fn err_metric(osnr_a_db: f64, osnr_b_db: f64) -> f64 {
    osnr_a_db - osnr_b_db
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReachStatus {
    /// The target is met up to `spans` and missed beyond.
    Reached,
    /// Not met even after one span.
    Unreachable,
    /// Still met at the span limit.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxReach {
    pub spans: usize,
    pub status: ReachStatus,
    /// CUT OSNR_NL in dB after 1, 2, … spans, up to the first miss.
    pub trace: Vec<f64>,
    /// Whether the trace is non-increasing.
    pub monotone: bool,
}

/// The first `n` spans of `scenario` with the last amplifier made transparent,
/// so the link ends with the CUT at its launch power.
pub fn terminated_prefix(scenario: &LinkScenario, n: usize) -> LinkScenario {
    let mut s = scenario.prefix(n);
    if let Some(last) = s.spans.last_mut() {
        last.termination = Termination::Transparent;
    }
    s
}

/// Largest span count N ≤ `max_spans` at which the CUT's OSNR_NL is at least
/// `target_osnr_db`. `build(N)` returns the N-span link.
pub fn max_reach<F>(
    mut build: F,
    target_osnr_db: f64,
    opts: &CffOptions,
    max_spans: usize,
) -> Result<MaxReach>
where
    F: FnMut(usize) -> Result<LinkScenario>,
{
    if max_spans == 0 {
        return Err(Error::invalid("max_spans must be at least 1"));
    }
    let mut trace = Vec::new();
    let mut monotone = true;
    for n in 1..=max_spans {
        let scenario = build(n)?;
        let osnr = osnr_nl_for_channel(&scenario, scenario.cut_index(), opts)?.osnr_nl_db;
        if let Some(&prev) = trace.last() {
            // rounding slack only
            if osnr > prev + 1e-9 {
                monotone = false;
            }
        }
        trace.push(osnr);
        if osnr < target_osnr_db {
            let status = if n == 1 {
                ReachStatus::Unreachable
            } else {
                ReachStatus::Reached
            };
            return Ok(MaxReach {
                spans: n - 1,
                status,
                trace,
                monotone,
            });
        }
    }
    Ok(MaxReach {
        spans: max_spans,
        status: ReachStatus::Unbounded,
        trace,
        monotone,
    })
}

/// Default target OSNR_NL (dB, symbol-rate bandwidth) per format: the SNR at
/// which the normalized GMI reaches 0.87 on an AWGN channel, from
/// `examples/gmi_targets.rs`. PM-Gaussian has no fixed target; generation
/// draws it between the 16QAM and 256QAM values.
pub fn default_target_osnr_db(format: ModulationFormat) -> Option<f64> {
    crate::gmi::DEFAULT_TARGETS_DB
        .iter()
        .find(|(f, _)| *f == format)
        .map(|&(_, v)| v)
}
