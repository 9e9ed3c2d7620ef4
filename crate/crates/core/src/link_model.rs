//! Spans, channels, combs and scenarios.
//!
//! Everything in here is strict SI: Hz, s, m, W and 1/m. Engineering units
//! (dB/km, ps²/km, THz, dBm) only appear in the conversion helpers and in the
//! file schema.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default reference frequency for β₂/β₃, the C-band comb center.
pub const DEFAULT_REF_FREQUENCY: f64 = 193.415e12;

/// Converts a power loss in dB/km to a field attenuation in 1/m, such that
/// `exp(-2 α L)` reproduces the dB power loss over `L`.
pub fn alpha_from_db_per_km(loss: f64) -> Result<f64> {
    if !(loss > 0.0) || !loss.is_finite() {
        return Err(Error::invalid(format!(
            "fiber loss must be positive and finite, got {loss} dB/km"
        )));
    }
    Ok(loss * std::f64::consts::LN_10 / (20.0 * 1000.0))
}

/// Inverse of [`alpha_from_db_per_km`].
pub fn alpha_to_db_per_km(alpha: f64) -> f64 {
    alpha * 20.0 * 1000.0 / std::f64::consts::LN_10
}

/// ps²/km → s²/m and ps³/km → s³/m.
pub fn dispersion_si_from_engineering(beta2_ps2_per_km: f64, beta3_ps3_per_km: f64) -> (f64, f64) {
    (beta2_ps2_per_km * 1e-27, beta3_ps3_per_km * 1e-39)
}

pub fn dispersion_engineering_from_si(beta2: f64, beta3: f64) -> (f64, f64) {
    (beta2 * 1e27, beta3 * 1e39)
}

/// Dispersion parameter D in ps/(nm·km) for a given β₂ (s²/m) at `frequency`.
pub fn dispersion_parameter(beta2: f64, frequency: f64) -> f64 {
    // D = -2πc/λ² β₂ = -2π f²/c β₂, and 1 ps/(nm km) = 1e-6 s/m².
    -2.0 * std::f64::consts::PI * frequency * frequency / SPEED_OF_LIGHT * beta2 * 1e6
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    linear_to_db(w / 1e-3)
}

/// Aggregate transfer function Γ(f) of the amplifiers, filters and VOAs at the
/// end of a span, sampled at the span's channel center frequencies.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    /// Γ(f)·e^(−2αL) = 1 at every frequency.
    Transparent,
    /// Linear power gain per channel index of the span's comb.
    PerChannel(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberSpan {
    /// m
    pub length: f64,
    /// Field attenuation, 1/m.
    pub alpha: f64,
    /// s²/m
    pub beta2: f64,
    /// s³/m
    pub beta3: f64,
    /// 1/(W·m)
    pub gamma: f64,
    /// Frequency at which `beta2` and `beta3` are specified, Hz.
    pub ref_frequency: f64,
    pub termination: Termination,
}

impl FiberSpan {
    /// Power transmission of the fiber alone, e^(−2αL).
    pub fn fiber_loss(&self) -> f64 {
        (-2.0 * self.alpha * self.length).exp()
    }

    /// Γ at the given channel index of this span's comb.
    pub fn termination_gain(&self, channel: usize) -> f64 {
        match &self.termination {
            Termination::Transparent => 1.0 / self.fiber_loss(),
            Termination::PerChannel(g) => g[channel],
        }
    }

    /// Γ·e^(−2αL) at the given channel index. Exactly 1 for transparent spans.
    pub fn net_gain(&self, channel: usize) -> f64 {
        match &self.termination {
            Termination::Transparent => 1.0,
            Termination::PerChannel(g) => g[channel] * self.fiber_loss(),
        }
    }
}

/// A named fiber type with engineering-unit parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberType {
    pub name: String,
    pub alpha_db_per_km: f64,
    pub beta2_ps2_per_km: f64,
    pub beta3_ps3_per_km: f64,
    #[serde(rename = "gamma_per_W_km")]
    pub gamma_per_w_km: f64,
}

impl FiberType {
    pub fn smf() -> Self {
        Self::new("SMF", 0.21, -21.3, 0.1452, 1.3)
    }

    pub fn nzdsf1() -> Self {
        Self::new("NZDSF1", 0.22, -4.85, 0.1463, 1.35)
    }

    pub fn nzdsf2() -> Self {
        Self::new("NZDSF2", 0.22, -2.59, 0.1206, 1.77)
    }

    /// The three fiber types of the randomized test set.
    pub fn catalog() -> Vec<Self> {
        vec![Self::smf(), Self::nzdsf1(), Self::nzdsf2()]
    }

    pub fn new(name: &str, alpha: f64, beta2: f64, beta3: f64, gamma: f64) -> Self {
        FiberType {
            name: name.to_string(),
            alpha_db_per_km: alpha,
            beta2_ps2_per_km: beta2,
            beta3_ps3_per_km: beta3,
            gamma_per_w_km: gamma,
        }
    }

    /// A transparent span of this fiber, `length` in meters.
    pub fn span(&self, length: f64) -> Result<FiberSpan> {
        let (beta2, beta3) =
            dispersion_si_from_engineering(self.beta2_ps2_per_km, self.beta3_ps3_per_km);
        Ok(FiberSpan {
            length,
            alpha: alpha_from_db_per_km(self.alpha_db_per_km)?,
            beta2,
            beta3,
            gamma: self.gamma_per_w_km * 1e-3,
            ref_frequency: DEFAULT_REF_FREQUENCY,
            termination: Termination::Transparent,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulationFormat {
    #[serde(rename = "PM-QPSK")]
    Qpsk,
    #[serde(rename = "PM-16QAM")]
    Qam16,
    #[serde(rename = "PM-32QAM")]
    Qam32,
    #[serde(rename = "PM-64QAM")]
    Qam64,
    #[serde(rename = "PM-128QAM")]
    Qam128,
    #[serde(rename = "PM-256QAM")]
    Qam256,
    #[serde(rename = "PM-Gaussian")]
    Gaussian,
}

impl ModulationFormat {
    pub const ALL: [ModulationFormat; 7] = [
        ModulationFormat::Qpsk,
        ModulationFormat::Qam16,
        ModulationFormat::Qam32,
        ModulationFormat::Qam64,
        ModulationFormat::Qam128,
        ModulationFormat::Qam256,
        ModulationFormat::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModulationFormat::Qpsk => "PM-QPSK",
            ModulationFormat::Qam16 => "PM-16QAM",
            ModulationFormat::Qam32 => "PM-32QAM",
            ModulationFormat::Qam64 => "PM-64QAM",
            ModulationFormat::Qam128 => "PM-128QAM",
            ModulationFormat::Qam256 => "PM-256QAM",
            ModulationFormat::Gaussian => "PM-Gaussian",
        }
    }

    /// Constellation size, `None` for the Gaussian format.
    pub fn order(self) -> Option<usize> {
        match self {
            ModulationFormat::Qpsk => Some(4),
            ModulationFormat::Qam16 => Some(16),
            ModulationFormat::Qam32 => Some(32),
            ModulationFormat::Qam64 => Some(64),
            ModulationFormat::Qam128 => Some(128),
            ModulationFormat::Qam256 => Some(256),
            ModulationFormat::Gaussian => None,
        }
    }
}

impl fmt::Display for ModulationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModulationFormat::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown modulation format {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    /// Hz
    pub center_frequency: f64,
    /// baud
    pub symbol_rate: f64,
    pub rolloff: f64,
    pub format: ModulationFormat,
    /// W
    pub launch_power: f64,
    pub active: bool,
}

impl Channel {
    /// Height of the rectangular PSD model, W/Hz.
    pub fn psd(&self) -> f64 {
        self.launch_power / self.symbol_rate
    }

    /// Full spectral occupancy R(1+r).
    pub fn occupied_bandwidth(&self) -> f64 {
        self.symbol_rate * (1.0 + self.rolloff)
    }

    /// Parameters that must stay fixed for the channel under test across spans.
    /// Launch power is excluded; it is set span by span.
    pub fn same_identity(&self, other: &Channel) -> bool {
        self.center_frequency == other.center_frequency
            && self.symbol_rate == other.symbol_rate
            && self.rolloff == other.rolloff
            && self.format == other.format
            && self.active == other.active
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WdmComb {
    pub channels: Vec<Channel>,
    pub cut_index: usize,
}

impl WdmComb {
    pub fn new(channels: Vec<Channel>, cut_index: usize) -> Self {
        WdmComb {
            channels,
            cut_index,
        }
    }

    pub fn cut(&self) -> &Channel {
        &self.channels[self.cut_index]
    }

    /// Active channels other than the CUT, with their comb index.
    pub fn interferers(&self) -> impl Iterator<Item = (usize, &Channel)> {
        let cut = self.cut_index;
        self.channels
            .iter()
            .enumerate()
            .filter(move |(i, c)| *i != cut && c.active)
    }

    pub fn active_count(&self) -> usize {
        self.channels.iter().filter(|c| c.active).count()
    }

    /// Same channel grid (frequencies, rates, activity) as `other`.
    pub fn same_grid(&self, other: &WdmComb) -> bool {
        self.cut_index == other.cut_index
            && self.channels.len() == other.channels.len()
            && self.channels.iter().zip(&other.channels).all(|(a, b)| {
                a.center_frequency == b.center_frequency
                    && a.symbol_rate == b.symbol_rate
                    && a.active == b.active
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkScenario {
    pub spans: Vec<FiberSpan>,
    pub combs: Vec<WdmComb>,
    /// Per-span EDFA noise figure, dB.
    pub noise_figures: Vec<f64>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl LinkScenario {
    pub fn new(spans: Vec<FiberSpan>, combs: Vec<WdmComb>, noise_figures: Vec<f64>) -> Self {
        LinkScenario {
            spans,
            combs,
            noise_figures,
            metadata: BTreeMap::new(),
        }
    }

    /// `count` copies of the same span, comb and noise figure.
    pub fn uniform(span: FiberSpan, comb: WdmComb, noise_figure: f64, count: usize) -> Self {
        LinkScenario::new(
            vec![span; count],
            vec![comb; count],
            vec![noise_figure; count],
        )
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    pub fn cut_index(&self) -> usize {
        self.combs[0].cut_index
    }

    /// The CUT as launched into the first span.
    pub fn cut(&self) -> &Channel {
        self.combs[0].cut()
    }

    /// A copy whose CUT is channel `index` in every span.
    pub fn with_cut(&self, index: usize) -> LinkScenario {
        let mut s = self.clone();
        for comb in &mut s.combs {
            comb.cut_index = index;
        }
        s
    }

    /// The first `n` spans.
    pub fn prefix(&self, n: usize) -> LinkScenario {
        LinkScenario {
            spans: self.spans[..n].to_vec(),
            combs: self.combs[..n].to_vec(),
            noise_figures: self.noise_figures[..n].to_vec(),
            metadata: self.metadata.clone(),
        }
    }

    /// Whether every span carries the same channel grid.
    pub fn has_fixed_grid(&self) -> bool {
        self.combs.windows(2).all(|w| w[0].same_grid(&w[1]))
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let v = collect_violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// Returns the scenario unchanged if it satisfies every structural invariant,
/// otherwise the complete list of violations.
pub fn validate_scenario(s: LinkScenario) -> Result<LinkScenario> {
    match s.validate() {
        Ok(()) => Ok(s),
        Err(v) => Err(Error::Validation(v)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    LengthMismatch,
    Empty,
    NonPositiveLength,
    NonPositiveAlpha,
    NegativeGamma,
    NonFinite,
    TerminationGain,
    CutIndexOutOfRange,
    CutInactive,
    CutMismatch,
    NonPositiveSymbolRate,
    InvalidRolloff,
    NonPositivePower,
    Unsorted,
    Overlap,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::LengthMismatch => "length mismatch",
            ViolationKind::Empty => "empty",
            ViolationKind::NonPositiveLength => "non-positive length",
            ViolationKind::NonPositiveAlpha => "non-positive alpha",
            ViolationKind::NegativeGamma => "negative gamma",
            ViolationKind::NonFinite => "non-finite",
            ViolationKind::TerminationGain => "termination gain",
            ViolationKind::CutIndexOutOfRange => "CUT index out of range",
            ViolationKind::CutInactive => "CUT inactive",
            ViolationKind::CutMismatch => "CUT mismatch",
            ViolationKind::NonPositiveSymbolRate => "non-positive symbol rate",
            ViolationKind::InvalidRolloff => "invalid rolloff",
            ViolationKind::NonPositivePower => "non-positive power",
            ViolationKind::Unsorted => "unsorted",
            ViolationKind::Overlap => "overlap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub span: Option<usize>,
    pub channel: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        match (self.span, self.channel) {
            (Some(s), Some(c)) => write!(f, " (span {s}, channel {c})"),
            (Some(s), None) => write!(f, " (span {s})"),
            (None, Some(c)) => write!(f, " (channel {c})"),
            (None, None) => Ok(()),
        }
    }
}

fn collect_violations(s: &LinkScenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |span, channel, kind| {
        out.push(Violation {
            span,
            channel,
            kind,
        })
    };

    if s.spans.is_empty() {
        push(None, None, ViolationKind::Empty);
    }
    if s.combs.len() != s.spans.len() || s.noise_figures.len() != s.spans.len() {
        push(None, None, ViolationKind::LengthMismatch);
    }

    for (n, span) in s.spans.iter().enumerate() {
        let finite = [
            span.length,
            span.alpha,
            span.beta2,
            span.beta3,
            span.gamma,
            span.ref_frequency,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            push(Some(n), None, ViolationKind::NonFinite);
        }
        if !(span.length > 0.0) {
            push(Some(n), None, ViolationKind::NonPositiveLength);
        }
        if !(span.alpha > 0.0) {
            push(Some(n), None, ViolationKind::NonPositiveAlpha);
        }
        if !(span.gamma >= 0.0) {
            push(Some(n), None, ViolationKind::NegativeGamma);
        }
        if let Termination::PerChannel(g) = &span.termination {
            let count = s.combs.get(n).map_or(g.len(), |c| c.channels.len());
            if g.len() != count {
                push(Some(n), None, ViolationKind::TerminationGain);
            }
            for (i, &gain) in g.iter().enumerate() {
                if !(gain > 0.0) || !gain.is_finite() {
                    push(Some(n), Some(i), ViolationKind::TerminationGain);
                }
            }
        }
    }
    if let Some(n) = s.noise_figures.iter().position(|nf| !nf.is_finite()) {
        push(Some(n), None, ViolationKind::NonFinite);
    }

    let reference_cut = s
        .combs
        .first()
        .and_then(|c| c.channels.get(c.cut_index))
        .cloned();

    for (n, comb) in s.combs.iter().enumerate() {
        if comb.channels.is_empty() {
            push(Some(n), None, ViolationKind::Empty);
            continue;
        }
        for (i, ch) in comb.channels.iter().enumerate() {
            if !ch.center_frequency.is_finite()
                || !ch.symbol_rate.is_finite()
                || !ch.launch_power.is_finite()
            {
                push(Some(n), Some(i), ViolationKind::NonFinite);
            }
            if !(ch.symbol_rate > 0.0) {
                push(Some(n), Some(i), ViolationKind::NonPositiveSymbolRate);
            }
            if !(0.0..=1.0).contains(&ch.rolloff) {
                push(Some(n), Some(i), ViolationKind::InvalidRolloff);
            }
            if ch.active && !(ch.launch_power > 0.0) {
                push(Some(n), Some(i), ViolationKind::NonPositivePower);
            }
        }
        for (i, w) in comb.channels.windows(2).enumerate() {
            if w[1].center_frequency < w[0].center_frequency {
                push(Some(n), Some(i + 1), ViolationKind::Unsorted);
            }
        }
        // Adjacent active channels must not overlap spectrally. A tiny relative
        // slack absorbs unit round-tripping through THz/GBaud in files.
        let active: Vec<(usize, &Channel)> = comb
            .channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.active)
            .collect();
        for w in active.windows(2) {
            let (_, a) = w[0];
            let (j, b) = w[1];
            let needed = 0.5 * (a.occupied_bandwidth() + b.occupied_bandwidth());
            let spacing = b.center_frequency - a.center_frequency;
            if spacing < needed * (1.0 - 1e-9) {
                push(Some(n), Some(j), ViolationKind::Overlap);
            }
        }

        match comb.channels.get(comb.cut_index) {
            None => push(
                Some(n),
                Some(comb.cut_index),
                ViolationKind::CutIndexOutOfRange,
            ),
            Some(cut) => {
                if !cut.active {
                    push(Some(n), Some(comb.cut_index), ViolationKind::CutInactive);
                }
                if let Some(reference) = &reference_cut {
                    if n > 0 && !cut.same_identity(reference) {
                        push(Some(n), Some(comb.cut_index), ViolationKind::CutMismatch);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(f: f64, r: f64) -> Channel {
        Channel {
            center_frequency: f,
            symbol_rate: r,
            rolloff: 0.1,
            format: ModulationFormat::Qam16,
            launch_power: 1e-3,
            active: true,
        }
    }

    fn kinds(s: &LinkScenario) -> Vec<ViolationKind> {
        s.validate()
            .unwrap_err()
            .into_iter()
            .map(|v| v.kind)
            .collect()
    }

    #[test]
    fn alpha_conversion() {
        let a = alpha_from_db_per_km(0.21).unwrap();
        assert!((a - 2.417_714e-5).abs() / 2.417_714e-5 < 1e-6);
        let unit = alpha_from_db_per_km(20.0 * 1000.0 / std::f64::consts::LN_10).unwrap();
        assert!((unit - 1.0).abs() < 1e-15);
        assert!(alpha_from_db_per_km(0.0).is_err());
        assert!(alpha_from_db_per_km(-0.2).is_err());
        // e^(-2αL) reproduces the dB loss
        let loss_db = -linear_to_db((-2.0 * a * 100e3).exp());
        assert!((loss_db - 21.0).abs() < 1e-10);
    }

    #[test]
    fn dispersion_conversion() {
        let (b2, b3) = dispersion_si_from_engineering(-21.3, 0.1452);
        assert!((b2 - -2.13e-26).abs() < 1e-40);
        assert!((b3 - 1.452e-40).abs() < 1e-54);
        assert_eq!(dispersion_si_from_engineering(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn smf_dispersion_parameter_is_about_17() {
        let d = dispersion_parameter(-2.13e-26, DEFAULT_REF_FREQUENCY);
        assert!((d - 16.7).abs() < 0.2, "{d}");
    }

    #[test]
    fn nzdsf2_high_edge_matches_outlier_dispersion() {
        // NZDSF2 at f_c + 2.5 THz is the low-dispersion corner of the band.
        let f = DEFAULT_REF_FREQUENCY + 2.5e12;
        let span = FiberType::nzdsf2().span(100e3).unwrap();
        let b2 = span.beta2 + std::f64::consts::PI * span.beta3 * 2.0 * (f - span.ref_frequency);
        let d = dispersion_parameter(b2, f);
        assert!((d - 0.58).abs() < 0.05, "{d}");
    }

    #[test]
    fn format_names_round_trip() {
        for f in ModulationFormat::ALL {
            assert_eq!(f.name().parse::<ModulationFormat>().unwrap(), f);
        }
        assert!("PM-8PSK".parse::<ModulationFormat>().is_err());
    }

    #[test]
    fn minimal_scenario_is_valid() {
        let span = FiberType::smf().span(100e3).unwrap();
        let comb = WdmComb::new(vec![channel(193.4e12, 32e9)], 0);
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        assert!(validate_scenario(s).is_ok());
    }

    #[test]
    fn cut_mismatch_detected() {
        let span = FiberType::smf().span(100e3).unwrap();
        let a = WdmComb::new(vec![channel(193.4e12, 32e9)], 0);
        let b = WdmComb::new(vec![channel(193.4e12, 64e9)], 0);
        let s = LinkScenario::new(vec![span.clone(), span], vec![a, b], vec![5.0, 5.0]);
        let v = s.validate().unwrap_err();
        assert_eq!(v[0].kind, ViolationKind::CutMismatch);
        assert_eq!(v[0].span, Some(1));
        assert_eq!(v[0].to_string(), "CUT mismatch (span 1, channel 0)");
    }

    #[test]
    fn overlap_detected() {
        let span = FiberType::smf().span(100e3).unwrap();
        let comb = WdmComb::new(vec![channel(193.4e12, 32e9), channel(193.4e12, 32e9)], 0);
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        assert!(kinds(&s).contains(&ViolationKind::Overlap));
    }

    #[test]
    fn inactive_channels_may_overlap() {
        let span = FiberType::smf().span(100e3).unwrap();
        let mut off = channel(193.4e12, 32e9);
        off.active = false;
        let comb = WdmComb::new(vec![channel(193.4e12, 32e9), off], 0);
        let s = LinkScenario::uniform(span, comb, 5.0, 1);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn length_mismatch_and_bad_fields_all_reported() {
        let mut span = FiberType::smf().span(100e3).unwrap();
        span.length = 0.0;
        span.gamma = -1.0;
        let mut ch = channel(193.4e12, 32e9);
        ch.rolloff = 1.5;
        let comb = WdmComb::new(vec![ch], 0);
        let s = LinkScenario::new(vec![span], vec![comb], vec![]);
        let k = kinds(&s);
        assert!(k.contains(&ViolationKind::LengthMismatch));
        assert!(k.contains(&ViolationKind::NonPositiveLength));
        assert!(k.contains(&ViolationKind::NegativeGamma));
        assert!(k.contains(&ViolationKind::InvalidRolloff));
    }

    #[test]
    fn inactive_cut_rejected() {
        let span = FiberType::smf().span(100e3).unwrap();
        let mut ch = channel(193.4e12, 32e9);
        ch.active = false;
        let s = LinkScenario::uniform(span, WdmComb::new(vec![ch], 0), 5.0, 1);
        assert!(kinds(&s).contains(&ViolationKind::CutInactive));
    }

    #[test]
    fn transparent_net_gain_is_exactly_one() {
        let span = FiberType::nzdsf1().span(87.3e3).unwrap();
        assert_eq!(span.net_gain(0), 1.0);
        assert!((span.termination_gain(0) * span.fiber_loss() - 1.0).abs() < 1e-14);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn alpha_round_trip(loss in 1e-4f64..10.0) {
                let back = alpha_to_db_per_km(alpha_from_db_per_km(loss).unwrap());
                prop_assert!(((back - loss) / loss).abs() < 1e-12);
            }
        }
    }
}
