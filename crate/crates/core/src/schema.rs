//! Scenario files: JSON in engineering units (km, dB, ps²/km, THz, GBaud, dBm).
//!
//! Channels are given once at the top level when every span carries the same
//! comb, or per span otherwise. Schema errors carry the JSON path of the
//! offending value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cff::{CffOptions, CorrectionMode};
use crate::egn::CorrectionCoefficients;
use crate::error::{Error, Result};
use crate::link_model::{
    alpha_from_db_per_km, alpha_to_db_per_km, db_to_linear, dbm_to_watt,
    dispersion_engineering_from_si, dispersion_si_from_engineering, linear_to_db,
    validate_scenario, watt_to_dbm, Channel, FiberSpan, LinkScenario, ModulationFormat,
    Termination, WdmComb, DEFAULT_REF_FREQUENCY,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Gn,
    Egn,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<bool>,
}

impl OptionsEntry {
    /// Estimator options, defaulting to EGN with coherence.
    pub fn to_options(&self, coeffs: CorrectionCoefficients) -> CffOptions {
        CffOptions {
            coherence_enabled: self.coherence.unwrap_or(true),
            correction_mode: match self.mode.unwrap_or(ModeName::Egn) {
                ModeName::Gn => CorrectionMode::Gn,
                ModeName::Egn => CorrectionMode::Egn(coeffs),
            },
        }
    }
}

fn default_ref_thz() -> f64 {
    DEFAULT_REF_FREQUENCY / 1e12
}

fn default_active() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub alpha_db_per_km: f64,
    pub beta2_ps2_per_km: f64,
    pub beta3_ps3_per_km: f64,
    #[serde(rename = "gamma_per_W_km")]
    pub gamma_per_w_km: f64,
    #[serde(rename = "ref_frequency_THz", default = "default_ref_thz")]
    pub ref_frequency_thz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    #[serde(rename = "f_THz")]
    pub f_thz: f64,
    #[serde(rename = "rate_GBaud")]
    pub rate_gbaud: f64,
    pub rolloff: f64,
    pub format: ModulationFormat,
    #[serde(rename = "power_dBm")]
    pub power_dbm: f64,
    #[serde(default = "default_active", skip_serializing_if = "is_true")]
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanEntry {
    pub length_km: f64,
    pub fiber: FiberEntry,
    pub nf_db: f64,
    /// Per-channel amplifier gain; absent means the amplifier exactly
    /// compensates the span loss.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination_gain_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelEntry>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub spans: Vec<SpanEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelEntry>>,
    pub cut_index: usize,
    #[serde(default, skip_serializing_if = "is_default_options")]
    pub options: OptionsEntry,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn is_default_options(o: &OptionsEntry) -> bool {
    *o == OptionsEntry::default()
}

fn schema_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses a scenario file, reporting the JSON path of any schema violation.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        schema_error(path, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| schema_error(".", e.to_string()))?;
    Ok(file)
}

fn channel_from_entry(e: &ChannelEntry) -> Channel {
    Channel {
        center_frequency: e.f_thz * 1e12,
        symbol_rate: e.rate_gbaud * 1e9,
        rolloff: e.rolloff,
        format: e.format,
        launch_power: dbm_to_watt(e.power_dbm),
        active: e.active,
    }
}

/// Rounds a converted value to 15 significant digits, dropping the last-bit
/// noise of unit conversions so files stay readable and stable.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn entry_from_channel(c: &Channel) -> ChannelEntry {
    ChannelEntry {
        f_thz: tidy(c.center_frequency / 1e12),
        rate_gbaud: tidy(c.symbol_rate / 1e9),
        rolloff: c.rolloff,
        format: c.format,
        power_dbm: tidy(watt_to_dbm(c.launch_power)),
        active: c.active,
    }
}

impl ScenarioFile {
    /// Converts to SI and validates the result.
    pub fn to_scenario(&self) -> Result<LinkScenario> {
        if self.spans.is_empty() {
            return Err(schema_error("spans", "at least one span is required"));
        }
        let mut spans = Vec::with_capacity(self.spans.len());
        let mut combs = Vec::with_capacity(self.spans.len());
        let mut nfs = Vec::with_capacity(self.spans.len());
        for (n, entry) in self.spans.iter().enumerate() {
            let channels = match (&entry.channels, &self.channels) {
                (Some(c), _) | (None, Some(c)) => c,
                (None, None) => {
                    return Err(schema_error(
                        format!("spans[{n}].channels"),
                        "no channels for this span and no shared channel list",
                    ))
                }
            };
            let f = &entry.fiber;
            let alpha = alpha_from_db_per_km(f.alpha_db_per_km).map_err(|e| {
                schema_error(format!("spans[{n}].fiber.alpha_db_per_km"), e.to_string())
            })?;
            let (beta2, beta3) =
                dispersion_si_from_engineering(f.beta2_ps2_per_km, f.beta3_ps3_per_km);
            let termination = match &entry.termination_gain_db {
                None => Termination::Transparent,
                Some(g) => Termination::PerChannel(g.iter().map(|&db| db_to_linear(db)).collect()),
            };
            spans.push(FiberSpan {
                length: entry.length_km * 1e3,
                alpha,
                beta2,
                beta3,
                gamma: f.gamma_per_w_km * 1e-3,
                ref_frequency: f.ref_frequency_thz * 1e12,
                termination,
            });
            combs.push(WdmComb::new(
                channels.iter().map(channel_from_entry).collect(),
                self.cut_index,
            ));
            nfs.push(entry.nf_db);
        }
        let mut s = LinkScenario::new(spans, combs, nfs);
        s.metadata = self.metadata.clone();
        validate_scenario(s)
    }

    /// Engineering-unit form of `s`. Channels are shared at the top level when
    /// every span carries the identical comb.
    pub fn from_scenario(s: &LinkScenario) -> ScenarioFile {
        let shared = s.combs.windows(2).all(|w| w[0] == w[1]);
        let spans = s
            .spans
            .iter()
            .zip(&s.combs)
            .zip(&s.noise_figures)
            .map(|((span, comb), &nf)| {
                let (b2, b3) = dispersion_engineering_from_si(span.beta2, span.beta3);
                SpanEntry {
                    length_km: tidy(span.length / 1e3),
                    fiber: FiberEntry {
                        name: None,
                        alpha_db_per_km: tidy(alpha_to_db_per_km(span.alpha)),
                        beta2_ps2_per_km: tidy(b2),
                        beta3_ps3_per_km: tidy(b3),
                        gamma_per_w_km: tidy(span.gamma * 1e3),
                        ref_frequency_thz: tidy(span.ref_frequency / 1e12),
                    },
                    nf_db: nf,
                    termination_gain_db: match &span.termination {
                        Termination::Transparent => None,
                        Termination::PerChannel(g) => {
                            Some(g.iter().map(|&x| tidy(linear_to_db(x))).collect())
                        }
                    },
                    channels: (!shared)
                        .then(|| comb.channels.iter().map(entry_from_channel).collect()),
                }
            })
            .collect();
        ScenarioFile {
            spans,
            channels: shared.then(|| s.combs[0].channels.iter().map(entry_from_channel).collect()),
            cut_index: s.cut_index(),
            options: OptionsEntry::default(),
            metadata: s.metadata.clone(),
        }
    }
}

/// Reads and validates one scenario from JSON text.
pub fn scenario_from_json(text: &str) -> Result<(LinkScenario, OptionsEntry)> {
    let file = parse_scenario_file(text)?;
    Ok((file.to_scenario()?, file.options))
}

/// Pretty-printed JSON for `s`, newline terminated.
pub fn scenario_to_json(s: &LinkScenario) -> String {
    let mut text =
        serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("serializable");
    text.push('\n');
    text
}

/// Single-line JSON for batch files.
pub fn scenario_to_json_line(s: &LinkScenario) -> String {
    serde_json::to_string(&ScenarioFile::from_scenario(s)).expect("serializable")
}
