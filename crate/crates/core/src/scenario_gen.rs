//! Seeded random test-set generation.
//!
//! Each scenario is a pure function of (seed, index). Every random quantity
//! comes from its own stream, derived from (seed, index, category), so the
//! draws of one category never shift those of another:
//! rates → formats → roll-offs → spacings → load → CUT placement → fibers →
//! lengths → NFs → jitters → target.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::budget::{logo_optimal_power, max_reach, ReachStatus};
use crate::cff::{CffOptions, CorrectionMode};
use crate::egn::CorrectionCoefficients;
use crate::error::{Error, Result};
use crate::gmi::DEFAULT_TARGETS_DB;
use crate::link_model::{
    validate_scenario, Channel, FiberSpan, FiberType, LinkScenario, ModulationFormat, Termination,
    WdmComb,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutPlacementWeights {
    pub lowest: f64,
    pub center: f64,
    pub highest: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutPlacement {
    Lowest,
    Center,
    Highest,
}

impl CutPlacement {
    pub fn name(self) -> &'static str {
        match self {
            CutPlacement::Lowest => "lowest",
            CutPlacement::Center => "center",
            CutPlacement::Highest => "highest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormatTarget {
    pub format: ModulationFormat,
    pub osnr_db: f64,
}

/// Test-set protocol. Engineering units, as in the scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerationConfig {
    pub seed: u64,
    pub system_count: usize,
    /// Probability that a system is fully loaded; otherwise each non-CUT
    /// channel is dropped with probability 1/2.
    pub full_load_fraction: f64,
    #[serde(rename = "band_center_THz")]
    pub band_center_thz: f64,
    #[serde(rename = "band_width_THz")]
    pub band_width_thz: f64,
    #[serde(rename = "symbol_rates_GBaud")]
    pub symbol_rates_gbaud: Vec<f64>,
    /// Upper spacing limit per symbol rate, in the order of `symbol_rates_GBaud`.
    #[serde(rename = "spacing_upper_GHz")]
    pub spacing_upper_ghz: Vec<f64>,
    pub formats: Vec<ModulationFormat>,
    pub rolloff_range: [f64; 2],
    pub fiber_catalog: Vec<FiberType>,
    pub span_length_range_km: [f64; 2],
    pub nf_range_db: [f64; 2],
    /// Multiplier on the LOGO power of every non-CUT channel.
    pub power_jitter_range: [f64; 2],
    pub cut_placement_weights: CutPlacementWeights,
    /// Fixed number of spans. When absent, the link is cut at the CUT's
    /// max-reach, searched up to `max_spans`.
    pub span_count: Option<usize>,
    pub max_spans: usize,
    /// Estimator used for the max-reach search.
    pub reach_egn: bool,
    pub reach_coherence: bool,
    /// Target OSNR per format; PM-Gaussian targets are drawn uniformly in dB
    /// between the PM-16QAM and PM-256QAM entries.
    pub target_osnr_db: Vec<FormatTarget>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 0,
            system_count: 7000,
            full_load_fraction: 5400.0 / 7000.0,
            band_center_thz: 193.415,
            band_width_thz: 5.0,
            symbol_rates_gbaud: vec![32.0, 64.0, 96.0, 128.0],
            spacing_upper_ghz: vec![43.5, 87.5, 131.25, 175.0],
            formats: vec![
                ModulationFormat::Qam16,
                ModulationFormat::Qam32,
                ModulationFormat::Qam64,
                ModulationFormat::Qam128,
                ModulationFormat::Qam256,
                ModulationFormat::Gaussian,
            ],
            rolloff_range: [0.05, 0.25],
            fiber_catalog: FiberType::catalog(),
            span_length_range_km: [80.0, 120.0],
            nf_range_db: [5.0, 6.0],
            power_jitter_range: [0.7, 1.3],
            cut_placement_weights: CutPlacementWeights {
                lowest: 1.0 / 3.0,
                center: 1.0 / 3.0,
                highest: 1.0 / 3.0,
            },
            span_count: None,
            max_spans: 50,
            reach_egn: true,
            reach_coherence: true,
            target_osnr_db: DEFAULT_TARGETS_DB
                .iter()
                .map(|&(format, osnr_db)| FormatTarget { format, osnr_db })
                .collect(),
        }
    }
}

fn check_range(name: &str, r: [f64; 2], min: f64) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1] && r[0] >= min) {
        return Err(Error::invalid(format!(
            "{name} [{}, {}] is not a valid range",
            r[0], r[1]
        )));
    }
    Ok(())
}

impl GenerationConfig {
    /// Parses a config; absent fields take their defaults. Not validated.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.full_load_fraction) {
            return Err(Error::invalid("full_load_fraction outside [0, 1]"));
        }
        if !(self.band_center_thz > 0.0 && self.band_width_thz > 0.0) {
            return Err(Error::invalid("band center and width must be positive"));
        }
        if self.symbol_rates_gbaud.is_empty()
            || self.symbol_rates_gbaud.len() != self.spacing_upper_ghz.len()
        {
            return Err(Error::invalid("need one spacing limit per symbol rate"));
        }
        if self
            .symbol_rates_gbaud
            .iter()
            .chain(&self.spacing_upper_ghz)
            .any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::invalid(
                "symbol rates and spacing limits must be positive",
            ));
        }
        if self.formats.is_empty() || self.fiber_catalog.is_empty() {
            return Err(Error::invalid(
                "format list and fiber catalog must be non-empty",
            ));
        }
        check_range("rolloff_range", self.rolloff_range, 0.0)?;
        if self.rolloff_range[1] > 1.0 {
            return Err(Error::invalid("roll-off above 1"));
        }
        check_range(
            "span_length_range_km",
            self.span_length_range_km,
            f64::MIN_POSITIVE,
        )?;
        check_range("nf_range_db", self.nf_range_db, f64::NEG_INFINITY)?;
        check_range(
            "power_jitter_range",
            self.power_jitter_range,
            f64::MIN_POSITIVE,
        )?;
        let w = self.cut_placement_weights;
        if [w.lowest, w.center, w.highest].iter().any(|&x| !(x >= 0.0))
            || (w.lowest + w.center + w.highest - 1.0).abs() > 1e-9
        {
            return Err(Error::invalid(
                "CUT placement weights must be non-negative and sum to 1",
            ));
        }
        if self.span_count == Some(0) || self.max_spans == 0 {
            return Err(Error::invalid("span counts must be at least 1"));
        }
        for f in &self.formats {
            if *f != ModulationFormat::Gaussian && self.target(*f).is_none() {
                return Err(Error::invalid(format!("no target OSNR for {f}")));
            }
        }
        if self.formats.contains(&ModulationFormat::Gaussian)
            && (self.target(ModulationFormat::Qam16).is_none()
                || self.target(ModulationFormat::Qam256).is_none())
        {
            return Err(Error::invalid(
                "PM-Gaussian targets need PM-16QAM and PM-256QAM targets",
            ));
        }
        Ok(())
    }

    fn target(&self, format: ModulationFormat) -> Option<f64> {
        self.target_osnr_db
            .iter()
            .find(|t| t.format == format)
            .map(|t| t.osnr_db)
    }

    fn reach_options(&self) -> CffOptions {
        let mode = if self.reach_egn {
            CorrectionMode::Egn(CorrectionCoefficients::default())
        } else {
            CorrectionMode::Gn
        };
        CffOptions {
            coherence_enabled: self.reach_coherence,
            correction_mode: mode,
        }
    }
}

#[derive(Clone, Copy)]
enum Stream {
    Rates,
    Formats,
    Rolloffs,
    Spacings,
    Load,
    CutPlacement,
    Fibers,
    Lengths,
    NoiseFigures,
    Jitters,
    Target,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream(seed: u64, index: usize, s: Stream) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ index as u64) ^ s as u64);
    ChaCha8Rng::seed_from_u64(key)
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    r[0] + (r[1] - r[0]) * rng.random::<f64>()
}

/// Channel draws shared by every span.
struct Grid {
    channels: Vec<Channel>,
    cut: usize,
    placement: CutPlacement,
    full_load: bool,
}

/// Reference launch power of a 32 GBaud channel for the equal-PSD profile
/// LOGO starts from; any value gives the same LOGO powers.
const REFERENCE_POWER: f64 = 1e-3;
const REFERENCE_RATE: f64 = 32e9;

fn draw_grid(cfg: &GenerationConfig, index: usize) -> Result<Grid> {
    let fail = |reason: String| Error::Generation { index, reason };
    let mut rates = stream(cfg.seed, index, Stream::Rates);
    let mut formats = stream(cfg.seed, index, Stream::Formats);
    let mut rolloffs = stream(cfg.seed, index, Stream::Rolloffs);
    let mut spacings = stream(cfg.seed, index, Stream::Spacings);

    let center = cfg.band_center_thz * 1e12;
    let (lo, hi) = (
        center - 0.5 * cfg.band_width_thz * 1e12,
        center + 0.5 * cfg.band_width_thz * 1e12,
    );
    let max_rate = cfg.symbol_rates_gbaud.iter().fold(0.0f64, |a, &b| a.max(b)) * 1e9;
    let max_upper = cfg.spacing_upper_ghz.iter().fold(0.0f64, |a, &b| a.max(b)) * 1e9;
    let max_half_width = 0.5 * max_rate * (1.0 + cfg.rolloff_range[1]);

    // Channel k is admitted only if it fits whatever rate and spacing it then
    // draws, so admission never depends on the channel's own draws and the
    // rate/format frequencies stay unbiased.
    let mut channels: Vec<Channel> = Vec::new();
    let mut uppers: Vec<f64> = Vec::new();
    loop {
        let fits = match channels.last() {
            None => lo + 2.0 * max_half_width <= hi,
            Some(prev) => {
                let upper_prev = uppers[uppers.len() - 1];
                let worst_spacing = (0.5 * (upper_prev + max_upper))
                    .max(0.5 * prev.occupied_bandwidth() + max_half_width);
                prev.center_frequency + worst_spacing + max_half_width <= hi
            }
        };
        if !fits {
            break;
        }
        let k = rates.random_range(0..cfg.symbol_rates_gbaud.len());
        let rate = cfg.symbol_rates_gbaud[k] * 1e9;
        let upper = cfg.spacing_upper_ghz[k] * 1e9;
        let format = cfg.formats[formats.random_range(0..cfg.formats.len())];
        let rolloff = uniform(&mut rolloffs, cfg.rolloff_range);
        let half_width = 0.5 * rate * (1.0 + rolloff);
        let f = match channels.last() {
            None => lo + half_width,
            Some(prev) => {
                let min = 0.5 * prev.occupied_bandwidth() + half_width;
                let max = (0.5 * (uppers[uppers.len() - 1] + upper)).max(min);
                uniform_closed(&mut spacings, min, max) + prev.center_frequency
            }
        };
        channels.push(Channel {
            center_frequency: f,
            symbol_rate: rate,
            rolloff,
            format,
            launch_power: REFERENCE_POWER * rate / REFERENCE_RATE,
            active: true,
        });
        uppers.push(upper);
    }
    if channels.is_empty() {
        return Err(fail(format!(
            "band of {} THz cannot hold a {} GBaud channel",
            cfg.band_width_thz,
            max_rate / 1e9
        )));
    }

    let mut load = stream(cfg.seed, index, Stream::Load);
    let full_load = load.random::<f64>() < cfg.full_load_fraction;

    let mut placement_rng = stream(cfg.seed, index, Stream::CutPlacement);
    let w = cfg.cut_placement_weights;
    let u = placement_rng.random::<f64>();
    let placement = if u < w.lowest {
        CutPlacement::Lowest
    } else if u < w.lowest + w.center {
        CutPlacement::Center
    } else {
        CutPlacement::Highest
    };
    let cut = match placement {
        CutPlacement::Lowest => 0,
        CutPlacement::Highest => channels.len() - 1,
        CutPlacement::Center => {
            let mut best = 0;
            for (i, c) in channels.iter().enumerate() {
                if (c.center_frequency - center).abs()
                    < (channels[best].center_frequency - center).abs()
                {
                    best = i;
                }
            }
            best
        }
    };

    if !full_load {
        // one draw per channel, including the CUT, so the mask does not
        // depend on where the CUT sits
        for (i, c) in channels.iter_mut().enumerate() {
            let keep = load.random::<bool>();
            c.active = i == cut || keep;
        }
    }
    Ok(Grid {
        channels,
        cut,
        placement,
        full_load,
    })
}

fn uniform_closed(rng: &mut ChaCha8Rng, min: f64, max: f64) -> f64 {
    min + (max - min) * rng.random::<f64>()
}

/// Per-span draws and LOGO powers, extended lazily one span at a time.
struct SpanBuilder<'a> {
    cfg: &'a GenerationConfig,
    index: usize,
    grid: Grid,
    fibers: ChaCha8Rng,
    lengths: ChaCha8Rng,
    nfs: ChaCha8Rng,
    jitters: ChaCha8Rng,
    spans: Vec<FiberSpan>,
    fiber_names: Vec<String>,
    combs: Vec<WdmComb>,
    noise_figures: Vec<f64>,
}

impl<'a> SpanBuilder<'a> {
    fn new(cfg: &'a GenerationConfig, index: usize, grid: Grid) -> Self {
        SpanBuilder {
            cfg,
            index,
            grid,
            fibers: stream(cfg.seed, index, Stream::Fibers),
            lengths: stream(cfg.seed, index, Stream::Lengths),
            nfs: stream(cfg.seed, index, Stream::NoiseFigures),
            jitters: stream(cfg.seed, index, Stream::Jitters),
            spans: Vec::new(),
            fiber_names: Vec::new(),
            combs: Vec::new(),
            noise_figures: Vec::new(),
        }
    }

    fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.spans.len() < n {
            let fiber =
                &self.cfg.fiber_catalog[self.fibers.random_range(0..self.cfg.fiber_catalog.len())];
            let length = uniform(&mut self.lengths, self.cfg.span_length_range_km) * 1e3;
            let nf = uniform(&mut self.nfs, self.cfg.nf_range_db);
            let span = fiber.span(length)?;

            let reference = WdmComb::new(self.grid.channels.clone(), self.grid.cut);
            let mut comb = reference.clone();
            for i in 0..comb.channels.len() {
                // one jitter draw per channel and span, used or not
                let jitter = uniform(&mut self.jitters, self.cfg.power_jitter_range);
                if !comb.channels[i].active {
                    continue;
                }
                let p = logo_optimal_power(&span, &reference, i, nf)?;
                comb.channels[i].launch_power = if i == self.grid.cut { p } else { p * jitter };
            }
            self.spans.push(span);
            self.fiber_names.push(fiber.name.clone());
            self.combs.push(comb);
            self.noise_figures.push(nf);
        }
        Ok(())
    }

    /// The first `n` spans; each amplifier but the last sets the next span's
    /// launch powers, the last one only compensates its span loss.
    fn link(&mut self, n: usize) -> Result<LinkScenario> {
        self.extend_to(n)?;
        let mut spans = self.spans[..n].to_vec();
        for (k, span) in spans.iter_mut().enumerate().take(n.saturating_sub(1)) {
            let loss = span.fiber_loss();
            let gains = self.combs[k]
                .channels
                .iter()
                .zip(&self.combs[k + 1].channels)
                .map(|(a, b)| b.launch_power / (a.launch_power * loss))
                .collect();
            span.termination = Termination::PerChannel(gains);
        }
        if let Some(last) = spans.last_mut() {
            last.termination = Termination::Transparent;
        }
        Ok(LinkScenario::new(
            spans,
            self.combs[..n].to_vec(),
            self.noise_figures[..n].to_vec(),
        ))
    }

    fn generation_error(&self, e: Error) -> Error {
        match e {
            Error::Generation { .. } => e,
            other => Error::Generation {
                index: self.index,
                reason: other.to_string(),
            },
        }
    }
}

/// Scenario `index` of the test set described by `cfg`.
pub fn generate_scenario(cfg: &GenerationConfig, index: usize) -> Result<LinkScenario> {
    cfg.validate()?;
    if index >= cfg.system_count {
        return Err(Error::invalid(format!(
            "index {index} beyond system_count {}",
            cfg.system_count
        )));
    }
    let grid = draw_grid(cfg, index)?;
    let cut_format = grid.channels[grid.cut].format;
    let placement = grid.placement;
    let full_load = grid.full_load;

    let mut target_rng = stream(cfg.seed, index, Stream::Target);
    let target = match cut_format {
        ModulationFormat::Gaussian => {
            let lo = cfg.target(ModulationFormat::Qam16).expect("validated");
            let hi = cfg.target(ModulationFormat::Qam256).expect("validated");
            uniform(&mut target_rng, [lo, hi])
        }
        f => cfg.target(f).expect("validated"),
    };

    let mut builder = SpanBuilder::new(cfg, index, grid);
    let mut metadata = BTreeMap::new();
    let n = match cfg.span_count {
        Some(n) => n,
        None => {
            let opts = cfg.reach_options();
            let reach = max_reach(|n| builder.link(n), target, &opts, cfg.max_spans)
                .map_err(|e| builder.generation_error(e))?;
            let status = match reach.status {
                ReachStatus::Reached => "reached",
                ReachStatus::Unreachable => "unreachable",
                ReachStatus::Unbounded => "unbounded",
            };
            metadata.insert("reach".to_string(), json!(reach.spans));
            metadata.insert("reach_status".to_string(), json!(status));
            reach.spans.max(1)
        }
    };
    let mut scenario = builder.link(n).map_err(|e| builder.generation_error(e))?;

    metadata.insert("seed".to_string(), json!(cfg.seed));
    metadata.insert("index".to_string(), json!(index));
    metadata.insert("cut_placement".to_string(), json!(placement.name()));
    metadata.insert(
        "load".to_string(),
        json!(if full_load { "full" } else { "partial" }),
    );
    metadata.insert("target_osnr_db".to_string(), json!(target));
    metadata.insert("fibers".to_string(), json!(builder.fiber_names[..n]));
    scenario.metadata = metadata;
    validate_scenario(scenario).map_err(|e| builder.generation_error(e))
}

/// Empirical distributions over a set of generated scenarios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestsetStatistics {
    pub scenarios: usize,
    pub channels: usize,
    /// Channel count per symbol rate in GBaud, over all packed channels.
    pub rate_counts: BTreeMap<String, usize>,
    pub format_counts: BTreeMap<String, usize>,
    pub cut_placement_counts: BTreeMap<String, usize>,
    pub full_load: usize,
    /// Active fraction of non-CUT channels in partially loaded systems.
    pub partial_load_active_fraction: f64,
    pub spans: usize,
    pub span_length_min_km: f64,
    pub span_length_max_km: f64,
    pub span_length_mean_km: f64,
    /// Ten equal bins over [min, max] of the observed span lengths.
    pub span_length_histogram: Vec<usize>,
    pub fiber_counts: BTreeMap<String, usize>,
}

/// Summarizes generated scenarios. Placement, load and fiber counts come from
/// the generator's metadata.
pub fn testset_statistics(scenarios: &[LinkScenario]) -> Result<TestsetStatistics> {
    if scenarios.is_empty() {
        return Err(Error::invalid("statistics need at least one scenario"));
    }
    let mut rate_counts = BTreeMap::new();
    let mut format_counts = BTreeMap::new();
    let mut cut_placement_counts = BTreeMap::new();
    let mut fiber_counts = BTreeMap::new();
    let (mut channels, mut full_load, mut partial_active, mut partial_total) =
        (0, 0, 0usize, 0usize);
    let mut lengths = Vec::new();
    for s in scenarios {
        let comb = &s.combs[0];
        channels += comb.channels.len();
        for c in &comb.channels {
            *rate_counts
                .entry(format!("{}", c.symbol_rate / 1e9))
                .or_insert(0) += 1;
            *format_counts
                .entry(c.format.name().to_string())
                .or_insert(0) += 1;
        }
        if let Some(p) = s.metadata.get("cut_placement").and_then(|v| v.as_str()) {
            *cut_placement_counts.entry(p.to_string()).or_insert(0) += 1;
        }
        match s.metadata.get("load").and_then(|v| v.as_str()) {
            Some("full") => full_load += 1,
            Some(_) => {
                for (i, c) in comb.channels.iter().enumerate() {
                    if i != comb.cut_index {
                        partial_total += 1;
                        partial_active += usize::from(c.active);
                    }
                }
            }
            None => {}
        }
        if let Some(names) = s.metadata.get("fibers").and_then(|v| v.as_array()) {
            for n in names.iter().filter_map(|n| n.as_str()) {
                *fiber_counts.entry(n.to_string()).or_insert(0) += 1;
            }
        }
        lengths.extend(s.spans.iter().map(|sp| sp.length / 1e3));
    }
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let mut histogram = vec![0; 10];
    for &l in &lengths {
        let bin = if max > min {
            ((l - min) / (max - min) * 10.0) as usize
        } else {
            0
        };
        histogram[bin.min(9)] += 1;
    }
    Ok(TestsetStatistics {
        scenarios: scenarios.len(),
        channels,
        rate_counts,
        format_counts,
        cut_placement_counts,
        full_load,
        partial_load_active_fraction: if partial_total > 0 {
            partial_active as f64 / partial_total as f64
        } else {
            f64::NAN
        },
        spans: lengths.len(),
        span_length_min_km: min,
        span_length_max_km: max,
        span_length_mean_km: mean,
        span_length_histogram: histogram,
        fiber_counts,
    })
}

impl fmt::Display for TestsetStatistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let share = |count: usize, total: usize| count as f64 / total as f64;
        writeln!(
            f,
            "scenarios {}  channels {}  spans {}",
            self.scenarios, self.channels, self.spans
        )?;
        for (rate, &n) in &self.rate_counts {
            writeln!(f, "  rate {rate:>4} GBaud  {:.4}", share(n, self.channels))?;
        }
        for (format, &n) in &self.format_counts {
            writeln!(f, "  format {format:<12} {:.4}", share(n, self.channels))?;
        }
        for (placement, &n) in &self.cut_placement_counts {
            writeln!(f, "  CUT {placement:<8} {:.4}", share(n, self.scenarios))?;
        }
        writeln!(
            f,
            "  full load {:.4}  partial-load active fraction {:.4}",
            share(self.full_load, self.scenarios),
            self.partial_load_active_fraction
        )?;
        for (fiber, &n) in &self.fiber_counts {
            writeln!(f, "  fiber {fiber:<8} {:.4}", share(n, self.spans))?;
        }
        write!(
            f,
            "  span length {:.2}..{:.2} km, mean {:.2} km",
            self.span_length_min_km, self.span_length_max_km, self.span_length_mean_km
        )
    }
}
