//! Validation of the closed form against the numerical oracle, and the CSV
//! files written by the command-line tool.
//!
//! CSV output is LF-terminated with '.' decimals and carries no timing, so
//! files are byte-identical across runs.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use crate::budget::{ase_power, osnr_nl_for_channel, ChannelRecord, MaxReach, NliReport};
use crate::cff::{CffOptions, CorrectionMode};
use crate::egn::CorrectionCoefficients;
use crate::error::{Error, Result};
use crate::link_model::{linear_to_db, LinkScenario};
use crate::oracle::{oracle_for_cut, IntegrationMode, QuadratureSettings};
use crate::schema::ModeName;

/// One channel of one scenario, closed form against oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationRecord {
    pub scenario_id: String,
    pub channel_index: usize,
    pub mode: ModeName,
    pub coherence: bool,
    pub osnr_cff_db: f64,
    /// None when the oracle failed to converge.
    pub osnr_oracle_db: Option<f64>,
    /// OSNR_NL(closed form) − OSNR_NL(oracle), dB.
    pub err_db: Option<f64>,
    pub low_dispersion: bool,
    /// Closed-form evaluation time; reported on stderr only.
    pub cff_time: Duration,
    pub error: Option<String>,
}

/// Which channels to validate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelSelection {
    Cut,
    AllActive,
}

/// Compares the closed form in GN and EGN mode with the GN oracle for the
/// selected channels. The oracle runs once per channel; it is coherent exactly
/// when `coherence` is on. Oracle failures become records with no ERR.
pub fn validate_against_oracle(
    scenario_id: &str,
    scenario: &LinkScenario,
    selection: ChannelSelection,
    coherence: bool,
    coeffs: CorrectionCoefficients,
    settings: &QuadratureSettings,
) -> Result<Vec<ValidationRecord>> {
    let channels: Vec<usize> = match selection {
        ChannelSelection::Cut => vec![scenario.cut_index()],
        ChannelSelection::AllActive => {
            crate::budget::osnr_nl(scenario, &CffOptions::gn_incoherent())?
                .channels
                .iter()
                .map(|c| c.index)
                .collect()
        }
    };
    let settings = QuadratureSettings {
        mode: if coherence {
            IntegrationMode::Coherent
        } else {
            IntegrationMode::Incoherent
        },
        ..*settings
    };
    let modes = [
        (ModeName::Gn, CorrectionMode::Gn),
        (ModeName::Egn, CorrectionMode::Egn(coeffs)),
    ];

    let mut records = Vec::new();
    for index in channels {
        let oracle = oracle_for_cut(scenario, index, &settings);
        let oracle_osnr = match &oracle {
            Ok(split) => Some(oracle_osnr_db(scenario, index, split.total)?),
            Err(Error::Convergence { .. }) => None,
            Err(_) => return Err(oracle.unwrap_err()),
        };
        for (name, correction_mode) in modes {
            let opts = CffOptions {
                coherence_enabled: coherence,
                correction_mode,
            };
            let start = Instant::now();
            let cff = osnr_nl_for_channel(scenario, index, &opts)?;
            let cff_time = start.elapsed();
            records.push(ValidationRecord {
                scenario_id: scenario_id.to_string(),
                channel_index: index,
                mode: name,
                coherence,
                osnr_cff_db: cff.osnr_nl_db,
                osnr_oracle_db: oracle_osnr,
                err_db: oracle_osnr.map(|o| cff.osnr_nl_db - o),
                low_dispersion: cff.is_low_dispersion(),
                cff_time,
                error: oracle.as_ref().err().map(|e| e.to_string()),
            });
        }
    }
    Ok(records)
}

/// OSNR_NL with the oracle's NLI PSD in place of the closed form's.
fn oracle_osnr_db(scenario: &LinkScenario, index: usize, nli_psd: f64) -> Result<f64> {
    let n_last = scenario.span_count() - 1;
    let ch = &scenario.combs[n_last].channels[index];
    let p_ch = ch.launch_power * scenario.spans[n_last].net_gain(index);
    let p_ase = ase_power(scenario, index)?;
    Ok(linear_to_db(p_ch / (p_ase + nli_psd * ch.symbol_rate)))
}

/// Mean, standard deviation and peak-to-peak of a set of ERR values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrSummary {
    pub count: usize,
    pub excluded: usize,
    pub mean: f64,
    pub std: f64,
    pub peak_to_peak: f64,
}

impl ErrSummary {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ValidationRecord>) -> ErrSummary {
        let mut values = Vec::new();
        let mut excluded = 0;
        for r in records {
            match r.err_db {
                Some(v) => values.push(v),
                None => excluded += 1,
            }
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        ErrSummary {
            count: values.len(),
            excluded,
            mean,
            std: var.sqrt(),
            peak_to_peak: max - min,
        }
    }
}

impl std::fmt::Display for ErrSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "n={} mean={:.4} dB std={:.4} dB p2p={:.4} dB excluded={}",
            self.count, self.mean, self.std, self.peak_to_peak, self.excluded
        )
    }
}

/// Counts per bin of width `bin_width`, bins centred on integer multiples of
/// the width. Empty bins between the extremes are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    counts: BTreeMap<i64, usize>,
}

impl Histogram {
    pub fn new(bin_width: f64) -> Result<Histogram> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::invalid(format!(
                "bin width {bin_width} must be positive"
            )));
        }
        Ok(Histogram {
            bin_width,
            counts: BTreeMap::new(),
        })
    }

    pub fn add(&mut self, value: f64) {
        let bin = (value / self.bin_width).round() as i64;
        *self.counts.entry(bin).or_insert(0) += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// (bin center, count) from the lowest to the highest occupied bin.
    pub fn rows(&self) -> Vec<(f64, usize)> {
        let (Some(&lo), Some(&hi)) = (self.counts.keys().next(), self.counts.keys().next_back())
        else {
            return Vec::new();
        };
        (lo..=hi)
            .map(|b| {
                (
                    b as f64 * self.bin_width,
                    self.counts.get(&b).copied().unwrap_or(0),
                )
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["bin_center_dB", "count"])
            .map_err(io_error)?;
        for (center, count) in self.rows() {
            w.write_record([format!("{center:.6}"), count.to_string()])
                .map_err(io_error)?;
        }
        w.flush().map_err(|e| Error::invalid(e.to_string()))
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn io_error(e: csv::Error) -> Error {
    Error::invalid(format!("writing CSV: {e}"))
}

fn mode_name(m: ModeName) -> &'static str {
    match m {
        ModeName::Gn => "gn",
        ModeName::Egn => "egn",
    }
}

/// Per-channel estimate: one row per reported channel.
pub fn write_estimate_csv<W: Write>(
    out: W,
    scenario: &LinkScenario,
    report: &NliReport,
) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "channel_index",
        "f_Hz",
        "R_baud",
        "format",
        "P_launch_W",
        "P_ASE_W",
        "P_NLI_W",
        "OSNR_NL_dB",
        "warnings",
    ])
    .map_err(io_error)?;
    for r in &report.channels {
        write_estimate_row(&mut w, scenario, r)?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))
}

fn write_estimate_row<W: Write>(
    w: &mut csv::Writer<W>,
    scenario: &LinkScenario,
    r: &ChannelRecord,
) -> Result<()> {
    let ch = &scenario.combs[0].channels[r.index];
    w.write_record([
        r.index.to_string(),
        format!("{:e}", r.center_frequency),
        format!("{:e}", ch.symbol_rate),
        ch.format.name().to_string(),
        format!("{:e}", ch.launch_power),
        format!("{:e}", r.p_ase),
        format!("{:e}", r.p_nli),
        format!("{:.6}", r.osnr_nl_db),
        r.warnings().join("; "),
    ])
    .map_err(io_error)
}

/// Validation records, in the given order. Timing is left out on purpose.
pub fn write_validation_csv<'a, W: Write>(
    out: W,
    records: impl IntoIterator<Item = &'a ValidationRecord>,
) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "scenario",
        "channel_index",
        "mode",
        "coherence",
        "OSNR_CFF_dB",
        "OSNR_oracle_dB",
        "ERR_dB",
        "low_dispersion",
        "error",
    ])
    .map_err(io_error)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in records {
        w.write_record([
            r.scenario_id.clone(),
            r.channel_index.to_string(),
            mode_name(r.mode).to_string(),
            if r.coherence { "on" } else { "off" }.to_string(),
            format!("{:.6}", r.osnr_cff_db),
            opt(r.osnr_oracle_db),
            opt(r.err_db),
            r.low_dispersion.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))
}

/// Max-reach trace: span count and CUT OSNR_NL.
pub fn write_trace_csv<W: Write>(out: W, reach: &MaxReach) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["N", "OSNR_NL_dB"]).map_err(io_error)?;
    for (i, osnr) in reach.trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{osnr:.6}")])
            .map_err(io_error)?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))
}
