//! Recomputes the default target OSNRs: SNR at normalized GMI 0.87 per format.
//!
//!     cargo run --release --example gmi_targets

use nli_core::gmi::{snr_for_ngmi, DEFAULT_TARGETS_DB, TARGET_NGMI};

fn main() -> anyhow::Result<()> {
    for (format, frozen) in DEFAULT_TARGETS_DB {
        let snr = snr_for_ngmi(format, TARGET_NGMI, 400_000, 1)?;
        println!("{:<14} {snr:7.3} dB (frozen {frozen:.3})", format.name());
    }
    Ok(())
}
