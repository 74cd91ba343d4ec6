//! CSV writers and the run manifest.
//!
//! The CSV schemas are frozen: probabilities and densities are fixed-point
//! with 6 decimals, counts are plain integers, and an infinite density is
//! the literal `inf`. Golden-file tests pin both headers and formatting.

use ppbranch_core::model::Density;
use ppbranch_core::montecarlo::{wilson_interval, FateCurve};
use ppbranch_core::simulator::Trajectory;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TRAJECTORY_HEADER: &str = "generation,predators,preys,density_before_control,predator_survivors,prey_survivors,competition_survivors";
pub const FATE_CURVE_HEADER: &str = "generation,p_both_alive,p_extinct,p_prey_only,p_predator_only,p_exploded,ci_lo_both,ci_hi_both";

fn format_density(d: Density) -> String {
    if d.is_infinite() {
        "inf".to_string()
    } else {
        format!("{:.6}", d.value())
    }
}

/// One row per executed generation step: the state entering the step, the
/// density before the control phase, and the survivor counts it produced.
pub fn write_trajectory_csv(out: &mut impl Write, trajectory: &Trajectory) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in &trajectory.records {
        let competition = r
            .competition_survivors
            .map_or(String::new(), |m| m.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.generation,
            r.state_before.predators,
            r.state_before.preys,
            format_density(r.density_before_control),
            r.predator_survivors,
            r.prey_survivors,
            competition,
        )?;
    }
    Ok(())
}

/// Per-generation fate probabilities with a Wilson 95% interval on the
/// coexistence proportion.
pub fn write_fate_curve_csv(out: &mut impl Write, curve: &FateCurve) -> std::io::Result<()> {
    writeln!(out, "{FATE_CURVE_HEADER}")?;
    for n in 0..=curve.horizon {
        let (lo, hi) = wilson_interval(curve.both_alive[n as usize], curve.replicates, 0.95)
            .expect("replicates >= 1");
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{lo:.6},{hi:.6}",
            n,
            curve.p_both_alive(n),
            curve.p_extinct(n),
            curve.p_prey_only(n),
            curve.p_predator_only(n),
            curve.p_exploded(n),
        )?;
    }
    Ok(())
}

/// Provenance record emitted next to every output file. Re-running the
/// recorded command with the recorded seed reproduces the outputs
/// byte-for-byte; only `duration_seconds` varies between runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: PathBuf,
    pub root_seed: u64,
    pub horizon: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<usize>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub duration_seconds: f64,
}

impl RunManifest {
    /// Writes the manifest as `<output>.manifest.json`.
    pub fn write_next_to(&self, output: &Path) -> std::io::Result<()> {
        let mut path = output.as_os_str().to_owned();
        path.push(".manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(PathBuf::from(path), json)
    }
}
