//! Evaluation and audit report schemas, plus the plot-ready CSVs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::stats::{ErrorSummary, PredictionInterval, ProximityReport};

pub const REPORT_FILE: &str = "report.json";
pub const AUDIT_FILE: &str = "audit.json";

/// Predictions and errors for one test sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub mission_id: String,
    pub pse: u8,
    pub kt: f64,
    pub n_flights: f64,
    pub true_d_gag: f64,
    pub pred_d_gag: f64,
    pub err_d_gag_pct: f64,
    pub true_d_gm: f64,
    pub pred_d_gm: f64,
    pub err_d_gm_pct: f64,
    pub true_life: f64,
    pub pred_life: f64,
    pub err_life_pct: f64,
}

/// Mean relative error of the life prediction, grouped three ways.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupedLifeMre {
    pub by_pse: BTreeMap<u8, f64>,
    pub by_mission: BTreeMap<String, f64>,
    pub by_kt: BTreeMap<String, f64>,
}

/// Per-component stress evaluation on the test flight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressComponentEval {
    pub summary: ErrorSummary,
    pub mre_by_mission: BTreeMap<String, f64>,
}

/// Full evaluation report. Summaries are recomputable from `rows`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    /// Life band (flights) whose errors are summarized separately.
    pub region_of_interest: (f64, f64),
    pub rows: Vec<SampleResult>,
    pub life_summary_full: ErrorSummary,
    /// Present when at least one test sample has its true life inside the
    /// region of interest.
    pub life_summary_region: Option<ErrorSummary>,
    pub d_gag_summary: ErrorSummary,
    pub d_gm_summary: ErrorSummary,
    pub grouped_life_mre: GroupedLifeMre,
    /// Keyed by stress component name (one_g, d_vman, d_vgust, d_turn).
    pub stress_eval: BTreeMap<String, StressComponentEval>,
    /// Ground-segment one_g relative errors (quadratic fit), full summary.
    pub ground_summary: ErrorSummary,
}

impl PredictionReport {
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read report {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Scatter and bar-chart CSVs for external plotting.
    pub fn write_plot_csvs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;

        let scatter = |field: fn(&SampleResult) -> (f64, f64)| -> String {
            let mut out = String::from("mission_id,pse,kt,truth,rel_err_pct\n");
            for row in &self.rows {
                let (truth, err) = field(row);
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.mission_id,
                    row.pse,
                    fmt_f64(row.kt),
                    fmt_f64(truth),
                    fmt_f64(err)
                ));
            }
            out
        };
        fs::write(
            dir.join("life_scatter.csv"),
            scatter(|r| (r.true_life, r.err_life_pct)),
        )?;
        fs::write(
            dir.join("gag_scatter.csv"),
            scatter(|r| (r.true_d_gag, r.err_d_gag_pct)),
        )?;
        fs::write(
            dir.join("gm_scatter.csv"),
            scatter(|r| (r.true_d_gm, r.err_d_gm_pct)),
        )?;

        let mut grouped = String::from("dimension,group,mre_pct\n");
        for (pse, mre) in &self.grouped_life_mre.by_pse {
            grouped.push_str(&format!("pse,{pse},{}\n", fmt_f64(*mre)));
        }
        for (mission, mre) in &self.grouped_life_mre.by_mission {
            grouped.push_str(&format!("mission,{mission},{}\n", fmt_f64(*mre)));
        }
        for (kt, mre) in &self.grouped_life_mre.by_kt {
            grouped.push_str(&format!("kt,{kt},{}\n", fmt_f64(*mre)));
        }
        fs::write(dir.join("grouped_mre.csv"), grouped)?;
        Ok(())
    }
}

/// One row of the split-adequacy test battery; tests that do not apply to
/// a variable stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub variable: String,
    pub ks_p: Option<f64>,
    pub ad_p: Option<f64>,
    pub chi2_p: Option<f64>,
}

/// Split-adequacy audit output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub region_of_interest: (f64, f64),
    /// Train-vs-test marginal tests over the damage-model input variables
    /// and the output life.
    pub battery: Vec<BatteryRow>,
    pub proximity: ProximityReport,
    /// Bootstrap P95 interval from the calibration (validation) errors,
    /// with its measured test coverage.
    pub interval: PredictionInterval,
    pub calibration_size: usize,
    pub test_size: usize,
}

impl AuditReport {
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read audit {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}
