use std::fs;
use std::path::Path;

use super::{EpsilonHistogram, StudyDataset, StudyError, StudyReport};
use crate::sensorsim::write_trace_csv;

/// Writes `manifest.json` and every trace under `traces/`.
pub fn write_dataset(dataset: &StudyDataset, dir: &Path) -> Result<(), StudyError> {
    fs::create_dir_all(dir.join("traces"))?;
    for touch in &dataset.touches {
        write_trace_csv(&touch.active, dir.join(&touch.entry.active_file))?;
        write_trace_csv(&touch.passive, dir.join(&touch.entry.passive_file))?;
    }
    fs::write(dir.join("manifest.json"), dataset.manifest.to_json())?;
    Ok(())
}

/// Writes `report.json`, `confusion.csv` and, if given, `histogram.csv`.
pub fn write_study_outputs(
    dir: &Path,
    report: &StudyReport,
    histogram: Option<&EpsilonHistogram>,
) -> Result<(), StudyError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    fs::write(dir.join("confusion.csv"), report.aggregate.to_csv())?;
    if let Some(h) = histogram {
        fs::write(dir.join("histogram.csv"), h.to_csv())?;
    }
    Ok(())
}
