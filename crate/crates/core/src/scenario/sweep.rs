//! Parameter sweeps over a configuration template.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scenario::config::ScenarioConfig;
use crate::scenario::run::{run_scenario, RunStatus, RunSummary};

pub const SWEEP_SUMMARY_FILE: &str = "sweep.csv";

/// Set a dotted-path key (e.g. `evolution.lc_mm`) in a JSON document.
pub fn set_axis(doc: &mut Value, axis: &str, v: f64) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = axis.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidParameter(format!("bad sweep axis `{axis}`")));
    }
    for (k, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::InvalidParameter(format!("sweep axis `{axis}`: `{part}` is not inside an object")))?;
        if k + 1 == parts.len() {
            let num = if v.fract() == 0.0 && v.abs() < 9.0e15 && v >= 0.0 {
                Value::from(v as u64)
            } else {
                serde_json::Number::from_f64(v)
                    .map(Value::Number)
                    .ok_or_else(|| Error::InvalidParameter(format!("non-finite sweep value {v}")))?
            };
            obj.insert(part.to_string(), num);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!()
}

/// Member configs of a sweep, validated.
pub fn sweep_configs(template: &ScenarioConfig, axis: &str, values: &[f64]) -> Result<Vec<ScenarioConfig>> {
    let base = serde_json::to_value(template).map_err(|e| Error::Parse(e.to_string()))?;
    let mut errors = Vec::new();
    let mut out = Vec::new();
    for &v in values {
        let mut doc = base.clone();
        set_axis(&mut doc, axis, v)?;
        let parsed: ScenarioConfig =
            serde_json::from_value(doc).map_err(|e| Error::Parse(format!("{axis}={v}: {e}")))?;
        match parsed.validate() {
            Ok(()) => out.push(parsed),
            Err(Error::Validation(list)) => errors.extend(list.into_iter().map(|m| format!("{axis}={v}: {m}"))),
            Err(e) => errors.push(format!("{axis}={v}: {e}")),
        }
    }
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub f_max: f64,
    /// `F_max(p)/F_max(p₀)` with `p₀` the first value.
    pub ratio: f64,
    pub u_at_f_max: f64,
    pub status: String,
}

/// Run every member (in parallel) and summarize. Members write into
/// `<out_dir>/<axis>=<value>/` when an output directory is given.
pub fn run_sweep(
    template: &ScenarioConfig,
    axis: &str,
    values: &[f64],
    out_dir: Option<&Path>,
) -> Result<(Vec<SweepRow>, Vec<RunSummary>)> {
    let configs = sweep_configs(template, axis, values)?;
    let results: Vec<Result<RunSummary>> = configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, v)| {
            let dir = out_dir.map(|d| d.join(format!("{axis}={v}")));
            run_scenario(cfg, dir.as_deref()).map(|o| o.summary)
        })
        .collect();
    let summaries = results.into_iter().collect::<Result<Vec<_>>>()?;
    let f0 = summaries.first().map(|s| s.f_max).unwrap_or(0.0);
    let rows: Vec<SweepRow> = summaries
        .iter()
        .zip(values)
        .map(|(s, &v)| SweepRow {
            value: v,
            f_max: s.f_max,
            ratio: if f0 > 0.0 { s.f_max / f0 } else { f64::NAN },
            u_at_f_max: s.u_at_f_max,
            status: match &s.status {
                RunStatus::Completed => "completed".into(),
                RunStatus::Failed => "failed".into(),
                RunStatus::Nucleated => "nucleated".into(),
                RunStatus::SolverFailure { .. } => "solver_failure".into(),
            },
        })
        .collect();
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join(SWEEP_SUMMARY_FILE))?;
        w.write_record([axis, "F_max_N", "ratio", "u_at_F_max_mm", "status"])?;
        for r in &rows {
            w.write_record([
                r.value.to_string(),
                r.f_max.to_string(),
                r.ratio.to_string(),
                r.u_at_f_max.to_string(),
                r.status.clone(),
            ])?;
        }
        w.flush()?;
    }
    Ok((rows, summaries))
}
