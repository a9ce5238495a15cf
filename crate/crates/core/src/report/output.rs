//! Report files and human-readable rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Analysis, AnalysisError, AuditReport, SPECTRUM_FILE};
use crate::series::WEEKDAY_NAMES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Text,
    Csv,
}

#[derive(Serialize)]
struct PeakRow<'a> {
    period: &'a str,
    period_days: f64,
    freq_per_day: f64,
    power: f64,
    amplitude: f64,
    phase_deg: Option<f64>,
    label: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv<P, I, R>(path: P, header: &[&str], rows: I) -> Result<(), AnalysisError>
where
    P: AsRef<Path>,
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json` and its CSV/JSON sidecars into `dir`. Returns the
/// paths written.
pub fn write_outputs(analysis: &Analysis, dir: &Path) -> Result<Vec<PathBuf>, AnalysisError> {
    fs::create_dir_all(dir)?;
    let report = &analysis.report;
    let mut written = Vec::new();

    let path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);

    let path = dir.join(SPECTRUM_FILE);
    let s = &analysis.spectrum;
    write_csv(
        &path,
        &["freq_per_day", "power", "threshold"],
        (0..s.len()).map(|k| [s.freqs[k].to_string(), s.power[k].to_string(), analysis.band.threshold[k].to_string()]),
    )?;
    written.push(path);

    let path = dir.join("peaks.json");
    let rows: Vec<PeakRow> = report
        .peaks
        .iter()
        .map(|p| PeakRow {
            period: &p.period,
            period_days: p.period_days,
            freq_per_day: p.freq_per_day,
            power: p.power,
            amplitude: p.amplitude,
            phase_deg: p.phase.map(|f| f.phase_deg),
            label: p.label.to_string(),
        })
        .collect();
    let mut json = serde_json::to_string_pretty(&rows)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);

    let path = dir.join("series.csv");
    let series = &analysis.series;
    write_csv(
        &path,
        &["slot", "ts", "mean", "n_replicates", "missing", "imputed"],
        series.points().iter().enumerate().map(|(i, p)| {
            [
                i.to_string(),
                series.timestamp(i).to_rfc3339(),
                analysis.slot_means[i].to_string(),
                p.replicate_scores.len().to_string(),
                p.missing.to_string(),
                p.imputed.to_string(),
            ]
        }),
    )?;
    written.push(path);

    for (name, key, table) in [
        ("daily.csv", "date", &report.grids.daily),
        ("weekly.csv", "week_start", &report.grids.weekly),
    ] {
        let path = dir.join(name);
        write_csv(
            &path,
            &[key, "mean", "sd", "count"],
            table
                .iter()
                .map(|c| [c.period_start.to_string(), c.mean.to_string(), c.sd.to_string(), c.count.to_string()]),
        )?;
        written.push(path);
    }

    if let Some(grid) = &report.grids.weekday_hour {
        let path = dir.join("heatmap.csv");
        let rows = grid.cells.iter().enumerate().flat_map(|(d, row)| {
            row.iter().enumerate().map(move |(h, c)| {
                [
                    WEEKDAY_NAMES[d].to_string(),
                    grid.slot_labels[h].clone(),
                    opt(c.mean),
                    c.count.to_string(),
                ]
            })
        });
        write_csv(&path, &["weekday", "slot", "mean", "count"], rows)?;
        written.push(path);
    }

    if let Some(r) = &analysis.reconstruction {
        let path = dir.join("reconstruction.csv");
        write_csv(
            &path,
            &["t_days", "value"],
            r.series
                .iter()
                .enumerate()
                .map(|(i, v)| [(i as f64 / r.resolution).to_string(), v.to_string()]),
        )?;
        written.push(path);
    }

    Ok(written)
}

pub fn render_text(r: &AuditReport) -> String {
    let s = &r.series_summary;
    let mut out = String::new();
    let _ = writeln!(out, "temporal-audit report (v{})", r.tool_version);
    let _ = writeln!(
        out,
        "series: N={} fs={:.4}/day observed={} gaps={} measurements={}",
        s.n,
        s.fs,
        s.observed_slots,
        s.gap_slots.len(),
        s.n_measurements
    );
    let _ = writeln!(out, "scores: mean={:.4} sd_raw={:.4} sd_avg={:.4}", s.mean, s.sd_raw, s.sd_avg);
    let d = &r.drift;
    let _ = writeln!(
        out,
        "drift: slope={:.3e}/day se_hac={:.3e} t={:.3} p={:.4} (lag {} samples)",
        d.slope, d.se_slope_hac, d.t_stat, d.p_value, d.lag
    );
    let _ = writeln!(
        out,
        "spectrum: nperseg={} bins={} df={:.5}/day segments={}",
        r.spectrum.nperseg, r.spectrum.n_bins, r.spectrum.df, r.spectrum.n_segments
    );
    let _ = writeln!(out, "significant peaks: {}", r.peaks.len());
    if !r.peaks.is_empty() {
        let _ = writeln!(
            out,
            "  {:>8}  {:>9}  {:>10}  {:>9}  {:>8}  label",
            "period", "freq/day", "power", "amplitude", "phase"
        );
        for p in &r.peaks {
            let phase = p.phase.map(|f| format!("{:.1}", f.phase_deg)).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "  {:>8}  {:>9.4}  {:>10.6}  {:>9.4}  {:>8}  {}",
                p.period, p.freq_per_day, p.power, p.amplitude, phase, p.label
            );
        }
    }
    let ev = &r.explained_variance;
    let _ = writeln!(
        out,
        "explained variance: {:.4}{}",
        ev.fraction,
        if ev.clamped { format!(" (clamped from {:.4})", ev.unclamped) } else { String::new() }
    );
    match r.reconstruction_peak_to_peak {
        Some(ptp) => {
            let _ = writeln!(out, "reconstruction peak-to-peak: {ptp:.4}");
        }
        None => {
            let _ = writeln!(out, "reconstruction peak-to-peak: n/a");
        }
    }
    if let Some(g) = &r.grids.weekday_hour {
        let fmt = |at: Option<(usize, usize)>| match at {
            Some((d, h)) => format!(
                "{} {} ({:.3})",
                WEEKDAY_NAMES[d],
                g.slot_labels[h],
                g.cells[d][h].mean.unwrap_or(f64::NAN)
            ),
            None => "n/a".into(),
        };
        let _ = writeln!(
            out,
            "weekday x time (UTC{:+03}:{:02}): max {}, min {}",
            g.timezone_offset_minutes / 60,
            (g.timezone_offset_minutes % 60).abs(),
            fmt(g.argmax()),
            fmt(g.argmin())
        );
    }
    let _ = writeln!(
        out,
        "weeks: {} (means {})",
        r.grids.weekly.len(),
        r.grids.weekly.iter().map(|w| format!("{:.3}", w.mean)).collect::<Vec<_>>().join(", ")
    );
    out
}

/// Peak table as CSV.
pub fn render_csv(r: &AuditReport) -> Result<String, AnalysisError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["period", "freq_per_day", "power", "amplitude", "phase_deg", "label"])?;
    for p in &r.peaks {
        w.write_record([
            p.period.clone(),
            p.freq_per_day.to_string(),
            p.power.to_string(),
            p.amplitude.to_string(),
            opt(p.phase.map(|f| f.phase_deg)),
            p.label.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
