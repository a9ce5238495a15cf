use std::f64::consts::PI;

use chrono::{DateTime, Duration, FixedOffset};
use temporal_audit::log::{read_log, write_entries, LogContents, LogEntry, Status};
use temporal_audit::report::{render_csv, render_text, write_outputs};
use temporal_audit::{analyze, AnalysisConfig, Execution, MeasurementRecord};

fn t0() -> DateTime<FixedOffset> {
    DateTime::parse_from_rfc3339("2024-04-29T00:00:00+02:00").unwrap()
}

/// Replicate `r` at slot `i` scores `f(i, r)`; slots in `gaps` are skipped.
fn log_of(n: usize, reps: u32, gaps: &[usize], f: impl Fn(usize, u32) -> f64) -> LogContents {
    let mut entries = Vec::new();
    for i in 0..n {
        if gaps.contains(&i) {
            continue;
        }
        for r in 0..reps {
            let ts = t0() + Duration::hours(3) * i as i32 + Duration::seconds(r as i64 * 7);
            entries.push(LogEntry::from_record(&MeasurementRecord::new(ts, r, f(i, r)).unwrap()));
        }
    }
    let mut bytes = Vec::new();
    write_entries(&entries, &mut bytes).unwrap();
    read_log(bytes.as_slice()).unwrap()
}

fn quick() -> AnalysisConfig {
    AnalysisConfig {
        n_perm: 200,
        ..AnalysisConfig::default()
    }
}

#[test]
fn constant_log_has_no_drift_and_no_peaks() {
    let log = log_of(702, 3, &[], |_, _| 0.75);
    let a = analyze(&log, &quick()).unwrap();
    let r = &a.report;
    assert_eq!(r.drift.slope, 0.0);
    assert!(r.peaks.is_empty());
    assert_eq!(r.explained_variance.fraction, 0.0);
    assert!(r.reconstruction_peak_to_peak.is_none());
    assert_eq!(r.series_summary.mean, 0.75);
}

#[test]
fn gaps_and_grid_are_reported() {
    let gaps = [40, 41, 42, 300, 301, 302, 303, 304, 305];
    let log = log_of(702, 10, &gaps, |i, r| ((i + r as usize) % 5) as f64 / 4.0);
    let a = analyze(&log, &quick()).unwrap();
    let s = &a.report.series_summary;
    assert_eq!(s.n, 702);
    assert_eq!(s.observed_slots, 693);
    assert_eq!(s.gap_slots, gaps.to_vec());
    assert_eq!(s.n_measurements, 6930);
    assert_eq!(s.fs, 8.0);
    assert_eq!(s.dt_seconds, 10_800.0);
    assert_eq!(a.report.spectrum.nperseg, 175);
    assert_eq!(a.report.spectrum.n_bins, 88);
    assert_eq!(a.report.spectrum.n_segments, 6);
    let grid = a.report.grids.weekday_hour.as_ref().unwrap();
    assert_eq!(grid.cells.len(), 7);
}

#[test]
fn periodic_log_is_attributed() {
    // A 21 h rhythm on bin 25 of the 175-sample segments.
    let log = log_of(702, 4, &[], |i, r| {
        let t = i as f64 / 8.0;
        let jitter = ((i * 31 + r as usize * 17) % 11) as f64 / 10.0 - 0.5;
        0.5 + 0.1 * (2.0 * PI * (8.0 / 7.0) * t).cos() + 0.02 * jitter
    });
    let a = analyze(&log, &quick()).unwrap();
    let top = a.report.peaks.iter().max_by(|x, y| x.power.total_cmp(&y.power)).unwrap();
    assert_eq!(top.bin_index, 25);
    assert_eq!(top.period, "21.0 h");
    assert_eq!(top.label.to_string(), "sideband(k=1,m=1,+)");
    let phase = top.phase.unwrap();
    assert!((phase.amplitude - 0.1).abs() < 0.005);
    assert!(a.report.reconstruction_peak_to_peak.unwrap() > 0.15);
}

#[test]
fn analysis_is_deterministic_across_execution_modes() {
    let log = log_of(400, 2, &[17], |i, r| ((i * 7 + r as usize * 3) % 9) as f64 / 8.0);
    let seq = AnalysisConfig {
        execution: Execution::Sequential,
        seed: 99,
        ..quick()
    };
    let par = AnalysisConfig {
        execution: Execution::Parallel,
        ..seq.clone()
    };
    let a = analyze(&log, &seq).unwrap();
    let b = analyze(&log, &par).unwrap();
    let c = analyze(&log, &par).unwrap();
    let json = |x: &temporal_audit::report::Analysis| serde_json::to_string(&x.report).unwrap();
    assert_eq!(json(&a), json(&b));
    assert_eq!(json(&b), json(&c));
    assert_eq!(a.band, b.band);
}

#[test]
fn outputs_are_written() {
    let log = log_of(702, 2, &[5], |i, _| 0.5 + 0.2 * (2.0 * PI * i as f64 / 8.0).sin());
    let a = analyze(&log, &quick()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = write_outputs(&a, dir.path()).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for want in ["report.json", "spectrum.csv", "peaks.json", "series.csv", "daily.csv", "weekly.csv", "heatmap.csv"] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["spectrum_file"], "spectrum.csv");
    assert_eq!(report["series_summary"]["n"], 702);
    let spectrum = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 1 + 88);
    let text = render_text(&a.report);
    assert!(text.contains("23.9 h") && text.contains("daily_fundamental"), "{text}");
    let csv = render_csv(&a.report).unwrap();
    assert_eq!(csv.lines().count(), 1 + a.report.peaks.len());
}

#[test]
fn truncated_tail_and_status_counts_surface() {
    let r = MeasurementRecord::new(t0(), 0, 0.5).unwrap();
    let mut entries: Vec<LogEntry> = (0..40)
        .map(|i| {
            let mut e = LogEntry::from_record(&r);
            e.ts = t0() + Duration::hours(3) * i;
            e.score = Some((i % 3) as f64 / 2.0);
            e
        })
        .collect();
    entries.push(LogEntry {
        ts: t0() + Duration::hours(3) * 40,
        rep: None,
        status: Some(Status::Missed),
        score: None,
        ..entries[0].clone()
    });
    let mut bytes = Vec::new();
    write_entries(&entries, &mut bytes).unwrap();
    bytes.extend_from_slice(br#"{"ts":"2024-05-04T0"#);
    let log = read_log(bytes.as_slice()).unwrap();
    assert!(log.truncated_tail);
    let a = analyze(
        &log,
        &AnalysisConfig {
            nperseg_div: 2,
            horizon_days: 100.0,
            ..quick()
        },
    )
    .unwrap();
    let s = &a.report.series_summary;
    assert!(s.log_truncated_tail);
    assert_eq!(s.log_status_counts.get("missed"), Some(&1));
    assert_eq!(s.n, 41);
    assert_eq!(s.gap_slots, vec![40]);
}
