//! Time-series data model: grid alignment, gap imputation and calendar
//! aggregations (daily, weekly, weekday × time-of-day).

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Datelike, Duration, FixedOffset, NaiveDate, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{mean, sample_sd};

const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("score {0} is outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("sampling interval must be positive")]
    NonPositiveInterval,
    #[error("series end {end} precedes start {start}")]
    EndBeforeStart { start: String, end: String },
    #[error("duplicate replicate {replicate} in slot {slot}")]
    DuplicateReplicate { slot: usize, replicate: u32 },
    #[error("timestamp {0} falls outside the series window")]
    OutsideWindow(String),
    #[error("timestamp {timestamp} is {offset_seconds:.1} s away from the nearest grid slot")]
    OffGrid { timestamp: String, offset_seconds: f64 },
    #[error("every time point is missing")]
    AllMissing,
    #[error("slot {0} has no values; impute before aggregating")]
    MissingSlot(usize),
    #[error("{0} samples per day is not an integer")]
    NonIntegerSlotsPerDay(f64),
    #[error("invalid time point at slot {0}: missing/imputed flags disagree with its values")]
    InconsistentPoint(usize),
}

/// One scored probe response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub timestamp: DateTime<FixedOffset>,
    pub replicate_index: u32,
    pub score: f64,
    pub raw_response: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

impl MeasurementRecord {
    pub fn new(timestamp: DateTime<FixedOffset>, replicate_index: u32, score: f64) -> Result<Self, SeriesError> {
        if !(0.0..=1.0).contains(&score) {
            return Err(SeriesError::ScoreOutOfRange(score));
        }
        Ok(Self {
            timestamp,
            replicate_index,
            score,
            raw_response: None,
            metadata: BTreeMap::new(),
        })
    }
}

/// Replicate values observed (or imputed) at one grid slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub replicate_scores: Vec<f64>,
    pub missing: bool,
    pub imputed: bool,
}

impl TimePoint {
    pub fn observed(replicate_scores: Vec<f64>) -> Self {
        Self {
            replicate_scores,
            missing: false,
            imputed: false,
        }
    }

    pub fn gap() -> Self {
        Self {
            replicate_scores: Vec::new(),
            missing: true,
            imputed: false,
        }
    }

    /// True when the slot carries measured (not synthetic) values.
    pub fn is_observed(&self) -> bool {
        !self.missing && !self.replicate_scores.is_empty()
    }

    fn is_consistent(&self) -> bool {
        match (self.missing, self.imputed) {
            (false, false) => !self.replicate_scores.is_empty(),
            (true, false) => self.replicate_scores.is_empty(),
            (true, true) => self.replicate_scores.len() == 1,
            (false, true) => false,
        }
    }
}

/// Evenly sampled series: `points[i]` sits at `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenSeries {
    t0: DateTime<FixedOffset>,
    #[serde(with = "duration_nanos")]
    dt: Duration,
    points: Vec<TimePoint>,
}

mod duration_nanos {
    use chrono::Duration;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(d.num_nanoseconds().unwrap_or(i64::MAX))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        i64::deserialize(d).map(Duration::nanoseconds)
    }
}

impl EvenSeries {
    pub fn new(t0: DateTime<FixedOffset>, dt: Duration, points: Vec<TimePoint>) -> Result<Self, SeriesError> {
        if dt <= Duration::zero() {
            return Err(SeriesError::NonPositiveInterval);
        }
        if let Some(i) = points.iter().position(|p| !p.is_consistent()) {
            return Err(SeriesError::InconsistentPoint(i));
        }
        Ok(Self { t0, dt, points })
    }

    /// Series with a single observed value per slot.
    pub fn from_values(t0: DateTime<FixedOffset>, dt: Duration, values: &[f64]) -> Result<Self, SeriesError> {
        let points = values.iter().map(|&v| TimePoint::observed(vec![v])).collect();
        Self::new(t0, dt, points)
    }

    pub fn t0(&self) -> DateTime<FixedOffset> {
        self.t0
    }

    pub fn dt(&self) -> Duration {
        self.dt
    }

    pub fn points(&self) -> &[TimePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Samples per day.
    pub fn fs(&self) -> f64 {
        SECONDS_PER_DAY / dt_seconds(self.dt)
    }

    pub fn timestamp(&self, i: usize) -> DateTime<FixedOffset> {
        self.t0 + slot_offset(self.dt, i)
    }

    /// Indices of slots that had no measurements.
    pub fn gap_indices(&self) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.missing)
            .map(|(i, _)| i)
            .collect()
    }

    /// Every measured replicate score, in slot order.
    pub fn observed_scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.points
            .iter()
            .filter(|p| p.is_observed())
            .flat_map(|p| p.replicate_scores.iter().copied())
    }

    fn observed_with_time(&self) -> impl Iterator<Item = (DateTime<FixedOffset>, &[f64])> + '_ {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_observed())
            .map(|(i, p)| (self.timestamp(i), p.replicate_scores.as_slice()))
    }
}

fn dt_seconds(dt: Duration) -> f64 {
    dt.num_nanoseconds().map(|n| n as f64 * 1e-9).unwrap_or(dt.num_seconds() as f64)
}

fn slot_offset(dt: Duration, i: usize) -> Duration {
    match dt.num_nanoseconds() {
        Some(ns) => Duration::nanoseconds(ns * i as i64),
        None => dt * i as i32,
    }
}

/// Aligns records onto the grid `t0 + i·dt`, `i = 0..`, up to and including `t_end`.
///
/// A record belongs to the nearest slot when it lies within `dt/10` of it.
/// Slots without records are flagged missing.
pub fn build_series(
    records: &[MeasurementRecord],
    t0: DateTime<FixedOffset>,
    dt: Duration,
    t_end: DateTime<FixedOffset>,
) -> Result<EvenSeries, SeriesError> {
    if dt <= Duration::zero() {
        return Err(SeriesError::NonPositiveInterval);
    }
    if t_end < t0 {
        return Err(SeriesError::EndBeforeStart {
            start: t0.to_rfc3339(),
            end: t_end.to_rfc3339(),
        });
    }
    let dt_ns = dt.num_nanoseconds().ok_or(SeriesError::NonPositiveInterval)? as i128;
    let tol_ns = dt_ns / 10;
    let span_ns = (t_end - t0).num_nanoseconds().unwrap_or(i64::MAX) as i128;
    let n_slots = ((span_ns + tol_ns) / dt_ns) as usize + 1;

    let mut slots: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_slots];
    let mut seen = HashSet::new();
    for rec in records {
        if !(0.0..=1.0).contains(&rec.score) {
            return Err(SeriesError::ScoreOutOfRange(rec.score));
        }
        let off = (rec.timestamp - t0).num_nanoseconds().unwrap_or(i64::MAX) as i128;
        let idx = (off as f64 / dt_ns as f64).round() as i128;
        let resid = off - idx * dt_ns;
        if resid.abs() > tol_ns {
            return Err(SeriesError::OffGrid {
                timestamp: rec.timestamp.to_rfc3339(),
                offset_seconds: resid as f64 * 1e-9,
            });
        }
        if idx < 0 || idx >= n_slots as i128 {
            return Err(SeriesError::OutsideWindow(rec.timestamp.to_rfc3339()));
        }
        let slot = idx as usize;
        if !seen.insert((slot, rec.replicate_index)) {
            return Err(SeriesError::DuplicateReplicate {
                slot,
                replicate: rec.replicate_index,
            });
        }
        slots[slot].push((rec.replicate_index, rec.score));
    }

    let points = slots
        .into_iter()
        .map(|mut reps| {
            if reps.is_empty() {
                TimePoint::gap()
            } else {
                reps.sort_by_key(|&(r, _)| r);
                TimePoint::observed(reps.into_iter().map(|(_, s)| s).collect())
            }
        })
        .collect();
    EvenSeries::new(t0, dt, points)
}

/// Fills each missing slot with one synthetic replicate equal to the grand
/// mean of all observed replicate scores.
pub fn impute_missing(series: &EvenSeries) -> Result<EvenSeries, SeriesError> {
    let observed: Vec<f64> = series.observed_scores().collect();
    if observed.is_empty() {
        return Err(SeriesError::AllMissing);
    }
    let grand = mean(&observed);
    let points = series
        .points
        .iter()
        .map(|p| {
            if p.missing && p.replicate_scores.is_empty() {
                TimePoint {
                    replicate_scores: vec![grand],
                    missing: true,
                    imputed: true,
                }
            } else {
                p.clone()
            }
        })
        .collect();
    EvenSeries::new(series.t0, series.dt, points)
}

/// Per-slot replicate means.
pub fn aggregate_replicates(series: &EvenSeries) -> Result<Vec<f64>, SeriesError> {
    series
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.replicate_scores.is_empty() {
                Err(SeriesError::MissingSlot(i))
            } else {
                Ok(mean(&p.replicate_scores))
            }
        })
        .collect()
}

/// Mean and sample SD of all measured scores within one calendar period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalendarMean {
    pub period_start: NaiveDate,
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

fn calendar_means<F>(series: &EvenSeries, tz: FixedOffset, key: F) -> Vec<CalendarMean>
where
    F: Fn(NaiveDate) -> NaiveDate,
{
    let mut groups: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    for (ts, scores) in series.observed_with_time() {
        let date = ts.with_timezone(&tz).date_naive();
        groups.entry(key(date)).or_default().extend_from_slice(scores);
    }
    groups
        .into_iter()
        .map(|(period_start, xs)| CalendarMean {
            period_start,
            mean: mean(&xs),
            sd: sample_sd(&xs),
            count: xs.len(),
        })
        .collect()
}

/// Count-weighted means per local calendar day. Imputed slots are excluded.
pub fn daily_means(series: &EvenSeries, tz: FixedOffset) -> Vec<CalendarMean> {
    calendar_means(series, tz, |d| d)
}

/// Count-weighted means per Monday–Sunday week, keyed by the week's Monday.
pub fn weekly_means(series: &EvenSeries, tz: FixedOffset) -> Vec<CalendarMean> {
    calendar_means(series, tz, |d| {
        d - Duration::days(d.weekday().num_days_from_monday() as i64)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridCell {
    pub mean: Option<f64>,
    pub count: usize,
}

/// Mean score by local weekday (rows, Monday first) and time-of-day slot (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeekdayHourGrid {
    pub cells: Vec<Vec<GridCell>>,
    pub weekday_marginal: Vec<Option<f64>>,
    pub hour_marginal: Vec<Option<f64>>,
    /// Local start time of each column, `HH:MM`.
    pub slot_labels: Vec<String>,
    pub timezone_offset_minutes: i32,
}

pub const WEEKDAY_NAMES: [&str; 7] = [
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];

impl WeekdayHourGrid {
    /// `(weekday, slot)` of the highest populated cell.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        self.extreme(|a, b| a > b)
    }

    /// `(weekday, slot)` of the lowest populated cell.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        self.extreme(|a, b| a < b)
    }

    fn extreme(&self, better: impl Fn(f64, f64) -> bool) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for (d, row) in self.cells.iter().enumerate() {
            for (h, cell) in row.iter().enumerate() {
                if let Some(m) = cell.mean {
                    if best.is_none_or(|(_, b)| better(m, b)) {
                        best = Some(((d, h), m));
                    }
                }
            }
        }
        best.map(|(at, _)| at)
    }
}

pub fn weekday_hour_grid(series: &EvenSeries, tz: FixedOffset) -> Result<WeekdayHourGrid, SeriesError> {
    let fs = series.fs();
    let slots = fs.round();
    if slots < 1.0 || (fs - slots).abs() > 1e-9 {
        return Err(SeriesError::NonIntegerSlotsPerDay(fs));
    }
    let slots = slots as usize;
    let dt_s = dt_seconds(series.dt);

    let mut sums = vec![vec![(0.0f64, 0usize); slots]; 7];
    for (ts, scores) in series.observed_with_time() {
        let local = ts.with_timezone(&tz);
        let secs = local.num_seconds_from_midnight() as f64 + local.nanosecond() as f64 * 1e-9;
        let col = ((secs / dt_s).floor() as usize).min(slots - 1);
        let row = local.weekday().num_days_from_monday() as usize;
        let cell = &mut sums[row][col];
        cell.0 += scores.iter().sum::<f64>();
        cell.1 += scores.len();
    }

    let ratio = |s: f64, n: usize| (n > 0).then(|| s / n as f64);
    let cells = sums
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(s, n)| GridCell { mean: ratio(s, n), count: n })
                .collect()
        })
        .collect();
    let weekday_marginal = sums
        .iter()
        .map(|row| {
            let (s, n) = row.iter().fold((0.0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
            ratio(s, n)
        })
        .collect();
    let hour_marginal = (0..slots)
        .map(|h| {
            let (s, n) = sums.iter().fold((0.0, 0), |acc, row| (acc.0 + row[h].0, acc.1 + row[h].1));
            ratio(s, n)
        })
        .collect();
    let slot_labels = (0..slots)
        .map(|h| {
            let start = (h as f64 * dt_s).round() as u32;
            format!("{:02}:{:02}", start / 3600, (start % 3600) / 60)
        })
        .collect();

    Ok(WeekdayHourGrid {
        cells,
        weekday_marginal,
        hour_marginal,
        slot_labels,
        timezone_offset_minutes: tz.local_minus_utc() / 60,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn cest() -> FixedOffset {
        FixedOffset::east_opt(2 * 3600).unwrap()
    }

    fn at(y: i32, m: u32, d: u32, h: u32) -> DateTime<FixedOffset> {
        cest().with_ymd_and_hms(y, m, d, h, 0, 0).unwrap()
    }

    fn rec(ts: DateTime<FixedOffset>, rep: u32, score: f64) -> MeasurementRecord {
        MeasurementRecord::new(ts, rep, score).unwrap()
    }

    #[test]
    fn probe_window_has_702_slots() {
        let s = build_series(&[], at(2025, 8, 5, 6), Duration::hours(3), at(2025, 10, 31, 21)).unwrap();
        assert_eq!(s.len(), 702);
        assert_eq!(s.fs(), 8.0);
        assert_eq!(s.gap_indices().len(), 702);
    }

    #[test]
    fn empty_log_over_two_slots() {
        let s = build_series(&[], at(2025, 8, 5, 0), Duration::hours(3), at(2025, 8, 5, 3)).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.points().iter().all(|p| p.missing && p.replicate_scores.is_empty()));
    }

    #[test]
    fn nine_absent_slots_are_flagged() {
        let t0 = at(2025, 8, 5, 6);
        let dt = Duration::hours(3);
        let absent: Vec<usize> = (400..409).collect();
        let mut records = Vec::new();
        for slot in (0..702).filter(|i| !absent.contains(i)) {
            for rep in 0..10 {
                records.push(rec(t0 + dt * slot as i32, rep, 0.25 * (rep % 5) as f64));
            }
        }
        assert_eq!(records.len(), 6930);
        let s = build_series(&records, t0, dt, at(2025, 10, 31, 21)).unwrap();
        assert_eq!(s.gap_indices(), absent);
        assert_eq!(s.points().iter().filter(|p| p.is_observed()).count(), 693);
    }

    #[test]
    fn jitter_within_tolerance_snaps_to_slot() {
        let t0 = at(2025, 8, 5, 0);
        let dt = Duration::hours(3);
        let records = vec![
            rec(t0 + Duration::minutes(17), 0, 0.5),
            rec(t0 + dt - Duration::minutes(18), 0, 1.0),
        ];
        let s = build_series(&records, t0, dt, t0 + dt).unwrap();
        assert_eq!(s.points()[0].replicate_scores, vec![0.5]);
        assert_eq!(s.points()[1].replicate_scores, vec![1.0]);
    }

    #[test]
    fn rejects_bad_records() {
        let t0 = at(2025, 8, 5, 0);
        let dt = Duration::hours(3);
        let end = t0 + dt * 3;
        let off = build_series(&[rec(t0 + Duration::minutes(30), 0, 0.5)], t0, dt, end);
        assert!(matches!(off, Err(SeriesError::OffGrid { .. })));
        let outside = build_series(&[rec(t0 + dt * 5, 0, 0.5)], t0, dt, end);
        assert!(matches!(outside, Err(SeriesError::OutsideWindow(_))));
        let dup = build_series(&[rec(t0, 3, 0.5), rec(t0 + Duration::minutes(2), 3, 1.0)], t0, dt, end);
        assert_eq!(dup, Err(SeriesError::DuplicateReplicate { slot: 0, replicate: 3 }));
        assert_eq!(build_series(&[], t0, Duration::zero(), end), Err(SeriesError::NonPositiveInterval));
        assert!(MeasurementRecord::new(t0, 0, 1.25).is_err());
    }

    #[test]
    fn grid_is_closed() {
        let t0 = at(2025, 8, 5, 6);
        let s = build_series(&[], t0, Duration::hours(3), at(2025, 9, 5, 6)).unwrap();
        for i in 1..s.len() {
            assert_eq!(s.timestamp(i) - s.timestamp(i - 1), Duration::hours(3));
        }
    }

    #[test]
    fn imputation_uses_grand_mean() {
        let t0 = at(2025, 8, 5, 0);
        let dt = Duration::hours(3);
        let s = build_series(&[rec(t0, 0, 0.5), rec(t0 + dt, 0, 1.0)], t0, dt, t0 + dt * 2).unwrap();
        let filled = impute_missing(&s).unwrap();
        let p = &filled.points()[2];
        assert!(p.missing && p.imputed);
        assert_eq!(p.replicate_scores, vec![0.75]);
        assert_eq!(filled.points()[..2], s.points()[..2]);
    }

    #[test]
    fn imputation_of_complete_series_is_identity() {
        let t0 = at(2025, 8, 5, 0);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(impute_missing(&s).unwrap(), s);
    }

    #[test]
    fn imputation_requires_an_observation() {
        let t0 = at(2025, 8, 5, 0);
        let s = build_series(&[], t0, Duration::hours(3), t0).unwrap();
        assert_eq!(impute_missing(&s), Err(SeriesError::AllMissing));
    }

    #[test]
    fn aggregation() {
        let t0 = at(2025, 8, 5, 0);
        let pts = vec![
            TimePoint::observed(vec![0.25, 0.75]),
            TimePoint::observed(vec![0.4; 10]),
        ];
        let s = EvenSeries::new(t0, Duration::hours(3), pts).unwrap();
        let m = aggregate_replicates(&s).unwrap();
        assert_eq!(m[0], 0.5);
        assert!((m[1] - 0.4).abs() < 1e-15);

        let gappy = build_series(&[rec(t0, 0, 0.5)], t0, Duration::hours(3), t0 + Duration::hours(3)).unwrap();
        assert_eq!(aggregate_replicates(&gappy), Err(SeriesError::MissingSlot(1)));
    }

    #[test]
    fn calendar_means_constant_and_two_days() {
        let t0 = at(2025, 8, 4, 0);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &[0.5; 8]).unwrap();
        let d = daily_means(&s, cest());
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].mean, d[0].sd, d[0].count), (0.5, 0.0, 8));

        let mut vals = vec![0.0; 8];
        vals.extend([1.0; 8]);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &vals).unwrap();
        let d = daily_means(&s, cest());
        assert_eq!(d.iter().map(|c| c.mean).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn weeks_run_monday_to_sunday() {
        // Sunday 2025-08-10 then Monday 2025-08-11.
        let t0 = at(2025, 8, 10, 0);
        let mut vals = vec![0.0; 8];
        vals.extend([1.0; 8]);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &vals).unwrap();
        let w = weekly_means(&s, cest());
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].period_start, NaiveDate::from_ymd_opt(2025, 8, 4).unwrap());
        assert_eq!(w[1].period_start, NaiveDate::from_ymd_opt(2025, 8, 11).unwrap());
        assert_eq!((w[0].mean, w[1].mean), (0.0, 1.0));
    }

    #[test]
    fn monday_only_grid() {
        let t0 = at(2025, 8, 4, 0);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
        let g = weekday_hour_grid(&s, cest()).unwrap();
        assert!(g.cells[0].iter().all(|c| c.count == 1));
        assert!(g.cells[1..].iter().flatten().all(|c| c.mean.is_none()));
        assert_eq!(g.slot_labels[3], "09:00");
        assert_eq!(g.argmax(), Some((0, 7)));
        assert_eq!(g.argmin(), Some((0, 0)));
        assert_eq!(g.timezone_offset_minutes, 120);
    }

    #[test]
    fn grid_respects_timezone() {
        // 22:00 UTC on a Monday is 00:00 CEST on Tuesday.
        let utc = FixedOffset::east_opt(0).unwrap();
        let t0 = utc.with_ymd_and_hms(2025, 8, 4, 22, 0, 0).unwrap();
        let s = EvenSeries::from_values(t0, Duration::hours(3), &[0.9]).unwrap();
        let g = weekday_hour_grid(&s, cest()).unwrap();
        assert_eq!(g.cells[1][0].count, 1);
    }

    #[test]
    fn grid_rejects_fractional_day() {
        let t0 = at(2025, 8, 4, 0);
        let s = EvenSeries::from_values(t0, Duration::hours(5), &[0.5, 0.5]).unwrap();
        assert!(matches!(weekday_hour_grid(&s, cest()), Err(SeriesError::NonIntegerSlotsPerDay(_))));
    }

    #[test]
    fn uniform_grid_cells_equal() {
        let t0 = at(2025, 8, 4, 0);
        let s = EvenSeries::from_values(t0, Duration::hours(3), &vec![0.625; 8 * 10]).unwrap();
        let g = weekday_hour_grid(&s, cest()).unwrap();
        assert!(g.cells.iter().flatten().all(|c| c.mean == Some(0.625)));
    }
}
