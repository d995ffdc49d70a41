//! Ingestion of raw AP measurements and resampling onto a regular grid.
//!
//! Raw traces arrive as CSV rows `ap_id,timestamp,bytes,users` with UTC
//! epoch-second timestamps. [`resample`] aggregates them into windows of
//! `period_seconds`: bytes are summed and users averaged, windows without
//! any record are zero-filled.
//!
//! All calendar math (hour of day, weekday) happens in a single fixed-offset
//! [`Timezone`], UTC unless configured otherwise. Weekdays are indexed with
//! Monday = 0.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PERIOD_SECONDS: u32 = 600;
pub const SECONDS_PER_HOUR: i64 = 3600;
pub const SECONDS_PER_DAY: i64 = 86_400;
pub const CSV_HEADER: [&str; 4] = ["ap_id", "timestamp", "bytes", "users"];

/// A fixed UTC offset used for calendar features and weekly slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Timezone {
    offset_seconds: i32,
}

impl Timezone {
    pub const UTC: Timezone = Timezone { offset_seconds: 0 };

    pub fn from_offset_seconds(offset_seconds: i32) -> Result<Self> {
        if offset_seconds.unsigned_abs() >= 24 * 3600 || offset_seconds % 60 != 0 {
            return Err(Error::InvalidTimezone(format!("{offset_seconds}s")));
        }
        Ok(Self { offset_seconds })
    }

    pub fn offset_seconds(self) -> i32 {
        self.offset_seconds
    }

    pub fn local_seconds(self, utc: i64) -> i64 {
        utc + i64::from(self.offset_seconds)
    }
}

impl FromStr for Timezone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("utc") || t == "Z" || t.eq_ignore_ascii_case("gmt") {
            return Ok(Self::UTC);
        }
        let bad = || Error::InvalidTimezone(s.to_string());
        let rest = t
            .strip_prefix("UTC")
            .or_else(|| t.strip_prefix("utc"))
            .unwrap_or(t);
        let (sign, digits) = match rest.as_bytes().first() {
            Some(b'+') => (1, &rest[1..]),
            Some(b'-') => (-1, &rest[1..]),
            _ => return Err(bad()),
        };
        let (hh, mm) = match digits.split_once(':') {
            Some((h, m)) => (h, m),
            None if digits.len() == 4 => digits.split_at(2),
            None => (digits, "0"),
        };
        let hours: i32 = hh.parse().map_err(|_| bad())?;
        let minutes: i32 = mm.parse().map_err(|_| bad())?;
        if !(0..24).contains(&hours) || !(0..60).contains(&minutes) {
            return Err(bad());
        }
        Self::from_offset_seconds(sign * (hours * 3600 + minutes * 60))
    }
}

impl fmt::Display for Timezone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset_seconds == 0 {
            return f.write_str("UTC");
        }
        let sign = if self.offset_seconds < 0 { '-' } else { '+' };
        let abs = self.offset_seconds.unsigned_abs();
        write!(f, "{sign}{:02}:{:02}", abs / 3600, (abs % 3600) / 60)
    }
}

/// Calendar position of an instant in local time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalendarPoint {
    /// Days since 1970-01-01 (local).
    pub day: i64,
    /// Monday = 0 .. Sunday = 6.
    pub weekday: usize,
    pub hour: usize,
    pub second_of_hour: u32,
}

impl CalendarPoint {
    pub fn at(utc: i64, tz: Timezone) -> Self {
        let local = tz.local_seconds(utc);
        let day = local.div_euclid(SECONDS_PER_DAY);
        let sod = local.rem_euclid(SECONDS_PER_DAY);
        // 1970-01-01 was a Thursday.
        let weekday = (day + 3).rem_euclid(7) as usize;
        Self {
            day,
            weekday,
            hour: (sod / SECONDS_PER_HOUR) as usize,
            second_of_hour: (sod % SECONDS_PER_HOUR) as u32,
        }
    }

    /// Weekly slot index `weekday * 24 + hour` in `0..168`.
    pub fn slot(&self) -> usize {
        self.weekday * 24 + self.hour
    }

    pub fn date(&self) -> NaiveDate {
        DateTime::from_timestamp(self.day * SECONDS_PER_DAY, 0)
            .expect("day index within chrono range")
            .date_naive()
    }

    pub fn fractional_hour(&self) -> f64 {
        self.hour as f64 + f64::from(self.second_of_hour) / 3600.0
    }
}

/// Days since the epoch for a calendar date.
pub fn day_index(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp()
        .div_euclid(SECONDS_PER_DAY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub timestamp: i64,
    pub bytes: f64,
    pub users: f64,
}

/// Raw measurements of a single access point, sorted by timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    ap_id: String,
    records: Vec<RawRecord>,
}

impl RawTrace {
    /// Builds a trace, sorting records and rejecting duplicates or negatives.
    pub fn new(ap_id: impl Into<String>, mut records: Vec<RawRecord>) -> Result<Self> {
        let ap_id = ap_id.into();
        for r in &records {
            check_non_negative(0, "bytes", r.bytes)?;
            check_non_negative(0, "users", r.users)?;
        }
        records.sort_by_key(|r| r.timestamp);
        if let Some(w) = records.windows(2).find(|w| w[0].timestamp == w[1].timestamp) {
            return Err(Error::DuplicateTimestamp {
                line: 0,
                ap_id,
                timestamp: w[0].timestamp,
            });
        }
        Ok(Self { ap_id, records })
    }

    pub fn ap_id(&self) -> &str {
        &self.ap_id
    }

    pub fn records(&self) -> &[RawRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn check_non_negative(line: u64, field: &'static str, value: f64) -> Result<()> {
    if value.is_nan() {
        return Err(Error::Malformed {
            line,
            message: format!("{field} is NaN"),
        });
    }
    if value < 0.0 {
        return Err(Error::NegativeValue { line, field, value });
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    ap_id: String,
    timestamp: i64,
    bytes: f64,
    users: f64,
}

/// Parses a CSV with header `ap_id,timestamp,bytes,users` into one trace per AP.
///
/// Traces are returned in order of first appearance. Errors carry the
/// 1-based line number of the offending row.
pub fn parse_trace_csv<R: Read>(input: R) -> Result<Vec<RawTrace>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Malformed {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut order: Vec<String> = Vec::new();
    let mut grouped: HashMap<String, Vec<(u64, RawRecord)>> = HashMap::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Malformed {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: CsvRow = record.deserialize(Some(&header)).map_err(|e| Error::Malformed {
            line,
            message: e.to_string(),
        })?;
        check_non_negative(line, "bytes", row.bytes)?;
        check_non_negative(line, "users", row.users)?;
        let entry = grouped.entry(row.ap_id.clone()).or_insert_with(|| {
            order.push(row.ap_id.clone());
            Vec::new()
        });
        entry.push((
            line,
            RawRecord {
                timestamp: row.timestamp,
                bytes: row.bytes,
                users: row.users,
            },
        ));
    }

    order
        .into_iter()
        .map(|ap_id| {
            let mut rows = grouped.remove(&ap_id).unwrap_or_default();
            rows.sort_by_key(|(line, r)| (r.timestamp, *line));
            if let Some(w) = rows.windows(2).find(|w| w[0].1.timestamp == w[1].1.timestamp) {
                return Err(Error::DuplicateTimestamp {
                    line: w[1].0,
                    ap_id,
                    timestamp: w[1].1.timestamp,
                });
            }
            Ok(RawTrace {
                ap_id,
                records: rows.into_iter().map(|(_, r)| r).collect(),
            })
        })
        .collect()
}

/// A regularly sampled per-AP series of load (bytes per window) and mean users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSeries {
    ap_id: String,
    start: i64,
    period_seconds: u32,
    #[serde(default)]
    timezone: Timezone,
    load: Vec<f64>,
    users: Vec<f64>,
}

impl LoadSeries {
    pub fn new(
        ap_id: impl Into<String>,
        start: i64,
        period_seconds: u32,
        load: Vec<f64>,
        users: Vec<f64>,
    ) -> Result<Self> {
        check_period(period_seconds)?;
        if load.len() != users.len() {
            return Err(Error::LengthMismatch(format!(
                "load has {} samples, users has {}",
                load.len(),
                users.len()
            )));
        }
        if load.is_empty() {
            return Err(Error::EmptyInput("load series"));
        }
        if start.rem_euclid(i64::from(period_seconds)) != 0 {
            return Err(Error::InvalidConfig(format!(
                "start {start} is not aligned to the {period_seconds} s grid"
            )));
        }
        for (i, (&l, &u)) in load.iter().zip(&users).enumerate() {
            let line = i as u64;
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::NonFinite(format!("sample {i}")));
            }
            check_non_negative(line, "load", l)?;
            check_non_negative(line, "users", u)?;
        }
        Ok(Self {
            ap_id: ap_id.into(),
            start,
            period_seconds,
            timezone: Timezone::UTC,
            load,
            users,
        })
    }

    pub fn with_timezone(mut self, tz: Timezone) -> Self {
        self.timezone = tz;
        self
    }

    pub fn with_ap_id(mut self, ap_id: impl Into<String>) -> Self {
        self.ap_id = ap_id.into();
        self
    }

    pub fn ap_id(&self) -> &str {
        &self.ap_id
    }
    pub fn start(&self) -> i64 {
        self.start
    }
    pub fn period_seconds(&self) -> u32 {
        self.period_seconds
    }
    pub fn timezone(&self) -> Timezone {
        self.timezone
    }
    pub fn load(&self) -> &[f64] {
        &self.load
    }
    pub fn users(&self) -> &[f64] {
        &self.users
    }
    pub fn len(&self) -> usize {
        self.load.len()
    }
    pub fn is_empty(&self) -> bool {
        self.load.is_empty()
    }

    /// Samples per hour, `3600 / period`.
    pub fn samples_per_hour(&self) -> usize {
        (SECONDS_PER_HOUR / i64::from(self.period_seconds)) as usize
    }

    pub fn samples_per_day(&self) -> usize {
        self.samples_per_hour() * 24
    }

    pub fn timestamp(&self, index: usize) -> i64 {
        self.start + index as i64 * i64::from(self.period_seconds)
    }

    pub fn calendar(&self, index: usize) -> CalendarPoint {
        CalendarPoint::at(self.timestamp(index), self.timezone)
    }

    /// Total covered duration in seconds.
    pub fn span_seconds(&self) -> i64 {
        self.len() as i64 * i64::from(self.period_seconds)
    }

    /// Keeps samples `[from, to)`, adjusting the start timestamp.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::InsufficientData(format!(
                "cannot slice [{from}, {to}) out of {} samples",
                self.len()
            )));
        }
        Ok(Self {
            ap_id: self.ap_id.clone(),
            start: self.timestamp(from),
            period_seconds: self.period_seconds,
            timezone: self.timezone,
            load: self.load[from..to].to_vec(),
            users: self.users[from..to].to_vec(),
        })
    }

    /// The first `days` whole days of the series.
    pub fn truncate_days(&self, days: u32) -> Result<Self> {
        let n = days as usize * self.samples_per_day();
        if days == 0 || n > self.len() {
            return Err(Error::SeriesTooShort(format!(
                "ap `{}` has {} samples, {days} days need {n}",
                self.ap_id,
                self.len()
            )));
        }
        self.slice(0, n)
    }

    /// Multiplies load (not users) by a positive constant.
    pub fn scale_load(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.load.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Writes the series with the ingestion schema, one row per window.
    pub fn write_csv<W: Write>(&self, writer: &mut csv::Writer<W>) -> Result<()> {
        for (i, (l, u)) in self.load.iter().zip(&self.users).enumerate() {
            writer.write_record([
                self.ap_id.as_str(),
                &self.timestamp(i).to_string(),
                &l.to_string(),
                &u.to_string(),
            ])?;
        }
        Ok(())
    }
}

/// Writes several series into one CSV document with header.
pub fn write_series_csv<'a, W: Write>(
    out: W,
    series: impl IntoIterator<Item = &'a LoadSeries>,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for s in series {
        s.write_csv(&mut writer)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes raw traces with the ingestion schema.
pub fn write_trace_csv<'a, W: Write>(out: W, traces: impl IntoIterator<Item = &'a RawTrace>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for t in traces {
        for r in &t.records {
            writer.write_record([
                t.ap_id.as_str(),
                &r.timestamp.to_string(),
                &r.bytes.to_string(),
                &r.users.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn check_period(period_seconds: u32) -> Result<()> {
    if period_seconds == 0 || 3600 % period_seconds != 0 {
        return Err(Error::InvalidPeriod(period_seconds));
    }
    Ok(())
}

/// Resamples a raw trace onto a `period_seconds` grid.
///
/// The grid starts at the first timestamp aligned down to a period boundary
/// and ends with the window containing the last record. Window loads are
/// byte sums; window users are the mean of the records in the window. Empty
/// windows get zero load and zero users.
pub fn resample(raw: &RawTrace, period_seconds: u32) -> Result<LoadSeries> {
    check_period(period_seconds)?;
    let (first, last) = match (raw.records.first(), raw.records.last()) {
        (Some(f), Some(l)) => (f.timestamp, l.timestamp),
        _ => return Err(Error::EmptyTrace(raw.ap_id.clone())),
    };
    let period = i64::from(period_seconds);
    let start = first.div_euclid(period) * period;
    let len = ((last - start) / period + 1) as usize;

    let mut load = vec![0.0; len];
    let mut users = vec![0.0; len];
    let mut counts = vec![0u32; len];
    for r in &raw.records {
        let idx = ((r.timestamp - start) / period) as usize;
        load[idx] += r.bytes;
        users[idx] += r.users;
        counts[idx] += 1;
    }
    for (u, &c) in users.iter_mut().zip(&counts) {
        if c > 0 {
            *u /= f64::from(c);
        }
    }
    LoadSeries::new(raw.ap_id.clone(), start, period_seconds, load, users)
}

/// Sine/cosine encodings of hour of day and day of week, one per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CalendarFeatures {
    pub hour_sin: Vec<f64>,
    pub hour_cos: Vec<f64>,
    pub dow_sin: Vec<f64>,
    pub dow_cos: Vec<f64>,
}

impl CalendarFeatures {
    pub fn len(&self) -> usize {
        self.hour_sin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hour_sin.is_empty()
    }
}

pub fn calendar_features(series: &LoadSeries) -> CalendarFeatures {
    let n = series.len();
    let mut out = CalendarFeatures {
        hour_sin: Vec::with_capacity(n),
        hour_cos: Vec::with_capacity(n),
        dow_sin: Vec::with_capacity(n),
        dow_cos: Vec::with_capacity(n),
    };
    for i in 0..n {
        let cal = series.calendar(i);
        let hour_angle = 2.0 * PI * cal.fractional_hour() / 24.0;
        let dow_angle = 2.0 * PI * cal.weekday as f64 / 7.0;
        out.hour_sin.push(hour_angle.sin());
        out.hour_cos.push(hour_angle.cos());
        out.dow_sin.push(dow_angle.sin());
        out.dow_cos.push(dow_angle.cos());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // 2024-01-01T00:00:00Z, a Monday.
    const MONDAY: i64 = 1_704_067_200;

    fn rec(timestamp: i64, bytes: f64, users: f64) -> RawRecord {
        RawRecord {
            timestamp,
            bytes,
            users,
        }
    }

    #[test]
    fn header_only_is_empty() {
        let traces = parse_trace_csv("ap_id,timestamp,bytes,users\n".as_bytes()).unwrap();
        assert!(traces.is_empty());
    }

    #[test]
    fn groups_by_ap() {
        let csv = "ap_id,timestamp,bytes,users\nA,600,1,1\nB,0,5,2\nA,0,3,1\n";
        let traces = parse_trace_csv(csv.as_bytes()).unwrap();
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].ap_id(), "A");
        assert_eq!(traces[0].records().len(), 2);
        assert_eq!(traces[0].records()[0].timestamp, 0);
        assert_eq!(traces[1].records().len(), 1);
    }

    #[test]
    fn negative_bytes_names_line() {
        let csv = "ap_id,timestamp,bytes,users\nA,0,1,1\nA,600,-5,1\n";
        match parse_trace_csv(csv.as_bytes()) {
            Err(Error::NegativeValue { line, field, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "bytes");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_timestamp_rejected() {
        let csv = "ap_id,timestamp,bytes,users\nA,0,1,1\nA,600,2,1\nA,0,3,1\n";
        match parse_trace_csv(csv.as_bytes()) {
            Err(Error::DuplicateTimestamp { line, timestamp, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(timestamp, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "ap_id,timestamp,bytes,users\nA,0,1,1\nA,notanumber,2,1\n";
        match parse_trace_csv(csv.as_bytes()) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad_header = "ap,timestamp,bytes,users\nA,0,1,1\n";
        assert!(matches!(
            parse_trace_csv(bad_header.as_bytes()),
            Err(Error::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn resample_sums_one_window() {
        let raw = RawTrace::new("A", vec![rec(0, 10.0, 1.0), rec(120, 20.0, 3.0), rec(540, 30.0, 2.0)])
            .unwrap();
        let s = resample(&raw, 600).unwrap();
        assert_eq!(s.load(), &[60.0]);
        assert_eq!(s.users(), &[2.0]);
    }

    #[test]
    fn resample_single_record() {
        let raw = RawTrace::new("A", vec![rec(MONDAY + 30, 7.0, 4.0)]).unwrap();
        let s = resample(&raw, 600).unwrap();
        assert_eq!(s.users(), &[4.0]);
        assert_eq!(s.start(), MONDAY);
    }

    #[test]
    fn resample_zero_fills_gap() {
        // 25 minutes of data with nothing in the middle window.
        let raw = RawTrace::new("A", vec![rec(0, 5.0, 1.0), rec(1500, 7.0, 2.0)]).unwrap();
        let s = resample(&raw, 600).unwrap();
        assert_eq!(s.load(), &[5.0, 0.0, 7.0]);
        assert_eq!(s.users(), &[1.0, 0.0, 2.0]);
    }

    #[test]
    fn resample_rejects_bad_period_and_empty() {
        let raw = RawTrace::new("A", vec![rec(0, 5.0, 1.0)]).unwrap();
        assert!(matches!(resample(&raw, 700), Err(Error::InvalidPeriod(700))));
        let empty = RawTrace::new("E", vec![]).unwrap();
        assert!(matches!(resample(&empty, 600), Err(Error::EmptyTrace(_))));
    }

    #[test]
    fn calendar_zero_phase_and_quarter() {
        let s = LoadSeries::new("A", MONDAY, 3600, vec![0.0; 24 * 4], vec![0.0; 24 * 4]).unwrap();
        let cal = calendar_features(&s);
        assert_eq!(
            (cal.hour_sin[0], cal.hour_cos[0], cal.dow_sin[0], cal.dow_cos[0]),
            (0.0, 1.0, 0.0, 1.0)
        );
        assert!((cal.hour_sin[6] - 1.0).abs() < 1e-12);
        assert!(cal.hour_cos[6].abs() < 1e-12);
        // Thursday 12:00 = 3 days + 12 h after Monday midnight.
        let thu = 3 * 24 + 12;
        assert!(cal.hour_sin[thu].abs() < 1e-12);
        assert!((cal.hour_cos[thu] + 1.0).abs() < 1e-12);
        let angle = 2.0 * PI * 3.0 / 7.0;
        assert!((cal.dow_sin[thu] - angle.sin()).abs() < 1e-12);
        assert!((cal.dow_cos[thu] - angle.cos()).abs() < 1e-12);
    }

    #[test]
    fn calendar_uses_fractional_hour_and_timezone() {
        let s = LoadSeries::new("A", MONDAY, 600, vec![0.0; 4], vec![0.0; 4])
            .unwrap()
            .with_timezone("+06:00".parse().unwrap());
        let cal = calendar_features(&s);
        // Local 06:00 on the first sample.
        assert!((cal.hour_sin[0] - 1.0).abs() < 1e-12);
        let expected = 2.0 * PI * (6.0 + 10.0 / 60.0) / 24.0;
        assert!((cal.hour_sin[1] - expected.sin()).abs() < 1e-12);
    }

    #[test]
    fn timezone_parsing() {
        assert_eq!("UTC".parse::<Timezone>().unwrap(), Timezone::UTC);
        assert_eq!("+02:00".parse::<Timezone>().unwrap().offset_seconds(), 7200);
        assert_eq!("-0530".parse::<Timezone>().unwrap().offset_seconds(), -19800);
        assert_eq!("UTC+1".parse::<Timezone>().unwrap().offset_seconds(), 3600);
        assert!("Mars/Olympus".parse::<Timezone>().is_err());
        assert_eq!(Timezone::from_offset_seconds(-19800).unwrap().to_string(), "-05:30");
    }

    #[test]
    fn calendar_point_weekday() {
        let p = CalendarPoint::at(MONDAY + 3 * SECONDS_PER_DAY + 12 * 3600, Timezone::UTC);
        assert_eq!((p.weekday, p.hour), (3, 12));
        assert_eq!(p.date(), NaiveDate::from_ymd_opt(2024, 1, 4).unwrap());
        assert_eq!(day_index(p.date()), p.day);
    }

    #[test]
    fn series_invariants() {
        assert!(LoadSeries::new("A", 0, 600, vec![], vec![]).is_err());
        assert!(LoadSeries::new("A", 0, 600, vec![1.0], vec![]).is_err());
        assert!(LoadSeries::new("A", 0, 600, vec![-1.0], vec![0.0]).is_err());
        assert!(LoadSeries::new("A", 5, 600, vec![1.0], vec![0.0]).is_err());
        assert!(LoadSeries::new("A", 0, 7, vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn csv_round_trip_through_ingestion() {
        let s = LoadSeries::new("ap-1", MONDAY, 600, vec![1.5, 0.0, 3.25], vec![2.0, 0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&mut buf, [&s]).unwrap();
        let traces = parse_trace_csv(buf.as_slice()).unwrap();
        let back = resample(&traces[0], 600).unwrap();
        assert_eq!(back, s);
    }
}
