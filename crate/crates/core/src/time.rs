//! Timestamps as they appear in controlled-English sentences, plus the
//! calendar arithmetic needed to compare them.
//!
//! A database covers one calendar year, so a [`Timestamp`] never carries a
//! year. Comparisons go through a [`Calendar`] which maps month/day pairs to
//! absolute minutes since January 1st.

use std::fmt;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

pub const MINUTES_PER_DAY: i64 = 24 * 60;
const LAST_MINUTE_OF_DAY: i64 = MINUTES_PER_DAY - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("day given without month")]
    DayWithoutMonth,
    #[error("qualifier `{0}` requires an hour")]
    QualifierWithoutHour(Qualifier),
    #[error("{field} out of range: {value}")]
    OutOfRange { field: &'static str, value: u32 },
}

/// How an hour in a sentence relates to the actual moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Qualifier {
    At,
    After,
    Before,
    #[default]
    None,
}

impl fmt::Display for Qualifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Qualifier::At => "at",
            Qualifier::After => "after",
            Qualifier::Before => "before",
            Qualifier::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Timestamp {
    day: Option<u8>,
    month: Option<u8>,
    hour: Option<u8>,
    minute: u8,
    qualifier: Qualifier,
}

impl Timestamp {
    pub fn new(
        day: Option<u8>,
        month: Option<u8>,
        hour: Option<u8>,
        minute: u8,
        qualifier: Qualifier,
    ) -> Result<Self, TimeError> {
        if let Some(d) = day {
            if month.is_none() {
                return Err(TimeError::DayWithoutMonth);
            }
            if !(1..=31).contains(&d) {
                return Err(TimeError::OutOfRange { field: "day", value: d.into() });
            }
        }
        if let Some(m) = month {
            if !(1..=12).contains(&m) {
                return Err(TimeError::OutOfRange { field: "month", value: m.into() });
            }
        }
        if let Some(h) = hour {
            if h > 23 {
                return Err(TimeError::OutOfRange { field: "hour", value: h.into() });
            }
        }
        if minute > 59 {
            return Err(TimeError::OutOfRange { field: "minute", value: minute.into() });
        }
        if qualifier != Qualifier::None && hour.is_none() {
            return Err(TimeError::QualifierWithoutHour(qualifier));
        }
        Ok(Timestamp { day, month, hour, minute, qualifier })
    }

    /// A calendar day with no hour.
    pub fn date(month: u8, day: u8) -> Result<Self, TimeError> {
        Self::new(Some(day), Some(month), None, 0, Qualifier::None)
    }

    /// A day and an exact hour ("at H o'clock on ...").
    pub fn at(month: u8, day: u8, hour: u8) -> Result<Self, TimeError> {
        Self::new(Some(day), Some(month), Some(hour), 0, Qualifier::At)
    }

    pub fn day(&self) -> Option<u8> {
        self.day
    }
    pub fn month(&self) -> Option<u8> {
        self.month
    }
    pub fn hour(&self) -> Option<u8> {
        self.hour
    }
    pub fn minute(&self) -> u8 {
        self.minute
    }
    pub fn qualifier(&self) -> Qualifier {
        self.qualifier
    }

    /// True when the timestamp pins a calendar date (at least a month).
    pub fn is_dated(&self) -> bool {
        self.month.is_some()
    }

    /// Fill missing components from `other`, keeping ours where present.
    /// Only refines when the dates do not disagree.
    pub fn refined_by(&self, other: &Timestamp) -> Timestamp {
        let dates_agree = match (self.month, other.month) {
            (Some(a), Some(b)) => a == b && (self.day.is_none() || self.day == other.day),
            _ => true,
        };
        if !dates_agree {
            return *self;
        }
        let mut out = *self;
        if out.month.is_none() {
            out.month = other.month;
        }
        if out.day.is_none() && out.month == other.month {
            out.day = other.day;
        }
        if out.hour.is_none() {
            out.hour = other.hour;
            out.minute = other.minute;
            out.qualifier = other.qualifier;
        }
        out
    }

    /// Minutes-of-day interval described by the hour part.
    pub fn day_interval(&self) -> (i64, i64) {
        match self.hour {
            None => (0, LAST_MINUTE_OF_DAY),
            Some(h) => {
                let m = i64::from(h) * 60 + i64::from(self.minute);
                match self.qualifier {
                    Qualifier::After => (m, LAST_MINUTE_OF_DAY),
                    Qualifier::Before => (0, m),
                    Qualifier::At | Qualifier::None => (m, m),
                }
            }
        }
    }
}

/// Maps month/day pairs of the database year onto absolute minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calendar {
    year: i32,
}

pub const DEFAULT_YEAR: i32 = 2009;

impl Default for Calendar {
    fn default() -> Self {
        Calendar { year: DEFAULT_YEAR }
    }
}

impl Calendar {
    pub fn new(year: i32) -> Self {
        Calendar { year }
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    fn day_index(&self, month: u8, day: u8) -> Option<i64> {
        NaiveDate::from_ymd_opt(self.year, month.into(), day.into()).map(|d| i64::from(d.ordinal0()))
    }

    fn month_span(&self, month: u8) -> Option<(i64, i64)> {
        let first = self.day_index(month, 1)?;
        let next = if month == 12 {
            NaiveDate::from_ymd_opt(self.year + 1, 1, 1)?.signed_duration_since(NaiveDate::from_ymd_opt(self.year, 1, 1)?).num_days()
        } else {
            self.day_index(month + 1, 1)?
        };
        Some((first, next - 1))
    }

    /// Absolute interval covered by a dated timestamp; `None` for undated ones
    /// or impossible dates (e.g. 31 February).
    pub fn interval(&self, ts: &Timestamp) -> Option<TimeWindow> {
        let month = ts.month?;
        let (first_day, last_day) = match ts.day {
            Some(d) => {
                let i = self.day_index(month, d)?;
                (i, i)
            }
            None => self.month_span(month)?,
        };
        let (a, b) = ts.day_interval();
        Some(TimeWindow {
            start: first_day * MINUTES_PER_DAY + a,
            end: last_day * MINUTES_PER_DAY + b,
        })
    }

    /// Nominal moment of a fully specified timestamp (date and hour).
    pub fn moment(&self, ts: &Timestamp) -> Option<i64> {
        let day = self.day_index(ts.month?, ts.day?)?;
        let hour = i64::from(ts.hour?);
        Some(day * MINUTES_PER_DAY + hour * 60 + i64::from(ts.minute))
    }

    /// Window from the start of `from`'s interval to the end of `to`'s.
    pub fn between(&self, from: &Timestamp, to: &Timestamp) -> Option<TimeWindow> {
        let a = self.interval(from)?;
        let b = self.interval(to)?;
        Some(TimeWindow { start: a.start.min(b.start), end: a.end.max(b.end) })
    }

    /// The `days` calendar days ending with `asof`'s day, inclusive.
    pub fn days_before(&self, asof: &Timestamp, days: u32) -> Option<TimeWindow> {
        let day = self.day_index(asof.month?, asof.day?)?;
        let start_day = (day - i64::from(days)).max(0);
        Some(TimeWindow {
            start: start_day * MINUTES_PER_DAY,
            end: day * MINUTES_PER_DAY + LAST_MINUTE_OF_DAY,
        })
    }

    /// Whether a fact's timestamp can fall inside `window`. Undated
    /// timestamps are checked on every day the window touches.
    pub fn overlaps(&self, ts: &Timestamp, window: &TimeWindow) -> bool {
        if let Some(iv) = self.interval(ts) {
            return iv.intersects(window);
        }
        if ts.is_dated() {
            return false;
        }
        let (a, b) = ts.day_interval();
        let first = window.start.div_euclid(MINUTES_PER_DAY);
        let last = window.end.div_euclid(MINUTES_PER_DAY);
        (first..=last).any(|d| {
            let iv = TimeWindow { start: d * MINUTES_PER_DAY + a, end: d * MINUTES_PER_DAY + b };
            iv.intersects(window)
        })
    }

    /// Parse `YYYY-MM-DD` into a year and a date-only timestamp.
    pub fn parse_iso_date(text: &str) -> Option<(i32, Timestamp)> {
        let d = NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").ok()?;
        let ts = Timestamp::date(d.month() as u8, d.day() as u8).ok()?;
        Some((d.year(), ts))
    }
}

/// Closed interval of absolute minutes within the database year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn intersects(&self, other: &TimeWindow) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn contains(&self, other: &TimeWindow) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

pub const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];

pub fn month_name(month: u8) -> &'static str {
    MONTHS[usize::from(month.clamp(1, 12)) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_are_enforced() {
        assert_eq!(Timestamp::new(Some(7), None, None, 0, Qualifier::None), Err(TimeError::DayWithoutMonth));
        assert_eq!(
            Timestamp::new(None, None, None, 0, Qualifier::After),
            Err(TimeError::QualifierWithoutHour(Qualifier::After))
        );
        assert!(Timestamp::new(None, Some(13), None, 0, Qualifier::None).is_err());
        assert!(Timestamp::new(None, None, Some(24), 0, Qualifier::None).is_err());
    }

    #[test]
    fn after_covers_rest_of_day() {
        let ts = Timestamp::new(None, None, Some(19), 0, Qualifier::After).unwrap();
        assert_eq!(ts.day_interval(), (19 * 60, 1439));
    }

    #[test]
    fn undated_fact_matches_matching_hours_only() {
        let cal = Calendar::default();
        let after19 = Timestamp::new(None, None, Some(19), 0, Qualifier::After).unwrap();
        let evening = cal.between(&Timestamp::at(11, 7, 19).unwrap(), &Timestamp::at(11, 7, 21).unwrap()).unwrap();
        let morning = cal.between(&Timestamp::at(11, 7, 8).unwrap(), &Timestamp::at(11, 7, 9).unwrap()).unwrap();
        assert!(cal.overlaps(&after19, &evening));
        assert!(!cal.overlaps(&after19, &morning));
        assert!(cal.overlaps(&Timestamp::default(), &morning));
    }

    #[test]
    fn dated_overlap_and_moment() {
        let cal = Calendar::default();
        let shot = Timestamp::at(11, 7, 20).unwrap();
        let nov8 = cal.interval(&Timestamp::date(11, 8).unwrap()).unwrap();
        let nov7 = cal.interval(&Timestamp::date(11, 7).unwrap()).unwrap();
        assert!(!cal.overlaps(&shot, &nov8));
        assert!(cal.overlaps(&shot, &nov7));
        let a = cal.moment(&shot).unwrap();
        let b = cal.moment(&Timestamp::at(11, 8, 20).unwrap()).unwrap();
        assert_eq!(b - a, MINUTES_PER_DAY);
    }

    #[test]
    fn refinement_fills_missing_hour() {
        let q = Timestamp::date(11, 7).unwrap();
        let basic = Timestamp::at(11, 7, 20).unwrap();
        assert_eq!(q.refined_by(&basic), basic);
        let other_day = Timestamp::date(11, 8).unwrap();
        assert_eq!(other_day.refined_by(&basic), other_day);
    }

    #[test]
    fn iso_dates() {
        let (y, ts) = Calendar::parse_iso_date("2009-11-10").unwrap();
        assert_eq!(y, 2009);
        assert_eq!(ts, Timestamp::date(11, 10).unwrap());
        assert!(Calendar::parse_iso_date("2009-13-10").is_none());
    }
}
