//! Analysis time horizons.
//!
//! A horizon is one or more disjoint `[start, end)` windows in UTC. A plain
//! quarter is a single window; the same quarter aggregated across several
//! years is one horizon holding one window per year, with `T_H` the sum of
//! the window lengths.

use chrono::{DateTime, NaiveDate, TimeZone, Utc};

/// Labelled set of disjoint analysis windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizonSpec {
    pub label: String,
    /// Disjoint, ascending `[start, end)` windows.
    pub windows: Vec<(DateTime<Utc>, DateTime<Utc>)>,
}

impl HorizonSpec {
    /// Builds a horizon after checking the windows are valid and disjoint.
    ///
    /// # Panics
    /// If a window is empty or inverted, or two windows overlap.
    pub fn new(label: impl Into<String>, mut windows: Vec<(DateTime<Utc>, DateTime<Utc>)>) -> Self {
        assert!(!windows.is_empty(), "horizon needs at least one window");
        windows.sort();
        for w in &windows {
            assert!(w.1 > w.0, "window end must be after start");
        }
        for pair in windows.windows(2) {
            assert!(pair[1].0 >= pair[0].1, "horizon windows must be disjoint");
        }
        HorizonSpec {
            label: label.into(),
            windows,
        }
    }

    /// Total horizon length `T_H` in minutes.
    pub fn t_h_minutes(&self) -> f64 {
        self.windows
            .iter()
            .map(|(s, e)| (*e - *s).num_seconds() as f64 / 60.0)
            .sum()
    }

    /// Whether a calendar date (taken at 00:00 UTC) falls inside the horizon.
    pub fn contains_date(&self, date: NaiveDate) -> bool {
        let t = Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("valid midnight"));
        self.windows.iter().any(|(s, e)| t >= *s && t < *e)
    }

    /// Minutes of `[start, end)` that fall inside the horizon windows.
    pub fn clip_minutes(&self, start: DateTime<Utc>, end: DateTime<Utc>) -> f64 {
        self.windows
            .iter()
            .map(|(ws, we)| {
                let s = start.max(*ws);
                let e = end.min(*we);
                if e > s {
                    (e - s).num_seconds() as f64 / 60.0
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// The window that contains the date's midnight, if any.
    pub fn window_of(&self, date: NaiveDate) -> Option<(DateTime<Utc>, DateTime<Utc>)> {
        let t = Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("valid midnight"));
        self.windows
            .iter()
            .copied()
            .find(|(s, e)| t >= *s && t < *e)
    }

    pub fn year(year: i32) -> Self {
        HorizonSpec::new(
            year.to_string(),
            vec![(utc_date(year, 1, 1), utc_date(year + 1, 1, 1))],
        )
    }

    pub fn quarter(year: i32, quarter: u8) -> Self {
        HorizonSpec::new(
            format!("{year}Q{quarter}"),
            vec![quarter_window(year, quarter)],
        )
    }

    pub fn month(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month must be 1..=12");
        let (next_y, next_m) = if month == 12 {
            (year + 1, 1)
        } else {
            (year, month + 1)
        };
        HorizonSpec::new(
            format!("{year}-{month:02}"),
            vec![(utc_date(year, month, 1), utc_date(next_y, next_m, 1))],
        )
    }

    /// One horizon holding the same quarter of every year in the range.
    pub fn quarter_across_years(first_year: i32, last_year: i32, quarter: u8) -> Self {
        assert!(last_year >= first_year);
        let windows = (first_year..=last_year)
            .map(|y| quarter_window(y, quarter))
            .collect();
        HorizonSpec::new(format!("{first_year}-{last_year}:Q{quarter}"), windows)
    }
}

fn utc_date(year: i32, month: u32, day: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(year, month, day, 0, 0, 0)
        .single()
        .expect("valid date")
}

fn quarter_window(year: i32, quarter: u8) -> (DateTime<Utc>, DateTime<Utc>) {
    assert!((1..=4).contains(&quarter), "quarter must be 1..=4");
    let start_month = u32::from(quarter - 1) * 3 + 1;
    let start = utc_date(year, start_month, 1);
    let end = if quarter == 4 {
        utc_date(year + 1, 1, 1)
    } else {
        utc_date(year, start_month + 3, 1)
    };
    (start, end)
}

/// Calendar aggregation schemes for a run over a year range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AggregationPeriod {
    Month,
    Quarter,
    Year,
    QuarterAcrossYears,
    /// Explicit caller-supplied horizon.
    Custom(HorizonSpec),
}

/// Expands a period and year range into concrete horizons, in calendar order.
pub fn horizons_for(
    period: &AggregationPeriod,
    first_year: i32,
    last_year: i32,
) -> Vec<HorizonSpec> {
    assert!(last_year >= first_year, "year range is inverted");
    match period {
        AggregationPeriod::Month => (first_year..=last_year)
            .flat_map(|y| (1..=12).map(move |m| HorizonSpec::month(y, m)))
            .collect(),
        AggregationPeriod::Quarter => (first_year..=last_year)
            .flat_map(|y| (1..=4).map(move |q| HorizonSpec::quarter(y, q)))
            .collect(),
        AggregationPeriod::Year => (first_year..=last_year).map(HorizonSpec::year).collect(),
        AggregationPeriod::QuarterAcrossYears => (1..=4)
            .map(|q| HorizonSpec::quarter_across_years(first_year, last_year, q))
            .collect(),
        AggregationPeriod::Custom(spec) => vec![spec.clone()],
    }
}

/// Leap-aware day count helper used by tests and the synthesizer.
pub fn days_in_year(year: i32) -> i64 {
    (utc_date(year + 1, 1, 1) - utc_date(year, 1, 1)).num_days()
}
