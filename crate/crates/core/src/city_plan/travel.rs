//! Travel-time estimates from average speeds.

use thiserror::Error;

use super::{Path, StreetCode};
use crate::time::Timestamp;

pub const DEFAULT_PEDESTRIAN_KMH: f64 = 5.0;
pub const DEFAULT_CAR_KMH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TravelMode {
    #[default]
    Pedestrian,
    Car,
}

/// Car speed on one street during `[hour_from, hour_to)`; wraps past midnight
/// when `hour_to <= hour_from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedBand {
    pub street: StreetCode,
    pub hour_from: u8,
    pub hour_to: u8,
    pub kmh: f64,
}

impl SpeedBand {
    fn covers(&self, hour: u8) -> bool {
        if self.hour_from < self.hour_to {
            (self.hour_from..self.hour_to).contains(&hour)
        } else {
            hour >= self.hour_from || hour < self.hour_to
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("speed config line {line}: {message}")]
pub struct SpeedConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedTable {
    pub pedestrian_kmh: f64,
    pub car_default_kmh: f64,
    pub bands: Vec<SpeedBand>,
}

impl Default for SpeedTable {
    fn default() -> Self {
        SpeedTable { pedestrian_kmh: DEFAULT_PEDESTRIAN_KMH, car_default_kmh: DEFAULT_CAR_KMH, bands: Vec::new() }
    }
}

impl SpeedTable {
    /// Parse `car|street|hour_from|hour_to|kmh` lines. `pedestrian|kmh` and
    /// `car|*|||kmh` override the defaults.
    pub fn load(text: &str) -> Result<SpeedTable, SpeedConfigError> {
        let mut table = SpeedTable::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| SpeedConfigError { line, message };
            let f: Vec<&str> = content.split('|').map(str::trim).collect();
            let speed = |s: &str| -> Result<f64, SpeedConfigError> {
                let v: f64 = s.parse().map_err(|_| err(format!("bad speed `{s}`")))?;
                if v > 0.0 && v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(format!("speed must be positive, got {s}")))
                }
            };
            match f.as_slice() {
                ["pedestrian", kmh] => table.pedestrian_kmh = speed(kmh)?,
                ["car", "*", _, _, kmh] => table.car_default_kmh = speed(kmh)?,
                ["car", street, from, to, kmh] => {
                    let num = |s: &str| s.parse::<u32>().map_err(|_| err(format!("bad number `{s}`")));
                    let (from, to) = (num(from)?, num(to)?);
                    if from > 24 || to > 24 {
                        return Err(err("hours must be within 0..=24".into()));
                    }
                    table.bands.push(SpeedBand { street: num(street)?, hour_from: from as u8, hour_to: to as u8, kmh: speed(kmh)? });
                }
                _ => return Err(err(format!("unrecognised record `{content}`"))),
            }
        }
        Ok(table)
    }

    pub fn car_speed(&self, street: Option<StreetCode>, hour: Option<u8>) -> f64 {
        match (street, hour) {
            (Some(s), Some(h)) => self
                .bands
                .iter()
                .find(|b| b.street == s && b.covers(h))
                .map_or(self.car_default_kmh, |b| b.kmh),
            _ => self.car_default_kmh,
        }
    }

    /// Unrounded minutes along `path`.
    pub fn travel_minutes_exact(&self, path: &Path, mode: TravelMode, departure: Option<&Timestamp>) -> f64 {
        let hour = departure.and_then(Timestamp::hour);
        path.segments()
            .map(|(len, street)| {
                let kmh = match mode {
                    TravelMode::Pedestrian => self.pedestrian_kmh,
                    TravelMode::Car => self.car_speed(street, hour),
                };
                len * 60.0 / (kmh * 1000.0)
            })
            .sum()
    }

    /// Whole minutes along `path`, rounded half up. Car segments on a street
    /// with a band covering the departure hour use the band's speed.
    pub fn travel_time(&self, path: &Path, mode: TravelMode, departure: Option<&Timestamp>) -> u32 {
        round_half_up(self.travel_minutes_exact(path, mode, departure))
    }
}

fn round_half_up(x: f64) -> u32 {
    // Snap away float noise so that e.g. 11.5 computed as 11.4999999 rounds up.
    let snapped = (x * 1e9).round() / 1e9;
    (snapped + 0.5).floor().max(0.0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::city_plan::CityPlan;
    use crate::geometry::Point;

    fn straight(len: f64, street: Option<StreetCode>) -> Path {
        Path {
            waypoints: vec![Point::new(0.0, 0.0), Point::new(len, 0.0)],
            streets: vec![street],
            total_length: len,
            iterations: 0,
            fallback: false,
        }
    }

    #[test]
    fn zero_length_is_zero_minutes() {
        let plan = CityPlan::load(include_str!("../../fixtures/grid2x2.plan")).unwrap();
        let p = plan.route(Point::new(1.0, 1.0), Point::new(1.0, 1.0)).unwrap();
        assert_eq!(SpeedTable::default().travel_time(&p, TravelMode::Pedestrian, None), 0);
    }

    #[test]
    fn kilometre_on_foot() {
        // 1 km at 5 km/h = 0.2 h = 12 min.
        assert_eq!(SpeedTable::default().travel_time(&straight(1000.0, None), TravelMode::Pedestrian, None), 12);
    }

    #[test]
    fn half_minutes_round_up() {
        // 1125 m at 5 km/h = 13.5 min; 1120 m = 13.44 min.
        let t = SpeedTable::default();
        assert_eq!(t.travel_time(&straight(1125.0, None), TravelMode::Pedestrian, None), 14);
        assert_eq!(t.travel_time(&straight(1120.0, None), TravelMode::Pedestrian, None), 13);
    }

    #[test]
    fn evening_band_slows_cars() {
        let table = SpeedTable::load(include_str!("../../fixtures/speeds.txt")).unwrap();
        // Segment 1: 500 m on street 1 at 10 km/h = 3 min; segment 2: 400 m
        // on street 2 at the 40 km/h default = 0.6 min. Total 3.6 -> 4.
        let path = Path {
            waypoints: vec![Point::new(0.0, 0.0), Point::new(500.0, 0.0), Point::new(500.0, 400.0)],
            streets: vec![Some(1), Some(2)],
            total_length: 900.0,
            iterations: 0,
            fallback: false,
        };
        let at20 = Timestamp::at(11, 7, 20).unwrap();
        assert!((table.travel_minutes_exact(&path, TravelMode::Car, Some(&at20)) - 3.6).abs() < 1e-9);
        assert_eq!(table.travel_time(&path, TravelMode::Car, Some(&at20)), 4);
        // Outside the band: 900 m at 40 km/h = 1.35 min.
        let at12 = Timestamp::at(11, 7, 12).unwrap();
        assert_eq!(table.travel_time(&path, TravelMode::Car, Some(&at12)), 1);
    }

    #[test]
    fn overnight_band_wraps() {
        let band = SpeedBand { street: 1, hour_from: 22, hour_to: 6, kmh: 20.0 };
        assert!(band.covers(23) && band.covers(3) && !band.covers(12));
    }

    #[test]
    fn config_errors_name_line() {
        let err = SpeedTable::load("car|1|19|22|10\ncar|x|1|2|3\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(SpeedTable::load("car|1|1|2|-3").is_err());
        let t = SpeedTable::load("pedestrian|4\ncar|*|||50").unwrap();
        assert_eq!((t.pedestrian_kmh, t.car_default_kmh), (4.0, 50.0));
    }
}
