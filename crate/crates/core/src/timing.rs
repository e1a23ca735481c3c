//! Latency of handing two distant users a Bell pair.
//!
//! Direct distribution sends both particles from the midpoint source:
//! `t1 = L / 2v`. With two extra sources at the quarter points and a Bell
//! measurement at the midpoint the particles only travel a quarter of the
//! way: `t2 = L / 4v + t_m`. The outcome still has to reach the users over a
//! classical channel; that term is modeled as `L / 2c` and kept separate.
//!
//! The hierarchical model places `2^levels` sources at dyadic midpoints and
//! assumes every Bell measurement runs concurrently, so `t_m` is paid once.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deepest hierarchy accepted by [`hierarchical_time`].
pub const MAX_LEVELS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkModel {
    /// Distance between the two users.
    pub length: f64,
    /// Particle speed.
    pub speed: f64,
    /// Classical signal speed.
    pub classical_speed: f64,
    /// Duration of one Bell measurement.
    pub measurement_time: f64,
}

impl LinkModel {
    pub fn new(length: f64, speed: f64, classical_speed: f64, measurement_time: f64) -> Result<Self> {
        let m = LinkModel {
            length,
            speed,
            classical_speed,
            measurement_time,
        };
        m.validate()?;
        Ok(m)
    }

    /// `speed == classical_speed` is allowed; it models photons.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.length, self.speed, self.classical_speed, self.measurement_time]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("link parameters must be finite".into()));
        }
        if self.length <= 0.0 {
            return Err(Error::InvalidParameter(format!("length must be positive, got {}", self.length)));
        }
        if !(self.speed > 0.0 && self.speed <= self.classical_speed) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < speed <= classical_speed, got speed {} and classical_speed {}",
                self.speed, self.classical_speed
            )));
        }
        if self.measurement_time < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "measurement_time must be non-negative, got {}",
                self.measurement_time
            )));
        }
        Ok(())
    }

    /// Worst-case broadcast of the measurement outcome: `L / 2c`.
    pub fn classical_time(&self) -> f64 {
        self.length / (2.0 * self.classical_speed)
    }
}

/// `L / 2v`.
pub fn direct_time(m: &LinkModel) -> f64 {
    m.length / (2.0 * m.speed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelayTime {
    /// `L / 4v + t_m`.
    pub bare: f64,
    /// Classical broadcast time added to `total` (0 when not requested).
    pub classical: f64,
    pub total: f64,
    /// `t_m < L / 4v`, i.e. the bare relay beats direct distribution.
    pub advantageous: bool,
    /// `total < direct_time`: the relay still wins once `classical` is counted.
    pub wins: bool,
}

pub fn relay_time(m: &LinkModel, include_classical: bool) -> RelayTime {
    let quarter = m.length / (4.0 * m.speed);
    let bare = quarter + m.measurement_time;
    let classical = if include_classical { m.classical_time() } else { 0.0 };
    let total = bare + classical;
    RelayTime {
        bare,
        classical,
        total,
        advantageous: m.measurement_time < quarter,
        wins: total < direct_time(m),
    }
}

/// Latency with `2^levels` sources; `levels = 1` is [`relay_time`].
pub fn hierarchical_time(m: &LinkModel, levels: u32, include_classical: bool) -> Result<f64> {
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(Error::range("levels", levels as usize, 1, MAX_LEVELS as usize));
    }
    let travel = m.length / (2f64.powi(levels as i32 + 1) * m.speed);
    let classical = if include_classical { m.classical_time() } else { 0.0 };
    Ok(travel + m.measurement_time + classical)
}

/// Parameter grid for [`sweep`]; every combination is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub length: Vec<f64>,
    pub speed: Vec<f64>,
    pub classical_speed: f64,
    pub measurement_time: Vec<f64>,
    pub levels: Vec<u32>,
    #[serde(default)]
    pub include_classical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "L")]
    pub length: f64,
    pub v: f64,
    pub c: f64,
    pub t_m: f64,
    pub levels: u32,
    pub t1: f64,
    pub t2: f64,
    pub advantage: bool,
}

pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &length in &grid.length {
        for &speed in &grid.speed {
            for &t_m in &grid.measurement_time {
                let m = LinkModel::new(length, speed, grid.classical_speed, t_m)?;
                for &levels in &grid.levels {
                    let t1 = direct_time(&m);
                    let t2 = hierarchical_time(&m, levels, grid.include_classical)?;
                    rows.push(SweepRow {
                        length,
                        v: speed,
                        c: grid.classical_speed,
                        t_m,
                        levels,
                        t1,
                        t2,
                        advantage: t2 < t1,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(length: f64, speed: f64, t_m: f64) -> LinkModel {
        LinkModel::new(length, speed, 1.0, t_m).unwrap()
    }

    #[test]
    fn direct() {
        assert_eq!(direct_time(&model(4.0, 1.0, 0.0)), 2.0);
        assert_eq!(direct_time(&model(1.0, 0.5, 0.0)), 1.0);
        for l in [1.0, 2.5, 10.0] {
            assert!((direct_time(&model(2.0 * l, 0.3, 0.0)) - 2.0 * direct_time(&model(l, 0.3, 0.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn relay_examples() {
        let r = relay_time(&model(4.0, 1.0, 0.5), false);
        assert_eq!(r.total, 1.5);
        assert!(r.advantageous && r.wins);

        let boundary = model(4.0, 1.0, 1.0);
        let r = relay_time(&boundary, false);
        assert_eq!(r.total, direct_time(&boundary));
        assert!(!r.advantageous && !r.wins);

        let photons = LinkModel::new(4.0, 1.0, 1.0, 0.01).unwrap();
        let r = relay_time(&photons, true);
        assert!(!r.wins);
        assert!(r.total >= direct_time(&photons));
        assert_eq!(r.bare, 1.01);
    }

    #[test]
    fn hierarchical_examples() {
        let m = model(8.0, 1.0, 0.0);
        assert_eq!(hierarchical_time(&m, 2, false).unwrap(), 1.0);
        for flag in [false, true] {
            let m = model(3.7, 0.3, 0.2);
            assert_eq!(hierarchical_time(&m, 1, flag).unwrap().to_bits(), relay_time(&m, flag).total.to_bits());
        }
        let mut prev = f64::INFINITY;
        for levels in 1..10 {
            let t = hierarchical_time(&m, levels, false).unwrap();
            assert!(t <= prev);
            prev = t;
        }
        assert!(hierarchical_time(&m, 0, false).is_err());
    }

    #[test]
    fn validation() {
        assert!(LinkModel::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(LinkModel::new(1.0, 2.0, 1.0, 0.0).is_err());
        assert!(LinkModel::new(1.0, 1.0, 1.0, -0.1).is_err());
        assert!(LinkModel::new(1.0, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn sweep_csv() {
        let grid = SweepGrid {
            length: vec![4.0],
            speed: vec![1.0],
            classical_speed: 2.0,
            measurement_time: vec![0.5, 1.0],
            levels: vec![1, 2],
            include_classical: false,
        };
        let rows = sweep(&grid).unwrap();
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "L,v,c,t_m,levels,t1,t2,advantage");
        assert_eq!(lines.next().unwrap(), "4.0,1.0,2.0,0.5,1,2.0,1.5,true");
    }
}
