//! Sweep grids: `a:b:n` (linear), `a:b:n:log`, and `a:b:n:log0` (log plus a leading 0).

use std::fmt;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
    pub with_zero: bool,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Result<Self, CliError> {
        Grid {
            start,
            stop,
            points,
            scale: Scale::Linear,
            with_zero: false,
        }
        .validated()
    }

    pub fn log(start: f64, stop: f64, points: usize, with_zero: bool) -> Result<Self, CliError> {
        Grid {
            start,
            stop,
            points,
            scale: Scale::Log,
            with_zero,
        }
        .validated()
    }

    fn validated(self) -> Result<Self, CliError> {
        if self.points < 2 {
            return Err(CliError::Usage(format!(
                "grid needs at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Usage("grid bounds must be finite".into()));
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(CliError::Usage("log grid needs positive bounds".into()));
        }
        Ok(self)
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        let mut out = Vec::with_capacity(self.points + usize::from(self.with_zero));
        if self.with_zero {
            out.push(0.0);
        }
        for i in 0..self.points {
            let t = i as f64 / last;
            let v = match self.scale {
                Scale::Linear => self.start + t * (self.stop - self.start),
                Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
            };
            out.push(v);
        }
        // Pin the endpoints against rounding in the interpolation.
        let n = out.len();
        out[n - 1] = self.stop;
        out[n - self.points] = self.start;
        out
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Usage(format!("grid '{s}' is not of the form a:b:n[:log|:log0]"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => Grid::linear(start, stop, points),
            Some("log") => Grid::log(start, stop, points, false),
            Some("log0") => Grid::log(start, stop, points, true),
            Some(_) => Err(bad()),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)?;
        match (self.scale, self.with_zero) {
            (Scale::Linear, _) => Ok(()),
            (Scale::Log, false) => f.write_str(":log"),
            (Scale::Log, true) => f.write_str(":log0"),
        }
    }
}
