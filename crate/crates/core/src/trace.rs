//! Channel traces: the common currency between runs, the model and the
//! analysis.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::kinematics::interval_starts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Antenna fixed to the device.
    Regular,
    /// Channel static antenna.
    Csa,
    /// Antenna left at its initial position.
    Stationary,
    /// Output of the statistical model.
    Model,
}

impl Mode {
    pub const MEASURED: [Mode; 3] = [Mode::Regular, Mode::Csa, Mode::Stationary];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Regular => "regular",
            Mode::Csa => "csa",
            Mode::Stationary => "stationary",
            Mode::Model => "model",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regular" => Ok(Mode::Regular),
            "csa" => Ok(Mode::Csa),
            "stationary" => Ok(Mode::Stationary),
            "model" => Ok(Mode::Model),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    /// Device displacement (λ).
    pub n: f64,
    pub h: Complex64,
    pub interval_id: u32,
    pub repositioned: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceMeta {
    pub scenario: String,
    pub field_seed: Option<u64>,
    pub noise_seed: Option<u64>,
    pub step: f64,
    /// Device speed in λ per unit time; enables the time axis t = n / v.
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    pub mode: Mode,
    pub samples: Vec<TraceSample>,
    pub meta: TraceMeta,
}

impl ChannelTrace {
    pub fn new(mode: Mode, samples: Vec<TraceSample>, meta: TraceMeta) -> Self {
        Self {
            mode,
            samples,
            meta,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.h)
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.n)
    }

    /// Time of sample `i`, when a speed is configured.
    pub fn time_at(&self, i: usize) -> Option<f64> {
        let v = self.meta.speed?;
        self.samples.get(i).map(|s| s.n / v)
    }

    /// Index of the first sample of every recorded interval.
    pub fn interval_starts(&self) -> Vec<usize> {
        interval_starts(self.samples.iter().map(|s| s.interval_id))
    }

    pub fn interval_count(&self) -> usize {
        self.interval_starts().len()
    }
}
