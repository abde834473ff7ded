//! Device motion and antenna counter-movement.
//!
//! Everything is one-dimensional along the motion axis. The device carries
//! the antenna on a slide of length `aperture`; the antenna's offset on the
//! slide is `r ∈ [0, aperture]` and its absolute position is `n + r` where
//! `n` is the device displacement.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Slack used when comparing positions computed through different float
/// paths. A hold that needs `r` within this distance of a slide end is
/// still served from the current anchor.
pub const POSITION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceTrajectory {
    samples: Vec<f64>,
    step: f64,
}

impl DeviceTrajectory {
    /// Builds a trajectory from explicit device positions.
    ///
    /// The first sample must be 0 and all samples finite. Motion may go
    /// either way.
    pub fn from_samples(samples: Vec<f64>, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::param(
                "step",
                format!("must be positive, got {step}"),
            ));
        }
        match samples.first() {
            None => return Err(Error::InvalidInput("trajectory has no samples".into())),
            Some(&first) if first != 0.0 => {
                return Err(Error::InvalidInput(format!(
                    "trajectory must start at 0, starts at {first}"
                )))
            }
            _ => {}
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite device position {bad}"
            )));
        }
        Ok(Self { samples, step })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_distance(&self) -> f64 {
        self.samples.last().copied().unwrap_or(0.0)
    }
}

/// Uniformly spaced forward motion `0, step, 2·step, …` ending exactly at
/// `total_distance`.
///
/// Sample `i` is computed as `i · step` (no accumulation). If the distance is
/// not a multiple of the step, the final sample is clamped to the distance.
pub fn linear_trajectory(total_distance: f64, step: f64) -> Result<DeviceTrajectory> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::param(
            "step",
            format!("must be positive, got {step}"),
        ));
    }
    if !(total_distance >= 0.0) || !total_distance.is_finite() {
        return Err(Error::param(
            "total_distance",
            format!("must be non-negative, got {total_distance}"),
        ));
    }

    let ratio = total_distance / step;
    let nearest = ratio.round();
    let mut samples: Vec<f64>;
    if (nearest * step - total_distance).abs() <= POSITION_TOLERANCE * step {
        let count = nearest as usize;
        samples = (0..=count).map(|i| i as f64 * step).collect();
        if let Some(last) = samples.last_mut() {
            *last = total_distance;
        }
    } else {
        let count = ratio.floor() as usize;
        samples = (0..=count).map(|i| i as f64 * step).collect();
        samples.push(total_distance);
    }
    Ok(DeviceTrajectory { samples, step })
}

/// Slide geometry of the antenna on the device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaMount {
    /// Maximum counter-movement travel L (λ).
    pub aperture: f64,
    /// Offset r₀ on the slide at the start of a CSA run (λ).
    pub initial_offset: f64,
    /// Offset used by the fixed, regular antenna (λ).
    pub fixed_offset: f64,
}

impl AntennaMount {
    /// Mount with `r₀ = L` and the regular antenna at offset 0.
    pub fn new(aperture: f64) -> Result<Self> {
        let mount = Self {
            aperture,
            initial_offset: aperture,
            fixed_offset: 0.0,
        };
        mount.validate()?;
        Ok(mount)
    }

    pub fn with_initial_offset(mut self, offset: f64) -> Result<Self> {
        self.initial_offset = offset;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fixed_offset(mut self, offset: f64) -> Result<Self> {
        self.fixed_offset = offset;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0) || !self.aperture.is_finite() {
            return Err(Error::param(
                "aperture",
                format!("must be positive, got {}", self.aperture),
            ));
        }
        let within = |x: f64| (0.0..=self.aperture).contains(&x);
        if !within(self.initial_offset) {
            return Err(Error::param(
                "initial_offset",
                format!(
                    "must lie in [0, {}], got {}",
                    self.aperture, self.initial_offset
                ),
            ));
        }
        if !within(self.fixed_offset) {
            return Err(Error::param(
                "fixed_offset",
                format!(
                    "must lie in [0, {}], got {}",
                    self.aperture, self.fixed_offset
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSample {
    pub device_pos: f64,
    pub relative_offset: f64,
    pub absolute_pos: f64,
    pub interval_id: u32,
    pub repositioned: bool,
}

/// Per-sample controller record. Within one `interval_id` the absolute
/// position is constant; that position is the interval's anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerLog {
    samples: Vec<ControllerSample>,
}

impl ControllerLog {
    pub fn samples(&self) -> &[ControllerSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn interval_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.samples.iter().map(|s| s.interval_id)
    }

    pub fn interval_count(&self) -> usize {
        self.samples
            .last()
            .map_or(0, |s| s.interval_id as usize + 1)
    }

    /// Index of the first sample of every interval, starting with 0.
    pub fn boundaries(&self) -> Vec<usize> {
        interval_starts(self.samples.iter().map(|s| s.interval_id))
    }

    /// `(interval_id, anchor)` for every interval, in order.
    pub fn anchors(&self) -> Vec<(u32, f64)> {
        self.boundaries()
            .into_iter()
            .map(|i| (self.samples[i].interval_id, self.samples[i].absolute_pos))
            .collect()
    }
}

pub(crate) fn interval_starts(ids: impl Iterator<Item = u32>) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut prev = None;
    for (i, id) in ids.enumerate() {
        if prev != Some(id) {
            starts.push(i);
            prev = Some(id);
        }
    }
    starts
}

/// Holds the antenna at a fixed absolute position for as long as the slide
/// allows.
///
/// The anchor of interval 0 is `r₀`. When the device has moved past the
/// point where the hold would need `r < 0`, the antenna crossed the slide
/// end between two samples: at that instant it jumps to `r = L`, so the new
/// anchor is the old one plus `L`. Backward motion mirrors this (jump to
/// `r = 0`, anchor minus `L`). A hold needing exactly `r = 0` (or `r = L`)
/// is still served from the old anchor.
pub fn counter_movement(traj: &DeviceTrajectory, mount: &AntennaMount) -> Result<ControllerLog> {
    mount.validate()?;
    let aperture = mount.aperture;
    let origin = mount.initial_offset;

    let mut jumps: i64 = 0;
    let mut anchor = origin;
    let mut interval_id = 0u32;
    let mut samples = Vec::with_capacity(traj.len());

    for &n in traj.samples() {
        let mut repositioned = false;
        if anchor - n < -POSITION_TOLERANCE {
            while anchor - n < -POSITION_TOLERANCE {
                jumps += 1;
                anchor = origin + jumps as f64 * aperture;
            }
            repositioned = true;
        } else if anchor - n > aperture + POSITION_TOLERANCE {
            while anchor - n > aperture + POSITION_TOLERANCE {
                jumps -= 1;
                anchor = origin + jumps as f64 * aperture;
            }
            repositioned = true;
        }
        if repositioned {
            interval_id += 1;
        }
        let relative_offset = (anchor - n).clamp(0.0, aperture);
        samples.push(ControllerSample {
            device_pos: n,
            relative_offset,
            absolute_pos: anchor,
            interval_id,
            repositioned,
        });
    }
    Ok(ControllerLog { samples })
}

/// Antenna fixed to the device at `fixed_offset`; it moves with the device.
pub fn regular_positions(traj: &DeviceTrajectory, mount: &AntennaMount) -> Result<ControllerLog> {
    mount.validate()?;
    let samples = traj
        .samples()
        .iter()
        .map(|&n| ControllerSample {
            device_pos: n,
            relative_offset: mount.fixed_offset,
            absolute_pos: n + mount.fixed_offset,
            interval_id: 0,
            repositioned: false,
        })
        .collect();
    Ok(ControllerLog { samples })
}

/// Antenna left at its initial absolute position `r₀`. The device index is
/// kept only for time alignment with the other runs.
pub fn stationary_positions(
    traj: &DeviceTrajectory,
    mount: &AntennaMount,
) -> Result<ControllerLog> {
    mount.validate()?;
    let samples = traj
        .samples()
        .iter()
        .map(|&n| ControllerSample {
            device_pos: n,
            relative_offset: mount.initial_offset,
            absolute_pos: mount.initial_offset,
            interval_id: 0,
            repositioned: false,
        })
        .collect();
    Ok(ControllerLog { samples })
}
