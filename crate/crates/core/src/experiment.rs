//! The three measurement runs: regular, CSA and stationary.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::kinematics::{
    counter_movement, regular_positions, stationary_positions, AntennaMount, ControllerLog,
    DeviceTrajectory,
};
use crate::rng;
use crate::trace::{ChannelTrace, Mode, TraceMeta, TraceSample};

/// Positions for one measurement mode.
pub fn positions_for(
    mode: Mode,
    traj: &DeviceTrajectory,
    mount: &AntennaMount,
) -> Result<ControllerLog> {
    match mode {
        Mode::Regular => regular_positions(traj, mount),
        Mode::Csa => counter_movement(traj, mount),
        Mode::Stationary => stationary_positions(traj, mount),
        Mode::Model => Err(Error::param(
            "mode",
            "the model mode is generated by the statistical model, not measured",
        )),
    }
}

/// Samples the field along the positions of `mode`.
///
/// Each sample is `H(a) + ν` with `a` the absolute antenna position and `ν`
/// circularly-symmetric complex Gaussian, E[|ν|²] = σ², drawn per sample
/// from `noise_seed`. With σ = 0 no noise is drawn.
pub fn run_mode(
    field: &FieldModel,
    traj: &DeviceTrajectory,
    mount: &AntennaMount,
    mode: Mode,
    residual_sigma: f64,
    noise_seed: u64,
) -> Result<ChannelTrace> {
    if !(residual_sigma >= 0.0) || !residual_sigma.is_finite() {
        return Err(Error::param(
            "residual_sigma",
            format!("must be >= 0, got {residual_sigma}"),
        ));
    }
    let log = positions_for(mode, traj, mount)?;
    let mut noise = rng::seeded(noise_seed);
    let power = residual_sigma * residual_sigma;

    let samples = log
        .samples()
        .iter()
        .map(|c| {
            let mut h = field.eval(c.absolute_pos);
            if residual_sigma > 0.0 {
                h += rng::complex_gaussian(&mut noise, power);
            }
            TraceSample {
                n: c.device_pos,
                h,
                interval_id: c.interval_id,
                repositioned: c.repositioned,
            }
        })
        .collect();

    let meta = TraceMeta {
        scenario: String::new(),
        field_seed: Some(field.params().seed),
        noise_seed: Some(noise_seed),
        step: traj.step(),
        speed: None,
    };
    Ok(ChannelTrace::new(mode, samples, meta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorCheck {
    pub interval_id: u32,
    pub anchor: f64,
    pub csa: Complex64,
    /// What the regular antenna sees when the device puts it on the anchor.
    pub regular: Complex64,
    pub difference: f64,
}

/// Compares each CSA interval with the regular antenna at the same absolute
/// position. On a noiseless trace every difference is at rounding level.
pub fn anchor_coincidence_check(
    field: &FieldModel,
    csa_trace: &ChannelTrace,
    mount: &AntennaMount,
) -> Result<Vec<AnchorCheck>> {
    if csa_trace.mode != Mode::Csa {
        return Err(Error::InvalidInput(format!(
            "anchor check needs a csa trace, got {}",
            csa_trace.mode
        )));
    }
    let step = if csa_trace.meta.step > 0.0 {
        csa_trace.meta.step
    } else {
        1.0
    };
    let traj = DeviceTrajectory::from_samples(csa_trace.positions().collect(), step)?;
    let log = counter_movement(&traj, mount)?;
    if !log
        .interval_ids()
        .eq(csa_trace.samples.iter().map(|s| s.interval_id))
    {
        return Err(Error::InvalidInput(
            "trace intervals do not match the counter-movement of this mount".into(),
        ));
    }

    Ok(log
        .boundaries()
        .into_iter()
        .map(|i| {
            let c = log.samples()[i];
            let csa = csa_trace.samples[i].h;
            let device_pos = c.absolute_pos - mount.fixed_offset;
            let regular = field.eval(device_pos + mount.fixed_offset);
            AnchorCheck {
                interval_id: c.interval_id,
                anchor: c.absolute_pos,
                csa,
                regular,
                difference: (csa - regular).norm(),
            }
        })
        .collect())
}
