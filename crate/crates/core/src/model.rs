//! Piecewise-static channel model.
//!
//! Within a static interval starting at n₀ the channel is
//!
//! h(n) = F(H(n₀)) + N(n)
//!
//! where H(n₀) is drawn once per interval, F is a fixed transform and N is
//! fresh circularly-symmetric complex Gaussian noise at every sample. With
//! F = identity and no noise this reduces to h(n) = H(n₀).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::analysis::{
    estimate_rice_k, shifted_mean, uniform_interval, RiceEstimate, Segmentation,
};
use crate::error::{Error, Result};
use crate::kinematics::{linear_trajectory, DeviceTrajectory};
use crate::rng;
use crate::trace::{ChannelTrace, Mode, TraceMeta, TraceSample};
#[allow(unused_imports)]
use num_traits::Float;

/// Parametric transforms F applied to the interval's initial channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    /// Multiplies by `gain · e^{j·phase}`.
    Scale {
        gain: f64,
        phase: f64,
    },
    /// Adds a constant complex offset.
    Bias(Complex64),
}

impl Transform {
    pub const NAMES: [&'static str; 3] = ["identity", "scale", "bias"];

    /// Looks a transform up by name; parameters not used by it are ignored.
    pub fn from_name(name: &str, gain: f64, phase: f64, bias: Complex64) -> Result<Self> {
        match name {
            "identity" => Ok(Transform::Identity),
            "scale" => Ok(Transform::Scale { gain, phase }),
            "bias" => Ok(Transform::Bias(bias)),
            other => Err(Error::UnknownTransform(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Scale { .. } => "scale",
            Transform::Bias(_) => "bias",
        }
    }

    pub fn apply(&self, h: Complex64) -> Complex64 {
        match *self {
            Transform::Identity => h,
            Transform::Scale { gain, phase } => h * Complex64::from_polar(gain, phase),
            Transform::Bias(b) => h + b,
        }
    }
}

pub fn apply_transform(f: &Transform, h: Complex64) -> Complex64 {
    f.apply(h)
}

/// Distribution of the initial channel H(n₀) of each interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDist {
    /// Rice with factor K and mean power Ω = E[|H₀|²].
    ///
    /// H₀ = √(ΩK/(K+1)) · e^{jφ} + CN(0, Ω/(K+1)) with φ uniform per draw.
    /// In the (ν, σ) parameterization of the magnitude this is noncentrality
    /// ν = √(ΩK/(K+1)) and per-component scale σ = √(Ω/(2(K+1))).
    Rice {
        k: f64,
        omega: f64,
    },
    Constant(Complex64),
}

impl InitialDist {
    fn draw<R: Rng>(&self, rng: &mut R) -> Complex64 {
        match *self {
            InitialDist::Constant(c) => c,
            InitialDist::Rice { k, omega } => {
                let phi = rng::uniform_angle(rng);
                if k.is_infinite() {
                    return Complex64::from_polar(omega.sqrt(), phi);
                }
                let los = Complex64::from_polar((omega * k / (k + 1.0)).sqrt(), phi);
                los + rng::complex_gaussian(rng, omega / (k + 1.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseStaticModel {
    /// Length of one static interval (λ).
    pub interval_length: f64,
    pub initial: InitialDist,
    /// σ_N with E[|N|²] = σ_N².
    pub residual_sigma: f64,
    pub transform: Transform,
    pub seed: u64,
}

impl PiecewiseStaticModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.interval_length > 0.0) {
            return Err(Error::param(
                "interval_length",
                format!("must be positive, got {}", self.interval_length),
            ));
        }
        if !(self.residual_sigma >= 0.0) || !self.residual_sigma.is_finite() {
            return Err(Error::param(
                "residual_sigma",
                format!("must be >= 0, got {}", self.residual_sigma),
            ));
        }
        if let InitialDist::Rice { k, omega } = self.initial {
            if !(k >= 0.0) {
                return Err(Error::param("k", format!("must be >= 0, got {k}")));
            }
            if !(omega > 0.0) || !omega.is_finite() {
                return Err(Error::param(
                    "omega",
                    format!("must be positive, got {omega}"),
                ));
            }
        }
        Ok(())
    }
}

/// Model trace on a uniform device grid, intervals of `interval_length`
/// tiling `[0, total_distance]`.
pub fn generate_model_trace(
    model: &PiecewiseStaticModel,
    total_distance: f64,
    step: f64,
) -> Result<ChannelTrace> {
    model.validate()?;
    let traj = linear_trajectory(total_distance, step)?;
    let ids: Vec<u32> = traj
        .samples()
        .iter()
        .map(|&n| uniform_interval(n, model.interval_length))
        .collect();
    generate_on_intervals(model, &traj, &ids)
}

/// Model trace with externally supplied interval ids, e.g. taken from a
/// counter-movement log. `interval_length` is not used for tiling here.
pub fn generate_on_intervals(
    model: &PiecewiseStaticModel,
    traj: &DeviceTrajectory,
    interval_ids: &[u32],
) -> Result<ChannelTrace> {
    model.validate()?;
    if interval_ids.len() != traj.len() {
        return Err(Error::InvalidInput(format!(
            "{} interval ids for {} samples",
            interval_ids.len(),
            traj.len()
        )));
    }
    let mut rng = rng::seeded(model.seed);
    let power = model.residual_sigma * model.residual_sigma;
    let mut current: Option<(u32, Complex64)> = None;
    let mut samples = Vec::with_capacity(traj.len());

    for (&n, &id) in traj.samples().iter().zip(interval_ids) {
        let fresh = current.is_none_or(|(prev, _)| prev != id);
        if fresh {
            let h0 = model.initial.draw(&mut rng);
            current = Some((id, model.transform.apply(h0)));
        }
        let mut h = current.map(|(_, v)| v).unwrap_or_default();
        if model.residual_sigma > 0.0 {
            h += rng::complex_gaussian(&mut rng, power);
        }
        samples.push(TraceSample {
            n,
            h,
            interval_id: id,
            repositioned: fresh && !samples.is_empty(),
        });
    }

    let meta = TraceMeta {
        scenario: String::new(),
        field_seed: None,
        noise_seed: Some(model.seed),
        step: traj.step(),
        speed: None,
    };
    Ok(ChannelTrace::new(Mode::Model, samples, meta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    /// σ̂_N from the pooled within-interval variance.
    pub residual_sigma: f64,
    /// K̂ and Ω̂ from the interval means; needs at least two intervals.
    pub rice: Result<RiceEstimate>,
    pub intervals: usize,
}

/// Fits K, Ω and σ_N to a segmented trace.
///
/// Interval means stand in for the H₀ draws and go through the moment
/// estimator; σ̂_N² = Σ Σ|h − mean|² / Σ(countᵢ − 1).
pub fn fit_model(trace: &ChannelTrace, seg: &Segmentation) -> Result<ModelFit> {
    let values: Vec<Complex64> = trace.values().collect();
    if seg.ranges().last().map(|r| r.end) != Some(values.len()) {
        return Err(Error::InvalidInput(
            "segmentation does not cover the trace".into(),
        ));
    }
    let mut means = Vec::with_capacity(seg.count());
    let mut ss = 0.0;
    let mut dof = 0usize;
    for r in seg.ranges() {
        let chunk = &values[r];
        let mean = shifted_mean(chunk);
        ss += chunk.iter().map(|h| (h - mean).norm_sqr()).sum::<f64>();
        dof += chunk.len() - 1;
        means.push(mean.norm());
    }
    let residual_sigma = if dof > 0 {
        (ss / dof as f64).sqrt()
    } else {
        0.0
    };
    let rice = if means.len() < 2 {
        Err(Error::InsufficientData(format!(
            "K needs at least 2 intervals, got {}",
            means.len()
        )))
    } else {
        estimate_rice_k(&means)
    };
    Ok(ModelFit {
        residual_sigma,
        rice,
        intervals: means.len(),
    })
}

/// Convenience: fit with uniform tiling of `interval_length`.
pub fn fit_model_uniform(trace: &ChannelTrace, interval_length: f64) -> Result<ModelFit> {
    fit_model(trace, &Segmentation::uniform(trace, interval_length)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn base(initial: InitialDist, sigma: f64) -> PiecewiseStaticModel {
        PiecewiseStaticModel {
            interval_length: 0.5,
            initial,
            residual_sigma: sigma,
            transform: Transform::Identity,
            seed: 42,
        }
    }

    #[test]
    fn transforms() {
        let h = Complex64::new(0.3, -0.4);
        assert_eq!(apply_transform(&Transform::Identity, h), h);
        let s = Transform::Scale {
            gain: 2.0,
            phase: 0.0,
        };
        assert_eq!(
            apply_transform(&s, Complex64::new(1.0, 0.0)),
            Complex64::new(2.0, 0.0)
        );
        let s = Transform::Scale {
            gain: 1.0,
            phase: PI,
        };
        let out = apply_transform(&s, Complex64::new(1.0, 0.0));
        assert!((out - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let b = Transform::Bias(Complex64::new(0.5, 0.5));
        assert_eq!(b.apply(h), Complex64::new(0.3 + 0.5, -0.4 + 0.5));
    }

    #[test]
    fn transform_registry() {
        let z = Complex64::new(0.0, 0.0);
        for name in Transform::NAMES {
            assert_eq!(
                Transform::from_name(name, 1.0, 0.0, z).unwrap().name(),
                name
            );
        }
        assert!(matches!(
            Transform::from_name("near-field", 1.0, 0.0, z),
            Err(Error::UnknownTransform(_))
        ));
    }

    #[test]
    fn constant_initial_without_noise_is_flat() {
        let c = Complex64::new(0.25, -0.75);
        let t = generate_model_trace(&base(InitialDist::Constant(c), 0.0), 6.0, 0.05).unwrap();
        assert_eq!(t.mode, Mode::Model);
        assert!(t.values().all(|h| h == c));
    }

    #[test]
    fn rice_without_noise_gives_one_value_per_interval() {
        let m = base(InitialDist::Rice { k: 3.0, omega: 1.0 }, 0.0);
        let t = generate_model_trace(&m, 6.0, 0.05).unwrap();
        assert_eq!(t.interval_count(), 12);
        let mut distinct: Vec<Complex64> = Vec::new();
        for s in &t.samples {
            if !distinct.contains(&s.h) {
                distinct.push(s.h);
            }
        }
        assert_eq!(distinct.len(), 12);
        for r in Segmentation::from_interval_ids(&t).unwrap().ranges() {
            let first = t.samples[r.start].h;
            assert!(t.samples[r].iter().all(|s| s.h == first));
        }
    }

    #[test]
    fn residual_variance_matches_sigma() {
        let c = Complex64::new(1.0, 0.0);
        let mut m = base(InitialDist::Constant(c), 0.1);
        m.interval_length = 1e9;
        let t = generate_model_trace(&m, 1000.0, 0.01).unwrap();
        assert_eq!(t.len(), 100_001);
        let n = t.len() as f64;
        let mean = t.values().sum::<Complex64>() / n;
        let var = t.values().map(|h| (h - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        assert!((var - 0.01).abs() < 0.001, "variance {var}");
    }

    #[test]
    fn invalid_models_rejected() {
        let mut m = base(InitialDist::Rice { k: 1.0, omega: 1.0 }, 0.0);
        m.interval_length = 0.0;
        assert!(generate_model_trace(&m, 1.0, 0.1).is_err());
        let m = base(InitialDist::Rice { k: 1.0, omega: 0.0 }, 0.0);
        assert!(generate_model_trace(&m, 1.0, 0.1).is_err());
        let m = base(InitialDist::Rice { k: 1.0, omega: 1.0 }, 0.0);
        assert!(generate_model_trace(&m, 1.0, 0.0).is_err());
    }

    #[test]
    fn noiseless_constant_fit_is_exactly_zero() {
        let c = Complex64::new(0.1, 0.3);
        let t = generate_model_trace(&base(InitialDist::Constant(c), 0.0), 6.0, 0.05).unwrap();
        let fit = fit_model_uniform(&t, 0.5).unwrap();
        assert_eq!(fit.residual_sigma, 0.0);
        assert_eq!(fit.intervals, 12);
    }

    #[test]
    fn single_interval_fit_keeps_sigma() {
        let c = Complex64::new(1.0, 0.0);
        let mut m = base(InitialDist::Constant(c), 0.05);
        m.interval_length = 100.0;
        let t = generate_model_trace(&m, 10.0, 0.01).unwrap();
        let fit = fit_model_uniform(&t, 100.0).unwrap();
        assert!(matches!(fit.rice, Err(Error::InsufficientData(_))));
        assert!((fit.residual_sigma - 0.05).abs() < 0.005);
    }

    #[test]
    fn injected_intervals_follow_the_log() {
        use crate::kinematics::{counter_movement, AntennaMount};
        let traj = linear_trajectory(1.0, 0.05).unwrap();
        let mount = AntennaMount::new(0.5)
            .unwrap()
            .with_initial_offset(0.2)
            .unwrap();
        let log = counter_movement(&traj, &mount).unwrap();
        let ids: Vec<u32> = log.interval_ids().collect();
        let m = base(InitialDist::Rice { k: 0.0, omega: 1.0 }, 0.0);
        let t = generate_on_intervals(&m, &traj, &ids).unwrap();
        assert_eq!(t.interval_starts(), log.boundaries());
        assert!(generate_on_intervals(&m, &traj, &ids[1..]).is_err());
    }
}
