//! Frozen 1-D multipath field.
//!
//! H(x) = g(x) · [ √(K/(K+1)) · e^{j(2πx cos θ₀ + φ₀)}
//!               + √(1/(K+1)) · Σₘ aₘ e^{j(2πx cos θₘ + φₘ)} ]
//!
//! with aₘ = 1/√M and θₘ, φₘ i.i.d. uniform on [0, 2π). This is isotropic
//! 2-D scattering plus a line-of-sight term, so point samples over the seed
//! ensemble are Rice with factor K and E[|H|²] = g².

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng;
#[allow(unused_imports)]
use num_traits::Float;

pub const DEFAULT_NUM_PATHS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    /// Rice K as a linear power ratio. `f64::INFINITY` means pure LOS.
    pub k_factor: f64,
    pub num_paths: usize,
    /// LOS arrival angle θ₀ (rad).
    pub los_angle: f64,
    /// LOS phase φ₀ (rad).
    pub los_phase: f64,
    /// Amplitude scale g.
    pub large_scale_gain: f64,
    /// Initial link distance in wavelengths. When set, the gain follows an
    /// inverse-distance profile `g · d₀ / (d₀ − x)` as the antenna moves
    /// towards the other end of the link.
    pub link_distance: Option<f64>,
    pub seed: u64,
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            k_factor: 0.0,
            num_paths: DEFAULT_NUM_PATHS,
            los_angle: 0.0,
            los_phase: 0.0,
            large_scale_gain: 1.0,
            link_distance: None,
            seed: 0,
        }
    }
}

impl FieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_factor >= 0.0) {
            return Err(Error::param(
                "k_factor",
                format!("must be >= 0, got {}", self.k_factor),
            ));
        }
        if self.num_paths == 0 {
            return Err(Error::param("num_paths", "must be at least 1"));
        }
        if !(self.large_scale_gain > 0.0) || !self.large_scale_gain.is_finite() {
            return Err(Error::param(
                "large_scale_gain",
                format!("must be positive, got {}", self.large_scale_gain),
            ));
        }
        if !self.los_angle.is_finite() || !self.los_phase.is_finite() {
            return Err(Error::param(
                "los_angle",
                "LOS angle and phase must be finite",
            ));
        }
        if let Some(d) = self.link_distance {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::param(
                    "link_distance",
                    format!("must be positive, got {d}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub amplitude: f64,
    /// Arrival angle θₘ ∈ [0, 2π).
    pub angle: f64,
    /// Phase φₘ ∈ [0, 2π).
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldModel {
    params: FieldParams,
    paths: Vec<PathComponent>,
    // 2π cos θₘ, cached so evaluation is one sincos per path.
    spatial_freq: Vec<f64>,
    los_weight: f64,
    diffuse_weight: f64,
}

/// Draws the path table from the field seed. Angles are drawn before
/// phases, path by path, from a ChaCha8 stream.
pub fn synthesize_field(params: FieldParams) -> Result<FieldModel> {
    params.validate()?;
    let mut rng = rng::seeded(params.seed);
    let amplitude = 1.0 / (params.num_paths as f64).sqrt();
    let paths: Vec<PathComponent> = (0..params.num_paths)
        .map(|_| {
            let angle = rng::uniform_angle(&mut rng);
            let phase = rng::uniform_angle(&mut rng);
            PathComponent {
                amplitude,
                angle,
                phase,
            }
        })
        .collect();
    Ok(FieldModel::from_paths(params, paths))
}

impl FieldModel {
    /// Field with an explicit path table. `params.num_paths` is replaced by
    /// the table length.
    pub fn from_paths(mut params: FieldParams, paths: Vec<PathComponent>) -> Self {
        params.num_paths = paths.len();
        let spatial_freq = paths.iter().map(|p| TAU * p.angle.cos()).collect();
        let (los_weight, diffuse_weight) = if params.k_factor.is_infinite() {
            (1.0, 0.0)
        } else {
            let k = params.k_factor;
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        };
        Self {
            params,
            paths,
            spatial_freq,
            los_weight,
            diffuse_weight,
        }
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn paths(&self) -> &[PathComponent] {
        &self.paths
    }

    /// Amplitude scale at absolute position `x`.
    pub fn gain_at(&self, x: f64) -> f64 {
        match self.params.link_distance {
            Some(d0) => self.params.large_scale_gain * d0 / (d0 - x),
            None => self.params.large_scale_gain,
        }
    }

    pub(crate) fn los_term(&self, x: f64) -> Complex64 {
        if self.los_weight == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let arg = TAU * x * self.params.los_angle.cos() + self.params.los_phase;
        Complex64::from_polar(self.los_weight, arg)
    }

    pub(crate) fn diffuse_weight(&self) -> f64 {
        self.diffuse_weight
    }

    pub(crate) fn spatial_freq(&self) -> &[f64] {
        &self.spatial_freq
    }

    /// Complex channel gain at absolute position `x` (λ).
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut diffuse = Complex64::new(0.0, 0.0);
        if self.diffuse_weight != 0.0 {
            for (p, k) in self.paths.iter().zip(&self.spatial_freq) {
                diffuse += Complex64::from_polar(p.amplitude, k * x + p.phase);
            }
        }
        (self.los_term(x) + diffuse * self.diffuse_weight) * self.gain_at(x)
    }
}

pub fn eval_channel(field: &FieldModel, x: f64) -> Complex64 {
    field.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn synthesis_is_deterministic_per_seed() {
        let p = FieldParams {
            num_paths: 64,
            seed: 1,
            ..Default::default()
        };
        let a = synthesize_field(p).unwrap();
        let b = synthesize_field(p).unwrap();
        assert_eq!(a.paths(), b.paths());

        let c = synthesize_field(FieldParams { seed: 2, ..p }).unwrap();
        assert_ne!(a.paths(), c.paths());

        for path in a.paths() {
            assert!((0.0..TAU).contains(&path.angle));
            assert!((0.0..TAU).contains(&path.phase));
        }
    }

    #[test]
    fn single_path_has_unit_amplitude() {
        let f = synthesize_field(FieldParams {
            num_paths: 1,
            seed: 7,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(f.paths().len(), 1);
        assert_eq!(f.paths()[0].amplitude, 1.0);
        for i in 0..50 {
            let h = f.eval(i as f64 * 0.037);
            assert!((h.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_paths_rejected() {
        let err = synthesize_field(FieldParams {
            num_paths: 0,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParameter {
                name: "num_paths",
                ..
            }
        ));
        assert!(synthesize_field(FieldParams {
            k_factor: -1.0,
            ..Default::default()
        })
        .is_err());
        assert!(synthesize_field(FieldParams {
            large_scale_gain: 0.0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn pure_los_half_wavelength() {
        let f = synthesize_field(FieldParams {
            k_factor: f64::INFINITY,
            ..Default::default()
        })
        .unwrap();
        let h = eval_channel(&f, 0.5);
        assert!((h - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn explicit_single_path_is_plane_wave() {
        let f = FieldModel::from_paths(
            FieldParams::default(),
            vec![PathComponent {
                amplitude: 1.0,
                angle: 0.0,
                phase: 0.0,
            }],
        );
        for &x in &[0.0, 0.1, 0.25, 1.7] {
            let expected = Complex64::from_polar(1.0, 2.0 * PI * x);
            assert!((f.eval(x) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn evaluation_is_continuous() {
        let f = synthesize_field(FieldParams {
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        for i in 0..100 {
            let x = i as f64 * 0.061;
            assert!((f.eval(x + 1e-6) - f.eval(x)).norm() < 1e-3);
        }
    }

    #[test]
    fn inverse_distance_profile() {
        let f = synthesize_field(FieldParams {
            k_factor: f64::INFINITY,
            link_distance: Some(10.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(f.gain_at(0.0), 1.0);
        assert!((f.gain_at(5.0) - 2.0).abs() < 1e-12);
        assert!((f.eval(5.0).norm() - 2.0).abs() < 1e-12);
    }
}
