//! Scenario files.
//!
//! A scenario is a TOML file with dotted keys; one file fully determines a
//! run. Unknown keys are rejected.
//!
//! ```toml
//! scenario = "office"
//! modes = ["regular", "csa", "stationary"]
//! residual_sigma = 0.0
//!
//! field.k_factor = 0.0          # `inf` for pure line of sight
//! field.num_paths = 256
//! mount.aperture = 0.5
//! trajectory.total_distance = 6.0
//! trajectory.step = 0.05
//! seeds.field = 1
//! seeds.noise = 2
//! ```
//!
//! `mount.aperture`, `trajectory.total_distance` and `trajectory.step` are
//! required; everything else has a default.

use std::path::Path;

use csa_core::field::{FieldParams, DEFAULT_NUM_PATHS};
use csa_core::kinematics::AntennaMount;
use csa_core::model::{InitialDist, PiecewiseStaticModel, Transform};
use csa_core::{Complex64, Mode};
use serde::Deserialize;

use crate::error::{Result, SimError};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_CARRIER_HZ: f64 = 2.45e9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "default_name")]
    scenario: String,
    #[serde(default = "default_carrier")]
    carrier_frequency: f64,
    #[serde(default = "default_modes")]
    modes: Vec<String>,
    #[serde(default)]
    residual_sigma: f64,
    speed: Option<f64>,
    #[serde(default)]
    field: FieldSection,
    #[serde(default)]
    mount: MountSection,
    #[serde(default)]
    trajectory: TrajectorySection,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    seeds: SeedSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FieldSection {
    k_factor: f64,
    num_paths: usize,
    los_angle: f64,
    los_phase: f64,
    large_scale_gain: f64,
    /// Initial link distance in metres; enables the inverse-distance gain.
    link_distance_m: Option<f64>,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            k_factor: 0.0,
            num_paths: DEFAULT_NUM_PATHS,
            los_angle: 0.0,
            los_phase: 0.0,
            large_scale_gain: 1.0,
            link_distance_m: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MountSection {
    aperture: Option<f64>,
    initial_offset: Option<f64>,
    #[serde(default)]
    fixed_offset: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectorySection {
    total_distance: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ModelSection {
    interval_length: Option<f64>,
    initial: String,
    k: f64,
    omega: f64,
    constant_re: f64,
    constant_im: f64,
    residual_sigma: f64,
    transform: String,
    transform_gain: f64,
    transform_phase: f64,
    transform_bias_re: f64,
    transform_bias_im: f64,
    seed: Option<u64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            interval_length: None,
            initial: "rice".into(),
            k: 0.0,
            omega: 1.0,
            constant_re: 1.0,
            constant_im: 0.0,
            residual_sigma: 0.0,
            transform: "identity".into(),
            transform_gain: 1.0,
            transform_phase: 0.0,
            transform_bias_re: 0.0,
            transform_bias_im: 0.0,
            seed: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SeedSection {
    field: u64,
    noise: u64,
    ensemble: u32,
}

impl Default for SeedSection {
    fn default() -> Self {
        Self {
            field: 1,
            noise: 2,
            ensemble: 1,
        }
    }
}

fn default_name() -> String {
    "default".into()
}

fn default_carrier() -> f64 {
    DEFAULT_CARRIER_HZ
}

fn default_modes() -> Vec<String> {
    Mode::MEASURED
        .iter()
        .map(|m| m.as_str().to_string())
        .collect()
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub carrier_frequency: f64,
    pub modes: Vec<Mode>,
    pub residual_sigma: f64,
    /// Device speed in λ per unit time, for the `t` column.
    pub speed: Option<f64>,
    pub field: FieldParams,
    pub mount: AntennaMount,
    pub total_distance: f64,
    pub step: f64,
    pub model: PiecewiseStaticModel,
    pub noise_seed: u64,
    pub ensemble: u32,
}

impl Default for Scenario {
    /// Half-wavelength aperture, 6 λ of travel sampled every 0.05 λ,
    /// Rayleigh field with 256 paths, all three measured modes, no noise.
    fn default() -> Self {
        Self {
            name: default_name(),
            carrier_frequency: DEFAULT_CARRIER_HZ,
            modes: Mode::MEASURED.to_vec(),
            residual_sigma: 0.0,
            speed: None,
            field: FieldParams {
                seed: 1,
                ..FieldParams::default()
            },
            mount: AntennaMount::new(0.5).expect("valid default mount"),
            total_distance: 6.0,
            step: 0.05,
            model: PiecewiseStaticModel {
                interval_length: 0.5,
                initial: InitialDist::Rice { k: 0.0, omega: 1.0 },
                residual_sigma: 0.0,
                transform: Transform::Identity,
                seed: 2,
            },
            noise_seed: 2,
            ensemble: 1,
        }
    }
}

impl Scenario {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn from_file(f: ScenarioFile) -> Result<Self> {
        let bad = |key: &str, msg: String| SimError::Config(format!("`{key}`: {msg}"));
        let required =
            |key: &str, v: Option<f64>| v.ok_or_else(|| bad(key, "required key is missing".into()));
        let aperture = required("mount.aperture", f.mount.aperture)?;
        let total_distance = required("trajectory.total_distance", f.trajectory.total_distance)?;
        let step = required("trajectory.step", f.trajectory.step)?;

        if f.scenario.is_empty()
            || !f
                .scenario
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(bad(
                "scenario",
                format!(
                    "{:?} must be non-empty and use only [A-Za-z0-9_.-]",
                    f.scenario
                ),
            ));
        }
        if !(f.carrier_frequency > 0.0) || !f.carrier_frequency.is_finite() {
            return Err(bad("carrier_frequency", "must be positive".into()));
        }
        let wavelength = SPEED_OF_LIGHT / f.carrier_frequency;

        let mut modes = Vec::new();
        for m in &f.modes {
            let mode: Mode = m
                .parse()
                .map_err(|e: csa_core::Error| bad("modes", e.to_string()))?;
            if mode == Mode::Model {
                return Err(bad(
                    "modes",
                    "`model` is produced by the `model` command".into(),
                ));
            }
            if !modes.contains(&mode) {
                modes.push(mode);
            }
        }
        if !(f.residual_sigma >= 0.0) || !f.residual_sigma.is_finite() {
            return Err(bad("residual_sigma", "must be >= 0".into()));
        }
        if let Some(v) = f.speed {
            if !(v > 0.0) || !v.is_finite() {
                return Err(bad("speed", "must be positive".into()));
            }
        }

        let field = FieldParams {
            k_factor: f.field.k_factor,
            num_paths: f.field.num_paths,
            los_angle: f.field.los_angle,
            los_phase: f.field.los_phase,
            large_scale_gain: f.field.large_scale_gain,
            link_distance: f.field.link_distance_m.map(|d| d / wavelength),
            seed: f.seeds.field,
        };
        field.validate().map_err(|e| prefixed("field", e))?;

        let mount = AntennaMount {
            aperture,
            initial_offset: f.mount.initial_offset.unwrap_or(aperture),
            fixed_offset: f.mount.fixed_offset,
        };
        mount.validate().map_err(|e| prefixed("mount", e))?;

        csa_core::kinematics::linear_trajectory(total_distance, step)
            .map_err(|e| prefixed("trajectory", e))?;

        if let Some(d0) = field.link_distance {
            let reach = total_distance + mount.aperture;
            if d0 <= reach {
                return Err(bad(
                    "field.link_distance_m",
                    "must exceed the distance the antenna travels".into(),
                ));
            }
        }

        let m = &f.model;
        let initial = match m.initial.as_str() {
            "rice" => InitialDist::Rice {
                k: m.k,
                omega: m.omega,
            },
            "constant" => InitialDist::Constant(Complex64::new(m.constant_re, m.constant_im)),
            other => {
                return Err(bad(
                    "model.initial",
                    format!("unknown distribution {other:?} (rice or constant)"),
                ))
            }
        };
        let transform = Transform::from_name(
            &m.transform,
            m.transform_gain,
            m.transform_phase,
            Complex64::new(m.transform_bias_re, m.transform_bias_im),
        )
        .map_err(|e| prefixed("model", e))?;
        let model = PiecewiseStaticModel {
            interval_length: m.interval_length.unwrap_or(mount.aperture),
            initial,
            residual_sigma: m.residual_sigma,
            transform,
            seed: m.seed.unwrap_or(f.seeds.noise),
        };
        model.validate().map_err(|e| prefixed("model", e))?;

        if f.seeds.ensemble == 0 {
            return Err(bad("seeds.ensemble", "must be at least 1".into()));
        }

        Ok(Scenario {
            name: f.scenario,
            carrier_frequency: f.carrier_frequency,
            modes,
            residual_sigma: f.residual_sigma,
            speed: f.speed,
            field,
            mount,
            total_distance,
            step,
            model,
            noise_seed: f.seeds.noise,
            ensemble: f.seeds.ensemble,
        })
    }
}

fn prefixed(section: &str, err: csa_core::Error) -> SimError {
    match err {
        csa_core::Error::InvalidParameter { name, reason } => {
            SimError::Config(format!("`{section}.{name}`: {reason}"))
        }
        other => SimError::Config(format!("[{section}] {other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        mount.aperture = 0.5
        trajectory.total_distance = 6.0
        trajectory.step = 0.05
    ";

    #[test]
    fn minimal_file_matches_defaults() {
        let s = Scenario::from_toml(MINIMAL).unwrap();
        assert_eq!(s, Scenario::default());
        assert!((s.wavelength_m() - 0.122364).abs() < 1e-5);
    }

    #[test]
    fn missing_required_keys_are_named() {
        for (text, key) in [
            (
                "trajectory.total_distance = 6.0\ntrajectory.step = 0.05\n",
                "`mount.aperture`",
            ),
            (
                "mount.aperture = 0.5\ntrajectory.step = 0.05\n",
                "`trajectory.total_distance`",
            ),
            (
                "mount.aperture = 0.5\ntrajectory.total_distance = 6.0\n",
                "`trajectory.step`",
            ),
        ] {
            let err = Scenario::from_toml(text).unwrap_err();
            assert!(err.to_string().contains(key), "{err}");
        }
    }

    #[test]
    fn missing_aperture_names_the_field() {
        let err = Scenario::from_toml(
            "mount.fixed_offset = 0.0\ntrajectory.total_distance = 6.0\ntrajectory.step = 0.05\n",
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("aperture"), "{err}");
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = Scenario::from_toml(&format!("{MINIMAL}\nfield.doppler = 3\n")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("doppler") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn infinite_k_and_link_distance() {
        let s = Scenario::from_toml(&format!(
            "{MINIMAL}\nfield.k_factor = inf\nfield.link_distance_m = 1.2\n"
        ))
        .unwrap();
        assert!(s.field.k_factor.is_infinite());
        let d0 = s.field.link_distance.unwrap();
        assert!((d0 - 1.2 / s.wavelength_m()).abs() < 1e-12);
    }

    #[test]
    fn invalid_values_name_their_key() {
        for (extra, key) in [
            ("mount.initial_offset = 0.9", "mount.initial_offset"),
            ("field.num_paths = 0", "field.num_paths"),
            ("model.transform = \"warp\"", "warp"),
            ("modes = [\"csa\", \"model\"]", "modes"),
            ("seeds.ensemble = 0", "seeds.ensemble"),
            ("scenario = \"a b\"", "scenario"),
        ] {
            let err = Scenario::from_toml(&format!("{MINIMAL}\n{extra}\n")).unwrap_err();
            assert!(err.to_string().contains(key), "{extra}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn model_section() {
        let s = Scenario::from_toml(&format!(
            "{MINIMAL}
            model.initial = \"constant\"
            model.constant_re = 0.5
            model.residual_sigma = 0.01
            model.transform = \"scale\"
            model.transform_gain = 2.0
            model.seed = 99
            "
        ))
        .unwrap();
        assert_eq!(
            s.model.initial,
            InitialDist::Constant(Complex64::new(0.5, 0.0))
        );
        assert_eq!(s.model.interval_length, 0.5);
        assert_eq!(s.model.seed, 99);
        assert_eq!(
            s.model.transform,
            Transform::Scale {
                gain: 2.0,
                phase: 0.0
            }
        );
    }
}
