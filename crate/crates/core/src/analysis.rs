//! Metrics over channel traces.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{synthesize_field, FieldParams};
use crate::model::{fit_model, ModelFit};
use crate::trace::{ChannelTrace, Mode};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadeDepth {
    /// 20·log₁₀(max|h| / min|h|); infinite when a sample is exactly zero.
    pub db: f64,
    pub zero_magnitude: bool,
}

pub fn fade_depth(trace: &ChannelTrace) -> Result<FadeDepth> {
    fade_depth_of(trace.values())
}

pub fn fade_depth_of(values: impl IntoIterator<Item = Complex64>) -> Result<FadeDepth> {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    let mut any = false;
    for h in values {
        let m = h.norm();
        min = min.min(m);
        max = max.max(m);
        any = true;
    }
    if !any {
        return Err(Error::InvalidInput("fade depth of an empty trace".into()));
    }
    if min == 0.0 {
        return Ok(FadeDepth {
            db: f64::INFINITY,
            zero_magnitude: true,
        });
    }
    // max == min gives exactly 0 dB.
    Ok(FadeDepth {
        db: 20.0 * (max / min).log10(),
        zero_magnitude: false,
    })
}

/// Phase of `h` in [0, 2π). The phase of 0 is 0.
pub fn wrap_phase(h: Complex64) -> f64 {
    let p = h.im.atan2(h.re);
    let w = if p < 0.0 { p + TAU } else { p };
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub phases: Vec<f64>,
    /// Samples where h = 0 and the phase is undefined.
    pub zero_samples: Vec<usize>,
}

pub fn wrap_phases(trace: &ChannelTrace) -> Result<PhaseSeries> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("phase of an empty trace".into()));
    }
    let phases = trace.values().map(wrap_phase).collect();
    let zero_samples = trace
        .values()
        .enumerate()
        .filter(|(_, h)| *h == Complex64::new(0.0, 0.0))
        .map(|(i, _)| i)
        .collect();
    Ok(PhaseSeries {
        phases,
        zero_samples,
    })
}

/// Partition of a trace into contiguous intervals, stored as the index of
/// the first sample of each interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    starts: Vec<usize>,
    len: usize,
}

impl Segmentation {
    pub fn from_starts(starts: Vec<usize>, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidInput("cannot segment an empty trace".into()));
        }
        if starts.first() != Some(&0) {
            return Err(Error::InvalidInput("first interval must start at 0".into()));
        }
        if !starts.windows(2).all(|w| w[0] < w[1]) || starts.last().is_some_and(|&s| s >= len) {
            return Err(Error::InvalidInput(
                "interval starts must increase and stay inside the trace".into(),
            ));
        }
        Ok(Self { starts, len })
    }

    /// Intervals as recorded in the trace's `interval_id` column.
    pub fn from_interval_ids(trace: &ChannelTrace) -> Result<Self> {
        Self::from_starts(trace.interval_starts(), trace.len())
    }

    /// Tiles the device axis with intervals of `length`; sample `n` belongs
    /// to interval ⌈n / length⌉ − 1 (interval 0 for n = 0).
    pub fn uniform(trace: &ChannelTrace, length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::param(
                "interval_length",
                format!("must be positive, got {length}"),
            ));
        }
        let ids = trace.positions().map(|n| uniform_interval(n, length));
        let mut starts = Vec::new();
        let mut prev = None;
        for (i, id) in ids.enumerate() {
            if prev != Some(id) {
                starts.push(i);
                prev = Some(id);
            }
        }
        Self::from_starts(starts, trace.len())
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn count(&self) -> usize {
        self.starts.len()
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.starts.iter().enumerate().map(move |(k, &s)| {
            let end = self.starts.get(k + 1).copied().unwrap_or(self.len);
            s..end
        })
    }
}

pub(crate) fn uniform_interval(n: f64, length: f64) -> u32 {
    let c = (n / length - 1e-9).ceil();
    if c < 1.0 {
        0
    } else {
        c as u32 - 1
    }
}

/// Mean of `values`, referenced to the first element so a constant run
/// returns that constant bit-exactly.
pub(crate) fn shifted_mean(values: &[Complex64]) -> Complex64 {
    let first = values[0];
    let offset: Complex64 = values.iter().map(|&h| h - first).sum();
    first + offset / values.len() as f64
}

/// Greedy scan: a new interval starts at the first sample whose distance
/// from the current interval's running mean exceeds `epsilon`. Works on the
/// complex value, so pure phase jumps are detected.
pub fn segment_static(trace: &ChannelTrace, epsilon: f64) -> Result<Segmentation> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("cannot segment an empty trace".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::param(
            "epsilon",
            format!("must be positive, got {epsilon}"),
        ));
    }
    let mut starts = alloc::vec![0usize];
    let mut first = trace.samples[0].h;
    let mut offset_sum = Complex64::new(0.0, 0.0);
    let mut count = 1usize;

    for (i, s) in trace.samples.iter().enumerate().skip(1) {
        let mean = first + offset_sum / count as f64;
        if (s.h - mean).norm() > epsilon {
            starts.push(i);
            first = s.h;
            offset_sum = Complex64::new(0.0, 0.0);
            count = 1;
        } else {
            offset_sum += s.h - first;
            count += 1;
        }
    }
    Segmentation::from_starts(starts, trace.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalStats {
    pub start_n: f64,
    pub end_n: f64,
    pub samples: usize,
    pub mean: Complex64,
    /// Unbiased sample variance Σ|h − mean|² / (count − 1); 0 for a single
    /// sample.
    pub variance: f64,
}

pub fn interval_stats(trace: &ChannelTrace, seg: &Segmentation) -> Result<Vec<IntervalStats>> {
    if seg.len != trace.len() {
        return Err(Error::InvalidInput(format!(
            "segmentation covers {} samples, trace has {}",
            seg.len,
            trace.len()
        )));
    }
    let values: Vec<Complex64> = trace.values().collect();
    Ok(seg
        .ranges()
        .map(|r| {
            let chunk = &values[r.clone()];
            let mean = shifted_mean(chunk);
            let ss: f64 = chunk.iter().map(|h| (h - mean).norm_sqr()).sum();
            let variance = if chunk.len() > 1 {
                ss / (chunk.len() - 1) as f64
            } else {
                0.0
            };
            IntervalStats {
                start_n: trace.samples[r.start].n,
                end_n: trace.samples[r.end - 1].n,
                samples: chunk.len(),
                mean,
                variance,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceEstimate {
    /// K̂; `f64::INFINITY` when the magnitudes show no scatter.
    pub k: f64,
    /// Ω̂ = E[r²].
    pub omega: f64,
}

/// Moment estimator from m₂ = E[r²] and m₄ = E[r⁴]:
/// γ = √max(0, 2m₂² − m₄), K̂ = γ / (m₂ − γ), Ω̂ = m₂.
///
/// Biased at small sample counts, and for K near 0 the square root makes the
/// spread decay only like n^(-1/4).
pub fn estimate_rice_k(magnitudes: &[f64]) -> Result<RiceEstimate> {
    if magnitudes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "K estimation needs at least 2 samples, got {}",
            magnitudes.len()
        )));
    }
    if let Some(bad) = magnitudes.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "magnitude {bad} is not a finite value >= 0"
        )));
    }
    let n = magnitudes.len() as f64;
    let m2 = magnitudes.iter().map(|r| r * r).sum::<f64>() / n;
    let m4 = magnitudes.iter().map(|r| (r * r) * (r * r)).sum::<f64>() / n;

    let first = magnitudes[0];
    if magnitudes.iter().all(|&r| r == first) {
        return Ok(RiceEstimate {
            k: f64::INFINITY,
            omega: m2,
        });
    }
    let gamma = (2.0 * m2 * m2 - m4).max(0.0).sqrt();
    let k = if m2 - gamma > 0.0 {
        gamma / (m2 - gamma)
    } else {
        f64::INFINITY
    };
    Ok(RiceEstimate { k, omega: m2 })
}

/// Reference positions per seed for [`spatial_autocorr`].
pub const AUTOCORR_REFERENCES: usize = 16;
/// Spacing of the reference positions (λ), well beyond the correlation
/// length so the references decorrelate.
pub const AUTOCORR_REFERENCE_SPACING: f64 = 3.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrPoint {
    pub lag: f64,
    pub value: Complex64,
}

/// Normalized spatial autocorrelation
/// E[H(x) H*(x+d)] / √(E|H(x)|² E|H(x+d)|²), averaged over `num_seeds`
/// fields (seeds `params.seed + i`) and [`AUTOCORR_REFERENCES`] reference
/// positions per field. Lag 0 gives exactly 1.
///
/// For K = 0 the real part approaches J₀(2πd).
pub fn spatial_autocorr(
    params: &FieldParams,
    lags: &[f64],
    num_seeds: u32,
) -> Result<Vec<AutocorrPoint>> {
    if num_seeds == 0 {
        return Err(Error::param("num_seeds", "must be at least 1"));
    }
    if let Some(bad) = lags.iter().find(|d| !d.is_finite()) {
        return Err(Error::param("lags", format!("lag {bad} is not finite")));
    }
    params.validate()?;

    let zero = Complex64::new(0.0, 0.0);
    let mut cross = alloc::vec![zero; lags.len()];
    let mut power_lag = alloc::vec![0.0f64; lags.len()];
    let mut power_ref = 0.0f64;

    let refs: Vec<f64> = (0..AUTOCORR_REFERENCES)
        .map(|i| i as f64 * AUTOCORR_REFERENCE_SPACING)
        .collect();
    let mut lag_phasors = Vec::new();

    for s in 0..num_seeds {
        let field = synthesize_field(FieldParams {
            seed: params.seed.wrapping_add(s as u64),
            ..*params
        })?;
        let w = field.diffuse_weight();
        let freq = field.spatial_freq();

        // Per-path terms at each reference: aₘ e^{j(kₘx + φₘ)}.
        let base: Vec<Vec<Complex64>> = refs
            .iter()
            .map(|&x| {
                field
                    .paths()
                    .iter()
                    .zip(freq)
                    .map(|(p, k)| Complex64::from_polar(p.amplitude, k * x + p.phase))
                    .collect()
            })
            .collect();
        let at_ref: Vec<Complex64> = refs
            .iter()
            .zip(&base)
            .map(|(&x, terms)| {
                (field.los_term(x) + terms.iter().sum::<Complex64>() * w) * field.gain_at(x)
            })
            .collect();
        // Same summation order as the lag sums, so lag 0 normalizes to 1.
        for h in &at_ref {
            power_ref += h.norm_sqr();
        }

        for (j, &d) in lags.iter().enumerate() {
            lag_phasors.clear();
            lag_phasors.extend(freq.iter().map(|k| Complex64::from_polar(1.0, k * d)));
            for ((&x, terms), h_ref) in refs.iter().zip(&base).zip(&at_ref) {
                let diffuse: Complex64 = terms.iter().zip(&lag_phasors).map(|(b, l)| b * l).sum();
                let h = (field.los_term(x + d) + diffuse * w) * field.gain_at(x + d);
                cross[j] += h_ref * h.conj();
                power_lag[j] += h.norm_sqr();
            }
        }
    }

    Ok(lags
        .iter()
        .zip(cross.iter().zip(&power_lag))
        .map(|(&lag, (&r, &p))| AutocorrPoint {
            lag,
            value: r / (power_ref * p).sqrt(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSummary {
    pub mode: Mode,
    pub fade_depth_db: f64,
    /// Σ | |h_{i+1}| − |h_i| |.
    pub total_variation: f64,
    /// Mean over recorded intervals of the within-interval variance.
    pub mean_within_variance: f64,
    /// Largest fade depth found inside any single interval.
    pub max_within_fade_db: f64,
    pub interval_count: usize,
}

/// One summary row per trace. All traces must share the device grid.
pub fn compare_modes(traces: &[ChannelTrace]) -> Result<Vec<ModeSummary>> {
    let Some(first) = traces.first() else {
        return Err(Error::InvalidInput("nothing to compare".into()));
    };
    for t in traces {
        if t.len() != first.len() || !t.positions().eq(first.positions()) {
            return Err(Error::InvalidInput(format!(
                "{} trace is on a different device grid",
                t.mode
            )));
        }
    }
    traces.iter().map(summarize_mode).collect()
}

fn summarize_mode(trace: &ChannelTrace) -> Result<ModeSummary> {
    let seg = Segmentation::from_interval_ids(trace)?;
    let stats = interval_stats(trace, &seg)?;
    let mean_within_variance = stats.iter().map(|s| s.variance).sum::<f64>() / stats.len() as f64;
    let mut max_within_fade_db = 0.0f64;
    for r in seg.ranges() {
        let fd = fade_depth_of(trace.samples[r].iter().map(|s| s.h))?;
        max_within_fade_db = max_within_fade_db.max(fd.db);
    }
    let total_variation = trace
        .samples
        .windows(2)
        .map(|w| (w[1].h.norm() - w[0].h.norm()).abs())
        .sum();
    Ok(ModeSummary {
        mode: trace.mode,
        fade_depth_db: fade_depth(trace)?.db,
        total_variation,
        mean_within_variance,
        max_within_fade_db,
        interval_count: seg.count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    /// Segmentation threshold. `None` uses the trace's interval ids.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub mode: Mode,
    pub fade_depth: FadeDepth,
    pub intervals: Vec<IntervalStats>,
    pub fit: ModelFit,
    pub autocorr: Vec<AutocorrPoint>,
    pub comparison: Vec<ModeSummary>,
}

impl AnalysisReport {
    pub fn mean_within_variance(&self) -> f64 {
        if self.intervals.is_empty() {
            return 0.0;
        }
        self.intervals.iter().map(|s| s.variance).sum::<f64>() / self.intervals.len() as f64
    }
}

/// Fade depth, intervals and model fit for a single trace.
pub fn analyze_trace(trace: &ChannelTrace, options: AnalyzeOptions) -> Result<AnalysisReport> {
    let seg = match options.epsilon {
        Some(eps) => segment_static(trace, eps)?,
        None => Segmentation::from_interval_ids(trace)?,
    };
    Ok(AnalysisReport {
        mode: trace.mode,
        fade_depth: fade_depth(trace)?,
        intervals: interval_stats(trace, &seg)?,
        fit: fit_model(trace, &seg)?,
        autocorr: Vec::new(),
        comparison: compare_modes(core::slice::from_ref(trace))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{TraceMeta, TraceSample};
    use alloc::vec;
    use core::f64::consts::PI;

    fn trace_of(mode: Mode, values: &[Complex64]) -> ChannelTrace {
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, &h)| TraceSample {
                n: i as f64 * 0.1,
                h,
                interval_id: 0,
                repositioned: false,
            })
            .collect();
        ChannelTrace::new(mode, samples, TraceMeta::default())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fade_depth_examples() {
        let t = trace_of(Mode::Stationary, &[c(0.3, 0.4); 5]);
        assert_eq!(fade_depth(&t).unwrap().db, 0.0);

        let t = trace_of(Mode::Regular, &[c(1.0, 0.0), c(0.0, 0.1), c(-1.0, 0.0)]);
        assert!((fade_depth(&t).unwrap().db - 20.0).abs() < 1e-12);

        let t = trace_of(Mode::Regular, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let fd = fade_depth(&t).unwrap();
        assert!(fd.zero_magnitude && fd.db.is_infinite());

        assert!(fade_depth(&trace_of(Mode::Regular, &[])).is_err());
    }

    #[test]
    fn phase_wrapping() {
        assert_eq!(wrap_phase(c(-1.0, 0.0)), PI);
        assert_eq!(wrap_phase(c(1.0, 0.0)), 0.0);
        let h = Complex64::from_polar(1.0, TAU + 0.3);
        assert!((wrap_phase(h) - 0.3).abs() < 1e-12);
        assert!((wrap_phase(c(0.0, -1.0)) - 1.5 * PI).abs() < 1e-15);
        assert_eq!(wrap_phase(c(1.0, -0.0)), 0.0);
        assert_eq!(wrap_phase(c(1.0, -1e-300)), 0.0);

        let t = trace_of(Mode::Regular, &[c(0.0, 0.0), c(1.0, 1.0)]);
        let ps = wrap_phases(&t).unwrap();
        assert_eq!(ps.phases[0], 0.0);
        assert_eq!(ps.zero_samples, vec![0]);
    }

    #[test]
    fn segmentation_of_constant_trace() {
        let t = trace_of(Mode::Stationary, &[c(0.1, 0.7); 40]);
        let seg = segment_static(&t, 1e-6).unwrap();
        assert_eq!(seg.starts(), &[0]);
    }

    #[test]
    fn segmentation_detects_phase_only_jump() {
        let a = Complex64::from_polar(1.0, 0.2);
        let b = Complex64::from_polar(1.0, 1.9);
        let t = trace_of(Mode::Csa, &[a, a, a, b, b]);
        let seg = segment_static(&t, 1e-6).unwrap();
        assert_eq!(seg.starts(), &[0, 3]);
        assert_eq!(seg.ranges().collect::<Vec<_>>(), vec![0..3, 3..5]);
    }

    #[test]
    fn segmentation_rejects_bad_threshold() {
        let t = trace_of(Mode::Csa, &[c(1.0, 0.0)]);
        assert!(segment_static(&t, 0.0).is_err());
    }

    #[test]
    fn uniform_tiling_matches_counter_movement_convention() {
        let samples = (0..=120)
            .map(|i| TraceSample {
                n: i as f64 * 0.05,
                h: c(1.0, 0.0),
                interval_id: 0,
                repositioned: false,
            })
            .collect();
        let t = ChannelTrace::new(Mode::Model, samples, TraceMeta::default());
        let seg = Segmentation::uniform(&t, 0.5).unwrap();
        assert_eq!(seg.count(), 12);
        assert_eq!(seg.starts()[1], 11);
    }

    #[test]
    fn rice_estimator_edges() {
        let est = estimate_rice_k(&[0.7; 10]).unwrap();
        assert!(est.k.is_infinite());
        assert!((est.omega - 0.49).abs() < 1e-15);
        assert!(matches!(
            estimate_rice_k(&[1.0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(estimate_rice_k(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn rice_estimator_on_two_point_distribution() {
        // r ∈ {1, 2}: m₂ = 2.5, m₄ = 8.5, γ = √4 = 2, K = 2 / 0.5 = 4.
        let est = estimate_rice_k(&[1.0, 2.0]).unwrap();
        assert_eq!(est.omega, 2.5);
        assert_eq!(est.k, 4.0);
    }

    #[test]
    fn autocorr_lag_zero_is_one() {
        let params = FieldParams {
            num_paths: 64,
            seed: 5,
            ..Default::default()
        };
        let ac = spatial_autocorr(&params, &[0.0, 0.25], 3).unwrap();
        assert_eq!(ac[0].value, c(1.0, 0.0));
        assert!(ac[1].value.norm() <= 1.0 + 1e-9);
        assert!(spatial_autocorr(&params, &[0.0], 0).is_err());
    }

    #[test]
    fn compare_rejects_mismatched_grids() {
        let a = trace_of(Mode::Regular, &[c(1.0, 0.0); 3]);
        let b = trace_of(Mode::Csa, &[c(1.0, 0.0); 4]);
        assert!(matches!(
            compare_modes(&[a, b]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn single_stationary_row_has_no_variation() {
        let t = trace_of(Mode::Stationary, &[c(0.2, -0.9); 8]);
        let rows = compare_modes(&[t]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = rows[0];
        assert_eq!(r.total_variation, 0.0);
        assert_eq!(r.mean_within_variance, 0.0);
        assert_eq!(r.fade_depth_db, 0.0);
        assert_eq!(r.interval_count, 1);
    }
}
