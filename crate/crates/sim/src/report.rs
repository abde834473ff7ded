//! Report serialization.
//!
//! An analysis report is a flat `key=value` text file; per-interval rows and
//! mode comparisons are CSV.

use std::fmt::Write as _;

use csa_core::analysis::{AnalysisReport, ModeSummary};

pub const INTERVALS_HEADER: &str = "interval,start_n,end_n,samples,mean_re,mean_im,variance";
pub const COMPARISON_HEADER: &str =
    "mode,fade_depth_db,total_variation,mean_within_variance,max_within_fade_db,interval_count";

/// Flat key-value report. `source` is recorded as the `trace` key.
pub fn report_text(source: &str, r: &AnalysisReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv("trace", &source);
    kv("mode", &r.mode);
    kv("fade_depth_db", &r.fade_depth.db);
    kv("zero_magnitude", &r.fade_depth.zero_magnitude);
    kv("interval_count", &r.intervals.len());
    kv("mean_within_variance", &r.mean_within_variance());
    match &r.fit.rice {
        Ok(est) => {
            kv("k_hat", &est.k);
            kv("omega_hat", &est.omega);
        }
        Err(e) => {
            kv("k_hat", &"");
            kv("omega_hat", &"");
            kv("fit_note", &e);
        }
    }
    kv("sigma_hat", &r.fit.residual_sigma);
    for (i, p) in r.autocorr.iter().enumerate() {
        kv(&format!("autocorr.{i}.lag"), &p.lag);
        kv(&format!("autocorr.{i}.re"), &p.value.re);
        kv(&format!("autocorr.{i}.im"), &p.value.im);
    }
    out
}

pub fn intervals_csv(r: &AnalysisReport) -> String {
    let mut out = format!("{INTERVALS_HEADER}\n");
    for (i, s) in r.intervals.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{}",
            s.start_n, s.end_n, s.samples, s.mean.re, s.mean.im, s.variance
        );
    }
    out
}

pub fn comparison_csv(rows: &[ModeSummary]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for s in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.mode,
            s.fade_depth_db,
            s.total_variation,
            s.mean_within_variance,
            s.max_within_fade_db,
            s.interval_count
        );
    }
    out
}

/// One-paragraph summary for the terminal.
pub fn summary_line(source: &str, r: &AnalysisReport) -> String {
    let k = match &r.fit.rice {
        Ok(est) => format!("{:.3}", est.k),
        Err(_) => "n/a".into(),
    };
    format!(
        "{source}: mode={} fade_depth={:.2} dB{} intervals={} K_hat={k} sigma_hat={:.4}",
        r.mode,
        r.fade_depth.db,
        if r.fade_depth.zero_magnitude {
            " (zero sample)"
        } else {
            ""
        },
        r.intervals.len(),
        r.fit.residual_sigma
    )
}

/// Distribution of fade depths over an ensemble of traces.
#[derive(Debug, Clone, PartialEq)]
pub struct FadeSummary {
    pub traces: usize,
    pub min_db: f64,
    pub median_db: f64,
    pub mean_db: f64,
    pub max_db: f64,
    /// Share of traces deeper than 20 dB.
    pub share_over_20db: f64,
}

pub fn fade_summary(depths: &[f64]) -> Option<FadeSummary> {
    if depths.is_empty() {
        return None;
    }
    let mut v = depths.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    Some(FadeSummary {
        traces: n,
        min_db: v[0],
        median_db: median,
        mean_db: v.iter().sum::<f64>() / n as f64,
        max_db: v[n - 1],
        share_over_20db: v.iter().filter(|&&d| d > 20.0).count() as f64 / n as f64,
    })
}

pub fn fade_summary_text(s: &FadeSummary) -> String {
    format!(
        "ensemble.traces={}\nensemble.fade_depth_min_db={}\nensemble.fade_depth_median_db={}\n\
         ensemble.fade_depth_mean_db={}\nensemble.fade_depth_max_db={}\nensemble.share_over_20db={}\n",
        s.traces, s.min_db, s.median_db, s.mean_db, s.max_db, s.share_over_20db
    )
}
