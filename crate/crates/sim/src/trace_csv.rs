//! CSV trace files.
//!
//! ```text
//! # csa-sim scenario=default field_seed=1 noise_seed=2 step=0.05 speed=
//! n_lambda,t,re,im,mag_db,phase_rad,mode,interval_id,repositioned
//! 0,,0.41,-0.77,-1.19,5.19,csa,0,false
//! ```
//!
//! The optional first comment line carries the trace metadata. `re`/`im` are
//! authoritative; `mag_db` and `phase_rad` (wrapped to [0, 2π)) are there for
//! plotting and are ignored when reading. `t` is empty without a speed.
//! Floats use Rust's shortest round-trip formatting.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use csa_core::analysis::wrap_phase;
use csa_core::{ChannelTrace, Complex64, Mode, TraceMeta, TraceSample};

use crate::error::{Result, SimError};

pub const HEADER: [&str; 9] = [
    "n_lambda",
    "t",
    "re",
    "im",
    "mag_db",
    "phase_rad",
    "mode",
    "interval_id",
    "repositioned",
];

const META_PREFIX: &str = "# csa-sim";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn meta_line(meta: &TraceMeta) -> String {
    format!(
        "{META_PREFIX} scenario={} field_seed={} noise_seed={} step={} speed={}",
        meta.scenario,
        opt(meta.field_seed),
        opt(meta.noise_seed),
        meta.step,
        opt(meta.speed),
    )
}

pub fn write_trace<W: Write>(trace: &ChannelTrace, out: W) -> std::io::Result<()> {
    let mut out = out;
    writeln!(out, "{}", meta_line(&trace.meta))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (i, s) in trace.samples.iter().enumerate() {
        w.write_record([
            s.n.to_string(),
            opt(trace.time_at(i)),
            s.h.re.to_string(),
            s.h.im.to_string(),
            (20.0 * s.h.norm().log10()).to_string(),
            wrap_phase(s.h).to_string(),
            trace.mode.to_string(),
            s.interval_id.to_string(),
            s.repositioned.to_string(),
        ])?;
    }
    w.flush()
}

pub fn trace_to_string(trace: &ChannelTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_trace_file(trace: &ChannelTrace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| SimError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_trace(trace, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| SimError::io(path, e))
}

pub fn read_trace_file(path: &Path) -> Result<ChannelTrace> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| SimError::io(path, e))?;
    parse_trace(&text, &path.display().to_string())
}

/// Parses a trace; `origin` names the source in error messages.
pub fn parse_trace(text: &str, origin: &str) -> Result<ChannelTrace> {
    let err = |msg: String| SimError::schema(origin, msg);

    let mut meta = TraceMeta::default();
    let mut body = text;
    while let Some(line) = body.strip_prefix('#') {
        let (first, rest) = line.split_once('\n').unwrap_or((line, ""));
        if let Some(fields) = format!("#{first}").strip_prefix(META_PREFIX) {
            meta = parse_meta(fields.trim()).map_err(err)?;
        }
        body = rest;
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| err(format!("unreadable header: {e}")))?
        .clone();
    if header.iter().map(str::trim).ne(HEADER.iter().copied()) {
        return Err(err(format!(
            "header must be `{}`, found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut mode: Option<Mode> = None;
    let mut samples = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| err(format!("line {line}: {e}")))?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let num = |i: usize| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| {
                err(format!(
                    "line {line}: column `{}` is not a number: {:?}",
                    HEADER[i],
                    field(i)
                ))
            })
        };
        let row_mode: Mode = field(6)
            .parse()
            .map_err(|e: csa_core::Error| err(format!("line {line}: {e}")))?;
        match mode {
            None => mode = Some(row_mode),
            Some(m) if m != row_mode => {
                return Err(err(format!(
                    "line {line}: mode {row_mode} differs from {m} earlier in the file"
                )))
            }
            _ => {}
        }
        let interval_id = field(7)
            .parse::<u32>()
            .map_err(|_| err(format!("line {line}: bad interval_id {:?}", field(7))))?;
        let repositioned = field(8)
            .parse::<bool>()
            .map_err(|_| err(format!("line {line}: bad repositioned flag {:?}", field(8))))?;
        samples.push(TraceSample {
            n: num(0)?,
            h: Complex64::new(num(2)?, num(3)?),
            interval_id,
            repositioned,
        });
    }
    let mode = mode.ok_or_else(|| err("trace has no samples".into()))?;
    Ok(ChannelTrace::new(mode, samples, meta))
}

fn parse_meta(fields: &str) -> std::result::Result<TraceMeta, String> {
    let mut meta = TraceMeta::default();
    for kv in fields.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("metadata entry {kv:?} is not key=value"))?;
        let bad = |_| format!("metadata {k} has bad value {v:?}");
        match k {
            "scenario" => meta.scenario = v.to_string(),
            "field_seed" if !v.is_empty() => meta.field_seed = Some(v.parse().map_err(bad)?),
            "noise_seed" if !v.is_empty() => meta.noise_seed = Some(v.parse().map_err(bad)?),
            "step" => {
                meta.step = v
                    .parse()
                    .map_err(|_| format!("metadata step has bad value {v:?}"))?
            }
            "speed" if !v.is_empty() => {
                meta.speed = Some(
                    v.parse()
                        .map_err(|_| format!("metadata speed has bad value {v:?}"))?,
                )
            }
            "field_seed" | "noise_seed" | "speed" => {}
            other => return Err(format!("unknown metadata key {other:?}")),
        }
    }
    Ok(meta)
}
