//! Files written by the commands: snapshot tables, JSON records, SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use atomchain::FieldSnapshot;
use serde::Serialize;

use crate::config::OutputFormat;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// File stem for one sample: `M0064_conservative_t0.040000`.
pub fn sample_stem(cells: usize, label: &str, t: f64) -> String {
    format!("M{:04}_{}_t{:.6}", cells, label, t)
}

#[derive(Serialize)]
struct SnapshotRecord<'a> {
    t: f64,
    dx: f64,
    x: &'a [f64],
    strain: &'a [f64],
    velocity: &'a [f64],
    position: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    strain_avg: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    velocity_avg: Option<&'a [f64]>,
}

/// Writes `snap` (and the averaged fields, if any) as `<stem>.csv` or
/// `<stem>.json` and returns the file name relative to `dir`.
pub fn write_snapshot(
    dir: &Path,
    stem: &str,
    snap: &FieldSnapshot,
    avg: Option<&FieldSnapshot>,
    format: OutputFormat,
) -> Result<String> {
    let name = match format {
        OutputFormat::Csv => format!("{}.csv", stem),
        OutputFormat::Json => format!("{}.json", stem),
    };
    let path = dir.join(&name);
    match format {
        OutputFormat::Csv => write_csv(&path, snap, avg)?,
        OutputFormat::Json => {
            let record = SnapshotRecord {
                t: snap.t,
                dx: snap.dx,
                x: &snap.x,
                strain: &snap.strain,
                velocity: &snap.velocity,
                position: &snap.position,
                strain_avg: avg.map(|a| a.strain.as_slice()),
                velocity_avg: avg.map(|a| a.velocity.as_slice()),
            };
            write_json(&path, &record)?;
        }
    }
    Ok(name)
}

fn write_csv(path: &Path, snap: &FieldSnapshot, avg: Option<&FieldSnapshot>) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let header = if avg.is_some() { "X,F,v,phi,F_avg,v_avg" } else { "X,F,v,phi" };
    writeln!(w, "{}", header)?;
    for j in 0..snap.len() {
        write!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            snap.x[j], snap.strain[j], snap.velocity[j], snap.position[j]
        )?;
        if let Some(a) = avg {
            write!(w, ",{:.16e},{:.16e}", a.strain[j], a.velocity[j])?;
        }
        writeln!(w)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush().with_context(|| format!("cannot write {}", path.display()))
}

/// One curve of a line plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Bare-bones SVG line plot with axis ranges in the corner labels.
pub fn write_svg(path: &Path, title: &str, series: &[Series<'_>]) -> Result<PathBuf> {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let ys = series.iter().flat_map(|s| s.y.iter()).filter(finite);
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#)?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    )?;
    writeln!(svg, r#"<text x="{pad}" y="24" font-size="14" font-family="sans-serif">{}</text>"#, escape(title))?;
    let small = r#"font-size="10" font-family="sans-serif""#;
    writeln!(svg, r#"<text x="{pad}" y="{}" {small}>{x0:.4}</text>"#, h - pad + 14.0)?;
    writeln!(svg, r#"<text x="{}" y="{}" {small} text-anchor="end">{x1:.4}</text>"#, w - pad, h - pad + 14.0)?;
    writeln!(svg, r#"<text x="{}" y="{}" {small} text-anchor="end">{y0:.4}</text>"#, pad - 2.0, h - pad)?;
    writeln!(svg, r#"<text x="{}" y="{}" {small} text-anchor="end">{y1:.4}</text>"#, pad - 2.0, pad + 10.0)?;
    for (k, s) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let mut points = String::new();
        for (&x, &y) in s.x.iter().zip(s.y) {
            if x.is_finite() && y.is_finite() {
                write!(points, "{:.2},{:.2} ", sx(x), sy(y))?;
            }
        }
        writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#, points.trim_end())?;
        writeln!(
            svg,
            r#"<text x="{}" y="{}" {small} fill="{colour}" text-anchor="end">{}</text>"#,
            w - pad - 4.0,
            pad + 14.0 * (k as f64 + 1.0),
            escape(s.label)
        )?;
    }
    writeln!(svg, "</svg>")?;
    fs::write(path, svg).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path.to_path_buf())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Strain plot of a snapshot, with the averaged strain when present.
pub fn plot_snapshot(dir: &Path, stem: &str, snap: &FieldSnapshot, avg: Option<&FieldSnapshot>) -> Result<String> {
    let name = format!("{}.svg", stem);
    let mut series = vec![Series { label: "F", x: &snap.x, y: &snap.strain }];
    if let Some(a) = avg {
        series.push(Series { label: "F_avg", x: &a.x, y: &a.strain });
    }
    write_svg(&dir.join(&name), &format!("{} (t = {:.4})", stem, snap.t), &series)?;
    Ok(name)
}
