//! Deterministic output writers: CSV files with 9-significant-digit
//! formatting, minimal SVG line plots and heatmaps, and the run metadata
//! sidecar. CSV is the authoritative output format; the SVGs are quick-look
//! renderings only.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::dynamics::DensityMatrix;
use crate::error::Result;
use crate::greens::FieldMap;
use crate::pipeline::SweepRow;

/// Nine significant digits, scientific notation; `nan` for excluded points.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// `x_m,y_m,Re_Ez,Im_Ez,abs_Ez`, row-major over the grid.
pub fn write_field_map_csv(path: &Path, map: &FieldMap) -> Result<()> {
    let xs = map.grid.xs();
    let ys = map.grid.ys();
    let mut out = String::with_capacity(map.ez.len() * 64);
    out.push_str("x_m,y_m,Re_Ez,Im_Ez,abs_Ez\n");
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let ez = map.ez[j * map.grid.nx + i];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sig9(x),
                sig9(y),
                sig9(ez.re),
                sig9(ez.im),
                sig9(ez.norm())
            );
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Sweep CSV: swept variable, the four normalized cross rates, concurrence.
pub fn write_sweep_csv(path: &Path, sweep_column: &str, rows: &[SweepRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 96 + 128);
    let _ = writeln!(
        out,
        "{sweep_column},gamma12_over_gamma11,gamma21_over_gamma11,g12_over_gamma11,g21_over_gamma11,concurrence"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(r.sweep_value),
            sig9(r.gamma12),
            sig9(r.gamma21),
            sig9(r.g12),
            sig9(r.g21),
            sig9(r.concurrence)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Trajectory CSV: time, all 16 density-matrix entries (row-major, re/im),
/// concurrence.
pub fn write_trajectory_csv(
    path: &Path,
    trajectory: &[(f64, DensityMatrix)],
    concurrences: &[f64],
) -> Result<()> {
    let mut header = String::from("t_gamma11");
    for i in 1..=4 {
        for j in 1..=4 {
            let _ = write!(header, ",rho{i}{j}_re,rho{i}{j}_im");
        }
    }
    header.push_str(",concurrence\n");
    let mut out = header;
    for ((t, state), c) in trajectory.iter().zip(concurrences) {
        let _ = write!(out, "{}", sig9(*t));
        for i in 0..4 {
            for j in 0..4 {
                let z = state.0[(i, j)];
                let _ = write!(out, ",{},{}", sig9(z.re), sig9(z.im));
            }
        }
        let _ = writeln!(out, ",{}", sig9(*c));
    }
    fs::write(path, out)?;
    Ok(())
}

/// `f_THz,qx_per_m,Re_sigma_over_sigmin,Im_sigma_over_sigmin`.
pub fn write_conductivity_csv(path: &Path, rows: &[(f64, f64, Complex64)]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 64 + 64);
    out.push_str("f_THz,qx_per_m,Re_sigma_over_sigmin,Im_sigma_over_sigmin\n");
    for (f, qx, sigma) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            sig9(*f),
            sig9(*qx),
            sig9(sigma.re),
            sig9(sigma.im)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// One dispersion record: either a converged root or a failure marker.
pub struct DispersionRow {
    pub f_thz: f64,
    pub phi_deg: f64,
    pub q: Option<Complex64>,
    pub residual: Option<f64>,
    pub status: &'static str,
}

/// `f_THz,phi_deg,Re_q_per_m,Im_q_per_m,residual,status`.
pub fn write_dispersion_csv(path: &Path, rows: &[DispersionRow]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 80 + 64);
    out.push_str("f_THz,phi_deg,Re_q_per_m,Im_q_per_m,residual,status\n");
    for r in rows {
        let (re, im) = match r.q {
            Some(q) => (sig9(q.re), sig9(q.im)),
            None => ("nan".to_string(), "nan".to_string()),
        };
        let res = match r.residual {
            Some(v) => sig9(v),
            None => "nan".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(r.f_thz),
            sig9(r.phi_deg),
            re,
            im,
            res,
            r.status
        );
    }
    fs::write(path, out)?;
    Ok(())
}

const PLOT_W: f64 = 800.0;
const PLOT_H: f64 = 560.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 60.0;

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn svg_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Single-series line plot.
pub fn write_line_plot_svg(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
) -> Result<()> {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x0, x1) = axis_range(finite.iter().map(|p| p.0));
    let (y0, y1) = axis_range(finite.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (PLOT_W - MARGIN_L - MARGIN_R);
    let sy = |y: f64| PLOT_H - MARGIN_B - (y - y0) / (y1 - y0) * (PLOT_H - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}"><rect width="100%" height="100%" fill="white"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        PLOT_W / 2.0,
        svg_escape(title)
    );
    // frame
    let _ = write!(
        svg,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        PLOT_W - MARGIN_L - MARGIN_R,
        PLOT_H - MARGIN_T - MARGIN_B
    );
    // ticks
    for k in 0..=4 {
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let xp = sx(xv);
        let yp = sy(yv);
        let _ = write!(
            svg,
            r#"<line x1="{xp:.1}" y1="{:.1}" x2="{xp:.1}" y2="{:.1}" stroke="black"/><text x="{xp:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.3e}</text>"#,
            PLOT_H - MARGIN_B,
            PLOT_H - MARGIN_B + 6.0,
            PLOT_H - MARGIN_B + 20.0,
            xv
        );
        let _ = write!(
            svg,
            r#"<line x1="{:.1}" y1="{yp:.1}" x2="{MARGIN_L}" y2="{yp:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3e}</text>"#,
            MARGIN_L - 6.0,
            MARGIN_L - 9.0,
            yp + 4.0,
            yv
        );
    }
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_L + (PLOT_W - MARGIN_L - MARGIN_R) / 2.0,
        PLOT_H - 14.0,
        svg_escape(x_label)
    );
    let _ = write!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0,
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0,
        svg_escape(y_label)
    );
    if !finite.is_empty() {
        let mut poly = String::new();
        for (x, y) in &finite {
            let _ = write!(poly, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = write!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="#1965b0" stroke-width="1.6"/>"##,
            poly.trim_end()
        );
    }
    svg.push_str("</svg>");
    fs::write(path, svg)?;
    Ok(())
}

/// Five-stop dark-to-bright colormap for field magnitudes.
fn colormap(t: f64) -> (u8, u8, u8) {
    let stops: [(f64, [f64; 3]); 5] = [
        (0.0, [13.0, 8.0, 135.0]),
        (0.25, [126.0, 3.0, 168.0]),
        (0.5, [204.0, 71.0, 120.0]),
        (0.75, [248.0, 149.0, 64.0]),
        (1.0, [240.0, 249.0, 33.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    for w in stops.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let u = (t - t0) / (t1 - t0);
            return (
                (c0[0] + u * (c1[0] - c0[0])) as u8,
                (c0[1] + u * (c1[1] - c0[1])) as u8,
                (c0[2] + u * (c1[2] - c0[2])) as u8,
            );
        }
    }
    (240, 249, 33)
}

/// Heatmap of |E_z| over the field-map grid; excluded cells render grey.
/// Magnitudes are normalized to the 99th percentile to keep the near-field
/// peak from washing out the propagating pattern.
pub fn write_heatmap_svg(path: &Path, title: &str, map: &FieldMap) -> Result<()> {
    let nx = map.grid.nx;
    let ny = map.grid.ny;
    let mut mags: Vec<f64> = map
        .ez
        .iter()
        .map(|z| z.norm())
        .filter(|m| m.is_finite())
        .collect();
    mags.sort_by(f64::total_cmp);
    let vmax = if mags.is_empty() {
        1.0
    } else {
        mags[((mags.len() - 1) as f64 * 0.99) as usize].max(f64::MIN_POSITIVE)
    };

    let cell_w = (PLOT_W - MARGIN_L - MARGIN_R) / nx as f64;
    let cell_h = (PLOT_H - MARGIN_T - MARGIN_B) / ny as f64;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}"><rect width="100%" height="100%" fill="white"/>"#
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        PLOT_W / 2.0,
        svg_escape(title)
    );
    for j in 0..ny {
        for i in 0..nx {
            let z = map.ez[j * nx + i];
            let color = if z.re.is_nan() {
                "#b0b0b0".to_string()
            } else {
                let (r, g, b) = colormap(z.norm() / vmax);
                format!("#{r:02x}{g:02x}{b:02x}")
            };
            // y axis points up: row j=0 is the bottom of the plot
            let x = MARGIN_L + i as f64 * cell_w;
            let y = PLOT_H - MARGIN_B - (j + 1) as f64 * cell_h;
            let _ = write!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                cell_w + 0.5,
                cell_h + 0.5
            );
        }
    }
    let _ = write!(
        svg,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        PLOT_W - MARGIN_L - MARGIN_R,
        PLOT_H - MARGIN_T - MARGIN_B
    );
    let _ = write!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">x (m)</text><text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">y (m)</text>"#,
        MARGIN_L + (PLOT_W - MARGIN_L - MARGIN_R) / 2.0,
        PLOT_H - 14.0,
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0,
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0
    );
    svg.push_str("</svg>");
    fs::write(path, svg)?;
    Ok(())
}
