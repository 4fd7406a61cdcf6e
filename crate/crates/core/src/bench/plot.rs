use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::profile::save_profile_csv;
use super::{BenchError, PerfProfile};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Step curves over `log₂ τ` as a standalone SVG document.
pub fn render_svg(profile: &PerfProfile) -> String {
    let xmax = profile.max_finite_ratio().log2().max(1.0).ceil();
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |lt: f64| MARGIN_L + pw * lt / xmax;
    let sy = |rho: f64| MARGIN_T + ph * (1.0 - rho);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let xticks = xmax as usize;
    let step = (xticks / 10).max(1);
    for t in (0..=xticks).step_by(step) {
        let x = sx(t as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{t}</text>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0,
            MARGIN_T + ph + 18.0
        );
    }
    for i in 0..=4 {
        let rho = i as f64 / 4.0;
        let y = sy(rho);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{rho}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">log2(tau)</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">fraction of problems</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0
    );

    for (ci, c) in profile.curves.iter().enumerate() {
        let color = COLORS[ci % COLORS.len()];
        let mut pts = Vec::new();
        let mut prev_y = sy(0.0);
        for &(tau, rho) in &c.points {
            let x = sx(tau.log2());
            pts.push(format!("{x:.2},{prev_y:.2}"));
            prev_y = sy(rho);
            pts.push(format!("{x:.2},{prev_y:.2}"));
        }
        pts.push(format!("{:.2},{prev_y:.2}", sx(xmax)));
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN_T + 15.0 + 18.0 * ci as f64;
        let lx = WIDTH - MARGIN_R + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&c.solver)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the SVG to `svg_path` and the step points to the same path with a
/// `.csv` extension.
pub fn emit_profile_plot(profile: &PerfProfile, svg_path: &Path) -> Result<(), BenchError> {
    save_profile_csv(profile, &svg_path.with_extension("csv"))?;
    fs::write(svg_path, render_svg(profile)).map_err(|e| BenchError::Io {
        path: svg_path.to_path_buf(),
        source: e,
    })
}
