//! SVG rendering of a trajectory in its environment.
//!
//! Starts are green circles, goals red crosses. Robot icons are dropped
//! every `icon_spacing` length units of travel, so slow progress (lots of
//! back and forth) shows up as dense clusters.

use std::fmt::Write;
use std::path::Path;

use swarmgc_core::planners::Environment;
use swarmgc_core::{Trajectory, Vector2};

use crate::error::Result;
use crate::scenario::write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub icon_spacing: f64,
    /// Output width in pixels; height follows the bounds' aspect ratio.
    pub width_px: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            icon_spacing: 1.0,
            width_px: 800.0,
        }
    }
}

/// Icon anchors `(position, heading)` for robot `i`: the start, then one
/// every `spacing` of travelled distance.
pub fn icon_points(traj: &Trajectory, i: usize, spacing: f64) -> Vec<(Vector2<f64>, f64)> {
    let samples = traj.samples();
    let mut out = vec![(samples[0].position(i), samples[0].heading(i))];
    let mut next = spacing;
    let mut travelled = 0.0;
    for w in samples.windows(2) {
        let (a, b) = (w[0].position(i), w[1].position(i));
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        // a translating robot keeps its heading over the whole segment
        let heading = w[1].heading(i);
        while travelled + len >= next {
            let t = (next - travelled) / len;
            out.push((a + (b - a) * t, heading));
            next += spacing;
        }
        travelled += len;
    }
    out
}

pub fn render_svg(
    traj: &Trajectory,
    env: &Environment,
    goals: Option<&[Vector2<f64>]>,
    opts: &PlotOptions,
) -> String {
    let b = env.bounds();
    let scale = opts.width_px / b.width();
    let height = b.height() * scale;
    // world to pixels, y up
    let px = |p: Vector2<f64>| ((p.x - b.min.x) * scale, (b.max.y - p.y) * scale);
    let unit = b.width().max(b.height()) / 100.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        opts.width_px, height, opts.width_px, height
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{:.3}" height="{:.3}" fill="white" stroke="black" stroke-width="2"/>"#,
        opts.width_px, height
    );
    for c in env.obstacles() {
        let (x, y) = px(c.center);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="black"/>"#, c.radius * scale);
    }

    let first = traj.initial();
    for i in 0..first.n() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        let mut last = None;
        for sample in traj.samples() {
            let p = sample.position(i);
            if last != Some(p) {
                let (x, y) = px(p);
                let _ = write!(pts, "{x:.2},{y:.2} ");
                last = Some(p);
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        );
        for (p, h) in icon_points(traj, i, opts.icon_spacing) {
            let (x, y) = px(p);
            let l = 1.2 * unit * scale;
            let tip = (x + l * h.cos(), y - l * h.sin());
            let left = (x + 0.5 * l * (h + 2.4).cos(), y - 0.5 * l * (h + 2.4).sin());
            let right = (x + 0.5 * l * (h - 2.4).cos(), y - 0.5 * l * (h - 2.4).sin());
            let _ = writeln!(
                s,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}" fill-opacity="0.6"/>"#,
                tip.0, tip.1, left.0, left.1, right.0, right.1
            );
        }
        let (x, y) = px(first.position(i));
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="green" stroke-width="2"/>"#,
            unit * scale
        );
    }
    for g in goals.unwrap_or(&[]) {
        let (x, y) = px(*g);
        let d = unit * scale;
        let _ = writeln!(
            s,
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="red" stroke-width="2"/>"#,
            x - d, y - d, x + d, y + d, x - d, y + d, x + d, y - d
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_plot(
    traj: &Trajectory,
    env: &Environment,
    goals: Option<&[Vector2<f64>]>,
    opts: &PlotOptions,
    path: &Path,
) -> Result<()> {
    write(path, &render_svg(traj, env, goals, opts))
}
