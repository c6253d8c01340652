//! CSV, JSON and SVG renderings of a phase portrait.

use crate::{num, FixedPointRow};
use curveflow::virial_flow::{Portrait, Termination};
use serde::Serialize;
use std::fmt::Write;

const SVG_SIZE: f64 = 640.0;
const SVG_MARGIN: f64 = 48.0;

fn direction(path_end: f64) -> &'static str {
    if path_end >= 0.0 {
        "forward"
    } else {
        "backward"
    }
}

#[derive(Serialize)]
struct TrajectoryRecord {
    seed: (f64, f64),
    direction: &'static str,
    termination: Termination,
    /// `(s, y, N₀)`
    samples: Vec<(f64, f64, f64)>,
    parabola_crossings: Vec<(f64, f64, f64)>,
}

#[derive(Serialize)]
struct DirectionRecord {
    y: f64,
    #[serde(rename = "N0")]
    n0: f64,
    dy: f64,
    #[serde(rename = "dN0")]
    dn0: f64,
}

#[derive(Serialize)]
struct PortraitRecord {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    window: [f64; 4],
    fixed_points: Vec<FixedPointRow>,
    directions: Vec<DirectionRecord>,
    trajectories: Vec<TrajectoryRecord>,
    parabola: Vec<Vec<(f64, f64)>>,
}

pub fn to_json(p: &Portrait, samples: usize) -> serde_json::Result<String> {
    let w = p.window;
    let record = PortraitRecord {
        a: p.params.a,
        b: p.params.b,
        window: [w.y_min, w.y_max, w.n_min, w.n_max],
        fixed_points: p.fixed_points.iter().map(FixedPointRow::from).collect(),
        directions: p.directions.iter().map(|d| DirectionRecord { y: d.y, n0: d.n0, dy: d.dy, dn0: d.dn0 }).collect(),
        trajectories: p
            .trajectories
            .iter()
            .map(|t| TrajectoryRecord {
                seed: t.start,
                direction: direction(t.path.t_end()),
                termination: t.termination,
                samples: t.samples(samples),
                parabola_crossings: t.parabola_crossings.clone(),
            })
            .collect(),
        parabola: p.parabola.clone(),
    };
    serde_json::to_string_pretty(&record).map(|s| s + "\n")
}

/// One row per direction-grid cell and one per trajectory sample; columns
/// that do not apply to a row are left empty.
pub fn to_csv(p: &Portrait, samples: usize) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "trajectory", "s", "y", "N0", "dy", "dN0"])?;
    for d in &p.directions {
        w.write_record(["direction", "", "", &num(d.y), &num(d.n0), &num(d.dy), &num(d.dn0)])?;
    }
    for (i, t) in p.trajectories.iter().enumerate() {
        let index = i.to_string();
        for (s, y, n) in t.samples(samples) {
            w.write_record(["trajectory", &index, &num(s), &num(y), &num(n), "", ""])?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

struct Frame {
    y0: f64,
    sy: f64,
    n0: f64,
    sn: f64,
}

impl Frame {
    fn new(p: &Portrait) -> Self {
        let inner = SVG_SIZE - 2.0 * SVG_MARGIN;
        let w = p.window;
        Self { y0: w.y_min, sy: inner / (w.y_max - w.y_min), n0: w.n_min, sn: inner / (w.n_max - w.n_min) }
    }

    fn map(&self, y: f64, n: f64) -> (f64, f64) {
        (SVG_MARGIN + (y - self.y0) * self.sy, SVG_SIZE - SVG_MARGIN - (n - self.n0) * self.sn)
    }
}

fn polyline(out: &mut String, frame: &Frame, class: &str, pts: impl Iterator<Item = (f64, f64)>) {
    let coords: Vec<String> = pts
        .map(|(y, n)| {
            let (px, py) = frame.map(y, n);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    if coords.len() > 1 {
        let _ = writeln!(out, r#"<polyline class="{class}" points="{}"/>"#, coords.join(" "));
    }
}

pub fn to_svg(p: &Portrait, samples: usize) -> String {
    let frame = Frame::new(p);
    let w = p.window;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SVG_SIZE
    );
    out.push_str(concat!(
        "<style>",
        ".arrow{stroke:#999;stroke-width:1}",
        ".parabola{fill:none;stroke:#c0392b;stroke-width:1.5;stroke-dasharray:6 3}",
        ".trajectory{fill:none;stroke:#1f4e79;stroke-width:1.2}",
        ".fixed-point{stroke:#000;stroke-width:1}",
        "text{font-family:sans-serif;font-size:12px}",
        "</style>\n"
    ));
    let (x0, y0) = frame.map(w.y_min, w.n_max);
    let side = SVG_SIZE - 2.0 * SVG_MARGIN;
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="black"/>"#
    );

    let cell = (side / (p.directions.len() as f64).sqrt().max(1.0)) * 0.35;
    for d in &p.directions {
        let (px, py) = frame.map(d.y, d.n0);
        let (dx, dy) = (d.dy * cell, -d.dn0 * cell);
        let _ = writeln!(
            out,
            r#"<line class="arrow" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            px - 0.5 * dx,
            py - 0.5 * dy,
            px + 0.5 * dx,
            py + 0.5 * dy
        );
    }
    for piece in &p.parabola {
        polyline(&mut out, &frame, "parabola", piece.iter().copied());
    }
    for t in &p.trajectories {
        polyline(&mut out, &frame, "trajectory", t.samples(samples).into_iter().map(|(_, y, n)| (y, n)));
    }
    for f in &p.fixed_points {
        let (px, py) = frame.map(f.y, f.n0);
        let fill = match f.class.as_str() {
            "saddle" => "#ffffff",
            "centre" => "#f1c40f",
            _ => "#e67e22",
        };
        let _ = writeln!(
            out,
            r#"<circle class="fixed-point" cx="{px:.2}" cy="{py:.2}" r="5" fill="{fill}"><title>{} ({:.4}, {:.4})</title></circle>"#,
            f.class, f.y, f.n0
        );
    }
    let bottom = SVG_SIZE - SVG_MARGIN + 18.0;
    let _ = writeln!(out, r#"<text x="{:.2}" y="{bottom:.2}" text-anchor="middle">y</text>"#, SVG_SIZE / 2.0);
    let _ = writeln!(out, r#"<text x="14" y="{:.2}" text-anchor="middle">N0</text>"#, SVG_SIZE / 2.0);
    let _ = writeln!(out, r#"<text x="{SVG_MARGIN:.2}" y="{bottom:.2}">{}</text>"#, w.y_min);
    let _ =
        writeln!(out, r#"<text x="{:.2}" y="{bottom:.2}" text-anchor="end">{}</text>"#, SVG_SIZE - SVG_MARGIN, w.y_max);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" text-anchor="middle">A = {}, B = {}</text>"#,
        SVG_SIZE / 2.0,
        p.params.a,
        p.params.b
    );
    out.push_str("</svg>\n");
    out
}
