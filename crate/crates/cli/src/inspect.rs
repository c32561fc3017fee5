use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use compliant_core::{Channel, LearnReport};
use nalgebra::Vector2;

use crate::{fail, Failure, ReportFile};

#[derive(Clone, Copy, ValueEnum)]
pub enum What {
    /// Angle-space rectangles, inliers and their intersection.
    Rectangles,
    /// Per-step work of both channels.
    Workseries,
    /// Demonstration means and principal axes.
    Pca,
}

impl What {
    fn name(self) -> &'static str {
        match self {
            What::Rectangles => "rectangles",
            What::Workseries => "workseries",
            What::Pca => "pca",
        }
    }
}

fn load(path: &Path) -> Result<ReportFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    if let Ok(file) = serde_json::from_str::<ReportFile>(&text) {
        return Ok(file);
    }
    // a bare report has no recorded seed
    let report: LearnReport = serde_json::from_str(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    Ok(ReportFile { seed: 0, report })
}

pub fn run(path: &Path, what: What, channel: Channel, out: Option<&Path>) -> Result<u8, Failure> {
    let file = load(path)?;
    let r = file.report.channel(channel);
    let (csv, svg) = match what {
        What::Rectangles => {
            let d = r.direction.as_ref().ok_or_else(|| {
                fail(2, format!("report has no {channel} direction stage (3-DOF compliant or stationary channel)"))
            })?;
            rectangles(d)
        }
        What::Workseries => workseries(&file.report)?,
        What::Pca => {
            let c = r
                .compliance
                .as_ref()
                .ok_or_else(|| fail(2, format!("report has no {channel} compliance stage (3-DOF compliant or stationary channel)")))?;
            pca(c)
        }
    };
    let csv_path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("{}.csv", what.name())));
    let svg_path = csv_path.with_extension("svg");
    let header = format!("# seed={}\n", file.seed);
    crate::write_file(&csv_path, &(header + &csv))?;
    crate::write_file(&svg_path, &svg)?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(0)
}

fn vertex_list(v: &[Vector2<f64>]) -> String {
    v.iter().map(|p| format!("{} {}", p.x, p.y)).collect::<Vec<_>>().join(";")
}

/// One polygon per row; the intersection comes last.
fn rectangles(d: &compliant_core::direction::DesiredDirectionResult) -> (String, String) {
    let mut csv = String::from("kind,step,inlier,center_x,center_y,radius,vertices\n");
    let mut plot = Plot::default();
    for (i, rect) in d.rectangles.iter().enumerate() {
        let inlier = d.inliers.contains(&i);
        let v = rect.corners.vertices();
        let _ = writeln!(csv, "rectangle,{},{},,,,{}", rect.step_index, inlier as u8, vertex_list(v));
        plot.polygon(v, if inlier { "#3b6fb6" } else { "#b0b0b0" }, "none");
    }
    let v = d.intersection.vertices();
    let c = d.chebyshev_center;
    let _ = writeln!(csv, "intersection,,,{},{},{},{}", c.x, c.y, d.chebyshev_radius, vertex_list(v));
    plot.polygon(v, "#c0392b", "#c0392b55");
    plot.circle(c, d.chebyshev_radius, "#c0392b");
    (csv, plot.render("angle-space rectangles (rad)"))
}

fn workseries(report: &LearnReport) -> Result<(String, String), Failure> {
    let wt = &report.translation.work.per_step_work;
    let wr = &report.rotation.work.per_step_work;
    if wt.is_empty() {
        return Err(fail(2, "report holds no work series"));
    }
    let mut csv = String::from("step,w_translation,w_rotation,cum_translation,cum_rotation\n");
    let (mut ct, mut cr) = (0.0, 0.0);
    let mut lines = [Vec::new(), Vec::new()];
    for i in 0..wt.len().max(wr.len()) {
        let a = wt.get(i).copied().unwrap_or(0.0);
        let b = wr.get(i).copied().unwrap_or(0.0);
        ct += a;
        cr += b;
        let _ = writeln!(csv, "{i},{a},{b},{ct},{cr}");
        lines[0].push(Vector2::new(i as f64, ct));
        lines[1].push(Vector2::new(i as f64, cr));
    }
    let mut plot = Plot::default();
    plot.polyline(&lines[0], "#3b6fb6");
    plot.polyline(&lines[1], "#c0392b");
    Ok((csv, plot.render("cumulative work: translation (blue), rotation (red)")))
}

fn pca(c: &compliant_core::compliance::ComplianceResult) -> (String, String) {
    let mut csv = String::from("kind,index,x,y,z,value\n");
    for (i, m) in c.means.iter().enumerate() {
        let _ = writeln!(csv, "mean,{i},{},{},{},{}", m.x, m.y, m.z, c.residuals[i].norm());
    }
    for (i, e) in c.eigenvectors.iter().enumerate() {
        let _ = writeln!(csv, "eigenvector,{i},{},{},{},{}", e.x, e.y, e.z, c.eigenvalues[i]);
    }
    for (i, a) in c.axes.iter().enumerate() {
        let _ = writeln!(csv, "axis,{i},{},{},{},", a.x, a.y, a.z);
    }
    for (d, b) in c.bic.iter().enumerate() {
        if let Some(b) = b {
            let _ = writeln!(csv, "bic,{d},,,,{b}");
        }
    }
    // means seen in the plane of the two leading eigenvectors
    let (e0, e1) = (c.eigenvectors[0], c.eigenvectors[1]);
    let mut plot = Plot::default();
    plot.segment(Vector2::zeros(), Vector2::new(1.0, 0.0), "#c0392b");
    plot.segment(Vector2::zeros(), Vector2::new(0.0, 1.0), "#e67e22");
    for m in &c.means {
        plot.circle(Vector2::new(m.dot(&e0), m.dot(&e1)), 0.0, "#3b6fb6");
    }
    (csv, plot.render(&format!("means on the leading eigenvectors, D = {}", c.n_axes)))
}

/// Minimal SVG canvas in data coordinates.
#[derive(Default)]
struct Plot {
    items: Vec<Item>,
}

enum Item {
    Polygon(Vec<Vector2<f64>>, &'static str, &'static str),
    Polyline(Vec<Vector2<f64>>, &'static str),
    Circle(Vector2<f64>, f64, &'static str),
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 30.0;

impl Plot {
    fn polygon(&mut self, v: &[Vector2<f64>], stroke: &'static str, fill: &'static str) {
        self.items.push(Item::Polygon(v.to_vec(), stroke, fill));
    }

    fn polyline(&mut self, v: &[Vector2<f64>], stroke: &'static str) {
        self.items.push(Item::Polyline(v.to_vec(), stroke));
    }

    fn segment(&mut self, a: Vector2<f64>, b: Vector2<f64>, stroke: &'static str) {
        self.polyline(&[a, b], stroke);
    }

    /// A radius of zero draws a fixed-size marker.
    fn circle(&mut self, c: Vector2<f64>, r: f64, stroke: &'static str) {
        self.items.push(Item::Circle(c, r, stroke));
    }

    fn bounds(&self) -> (Vector2<f64>, Vector2<f64>) {
        let mut lo = Vector2::repeat(f64::INFINITY);
        let mut hi = Vector2::repeat(f64::NEG_INFINITY);
        let mut add = |p: Vector2<f64>, r: f64| {
            lo = lo.inf(&(p - Vector2::repeat(r)));
            hi = hi.sup(&(p + Vector2::repeat(r)));
        };
        for item in &self.items {
            match item {
                Item::Polygon(v, ..) | Item::Polyline(v, _) => v.iter().for_each(|p| add(*p, 0.0)),
                Item::Circle(c, r, _) => add(*c, *r),
            }
        }
        if !lo.x.is_finite() {
            return (Vector2::zeros(), Vector2::repeat(1.0));
        }
        let span = (hi - lo).map(|s| if s > 0.0 { s } else { 1.0 });
        (lo, lo + span)
    }

    fn render(&self, title: &str) -> String {
        let (lo, hi) = self.bounds();
        let scale = (SIZE - 2.0 * MARGIN) / (hi - lo).max();
        // y grows upward in data, downward in SVG
        let map = |p: &Vector2<f64>| (MARGIN + (p.x - lo.x) * scale, SIZE - MARGIN - (p.y - lo.y) * scale);
        let points = |v: &[Vector2<f64>]| {
            v.iter().map(&map).map(|(x, y)| format!("{x:.2},{y:.2}")).collect::<Vec<_>>().join(" ")
        };
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"{MARGIN}\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">{title}</text>\n"
        );
        for item in &self.items {
            let _ = match item {
                Item::Polygon(v, stroke, fill) => {
                    writeln!(s, "<polygon points=\"{}\" stroke=\"{stroke}\" fill=\"{fill}\"/>", points(v))
                }
                Item::Polyline(v, stroke) => {
                    writeln!(s, "<polyline points=\"{}\" stroke=\"{stroke}\" fill=\"none\"/>", points(v))
                }
                Item::Circle(c, r, stroke) => {
                    let (x, y) = map(c);
                    let r = if *r > 0.0 { r * scale } else { 3.0 };
                    writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" stroke=\"{stroke}\" fill=\"none\"/>")
                }
            };
        }
        s + "</svg>\n"
    }
}
