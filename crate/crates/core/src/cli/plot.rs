//! Two-feature scatter plot with decision boundaries, as plain SVG text.

use std::fmt::Write;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 40.0;
const POSITIVE: &str = "#1f77b4";
const NEGATIVE: &str = "#ff7f0e";
pub const REFERENCE_COLOR: &str = "black";
pub const MODEL_COLOR: &str = "magenta";

/// A boundary `{x : x . normal = 0}` to draw.
#[derive(Debug, Clone)]
pub struct Separator {
    pub normal: [f64; 2],
    pub color: &'static str,
    pub label: String,
}

struct Frame {
    half_x: f64,
    half_y: f64,
}

impl Frame {
    /// Symmetric about the origin, so boundaries through it sit in the middle.
    fn fit(data: &Dataset) -> Frame {
        let x = data.x();
        let max_abs = |j: usize| x.column(j).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let pad = |v: f64| if v > 0.0 { v * 1.05 } else { 1.0 };
        Frame { half_x: pad(max_abs(0)), half_y: pad(max_abs(1)) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x + self.half_x) / (2.0 * self.half_x) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y + self.half_y) / (2.0 * self.half_y) * (HEIGHT - 2.0 * MARGIN)
    }

    /// Endpoints of the boundary clipped to the frame.
    fn clip(&self, normal: [f64; 2]) -> Option<((f64, f64), (f64, f64))> {
        let dir = [-normal[1], normal[0]];
        let mut t = f64::INFINITY;
        if dir[0] != 0.0 {
            t = t.min(self.half_x / dir[0].abs());
        }
        if dir[1] != 0.0 {
            t = t.min(self.half_y / dir[1].abs());
        }
        t.is_finite().then(|| ((-t * dir[0], -t * dir[1]), (t * dir[0], t * dir[1])))
    }
}

/// Renders the samples coloured by class plus one line per separator.
pub fn render_svg(data: &Dataset, separators: &[Separator]) -> Result<String> {
    if data.p() != 2 {
        return Err(Error::Input(format!("plotting needs exactly 2 features, data has {}", data.p())));
    }
    let frame = Frame::fit(data);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );

    let _ = writeln!(s, r#"<g fill-opacity="0.5">"#);
    for (i, &label) in data.y().iter().enumerate() {
        let row = data.x().row(i);
        let color = if label > 0.0 { POSITIVE } else { NEGATIVE };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
            frame.px(row[0]),
            frame.py(row[1])
        );
    }
    let _ = writeln!(s, "</g>");

    for sep in separators {
        if let Some(((x0, y0), (x1, y1))) = frame.clip(sep.normal) {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/>"#,
                frame.px(x0),
                frame.py(y0),
                frame.px(x1),
                frame.py(y1),
                sep.color
            );
        }
    }

    let mut legend_y = MARGIN + 16.0;
    for sep in separators {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{legend_y:.2}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            MARGIN + 8.0,
            sep.color,
            escape(&sep.label)
        );
        legend_y += 16.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{legend_y:.2}" font-family="sans-serif" font-size="11" fill="dimgray">boundaries pass through the origin (no intercept)</text>"#,
        MARGIN + 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">x1</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">x2</text>"#,
        HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
