//! Bare-bones SVG line charts. Output is a pure function of the input.

use std::fmt::Write as _;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers instead of a polyline.
    pub markers: bool,
}

impl Series {
    pub fn line(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            markers: false,
        }
    }

    pub fn markers(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
            markers: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_y: bool,
}

impl Chart {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn labels(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn to_svg(&self, width: f64, height: f64) -> String {
        grid_svg(std::slice::from_ref(self), 1, width, height)
    }

    fn y_of(&self, y: f64) -> Option<f64> {
        if self.log_y {
            (y > 0.0).then(|| y.log10())
        } else {
            Some(y)
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in self.series.iter().flat_map(|s| s.points.iter()) {
            if let (true, Some(y)) = (x.is_finite(), self.y_of(*y).filter(|v| v.is_finite())) {
                b.0 = b.0.min(*x);
                b.1 = b.1.max(*x);
                b.2 = b.2.min(y);
                b.3 = b.3.max(y);
            }
        }
        if !b.0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if b.1 - b.0 <= 0.0 {
            b.0 -= 0.5;
            b.1 += 0.5;
        }
        if b.3 - b.2 <= 0.0 {
            b.2 -= 0.5;
            b.3 += 0.5;
        }
        b
    }

    fn render(&self, out: &mut String, ox: f64, oy: f64, w: f64, h: f64) {
        let (ml, mr, mt, mb) = (60.0, 10.0, 28.0, 40.0);
        let (pw, ph) = (w - ml - mr, h - mt - mb);
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| ox + ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| oy + mt + ph - (y - y0) / (y1 - y0) * ph;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#444"/>"##,
            ox + ml,
            oy + mt
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            ox + w / 2.0,
            oy + 18.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            ox + ml + pw / 2.0,
            oy + h - 6.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            ox + 14.0,
            oy + mt + ph / 2.0,
            ox + 14.0,
            oy + mt + ph / 2.0,
            escape(&self.y_label)
        );
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let ylab = if self.log_y { 10f64.powf(fy) } else { fy };
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle">{}</text>"#,
                sx(fx),
                oy + mt + ph + 13.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="end">{}</text>"#,
                ox + ml - 4.0,
                sy(fy) + 3.0,
                tick(ylab)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter_map(|&(x, y)| self.y_of(y).filter(|v| v.is_finite() && x.is_finite()).map(|y| (sx(x), sy(y))))
                .collect();
            if s.markers {
                for (x, y) in &pts {
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
                }
            } else if !pts.is_empty() {
                let mut d = String::new();
                for (x, y) in &pts {
                    let _ = write!(d, "{x:.2},{y:.2} ");
                }
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                    d.trim_end()
                );
            }
            let ly = oy + mt + 12.0 + 12.0 * i as f64;
            let lx = ox + ml + pw - 110.0;
            let _ = writeln!(
                out,
                r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="3" fill="{color}"/><text x="{:.2}" y="{ly:.2}" font-size="9">{}</text>"#,
                ly - 4.0,
                lx + 14.0,
                escape(&s.name)
            );
        }
    }
}

/// Charts laid out row-major in `cols` columns, each `width × height`.
pub fn grid_svg(charts: &[Chart], cols: usize, width: f64, height: f64) -> String {
    let cols = cols.max(1);
    let rows = charts.len().div_ceil(cols).max(1);
    let (tw, th) = (width * cols as f64, height * rows as f64);
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{tw:.0}" height="{th:.0}" viewBox="0 0 {tw:.0} {th:.0}">"#
    );
    out.push('\n');
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, c) in charts.iter().enumerate() {
        let (r, col) = (i / cols, i % cols);
        c.render(&mut out, col as f64 * width, r as f64 * height, width, height);
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
